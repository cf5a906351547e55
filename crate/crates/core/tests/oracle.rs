use homcount::corpus::{bipartisation, hadamard};
use homcount::cyclotomic::{make_root, CycNum};
use homcount::formats::parse_matrix;
use homcount::model::*;
use homcount::oracle::*;

fn guard() -> SizeGuard {
    SizeGuard::default()
}

/// Direct sum over all maps, multiplying cyclotomic entries edge by edge.
fn naive(a: &PureMatrix, g: &MultiGraph) -> CycNum {
    let l = a.working_conductor();
    let n = g.vertex_count();
    let m = a.dim();
    let mut total = CycNum::zero(l);
    let mut xi = vec![0usize; n];
    loop {
        let mut w = CycNum::one(l);
        for e in g.edges() {
            w = &w * &a.get(xi[e.u], xi[e.v]).to_cycnum(l).pow(e.mult);
        }
        total = &total + &w;
        let mut k = 0;
        while k < n {
            xi[k] += 1;
            if xi[k] < m {
                break;
            }
            xi[k] = 0;
            k += 1;
        }
        if k == n {
            return total;
        }
    }
}

fn graph(n: usize, edges: &[(usize, usize, u64)]) -> MultiGraph {
    MultiGraph::with_edges(n, edges).unwrap()
}

#[test]
fn matrix_components() {
    let d = parse_matrix("matrix 2\n0 0 1\n1 1 1\n").unwrap();
    assert_eq!(components(&d).len(), 2);
    assert_eq!(components(&hadamard()).len(), 1);
    let mixed = parse_matrix("matrix 3\n0 1 1\n2 2 2\n").unwrap();
    let parts = components(&mixed);
    assert_eq!(parts.iter().map(|c| c.indices.len()).collect::<Vec<_>>(), vec![2, 1]);
    assert_eq!(parts[1].indices, vec![2]);
}

#[test]
fn bipartite_detection() {
    let swap = parse_matrix("matrix 2\n0 1 1\n").unwrap();
    match bipartite_split(&swap) {
        BipartiteSplit::Bipartite { left, right, block } => {
            assert_eq!((left, right), (vec![0], vec![1]));
            assert_eq!(block, vec![vec![swap.get(0, 1).clone()]]);
        }
        BipartiteSplit::NonBipartite => panic!("swap matrix is bipartite"),
    }
    assert_eq!(bipartite_split(&hadamard()), BipartiteSplit::NonBipartite);
    let f = homcount::corpus::fourier(3);
    match bipartite_split(&bipartisation(&f)) {
        BipartiteSplit::Bipartite { block, .. } => assert_eq!(block, f),
        BipartiteSplit::NonBipartite => panic!("bipartisation is bipartite"),
    }
}

#[test]
fn graph_pieces() {
    assert_eq!(graph_components(&MultiGraph::new(3)).len(), 3);
    let g = graph(5, &[(0, 1, 1), (2, 3, 1), (3, 4, 1), (2, 4, 1)]);
    assert_eq!(graph_components(&g).len(), 2);
    let lp = graph(1, &[(0, 0, 1)]);
    assert_eq!(graph_components(&lp).len(), 1);
    assert_eq!(lp.degrees(), vec![2]);
}

#[test]
fn frozen_small_values() {
    let vc = parse_matrix("matrix 2\n0 1 1\n1 1 1\n").unwrap();
    let k2 = graph(2, &[(0, 1, 1)]);
    assert_eq!(brute_eval_a(&vc, &k2, &guard()).unwrap(), CycNum::from_int(3, 1));
    assert_eq!(brute_eval_a(&hadamard(), &k2, &guard()).unwrap(), CycNum::from_int(2, 2));
    let f3 = bipartisation(&homcount::corpus::fourier(3));
    assert_eq!(brute_eval_a(&f3, &MultiGraph::new(4), &guard()).unwrap(), CycNum::from_int(1296, 3));
}

#[test]
fn brute_matches_naive_enumeration() {
    let mats = [
        "matrix 2\n0 0 1\n0 1 1\n1 1 -1\n",
        "matrix 3\n0 0 2/3\n0 1 1*w(3,1)\n1 2 -1/2\n2 2 1*w(8,3)\n",
        "matrix 2\n0 1 3\n1 1 1*w(5,2)\n",
    ];
    let gs = [
        graph(3, &[(0, 1, 2), (1, 2, 1), (0, 0, 1)]),
        graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 3), (0, 3, 1)]),
        graph(2, &[]),
    ];
    for t in mats {
        let a = parse_matrix(t).unwrap();
        for g in &gs {
            assert_eq!(brute_eval_a(&a, g, &guard()).unwrap(), naive(&a, g), "{t}");
        }
    }
}

#[test]
fn weight_histogram() {
    let k2 = graph(2, &[(0, 1, 1)]);
    let hist = count_by_weight(&hadamard(), &k2, &guard()).unwrap();
    assert_eq!(hist.len(), 2);
    assert_eq!(hist[&CycNum::from_int(1, 2)], 3);
    assert_eq!(hist[&CycNum::from_int(-1, 2)], 1);
    let empty = count_by_weight(&hadamard(), &MultiGraph::new(3), &guard()).unwrap();
    assert_eq!(empty.values().copied().collect::<Vec<_>>(), vec![8]);
}

#[test]
fn pair_with_diagonal_weights() {
    // C = bipartisation of [1], D^[r] = diag(1, (-1)^r), G = K_2: both maps are
    // (0,1) and (1,0), each with one vertex of degree 1 on index 1
    let one = CycNum::one(2);
    let c = vec![vec![CycNum::zero(2), one.clone()], vec![one.clone(), CycNum::zero(2)]];
    let d = vec![vec![one.clone(), one.clone()], vec![one.clone(), make_root(2, 1)]];
    let p = EvalPair::new(c.clone(), d).unwrap();
    let k2 = graph(2, &[(0, 1, 1)]);
    assert_eq!(brute_eval_cd(&p, &k2, &guard()).unwrap(), CycNum::from_int(-2, 2));
    assert_eq!(brute_z_arrow(&p, &k2, 0, &guard()).unwrap(), CycNum::from_int(-1, 2));
    let plain = EvalPair::new(c, vec![vec![one.clone(), one]]).unwrap();
    let swap = parse_matrix("matrix 2\n0 1 1\n").unwrap();
    let diff = &brute_eval_cd(&plain, &k2, &guard()).unwrap() - &brute_eval_a(&swap, &k2, &guard()).unwrap();
    assert!(diff.is_zero());
}

#[test]
fn arrow_halves_sum_to_total() {
    let p = EvalPair::from_matrix(&bipartisation(&homcount::corpus::fourier(3)));
    let g = graph(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 1)]);
    for u in 0..4 {
        let sum = &brute_z_arrow(&p, &g, u, &guard()).unwrap() + &brute_z_back(&p, &g, u, &guard()).unwrap();
        assert_eq!(sum, brute_eval_cd(&p, &g, &guard()).unwrap());
    }
    assert!(brute_z_arrow(&p, &g, 9, &guard()).is_err());
}

#[test]
fn edgeless_graphs_count_maps() {
    let a = parse_matrix("matrix 3\n0 0 1*w(3,1)\n1 2 2\n").unwrap();
    for n in 0..5 {
        let z = brute_eval_a(&a, &MultiGraph::new(n), &guard()).unwrap();
        assert_eq!(z.rational_value().unwrap(), homcount::cyclotomic::Rational::from_integer(3u64.pow(n as u32).into()));
    }
}

#[test]
fn size_guard_refuses_large_enumerations() {
    let g = graph(25, &(0..24).map(|i| (i, i + 1, 1)).collect::<Vec<_>>());
    match brute_eval_a(&hadamard(), &g, &guard()) {
        Err(OracleError::SizeGuard { work, .. }) => assert_eq!(work, 1 << 25),
        other => panic!("expected SizeGuard, got {other:?}"),
    }
    let small = graph(12, &(0..11).map(|i| (i, i + 1, 1)).collect::<Vec<_>>());
    assert!(brute_eval_a(&hadamard(), &small, &SizeGuard::new(1 << 12)).is_ok());
    assert!(brute_eval_a(&hadamard(), &small, &SizeGuard::new((1 << 12) - 1)).is_err());
}
