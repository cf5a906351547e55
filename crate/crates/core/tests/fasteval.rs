use homcount::corpus::*;
use homcount::cyclotomic::{CycNum, Rational};
use homcount::dichotomy::{decide, Certificate, ComponentBody, StructuredComponent, Verdict};
use homcount::fasteval::*;
use homcount::formats::parse_matrix;
use homcount::model::{MultiGraph, PureMatrix};
use homcount::oracle::{brute_eval_a, SizeGuard};
use num_bigint::BigInt;

fn graph(n: usize, edges: &[(usize, usize, u64)]) -> MultiGraph {
    MultiGraph::with_edges(n, edges).unwrap()
}

fn brute(a: &PureMatrix, g: &MultiGraph) -> CycNum {
    brute_eval_a(a, g, &SizeGuard::default()).unwrap()
}

fn certificate(a: &PureMatrix) -> Certificate {
    match decide(a) {
        Verdict::Tractable(c) => c,
        Verdict::PHard(w) => panic!("expected tractable, got {w}"),
    }
}

fn structured(c: &Certificate) -> &StructuredComponent {
    match &c.components[0].body {
        ComponentBody::Structured(s) => s,
        ComponentBody::Single { .. } => panic!("single index component"),
    }
}

#[test]
fn small_graph_values() {
    let c4 = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]);
    assert_eq!(eval(&hadamard(), &c4).unwrap(), brute(&hadamard(), &c4));
    let k23 = graph(5, &[(0, 2, 1), (0, 3, 1), (0, 4, 1), (1, 2, 1), (1, 3, 1), (1, 4, 1)]);
    let f3 = bipartisation(&fourier(3));
    assert_eq!(eval(&f3, &k23).unwrap(), brute(&f3, &k23));
}

#[test]
fn edgeless_graphs() {
    for e in canonical_corpus().into_iter().filter(|e| e.expected.is_none()) {
        for n in 0..4 {
            let z = eval(&e.matrix, &MultiGraph::new(n)).unwrap();
            let m = e.matrix.dim() as u64;
            assert_eq!(z.rational_value().unwrap(), Rational::from_integer(BigInt::from(m.pow(n as u32))));
        }
    }
}

#[test]
fn odd_induced_subgraphs() {
    let g = graph(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (0, 4, 1), (0, 2, 1)]);
    let mut odd = 0i64;
    for s in 0u32..32 {
        let inside = g.edges().iter().filter(|e| s >> e.u & 1 == 1 && s >> e.v & 1 == 1).count();
        odd += (inside % 2) as i64;
    }
    let z = eval(&hadamard(), &g).unwrap().rational_value().unwrap();
    assert_eq!((Rational::from_integer(BigInt::from(32)) - z) / Rational::from_integer(BigInt::from(2)), Rational::from_integer(BigInt::from(odd)));
}

#[test]
fn vertex_polynomials() {
    let a = twist(&hadamard(), &[(1, 0), (4, 1)]);
    let cert = certificate(&a);
    let sc = structured(&cert);
    for (r, at_one) in [(2u64, 2u64), (1, 1), (3, 3)] {
        let cd = sc.structure.classes.iter().find(|c| c.side == 0 && c.r == r).unwrap();
        let part = &cd.primes[0];
        assert_eq!(part.pi_hat, 4);
        let f = build_vertex_poly(sc, 0, r, part).unwrap();
        assert_eq!(f.modulus(), 4);
        // pointwise: ω_4^{f(x)} reproduces Y' at τ(x)
        for x in 0..4u64 {
            let point = part.map.apply(&[x]);
            let class = sc.structure.fourier.coords[0].iter().position(|c| *c == point).unwrap();
            let y = sc.structure.y[0][r as usize][class].unwrap();
            assert_eq!(f.eval(&[x]) * (sc.n_prime / 4) % sc.n_prime, y);
        }
        // Y' = (1, ω_4^r); for r = 2 this is 2x^2, which equals 2x on Z_4
        assert_eq!(f.eval(&[1]), at_one);
    }
    // trivial diagonal gives the zero polynomial
    let cd = sc.structure.classes.iter().find(|c| c.side == 0 && c.r == 0).unwrap();
    let f = build_vertex_poly(sc, 0, 0, &cd.primes[0]).unwrap();
    assert_eq!((f.quad_terms().count(), f.lin_terms().count(), f.constant()), (0, 0, 0));
}

#[test]
fn edge_polynomial_of_a_fourier_pair() {
    // bipartisation of F_3 with trivial cosets: the edge term is x y over Z_3 up to the
    // lift to π̂ = 3
    let a = bipartisation(&fourier(3));
    let cert = certificate(&a);
    let sc = structured(&cert);
    let cu = sc.structure.classes.iter().find(|c| c.side == 0 && c.r == 1).unwrap();
    let cv = sc.structure.classes.iter().find(|c| c.side == 1 && c.r == 1).unwrap();
    let (pu, pv) = (&cu.primes[0], &cv.primes[0]);
    let mut f = homcount::gausssum::QuadPoly::new(pu.pi_hat, 2).unwrap();
    build_edge_poly(&mut f, &sc.structure.fourier, &pu.coords, (pu, 0), (pv, 1), 1);
    for x in 0..3u64 {
        for y in 0..3u64 {
            let (px, py) = (pu.map.apply(&[x]), pv.map.apply(&[y]));
            let e = sc.structure.fourier.pairing(&px, &py, sc.n_prime);
            assert_eq!(f.eval(&[x, y]) * (sc.n_prime / pu.pi_hat) % sc.n_prime, e);
        }
    }
    assert_eq!(f.constant(), sc.structure.fourier.pairing(&pu.map.offset, &pv.map.offset, pu.pi_hat));
}

#[test]
fn rank_one_closed_form() {
    let a = parse_matrix("matrix 2\n0 0 4\n0 1 2\n1 1 1\n").unwrap();
    let cert = certificate(&a);
    let sc = structured(&cert);
    assert_eq!(rank1_closed_form(sc, &[0], &[0]), CycNum::from_int(2, 1));
    // one vertex of degree 3: 1 + (1/2)^3
    let z = rank1_closed_form(sc, &[0], &[3]);
    assert_eq!(z.rational_value().unwrap(), Rational::new(BigInt::from(9), BigInt::from(8)));
    let star = graph(4, &[(0, 1, 1), (0, 2, 2), (0, 3, 1)]);
    let degrees = star.degrees();
    let closed = rank1_closed_form(sc, &[0; 4], &degrees).scale(&Rational::from_integer(BigInt::from(4).pow(4)));
    assert!((&closed - &brute(&a, &star)).is_zero());
    let trivial = certificate(&parse_matrix("matrix 2\n0 0 1\n0 1 1\n1 1 1\n").unwrap());
    assert!(rank1_closed_form(structured(&trivial), &[0, 0], &[2, 5]).rational_value().unwrap() == Rational::from_integer(BigInt::from(4)));
}

#[test]
fn disconnected_graphs_and_loops() {
    let g = graph(6, &[(0, 1, 2), (1, 1, 1), (2, 3, 1), (3, 4, 1), (2, 4, 1)]);
    for e in canonical_corpus().into_iter().filter(|e| e.expected.is_none()) {
        assert_eq!(eval(&e.matrix, &g).unwrap(), brute(&e.matrix, &g), "{}", e.name);
    }
}

#[test]
fn errors() {
    let vc = parse_matrix("matrix 2\n0 1 1\n1 1 1\n").unwrap();
    assert!(matches!(eval(&vc, &MultiGraph::new(1)), Err(EvalError::NotTractable(_))));
    let mut cert = certificate(&hadamard());
    cert.dim = 3;
    assert!(matches!(
        eval_with_certificate(&hadamard(), &cert, &MultiGraph::new(1)),
        Err(EvalError::InvalidCertificate(_))
    ));
}

#[test]
fn corpus_against_brute_force() {
    let suite = graph_suite(30, 6, 12, 99);
    for e in canonical_corpus().into_iter().filter(|e| e.expected.is_none()) {
        let plan = EvalPlan::from_matrix(&e.matrix).unwrap();
        for g in &suite {
            assert_eq!(plan.eval(g), brute(&e.matrix, g), "{} on {g:?}", e.name);
        }
    }
}

#[test]
fn large_graphs_run_without_enumeration() {
    let n = 300;
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1 + (i as u64 % 3))).collect();
    let g = graph(n, &edges);
    let z = eval(&bipartisation(&fourier(3)), &g).unwrap();
    assert!(!z.is_zero());
}
