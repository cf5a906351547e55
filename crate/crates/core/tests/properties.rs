use std::collections::HashMap;

use homcount::corpus::*;
use homcount::cyclotomic::{make_root, CycNum, Rational};
use homcount::dichotomy::{decide, Verdict};
use homcount::fasteval::{eval, EvalPlan};
use homcount::formats::*;
use homcount::gausssum::{eval_gauss_sum, QuadPoly};
use homcount::lattice::*;
use homcount::model::*;
use homcount::oracle::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const POOL: [&str; 11] = [
    "1", "-1", "1*w(4,1)", "1*w(4,3)", "2", "1/2", "0", "1*w(8,1)", "1*w(3,1)", "1*w(6,1)", "3*w(3,2)",
];

fn guard() -> SizeGuard {
    SizeGuard::default()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(128)
}

fn matrix_from(dim: usize, picks: &[usize]) -> PureMatrix {
    let mut rows = vec![vec![PureEntry::zero(); dim]; dim];
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let e = parse_entry(POOL[picks[k] % POOL.len()], 0).unwrap();
            rows[i][j] = e.clone();
            rows[j][i] = e;
            k += 1;
        }
    }
    PureMatrix::from_rows(rows).unwrap()
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = PureMatrix> {
    (1..=max_dim).prop_flat_map(|m| {
        prop::collection::vec(0..POOL.len(), m * (m + 1) / 2).prop_map(move |p| matrix_from(m, &p))
    })
}

fn arb_graph(max_n: usize, max_edges: usize) -> impl Strategy<Value = MultiGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, 1..=2u64), 0..=max_edges).prop_map(move |es| {
            let es: Vec<_> = es.into_iter().map(|(u, v, m)| (u.min(v), u.max(v), m)).collect();
            MultiGraph::with_edges(n, &es).unwrap()
        })
    })
}

fn arb_connected(max_n: usize, extra: usize) -> impl Strategy<Value = MultiGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(any::<prop::sample::Index>(), n.saturating_sub(1)),
            prop::collection::vec((0..n, 0..n, 1..=2u64), 0..=extra),
        )
            .prop_map(move |(parents, es)| {
                let mut edges: Vec<_> = parents.iter().enumerate().map(|(v, p)| (p.index(v + 1), v + 1, 1)).collect();
                edges.extend(es.into_iter().map(|(u, v, m)| (u.min(v), u.max(v), m)));
                MultiGraph::with_edges(n, &edges).unwrap()
            })
    })
}

fn disjoint_union(a: &MultiGraph, b: &MultiGraph) -> MultiGraph {
    let off = a.vertex_count();
    let mut g = MultiGraph::new(off + b.vertex_count());
    for e in a.edges() {
        g.add_edge(e.u, e.v, e.mult).unwrap();
    }
    for e in b.edges() {
        g.add_edge(e.u + off, e.v + off, e.mult).unwrap();
    }
    g
}

fn same(a: &CycNum, b: &CycNum) -> bool {
    (a - b).is_zero()
}

fn entry_power(e: &PureEntry, p: u64) -> PureEntry {
    if e.is_zero() {
        return PureEntry::zero();
    }
    let m = e.magnitude();
    let mag = Rational::new(m.numer().pow(p as u32), m.denom().pow(p as u32));
    PureEntry::new(mag, e.root_order(), e.root_exp() * p % e.root_order()).unwrap()
}

fn entry_product(x: &PureEntry, y: &PureEntry) -> PureEntry {
    if x.is_zero() || y.is_zero() {
        return PureEntry::zero();
    }
    let o = x.root_order() * y.root_order();
    PureEntry::new(x.magnitude() * y.magnitude(), o, x.root_exp() * y.root_order() + y.root_exp() * x.root_order()).unwrap()
}

fn block_kron(f: &[Vec<PureEntry>], g: &[Vec<PureEntry>]) -> Vec<Vec<PureEntry>> {
    let (m1, n1, m2, n2) = (f.len(), f[0].len(), g.len(), g[0].len());
    (0..m1 * m2)
        .map(|r| (0..n1 * n2).map(|c| entry_product(&f[r / m2][c / n2], &g[r % m2][c % n2])).collect())
        .collect()
}

fn arb_block(max: usize) -> impl Strategy<Value = Vec<Vec<PureEntry>>> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(0..POOL.len() - 1, n), m).prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(|k| parse_entry(POOL[k], 0).unwrap()).collect())
                .collect()
        })
    })
}

fn label(v: &Verdict) -> String {
    match v {
        Verdict::Tractable(_) => "TRACTABLE".into(),
        Verdict::PHard(w) => w.label(),
    }
}

fn tractable_bases() -> Vec<PureMatrix> {
    canonical_corpus()
        .into_iter()
        .filter(|e| e.expected.is_none() && e.matrix.dim() <= 8)
        .map(|e| e.matrix)
        .collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn components_multiply(a in arb_matrix(3), g1 in arb_graph(3, 3), g2 in arb_graph(3, 3)) {
        let whole = brute_eval_a(&a, &disjoint_union(&g1, &g2), &guard()).unwrap();
        let parts = &brute_eval_a(&a, &g1, &guard()).unwrap() * &brute_eval_a(&a, &g2, &guard()).unwrap();
        prop_assert!(same(&whole, &parts));
    }

    #[test]
    fn matrix_components_add_on_connected_graphs(a in arb_matrix(2), b in arb_matrix(2), g in arb_connected(4, 3)) {
        // Z_{A ⊕ B}(G) = Z_A(G) + Z_B(G) for connected G
        let (m, n) = (a.dim(), b.dim());
        let mut rows = vec![vec![PureEntry::zero(); m + n]; m + n];
        for i in 0..m { for j in 0..m { rows[i][j] = a.get(i, j).clone(); } }
        for i in 0..n { for j in 0..n { rows[m + i][m + j] = b.get(i, j).clone(); } }
        let sum = PureMatrix::from_rows(rows).unwrap();
        let lhs = brute_eval_a(&sum, &g, &guard()).unwrap();
        let rhs = &brute_eval_a(&a, &g, &guard()).unwrap() + &brute_eval_a(&b, &g, &guard()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn arrow_split(f in arb_block(2), g in arb_connected(4, 3), u in any::<prop::sample::Index>()) {
        let p = EvalPair::from_matrix(&bipartisation(&f));
        let u = u.index(g.vertex_count());
        let total = brute_eval_cd(&p, &g, &guard()).unwrap();
        let split = &brute_z_arrow(&p, &g, u, &guard()).unwrap() + &brute_z_back(&p, &g, u, &guard()).unwrap();
        prop_assert!(same(&total, &split));
    }

    #[test]
    fn tensor_products_multiply(f1 in arb_block(2), f2 in arb_block(2), g in arb_connected(3, 2)) {
        // Z→ of the bipartisation of F1 ⊗ F2 factors (square blocks keep halves aligned)
        prop_assume!(f1.len() == f1[0].len() && f2.len() == f2[0].len());
        let c = EvalPair::from_matrix(&bipartisation(&block_kron(&f1, &f2)));
        let c1 = EvalPair::from_matrix(&bipartisation(&f1));
        let c2 = EvalPair::from_matrix(&bipartisation(&f2));
        let lhs = brute_z_arrow(&c, &g, 0, &guard()).unwrap();
        let rhs = &brute_z_arrow(&c1, &g, 0, &guard()).unwrap() * &brute_z_arrow(&c2, &g, 0, &guard()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn tensor_products_multiply_partition_functions(a in arb_matrix(2), b in arb_matrix(2), g in arb_graph(3, 3)) {
        let lhs = brute_eval_a(&kron(&a, &b), &g, &guard()).unwrap();
        let rhs = &brute_eval_a(&a, &g, &guard()).unwrap() * &brute_eval_a(&b, &g, &guard()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn thickening(a in arb_matrix(3), g in arb_graph(3, 3), p in 1..=3u64) {
        // Z_A(T_p G) = Z_{A^(p)}(G) with A^(p) the entrywise p-th power
        let mut thick = MultiGraph::new(g.vertex_count());
        for e in g.edges() {
            thick.add_edge(e.u, e.v, e.mult * p).unwrap();
        }
        let m = a.dim();
        let powered = PureMatrix::from_rows(
            (0..m).map(|i| (0..m).map(|j| entry_power(a.get(i, j), p)).collect()).collect(),
        ).unwrap();
        let lhs = brute_eval_a(&a, &thick, &guard()).unwrap();
        let rhs = brute_eval_a(&powered, &g, &guard()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn uniform_map_preimages(
        q_exp in 1..=2u32,
        p in prop::sample::select(vec![2u64, 3]),
        gens in prop::collection::vec(prop::collection::vec(0..9u64, 2), 0..3),
        rep in prop::collection::vec(0..9u64, 2),
    ) {
        let modulus = p.pow(q_exp);
        let moduli = vec![modulus, modulus];
        // close the generators into a subgroup, then shift by rep
        let mut group: Vec<Vec<u64>> = vec![vec![0, 0]];
        let mut changed = true;
        while changed {
            changed = false;
            for g in &gens {
                for h in group.clone() {
                    let s = vec![(h[0] + g[0]) % modulus, (h[1] + g[1]) % modulus];
                    if !group.contains(&s) {
                        group.push(s);
                        changed = true;
                    }
                }
            }
        }
        let points: Vec<Vec<u64>> = group.iter().map(|x| vec![(x[0] + rep[0]) % modulus, (x[1] + rep[1]) % modulus]).collect();
        let c = coset_detect(&points, &moduli).unwrap();
        prop_assert_eq!(c.size as usize, points.len());
        let pi_hat = modulus * p;
        let u = uniform_map(&c, pi_hat).unwrap();
        let s = u.num_vars() as u32;
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
        for code in 0..pi_hat.pow(s) {
            let x: Vec<u64> = (0..s).map(|i| code / pi_hat.pow(i) % pi_hat).collect();
            *counts.entry(u.apply(&x)).or_insert(0) += 1;
        }
        prop_assert_eq!(counts.len(), points.len());
        for (pt, k) in counts {
            prop_assert!(points.contains(&pt));
            prop_assert_eq!(BigInt::from(k), u.multiplicity.clone());
        }
    }

    #[test]
    fn saturation_laws(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..3)) {
        let l = IntLattice::from_i64(3, &rows);
        let s = saturate(&l);
        prop_assert_eq!(s.rank(), l.rank());
        for r in &rows {
            let v: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            prop_assert!(s.contains(&v));
        }
        prop_assert_eq!(saturate(&s), s.clone());
        let mut full = s.basis().clone();
        full.extend(quotient_basis(&s));
        prop_assert_eq!(full.len(), 3);
        prop_assert!(det3(&full).abs().is_one());
    }

    #[test]
    fn verdicts_survive_permutation_and_scaling(a in arb_matrix(4), seed in any::<prop::sample::Index>(), c in 1..=5i64) {
        let m = a.dim();
        let mut images: Vec<usize> = (0..m).collect();
        let k = seed.index(m);
        images.rotate_left(k);
        if m > 2 { images.swap(0, m - 1); }
        let pa = a.permuted(&Permutation::new(images).unwrap());
        let scale = Rational::new(BigInt::from(c), BigInt::from(3));
        let ca = PureMatrix::from_rows(
            (0..m).map(|i| (0..m).map(|j| {
                let e = a.get(i, j);
                if e.is_zero() { PureEntry::zero() } else {
                    PureEntry::new(e.magnitude() * &scale, e.root_order(), e.root_exp()).unwrap()
                }
            }).collect()).collect(),
        ).unwrap();
        let base = label(&decide(&a));
        prop_assert_eq!(&label(&decide(&pa)), &base);
        prop_assert_eq!(&label(&decide(&ca)), &base);
    }

    #[test]
    fn fast_matches_brute_on_transformed_corpus(
        which in any::<prop::sample::Index>(),
        rot in any::<prop::sample::Index>(),
        c in 1..=4i64,
        g in arb_connected(4, 3),
    ) {
        let bases = tractable_bases();
        let a = &bases[which.index(bases.len())];
        let m = a.dim();
        let mut images: Vec<usize> = (0..m).collect();
        images.rotate_left(rot.index(m));
        let pa = a.permuted(&Permutation::new(images).unwrap());
        let scale = Rational::new(BigInt::from(c), BigInt::from(2));
        let ca = PureMatrix::from_rows(
            (0..m).map(|i| (0..m).map(|j| {
                let e = pa.get(i, j);
                if e.is_zero() { PureEntry::zero() } else {
                    PureEntry::new(e.magnitude() * &scale, e.root_order(), e.root_exp()).unwrap()
                }
            }).collect()).collect(),
        ).unwrap();
        let fast = eval(&ca, &g).unwrap();
        prop_assert_eq!(fast.clone(), brute_eval_a(&ca, &g, &guard()).unwrap());
        // positive scaling multiplies by c^|E|
        let unscaled = eval(a, &g).unwrap();
        let factor = Rational::new(BigInt::from(c).pow(g.total_multiplicity() as u32), BigInt::from(2).pow(g.total_multiplicity() as u32));
        prop_assert!(same(&fast, &unscaled.scale(&factor)));
    }

    #[test]
    fn tractable_random_matrices_evaluate_exactly(a in arb_matrix(4), g in arb_graph(4, 4)) {
        if let Ok(plan) = EvalPlan::from_matrix(&a) {
            prop_assert_eq!(plan.eval(&g), brute_eval_a(&a, &g, &guard()).unwrap());
        }
    }

    #[test]
    fn gauss_sums_match_enumeration(
        q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27]),
        n in 0..=3usize,
        coeffs in prop::collection::vec(0..1000u64, 10),
    ) {
        let mut f = QuadPoly::new(q, n).unwrap();
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                f.add_quad(i, j, coeffs[k % 10]);
                k += 1;
            }
            f.add_lin(i, coeffs[(k + 3) % 10]);
        }
        f.add_const(coeffs[9]);
        prop_assert_eq!(eval_gauss_sum(&f), brute_gauss(&f, &guard()).unwrap());
    }

    #[test]
    fn text_formats_roundtrip(a in arb_matrix(4), g in arb_graph(5, 6)) {
        prop_assert_eq!(parse_matrix(&serialize_matrix(&a)).unwrap(), a);
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn cyclotomic_field_laws(
        xs in prop::collection::vec((prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12]), 0..12u64, -3i64..=3), 1..4),
        ys in prop::collection::vec((prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12]), 0..12u64, -3i64..=3), 1..4),
    ) {
        let build = |v: &[(u64, u64, i64)]| v.iter().fold(CycNum::zero(1), |acc, &(n, k, c)| {
            &acc + &make_root(n, k).scale(&Rational::from_integer(BigInt::from(c)))
        });
        let (x, y) = (build(&xs), build(&ys));
        prop_assert!(same(&(&x * &y), &(&y * &x)));
        prop_assert!(same(&(&x + &y), &(&y + &x)));
        prop_assert!(same(&(&x * &(&x + &y)), &(&(&x * &x) + &(&x * &y))));
        prop_assert!(same(&(&x * &y).conj(), &(&x.conj() * &y.conj())));
        prop_assert_eq!(x.to_string().parse::<CycNum>().unwrap(), x.clone());
        if let Some(inv) = x.inv() {
            prop_assert!((&x * &inv).is_one());
        } else {
            prop_assert!(x.is_zero());
        }
    }
}

fn det3(m: &[Vec<BigInt>]) -> BigInt {
    let t = |i: usize, j: usize| &m[i][j];
    t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) - t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0))
        + t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0))
}

#[test]
fn determinant_helper() {
    let id: Vec<Vec<BigInt>> = (0..3).map(|i| (0..3).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    assert!(det3(&id).is_one());
    assert!(!det3(&[vec![BigInt::from(2), BigInt::zero(), BigInt::zero()], id[1].clone(), id[2].clone()]).is_negative());
}
