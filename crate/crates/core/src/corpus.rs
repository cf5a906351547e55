//! Canonical matrices with known verdicts, matrix builders, and a fixed suite
//! of small connected multigraphs.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclotomic::Rational;
use crate::model::{MultiGraph, PureEntry, PureMatrix};

/// One corpus matrix. `expected` is `None` for tractable matrices and the
/// witness label (`stage:condition`) for hard ones.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub matrix: PureMatrix,
    pub expected: Option<&'static str>,
}

fn unit(order: u64, exp: u64) -> PureEntry {
    PureEntry::new(Rational::from_integer(BigInt::from(1)), order, exp).expect("valid root")
}

fn int(v: i64) -> PureEntry {
    PureEntry::rational(Rational::from_integer(BigInt::from(v))).expect("rational entry")
}

/// The `q x q` Fourier matrix `(ω_q^{ij})`.
pub fn fourier(q: u64) -> Vec<Vec<PureEntry>> {
    (0..q)
        .map(|i| (0..q).map(|j| unit(q, i * j % q)).collect())
        .collect()
}

/// `[[0, F], [Fᵀ, 0]]` for an `m x n` block `F`.
pub fn bipartisation(f: &[Vec<PureEntry>]) -> PureMatrix {
    let m = f.len();
    let n = f.first().map_or(0, Vec::len);
    let mut rows = vec![vec![PureEntry::zero(); m + n]; m + n];
    for (i, row) in f.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            rows[i][m + j] = e.clone();
            rows[m + j][i] = e.clone();
        }
    }
    PureMatrix::from_rows(rows).expect("bipartisation is symmetric")
}

fn entry_product(x: &PureEntry, y: &PureEntry) -> PureEntry {
    if x.is_zero() || y.is_zero() {
        return PureEntry::zero();
    }
    let order = x.root_order() * y.root_order();
    let exp = x.root_exp() * y.root_order() + y.root_exp() * x.root_order();
    PureEntry::new(x.magnitude() * y.magnitude(), order, exp).expect("valid product")
}

/// Tensor product `A ⊗ B`, indexed `(i, k) -> i * dim(B) + k`.
pub fn kron(a: &PureMatrix, b: &PureMatrix) -> PureMatrix {
    let (m, n) = (a.dim(), b.dim());
    let mut rows = vec![vec![PureEntry::zero(); m * n]; m * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    rows[i * n + k][j * n + l] = entry_product(a.get(i, j), b.get(k, l));
                }
            }
        }
    }
    PureMatrix::from_rows(rows).expect("tensor product of symmetric matrices")
}

/// `A_{ij} · t_i · t_j` for a vector of roots of unity `t_i = ω_{order}^{exp}`.
pub fn twist(a: &PureMatrix, t: &[(u64, u64)]) -> PureMatrix {
    let m = a.dim();
    let rows = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let e = entry_product(&unit(t[i].0, t[i].1), &unit(t[j].0, t[j].1));
                    entry_product(a.get(i, j), &e)
                })
                .collect()
        })
        .collect();
    PureMatrix::from_rows(rows).expect("twist keeps symmetry")
}

fn from_rows(rows: Vec<Vec<PureEntry>>) -> PureMatrix {
    PureMatrix::from_rows(rows).expect("corpus matrix is symmetric")
}

pub fn hadamard() -> PureMatrix {
    from_rows(vec![vec![int(1), int(1)], vec![int(1), int(-1)]])
}

/// The non-bipartite `4 x 4` matrix `(-1)^{x1 y2 + x2 y1}` over `(Z_2)^2`.
pub fn h4() -> PureMatrix {
    let rows = (0..4)
        .map(|x: usize| {
            (0..4)
                .map(|y: usize| {
                    let s = (((x >> 1) & y) ^ (x & (y >> 1))) & 1;
                    int(if s == 1 { -1 } else { 1 })
                })
                .collect()
        })
        .collect();
    from_rows(rows)
}

/// `J_k - I_k`, the `k`-colouring matrix.
pub fn colouring(k: usize) -> PureMatrix {
    from_rows(
        (0..k)
            .map(|i| (0..k).map(|j| int(i64::from(i != j))).collect())
            .collect(),
    )
}

/// Each class of `F_4` doubled into two twin rows, one of class 2 negated, so
/// the twin sum of class 2 vanishes at `r = 1` and the support is `{0, 1, 3}`.
fn broken_coset() -> PureMatrix {
    let f = fourier(4);
    let sign = |x: usize| if x == 5 { 2 } else { 0 };
    let rows = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| unit(4, (f[x / 2][y / 2].exponent_in(4) + sign(x) + sign(y)) % 4))
                .collect()
        })
        .collect();
    from_rows(rows)
}

pub fn canonical_corpus() -> Vec<CorpusEntry> {
    let t = |name, matrix| CorpusEntry {
        name,
        matrix,
        expected: None,
    };
    let h = |name, matrix, label| CorpusEntry {
        name,
        matrix,
        expected: Some(label),
    };
    let magnitudes = from_rows(vec![vec![int(4), int(2)], vec![int(2), int(1)]]);
    let diagonal = from_rows(vec![
        vec![int(2), int(0), int(0)],
        vec![int(0), int(-1), int(0)],
        vec![int(0), int(0), unit(3, 1)],
    ]);
    vec![
        t("hadamard", hadamard()),
        t("hadamard-squared", kron(&hadamard(), &hadamard())),
        t("h4", h4()),
        t("bip-fourier-2", bipartisation(&fourier(2))),
        t("bip-fourier-3", bipartisation(&fourier(3))),
        t("bip-fourier-4", bipartisation(&fourier(4))),
        t("bip-fourier-5", bipartisation(&fourier(5))),
        t("diagonal", diagonal),
        t("rank-one-magnitudes", magnitudes.clone()),
        t("fourier-3-twins", kron(&from_rows(fourier(3)), &magnitudes)),
        t(
            "fourier-4-quadratic",
            twist(&from_rows(fourier(4)), &[(1, 0), (8, 1), (2, 1), (8, 1)]),
        ),
        h("vertex-cover", from_rows(vec![vec![int(0), int(1)], vec![int(1), int(1)]]), "step1:bulatov-grohe"),
        h("colouring-3", colouring(3), "step1:bulatov-grohe"),
        h("colouring-4", colouring(4), "step1:bulatov-grohe"),
        h(
            "non-orthogonal",
            from_rows(vec![vec![int(1), int(1)], vec![int(1), unit(3, 1)]]),
            "step2:orthogonality",
        ),
        h("broken-coset", broken_coset(), "step3:coset"),
        h(
            "non-quadratic",
            from_rows(vec![vec![int(1), unit(8, 1)], vec![unit(8, 1), unit(4, 3)]]),
            "step3:quadratic",
        ),
    ]
}

/// `count` connected multigraphs with at most `max_vertices` vertices and total
/// edge multiplicity at most `max_mult`, drawn from a seeded generator.
pub fn graph_suite(count: usize, max_vertices: usize, max_mult: u64, seed: u64) -> Vec<MultiGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=max_vertices);
        let mut edges: Vec<(usize, usize, u64)> = Vec::new();
        // random spanning tree keeps the graph connected
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v, 1));
        }
        let mut total = edges.len() as u64;
        if total > max_mult {
            continue;
        }
        let extra = rng.gen_range(0..=(max_mult - total).min(6));
        for _ in 0..extra {
            if total == max_mult {
                break;
            }
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            let m = rng.gen_range(1..=(max_mult - total).min(3));
            edges.push((u.min(v), u.max(v), m));
            total += m;
        }
        out.push(MultiGraph::with_edges(n, &edges).expect("suite edges are in range"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h4_differs_from_hadamard_squared() {
        assert_ne!(h4(), kron(&hadamard(), &hadamard()));
        assert_eq!(h4().get(1, 2), &int(-1));
        assert_eq!(h4().get(1, 1), &int(1));
    }

    #[test]
    fn suite_respects_bounds() {
        for g in graph_suite(50, 6, 12, 1) {
            assert!(g.vertex_count() <= 6);
            assert!(g.total_multiplicity() <= 12);
        }
    }
}
