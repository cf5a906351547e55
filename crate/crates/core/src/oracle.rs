//! Brute-force reference evaluation by explicit enumeration of assignments.
//!
//! Every function here refuses to run when the number of assignments exceeds the
//! configured [`SizeGuard`] budget. Work is split across the rayon thread pool by
//! the value of the first vertex; sums are exact, so the split never changes a result.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::lcm;
use crate::cyclotomic::{CycNum, Rational};
use crate::gausssum::QuadPoly;
use crate::model::{EvalPair, MultiGraph, PureMatrix};

pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {work} assignments, over the budget of {budget}")]
    SizeGuard { work: u128, budget: u64 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

/// Upper bound on the number of assignments an oracle call may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeGuard {
    pub budget: u64,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SizeGuard {
    pub fn new(budget: u64) -> Self {
        SizeGuard { budget }
    }

    fn check(&self, choices: &[u64]) -> Result<(), OracleError> {
        let mut work: u128 = 1;
        for &c in choices {
            work = work.saturating_mul(c as u128);
        }
        if work > self.budget as u128 {
            Err(OracleError::SizeGuard {
                work,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

/// Visit every assignment `x` with `lo[v] <= x[v] < hi[v]`, splitting on vertex 0.
fn for_each_assignment<T: Send>(
    lo: &[usize],
    hi: &[usize],
    init: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, &[usize]) + Sync,
) -> Vec<T> {
    let n = lo.len();
    if n == 0 {
        let mut t = init();
        visit(&mut t, &[]);
        return vec![t];
    }
    (lo[0]..hi[0])
        .into_par_iter()
        .map(|first| {
            let mut state = init();
            let mut x: Vec<usize> = lo.to_vec();
            x[0] = first;
            if (1..n).any(|v| lo[v] >= hi[v]) {
                return state;
            }
            loop {
                visit(&mut state, &x);
                let mut v = 1;
                while v < n {
                    x[v] += 1;
                    if x[v] < hi[v] {
                        break;
                    }
                    x[v] = lo[v];
                    v += 1;
                }
                if v >= n {
                    break;
                }
            }
            state
        })
        .collect()
}

/// Entry `A_ij` as `(value * den, exponent mod L)` with one common denominator.
struct ScaledMatrix {
    l: u64,
    den: BigInt,
    vals: Vec<Option<(BigInt, u64)>>,
}

impl ScaledMatrix {
    fn new(a: &PureMatrix) -> Self {
        let m = a.dim();
        let l = a.working_conductor();
        let mut den = BigInt::one();
        for i in 0..m {
            for j in 0..m {
                let d = a.get(i, j).magnitude().denom();
                den = num_integer::Integer::lcm(&den, d);
            }
        }
        let vals = (0..m * m)
            .map(|x| {
                let e = a.get(x / m, x % m);
                (!e.is_zero()).then(|| {
                    let mag = e.magnitude();
                    (mag.numer() * (&den / mag.denom()), e.exponent_in(l))
                })
            })
            .collect();
        ScaledMatrix { l, den, vals }
    }

    /// Per-edge tables of `A_ij^mult`.
    fn edge_tables(&self, g: &MultiGraph) -> Vec<Vec<Option<(BigInt, u64)>>> {
        g.edges()
            .iter()
            .map(|e| {
                self.vals
                    .iter()
                    .map(|v| {
                        v.as_ref().map(|(b, k)| {
                            (b.pow(e.mult as u32), (k * (e.mult % self.l)) % self.l)
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

fn assignment_weight(
    tables: &[Vec<Option<(BigInt, u64)>>],
    g: &MultiGraph,
    m: usize,
    l: u64,
    x: &[usize],
) -> Option<(BigInt, u64)> {
    let mut value = BigInt::one();
    let mut exp = 0u64;
    for (t, e) in tables.iter().zip(g.edges()) {
        let (b, k) = t[x[e.u] * m + x[e.v]].as_ref()?;
        value *= b;
        exp = (exp + k) % l;
    }
    Some((value, exp))
}

/// `Z_A(G)` by enumeration; the result has conductor `A.working_conductor()`.
pub fn brute_eval_a(a: &PureMatrix, g: &MultiGraph, guard: &SizeGuard) -> Result<CycNum, OracleError> {
    let n = g.vertex_count();
    let m = a.dim();
    guard.check(&vec![m as u64; n])?;
    let s = ScaledMatrix::new(a);
    let tables = s.edge_tables(g);
    let l = s.l;
    let parts = for_each_assignment(
        &vec![0; n],
        &vec![m; n],
        || vec![BigInt::zero(); l as usize],
        |acc, x| {
            if let Some((v, e)) = assignment_weight(&tables, g, m, l, x) {
                acc[e as usize] += v;
            }
        },
    );
    let mut counts = vec![BigInt::zero(); l as usize];
    for p in parts {
        for (c, v) in counts.iter_mut().zip(p) {
            *c += v;
        }
    }
    let scale = Rational::new(BigInt::one(), s.den.pow(g.total_multiplicity() as u32));
    Ok(CycNum::from_exponent_counts(l, counts).scale(&scale))
}

/// Number of assignments per exact weight `Π A_{ξ(u)ξ(v)}`.
pub fn count_by_weight(
    a: &PureMatrix,
    g: &MultiGraph,
    guard: &SizeGuard,
) -> Result<BTreeMap<CycNum, u64>, OracleError> {
    let n = g.vertex_count();
    let m = a.dim();
    guard.check(&vec![m as u64; n])?;
    let s = ScaledMatrix::new(a);
    let tables = s.edge_tables(g);
    let l = s.l;
    let parts = for_each_assignment(
        &vec![0; n],
        &vec![m; n],
        HashMap::<Option<(BigInt, u64)>, u64>::new,
        |acc, x| {
            *acc.entry(assignment_weight(&tables, g, m, l, x)).or_insert(0) += 1;
        },
    );
    let scale = Rational::new(BigInt::one(), s.den.pow(g.total_multiplicity() as u32));
    let mut out = BTreeMap::new();
    for part in parts {
        for (key, c) in part {
            let value = match key {
                None => CycNum::zero(l),
                Some((v, e)) => CycNum::root(l, e).scale(&(Rational::from_integer(v) * &scale)),
            };
            *out.entry(value).or_insert(0) += c;
        }
    }
    Ok(out)
}

fn pair_conductor(p: &EvalPair) -> u64 {
    let mut l = 1;
    for row in p.c().iter().chain(p.d()) {
        for z in row {
            l = lcm(l, z.conductor());
        }
    }
    l
}

fn brute_pair(p: &EvalPair, g: &MultiGraph, lo: &[usize], hi: &[usize]) -> CycNum {
    let l = pair_conductor(p);
    let m = p.dim();
    let nmod = p.modulus() as u64;
    let lift = |z: &CycNum| z.embed(l).expect("conductor divides the lcm");
    let tables: Vec<Vec<CycNum>> = g
        .edges()
        .iter()
        .map(|e| {
            (0..m * m)
                .map(|x| lift(&p.c()[x / m][x % m]).pow(e.mult))
                .collect()
        })
        .collect();
    let weights: Vec<Vec<CycNum>> = g
        .degrees()
        .iter()
        .map(|&d| p.d()[(d % nmod) as usize].iter().map(lift).collect())
        .collect();
    let parts = for_each_assignment(
        lo,
        hi,
        || CycNum::zero(l),
        |acc, x| {
            let mut w = CycNum::one(l);
            for (v, &xv) in x.iter().enumerate() {
                w = &w * &weights[v][xv];
                if w.is_zero() {
                    return;
                }
            }
            for (t, e) in tables.iter().zip(g.edges()) {
                w = &w * &t[x[e.u] * m + x[e.v]];
                if w.is_zero() {
                    return;
                }
            }
            *acc = &*acc + &w;
        },
    );
    parts.into_iter().fold(CycNum::zero(l), |a, b| &a + &b)
}

/// `Z_{C,D}(G)` by enumeration.
pub fn brute_eval_cd(p: &EvalPair, g: &MultiGraph, guard: &SizeGuard) -> Result<CycNum, OracleError> {
    let n = g.vertex_count();
    let m = p.dim();
    guard.check(&vec![m as u64; n])?;
    Ok(brute_pair(p, g, &vec![0; n], &vec![m; n]))
}

fn brute_half(
    p: &EvalPair,
    g: &MultiGraph,
    u: usize,
    first: bool,
    guard: &SizeGuard,
) -> Result<CycNum, OracleError> {
    let n = g.vertex_count();
    if u >= n {
        return Err(OracleError::VertexOutOfRange(u));
    }
    let m = p.dim();
    let half = m / 2;
    let mut lo = vec![0; n];
    let mut hi = vec![m; n];
    if first {
        hi[u] = half;
    } else {
        lo[u] = half;
    }
    let choices: Vec<u64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) as u64).collect();
    guard.check(&choices)?;
    Ok(brute_pair(p, g, &lo, &hi))
}

/// Sum over assignments with `ξ(u)` in the first half of the index set.
pub fn brute_z_arrow(p: &EvalPair, g: &MultiGraph, u: usize, guard: &SizeGuard) -> Result<CycNum, OracleError> {
    brute_half(p, g, u, true, guard)
}

/// Sum over assignments with `ξ(u)` in the second half of the index set.
pub fn brute_z_back(p: &EvalPair, g: &MultiGraph, u: usize, guard: &SizeGuard) -> Result<CycNum, OracleError> {
    brute_half(p, g, u, false, guard)
}

/// `Z_q(f)` by enumeration of `Z_q^n`.
pub fn brute_gauss(f: &QuadPoly, guard: &SizeGuard) -> Result<CycNum, OracleError> {
    let q = f.modulus();
    let n = f.num_vars();
    guard.check(&vec![q; n])?;
    let parts = for_each_assignment(
        &vec![0; n],
        &vec![q as usize; n],
        || vec![0u64; q as usize],
        |acc, x| {
            let xs: Vec<u64> = x.iter().map(|&v| v as u64).collect();
            acc[f.eval(&xs) as usize] += 1;
        },
    );
    let mut counts = vec![BigInt::zero(); q as usize];
    for p in parts {
        for (c, v) in counts.iter_mut().zip(p) {
            *c += v;
        }
    }
    Ok(CycNum::from_exponent_counts(q, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_graph, parse_matrix};

    #[test]
    fn hadamard_on_an_edge() {
        let h = parse_matrix("matrix 2\n0 0 1\n0 1 1\n1 1 -1\n").unwrap();
        let k2 = parse_graph("graph 2\n0 1 1\n").unwrap();
        let z = brute_eval_a(&h, &k2, &SizeGuard::default()).unwrap();
        assert_eq!(z.rational_value().unwrap(), Rational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn guard_trips() {
        let h = parse_matrix("matrix 2\n0 0 1\n").unwrap();
        let g = MultiGraph::new(30);
        assert!(matches!(
            brute_eval_a(&h, &g, &SizeGuard::default()),
            Err(OracleError::SizeGuard { .. })
        ));
    }
}
