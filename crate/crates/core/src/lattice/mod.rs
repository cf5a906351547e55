//! Integer lattices of multiplicative relations, saturation, and the coset /
//! uniform-map machinery used by the tractable evaluator.

mod coset;
pub mod intmat;

pub use coset::{coset_detect, coset_prime_split, uniform_map, Coset, PrimeCoset, UniformMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::factorize;
use crate::cyclotomic::Rational;
use crate::model::PureEntry;
use intmat::{hnf, identity, row_reduce, IntMat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero has no multiplicative relations")]
    ZeroValue,
    #[error("value too large to factor: {0}")]
    TooLarge(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// A sublattice of `Z^n`, stored as its canonical Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntLattice {
    dim: usize,
    basis: IntMat,
}

impl IntLattice {
    pub fn new(dim: usize, generators: IntMat) -> Self {
        debug_assert!(generators.iter().all(|g| g.len() == dim));
        IntLattice {
            dim,
            basis: hnf(generators),
        }
    }

    pub fn from_i64(dim: usize, generators: &[Vec<i64>]) -> Self {
        Self::new(
            dim,
            generators
                .iter()
                .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        hnf(rows) == self.basis
    }
}

fn factor_big(n: &BigInt) -> Result<Vec<(u64, u32)>, LatticeError> {
    let small = u64::try_from(n.abs()).map_err(|_| LatticeError::TooLarge(n.to_string()))?;
    Ok(factorize(small))
}

/// Prime exponent vector of a nonzero rational over the listed primes.
fn exponents(r: &Rational, primes: &[u64]) -> Result<Vec<BigInt>, LatticeError> {
    let mut e = vec![BigInt::zero(); primes.len()];
    for (p, k) in factor_big(r.numer())? {
        let i = primes.binary_search(&p).expect("prime collected");
        e[i] += k;
    }
    for (p, k) in factor_big(r.denom())? {
        let i = primes.binary_search(&p).expect("prime collected");
        e[i] -= k;
    }
    Ok(e)
}

fn primes_of(values: &[Rational]) -> Result<Vec<u64>, LatticeError> {
    let mut primes = Vec::new();
    for v in values {
        for (p, _) in factor_big(v.numer())?.into_iter().chain(factor_big(v.denom())?) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// `{x ∈ Z^n : Π a_i^{x_i} = 1}` for nonzero rationals `a_i` (signs allowed).
pub fn relation_lattice(values: &[Rational]) -> Result<IntLattice, LatticeError> {
    if values.iter().any(|v| v.is_zero()) {
        return Err(LatticeError::ZeroValue);
    }
    let n = values.len();
    let primes = primes_of(values)?;
    let width = primes.len() + 1;
    // generator i maps to (exponents, sign bit); one extra generator kills 2 * sign
    let mut rows: IntMat = Vec::with_capacity(n + 1);
    for (i, v) in values.iter().enumerate() {
        let mut row = exponents(v, &primes)?;
        row.push(if v.is_negative() { BigInt::one() } else { BigInt::zero() });
        row.extend((0..=n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        rows.push(row);
    }
    let mut extra = vec![BigInt::zero(); width + n + 1];
    extra[width - 1] = BigInt::from(2);
    extra[width + n] = BigInt::one();
    rows.push(extra);
    let (reduced, _) = row_reduce(rows, width);
    let kernel: IntMat = reduced
        .into_iter()
        .filter(|r| r[..width].iter().all(|x| x.is_zero()))
        .map(|r| r[width..width + n].to_vec())
        .collect();
    Ok(IntLattice::new(n, kernel))
}

/// Unimodular reduction of a basis `K`: returns the saturated basis and the
/// inverse column transform `M^{-1}` with `K M = [I | 0]` at the end.
fn reduce_unimodular(l: &IntLattice) -> (IntMat, IntMat) {
    let n = l.dim;
    let t = l.rank();
    let mut k = l.basis.clone();
    let mut u = l.basis.clone();
    let mut minv = identity(n);
    for i in 0..t {
        let g = u[i][i..].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_one() {
            for x in u[i].iter_mut() {
                *x = &*x / &g;
            }
            for x in k[i].iter_mut() {
                *x = &*x / &g;
            }
        }
        // column operations on columns i.. to turn row i into e_i
        loop {
            let best = (i..n)
                .filter(|&j| !u[i][j].is_zero())
                .min_by(|&a, &b| u[i][a].abs().cmp(&u[i][b].abs()))
                .expect("basis rows are nonzero");
            if best != i {
                for row in u.iter_mut() {
                    row.swap(i, best);
                }
                minv.swap(i, best);
            }
            let mut clean = true;
            for j in i + 1..n {
                if u[i][j].is_zero() {
                    continue;
                }
                let q = u[i][j].div_floor(&u[i][i]);
                for row in u.iter_mut() {
                    let d = &q * &row[i];
                    row[j] -= d;
                }
                let rj = minv[j].clone();
                for (x, y) in minv[i].iter_mut().zip(&rj) {
                    *x += &q * y;
                }
                if !u[i][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if u[i][i].is_negative() {
            for row in u.iter_mut() {
                row[i] = -&row[i];
            }
            for x in minv[i].iter_mut() {
                *x = -&*x;
            }
        }
        for r in i + 1..t {
            let f = u[r][i].clone();
            if f.is_zero() {
                continue;
            }
            let (ui, ki) = (u[i].clone(), k[i].clone());
            for (x, y) in u[r].iter_mut().zip(&ui) {
                *x -= &f * y;
            }
            for (x, y) in k[r].iter_mut().zip(&ki) {
                *x -= &f * y;
            }
        }
    }
    (k, minv)
}

/// `Z^n ∩ span_Q(L)`.
pub fn saturate(l: &IntLattice) -> IntLattice {
    let (k, _) = reduce_unimodular(l);
    IntLattice::new(l.dim, k)
}

/// Vectors completing a basis of a saturated lattice to a basis of `Z^n`.
pub fn quotient_basis(saturated: &IntLattice) -> IntMat {
    let (_, minv) = reduce_unimodular(saturated);
    minv[saturated.rank()..].to_vec()
}

/// Entries rewritten over multiplicatively independent positive generators:
/// `entry_i = Π g_j^{exponents[i][j]} * ω_{root.0}^{root.1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    pub generators: Vec<u64>,
    pub exponents: Vec<Vec<i64>>,
    pub roots: Vec<(u64, u64)>,
}

/// For pure entries the generators are the primes dividing the magnitudes.
pub fn generating_set(entries: &[PureEntry]) -> Result<GeneratingSet, LatticeError> {
    if entries.iter().any(|e| e.is_zero()) {
        return Err(LatticeError::ZeroValue);
    }
    let mags: Vec<Rational> = entries.iter().map(|e| e.magnitude().clone()).collect();
    let primes = primes_of(&mags)?;
    let mut exps = Vec::with_capacity(entries.len());
    for m in &mags {
        let e = exponents(m, &primes)?;
        exps.push(
            e.iter()
                .map(|x| i64::try_from(x).map_err(|_| LatticeError::TooLarge(x.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(GeneratingSet {
        generators: primes,
        exponents: exps,
        roots: entries.iter().map(|e| (e.root_order(), e.root_exp())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64) -> Rational {
        Rational::from_integer(BigInt::from(a))
    }

    #[test]
    fn relations_of_six_two_three() {
        let l = relation_lattice(&[q(6), q(2), q(3)]).unwrap();
        assert_eq!(l, IntLattice::from_i64(3, &[vec![1, -1, -1]]));
        assert_eq!(relation_lattice(&[q(1)]).unwrap().rank(), 1);
        assert_eq!(relation_lattice(&[q(0)]), Err(LatticeError::ZeroValue));
    }

    #[test]
    fn negative_values_relate_through_squares() {
        let l = relation_lattice(&[q(-1)]).unwrap();
        assert_eq!(l, IntLattice::from_i64(1, &[vec![2]]));
    }

    #[test]
    fn saturation_divides_out_content() {
        let l = IntLattice::from_i64(2, &[vec![2, 4]]);
        assert_eq!(saturate(&l), IntLattice::from_i64(2, &[vec![1, 2]]));
        let quotient = quotient_basis(&saturate(&l));
        assert_eq!(quotient.len(), 1);
    }
}
