//! Cosets of subgroups of `Z_{π_1} × … × Z_{π_h}` and uniform parametrisations.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::intmat::{diagonalize, hnf, IntMat};
use super::LatticeError;
use crate::arith::prime_power;
use crate::linalg;
use crate::cyclotomic::Rational;

/// `rep + <gens>` inside `Π Z_{moduli[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coset {
    pub moduli: Vec<u64>,
    pub rep: Vec<u64>,
    pub gens: Vec<Vec<u64>>,
    pub size: u64,
}

fn add_mod(a: &[u64], b: &[u64], moduli: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .zip(moduli)
        .map(|((x, y), m)| (x + y) % m)
        .collect()
}

fn sub_mod(a: &[u64], b: &[u64], moduli: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .zip(moduli)
        .map(|((x, y), m)| (x + m - y % m) % m)
        .collect()
}

/// Grow a subgroup (given as a set) by one generator.
fn extend_group(group: &mut HashSet<Vec<u64>>, g: &[u64], moduli: &[u64]) {
    let base: Vec<Vec<u64>> = group.iter().cloned().collect();
    let mut step = g.to_vec();
    while !group.contains(&step) {
        for h in &base {
            group.insert(add_mod(h, &step, moduli));
        }
        step = add_mod(&step, g, moduli);
    }
}

impl Coset {
    /// The subgroup generated by `gens`, as a set.
    pub fn linear_part(&self) -> HashSet<Vec<u64>> {
        let mut group = HashSet::from([vec![0u64; self.moduli.len()]]);
        for g in &self.gens {
            extend_group(&mut group, g, &self.moduli);
        }
        group
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut v: Vec<Vec<u64>> = self
            .linear_part()
            .into_iter()
            .map(|h| add_mod(&self.rep, &h, &self.moduli))
            .collect();
        v.sort();
        v
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.linear_part()
            .contains(&sub_mod(x, &self.rep, &self.moduli))
    }

    /// The same coset with another representative, which must be a member.
    pub fn rebased(&self, rep: &[u64]) -> Coset {
        debug_assert!(self.contains(rep));
        Coset {
            rep: rep.to_vec(),
            ..self.clone()
        }
    }
}

/// Decide whether `points` is a coset; the representative is the
/// lexicographically least point.
pub fn coset_detect(points: &[Vec<u64>], moduli: &[u64]) -> Option<Coset> {
    let mut pts: Vec<Vec<u64>> = points
        .iter()
        .map(|p| p.iter().zip(moduli).map(|(x, m)| x % m).collect())
        .collect();
    pts.sort();
    pts.dedup();
    let x0 = pts.first()?.clone();
    let mut group = HashSet::from([vec![0u64; moduli.len()]]);
    let mut gens = Vec::new();
    for p in &pts {
        let d = sub_mod(p, &x0, moduli);
        if !group.contains(&d) {
            extend_group(&mut group, &d, moduli);
            gens.push(d);
            if group.len() > pts.len() {
                return None;
            }
        }
    }
    (group.len() == pts.len()).then(|| Coset {
        moduli: moduli.to_vec(),
        rep: x0,
        gens,
        size: pts.len() as u64,
    })
}

/// The part of a coset living on the coordinates of one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCoset {
    pub prime: u64,
    pub coords: Vec<usize>,
    pub coset: Coset,
}

/// Split a coset of `Π Z_{π_i}` (each `π_i` a prime power) into its per-prime
/// projections, checking that the coset is their product.
pub fn coset_prime_split(c: &Coset) -> Result<Vec<PrimeCoset>, LatticeError> {
    let mut primes: Vec<u64> = Vec::new();
    let mut prime_of = Vec::with_capacity(c.moduli.len());
    for &m in &c.moduli {
        let (p, _) = prime_power(m).ok_or_else(|| {
            LatticeError::InternalInconsistency(format!("modulus {m} is not a prime power"))
        })?;
        prime_of.push(p);
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    let elements = c.elements();
    let mut out = Vec::new();
    let mut product: u64 = 1;
    for p in primes {
        let coords: Vec<usize> = (0..c.moduli.len()).filter(|&i| prime_of[i] == p).collect();
        let moduli: Vec<u64> = coords.iter().map(|&i| c.moduli[i]).collect();
        let projected: Vec<Vec<u64>> = elements
            .iter()
            .map(|x| coords.iter().map(|&i| x[i]).collect())
            .collect();
        let coset = coset_detect(&projected, &moduli).ok_or_else(|| {
            LatticeError::InternalInconsistency(format!("projection to prime {p} is not a coset"))
        })?;
        product *= coset.size;
        out.push(PrimeCoset { prime: p, coords, coset });
    }
    if product != c.size {
        return Err(LatticeError::InternalInconsistency(
            "coset is not the product of its prime projections".into(),
        ));
    }
    Ok(out)
}

/// `τ(x) = offset + x A (mod moduli)` from `Z_{π̂}^s` onto a coset, hitting every
/// point exactly `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformMap {
    pub pi_hat: u64,
    pub moduli: Vec<u64>,
    pub matrix: Vec<Vec<u64>>,
    pub offset: Vec<u64>,
    pub orders: Vec<u64>,
    pub multiplicity: BigInt,
}

impl UniformMap {
    pub fn num_vars(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let mut out = self.offset.clone();
        for (xi, row) in x.iter().zip(&self.matrix) {
            for ((o, a), m) in out.iter_mut().zip(row).zip(&self.moduli) {
                *o = (*o + (xi % m) * a) % m;
            }
        }
        out
    }
}

/// Cyclic decomposition of the linear part of `c` through a diagonal form of
/// its relation matrix. Each generator order must divide `pi_hat`.
pub fn uniform_map(c: &Coset, pi_hat: u64) -> Result<UniformMap, LatticeError> {
    let h = c.moduli.len();
    let mut gens_rows: IntMat = c
        .gens
        .iter()
        .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    for (i, &m) in c.moduli.iter().enumerate() {
        let mut row = vec![BigInt::zero(); h];
        row[i] = BigInt::from(m);
        gens_rows.push(row);
    }
    // basis B of the lattice of lifts of the subgroup
    let b = hnf(gens_rows);
    if b.len() != h {
        return Err(LatticeError::InternalInconsistency("lift lattice not full rank".into()));
    }
    // R = diag(π) B^{-1}: coordinates of the moduli vectors in the basis B
    let bq: linalg::RatMatrix = (0..h)
        .map(|col| (0..h).map(|row| Rational::from_integer(b[row][col].clone())).collect())
        .collect();
    let mut r: IntMat = Vec::with_capacity(h);
    for (i, &m) in c.moduli.iter().enumerate() {
        let mut rhs = vec![Rational::zero(); h];
        rhs[i] = Rational::from_integer(BigInt::from(m));
        let sol = linalg::solve(&bq, &rhs)
            .ok_or_else(|| LatticeError::InternalInconsistency("singular basis".into()))?;
        if sol.iter().any(|x| !x.is_integer()) {
            return Err(LatticeError::InternalInconsistency("moduli outside lift lattice".into()));
        }
        r.push(sol.into_iter().map(|x| x.to_integer()).collect());
    }
    let (diag, winv) = diagonalize(r);
    let mut pairs: Vec<(u64, Vec<u64>)> = Vec::new();
    for (d, w) in diag.iter().zip(&winv) {
        let d = d.to_u64().ok_or_else(|| LatticeError::TooLarge(d.to_string()))?;
        if d <= 1 {
            continue;
        }
        // generator = w B, reduced modulo the moduli
        let mut g = vec![0u64; h];
        for (j, gj) in g.iter_mut().enumerate() {
            let mut acc = BigInt::zero();
            for (k, wk) in w.iter().enumerate() {
                acc += wk * &b[k][j];
            }
            let m = BigInt::from(c.moduli[j]);
            *gj = (((acc % &m) + &m) % &m).to_u64().unwrap();
        }
        if pi_hat % d != 0 {
            return Err(LatticeError::InternalInconsistency(format!(
                "generator order {d} does not divide {pi_hat}"
            )));
        }
        pairs.push((d, g));
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0));
    let order: u64 = pairs.iter().map(|p| p.0).product();
    if order != c.size {
        return Err(LatticeError::InternalInconsistency(format!(
            "decomposition has order {order}, coset has {}",
            c.size
        )));
    }
    let (orders, mut matrix): (Vec<u64>, Vec<Vec<u64>>) = pairs.into_iter().unzip();
    let mut orders = orders;
    if matrix.is_empty() {
        matrix.push(vec![0; h]);
        orders.push(1);
    }
    let s = matrix.len() as u32;
    let multiplicity = BigInt::from(pi_hat).pow(s) / BigInt::from(c.size);
    Ok(UniformMap {
        pi_hat,
        moduli: c.moduli.clone(),
        matrix,
        offset: c.rep.clone(),
        orders,
        multiplicity,
    })
}
