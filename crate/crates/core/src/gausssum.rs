//! Quadratic exponential sums `Z_q(f) = Σ_{x ∈ Z_q^n} ω_q^{f(x)}` for prime powers `q`,
//! evaluated in time polynomial in `n` and `q`.
//!
//! Odd `q` is handled by completing squares, rotating a pair of variables when only a
//! cross term has the smallest valuation. For `q = 2^k` with `k >= 2`, odd cross and
//! linear terms are eliminated by a two-to-one change of variables; once everything
//! but the diagonal is even, an odd square term is completed, or the whole polynomial
//! is halved and the modulus drops to `q/2`. `q = 2` is solved directly over `F_2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{mod_inv, mod_mul, prime_power, valuation};
use crate::cyclotomic::{CycNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("modulus {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
}

/// `f(x) = Σ_{i<=j} c_ij x_i x_j + Σ_i c_i x_i + c` over `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadPoly {
    q: u64,
    p: u64,
    k: u32,
    n: usize,
    quad: BTreeMap<(usize, usize), u64>,
    lin: BTreeMap<usize, u64>,
    constant: u64,
}

impl QuadPoly {
    pub fn new(q: u64, n: usize) -> Result<Self, GaussError> {
        let (p, k) = prime_power(q).ok_or(GaussError::NotPrimePower(q))?;
        Ok(QuadPoly {
            q,
            p,
            k,
            n,
            quad: BTreeMap::new(),
            lin: BTreeMap::new(),
            constant: 0,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    fn bump(map_val: Option<&mut u64>, c: u64, q: u64) -> Option<u64> {
        map_val.map(|v| {
            *v = (*v + c % q) % q;
            *v
        })
    }

    /// Add `c x_i x_j`; the order of `i` and `j` does not matter.
    pub fn add_quad(&mut self, i: usize, j: usize, c: u64) {
        assert!(i < self.n && j < self.n, "variable out of range");
        let key = (i.min(j), i.max(j));
        let q = self.q;
        match Self::bump(self.quad.get_mut(&key), c, q) {
            Some(0) => {
                self.quad.remove(&key);
            }
            Some(_) => {}
            None if c % q != 0 => {
                self.quad.insert(key, c % q);
            }
            None => {}
        }
    }

    pub fn add_lin(&mut self, i: usize, c: u64) {
        assert!(i < self.n, "variable out of range");
        let q = self.q;
        match Self::bump(self.lin.get_mut(&i), c, q) {
            Some(0) => {
                self.lin.remove(&i);
            }
            Some(_) => {}
            None if c % q != 0 => {
                self.lin.insert(i, c % q);
            }
            None => {}
        }
    }

    pub fn add_const(&mut self, c: u64) {
        self.constant = (self.constant + c % self.q) % self.q;
    }

    pub fn quad(&self, i: usize, j: usize) -> u64 {
        *self.quad.get(&(i.min(j), i.max(j))).unwrap_or(&0)
    }

    pub fn lin(&self, i: usize) -> u64 {
        *self.lin.get(&i).unwrap_or(&0)
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn quad_terms(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.quad.iter().map(|(&k, &v)| (k, v))
    }

    pub fn lin_terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.lin.iter().map(|(&k, &v)| (k, v))
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let q = self.q;
        let mut acc = self.constant;
        for (&(i, j), &c) in &self.quad {
            acc = (acc + mod_mul(c, mod_mul(x[i] % q, x[j] % q, q), q)) % q;
        }
        for (&i, &c) in &self.lin {
            acc = (acc + mod_mul(c, x[i] % q, q)) % q;
        }
        acc
    }
}

/// `Σ_{x ∈ Z_q} ω_q^{a x^2 + b x}`.
pub fn one_var_sum(q: u64, a: u64, b: u64) -> CycNum {
    let mut counts = vec![BigInt::zero(); q as usize];
    for x in 0..q {
        let e = (mod_mul(a, mod_mul(x, x, q), q) + mod_mul(b, x, q)) % q;
        counts[e as usize] += 1;
    }
    CycNum::from_exponent_counts(q, counts)
}

/// For `q = 2^k`: whether the coefficient of `x_t` is odd while every cross term
/// `x_t x_j` has an even coefficient. Shifting `x_t` by `q/2` then flips the sign of
/// every summand, so the sum vanishes.
pub fn detect_zero_case(f: &QuadPoly, t: usize) -> bool {
    if f.p != 2 || t >= f.n {
        return false;
    }
    f.lin(t) % 2 == 1 && (0..f.n).filter(|&j| j != t).all(|j| f.quad(t, j) % 2 == 0)
}

/// Dense working form: `a[i][j]` for `i < j` is the `x_i x_j` coefficient,
/// `a[i][i]` the square coefficient.
#[derive(Clone)]
struct Work {
    q: u64,
    a: Vec<Vec<u64>>,
    lin: Vec<u64>,
    c0: u64,
    alive: Vec<bool>,
}

impl Work {
    fn from_poly(f: &QuadPoly) -> Self {
        let n = f.n;
        let mut a = vec![vec![0u64; n]; n];
        for (&(i, j), &c) in &f.quad {
            a[i][j] = c;
        }
        let mut lin = vec![0u64; n];
        for (&i, &c) in &f.lin {
            lin[i] = c;
        }
        Work {
            q: f.q,
            a,
            lin,
            c0: f.constant,
            alive: vec![true; n],
        }
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i.min(j)][i.max(j)]
    }

    fn add(&mut self, i: usize, j: usize, c: u64) {
        let q = self.q;
        let slot = &mut self.a[i.min(j)][i.max(j)];
        *slot = (*slot + c % q) % q;
    }

    fn set(&mut self, i: usize, j: usize, c: u64) {
        self.a[i.min(j)][i.max(j)] = c;
    }

    fn vars(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    /// Replace `x_t` by `s x_t + Σ_{j != t} l_j x_j + l0`.
    fn substitute(&mut self, t: usize, s: u64, l: &[u64], l0: u64) {
        let q = self.q;
        let vars = self.vars();
        let mut ell = l.to_vec();
        ell[t] = s % q;
        let ctt = self.a[t][t];
        let ct = self.lin[t];
        let cross: Vec<(usize, u64)> = vars
            .iter()
            .filter(|&&j| j != t)
            .map(|&j| (j, self.get(t, j)))
            .filter(|&(_, c)| c != 0)
            .collect();
        self.a[t][t] = 0;
        for &j in &vars {
            if j != t {
                self.set(t, j, 0);
            }
        }
        self.lin[t] = 0;
        if ctt != 0 {
            for (x, &i) in vars.iter().enumerate() {
                if ell[i] == 0 {
                    continue;
                }
                for &j in &vars[x..] {
                    let m = if i == j { 1 } else { 2 };
                    self.add(i, j, mod_mul(ctt, mod_mul(m, mod_mul(ell[i], ell[j], q), q), q));
                }
                let d = mod_mul(2, mod_mul(ctt, mod_mul(ell[i], l0, q), q), q);
                self.lin[i] = (self.lin[i] + d) % q;
            }
            self.c0 = (self.c0 + mod_mul(ctt, mod_mul(l0, l0, q), q)) % q;
        }
        for &(j, c) in &cross {
            for &i in &vars {
                if ell[i] != 0 {
                    self.add(i, j, mod_mul(c, ell[i], q));
                }
            }
            self.lin[j] = (self.lin[j] + mod_mul(c, l0, q)) % q;
        }
        if ct != 0 {
            for &i in &vars {
                self.lin[i] = (self.lin[i] + mod_mul(ct, ell[i], q)) % q;
            }
            self.c0 = (self.c0 + mod_mul(ct, l0, q)) % q;
        }
    }

    /// Remove a variable that no longer interacts with the others, returning
    /// its one-variable sum.
    fn factor_out(&mut self, i: usize) -> CycNum {
        debug_assert!(self.vars().iter().all(|&j| j == i || self.get(i, j) == 0));
        let s = one_var_sum(self.q, self.a[i][i], self.lin[i]);
        self.a[i][i] = 0;
        self.lin[i] = 0;
        self.alive[i] = false;
        s
    }

    fn has_quadratic(&self, vars: &[usize]) -> bool {
        vars.iter()
            .enumerate()
            .any(|(x, &i)| vars[x..].iter().any(|&j| self.get(i, j) != 0))
    }

    /// Value of the remaining affine sum, times `root(c0)`.
    fn affine_value(&self, vars: &[usize]) -> CycNum {
        if vars.iter().any(|&i| self.lin[i] != 0) {
            return CycNum::zero(self.q);
        }
        let count = BigInt::from(self.q).pow(vars.len() as u32);
        CycNum::root(self.q, self.c0).scale(&Rational::from_integer(count))
    }
}

/// Evaluate `Z_q(f)`; the result has conductor `q`.
pub fn eval_gauss_sum(f: &QuadPoly) -> CycNum {
    let w = Work::from_poly(f);
    if f.p == 2 {
        if f.k == 1 {
            solve_f2(w)
        } else {
            solve_two_power(w)
        }
    } else {
        solve_odd(w, f.p)
    }
}

fn solve_odd(mut w: Work, p: u64) -> CycNum {
    let q = w.q;
    let mut acc = CycNum::one(q);
    loop {
        let vars = w.vars();
        if !w.has_quadratic(&vars) {
            return &acc * &w.affine_value(&vars);
        }
        let mut best: Option<(u32, usize, usize)> = None;
        for (x, &i) in vars.iter().enumerate() {
            for &j in &vars[x..] {
                let c = w.get(i, j);
                if c == 0 {
                    continue;
                }
                let v = valuation(c, p);
                // prefer square terms on ties
                let key = (v, if i == j { 0 } else { 1 });
                if best.map_or(true, |(bv, bi, bj)| key < (bv, if bi == bj { 0 } else { 1 })) {
                    best = Some((v, i, j));
                }
            }
        }
        let (t0, i, j) = best.expect("a quadratic term exists");
        if i == j {
            let pt = p.pow(t0);
            let unit = w.a[i][i] / pt;
            let inv = mod_inv(mod_mul(2, unit, q), q).expect("2u is a unit");
            let mut l = vec![0u64; w.alive.len()];
            for &k in &vars {
                if k != i {
                    let g = mod_mul(w.get(i, k) / pt, inv, q);
                    l[k] = (q - g) % q;
                }
            }
            w.substitute(i, 1, &l, 0);
            let s = w.factor_out(i);
            if s.is_zero() {
                return CycNum::zero(q);
            }
            acc = &acc * &s;
        } else {
            // x_i = y + z, x_j = y - z turns the cross term into squares
            let mut l = vec![0u64; w.alive.len()];
            l[i] = 1;
            w.substitute(j, q - 2, &l, 0);
            let mut l = vec![0u64; w.alive.len()];
            l[j] = 1;
            w.substitute(i, 1, &l, 0);
        }
    }
}

fn solve_two_power(mut w: Work) -> CycNum {
    let q = w.q;
    let mut acc = CycNum::one(q);
    let mut halvings: u32 = 0;
    loop {
        let vars = w.vars();
        if vars.is_empty() {
            let v = CycNum::root(q, w.c0);
            return (&acc * &v).scale(&Rational::new(BigInt::one(), BigInt::from(2u8).pow(halvings)));
        }
        // make every linear and cross coefficient even
        let pivot = vars.iter().copied().find(|&t| {
            w.lin[t] % 2 == 1 || vars.iter().any(|&j| j > t && w.get(t, j) % 2 == 1)
        });
        if let Some(t) = pivot {
            let Some(l_idx) = vars.iter().copied().find(|&j| j > t && w.get(t, j) % 2 == 1) else {
                return CycNum::zero(q);
            };
            let inv = mod_inv(w.get(t, l_idx), q).expect("odd coefficient is a unit");
            let mut l = vec![0u64; w.alive.len()];
            for &i in &vars {
                if i != t && i != l_idx {
                    l[i] = (q - mod_mul(inv, w.get(i, t), q)) % q;
                }
            }
            let l0 = (q - mod_mul(inv, w.lin[t], q)) % q;
            w.substitute(l_idx, mod_mul(2, inv, q), &l, l0);
            halvings += 1;
            continue;
        }
        if let Some(i) = vars.iter().copied().find(|&i| w.a[i][i] % 2 == 1) {
            let inv = mod_inv(w.a[i][i], q).expect("odd coefficient is a unit");
            let mut l = vec![0u64; w.alive.len()];
            for &k in &vars {
                if k != i {
                    let g = mod_mul(w.get(i, k) / 2, inv, q);
                    l[k] = (q - g) % q;
                }
            }
            w.substitute(i, 1, &l, 0);
            let s = w.factor_out(i);
            if s.is_zero() {
                return CycNum::zero(q);
            }
            acc = &acc * &s;
            continue;
        }
        // all coefficients even: Z_q(g) = 2^n ω_q^{c0} Z_{q/2}(g/2)
        let half = q / 2;
        let n = vars.len();
        let mut sub = QuadPoly::new(half, n).expect("half of a power of two");
        for (x, &i) in vars.iter().enumerate() {
            for (y, &j) in vars.iter().enumerate().skip(x) {
                sub.add_quad(x, y, w.get(i, j) / 2);
            }
            sub.add_lin(x, w.lin[i] / 2);
        }
        let inner = eval_gauss_sum(&sub).embed(q).expect("q/2 divides q");
        let scale = Rational::new(
            BigInt::from(2u8).pow(n as u32),
            BigInt::from(2u8).pow(halvings),
        );
        return (&(&acc * &inner) * &CycNum::root(q, w.c0)).scale(&scale);
    }
}

/// `Σ_{x ∈ F_2^n} (-1)^{f(x)}`.
fn solve_f2(mut w: Work) -> CycNum {
    let mut count_factor: u32 = 0;
    loop {
        let vars = w.vars();
        for &i in &vars {
            // x^2 = x over F_2
            w.lin[i] = (w.lin[i] + w.a[i][i]) % 2;
            w.a[i][i] = 0;
        }
        let cross = vars.iter().enumerate().find_map(|(x, &i)| {
            vars[x + 1..].iter().find(|&&j| w.get(i, j) == 1).map(|&j| (i, j))
        });
        let Some((i, j)) = cross else {
            let v = w.affine_value(&vars);
            return v.scale(&Rational::from_integer(BigInt::from(2u8).pow(count_factor)));
        };
        // f = x_i (x_j + A) + B; summing x_i leaves 2 [x_j = A]
        let mut l = vec![0u64; w.alive.len()];
        for &k in &vars {
            if k != i && k != j {
                l[k] = w.get(i, k);
            }
        }
        let l0 = w.lin[i];
        for &k in &vars {
            if k != i {
                w.set(i, k, 0);
            }
        }
        w.lin[i] = 0;
        w.alive[i] = false;
        w.substitute(j, 0, &l, l0);
        w.alive[j] = false;
        count_factor += 1;
    }
}
