//! Exact arithmetic in cyclotomic fields `Q(ω_N)`, `ω_N = e^{2πi/N}`.
//!
//! An element is stored in the power basis `1, ω_N, …, ω_N^{φ(N)-1}` after
//! reduction modulo the cyclotomic polynomial `Φ_N`, so two elements with the
//! same conductor are equal exactly when their coefficient vectors are.

mod approx;
mod text;

pub use approx::{approx_complex, enclose, Interval};
pub use text::CycParseError;
pub(crate) use text::parse_rational;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{divisors, gcd, lcm, phi};
use crate::linalg;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("conductor {from} does not divide {to}")]
    NonDivisibleConductor { from: u64, to: u64 },
    #[error("value is not rational")]
    NotRational,
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("expected {expected} coefficients for conductor {conductor}, got {got}")]
    WrongLength { conductor: u64, expected: usize, got: usize },
}

/// Per-conductor data: the nonzero non-leading terms of the monic `Φ_N`.
struct Field {
    n: u64,
    phi: usize,
    tail: Vec<(usize, i64)>,
}

impl Field {
    /// Reduce `Σ raw_j x^j` modulo `x^N - 1` and then modulo `Φ_N`.
    fn reduce(&self, mut raw: Vec<BigInt>) -> Vec<BigInt> {
        let n = self.n as usize;
        if raw.len() > n {
            for j in n..raw.len() {
                let c = std::mem::take(&mut raw[j]);
                if !c.is_zero() {
                    raw[j % n] += c;
                }
            }
            raw.truncate(n);
        }
        for d in (self.phi..raw.len()).rev() {
            let c = std::mem::take(&mut raw[d]);
            if c.is_zero() {
                continue;
            }
            let base = d - self.phi;
            for &(j, t) in &self.tail {
                raw[base + j] -= &c * t;
            }
        }
        raw.resize(self.phi, BigInt::zero());
        raw
    }
}

fn field_cache() -> &'static Mutex<HashMap<u64, Arc<Field>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_cache() -> &'static Mutex<HashMap<u64, Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let div = cyclotomic_polynomial(d);
        num = exact_monic_division(&num, &div);
    }
    poly_cache().lock().unwrap().insert(n, num.clone());
    num
}

fn exact_monic_division(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(*d).expect("coefficient overflow"))
                    .expect("coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quot
}

fn field(n: u64) -> Arc<Field> {
    if let Some(f) = field_cache().lock().unwrap().get(&n) {
        return f.clone();
    }
    let poly = cyclotomic_polynomial(n);
    let ph = poly.len() - 1;
    let tail = poly[..ph]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    let f = Arc::new(Field { n, phi: ph, tail });
    field_cache().lock().unwrap().insert(n, f.clone());
    f
}

/// An element of `Q(ω_N)` in reduced power-basis form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycNum {
    conductor: u64,
    coeffs: Vec<Rational>,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl CycNum {
    pub fn new(conductor: u64, coeffs: Vec<Rational>) -> Result<Self, CycError> {
        if conductor == 0 {
            return Err(CycError::ZeroConductor);
        }
        let expected = phi(conductor) as usize;
        if coeffs.len() != expected {
            return Err(CycError::WrongLength {
                conductor,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(CycNum { conductor, coeffs })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn zero(conductor: u64) -> Self {
        CycNum {
            conductor,
            coeffs: vec![Rational::zero(); phi(conductor) as usize],
        }
    }

    pub fn from_rational(value: Rational, conductor: u64) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = value;
        z
    }

    pub fn from_int(value: i64, conductor: u64) -> Self {
        Self::from_rational(rat(value), conductor)
    }

    pub fn one(conductor: u64) -> Self {
        Self::from_int(1, conductor)
    }

    /// `ω_N^k`.
    pub fn root(conductor: u64, k: u64) -> Self {
        let mut raw = vec![BigInt::zero(); conductor as usize];
        raw[(k % conductor) as usize] = BigInt::one();
        Self::from_int_form(conductor, field(conductor).reduce(raw), &BigInt::one())
    }

    /// `Σ_e counts[e] ω_N^e` for a table indexed by exponent.
    pub fn from_exponent_counts(conductor: u64, counts: Vec<BigInt>) -> Self {
        assert_eq!(counts.len() as u64, conductor);
        Self::from_int_form(conductor, field(conductor).reduce(counts), &BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Rewrite in `Q(ω_M)` for a multiple `M` of the conductor.
    pub fn embed(&self, target: u64) -> Result<Self, CycError> {
        if target == 0 || target % self.conductor != 0 {
            return Err(CycError::NonDivisibleConductor {
                from: self.conductor,
                to: target,
            });
        }
        if target == self.conductor {
            return Ok(self.clone());
        }
        let step = (target / self.conductor) as usize;
        let (ints, den) = self.int_form();
        let mut raw = vec![BigInt::zero(); target as usize];
        for (j, c) in ints.into_iter().enumerate() {
            raw[j * step] = c;
        }
        Ok(Self::from_int_form(target, field(target).reduce(raw), &den))
    }

    /// Express the value in `Q(ω_M)` for a divisor `M` of the conductor, if it lies there.
    pub fn restrict(&self, target: u64) -> Option<Self> {
        if target == 0 || self.conductor % target != 0 {
            return None;
        }
        if target == self.conductor {
            return Some(self.clone());
        }
        let small_phi = phi(target) as usize;
        let basis: Vec<CycNum> = (0..small_phi as u64)
            .map(|i| CycNum::root(target, i).embed(self.conductor).unwrap())
            .collect();
        let m: linalg::RatMatrix = (0..self.coeffs.len())
            .map(|r| basis.iter().map(|b| b.coeffs[r].clone()).collect())
            .collect();
        let x = linalg::solve(&m, &self.coeffs)?;
        Some(CycNum {
            conductor: target,
            coeffs: x,
        })
    }

    fn unify(a: &CycNum, b: &CycNum) -> (CycNum, CycNum) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let l = lcm(a.conductor, b.conductor);
        (a.embed(l).unwrap(), b.embed(l).unwrap())
    }

    /// Common-denominator form `(a_j, d)` with value `Σ a_j ω^j / d`.
    fn int_form(&self) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (ints, den)
    }

    fn from_int_form(conductor: u64, ints: Vec<BigInt>, den: &BigInt) -> Self {
        let coeffs = ints
            .into_iter()
            .map(|a| {
                if den.is_one() {
                    Rational::from_integer(a)
                } else {
                    Rational::new(a, den.clone())
                }
            })
            .collect();
        CycNum { conductor, coeffs }
    }

    fn add_ref(&self, other: &CycNum) -> CycNum {
        if self.conductor != other.conductor {
            let (a, b) = Self::unify(self, other);
            return a.add_ref(&b);
        }
        CycNum {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn mul_ref(&self, other: &CycNum) -> CycNum {
        if self.conductor != other.conductor {
            let (a, b) = Self::unify(self, other);
            return a.mul_ref(&b);
        }
        if self.is_zero() || other.is_zero() {
            return CycNum::zero(self.conductor);
        }
        let f = field(self.conductor);
        let (xa, da) = self.int_form();
        let (xb, db) = other.int_form();
        let mut raw = vec![BigInt::zero(); 2 * f.phi - 1];
        for (i, a) in xa.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in xb.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Self::from_int_form(self.conductor, f.reduce(raw), &(da * db))
    }

    pub fn scale(&self, r: &Rational) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugate, i.e. the automorphism `ω ↦ ω^{-1}`.
    pub fn conj(&self) -> CycNum {
        let n = self.conductor as usize;
        let (ints, den) = self.int_form();
        let mut raw = vec![BigInt::zero(); n];
        for (j, c) in ints.into_iter().enumerate() {
            raw[(n - j) % n] = c;
        }
        Self::from_int_form(self.conductor, field(self.conductor).reduce(raw), &den)
    }

    pub fn pow(&self, mut e: u64) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `|z|^2 = z * conj(z)`.
    pub fn norm_sq(&self) -> CycNum {
        self * &self.conj()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn rational_value(&self) -> Result<Rational, CycError> {
        if self.is_rational() {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CycError::NotRational)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<CycNum> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(CycNum::from_rational(self.coeffs[0].recip(), self.conductor));
        }
        // Solve z * w = 1 through the multiplication-by-z matrix.
        let ph = self.coeffs.len();
        let cols: Vec<CycNum> = (0..ph as u64)
            .map(|j| self * &CycNum::root(self.conductor, j))
            .collect();
        let m: linalg::RatMatrix = (0..ph)
            .map(|r| cols.iter().map(|c| c.coeffs[r].clone()).collect())
            .collect();
        let mut rhs = vec![Rational::zero(); ph];
        rhs[0] = Rational::one();
        let w = linalg::solve(&m, &rhs)?;
        Some(CycNum {
            conductor: self.conductor,
            coeffs: w,
        })
    }

    pub fn div(&self, other: &CycNum) -> Option<CycNum> {
        other.inv().map(|w| self * &w)
    }

    /// If `z` is a root of unity, return `(d, k)` with `z = ω_d^k`, `d` the
    /// exact order and `gcd(k, d) = 1`.
    pub fn root_of_unity(&self) -> Option<(u64, u64)> {
        if self.coeffs.iter().any(|c| !c.is_integer()) || self.is_zero() {
            return None;
        }
        // Locate the candidate exponent numerically, then confirm exactly.
        let l = lcm(2, self.conductor);
        let (mut re, mut im) = (0f64, 0f64);
        for (j, c) in self.coeffs.iter().enumerate() {
            let c = c.numer().to_string().parse::<f64>().ok()?;
            let t = std::f64::consts::TAU * j as f64 / self.conductor as f64;
            re += c * t.cos();
            im += c * t.sin();
        }
        if ((re * re + im * im) - 1.0).abs() > 1e-6 {
            return None;
        }
        let turns = im.atan2(re) / std::f64::consts::TAU;
        let guess = (turns * l as f64).round() as i64;
        let z = self.embed(l).ok()?;
        for delta in [0i64, 1, -1] {
            let k = (guess + delta).rem_euclid(l as i64) as u64;
            if CycNum::root(l, k) == z {
                let g = gcd(k, l);
                return Some((l / g, k / g));
            }
        }
        None
    }

    /// Exponent `e` with `z = ω_L^e`, when `z` is a root of unity whose order divides `L`.
    pub fn root_exponent(&self, l: u64) -> Option<u64> {
        let (d, k) = self.root_of_unity()?;
        if l % d != 0 {
            return None;
        }
        Some(k * (l / d))
    }
}

/// `ω_N^k` reduced modulo `Φ_N`.
pub fn make_root(n: u64, k: u64) -> CycNum {
    CycNum::root(n, k)
}

pub fn embed_conductor(z: &CycNum, target: u64) -> Result<CycNum, CycError> {
    z.embed(target)
}

/// `Some((order, exponent))` when `z` is a root of unity.
pub fn is_root_of_unity(z: &CycNum) -> Option<(u64, u64)> {
    z.root_of_unity()
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.add_ref(rhs)
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        self.add_ref(&rhs)
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.add_ref(&-rhs)
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        self.add_ref(&-&rhs)
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.mul_ref(rhs)
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        self.mul_ref(&rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={};", self.conductor)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}/{}", c.numer(), c.denom())?;
        }
        Ok(())
    }
}
