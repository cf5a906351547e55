//! Certified decimal approximations under the principal embedding
//! `ω_N ↦ e^{2πi/N}`, using fixed-point interval arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CycNum, Rational};

/// The closed interval `[lo, hi] * 2^-bits`.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    fn exact_int(v: i64, bits: u32) -> Self {
        let x = BigInt::from(v) << bits;
        Interval { lo: x.clone(), hi: x, bits }
    }

    fn from_rational(r: &Rational, bits: u32) -> Self {
        let scaled = r.numer() << bits;
        Interval {
            lo: floor_div(&scaled, r.denom()),
            hi: ceil_div(&scaled, r.denom()),
            bits,
        }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            bits: self.bits,
        }
    }

    fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let unit = BigInt::one() << self.bits;
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval {
            lo: floor_div(min, &unit),
            hi: ceil_div(max, &unit),
            bits: self.bits,
        }
    }

    fn scale(&self, r: &Rational) -> Interval {
        let a = &self.lo * r.numer();
        let b = &self.hi * r.numer();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval {
            lo: floor_div(&lo, r.denom()),
            hi: ceil_div(&hi, r.denom()),
            bits: self.bits,
        }
    }

    fn widen(&self, eps: &BigInt) -> Interval {
        Interval {
            lo: &self.lo - eps,
            hi: &self.hi + eps,
            bits: self.bits,
        }
    }

    /// Lower end point as an exact rational.
    pub fn lo(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    /// Upper end point as an exact rational.
    pub fn hi(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo() <= *r && *r <= self.hi()
    }

    /// Round to `digits` decimals if both end points agree.
    fn decimal(&self, digits: usize) -> Option<String> {
        let a = round_decimal(&self.lo, self.bits, digits);
        let b = round_decimal(&self.hi, self.bits, digits);
        (a == b).then(|| format_decimal(&a, digits))
    }

    fn midpoint_decimal(&self, digits: usize) -> String {
        let mid: BigInt = (&self.lo + &self.hi) >> 1;
        format_decimal(&round_decimal(&mid, self.bits, digits), digits)
    }
}

fn round_decimal(x: &BigInt, bits: u32, digits: usize) -> BigInt {
    let ten = BigInt::from(10).pow(digits as u32);
    let unit = BigInt::one() << bits;
    // round half away from zero
    let num = (x * ten) * 2 + if x.is_negative() { -&unit } else { unit.clone() };
    let q = num / (unit * 2);
    q
}

fn format_decimal(v: &BigInt, digits: usize) -> String {
    let neg = v.is_negative();
    let mut s = v.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = "0".repeat(digits + 1 - s.len()) + &s;
        }
        s.insert(s.len() - digits, '.');
    }
    if neg && v.abs() != BigInt::zero() {
        s.insert(0, '-');
    }
    s
}

fn atan_inv(x: i64, bits: u32) -> Interval {
    // atan(1/x) = Σ (-1)^k / ((2k+1) x^{2k+1}); alternating with decreasing terms
    let unit = BigInt::one() << bits;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut power = BigInt::from(x);
    let x2 = BigInt::from(x * x);
    let mut k: i64 = 0;
    loop {
        let den = &power * (2 * k + 1);
        let t_lo = floor_div(&unit, &den);
        let t_hi = ceil_div(&unit, &den);
        if t_hi <= BigInt::one() {
            // tail bounded by this term
            lo -= &t_hi;
            hi += &t_hi;
            break;
        }
        if k % 2 == 0 {
            lo += &t_lo;
            hi += &t_hi;
        } else {
            lo -= &t_hi;
            hi -= &t_lo;
        }
        power *= &x2;
        k += 1;
    }
    Interval { lo, hi, bits }
}

fn pi(bits: u32) -> Interval {
    let a = atan_inv(5, bits).scale(&Rational::from_integer(BigInt::from(16)));
    let b = atan_inv(239, bits).scale(&Rational::from_integer(BigInt::from(4)));
    a.add(&b.neg())
}

/// Taylor series for cos and sin at a point of absolute value at most 7.
fn cos_sin(theta: &Interval) -> (Interval, Interval) {
    let bits = theta.bits;
    let mut cos = Interval::exact_int(1, bits);
    let mut sin = theta.clone();
    let mut term = theta.clone(); // θ^k / k!
    let bound = Rational::from_integer(BigInt::from(7));
    let mut tail = bound.clone();
    let eps = Rational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let mut k = 1i64;
    loop {
        k += 1;
        term = term
            .mul(theta)
            .scale(&Rational::new(BigInt::one(), BigInt::from(k)));
        tail = tail * &bound / Rational::from_integer(BigInt::from(k));
        let signed = if (k / 2) % 2 == 1 { term.neg() } else { term.clone() };
        if k % 2 == 0 {
            cos = cos.add(&signed);
        } else {
            sin = sin.add(&signed);
        }
        if k > 8 && tail < eps {
            break;
        }
    }
    // Remaining terms are bounded by 2 * 7^{k+1}/(k+1)!, well below one ulp.
    let slack = BigInt::from(2);
    (cos.widen(&slack), sin.widen(&slack))
}

/// Enclosures `(re, im)` of `z` under the principal embedding with roughly
/// `bits` bits of fractional precision.
pub fn enclose(z: &CycNum, bits: u32) -> (Interval, Interval) {
    let n = z.conductor();
    let two_pi = pi(bits).scale(&Rational::from_integer(BigInt::from(2)));
    let mut re = Interval::exact_int(0, bits);
    let mut im = Interval::exact_int(0, bits);
    for (j, c) in z.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if j == 0 {
            re = re.add(&Interval::from_rational(c, bits));
            continue;
        }
        let theta = two_pi.scale(&Rational::new(BigInt::from(j), BigInt::from(n)));
        let (cs, sn) = cos_sin(&theta);
        let cr = Interval::from_rational(c, bits);
        re = re.add(&cs.mul(&cr));
        im = im.add(&sn.mul(&cr));
    }
    (re, im)
}

/// Decimal strings `(re, im)` correct to `digits` places after the point,
/// unless the value sits on a rounding boundary, where the midpoint is rounded.
pub fn approx_complex(z: &CycNum, digits: usize) -> (String, String) {
    let magnitude_bits: u32 = z
        .coeffs()
        .iter()
        .map(|c| (c.numer().bits() as u32).saturating_sub(c.denom().bits() as u32) + 1)
        .sum::<u32>()
        .min(4096);
    let mut bits = 64 + (digits as u32) * 4 + magnitude_bits;
    for _ in 0..4 {
        let (re, im) = enclose(z, bits);
        if let (Some(a), Some(b)) = (re.decimal(digits), im.decimal(digits)) {
            return (a, b);
        }
        bits *= 2;
    }
    let (re, im) = enclose(z, bits);
    (re.midpoint_decimal(digits), im.midpoint_decimal(digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi(200);
        let approx = Rational::new(BigInt::from(314159265358979323i64), BigInt::from(10i64.pow(17)));
        assert!(p.lo() > approx);
        assert!(p.width() < Rational::new(BigInt::one(), BigInt::one() << 190));
    }

    #[test]
    fn fourth_root_of_unity() {
        let (re, im) = approx_complex(&CycNum::root(4, 1), 6);
        assert_eq!(re, "0.000000");
        assert_eq!(im, "1.000000");
        let (re, im) = approx_complex(&CycNum::root(3, 1), 8);
        assert_eq!(re, "-0.50000000");
        assert_eq!(im, "0.86602540");
    }
}
