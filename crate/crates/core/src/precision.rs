//! Binary fixed-point reals over `BigInt`: enough to evaluate cosines at a few
//! hundred digits and read off continued-fraction convergents exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD_BITS: u32 = 64;

/// The value `mantissa / 2^frac_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedReal {
    mantissa: BigInt,
    frac_bits: u32,
}

/// Fractional bits carrying at least `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

impl FixedReal {
    pub fn from_int(v: impl Into<BigInt>, frac_bits: u32) -> Self {
        FixedReal {
            mantissa: v.into() << frac_bits,
            frac_bits,
        }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    /// Re-expresses at `frac_bits`, truncating toward minus infinity.
    pub fn with_bits(&self, frac_bits: u32) -> Self {
        let mantissa = if frac_bits >= self.frac_bits {
            &self.mantissa << (frac_bits - self.frac_bits)
        } else {
            self.mantissa
                .div_floor(&(BigInt::one() << (self.frac_bits - frac_bits)))
        };
        FixedReal { mantissa, frac_bits }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        FixedReal {
            mantissa: &self.mantissa + &other.mantissa,
            frac_bits: self.frac_bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        FixedReal {
            mantissa: &self.mantissa - &other.mantissa,
            frac_bits: self.frac_bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        let prod = &self.mantissa * &other.mantissa;
        FixedReal {
            mantissa: prod.div_floor(&(BigInt::one() << self.frac_bits)),
            frac_bits: self.frac_bits,
        }
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        FixedReal {
            mantissa: &self.mantissa * k.into(),
            frac_bits: self.frac_bits,
        }
    }

    pub fn div_int(&self, k: impl Into<BigInt>) -> Self {
        FixedReal {
            mantissa: self.mantissa.div_floor(&k.into()),
            frac_bits: self.frac_bits,
        }
    }

    pub fn abs(&self) -> Self {
        FixedReal {
            mantissa: self.mantissa.abs(),
            frac_bits: self.frac_bits,
        }
    }

    /// Nearest integer, ties away from zero.
    pub fn round(&self) -> BigInt {
        let half = BigInt::one() << self.frac_bits.saturating_sub(1);
        let scale = BigInt::one() << self.frac_bits;
        if self.mantissa.is_negative() {
            -((-&self.mantissa + half).div_floor(&scale))
        } else {
            (&self.mantissa + half).div_floor(&scale)
        }
    }

    pub fn to_f64(&self) -> f64 {
        // keep 60 bits of the mantissa so the conversion never overflows
        let drop = self.mantissa.bits().saturating_sub(60) as u32;
        let m = (&self.mantissa >> drop).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(drop as i32 - self.frac_bits as i32)
    }

    /// Continued-fraction convergents `(num, den)` of this exact rational
    /// with `den <= max_den`, in order.
    pub fn convergents(&self, max_den: &BigInt) -> Vec<(BigInt, BigInt)> {
        let mut n = self.mantissa.clone();
        let mut d = BigInt::one() << self.frac_bits;
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        let mut out = Vec::new();
        while !d.is_zero() {
            let (a, r) = n.div_mod_floor(&d);
            let h_next = &a * &h + &h_prev;
            let k_next = &a * &k + &k_prev;
            if &k_next > max_den {
                break;
            }
            out.push((h_next.clone(), k_next.clone()));
            (h_prev, h) = (h, h_next);
            (k_prev, k) = (k, k_next);
            n = d;
            d = r;
        }
        out
    }
}

fn atan_inv(k: u64, frac_bits: u32) -> BigInt {
    // atan(1/k) = sum (-1)^n / ((2n+1) k^(2n+1))
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = (BigInt::one() << frac_bits) / &k;
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * n + 1);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    sum
}

/// `pi` to `frac_bits` fractional bits (Machin's formula).
pub fn pi(frac_bits: u32) -> FixedReal {
    let w = frac_bits + GUARD_BITS;
    let m = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
    FixedReal { mantissa: m, frac_bits: w }.with_bits(frac_bits)
}

/// `cos(theta)` by its Taylor series, evaluated with guard bits.
pub fn cos(theta: &FixedReal) -> FixedReal {
    let out_bits = theta.frac_bits;
    let w = out_bits + GUARD_BITS;
    let t = theta.with_bits(w);
    let t2 = t.mul(&t);
    let mut term = FixedReal::from_int(1, w);
    let mut sum = term.clone();
    let mut n = 1u64;
    while !term.mantissa.is_zero() {
        term = term.mul(&t2).div_int((2 * n - 1) * (2 * n));
        term.mantissa = -term.mantissa;
        sum = sum.add(&term);
        n += 1;
    }
    sum.with_bits(out_bits)
}

/// `cos(pi * num / den)`.
pub fn cos_pi_rational(num: u64, den: u64, frac_bits: u32) -> FixedReal {
    let w = frac_bits + GUARD_BITS;
    let theta = pi(w).mul_int(num).div_int(den);
    cos(&theta).with_bits(frac_bits)
}
