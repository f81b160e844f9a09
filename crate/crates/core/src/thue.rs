//! The binary forms `F_{2m}(X, Y)` defined by
//! `1 / (1 - sqrt(Y) T + X T^2) = sum F_n(X, Y) T^n`, the companion forms
//! `Hhat_p(X, Y) = F_{p-1}(X, Y + 2X)`, bounded searches for `F_{2m} = +-c`,
//! and the continued-fraction filter for midsize solutions of
//! `Hhat_p = +-c`.
//!
//! Even-index terms obey `F_{2m} = (Y - 2X) F_{2m-2} - X^2 F_{2m-4}` with
//! `F_0 = 1`, `F_2 = Y - X`; everything here is built on that recurrence.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::curves::IntegerPoint;
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::precision::{cos_pi_rational, digits_to_bits, FixedReal};
use crate::primes::is_prime_u64;
use crate::report::{CheckReport, ReportBuilder};

/// `F_{2m}(X, Y) = sum_j coeffs[j] X^{m-j} Y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenIndexPoly {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl EvenIndexPoly {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mut total = BigInt::zero();
        let mut xpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            // coefficient of X^{m-j} Y^j, walking j from m down to 0
            total = total * y + c * &xpow;
            xpow *= x;
        }
        total
    }
}

/// Coefficients of `F_{2m}`.
pub fn build_f(m: u32) -> Result<EvenIndexPoly> {
    if m == 0 {
        return Err(Error::NonPositive("m"));
    }
    let mut older: Vec<BigInt> = vec![BigInt::one()];
    let mut prev: Vec<BigInt> = vec![-BigInt::one(), BigInt::one()];
    for _ in 1..m {
        let mut next = vec![BigInt::zero(); prev.len() + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * 2;
        }
        for (j, c) in older.iter().enumerate() {
            next[j] -= c;
        }
        older = prev;
        prev = next;
    }
    Ok(EvenIndexPoly { m, coeffs: prev })
}

/// `F_{2m}(x, y)` in `O(m)` big-integer steps.
pub fn eval_f(m: u32, x: &BigInt, y: &BigInt) -> BigInt {
    let step = y - x * 2;
    let x2 = x * x;
    let mut older = BigInt::one();
    let mut prev = y - x;
    if m == 0 {
        return older;
    }
    for _ in 1..m {
        let next = &step * &prev - &x2 * &older;
        older = prev;
        prev = next;
    }
    prev
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// `Hhat_p(x, y) = prod_{k=1}^{(p-1)/2} (y - 2x cos(2 pi k / p))`, computed
/// exactly as `F_{p-1}(x, y + 2x)`.
pub fn eval_hhat(p: u64, x: &BigInt, y: &BigInt) -> Result<BigInt> {
    require_odd_prime(p)?;
    Ok(eval_f(((p - 1) / 2) as u32, x, &(y + x * 2)))
}

pub const PRODUCT_CHECK_DIGITS: u32 = 60;
pub const PRODUCT_CHECK_MAX_M: u32 = 20;

/// `prod_{k=1}^m (y - 4x cos^2(pi k / (2m+1)))` at `digits` decimal digits.
pub fn product_formula_value(m: u32, x: i64, y: i64, digits: u32) -> FixedReal {
    let bits = digits_to_bits(digits) + 32;
    let mut acc = FixedReal::from_int(1, bits);
    for k in 1..=m as u64 {
        let c = cos_pi_rational(k, 2 * m as u64 + 1, bits);
        let factor = FixedReal::from_int(y, bits).sub(&c.mul(&c).mul_int(4 * x));
        acc = acc.mul(&factor);
    }
    acc
}

/// Compares the cosine product with the exact form at each sample, relative
/// tolerance `1e-30`.
pub fn product_formula_check(m: u32, samples: &[(i64, i64)]) -> Result<CheckReport> {
    if m == 0 || m > PRODUCT_CHECK_MAX_M {
        return Err(Error::Precondition(format!(
            "product check needs 1 <= m <= {PRODUCT_CHECK_MAX_M}, got {m}"
        )));
    }
    let mut report = ReportBuilder::new("product-formula")
        .param("m", m)
        .param("digits", PRODUCT_CHECK_DIGITS)
        .param("samples", samples.len());
    for &(x, y) in samples {
        let approx = product_formula_value(m, x, y, PRODUCT_CHECK_DIGITS);
        let exact = eval_f(m, &BigInt::from(x), &BigInt::from(y));
        let bits = approx.frac_bits();
        let diff = approx.sub(&FixedReal::from_int(exact.clone(), bits)).abs();
        // |diff| <= 1e-30 * max(1, |exact|)
        let scale = if exact.is_zero() { BigInt::one() } else { exact.abs() };
        let lhs = diff.mantissa() * BigInt::from(10).pow(30);
        let rhs = scale << bits;
        if lhs > rhs {
            report.witness(json!({
                "x": x, "y": y, "exact": exact.to_string(), "approx": approx.to_f64(),
            }));
        }
    }
    Ok(report.finish())
}

/// Half-width of the Y-window around the real roots: `ceil(c^(1/m)) + 1`.
pub fn root_window(m: u32, target: &BigInt) -> BigInt {
    let mut r = target.nth_root(m);
    if r.pow(m) < *target {
        r += 1;
    }
    r + 1
}

pub fn search_f(m: u32, target: &BigInt, x_bound: u64) -> Result<Vec<IntegerPoint>> {
    search_f_with(m, target, x_bound, Exec::auto())
}

/// All `(X, Y)` with `|X| <= x_bound` and `F_{2m}(X, Y) = +-target`, sorted.
///
/// For fixed `X` the form is monic of degree `m` in `Y` with real roots
/// `4X cos^2(pi k / (2m+1))`, all between `0` and `4X`. A `Y` at distance at
/// least 2 from every root has `|F| >= 2^m > target`, so scanning the window
/// of [`root_window`] around `[min(0, 4X), max(0, 4X)]` is complete.
pub fn search_f_with(m: u32, target: &BigInt, x_bound: u64, exec: Exec) -> Result<Vec<IntegerPoint>> {
    if m == 0 {
        return Err(Error::NonPositive("m"));
    }
    if !target.is_positive() {
        return Err(Error::NonPositive("target"));
    }
    if BigInt::one() << m <= *target {
        return Err(Error::Precondition(format!("2^{m} must exceed the target {target}")));
    }
    let w = i64::try_from(root_window(m, target))
        .map_err(|_| Error::Precondition("root window too wide".into()))?;
    let xb = x_bound as i64;
    let neg_target = -target.clone();
    let rows = map_range(exec, 0..(2 * x_bound + 1), |off| {
        let x = off as i64 - xb;
        let (lo, hi) = (x.min(0) * 4 - w, x.max(0) * 4 + w);
        let xb = BigInt::from(x);
        (lo..=hi)
            .filter_map(|y| {
                let yb = BigInt::from(y);
                let v = eval_f(m, &xb, &yb);
                (v == *target || v == neg_target).then(|| IntegerPoint::new(x, y))
            })
            .collect::<Vec<_>>()
    });
    let mut out: Vec<IntegerPoint> = rows.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

/// A convergent `numerator / denominator` of `2 cos(2 pi k / p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentCandidate {
    pub k: u64,
    pub numerator: BigInt,
    pub denominator: BigInt,
}

/// A candidate with `Hhat_p` evaluated at `(b, a), (b, -a), (-b, a), (-b, -a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluatedCandidate {
    pub candidate: ConvergentCandidate,
    pub evaluations: [BigInt; 4],
}

impl EvaluatedCandidate {
    pub fn hits(&self, target: &BigInt) -> bool {
        self.evaluations.iter().any(|v| v.abs() == *target)
    }
}

pub const MIDSIZE_X_MIN: u64 = 4;
/// `ceil(e^8)`; `e^8 = 2980.96`.
pub const MIDSIZE_X_MAX: u64 = 2981;
pub const DEFAULT_CONVERGENT_DIGITS: u32 = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvergentParams {
    pub p: u64,
    pub target: u64,
    pub x_min: u64,
    pub x_max: u64,
    /// Working precision in decimal digits; every list is recomputed at twice
    /// this and must agree.
    pub digits: u32,
}

impl Default for ConvergentParams {
    fn default() -> Self {
        ConvergentParams {
            p: 691,
            target: 691,
            x_min: MIDSIZE_X_MIN,
            x_max: MIDSIZE_X_MAX,
            digits: DEFAULT_CONVERGENT_DIGITS,
        }
    }
}

/// `2 cos(2 pi k / p)` at `digits` decimal digits.
pub fn two_cos(p: u64, k: u64, digits: u32) -> FixedReal {
    cos_pi_rational(2 * k, p, digits_to_bits(digits)).mul_int(2)
}

pub fn convergent_list(p: u64, k: u64, digits: u32, max_den: u64) -> Vec<(BigInt, BigInt)> {
    two_cos(p, k, digits).convergents(&BigInt::from(max_den))
}

pub fn convergent_filter(params: &ConvergentParams) -> Result<Vec<EvaluatedCandidate>> {
    convergent_filter_with(params, Exec::auto())
}

/// Convergents `a/b` of every `2 cos(2 pi k / p)`, `1 <= k <= (p-1)/2`, with
/// `x_min < b <= x_max`, each evaluated on `Hhat_p` at all sign choices.
/// Ordered by `k`, then by denominator.
pub fn convergent_filter_with(
    params: &ConvergentParams,
    exec: Exec,
) -> Result<Vec<EvaluatedCandidate>> {
    require_odd_prime(params.p)?;
    if params.digits == 0 {
        return Err(Error::NonPositive("digits"));
    }
    let half = (params.p - 1) / 2;
    let per_k = map_range(exec, 1..half + 1, |k| -> Result<Vec<EvaluatedCandidate>> {
        let work = convergent_list(params.p, k, params.digits, params.x_max);
        let check = convergent_list(params.p, k, params.digits * 2, params.x_max);
        if work != check {
            return Err(Error::PrecisionInstability {
                p: params.p,
                k,
                digits: params.digits,
            });
        }
        let x_min = BigInt::from(params.x_min);
        work.into_iter()
            .filter(|(_, b)| *b > x_min)
            .map(|(a, b)| {
                let ev = |x: &BigInt, y: &BigInt| eval_hhat(params.p, x, y);
                let evaluations = [ev(&b, &a)?, ev(&b, &-&a)?, ev(&-&b, &a)?, ev(&-&b, &-&a)?];
                Ok(EvaluatedCandidate {
                    candidate: ConvergentCandidate { k, numerator: a, denominator: b },
                    evaluations,
                })
            })
            .collect()
    });
    let mut out = Vec::new();
    for group in per_k {
        out.extend(group?);
    }
    Ok(out)
}

/// Runs the filter; candidates reaching `+-target` are witnesses.
pub fn convergent_filter_report(params: &ConvergentParams) -> Result<CheckReport> {
    convergent_filter_report_with(params, Exec::auto())
}

pub fn convergent_filter_report_with(params: &ConvergentParams, exec: Exec) -> Result<CheckReport> {
    let mut report = ReportBuilder::new("convergent-filter")
        .param("p", params.p)
        .param("target", params.target)
        .param("x_min", params.x_min)
        .param("x_max", params.x_max)
        .param("digits", params.digits)
        .param("check_digits", params.digits * 2);
    let candidates = convergent_filter_with(params, exec)?;
    let target = BigInt::from(params.target);
    report.set_param("candidates", candidates.len());
    for c in candidates.iter().filter(|c| c.hits(&target)) {
        report.witness(json!({
            "k": c.candidate.k,
            "num": c.candidate.numerator.to_string(),
            "den": c.candidate.denominator.to_string(),
        }));
    }
    Ok(report.finish())
}
