//! Exact q-expansion of the discriminant form and the tau oracle built on it.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::primes::{factorize, primes_up_to};
use crate::report::{CheckReport, ReportBuilder};

/// Dense power-series prefix `sum_{n < order} coeffs[n] q^n` with exact
/// integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::OrderTooSmall { min: 1, got: 0 });
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "series order must be positive");
        TruncatedSeries {
            coeffs: vec![BigInt::zero(); order],
        }
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Series from `(exponent, coefficient)` pairs; terms at or past `order`
    /// are dropped.
    pub fn from_terms<I>(order: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, BigInt)>,
    {
        let mut s = Self::zero(order);
        for (e, c) in terms {
            if e < order {
                s.coeffs[e] += c;
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, zero past the truncation order.
    pub fn coeff(&self, n: usize) -> BigInt {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_orders(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Multiply by `q^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate().take(n.saturating_sub(k)) {
            coeffs[i + k] = c.clone();
        }
        TruncatedSeries { coeffs }
    }

    pub fn square(&self) -> Self {
        series_multiply_with(self, self, Exec::auto()).expect("same order")
    }
}

fn check_orders(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    Ok(())
}

/// Exact truncated product (schoolbook).
pub fn series_multiply(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    series_multiply_with(a, b, Exec::auto())
}

pub fn series_multiply_with(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    exec: Exec,
) -> Result<TruncatedSeries> {
    check_orders(a, b)?;
    let n = a.order();
    let bound_bits = max_bits(&a.coeffs) + max_bits(&b.coeffs) + usize_bits(n) + 1;
    let coeffs = if bound_bits <= 126 {
        multiply_i128(&a.coeffs, &b.coeffs, exec)
    } else {
        multiply_big(&a.coeffs, &b.coeffs, exec)
    };
    Ok(TruncatedSeries { coeffs })
}

/// Forces the arbitrary-precision kernel; used to cross-check the i128 path.
pub fn series_multiply_bigint(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    exec: Exec,
) -> Result<TruncatedSeries> {
    check_orders(a, b)?;
    Ok(TruncatedSeries {
        coeffs: multiply_big(&a.coeffs, &b.coeffs, exec),
    })
}

fn max_bits(v: &[BigInt]) -> usize {
    v.iter().map(|c| c.bits() as usize).max().unwrap_or(0)
}

fn usize_bits(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

// Each output coefficient is bounded by n * 2^(bits_a + bits_b), so the
// caller guarantees no i128 accumulator can overflow.
fn multiply_i128(a: &[BigInt], b: &[BigInt], exec: Exec) -> Vec<BigInt> {
    let a: Vec<i128> = a.iter().map(|c| c.to_i128().expect("fits")).collect();
    let b: Vec<i128> = b.iter().map(|c| c.to_i128().expect("fits")).collect();
    map_range(exec, 0..a.len() as u64, |n| {
        let n = n as usize;
        let mut acc = 0i128;
        for i in 0..=n {
            let x = a[i];
            if x != 0 {
                acc += x * b[n - i];
            }
        }
        BigInt::from(acc)
    })
}

fn multiply_big(a: &[BigInt], b: &[BigInt], exec: Exec) -> Vec<BigInt> {
    map_range(exec, 0..a.len() as u64, |n| {
        let n = n as usize;
        let mut acc = BigInt::zero();
        for i in 0..=n {
            if !a[i].is_zero() && !b[n - i].is_zero() {
                acc += &a[i] * &b[n - i];
            }
        }
        acc
    })
}

/// `prod_{n>=1} (1 - q^n)^3` from the sparse identity
/// `sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}`.
pub fn jacobi_cube_series(order: usize) -> TruncatedSeries {
    let terms = (0usize..)
        .map(|k| (k, k * (k + 1) / 2))
        .take_while(|&(_, e)| e < order)
        .map(|(k, e)| {
            let c = BigInt::from(2 * k + 1);
            (e, if k % 2 == 0 { c } else { -c })
        });
    TruncatedSeries::from_terms(order, terms)
}

/// `Delta = q prod (1 - q^n)^24` truncated at `order`; coefficient `n` is
/// `tau(n)` for `1 <= n < order`.
pub fn delta_series(order: usize) -> Result<TruncatedSeries> {
    delta_series_with(order, Exec::auto())
}

pub fn delta_series_with(order: usize, exec: Exec) -> Result<TruncatedSeries> {
    if order < 2 {
        return Err(Error::OrderTooSmall { min: 2, got: order });
    }
    let mut eta = jacobi_cube_series(order);
    for _ in 0..3 {
        eta = series_multiply_with(&eta, &eta, exec)?;
    }
    Ok(eta.shift(1))
}

/// Writes `tau(1), ..., tau(order-1)`, one per line.
pub fn write_coefficients<W: Write>(series: &TruncatedSeries, mut out: W) -> io::Result<()> {
    for c in series.coeffs().iter().skip(1) {
        writeln!(out, "{c}")?;
    }
    Ok(())
}

/// `tau(p)` for every prime up to `limit`, backed by the series of
/// `Delta` to order `limit + 1`.
#[derive(Clone, Debug)]
pub struct TauOracle {
    limit: u64,
    prime_tau: BTreeMap<u64, BigInt>,
    full_coeffs: Option<Arc<TruncatedSeries>>,
}

impl TauOracle {
    /// Builds the series of `Delta` through `q^limit`.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with(limit, Exec::auto())
    }

    pub fn build_with(limit: u64, exec: Exec) -> Result<Self> {
        if limit < 1 {
            return Err(Error::NonPositive("limit"));
        }
        let series = delta_series_with(limit as usize + 1, exec)?;
        Ok(Self::from_series(Arc::new(series)))
    }

    pub fn from_series(series: Arc<TruncatedSeries>) -> Self {
        let limit = series.order() as u64 - 1;
        let prime_tau = primes_up_to(limit)
            .into_iter()
            .map(|p| (p, series.coeff(p as usize)))
            .collect();
        TauOracle {
            limit,
            prime_tau,
            full_coeffs: Some(series),
        }
    }

    /// Oracle from known prime values only; `tau(n)` still works for every
    /// `n` whose prime factors are covered.
    pub fn from_prime_values(limit: u64, prime_tau: BTreeMap<u64, BigInt>) -> Result<Self> {
        for p in primes_up_to(limit) {
            if !prime_tau.contains_key(&p) {
                return Err(Error::Precondition(format!("missing tau({p})")));
            }
        }
        Ok(TauOracle {
            limit,
            prime_tau,
            full_coeffs: None,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn series(&self) -> Option<&TruncatedSeries> {
        self.full_coeffs.as_deref()
    }

    pub fn primes(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.prime_tau.iter().map(|(&p, t)| (p, t))
    }

    pub fn tau_prime(&self, p: u64) -> Result<&BigInt> {
        self.prime_tau.get(&p).ok_or(Error::PrimeBeyondLimit {
            prime: p,
            limit: self.limit,
        })
    }

    /// `tau(p^m)` by the Hecke recurrence `t_m = tau(p) t_{m-1} - p^11 t_{m-2}`.
    pub fn tau_prime_power(&self, p: u64, m: u32) -> Result<BigInt> {
        let tp = self.tau_prime(p)?;
        Ok(hecke_prime_power(tp, p, m))
    }

    /// `tau(n)` via factorization, the prime-power recurrence and
    /// multiplicativity over coprime parts.
    pub fn tau(&self, n: u64) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::NonPositive("n"));
        }
        let mut acc = BigInt::one();
        for (p, e) in factorize(n) {
            acc *= self.tau_prime_power(p, e)?;
        }
        Ok(acc)
    }

    /// Series coefficient when available, otherwise [`TauOracle::tau`].
    pub fn value(&self, n: u64) -> Result<BigInt> {
        match &self.full_coeffs {
            Some(s) if (n as usize) < s.order() && n > 0 => Ok(s.coeff(n as usize)),
            _ => self.tau(n),
        }
    }
}

pub(crate) fn hecke_prime_power(tau_p: &BigInt, p: u64, m: u32) -> BigInt {
    let p11 = BigInt::from(p).pow(11);
    let mut prev = BigInt::one();
    if m == 0 {
        return prev;
    }
    let mut cur = tau_p.clone();
    for _ in 1..m {
        let next = tau_p * &cur - &p11 * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `tau(p)^2 <= 4 p^11`.
pub fn deligne_holds(tau_p: &BigInt, p: u64) -> bool {
    tau_p * tau_p <= BigInt::from(4) * BigInt::from(p).pow(11)
}

/// Compares recurrence-computed `tau(p^m)` against the series for every prime
/// power `p^m <= limit`, and checks the Deligne bound at every prime.
pub fn cross_check_hecke(oracle: &TauOracle) -> CheckReport {
    let n = oracle.limit();
    let mut report = ReportBuilder::new("hecke-cross-check").param("max_n", n);
    let Some(series) = oracle.series() else {
        report.witness(json!({"error": "oracle carries no series"}));
        return report.finish();
    };
    let mut checked = 0u64;
    for (p, tp) in oracle.primes() {
        if !deligne_holds(tp, p) {
            report.witness(json!({"kind": "deligne", "p": p, "tau_p": tp.to_string()}));
        }
        let mut pm = p;
        let mut m = 1u32;
        while pm <= n {
            let rec = hecke_prime_power(tp, p, m);
            let ser = series.coeff(pm as usize);
            checked += 1;
            if rec != ser {
                report.witness(json!({
                    "kind": "hecke", "p": p, "m": m,
                    "recurrence": rec.to_string(), "series": ser.to_string(),
                }));
            }
            match pm.checked_mul(p) {
                Some(next) => pm = next,
                None => break,
            }
            m += 1;
        }
    }
    report.set_param("prime_powers_checked", checked);
    report.finish()
}

/// Deligne bound alone, as its own report.
pub fn check_deligne(oracle: &TauOracle) -> CheckReport {
    let mut report = ReportBuilder::new("deligne-bound").param("max_prime", oracle.limit());
    for (p, tp) in oracle.primes() {
        if !deligne_holds(tp, p) {
            report.witness(json!({"p": p, "tau_p": tp.to_string()}));
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn first_tau_values() {
        let d = delta_series(6).unwrap();
        assert_eq!(d.coeffs(), ints(&[0, 1, -24, 252, -1472, 4830]).as_slice());
        let d = delta_series(2).unwrap();
        assert_eq!(d.coeffs(), ints(&[0, 1]).as_slice());
        assert_eq!(delta_series(10).unwrap().coeff(6), BigInt::from(-24 * 252));
    }

    #[test]
    fn rejects_tiny_order() {
        assert_eq!(
            delta_series(1),
            Err(Error::OrderTooSmall { min: 2, got: 1 })
        );
        assert!(delta_series(0).is_err());
    }

    #[test]
    fn multiply_basics() {
        let a = TruncatedSeries::new(ints(&[1, 1, 0])).unwrap();
        let b = TruncatedSeries::new(ints(&[1, -1, 0])).unwrap();
        assert_eq!(series_multiply(&a, &b).unwrap().coeffs(), ints(&[1, 0, -1]).as_slice());
        let one = TruncatedSeries::one(3);
        assert_eq!(series_multiply(&a, &one).unwrap(), a);
        let c = TruncatedSeries::one(4);
        assert_eq!(
            series_multiply(&a, &c),
            Err(Error::OrderMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn big_kernel_used_for_large_coefficients() {
        let huge = BigInt::from(1u8) << 100usize;
        let a = TruncatedSeries::new(vec![huge.clone(), BigInt::one()]).unwrap();
        let sq = series_multiply(&a, &a).unwrap();
        assert_eq!(sq.coeffs()[0], &huge * &huge);
        assert_eq!(sq.coeffs()[1], &huge * 2);
    }

    #[test]
    fn tau_by_recurrence() {
        let oracle = TauOracle::build(100).unwrap();
        assert_eq!(oracle.tau(1).unwrap(), BigInt::one());
        assert_eq!(oracle.tau(4).unwrap(), BigInt::from(-1472));
        assert_eq!(oracle.tau(9).unwrap(), BigInt::from(-113643));
        assert_eq!(oracle.tau(0), Err(Error::NonPositive("n")));
        assert_eq!(
            oracle.tau(101 * 2),
            Err(Error::PrimeBeyondLimit { prime: 101, limit: 100 })
        );
        // 2^20 only needs tau(2).
        assert!(oracle.tau(1 << 20).is_ok());
    }

    #[test]
    fn hecke_small() {
        let oracle = TauOracle::build(100).unwrap();
        let r = cross_check_hecke(&oracle);
        assert!(r.passed(), "{r}");
        let tiny = TauOracle::build(2).unwrap();
        assert!(cross_check_hecke(&tiny).passed());
    }

    #[test]
    fn hecke_detects_corruption() {
        let mut coeffs = delta_series(50).unwrap().coeffs().to_vec();
        coeffs[8] += 1;
        let oracle = TauOracle::from_series(Arc::new(TruncatedSeries::new(coeffs).unwrap()));
        let r = cross_check_hecke(&oracle);
        assert!(!r.passed());
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0]["m"], 3);
    }

    #[test]
    fn prefix_stable_across_orders() {
        let a = delta_series(60).unwrap();
        let b = delta_series(200).unwrap();
        assert_eq!(a.coeffs(), &b.coeffs()[..60]);
    }

    #[test]
    fn dump_format() {
        let mut buf = Vec::new();
        write_coefficients(&delta_series(4).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1\n-24\n252\n");
    }

    #[test]
    fn prime_value_oracle() {
        let full = TauOracle::build(30).unwrap();
        let map: BTreeMap<u64, BigInt> = full.primes().map(|(p, t)| (p, t.clone())).collect();
        let o = TauOracle::from_prime_values(30, map.clone()).unwrap();
        for n in 1..=30 {
            assert_eq!(o.tau(n).unwrap(), full.value(n).unwrap());
        }
        let mut partial = map;
        partial.remove(&29);
        assert!(TauOracle::from_prime_values(30, partial).is_err());
    }
}
