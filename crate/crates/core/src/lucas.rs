//! Lucas sequences `u_n = (alpha^n - beta^n) / (alpha - beta)` over integer
//! parameters `A = alpha + beta`, `B = alpha * beta`, with primitive-divisor
//! and defect detection.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer};
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::curves::isqrt;
use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, is_probable_prime};
use crate::report::{CheckReport, ReportBuilder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LucasSpec {
    a: BigInt,
    b: BigInt,
    discriminant: BigInt,
}

impl LucasSpec {
    /// Rejects pairs for which `alpha / beta` is a root of unity (`A = 0` or
    /// `A^2` in `{B, 2B, 3B, 4B}`). Coprimality of `A` and `B` is not
    /// enforced here (`tau(3) = 252` shares a factor with `3^11`); see
    /// [`LucasSpec::new_coprime`].
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a.is_zero() {
            return Err(Error::DegenerateLucas("A = 0".into()));
        }
        let a2 = &a * &a;
        for k in 1..=4 {
            if a2 == &b * k {
                return Err(Error::DegenerateLucas(format!("A^2 = {k}B")));
            }
        }
        let discriminant = &a2 - &b * 4;
        Ok(LucasSpec { a, b, discriminant })
    }

    /// Like [`LucasSpec::new`], additionally requiring `gcd(A, B) = 1`.
    pub fn new_coprime(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let spec = Self::new(a, b)?;
        if !spec.is_coprime() {
            return Err(Error::DegenerateLucas(format!(
                "gcd({}, {}) != 1",
                spec.a, spec.b
            )));
        }
        Ok(spec)
    }

    pub fn is_coprime(&self) -> bool {
        self.a.gcd(&self.b).is_one()
    }

    pub fn fibonacci() -> Self {
        Self::new(1, -1).expect("valid")
    }

    /// The sequence whose terms are `u_{m+1} = tau(p^m)`.
    pub fn from_tau(tau_p: &BigInt, p: u64) -> Result<Self> {
        Self::new(tau_p.clone(), BigInt::from(p).pow(11))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `(alpha - beta)^2 = A^2 - 4B`.
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }
}

/// `u_1, ..., u_count`.
pub fn lucas_terms(spec: &LucasSpec, count: usize) -> Result<Vec<BigInt>> {
    if count == 0 {
        return Err(Error::NonPositive("count"));
    }
    let mut out = Vec::with_capacity(count);
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    for _ in 0..count {
        out.push(cur.clone());
        let next = &spec.a * &cur - &spec.b * &prev;
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// A term `u_n` (`n >= 3`) with no primitive prime divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectRecord {
    pub index: u64,
    pub value: BigInt,
    /// Every prime factor of `u_n` divides `disc * u_1 * ... * u_{n-1}`.
    pub nonprimitive_part_only: bool,
}

/// Which earlier quantities a primitive prime divisor of `u_n` must avoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `disc * u_1 * ... * u_{n-1}`.
    #[default]
    Strict,
    /// `u_1 * ... * u_{n-1}` only (Carmichael's convention for Fibonacci
    /// numbers, under which `F_5 = 5` is not defective).
    Classical,
}

impl Convention {
    fn seed(self, spec: &LucasSpec) -> BigInt {
        match self {
            Convention::Strict => spec.discriminant.clone(),
            Convention::Classical => BigInt::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimitiveCheck {
    Primitive,
    Defective(DefectRecord),
}

impl PrimitiveCheck {
    pub fn is_primitive(&self) -> bool {
        matches!(self, PrimitiveCheck::Primitive)
    }
}

/// Removes from `value` every prime that also divides `other`, without
/// factoring either.
pub fn strip_common_primes(value: &BigInt, other: &BigInt) -> BigInt {
    let mut rest = value.abs();
    let mut g = rest.gcd(other);
    while !g.is_one() && !g.is_zero() {
        rest /= &g;
        g = rest.gcd(&g);
    }
    rest
}

fn classify(index: u64, value: &BigInt, earlier: &BigInt) -> Result<PrimitiveCheck> {
    if value.is_zero() {
        return Err(Error::DegenerateLucas(format!("u_{index} = 0")));
    }
    if strip_common_primes(value, earlier) > BigInt::one() {
        Ok(PrimitiveCheck::Primitive)
    } else {
        Ok(PrimitiveCheck::Defective(DefectRecord {
            index,
            value: value.clone(),
            nonprimitive_part_only: true,
        }))
    }
}

pub fn has_primitive_divisor(spec: &LucasSpec, n: u64) -> Result<PrimitiveCheck> {
    has_primitive_divisor_with(spec, n, Convention::Strict)
}

pub fn has_primitive_divisor_with(
    spec: &LucasSpec,
    n: u64,
    convention: Convention,
) -> Result<PrimitiveCheck> {
    if n < 3 {
        return Err(Error::IndexTooSmall { min: 3, got: n });
    }
    let terms = lucas_terms(spec, n as usize)?;
    let earlier = terms[..terms.len() - 1]
        .iter()
        .fold(convention.seed(spec), |acc, u| acc * u);
    classify(n, &terms[terms.len() - 1], &earlier)
}

/// Every defective index in `[3, max_index]`.
pub fn defect_scan(spec: &LucasSpec, max_index: u64) -> Result<Vec<DefectRecord>> {
    defect_scan_with(spec, max_index, Convention::Strict)
}

pub fn defect_scan_with(
    spec: &LucasSpec,
    max_index: u64,
    convention: Convention,
) -> Result<Vec<DefectRecord>> {
    if max_index < 3 {
        return Err(Error::IndexTooSmall { min: 3, got: max_index });
    }
    let terms = lucas_terms(spec, max_index as usize)?;
    let mut earlier = convention.seed(spec) * &terms[0] * &terms[1];
    let mut out = Vec::new();
    for (i, u) in terms.iter().enumerate().skip(2) {
        if let PrimitiveCheck::Defective(rec) = classify(i as u64 + 1, u, &earlier)? {
            out.push(rec);
        }
        earlier *= u;
    }
    Ok(out)
}

pub const DEFAULT_DEFECT_INDEX: u64 = 30;

/// Defect scan for the sequence of `tau(p^m)`: requires an odd prime `p`
/// with `p` not dividing `tau(p)` and the Deligne bound. Witnesses any
/// defective term equal to `+-1` or `+-prime`, and any `|tau(p^m)| = 1` for
/// `m >= 1`.
pub fn tau_defect_report(p: u64, tau_p: &BigInt, max_index: u64) -> Result<CheckReport> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::NotOddPrime(p));
    }
    if (tau_p % BigInt::from(p)).is_zero() {
        return Err(Error::Precondition(format!("{p} divides tau({p})")));
    }
    let spec = LucasSpec::from_tau(tau_p, p)?;
    if !spec.is_coprime() {
        return Err(Error::DegenerateLucas(format!("gcd(tau({p}), {p}^11) != 1")));
    }
    let mut report = ReportBuilder::new("tau-defect-scan")
        .param("p", p)
        .param("max_index", max_index);
    let defects = defect_scan(&spec, max_index)?;
    report.set_param(
        "defective_indices",
        defects.iter().map(|d| d.index).collect::<Vec<_>>(),
    );
    for d in &defects {
        if d.value.abs().is_one() || is_probable_prime(&d.value) {
            report.witness(json!({"p": p, "index": d.index, "value": d.value.to_string()}));
        }
    }
    for (i, u) in lucas_terms(&spec, max_index as usize)?.iter().enumerate().skip(1) {
        if u.abs().is_one() {
            report.witness(json!({"p": p, "unit_index": i + 1}));
        }
    }
    Ok(report.finish())
}

/// For `p | tau(p)`: `p^m | tau(p^m)` for `1 <= m <= max_m`.
pub fn check_prime_divides_powers(p: u64, tau_p: &BigInt, max_m: u32) -> CheckReport {
    let mut report = ReportBuilder::new("p-divides-tau-powers").param("p", p).param("max_m", max_m);
    let p11 = BigInt::from(p).pow(11);
    let (mut prev, mut cur) = (BigInt::one(), tau_p.clone());
    for m in 1..=max_m {
        if !(&cur % BigInt::from(p).pow(m)).is_zero() {
            report.witness(json!({"p": p, "m": m}));
        }
        let next = tau_p * &cur - &p11 * &prev;
        prev = cur;
        cur = next;
    }
    report.finish()
}

/// `u_d | u_n` for every divisor `d` of `n`.
pub fn index_divisibility_check(spec: &LucasSpec, n: u64) -> Result<CheckReport> {
    if n < 2 {
        return Err(Error::IndexTooSmall { min: 2, got: n });
    }
    let terms = lucas_terms(spec, n as usize)?;
    let un = &terms[n as usize - 1];
    let mut report = ReportBuilder::new("lucas-index-divisibility")
        .param("A", spec.a.to_string())
        .param("B", spec.b.to_string())
        .param("n", n);
    for d in (1..=n).filter(|d| n % d == 0) {
        let ud = &terms[d as usize - 1];
        if !(un % ud).is_zero() {
            report.witness(json!({"d": d, "u_d": ud.to_string()}));
        }
    }
    Ok(report.finish())
}

/// `L_0 = 2, L_1 = 1, L_{n+2} = L_{n+1} + L_n`, first `count` terms.
pub fn classical_lucas_numbers(count: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(count);
    let (mut a, mut b) = (BigInt::from(2), BigInt::one());
    for _ in 0..count {
        out.push(a.clone());
        let c = &a + &b;
        a = b;
        b = c;
    }
    out
}

/// Positive `X <= bound` with `5X^2 + 20` (plus) or `5X^2 - 20` (minus) a
/// perfect square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSplit {
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
}

pub fn pell_split_enumeration(bound: u64) -> Result<PellSplit> {
    if bound == 0 {
        return Err(Error::NonPositive("bound"));
    }
    let is_square = |v: &BigInt| !v.is_negative() && {
        let r = isqrt(v).expect("non-negative");
        &(&r * &r) == v
    };
    let mut split = PellSplit { plus: Vec::new(), minus: Vec::new() };
    for x in 1..=bound {
        let five_x2 = BigInt::from(5) * BigInt::from(x).pow(2);
        if is_square(&(&five_x2 + 20)) {
            split.plus.push(x);
        }
        if is_square(&(&five_x2 - 20)) {
            split.minus.push(x);
        }
    }
    Ok(split)
}

/// Pell X-lists against odd- and even-index Lucas numbers up to `bound`.
pub fn pell_split_report(bound: u64) -> Result<CheckReport> {
    let split = pell_split_enumeration(bound)?;
    let mut report = ReportBuilder::new("pell-lucas-split").param("bound", bound);
    let lucas = classical_lucas_numbers(200);
    let within = |parity: usize| -> Vec<u64> {
        let mut v: Vec<u64> = lucas
            .iter()
            .enumerate()
            .filter(|(i, l)| i % 2 == parity && **l <= BigInt::from(bound))
            .map(|(_, l)| u64::try_from(l).expect("small"))
            .collect();
        v.sort_unstable();
        v
    };
    let (odd, even) = (within(1), within(0));
    if split.plus != odd {
        report.witness(json!({"list": "plus", "pell": split.plus, "lucas": odd}));
    }
    if split.minus != even {
        report.witness(json!({"list": "minus", "pell": split.minus, "lucas": even}));
    }
    report.set_param("plus", split.plus);
    report.set_param("minus", split.minus);
    Ok(report.finish())
}

/// `n = base^exp` with `exp >= 2`, if one exists. `1` is reported as `1^2`.
pub fn is_perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    if n.is_zero() {
        return None;
    }
    if n.is_one() {
        return Some((BigUint::one(), 2));
    }
    let max_k = n.bits() as u32;
    (2..=max_k).find_map(|k| {
        let r = n.nth_root(k);
        (r.pow(k) == *n).then_some((r, k))
    })
}

/// Indices `i < count` with `L_i` a perfect power.
pub fn perfect_power_lucas_indices(count: usize) -> Vec<usize> {
    classical_lucas_numbers(count)
        .iter()
        .enumerate()
        .filter(|(_, l)| is_perfect_power(l.magnitude()).is_some())
        .map(|(i, _)| i)
        .collect()
}
