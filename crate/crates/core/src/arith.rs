//! Divisor sums, Ramanujan's congruences, the parity criterion, and the
//! first-vanishing index `m_ell(p)` of `tau(p^n)` modulo `ell`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::Zero;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::primes::{is_prime_u64, primes_up_to};
use crate::report::{CheckReport, ReportBuilder};
use crate::series::TauOracle;

/// `sigma_nu(n) = sum_{d | n} d^nu`.
pub fn sigma(n: u64, nu: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::NonPositive("n"));
    }
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(nu);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(nu);
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// Right-hand side of one of the four classical congruences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceRhs {
    /// `n^2 sigma_1(n)`
    NSquaredSigma1,
    /// `n sigma_1(n)`
    NSigma1,
    /// `n sigma_3(n)`
    NSigma3,
    /// `sigma_11(n)`
    Sigma11,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RamanujanCongruence {
    pub modulus: u64,
    pub rhs_kind: CongruenceRhs,
}

pub const RAMANUJAN_CONGRUENCES: [RamanujanCongruence; 4] = [
    RamanujanCongruence { modulus: 9, rhs_kind: CongruenceRhs::NSquaredSigma1 },
    RamanujanCongruence { modulus: 5, rhs_kind: CongruenceRhs::NSigma1 },
    RamanujanCongruence { modulus: 7, rhs_kind: CongruenceRhs::NSigma3 },
    RamanujanCongruence { modulus: 691, rhs_kind: CongruenceRhs::Sigma11 },
];

impl RamanujanCongruence {
    pub fn for_modulus(modulus: u64) -> Option<Self> {
        RAMANUJAN_CONGRUENCES.iter().copied().find(|c| c.modulus == modulus)
    }

    /// The predicted residue of `tau(n)`, in `[0, modulus)`.
    pub fn rhs(&self, n: u64) -> Result<u64> {
        let nb = BigInt::from(n);
        let value = match self.rhs_kind {
            CongruenceRhs::NSquaredSigma1 => &nb * &nb * sigma(n, 1)?,
            CongruenceRhs::NSigma1 => &nb * sigma(n, 1)?,
            CongruenceRhs::NSigma3 => &nb * sigma(n, 3)?,
            CongruenceRhs::Sigma11 => sigma(n, 11)?,
        };
        Ok(residue(&value, self.modulus))
    }

    pub fn holds(&self, n: u64, tau_n: &BigInt) -> Result<bool> {
        Ok(residue(tau_n, self.modulus) == self.rhs(n)?)
    }
}

pub(crate) fn residue(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    u64::try_from(r).expect("residue is non-negative and below m")
}

/// Checks all four congruences for `1 <= n <= max_n`.
pub fn verify_congruences(oracle: &TauOracle, max_n: u64) -> Result<CheckReport> {
    require_within(oracle, max_n)?;
    let mut report = ReportBuilder::new("ramanujan-congruences").param("max_n", max_n);
    for n in 1..=max_n {
        let t = oracle.value(n)?;
        for c in RAMANUJAN_CONGRUENCES {
            if !c.holds(n, &t)? {
                report.witness(json!({"n": n, "modulus": c.modulus, "tau": t.to_string()}));
            }
        }
    }
    Ok(report.finish())
}

pub fn is_odd_square(n: u64) -> bool {
    if n % 2 == 0 {
        return false;
    }
    let r = Roots::sqrt(&n);
    r * r == n
}

/// `tau(n)` is odd exactly when `n` is an odd square, for `1 <= n <= max_n`.
pub fn verify_parity(oracle: &TauOracle, max_n: u64) -> Result<CheckReport> {
    require_within(oracle, max_n)?;
    let mut report = ReportBuilder::new("parity").param("max_n", max_n);
    for n in 1..=max_n {
        let t = oracle.value(n)?;
        if t.is_odd() != is_odd_square(n) {
            report.witness(json!({"n": n, "tau": t.to_string()}));
        }
    }
    Ok(report.finish())
}

fn require_within(oracle: &TauOracle, max_n: u64) -> Result<()> {
    if max_n == 0 {
        return Err(Error::NonPositive("max_n"));
    }
    if max_n > oracle.limit() {
        return Err(Error::Precondition(format!(
            "max_n {max_n} exceeds oracle limit {}",
            oracle.limit()
        )));
    }
    Ok(())
}

/// `m_ell(p)`: least `n >= 1` with `tau(p^n) = 0 mod ell`, or `None` when
/// the residues never vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MEllResult {
    pub ell: u64,
    pub p: u64,
    pub value: Option<u64>,
}

/// Iterates `a_0 = 1, a_1 = tau(p), a_{n+1} = tau(p) a_n - p^11 a_{n-1}` mod
/// `ell`. The pair `(a_n, a_{n+1})` takes at most `ell^2` values, so no zero
/// within `ell^2` steps means no zero ever.
pub fn m_ell(p: u64, ell: u64, tau_p_mod_ell: u64) -> Result<MEllResult> {
    m_ell_capped(p, ell, tau_p_mod_ell, ell * ell)
}

pub(crate) fn m_ell_capped(p: u64, ell: u64, t: u64, cap: u64) -> Result<MEllResult> {
    if !is_prime_u64(p) || p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    if !is_prime_u64(ell) || ell == 2 {
        return Err(Error::NotOddPrime(ell));
    }
    if t >= ell {
        return Err(Error::ResidueOutOfRange { residue: t, modulus: ell });
    }
    let b = pow_mod(p, 11, ell);
    let (mut prev, mut cur) = (1u64, t);
    let mut value = None;
    for n in 1..=cap {
        if cur == 0 {
            value = Some(n);
            break;
        }
        let next = (t * cur + (ell - b) * prev) % ell;
        prev = cur;
        cur = next;
        // With p^11 invertible the pair map is a permutation, so returning
        // to the starting pair closes the orbit.
        if b != 0 && prev == 1 && cur == t {
            break;
        }
    }
    Ok(MEllResult { ell, p, value })
}

fn pow_mod(base: u64, mut e: u32, m: u64) -> u64 {
    let mut r = 1u64 % m;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// `tau(p) mod ell` for prime `p` read off the congruence for `ell`
/// (the mod 9 congruence reduced mod 3 when `ell = 3`).
pub fn congruence_tau_residue(ell: u64, p: u64) -> Result<u64> {
    let c = match ell {
        3 => RamanujanCongruence::for_modulus(9),
        5 | 7 | 691 => RamanujanCongruence::for_modulus(ell),
        _ => None,
    }
    .ok_or(Error::UnsupportedEll(ell))?;
    Ok(c.rhs(p)? % ell)
}

/// `m_ell(p)` for `ell` in {3, 5, 7, 691} without any tau data.
pub fn m_ell_special(p: u64, ell: u64) -> Result<MEllResult> {
    m_ell(p, ell, congruence_tau_residue(ell, p)?)
}

/// The closed-form case tables for `m_3`, `m_5`, `m_7`.
pub fn m_ell_table(ell: u64, p: u64) -> Option<u64> {
    let r = p % ell;
    match ell {
        3 => Some(if r == 1 { 2 } else { 1 }),
        5 => Some(match r {
            0 | 4 => 1,
            2 | 3 => 3,
            _ => 4,
        }),
        7 => Some(match r {
            0 | 3 | 5 | 6 => 1,
            _ => 6,
        }),
        _ => None,
    }
}

pub const M691_ALLOWED: [u64; 4] = [2, 4, 22, 690];

pub fn verify_m_ell_tables(max_prime: u64) -> Result<CheckReport> {
    verify_m_ell_tables_with(max_prime, Exec::auto())
}

/// Recomputes `m_3, m_5, m_7` for all odd primes `<= max_prime` and compares
/// them with the case tables; for `ell = 691` every finite `m` with `m + 1`
/// an odd prime must be one of 2, 4, 22, 690.
pub fn verify_m_ell_tables_with(max_prime: u64, exec: Exec) -> Result<CheckReport> {
    if max_prime < 3 {
        return Err(Error::Precondition(format!("max_prime must be >= 3, got {max_prime}")));
    }
    let primes: Vec<u64> = primes_up_to(max_prime).into_iter().filter(|&p| p != 2).collect();
    let mut report = ReportBuilder::new("m-ell-tables").param("max_prime", max_prime);
    type Row = (Vec<serde_json::Value>, Option<u64>);
    let rows = map_slice(exec, &primes, |&p| -> Result<Row> {
        let mut bad = Vec::new();
        for ell in [3u64, 5, 7] {
            let got = m_ell_special(p, ell)?.value;
            let want = m_ell_table(ell, p);
            if got != want {
                bad.push(json!({"ell": ell, "p": p, "computed": got, "table": want}));
            }
        }
        let shifted = m_ell_special(p, 691)?
            .value
            .filter(|&d| d + 1 > 2 && is_prime_u64(d + 1));
        if let Some(d) = shifted {
            if !M691_ALLOWED.contains(&d) {
                bad.push(json!({"ell": 691, "p": p, "computed": d}));
            }
        }
        Ok((bad, shifted))
    });
    let mut seen_691 = std::collections::BTreeSet::new();
    for row in rows {
        let (bad, shifted) = row?;
        report.witnesses(bad);
        seen_691.extend(shifted);
    }
    report.set_param("m691_prime_shift_values", seen_691.into_iter().collect::<Vec<_>>());
    Ok(report.finish())
}

/// For each prime `p <= limit`, `tau(p) mod ell` from the congruences agrees
/// with the series value.
pub fn check_congruence_residues(oracle: &TauOracle) -> Result<CheckReport> {
    let mut report = ReportBuilder::new("congruence-residues").param("max_prime", oracle.limit());
    for (p, tp) in oracle.primes() {
        for ell in [3u64, 5, 7, 691] {
            let want = congruence_tau_residue(ell, p)?;
            if residue(tp, ell) != want {
                report.witness(json!({"p": p, "ell": ell}));
            }
        }
    }
    Ok(report.finish())
}

/// `ell | u_{d+1}` forces `ell | u_{k(d+1)}`, with `u_{n+1} = tau(p^n)`.
/// Iterates the residues and returns the first `k <= k_max` that breaks it.
pub fn divisibility_echo(p: u64, ell: u64, t: u64, k_max: u64) -> Result<Option<u64>> {
    let Some(d) = m_ell(p, ell, t)?.value else {
        return Ok(None);
    };
    let b = pow_mod(p, 11, ell);
    // u_1 = 1, u_2 = t
    let (mut prev, mut cur) = (0u64, 1u64);
    let period = d + 1;
    for idx in 1..=period * k_max {
        if idx % period == 0 && cur != 0 {
            return Ok(Some(idx / period));
        }
        let next = (t * cur + (ell - b) * prev) % ell;
        prev = cur;
        cur = next;
    }
    Ok(None)
}
