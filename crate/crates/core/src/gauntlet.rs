//! The end-to-end verification pipeline.
//!
//! For `l` in {3, 5, 7, 691}, `|tau(n)| = l` with `n > 1` forces `n = p^d`
//! with `m_l(p) = d` and `d + 1` an odd prime, and `tau(p^d) = +-l` then puts a
//! specific integer point on a hyperelliptic curve or a Thue equation. Each
//! such reduction is a [`ReductionTarget`]; [`run_gauntlet`] checks all of
//! them at desk scale next to the supporting congruence, Lucas and series
//! checks.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::json;

use crate::arith::{check_congruence_residues, verify_congruences, verify_m_ell_tables, verify_parity};
use crate::curves::{
    check_embedded_thue11, exact_sqrt, search_curve, CurveInstance, Family, IntegerPoint, Sign,
};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::lucas::{
    check_prime_divides_powers, defect_scan_with, perfect_power_lucas_indices, pell_split_report,
    tau_defect_report, Convention, LucasSpec,
};
use crate::primes::is_prime_u64;
use crate::report::{CheckReport, ReportBuilder};
use crate::series::{check_deligne, cross_check_hecke, delta_series, TauOracle};
use crate::thue::{convergent_filter_report, eval_f, search_f, ConvergentParams};

/// Where a solution of `tau(p^d) = +-l` would have to show up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionInstance {
    /// `(p, tau(p))` or `(p, 2 tau(p)^2 - 3 p^11)` on one of the two curves.
    Curves(CurveInstance, CurveInstance),
    /// `F_{2m}(p^11, tau(p)^2) = +-target`.
    Thue { m: u32, target: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionTarget {
    pub ell: u64,
    pub d: u32,
    pub instance: ReductionInstance,
}

impl fmt::Display for ReductionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instance {
            ReductionInstance::Curves(a, b) => {
                write!(f, "ell={} d={}: {} / {}", self.ell, self.d, a, b)
            }
            ReductionInstance::Thue { m, target } => {
                write!(f, "ell={} d={}: F_{} = +-{}", self.ell, self.d, 2 * m, target)
            }
        }
    }
}

fn curve_pair(family: Family, d: u32, ell: u64) -> ReductionInstance {
    ReductionInstance::Curves(
        CurveInstance { family, sign: Sign::Plus, d, ell },
        CurveInstance { family, sign: Sign::Minus, d, ell },
    )
}

/// The reductions for `ell`, in ascending `d`.
pub fn reduction_targets(ell: u64) -> Result<Vec<ReductionTarget>> {
    let t = |d, instance| ReductionTarget { ell, d, instance };
    Ok(match ell {
        3 => vec![t(2, curve_pair(Family::C, 6, 3))],
        5 => vec![t(4, curve_pair(Family::H, 11, 5))],
        7 => vec![t(6, ReductionInstance::Thue { m: 3, target: 7 })],
        691 => vec![
            t(2, curve_pair(Family::C, 6, 691)),
            t(4, curve_pair(Family::H, 11, 691)),
            t(22, ReductionInstance::Thue { m: 11, target: 691 }),
            t(690, ReductionInstance::Thue { m: 345, target: 691 }),
        ],
        _ => return Err(Error::UnsupportedEll(ell)),
    })
}

pub fn all_reduction_targets() -> Vec<ReductionTarget> {
    [3, 5, 7, 691]
        .into_iter()
        .flat_map(|l| reduction_targets(l).expect("supported"))
        .collect()
}

pub const FORBIDDEN_VALUES: [i64; 10] = [1, -1, 3, -3, 5, -5, 7, -7, 691, -691];

/// `tau(n)` avoids `{+-1, +-3, +-5, +-7, +-691}` for `1 < n <= max_n`.
pub fn verify_theorem(oracle: &TauOracle, max_n: u64) -> Result<CheckReport> {
    if max_n < 2 {
        return Err(Error::Precondition(format!("max_n must be >= 2, got {max_n}")));
    }
    if max_n > oracle.limit() {
        return Err(Error::Precondition(format!(
            "max_n {max_n} exceeds oracle limit {}",
            oracle.limit()
        )));
    }
    let forbidden: Vec<BigInt> = FORBIDDEN_VALUES.iter().map(|&v| BigInt::from(v)).collect();
    let mut report = ReportBuilder::new("theorem-scan").param("max_n", max_n);
    for n in 2..=max_n {
        let t = oracle.value(n)?;
        if forbidden.contains(&t) {
            report.witness(json!({"n": n, "tau": t.to_string()}));
        }
    }
    Ok(report.finish())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GauntletConfig {
    /// Truncation order of the `Delta` series; `tau(n)` is known for `n < order`.
    pub series_order: u64,
    pub curve_bound: u64,
    /// Primes up to this bound feed the Lucas, `m_l` and direct reduction checks.
    pub prime_bound: u64,
    pub thue_box: u64,
    /// `|X|` bound for the `F_6` and `F_22` searches (`F_690` uses 4).
    pub thue_x_bound: u64,
    pub convergent_digits: u32,
    pub defect_index: u64,
}

impl Default for GauntletConfig {
    fn default() -> Self {
        GauntletConfig {
            series_order: 10_001,
            curve_bound: 10_000,
            prime_bound: 10_000,
            thue_box: 500,
            thue_x_bound: 100,
            convergent_digits: 120,
            defect_index: 30,
        }
    }
}

const F690_SMALL_X: u64 = 4;

impl GauntletConfig {
    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse = |v: &str| -> Result<u64> {
            v.replace('_', "")
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("{key}: `{v}` is not a non-negative integer")))
        };
        match key {
            "series_order" => self.series_order = parse(value)?,
            "curve_bound" => self.curve_bound = parse(value)?,
            "prime_bound" => self.prime_bound = parse(value)?,
            "thue_box" => self.thue_box = parse(value)?,
            "thue_x_bound" => self.thue_x_bound = parse(value)?,
            "convergent_digits" | "precision" => {
                self.convergent_digits = u32::try_from(parse(value)?)
                    .map_err(|_| Error::Config(format!("{key} too large")))?
            }
            "defect_index" => self.defect_index = parse(value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("series_order", self.series_order),
            ("curve_bound", self.curve_bound),
            ("prime_bound", self.prime_bound),
            ("thue_box", self.thue_box),
            ("thue_x_bound", self.thue_x_bound),
            ("convergent_digits", self.convergent_digits as u64),
        ];
        for (k, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        if self.series_order < 3 {
            return Err(Error::Config(format!(
                "series_order {} leaves no n > 1 to check",
                self.series_order
            )));
        }
        if self.prime_bound < 3 {
            return Err(Error::Config("prime_bound must be >= 3".into()));
        }
        if self.prime_bound >= self.series_order {
            return Err(Error::Config(format!(
                "prime_bound {} needs tau(p) beyond series_order {}",
                self.prime_bound, self.series_order
            )));
        }
        if self.defect_index < 3 {
            return Err(Error::Config("defect_index must be >= 3".into()));
        }
        Ok(())
    }

    fn to_params(&self) -> serde_json::Value {
        json!({
            "series_order": self.series_order,
            "curve_bound": self.curve_bound,
            "prime_bound": self.prime_bound,
            "thue_box": self.thue_box,
            "thue_x_bound": self.thue_x_bound,
            "convergent_digits": self.convergent_digits,
            "defect_index": self.defect_index,
        })
    }
}

fn odd_prime_abs(x: &BigInt) -> bool {
    x.abs().to_u64().is_some_and(|v| v > 2 && is_prime_u64(v))
}

/// `x = q^11` for an odd prime `q`.
fn odd_prime_eleventh_power(x: &BigInt) -> bool {
    if !x.is_positive() {
        return false;
    }
    let root = x.magnitude().nth_root(11);
    root.pow(11) == *x.magnitude()
        && root.to_u64().is_some_and(|q| q > 2 && is_prime_u64(q))
}

fn points_json(points: &[IntegerPoint]) -> serde_json::Value {
    json!(points.iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

/// Bounded search of one reduction target plus the direct evaluation of
/// `tau(p^d)` for every prime `p` the oracle knows up to `prime_bound`.
pub fn check_reduction_target(
    target: &ReductionTarget,
    oracle: &TauOracle,
    config: &GauntletConfig,
) -> Result<CheckReport> {
    let mut report = ReportBuilder::new(format!("reduction ell={} d={}", target.ell, target.d))
        .param("ell", target.ell)
        .param("d", target.d)
        .param("prime_bound", config.prime_bound);
    match target.instance {
        ReductionInstance::Curves(plus, minus) => {
            report.set_param("curves", json!([plus.name(), minus.name()]));
            report.set_param("curve_bound", config.curve_bound);
            for curve in [plus, minus] {
                let points = search_curve(&curve, config.curve_bound)?;
                report.set_param(&format!("points {}", curve.name()), points_json(&points));
                for p in points.iter().filter(|p| odd_prime_abs(&p.x)) {
                    report.witness(json!({"curve": curve.name(), "point": p.to_string()}));
                }
            }
        }
        ReductionInstance::Thue { m, target: c } => {
            let x_bound = if m == 345 { F690_SMALL_X } else { config.thue_x_bound };
            report.set_param("form", format!("F_{}", 2 * m));
            report.set_param("x_bound", x_bound);
            let sols = search_f(m, &BigInt::from(c), x_bound)?;
            report.set_param("solutions", points_json(&sols));
            for s in &sols {
                let square = exact_sqrt(&s.y).is_some();
                if square && odd_prime_eleventh_power(&s.x) {
                    report.witness(json!({"form": 2 * m, "point": s.to_string()}));
                }
            }
        }
    }
    let ell = BigInt::from(target.ell);
    let primes: Vec<(u64, BigInt)> = oracle
        .primes()
        .filter(|&(p, _)| p <= config.prime_bound)
        .map(|(p, t)| (p, t.clone()))
        .collect();
    let direct = map_slice(Exec::auto(), &primes, |(p, tp)| {
        let value = match target.instance {
            ReductionInstance::Curves(..) => crate::series::hecke_prime_power(tp, *p, target.d),
            ReductionInstance::Thue { m, .. } => {
                eval_f(m, &BigInt::from(*p).pow(11), &(tp * tp))
            }
        };
        (value.abs() == ell).then(|| json!({"p": p, "tau_p_power": value.to_string()}))
    });
    report.witnesses(direct.into_iter().flatten());
    Ok(report.finish())
}

/// Integer points of `H+-_{d,5}` and `C+-_{6,3}` against their known sets.
pub fn curve_classification(bound: u64) -> Result<CheckReport> {
    let mut report = ReportBuilder::new("curve-classification").param("bound", bound);
    let pts = |v: &[(i64, i64)]| -> BTreeSet<IntegerPoint> {
        v.iter().map(|&(x, y)| IntegerPoint::new(x, y)).collect()
    };
    let unit = pts(&[(-1, -5), (-1, 5), (1, -5), (1, 5)]);
    let mut h25 = unit.clone();
    h25.extend(pts(&[(-2, -10), (-2, 10), (2, -10), (2, 10)]));
    let mut cases = vec![
        (CurveInstance::new(Family::H, Sign::Plus, 2, 5)?, h25),
        (CurveInstance::new(Family::C, Sign::Plus, 6, 3)?, pts(&[(1, -2), (1, 2)])),
        (CurveInstance::new(Family::C, Sign::Minus, 6, 3)?, BTreeSet::new()),
    ];
    for d in [3, 4, 6, 11] {
        cases.push((CurveInstance::new(Family::H, Sign::Plus, d, 5)?, unit.clone()));
    }
    for d in [2, 3, 4, 6, 11] {
        cases.push((CurveInstance::new(Family::H, Sign::Minus, d, 5)?, BTreeSet::new()));
    }
    for (curve, expected) in cases {
        let found: BTreeSet<IntegerPoint> = search_curve(&curve, bound)?.into_iter().collect();
        // points beyond the bound cannot be expected
        let expected: BTreeSet<IntegerPoint> = expected
            .into_iter()
            .filter(|p| p.x.abs() <= BigInt::from(bound))
            .collect();
        if found != expected {
            report.witness(json!({
                "curve": curve.name(),
                "found": found.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(report.finish())
}

/// Fibonacci defects, the Pell split of the Lucas numbers, and the perfect
/// powers among `L_0..L_40`.
pub fn lucas_classics() -> Result<CheckReport> {
    let mut report = ReportBuilder::new("lucas-classics");
    let fib: Vec<u64> = defect_scan_with(&LucasSpec::fibonacci(), 30, Convention::Classical)?
        .iter()
        .map(|d| d.index)
        .collect();
    if fib != [6, 12] {
        report.witness(json!({"fibonacci_defects": fib}));
    }
    let pell = pell_split_report(1000)?;
    report.witnesses(pell.witnesses);
    let powers = perfect_power_lucas_indices(41);
    if powers != [1, 3] {
        report.witness(json!({"perfect_power_lucas_indices": powers}));
    }
    Ok(report.finish())
}

/// Defect scans of the sequences `u_{m+1} = tau(p^m)` for odd primes
/// `p <= prime_bound`; primes dividing `tau(p)` get the `p^m | tau(p^m)`
/// check instead.
pub fn tau_defect_scans(oracle: &TauOracle, prime_bound: u64, max_index: u64) -> Result<CheckReport> {
    let mut report = ReportBuilder::new("tau-defect-scans")
        .param("prime_bound", prime_bound)
        .param("max_index", max_index);
    let primes: Vec<(u64, BigInt)> = oracle
        .primes()
        .filter(|&(p, _)| p > 2 && p <= prime_bound)
        .map(|(p, t)| (p, t.clone()))
        .collect();
    let rows = map_slice(Exec::auto(), &primes, |(p, tp)| -> Result<(Vec<serde_json::Value>, bool)> {
        if (tp % BigInt::from(*p)).bits() == 0 {
            let r = check_prime_divides_powers(*p, tp, max_index as u32);
            Ok((r.witnesses, true))
        } else {
            Ok((tau_defect_report(*p, tp, max_index)?.witnesses, false))
        }
    });
    let mut divisible = Vec::new();
    for (row, (p, _)) in rows.into_iter().zip(&primes) {
        let (w, div) = row?;
        if div {
            divisible.push(*p);
        }
        report.witnesses(w);
    }
    report.set_param("primes_scanned", primes.len());
    report.set_param("p_divides_tau_p", divisible);
    Ok(report.finish())
}

pub fn run_gauntlet(config: &GauntletConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    run_gauntlet_streaming(config, |r| out.push(r.clone()))?;
    Ok(out)
}

/// Runs every check in canonical order, handing each report to `emit` as it
/// completes.
pub fn run_gauntlet_streaming<F: FnMut(&CheckReport)>(
    config: &GauntletConfig,
    mut emit: F,
) -> Result<()> {
    config.validate()?;
    let max_n = config.series_order - 1;
    let series = Arc::new(delta_series(config.series_order as usize)?);
    let oracle = TauOracle::from_series(series);
    let mut push = |r: CheckReport| emit(&r);

    push(verify_congruences(&oracle, max_n)?);
    push(check_congruence_residues(&oracle)?);
    push(verify_parity(&oracle, max_n)?);
    push(check_deligne(&oracle));
    push(cross_check_hecke(&oracle));
    push(verify_m_ell_tables(config.prime_bound)?);
    push(tau_defect_scans(&oracle, config.prime_bound, config.defect_index)?);
    push(lucas_classics()?);
    push(curve_classification(config.curve_bound)?);
    for target in all_reduction_targets() {
        push(check_reduction_target(&target, &oracle, config)?);
    }
    push(check_embedded_thue11(config.thue_box)?);
    push(convergent_filter_report(&ConvergentParams {
        digits: config.convergent_digits,
        ..ConvergentParams::default()
    })?);
    let mut theorem = verify_theorem(&oracle, max_n)?;
    theorem.params.insert("config".into(), config.to_params());
    push(theorem);
    Ok(())
}

/// `true` when every report passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::passed)
}
