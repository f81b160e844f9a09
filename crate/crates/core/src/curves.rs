//! Bounded integer-point searches on `H+-_{d,l}: Y^2 = 5X^{2d} +- 4l` and
//! `C+-_{d,l}: Y^2 = X^{2d-1} +- l`, plus the embedded degree-11 Thue form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::report::{CheckReport, ReportBuilder};

/// `floor(sqrt(n))`.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::NegativeSqrt);
    }
    let r = Roots::sqrt(n);
    debug_assert!(&r * &r <= *n && (&r + 1u32) * (&r + 1u32) > *n);
    Ok(r)
}

/// `Some(r)` with `r >= 0` and `r^2 = n`.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n).ok()?;
    (&r * &r == *n).then_some(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Y^2 = 5X^{2d} + sign 4l`
    H,
    /// `Y^2 = X^{2d-1} + sign l`
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply(self, v: BigInt) -> BigInt {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Family::H),
            "C" | "c" => Ok(Family::C),
            _ => Err(Error::Precondition(format!("unknown curve family `{s}`"))),
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Precondition(format!("unknown sign `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveInstance {
    pub family: Family,
    pub sign: Sign,
    pub d: u32,
    pub ell: u64,
}

impl CurveInstance {
    pub fn new(family: Family, sign: Sign, d: u32, ell: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Precondition(format!("curve index d must be >= 2, got {d}")));
        }
        if ell == 0 {
            return Err(Error::NonPositive("ell"));
        }
        Ok(CurveInstance { family, sign, d, ell })
    }

    /// Right-hand side of the defining equation at `x`.
    pub fn rhs(&self, x: &BigInt) -> BigInt {
        match self.family {
            Family::H => {
                BigInt::from(5) * x.pow(2 * self.d) + self.sign.apply(BigInt::from(4 * self.ell))
            }
            Family::C => x.pow(2 * self.d - 1) + self.sign.apply(BigInt::from(self.ell)),
        }
    }

    pub fn contains(&self, p: &IntegerPoint) -> bool {
        &p.y * &p.y == self.rhs(&p.x)
    }

    pub fn name(&self) -> String {
        let f = match self.family {
            Family::H => 'H',
            Family::C => 'C',
        };
        format!("{f}{}_{{{},{}}}", self.sign.symbol(), self.d, self.ell)
    }
}

impl fmt::Display for CurveInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegerPoint {
    pub x: BigInt,
    pub y: BigInt,
}

impl IntegerPoint {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        IntegerPoint { x: x.into(), y: y.into() }
    }
}

impl fmt::Display for IntegerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

pub const DEFAULT_CURVE_BOUND: u64 = 10_000;

pub fn search_curve(instance: &CurveInstance, bound: u64) -> Result<Vec<IntegerPoint>> {
    search_curve_with(instance, bound, Exec::auto())
}

/// All integer points with `|X| <= bound`, sorted by `(X, Y)`.
pub fn search_curve_with(
    instance: &CurveInstance,
    bound: u64,
    exec: Exec,
) -> Result<Vec<IntegerPoint>> {
    if bound == 0 {
        return Err(Error::NonPositive("bound"));
    }
    let (lo, span) = match instance.family {
        // even exponent: scan X >= 0 and mirror
        Family::H => (0i64, bound + 1),
        Family::C => (-(bound as i64), 2 * bound + 1),
    };
    let hits = map_range(exec, 0..span, |off| {
        let x = BigInt::from(lo + off as i64);
        let y = exact_sqrt(&instance.rhs(&x))?;
        Some((x, y))
    });
    let mut points = Vec::new();
    for (x, y) in hits.into_iter().flatten() {
        let xs = if instance.family == Family::H && !x.is_zero() {
            vec![-x.clone(), x]
        } else {
            vec![x]
        };
        for x in xs {
            points.push(IntegerPoint::new(x.clone(), y.clone()));
            if !y.is_zero() {
                points.push(IntegerPoint::new(x, -y.clone()));
            }
        }
    }
    points.sort();
    for p in &points {
        assert!(instance.contains(p), "emitted point {p} is not on {instance}");
    }
    Ok(points)
}

/// The degree-11 binary form `sum c_i x^{11-i} y^i` and right-hand side
/// `2 * 5^55` arising from `Y^2 = X^11 - 691` over `Q(sqrt(-691))`.
pub struct EmbeddedThue11;

const THUE11_COEFFS: [&str; 12] = [
    "991077174272090396",
    "119700018439220789119",
    "-8831599221002836172345",
    "-337116345512786456280840",
    "8492967300375371034332430",
    "175189311986919278870504298",
    "-1881807368163995585644810248",
    "-22992541672786450593030038430",
    "104772541553739359102253613965",
    "697875798749922445133117312720",
    "-1068801486169809452619368218519",
    "-2292300374810647823111384294421",
];

impl EmbeddedThue11 {
    /// Coefficients from `x^11` down to `y^11`.
    pub fn coefficients() -> Vec<BigInt> {
        THUE11_COEFFS
            .iter()
            .map(|s| BigInt::from_str(s).expect("valid literal"))
            .collect()
    }

    pub fn rhs() -> BigInt {
        BigInt::from(2) * BigInt::from(5).pow(55)
    }

    pub fn eval(x: &BigInt, y: &BigInt) -> BigInt {
        let coeffs = Self::coefficients();
        let mut acc = BigInt::zero();
        let mut ypow = BigInt::from(1);
        let mut ypows = Vec::with_capacity(12);
        for _ in 0..12 {
            ypows.push(ypow.clone());
            ypow *= y;
        }
        for (c, yp) in coeffs.iter().zip(&ypows) {
            acc = acc * x + c * yp;
        }
        acc
    }
}

pub const DEFAULT_THUE_BOX: u64 = 500;

pub fn check_embedded_thue11(box_bound: u64) -> Result<CheckReport> {
    check_embedded_thue11_with(box_bound, Exec::auto())
}

/// Evaluates the embedded form on `|x|, |y| <= box_bound`; any point reaching
/// `2 * 5^55` is a witness.
pub fn check_embedded_thue11_with(box_bound: u64, exec: Exec) -> Result<CheckReport> {
    if box_bound == 0 {
        return Err(Error::NonPositive("box"));
    }
    let report = ReportBuilder::new("thue-11-box").param("box", box_bound);
    let coeffs = EmbeddedThue11::coefficients();
    let target = EmbeddedThue11::rhs();
    let b = box_bound as i64;
    let rows = map_range(exec, 0..(2 * box_bound + 1), |off| {
        let y = BigInt::from(off as i64 - b);
        let mut ypows = Vec::with_capacity(12);
        let mut yp = BigInt::from(1);
        for _ in 0..12 {
            ypows.push(yp.clone());
            yp *= &y;
        }
        let terms: Vec<BigInt> = coeffs.iter().zip(&ypows).map(|(c, p)| c * p).collect();
        let mut hits = Vec::new();
        for xi in -b..=b {
            let x = BigInt::from(xi);
            let mut acc = BigInt::zero();
            for t in &terms {
                acc = acc * &x + t;
            }
            if acc == target {
                hits.push(json!({"x": xi, "y": off as i64 - b}));
            }
        }
        hits
    });
    let mut report = report;
    report.witnesses(rows.into_iter().flatten());
    Ok(report.finish())
}
