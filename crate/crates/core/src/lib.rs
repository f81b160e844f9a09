//! Exact arithmetic for Ramanujan's tau-function and the bounded
//! Diophantine checks that rule out `tau(n)` in `{+-1, +-3, +-5, +-7, +-691}`
//! for `n > 1`.
//!
//! - [`series`]: the q-expansion of `Delta` and a tau oracle.
//! - [`arith`]: divisor sums, the classical congruences, parity, `m_ell(p)`.
//! - [`lucas`]: Lucas sequences and primitive prime divisors.
//! - [`curves`]: integer points on the hyperelliptic families.
//! - [`thue`]: the forms `F_{2m}` and their bounded Thue searches.
//! - [`gauntlet`]: the end-to-end pipeline producing [`report::CheckReport`]s.

pub mod arith;
pub mod curves;
pub mod error;
pub mod exec;
pub mod gauntlet;
pub mod lucas;
pub mod precision;
pub mod primes;
pub mod report;
pub mod series;
pub mod thue;

pub use error::{Error, Result};
pub use exec::Exec;
pub use report::{CheckReport, Status};
