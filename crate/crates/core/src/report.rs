//! Uniform result records shared by every check.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real number whose JSON form survives non-finite values.
///
/// Finite values serialize as JSON numbers; `+∞`, `−∞` and NaN serialize as
/// the strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        real::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        real::deserialize(d).map(Real)
    }
}

/// `serde(with = "real")` adapter for plain `f64` fields.
pub mod real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    other => Err(E::custom(format!("unexpected string {other:?}"))),
                }
            }
        }

        d.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Divergent,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Divergent => "divergent",
        };
        f.write_str(s)
    }
}

/// One inequality (or identity) check: both sides, the margin `rhs − lhs`,
/// the numerical budget the margin is judged against, and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub op: String,
    pub params: BTreeMap<String, Real>,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub margin: f64,
    #[serde(with = "real")]
    pub budget: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl IneqReport {
    /// Builds a report for `lhs ≤ rhs`, passing iff `rhs − lhs ≥ −budget`.
    /// Any non-finite side marks the report divergent.
    pub fn inequality(op: &str, lhs: f64, rhs: f64, budget: f64) -> Self {
        let margin = rhs - lhs;
        let status = if !lhs.is_finite() || !rhs.is_finite() {
            Status::Divergent
        } else if margin >= -budget {
            Status::Pass
        } else {
            Status::Fail
        };
        IneqReport {
            op: op.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            margin,
            budget,
            status,
            seed: None,
        }
    }

    /// Builds a report for the identity `lhs = rhs`, passing iff
    /// `|rhs − lhs| ≤ budget`.
    pub fn identity(op: &str, lhs: f64, rhs: f64, budget: f64) -> Self {
        let mut report = Self::inequality(op, lhs, rhs, budget);
        if report.status != Status::Divergent {
            report.status = if report.margin.abs() <= budget {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        report
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), Real(value));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).map(|r| r.0)
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}
