//! Hardy-type inequalities on (0,1] and their application to reverse
//! Hölder weights.
//!
//! * [`weight`]: piecewise power-law weights with closed-form integrals.
//! * [`discrete`]: the weighted discrete inequality, Copson and Hardy.
//! * [`continuous`]: the continuous inequality, the averaging identity and
//!   the interpolation step, over adaptive quadrature ([`quad`]).
//! * [`sharpness`]: the extremal power family and its limit scans.
//! * [`rhi`]: reverse Hölder constants, the sharp exponent `p₀`, `k_p`, `c′`.
//! * [`rearrange`]: decreasing rearrangement of step weights.
//! * [`suites`]: seeded property suites over all of the above.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod gen;
pub mod oracle;
pub mod quad;
pub mod rearrange;
pub mod report;
pub mod rhi;
pub mod sharpness;
pub mod suites;
pub mod weight;

pub use error::{LabError, Result};
pub use quad::{Estimate, QuadSpec};
pub use report::{IneqReport, Real, Status};
pub use weight::{make_step, PowerPiece, StepWeight, Weight};

/// Parses a decimal (`1.125`) or a simple fraction (`9/8`).
pub fn parse_real(text: &str) -> Result<f64> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| LabError::Parse(format!("not a number: {text:?}")))
    };
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let den = parse(den)?;
            if den == 0.0 {
                return Err(LabError::Parse(format!("zero denominator in {text:?}")));
            }
            parse(num)? / den
        }
        None => parse(text)?,
    };
    if value.is_nan() {
        return Err(LabError::Parse(format!("not a number: {text:?}")));
    }
    Ok(value)
}
