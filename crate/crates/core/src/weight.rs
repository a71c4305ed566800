//! Weights on (0,1] as piecewise power laws `t ↦ coeff·t^(−exp)`.
//!
//! Every integral of a power of a weight over a subinterval has a closed
//! form, so prefix integrals and the averaging operator
//! `Aw(t) = (1/t)∫₀ᵗ w` are exact up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// One piece `t ↦ coeff·t^(−exp)` on the left-open, right-closed interval
/// `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeff: f64,
    pub exp: f64,
}

impl PowerPiece {
    pub fn new(lo: f64, hi: f64, coeff: f64, exp: f64) -> Result<Self> {
        let piece = PowerPiece { lo, hi, coeff, exp };
        piece.validate()?;
        Ok(piece)
    }

    fn validate(&self) -> Result<()> {
        let PowerPiece { lo, hi, coeff, exp } = *self;
        if !(lo.is_finite() && hi.is_finite() && coeff.is_finite() && exp.is_finite()) {
            return Err(LabError::Validation(format!("non-finite field in piece {self:?}")));
        }
        if !(0.0..1.0).contains(&lo) || !(hi > 0.0 && hi <= 1.0) || lo >= hi {
            return Err(LabError::Validation(format!(
                "piece bounds must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi}]"
            )));
        }
        if coeff < 0.0 {
            return Err(LabError::Validation(format!("negative coefficient {coeff}")));
        }
        if exp < 0.0 {
            return Err(LabError::Validation(format!("negative exponent {exp}")));
        }
        if lo == 0.0 && exp >= 1.0 {
            return Err(LabError::Validation(format!(
                "piece touching 0 must have exp < 1 to be integrable, got {exp}"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeff * t.powf(-self.exp)
    }

    /// `∫ₐᵇ (coeff·s^(−exp))^r ds` for `lo ≤ a < b ≤ hi`.
    pub fn integral(&self, a: f64, b: f64, r: f64) -> f64 {
        if self.coeff == 0.0 && r > 0.0 {
            return 0.0;
        }
        self.coeff.powf(r) * power_integral(a, b, self.exp * r)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `∫ₐᵇ s^(−e) ds` for `0 ≤ a < b`, `+∞` when `a = 0` and `e ≥ 1`.
///
/// Written through `expm1` so that exponents near 1 lose no precision and the
/// logarithmic case is the continuous limit of the general one.
pub fn power_integral(a: f64, b: f64, e: f64) -> f64 {
    let rise = 1.0 - e;
    if a == 0.0 {
        return if rise <= 0.0 { f64::INFINITY } else { b.powf(rise) / rise };
    }
    if e == 0.0 {
        return b - a;
    }
    let log_ratio = ((b - a) / a).ln_1p();
    if rise == 0.0 {
        log_ratio
    } else if rise > 0.0 {
        b.powf(rise) * (-(-rise * log_ratio).exp_m1()) / rise
    } else {
        a.powf(rise) * (rise * log_ratio).exp_m1() / rise
    }
}

/// A weight on (0,1]: an ordered partition into power pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    pieces: Vec<PowerPiece>,
}

#[derive(Deserialize)]
struct WeightFile {
    pieces: Vec<PowerPiece>,
}

impl Weight {
    pub fn new(pieces: Vec<PowerPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(LabError::Validation("weight needs at least one piece".into()));
        }
        for piece in &pieces {
            piece.validate()?;
        }
        if pieces[0].lo != 0.0 {
            return Err(LabError::Validation("first piece must start at 0".into()));
        }
        if pieces[pieces.len() - 1].hi != 1.0 {
            return Err(LabError::Validation("last piece must end at 1".into()));
        }
        for pair in pieces.windows(2) {
            if pair[0].hi != pair[1].lo {
                return Err(LabError::Validation(format!(
                    "pieces must tile (0,1]: gap or overlap at {} / {}",
                    pair[0].hi, pair[1].lo
                )));
            }
        }
        if pieces.iter().all(|p| p.coeff == 0.0) {
            return Err(LabError::Validation("weight is identically zero".into()));
        }
        Ok(Weight { pieces })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![PowerPiece::new(0.0, 1.0, value, 0.0)?])
    }

    /// The single-piece weight `coeff·t^(−exp)`.
    pub fn power(coeff: f64, exp: f64) -> Result<Self> {
        Self::new(vec![PowerPiece::new(0.0, 1.0, coeff, exp)?])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightFile =
            serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?;
        Self::new(file.pieces)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weights always serialize")
    }

    pub fn pieces(&self) -> &[PowerPiece] {
        &self.pieces
    }

    /// Interior breakpoints, increasing.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[1..].iter().map(|p| p.lo).collect()
    }

    fn piece_index(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.hi < t).min(self.pieces.len() - 1)
    }

    pub fn piece_at(&self, t: f64) -> &PowerPiece {
        &self.pieces[self.piece_index(t)]
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        Ok(self.piece_at(t).eval(t))
    }

    /// `∫₀ᵗ w^r`, `+∞` when the first piece has `exp·r ≥ 1`.
    pub fn prefix_integral(&self, t: f64, r: f64) -> Result<f64> {
        check_unit(t)?;
        check_power(r)?;
        Ok(self.integral_unchecked(0.0, t, r))
    }

    /// `∫ₐᵇ w^r` for `0 ≤ a < b ≤ 1`.
    pub fn interval_integral(&self, a: f64, b: f64, r: f64) -> Result<f64> {
        if !(a >= 0.0 && a < b && b <= 1.0) {
            return Err(LabError::Domain(format!("need 0 <= a < b <= 1, got ({a}, {b}]")));
        }
        check_power(r)?;
        Ok(self.integral_unchecked(a, b, r))
    }

    pub(crate) fn integral_unchecked(&self, a: f64, b: f64, r: f64) -> f64 {
        let mut total = 0.0;
        for piece in &self.pieces[self.piece_index(a)..] {
            if piece.lo >= b {
                break;
            }
            let lo = piece.lo.max(a);
            let hi = piece.hi.min(b);
            if lo < hi {
                total += piece.integral(lo, hi, r);
            }
        }
        total
    }

    /// The Hardy average `Aw(t) = (1/t)∫₀ᵗ w`.
    pub fn hardy_average(&self, t: f64) -> Result<f64> {
        Ok(self.prefix_integral(t, 1.0)? / t)
    }

    /// `∫₀¹ w`.
    pub fn total_mass(&self) -> f64 {
        self.integral_unchecked(0.0, 1.0, 1.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.pieces.windows(2).all(|pair| {
            let (left, right) = (&pair[0], &pair[1]);
            left.eval(left.hi) >= right.eval(left.hi)
        })
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(|p| p.exp == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.is_step() && self.pieces.iter().all(|p| p.coeff == self.pieces[0].coeff)
    }

    /// `k·w` for `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(LabError::Parameter(format!("scale must be positive, got {k}")));
        }
        let pieces = self.pieces.iter().map(|p| PowerPiece { coeff: k * p.coeff, ..*p }).collect();
        Self::new(pieces)
    }

    /// Exponent of the piece touching 0; governs every integrability question.
    pub fn leading_exp(&self) -> f64 {
        self.pieces[0].exp
    }
}

fn check_unit(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("t must lie in (0,1], got {t}")))
    }
}

fn check_power(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("power must be a finite r >= 0, got {r}")))
    }
}

/// A weight whose every piece is constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StepWeight(Weight);

impl StepWeight {
    pub fn as_weight(&self) -> &Weight {
        &self.0
    }

    pub fn into_weight(self) -> Weight {
        self.0
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.pieces.iter().map(|p| p.coeff).collect()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.0.pieces.iter().map(PowerPiece::len).collect()
    }
}

impl TryFrom<Weight> for StepWeight {
    type Error = LabError;

    fn try_from(w: Weight) -> Result<Self> {
        if w.is_step() {
            Ok(StepWeight(w))
        } else {
            Err(LabError::Precondition("weight has a non-constant piece; steps only".into()))
        }
    }
}

/// Step weight taking `values[i]` between consecutive breakpoints.
pub fn make_step(values: &[f64], breakpoints: &[f64]) -> Result<StepWeight> {
    if values.len() != breakpoints.len() + 1 {
        return Err(LabError::Validation(format!(
            "{} values need {} breakpoints, got {}",
            values.len(),
            values.len().saturating_sub(1),
            breakpoints.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(LabError::Validation(format!("step values must be finite and >= 0, got {v}")));
    }
    let mut edges = Vec::with_capacity(values.len() + 1);
    edges.push(0.0);
    edges.extend_from_slice(breakpoints);
    edges.push(1.0);
    if edges.windows(2).any(|e| !(e[0] < e[1])) {
        return Err(LabError::Validation(
            "breakpoints must be strictly increasing inside (0,1)".into(),
        ));
    }
    let pieces = values
        .iter()
        .zip(edges.windows(2))
        .map(|(&v, e)| PowerPiece::new(e[0], e[1], v, 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(StepWeight(Weight::new(pieces)?))
}
