//! The continuous Hardy-type inequality on (0,1] and the objects used to
//! prove it: the integrals `I_s = ∫₀¹ (Aw)^(p−s) w^s`, the averaging
//! identity, Hölder interpolation between `I_0`, `I_1`, `I_q`, and the two
//! auxiliary functions `G` and `F`.
//!
//! All integrals share the shape `∫ (Aw)^α w^β`. On the piece touching 0,
//! `Aw(t) = coeff·t^(−a)/(1−a)`, so the integrand is an exact power of `t`
//! and is integrated in closed form; the endpoint singularity is never
//! handed to the quadrature. Every other piece has a smooth integrand and
//! goes to adaptive Gauss–Legendre panels.

use crate::error::{LabError, Result};
use crate::quad::{self, Estimate, QuadSpec};
use crate::report::IneqReport;
use crate::weight::{power_integral, Weight};

const EPS: f64 = f64::EPSILON;

/// Exponents `p`, `q` and the mass `f = ∫₀¹ w` of one Hardy-type check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremParams {
    pub p: f64,
    pub q: f64,
    pub f: f64,
}

impl TheoremParams {
    pub fn new(w: &Weight, p: f64, q: f64) -> Result<Self> {
        check_p(p)?;
        if !(q >= 1.0 && q <= p) {
            return Err(LabError::Parameter(format!("need 1 <= q <= p, got q = {q}, p = {p}")));
        }
        Ok(TheoremParams { p, q, f: w.total_mass() })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("need p > 1, got {p}")))
    }
}

/// `∫_{t0}^{t1} (Aw)^α · w^β` with an error bound; `+∞` on divergence.
pub fn integrate_product(
    w: &Weight,
    t0: f64,
    t1: f64,
    alpha: f64,
    beta: f64,
    quad: &QuadSpec,
) -> Result<Estimate> {
    if !(t0 >= 0.0 && t0 < t1 && t1 <= 1.0) {
        return Err(LabError::Domain(format!("need 0 <= t0 < t1 <= 1, got [{t0}, {t1}]")));
    }
    if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(LabError::Parameter(format!(
            "exponents must be finite and >= 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let pieces = w.pieces();
    let first = &pieces[0];

    let mut closed = 0.0;
    let head_hi = first.hi.min(t1);
    if t0 < head_hi {
        let k = first.coeff;
        let a = first.exp;
        closed = if k == 0.0 {
            if alpha + beta == 0.0 { head_hi - t0 } else { 0.0 }
        } else {
            let scale = (k / (1.0 - a)).powf(alpha) * k.powf(beta);
            scale * power_integral(t0, head_hi, a * (alpha + beta))
        };
        if closed.is_infinite() {
            return Ok(Estimate::exact(f64::INFINITY));
        }
    }

    let intervals: Vec<(f64, f64)> = pieces[1..]
        .iter()
        .filter_map(|piece| {
            let lo = piece.lo.max(t0);
            let hi = piece.hi.min(t1);
            (lo < hi).then_some((lo, hi))
        })
        .collect();
    let tail = if intervals.is_empty() {
        Estimate::exact(0.0)
    } else {
        // Mass to the left of each piece, so Aw on a piece costs one closed form.
        let mut mass_before = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for piece in pieces {
            mass_before.push(acc);
            acc += piece.integral(piece.lo, piece.hi, 1.0);
        }
        let integrand = |t: f64| {
            let idx = pieces.partition_point(|p| p.hi < t).min(pieces.len() - 1);
            let piece = &pieces[idx];
            let avg = (mass_before[idx] + piece.integral(piece.lo, t, 1.0)) / t;
            avg.powf(alpha) * piece.eval(t).powf(beta)
        };
        quad::integrate(integrand, &intervals, quad)?
    };

    Ok(Estimate {
        value: closed + tail.value,
        error: tail.error + 8.0 * EPS * (closed.abs() + tail.value.abs()),
    })
}

/// `I_s = ∫₀¹ (Aw)^(p−s) w^s` for `0 ≤ s ≤ p`.
pub fn i_s(w: &Weight, p: f64, s: f64, quad: &QuadSpec) -> Result<Estimate> {
    check_p(p)?;
    if !(0.0..=p).contains(&s) {
        return Err(LabError::Parameter(format!("need 0 <= s <= p, got s = {s}")));
    }
    integrate_product(w, 0.0, 1.0, p - s, s, quad)
}

/// Both sides of
/// `I₀ ≤ (p/(p−1))^q·I_q − (q/(p−1))·f^p`.
///
/// The inequality is judged non-strictly against the quadrature budget; the
/// `strict` parameter records whether the margin also clears the budget.
pub fn theorem1_sides(w: &Weight, params: TheoremParams, quad: &QuadSpec) -> Result<IneqReport> {
    let TheoremParams { p, q, f } = params;
    check_p(p)?;
    if !(q >= 1.0 && q <= p) {
        return Err(LabError::Parameter(format!("need 1 <= q <= p, got q = {q}, p = {p}")));
    }
    let i0 = i_s(w, p, 0.0, quad)?;
    let iq = i_s(w, p, q, quad)?;
    let constant = (p / (p - 1.0)).powf(q);
    let mass_term = q / (p - 1.0) * f.powf(p);
    let lhs = i0.value;
    let rhs = constant * iq.value - mass_term;
    let budget = i0.error
        + constant * iq.error
        + 4.0 * EPS * (lhs.abs() + constant * iq.value.abs() + mass_term.abs());
    let report = IneqReport::inequality("theorem1", lhs, rhs, budget);
    let strict = report.margin > budget;
    Ok(report
        .with_param("p", p)
        .with_param("q", q)
        .with_param("f", f)
        .with_param("strict", if strict { 1.0 } else { 0.0 }))
}

/// The `q = 1` case:
/// `I₀ ≤ (p/(p−1))·I₁ − (1/(p−1))·f^p`.
pub fn corollary1_sides(w: &Weight, p: f64, quad: &QuadSpec) -> Result<IneqReport> {
    let params = TheoremParams::new(w, p, 1.0)?;
    let mut report = theorem1_sides(w, params, quad)?;
    report.op = "corollary1".into();
    Ok(report)
}

/// The averaging identity for non-increasing `w`:
/// `∫₀^δ (Aw)^p = −(1/(p−1))·(∫₀^δ w)^p/δ^(p−1) + (p/(p−1))·∫₀^δ (Aw)^(p−1) w`.
///
/// Reported as an identity: `lhs` is the left side, `rhs` the right side,
/// and the residual is `lhs − rhs = −margin`.
pub fn lemma1_residual(w: &Weight, p: f64, delta: f64, quad: &QuadSpec) -> Result<IneqReport> {
    check_p(p)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(LabError::Parameter(format!("need delta in (0,1], got {delta}")));
    }
    if !w.is_nonincreasing() {
        return Err(LabError::Precondition("averaging identity needs a non-increasing weight".into()));
    }
    let powered = integrate_product(w, 0.0, delta, p, 0.0, quad)?;
    let mixed = integrate_product(w, 0.0, delta, p - 1.0, 1.0, quad)?;
    let avg = w.prefix_integral(delta, 1.0)? / delta;
    let boundary = delta * avg.powf(p) / (p - 1.0);
    let factor = p / (p - 1.0);
    let lhs = powered.value;
    let rhs = -boundary + factor * mixed.value;
    let budget = powered.error
        + factor * mixed.error
        + 8.0 * EPS * (lhs.abs() + boundary.abs() + factor * mixed.value.abs());
    let report = IneqReport::identity("lemma1", lhs, rhs, budget);
    let residual = lhs - rhs;
    Ok(report.with_param("p", p).with_param("delta", delta).with_param("residual", residual))
}

/// Hölder step `I₁ ≤ I_q^(1/q)·I₀^((q−1)/q)`; the gap is the report margin.
pub fn holder_interpolation_gap(w: &Weight, p: f64, q: f64, quad: &QuadSpec) -> Result<IneqReport> {
    check_p(p)?;
    if !(q > 1.0 && q <= p) {
        return Err(LabError::Parameter(format!("need 1 < q <= p, got q = {q}, p = {p}")));
    }
    let i0 = i_s(w, p, 0.0, quad)?;
    let i1 = i_s(w, p, 1.0, quad)?;
    let iq = i_s(w, p, q, quad)?;
    let bound = iq.value.powf(1.0 / q) * i0.value.powf((q - 1.0) / q);
    // First-order propagation of the three quadrature errors.
    let d_iq = if iq.value > 0.0 { bound / (q * iq.value) } else { 0.0 };
    let d_i0 = if i0.value > 0.0 { bound * (q - 1.0) / (q * i0.value) } else { 0.0 };
    let budget = i1.error + d_iq * iq.error + d_i0 * i0.error + 8.0 * EPS * (bound + i1.value.abs());
    let report = IneqReport::inequality("interpolation", i1.value, bound, budget);
    Ok(report.with_param("p", p).with_param("q", q))
}

/// `G(x) = x − x^(1−q)·(x + f^p/(p−1))^q`, evaluated as
/// `−x·expm1(q·ln(1 + u))` with `u = f^p/((p−1)x)` to avoid cancellation.
pub fn g_eval(x: f64, q: f64, p: f64, f: f64) -> f64 {
    let u = f.powf(p) / ((p - 1.0) * x);
    -x * (q * u.ln_1p()).exp_m1()
}

/// `F(t) = 1 + (q−1)t^q − q·t^(q−1)` for `t ≥ 1`.
pub fn f_eval(t: f64, q: f64) -> f64 {
    1.0 + (q - 1.0) * t.powf(q) - q * t.powf(q - 1.0)
}
