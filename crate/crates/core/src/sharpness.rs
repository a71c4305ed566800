//! The extremal power family and the two sharpness scans.
//!
//! For `g_a(t) = f(1−a)t^(−a)` with `a ∈ (0, 1/p)`, `Aw = g_a/(1−a)` and
//! `∫₀¹ g_a^p = f^p(1−a)^p/(1−ap)`, so
//!
//! ```text
//! L_q(a) = I₀ − (p/(p−1))^q I_q = f^p [1 − ((1−a)p/(p−1))^q] / (1−ap)
//! ```
//!
//! which tends to `−q f^p/(p−1)` as `a → 1/p⁻`.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::report::real;
use crate::weight::Weight;

const EPS: f64 = f64::EPSILON;

/// `f(1−a)·t^(−a)`, the unit-mass-`f` extremal weight.
pub fn extremal_weight(f: f64, a: f64) -> Result<Weight> {
    if !(a > 0.0 && a < 1.0) {
        return Err(LabError::Parameter(format!("extremal exponent must lie in (0,1), got {a}")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(LabError::Parameter(format!("mass f must be positive, got {f}")));
    }
    Weight::power(f * (1.0 - a), a)
}

fn check_family(a: f64, p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::Parameter(format!("need p > 1, got {p}")));
    }
    if !(a > 0.0 && a < 1.0 / p) {
        return Err(LabError::Parameter(format!("need a in (0, 1/p), got a = {a}, p = {p}")));
    }
    Ok(())
}

/// `I₀/I_q = (1/(1−a))^q` for `t^(−a)`.
pub fn ratio_j(a: f64, p: f64, q: f64) -> Result<f64> {
    check_family(a, p)?;
    Ok((1.0 - a).powf(-q))
}

/// `L_q(a)` in the cancellation-free form
/// `−f^p·expm1(q·ln(1+u))/(p·ε)` with `ε = 1/p − a`, `u = p·ε/(p−1)`.
pub fn lq_closed(a: f64, p: f64, q: f64, f: f64) -> Result<f64> {
    check_family(a, p)?;
    let eps = 1.0 / p - a;
    Ok(lq_from_gap(eps, p, q, f))
}

fn lq_from_gap(eps: f64, p: f64, q: f64, f: f64) -> f64 {
    let u = p * eps / (p - 1.0);
    -f.powf(p) * (q * u.ln_1p()).exp_m1() / (p * eps)
}

/// Rounding budget for one `L_q` evaluation and the margin built on it.
fn lq_budget(l: f64, p: f64, q: f64, f: f64) -> f64 {
    32.0 * EPS * (l.abs() + q * f.powf(p) / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: i32,
    #[serde(with = "real")]
    pub a: f64,
    #[serde(rename = "L", with = "real")]
    pub l: f64,
    #[serde(with = "real")]
    pub margin: f64,
    #[serde(skip)]
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitScan {
    pub p: f64,
    pub q: f64,
    pub f: f64,
    pub rows: Vec<ScanRow>,
    /// `k` values whose `a_k = 1/p − 10^(−k)` fell outside `(0, 1/p)`.
    pub skipped: Vec<i32>,
}

/// `L_q(a_k)` and `margin_k = −L_q(a_k) − q f^p/(p−1)` at
/// `a_k = 1/p − 10^(−k)`.
pub fn limit_scan(p: f64, q: f64, f: f64, ks: &[i32]) -> Result<LimitScan> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::Parameter(format!("need p > 1, got {p}")));
    }
    if !(q >= 1.0 && q <= p) {
        return Err(LabError::Parameter(format!("need 1 <= q <= p, got q = {q}")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(LabError::Parameter(format!("mass f must be positive, got {f}")));
    }
    let limit = q * f.powf(p) / (p - 1.0);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &k in ks {
        let eps = 10f64.powi(-k);
        let a = 1.0 / p - eps;
        if !(a > 0.0) || !(eps > 0.0) {
            log::warn!("k = {k} gives a = {a} outside (0, 1/p); skipped");
            skipped.push(k);
            continue;
        }
        let l = lq_from_gap(eps, p, q, f);
        rows.push(ScanRow { k, a, l, margin: -l - limit, budget: lq_budget(l, p, q, f) });
    }
    Ok(LimitScan { p, q, f, rows, skipped })
}

impl LimitScan {
    /// The sharpness property of the scan: margins are non-negative; for
    /// `q > 1` they strictly decrease and, over three or more decades of `k`,
    /// shrink by at least a factor 100; for `q = 1` they vanish.
    pub fn holds(&self) -> bool {
        if self.rows.is_empty() {
            return false;
        }
        if self.rows.iter().any(|r| !(r.margin >= -r.budget)) {
            return false;
        }
        if self.q == 1.0 {
            return self.rows.iter().all(|r| r.margin.abs() <= r.budget);
        }
        let decreasing = self.rows.windows(2).all(|w| w[1].margin < w[0].margin);
        let (first, last) = (&self.rows[0], &self.rows[self.rows.len() - 1]);
        let shrinks = last.k - first.k < 3 || last.margin / first.margin <= 1e-2;
        decreasing && shrinks
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a,L,margin\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.k, r.a, r.l, r.margin));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremal_weight_examples() {
        assert!(extremal_weight(1.0, 0.0).is_err());
        assert!(extremal_weight(1.0, 1.0).is_err());
        let w = extremal_weight(1.0, 0.25).unwrap();
        assert_eq!((w.pieces()[0].coeff, w.pieces()[0].exp), (0.75, 0.25));
        assert!((w.total_mass() - 1.0).abs() < 1e-15);
        let w = extremal_weight(2.0, 0.5).unwrap();
        assert_eq!(w.pieces()[0].coeff, 1.0);
        assert!((w.total_mass() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_j_examples() {
        assert!((ratio_j(0.25, 2.0, 2.0).unwrap() - 16.0 / 9.0).abs() < 1e-15);
        assert!((ratio_j(0.25, 2.0, 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((ratio_j(1e-12, 2.0, 3.0).unwrap() - 1.0).abs() < 1e-11);
        assert!(ratio_j(0.5, 2.0, 1.0).is_err());
    }

    #[test]
    fn lq_examples() {
        for a in [0.01, 0.2, 0.4999] {
            assert!((lq_closed(a, 2.0, 1.0, 1.0).unwrap() + 1.0).abs() < 1e-14);
        }
        assert!((lq_closed(0.3, 3.0, 2.0, 1.0).unwrap() + 1.025).abs() < 1e-13);
        assert!((lq_closed(0.33, 3.0, 2.0, 1.0).unwrap() + 1.0025).abs() < 1e-12);
    }

    #[test]
    fn lq_matches_the_textbook_expression() {
        for &(a, p, q, f) in &[(0.1, 2.0, 1.5, 2.0), (0.3, 3.0, 2.5, 0.7), (0.05, 6.0, 4.0, 1.3)] {
            let direct = f64::powf(f, p) * (1.0 - ((1.0 - a) * p / (p - 1.0)).powf(q)) / (1.0 - a * p);
            let stable = lq_closed(a, p, q, f).unwrap();
            assert!((direct - stable).abs() <= 1e-12 * direct.abs(), "{direct} {stable}");
        }
    }

    #[test]
    fn limit_scan_examples() {
        let scan = limit_scan(3.0, 2.0, 1.0, &[1, 2, 3, 4]).unwrap();
        assert_eq!(scan.rows.len(), 4);
        // a = 1/3 − 0.1: u = 0.15, L = −(1.15² − 1)/0.3 = −1.075.
        assert!((scan.rows[0].margin - 0.075).abs() < 1e-14);
        assert!(scan.holds());

        let flat = limit_scan(2.0, 1.0, 1.0, &[1, 2, 3, 4]).unwrap();
        assert!(flat.rows.iter().all(|r| r.margin.abs() <= r.budget));
        assert!(flat.holds());

        let one = limit_scan(2.0, 2.0, 1.0, &[2]).unwrap();
        assert!((one.rows[0].l + 2.02).abs() < 1e-12);
        assert!((one.rows[0].margin - 0.02).abs() < 1e-12);
    }

    #[test]
    fn limit_scan_skips_out_of_family_points() {
        let scan = limit_scan(3.0, 2.0, 1.0, &[0, 1, 2]).unwrap();
        assert_eq!(scan.skipped, vec![0]);
        assert_eq!(scan.rows.len(), 2);
        assert!(scan.to_csv().starts_with("k,a,L,margin\n1,"));
    }
}
