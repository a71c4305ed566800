//! Reverse Hölder constants of weights and the higher-integrability range.
//!
//! A weight satisfies the reverse Hölder inequality with exponent `q > 1`
//! and constant `c ≥ 1` over a family of intervals when
//! `avg(w^q) ≤ c·avg(w)^q` on each of them. For non-increasing weights and
//! the prefix family `(0,t]`, the inequality then holds for every exponent
//! `p ∈ [q, p₀)` with constant `c′ = q·c/(p·k_p)`, where `p₀` solves
//! `(p₀−q)/p₀·(p₀/(p₀−1))^q·c = 1` and `k_p = 1 − c·(p−q)/p·(p/(p−1))^q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::continuous::integrate_product;
use crate::error::{LabError, Result};
use crate::quad::QuadSpec;
use crate::report::{real, IneqReport, Status};
use crate::weight::Weight;

const EPS: f64 = f64::EPSILON;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
/// Dyadic depth of the geometric parts of every search grid and δ-sweep.
pub const DYADIC_DEPTH: i32 = 40;
/// Local maxima of the coarse grid that get refined.
const REFINED_CELLS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Intervals `(0,t]`.
    Prefix,
    /// Intervals `(t,1]`.
    Suffix,
    /// Every `(a,b) ⊆ (0,1]`.
    All,
}

impl FromStr for Family {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Family::Prefix),
            "suffix" => Ok(Family::Suffix),
            "all" => Ok(Family::All),
            other => Err(LabError::Parameter(format!(
                "family must be prefix, suffix or all, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Prefix => "prefix",
            Family::Suffix => "suffix",
            Family::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhiQuery {
    pub q: f64,
    pub family: Family,
    pub grid: usize,
}

impl RhiQuery {
    pub const MIN_GRID: usize = 64;

    pub fn new(q: f64, family: Family, grid: usize) -> Result<Self> {
        check_q(q)?;
        if grid < Self::MIN_GRID {
            return Err(LabError::Parameter(format!(
                "grid must be at least {}, got {grid}",
                Self::MIN_GRID
            )));
        }
        Ok(RhiQuery { q, family, grid })
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("need q > 1, got {q}")))
    }
}

/// A searched supremum of `avg(w^q)/avg(w)^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhiConstant {
    #[serde(with = "real")]
    pub value: f64,
    /// Interval `(a, b]` attaining `value`.
    pub interval: (f64, f64),
    /// Largest gap between adjacent coarse grid points.
    pub resolution: f64,
    /// Estimated shortfall of `value` below the true supremum.
    pub tolerance: f64,
}

impl RhiConstant {
    pub fn is_divergent(&self) -> bool {
        !self.value.is_finite()
    }
}

/// `avg(w^q)/avg(w)^q` over `(a, b]`; `None` where `w` vanishes identically.
pub fn rhi_ratio(w: &Weight, a: f64, b: f64, q: f64) -> Option<f64> {
    let mass = w.integral_unchecked(a, b, 1.0);
    if !(mass > 0.0) {
        return None;
    }
    let len = b - a;
    let high = w.integral_unchecked(a, b, q);
    Some((high / len) / (mass / len).powf(q))
}

/// Coarse search points in `[0,1]`: the breakpoints, a uniform grid of
/// `grid` cells, and dyadic points accumulating at both ends.
fn candidates(w: &Weight, grid: usize) -> Vec<f64> {
    let mut pts = vec![0.0, 1.0];
    pts.extend(w.breakpoints());
    pts.extend((1..grid).map(|i| i as f64 / grid as f64));
    for j in 1..=DYADIC_DEPTH {
        let d = 2f64.powi(-j);
        pts.push(d);
        pts.push(1.0 - d);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn max_gap(pts: &[f64]) -> f64 {
    pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Maximizes `f` on `[lo, hi]` by golden-section search; returns `(x, f(x))`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.abs().max(1e-300) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

struct Best {
    value: f64,
    interval: (f64, f64),
    gain: f64,
}

impl Best {
    fn new() -> Self {
        Best { value: f64::NEG_INFINITY, interval: (0.0, 1.0), gain: 0.0 }
    }

    fn offer(&mut self, value: f64, interval: (f64, f64)) {
        if value > self.value {
            self.value = value;
            self.interval = interval;
        }
    }
}

fn ratio_or_floor(w: &Weight, a: f64, b: f64, q: f64) -> f64 {
    if a >= b {
        return f64::NEG_INFINITY;
    }
    rhi_ratio(w, a, b, q).unwrap_or(f64::NEG_INFINITY)
}

/// One-parameter search over `t ↦ ratio(interval(t))` at the points `ts`.
fn search_1d<I: Fn(f64) -> (f64, f64)>(w: &Weight, q: f64, ts: &[f64], interval: I) -> Best {
    let values: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let (a, b) = interval(t);
            ratio_or_floor(w, a, b, q)
        })
        .collect();
    let mut best = Best::new();
    for (&t, &v) in ts.iter().zip(&values) {
        best.offer(v, interval(t));
    }
    if best.value.is_infinite() {
        return best;
    }
    let mut peaks: Vec<usize> = (0..ts.len())
        .filter(|&i| {
            let left = if i > 0 { values[i - 1] } else { f64::NEG_INFINITY };
            let right = values.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            values[i].is_finite() && values[i] >= left && values[i] >= right
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    for &i in peaks.iter().take(REFINED_CELLS) {
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(ts.len() - 1)];
        if lo >= hi {
            continue;
        }
        let (t, v) = golden_max(
            |t| {
                let (a, b) = interval(t);
                ratio_or_floor(w, a, b, q)
            },
            lo,
            hi,
        );
        best.gain = best.gain.max(v - values[i]);
        best.offer(v, interval(t));
    }
    best
}

fn search_pairs(w: &Weight, q: f64, pts: &[f64]) -> Best {
    let n = pts.len();
    let mut values = vec![f64::NEG_INFINITY; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            values[i * n + j] = ratio_or_floor(w, pts[i], pts[j], q);
        }
    }
    let at = |i: usize, j: usize| -> f64 {
        if i < n && j < n && i < j {
            values[i * n + j]
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut best = Best::new();
    let mut peaks = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = at(i, j);
            best.offer(v, (pts[i], pts[j]));
            if !v.is_finite() {
                continue;
            }
            let neighbours = [
                at(i.wrapping_sub(1), j),
                at(i + 1, j),
                at(i, j.wrapping_sub(1)),
                at(i, j + 1),
            ];
            if neighbours.iter().all(|&u| v >= u) {
                peaks.push((i, j));
            }
        }
    }
    if best.value.is_infinite() {
        return best;
    }
    peaks.sort_by(|&(i, j), &(k, l)| at(k, l).total_cmp(&at(i, j)));
    for &(i, j) in peaks.iter().take(REFINED_CELLS) {
        let (a_lo, a_hi) = (pts[i.saturating_sub(1)], pts[(i + 1).min(n - 1)]);
        let (b_lo, b_hi) = (pts[j.saturating_sub(1)], pts[(j + 1).min(n - 1)]);
        let (mut a, mut b) = (pts[i], pts[j]);
        let mut v = at(i, j);
        for _ in 0..8 {
            let (nb, vb) = golden_max(|x| ratio_or_floor(w, a, x, q), b_lo.max(a), b_hi);
            if vb > v {
                b = nb;
                v = vb;
            }
            let (na, va) = golden_max(|x| ratio_or_floor(w, x, b, q), a_lo, a_hi.min(b));
            if va > v {
                a = na;
                v = va;
            }
        }
        best.gain = best.gain.max(v - at(i, j));
        best.offer(v, (a, b));
    }
    best
}

/// The reverse Hölder constant of `w` with exponent `q` over `family`:
/// the supremum of `avg(w^q)/avg(w)^q`, searched over breakpoints, a uniform
/// grid, dyadic points near both ends, and refined by golden-section search
/// around the best cells. `+∞` when `w^q` is not integrable on the family.
pub fn rhi_constant(w: &Weight, q: f64, family: Family, grid: usize) -> Result<RhiConstant> {
    let query = RhiQuery::new(q, family, grid)?;
    let pts = candidates(w, query.grid);
    let resolution = max_gap(&pts);
    let prefix_ts = &pts[1..];
    let suffix_ts = &pts[..pts.len() - 1];
    let best = match family {
        Family::Prefix => search_1d(w, q, prefix_ts, |t| (0.0, t)),
        Family::Suffix => search_1d(w, q, suffix_ts, |t| (t, 1.0)),
        Family::All => {
            let mut best = search_pairs(w, q, &pts);
            for part in [
                search_1d(w, q, prefix_ts, |t| (0.0, t)),
                search_1d(w, q, suffix_ts, |t| (t, 1.0)),
            ] {
                best.gain = best.gain.max(part.gain);
                best.offer(part.value, part.interval);
            }
            best
        }
    };
    let value = if best.value == f64::NEG_INFINITY { 1.0 } else { best.value };
    let tolerance = if value.is_finite() { (2.0 * best.gain).max(1e-9 * value) } else { 0.0 };
    Ok(RhiConstant { value, interval: best.interval, resolution, tolerance })
}

/// `ln ψ(p) − ln c` where `ψ(p) = c·(1 − q/p)·(p/(p−1))^q`, i.e.
/// `ln(1 − q/p) − q·ln(1 − 1/p)`, accurate for large `p`.
fn log_shape(p: f64, q: f64) -> f64 {
    let x = 1.0 / p;
    if q * x <= 0.05 {
        // −Σ_{k≥2} (q^k − q) x^k / k
        let mut sum = 0.0;
        let mut qk = q;
        let mut xk = x;
        for k in 2..200 {
            qk *= q;
            xk *= x;
            let term = (qk - q) * xk / k as f64;
            sum += term;
            if term <= 1e-18 * sum {
                break;
            }
        }
        -sum
    } else {
        ((p - q) / p).ln() - q * (-x).ln_1p()
    }
}

fn psi_log(p: f64, q: f64, c: f64) -> f64 {
    c.ln() + log_shape(p, q)
}

/// Root `p₀ > q` of `(p₀−q)/p₀·(p₀/(p₀−1))^q·c = 1`; `+∞` for `c = 1`.
pub fn p0_solve(q: f64, c: f64) -> Result<f64> {
    check_q(q)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(LabError::Parameter(format!("need finite c >= 1, got {c}")));
    }
    if c == 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = q;
    let mut offset = q * 2f64.powi(-20);
    let hi = loop {
        let p = q + offset;
        if psi_log(p, q, c) >= 0.0 {
            break p;
        }
        lo = p;
        offset *= 2.0;
        if offset > 2f64.powi(64) {
            log::warn!("no sign change below p = 2^64 for q = {q}, c = {c}; treating p0 as +inf");
            return Ok(f64::INFINITY);
        }
    };
    check_unique_root(q, c, hi)?;
    let (mut lo, mut hi) = (lo, hi);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi_log(mid, q, c) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = if psi_log(hi, q, c).abs() <= psi_log(lo, q, c).abs() { hi } else { lo };
    let residual = psi_log(root, q, c).exp_m1().abs();
    if residual > 1e-10 {
        return Err(LabError::Range(format!(
            "p0 residual {residual:e} exceeds 1e-10 at p = {root} (q = {q}, c = {c})"
        )));
    }
    Ok(root)
}

/// Sign scan of `ψ − 1` on 1024 points of `(q, hi]`.
fn check_unique_root(q: f64, c: f64, hi: f64) -> Result<()> {
    let mut changes = 0;
    let mut prev = false;
    for i in 1..=1024 {
        let p = q + (hi - q) * i as f64 / 1024.0;
        let above = psi_log(p, q, c) >= 0.0;
        if above != prev {
            changes += 1;
        }
        prev = above;
    }
    if changes > 1 {
        return Err(LabError::MultipleRoots(format!(
            "{changes} sign changes of psi - 1 on (q, {hi}] for q = {q}, c = {c}"
        )));
    }
    Ok(())
}

/// `k_p = 1 − c·(p−q)/p·(p/(p−1))^q`, positive exactly on `[q, p₀)`.
///
/// Evaluated as `−expm1(ln ψ)` so that it stays accurate when `c` is close
/// to 1 and `p₀` is large.
pub fn k_p(p: f64, q: f64, c: f64) -> Result<f64> {
    check_q(q)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(LabError::Parameter(format!("need finite c >= 1, got {c}")));
    }
    if !(p >= q && p.is_finite()) {
        return Err(LabError::Range(format!("need q <= p, got p = {p}, q = {q}")));
    }
    if p == q {
        return Ok(1.0);
    }
    let k = -psi_log(p, q, c).exp_m1();
    if k > 0.0 {
        Ok(k)
    } else {
        Err(LabError::Range(format!("p = {p} is not below p0 for q = {q}, c = {c}")))
    }
}

/// `c′ = q·c/(p·k_p)`; exactly `c` at `p = q`.
pub fn c_prime(p: f64, q: f64, c: f64) -> Result<f64> {
    let k = k_p(p, q, c)?;
    if p == q {
        return Ok(c);
    }
    Ok(q * c / (p * k))
}

/// `φ_y(x) = x^(p/q−1)·y − ((p−q)/p)·x^(p/q)`, non-increasing for `x ≥ y`.
pub fn phi_y(x: f64, y: f64, p: f64, q: f64) -> f64 {
    let s = p / q;
    x.powf(s - 1.0) * y - (p - q) / p * x.powf(s)
}

/// The δ-sweep: `2^(−j)` for `j = 0..=40` together with every breakpoint.
pub fn delta_grid(w: &Weight) -> Vec<f64> {
    let mut ds: Vec<f64> = (0..=DYADIC_DEPTH).map(|j| 2f64.powi(-j)).collect();
    ds.extend(w.breakpoints());
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    ds
}

/// Checks the improved inequality `avg₀^δ(w^p) ≤ c′·avg₀^δ(w)^p` and the
/// intermediate `avg₀^δ((Aw)^(p−q) w^q) ≤ c′·avg₀^δ(w)^p` at every δ of
/// [`delta_grid`], for a given hypothesis constant `c`.
pub fn theorem3_verify_with(
    w: &Weight,
    q: f64,
    p: f64,
    c: f64,
    quad: &QuadSpec,
) -> Result<IneqReport> {
    check_q(q)?;
    if !w.is_nonincreasing() {
        return Err(LabError::Precondition("improved reverse Hölder needs a non-increasing weight".into()));
    }
    let p0 = p0_solve(q, c)?;
    if !(p >= q && p < p0) {
        return Err(LabError::Precondition(format!("need q <= p < p0, got p = {p}, p0 = {p0}")));
    }
    let k = k_p(p, q, c)?;
    let cp = c_prime(p, q, c)?;

    let mut worst: Option<(f64, IneqReport, f64, f64)> = None;
    let mut all_pass = true;
    let mut checks = 0usize;
    for delta in delta_grid(w) {
        let avg = w.prefix_integral(delta, 1.0)? / delta;
        let rhs = cp * avg.powf(p);
        let direct = w.prefix_integral(delta, p)? / delta;
        let mixed = integrate_product(w, 0.0, delta, p - q, q, quad)?;
        let candidates = [
            (0.0, direct, 8.0 * EPS * (direct + rhs)),
            (1.0, mixed.value / delta, mixed.error / delta + 8.0 * EPS * (mixed.value / delta + rhs)),
        ];
        for (which, lhs, budget) in candidates {
            checks += 1;
            let r = IneqReport::inequality("theorem3", lhs, rhs, budget);
            all_pass &= r.passed();
            let score = r.margin / rhs.abs().max(f64::MIN_POSITIVE);
            let worse = match &worst {
                None => true,
                Some((s, prev, _, _)) => (!r.passed() && prev.passed()) || (r.passed() == prev.passed() && score < *s),
            };
            if worse {
                worst = Some((score, r, delta, which));
            }
        }
    }
    let (_, mut report, delta, which) = worst.expect("delta grid is never empty");
    if !all_pass && report.status == Status::Pass {
        report.status = Status::Fail;
    }
    Ok(report
        .with_param("p", p)
        .with_param("q", q)
        .with_param("c", c)
        .with_param("p0", p0)
        .with_param("k_p", k)
        .with_param("c_prime", cp)
        .with_param("delta", delta)
        .with_param("intermediate", which)
        .with_param("checks", checks as f64))
}

/// Computes the prefix constant of `w` and runs [`theorem3_verify_with`].
pub fn theorem3_verify(w: &Weight, q: f64, p: f64, quad: &QuadSpec, grid: usize) -> Result<IneqReport> {
    if !w.is_nonincreasing() {
        return Err(LabError::Precondition("improved reverse Hölder needs a non-increasing weight".into()));
    }
    let c = rhi_constant(w, q, Family::Prefix, grid)?;
    if c.is_divergent() {
        let mut report = IneqReport::inequality("theorem3", f64::INFINITY, f64::INFINITY, 0.0);
        report.status = Status::Divergent;
        return Ok(report.with_param("p", p).with_param("q", q));
    }
    theorem3_verify_with(w, q, p, c.value.max(1.0), quad)
}

/// Direct check of `avg(w^p) ≤ c′·avg(w)^p` on the suffix intervals `(t,1]`
/// at every suffix search point.
pub fn verify_suffix(w: &Weight, q: f64, p: f64, c: f64, grid: usize) -> Result<IneqReport> {
    let cp = c_prime(p, q, c)?;
    let pts = candidates(w, grid);
    let mut worst: Option<(f64, IneqReport, f64)> = None;
    for &t in &pts[..pts.len() - 1] {
        let len = 1.0 - t;
        let mass = w.integral_unchecked(t, 1.0, 1.0);
        if !(mass > 0.0) {
            continue;
        }
        let lhs = w.integral_unchecked(t, 1.0, p) / len;
        let rhs = cp * (mass / len).powf(p);
        let r = IneqReport::inequality("theorem3_suffix", lhs, rhs, 8.0 * EPS * (lhs + rhs));
        let score = r.margin / rhs.abs().max(f64::MIN_POSITIVE);
        if worst.as_ref().is_none_or(|(s, _, _)| score < *s) {
            worst = Some((score, r, t));
        }
    }
    let (_, report, t) = worst.ok_or_else(|| LabError::Precondition("weight vanishes on every suffix".into()))?;
    Ok(report.with_param("p", p).with_param("q", q).with_param("c", c).with_param("c_prime", cp).with_param("t", t))
}

/// The sharp weight `t^(−1/p₀)` for `(q, c)`, certified to have prefix
/// ratio `c` everywhere, with evidence that `∫ w^{p₀}` diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalRhi {
    pub weight: Weight,
    pub p0: f64,
    pub exponent: f64,
    /// `(1−a)^q/(1−aq)` at `a = 1/p₀`.
    pub ratio: f64,
    /// `(ε, ∫_ε¹ w^{p₀})` for `ε = 2^(−k)`, `k = 1..=40`.
    pub truncated: Vec<(f64, f64)>,
}

impl ExtremalRhi {
    /// Growth of the truncated integral per halving of ε.
    pub fn increments(&self) -> Vec<f64> {
        self.truncated.windows(2).map(|w| w[1].1 - w[0].1).collect()
    }
}

pub fn extremal_rhi(q: f64, c: f64) -> Result<ExtremalRhi> {
    check_q(q)?;
    if !(c > 1.0 && c.is_finite()) {
        return Err(LabError::Parameter(format!("need c > 1 for a finite p0, got {c}")));
    }
    let p0 = p0_solve(q, c)?;
    if !p0.is_finite() {
        return Err(LabError::Range(format!("c = {c} is too close to 1 to resolve p0")));
    }
    let a = 1.0 / p0;
    let weight = Weight::power(1.0, a)?;
    let ratio = (1.0 - a).powf(q) / (1.0 - a * q);
    if (ratio - c).abs() > 1e-10 {
        return Err(LabError::Range(format!("extremal ratio {ratio} misses c = {c}")));
    }
    let truncated = (1..=DYADIC_DEPTH)
        .map(|k| {
            let eps = 2f64.powi(-k);
            Ok((eps, weight.interval_integral(eps, 1.0, p0)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtremalRhi { weight, p0, exponent: a, ratio, truncated })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeRow {
    pub p: f64,
    pub k_p: f64,
    #[serde(with = "real")]
    pub c_prime: f64,
    pub verified: bool,
}

/// The analysis bundle: constant, sharp exponent and a table of `(p, k_p, c′)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhiRange {
    #[serde(with = "real")]
    pub c: f64,
    #[serde(with = "real")]
    pub p0: f64,
    pub table: Vec<RangeRow>,
    pub q: f64,
    pub family: Family,
    pub resolution: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl RhiRange {
    pub fn all_verified(&self) -> bool {
        self.status == Status::Pass && self.table.iter().all(|r| r.verified)
    }
}

/// `n` exponents in `[q, p₀)`: equispaced when `p₀` is finite, else
/// `q, q+1, …, q+n−1`.
pub fn p_grid(q: f64, p0: f64, n: usize) -> Vec<f64> {
    if p0.is_finite() {
        (0..n).map(|i| q + (p0 - q) * i as f64 / n as f64).collect()
    } else {
        (0..n).map(|i| q + i as f64).collect()
    }
}

/// End-to-end analysis of `w`: constant over the query family, `p₀`, and a
/// verified row for each exponent of [`p_grid`].
pub fn rhi_range(w: &Weight, query: RhiQuery, p_points: usize, quad: &QuadSpec) -> Result<RhiRange> {
    let RhiQuery { q, family, grid } = query;
    let constant = rhi_constant(w, q, family, grid)?;
    if constant.is_divergent() {
        return Ok(RhiRange {
            c: f64::INFINITY,
            p0: f64::NAN,
            table: Vec::new(),
            q,
            family,
            resolution: constant.resolution,
            tolerance: constant.tolerance,
            status: Status::Divergent,
        });
    }
    if family != Family::Suffix && !w.is_nonincreasing() {
        return Err(LabError::Precondition("prefix analysis needs a non-increasing weight".into()));
    }
    // Jensen: c ≥ 1, with equality exactly for constants; the search may
    // land a rounding error to either side.
    let c = if w.is_constant() { 1.0 } else { constant.value.max(1.0) };
    let p0 = p0_solve(q, c)?;
    let mut table = Vec::with_capacity(p_points);
    for p in p_grid(q, p0, p_points) {
        let k = k_p(p, q, c)?;
        let cp = c_prime(p, q, c)?;
        let verified = match family {
            Family::Prefix | Family::All => theorem3_verify_with(w, q, p, c, quad)?.passed(),
            Family::Suffix => verify_suffix(w, q, p, c, grid)?.passed(),
        };
        table.push(RangeRow { p, k_p: k, c_prime: cp, verified });
    }
    let status = if table.iter().all(|r| r.verified) { Status::Pass } else { Status::Fail };
    Ok(RhiRange {
        c,
        p0,
        table,
        q,
        family,
        resolution: constant.resolution,
        tolerance: constant.tolerance,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::make_step;

    fn two_step() -> Weight {
        make_step(&[2.0, 1.0], &[0.5]).unwrap().into_weight()
    }

    #[test]
    fn rhi_constant_examples() {
        let one = Weight::constant(1.0).unwrap();
        let c = rhi_constant(&one, 2.0, Family::Prefix, 64).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        let quarter = Weight::power(1.0, 0.25).unwrap();
        let c = rhi_constant(&quarter, 2.0, Family::Prefix, 64).unwrap();
        assert!((c.value - 9.0 / 8.0).abs() < 1e-12);
        let c = rhi_constant(&two_step(), 2.0, Family::Prefix, 64).unwrap();
        assert!((c.value - 10.0 / 9.0).abs() < 1e-12);
        assert_eq!(c.interval, (0.0, 1.0));
    }

    #[test]
    fn rhi_constant_divergence_and_validation() {
        let steep = Weight::power(1.0, 0.6).unwrap();
        assert!(rhi_constant(&steep, 2.0, Family::Prefix, 64).unwrap().is_divergent());
        assert!(rhi_constant(&steep, 2.0, Family::All, 64).unwrap().is_divergent());
        assert!(rhi_constant(&steep, 1.0, Family::Prefix, 64).is_err());
        assert!(rhi_constant(&steep, 2.0, Family::Prefix, 10).is_err());
    }

    #[test]
    fn two_step_all_intervals_peak_straddles_the_jump() {
        // Mixture of 2 (length x) and 1 (length y): ratio (4x+y)(x+y)/(2x+y)²,
        // maximized at x/y = 1/2 with value 9/8.
        let c = rhi_constant(&two_step(), 2.0, Family::All, 64).unwrap();
        assert!((c.value - 9.0 / 8.0).abs() < 1e-10, "{c:?}");
        let s = rhi_constant(&two_step(), 2.0, Family::Suffix, 64).unwrap();
        assert!((s.value - 9.0 / 8.0).abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn p0_examples() {
        assert!((p0_solve(2.0, 9.0 / 8.0).unwrap() - 4.0).abs() <= 1e-10);
        assert_eq!(p0_solve(3.0, 1.0).unwrap(), f64::INFINITY);
        let c = 0.6f64.powf(1.5) / 0.4;
        assert!((c - 1.16190).abs() < 1e-5);
        assert!((p0_solve(1.5, c).unwrap() - 2.5).abs() <= 1e-9);
        assert!(p0_solve(2.0, 0.99).is_err());
        assert!(p0_solve(1.0, 2.0).is_err());
    }

    #[test]
    fn p0_for_huge_constant_sits_just_above_q() {
        let p0 = p0_solve(2.0, 1e4).unwrap();
        assert!(p0 > 2.0 && p0 < 2.0 + 1e-4);
        assert!(psi_log(p0, 2.0, 1e4).abs() < 1e-10);
    }

    #[test]
    fn k_p_and_c_prime_examples() {
        assert_eq!(k_p(2.0, 2.0, 1.3).unwrap(), 1.0);
        assert!((k_p(3.0, 2.0, 9.0 / 8.0).unwrap() - 5.0 / 32.0).abs() <= 1e-12);
        assert!(k_p(4.0 - 1e-9, 2.0, 9.0 / 8.0).unwrap() < 1e-8);
        assert!(matches!(k_p(4.5, 2.0, 9.0 / 8.0), Err(LabError::Range(_))));
        assert_eq!(c_prime(2.0, 2.0, 10.0 / 9.0).unwrap(), 10.0 / 9.0);
        assert!((c_prime(3.0, 2.0, 9.0 / 8.0).unwrap() - 4.8).abs() <= 1e-12);
        assert!(c_prime(4.0 - 1e-9, 2.0, 9.0 / 8.0).unwrap() > 1e8);
    }

    #[test]
    fn theorem3_examples() {
        let quad = QuadSpec::default();
        let r = theorem3_verify(&two_step(), 2.0, 2.0, &quad, 64).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.param("c_prime").unwrap() - 10.0 / 9.0).abs() < 1e-12);

        let quarter = Weight::power(1.0, 0.25).unwrap();
        let r = theorem3_verify(&quarter, 2.0, 3.0, &quad, 64).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.param("p0").unwrap() - 4.0).abs() < 1e-9);
        assert!((r.param("c_prime").unwrap() - 4.8).abs() < 1e-9);
        // At δ = 1: ∫t^(−3/4) = 4 against 4.8·(4/3)³.
        assert!((quarter.prefix_integral(1.0, 3.0).unwrap() - 4.0).abs() < 1e-13);

        let one = Weight::constant(1.0).unwrap();
        assert!(theorem3_verify(&one, 2.0, 5.0, &quad, 64).unwrap().passed());
    }

    #[test]
    fn theorem3_preconditions() {
        let quad = QuadSpec::default();
        let up = make_step(&[1.0, 2.0], &[0.5]).unwrap().into_weight();
        assert!(matches!(theorem3_verify(&up, 2.0, 2.0, &quad, 64), Err(LabError::Precondition(_))));
        let quarter = Weight::power(1.0, 0.25).unwrap();
        assert!(matches!(theorem3_verify(&quarter, 2.0, 4.5, &quad, 64), Err(LabError::Precondition(_))));
    }

    #[test]
    fn extremal_examples() {
        let e = extremal_rhi(2.0, 9.0 / 8.0).unwrap();
        assert!((e.exponent - 0.25).abs() < 1e-12);
        assert!((e.ratio - 9.0 / 8.0).abs() < 1e-12);
        for d in e.increments() {
            assert!((d - 2f64.ln()).abs() < 1e-12);
        }
        let e = extremal_rhi(2.0, 10.0 / 9.0).unwrap();
        assert!(e.p0 > 4.0 && e.p0 < 4.2);
        assert!(extremal_rhi(3.0, 1.0).is_err());
        let near = extremal_rhi(3.0, 1.0 + 1e-9).unwrap();
        assert!(near.p0 > 1e3 && near.exponent < 1e-3);
    }

    #[test]
    fn phi_decreases_above_the_diagonal() {
        let (p, q) = (5.0, 2.0);
        let y = 0.7;
        assert!(phi_y(0.7, y, p, q) >= phi_y(1.3, y, p, q));
        assert!(phi_y(1.3, y, p, q) >= phi_y(9.0, y, p, q));
    }

    #[test]
    fn range_examples() {
        let quad = QuadSpec::default();
        let query = RhiQuery::new(2.0, Family::Prefix, 64).unwrap();
        let r = rhi_range(&two_step(), query, 16, &quad).unwrap();
        assert!((r.c - 10.0 / 9.0).abs() < 1e-9);
        assert!(r.p0 > 4.0 && r.p0 < 4.2);
        assert_eq!(r.table.len(), 16);
        assert!(r.all_verified());
        assert_eq!(r.table[0].c_prime, r.c);

        let r = rhi_range(&Weight::constant(3.0).unwrap(), query, 5, &quad).unwrap();
        assert_eq!(r.p0, f64::INFINITY);
        assert!(r.all_verified());

        let r = rhi_range(&Weight::power(1.0, 0.6).unwrap(), query, 5, &quad).unwrap();
        assert_eq!(r.status, Status::Divergent);
        assert!(!r.all_verified());
    }

    #[test]
    fn range_json_shape() {
        let quad = QuadSpec::default();
        let query = RhiQuery::new(2.0, Family::Prefix, 64).unwrap();
        let r = rhi_range(&Weight::constant(1.0).unwrap(), query, 2, &quad).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["p0"], "inf");
        assert_eq!(v["table"][0]["verified"], true);
        assert!(v["table"][1]["k_p"].is_number());
    }
}
