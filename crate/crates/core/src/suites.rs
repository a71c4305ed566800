//! Seeded property suites over the whole library.
//!
//! Each check draws its cases from independent per-case streams (see
//! [`gen::case_rng`]), evaluates them in parallel and folds the outcomes in
//! case order, so a summary depends only on the master seed.
//!
//! A case yields a *slack*: how far it clears its allowance. Non-negative
//! slack passes; the worst (smallest) slack of a check is reported as its
//! worst margin.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuous::{self, g_eval, f_eval, TheoremParams};
use crate::discrete::{self, CompensatedSum, WeightedSeq};
use crate::error::{LabError, Result};
use crate::gen::{self, case_rng, open_closed};
use crate::quad::{self, QuadSpec};
use crate::rearrange::{self, rearrange_nonincreasing};
use crate::report::{real, IneqReport};
use crate::rhi::{self, Family, RhiQuery};
use crate::sharpness;
use crate::weight::{make_step, PowerPiece, Weight};

pub const SUITE_NAMES: [&str; 6] =
    ["discrete", "weight", "continuous", "sharpness", "rhi", "rearrangement"];

/// Exponents of the discrete property suite.
pub const DISCRETE_PS: [f64; 5] = [1.1, 1.5, 2.0, 3.0, 7.5];
/// Exponents of the rearrangement suites.
pub const REARRANGE_QS: [f64; 3] = [1.5, 2.0, 3.0];
/// Coarse grid of every constant search in the suites.
pub const SUITE_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub suite: &'static str,
    pub check: &'static str,
    pub cases: usize,
    pub passed: usize,
    #[serde(with = "real")]
    pub worst_margin: f64,
}

impl CheckSummary {
    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
    pub passed: bool,
}

/// Runs `cases` independent cases of one check. Errors count as failures
/// with slack `−∞`.
fn run_check<F>(suite: &'static str, check: &'static str, seed: u64, stream: u64, cases: usize, case: F) -> CheckSummary
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let slacks: Vec<f64> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, stream, i as u64);
            match case(&mut rng) {
                Ok(s) if !s.is_nan() => s,
                Ok(_) => f64::NEG_INFINITY,
                Err(e) => {
                    log::warn!("{suite}/{check} case {i}: {e}");
                    f64::NEG_INFINITY
                }
            }
        })
        .collect();
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for (i, &s) in slacks.iter().enumerate() {
        if s >= 0.0 {
            passed += 1;
        } else {
            log::debug!("{suite}/{check} case {i} failed with slack {s}");
        }
        worst = worst.min(s);
    }
    CheckSummary { suite, check, cases, passed, worst_margin: worst }
}

/// Slack of a report: `margin + budget` for inequalities,
/// `budget − |margin|` for identities.
fn ineq_slack(r: &IneqReport) -> f64 {
    r.margin + r.budget
}

fn identity_slack(r: &IneqReport, factor: f64) -> f64 {
    factor * r.budget - r.margin.abs()
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Runs the named suites (all of them when `names` is empty).
pub fn run(seed: u64, names: &[String]) -> Result<SuiteReport> {
    for name in names {
        if !SUITE_NAMES.contains(&name.as_str()) {
            return Err(LabError::Parameter(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITE_NAMES.join(", ")
            )));
        }
    }
    let mut checks = Vec::new();
    for name in SUITE_NAMES {
        if names.is_empty() || names.iter().any(|n| n == name) {
            checks.extend(run_suite(name, seed)?);
        }
    }
    let passed = checks.iter().all(CheckSummary::ok);
    Ok(SuiteReport { seed, checks, passed })
}

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckSummary>> {
    Ok(match name {
        "discrete" => vec![
            elementary_inequality(seed),
            elementary_equality(seed),
            theorem2_random(seed),
            theorem2_equality(seed),
            telescoping(seed),
            unweighted_specialization(seed),
        ],
        "weight" => vec![prefix_vs_quadrature(seed), prefix_monotone(seed), prefix_scaling(seed), average_dominates(seed)],
        "continuous" => vec![
            lemma1_identity(seed),
            theorem1_margins(seed),
            theorem1_strict(seed),
            corollary1_equality(seed),
            interpolation(seed),
            interpolation_power(seed),
            g_monotone(seed),
            f_positive(seed),
        ],
        "sharpness" => vec![limit_scans(), ratio_sharpness(), lq_agreement(seed), ratio_j_agreement(seed)],
        "rhi" => vec![
            p0_round_trip(seed),
            phi_monotone(seed),
            kp_positive(seed),
            c_prime_at_q(seed),
            jensen_floor(seed),
            theorem3_end_to_end(seed),
        ],
        "rearrangement" => vec![rearrange_invariants(seed), theorem_c(seed), theorem_d(seed)],
        other => {
            return Err(LabError::Parameter(format!("unknown suite {other:?}")));
        }
    })
}

// ---------------------------------------------------------------- discrete

pub fn elementary_inequality(seed: u64) -> CheckSummary {
    run_check("discrete", "elementary", seed, 100, 100_000, |rng| {
        let x: f64 = rng.gen_range(0.0..=100.0);
        let y: f64 = rng.gen_range(0.0..=100.0);
        let p = 1.0 + open_closed(rng, 9.0);
        let lhs = p * x.powf(p - 1.0) * y;
        let rhs = (p - 1.0) * x.powf(p) + y.powf(p);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Ok((rhs - lhs) / scale + 1e-9)
    })
}

pub fn elementary_equality(seed: u64) -> CheckSummary {
    run_check("discrete", "elementary-equality", seed, 101, 10_000, |rng| {
        let x: f64 = rng.gen_range(0.0..=100.0);
        let p = 1.0 + open_closed(rng, 9.0);
        let lhs = p * x.powf(p - 1.0) * x;
        let rhs = (p - 1.0) * x.powf(p) + x.powf(p);
        Ok(1e-12 - (lhs - rhs).abs() / lhs.abs().max(1.0))
    })
}

pub fn theorem2_random(seed: u64) -> CheckSummary {
    run_check("discrete", "theorem2", seed, 102, 10_000, |rng| {
        let s = gen::weighted_seq(rng, 64);
        let p = *DISCRETE_PS.choose(rng).expect("non-empty");
        Ok(ineq_slack(&discrete::theorem2_sides(&s, p, discrete::DEFAULT_TOL)?))
    })
}

/// Constant sequences and single terms attain equality.
pub fn theorem2_equality(seed: u64) -> CheckSummary {
    run_check("discrete", "theorem2-equality", seed, 103, 2_000, |rng| {
        let n = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=64) };
        let value = rng.gen_range(0.0..=10.0);
        let lambda = (0..n).map(|_| open_closed(rng, 10.0)).collect();
        let s = WeightedSeq::new(lambda, vec![value; n])?;
        let p = *DISCRETE_PS.choose(rng).expect("non-empty");
        let r = discrete::theorem2_sides(&s, p, 0.0)?;
        Ok(1e-12 - r.margin.abs() / r.lhs.abs().max(r.rhs.abs()).max(f64::MIN_POSITIVE))
    })
}

/// `Σ bound_n = −Λ_N r_N^p/(p−1)`, `Δ_n ≤ bound_n`, and
/// `Σ Δ_n − Σ bound_n = lhs − rhs`.
pub fn telescoping(seed: u64) -> CheckSummary {
    run_check("discrete", "telescoping", seed, 104, 2_000, |rng| {
        let s = gen::weighted_seq(rng, 64);
        let p = *DISCRETE_PS.choose(rng).expect("non-empty");
        let links = discrete::delta_chain(&s, p)?;
        let last = *discrete::running_ratios(&s).last().expect("non-empty");
        let energy = last.weight_sum * if last.ratio == 0.0 { 0.0 } else { last.ratio.powf(p) };
        let mut bounds = CompensatedSum::default();
        let mut deltas = CompensatedSum::default();
        let mut scale = energy / (p - 1.0);
        let mut worst_link = f64::INFINITY;
        for link in &links {
            bounds.add(link.bound);
            deltas.add(link.delta);
            scale = scale.max(link.bound.abs()).max(link.delta.abs());
            let link_scale = link.bound.abs().max(link.delta.abs()).max(1.0);
            worst_link = worst_link.min((link.bound - link.delta) / link_scale + 1e-9);
        }
        let scale = scale.max(1.0);
        let telescoped = 1e-12 - (bounds.value() + energy / (p - 1.0)).abs() / scale;
        let r = discrete::theorem2_sides(&s, p, 0.0)?;
        let total = 1e-12 - (deltas.value() - bounds.value() - (r.lhs - r.rhs)).abs() / scale.max(r.lhs.abs());
        Ok(telescoped.min(total).min(worst_link))
    })
}

/// With `λ ≡ 1` the weighted and unweighted paths agree bit for bit.
pub fn unweighted_specialization(seed: u64) -> CheckSummary {
    run_check("discrete", "unit-weights", seed, 105, 2_000, |rng| {
        let n = rng.gen_range(1..=64);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=10.0)).collect();
        let p = *DISCRETE_PS.choose(rng).expect("non-empty");
        let weighted = discrete::theorem2_sides(&WeightedSeq::new(vec![1.0; n], a.clone())?, p, 0.0)?;
        let plain = discrete::theorem2_unweighted_sides(&a, p, 0.0)?;
        let same = weighted.lhs.to_bits() == plain.lhs.to_bits() && weighted.rhs.to_bits() == plain.rhs.to_bits();
        Ok(if same { 0.0 } else { -1.0 })
    })
}

// ------------------------------------------------------------------ weight

/// A random weight and power with `exp·r ≤ 0.8` on the piece touching 0.
fn weight_and_power(rng: &mut ChaCha8Rng) -> (Weight, f64) {
    let r: f64 = rng.gen_range(0.25..=3.0);
    (gen::any_weight(rng, 6, (0.8 / r).min(0.95)), r)
}

/// Closed-form prefix integrals against adaptive Gauss–Legendre.
pub fn prefix_vs_quadrature(seed: u64) -> CheckSummary {
    let spec = QuadSpec { rel_tol: 1e-13, max_panels: 20_000, ..QuadSpec::default() };
    run_check("weight", "prefix-vs-quadrature", seed, 200, 1_000, move |rng| {
        let (w, r) = weight_and_power(rng);
        let t = open_closed(rng, 1.0);
        let closed = w.prefix_integral(t, r)?;
        let numeric = prefix_by_quadrature(&w, t, r, &spec)?;
        Ok(1e-10 - (closed - numeric).abs() / closed.abs())
    })
}

/// `∫₀ᵗ w^r` by quadrature alone, split at the breakpoints.
pub fn prefix_by_quadrature(w: &Weight, t: f64, r: f64, spec: &QuadSpec) -> Result<f64> {
    let mut total = 0.0;
    for piece in w.pieces() {
        let hi = piece.hi.min(t);
        if piece.lo < hi {
            let p = *piece;
            total += quad::integrate(move |s| p.eval(s).powf(r), &[(p.lo, hi)], spec)?.value;
        }
    }
    Ok(total)
}

pub fn prefix_monotone(seed: u64) -> CheckSummary {
    run_check("weight", "prefix-monotone", seed, 201, 2_000, |rng| {
        let (w, r) = weight_and_power(rng);
        let t1 = open_closed(rng, 1.0);
        let t2 = t1 + (1.0 - t1) * rng.gen::<f64>();
        let (i1, i2) = (w.prefix_integral(t1, r)?, w.prefix_integral(t2, r)?);
        Ok((i2 - i1) / i2.max(f64::MIN_POSITIVE) + 1e-15)
    })
}

pub fn prefix_scaling(seed: u64) -> CheckSummary {
    run_check("weight", "prefix-scaling", seed, 202, 2_000, |rng| {
        let (w, r) = weight_and_power(rng);
        let k = log_uniform(rng, 1e-3, 1e3);
        let t = open_closed(rng, 1.0);
        let scaled = w.scaled(k)?.prefix_integral(t, r)?;
        let expected = k.powf(r) * w.prefix_integral(t, r)?;
        Ok(1e-12 - (scaled - expected).abs() / expected)
    })
}

/// `Aw(t) ≥ w(t)` for non-increasing `w`.
pub fn average_dominates(seed: u64) -> CheckSummary {
    run_check("weight", "average-dominates", seed, 203, 2_000, |rng| {
        let w = gen::nonincreasing_weight(rng, 6, 0.9);
        let t = open_closed(rng, 1.0);
        let (avg, value) = (w.hardy_average(t)?, w.eval(t)?);
        Ok((avg - value) / avg + 1e-12)
    })
}

// -------------------------------------------------------------- continuous

/// First-piece exponent bound that keeps every `I_s` finite for `p ≤ 6`.
const LEAD_EXP_MAX: f64 = 0.9 / 7.0;
const CORPUS: usize = 200;
const CORPUS_STREAM: u64 = 300;
const DELTAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// The continuous corpus: a non-increasing weight and `p ∈ (1, 6]`, shared by
/// the averaging identity and the inequality checks.
fn corpus_case(rng: &mut ChaCha8Rng) -> (Weight, f64) {
    let w = gen::nonincreasing_weight(rng, 6, LEAD_EXP_MAX);
    let p = 1.0 + open_closed(rng, 5.0);
    (w, p)
}

fn corpus_check<F>(check: &'static str, seed: u64, case: F) -> CheckSummary
where
    F: Fn(&Weight, f64) -> Result<f64> + Sync,
{
    run_check("continuous", check, seed, CORPUS_STREAM, CORPUS, |rng| {
        let (w, p) = corpus_case(rng);
        case(&w, p)
    })
}

/// Residual within ten quadrature budgets at every δ.
pub fn lemma1_identity(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    corpus_check("lemma1", seed, move |w, p| {
        DELTAS.iter().try_fold(f64::INFINITY, |worst, &d| {
            Ok(worst.min(identity_slack(&continuous::lemma1_residual(w, p, d, &quad)?, 10.0)))
        })
    })
}

fn theorem1_qs(p: f64) -> [f64; 3] {
    [1.0, 1.5f64.min(p), p]
}

pub fn theorem1_margins(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    corpus_check("theorem1", seed, move |w, p| {
        theorem1_qs(p).iter().try_fold(f64::INFINITY, |worst, &q| {
            let r = continuous::theorem1_sides(w, TheoremParams::new(w, p, q)?, &quad)?;
            Ok(worst.min(ineq_slack(&r)))
        })
    })
}

/// For `q > 1` the margin clears the budget.
pub fn theorem1_strict(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    corpus_check("theorem1-strict", seed, move |w, p| {
        theorem1_qs(p).iter().filter(|&&q| q > 1.0).try_fold(f64::INFINITY, |worst, &q| {
            let r = continuous::theorem1_sides(w, TheoremParams::new(w, p, q)?, &quad)?;
            Ok(worst.min(r.margin - r.budget))
        })
    })
}

/// At `q = 1` non-increasing weights give equality.
pub fn corollary1_equality(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    corpus_check("corollary1-equality", seed, move |w, p| {
        Ok(identity_slack(&continuous::corollary1_sides(w, p, &quad)?, 1.0))
    })
}

pub fn interpolation(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    corpus_check("interpolation", seed, move |w, p| {
        let q = 1.0 + (p - 1.0) * 0.5;
        let gap = continuous::holder_interpolation_gap(w, p, q, &quad)?;
        let at_p = continuous::holder_interpolation_gap(w, p, p, &quad)?;
        Ok(ineq_slack(&gap).min(ineq_slack(&at_p)))
    })
}

/// Single power pieces make the Hölder step an equality.
pub fn interpolation_power(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    run_check("continuous", "interpolation-power", seed, 301, CORPUS, move |rng| {
        let p = 1.0 + open_closed(rng, 5.0);
        let q = 1.0 + open_closed(rng, p - 1.0);
        let w = Weight::power(rng.gen_range(0.5..5.0), rng.gen_range(0.0..0.9 / (p + 1.0)))?;
        Ok(identity_slack(&continuous::holder_interpolation_gap(&w, p, q, &quad)?, 1.0))
    })
}

/// `G` increases strictly and stays below its limit `−q f^p/(p−1)`.
pub fn g_monotone(seed: u64) -> CheckSummary {
    run_check("continuous", "g-monotone", seed, 302, 10_000, |rng| {
        let q = 1.0 + open_closed(rng, 4.0);
        let p = q + rng.gen_range(0.0..5.0);
        let f = rng.gen_range(0.5..=2.0);
        let x1 = log_uniform(rng, 1e-3, 1e3);
        let x2 = x1 * (1.0 + rng.gen_range(0.01..=1.0));
        let (g1, g2) = (g_eval(x1, q, p, f), g_eval(x2, q, p, f));
        let limit = -q * f.powf(p) / (p - 1.0);
        Ok(if g1 < g2 && g2 < limit { 0.0 } else { -1.0 })
    })
}

pub fn f_positive(seed: u64) -> CheckSummary {
    run_check("continuous", "f-positive", seed, 303, 10_000, |rng| {
        let q = 1.0 + open_closed(rng, 4.0);
        let t = 1.0 + rng.gen_range(0.01..=9.0);
        let at_one = f_eval(1.0, q).abs() <= 4.0 * f64::EPSILON * q;
        Ok(if f_eval(t, q) > 0.0 && at_one { 0.0 } else { -1.0 })
    })
}

// --------------------------------------------------------------- sharpness

const SCAN_KS: [i32; 4] = [1, 2, 3, 4];

pub fn limit_scans() -> CheckSummary {
    let pairs = [(3.0, 2.0), (2.0, 2.0), (5.0, 1.5), (2.0, 1.0), (3.0, 1.0), (5.0, 1.0)];
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for (p, q) in pairs {
        let ok = sharpness::limit_scan(p, q, 1.0, &SCAN_KS).map(|s| s.holds()).unwrap_or(false);
        if ok {
            passed += 1;
        }
        worst = worst.min(if ok { 0.0 } else { -1.0 });
    }
    CheckSummary { suite: "sharpness", check: "limit-scan", cases: pairs.len(), passed, worst_margin: worst }
}

/// `I₀/I_q` at `a = 1/3 − 10^(−k)` for `p = 3`, `q = 2` rises towards
/// `(3/2)²` and is within 1 % of it at `k = 4`.
pub fn ratio_sharpness() -> CheckSummary {
    let outcome = (|| -> Result<f64> {
        let quad = QuadSpec::default();
        let (p, q): (f64, f64) = (3.0, 2.0);
        let target = (p / (p - 1.0)).powf(q);
        let mut ratios = Vec::new();
        for k in SCAN_KS {
            let w = sharpness::extremal_weight(1.0, 1.0 / p - 10f64.powi(-k))?;
            ratios.push(continuous::i_s(&w, p, 0.0, &quad)?.value / continuous::i_s(&w, p, q, &quad)?.value);
        }
        let rising = ratios.windows(2).all(|r| r[1] > r[0]) && ratios.iter().all(|&r| r < target);
        let gap = (target - ratios[ratios.len() - 1]) / target;
        Ok(if rising { 1e-2 - gap } else { -1.0 })
    })();
    let slack = outcome.unwrap_or(f64::NEG_INFINITY);
    CheckSummary {
        suite: "sharpness",
        check: "ratio-limit",
        cases: 1,
        passed: usize::from(slack >= 0.0),
        worst_margin: slack,
    }
}

/// A random extremal weight split at an interior breakpoint, so that one
/// piece goes through the Gauss–Legendre panels.
fn split_extremal(rng: &mut ChaCha8Rng) -> Result<(Weight, f64, f64, f64, f64)> {
    let p = 1.0 + open_closed(rng, 5.0);
    let q = 1.0 + open_closed(rng, p - 1.0);
    let a = open_closed(rng, 0.9 / p);
    let f = rng.gen_range(0.5..=2.0);
    let coeff = f * (1.0 - a);
    let cut = rng.gen_range(0.05..0.95);
    let w = Weight::new(vec![PowerPiece::new(0.0, cut, coeff, a)?, PowerPiece::new(cut, 1.0, coeff, a)?])?;
    Ok((w, a, p, q, f))
}

pub fn lq_agreement(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    run_check("sharpness", "lq-vs-quadrature", seed, 400, 500, move |rng| {
        let (w, a, p, q, f) = split_extremal(rng)?;
        let i0 = continuous::i_s(&w, p, 0.0, &quad)?;
        let iq = continuous::i_s(&w, p, q, &quad)?;
        let c = (p / (p - 1.0)).powf(q);
        let numeric = i0.value - c * iq.value;
        let closed = sharpness::lq_closed(a, p, q, f)?;
        let budget = i0.error + c * iq.error + 16.0 * f64::EPSILON * (i0.value + c * iq.value);
        Ok(budget - (numeric - closed).abs())
    })
}

pub fn ratio_j_agreement(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    run_check("sharpness", "ratio-j", seed, 401, 500, move |rng| {
        let (w, a, p, q, _) = split_extremal(rng)?;
        let i0 = continuous::i_s(&w, p, 0.0, &quad)?;
        let iq = continuous::i_s(&w, p, q, &quad)?;
        let ratio = i0.value / iq.value;
        let budget = ratio * (i0.error / i0.value + iq.error / iq.value + 8.0 * f64::EPSILON);
        Ok(budget - (ratio - sharpness::ratio_j(a, p, q)?).abs())
    })
}

// --------------------------------------------------------------------- rhi

/// `p₀` recovers `1/a` from the constant of `t^(−a)`.
pub fn p0_round_trip(seed: u64) -> CheckSummary {
    run_check("rhi", "p0-round-trip", seed, 500, 1_000, |rng| {
        let q = 1.0 + open_closed(rng, 9.0);
        let a = open_closed(rng, 1.0 / q) * (1.0 - 1e-9);
        let c = (1.0 - a).powf(q) / (1.0 - a * q);
        let p0 = rhi::p0_solve(q, c)?;
        Ok(1e-8 - (p0 - 1.0 / a).abs() * a)
    })
}

/// `φ_y` is non-increasing on `[y, ∞)`.
pub fn phi_monotone(seed: u64) -> CheckSummary {
    run_check("rhi", "phi-monotone", seed, 501, 100_000, |rng| {
        let q = 1.0 + open_closed(rng, 4.0);
        let p = q + open_closed(rng, 5.0);
        let y = open_closed(rng, 100.0);
        let x = y + rng.gen_range(0.0..=100.0);
        let z = x + rng.gen_range(0.0..=100.0);
        let (fx, fz) = (rhi::phi_y(x, y, p, q), rhi::phi_y(z, y, p, q));
        let s = p / q;
        let scale = z.powf(s - 1.0) * y + (p - q) / p * z.powf(s);
        Ok((fx - fz) / scale.max(1.0) + 1e-9)
    })
}

/// `k_p > 0` on a 256-point grid of `[q, p₀)`.
pub fn kp_positive(seed: u64) -> CheckSummary {
    run_check("rhi", "kp-positive", seed, 502, 1_000, |rng| {
        let q = 1.0 + open_closed(rng, 4.0);
        let c = 1.0 + log_uniform(rng, 1e-4, 10.0);
        let p0 = rhi::p0_solve(q, c)?;
        rhi::p_grid(q, p0, 256)
            .into_iter()
            .try_fold(f64::INFINITY, |worst, p| Ok(worst.min(rhi::k_p(p, q, c)?)))
    })
}

pub fn c_prime_at_q(seed: u64) -> CheckSummary {
    run_check("rhi", "c-prime-at-q", seed, 503, 1_000, |rng| {
        let q = 1.0 + open_closed(rng, 9.0);
        let c = 1.0 + log_uniform(rng, 1e-6, 100.0);
        Ok(if rhi::c_prime(q, q, c)? == c { 0.0 } else { -1.0 })
    })
}

/// `c ≥ 1` always, with `c = 1` for constants.
pub fn jensen_floor(seed: u64) -> CheckSummary {
    run_check("rhi", "jensen-floor", seed, 504, 100, |rng| {
        let q = *REARRANGE_QS.choose(rng).expect("non-empty");
        let w = gen::any_weight(rng, 4, 0.9 / q);
        let c = rhi::rhi_constant(&w, q, Family::All, SUITE_GRID)?;
        let constant = Weight::constant(rng.gen_range(0.1..10.0))?;
        let k = rhi::rhi_constant(&constant, q, Family::All, SUITE_GRID)?;
        let one = k.tolerance.max(1e-12) - (k.value - 1.0).abs();
        Ok((c.value - 1.0 + 1e-12).min(one))
    })
}

/// The two-step weight `{2, 1}` and random non-increasing steps: every
/// exponent of the range table verifies.
pub fn theorem3_end_to_end(seed: u64) -> CheckSummary {
    let quad = QuadSpec::default();
    run_check("rhi", "theorem3", seed, 505, 24, move |rng| {
        let (w, q) = if rng.gen_bool(0.25) {
            (make_step(&[2.0, 1.0], &[0.5])?.into_weight(), 2.0)
        } else {
            (gen::nonincreasing_step(rng, 4).into_weight(), *REARRANGE_QS.choose(rng).expect("non-empty"))
        };
        let range = rhi::rhi_range(&w, RhiQuery::new(q, Family::Prefix, SUITE_GRID)?, 16, &quad)?;
        Ok(if range.all_verified() { 0.0 } else { -1.0 })
    })
}

// ----------------------------------------------------------- rearrangement

/// Idempotence and equimeasurability.
pub fn rearrange_invariants(seed: u64) -> CheckSummary {
    run_check("rearrangement", "invariants", seed, 600, 500, |rng| {
        let w = gen::step_weight(rng, 8);
        let star = rearrange_nonincreasing(&w);
        if rearrange_nonincreasing(&star) != star || !star.as_weight().is_nonincreasing() {
            return Ok(-1.0);
        }
        [1.0, 1.5, 2.0, 3.0].iter().try_fold(f64::INFINITY, |worst, &r| {
            let before = w.as_weight().interval_integral(0.0, 1.0, r)?;
            let after = star.as_weight().interval_integral(0.0, 1.0, r)?;
            Ok(worst.min(1e-12 - (before - after).abs() / before))
        })
    })
}

pub fn theorem_c(seed: u64) -> CheckSummary {
    run_check("rearrangement", "theorem-c", seed, 601, 500, |rng| {
        let w = gen::step_weight(rng, 8);
        REARRANGE_QS.iter().try_fold(f64::INFINITY, |worst, &q| {
            let r = rearrange::theorem_c_check(&w, q, SUITE_GRID)?;
            Ok(worst.min(r.c_before + r.tolerance - r.c_after))
        })
    })
}

pub fn theorem_d(seed: u64) -> CheckSummary {
    run_check("rearrangement", "theorem-d", seed, 602, 500, |rng| {
        let w = gen::nonincreasing_step(rng, 8);
        let q = *REARRANGE_QS.choose(rng).expect("non-empty");
        let r = rearrange::theorem_d_check(&w, q, SUITE_GRID)?;
        Ok(r.tolerance - (r.c_all - r.c_prefix.max(r.c_suffix)).abs())
    })
}
