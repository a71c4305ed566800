//! The discrete weighted Hardy inequality and its classical cases.
//!
//! For `λ_n > 0`, `a_n ≥ 0` with `A_n = Σ λ_i a_i` and `Λ_n = Σ λ_i`:
//!
//! ```text
//! Σ λ_n (A_n/Λ_n)^p ≤ p/(p−1) Σ λ_n a_n (A_n/Λ_n)^(p−1) − 1/(p−1) Λ_N (A_N/Λ_N)^p
//! ```
//!
//! Sums run left to right with compensated accumulation, so that equality
//! cases reproduce to rounding and the unit-weight specialization agrees bit
//! for bit with the unweighted path.

use std::path::Path;

use crate::error::{LabError, Result};
use crate::report::IneqReport;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Neumaier-compensated running sum, accumulated strictly in push order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSeq {
    lambda: Vec<f64>,
    a: Vec<f64>,
}

impl WeightedSeq {
    pub fn new(lambda: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(LabError::Validation("sequence must have at least one term".into()));
        }
        if lambda.len() != a.len() {
            return Err(LabError::Validation(format!(
                "lambda has {} terms but a has {}",
                lambda.len(),
                a.len()
            )));
        }
        if let Some(l) = lambda.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(LabError::Validation(format!("lambda_n must be positive, got {l}")));
        }
        if let Some(x) = a.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(LabError::Validation(format!("a_n must be non-negative, got {x}")));
        }
        Ok(WeightedSeq { lambda, a })
    }

    /// Unit weights `λ_n ≡ 1`.
    pub fn unweighted(a: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0; a.len()], a)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Parses CSV with header `lambda,a`, one row per term.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| LabError::Parse(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "lambda" || &headers[1] != "a" {
            return Err(LabError::Parse(format!(
                "expected header `lambda,a`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut lambda, mut a) = (Vec::new(), Vec::new());
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| LabError::Parse(e.to_string()))?;
            let field = |j: usize| -> Result<f64> {
                row.get(j)
                    .ok_or_else(|| LabError::Parse(format!("row {}: missing column {j}", i + 1)))?
                    .parse::<f64>()
                    .map_err(|e| LabError::Parse(format!("row {}: {e}", i + 1)))
            };
            lambda.push(field(0)?);
            a.push(field(1)?);
        }
        Self::new(lambda, a)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }
}

/// Prefix data `(A_n, Λ_n, A_n/Λ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningRatio {
    pub weighted_sum: f64,
    pub weight_sum: f64,
    pub ratio: f64,
}

pub fn running_ratios(s: &WeightedSeq) -> Vec<RunningRatio> {
    let mut big_a = CompensatedSum::default();
    let mut big_lambda = CompensatedSum::default();
    s.lambda
        .iter()
        .zip(&s.a)
        .map(|(&l, &a)| {
            big_a.add(l * a);
            big_lambda.add(l);
            let (weighted_sum, weight_sum) = (big_a.value(), big_lambda.value());
            RunningRatio { weighted_sum, weight_sum, ratio: weighted_sum / weight_sum }
        })
        .collect()
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("need p > 1, got {p}")))
    }
}

/// `x^e` with the convention `0^e = 0` for the positive exponents used here.
fn pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

fn tol_budget(tol: f64, lhs: f64) -> f64 {
    tol * lhs.abs().max(1.0)
}

/// Shared core for the weighted inequality: `(lhs, rhs)` from `(λ_n, a_n)`
/// pairs and their running ratios.
fn weighted_sides(lambda: &[f64], a: &[f64], ratios: &[RunningRatio], p: f64) -> (f64, f64) {
    let mut lhs = CompensatedSum::default();
    let mut mixed = CompensatedSum::default();
    for ((&l, &x), r) in lambda.iter().zip(a).zip(ratios) {
        lhs.add(l * pow(r.ratio, p));
        mixed.add(l * x * pow(r.ratio, p - 1.0));
    }
    let last = ratios.last().expect("sequences are non-empty");
    let tail = last.weight_sum * pow(last.ratio, p) / (p - 1.0);
    let rhs = p / (p - 1.0) * mixed.value() - tail;
    (lhs.value(), rhs)
}

pub fn theorem2_sides(s: &WeightedSeq, p: f64, tol: f64) -> Result<IneqReport> {
    check_p(p)?;
    let (lhs, rhs) = weighted_sides(&s.lambda, &s.a, &running_ratios(s), p);
    Ok(IneqReport::inequality("theorem2", lhs, rhs, tol_budget(tol, lhs))
        .with_param("p", p)
        .with_param("n", s.len() as f64))
}

/// The unit-weight case computed without any `λ`: `Λ_n = n`.
pub fn theorem2_unweighted_sides(a: &[f64], p: f64, tol: f64) -> Result<IneqReport> {
    check_p(p)?;
    let s = WeightedSeq::unweighted(a.to_vec())?;
    let ratios = unweighted_ratios(s.a());
    let mut lhs = CompensatedSum::default();
    let mut mixed = CompensatedSum::default();
    for (&x, r) in a.iter().zip(&ratios) {
        lhs.add(pow(r.ratio, p));
        mixed.add(x * pow(r.ratio, p - 1.0));
    }
    let last = ratios.last().expect("sequences are non-empty");
    let tail = last.weight_sum * pow(last.ratio, p) / (p - 1.0);
    let lhs = lhs.value();
    let rhs = p / (p - 1.0) * mixed.value() - tail;
    Ok(IneqReport::inequality("theorem2", lhs, rhs, tol_budget(tol, lhs))
        .with_param("p", p)
        .with_param("n", a.len() as f64))
}

fn unweighted_ratios(a: &[f64]) -> Vec<RunningRatio> {
    let mut big_a = CompensatedSum::default();
    a.iter()
        .enumerate()
        .map(|(i, &x)| {
            big_a.add(x);
            let n = (i + 1) as f64;
            RunningRatio { weighted_sum: big_a.value(), weight_sum: n, ratio: big_a.value() / n }
        })
        .collect()
}

/// `Σ λ_n (A_n/Λ_n)^p ≤ (p/(p−1))^p Σ λ_n a_n^p`, truncated at `N`.
pub fn copson_sides(s: &WeightedSeq, p: f64, tol: f64) -> Result<IneqReport> {
    check_p(p)?;
    let ratios = running_ratios(s);
    let mut lhs = CompensatedSum::default();
    let mut powers = CompensatedSum::default();
    for ((&l, &x), r) in s.lambda.iter().zip(&s.a).zip(&ratios) {
        lhs.add(l * pow(r.ratio, p));
        powers.add(l * pow(x, p));
    }
    let lhs = lhs.value();
    let rhs = (p / (p - 1.0)).powf(p) * powers.value();
    Ok(IneqReport::inequality("copson", lhs, rhs, tol_budget(tol, lhs)).with_param("p", p))
}

/// `Σ (A_n/n)^p ≤ (p/(p−1))^p Σ a_n^p`, truncated at `N`.
pub fn hardy_classical_sides(a: &[f64], p: f64, tol: f64) -> Result<IneqReport> {
    check_p(p)?;
    let s = WeightedSeq::unweighted(a.to_vec())?;
    let ratios = unweighted_ratios(s.a());
    let mut lhs = CompensatedSum::default();
    let mut powers = CompensatedSum::default();
    for (&x, r) in a.iter().zip(&ratios) {
        lhs.add(pow(r.ratio, p));
        powers.add(pow(x, p));
    }
    let lhs = lhs.value();
    let rhs = (p / (p - 1.0)).powf(p) * powers.value();
    Ok(IneqReport::inequality("hardy", lhs, rhs, tol_budget(tol, lhs)).with_param("p", p))
}

/// One link of the telescoping proof: `delta ≤ bound` (equality at `n = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaLink {
    pub delta: f64,
    pub bound: f64,
}

/// `Δ_n = λ_n r_n^p − p/(p−1) λ_n a_n r_n^(p−1)` with `r_n = A_n/Λ_n`, and
/// `bound_n = (Λ_{n−1} r_{n−1}^p − Λ_n r_n^p)/(p−1)` (for `n = 1` the
/// first term is absent and `Δ_1 = bound_1`).
pub fn delta_chain(s: &WeightedSeq, p: f64) -> Result<Vec<DeltaLink>> {
    check_p(p)?;
    let ratios = running_ratios(s);
    let factor = p / (p - 1.0);
    let mut prev_energy = 0.0;
    let links = s
        .lambda
        .iter()
        .zip(&s.a)
        .zip(&ratios)
        .map(|((&l, &x), r)| {
            let energy = r.weight_sum * pow(r.ratio, p);
            let delta = l * pow(r.ratio, p) - factor * l * x * pow(r.ratio, p - 1.0);
            let bound = (prev_energy - energy) / (p - 1.0);
            prev_energy = energy;
            DeltaLink { delta, bound }
        })
        .collect();
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(l: &[f64], a: &[f64]) -> WeightedSeq {
        WeightedSeq::new(l.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn running_ratio_examples() {
        let r = running_ratios(&seq(&[1.0, 1.0], &[1.0, 0.0]));
        assert_eq!(
            r.iter().map(|x| (x.weighted_sum, x.weight_sum, x.ratio)).collect::<Vec<_>>(),
            vec![(1.0, 1.0, 1.0), (1.0, 2.0, 0.5)]
        );
        let r = running_ratios(&seq(&[2.0, 3.0], &[5.0, 5.0]));
        assert_eq!(r.iter().map(|x| x.ratio).collect::<Vec<_>>(), vec![5.0, 5.0]);
        let r = running_ratios(&seq(&[1.0], &[7.0]));
        assert_eq!((r[0].weighted_sum, r[0].weight_sum, r[0].ratio), (7.0, 1.0, 7.0));
    }

    #[test]
    fn theorem2_examples() {
        let r = theorem2_sides(&seq(&[1.0, 1.0], &[1.0, 0.0]), 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.25, 1.5));
        assert_eq!(r.margin, 0.25);
        assert!(r.passed());
        let r = theorem2_sides(&seq(&[2.0, 3.0], &[5.0, 5.0]), 3.0, DEFAULT_TOL).unwrap();
        assert!((r.lhs - 625.0).abs() <= 1e-12 * 625.0);
        assert!((r.rhs - 625.0).abs() <= 1e-12 * 625.0);
        let r = theorem2_sides(&seq(&[4.0], &[7.0]), 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (196.0, 196.0));
    }

    #[test]
    fn p_at_most_one_is_rejected() {
        let s = seq(&[1.0], &[1.0]);
        assert!(matches!(theorem2_sides(&s, 1.0, DEFAULT_TOL), Err(LabError::Parameter(_))));
        assert!(copson_sides(&s, 0.5, DEFAULT_TOL).is_err());
        assert!(hardy_classical_sides(&[1.0], 1.0, DEFAULT_TOL).is_err());
        assert!(delta_chain(&s, f64::NAN).is_err());
    }

    #[test]
    fn copson_examples() {
        let r = copson_sides(&seq(&[1.0, 2.0], &[3.0, 1.0]), 2.0, DEFAULT_TOL).unwrap();
        assert!((r.lhs - 131.0 / 9.0).abs() < 1e-13);
        assert!((r.rhs - 44.0).abs() < 1e-13);
        let r = copson_sides(&seq(&[1.0], &[1.0]), 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 4.0));
        let r = copson_sides(&seq(&[1.0, 1.0], &[0.0, 0.0]), 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.passed());
    }

    #[test]
    fn hardy_examples() {
        let r = hardy_classical_sides(&[1.0, 1.0, 1.0], 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (3.0, 12.0));
        let r = hardy_classical_sides(&[1.0, 0.0], 2.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.25, 4.0));
        let r = hardy_classical_sides(&[0.0], 3.0, DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn delta_chain_examples() {
        let d = delta_chain(&seq(&[4.0], &[7.0]), 2.0).unwrap();
        assert_eq!(d[0].delta, -196.0);
        assert_eq!(d[0].bound, -196.0);
        let d = delta_chain(&seq(&[1.0, 1.0], &[1.0, 0.0]), 2.0).unwrap();
        assert_eq!((d[1].delta, d[1].bound), (0.25, 0.5));
        let d = delta_chain(&seq(&[2.0, 3.0], &[5.0, 5.0]), 3.0).unwrap();
        assert!((d[1].delta - d[1].bound).abs() <= 1e-12 * d[1].bound.abs());
        assert!((d[1].delta + 187.5).abs() < 1e-12);
    }

    #[test]
    fn zero_prefix_uses_zero_power_convention() {
        let r = theorem2_sides(&seq(&[1.0, 2.0, 1.0], &[0.0, 0.0, 3.0]), 1.5, DEFAULT_TOL).unwrap();
        assert!(r.lhs.is_finite() && r.passed());
    }

    #[test]
    fn csv_parsing() {
        let s = WeightedSeq::from_csv_reader("lambda,a\n1,1\n1,0\n".as_bytes()).unwrap();
        assert_eq!(s, seq(&[1.0, 1.0], &[1.0, 0.0]));
        assert!(WeightedSeq::from_csv_reader("x,y\n1,1\n".as_bytes()).is_err());
        assert!(WeightedSeq::from_csv_reader("lambda,a\n1,abc\n".as_bytes()).is_err());
        assert!(WeightedSeq::from_csv_reader("lambda,a\n0,1\n".as_bytes()).is_err());
        assert!(WeightedSeq::from_csv_reader("lambda,a\n".as_bytes()).is_err());
    }
}
