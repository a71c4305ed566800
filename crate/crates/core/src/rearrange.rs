//! Non-increasing rearrangement of step weights, and empirical checks that
//! rearranging never raises the all-intervals reverse Hölder constant and
//! that for non-increasing weights prefixes and suffixes already determine it.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::report::{real, Status};
use crate::rhi::{rhi_constant, Family};
use crate::weight::{PowerPiece, StepWeight, Weight};

/// The non-increasing rearrangement: values sorted decreasingly, each
/// carrying its length, with equal neighbours merged. Non-increasing input
/// is returned unchanged.
pub fn rearrange_nonincreasing(w: &StepWeight) -> StepWeight {
    if w.as_weight().is_nonincreasing() {
        return w.clone();
    }
    let mut parts: Vec<(f64, f64)> = w.values().into_iter().zip(w.lengths()).collect();
    parts.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
    for (value, len) in parts {
        match merged.last_mut() {
            Some(last) if last.0 == value => last.1 += len,
            _ => merged.push((value, len)),
        }
    }
    let mut pieces = Vec::with_capacity(merged.len());
    let mut lo = 0.0;
    for (i, &(value, len)) in merged.iter().enumerate() {
        let hi = if i + 1 == merged.len() { 1.0 } else { lo + len };
        pieces.push(PowerPiece { lo, hi, coeff: value, exp: 0.0 });
        lo = hi;
    }
    let weight = Weight::new(pieces).expect("sorted lengths of a valid step weight tile (0,1]");
    StepWeight::try_from(weight).expect("constant pieces")
}

/// Distribution data `(value, total length)` sorted by decreasing value; two
/// weights are equimeasurable iff these agree.
pub fn distribution(w: &StepWeight) -> Vec<(f64, f64)> {
    let mut parts: Vec<(f64, f64)> = w.values().into_iter().zip(w.lengths()).collect();
    parts.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (value, len) in parts {
        match merged.last_mut() {
            Some(last) if last.0 == value => last.1 += len,
            _ => merged.push((value, len)),
        }
    }
    merged
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangeReport {
    #[serde(with = "real")]
    pub c_before: f64,
    #[serde(with = "real")]
    pub c_after: f64,
    pub family: Family,
    pub q: f64,
    pub resolution: f64,
    pub tolerance: f64,
    pub status: Status,
}

/// Reverse Hölder constants over all intervals before and after
/// rearrangement; passes iff `c_after ≤ c_before + tolerance`.
pub fn theorem_c_check(w: &StepWeight, q: f64, grid: usize) -> Result<RearrangeReport> {
    let star = rearrange_nonincreasing(w);
    let before = rhi_constant(w.as_weight(), q, Family::All, grid)?;
    let after = rhi_constant(star.as_weight(), q, Family::All, grid)?;
    let tolerance = before.tolerance.max(after.tolerance);
    let status = if after.value <= before.value + tolerance {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(RearrangeReport {
        c_before: before.value,
        c_after: after.value,
        family: Family::All,
        q,
        resolution: before.resolution.max(after.resolution),
        tolerance,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub c_all: f64,
    pub c_prefix: f64,
    pub c_suffix: f64,
    pub q: f64,
    pub tolerance: f64,
    pub status: Status,
}

/// For non-increasing steps: `|c_all − max(c_prefix, c_suffix)| ≤ tolerance`.
pub fn theorem_d_check(w: &StepWeight, q: f64, grid: usize) -> Result<ReductionReport> {
    if !w.as_weight().is_nonincreasing() {
        return Err(LabError::Precondition("prefix/suffix reduction needs a non-increasing weight".into()));
    }
    let all = rhi_constant(w.as_weight(), q, Family::All, grid)?;
    let prefix = rhi_constant(w.as_weight(), q, Family::Prefix, grid)?;
    let suffix = rhi_constant(w.as_weight(), q, Family::Suffix, grid)?;
    let tolerance = all.tolerance.max(prefix.tolerance).max(suffix.tolerance);
    let gap = (all.value - prefix.value.max(suffix.value)).abs();
    Ok(ReductionReport {
        c_all: all.value,
        c_prefix: prefix.value,
        c_suffix: suffix.value,
        q,
        tolerance,
        status: if gap <= tolerance { Status::Pass } else { Status::Fail },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::make_step;

    fn step(values: &[f64], bps: &[f64]) -> StepWeight {
        make_step(values, bps).unwrap()
    }

    #[test]
    fn sorts_thirds() {
        let w = step(&[1.0, 3.0, 2.0], &[1.0 / 3.0, 2.0 / 3.0]);
        let star = rearrange_nonincreasing(&w);
        assert_eq!(star.values(), vec![3.0, 2.0, 1.0]);
        for (len, want) in star.lengths().iter().zip([1.0 / 3.0; 3]) {
            assert!((len - want).abs() < 1e-15);
        }
    }

    #[test]
    fn monotone_input_is_unchanged() {
        let w = step(&[5.0, 2.0, 2.0, 1.0], &[0.1, 0.4, 0.7]);
        assert_eq!(rearrange_nonincreasing(&w), w);
    }

    #[test]
    fn mass_is_preserved() {
        let w = step(&[0.0, 5.0], &[0.5]);
        let star = rearrange_nonincreasing(&w);
        assert_eq!(star.values(), vec![5.0, 0.0]);
        assert_eq!(star.as_weight().total_mass(), 2.5);
        assert_eq!(w.as_weight().total_mass(), 2.5);
    }

    #[test]
    fn equal_values_merge() {
        let w = step(&[1.0, 4.0, 1.0, 4.0], &[0.25, 0.5, 0.75]);
        let star = rearrange_nonincreasing(&w);
        assert_eq!(star.values(), vec![4.0, 1.0]);
        assert_eq!(distribution(&star), distribution(&w));
    }

    #[test]
    fn theorem_c_examples() {
        let mono = step(&[3.0, 2.0, 1.0], &[0.2, 0.6]);
        let r = theorem_c_check(&mono, 2.0, 64).unwrap();
        assert_eq!(r.c_before, r.c_after);
        let flat = step(&[2.0], &[]);
        let r = theorem_c_check(&flat, 2.0, 64).unwrap();
        assert!((r.c_before - 1.0).abs() < 1e-12 && (r.c_after - 1.0).abs() < 1e-12);
        let thirds = step(&[1.0, 3.0, 2.0], &[1.0 / 3.0, 2.0 / 3.0]);
        let r = theorem_c_check(&thirds, 2.0, 64).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }

    #[test]
    fn theorem_d_examples() {
        let r = theorem_d_check(&step(&[1.0], &[]), 2.0, 64).unwrap();
        assert!((r.c_all - 1.0).abs() < 1e-12 && (r.c_prefix - 1.0).abs() < 1e-12);
        let r = theorem_d_check(&step(&[2.0, 1.0], &[0.5]), 2.0, 64).unwrap();
        assert!((r.c_prefix - 10.0 / 9.0).abs() < 1e-12);
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(theorem_d_check(&step(&[1.0, 2.0], &[0.5]), 2.0, 64).is_err());
    }
}
