//! Fixed-order Gauss–Legendre panels with global adaptive bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Tolerances and panel controls for every numerical integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Gauss nodes per panel.
    pub panel_order: usize,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { rel_tol: 1e-10, abs_tol: 1e-14, panel_order: 16, max_panels: 4096 }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(LabError::Parameter("quadrature tolerances must be positive".into()));
        }
        if self.panel_order < 2 {
            return Err(LabError::Parameter("panel_order must be at least 2".into()));
        }
        if self.max_panels == 0 {
            return Err(LabError::Parameter("max_panels must be positive".into()));
        }
        Ok(())
    }
}

/// A value with an error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], computed by Newton's method
/// on the three-term recurrence.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                deriv = nf * (z * p1 - p2) / (z * z - 1.0);
                let step = p1 / deriv;
                z -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Returns `(∫ₐᵇ f, ∫ₐᵇ |f|)` by the fixed rule.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            sum += w * v;
            sum_abs += w * v.abs();
        }
        (sum * half, sum_abs * half)
    }
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let (left, left_abs) = rule.apply(f, a, m);
        let (right, right_abs) = rule.apply(f, m, b);
        let roundoff = 4.0 * f64::EPSILON * (left_abs + right_abs);
        let error = (whole - (left + right)).abs() + roundoff;
        Panel { a, b, left, right, error }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the union of `intervals` (each smooth for `f`).
///
/// Each panel is estimated by the rule on its two halves; the difference
/// from the whole-panel estimate is its error bound. The panel with the
/// largest bound is bisected until the summed bound meets the target.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    intervals: &[(f64, f64)],
    spec: &QuadSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let rule = GaussLegendre::new(spec.panel_order);
    let mut heap = BinaryHeap::new();
    for &(a, b) in intervals {
        if b > a {
            let (whole, _) = rule.apply(&f, a, b);
            heap.push(Panel::new(&rule, &f, a, b, whole));
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value(), e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(LabError::Accuracy { estimate: value, error });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        if heap.len() + 1 > spec.max_panels {
            return Err(LabError::Accuracy { estimate: value, error });
        }
        let worst = heap.pop().expect("non-empty while error exceeds target");
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            // Panel cannot be bisected further in floating point.
            return Err(LabError::Accuracy { estimate: value, error });
        }
        heap.push(Panel::new(&rule, &f, worst.a, m, worst.left));
        heap.push(Panel::new(&rule, &f, m, worst.b, worst.right));
    }
}
