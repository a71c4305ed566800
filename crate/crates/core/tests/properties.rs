use hardy_lab::discrete::{theorem2_sides, WeightedSeq};
use hardy_lab::rearrange::rearrange_nonincreasing;
use hardy_lab::rhi::{c_prime, phi_y};
use hardy_lab::sharpness::lq_closed;
use hardy_lab::{make_step, PowerPiece, StepWeight, Weight};
use proptest::prelude::*;

/// Interior breakpoints from positive lengths.
fn cuts(lengths: &[f64]) -> Vec<f64> {
    let total: f64 = lengths.iter().sum();
    let mut acc = 0.0;
    let mut out = Vec::new();
    for len in &lengths[..lengths.len() - 1] {
        acc += len;
        out.push(acc / total);
    }
    out
}

fn step_weight() -> impl Strategy<Value = StepWeight> {
    prop::collection::vec((0.01f64..10.0, 0.05f64..1.0), 1..8).prop_map(|parts| {
        let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let lengths: Vec<f64> = parts.iter().map(|p| p.1).collect();
        make_step(&values, &cuts(&lengths)).unwrap()
    })
}

fn power_weight() -> impl Strategy<Value = Weight> {
    prop::collection::vec((0.1f64..5.0, 0.0f64..1.5, 0.05f64..1.0), 1..5).prop_map(|parts| {
        let lengths: Vec<f64> = parts.iter().map(|p| p.2).collect();
        let mut edges = vec![0.0];
        edges.extend(cuts(&lengths));
        edges.push(1.0);
        let pieces = parts
            .iter()
            .enumerate()
            .map(|(i, &(coeff, exp, _))| {
                let exp = if i == 0 { exp / 3.0 } else { exp };
                PowerPiece::new(edges[i], edges[i + 1], coeff, exp).unwrap()
            })
            .collect();
        Weight::new(pieces).unwrap()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prefix_integral_scales_as_a_power(w in power_weight(), k in 0.01f64..100.0, t in 0.001f64..=1.0, r in 0.5f64..1.9) {
        let base = w.prefix_integral(t, r).unwrap();
        let scaled = w.scaled(k).unwrap().prefix_integral(t, r).unwrap();
        prop_assert!(rel(scaled, k.powf(r) * base) <= 1e-12);
    }

    #[test]
    fn prefix_integral_grows_with_t(w in power_weight(), t in 0.001f64..=1.0, s in 0.0f64..=1.0, r in 0.5f64..1.9) {
        let t2 = t + (1.0 - t) * s;
        prop_assert!(w.prefix_integral(t2, 1.0).unwrap() >= w.prefix_integral(t, 1.0).unwrap());
        prop_assert!(w.prefix_integral(t2, r).unwrap() >= w.prefix_integral(t, r).unwrap());
    }

    #[test]
    fn weights_round_trip_through_json(w in power_weight()) {
        prop_assert_eq!(Weight::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn rearrangement_is_idempotent(w in step_weight()) {
        let star = rearrange_nonincreasing(&w);
        prop_assert!(star.as_weight().is_nonincreasing());
        prop_assert_eq!(rearrange_nonincreasing(&star), star);
    }

    #[test]
    fn rearrangement_preserves_every_power_integral(w in step_weight(), r in 0.5f64..4.0) {
        let star = rearrange_nonincreasing(&w);
        let before = w.as_weight().interval_integral(0.0, 1.0, r).unwrap();
        let after = star.as_weight().interval_integral(0.0, 1.0, r).unwrap();
        prop_assert!(rel(before, after) <= 1e-12);
    }

    #[test]
    fn weighted_discrete_inequality_holds(
        terms in prop::collection::vec((0.001f64..=10.0, 0.0f64..=10.0), 1..64),
        p in 1.05f64..8.0,
    ) {
        let (lambda, a): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
        let report = theorem2_sides(&WeightedSeq::new(lambda, a).unwrap(), p, 1e-9).unwrap();
        prop_assert!(report.passed(), "margin {} budget {}", report.margin, report.budget);
    }

    #[test]
    fn elementary_inequality(x in 0.0f64..100.0, y in 0.0f64..100.0, p in 1.0001f64..10.0) {
        let lhs = p * x.powf(p - 1.0) * y;
        let rhs = (p - 1.0) * x.powf(p) + y.powf(p);
        prop_assert!(lhs <= rhs + 1e-9 * lhs.max(rhs).max(1.0));
    }

    #[test]
    fn phi_is_non_increasing_beyond_y(
        y in 0.01f64..100.0, dx in 0.0f64..100.0, dz in 0.0f64..100.0,
        q in 1.01f64..5.0, extra in 0.01f64..5.0,
    ) {
        let p = q + extra;
        let (x, z) = (y + dx, y + dx + dz);
        let scale = phi_y(z, y, p, q).abs().max(z.powf(p / q)).max(1.0);
        prop_assert!(phi_y(x, y, p, q) >= phi_y(z, y, p, q) - 1e-9 * scale);
    }

    #[test]
    fn improved_constant_is_unchanged_at_q(q in 1.0001f64..10.0, c in 1.0f64..100.0) {
        prop_assert_eq!(c_prime(q, q, c).unwrap(), c);
    }

    #[test]
    fn lq_matches_the_direct_formula_away_from_the_limit(p in 1.5f64..6.0, q in 1.0f64..1.5, s in 0.05f64..0.9, f in 0.5f64..2.0) {
        let a = s / p;
        let direct = f.powf(p) * (1.0 - ((1.0 - a) * p / (p - 1.0)).powf(q)) / (1.0 - a * p);
        prop_assert!(rel(lq_closed(a, p, q, f).unwrap(), direct) <= 1e-10);
    }
}
