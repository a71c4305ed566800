//! Seeded random inputs for the property suites.
//!
//! Every case draws from its own ChaCha stream derived from a master seed
//! and the case index, so suites can run in parallel and still reproduce
//! byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::WeightedSeq;
use crate::weight::{make_step, PowerPiece, StepWeight, Weight};

pub const DEFAULT_SEED: u64 = 20240117;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for case `case` of the suite keyed by `stream`.
pub fn case_rng(master: u64, stream: u64, case: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(master ^ splitmix(stream.wrapping_mul(0x1000_0001) ^ case)))
}

/// Uniform on `(0, hi]`.
pub fn open_closed<R: Rng>(rng: &mut R, hi: f64) -> f64 {
    hi * (1.0 - rng.gen::<f64>())
}

pub fn weighted_seq<R: Rng>(rng: &mut R, max_len: usize) -> WeightedSeq {
    let n = rng.gen_range(1..=max_len);
    let lambda = (0..n).map(|_| open_closed(rng, 10.0)).collect();
    let a = (0..n).map(|_| rng.gen_range(0.0..=10.0)).collect();
    WeightedSeq::new(lambda, a).expect("generated terms are valid")
}

/// `n − 1` sorted breakpoints in (0,1) at least `1e−3` apart.
pub fn breakpoints<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut bps: Vec<f64> = (1..n).map(|_| rng.gen_range(0.001..0.999)).collect();
        bps.sort_by(f64::total_cmp);
        let spaced = bps.windows(2).all(|w| w[1] - w[0] >= 1e-3);
        if spaced {
            return bps;
        }
    }
}

fn edges(bps: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0];
    e.extend_from_slice(bps);
    e.push(1.0);
    e
}

/// A non-increasing power weight with up to `max_pieces` pieces and leading
/// exponent in `[0, lead_exp_max]`.
pub fn nonincreasing_weight<R: Rng>(rng: &mut R, max_pieces: usize, lead_exp_max: f64) -> Weight {
    let n = rng.gen_range(1..=max_pieces);
    let e = edges(&breakpoints(rng, n));
    let mut pieces = Vec::with_capacity(n);
    let mut coeff = rng.gen_range(0.5..5.0);
    let mut exp = rng.gen_range(0.0..=lead_exp_max);
    pieces.push(PowerPiece { lo: 0.0, hi: e[1], coeff, exp });
    for i in 1..n {
        let junction = e[i];
        let left_value = coeff * junction.powf(-exp);
        let next_exp = rng.gen_range(0.0..2.0);
        let drop = rng.gen_range(0.2..1.0);
        let mut next_coeff = left_value * drop * junction.powf(next_exp);
        while next_coeff * junction.powf(-next_exp) > left_value {
            next_coeff *= 1.0 - 1e-12;
        }
        coeff = next_coeff;
        exp = next_exp;
        pieces.push(PowerPiece { lo: junction, hi: e[i + 1], coeff, exp });
    }
    let w = Weight::new(pieces).expect("generated pieces tile (0,1]");
    debug_assert!(w.is_nonincreasing());
    w
}

/// A power weight with no monotonicity constraint.
pub fn any_weight<R: Rng>(rng: &mut R, max_pieces: usize, lead_exp_max: f64) -> Weight {
    let n = rng.gen_range(1..=max_pieces);
    let e = edges(&breakpoints(rng, n));
    let pieces = (0..n)
        .map(|i| {
            let exp = if i == 0 { rng.gen_range(0.0..=lead_exp_max) } else { rng.gen_range(0.0..2.0) };
            PowerPiece { lo: e[i], hi: e[i + 1], coeff: rng.gen_range(0.1..5.0), exp }
        })
        .collect();
    Weight::new(pieces).expect("generated pieces tile (0,1]")
}

/// A step weight with up to `max_pieces` values in `(0, 10]`.
pub fn step_weight<R: Rng>(rng: &mut R, max_pieces: usize) -> StepWeight {
    let n = rng.gen_range(1..=max_pieces);
    let bps = breakpoints(rng, n);
    let values: Vec<f64> = (0..n).map(|_| open_closed(rng, 10.0)).collect();
    make_step(&values, &bps).expect("generated steps are valid")
}

pub fn nonincreasing_step<R: Rng>(rng: &mut R, max_pieces: usize) -> StepWeight {
    let n = rng.gen_range(1..=max_pieces);
    let bps = breakpoints(rng, n);
    let mut values: Vec<f64> = (0..n).map(|_| open_closed(rng, 10.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    make_step(&values, &bps).expect("generated steps are valid")
}
