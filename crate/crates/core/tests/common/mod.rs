#![allow(dead_code)]

use rand::Rng;
use wshift::{Rational, UnilateralWeights, WeightSequence};

const NUMERATORS: [i64; 6] = [1, 2, 3, 4, 5, 6];

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let p = NUMERATORS[rng.gen_range(0..NUMERATORS.len())];
    let d = NUMERATORS[rng.gen_range(0..NUMERATORS.len())];
    let sign = if rng.gen_bool(0.1) { -1 } else { 1 };
    q(sign * p, d)
}

fn rational_list<R: Rng>(rng: &mut R, min: usize, max: usize) -> Vec<Rational> {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| random_rational(rng)).collect()
}

pub fn random_rational_weights<R: Rng>(rng: &mut R) -> WeightSequence<Rational> {
    WeightSequence::new(
        rational_list(rng, 1, 3),
        rng.gen_range(-4..=4),
        rational_list(rng, 0, 4),
        rational_list(rng, 1, 3),
    )
    .expect("nonzero weights")
}

pub fn random_unilateral<R: Rng>(rng: &mut R) -> UnilateralWeights<Rational> {
    UnilateralWeights::new(rational_list(rng, 0, 4), rational_list(rng, 1, 3)).expect("nonzero weights")
}

pub fn to_f64(w: &WeightSequence<Rational>) -> WeightSequence<f64> {
    use wshift::Real;
    let conv = |xs: &[Rational]| xs.iter().map(Real::to_f64).collect::<Vec<f64>>();
    WeightSequence::new(conv(w.left_tail()), w.core_start(), conv(w.core()), conv(w.right_tail())).expect("nonzero")
}
