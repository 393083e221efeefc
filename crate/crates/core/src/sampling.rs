//! Reproducible random inputs.
//!
//! Each trial gets its own ChaCha stream whose seed mixes the master seed with
//! the trial counter, so trials can be generated in any order (or in
//! parallel) and still reproduce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matkit::{Matrix, Vector};
use crate::scalar::Scalar;

pub type TrialRng = ChaCha8Rng;

/// Upper bound on redraws when a sampled input falls outside a map's domain.
pub const MAX_DRAWS: usize = 64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mixed = splitmix64(master_seed ^ splitmix64(trial.wrapping_add(1)));
    ChaCha8Rng::seed_from_u64(mixed)
}

fn nonzero_small(rng: &mut impl Rng) -> i64 {
    let v = rng.random_range(1..=18i64);
    if v <= 9 {
        v - 10
    } else {
        v - 9
    }
}

/// `a/b` with `a, b` uniform in `[-9, 9] \ {0}`.
pub fn small_rational<T: Scalar>(rng: &mut impl Rng) -> T {
    T::from_ratio(nonzero_small(rng), nonzero_small(rng))
}

/// Like [`small_rational`] but also allows zero numerators (about 1 in 19).
pub fn small_rational_or_zero<T: Scalar>(rng: &mut impl Rng) -> T {
    let num = rng.random_range(-9..=9i64);
    T::from_ratio(num, nonzero_small(rng))
}

/// `a/b` with `a` uniform in `[-num, num]` and `b` in `[1, den]`.
pub fn bounded_rational<T: Scalar>(rng: &mut impl Rng, num: i64, den: i64) -> T {
    T::from_ratio(rng.random_range(-num..=num), rng.random_range(1..=den))
}

pub fn small_vector<T: Scalar>(rng: &mut impl Rng, dim: usize) -> Vector<T> {
    Vector((0..dim).map(|_| small_rational_or_zero(rng)).collect())
}

pub fn small_matrix<T: Scalar>(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| small_rational_or_zero(rng))
}

/// `count` parameters, pairwise distinct up to sign (`lambda_i != +-lambda_j`)
/// and nonzero, as the soliton maps require.
pub fn distinct_params<T: Scalar>(rng: &mut impl Rng, count: usize) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(count);
    while out.len() < count {
        let c: T = small_rational(rng);
        if out.iter().all(|x| *x != c && *x != -c.clone()) {
            out.push(c);
        }
    }
    out
}

/// `count` distinct spectral sample points `0, 1, -1, 2, -2, ...`.
pub fn spectral_samples<T: Scalar>(count: usize) -> Vec<T> {
    (0..count as i64)
        .map(|k| {
            let m = (k + 1) / 2;
            T::from_i64(if k % 2 == 1 { m } else { -m })
        })
        .collect()
}

/// Uniform float in `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational as Q;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let x: u64 = trial_rng(7, 3).random();
        let y: u64 = trial_rng(7, 4).random();
        let z: u64 = trial_rng(8, 3).random();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn small_rationals_stay_in_range() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..500 {
            let q: Q = small_rational(&mut rng);
            assert!(!q.is_zero());
            let num = q.numerator();
            assert!(*num <= crate::Integer::from(9) && *num >= crate::Integer::from(-9));
            assert!(*q.denominator() <= dashu_int::UBig::from(9u8));
        }
    }

    #[test]
    fn spectral_samples_are_distinct() {
        let z: Vec<Q> = spectral_samples(5);
        let expected: Vec<Q> = [0, 1, -1, 2, -2].iter().map(|&k| Q::from_i64(k)).collect();
        assert_eq!(z, expected);
    }

    #[test]
    fn params_distinct_up_to_sign() {
        let mut rng = trial_rng(2, 0);
        let p: Vec<Q> = distinct_params(&mut rng, 6);
        for i in 0..6 {
            for j in 0..i {
                assert_ne!(p[i], p[j]);
                assert_ne!(p[i], -p[j].clone());
            }
        }
    }
}
