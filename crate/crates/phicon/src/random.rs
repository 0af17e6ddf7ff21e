//! Seeded random draws for property sweeps.
//!
//! Everything is driven by a [`ChaCha8Rng`] so a seed reproduces a sweep
//! exactly on every platform.

use exact_algebra::{Matrix, QPoly, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::GaugeTransform;
use crate::normal_forms::{ExceptionalCoord, NormalForm, NormalFormRank3};
use crate::poles::{PoleConfig, SpectralData, P1};

/// Default bound on numerators and denominators.
pub const DEFAULT_BOUND: i64 = 100;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a / b` with `|a| ≤ bound` and `1 ≤ b ≤ bound`.
pub fn random_scalar(rng: &mut (impl Rng + ?Sized), bound: i64) -> Scalar {
    Scalar::new(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_nonzero_scalar(rng: &mut (impl Rng + ?Sized), bound: i64) -> Scalar {
    loop {
        let x = random_scalar(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Exponents with row sums `(0, 0, 2)`.
pub fn random_spec(rng: &mut (impl Rng + ?Sized), bound: i64) -> SpectralData {
    let sums = [0, 0, 2];
    let rows: [[Scalar; 3]; 3] = std::array::from_fn(|i| {
        let a = random_scalar(rng, bound);
        let b = random_scalar(rng, bound);
        let c = Scalar::from_int(sums[i]) - &a - &b;
        [a, b, c]
    });
    SpectralData::from_rows(rows).expect("row sums satisfy the Fuchs relation")
}

/// Three distinct finite poles.
pub fn random_poles(rng: &mut (impl Rng + ?Sized), bound: i64) -> PoleConfig {
    loop {
        let t: [Scalar; 3] = std::array::from_fn(|_| random_scalar(rng, bound));
        if let Ok(p) = PoleConfig::finite(t[0].clone(), t[1].clone(), t[2].clone()) {
            return p;
        }
    }
}

/// A point of the line that is not a pole.
pub fn random_non_pole(rng: &mut (impl Rng + ?Sized), poles: &PoleConfig, bound: i64) -> P1 {
    loop {
        let x = if rng.gen_ratio(1, 10) { P1::Infinity } else { P1::Finite(random_scalar(rng, bound)) };
        if poles.index_of(&x).is_none() {
            return x;
        }
    }
}

/// A random automorphism of `O ⊕ O(−1) ⊕ O(−1)`.
pub fn random_automorphism(rng: &mut (impl Rng + ?Sized), bound: i64) -> Matrix<QPoly> {
    loop {
        let b: [[Scalar; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| random_scalar(rng, bound)));
        if (&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]).is_zero() {
            continue;
        }
        let k = |x: &Scalar| QPoly::constant(x.clone());
        let s = random_nonzero_scalar(rng, bound);
        let c: Vec<QPoly> =
            (0..2).map(|_| QPoly::new(vec![random_scalar(rng, bound), random_scalar(rng, bound)])).collect();
        return Matrix::from_rows(vec![
            vec![k(&s), c[0].clone(), c[1].clone()],
            vec![QPoly::zero(), k(&b[0][0]), k(&b[0][1])],
            vec![QPoly::zero(), k(&b[1][0]), k(&b[1][1])],
        ]);
    }
}

pub fn random_gauge(rng: &mut (impl Rng + ?Sized), bound: i64) -> GaugeTransform {
    GaugeTransform::new(random_automorphism(rng, bound), random_automorphism(rng, bound))
        .expect("random automorphisms have the required shape")
}

/// A rank-three normal form with `q` away from the poles.
pub fn random_rank3(rng: &mut (impl Rng + ?Sized), poles: &PoleConfig, bound: i64) -> NormalForm {
    let q = random_non_pole(rng, poles, bound);
    let p = random_scalar(rng, bound);
    NormalForm::Rank3(NormalFormRank3 { q, p, a12: QPoly::zero(), a13: QPoly::zero(), a13_free: None })
}

/// A point on a random exceptional curve.
pub fn random_exceptional(rng: &mut (impl Rng + ?Sized), bound: i64) -> ExceptionalCoord {
    let (mu, eta) = if rng.gen_ratio(1, 5) {
        (Scalar::zero(), Scalar::one())
    } else {
        (Scalar::one(), random_scalar(rng, bound))
    };
    ExceptionalCoord::new(rng.gen_range(0..3), rng.gen_range(0..3), mu, eta).expect("nonzero ratio")
}

/// Completes two free exponents per pole to row sums `(0, 0, 2)`.
pub fn spec_from_pairs(pairs: [[Scalar; 2]; 3]) -> SpectralData {
    let sums = [0, 0, 2];
    let rows: [[Scalar; 3]; 3] = std::array::from_fn(|i| {
        let [a, b] = pairs[i].clone();
        let c = Scalar::from_int(sums[i]) - &a - &b;
        [a, b, c]
    });
    SpectralData::from_rows(rows).expect("row sums satisfy the Fuchs relation")
}

/// Exponents with `ν_{0,0} + ν_{1,0} + ν_{2,0} = 1`.
pub fn random_collinear_spec(rng: &mut (impl Rng + ?Sized), bound: i64) -> SpectralData {
    let mut pairs: [[Scalar; 2]; 3] = std::array::from_fn(|_| [random_scalar(rng, bound), random_scalar(rng, bound)]);
    pairs[2][0] = Scalar::one() - &pairs[0][0] - &pairs[1][0];
    spec_from_pairs(pairs)
}

/// Exponents with `ν_{0,0} + ν_{0,1} + ν_{1,0} + ν_{1,1} + ν_{2,0} + ν_{2,1} = 2`.
pub fn random_conic_spec(rng: &mut (impl Rng + ?Sized), bound: i64) -> SpectralData {
    let mut pairs: [[Scalar; 2]; 3] = std::array::from_fn(|_| [random_scalar(rng, bound), random_scalar(rng, bound)]);
    let rest = pairs.iter().flatten().take(5).fold(Scalar::zero(), |acc, x| acc + x);
    pairs[2][1] = Scalar::from_int(2) - rest;
    spec_from_pairs(pairs)
}
