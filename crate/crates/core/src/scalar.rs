//! Floating-point scalar abstraction.
//!
//! All model math is generic over [`Scalar`], so the same code runs in
//! `f32` or `f64`. Sampling primitives are part of the trait, which keeps
//! distribution bounds out of every downstream signature.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::distributions::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

/// Floating-point scalar usable for model math and path sampling.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Draw a standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw a standard (rate 1) exponential variate.
    fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw a uniform variate on the open interval (0, 1).
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw a Poisson count with the given mean (0 when `mean <= 0`).
    fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64;

    /// Conversion from `f64`; `f32` rounds to nearest.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from(x).expect("finite f64 converts to any Scalar")
    }

    /// Shorthand for converting sample counts.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("sample count fits in Scalar")
    }

    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }

    fn two() -> Self {
        Self::from_f64_lossy(2.0)
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardNormal)
            }

            fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(Exp1)
            }

            fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(Open01)
            }

            fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64 {
                if mean <= 0.0 {
                    return 0;
                }
                let dist = Poisson::new(mean).expect("positive finite Poisson mean");
                dist.sample(rng) as u64
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    // generic call sites need no sampling bounds beyond `Scalar`
    fn draws<F: Scalar>() -> (F, F, F, u64) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        (
            F::standard_normal(&mut rng),
            F::exp1(&mut rng),
            F::open01(&mut rng),
            F::poisson(&mut rng, F::from_f64_lossy(3.0)),
        )
    }

    #[test]
    fn both_widths_sample() {
        let (_, e32, u32, _) = draws::<f32>();
        let (_, e64, u64_, _) = draws::<f64>();
        assert!(e32 > 0.0 && u32 > 0.0 && u32 < 1.0);
        assert!(e64 > 0.0 && u64_ > 0.0 && u64_ < 1.0);
        assert_eq!(
            f64::poisson(&mut rand_chacha::ChaCha8Rng::seed_from_u64(1), -1.0),
            0
        );
    }

    #[test]
    fn poisson_mean_sane() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let mean = 0.4f64;
        let total: u64 = (0..n).map(|_| f64::poisson(&mut rng, mean)).sum();
        let avg = total as f64 / n as f64;
        assert!((avg - mean).abs() < 0.02, "poisson mean {avg}");
    }
}
