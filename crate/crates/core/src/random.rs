//! Seeded generation of random frames for checks and benchmarks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::frame::{parseval_normalize, Frame};

/// Default seed for every randomized check.
pub const DEFAULT_SEED: u64 = 0x5EED_F4A3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A frame of `k` vectors in Rⁿ with independent standard normal entries.
pub fn gaussian_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Frame> {
    let m = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    Frame::from_matrix(m)
}

/// A random Parseval frame: a Gaussian frame mapped through
/// [`parseval_normalize`]. Redraws on the (measure-zero) rank-deficient case.
pub fn random_parseval_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Frame> {
    if k < n {
        return Err(crate::Error::BadShape(format!("no Parseval frame of {k} vectors in R^{n}")));
    }
    loop {
        let f = gaussian_frame(rng, n, k)?;
        match parseval_normalize(&f, 1e-6) {
            Ok(p) => return Ok(p),
            Err(crate::Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}
