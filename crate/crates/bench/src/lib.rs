//! Fixtures shared by the benchmarks.

use mpf_core::atlas::{sample_band, FrameField, ParamGrid};
use mpf_core::random::{random_parseval_frame, rng};
use mpf_core::Frame;

pub const SEED: u64 = 42;

/// `count` random Parseval frames of `k` vectors in Rⁿ.
pub fn parseval_frames(n: usize, k: usize, count: usize) -> Vec<Frame> {
    let mut r = rng(SEED);
    (0..count).map(|_| random_parseval_frame(&mut r, n, k).expect("k >= n")).collect()
}

/// Band frame along the full v-loop at fixed u.
pub fn band_loop(samples: usize) -> FrameField {
    sample_band("mobius", &ParamGrid::segment([0.5, 0.0], [0.5, 1.0], samples)).expect("in domain")
}
