//! Superposition coding for lossy source coding with decoder side
//! information, and for its channel-coding dual with encoder-side
//! interference.
//!
//! * [`infotheory`]: entropies, rate regions, rate-distortion functions.
//! * [`codebook`]: seeded random codebooks and exhaustive searches.
//! * [`wz`]: the two-code Wyner-Ziv encoder/decoder, discrete and Gaussian.
//! * [`dpc`]: the binary dirty-paper superposition scheme.
//! * [`trellis`]: convolutional codes, Viterbi search and the practical
//!   successive-quantisation pipeline.
//! * [`simlab`]: experiment specs, Monte Carlo sweeps, exact small-instance
//!   probabilities and CSV output.

pub mod codebook;
pub mod dpc;
pub mod wz;
pub mod error;
pub mod format;
pub mod infotheory;
pub mod rng;
pub mod simlab;
pub mod trellis;

pub use error::{Error, Result};
