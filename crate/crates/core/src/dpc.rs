//! Binary dirty-paper coding with two superposed codes.
//!
//! The encoder knows the interference `s` and the message codeword `c1`;
//! it quantises `s - c1` to the nearest `c0` in `C0` and sends
//! `x = c0 - (s - c1)`. The channel adds `s` and BSC noise `z`, so the
//! receiver sees `y = c0 + c1 + z` and recovers the pair by joint minimum
//! Hamming distance.

use crate::codebook::{nearest_superposed_with_cap, superposed_symbols, Codebook, CodebookMode, Word, DEFAULT_PAIR_CAP};
use crate::error::{Error, Result};
use crate::infotheory::{dpc_binary_params, SymbolDistribution};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct DpcEncoded {
    pub x: Vec<u16>,
    pub c0_index: usize,
    /// Hamming weight of `x` over `n`.
    pub cost: f64,
    pub encoder_error: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpcTrialRecord {
    pub cost: f64,
    pub encoder_error: bool,
    /// Decoded message codeword differs from the sent one.
    pub message_error: bool,
    /// Either decoded codeword differs.
    pub pair_error: bool,
}

/// Every vector of one simulated channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct DpcTranscript {
    pub s: Vec<u16>,
    pub message: usize,
    pub z: Vec<u16>,
    pub encoded: DpcEncoded,
    pub y: Vec<u16>,
    pub decoded: (usize, usize),
}

impl DpcTranscript {
    pub fn record(&self) -> DpcTrialRecord {
        let (i_hat, j_hat) = self.decoded;
        let message_error = j_hat != self.message;
        DpcTrialRecord {
            cost: self.encoded.cost,
            encoder_error: self.encoded.encoder_error,
            message_error,
            pair_error: message_error || i_hat != self.encoded.c0_index,
        }
    }
}

fn xor(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn dpc_encode(s: &[u16], c1_word: &[u16], c0: &Codebook, w: f64) -> Result<DpcEncoded> {
    if s.len() != c1_word.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            actual: c1_word.len(),
        });
    }
    if s.iter().chain(c1_word).any(|&b| b > 1) {
        return Err(Error::param("s", "dirty-paper vectors must be binary"));
    }
    let target = xor(s, c1_word);
    let nearest = crate::codebook::nearest_codeword(Word::Discrete(&target), c0)?;
    let x = xor(c0.symbols(nearest.index), &target);
    let cost = x.iter().filter(|&&b| b == 1).count() as f64 / x.len() as f64;
    Ok(DpcEncoded {
        x,
        c0_index: nearest.index,
        cost,
        encoder_error: cost > w,
    })
}

/// Joint ML decoding over `C0 x C1` for a BSC with crossover `p < 1/2`.
pub fn dpc_decode(y: &[u16], c0: &Codebook, c1: &Codebook, p: f64) -> Result<(usize, usize)> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::param("p", format!("must lie in [0, 1/2), got {p}")));
    }
    let m = nearest_superposed_with_cap(Word::Discrete(y), c0, c1, DEFAULT_PAIR_CAP)?;
    Ok((m.i, m.j))
}

#[derive(Debug, Clone)]
pub struct DpcInstance {
    pub n: usize,
    pub p: f64,
    pub w: f64,
    pub q: f64,
    pub c0: Codebook,
    pub c1: Codebook,
}

impl DpcInstance {
    /// `q = None` selects `q*` with `p * q* = W`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(n: usize, p: f64, w: f64, q: Option<f64>, r0: f64, r1: f64, c0_seed: u64, c1_seed: u64) -> Result<Self> {
        let q = match q {
            Some(q) => q,
            None => dpc_binary_params(p, w)?.q_star,
        };
        let uniform = SymbolDistribution::bernoulli(0.5)?;
        let c0 = Codebook::generate(n, r0, CodebookMode::Discrete(uniform), c0_seed)?;
        let c1 = Codebook::generate(n, r1, CodebookMode::Discrete(SymbolDistribution::bernoulli(q)?), c1_seed)?;
        Self::with_codebooks(p, w, q, c0, c1)
    }

    pub fn with_codebooks(p: f64, w: f64, q: f64, c0: Codebook, c1: Codebook) -> Result<Self> {
        if !(0.0..0.5).contains(&p) {
            return Err(Error::param("p", format!("must lie in [0, 1/2), got {p}")));
        }
        if !(0.0..=0.5).contains(&w) {
            return Err(Error::param("w", format!("must lie in [0, 1/2], got {w}")));
        }
        if c0.alphabet().map(|a| a.bits()) != Some(1) || c1.alphabet().map(|a| a.bits()) != Some(1) {
            return Err(Error::ModeMismatch("dirty-paper codebooks must be binary".into()));
        }
        if c0.n() != c1.n() {
            return Err(Error::LengthMismatch {
                expected: c0.n(),
                actual: c1.n(),
            });
        }
        let pairs = c0.len() as f64 * c1.len() as f64;
        if pairs > DEFAULT_PAIR_CAP as f64 {
            return Err(Error::CapExceeded {
                what: "superposed pair count",
                requested: pairs,
                cap: DEFAULT_PAIR_CAP,
            });
        }
        Ok(Self {
            n: c0.n(),
            p,
            w,
            q,
            c0,
            c1,
        })
    }
}

/// Interference `s` uniform, message uniform over `C1`, `z ~ Bern(p)`.
pub fn simulate_dpc_transcript(inst: &DpcInstance, trial_seed: u64) -> Result<DpcTranscript> {
    let mut rs = SplitMix64::derived(trial_seed, &[1]);
    let mut rz = SplitMix64::derived(trial_seed, &[2]);
    let mut rm = SplitMix64::derived(trial_seed, &[3]);
    let s: Vec<u16> = (0..inst.n).map(|_| rs.next_bernoulli(0.5) as u16).collect();
    let z: Vec<u16> = (0..inst.n).map(|_| rz.next_bernoulli(inst.p) as u16).collect();
    let message = rm.next_below(inst.c1.len());
    let encoded = dpc_encode(&s, inst.c1.symbols(message), &inst.c0, inst.w)?;
    let y: Vec<u16> = (0..inst.n).map(|k| encoded.x[k] ^ s[k] ^ z[k]).collect();
    let (i, j, _) = superposed_symbols(&y, &inst.c0, &inst.c1);
    Ok(DpcTranscript {
        s,
        message,
        z,
        encoded,
        y,
        decoded: (i, j),
    })
}

pub fn simulate_dpc_trial(inst: &DpcInstance, trial_seed: u64) -> Result<DpcTrialRecord> {
    Ok(simulate_dpc_transcript(inst, trial_seed)?.record())
}
