//! Two-code superposition encoder and decoder for source coding with side
//! information at the decoder.
//!
//! The encoder quantises `x` to the closest superposed word `c0_i + c1_j`
//! and transmits only `c1_j`. The decoder forms `v = y - c1_j`, decodes `v`
//! as a noisy `C0` codeword and reconstructs `x_hat = y + (c0_hat - v)`,
//! which equals `c0_hat + c1_j`. The Gaussian variant quantises
//! `beta x + u` with a shared dither `u ~ N(0, D)` and reconstructs
//! `x_hat = y + beta (c0_hat - v)` with `v = beta y + u - c1_j`.

use crate::codebook::{
    codebook_size, nearest_reals, nearest_superposed_with_cap, squared_euclidean, superposed_symbols,
    Codebook, CodebookMode, Word, DEFAULT_CODEBOOK_CAP, DEFAULT_PAIR_CAP,
};
use crate::codebook::draw_symbol;
use crate::error::{Error, Result};
use crate::infotheory::{convolve, d_distribution, GaussianWzParams, GroupAlphabet, SymbolDistribution};
use crate::rng::SplitMix64;

/// Default relative slack on the Gaussian encoder-error threshold `D (1 + slack)`.
pub const DEFAULT_GAUSSIAN_SLACK: f64 = 0.25;

/// Outcome of one simulated source block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub encoder_error: bool,
    /// Decoded `C0` index differs from the encoder's.
    pub decoder_error: bool,
    /// Per-symbol distortion between `x` and the encoder's quantisation point.
    pub distortion: f64,
    /// Per-symbol distortion between `x` and the reconstruction.
    pub end_distortion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WzEncodeResult {
    pub i: usize,
    pub j: usize,
    /// Hamming fraction (discrete) or mean squared residual (Gaussian).
    pub distortion: f64,
    pub encoder_error: bool,
}

/// Decoder output before it is scored against the source.
#[derive(Debug, Clone, PartialEq)]
pub struct WzDecoded<T> {
    pub i_hat: usize,
    pub x_hat: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WzDecodeResult<T> {
    pub i_hat: usize,
    pub x_hat: Vec<T>,
    pub decoder_error: bool,
    pub end_distortion: f64,
}

impl WzDecoded<u16> {
    /// Scores the reconstruction. `encoder_i` is used only for the
    /// instrumentation flag; the decoder never sees it.
    pub fn evaluate(self, x: &[u16], encoder_i: usize) -> WzDecodeResult<u16> {
        let errs = x.iter().zip(&self.x_hat).filter(|(a, b)| a != b).count();
        WzDecodeResult {
            decoder_error: self.i_hat != encoder_i,
            end_distortion: errs as f64 / x.len() as f64,
            i_hat: self.i_hat,
            x_hat: self.x_hat,
        }
    }
}

impl WzDecoded<f64> {
    pub fn evaluate(self, x: &[f64], encoder_i: usize) -> WzDecodeResult<f64> {
        WzDecodeResult {
            decoder_error: self.i_hat != encoder_i,
            end_distortion: squared_euclidean(x, &self.x_hat) / x.len() as f64,
            i_hat: self.i_hat,
            x_hat: self.x_hat,
        }
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

pub fn wz_encode(x: &[u16], c0: &Codebook, c1: &Codebook, target: f64) -> Result<WzEncodeResult> {
    let m = nearest_superposed_with_cap(Word::Discrete(x), c0, c1, DEFAULT_PAIR_CAP)?;
    Ok(WzEncodeResult {
        i: m.i,
        j: m.j,
        distortion: m.distortion,
        encoder_error: m.distortion > target,
    })
}

/// Maximum-likelihood decoder for a `C0` codeword observed through additive
/// noise with a known law.
#[derive(Debug, Clone)]
pub struct WzDecoder {
    metric: Metric,
}

#[derive(Debug, Clone)]
enum Metric {
    /// Binary noise with `P(0) > P(1)`: ML is minimum Hamming distance.
    Hamming,
    /// `-ln P(g)` per noise symbol; zero-probability symbols cost infinity.
    Table(Vec<f64>),
}

impl WzDecoder {
    pub fn new(noise: &SymbolDistribution) -> Self {
        let probs = noise.probs();
        let metric = if probs.len() == 2 && probs[0] > probs[1] {
            Metric::Hamming
        } else {
            Metric::Table(probs.iter().map(|&p| if p > 0.0 { -p.ln() } else { f64::INFINITY }).collect())
        };
        Self { metric }
    }

    /// Decoder for the asymptotic noise `d * reflect(p)` seen by `y - c1`.
    pub fn for_correlation(p: &SymbolDistribution, distortion: f64) -> Result<Self> {
        Ok(Self::new(&decoder_noise(p, distortion)?))
    }

    /// ML index for `v = c0 + noise`, lowest index on ties.
    pub fn decode_index(&self, v: &[u16], c0: &Codebook) -> Result<usize> {
        let alphabet = c0
            .alphabet()
            .ok_or_else(|| Error::ModeMismatch("C0 must be discrete".into()))?;
        check_len(c0.n(), v.len())?;
        match &self.metric {
            Metric::Hamming => Ok(crate::codebook::nearest_symbols(v, c0).0),
            Metric::Table(cost) => {
                if cost.len() != alphabet.order() {
                    return Err(Error::AlphabetMismatch {
                        left: cost.len(),
                        right: alphabet.order(),
                    });
                }
                let mut counts = vec![0u32; cost.len()];
                let mut best = (0, f64::INFINITY);
                for i in 0..c0.len() {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for (&vk, &ck) in v.iter().zip(c0.symbols(i)) {
                        counts[alphabet.sub(vk, ck) as usize] += 1;
                    }
                    let total: f64 = counts
                        .iter()
                        .zip(cost)
                        .filter(|(&c, _)| c > 0)
                        .map(|(&c, &w)| c as f64 * w)
                        .sum();
                    if total < best.1 {
                        best = (i, total);
                    }
                }
                Ok(best.0)
            }
        }
    }

    pub fn decode(&self, y: &[u16], c1_word: &[u16], c0: &Codebook) -> Result<WzDecoded<u16>> {
        let alphabet = c0
            .alphabet()
            .ok_or_else(|| Error::ModeMismatch("C0 must be discrete".into()))?;
        check_len(c0.n(), y.len())?;
        check_len(c0.n(), c1_word.len())?;
        let v = alphabet.sub_words(y, c1_word);
        let i_hat = self.decode_index(&v, c0)?;
        let x_hat = y
            .iter()
            .zip(c0.symbols(i_hat).iter().zip(&v))
            .map(|(&yk, (&ck, &vk))| alphabet.add(yk, alphabet.sub(ck, vk)))
            .collect();
        Ok(WzDecoded { i_hat, x_hat })
    }
}

/// Law of `e - z` for quantisation error `e ~ d(D)` and correlation noise
/// `z ~ p`: `d * reflect(p)`, which is `p * d` for symmetric `p`.
pub fn decoder_noise(p: &SymbolDistribution, distortion: f64) -> Result<SymbolDistribution> {
    let d = d_distribution(p.alphabet(), distortion)?;
    convolve(&d, &p.reflect())
}

pub fn wz_decode(
    y: &[u16],
    c1_word: &[u16],
    c0: &Codebook,
    noise_model: &SymbolDistribution,
) -> Result<WzDecoded<u16>> {
    WzDecoder::new(noise_model).decode(y, c1_word, c0)
}

pub fn gaussian_wz_encode(
    x: &[f64],
    u: &[f64],
    beta: f64,
    c0: &Codebook,
    c1: &Codebook,
    distortion: f64,
    slack: f64,
) -> Result<WzEncodeResult> {
    check_len(x.len(), u.len())?;
    let w: Vec<f64> = x.iter().zip(u).map(|(&xk, &uk)| beta * xk + uk).collect();
    let m = nearest_superposed_with_cap(Word::Real(&w), c0, c1, DEFAULT_PAIR_CAP)?;
    Ok(WzEncodeResult {
        i: m.i,
        j: m.j,
        distortion: m.distortion,
        encoder_error: m.distortion > distortion * (1.0 + slack),
    })
}

pub fn gaussian_wz_decode(
    y: &[f64],
    u: &[f64],
    c1_word: &[f64],
    beta: f64,
    c0: &Codebook,
) -> Result<WzDecoded<f64>> {
    c0.real_data()?;
    check_len(c0.n(), y.len())?;
    check_len(c0.n(), u.len())?;
    check_len(c0.n(), c1_word.len())?;
    let v: Vec<f64> = y
        .iter()
        .zip(u.iter().zip(c1_word))
        .map(|(&yk, (&uk, &ck))| beta * yk + uk - ck)
        .collect();
    let (i_hat, _) = nearest_reals(&v, c0);
    let x_hat = y
        .iter()
        .zip(c0.reals(i_hat).iter().zip(&v))
        .map(|(&yk, (&ck, &vk))| yk + beta * (ck - vk))
        .collect();
    Ok(WzDecoded { i_hat, x_hat })
}

/// A discrete Wyner-Ziv setup: `X = Y + Z` with `Y` uniform on the group.
#[derive(Debug, Clone)]
pub struct DiscreteWz {
    pub n: usize,
    /// Law of the correlation noise `Z`.
    pub noise: SymbolDistribution,
    pub target: f64,
    pub c0: Codebook,
    pub c1: Codebook,
    decoder: WzDecoder,
}

impl DiscreteWz {
    /// Draws `C0` uniform at rate `r0` and `C1 ~ q` at rate `r1`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        noise: SymbolDistribution,
        q: SymbolDistribution,
        target: f64,
        r0: f64,
        r1: f64,
        c0_seed: u64,
        c1_seed: u64,
    ) -> Result<Self> {
        noise.ensure_same_alphabet(&q)?;
        let uniform = SymbolDistribution::uniform(noise.alphabet());
        let c0 = Codebook::generate(n, r0, CodebookMode::Discrete(uniform), c0_seed)?;
        let c1 = Codebook::generate(n, r1, CodebookMode::Discrete(q), c1_seed)?;
        Self::with_codebooks(noise, target, c0, c1)
    }

    pub fn with_codebooks(noise: SymbolDistribution, target: f64, c0: Codebook, c1: Codebook) -> Result<Self> {
        let alphabet = noise.alphabet();
        if c0.alphabet() != Some(alphabet) || c1.alphabet() != Some(alphabet) {
            return Err(Error::ModeMismatch("codebooks must be discrete over the noise alphabet".into()));
        }
        check_len(c0.n(), c1.n())?;
        let pairs = c0.len() as f64 * c1.len() as f64;
        if pairs > DEFAULT_PAIR_CAP as f64 {
            return Err(Error::CapExceeded {
                what: "superposed pair count",
                requested: pairs,
                cap: DEFAULT_PAIR_CAP,
            });
        }
        let decoder = WzDecoder::for_correlation(&noise, target)?;
        Ok(Self {
            n: c0.n(),
            noise,
            target,
            c0,
            c1,
            decoder,
        })
    }

    pub fn alphabet(&self) -> GroupAlphabet {
        self.noise.alphabet()
    }

    pub fn decoder(&self) -> &WzDecoder {
        &self.decoder
    }

    /// Runs encoder and decoder on a given `(x, y)`.
    pub fn run(&self, x: &[u16], y: &[u16]) -> Result<TrialRecord> {
        let enc = wz_encode(x, &self.c0, &self.c1, self.target)?;
        let dec = self
            .decoder
            .decode(y, self.c1.symbols(enc.j), &self.c0)?
            .evaluate(x, enc.i);
        Ok(TrialRecord {
            encoder_error: enc.encoder_error,
            decoder_error: dec.decoder_error,
            distortion: enc.distortion,
            end_distortion: dec.end_distortion,
        })
    }

    /// Fast path for the encoder's `(i, j, hamming count)`.
    pub(crate) fn encode_counts(&self, x: &[u16]) -> (usize, usize, u32) {
        superposed_symbols(x, &self.c0, &self.c1)
    }
}

/// The dithered Gaussian setup: `Y ~ N(0, P_Y)`, `Z ~ N(0, P_Z)`.
#[derive(Debug, Clone)]
pub struct GaussianWz {
    pub params: GaussianWzParams,
    pub n: usize,
    pub c0: Codebook,
    pub c1: Codebook,
    pub slack: f64,
}

impl GaussianWz {
    pub fn new(params: GaussianWzParams, n: usize, r0: f64, r1: f64, c0_seed: u64, c1_seed: u64) -> Result<Self> {
        let m0 = codebook_size(n, r0, DEFAULT_CODEBOOK_CAP)?;
        let m1 = codebook_size(n, r1, DEFAULT_CODEBOOK_CAP)?;
        if m0 as f64 * m1 as f64 > DEFAULT_PAIR_CAP as f64 {
            return Err(Error::CapExceeded {
                what: "superposed pair count",
                requested: m0 as f64 * m1 as f64,
                cap: DEFAULT_PAIR_CAP,
            });
        }
        let c0 = Codebook::generate(n, r0, CodebookMode::Gaussian { variance: params.p0 }, c0_seed)?;
        let c1 = Codebook::generate(n, r1, CodebookMode::Gaussian { variance: params.q }, c1_seed)?;
        Ok(Self {
            params,
            n,
            c0,
            c1,
            slack: DEFAULT_GAUSSIAN_SLACK,
        })
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn run(&self, x: &[f64], y: &[f64], u: &[f64]) -> Result<TrialRecord> {
        let p = &self.params;
        let enc = gaussian_wz_encode(x, u, p.beta, &self.c0, &self.c1, p.d, self.slack)?;
        let dec = gaussian_wz_decode(y, u, self.c1.reals(enc.j), p.beta, &self.c0)?.evaluate(x, enc.i);
        Ok(TrialRecord {
            encoder_error: enc.encoder_error,
            decoder_error: dec.decoder_error,
            distortion: enc.distortion,
            end_distortion: dec.end_distortion,
        })
    }
}

#[derive(Debug, Clone)]
pub enum WzInstance {
    Discrete(DiscreteWz),
    Gaussian(GaussianWz),
}

/// Stream tags under a trial seed.
const SIDE_INFO_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const DITHER_STREAM: u64 = 3;

/// Draws `(x, y)` for a discrete trial: `y` uniform, `z ~ noise`, `x = y + z`.
pub fn draw_discrete_source(inst: &DiscreteWz, trial_seed: u64) -> (Vec<u16>, Vec<u16>) {
    let g = inst.alphabet();
    let uniform = SymbolDistribution::uniform(g).cdf();
    let noise = inst.noise.cdf();
    let mut ry = SplitMix64::derived(trial_seed, &[SIDE_INFO_STREAM]);
    let mut rz = SplitMix64::derived(trial_seed, &[NOISE_STREAM]);
    let y: Vec<u16> = (0..inst.n).map(|_| draw_symbol(&uniform, &mut ry)).collect();
    let x = y.iter().map(|&yk| g.add(yk, draw_symbol(&noise, &mut rz))).collect();
    (x, y)
}

/// Draws `(x, y, u)` for a Gaussian trial.
pub fn draw_gaussian_source(inst: &GaussianWz, trial_seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let p = &inst.params;
    let mut ry = SplitMix64::derived(trial_seed, &[SIDE_INFO_STREAM]);
    let mut rz = SplitMix64::derived(trial_seed, &[NOISE_STREAM]);
    let mut ru = SplitMix64::derived(trial_seed, &[DITHER_STREAM]);
    let (sy, sz, su) = (p.p_y.sqrt(), p.p_z.sqrt(), p.d.sqrt());
    let y: Vec<f64> = (0..inst.n).map(|_| sy * ry.next_gaussian()).collect();
    let x = y.iter().map(|&yk| yk + sz * rz.next_gaussian()).collect();
    let u = (0..inst.n).map(|_| su * ru.next_gaussian()).collect();
    (x, y, u)
}

pub fn simulate_wz_trial(instance: &WzInstance, trial_seed: u64) -> Result<TrialRecord> {
    match instance {
        WzInstance::Discrete(inst) => {
            let (x, y) = draw_discrete_source(inst, trial_seed);
            inst.run(&x, &y)
        }
        WzInstance::Gaussian(inst) => {
            let (x, y, u) = draw_gaussian_source(inst, trial_seed);
            inst.run(&x, &y, &u)
        }
    }
}
