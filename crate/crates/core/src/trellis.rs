//! Convolutional codes, Viterbi search and the practical two-stage
//! Wyner-Ziv pipeline.
//!
//! Generators are written in octal with the most significant of the `K`
//! taps on the current input, so `(7, 5)` with `K = 3` has impulse response
//! `11 10 11`. The encoder state holds the previous `K - 1` inputs, newest
//! in the highest bit. Codes are zero-tail terminated: `K - 1` zeros are
//! appended so every codeword ends in state 0.
//!
//! [`viterbi_search`] returns the minimum-metric codeword. The two branches
//! entering a state carry the same input bit and differ only in the bit
//! shifted out of the register; on equal metrics the branch whose
//! departing bit is 0 (the lower-numbered predecessor) survives.

use crate::error::{Error, Result};
use crate::infotheory::binary_wz_rd;
use crate::wz::TrialRecord;

/// Largest supported constraint length.
pub const MAX_CONSTRAINT_LENGTH: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    generators: Vec<u32>,
    constraint_length: u32,
}

impl ConvCode {
    pub fn new(generators: Vec<u32>, constraint_length: u32) -> Result<Self> {
        if !(2..=MAX_CONSTRAINT_LENGTH).contains(&constraint_length) {
            return Err(Error::param(
                "K",
                format!("constraint length must be in 2..={MAX_CONSTRAINT_LENGTH}, got {constraint_length}"),
            ));
        }
        if generators.is_empty() || generators.len() > 32 {
            return Err(Error::param("generators", "need between 1 and 32 generator polynomials"));
        }
        for &g in &generators {
            if g == 0 || g >> constraint_length != 0 {
                return Err(Error::param(
                    "generators",
                    format!("polynomial {g:o} (octal) must be nonzero and fit in K = {constraint_length} taps"),
                ));
            }
        }
        Ok(Self {
            generators,
            constraint_length,
        })
    }

    /// Parses a comma-separated octal list such as `"133,171"`.
    pub fn from_octal(list: &str, constraint_length: u32) -> Result<Self> {
        let generators = list
            .split(',')
            .map(|t| {
                u32::from_str_radix(t.trim(), 8)
                    .map_err(|_| Error::param("generators", format!("`{t}` is not an octal number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(generators, constraint_length)
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn octal(&self) -> String {
        self.generators.iter().map(|g| format!("{g:o}")).collect::<Vec<_>>().join(",")
    }

    pub fn constraint_length(&self) -> u32 {
        self.constraint_length
    }

    /// Output bits per input bit.
    pub fn outputs(&self) -> usize {
        self.generators.len()
    }

    pub fn states(&self) -> usize {
        1usize << (self.constraint_length - 1)
    }

    pub fn encoded_len(&self, info_len: usize) -> usize {
        self.outputs() * (info_len + self.constraint_length as usize - 1)
    }

    /// Information length whose terminated codeword has `len` symbols.
    pub fn info_len_for(&self, len: usize) -> Result<usize> {
        let tail = self.constraint_length as usize - 1;
        if !len.is_multiple_of(self.outputs()) || len / self.outputs() <= tail {
            return Err(Error::param(
                "n",
                format!(
                    "length {len} is not {} x (info length + {tail}) with info length >= 1",
                    self.outputs()
                ),
            ));
        }
        Ok(len / self.outputs() - tail)
    }

    /// Output bits for `reg = (input << (K-1)) | state`, generator 0 first.
    #[inline]
    fn branch_output(&self, reg: u32, out: &mut [u8]) {
        for (o, &g) in out.iter_mut().zip(&self.generators) {
            *o = ((reg & g).count_ones() & 1) as u8;
        }
    }
}

/// Shift-register encoding with zero-tail termination.
pub fn conv_encode(bits: &[u8], code: &ConvCode) -> Vec<u8> {
    let k = code.constraint_length;
    let tail = k as usize - 1;
    let mut out = vec![0u8; code.encoded_len(bits.len())];
    let mut state = 0u32;
    for (t, chunk) in out.chunks_exact_mut(code.outputs()).enumerate() {
        let b = if t < bits.len() { (bits[t] & 1) as u32 } else { 0 };
        let reg = (b << (k - 1)) | state;
        code.branch_output(reg, chunk);
        state = reg >> 1;
    }
    debug_assert_eq!(out.len(), code.outputs() * (bits.len() + tail));
    out
}

/// Per-symbol cost of emitting a code bit at a position.
pub trait BranchMetric {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cost(&self, pos: usize, bit: u8) -> f64;
}

/// Hamming distance to a binary target.
#[derive(Debug, Clone, Copy)]
pub struct HammingTarget<'a>(pub &'a [u8]);

impl BranchMetric for HammingTarget<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    fn cost(&self, pos: usize, bit: u8) -> f64 {
        (self.0[pos] != bit) as u8 as f64
    }
}

/// Squared Euclidean distance to a real target, code bit `b` mapped to `levels[b]`.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanTarget<'a> {
    pub target: &'a [f64],
    pub levels: [f64; 2],
}

impl BranchMetric for EuclideanTarget<'_> {
    fn len(&self) -> usize {
        self.target.len()
    }

    #[inline]
    fn cost(&self, pos: usize, bit: u8) -> f64 {
        let d = self.target[pos] - self.levels[bit as usize];
        d * d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrellisResult {
    pub info_bits: Vec<u8>,
    pub codeword: Vec<u8>,
    /// Total metric of the codeword against the target.
    pub metric: f64,
}

impl TrellisResult {
    pub fn metric_per_symbol(&self) -> f64 {
        self.metric / self.codeword.len() as f64
    }
}

/// Exact minimum-metric terminated codeword by dynamic programming.
pub fn viterbi_search<M: BranchMetric>(metric: &M, code: &ConvCode) -> Result<TrellisResult> {
    let info_len = code.info_len_for(metric.len())?;
    let k = code.constraint_length;
    let n0 = code.outputs();
    let states = code.states();
    let steps = info_len + k as usize - 1;

    // Outputs of every (state, input) branch, flattened.
    let mut outputs = vec![0u8; states * 2 * n0];
    for s in 0..states {
        for b in 0..2u32 {
            let reg = (b << (k - 1)) | s as u32;
            let at = (s * 2 + b as usize) * n0;
            code.branch_output(reg, &mut outputs[at..at + n0]);
        }
    }

    let mut path = vec![f64::INFINITY; states];
    path[0] = 0.0;
    let mut next = vec![f64::INFINITY; states];
    // Departing bit of the surviving predecessor for each (step, state).
    let mut survivors = vec![0u8; steps * states];
    let top = (k - 2) as usize;
    let mask = states - 1;

    for t in 0..steps {
        let in_tail = t >= info_len;
        let base = t * n0;
        // Branch cost for every (state, input).
        let mut branch = [0.0f64; 2];
        for ns in 0..states {
            let b = ns >> top;
            if in_tail && b == 1 {
                next[ns] = f64::INFINITY;
                continue;
            }
            let s0 = (ns << 1) & mask;
            let s1 = s0 | 1;
            for (slot, &s) in branch.iter_mut().zip(&[s0, s1]) {
                let at = (s * 2 + b) * n0;
                let mut c = path[s];
                if c.is_finite() {
                    for (r, &bit) in outputs[at..at + n0].iter().enumerate() {
                        c += metric.cost(base + r, bit);
                    }
                }
                *slot = c;
            }
            let pick = (branch[1] < branch[0]) as usize;
            next[ns] = branch[pick];
            survivors[t * states + ns] = pick as u8;
        }
        std::mem::swap(&mut path, &mut next);
    }

    let total = path[0];
    let mut info_bits = vec![0u8; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        info_bits[t] = (state >> top) as u8;
        let departing = survivors[t * states + state] as usize;
        state = ((state << 1) & mask) | departing;
    }
    debug_assert_eq!(state, 0);
    info_bits.truncate(info_len);
    let codeword = conv_encode(&info_bits, code);
    Ok(TrellisResult {
        info_bits,
        codeword,
        metric: total,
    })
}

/// Result of the two-stage practical scheme on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub record: TrialRecord,
    /// Transmitted information bits of `C1` per source symbol.
    pub rate: f64,
    /// `rate - binary_wz_rd(p, end distortion)`, with the bound taken as 0
    /// once the distortion reaches `p`.
    pub gap_bits: f64,
    /// `10 log10(D / D_wz(rate))`: distortion excess over the bound at equal rate.
    pub gap_db: f64,
    pub x_hat: Vec<u8>,
}

/// Rate of the binary Wyner-Ziv bound at `distortion`, zero at or above `p`.
pub fn wz_bound_rate(p: f64, distortion: f64) -> Result<f64> {
    if distortion >= p {
        Ok(0.0)
    } else {
        binary_wz_rd(p, distortion)
    }
}

/// Distortion the binary Wyner-Ziv bound reaches at `rate`, by bisection.
pub fn wz_bound_distortion(p: f64, rate: f64) -> Result<f64> {
    if rate <= 0.0 {
        return Ok(p);
    }
    let h_p = binary_wz_rd(p, 0.0)?;
    if rate >= h_p {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_wz_rd(p, mid)? > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Encoder: `c0 = viterbi(x; C0)`, residual `e = x - c0`, `c1 = viterbi(e; C1)`
/// and only `c1`'s information bits are sent. Decoder:
/// `c0_hat = viterbi(y - c1; C0)` and `x_hat = c0_hat + c1`.
pub fn practical_wz_pipeline(
    x: &[u8],
    y: &[u8],
    c0_code: &ConvCode,
    c1_code: &ConvCode,
    p: f64,
    distortion: f64,
) -> Result<PipelineResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n = x.len();
    let k1 = c1_code.info_len_for(n)?;
    let c0 = viterbi_search(&HammingTarget(x), c0_code)?;
    let residual: Vec<u8> = x.iter().zip(&c0.codeword).map(|(a, b)| a ^ b).collect();
    let c1 = viterbi_search(&HammingTarget(&residual), c1_code)?;
    let quant_errs = residual.iter().zip(&c1.codeword).filter(|(a, b)| a != b).count();

    let v: Vec<u8> = y.iter().zip(&c1.codeword).map(|(a, b)| a ^ b).collect();
    let c0_hat = viterbi_search(&HammingTarget(&v), c0_code)?;
    let x_hat: Vec<u8> = c0_hat.codeword.iter().zip(&c1.codeword).map(|(a, b)| a ^ b).collect();
    let end_errs = x.iter().zip(&x_hat).filter(|(a, b)| a != b).count();

    let quant = quant_errs as f64 / n as f64;
    let end = end_errs as f64 / n as f64;
    let rate = k1 as f64 / n as f64;
    Ok(PipelineResult {
        record: TrialRecord {
            encoder_error: quant > distortion,
            decoder_error: c0_hat.info_bits != c0.info_bits,
            distortion: quant,
            end_distortion: end,
        },
        rate,
        gap_bits: rate - wz_bound_rate(p, end)?,
        gap_db: 10.0 * (end / wz_bound_distortion(p, rate)?).log10(),
        x_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn k3() -> ConvCode {
        ConvCode::from_octal("7,5", 3).unwrap()
    }

    #[test]
    fn code_validation() {
        assert!(ConvCode::from_octal("7,5", 1).is_err());
        assert!(ConvCode::from_octal("17,5", 3).is_err());
        assert!(ConvCode::from_octal("0,5", 3).is_err());
        assert!(ConvCode::from_octal("9", 3).is_err());
        let c = ConvCode::from_octal("133, 171", 7).unwrap();
        assert_eq!(c.generators(), &[0o133, 0o171]);
        assert_eq!(c.octal(), "133,171");
        assert_eq!(c.encoded_len(10), 32);
        assert_eq!(c.info_len_for(32).unwrap(), 10);
        assert!(c.info_len_for(31).is_err());
        assert!(c.info_len_for(12).is_err());
    }

    #[test]
    fn impulse_response_is_generator_taps() {
        let c = k3();
        assert_eq!(conv_encode(&[0, 0, 0], &c), vec![0; 10]);
        assert_eq!(conv_encode(&[1], &c), vec![1, 1, 1, 0, 1, 1]);
        let c = ConvCode::from_octal("133,171", 7).unwrap();
        let out = conv_encode(&[1], &c);
        for t in 0..7 {
            for (i, g) in [0o133u32, 0o171].iter().enumerate() {
                assert_eq!(out[2 * t + i] as u32, (g >> (6 - t)) & 1);
            }
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let c = ConvCode::from_octal("247,371", 8).unwrap();
        let mut rng = SplitMix64::new(4);
        let bits: Vec<u8> = (0..300).map(|_| rng.next_below(2) as u8).collect();
        let cw = conv_encode(&bits, &c);
        let r = viterbi_search(&HammingTarget(&cw), &c).unwrap();
        assert_eq!(r.metric, 0.0);
        assert_eq!(r.info_bits, bits);
        assert_eq!(r.codeword, cw);
    }

    #[test]
    fn corrects_isolated_errors() {
        let c = ConvCode::from_octal("133,171", 7).unwrap();
        let mut rng = SplitMix64::new(9);
        let bits: Vec<u8> = (0..100).map(|_| rng.next_below(2) as u8).collect();
        let mut cw = conv_encode(&bits, &c);
        for pos in [3, 60, 140] {
            cw[pos] ^= 1;
        }
        let r = viterbi_search(&HammingTarget(&cw), &c).unwrap();
        assert_eq!(r.info_bits, bits);
        assert_eq!(r.metric, 3.0);
    }

    fn exhaustive(target: &[u8], code: &ConvCode) -> (f64, Vec<Vec<u8>>) {
        let k = code.info_len_for(target.len()).unwrap();
        let mut best = f64::INFINITY;
        let mut argmins = Vec::new();
        for m in 0..(1u32 << k) {
            let info: Vec<u8> = (0..k).map(|i| ((m >> i) & 1) as u8).collect();
            let cw = conv_encode(&info, code);
            let d = cw.iter().zip(target).filter(|(a, b)| a != b).count() as f64;
            if d < best {
                best = d;
                argmins.clear();
            }
            if d == best {
                argmins.push(cw);
            }
        }
        (best, argmins)
    }

    #[test]
    fn matches_exhaustive_search_for_all_short_targets() {
        let c = k3();
        // info length 4: codewords of 12 bits, all 4096 targets.
        for t in 0..(1u32 << 12) {
            let target: Vec<u8> = (0..12).map(|i| ((t >> i) & 1) as u8).collect();
            let r = viterbi_search(&HammingTarget(&target), &c).unwrap();
            let (best, argmins) = exhaustive(&target, &c);
            assert_eq!(r.metric, best);
            assert!(argmins.contains(&r.codeword));
        }
    }

    #[test]
    fn euclidean_metric_recovers_bpsk_codeword() {
        let c = k3();
        let bits = [1u8, 0, 1, 1, 0, 0, 1];
        let cw = conv_encode(&bits, &c);
        let target: Vec<f64> = cw.iter().map(|&b| if b == 0 { 1.1 } else { -0.9 }).collect();
        let r = viterbi_search(
            &EuclideanTarget {
                target: &target,
                levels: [1.0, -1.0],
            },
            &c,
        )
        .unwrap();
        assert_eq!(r.info_bits, bits.to_vec());
        assert!((r.metric - cw.len() as f64 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn pipeline_is_exact_on_codewords() {
        let c0 = ConvCode::from_octal("7,5", 3).unwrap();
        let c1 = ConvCode::from_octal("7,5", 3).unwrap();
        let cw = conv_encode(&[1, 0, 1, 1, 0, 1], &c0);
        let r = practical_wz_pipeline(&cw, &cw, &c0, &c1, 0.1, 0.05).unwrap();
        assert_eq!(r.record.end_distortion, 0.0);
        assert_eq!(r.x_hat, cw);
        assert!(!r.record.decoder_error);
        assert!((r.rate - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn bound_inversion() {
        let p = 0.25;
        for d in [0.01, 0.05, 0.1, 0.2] {
            let r = wz_bound_rate(p, d).unwrap();
            assert!((wz_bound_distortion(p, r).unwrap() - d).abs() < 1e-9);
        }
        assert_eq!(wz_bound_distortion(p, 0.0).unwrap(), p);
        assert_eq!(wz_bound_rate(p, 0.3).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn encoding_is_linear(a in prop::collection::vec(0u8..2, 1..40), seed: u64) {
            let code = ConvCode::from_octal("133,171,165", 7).unwrap();
            let mut rng = SplitMix64::new(seed);
            let b: Vec<u8> = (0..a.len()).map(|_| rng.next_below(2) as u8).collect();
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let lhs = conv_encode(&ab, &code);
            let rhs: Vec<u8> = conv_encode(&a, &code).iter().zip(conv_encode(&b, &code)).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
