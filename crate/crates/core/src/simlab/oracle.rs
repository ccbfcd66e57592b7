//! Exact error probabilities of a small discrete Wyner-Ziv instance.
//!
//! `X` is uniform on `G^n` because `Y` is, so the encoder-error probability
//! is a plain count over all `x`. Decoder error and end distortion depend on
//! `Z` as well and are summed over every `(x, z)` weighted by `prod p(z_k)`.
//! The decoder output depends on `(x, z)` only through `v = x - c1 - z`, so
//! it is tabulated once for every `v`.

use crate::error::{Error, Result};
use crate::infotheory::GroupAlphabet;
use crate::wz::DiscreteWz;

/// Largest `|G|^(2n)` the oracle will enumerate.
pub const ORACLE_CAP: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub encoder_error: f64,
    pub decoder_error: f64,
    /// Mean quantization distortion per symbol.
    pub mean_distortion: f64,
    pub mean_end_distortion: f64,
    /// `pmf[k]` = probability that `x_hat` differs from `x` in `k` symbols.
    pub end_distortion_pmf: Vec<f64>,
}

struct Packing {
    g: GroupAlphabet,
    n: usize,
}

impl Packing {
    fn pack(&self, w: &[u16]) -> usize {
        let l = self.g.bits() as usize;
        w.iter().enumerate().fold(0, |acc, (k, &s)| acc | (s as usize) << (l * k))
    }

    fn unpack(&self, mut v: usize, out: &mut [u16]) {
        let l = self.g.bits();
        let mask = self.g.mask() as usize;
        for s in out.iter_mut() {
            *s = (v & mask) as u16;
            v >>= l;
        }
    }

    #[inline]
    fn digitwise(&self, a: usize, b: usize, op: impl Fn(usize, usize) -> usize) -> usize {
        let l = self.g.bits() as usize;
        let mask = self.g.mask() as usize;
        (0..self.n).fold(0, |acc, k| acc | (op((a >> (l * k)) & mask, (b >> (l * k)) & mask) & mask) << (l * k))
    }

    #[inline]
    fn sub(&self, a: usize, b: usize) -> usize {
        if self.g.bits() == 1 {
            a ^ b
        } else {
            self.digitwise(a, b, |x, y| x.wrapping_sub(y))
        }
    }

    #[inline]
    fn add(&self, a: usize, b: usize) -> usize {
        if self.g.bits() == 1 {
            a ^ b
        } else {
            self.digitwise(a, b, |x, y| x.wrapping_add(y))
        }
    }

    #[inline]
    fn distance(&self, a: usize, b: usize) -> usize {
        if self.g.bits() == 1 {
            (a ^ b).count_ones() as usize
        } else {
            let l = self.g.bits() as usize;
            let mask = self.g.mask() as usize;
            (0..self.n).filter(|k| (a >> (l * k)) & mask != (b >> (l * k)) & mask).count()
        }
    }
}

pub fn exact_small_oracle(inst: &DiscreteWz) -> Result<OracleResult> {
    let g = inst.alphabet();
    let n = inst.n;
    let bits = g.bits() as u64 * n as u64;
    if 2 * bits > 26 {
        return Err(Error::CapExceeded {
            what: "oracle enumeration |G|^(2n)",
            requested: 2f64.powi(2 * bits as i32),
            cap: ORACLE_CAP,
        });
    }
    let pk = Packing { g, n };
    let words = 1usize << bits;
    let mut buf = vec![0u16; n];

    let decode_table: Vec<usize> = (0..words)
        .map(|v| {
            pk.unpack(v, &mut buf);
            inst.decoder().decode_index(&buf, &inst.c0)
        })
        .collect::<Result<_>>()?;
    let c0: Vec<usize> = (0..inst.c0.len()).map(|i| pk.pack(inst.c0.symbols(i))).collect();
    let c1: Vec<usize> = (0..inst.c1.len()).map(|j| pk.pack(inst.c1.symbols(j))).collect();

    let probs = inst.noise.probs();
    let noise: Vec<(usize, f64)> = (0..words)
        .map(|z| {
            pk.unpack(z, &mut buf);
            (z, buf.iter().map(|&s| probs[s as usize]).product::<f64>())
        })
        .filter(|&(_, w)| w > 0.0)
        .collect();

    let share = 1.0 / words as f64;
    let mut encoder_errors = 0usize;
    let mut distortion_sum = 0usize;
    let mut pmf = vec![0.0; n + 1];
    let mut decoder_error = 0.0;
    for x in 0..words {
        pk.unpack(x, &mut buf);
        let (i, j, count) = inst.encode_counts(&buf);
        if count as f64 / n as f64 > inst.target {
            encoder_errors += 1;
        }
        distortion_sum += count as usize;
        let shifted = pk.sub(x, c1[j]);
        let mut wrong = 0.0;
        let mut row = vec![0.0; n + 1];
        for &(z, w) in &noise {
            let i_hat = decode_table[pk.sub(shifted, z)];
            if i_hat != i {
                wrong += w;
            }
            row[pk.distance(x, pk.add(c0[i_hat], c1[j]))] += w;
        }
        decoder_error += share * wrong;
        for (acc, r) in pmf.iter_mut().zip(row) {
            *acc += share * r;
        }
    }
    let mean_end_distortion = pmf.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() / n as f64;
    Ok(OracleResult {
        encoder_error: encoder_errors as f64 * share,
        decoder_error,
        mean_distortion: distortion_sum as f64 * share / n as f64,
        mean_end_distortion,
        end_distortion_pmf: pmf,
    })
}
