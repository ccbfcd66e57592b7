//! Random codebooks and exhaustive nearest-codeword searches.
//!
//! A codebook of rate `R` and length `n` holds `max(1, round(2^{nR}))`
//! codewords whose symbols are drawn i.i.d. from the mode's law. Codeword
//! `i` is drawn from its own stream `SplitMix64::derived(seed, [i])`, so a
//! larger codebook with the same seed extends a smaller one. Discrete
//! symbols use inverse-CDF sampling (`first g with u < cdf[g]`); Gaussian
//! symbols use Box-Muller scaled by the standard deviation.
//!
//! All searches are exhaustive and break ties toward the lowest index, or
//! the lexicographically lowest `(i, j)` pair.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::infotheory::{GroupAlphabet, SymbolDistribution};
use crate::rng::SplitMix64;

pub const DEFAULT_CODEBOOK_CAP: u64 = 1 << 24;
pub const DEFAULT_PAIR_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub enum CodebookMode {
    /// Symbols drawn i.i.d. from a law on a finite group.
    Discrete(SymbolDistribution),
    /// Symbols drawn i.i.d. from `N(0, variance)`.
    Gaussian { variance: f64 },
}

/// Borrowed view of a single codeword or target vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Word<'a> {
    Discrete(&'a [u16]),
    Real(&'a [f64]),
}

impl Word<'_> {
    pub fn len(&self) -> usize {
        match self {
            Word::Discrete(s) => s.len(),
            Word::Real(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Closest codeword: its index and the metric value (Hamming count or
/// squared Euclidean sum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: usize,
    pub distance: f64,
}

/// Closest superposed codeword `c0_i + c1_j`, with the per-symbol distortion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMatch {
    pub i: usize,
    pub j: usize,
    pub distortion: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Words {
    Discrete {
        symbols: Vec<u16>,
        packed: Option<Vec<u64>>,
    },
    Real(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    rate: f64,
    mode: CodebookMode,
    seed: u64,
    size: usize,
    words: Words,
}

/// `max(1, round-half-up(2^{n rate}))`, or an error above `cap`.
pub fn codebook_size(n: usize, rate: f64, cap: u64) -> Result<usize> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::param("rate", format!("must be non-negative, got {rate}")));
    }
    let raw = (n as f64 * rate).exp2();
    let size = (raw + 0.5).floor().max(1.0);
    if !size.is_finite() || size > cap as f64 {
        return Err(Error::CapExceeded {
            what: "codebook size",
            requested: size,
            cap,
        });
    }
    Ok(size as usize)
}

/// Packs a binary word into a `u64`, symbol `k` at bit `k`.
#[inline]
pub fn pack_bits(bits: &[u16]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (k, &b)| acc | (((b & 1) as u64) << k))
}

pub(crate) fn draw_symbol(cdf: &[f64], rng: &mut SplitMix64) -> u16 {
    let u = rng.next_f64();
    let idx = cdf.partition_point(|&c| c <= u);
    if idx < cdf.len() {
        idx as u16
    } else {
        // Rounding left the total just below 1: take the last symbol with mass.
        let last = cdf
            .iter()
            .enumerate()
            .rev()
            .find(|(k, &c)| *k == 0 || c > cdf[k - 1])
            .map(|(k, _)| k)
            .unwrap_or(0);
        last as u16
    }
}

impl Codebook {
    pub fn generate(n: usize, rate: f64, mode: CodebookMode, seed: u64) -> Result<Self> {
        Self::generate_with_cap(n, rate, mode, seed, DEFAULT_CODEBOOK_CAP)
    }

    pub fn generate_with_cap(
        n: usize,
        rate: f64,
        mode: CodebookMode,
        seed: u64,
        cap: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "block length must be at least 1"));
        }
        let size = codebook_size(n, rate, cap)?;
        let words = match &mode {
            CodebookMode::Discrete(dist) => {
                let cdf = dist.cdf();
                let mut symbols = Vec::with_capacity(size * n);
                for i in 0..size {
                    let mut rng = SplitMix64::derived(seed, &[i as u64]);
                    symbols.extend((0..n).map(|_| draw_symbol(&cdf, &mut rng)));
                }
                discrete_words(dist.alphabet(), n, symbols)
            }
            CodebookMode::Gaussian { variance } => {
                if !(*variance >= 0.0 && variance.is_finite()) {
                    return Err(Error::param("variance", format!("invalid {variance}")));
                }
                let sd = variance.sqrt();
                let mut data = Vec::with_capacity(size * n);
                for i in 0..size {
                    let mut rng = SplitMix64::derived(seed, &[i as u64]);
                    data.extend((0..n).map(|_| sd * rng.next_gaussian()));
                }
                Words::Real(data)
            }
        };
        Ok(Self {
            n,
            rate,
            mode,
            seed,
            size,
            words,
        })
    }

    /// Builds a codebook from explicit discrete codewords. The rate is
    /// `log2(M) / n` and the seed is zero.
    pub fn from_discrete(dist: SymbolDistribution, words: &[Vec<u16>]) -> Result<Self> {
        let n = check_explicit(words.iter().map(Vec::len))?;
        let alphabet = dist.alphabet();
        if let Some(bad) = words.iter().flatten().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::param("words", format!("symbol {bad} outside the alphabet")));
        }
        let symbols = words.concat();
        Ok(Self {
            n,
            rate: (words.len() as f64).log2() / n as f64,
            size: words.len(),
            seed: 0,
            words: discrete_words(alphabet, n, symbols),
            mode: CodebookMode::Discrete(dist),
        })
    }

    pub fn from_real(variance: f64, words: &[Vec<f64>]) -> Result<Self> {
        let n = check_explicit(words.iter().map(Vec::len))?;
        Ok(Self {
            n,
            rate: (words.len() as f64).log2() / n as f64,
            size: words.len(),
            seed: 0,
            words: Words::Real(words.concat()),
            mode: CodebookMode::Gaussian { variance },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> &CodebookMode {
        &self.mode
    }

    pub fn alphabet(&self) -> Option<GroupAlphabet> {
        match &self.mode {
            CodebookMode::Discrete(d) => Some(d.alphabet()),
            CodebookMode::Gaussian { .. } => None,
        }
    }

    pub fn word(&self, i: usize) -> Word<'_> {
        match &self.words {
            Words::Discrete { symbols, .. } => Word::Discrete(&symbols[i * self.n..(i + 1) * self.n]),
            Words::Real(data) => Word::Real(&data[i * self.n..(i + 1) * self.n]),
        }
    }

    /// Discrete codeword `i`. Panics in Gaussian mode.
    pub fn symbols(&self, i: usize) -> &[u16] {
        match &self.words {
            Words::Discrete { symbols, .. } => &symbols[i * self.n..(i + 1) * self.n],
            Words::Real(_) => panic!("symbols() on a Gaussian codebook"),
        }
    }

    /// Real codeword `i`. Panics in discrete mode.
    pub fn reals(&self, i: usize) -> &[f64] {
        match &self.words {
            Words::Real(data) => &data[i * self.n..(i + 1) * self.n],
            Words::Discrete { .. } => panic!("reals() on a discrete codebook"),
        }
    }

    pub(crate) fn packed(&self) -> Option<&[u64]> {
        match &self.words {
            Words::Discrete { packed, .. } => packed.as_deref(),
            Words::Real(_) => None,
        }
    }

    pub(crate) fn discrete_data(&self) -> Result<&[u16]> {
        match &self.words {
            Words::Discrete { symbols, .. } => Ok(symbols),
            Words::Real(_) => Err(Error::ModeMismatch("expected a discrete codebook".into())),
        }
    }

    pub(crate) fn real_data(&self) -> Result<&[f64]> {
        match &self.words {
            Words::Real(data) => Ok(data),
            Words::Discrete { .. } => Err(Error::ModeMismatch("expected a Gaussian codebook".into())),
        }
    }

    /// Writes the text dump: a header `n rate size mode seed`, then one
    /// codeword per line. `mode` is `discrete:<p0>,<p1>,..` or
    /// `gaussian:<variance>`; reals use 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let mode = match &self.mode {
            CodebookMode::Discrete(d) => format!(
                "discrete:{}",
                d.probs().iter().map(|&p| fmt_f64(p)).collect::<Vec<_>>().join(",")
            ),
            CodebookMode::Gaussian { variance } => format!("gaussian:{}", fmt_f64(*variance)),
        };
        writeln!(out, "{} {} {} {} {}", self.n, fmt_f64(self.rate), self.size, mode, self.seed)?;
        for i in 0..self.size {
            let line = match self.word(i) {
                Word::Discrete(s) => s.iter().map(u16::to_string).collect::<Vec<_>>(),
                Word::Real(s) => s.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>(),
            };
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty codebook dump".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, rate, size, mode, seed] = fields[..] else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        let parse_err = |what: &str| Error::Parse(format!("bad {what} in header `{header}`"));
        let n: usize = n.parse().map_err(|_| parse_err("n"))?;
        let rate: f64 = rate.parse().map_err(|_| parse_err("rate"))?;
        let size: usize = size.parse().map_err(|_| parse_err("size"))?;
        let seed: u64 = seed.parse().map_err(|_| parse_err("seed"))?;
        let body: Vec<String> = lines.collect::<std::io::Result<_>>()?;
        if body.len() != size {
            return Err(Error::Parse(format!("expected {size} codewords, found {}", body.len())));
        }
        let mut cb = if let Some(probs) = mode.strip_prefix("discrete:") {
            let probs: Vec<f64> = probs
                .split(',')
                .map(|p| p.parse().map_err(|_| parse_err("probability")))
                .collect::<Result<_>>()?;
            let order = probs.len();
            if !order.is_power_of_two() || order < 2 {
                return Err(parse_err("alphabet size"));
            }
            let alphabet = GroupAlphabet::new(order.trailing_zeros())?;
            let dist = SymbolDistribution::new(alphabet, probs)?;
            let words = parse_rows(&body, n, |t| t.parse::<u16>().ok())?;
            Self::from_discrete(dist, &words)?
        } else if let Some(var) = mode.strip_prefix("gaussian:") {
            let variance: f64 = var.parse().map_err(|_| parse_err("variance"))?;
            let words = parse_rows(&body, n, |t| t.parse::<f64>().ok())?;
            Self::from_real(variance, &words)?
        } else {
            return Err(parse_err("mode"));
        };
        cb.rate = rate;
        cb.seed = seed;
        Ok(cb)
    }
}

fn parse_rows<T>(body: &[String], n: usize, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<Vec<T>>> {
    body.iter()
        .map(|line| {
            let row: Vec<T> = line
                .split_whitespace()
                .map(|t| parse(t).ok_or_else(|| Error::Parse(format!("bad symbol `{t}`"))))
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            Ok(row)
        })
        .collect()
}

fn check_explicit(mut lens: impl Iterator<Item = usize>) -> Result<usize> {
    let n = lens
        .next()
        .ok_or_else(|| Error::param("words", "a codebook needs at least one codeword"))?;
    if n == 0 {
        return Err(Error::param("words", "codewords must be non-empty"));
    }
    for len in lens {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    Ok(n)
}

fn discrete_words(alphabet: GroupAlphabet, n: usize, symbols: Vec<u16>) -> Words {
    let packed = (alphabet.bits() == 1 && n <= 64)
        .then(|| symbols.chunks_exact(n).map(pack_bits).collect());
    Words::Discrete { symbols, packed }
}

/// Number of positions where the two words differ.
#[inline]
pub fn hamming(a: &[u16], b: &[u16]) -> u32 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u32
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_target(v: Word<'_>, c: &Codebook) -> Result<()> {
    if v.len() != c.n {
        return Err(Error::LengthMismatch {
            expected: c.n,
            actual: v.len(),
        });
    }
    match (v, &c.mode) {
        (Word::Discrete(s), CodebookMode::Discrete(d)) => {
            let a = d.alphabet();
            if let Some(bad) = s.iter().find(|&&g| !a.contains(g)) {
                return Err(Error::param("target", format!("symbol {bad} outside the alphabet")));
            }
            Ok(())
        }
        (Word::Real(_), CodebookMode::Gaussian { .. }) => Ok(()),
        _ => Err(Error::ModeMismatch("target and codebook modes differ".into())),
    }
}

/// Index of the minimum-metric codeword, lowest index on ties.
pub fn nearest_codeword(v: Word<'_>, c: &Codebook) -> Result<Nearest> {
    check_target(v, c)?;
    Ok(match v {
        Word::Discrete(s) => {
            let (index, d) = nearest_symbols(s, c);
            Nearest {
                index,
                distance: d as f64,
            }
        }
        Word::Real(s) => {
            let (index, distance) = nearest_reals(s, c);
            Nearest { index, distance }
        }
    })
}

pub(crate) fn nearest_symbols(v: &[u16], c: &Codebook) -> (usize, u32) {
    if let Some(packed) = c.packed() {
        let t = pack_bits(v);
        let mut best = (0, u32::MAX);
        for (i, &w) in packed.iter().enumerate() {
            let d = (t ^ w).count_ones();
            if d < best.1 {
                best = (i, d);
            }
        }
        return best;
    }
    let n = c.n;
    let data = match &c.words {
        Words::Discrete { symbols, .. } => symbols,
        Words::Real(_) => unreachable!(),
    };
    let mut best = (0, u32::MAX);
    for (i, w) in data.chunks_exact(n).enumerate() {
        let d = bounded_hamming(v, w, best.1);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub(crate) fn nearest_reals(v: &[f64], c: &Codebook) -> (usize, f64) {
    let data = match &c.words {
        Words::Real(d) => d,
        Words::Discrete { .. } => unreachable!(),
    };
    let mut best = (0, f64::INFINITY);
    for (i, w) in data.chunks_exact(c.n).enumerate() {
        let d = bounded_sq(v, w, best.1);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Hamming distance, or any value `>= bound` once the partial count reaches it.
#[inline]
fn bounded_hamming(a: &[u16], b: &[u16], bound: u32) -> u32 {
    let mut d = 0;
    for (x, y) in a.iter().zip(b) {
        d += (x != y) as u32;
        if d >= bound {
            return d;
        }
    }
    d
}

#[inline]
fn bounded_sq(a: &[f64], b: &[f64], bound: f64) -> f64 {
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        d += (x - y) * (x - y);
        if d >= bound {
            return d;
        }
    }
    d
}

pub fn nearest_superposed(x: Word<'_>, c0: &Codebook, c1: &Codebook) -> Result<PairMatch> {
    nearest_superposed_with_cap(x, c0, c1, DEFAULT_PAIR_CAP)
}

/// Minimum of `metric(x, c0_i + c1_j)` over all pairs (real addition in
/// Gaussian mode), lexicographically lowest `(i, j)` on ties.
pub fn nearest_superposed_with_cap(
    x: Word<'_>,
    c0: &Codebook,
    c1: &Codebook,
    cap: u64,
) -> Result<PairMatch> {
    check_target(x, c0)?;
    check_target(x, c1)?;
    if c0.alphabet() != c1.alphabet() {
        return Err(Error::ModeMismatch("C0 and C1 use different alphabets".into()));
    }
    let pairs = c0.len() as f64 * c1.len() as f64;
    if pairs > cap as f64 {
        return Err(Error::CapExceeded {
            what: "superposed pair count",
            requested: pairs,
            cap,
        });
    }
    let n = c0.n;
    let (i, j, total) = match x {
        Word::Discrete(s) => {
            let (i, j, d) = superposed_symbols(s, c0, c1);
            (i, j, d as f64)
        }
        Word::Real(s) => superposed_reals(s, c0, c1),
    };
    Ok(PairMatch {
        i,
        j,
        distortion: total / n as f64,
    })
}

/// Uses `d(x, c0 + c1) = d(x - c0, c1)` so each pair costs one pass.
pub(crate) fn superposed_symbols(x: &[u16], c0: &Codebook, c1: &Codebook) -> (usize, usize, u32) {
    if let (Some(p0), Some(p1)) = (c0.packed(), c1.packed()) {
        let t = pack_bits(x);
        let mut best = (0, 0, u32::MAX);
        for (i, &a) in p0.iter().enumerate() {
            let ti = t ^ a;
            for (j, &b) in p1.iter().enumerate() {
                let d = (ti ^ b).count_ones();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        return best;
    }
    let g = c0.alphabet().expect("discrete codebook");
    let n = c0.n;
    let d1 = c1.discrete_data().expect("discrete codebook");
    let mut best = (0, 0, u32::MAX);
    let mut t = vec![0u16; n];
    for i in 0..c0.len() {
        for ((tk, &xk), &ck) in t.iter_mut().zip(x).zip(c0.symbols(i)) {
            *tk = g.sub(xk, ck);
        }
        for (j, w) in d1.chunks_exact(n).enumerate() {
            let d = bounded_hamming(&t, w, best.2);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

pub(crate) fn superposed_reals(x: &[f64], c0: &Codebook, c1: &Codebook) -> (usize, usize, f64) {
    let n = c0.n;
    let d1 = c1.real_data().expect("Gaussian codebook");
    let mut best = (0, 0, f64::INFINITY);
    let mut t = vec![0.0; n];
    for i in 0..c0.len() {
        for ((tk, &xk), &ck) in t.iter_mut().zip(x).zip(c0.reals(i)) {
            *tk = xk - ck;
        }
        for (j, w) in d1.chunks_exact(n).enumerate() {
            let d = bounded_sq(&t, w, best.2);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// True iff every symbol's empirical frequency in `v` is within `eps` of
/// its probability under `dist`. Diagnostic only; the codecs never use it.
pub fn typicality_test(v: &[u16], dist: &SymbolDistribution, eps: f64) -> bool {
    let a = dist.alphabet();
    if v.is_empty() || v.iter().any(|&g| !a.contains(g)) {
        return false;
    }
    let mut counts = vec![0usize; a.order()];
    for &g in v {
        counts[g as usize] += 1;
    }
    let n = v.len() as f64;
    counts
        .iter()
        .zip(dist.probs())
        .all(|(&c, &p)| (c as f64 / n - p).abs() < eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_bits() -> CodebookMode {
        CodebookMode::Discrete(SymbolDistribution::uniform(GroupAlphabet::binary()))
    }

    fn book(words: &[&[u16]]) -> Codebook {
        let words: Vec<Vec<u16>> = words.iter().map(|w| w.to_vec()).collect();
        Codebook::from_discrete(SymbolDistribution::uniform(GroupAlphabet::binary()), &words)
            .unwrap()
    }

    #[test]
    fn size_rounding() {
        assert_eq!(codebook_size(4, 0.5, DEFAULT_CODEBOOK_CAP).unwrap(), 4);
        assert_eq!(codebook_size(10, 0.0, DEFAULT_CODEBOOK_CAP).unwrap(), 1);
        assert_eq!(codebook_size(1, 0.01, DEFAULT_CODEBOOK_CAP).unwrap(), 1);
        // 2^{log2 2.5} = 2.5 rounds half up.
        assert_eq!(codebook_size(1, 2.5f64.log2(), DEFAULT_CODEBOOK_CAP).unwrap(), 3);
        assert!(matches!(
            codebook_size(30, 1.0, DEFAULT_CODEBOOK_CAP),
            Err(Error::CapExceeded { .. })
        ));
        assert!(codebook_size(4, -1.0, DEFAULT_CODEBOOK_CAP).is_err());
    }

    #[test]
    fn generation_is_deterministic_and_prefix_stable() {
        for mode in [uniform_bits(), CodebookMode::Gaussian { variance: 2.0 }] {
            let a = Codebook::generate(4, 0.5, mode.clone(), 11).unwrap();
            let b = Codebook::generate(4, 0.5, mode.clone(), 11).unwrap();
            assert_eq!(a.len(), 4);
            assert_eq!(a, b);
            let big = Codebook::generate(4, 1.0, mode.clone(), 11).unwrap();
            for i in 0..a.len() {
                assert_eq!(a.word(i), big.word(i));
            }
            let other = Codebook::generate(4, 0.5, mode, 12).unwrap();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn empirical_frequency_of_biased_symbols() {
        let mode = CodebookMode::Discrete(SymbolDistribution::bernoulli(0.3).unwrap());
        let c = Codebook::generate(20, 0.65, mode, 5).unwrap();
        let total = c.len() * c.n();
        assert!(total >= 100_000);
        let ones: usize = (0..c.len()).map(|i| c.symbols(i).iter().filter(|&&s| s == 1).count()).sum();
        let f = ones as f64 / total as f64;
        let sigma = (0.3 * 0.7 / total as f64).sqrt();
        assert!((f - 0.3).abs() < 3.0 * sigma, "{f}");
    }

    #[test]
    fn nearest_codeword_examples() {
        let c = book(&[&[0, 0], &[1, 1]]);
        let m = nearest_codeword(Word::Discrete(&[0, 1]), &c).unwrap();
        assert_eq!((m.index, m.distance), (0, 1.0));
        let dup = book(&[&[1, 0], &[0, 1], &[0, 1]]);
        let m = nearest_codeword(Word::Discrete(&[0, 1]), &dup).unwrap();
        assert_eq!((m.index, m.distance), (1, 0.0));
        let single = book(&[&[1, 1, 1]]);
        assert_eq!(nearest_codeword(Word::Discrete(&[0, 0, 0]), &single).unwrap().index, 0);
        assert!(nearest_codeword(Word::Discrete(&[0, 1, 0]), &c).is_err());
        assert!(nearest_codeword(Word::Real(&[0.0, 1.0]), &c).is_err());
        assert!(nearest_codeword(Word::Discrete(&[0, 2]), &c).is_err());
    }

    #[test]
    fn nearest_superposed_examples() {
        let c0 = book(&[&[0, 0], &[1, 1]]);
        let c1 = book(&[&[0, 0]]);
        let m = nearest_superposed(Word::Discrete(&[0, 1]), &c0, &c1).unwrap();
        assert_eq!((m.i, m.j, m.distortion), (0, 0, 0.5));

        let c1 = book(&[&[1, 0], &[0, 1]]);
        let m = nearest_superposed(Word::Discrete(&[0, 0]), &c0, &c1).unwrap();
        assert_eq!((m.i, m.j), (0, 0));
        assert_eq!(m.distortion, 0.5);
        let m = nearest_superposed(Word::Discrete(&[1, 0]), &c0, &c1).unwrap();
        assert_eq!((m.i, m.j, m.distortion), (0, 0, 0.0));

        let err = nearest_superposed_with_cap(Word::Discrete(&[1, 0]), &c0, &c1, 3);
        assert!(matches!(err, Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn gaussian_superposed_exact_hit() {
        let c0 = Codebook::from_real(1.0, &[vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        let c1 = Codebook::from_real(1.0, &[vec![0.25, 0.25], vec![0.5, -0.5]]).unwrap();
        let m = nearest_superposed(Word::Real(&[-0.5, 0.0]), &c0, &c1).unwrap();
        assert_eq!((m.i, m.j), (1, 1));
        assert!(m.distortion < 1e-30);
    }

    #[test]
    fn typicality_examples() {
        let d = SymbolDistribution::bernoulli(0.5).unwrap();
        assert!(typicality_test(&[0, 1, 1, 0], &d, 1e-9));
        assert!(!typicality_test(&[0; 8], &d, 0.1));
        let four_ones = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        assert!(typicality_test(&four_ones, &d, 0.11));
    }

    #[test]
    fn dump_round_trip() {
        let g = GroupAlphabet::new(2).unwrap();
        let dist = SymbolDistribution::new(g, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = Codebook::generate(5, 0.6, CodebookMode::Discrete(dist), 3).unwrap();
        let mut buf = Vec::new();
        c.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("5 0.59999999999999998 8 discrete:"));
        assert_eq!(Codebook::read_dump(&buf[..]).unwrap(), c);

        let c = Codebook::generate(3, 1.0, CodebookMode::Gaussian { variance: 0.7 }, 9).unwrap();
        let mut buf = Vec::new();
        c.write_dump(&mut buf).unwrap();
        assert_eq!(Codebook::read_dump(&buf[..]).unwrap(), c);

        assert!(Codebook::read_dump(&b"3 1 2 gaussian:1 0\n0 0 0\n"[..]).is_err());
        assert!(Codebook::read_dump(&b"3 1 1 foo 0\n0 0 0\n"[..]).is_err());
    }

    fn brute_min(v: &[u16], c: &Codebook) -> u32 {
        (0..c.len())
            .map(|i| {
                let mut d = 0;
                for k in 0..v.len() {
                    if v[k] != c.symbols(i)[k] {
                        d += 1;
                    }
                }
                d
            })
            .min()
            .unwrap()
    }

    proptest! {
        #[test]
        fn regeneration_is_bit_exact(n in 1usize..12, rate in 0.0f64..1.2, seed: u64, l in 1u32..=3, g in any::<bool>()) {
            let mode = if g {
                CodebookMode::Gaussian { variance: 1.5 }
            } else {
                CodebookMode::Discrete(SymbolDistribution::uniform(GroupAlphabet::new(l).unwrap()))
            };
            let a = Codebook::generate(n, rate, mode.clone(), seed).unwrap();
            let b = Codebook::generate(n, rate, mode, seed).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn nearest_matches_scalar_loop(n in 1usize..70, seed: u64, l in 1u32..=2, target_seed: u64) {
            let g = GroupAlphabet::new(l).unwrap();
            let c = Codebook::generate(n, 6.0 / n as f64, CodebookMode::Discrete(SymbolDistribution::uniform(g)), seed).unwrap();
            let mut rng = SplitMix64::new(target_seed);
            let v: Vec<u16> = (0..n).map(|_| rng.next_below(g.order()) as u16).collect();
            let m = nearest_codeword(Word::Discrete(&v), &c).unwrap();
            prop_assert_eq!(m.distance as u32, brute_min(&v, &c));
            prop_assert_eq!(hamming(&v, c.symbols(m.index)), m.distance as u32);
            for i in 0..m.index {
                prop_assert!(hamming(&v, c.symbols(i)) > m.distance as u32);
            }
        }

        #[test]
        fn superposed_distortion_is_permutation_invariant(seed: u64, n in 2usize..10, shift in 1usize..7) {
            let c0 = Codebook::generate(n, 0.4, uniform_bits(), seed).unwrap();
            let c1 = Codebook::generate(n, 0.4, uniform_bits(), seed ^ 1).unwrap();
            let rot = |c: &Codebook| {
                let mut w: Vec<Vec<u16>> = (0..c.len()).map(|i| c.symbols(i).to_vec()).collect();
                let k = shift % w.len();
                w.rotate_left(k);
                Codebook::from_discrete(SymbolDistribution::uniform(GroupAlphabet::binary()), &w).unwrap()
            };
            let mut rng = SplitMix64::new(seed);
            let x: Vec<u16> = (0..n).map(|_| rng.next_below(2) as u16).collect();
            let a = nearest_superposed(Word::Discrete(&x), &c0, &c1).unwrap();
            let b = nearest_superposed(Word::Discrete(&x), &rot(&c0), &rot(&c1)).unwrap();
            prop_assert_eq!(a.distortion, b.distortion);
        }

        #[test]
        fn hamming_is_shift_invariant(l in 1u32..=4, words in prop::collection::vec((any::<u16>(), any::<u16>()), 1..30), g: u16) {
            let a = GroupAlphabet::new(l).unwrap();
            let x: Vec<u16> = words.iter().map(|w| w.0 & a.mask()).collect();
            let y: Vec<u16> = words.iter().map(|w| w.1 & a.mask()).collect();
            let g = g & a.mask();
            let xs: Vec<u16> = x.iter().map(|&s| a.add(s, g)).collect();
            let ys: Vec<u16> = y.iter().map(|&s| a.add(s, g)).collect();
            prop_assert_eq!(hamming(&x, &y), hamming(&xs, &ys));
        }

        #[test]
        fn superposed_never_worse_than_c0_alone(seed: u64, n in 2usize..12) {
            let c0 = Codebook::generate(n, 0.5, uniform_bits(), seed).unwrap();
            let mut c1w = vec![vec![0u16; n]];
            let extra = Codebook::generate(n, 0.3, uniform_bits(), seed ^ 7).unwrap();
            c1w.extend((0..extra.len()).map(|i| extra.symbols(i).to_vec()));
            let c1 = Codebook::from_discrete(SymbolDistribution::uniform(GroupAlphabet::binary()), &c1w).unwrap();
            let mut rng = SplitMix64::new(!seed);
            let x: Vec<u16> = (0..n).map(|_| rng.next_below(2) as u16).collect();
            let s = nearest_superposed(Word::Discrete(&x), &c0, &c1).unwrap();
            let o = nearest_codeword(Word::Discrete(&x), &c0).unwrap();
            prop_assert!(s.distortion <= o.distance / n as f64);
        }
    }
}
