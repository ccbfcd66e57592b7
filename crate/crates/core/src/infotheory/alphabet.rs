use crate::error::{Error, Result};

/// Largest supported symbol width; distributions hold `2^l` probabilities.
pub const MAX_BITS: u32 = 16;

const SUM_TOLERANCE: f64 = 1e-12;

/// The cyclic group of `2^l` elements under addition modulo `2^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupAlphabet {
    bits: u32,
}

impl GroupAlphabet {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::param(
                "l",
                format!("symbol width must be in 1..={MAX_BITS}, got {bits}"),
            ));
        }
        Ok(Self { bits })
    }

    pub fn binary() -> Self {
        Self { bits: 1 }
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of elements, `2^l`.
    pub fn order(&self) -> usize {
        1usize << self.bits
    }

    #[inline]
    pub fn mask(&self) -> u16 {
        (self.order() - 1) as u16
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a.wrapping_add(b) & self.mask()
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        a.wrapping_sub(b) & self.mask()
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        0u16.wrapping_sub(a) & self.mask()
    }

    pub fn contains(&self, g: u16) -> bool {
        (g as usize) < self.order()
    }

    pub fn add_words(&self, a: &[u16], b: &[u16]) -> Vec<u16> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_words(&self, a: &[u16], b: &[u16]) -> Vec<u16> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }
}

/// A probability vector over the elements of a [`GroupAlphabet`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    alphabet: GroupAlphabet,
    probs: Vec<f64>,
}

impl SymbolDistribution {
    pub fn new(alphabet: GroupAlphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.order() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities, got {}",
                alphabet.order(),
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probability {bad} is negative or not finite"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { alphabet, probs })
    }

    pub(crate) fn from_parts(alphabet: GroupAlphabet, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), alphabet.order());
        Self { alphabet, probs }
    }

    pub fn uniform(alphabet: GroupAlphabet) -> Self {
        let m = alphabet.order();
        Self {
            alphabet,
            probs: vec![1.0 / m as f64; m],
        }
    }

    pub fn point_mass(alphabet: GroupAlphabet, at: u16) -> Result<Self> {
        if !alphabet.contains(at) {
            return Err(Error::param("at", format!("{at} outside the alphabet")));
        }
        let mut probs = vec![0.0; alphabet.order()];
        probs[at as usize] = 1.0;
        Ok(Self { alphabet, probs })
    }

    /// Binary distribution `{1 - p, p}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            alphabet: GroupAlphabet::binary(),
            probs: vec![1.0 - p, p],
        })
    }

    /// Mass `1 - t` on the identity and `t / (2^l - 1)` on every other symbol.
    pub fn symmetric(alphabet: GroupAlphabet, t: f64) -> Result<Self> {
        check_probability("t", t)?;
        let m = alphabet.order();
        let mut probs = vec![t / (m - 1) as f64; m];
        probs[0] = 1.0 - t;
        Ok(Self { alphabet, probs })
    }

    pub fn alphabet(&self) -> GroupAlphabet {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, g: u16) -> f64 {
        self.probs[g as usize]
    }

    /// The law of `-Z` when `Z` has this law: `p'(g) = p(-g)`.
    pub fn reflect(&self) -> Self {
        let a = self.alphabet;
        let probs = (0..a.order() as u16)
            .map(|g| self.probs[a.neg(g) as usize])
            .collect();
        Self { alphabet: a, probs }
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= tol)
    }

    /// Running sums in index order, used for inverse-CDF sampling.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub(crate) fn ensure_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.order(),
                right: other.alphabet.order(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_is_cyclic() {
        let g = GroupAlphabet::new(2).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.add(3, 2), 1);
        assert_eq!(g.sub(1, 3), 2);
        for a in 0..4 {
            assert_eq!(g.add(a, 0), a);
            assert_eq!(g.add(a, g.neg(a)), 0);
        }
        assert!(GroupAlphabet::new(0).is_err());
        assert!(GroupAlphabet::new(MAX_BITS + 1).is_err());
    }

    #[test]
    fn rejects_bad_vectors() {
        let g = GroupAlphabet::binary();
        assert!(SymbolDistribution::new(g, vec![0.5, 0.6]).is_err());
        assert!(SymbolDistribution::new(g, vec![1.2, -0.2]).is_err());
        assert!(SymbolDistribution::new(g, vec![1.0]).is_err());
        assert!(SymbolDistribution::bernoulli(1.5).is_err());
    }

    #[test]
    fn reflect_negates_support() {
        let g = GroupAlphabet::new(2).unwrap();
        let d = SymbolDistribution::new(g, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        assert_eq!(d.reflect().probs(), &[0.4, 0.1, 0.2, 0.3]);
    }
}
