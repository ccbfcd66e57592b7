//! Closed-form information-theoretic quantities for the superposition
//! schemes: entropies over a finite group, group convolutions of additive
//! noises, the two-code rate region, the binary Wyner-Ziv rate-distortion
//! function with its time-sharing segment, the binary dirty-paper operating
//! point, and the Gaussian scaling constants.
//!
//! Everything here is a pure function of its inputs and evaluated in double
//! precision. Logarithms are base 2 and `0 log 0 = 0`.

mod alphabet;
mod binary;
mod gaussian;

pub use alphabet::{GroupAlphabet, SymbolDistribution, MAX_BITS};
pub use binary::{
    binary_conv, binary_entropy, binary_entropy_derivative, binary_wz_rd, dpc_binary_params,
    time_sharing_residual, time_sharing_threshold, wz_rd_curve, DpcBinaryParams,
};
pub use gaussian::{
    beta_scale, gaussian_rate_region, gaussian_wz_rate, GaussianWzParams,
};

use crate::error::{Error, Result};

pub(crate) use alphabet::check_probability;

/// Tolerance on the strict inequality deciding whether a region is empty.
pub const REGION_TOLERANCE: f64 = 1e-12;

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits.
pub fn entropy(dist: &SymbolDistribution) -> f64 {
    dist.probs().iter().map(|&p| plogp(p)).sum()
}

/// Law of `A + B` for independent `A ~ a`, `B ~ b`:
/// `(a * b)(g) = sum_h a(h) b(g - h)`.
pub fn convolve(a: &SymbolDistribution, b: &SymbolDistribution) -> Result<SymbolDistribution> {
    a.ensure_same_alphabet(b)?;
    let g = a.alphabet();
    let m = g.order();
    if a.is_uniform(0.0) || b.is_uniform(0.0) {
        return Ok(SymbolDistribution::uniform(g));
    }
    let (pa, pb) = (a.probs(), b.probs());
    let mut out = vec![0.0; m];
    for (h, &ah) in pa.iter().enumerate() {
        if ah == 0.0 {
            continue;
        }
        for (k, &bk) in pb.iter().enumerate() {
            out[g.add(h as u16, k as u16) as usize] += ah * bk;
        }
    }
    Ok(SymbolDistribution::from_parts(g, out))
}

/// Largest distortion for which the quantisation-noise law is defined.
pub fn max_distortion(alphabet: GroupAlphabet) -> f64 {
    let m = alphabet.order() as f64;
    (m - 1.0) / m
}

/// The quantisation-noise law: `1 - D` on the identity and `D / (2^l - 1)`
/// on every other symbol.
pub fn d_distribution(alphabet: GroupAlphabet, distortion: f64) -> Result<SymbolDistribution> {
    check_distortion(alphabet, distortion)?;
    SymbolDistribution::symmetric(alphabet, distortion)
}

fn check_distortion(alphabet: GroupAlphabet, distortion: f64) -> Result<()> {
    let hi = max_distortion(alphabet);
    if !(0.0..=hi).contains(&distortion) {
        return Err(Error::InvalidDistortion {
            value: distortion,
            reason: format!("must lie in [0, {hi}]"),
        });
    }
    Ok(())
}

/// Bounds of the error-free region for the two superposed codes.
///
/// Encoding succeeds asymptotically when `R0 > r0_min` and
/// `R0 + R1 > sum_min`; decoding succeeds when `R0 <= r0_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WzRateRegion {
    /// `l - H(q * d)`.
    pub r0_min: f64,
    /// `R_U(D) = l - H(d)`.
    pub sum_min: f64,
    /// `C_{p*d} = l - H(p * d)`.
    pub r0_max: f64,
    /// Smallest `R1` in the region, `max(0, sum_min - r0_max)`.
    pub r1_corner: f64,
    pub nonempty: bool,
}

impl WzRateRegion {
    /// Whether `(r0, r1)` satisfies all three bounds strictly.
    pub fn contains(&self, r0: f64, r1: f64) -> bool {
        r0 > self.r0_min && r0 + r1 > self.sum_min && r0 < self.r0_max
    }
}

pub fn wz_rate_region(
    l: u32,
    p: &SymbolDistribution,
    q: &SymbolDistribution,
    distortion: f64,
) -> Result<WzRateRegion> {
    p.ensure_same_alphabet(q)?;
    let alphabet = p.alphabet();
    if alphabet.bits() != l {
        return Err(Error::AlphabetMismatch {
            left: 1usize << l.min(MAX_BITS),
            right: alphabet.order(),
        });
    }
    let d = d_distribution(alphabet, distortion)?;
    let bits = l as f64;
    let h_qd = entropy(&convolve(q, &d)?);
    let h_pd = entropy(&convolve(p, &d)?);
    let r0_min = (bits - h_qd).max(0.0);
    let sum_min = (bits - entropy(&d)).max(0.0);
    let r0_max = (bits - h_pd).max(0.0);
    Ok(WzRateRegion {
        r0_min,
        sum_min,
        r0_max,
        r1_corner: (sum_min - r0_max).max(0.0),
        nonempty: h_qd - h_pd > REGION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bern(p: f64) -> SymbolDistribution {
        SymbolDistribution::bernoulli(p).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let g4 = GroupAlphabet::new(2).unwrap();
        assert_eq!(entropy(&SymbolDistribution::uniform(g4)), 2.0);
        assert_eq!(entropy(&SymbolDistribution::point_mass(g4, 2).unwrap()), 0.0);
        let d = SymbolDistribution::new(g4, vec![0.5, 0.25, 0.25, 0.0]).unwrap();
        assert_eq!(entropy(&d), 1.5);
    }

    #[test]
    fn convolve_examples() {
        let g = GroupAlphabet::new(2).unwrap();
        let p = SymbolDistribution::new(g, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let id = SymbolDistribution::point_mass(g, 0).unwrap();
        assert_eq!(convolve(&id, &p).unwrap().probs(), p.probs());
        let u = convolve(&SymbolDistribution::uniform(g), &p).unwrap();
        assert!(u.is_uniform(1e-15));
        let b = convolve(&bern(0.1), &bern(0.1)).unwrap();
        assert!((b.prob(0) - 0.82).abs() < 1e-15);
        assert!((b.prob(1) - 0.18).abs() < 1e-15);
        assert!(matches!(
            convolve(&bern(0.1), &p),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn d_distribution_examples() {
        let g1 = GroupAlphabet::binary();
        let g2 = GroupAlphabet::new(2).unwrap();
        assert_eq!(d_distribution(g1, 0.0).unwrap().probs(), &[1.0, 0.0]);
        assert_eq!(d_distribution(g1, 0.2).unwrap().probs(), &[0.8, 0.2]);
        let d = d_distribution(g2, 0.3).unwrap();
        for (a, b) in d.probs().iter().zip([0.7, 0.1, 0.1, 0.1]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(d_distribution(g1, 0.6).is_err());
        assert!(d_distribution(g2, 0.76).is_err());
        assert!(d_distribution(g1, -0.1).is_err());
    }

    #[test]
    fn region_binary_example() {
        // Frozen from 50-digit evaluation of 1 - H(0.1) and 1 - H(0.26).
        let r = wz_rate_region(1, &bern(0.2), &bern(0.5), 0.1).unwrap();
        assert!(r.r0_min.abs() < 1e-15);
        assert!((r.sum_min - 0.531_004_406_410_718_78).abs() < 1e-12);
        assert!((r.r0_max - 0.173_253_627_507_382_10).abs() < 1e-12);
        assert!((r.r1_corner - 0.357_750_778_903_336_67).abs() < 1e-12);
        assert!(r.nonempty);
        assert!(r.contains(0.1, 0.5));
        assert!(!r.contains(0.2, 0.5));
    }

    #[test]
    fn region_degenerate_cases() {
        let r = wz_rate_region(1, &bern(0.2), &bern(0.3), 0.0).unwrap();
        assert_eq!(r.sum_min, 1.0);
        assert!((r.r0_max - (1.0 - binary_entropy(0.2).unwrap())).abs() < 1e-15);

        let g = GroupAlphabet::new(2).unwrap();
        let p = SymbolDistribution::symmetric(g, 0.2).unwrap();
        let r = wz_rate_region(2, &p, &SymbolDistribution::uniform(g), 0.3).unwrap();
        assert!(r.r0_min.abs() < 1e-12);
        assert!(r.nonempty);

        assert!(wz_rate_region(2, &bern(0.2), &bern(0.5), 0.1).is_err());
        assert!(wz_rate_region(1, &bern(0.2), &bern(0.5), 0.7).is_err());
    }

    fn dist_strategy(bits: u32) -> impl Strategy<Value = SymbolDistribution> {
        let m = 1usize << bits;
        prop::collection::vec(0.0f64..1.0, m).prop_filter_map("zero mass", move |w| {
            let total: f64 = w.iter().sum();
            if total < 1e-6 {
                return None;
            }
            let probs = w.iter().map(|x| x / total).collect();
            SymbolDistribution::new(GroupAlphabet::new(bits).unwrap(), probs).ok()
        })
    }

    proptest! {
        #[test]
        fn convolution_commutes_and_adds_entropy(
            (a, b) in (1u32..=3).prop_flat_map(|l| (dist_strategy(l), dist_strategy(l)))
        ) {
            let ab = convolve(&a, &b).unwrap();
            let ba = convolve(&b, &a).unwrap();
            for (x, y) in ab.probs().iter().zip(ba.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let h = entropy(&ab);
            prop_assert!(h >= entropy(&a).max(entropy(&b)) - 1e-12);
            prop_assert!(h <= a.alphabet().bits() as f64 + 1e-12);
        }

        #[test]
        fn uniform_q_region_is_nonempty(
            (p, dd) in (1u32..=3).prop_flat_map(|l| (dist_strategy(l), 0.0f64..1.0))
        ) {
            let g = p.alphabet();
            let dist = dd * max_distortion(g);
            let r = wz_rate_region(g.bits(), &p, &SymbolDistribution::uniform(g), dist).unwrap();
            let h_pd = entropy(&convolve(&p, &d_distribution(g, dist).unwrap()).unwrap());
            if h_pd < g.bits() as f64 - 1e-9 {
                prop_assert!(r.nonempty);
            }
            prop_assert!(r.r0_max >= 0.0 && r.r0_max <= g.bits() as f64);
            prop_assert!(r.sum_min >= 0.0 && r.sum_min <= g.bits() as f64);
        }
    }
}
