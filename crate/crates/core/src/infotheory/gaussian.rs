use super::WzRateRegion;
use crate::error::{Error, Result};

/// `(1/2) log2(P_Z / D)`, the Gaussian Wyner-Ziv rate.
pub fn gaussian_wz_rate(p_z: f64, distortion: f64) -> Result<f64> {
    if p_z.is_nan() || p_z <= 0.0 {
        return Err(Error::param("p_z", format!("must be positive, got {p_z}")));
    }
    if !(distortion > 0.0 && distortion <= p_z) {
        return Err(Error::InvalidDistortion {
            value: distortion,
            reason: format!("must lie in (0, P_Z = {p_z}]"),
        });
    }
    Ok(0.5 * (p_z / distortion).log2())
}

/// `sqrt(1 - D / P_Z)`.
pub fn beta_scale(p_z: f64, distortion: f64) -> Result<f64> {
    if p_z.is_nan() || p_z <= 0.0 {
        return Err(Error::param("p_z", format!("must be positive, got {p_z}")));
    }
    if !(0.0..=p_z).contains(&distortion) {
        return Err(Error::InvalidDistortion {
            value: distortion,
            reason: format!("must lie in [0, P_Z = {p_z}]"),
        });
    }
    Ok((1.0 - distortion / p_z).sqrt())
}

/// Powers and scaling of the dithered Gaussian scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWzParams {
    /// Variance of the side information `Y`.
    pub p_y: f64,
    /// Variance of the correlation noise `Z`.
    pub p_z: f64,
    /// Target mean-squared distortion, also the dither variance.
    pub d: f64,
    /// Symbol variance of `C1`.
    pub q: f64,
    /// Symbol variance of `C0`.
    pub p0: f64,
    pub beta: f64,
}

impl GaussianWzParams {
    /// `p0` defaults to `P_Z + Q` when not given.
    pub fn new(p_y: f64, p_z: f64, d: f64, q: f64, p0: Option<f64>) -> Result<Self> {
        if !(p_y >= 0.0 && p_y.is_finite()) {
            return Err(Error::param("p_y", format!("must be non-negative, got {p_y}")));
        }
        if !(d > 0.0 && d <= p_z) {
            return Err(Error::InvalidDistortion {
                value: d,
                reason: format!("must lie in (0, P_Z = {p_z}]"),
            });
        }
        if !(q.is_finite() && q >= 0.0 && q + d > p_z) {
            return Err(Error::param(
                "q",
                format!("C1 variance {q} must satisfy Q + D > P_Z"),
            ));
        }
        let p0 = p0.unwrap_or(p_z + q);
        if !(p0.is_finite() && p0 > 0.0) {
            return Err(Error::param("p0", format!("must be positive, got {p0}")));
        }
        Ok(Self {
            p_y,
            p_z,
            d,
            q,
            p0,
            beta: beta_scale(p_z, d)?,
        })
    }

    /// Variance of the encoder input `beta X + U`.
    pub fn encoder_input_power(&self) -> f64 {
        self.beta * self.beta * (self.p_y + self.p_z) + self.d
    }
}

/// Gaussian counterpart of [`super::wz_rate_region`] for Gaussian codebooks.
///
/// With `P_W = beta^2 (P_Y + P_Z) + D` the power of `beta X + U`:
/// `r0_min = (1/2) log2(P_W / (Q + D))`, `sum_min = (1/2) log2(P_W / D)` and
/// `r0_max = (1/2) log2(1 + P0 / P_Z)`, the last because the decoder sees a
/// `C0` codeword through additive noise of power `beta^2 P_Z + D = P_Z`.
/// When `P0 + P_Z = P_W` the corner rate equals [`gaussian_wz_rate`].
pub fn gaussian_rate_region(params: &GaussianWzParams) -> WzRateRegion {
    let p_w = params.encoder_input_power();
    let r0_min = (0.5 * (p_w / (params.q + params.d)).log2()).max(0.0);
    let sum_min = 0.5 * (p_w / params.d).log2();
    let r0_max = 0.5 * (1.0 + params.p0 / params.p_z).log2();
    WzRateRegion {
        r0_min,
        sum_min,
        r0_max,
        r1_corner: (sum_min - r0_max).max(0.0),
        nonempty: r0_max - r0_min > super::REGION_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        assert_eq!(gaussian_wz_rate(1.0, 0.25).unwrap(), 1.0);
        assert_eq!(gaussian_wz_rate(3.0, 3.0).unwrap(), 0.0);
        assert_eq!(gaussian_wz_rate(2.0, 0.5).unwrap(), 1.0);
        assert!(gaussian_wz_rate(1.0, 1.5).is_err());
        assert!(gaussian_wz_rate(1.0, 0.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_scale(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(beta_scale(2.0, 2.0).unwrap(), 0.0);
        assert!((beta_scale(1.0, 0.19).unwrap() - 0.9).abs() < 1e-15);
        assert!(beta_scale(1.0, 1.1).is_err());
    }

    #[test]
    fn power_identities() {
        for (pz, d) in [(1.0, 0.1), (1.0, 0.25), (2.0, 0.5), (3.0, 2.9), (0.7, 0.7)] {
            let b = beta_scale(pz, d).unwrap();
            let b2 = b * b;
            assert!((b2 * d + (1.0 - b2) * (1.0 - b2) * pz - d).abs() < 1e-12);
            assert!((b2 * pz + d - pz).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        let p = GaussianWzParams::new(1.0, 1.0, 0.25, 1.25, None).unwrap();
        assert_eq!(p.p0, 2.25);
        assert!((p.beta - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(GaussianWzParams::new(1.0, 1.0, 0.25, 0.75, None).is_err());
        assert!(GaussianWzParams::new(1.0, 1.0, 1.25, 1.0, None).is_err());
        assert!(GaussianWzParams::new(-1.0, 1.0, 0.25, 1.0, None).is_err());
    }

    #[test]
    fn region_corner_at_covering_power() {
        let (py, pz, d, q) = (3.0, 1.0, 0.25, 1.25);
        let b2 = 1.0 - d / pz;
        let p0 = b2 * (py + pz) + d - pz;
        let params = GaussianWzParams::new(py, pz, d, q, Some(p0)).unwrap();
        let r = gaussian_rate_region(&params);
        assert!((r.r1_corner - gaussian_wz_rate(pz, d).unwrap()).abs() < 1e-12);
        assert!(r.nonempty);
    }
}
