use super::{check_probability, plogp};
use crate::error::{Error, Result};

const BISECTION_MAX_ITERS: usize = 200;
const BRACKET_EPS: f64 = 1e-9;

/// `H(t) = -t log2 t - (1 - t) log2 (1 - t)`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    check_probability("t", t)?;
    Ok(plogp(t) + plogp(1.0 - t))
}

/// `dH/dt = log2((1 - t) / t)` on the open interval.
pub fn binary_entropy_derivative(t: f64) -> f64 {
    ((1.0 - t) / t).log2()
}

/// Binary convolution `a * b = a (1 - b) + b (1 - a)`.
#[inline]
pub fn binary_conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

fn check_crossover(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::param("p", format!("must lie in (0, 1/2), got {p}")));
    }
    Ok(())
}

/// `H(p * D) - H(D)`, the superposition corner rate before time-sharing.
pub fn wz_rd_curve(p: f64, distortion: f64) -> f64 {
    let h = |t: f64| plogp(t) + plogp(1.0 - t);
    h(binary_conv(p, distortion)) - h(distortion)
}

/// Tangency residual at `D`: slope of the curve minus the slope of the
/// chord from `(D, R(D))` to `(p, 0)`.
pub fn time_sharing_residual(p: f64, distortion: f64) -> f64 {
    let s = binary_conv(p, distortion);
    let slope = (1.0 - 2.0 * p) * binary_entropy_derivative(s)
        - binary_entropy_derivative(distortion);
    slope - wz_rd_curve(p, distortion) / (distortion - p)
}

/// Distortion `D'` below which `H(p * D) - H(D)` is the Wyner-Ziv rate and
/// above which the rate is the chord to `(p, 0)`. Found by bisection on
/// [`time_sharing_residual`], which is negative near `0` and positive near `p`.
pub fn time_sharing_threshold(p: f64) -> Result<f64> {
    check_crossover(p)?;
    let (mut lo, mut hi) = (BRACKET_EPS, p - BRACKET_EPS);
    let (f_lo, f_hi) = (time_sharing_residual(p, lo), time_sharing_residual(p, hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if time_sharing_residual(p, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever endpoint has the smaller residual.
    if time_sharing_residual(p, lo).abs() <= time_sharing_residual(p, hi).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// Binary Wyner-Ziv rate-distortion function for a doubly symmetric source
/// with crossover `p`, including the time-sharing segment on `(D', p]`.
pub fn binary_wz_rd(p: f64, distortion: f64) -> Result<f64> {
    check_crossover(p)?;
    if !(0.0..=p).contains(&distortion) {
        return Err(Error::InvalidDistortion {
            value: distortion,
            reason: format!("must lie in [0, p = {p}]"),
        });
    }
    let knee = time_sharing_threshold(p)?;
    if distortion <= knee {
        Ok(wz_rd_curve(p, distortion))
    } else {
        Ok(wz_rd_curve(p, knee) * (p - distortion) / (p - knee))
    }
}

/// Operating point of the binary dirty-paper scheme for crossover `p` and
/// Hamming-weight cost `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpcBinaryParams {
    pub p: f64,
    pub w: f64,
    /// Bernoulli parameter of `C1` with `p * q_star = W`.
    pub q_star: f64,
    /// `1 - H(W)`: rate `C0` needs so that `S - C1` is covered within `W`.
    pub r_half_w: f64,
    /// `H(p * q_star) - H(p)`.
    pub cap_p_q: f64,
    /// `H(W) - H(p)`.
    pub r1_star: f64,
}

pub fn dpc_binary_params(p: f64, w: f64) -> Result<DpcBinaryParams> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::param("p", format!("must lie in [0, 1/2), got {p}")));
    }
    if !(p..=0.5).contains(&w) {
        return Err(Error::param("w", format!("must lie in [p, 1/2], got {w}")));
    }
    let q_star = ((w - p) / (1.0 - 2.0 * p)).clamp(0.0, 0.5);
    let h_p = binary_entropy(p)?;
    let h_w = binary_entropy(w)?;
    Ok(DpcBinaryParams {
        p,
        w,
        q_star,
        r_half_w: 1.0 - h_w,
        cap_p_q: binary_entropy(binary_conv(p, q_star))? - h_p,
        r1_star: h_w - h_p,
    })
}
