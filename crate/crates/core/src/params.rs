use crate::error::{Error, Result};

/// Space dimension of the radial reduction. Carried as a parameter but the
/// artifact only supports the axisymmetric plane case.
pub const DIM: usize = 2;

/// Adiabatic exponent, similarity exponent, and every constant derived from
/// them that the phase plane and the diagnostics need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    /// alpha = (gamma - 1) / 2
    pub alpha: f64,
    /// l = 1 / alpha
    pub l: f64,
    pub d: usize,
    /// blowup speed
    pub r: f64,
    /// W_e = l (r - 1) / d, the phase-plane limit of W at the origin
    pub w_e: f64,
    /// admissible bracket for r
    pub r_lo: f64,
    pub r_hi: f64,
    /// sound-speed blowup exponent (r-1)/r
    pub exponent_sigma: f64,
    /// vorticity blowup exponent (r-1)/(alpha r)
    pub exponent_omega: f64,
}

/// Admissible bracket for the blowup speed at a given alpha. The branch
/// switches at alpha = 1/2: above it the window is (1, r_eye) with
/// r_eye = (1+2a)/(1+a*sqrt(2)); below it the window sits between that
/// value and 1 + a/(sqrt(a)+1)^2.
pub fn admissible_bracket(alpha: f64) -> (f64, f64) {
    let mid = (1.0 + 2.0 * alpha) / (1.0 + alpha * std::f64::consts::SQRT_2);
    if alpha >= 0.5 {
        (1.0, mid)
    } else {
        (mid, 1.0 + alpha / (alpha.sqrt() + 1.0).powi(2))
    }
}

impl ModelParams {
    /// Parameters with `r` validated against the admissible bracket.
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        let p = Self::new_unchecked(gamma, r)?;
        if !(r > p.r_lo && r < p.r_hi) {
            return Err(Error::BadSpeed {
                r,
                lo: p.r_lo,
                hi: p.r_hi,
            });
        }
        Ok(p)
    }

    /// Parameters without the bracket check on `r`. The phase-plane field is
    /// a total function of (gamma, r); only the shooting needs admissibility.
    pub fn new_unchecked(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::BadGamma(gamma));
        }
        let alpha = 0.5 * (gamma - 1.0);
        let l = 1.0 / alpha;
        let (r_lo, r_hi) = admissible_bracket(alpha);
        Ok(ModelParams {
            gamma,
            alpha,
            l,
            d: DIM,
            r,
            w_e: l * (r - 1.0) / DIM as f64,
            r_lo,
            r_hi,
            exponent_sigma: (r - 1.0) / r,
            exponent_omega: (r - 1.0) / (alpha * r),
        })
    }

    /// Copy with a different blowup speed (used by the bisection loop).
    pub fn with_r(&self, r: f64) -> Self {
        let mut p = *self;
        p.r = r;
        p.w_e = p.l * (r - 1.0) / p.d as f64;
        p.exponent_sigma = (r - 1.0) / r;
        p.exponent_omega = (r - 1.0) / (p.alpha * r);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bracket_gamma3_matches_closed_form() {
        // alpha = 1 > 1/2: window (1, 3/(1+sqrt(2)))
        let (lo, hi) = admissible_bracket(1.0);
        assert_eq!(lo, 1.0);
        assert_relative_eq!(hi, 3.0 / (1.0 + std::f64::consts::SQRT_2), epsilon = 1e-15);
    }

    #[test]
    fn bracket_gamma_5_3_is_narrow_upper_branch() {
        let (lo, hi) = admissible_bracket(1.0 / 3.0);
        assert!(lo > 1.13 && lo < 1.14, "lo = {lo}");
        assert!(hi > lo && hi < 1.14, "hi = {hi}");
        let a: f64 = 1.0 / 3.0;
        assert_relative_eq!(hi, 1.0 + a / (a.sqrt() + 1.0).powi(2), epsilon = 1e-15);
    }

    #[test]
    fn derived_constants() {
        let p = ModelParams::new(3.0, 1.2).unwrap();
        assert_relative_eq!(p.alpha, 1.0);
        assert_relative_eq!(p.l, 1.0);
        // W_e = (r-1)/(2 alpha) in 2D
        assert_relative_eq!(p.w_e, 0.1, epsilon = 1e-15);
        assert_relative_eq!(p.l * p.alpha, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.exponent_omega, 0.2 / 1.2, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_speed_and_gamma() {
        assert!(ModelParams::new(3.0, 1.3).is_err());
        assert!(ModelParams::new(0.9, 1.1).is_err());
        assert!(ModelParams::new(3.0, 0.9).is_err());
    }
}
