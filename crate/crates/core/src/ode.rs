//! Embedded Dormand-Prince 5(4) pair with PI step-size control.
//!
//! Small fixed-dimension states only; the phase-plane system is 2D and the
//! Lagrangian trajectories are 1D.

use crate::error::{Error, Result};

/// Right-hand side of an autonomous or non-autonomous system of dimension N.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, x: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> OdeSystem<N> for F {
    fn rhs(&self, x: f64, y: &[f64; N]) -> [f64; N] {
        self(x, y)
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub struct AdaptiveRk {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for AdaptiveRk {
    fn default() -> Self {
        AdaptiveRk {
            rtol: 1e-11,
            atol: 1e-14,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 0.1,
        }
    }
}

pub struct StepOutcome<const N: usize> {
    pub x: f64,
    pub y: [f64; N],
    /// step actually taken
    pub h_used: f64,
}

impl AdaptiveRk {
    /// Advance one accepted step (|h| adapted, sign of `dir` = +-1), never
    /// stepping past `x_limit`.
    pub fn step<const N: usize, S: OdeSystem<N>>(
        &self,
        sys: &S,
        x: f64,
        y: &[f64; N],
        h_try: f64,
        dir: f64,
        x_limit: f64,
        err_prev: &mut f64,
    ) -> Result<(StepOutcome<N>, f64)> {
        let mut h = h_try.abs().clamp(self.h_min, self.h_max);
        for _ in 0..60 {
            // clamp to the limit
            let remaining = (x_limit - x) * dir;
            if remaining <= 0.0 {
                return Ok((
                    StepOutcome {
                        x,
                        y: *y,
                        h_used: 0.0,
                    },
                    h,
                ));
            }
            let h_eff = h.min(remaining);
            let hs = h_eff * dir;

            let mut k = [[0.0; N]; 7];
            k[0] = sys.rhs(x, y);
            for i in 1..7 {
                let mut yi = *y;
                for (j, kj) in k.iter().enumerate().take(i) {
                    let a = A[i][j];
                    if a != 0.0 {
                        for n in 0..N {
                            yi[n] += hs * a * kj[n];
                        }
                    }
                }
                k[i] = sys.rhs(x + C[i] * hs, &yi);
            }
            let mut y5 = *y;
            let mut y4 = *y;
            for (j, kj) in k.iter().enumerate() {
                for n in 0..N {
                    y5[n] += hs * B5[j] * kj[n];
                    y4[n] += hs * B4[j] * kj[n];
                }
            }
            // error norm
            let mut err: f64 = 0.0;
            for n in 0..N {
                let sc = self.atol + self.rtol * y[n].abs().max(y5[n].abs());
                let e = (y5[n] - y4[n]) / sc;
                err += e * e;
            }
            let err = (err / N as f64).sqrt().max(1e-30);

            if err <= 1.0 || h_eff <= self.h_min * 1.0001 {
                // PI controller
                let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                let fac = fac.clamp(0.2, 5.0);
                *err_prev = err;
                let h_next = (h_eff * fac).clamp(self.h_min, self.h_max);
                if !y5.iter().all(|v| v.is_finite()) {
                    return Err(Error::StepFailure { x, h: h_eff });
                }
                return Ok((
                    StepOutcome {
                        x: x + hs,
                        y: y5,
                        h_used: h_eff,
                    },
                    h_next,
                ));
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h = (h_eff * fac).max(self.h_min);
            if h <= self.h_min * 1.0001 && err > 100.0 {
                return Err(Error::StepFailure { x, h });
            }
        }
        Err(Error::StepFailure { x, h })
    }

    /// Integrate from `x0` to exactly `x_end`, calling `on_step` after each
    /// accepted step; `on_step` may stop the run by returning false.
    pub fn integrate_to<const N: usize, S: OdeSystem<N>>(
        &self,
        sys: &S,
        x0: f64,
        y0: [f64; N],
        x_end: f64,
        mut on_step: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<(f64, [f64; N])> {
        let dir = if x_end >= x0 { 1.0 } else { -1.0 };
        let mut x = x0;
        let mut y = y0;
        let mut h = self.h_init;
        let mut err_prev = 1.0;
        while (x_end - x) * dir > 1e-15 * (1.0 + x.abs()) {
            let (out, h_next) = self.step(sys, x, &y, h, dir, x_end, &mut err_prev)?;
            if out.h_used == 0.0 {
                break;
            }
            x = out.x;
            y = out.y;
            h = h_next;
            if !on_step(x, &y) {
                break;
            }
        }
        Ok((x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay_to_high_accuracy() {
        let rk = AdaptiveRk {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let sys = |_x: f64, y: &[f64; 1]| [-2.0 * y[0]];
        let (_, y) = rk.integrate_to(&sys, 0.0, [1.0], 3.0, |_, _| true).unwrap();
        assert_relative_eq!(y[0], (-6.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn harmonic_oscillator_phase_preserved() {
        let rk = AdaptiveRk::default();
        let sys = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        let (_, y) = rk
            .integrate_to(&sys, 0.0, [1.0, 0.0], 10.0, |_, _| true)
            .unwrap();
        assert_relative_eq!(y[0], 10.0f64.cos(), max_relative = 1e-8);
        assert_relative_eq!(y[1], -(10.0f64.sin()), max_relative = 1e-8);
    }

    #[test]
    fn lands_exactly_on_target_backwards() {
        let rk = AdaptiveRk::default();
        let sys = |_x: f64, y: &[f64; 1]| [y[0]];
        let (x, y) = rk
            .integrate_to(&sys, 0.0, [1.0], -2.5, |_, _| true)
            .unwrap();
        assert_relative_eq!(x, -2.5, epsilon = 1e-12);
        assert_relative_eq!(y[0], (-2.5f64).exp(), max_relative = 1e-9);
    }
}
