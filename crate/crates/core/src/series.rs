//! Power-series take-off of the solution branch through the sonic point P2.
//!
//! The phase ODE is singular at P2 (Delta = Delta1 = Delta2 = 0); the branch
//! with a chosen slope admits a Taylor expansion in x - x_2. Coefficients are
//! found order by order from the residuals of Delta*W' + Delta1 = 0 and
//! Delta*S' + Delta2 = 0, which are affine in the unknown pair at each order.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::phase::{sonic_velocities, PhasePoint};

pub const MAX_ORDER: usize = 9;

/// Truncated power series in the offset x - x_2.
#[derive(Debug, Clone, Copy)]
struct Poly {
    c: [f64; MAX_ORDER + 1],
}

impl Poly {
    fn zero() -> Self {
        Poly {
            c: [0.0; MAX_ORDER + 1],
        }
    }
    fn constant(v: f64) -> Self {
        let mut p = Self::zero();
        p.c[0] = v;
        p
    }
    fn add(&self, o: &Poly) -> Poly {
        let mut p = Self::zero();
        for i in 0..=MAX_ORDER {
            p.c[i] = self.c[i] + o.c[i];
        }
        p
    }
    fn scale(&self, a: f64) -> Poly {
        let mut p = Self::zero();
        for i in 0..=MAX_ORDER {
            p.c[i] = a * self.c[i];
        }
        p
    }
    fn mul(&self, o: &Poly) -> Poly {
        let mut p = Self::zero();
        for i in 0..=MAX_ORDER {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..=(MAX_ORDER - i) {
                p.c[i + j] += self.c[i] * o.c[j];
            }
        }
        p
    }
    fn deriv(&self) -> Poly {
        let mut p = Self::zero();
        for i in 1..=MAX_ORDER {
            p.c[i - 1] = i as f64 * self.c[i];
        }
        p
    }
}

/// Series for (W(x), S(x)) around a sonic point.
#[derive(Debug, Clone)]
pub struct SonicSeries {
    /// expansion center in x = log xi (the gauge choice)
    pub x_center: f64,
    pub center: PhasePoint,
    /// which of the two slope roots this branch follows (dW/dS at P2)
    pub slope: f64,
    pub w_coeffs: Vec<f64>,
    pub s_coeffs: Vec<f64>,
}

impl SonicSeries {
    pub fn eval(&self, dx: f64) -> PhasePoint {
        let mut w = 0.0;
        let mut s = 0.0;
        for k in (0..self.w_coeffs.len()).rev() {
            w = w * dx + self.w_coeffs[k];
            s = s * dx + self.s_coeffs[k];
        }
        PhasePoint { s, w }
    }
}

fn field_polys(w: &Poly, s: &Poly, params: &ModelParams) -> (Poly, Poly, Poly) {
    let (l, d, r, w_e) = (params.l, params.d as f64, params.r, params.w_e);
    let one = Poly::constant(1.0);
    let ww = w.mul(w);
    let ss = s.mul(s);
    // Delta = (1-W)^2 - S^2
    let omw = one.add(&w.scale(-1.0));
    let delta = omw.mul(&omw).add(&ss.scale(-1.0));
    // Delta1 = W(W-1)(W-r) - d (W - W_e) S^2
    let d1 = w
        .mul(&w.add(&Poly::constant(-1.0)))
        .mul(&w.add(&Poly::constant(-r)))
        .add(&w.add(&Poly::constant(-w_e)).mul(&ss).scale(-d));
    // Delta2 = (S/l) ((l+d-1) W^2 - (l+d+lr-r) W + lr - l S^2)
    let q = ww
        .scale(l + d - 1.0)
        .add(&w.scale(-(l + d + l * r - r)))
        .add(&Poly::constant(l * r))
        .add(&ss.scale(-l));
    let d2 = s.mul(&q).scale(1.0 / l);
    (delta, d1, d2)
}

/// Residual coefficient of Delta*W' + Delta1 (resp. S) at a given order.
fn order_residual(w: &Poly, s: &Poly, params: &ModelParams, n: usize) -> (f64, f64) {
    let (delta, d1, d2) = field_polys(w, s, params);
    let rw = delta.mul(&w.deriv()).add(&d1);
    let rs = delta.mul(&s.deriv()).add(&d2);
    (rw.c[n], rs.c[n])
}

/// Taylor coefficients of the branch through `center` whose first-order
/// velocity is `velocity = (dW/dx, dS/dx)`, to the requested order.
pub fn local_series(
    center: PhasePoint,
    velocity: (f64, f64),
    x_center: f64,
    params: &ModelParams,
    order: usize,
) -> Result<SonicSeries> {
    assert!(order >= 1 && order <= MAX_ORDER - 1, "order must be in 1..=8");
    let mut w = Poly::zero();
    let mut s = Poly::zero();
    w.c[0] = center.w;
    s.c[0] = center.s;
    w.c[1] = velocity.0;
    s.c[1] = velocity.1;

    for n in 2..=order {
        // Residual at order n is affine in (w_n, s_n).
        let (r0w, r0s) = order_residual(&w, &s, params, n);
        let mut wa = w;
        wa.c[n] = 1.0;
        let (raw, ras) = order_residual(&wa, &s, params, n);
        let mut sa = s;
        sa.c[n] = 1.0;
        let (rbw, rbs) = order_residual(&w, &sa, params, n);
        let m = [[raw - r0w, rbw - r0w], [ras - r0s, rbs - r0s]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m[0][0].abs() + m[0][1].abs() + m[1][0].abs() + m[1][1].abs();
        if det.abs() < 1e-14 * scale * scale {
            return Err(Error::SeriesDivergence {
                order: n,
                magnitude: det,
            });
        }
        let wn = (-r0w * m[1][1] + r0s * m[0][1]) / det;
        let sn = (-m[0][0] * r0s + m[1][0] * r0w) / det;
        if !wn.is_finite() || !sn.is_finite() || wn.abs().max(sn.abs()) > 1e8 {
            return Err(Error::SeriesDivergence {
                order: n,
                magnitude: wn.abs().max(sn.abs()),
            });
        }
        w.c[n] = wn;
        s.c[n] = sn;
    }

    Ok(SonicSeries {
        x_center,
        center,
        slope: velocity.0 / velocity.1,
        w_coeffs: w.c[..=order].to_vec(),
        s_coeffs: s.c[..=order].to_vec(),
    })
}

/// Both take-off branches at P2, ordered like `sonic_velocities`.
pub fn both_branches(
    center: PhasePoint,
    x_center: f64,
    params: &ModelParams,
    order: usize,
) -> Result<[SonicSeries; 2]> {
    let vels = sonic_velocities(center, params)?;
    Ok([
        local_series(center, vels[0], x_center, params, order)?,
        local_series(center, vels[1], x_center, params, order)?,
    ])
}

/// Residual of the ODE pair at offset dx: (Delta*dW/dx + Delta1, Delta*dS/dx + Delta2)
/// with the derivatives taken from the series.
pub fn ode_residual_at(series: &SonicSeries, dx: f64, params: &ModelParams) -> (f64, f64) {
    let p = series.eval(dx);
    let mut dw = 0.0;
    let mut ds = 0.0;
    for k in (1..series.w_coeffs.len()).rev() {
        dw = dw * dx + k as f64 * series.w_coeffs[k];
        ds = ds * dx + k as f64 * series.s_coeffs[k];
    }
    let (delta, d1, d2) = crate::phase::eval_field(p, params);
    (delta * dw + d1, delta * ds + d2)
}
