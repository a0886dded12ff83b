//! The autonomous phase-plane vector field, its root curves, and the sonic
//! critical points.
//!
//! Coordinates: `W(x) = -Ubar(xi)/xi`, `S(x) = alpha*Sigmabar(xi)/xi`,
//! `x = log xi`. The profile ODE becomes `dW/dx = -Delta1/Delta`,
//! `dS/dx = -Delta2/Delta` with `Delta = (1-W)^2 - S^2` and polynomial
//! `Delta1`, `Delta2`. Smooth solutions cross the sonic line `W + S = 1`
//! only where all three vanish simultaneously.

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// A point of the (S, W) phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// scaled sound speed, alpha*Sigmabar(xi)/xi
    pub s: f64,
    /// negated scaled radial velocity, -Ubar(xi)/xi
    pub w: f64,
}

/// Sonic points and the secondary intersection of the middle-root curve with
/// the Delta2 = 0 curve, plus the local slope pair at P2.
#[derive(Debug, Clone)]
pub struct CriticalPoints {
    pub p2: PhasePoint,
    pub p3: PhasePoint,
    pub p5: PhasePoint,
    /// S where the solution crosses the middle root; filled by the solver
    /// after a successful shot.
    pub s_star: Option<f64>,
    /// roots of the local slope quadratic dW/dS at P2, sorted ascending
    pub slopes_at_p2: (f64, f64),
    /// set when the slope quadratic has a (near-)double root
    pub degenerate_slopes: bool,
}

/// Delta, Delta1, Delta2 evaluated exactly as written in the ODE.
pub fn eval_field(p: PhasePoint, params: &ModelParams) -> (f64, f64, f64) {
    let (s, w) = (p.s, p.w);
    let (l, d, r, w_e) = (params.l, params.d as f64, params.r, params.w_e);
    let delta = (1.0 - w) * (1.0 - w) - s * s;
    let delta1 = w * (w - 1.0) * (w - r) - d * (w - w_e) * s * s;
    let delta2 = s / l * ((l + d - 1.0) * w * w - w * (l + d + l * r - r) + l * r - l * s * s);
    (delta, delta1, delta2)
}

/// Partial derivatives of (Delta, Delta1, Delta2) with respect to (W, S).
pub fn eval_field_jacobian(p: PhasePoint, params: &ModelParams) -> [[f64; 2]; 3] {
    let (s, w) = (p.s, p.w);
    let (l, d, r, w_e) = (params.l, params.d as f64, params.r, params.w_e);
    let d_w = -2.0 * (1.0 - w);
    let d_s = -2.0 * s;
    let d1_w = 3.0 * w * w - 2.0 * (1.0 + r) * w + r - d * s * s;
    let d1_s = -2.0 * d * (w - w_e) * s;
    let q = (l + d - 1.0) * w * w - w * (l + d + l * r - r) + l * r - l * s * s;
    let d2_w = s / l * (2.0 * (l + d - 1.0) * w - (l + d + l * r - r));
    let d2_s = q / l - 2.0 * s * s;
    [[d_w, d_s], [d1_w, d1_s], [d2_w, d2_s]]
}

/// The three real roots of the cubic `Delta1(., S)`, sorted ascending.
///
/// Trigonometric closed form for the depressed cubic, then one Newton polish
/// per root; robust near the root collisions at the sonic points.
pub fn roots_delta1(s: f64, params: &ModelParams) -> Result<(f64, f64, f64)> {
    let (d, r, w_e) = (params.d as f64, params.r, params.w_e);
    // W^3 - (1+r) W^2 + (r - d S^2) W + d W_e S^2
    let b = -(1.0 + r);
    let c = r - d * s * s;
    let e = d * w_e * s * s;
    let roots = cubic_roots(b, c, e, s)?;
    let f = |w: f64| w * (w - 1.0) * (w - r) - d * (w - w_e) * s * s;
    let fp = |w: f64| 3.0 * w * w - 2.0 * (1.0 + r) * w + r - d * s * s;
    let mut out = [0.0; 3];
    for (i, w0) in roots.iter().enumerate() {
        let mut w = *w0;
        for _ in 0..2 {
            let dfw = fp(w);
            if dfw.abs() > 1e-300 {
                let step = f(w) / dfw;
                if step.is_finite() && step.abs() < 0.5 * (1.0 + w.abs()) {
                    w -= step;
                }
            }
        }
        out[i] = w;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((out[0], out[1], out[2]))
}

/// All real roots of the monic cubic w^3 + b w^2 + c w + e.
fn cubic_roots(b: f64, c: f64, e: f64, s: f64) -> Result<[f64; 3]> {
    // depressed: t^3 + p t + q, w = t - b/3
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + e;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    if disc < -1e-12 * (1.0 + q * q + p * p * p.abs()) {
        return Err(Error::ComplexRoots { s });
    }
    // three real roots (allow slightly negative disc from roundoff at collisions)
    let m = (-p / 3.0).max(0.0);
    let sqrt_m = m.sqrt();
    if sqrt_m < 1e-150 {
        let t = -(q.cbrt());
        return Ok([t - shift, t - shift, t - shift]);
    }
    let arg = (3.0 * q / (2.0 * p * sqrt_m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let t = 2.0 * sqrt_m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
        *o = t - shift;
    }
    Ok(out)
}

/// Real roots of the quadratic factor of `Delta2(., S)` sorted ascending, or
/// `None` when the discriminant is negative (then Delta2(W, S) > 0 for all W).
pub fn roots_delta2(s: f64, params: &ModelParams) -> Option<(f64, f64)> {
    let (l, d, r) = (params.l, params.d as f64, params.r);
    let a = l + d - 1.0;
    let b = -(l + d + l * r - r);
    let c = l * r - l * s * s;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Citardauq for the root that suffers cancellation
    let q = -0.5 * (b + b.signum() * sq);
    let (mut w_lo, mut w_hi) = (q / a, c / q);
    if w_lo > w_hi {
        std::mem::swap(&mut w_lo, &mut w_hi);
    }
    Some((w_lo, w_hi))
}

/// Threshold S below which Delta2 has no real root in W, found as the zero of
/// the discriminant. The paper defines it only implicitly; this is the
/// numerical convention used throughout.
pub fn delta2_root_threshold(params: &ModelParams) -> Option<f64> {
    let (l, d, r) = (params.l, params.d as f64, params.r);
    let a = l + d - 1.0;
    let b = l + d + l * r - r;
    // disc(S) = b^2 - 4 a l (r - S^2) = 0  =>  S^2 = (4 a l r - b^2) / (4 a l)
    let s2 = (4.0 * a * l * r - b * b) / (4.0 * a * l);
    if s2 > 0.0 {
        Some(s2.sqrt())
    } else {
        None
    }
}

/// The sonic-line restriction Delta1(1-S, S) factored as S * q(S); returns
/// the quadratic q's coefficients (q2, q1, q0): q(S) = q2 S^2 + q1 S + q0.
/// On the sonic line Delta1 = l * Delta2, so the same roots locate P2 and P3.
pub fn sonic_line_quadratic(params: &ModelParams) -> (f64, f64, f64) {
    let (l, d, r) = (params.l, params.d as f64, params.r);
    (d - 1.0, 2.0 - r - d + l * (r - 1.0), r - 1.0)
}

/// Sonic points P2, P3 (scan + bisection on the sonic line), the secondary
/// middle-root/Delta2 intersection P5, and the slope pair at P2.
pub fn critical_points(params: &ModelParams) -> Result<CriticalPoints> {
    if !(params.r > params.r_lo && params.r < params.r_hi) {
        return Err(Error::BadSpeed {
            r: params.r,
            lo: params.r_lo,
            hi: params.r_hi,
        });
    }
    // Scan S in (0,1) for sign changes of Delta1(1-S, S), bisect to 1e-13.
    let f = |s: f64| {
        eval_field(
            PhasePoint { s, w: 1.0 - s },
            params,
        )
        .1
    };
    let mut roots: Vec<f64> = Vec::new();
    let step = 1e-3;
    let mut s_prev = step;
    let mut f_prev = f(s_prev);
    let mut s = s_prev + step;
    while s < 1.0 - 0.5 * step {
        let fs = f(s);
        if f_prev == 0.0 {
            roots.push(s_prev);
        } else if f_prev * fs < 0.0 {
            roots.push(bisect(&f, s_prev, s, 1e-13));
        }
        s_prev = s;
        f_prev = fs;
        s += step;
    }
    if roots.len() < 2 {
        return Err(Error::NoSonicPoint);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // label so that P3_S < P2_S
    let p3 = PhasePoint {
        s: roots[0],
        w: 1.0 - roots[0],
    };
    let p2 = PhasePoint {
        s: *roots.last().unwrap(),
        w: 1.0 - roots.last().unwrap(),
    };

    let p5 = find_p5(params, p3.s, p2.s)?;
    let (slopes, degenerate) = slopes_at(p2, params)?;

    Ok(CriticalPoints {
        p2,
        p3,
        p5,
        s_star: None,
        slopes_at_p2: slopes,
        degenerate_slopes: degenerate,
    })
}

/// Intersection of the middle-root curve (S, W2(S)) with Delta2 = 0 away
/// from the sonic points.
fn find_p5(params: &ModelParams, p3_s: f64, p2_s: f64) -> Result<PhasePoint> {
    let h = |s: f64| -> Result<f64> {
        let (_, w2, _) = roots_delta1(s, params)?;
        Ok(eval_field(PhasePoint { s, w: w2 }, params).2)
    };
    // P3 and P2 are zeros of h as well; exclude shrinking neighbourhoods of
    // them, sized by their separation so tightly spaced sonic points (small
    // admissible windows) are handled.
    let sep = p2_s - p3_s;
    let excl_rad = (1e-4 * sep).max(1e-9);
    let lo = 1e-3;
    let hi = 4.0_f64.max(2.0 * p2_s);
    let step = (sep / 400.0).min(1e-3);
    let n = ((hi - lo) / step).ceil() as usize;
    let excl = |s: f64| (s - p3_s).abs() < excl_rad || (s - p2_s).abs() < excl_rad;
    let mut prev_s = lo;
    let mut prev_h = h(prev_s)?;
    for i in 1..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let hs = h(s)?;
        if prev_h * hs < 0.0 && !excl(s) && !excl(prev_s) {
            let sf = bisect_result(&h, prev_s, s, 1e-13)?;
            if !excl(sf) {
                let (_, w2, _) = roots_delta1(sf, params)?;
                return Ok(PhasePoint { s: sf, w: w2 });
            }
        }
        prev_s = s;
        prev_h = hs;
    }
    Err(Error::NoSonicPoint)
}

/// Roots of the slope quadratic at a sonic point: with m = dW/dS,
/// d2W m^2 + (d2S - d1W) m - d1S = 0 from the L'Hopital condition on
/// dW/dS = Delta1/Delta2.
fn slopes_at(p: PhasePoint, params: &ModelParams) -> Result<((f64, f64), bool)> {
    let j = eval_field_jacobian(p, params);
    let (d1w, d1s) = (j[1][0], j[1][1]);
    let (d2w, d2s) = (j[2][0], j[2][1]);
    let a = d2w;
    let b = d2s - d1w;
    let c = -d1s;
    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (a * c).abs() + 1e-300;
    if disc < 0.0 {
        return Err(Error::NoSonicPoint);
    }
    let degenerate = disc < 1e-10 * scale;
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (mut m1, mut m2) = (q / a, c / q);
    if m1 > m2 {
        std::mem::swap(&mut m1, &mut m2);
    }
    Ok(((m1, m2), degenerate))
}

/// Phase velocities (dW/dx, dS/dx) of the two solution branches through a
/// sonic point, from the eigen-decomposition of the field Jacobian: a branch
/// velocity v satisfies (grad Delta . v) v = -J v, so v is an eigenvector of
/// J scaled by t = -lambda / (grad Delta . vhat).
pub fn sonic_velocities(p: PhasePoint, params: &ModelParams) -> Result<[(f64, f64); 2]> {
    let j = eval_field_jacobian(p, params);
    let (gw, gs) = (j[0][0], j[0][1]);
    // J rows act on (W, S): [d1w d1s; d2w d2s]
    let (a, b, c, d) = (j[1][0], j[1][1], j[2][0], j[2][1]);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return Err(Error::NoSonicPoint);
    }
    let sq = disc.sqrt();
    let lams = [(tr + sq) / 2.0, (tr - sq) / 2.0];
    let mut out = [(0.0, 0.0); 2];
    for (k, lam) in lams.iter().enumerate() {
        // eigenvector of [[a,b],[c,d]] for eigenvalue lam
        let (vw, vs) = if (a - lam).abs() + b.abs() > (d - lam).abs() + c.abs() {
            (-b, a - lam)
        } else {
            (-(d - lam), c)
        };
        let norm = (vw * vw + vs * vs).sqrt();
        if norm < 1e-300 {
            return Err(Error::NoSonicPoint);
        }
        let (vw, vs) = (vw / norm, vs / norm);
        let g = gw * vw + gs * vs;
        if g.abs() < 1e-300 {
            return Err(Error::NoSonicPoint);
        }
        let t = -lam / g;
        out[k] = (t * vw, t * vs);
    }
    Ok(out)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

fn bisect_result(
    f: &dyn Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params_12() -> ModelParams {
        ModelParams::new(3.0, 1.2).unwrap()
    }

    #[test]
    fn field_at_origin_of_plane() {
        let p = params_12();
        let (d, d1, d2) = eval_field(PhasePoint { s: 0.0, w: 0.0 }, &p);
        assert_eq!(d, 1.0);
        assert_eq!(d1, 0.0);
        assert_eq!(d2, 0.0);
    }

    #[test]
    fn sonic_line_kills_delta() {
        let p = params_12();
        for s in [0.1, 0.3, 0.72, 0.9] {
            let (d, _, _) = eval_field(PhasePoint { s, w: 1.0 - s }, &p);
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn s_zero_reduces_to_displayed_factorization() {
        let p = params_12();
        for w in [-0.5, 0.3, 1.7] {
            let (_, d1, _) = eval_field(PhasePoint { s: 0.0, w }, &p);
            assert_relative_eq!(d1, w * (w - 1.0) * (w - p.r), epsilon = 1e-14);
        }
    }

    #[test]
    fn cubic_roots_at_s_zero_are_exact() {
        let p = params_12();
        let (w1, w2, w3) = roots_delta1(0.0, &p).unwrap();
        assert_abs_diff_eq!(w1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w3, p.r, epsilon = 1e-12);
    }

    /// Brute-force oracle: scan the cubic on a fine W grid for sign changes.
    fn scan_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::new();
        let mut wp = lo;
        let mut fp = f(wp);
        for i in 1..=n {
            let w = lo + (hi - lo) * i as f64 / n as f64;
            let fw = f(w);
            if fp * fw < 0.0 {
                out.push(bisect(f, wp, w, 1e-12));
            }
            wp = w;
            fp = fw;
        }
        out
    }

    #[test]
    fn cubic_roots_match_sign_scan_oracle_and_ordering() {
        let p = params_12();
        let s = 0.1;
        let (w1, w2, w3) = roots_delta1(s, &p).unwrap();
        let f = |w: f64| eval_field(PhasePoint { s, w }, &p).1;
        let oracle = scan_roots(&f, -2.0, 3.0, 200_000);
        assert_eq!(oracle.len(), 3);
        assert_abs_diff_eq!(w1, oracle[0], epsilon = 1e-9);
        assert_abs_diff_eq!(w2, oracle[1], epsilon = 1e-9);
        assert_abs_diff_eq!(w3, oracle[2], epsilon = 1e-9);
        // ordering invariant of the root curves
        assert!(w1 <= 0.0 && 0.0 < p.w_e && p.w_e < w2 && w2 <= 1.0 && 1.0 < p.r && p.r <= w3);
    }

    #[test]
    fn cubic_root_residuals_polished() {
        let p = params_12();
        for s in [0.05, 0.3, 0.72, 1.5, 4.0, 20.0] {
            let (w1, w2, w3) = roots_delta1(s, &p).unwrap();
            for w in [w1, w2, w3] {
                let (_, d1, _) = eval_field(PhasePoint { s, w }, &p);
                assert!(
                    d1.abs() < 1e-10 * (1.0 + s * s * s),
                    "residual {d1:.3e} at S={s}, W={w}"
                );
            }
        }
    }

    #[test]
    fn quadratic_roots_verified_by_residual_and_scan() {
        let p = params_12();
        let s = 0.5;
        let (wm, wp) = roots_delta2(s, &p).unwrap();
        for w in [wm, wp] {
            let (_, _, d2) = eval_field(PhasePoint { s, w }, &p);
            assert!(d2.abs() < 1e-12, "Delta2 residual {d2:.3e}");
        }
        let f = |w: f64| eval_field(PhasePoint { s, w }, &p).2;
        let oracle = scan_roots(&f, -3.0, 4.0, 200_000);
        assert_eq!(oracle.len(), 2);
        assert_abs_diff_eq!(wm, oracle[0], epsilon = 1e-9);
        assert_abs_diff_eq!(wp, oracle[1], epsilon = 1e-9);
    }

    #[test]
    fn no_real_roots_below_threshold_and_delta2_positive() {
        let p = params_12();
        let s0 = delta2_root_threshold(&p).expect("threshold exists for gamma=3");
        let s = 0.5 * s0;
        assert!(roots_delta2(s, &p).is_none());
        // grid scan: min over W of Delta2 is positive
        let mut min = f64::INFINITY;
        for i in 0..20_000 {
            let w = -5.0 + 10.0 * i as f64 / 20_000.0;
            min = min.min(eval_field(PhasePoint { s, w }, &p).2);
        }
        assert!(min > 0.0, "min Delta2 = {min:.3e}");
        // just above the threshold the two roots pinch together
        let (wm, wp) = roots_delta2(s0 * (1.0 + 1e-6), &p).unwrap();
        assert!((wp - wm).abs() < 1e-2);
    }

    #[test]
    fn sonic_points_on_line_and_ordered() {
        let p = params_12();
        let cp = critical_points(&p).unwrap();
        assert_abs_diff_eq!(cp.p2.s + cp.p2.w, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cp.p3.s + cp.p3.w, 1.0, epsilon = 1e-12);
        assert!(cp.p3.s < cp.p2.s);
        assert!(cp.p2.w > 0.0 && cp.p3.w > 0.0 && cp.p5.w > 0.0);
        // closed form: roots of S^2 + (lr - l - r) S + (r-1) for gamma = 3
        let (q2, q1, q0) = sonic_line_quadratic(&p);
        assert_relative_eq!(q2, 1.0);
        let disc = (q1 * q1 - 4.0 * q2 * q0).sqrt();
        let s_hi = (-q1 + disc) / (2.0 * q2);
        let s_lo = (-q1 - disc) / (2.0 * q2);
        assert_abs_diff_eq!(cp.p2.s, s_hi, epsilon = 1e-11);
        assert_abs_diff_eq!(cp.p3.s, s_lo, epsilon = 1e-11);
    }

    /// 2D grid-scan oracle: simultaneous sign changes of (Delta1, Delta2)
    /// along the sonic line at resolution 1e-4, refined by bisection.
    #[test]
    fn sonic_points_match_grid_scan_oracle() {
        let p = params_12();
        let cp = critical_points(&p).unwrap();
        let f1 = |s: f64| eval_field(PhasePoint { s, w: 1.0 - s }, &p).1;
        let f2 = |s: f64| eval_field(PhasePoint { s, w: 1.0 - s }, &p).2;
        let z1 = scan_roots(&f1, 1e-4, 0.9999, 10_000);
        for z in &z1 {
            // Delta2 must vanish there too (sonic points kill all three)
            assert!(f2(*z).abs() < 1e-9, "Delta2 = {:.3e} at S = {z}", f2(*z));
        }
        assert_eq!(z1.len(), 2);
        assert_abs_diff_eq!(cp.p3.s, z1[0], epsilon = 1e-9);
        assert_abs_diff_eq!(cp.p2.s, z1[1], epsilon = 1e-9);
    }

    #[test]
    fn p5_lies_on_middle_root_and_kills_delta2() {
        let p = params_12();
        let cp = critical_points(&p).unwrap();
        let (_, w2, _) = roots_delta1(cp.p5.s, &p).unwrap();
        assert_abs_diff_eq!(cp.p5.w, w2, epsilon = 1e-10);
        let (_, _, d2) = eval_field(cp.p5, &p);
        assert!(d2.abs() < 1e-10);
        assert!(cp.p5.s < cp.p2.s, "P5 must sit below P2 in S");
    }

    #[test]
    fn slope_roots_satisfy_quadratic_and_match_velocity_ratio() {
        let p = params_12();
        let cp = critical_points(&p).unwrap();
        assert!(!cp.degenerate_slopes);
        let j = eval_field_jacobian(cp.p2, &p);
        let (a, b, c) = (j[2][0], j[2][1] - j[1][0], -j[1][1]);
        for m in [cp.slopes_at_p2.0, cp.slopes_at_p2.1] {
            let res = a * m * m + b * m + c;
            assert!(res.abs() < 1e-8 * (1.0 + a.abs() + b.abs() + c.abs()));
        }
        let vels = sonic_velocities(cp.p2, &p).unwrap();
        let mut ratios: Vec<f64> = vels.iter().map(|(dw, ds)| dw / ds).collect();
        ratios.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_abs_diff_eq!(ratios[0], cp.slopes_at_p2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(ratios[1], cp.slopes_at_p2.1, epsilon = 1e-8);
    }

    #[test]
    fn middle_root_below_sonic_line_and_monotone() {
        let p = params_12();
        let cp = critical_points(&p).unwrap();
        let n = 2000;
        let mut prev_w2 = f64::INFINITY;
        for i in 1..=n {
            let s = 3.0 * i as f64 / n as f64;
            let (w1, w2, w3) = roots_delta1(s, &p).unwrap();
            assert!(w1 <= 0.0 && p.w_e < w2 && w2 <= 1.0 && p.r <= w3 + 1e-12);
            // strictly below the sonic line between the sonic points
            if s > cp.p3.s + 1e-6 && s < cp.p2.s - 1e-6 {
                assert!(s + w2 < 1.0, "S + W2 = {} at S = {s}", s + w2);
            }
            assert!(w2 < prev_w2, "W2 not decreasing at S = {s}");
            prev_w2 = w2;
        }
    }
}
