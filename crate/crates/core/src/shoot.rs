//! Shooting for the blowup speed: integrate the phase-plane ODE away from
//! the sonic point P2 in both directions and bisect r on the interior-branch
//! classification.
//!
//! The interior direction (S increasing, xi -> 0) carries an unstable mode
//! growing like S^2; crossing the middle-root curve from below or the lower
//! Delta2 root curve from above classifies each candidate r, and the
//! admissible speed sits at the transition where W(S) -> W_e.

use crate::error::{Error, Result};
use crate::ode::AdaptiveRk;
use crate::params::ModelParams;
use crate::phase::{
    critical_points, eval_field, roots_delta1, roots_delta2, CriticalPoints, PhasePoint,
};
use crate::series::{both_branches, SonicSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// x decreasing, S increasing (towards xi = 0)
    Interior,
    /// x increasing, S decreasing (towards xi = infinity)
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    ReachedWe,
    ReachedSZero,
    /// crossed the middle-root curve W2(S) from below
    HitBarrierAbove,
    /// crossed the lower root curve W2^-(S) of Delta2
    HitBarrierBelow,
    HitSonic,
    StepFailure,
}

/// Sampled solution of the autonomous ODE with branch metadata.
#[derive(Debug, Clone)]
pub struct PhaseCurve {
    pub branch: Branch,
    pub terminal: Terminal,
    /// accepted integration steps (x, S, W), x strictly monotone
    pub samples: Vec<(f64, f64, f64)>,
}

/// Tolerances and thresholds of the shooting machinery.
#[derive(Debug, Clone, Copy)]
pub struct ShootParams {
    /// offset along the local series at take-off
    pub eps_start: f64,
    pub series_order: usize,
    /// relative tolerance of the adaptive integrator; the interior branch
    /// amplifies early errors by (S_big/S)^2, so this sits well below the
    /// W_e acceptance tolerance
    pub rtol: f64,
    /// S at which the interior branch is judged
    pub s_big: f64,
    pub tol_we: f64,
    /// exterior branch termination
    pub s_stop: f64,
    /// bisection bracket width on r
    pub bisect_tol: f64,
}

impl Default for ShootParams {
    fn default() -> Self {
        ShootParams {
            eps_start: 1e-6,
            series_order: 4,
            rtol: 1e-13,
            s_big: 1e3,
            tol_we: 1e-6,
            s_stop: 1e-8,
            bisect_tol: 1e-13,
        }
    }
}

/// Result of one branch integration with optional exact landings.
#[derive(Debug, Clone)]
pub struct BranchRun {
    pub curve: PhaseCurve,
    /// (S, W) at each requested x target, in the order given; None when the
    /// run terminated before reaching that target
    pub target_vals: Vec<Option<(f64, f64)>>,
}

struct PhaseOde<'a> {
    params: &'a ModelParams,
}

impl crate::ode::OdeSystem<2> for PhaseOde<'_> {
    fn rhs(&self, _x: f64, y: &[f64; 2]) -> [f64; 2] {
        let p = PhasePoint { w: y[0], s: y[1] };
        let (delta, d1, d2) = eval_field(p, self.params);
        [-d1 / delta, -d2 / delta]
    }
}

/// Asymptotic middle-branch value of W for large S on the interior side:
/// W = W_e + K0/((2+d) S^2) + O(S^-4) with K0 = W_e(W_e-1)(W_e-r).
pub fn interior_w_asymptote(s: f64, params: &ModelParams) -> f64 {
    let w_e = params.w_e;
    let k0 = w_e * (w_e - 1.0) * (w_e - params.r);
    w_e + k0 / ((2.0 + params.d as f64) * s * s)
}

struct AsymptoteOde<'a> {
    params: &'a ModelParams,
}

impl crate::ode::OdeSystem<1> for AsymptoteOde<'_> {
    fn rhs(&self, _x: f64, y: &[f64; 1]) -> [f64; 1] {
        let s = y[0];
        let w = interior_w_asymptote(s, self.params);
        let (delta, _, d2) = eval_field(PhasePoint { s, w }, self.params);
        [-d2 / delta]
    }
}

/// Pick the take-off branch whose interior-side order-1 point sits inside the
/// barrier wedge W2^-(S) < W < W2(S).
pub fn select_interior_series(
    cp: &CriticalPoints,
    params: &ModelParams,
    sp: &ShootParams,
) -> Result<[SonicSeries; 2]> {
    let branches = both_branches(cp.p2, 0.0, params, sp.series_order)?;
    let inside = |series: &SonicSeries, delta_s: f64| -> bool {
        // move to the interior side S = P2_S + delta_s along the series
        let ds_dx = series.s_coeffs[1];
        if ds_dx.abs() < 1e-300 {
            return false;
        }
        let dx = delta_s / ds_dx;
        let p = series.eval(dx);
        let Ok((_, w2, _)) = roots_delta1(p.s, params) else {
            return false;
        };
        let lower = roots_delta2(p.s, params).map(|(wm, _)| wm).unwrap_or(f64::NEG_INFINITY);
        p.w < w2 && p.w > lower
    };
    let a0 = inside(&branches[0], 1e-4) && inside(&branches[0], 1e-5);
    let a1 = inside(&branches[1], 1e-4) && inside(&branches[1], 1e-5);
    match (a0, a1) {
        (true, false) => Ok([branches[0].clone(), branches[1].clone()]),
        (false, true) => Ok([branches[1].clone(), branches[0].clone()]),
        _ => Err(Error::SeriesDivergence {
            order: 1,
            magnitude: f64::NAN,
        }),
    }
}

/// Integrate one branch from the sonic series. `x_targets` must be sorted in
/// the direction of travel (descending for interior, ascending for exterior).
pub fn integrate_branch(
    series: &SonicSeries,
    params: &ModelParams,
    sp: &ShootParams,
    branch: Branch,
    x_targets: &[f64],
) -> BranchRun {
    let dir = match branch {
        Branch::Interior => -1.0,
        Branch::Exterior => 1.0,
    };
    // take-off offset: move to the side where S grows (interior) or shrinks
    let ds_dx = series.s_coeffs[1];
    let dx0 = match branch {
        Branch::Interior => {
            if ds_dx < 0.0 {
                -sp.eps_start
            } else {
                sp.eps_start
            }
        }
        Branch::Exterior => {
            if ds_dx < 0.0 {
                sp.eps_start
            } else {
                -sp.eps_start
            }
        }
    };
    let start = series.eval(dx0);
    let mut x = series.x_center + dx0;
    let mut y = [start.w, start.s];

    let mut samples: Vec<(f64, f64, f64)> = vec![(x, y[1], y[0])];
    let mut target_vals: Vec<Option<(f64, f64)>> = vec![None; x_targets.len()];
    let mut next_target = 0usize;
    // skip targets that lie behind the start (between the center and eps)
    while next_target < x_targets.len() && (x_targets[next_target] - x) * dir <= 0.0 {
        let p = series.eval(x_targets[next_target] - series.x_center);
        target_vals[next_target] = Some((p.s, p.w));
        next_target += 1;
    }

    let rk = AdaptiveRk {
        rtol: sp.rtol,
        atol: 1e-15,
        h_init: sp.eps_start,
        h_min: 1e-14,
        h_max: 0.05,
        ..Default::default()
    };
    let sys = PhaseOde { params };
    let p2s = series.center.s;
    let far_limit = 60.0;
    let mut h = rk.h_init;
    let mut err_prev = 1.0;
    let mut terminal: Option<Terminal> = None;

    'outer: while terminal.is_none() {
        let x_limit = if next_target < x_targets.len() {
            x_targets[next_target]
        } else {
            series.x_center + dir * far_limit
        };
        if (x_limit - x) * dir <= 0.0 {
            if next_target < x_targets.len() {
                target_vals[next_target] = Some((y[1], y[0]));
                next_target += 1;
                continue;
            }
            break;
        }
        let step = rk.step(&sys, x, &y, h, dir, x_limit, &mut err_prev);
        let (out, h_next) = match step {
            Ok(v) => v,
            Err(_) => {
                terminal = Some(Terminal::StepFailure);
                break;
            }
        };
        if out.h_used == 0.0 {
            // reached x_limit exactly
            if next_target < x_targets.len() {
                target_vals[next_target] = Some((y[1], y[0]));
                next_target += 1;
                continue;
            }
            break;
        }
        x = out.x;
        y = out.y;
        h = h_next;
        samples.push((x, y[1], y[0]));
        let (w, s) = (y[0], y[1]);

        match branch {
            Branch::Interior => {
                if s > p2s + 1e-5 {
                    let Ok((_, w2, _)) = roots_delta1(s, params) else {
                        terminal = Some(Terminal::StepFailure);
                        break;
                    };
                    if w >= w2 {
                        terminal = Some(Terminal::HitBarrierAbove);
                        break;
                    }
                    if let Some((wm, _)) = roots_delta2(s, params) {
                        if w <= wm {
                            terminal = Some(Terminal::HitBarrierBelow);
                            break;
                        }
                    }
                    let (delta, _, _) = eval_field(PhasePoint { s, w }, params);
                    if delta >= 0.0 {
                        terminal = Some(Terminal::HitSonic);
                        break;
                    }
                    if s >= sp.s_big {
                        if (w - params.w_e).abs() <= sp.tol_we {
                            terminal = Some(Terminal::ReachedWe);
                            // switch to the asymptote for the remaining coverage
                            if next_target < x_targets.len() {
                                let asys = AsymptoteOde { params };
                                let mut ys = [s];
                                let mut xs = x;
                                let mut hs = h;
                                let mut ep = 1.0;
                                for ti in next_target..x_targets.len() {
                                    let xt = x_targets[ti];
                                    while (xt - xs) * dir > 0.0 {
                                        match rk.step(&asys, xs, &ys, hs, dir, xt, &mut ep) {
                                            Ok((o, hn)) => {
                                                if o.h_used == 0.0 {
                                                    break;
                                                }
                                                xs = o.x;
                                                ys = o.y;
                                                hs = hn;
                                                samples.push((
                                                    xs,
                                                    ys[0],
                                                    interior_w_asymptote(ys[0], params),
                                                ));
                                            }
                                            Err(_) => break 'outer,
                                        }
                                    }
                                    target_vals[ti] =
                                        Some((ys[0], interior_w_asymptote(ys[0], params)));
                                }
                            }
                            break;
                        } else {
                            // deviation already larger than the tolerance: classify
                            // by the sign of the departure from the asymptote
                            let dev = w - interior_w_asymptote(s, params);
                            terminal = Some(if dev > 0.0 {
                                Terminal::HitBarrierAbove
                            } else {
                                Terminal::HitBarrierBelow
                            });
                            break;
                        }
                    }
                }
            }
            Branch::Exterior => {
                if 1.0 - w - s <= 0.0 && s < p2s - 1e-5 {
                    terminal = Some(Terminal::HitSonic);
                    break;
                }
                if s <= sp.s_stop && next_target >= x_targets.len() {
                    terminal = Some(Terminal::ReachedSZero);
                    break;
                }
                if (x - series.x_center) * dir > far_limit - 1e-9 {
                    break;
                }
            }
        }
    }

    let terminal = terminal.unwrap_or(match branch {
        Branch::Interior => Terminal::StepFailure,
        Branch::Exterior => {
            if samples.last().map(|&(_, s, _)| s <= sp.s_stop * 1.001).unwrap_or(false) {
                Terminal::ReachedSZero
            } else {
                Terminal::StepFailure
            }
        }
    });

    BranchRun {
        curve: PhaseCurve {
            branch,
            terminal,
            samples,
        },
        target_vals,
    }
}

/// Interior-branch classification of a candidate r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotClass {
    Above,
    Below,
    Success,
    Other(Terminal),
}

pub fn classify_r(gamma: f64, r: f64, sp: &ShootParams) -> Result<ShotClass> {
    let params = ModelParams::new(gamma, r)?;
    let cp = critical_points(&params)?;
    let series = select_interior_series(&cp, &params, sp)?;
    let run = integrate_branch(&series[0], &params, sp, Branch::Interior, &[]);
    Ok(match run.curve.terminal {
        Terminal::HitBarrierAbove => ShotClass::Above,
        Terminal::HitBarrierBelow => ShotClass::Below,
        Terminal::ReachedWe => ShotClass::Success,
        t => ShotClass::Other(t),
    })
}

/// Outcome of the speed search.
#[derive(Debug, Clone)]
pub struct AdmissibleShot {
    pub params: ModelParams,
    pub critical: CriticalPoints,
    /// selected take-off series (interior-correct branch first)
    pub series: [SonicSeries; 2],
    pub interior: PhaseCurve,
    pub exterior: PhaseCurve,
    /// all sign-change sub-brackets found by the coarse scan
    pub scan_brackets: Vec<(f64, f64)>,
}

/// Bisect the shooting discriminator inside `bracket` (defaults to the
/// admissible window shrunk by a relative margin). Returns the candidate
/// admissible speed together with both branches at that speed.
pub fn find_admissible_r(
    gamma: f64,
    bracket: Option<(f64, f64)>,
    sp: &ShootParams,
) -> Result<AdmissibleShot> {
    let probe = ModelParams::new_unchecked(gamma, 1.0)?;
    let (war_lo, war_hi) = (probe.r_lo, probe.r_hi);
    let width = war_hi - war_lo;
    let (lo0, hi0) = bracket.unwrap_or((war_lo + 2e-3 * width, war_hi - 2e-3 * width));
    if lo0 <= war_lo || hi0 >= war_hi || lo0 >= hi0 {
        return Err(Error::BadSpeed {
            r: lo0,
            lo: war_lo,
            hi: war_hi,
        });
    }

    // coarse scan for classification flips
    let n_scan = 64;
    let mut classes: Vec<(f64, ShotClass)> = Vec::with_capacity(n_scan + 1);
    for i in 0..=n_scan {
        let r = lo0 + (hi0 - lo0) * i as f64 / n_scan as f64;
        let class = classify_r(gamma, r, sp)?;
        classes.push((r, class));
    }
    let mut brackets = Vec::new();
    for pair in classes.windows(2) {
        let (r0, c0) = pair[0];
        let (r1, c1) = pair[1];
        let principal = |c: ShotClass| matches!(c, ShotClass::Above | ShotClass::Below);
        if (principal(c0) && principal(c1) && c0 != c1)
            || matches!(c0, ShotClass::Success)
            || matches!(c1, ShotClass::Success)
        {
            brackets.push((r0, r1));
        }
    }
    if brackets.is_empty() {
        return Err(Error::NoSignChange {
            lo: lo0,
            hi: hi0,
            class_lo: format!("{:?}", classes.first().unwrap().1),
            class_hi: format!("{:?}", classes.last().unwrap().1),
        });
    }

    // bisect the first (smallest-r) bracket
    let (mut lo, mut hi) = brackets[0];
    let class_lo = classify_r(gamma, lo, sp)?;
    let mut best_success: Option<f64> = None;
    while hi - lo > sp.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let cm = classify_r(gamma, mid, sp)?;
        if let ShotClass::Success = cm {
            best_success = Some(mid);
            break;
        }
        if cm == class_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let _ = class_lo;
    let r_hat = best_success.unwrap_or(0.5 * (lo + hi));

    let params = ModelParams::new(gamma, r_hat)?;
    let cp = critical_points(&params)?;
    let series = select_interior_series(&cp, &params, sp)?;
    let interior = integrate_branch(&series[0], &params, sp, Branch::Interior, &[]).curve;
    let exterior = integrate_branch(&series[0], &params, sp, Branch::Exterior, &[]).curve;
    Ok(AdmissibleShot {
        params,
        critical: cp,
        series,
        interior,
        exterior,
        scan_brackets: brackets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_tail_decays_like_exp_minus_rx() {
        // any r in the bracket gives a valid exterior branch
        let sp = ShootParams::default();
        let params = ModelParams::new(3.0, 1.2).unwrap();
        let cp = critical_points(&params).unwrap();
        let series = select_interior_series(&cp, &params, &sp).unwrap();
        let run = integrate_branch(&series[0], &params, &sp, Branch::Exterior, &[]);
        assert_eq!(run.curve.terminal, Terminal::ReachedSZero);
        // fit log S and log W against x over the far tail
        let tail: Vec<&(f64, f64, f64)> = run
            .curve
            .samples
            .iter()
            .filter(|&&(_, s, _)| s < 1e-4 && s > 1e-7)
            .collect();
        assert!(tail.len() > 10);
        let slope = |get: &dyn Fn(&(f64, f64, f64)) -> f64| {
            let n = tail.len() as f64;
            let sx: f64 = tail.iter().map(|t| t.0).sum();
            let sy: f64 = tail.iter().map(|t| get(t).abs().ln()).sum();
            let sxx: f64 = tail.iter().map(|t| t.0 * t.0).sum();
            let sxy: f64 = tail.iter().map(|t| t.0 * get(t).abs().ln()).sum();
            (n * sxy - sx * sy) / (n * sxx - sx * sx)
        };
        let slope_s = slope(&|t: &(f64, f64, f64)| t.1);
        let slope_w = slope(&|t: &(f64, f64, f64)| t.2);
        assert!(
            (slope_s + params.r).abs() < 0.02 * params.r,
            "S slope {slope_s}"
        );
        assert!(
            (slope_w + params.r).abs() < 0.02 * params.r,
            "W slope {slope_w}"
        );
    }

    #[test]
    fn exterior_stays_below_sonic_line() {
        let sp = ShootParams::default();
        let params = ModelParams::new(3.0, 1.2).unwrap();
        let cp = critical_points(&params).unwrap();
        let series = select_interior_series(&cp, &params, &sp).unwrap();
        let run = integrate_branch(&series[0], &params, &sp, Branch::Exterior, &[]);
        for &(_, s, w) in run.curve.samples.iter().skip(1) {
            assert!(1.0 - w - s > 0.0, "1-W-S = {} at S = {s}", 1.0 - w - s);
        }
    }

    #[test]
    fn interior_misses_barriers_only_near_transition() {
        // a clearly off r must hit a barrier
        let sp = ShootParams::default();
        let c = classify_r(3.0, 1.05, &sp).unwrap();
        assert!(matches!(c, ShotClass::Above | ShotClass::Below), "{c:?}");
        let c2 = classify_r(3.0, 1.23, &sp).unwrap();
        assert!(matches!(c2, ShotClass::Above | ShotClass::Below), "{c2:?}");
    }
}
