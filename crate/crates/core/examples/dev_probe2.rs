use implode_core::params::ModelParams;
use implode_core::phase::*;
use implode_core::series::*;
use implode_core::ode::*;

fn germ_w_at(series: &SonicSeries, s_match: f64) -> f64 {
    let mut dx = (s_match - series.center.s) / series.s_coeffs[1];
    for _ in 0..60 {
        let p = series.eval(dx);
        let mut ds = 0.0;
        for k in (1..series.s_coeffs.len()).rev() { ds = ds*dx + k as f64 * series.s_coeffs[k]; }
        dx -= (p.s - s_match)/ds;
    }
    series.eval(dx).w
}

fn slow_series(params: &ModelParams, order: usize) -> SonicSeries {
    let cp = critical_points(params).unwrap();
    let branches = both_branches(cp.p2, 0.0, params, order).unwrap();
    let dd = 1e-6;
    let w2s = (roots_delta1(cp.p2.s+dd, params).unwrap().1 - roots_delta1(cp.p2.s-dd, params).unwrap().1)/(2.0*dd);
    let w2ms = (roots_delta2(cp.p2.s+dd, params).unwrap().0 - roots_delta2(cp.p2.s-dd, params).unwrap().0)/(2.0*dd);
    let (mlo, mhi) = if w2s < w2ms {(w2s, w2ms)} else {(w2ms, w2s)};
    branches.into_iter().find(|b| b.slope > mlo && b.slope < mhi).unwrap()
}

fn main() {
    let gamma = 3.0;
    let r = 1.2105;
    let params = ModelParams::new(gamma, r).unwrap();
    let cp = critical_points(&params).unwrap();
    let p2 = cp.p2;
    println!("P2 = ({}, {})", p2.s, p2.w);

    // (a) interior 2D inward landing
    let w_e = params.w_e;
    let k0 = w_e*(w_e-1.0)*(w_e-r);
    let s0 = 1e3;
    let rk = AdaptiveRk { rtol: 1e-12, atol: 1e-16, h_init: 1e-4, h_min: 1e-14, h_max: 0.05 };
    let sys2 = |_x: f64, y: &[f64;2]| {
        let (delta, d1, d2) = eval_field(PhasePoint{w: y[0], s: y[1]}, &params);
        [-d1/delta, -d2/delta]
    };
    // inward: x increases (S decreasing)
    let mut hit = (0.0, [0.0f64;2]);
    let res = rk.integrate_to(&sys2, 0.0, [w_e + k0/(4.0*s0*s0), s0], 30.0, |x, y| {
        hit = (x, *y);
        (y[1] - p2.s).abs() > 1e-7 && y[1] > p2.s
    });
    println!("interior landing: res={:?} x={:.6} S-P2S={:.3e} W-P2W={:.3e}", res.is_ok(), hit.0, hit.1[1]-p2.s, hit.1[0]-p2.w);
    // L = lim e^x S at the start side: e^{x}S with x measured from landing: xi_s at x_land
    // here x0=0 at S=1e3; landing at x_land: profile gauge xi_s=1 => xi(start) = e^{0-x_land}
    let l_const = (0.0 - hit.0).exp() * s0;
    println!("Sigma0*alpha = lim xi*S ~ {l_const:.6}");

    // (b) exterior ratio scan: 1D dW/dS from S_t up to s_match
    let s_match = p2.s - 0.04;
    let germ = slow_series(&params, 8);
    let wg = germ_w_at(&germ, s_match);
    let s_t = 1e-6;
    let rk1 = AdaptiveRk { rtol: 1e-12, atol: 1e-16, h_init: 1e-6, h_min: 1e-16, h_max: 0.05 };
    let sys1 = |s: f64, y: &[f64;1]| {
        let (_, d1, d2) = eval_field(PhasePoint{w: y[0], s}, &params);
        [d1/d2]
    };
    let mext = |rho: f64| -> Option<f64> {
        let (_, y) = rk1.integrate_to(&sys1, s_t, [rho*s_t], s_match, |_, y| y[0].is_finite() && y[0].abs() < 10.0).ok()?;
        Some(y[0] - wg)
    };
    for i in 0..=20 {
        let rho = 0.30 + 0.7 * i as f64 / 20.0;
        println!("rho={rho:.3}: M_ext = {:?}", mext(rho));
    }
    // bisect with None treated as positive class
    let cls = |m: Option<f64>| m.map(|v| v > 0.0).unwrap_or(true);
    let (mut lo, mut hi) = (0.3, 1.0);
    let flo = cls(mext(lo));
    for _ in 0..70 {
        let mid = 0.5*(lo+hi);
        if cls(mext(mid)) == flo { lo = mid; } else { hi = mid; }
    }
    println!("rho* = {:.15e}, M_ext = {:?}, width = {:.2e}", lo, mext(lo), hi-lo);
}
