use implode_core::params::ModelParams;
use implode_core::phase::*;
use implode_core::series::*;
use implode_core::ode::*;

fn inward_w_at(params: &ModelParams, s0: f64, s_end: f64) -> Option<f64> {
    let w_e = params.w_e;
    let k0 = w_e*(w_e-1.0)*(w_e-params.r);
    let w_start = w_e + k0/(4.0*s0*s0);
    let rk = AdaptiveRk { rtol: 1e-12, atol: 1e-16, h_init: 1e-3, h_min: 1e-13, h_max: 20.0 };
    let sys = |s: f64, y: &[f64;1]| {
        let (_, d1, d2) = eval_field(PhasePoint{w: y[0], s}, params);
        [d1/d2]
    };
    rk.integrate_to(&sys, s0, [w_start], s_end, |_, _| true).ok().map(|(_, y)| y[0])
}

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

fn slow_series(params: &ModelParams, order: usize) -> Option<SonicSeries> {
    let cp = critical_points(params).ok()?;
    let branches = both_branches(cp.p2, 0.0, params, order).ok()?;
    let dd = 1e-6;
    let w2s = (roots_delta1(cp.p2.s+dd, params).unwrap().1 - roots_delta1(cp.p2.s-dd, params).unwrap().1)/(2.0*dd);
    let w2ms = (roots_delta2(cp.p2.s+dd, params).unwrap().0 - roots_delta2(cp.p2.s-dd, params).unwrap().0)/(2.0*dd);
    let (mlo, mhi) = if w2s < w2ms {(w2s, w2ms)} else {(w2ms, w2s)};
    branches.into_iter().find(|b| b.slope > mlo && b.slope < mhi)
}

fn eig_ratio(params: &ModelParams) -> f64 {
    let cp = critical_points(params).unwrap();
    let j = eval_field_jacobian(cp.p2, params);
    let (a, b, c, d) = (j[1][0], j[1][1], j[2][0], j[2][1]);
    let tr = a + d; let det = a*d - b*c;
    let disc = (tr*tr - 4.0*det).max(0.0).sqrt();
    ((tr-disc)/2.0 / ((tr+disc)/2.0)).abs()
}

fn main() {
    let gamma: f64 = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(3.0);
    let probe = ModelParams::new_unchecked(gamma, 1.0 + 1e-9).unwrap();
    let (rlo, rhi) = (probe.r_lo, probe.r_hi);
    println!("gamma={gamma} bracket=({rlo:.8}, {rhi:.8})");
    let n = 40;
    for i in 0..=n {
        let r = rlo + (rhi - rlo) * (0.01 + 0.98 * i as f64 / n as f64);
        let params = ModelParams::new(gamma, r).unwrap();
        let rho = eig_ratio(&params);
        let cp = critical_points(&params).unwrap();
        let mut line = format!("r={r:.7} rho={rho:6.2}");
        for order in [6usize, 8] {
            if let Some(sl) = slow_series(&params, order) {
                let t1 = 0.04; let t2 = 0.08;
                let m1 = inward_w_at(&params, 1e3, cp.p2.s + t1).map(|w| w - germ_w_at(&sl, cp.p2.s + t1));
                let m2 = inward_w_at(&params, 1e3, cp.p2.s + t2).map(|w| w - germ_w_at(&sl, cp.p2.s + t2));
                if let (Some(m1), Some(m2)) = (m1, m2) {
                    let p = (m2.abs().max(1e-300)/m1.abs().max(1e-300)).ln() / (t2/t1_f(t1)).ln();
                    line += &format!(" | o{order}: M1={m1:+.2e} M2={m2:+.2e} p={p:5.1}");
                }
            } else { line += &format!(" | o{order}: -"); }
        }
        println!("{line}");
    }
}
fn t1_f(t1: f64) -> f64 { t1 }
