//! Self-check suites: each check records a measured quantity, its
//! threshold and whether it passed.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::geometry::{
    alpha_of_t, boundary_curve, boundary_height, crossover_residual, edge_of_t, fixed_points,
    t_crossover, t_star, zero_density, Regime,
};
use crate::initcond::{f0_stieltjes, rho_initial, theta_prime_n, u0_prime};
use crate::inversion::{
    characteristic_position, characteristics_oracle, mu_of_beta, pbar_asymptotic_normal,
    phat_of_beta, solve_pbar, u_of_x,
};
use crate::params::{Flavor, FlowParams};
use crate::scalarflow::{eval_v_real, flow_derivs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pde,
    Inversion,
    Limits,
    Geometry,
    Initial,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pde" => Ok(Suite::Pde),
            "inversion" => Ok(Suite::Inversion),
            "limits" => Ok(Suite::Limits),
            "geometry" => Ok(Suite::Geometry),
            "initial" => Ok(Suite::Initial),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected pde|inversion|limits|geometry|initial|all)"
            )),
        }
    }
}

/// One measured check. `measured ≤ threshold` passes unless stated otherwise
/// in `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(criterion: u8, name: &str, measured: f64, threshold: f64) -> Check {
        Check {
            criterion,
            name: name.to_string(),
            measured,
            threshold,
            passed: measured <= threshold,
        }
    }

    fn holds(criterion: u8, name: &str, measured: f64, ok: bool) -> Check {
        Check {
            criterion,
            name: name.to_string(),
            measured,
            threshold: f64::NAN,
            passed: ok,
        }
    }

    fn failed(criterion: u8, name: &str, err: &FlowError) -> Check {
        Check {
            criterion,
            name: format!("{name} [{err}]"),
            measured: f64::NAN,
            threshold: f64::NAN,
            passed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

fn record(out: &mut Vec<Check>, criterion: u8, name: &str, r: Result<Check>) {
    match r {
        Ok(c) => out.push(c),
        Err(e) => out.push(Check::failed(criterion, name, &e)),
    }
}

fn both_flavors(beta: f64, t: f64) -> Result<[FlowParams; 2]> {
    Ok([
        FlowParams::new(beta, Flavor::Critical, t)?,
        FlowParams::new(beta, Flavor::Normal, t)?,
    ])
}

/// `max |v(0,p) - (1/(2p) + β/(4p²))|` over the test grid.
pub fn initial_reduction_error() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beta in [1.0, 2.0, 3.0, 4.0] {
        for params in both_flavors(beta, 0.0)? {
            for p in linspace(-3.9, -0.01, 400) {
                let exact = 1.0 / (2.0 * p) + beta / (4.0 * p * p);
                worst = worst.max((eval_v_real(&params, p)? - exact).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest transport-equation residual relative to `max(1, |v|)` on a 50×50
/// grid, with `∂v/∂t` from a five-point difference.
pub fn pde_residual() -> Result<f64> {
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for (beta, flavor) in [(4.0, Flavor::Critical), (2.0, Flavor::Normal)] {
        for t in linspace(0.1, 4.0, 50) {
            let params = FlowParams::new(beta, flavor, t)?;
            for p in linspace(-3.9, -0.1, 50) {
                let at =
                    |s: f64| -> Result<f64> { eval_v_real(&FlowParams::new(beta, flavor, s)?, p) };
                let fd = (at(t - 2.0 * h)? - 8.0 * at(t - h)? + 8.0 * at(t + h)?
                    - at(t + 2.0 * h)?)
                    / (12.0 * h);
                let d = flow_derivs(&params, C::new(p, 0.0))?;
                let rhs = d.dv_dt(&params, C::new(p, 0.0)).re;
                worst = worst.max((fd - rhs).abs() / d.v.norm().max(1.0));
            }
        }
    }
    Ok(worst)
}

/// Worst `(|Δp|, |ΔV|)` of the RK4 oracle against the closed forms.
pub fn characteristics_error(steps: usize) -> Result<(f64, f64)> {
    let mut worst: (f64, f64) = (0.0, 0.0);
    for (beta, flavor) in [(4.0, Flavor::Critical), (2.0, Flavor::Normal)] {
        for p0 in [-0.9, -0.7, -0.5, -0.3, -0.1] {
            for t in [0.25, 0.5, 0.75, 1.0] {
                let params = FlowParams::new(beta, flavor, t)?;
                let s = characteristics_oracle(&params, p0, t, steps)?;
                let p = characteristic_position(&params, p0, t);
                worst.0 = worst.0.max((s.p - p).abs());
                worst.1 = worst.1.max((s.v - eval_v_real(&params, p)?).abs());
            }
        }
    }
    Ok(worst)
}

/// Ratio of RK4 position errors at `n` and `2n` steps (`p₀ = -0.5`, `t = 1`).
pub fn characteristics_order_ratio(flavor: Flavor, n: usize) -> Result<f64> {
    let params = FlowParams::new(4.0, flavor, 1.0)?;
    let exact = characteristic_position(&params, -0.5, 1.0);
    let e1 = (characteristics_oracle(&params, -0.5, 1.0, n)?.p - exact).abs();
    let e2 = (characteristics_oracle(&params, -0.5, 1.0, 2 * n)?.p - exact).abs();
    Ok(e1 / e2)
}

fn pde_suite(out: &mut Vec<Check>) {
    record(
        out,
        1,
        "initial reduction max error",
        initial_reduction_error()
            .map(|e| Check::at_most(1, "initial reduction max error", e, 1e-12)),
    );
    record(
        out,
        2,
        "PDE relative residual",
        pde_residual().map(|e| Check::at_most(2, "PDE relative residual", e, 1e-6)),
    );
    let fixed = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in [0.0, 1.0, 5.0, 20.0] {
            worst = worst.max((eval_v_real(&FlowParams::critical(t)?, -1.0)? - 0.5).abs());
        }
        Ok(worst)
    };
    record(
        out,
        4,
        "v(t,-1) = 1/2",
        fixed().map(|e| Check::at_most(4, "v(t,-1) = 1/2", e, 1e-10)),
    );
}

fn inversion_suite(out: &mut Vec<Check>) {
    match characteristics_error(10_000) {
        Ok((dp, dv)) => {
            out.push(Check::at_most(3, "characteristics |dp|", dp, 1e-10));
            out.push(Check::at_most(3, "characteristics |dV|", dv, 1e-8));
        }
        Err(e) => out.push(Check::failed(3, "characteristics", &e)),
    }
    for flavor in [Flavor::Critical, Flavor::Normal] {
        let name = format!("RK4 step-halving error ratio ({flavor:?}) in 16 +- 30%");
        record(
            out,
            3,
            &name,
            characteristics_order_ratio(flavor, 100)
                .map(|r| Check::holds(3, &name, r, (r / 16.0 - 1.0).abs() <= 0.3)),
        );
    }
    let fixed = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in [0.0, 1.0, 5.0, 20.0] {
            let r = solve_pbar(&FlowParams::critical(t)?, C::new(0.5, 0.0), 1e-12)?;
            worst = worst.max((r.pbar - C::new(-1.0, 0.0)).norm());
        }
        Ok(worst)
    };
    record(
        out,
        4,
        "pbar(t,1/2) = -1",
        fixed().map(|e| Check::at_most(4, "pbar(t,1/2) = -1", e, 1e-10)),
    );
    let round_trip = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (beta, flavor) in [(4.0, Flavor::Critical), (2.0, Flavor::Normal)] {
            for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
                let params = FlowParams::new(beta, flavor, t)?;
                let alpha = crate::inversion::turning_point(&params)?;
                for p in linspace(-alpha * 0.99, -1e-3, 40) {
                    let x = eval_v_real(&params, p)?;
                    let back = solve_pbar(&params, C::new(x, 0.0), 1e-8)?.pbar.re;
                    worst = worst.max((back - p).abs());
                }
            }
        }
        Ok(worst)
    };
    record(
        out,
        4,
        "round trip solve_pbar(v(p)) = p",
        round_trip().map(|e| Check::at_most(4, "round trip solve_pbar(v(p)) = p", e, 1e-9)),
    );
}

/// Least-squares slope and intercept of `ln y` against `x`.
pub fn log_linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fitted `(rate, prefactor)` of `|p̄(t, x) - p̂| ≈ A e^{-rate·t}` over `t ∈ [3, 8]`.
pub fn normal_decay_fit(beta: f64, x: f64) -> Result<(f64, f64)> {
    let ph = phat_of_beta(beta)?;
    let ts: Vec<f64> = linspace(3.0, 8.0, 11).collect();
    let mut ys = Vec::with_capacity(ts.len());
    for &t in &ts {
        let r = solve_pbar(&FlowParams::normal(beta, t)?, C::new(x, 0.0), 1e-10)?;
        ys.push((r.pbar.re - ph).abs());
    }
    let (slope, icept) = log_linear_fit(&ts, &ys);
    Ok((-slope, icept.exp()))
}

fn limits_suite(out: &mut Vec<Check>) {
    for t in [50.0, 100.0, 500.0] {
        let name = format!("|pbar({t},0)+1-1/(4t)| * t");
        let name_sign = format!("|pbar({t},0)+1+1/(4t)| * t");
        match solve_pbar(&FlowParams::critical(t).unwrap(), C::new(0.0, 0.0), 1e-10) {
            Ok(r) => {
                let lit = (r.pbar.re + 1.0 - 1.0 / (4.0 * t)).abs() * t;
                let flipped = (r.pbar.re + 1.0 + 1.0 / (4.0 * t)).abs() * t;
                out.push(Check::at_most(5, &name, lit, 0.3));
                out.push(Check::at_most(5, &name_sign, flipped, 0.3));
            }
            Err(e) => out.push(Check::failed(5, &name, &e)),
        }
    }
    let gauss_u = || -> Result<f64> {
        let params = FlowParams::critical(50.0)?;
        let mut worst: f64 = 0.0;
        for x in linspace(-0.05, 1.0, 22) {
            let u = u_of_x(&params, C::new(x, 0.0), 1e-10)?;
            worst = worst.max((u + x).norm());
        }
        Ok(worst)
    };
    record(
        out,
        5,
        "max |u(50,x)+x|",
        gauss_u().map(|e| Check::at_most(5, "max |u(50,x)+x|", e, 2e-2)),
    );
    for beta in [1.0, 2.0, 3.0] {
        let name = format!("beta={beta}: |phat - 1/(2mu)|");
        record(
            out,
            6,
            &name,
            phat_of_beta(beta)
                .and_then(|ph| Ok((ph - 1.0 / (2.0 * mu_of_beta(beta)?)).abs()))
                .map(|e| Check::at_most(6, &name, e, 1e-10)),
        );
        let rate_name = format!("beta={beta}: decay rate in 2 +- 5%");
        let pref_name = format!("beta={beta}: prefactor / 4p(p+2)/(beta-4p(4-beta)) in 1 +- 5%");
        match normal_decay_fit(beta, 0.0) {
            Ok((rate, pref)) => {
                out.push(Check::holds(
                    6,
                    &rate_name,
                    rate,
                    (rate / 2.0 - 1.0).abs() <= 0.05,
                ));
                let coeff = phat_of_beta(beta).and_then(|ph| {
                    let base = pbar_asymptotic_normal(0.0, beta)? - ph;
                    Ok(base.abs())
                });
                match coeff {
                    Ok(c) => {
                        let ratio = pref / c;
                        out.push(Check::holds(
                            6,
                            &pref_name,
                            ratio,
                            (ratio - 1.0).abs() <= 0.05,
                        ));
                    }
                    Err(e) => out.push(Check::failed(6, &pref_name, &e)),
                }
            }
            Err(e) => out.push(Check::failed(6, &rate_name, &e)),
        }
    }
}

/// `h*(p) = √((3p² + 2p³)/(1 - 2p))` on `[-3/2, 0]`.
pub fn folium(p: f64) -> f64 {
    ((3.0 * p * p + 2.0 * p * p * p) / (1.0 - 2.0 * p))
        .max(0.0)
        .sqrt()
}

/// Largest vertical gap between the `t`-arc and the folium over `[-3/2, 0]`.
pub fn folium_deviation(t: f64, n: usize) -> Result<f64> {
    let b = boundary_curve(t, n)?;
    Ok(b.arc
        .iter()
        .filter(|pt| pt.p >= -1.5)
        .map(|pt| (pt.q - folium(pt.p)).abs())
        .fold(0.0, f64::max))
}

fn geometry_suite(out: &mut Vec<Check>) {
    record(
        out,
        7,
        "|alpha(0)-4|",
        alpha_of_t(0.0).map(|a| Check::at_most(7, "|alpha(0)-4|", (a - 4.0).abs(), 1e-8)),
    );
    record(
        out,
        7,
        "|alpha(20)-1.5|",
        alpha_of_t(20.0).map(|a| Check::at_most(7, "|alpha(20)-1.5|", (a - 1.5).abs(), 0.02)),
    );
    record(
        out,
        7,
        "|d(0)-1/16|",
        edge_of_t(0.0).map(|d| Check::at_most(7, "|d(0)-1/16|", (d - 1.0 / 16.0).abs(), 1e-10)),
    );
    record(
        out,
        7,
        "|d(50)/50 / (8/27) - 1|",
        edge_of_t(50.0).map(|d| {
            Check::at_most(
                7,
                "|d(50)/50 / (8/27) - 1|",
                (d / 50.0 / (8.0 / 27.0) - 1.0).abs(),
                0.05,
            )
        }),
    );
    let semicircle = || -> Result<f64> {
        let b = boundary_curve(0.0, 201)?;
        Ok(b.arc
            .iter()
            .map(|pt| (pt.q - (4.0 - (pt.p + 2.0).powi(2)).max(0.0).sqrt()).abs())
            .fold(0.0, f64::max))
    };
    record(
        out,
        7,
        "t=0 arc vs semicircle",
        semicircle().map(|e| Check::at_most(7, "t=0 arc vs semicircle", e, 1e-8)),
    );
    record(
        out,
        7,
        "t=20 arc vs folium",
        folium_deviation(20.0, 201).map(|e| Check::at_most(7, "t=20 arc vs folium", e, 2e-2)),
    );

    match fixed_points(0.0) {
        Ok(fp) => {
            let z = fp.zeta;
            out.push(Check::at_most(
                8,
                "|zeta0 - (-0.582687+0.720119i)|",
                (z - C::new(-0.582687, 0.720119)).norm(),
                1e-5,
            ));
            out.push(Check::at_most(
                8,
                "|2 zeta0^3 - zeta0 - 2|",
                (z * z * z * 2.0 - z - 2.0).norm(),
                1e-9,
            ));
        }
        Err(e) => out.push(Check::failed(8, "zeta0", &e)),
    }
    let ts = t_star(1e-8);
    record(
        out,
        8,
        "|t* - 5.155075|",
        ts.clone()
            .map(|t| Check::at_most(8, "|t* - 5.155075|", (t - 5.155075).abs(), 1e-3)),
    );
    if let Ok(ts) = ts {
        let regimes = (|| -> Result<bool> {
            Ok(fixed_points(ts - 0.1)?.regime == Regime::ConjugatePair
                && fixed_points(ts + 0.1)?.regime == Regime::RealPair)
        })();
        record(
            out,
            8,
            "regime flips at t*",
            regimes.map(|ok| Check::holds(8, "regime flips at t*", ts, ok)),
        );
        match t_crossover(1e-6) {
            Ok(tco) => {
                out.push(Check::holds(8, "t_co > t*", tco, tco > ts));
                record(
                    out,
                    8,
                    "|zeta*(t_co) + alpha(t_co)|",
                    crossover_residual(tco)
                        .map(|r| Check::at_most(8, "|zeta*(t_co) + alpha(t_co)|", r.abs(), 1e-6)),
                );
            }
            Err(e) => out.push(Check::failed(8, "t_co", &e)),
        }
    }

    let support = || -> Result<(bool, f64)> {
        let mut last_edge = edge_of_t(0.0)?;
        let mut ok = true;
        let mut min_rho = f64::INFINITY;
        for t in [1.0, 2.0, 4.0] {
            let z = zero_density(t, 128)?;
            ok &= z.edge > last_edge;
            last_edge = z.edge;
            min_rho = z.samples.iter().map(|s| s.rho).fold(min_rho, f64::min);
        }
        Ok((ok && min_rho >= 0.0, min_rho))
    };
    record(
        out,
        9,
        "rho >= 0 and edge -d(t) decreasing for t in {1,2,4}",
        support().map(|(ok, m)| {
            Check::holds(
                9,
                "rho >= 0 and edge -d(t) decreasing for t in {1,2,4}",
                m,
                ok,
            )
        }),
    );
    let nesting = || -> Result<(bool, f64)> {
        let ts = [0.0, 0.5, 1.0, 2.0, 4.0];
        let alphas: Vec<f64> = ts.iter().map(|&t| alpha_of_t(t)).collect::<Result<_>>()?;
        let grid: Vec<f64> = linspace(-alphas[4] * 0.995, -1e-3, 60).collect();
        let mut heights = Vec::new();
        for &t in &ts {
            heights.push(
                grid.iter()
                    .map(|&p| boundary_height(t, p))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut worst = f64::NEG_INFINITY;
        let mut ok = true;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                ok &= alphas[j] <= alphas[i];
                for (hj, hi) in heights[j].iter().zip(&heights[i]) {
                    worst = worst.max(hj - hi);
                }
            }
        }
        Ok((ok && worst <= 1e-8, worst))
    };
    record(
        out,
        10,
        "Omega_t nesting",
        nesting().map(|(ok, w)| Check::holds(10, "Omega_t nesting", w, ok)),
    );
}

/// 200 deterministic points of the upper half-plane.
pub fn pick_samples() -> Vec<C> {
    let mut pts = Vec::with_capacity(200);
    for i in 0..20 {
        for j in 0..10 {
            pts.push(C::new(-2.0 + 4.0 * i as f64 / 19.0, 0.05 + 0.2 * j as f64));
        }
    }
    pts
}

/// Largest error of `ϑ_N′` against `u₀′` on the convergence grid.
pub fn finite_n_error(n: u32) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for re in linspace(-0.04, 0.3, 18) {
        for im in linspace(0.0, 0.1, 6) {
            let x = C::new(re, im);
            worst = worst.max((theta_prime_n(n, x, 4.0)? - u0_prime(x, 4.0)?).norm());
        }
    }
    Ok(worst)
}

fn initial_suite(out: &mut Vec<Check>) {
    let density = || -> Result<f64> {
        let z = zero_density(0.0, 102)?;
        Ok(z.samples
            .iter()
            .map(|s| (s.rho - rho_initial(s.lambda, 4.0)).abs())
            .fold(0.0, f64::max))
    };
    record(
        out,
        9,
        "t=0 density vs 4 rho0(4 lambda)",
        density().map(|e| Check::at_most(9, "t=0 density vs 4 rho0(4 lambda)", e, 1e-6)),
    );
    record(
        out,
        9,
        "|int rho0/lambda + 1/2|",
        f0_stieltjes(C::new(0.0, 0.0), 1e-12)
            .map(|v| Check::at_most(9, "|int rho0/lambda + 1/2|", (v + 0.5).norm(), 1e-8)),
    );
    let pts = pick_samples();
    let min_u0 = pts
        .iter()
        .map(|&z| u0_prime(z, 4.0).map(|v| v.im))
        .collect::<Result<Vec<_>>>();
    record(
        out,
        10,
        "min Im u0'",
        min_u0.map(|v| {
            let m = v.into_iter().fold(f64::INFINITY, f64::min);
            Check::holds(10, "min Im u0'", m, m > 0.0)
        }),
    );
    let min_theta = pts
        .iter()
        .map(|&z| theta_prime_n(50, z, 4.0).map(|v| v.im))
        .collect::<Result<Vec<_>>>();
    record(
        out,
        10,
        "min Im theta_50'",
        min_theta.map(|v| {
            let m = v.into_iter().fold(f64::INFINITY, f64::min);
            Check::holds(10, "min Im theta_50'", m, m > 0.0)
        }),
    );
    for t in [0.5, 1.0, 2.0, 4.0] {
        let name = format!("min Im pbar({t}, .)");
        let vals = FlowParams::critical(t).and_then(|params| {
            pts.iter()
                .map(|&z| solve_pbar(&params, z, 1e-10).map(|r| r.pbar.im))
                .collect::<Result<Vec<_>>>()
        });
        record(
            out,
            10,
            &name,
            vals.map(|v| {
                let m = v.into_iter().fold(f64::INFINITY, f64::min);
                Check::holds(10, &name, m, m > 0.0)
            }),
        );
    }
    let ratio = finite_n_error(100).and_then(|a| Ok(a / finite_n_error(200)?));
    record(
        out,
        11,
        "finite-N error ratio N=100/N=200 in 2 +- 20%",
        ratio.map(|r| {
            Check::holds(
                11,
                "finite-N error ratio N=100/N=200 in 2 +- 20%",
                r,
                (r / 2.0 - 1.0).abs() <= 0.2,
            )
        }),
    );
}

/// Run one suite (or all of them).
pub fn run_suite(suite: Suite) -> Report {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Pde {
        pde_suite(&mut checks);
    }
    if all || suite == Suite::Inversion {
        inversion_suite(&mut checks);
    }
    if all || suite == Suite::Limits {
        limits_suite(&mut checks);
    }
    if all || suite == Suite::Geometry {
        geometry_suite(&mut checks);
    }
    if all || suite == Suite::Initial {
        initial_suite(&mut checks);
    }
    Report { suite, checks }
}
