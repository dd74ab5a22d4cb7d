use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde_json::{json, Value};

use rgflow::{
    boundary_curve, fixed_points, mu_of_beta, phat_of_beta, solve_pbar, t_crossover, t_star,
    theta_prime_n, u0_prime, u_of_x, zero_density, Flavor, FlowError, FlowParams, Regime,
};

use crate::output::{Cell, Plot, Table};
use crate::{Command, Common, Failure, Format, Grid, Model};

fn numerical(command: &'static str) -> impl Fn(FlowError) -> Failure {
    move |error| match error {
        FlowError::Domain { .. } => Failure::Usage(format!("{command}: {error}")),
        error => Failure::Numerical { command, error },
    }
}

fn check_common(common: &Common) -> Result<(), Failure> {
    if !(1e-14..=1e-2).contains(&common.tol) {
        return Err(Failure::Usage(format!(
            "--tol must lie in [1e-14, 1e-2], got {}",
            common.tol
        )));
    }
    Ok(())
}

fn check_points(points: usize, min: usize) -> Result<(), Failure> {
    if points < min {
        return Err(Failure::Usage(format!(
            "--points must be at least {min}, got {points}"
        )));
    }
    Ok(())
}

fn params(command: &'static str, model: &Model, t: f64) -> Result<FlowParams, Failure> {
    FlowParams::new(model.beta, model.flavor, t).map_err(numerical(command))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

fn grid_values(grid: &Grid) -> Result<Vec<f64>, Failure> {
    check_points(grid.points, 2)?;
    Ok(linspace(grid.start, grid.stop, grid.points))
}

fn model_meta(model: &Model) -> Value {
    json!({ "flavor": model.flavor, "beta": model.beta })
}

fn emit(
    common: &Common,
    command: &'static str,
    table: &Table,
    mut meta: Value,
) -> Result<(), Failure> {
    let text = match common.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            if let Value::Object(m) = &mut meta {
                m.insert("command".into(), json!(command));
                m.insert("version".into(), json!(rgflow::VERSION));
                m.insert("tol".into(), json!(common.tol));
            }
            table.to_json(meta)
        }
        Format::Svg => table.to_svg().ok_or_else(|| {
            Failure::Usage(format!("svg output is not available for `{command}`"))
        })?,
    };
    match &common.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn flow_row(t: f64, x: C, p: C, u: C) -> Vec<Cell> {
    vec![
        t.into(),
        x.re.into(),
        x.im.into(),
        p.re.into(),
        p.im.into(),
        u.re.into(),
        u.im.into(),
    ]
}

const FLOW_HEADERS: [&str; 7] = ["t", "x_re", "x_im", "p_re", "p_im", "u_re", "u_im"];

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Flow {
            model,
            t_start,
            t_stop,
            points,
            x_re,
            x_im,
            common,
        } => {
            const NAME: &str = "flow";
            check_common(&common)?;
            check_points(points, 2)?;
            let x = C::new(x_re, x_im);
            let ts = linspace(t_start, t_stop, points);
            let ps: Vec<FlowParams> = ts
                .iter()
                .map(|&t| params(NAME, &model, t))
                .collect::<Result<_, _>>()?;
            let rows: Vec<Result<Vec<Cell>, FlowError>> = ps
                .par_iter()
                .map(|p| {
                    let pbar = solve_pbar(p, x, common.tol)?.pbar;
                    let u = u_of_x(p, x, common.tol)?;
                    Ok(flow_row(p.t, x, pbar, u))
                })
                .collect();
            let mut table = Table::new(&FLOW_HEADERS);
            for r in rows {
                table.push(r.map_err(numerical(NAME))?);
            }
            table.plot = Some(Plot {
                x: "t",
                y: "p_re",
                series: vec![("t", "p_re"), ("t", "u_re")],
            });
            let meta = json!({ "model": model_meta(&model), "x": [x_re, x_im], "t": [t_start, t_stop, points] });
            emit(&common, NAME, &table, meta)
        }
        Command::Invert {
            model,
            t,
            x_re,
            x_im,
            common,
        } => {
            const NAME: &str = "invert";
            check_common(&common)?;
            let p = params(NAME, &model, t)?;
            let r = solve_pbar(&p, C::new(x_re, x_im), common.tol).map_err(numerical(NAME))?;
            let mut table = Table::new(&[
                "t",
                "x_re",
                "x_im",
                "p_re",
                "p_im",
                "residual",
                "method",
                "iterations",
            ]);
            let method = match r.method {
                rgflow::InversionMethod::Newton => "newton",
                rgflow::InversionMethod::ContourIntegral => "contour_integral",
                rgflow::InversionMethod::Bisection => "bisection",
            };
            table.push(vec![
                t.into(),
                x_re.into(),
                x_im.into(),
                r.pbar.re.into(),
                r.pbar.im.into(),
                r.residual.into(),
                method.into(),
                r.iterations.into(),
            ]);
            emit(
                &common,
                NAME,
                &table,
                json!({ "model": model_meta(&model) }),
            )
        }
        Command::U {
            model,
            t,
            grid,
            x_im,
            common,
        } => {
            const NAME: &str = "u";
            check_common(&common)?;
            let p = params(NAME, &model, t)?;
            let xs = grid_values(&grid)?;
            let rows: Vec<Result<Vec<Cell>, FlowError>> = xs
                .par_iter()
                .map(|&xr| {
                    let x = C::new(xr, x_im);
                    let pbar = solve_pbar(&p, x, common.tol)?.pbar;
                    let u = u_of_x(&p, x, common.tol)?;
                    Ok(flow_row(t, x, pbar, u))
                })
                .collect();
            let mut table = Table::new(&FLOW_HEADERS);
            for r in rows {
                table.push(r.map_err(numerical(NAME))?);
            }
            table.plot = Some(Plot {
                x: "x_re",
                y: "u_re",
                series: vec![("x_re", "u_re"), ("x_re", "p_re")],
            });
            emit(
                &common,
                NAME,
                &table,
                json!({ "model": model_meta(&model), "t": t }),
            )
        }
        Command::Boundary { t, points, common } => {
            const NAME: &str = "boundary";
            check_common(&common)?;
            check_points(points, 16)?;
            let b = boundary_curve(t, points).map_err(numerical(NAME))?;
            if !b.failed.is_empty() {
                eprintln!(
                    "rgflow boundary: no sign change at {} grid points; excluded",
                    b.failed.len()
                );
            }
            let mut table = Table::new(&["t", "p", "q"]);
            for pt in &b.arc {
                table.push(vec![t.into(), pt.p.into(), pt.q.into()]);
            }
            table.plot = Some(Plot {
                x: "p",
                y: "q",
                series: vec![("p", "q")],
            });
            emit(
                &common,
                NAME,
                &table,
                json!({ "t": t, "alpha": b.alpha, "excluded": b.failed }),
            )
        }
        Command::Zeros { t, points, common } => {
            const NAME: &str = "zeros";
            check_common(&common)?;
            check_points(points, 16)?;
            let z = zero_density(t, points).map_err(numerical(NAME))?;
            let mut table = Table::new(&["t", "lambda", "rho"]);
            for s in &z.samples {
                table.push(vec![t.into(), s.lambda.into(), s.rho.into()]);
            }
            table.plot = Some(Plot {
                x: "lambda",
                y: "rho",
                series: vec![("lambda", "rho")],
            });
            emit(
                &common,
                NAME,
                &table,
                json!({ "t": t, "edge": z.edge, "dropped": z.dropped }),
            )
        }
        Command::FixedPoints {
            t_start,
            t_stop,
            points,
            common,
        } => {
            const NAME: &str = "fixed-points";
            check_common(&common)?;
            check_points(points, 2)?;
            let ts = linspace(t_start, t_stop, points);
            let sets: Vec<_> = ts.par_iter().map(|&t| fixed_points(t)).collect();
            let mut table = Table::new(&[
                "t",
                "zeta_re",
                "zeta_im",
                "zetastar_re",
                "zetastar_im",
                "regime",
            ]);
            for s in sets {
                let s = s.map_err(numerical(NAME))?;
                let regime = match s.regime {
                    Regime::ConjugatePair => "conjugate_pair",
                    Regime::RealPair => "real_pair",
                };
                table.push(vec![
                    s.t.into(),
                    s.zeta.re.into(),
                    s.zeta.im.into(),
                    s.zeta_star.re.into(),
                    s.zeta_star.im.into(),
                    regime.into(),
                ]);
            }
            table.plot = Some(Plot {
                x: "zeta_re",
                y: "zeta_im",
                series: vec![("zeta_re", "zeta_im"), ("zetastar_re", "zetastar_im")],
            });
            emit(
                &common,
                NAME,
                &table,
                json!({ "t": [t_start, t_stop, points] }),
            )
        }
        Command::TStar { common } => {
            const NAME: &str = "t-star";
            check_common(&common)?;
            let tol = common.tol.max(1e-8);
            let ts = t_star(tol).map_err(numerical(NAME))?;
            let mut table = Table::new(&["t_star"]);
            table.push(vec![ts.into()]);
            emit(&common, NAME, &table, json!({ "effective_tol": tol }))
        }
        Command::Crossover { common } => {
            const NAME: &str = "crossover";
            check_common(&common)?;
            let tol = common.tol.max(1e-6);
            let ts = t_star(1e-8).map_err(numerical(NAME))?;
            let tco = t_crossover(tol).map_err(numerical(NAME))?;
            let res = rgflow::crossover_residual(tco).map_err(numerical(NAME))?;
            let mut table = Table::new(&["t_star", "t_co", "residual"]);
            table.push(vec![ts.into(), tco.into(), res.into()]);
            emit(&common, NAME, &table, json!({ "effective_tol": tol }))
        }
        Command::Thermo { beta, common } => {
            const NAME: &str = "thermo";
            check_common(&common)?;
            let phat = phat_of_beta(beta).map_err(numerical(NAME))?;
            let mu = if beta == 0.0 {
                f64::NEG_INFINITY
            } else {
                mu_of_beta(beta).map_err(numerical(NAME))?
            };
            let mut table = Table::new(&["beta", "phat", "mu"]);
            table.push(vec![beta.into(), phat.into(), mu.into()]);
            emit(&common, NAME, &table, json!({}))
        }
        Command::Initial {
            beta,
            n,
            grid,
            x_im,
            common,
        } => {
            const NAME: &str = "initial";
            check_common(&common)?;
            let xs = grid_values(&grid)?;
            let rows: Vec<Result<Vec<Cell>, FlowError>> = xs
                .par_iter()
                .map(|&xr| {
                    let x = C::new(xr, x_im);
                    let th = theta_prime_n(n, x, beta)?;
                    let u = u0_prime(x, beta)?;
                    Ok(vec![
                        xr.into(),
                        x_im.into(),
                        th.re.into(),
                        th.im.into(),
                        u.re.into(),
                        u.im.into(),
                    ])
                })
                .collect();
            let mut table =
                Table::new(&["x_re", "x_im", "theta_re", "theta_im", "u0p_re", "u0p_im"]);
            for r in rows {
                table.push(r.map_err(numerical(NAME))?);
            }
            table.plot = Some(Plot {
                x: "x_re",
                y: "theta_re",
                series: vec![("x_re", "theta_re"), ("x_re", "u0p_re")],
            });
            emit(
                &common,
                NAME,
                &table,
                json!({ "beta": beta, "n": n, "flavor": Flavor::Critical }),
            )
        }
        Command::Verify { suite, common } => {
            const NAME: &str = "verify";
            let report = rgflow::verify::run_suite(suite);
            for c in &report.checks {
                eprintln!(
                    "C{:<2} {} {:<60} measured {:>12.4e}  threshold {:>10.1e}",
                    c.criterion,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.threshold
                );
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            eprintln!("{} checks, {} failed", report.checks.len(), failed);
            let mut table = Table::new(&["criterion", "name", "measured", "threshold", "passed"]);
            for c in &report.checks {
                table.push(vec![
                    (c.criterion as usize).into(),
                    c.name.as_str().into(),
                    c.measured.into(),
                    c.threshold.into(),
                    if c.passed { "true" } else { "false" }.into(),
                ]);
            }
            emit(&common, NAME, &table, json!({ "suite": suite }))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::ChecksFailed)
            }
        }
    }
}
