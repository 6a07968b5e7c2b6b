//! Command-line planner: load a scenario, solve, emit trajectory CSV and a
//! deterministic report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::direct::{extract_trajectory_direct, solve_direct, DirectConfig, DirectSolution};
use crate::indirect::{extract_trajectory, solve_indirect, IndirectConfig, SwitchTimes};
use crate::report;
use crate::scenario_file::ScenarioFile;
use crate::trajectory::Trajectory;
use crate::verify::{resimulate_direct, resimulate_indirect, ResimResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Indirect,
    Direct,
    Both,
}

#[derive(Debug, Parser)]
#[command(
    name = "plan",
    about = "Plan an energy-efficient coast/coast/brake deceleration maneuver"
)]
pub struct Args {
    /// Scenario description (TOML).
    #[arg(long)]
    pub scenario: PathBuf,

    /// Solution method.
    #[arg(long, value_enum)]
    pub method: Method,

    /// Write the sampled trajectory to this CSV file. With --method both the
    /// method name is inserted before the extension.
    #[arg(long)]
    pub out_traj: Option<PathBuf>,

    /// Write the run report to this file instead of stdout.
    #[arg(long)]
    pub out_report: Option<PathBuf>,

    /// Trajectory sampling step [s].
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,

    /// Re-simulate the plan with fine RK4 and check optimality residuals;
    /// exit nonzero when any check fails.
    #[arg(long)]
    pub verify: bool,

    /// Suppress console output (files are still written).
    #[arg(long)]
    pub quiet: bool,
}

/// Thresholds used by --verify.
const RESIM_DT: f64 = 1e-3;
const TOL_RESIM_S: f64 = 0.1;
const TOL_RESIM_V: f64 = 0.01;
const TOL_RESIDUAL: f64 = 1e-6;
const TOL_CONSTRAINT: f64 = 1e-6;

fn traj_path(base: &Path, method: &str, both: bool) -> PathBuf {
    if !both {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("traj");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}.{method}.{ext}"))
}

fn verify_indirect(r: &ResimResult, d: &crate::indirect::IndirectDiagnostics) -> Vec<String> {
    let mut fails = Vec::new();
    let mut check = |name: &str, val: f64, tol: f64| {
        if !(val.abs() <= tol) {
            fails.push(format!("indirect {name} = {val:e} exceeds {tol:e}"));
        }
    };
    check("resim s_err", r.s_err, TOL_RESIM_S);
    check("resim v_err", r.v_err, TOL_RESIM_V);
    check("lambda_v(t_s1)", d.lambda_v_ts1, TOL_RESIDUAL);
    check("H jump at t_s1", d.h_jump_ts1, TOL_RESIDUAL);
    check("H jump at t_s2", d.h_jump_ts2, TOL_RESIDUAL);
    check("H(t_f)", d.h_tf, TOL_RESIDUAL);
    check("terminal s error", d.terminal_s_err, TOL_RESIDUAL * 1e2);
    check("terminal v error", d.terminal_v_err, TOL_RESIDUAL * 1e2);
    fails
}

fn verify_direct(r: &ResimResult, sol: &DirectSolution<f64>) -> Vec<String> {
    let mut fails = Vec::new();
    if r.s_err.abs() > TOL_RESIM_S {
        fails.push(format!("direct resim s_err = {:e}", r.s_err));
    }
    if r.v_err.abs() > TOL_RESIM_V {
        fails.push(format!("direct resim v_err = {:e}", r.v_err));
    }
    if sol.g_f.abs() > TOL_CONSTRAINT {
        fails.push(format!("direct distance constraint g_f = {:e} m", sol.g_f));
    }
    let min_ineq = sol.ineq.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_ineq < -TOL_CONSTRAINT {
        fails.push(format!("direct inequality violated: min = {:e}", min_ineq));
    }
    if sol.saturation.bound_violation > TOL_CONSTRAINT {
        fails.push(format!(
            "direct braking command leaves [u_min, 0] by {:e} m/s^2",
            sol.saturation.bound_violation
        ));
    }
    fails
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_traj(path: &Path, traj: &Trajectory<f64>) -> Result<(), String> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)
        .map_err(|e| format!("cannot serialize trajectory: {e}"))?;
    std::fs::write(path, buf).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn run(args: &Args) -> i32 {
    let started = Instant::now();

    let file = match ScenarioFile::load(&args.scenario) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let scn = match file.to_scenario() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if !(args.dt.is_finite() && args.dt > 0.0) {
        eprintln!("error: scenario field error in `--dt`: must be a positive step");
        return EXIT_CONFIG;
    }
    let c = match scn.coefficients() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let run_indirect = matches!(args.method, Method::Indirect | Method::Both);
    let run_direct = matches!(args.method, Method::Direct | Method::Both);
    let both = args.method == Method::Both;

    let mut ind_cfg = IndirectConfig {
        newton: file.newton_config(),
        ..IndirectConfig::default()
    };
    if let Some(steps) = file.solver.shooting_steps {
        ind_cfg.integrator.steps = steps;
    }
    let guess = match (
        file.solver.guess_t_s1,
        file.solver.guess_t_s2,
        file.solver.guess_t_f,
    ) {
        (Some(t_s1), Some(t_s2), Some(t_f)) => Some(SwitchTimes { t_s1, t_s2, t_f }),
        _ => None,
    };

    let mut report_text = String::new();
    let mut failures: Vec<String> = Vec::new();

    let ind = if run_indirect {
        match solve_indirect(&scn, &ind_cfg, guess) {
            Ok(sol) => Some(sol),
            Err(e) => {
                eprintln!("error: indirect solve failed: {e}");
                return EXIT_SOLVER;
            }
        }
    } else {
        None
    };
    let dir = if run_direct {
        let cfg = DirectConfig {
            nlp: file.nlp_config(),
            ..DirectConfig::default()
        };
        match solve_direct(&scn, &cfg, None) {
            Ok(sol) => Some(sol),
            Err(e) => {
                eprintln!("error: direct solve failed: {e}");
                return EXIT_SOLVER;
            }
        }
    } else {
        None
    };

    let mut ind_traj = None;
    if let Some(sol) = &ind {
        let resim = if args.verify {
            match resimulate_indirect(sol, &scn, &c, RESIM_DT) {
                Ok(r) => {
                    failures.extend(verify_indirect(&r, &sol.diagnostics));
                    Some(r)
                }
                Err(e) => {
                    failures.push(format!("indirect re-simulation failed: {e}"));
                    None
                }
            }
        } else {
            None
        };
        report_text.push_str(&report::indirect_section(sol, resim.as_ref()));
        let traj = extract_trajectory(sol, &scn, &c, args.dt);
        if let Some(base) = &args.out_traj {
            if let Err(e) = write_traj(&traj_path(base, "indirect", both), &traj) {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
        ind_traj = Some(traj);
    }

    if let Some(sol) = &dir {
        if !report_text.is_empty() {
            report_text.push('\n');
        }
        let resim = if args.verify {
            match resimulate_direct(sol, &scn, &c, RESIM_DT) {
                Ok(r) => {
                    failures.extend(verify_direct(&r, sol));
                    Some(r)
                }
                Err(e) => {
                    failures.push(format!("direct re-simulation failed: {e}"));
                    None
                }
            }
        } else {
            None
        };
        report_text.push_str(&report::direct_section(sol, resim.as_ref()));
        let traj = extract_trajectory_direct(sol, &scn, &c, args.dt);
        if let Some(base) = &args.out_traj {
            if let Err(e) = write_traj(&traj_path(base, "direct", both), &traj) {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
        if let (Some(i), Some(it)) = (&ind, &ind_traj) {
            let gap = report::max_velocity_gap(it, &traj, args.dt);
            report_text.push('\n');
            report_text.push_str(&report::comparison_section(i, sol, gap));
        }
    }

    if let Some(path) = &args.out_report {
        if let Err(e) = write_file(path, &report_text) {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        if !args.quiet {
            println!("report written to {}", path.display());
        }
    } else if !args.quiet {
        print!("{report_text}");
    }

    if !args.quiet {
        // Timing goes to the console only; report files stay deterministic.
        eprintln!("elapsed: {:.3} s", started.elapsed().as_secs_f64());
    }

    if args.verify && !failures.is_empty() {
        for f in &failures {
            eprintln!("verification failed: {f}");
        }
        return EXIT_VERIFY;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_mode_inserts_method_into_filename() {
        let p = traj_path(Path::new("out/traj.csv"), "direct", true);
        assert_eq!(p, Path::new("out/traj.direct.csv"));
        let p = traj_path(Path::new("out/traj.csv"), "indirect", false);
        assert_eq!(p, Path::new("out/traj.csv"));
    }
}
