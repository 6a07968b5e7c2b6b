//! Structured-text report of a planning run. Values are printed with 9
//! significant digits; content is deterministic for a fixed scenario.

use std::fmt::Write as _;

use crate::direct::DirectSolution;
use crate::indirect::IndirectSolution;
use crate::trajectory::Trajectory;
use crate::verify::ResimResult;

fn sig(x: f64) -> String {
    format!("{:.8e}", x)
}

pub fn indirect_section(sol: &IndirectSolution<f64>, resim: Option<&ResimResult>) -> String {
    let mut out = String::new();
    let (d1, d2, d3) = sol.times.durations();
    let d = &sol.diagnostics;
    writeln!(out, "method: indirect").unwrap();
    if sol.reduced_two_phase {
        writeln!(out, "note: engaged coast degenerated; reduced q1->q3 problem solved").unwrap();
    }
    writeln!(out, "t_s1_s: {}", sig(sol.times.t_s1)).unwrap();
    writeln!(out, "t_s2_s: {}", sig(sol.times.t_s2)).unwrap();
    writeln!(out, "t_f_s: {}", sig(sol.times.t_f)).unwrap();
    writeln!(out, "dt_q1_s: {}", sig(d1)).unwrap();
    writeln!(out, "dt_q2_s: {}", sig(d2)).unwrap();
    writeln!(out, "dt_q3_s: {}", sig(d3)).unwrap();
    writeln!(out, "lambda_s: {}", sig(sol.lambda_s)).unwrap();
    writeln!(out, "lambda_v_tf: {}", sig(sol.lambda_v_tf)).unwrap();
    writeln!(out, "J_u: {}", sig(sol.cost.j_u)).unwrap();
    writeln!(out, "J_t: {}", sig(sol.cost.j_t)).unwrap();
    writeln!(out, "J: {}", sig(sol.cost.j)).unwrap();
    writeln!(out, "residuals:").unwrap();
    writeln!(out, "  shoot_residual_inf: {}", sig(d.shoot_residual_inf)).unwrap();
    writeln!(out, "  lambda_v_ts1: {}", sig(d.lambda_v_ts1)).unwrap();
    writeln!(out, "  h_jump_ts1: {}", sig(d.h_jump_ts1)).unwrap();
    writeln!(out, "  h_jump_ts2: {}", sig(d.h_jump_ts2)).unwrap();
    writeln!(out, "  h_tf: {}", sig(d.h_tf)).unwrap();
    writeln!(out, "  u_at_ts2_ms2: {}", sig(d.u_at_ts2)).unwrap();
    writeln!(out, "  terminal_s_err_m: {}", sig(d.terminal_s_err)).unwrap();
    writeln!(out, "  terminal_v_err_ms: {}", sig(d.terminal_v_err)).unwrap();
    writeln!(out, "  u_min_violation_ms2: {}", sig(d.u_min_violation)).unwrap();
    if let Some(r) = resim {
        writeln!(out, "resimulation:").unwrap();
        writeln!(out, "  s_end_m: {}", sig(r.s_end)).unwrap();
        writeln!(out, "  v_end_ms: {}", sig(r.v_end)).unwrap();
        writeln!(out, "  s_err_m: {}", sig(r.s_err)).unwrap();
        writeln!(out, "  v_err_ms: {}", sig(r.v_err)).unwrap();
    }
    out
}

pub fn direct_section(sol: &DirectSolution<f64>, resim: Option<&ResimResult>) -> String {
    let mut out = String::new();
    let (t_s1, t_s2, t_f) = sol.times();
    writeln!(out, "method: direct").unwrap();
    writeln!(out, "t_s1_s: {}", sig(t_s1)).unwrap();
    writeln!(out, "t_s2_s: {}", sig(t_s2)).unwrap();
    writeln!(out, "t_f_s: {}", sig(t_f)).unwrap();
    writeln!(out, "dt_q1_s: {}", sig(sol.theta.dt_q1)).unwrap();
    writeln!(out, "dt_q2_s: {}", sig(sol.theta.dt_q2)).unwrap();
    writeln!(out, "dt_q3_s: {}", sig(sol.dt_q3)).unwrap();
    writeln!(out, "u_m_1s: {}", sig(sol.theta.u_m)).unwrap();
    writeln!(out, "u_n_ms2: {}", sig(sol.theta.u_n)).unwrap();
    writeln!(out, "J_u: {}", sig(sol.cost.j_u)).unwrap();
    writeln!(out, "J_t: {}", sig(sol.cost.j_t)).unwrap();
    writeln!(out, "J: {}", sig(sol.cost.j)).unwrap();
    writeln!(out, "residuals:").unwrap();
    writeln!(out, "  g_f_m: {}", sig(sol.g_f)).unwrap();
    let min_ineq = sol.ineq.iter().cloned().fold(f64::INFINITY, f64::min);
    writeln!(out, "  min_ineq: {}", sig(min_ineq)).unwrap();
    writeln!(out, "  stationarity: {}", sig(sol.stationarity)).unwrap();
    writeln!(out, "saturation:").unwrap();
    writeln!(out, "  u_min_cmd_ms2: {}", sig(sol.saturation.u_min_cmd)).unwrap();
    writeln!(out, "  u_max_cmd_ms2: {}", sig(sol.saturation.u_max_cmd)).unwrap();
    writeln!(out, "  bound_violation_ms2: {}", sig(sol.saturation.bound_violation)).unwrap();
    writeln!(out, "  beyond_endpoints_ms2: {}", sig(sol.saturation.beyond_endpoints)).unwrap();
    if let Some(r) = resim {
        writeln!(out, "resimulation:").unwrap();
        writeln!(out, "  s_end_m: {}", sig(r.s_end)).unwrap();
        writeln!(out, "  v_end_ms: {}", sig(r.v_end)).unwrap();
        writeln!(out, "  s_err_m: {}", sig(r.s_err)).unwrap();
        writeln!(out, "  v_err_ms: {}", sig(r.v_err)).unwrap();
    }
    out
}

/// Maximum |v_indirect(t) - v_direct(t)| over a common sampling grid.
pub fn max_velocity_gap(
    a: &Trajectory<f64>,
    b: &Trajectory<f64>,
    dt: f64,
) -> f64 {
    let t_end = a
        .rows
        .last()
        .map(|r| r.t)
        .unwrap_or(0.0)
        .min(b.rows.last().map(|r| r.t).unwrap_or(0.0));
    let mut gap = 0.0f64;
    let mut t = 0.0;
    while t <= t_end {
        if let (Some(va), Some(vb)) = (a.velocity_at(t), b.velocity_at(t)) {
            gap = gap.max((va - vb).abs());
        }
        t += dt;
    }
    gap
}

pub fn comparison_section(
    ind: &IndirectSolution<f64>,
    dir: &DirectSolution<f64>,
    max_dv: f64,
) -> String {
    let mut out = String::new();
    let (i1, i2, i3) = ind.times.durations();
    writeln!(out, "comparison:").unwrap();
    writeln!(out, "  d_dt_q1_s: {}", sig(dir.theta.dt_q1 - i1)).unwrap();
    writeln!(out, "  d_dt_q2_s: {}", sig(dir.theta.dt_q2 - i2)).unwrap();
    writeln!(out, "  d_dt_q3_s: {}", sig(dir.dt_q3 - i3)).unwrap();
    writeln!(out, "  d_J: {}", sig(dir.cost.j - ind.cost.j)).unwrap();
    writeln!(out, "  max_abs_dv_ms: {}", sig(max_dv)).unwrap();
    out
}
