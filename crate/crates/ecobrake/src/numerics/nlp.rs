//! Small dense constrained NLP solver.
//!
//! Augmented-Lagrangian outer loop with a damped-Newton inner minimization
//! on finite-difference derivatives. Built for the 4-variable / 8-constraint
//! regime of the parametric braking problem; no sparse ambitions.

use crate::error::NumericsError;
use crate::numerics::linalg::solve_dense;
use crate::numerics::newton::{newton_solve, NewtonConfig};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct NlpConfig {
    /// Infinity-norm tolerance on the stationarity residual.
    pub tol_kkt: f64,
    /// Tolerance on equality violation and inequality infeasibility.
    pub tol_constraint: f64,
    pub max_outer: usize,
    /// Penalty growth factor (> 1) applied when feasibility stalls.
    pub penalty_growth: f64,
    pub initial_penalty: f64,
    pub max_inner: usize,
}

impl Default for NlpConfig {
    fn default() -> Self {
        Self {
            tol_kkt: 1e-6,
            tol_constraint: 1e-9,
            max_outer: 60,
            penalty_growth: 10.0,
            initial_penalty: 10.0,
            max_inner: 80,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NlpSolution<R> {
    pub x: Vec<R>,
    pub cost: R,
    pub eq: Vec<R>,
    pub ineq: Vec<R>,
    /// Infinity norm of the augmented-Lagrangian gradient at the solution.
    pub stationarity: f64,
    pub outer_iters: usize,
}

struct Multipliers {
    eq: Vec<f64>,
    ineq: Vec<f64>,
    rho: f64,
}

/// Minimize `cost` subject to `eq(x) = 0` and `ineq(x) >= 0`.
///
/// `scale` gives the magnitude of each variable; derivatives and steps are
/// taken in scaled coordinates. Closures return `None` outside their domain;
/// such points are treated as infinitely bad and rejected by the line search.
/// The returned point always satisfies the configured tolerances; feasibility
/// stagnation is a typed error, never a silent return.
pub fn nlp_solve<R, C, E, I>(
    cost: C,
    eq: E,
    ineq: I,
    x0: &[R],
    scale: &[R],
    cfg: &NlpConfig,
) -> Result<NlpSolution<R>, NumericsError>
where
    R: Real,
    C: Fn(&[R]) -> Option<R>,
    E: Fn(&[R]) -> Option<Vec<R>>,
    I: Fn(&[R]) -> Option<Vec<R>>,
{
    let n = x0.len();
    assert_eq!(scale.len(), n);

    let unscale = |y: &[f64]| -> Vec<R> {
        (0..n).map(|i| R::of(y[i]) * scale[i]).collect()
    };
    let m_eq = eq(x0).ok_or(NumericsError::BadInitialPoint)?.len();
    let m_in = ineq(x0).ok_or(NumericsError::BadInitialPoint)?.len();

    let mut mult = Multipliers {
        eq: vec![0.0; m_eq],
        ineq: vec![0.0; m_in],
        rho: cfg.initial_penalty,
    };

    // Augmented Lagrangian in scaled coordinates.
    let phi = |y: &[f64], mult: &Multipliers| -> Option<f64> {
        let x = unscale(y);
        let f = cost(&x)?.as_f64();
        let ce = eq(&x)?;
        let ci = ineq(&x)?;
        let mut val = f;
        for (j, c) in ce.iter().enumerate() {
            let c = c.as_f64();
            val += mult.eq[j] * c + 0.5 * mult.rho * c * c;
        }
        for (j, c) in ci.iter().enumerate() {
            let c = c.as_f64();
            let t = (mult.ineq[j] - mult.rho * c).max(0.0);
            val += (t * t - mult.ineq[j] * mult.ineq[j]) / (2.0 * mult.rho);
        }
        val.is_finite().then_some(val)
    };

    // One-sided fallbacks keep the inner iteration alive next to the
    // closed-form domain boundary; a variable with no valid probe on either
    // side is treated as pinned (zero derivative).
    let grad = |y: &[f64], f0: f64, mult: &Multipliers| -> Vec<f64> {
        let mut g = vec![0.0; n];
        for j in 0..n {
            let h = 1e-7 * y[j].abs().max(1.0);
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            g[j] = match (phi(&yp, mult), phi(&ym, mult)) {
                (Some(fp), Some(fm)) => (fp - fm) / (2.0 * h),
                (Some(fp), None) => (fp - f0) / h,
                (None, Some(fm)) => (f0 - fm) / h,
                (None, None) => 0.0,
            };
        }
        g
    };

    let hessian = |y: &[f64], f0: f64, mult: &Multipliers| -> Vec<Vec<f64>> {
        let mut hmat = vec![vec![0.0; n]; n];
        let step = |j: usize| 1e-4 * y[j].abs().max(1.0);
        for i in 0..n {
            let hi = step(i);
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[i] += hi;
            ym[i] -= hi;
            // Unit curvature stands in when a probe fails; the Levenberg
            // shift corrects any resulting bad direction.
            hmat[i][i] = match (phi(&yp, mult), phi(&ym, mult)) {
                (Some(fp), Some(fm)) => (fp - 2.0 * f0 + fm) / (hi * hi),
                _ => 1.0,
            };
            for j in (i + 1)..n {
                let hj = step(j);
                let mut ypp = y.to_vec();
                let mut ypm = y.to_vec();
                let mut ymp = y.to_vec();
                let mut ymm = y.to_vec();
                ypp[i] += hi;
                ypp[j] += hj;
                ypm[i] += hi;
                ypm[j] -= hj;
                ymp[i] -= hi;
                ymp[j] += hj;
                ymm[i] -= hi;
                ymm[j] -= hj;
                let v = match (
                    phi(&ypp, mult),
                    phi(&ypm, mult),
                    phi(&ymp, mult),
                    phi(&ymm, mult),
                ) {
                    (Some(a), Some(b), Some(c), Some(d)) => (a - b - c + d) / (4.0 * hi * hj),
                    _ => 0.0,
                };
                hmat[i][j] = v;
                hmat[j][i] = v;
            }
        }
        hmat
    };

    // Inner minimization: damped Newton with a Levenberg shift.
    let minimize = |y0: &[f64], mult: &Multipliers, gtol: f64| -> Option<(Vec<f64>, f64)> {
        let mut y = y0.to_vec();
        let mut f = phi(&y, mult)?;
        let mut gnorm = f64::INFINITY;
        for _ in 0..cfg.max_inner {
            let g = grad(&y, f, mult);
            gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gnorm < gtol {
                break;
            }
            let h = hessian(&y, f, mult);
            let gscale = gnorm.max(1.0);

            // Levenberg escalation: when the shifted-Newton direction fails
            // the line search (the FD Hessian misjudges flat valleys), grow
            // the shift and retry; large shifts degrade to safe gradient
            // steps.
            let mut shift = 0.0f64;
            let mut moved = false;
            'attempts: for _ in 0..30 {
                let mut a: Vec<Vec<f64>> = h.clone();
                for (i, row) in a.iter_mut().enumerate() {
                    row[i] += shift;
                }
                let mut b: Vec<f64> = g.iter().map(|v| -v).collect();
                let d = match solve_dense(&mut a, &mut b) {
                    Ok(d) => d,
                    Err(_) => {
                        shift = if shift == 0.0 { 1e-6 * gscale } else { shift * 10.0 };
                        continue;
                    }
                };
                let slope: f64 = d.iter().zip(g.iter()).map(|(di, gi)| di * gi).sum();
                if slope >= -1e-14 * gscale {
                    shift = if shift == 0.0 { 1e-6 * gscale } else { shift * 10.0 };
                    continue;
                }
                let mut alpha = 1.0;
                while alpha > 1e-10 {
                    let cand: Vec<f64> = (0..n).map(|i| y[i] + alpha * d[i]).collect();
                    if let Some(fc) = phi(&cand, mult) {
                        if fc <= f + 1e-4 * alpha * slope {
                            y = cand;
                            f = fc;
                            moved = true;
                            break 'attempts;
                        }
                    }
                    alpha *= 0.5;
                }
                shift = if shift == 0.0 { 1e-6 * gscale } else { shift * 10.0 };
            }
            if !moved {
                // No direction improves phi beyond evaluation noise; the
                // iterate is as stationary as this precision allows.
                break;
            }
        }
        Some((y, gnorm))
    };

    // Stationarity of the plain Lagrangian with the current multipliers,
    // differentiated term by term. Mathematically this equals the
    // augmented-Lagrangian gradient at an inner optimum, but it stays
    // measurable when rho is large and rho * c sits at the noise floor.
    let lagrangian_grad_norm = |y: &[f64], mult: &Multipliers| -> Option<f64> {
        let eval = |y: &[f64]| -> Option<(f64, Vec<f64>, Vec<f64>)> {
            let x = unscale(y);
            Some((
                cost(&x)?.as_f64(),
                eq(&x)?.iter().map(|c| c.as_f64()).collect(),
                ineq(&x)?.iter().map(|c| c.as_f64()).collect(),
            ))
        };
        let mut norm = 0.0f64;
        for j in 0..n {
            // h = 1e-5 balances truncation against the ~1e-14 absolute
            // evaluation noise of the closed forms.
            let h = 1e-5 * y[j].abs().max(1.0);
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            let (fp, cep, cip) = eval(&yp)?;
            let (fm, cem, cim) = eval(&ym)?;
            let mut g = (fp - fm) / (2.0 * h);
            for k in 0..m_eq {
                g += mult.eq[k] * (cep[k] - cem[k]) / (2.0 * h);
            }
            for k in 0..m_in {
                g -= mult.ineq[k] * (cip[k] - cim[k]) / (2.0 * h);
            }
            norm = norm.max(g.abs());
        }
        Some(norm)
    };

    // Newton polish of the KKT system on the active set guessed from the
    // augmented-Lagrangian state. The outer loop bottoms out at a noise
    // floor of rho times the feasibility residual; the square KKT system
    // has no penalty term and reaches the tolerances directly.
    let kkt_polish = |y0: &[f64], mult: &Multipliers| -> Option<(Vec<f64>, Multipliers)> {
        let x0v = unscale(y0);
        let ci0 = ineq(&x0v)?;
        let active: Vec<usize> = (0..m_in)
            .filter(|&j| mult.ineq[j] > 1e-10 || ci0[j].as_f64().abs() < 1e-6)
            .collect();
        let m_act = active.len();
        let c_weight = (cfg.tol_kkt / cfg.tol_constraint).max(1.0);

        let residual = |z: &[f64]| -> Option<Vec<f64>> {
            let yz = &z[..n];
            let mu_eq = &z[n..n + m_eq];
            let mu_act = &z[n + m_eq..];
            let x = unscale(yz);
            let ce = eq(&x)?;
            let ci = ineq(&x)?;
            let mut r = vec![0.0f64; n + m_eq + m_act];
            for j in 0..n {
                let h = 1e-5 * yz[j].abs().max(1.0);
                let mut yp = yz.to_vec();
                let mut ym = yz.to_vec();
                yp[j] += h;
                ym[j] -= h;
                let xp = unscale(&yp);
                let xm = unscale(&ym);
                let (fp, cep, cip) = (cost(&xp)?, eq(&xp)?, ineq(&xp)?);
                let (fm, cem, cim) = (cost(&xm)?, eq(&xm)?, ineq(&xm)?);
                let mut g = (fp - fm).as_f64() / (2.0 * h);
                for k in 0..m_eq {
                    g += mu_eq[k] * (cep[k] - cem[k]).as_f64() / (2.0 * h);
                }
                for (a, &k) in active.iter().enumerate() {
                    g -= mu_act[a] * (cip[k] - cim[k]).as_f64() / (2.0 * h);
                }
                r[j] = g;
            }
            for k in 0..m_eq {
                r[n + k] = ce[k].as_f64() * c_weight;
            }
            for (a, &k) in active.iter().enumerate() {
                r[n + m_eq + a] = ci[k].as_f64() * c_weight;
            }
            Some(r)
        };

        // Initial multipliers from least squares on the stationarity
        // equations at y0; the AL estimates can be badly off when an
        // update was frozen at a just-activated bound.
        let m_all = m_eq + m_act;
        let mut mu0 = Vec::with_capacity(m_all);
        mu0.extend_from_slice(&mult.eq);
        mu0.extend(active.iter().map(|&j| mult.ineq[j]));
        if m_all > 0 {
            let mut gf = vec![0.0f64; n];
            let mut cols = vec![vec![0.0f64; n]; m_all];
            let mut ok = true;
            for j in 0..n {
                let h = 1e-5 * y0[j].abs().max(1.0);
                let mut yp = y0.to_vec();
                let mut ym = y0.to_vec();
                yp[j] += h;
                ym[j] -= h;
                let xp = unscale(&yp);
                let xm = unscale(&ym);
                match (cost(&xp), eq(&xp), ineq(&xp), cost(&xm), eq(&xm), ineq(&xm)) {
                    (Some(fp), Some(cep), Some(cip), Some(fm), Some(cem), Some(cim)) => {
                        gf[j] = (fp - fm).as_f64() / (2.0 * h);
                        for k in 0..m_eq {
                            cols[k][j] = (cep[k] - cem[k]).as_f64() / (2.0 * h);
                        }
                        for (a, &k) in active.iter().enumerate() {
                            cols[m_eq + a][j] = -(cip[k] - cim[k]).as_f64() / (2.0 * h);
                        }
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                // Normal equations of min || gf + cols * mu ||.
                let mut a = vec![vec![0.0f64; m_all]; m_all];
                let mut b = vec![0.0f64; m_all];
                for p in 0..m_all {
                    for q in 0..m_all {
                        a[p][q] = (0..n).map(|j| cols[p][j] * cols[q][j]).sum();
                    }
                    b[p] = -(0..n).map(|j| cols[p][j] * gf[j]).sum::<f64>();
                }
                if let Ok(mu) = solve_dense(&mut a, &mut b) {
                    if mu.iter().all(|v| v.is_finite()) {
                        mu0 = mu;
                    }
                }
            }
        }

        let mut z0: Vec<f64> = y0.to_vec();
        z0.extend_from_slice(&mu0);
        let newton_cfg = NewtonConfig {
            tol_residual: 0.5 * cfg.tol_kkt,
            max_iters: 120,
            fd_step: 1e-6,
            damping: 0.5,
        };
        // A timed-out Newton still hands back its best iterate; the caller
        // re-checks the tolerances, so an almost-converged point may pass.
        let z = match newton_solve(residual, &z0, &newton_cfg) {
            Ok(z) => z,
            Err(NumericsError::NoConvergence { best, .. }) => best,
            Err(e) => {
                if std::env::var("NLP_DEBUG").is_ok() {
                    eprintln!("  polish newton failed (active = {active:?}): {e:?}");
                }
                return None;
            }
        };

        // Reject a polish that flips an active multiplier negative or walks
        // off the feasible side of an inactive constraint.
        let mu_act = &z[n + m_eq..];
        if mu_act.iter().any(|&m| m < -1e-8) {
            return None;
        }
        let x = unscale(&z[..n]);
        let ci = ineq(&x)?;
        for (j, c) in ci.iter().enumerate() {
            if !active.contains(&j) && c.as_f64() < -cfg.tol_constraint {
                return None;
            }
        }
        let mut out = Multipliers {
            eq: z[n..n + m_eq].to_vec(),
            ineq: vec![0.0; m_in],
            rho: mult.rho,
        };
        for (a, &j) in active.iter().enumerate() {
            out.ineq[j] = mu_act[a].max(0.0);
        }
        Some((z[..n].to_vec(), out))
    };

    let mut y: Vec<f64> = (0..n)
        .map(|i| (x0[i] / scale[i]).as_f64())
        .collect();
    let mut gtol = 1e-3f64;
    let mut prev_viol = f64::INFINITY;
    let mut stagnation = 0usize;
    let mut last_gnorm = f64::INFINITY;

    for outer in 0..cfg.max_outer {
        let (ynew, gnorm) = minimize(&y, &mult, gtol).ok_or(NumericsError::BadInitialPoint)?;
        y = ynew;

        let x = unscale(&y);
        let ce = eq(&x).ok_or(NumericsError::BadInitialPoint)?;
        let ci = ineq(&x).ok_or(NumericsError::BadInitialPoint)?;
        let viol_eq = ce.iter().fold(0.0f64, |m, c| m.max(c.as_f64().abs()));
        let viol_in = ci
            .iter()
            .fold(0.0f64, |m, c| m.max((-c.as_f64()).max(0.0)));
        let viol = viol_eq.max(viol_in);

        // First-order multiplier updates; constraints already inside the
        // tolerance are left alone so rho-times-noise cannot make the
        // multipliers drift.
        for (j, c) in ce.iter().enumerate() {
            let c = c.as_f64();
            if c.abs() >= cfg.tol_constraint {
                mult.eq[j] += mult.rho * c;
            }
        }
        for (j, c) in ci.iter().enumerate() {
            let c = c.as_f64();
            if c.abs() >= cfg.tol_constraint || (mult.ineq[j] == 0.0 && c < 0.0) {
                mult.ineq[j] = (mult.ineq[j] - mult.rho * c).max(0.0);
            }
        }

        let lag = lagrangian_grad_norm(&y, &mult).unwrap_or(f64::INFINITY);
        last_gnorm = lag;
        if std::env::var("NLP_DEBUG").is_ok() {
            eprintln!(
                "outer {outer}: viol = {viol:.3e}, gnorm = {gnorm:.3e}, lag = {lag:.3e}, rho = {:.1e}, y = {:?}",
                mult.rho, y
            );
        }
        if viol < cfg.tol_constraint && lag < cfg.tol_kkt {
            let f = cost(&x).ok_or(NumericsError::BadInitialPoint)?;
            return Ok(NlpSolution {
                x,
                cost: f,
                eq: ce,
                ineq: ci,
                stationarity: lag,
                outer_iters: outer + 1,
            });
        }

        // Near the optimum, switch to the square KKT system. The residual
        // check below rejects spurious stationary points, so the gate only
        // needs rough feasibility.
        if viol < 1e-4 {
            if let Some((yp, mp)) = kkt_polish(&y, &mult) {
                let xp = unscale(&yp);
                if let (Some(f), Some(ce), Some(ci), Some(lag_p)) = (
                    cost(&xp),
                    eq(&xp),
                    ineq(&xp),
                    lagrangian_grad_norm(&yp, &mp),
                ) {
                    let viol_p = ce
                        .iter()
                        .fold(0.0f64, |m, c| m.max(c.as_f64().abs()))
                        .max(ci.iter().fold(0.0f64, |m, c| m.max((-c.as_f64()).max(0.0))));
                    if std::env::var("NLP_DEBUG").is_ok() {
                        eprintln!("  polish: viol = {viol_p:.3e}, lag = {lag_p:.3e}");
                    }
                    if viol_p < cfg.tol_constraint && lag_p < cfg.tol_kkt {
                        return Ok(NlpSolution {
                            x: xp,
                            cost: f,
                            eq: ce,
                            ineq: ci,
                            stationarity: lag_p,
                            outer_iters: outer + 1,
                        });
                    }
                }
            }
        }
        if viol > 0.25 * prev_viol && viol > cfg.tol_constraint {
            mult.rho = (mult.rho * cfg.penalty_growth).min(1e12);
            stagnation += 1;
        } else {
            stagnation = 0;
        }
        if stagnation > 8 {
            return Err(NumericsError::Infeasible { violation: viol });
        }
        prev_viol = viol;
        gtol = (gtol * 0.2).max(cfg.tol_kkt);
    }

    Err(NumericsError::NoConvergence {
        iters: cfg.max_outer,
        best: y.iter().enumerate().map(|(i, v)| v * scale[i].as_f64()).collect(),
        best_norm: last_gnorm,
    })
}
