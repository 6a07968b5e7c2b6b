//! Time-sampled trajectory rows and CSV export.

use std::io::{self, Write};

use crate::model::Mode;
use crate::real::Real;

/// One exported sample. `lambda_v` is present for indirect-method rows only.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRow<R> {
    pub t: R,
    pub mode: Mode,
    pub s: R,
    pub v: R,
    pub a: R,
    pub u: R,
    pub lambda_v: Option<R>,
}

#[derive(Debug, Clone)]
pub struct Trajectory<R> {
    pub rows: Vec<TrajectoryRow<R>>,
}

impl<R: Real> Trajectory<R> {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t_s,mode,s_m,v_ms,a_ms2,u_ms2,lambda_v")?;
        for row in &self.rows {
            let lam = row
                .lambda_v
                .map(|l| format!("{:.9e}", l.as_f64()))
                .unwrap_or_default();
            writeln!(
                out,
                "{:.9e},{},{:.9e},{:.9e},{:.9e},{:.9e},{}",
                row.t.as_f64(),
                row.mode.label(),
                row.s.as_f64(),
                row.v.as_f64(),
                row.a.as_f64(),
                row.u.as_f64(),
                lam
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is valid UTF-8")
    }

    /// Number of mode changes along the rows.
    pub fn mode_changes(&self) -> usize {
        self.rows.windows(2).filter(|w| w[0].mode != w[1].mode).count()
    }

    /// Velocity at time `t` by linear interpolation between samples.
    pub fn velocity_at(&self, t: R) -> Option<R> {
        let rows = &self.rows;
        if rows.is_empty() || t < rows[0].t || t > rows.last()?.t {
            return None;
        }
        let idx = rows.partition_point(|r| r.t <= t);
        if idx == 0 {
            return Some(rows[0].v);
        }
        if idx >= rows.len() {
            return Some(rows.last()?.v);
        }
        let (a, b) = (&rows[idx - 1], &rows[idx]);
        if b.t == a.t {
            return Some(a.v);
        }
        let w = (t - a.t) / (b.t - a.t);
        Some(a.v + (b.v - a.v) * w)
    }
}
