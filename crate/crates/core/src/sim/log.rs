//! Trajectory and governor CSV writers, segment-ledger JSON.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::mission::{GovernorTraceRow, LogRow, MissionLog, MissionResult, SegmentLedger};

pub const TRAJECTORY_HEADER: &str = "t,p_x,p_y,p_z,roll,pitch,yaw,v_x,v_y,v_z,omega_x,omega_y,omega_z,\
q_0,q_1,q_2,q_3,q_4,q_5,q_6,q_7,q_8,q_9,q_10,q_11,P_j,P_f,mode";

pub const GOVERNOR_HEADER: &str = "t,V,min_h_w,min_h_r,n_violated";

pub fn write_trajectory_csv<W: Write>(rows: &[LogRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        write!(w, "{}", r.t)?;
        for v in [r.position, r.euler, r.velocity, r.omega] {
            write!(w, ",{},{},{}", v.x, v.y, v.z)?;
        }
        for q in r.q {
            write!(w, ",{q}")?;
        }
        writeln!(w, ",{},{},{}", r.p_j, r.p_f, r.mode.as_str())?;
    }
    Ok(())
}

pub fn write_governor_csv<W: Write>(rows: &[GovernorTraceRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{GOVERNOR_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.t, r.v, r.min_h_w, r.min_h_r, r.n_violated)?;
    }
    Ok(())
}

/// Energy recovered from the logged interval-average powers.
pub fn reintegrate(rows: &[LogRow]) -> f64 {
    rows.windows(2).map(|w| (w[1].t - w[0].t) * (w[1].p_j + w[1].p_f)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub segments: Vec<SegmentLedger>,
    pub result: MissionResult,
    pub n_transformations: usize,
    #[serde(rename = "planned_total_J")]
    pub planned_total: f64,
    #[serde(rename = "realized_total_J")]
    pub realized_total: f64,
    #[serde(rename = "joint_energy_J")]
    pub joint_energy: f64,
    #[serde(rename = "rotor_energy_J")]
    pub rotor_energy: f64,
    pub final_error_m: f64,
    pub duration_s: f64,
    pub min_stance_h_w: Option<f64>,
    pub arrivals_s: Vec<Option<f64>>,
    pub mode_timeline: Vec<(f64, String)>,
}

impl LedgerReport {
    pub fn from_log(log: &MissionLog) -> Self {
        Self {
            segments: log.segments.clone(),
            result: log.result.clone(),
            n_transformations: log.n_transformations,
            planned_total: log.planned_total(),
            realized_total: log.realized_total(),
            joint_energy: log.joint_energy,
            rotor_energy: log.rotor_energy,
            final_error_m: log.final_error,
            duration_s: log.duration,
            min_stance_h_w: log.min_stance_h_w.is_finite().then_some(log.min_stance_h_w),
            arrivals_s: log.arrivals.clone(),
            mode_timeline: log.mode_timeline.iter().map(|(t, m)| (*t, m.as_str().to_string())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::sim::LocoMode;

    fn row(t: f64, p_j: f64, p_f: f64) -> LogRow {
        LogRow {
            t,
            position: Vec3::new(1.0, 2.0, 3.0),
            euler: Vec3::zeros(),
            velocity: Vec3::zeros(),
            omega: Vec3::zeros(),
            q: [0.5; 12],
            p_j,
            p_f,
            mode: LocoMode::Flying,
        }
    }

    #[test]
    fn csv_has_one_line_per_row_and_fixed_width() {
        let rows = [row(0.0, 0.0, 0.0), row(0.01, 2.0, 400.0)];
        let mut buf = Vec::new();
        write_trajectory_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let n = TRAJECTORY_HEADER.split(',').count();
        assert_eq!(n, 28);
        assert!(lines.iter().all(|l| l.split(',').count() == n));
        assert!(lines[2].ends_with(",2,400,Flying"));
    }

    #[test]
    fn reintegration_uses_row_spacing() {
        let rows = [row(0.0, 0.0, 0.0), row(0.01, 10.0, 0.0), row(0.015, 0.0, 100.0)];
        assert!((reintegrate(&rows) - (0.1 + 0.5)).abs() < 1e-12);
    }
}
