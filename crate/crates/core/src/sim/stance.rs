//! Four-foot stance under a fast lateral foot shift.

use std::f64::consts::PI;

use crate::error::SimError;
use crate::geometry::Vec3;
use crate::rom::{GroundModel, RobotParams};

use super::calibrate::flat_ground;
use super::mission::{Abort, Runner, SimParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LateralShift {
    /// Lateral foot offset, m.
    pub amplitude: f64,
    /// Cosine ramp duration, s.
    pub rise: f64,
    /// Out-and-back period, s.
    pub period: f64,
    pub duration: f64,
}

impl Default for LateralShift {
    fn default() -> Self {
        Self { amplitude: 0.03, rise: 0.1, period: 1.0, duration: 5.0 }
    }
}

impl LateralShift {
    /// Offset fraction in `[0, 1]` at time `t`.
    pub fn profile(&self, t: f64) -> f64 {
        let ramp = |u: f64| 0.5 * (1.0 - (PI * u.clamp(0.0, 1.0)).cos());
        let ph = t.rem_euclid(self.period);
        let half = 0.5 * self.period;
        if ph < half {
            ramp(ph / self.rise)
        } else {
            1.0 - ramp((ph - half) / self.rise)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StanceOutcome {
    /// Smallest pyramid row over every tick, N.
    pub min_h_w: f64,
    /// Fall or divergence, if the run stopped early.
    pub abort: Option<String>,
}

/// Run `shift` from a standing start, governed or not.
pub fn run_stance_shift(
    robot: &RobotParams,
    ground: &GroundModel,
    sim: &SimParams,
    shift: &LateralShift,
    governed: bool,
) -> Result<StanceOutcome, SimError> {
    sim.validate()?;
    let env = flat_ground(2.0);
    let params = SimParams { governor_enabled: governed, ..*sim };
    let mut run = Runner::standing(&env, robot, ground, params, &Vec3::zeros(), 0.0, 1);
    run.record = false;
    let nominal = robot.hips.map(|h| h + Vec3::new(0.0, 0.0, -robot.stand_height));
    let res = run.stance(shift.duration, |t| nominal.map(|x| x + Vec3::new(0.0, shift.amplitude * shift.profile(t), 0.0)));
    Ok(StanceOutcome { min_h_w: run.min_stance_h_w, abort: res.err().map(|Abort(r)| r) })
}
