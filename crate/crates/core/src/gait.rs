//! Quasi-static crawler simulation.
//!
//! The robot is two legs plus a body pad on the ground. Leg states set
//! both the leg reach and the foot friction (high exactly when the
//! extension chamber is inflated, since the friction actuator shares that
//! line). At each gait phase transition a leg's reach change must be
//! absorbed by slip at its foot or at the body pad; slip distributes
//! inversely to the contact friction forces, so the grippier contact
//! anchors and the weaker one takes almost all of the motion. The body
//! slip fraction for a leg in state with friction μ is
//!
//!   w(μ) = μ·share_foot / (μ·share_foot + μ_body·share_body)
//!
//! which goes to 1 when the foot grips much harder than the pad, to 0 in
//! the opposite limit, and to 1/2 at equal friction forces. Per-leg body
//! displacements combine into translation (Δx_L + Δx_R)/2 and heading
//! change (Δx_R − Δx_L)/(2d), counterclockwise positive so a left turn
//! has positive heading change.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{FrictionTiming, GaitProgram, LegState};
use crate::linalg::solve3;

#[derive(Debug, Error, PartialEq)]
pub enum GaitError {
    #[error("invalid crawler model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Control(#[from] crate::control::ControlError),
    #[error("trajectory needs at least 2 samples")]
    DegenerateTrajectory,
    #[error("speed targets must be positive with forward > retrograde, got forward {forward} vs retrograde {retro}")]
    BadSpeedTargets { forward: f64, retro: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrawlerModel {
    pub reach_flex_mm: f64,
    pub reach_relax_mm: f64,
    pub reach_ext_mm: f64,
    /// Lateral half-spacing between the leg contact lines.
    pub half_spacing_mm: f64,
    pub mu_high: f64,
    pub mu_low: f64,
    pub mu_body: f64,
    /// Normal load fraction carried by each foot; the body pad carries
    /// the rest. 2·share_foot + share_body = 1.
    pub load_share_foot: f64,
    pub load_share_body: f64,
}

impl Default for CrawlerModel {
    fn default() -> Self {
        CrawlerModel {
            reach_flex_mm: 12.0,
            reach_relax_mm: 17.5,
            reach_ext_mm: 20.0,
            half_spacing_mm: 30.0,
            mu_high: 0.9,
            mu_low: 0.1,
            mu_body: 0.3,
            load_share_foot: 0.25,
            load_share_body: 0.5,
        }
    }
}

impl CrawlerModel {
    /// Full invariant check, including the friction ordering
    /// μ_high > μ_body > μ_low required of a physical model.
    pub fn validate(&self) -> Result<(), GaitError> {
        self.check_structure()?;
        if !(self.mu_high > self.mu_body && self.mu_body > self.mu_low) {
            return Err(GaitError::InvalidModel(format!(
                "friction ordering must be μ_high > μ_body > μ_low, got {} / {} / {}",
                self.mu_high, self.mu_body, self.mu_low
            )));
        }
        Ok(())
    }

    /// Structural sanity only; the simulator itself tolerates any
    /// positive frictions so the calibration search can probe freely.
    fn check_structure(&self) -> Result<(), GaitError> {
        if !(self.reach_ext_mm > self.reach_relax_mm && self.reach_relax_mm > self.reach_flex_mm) {
            return Err(GaitError::InvalidModel(format!(
                "reach ordering must be r_ext > r_relax > r_flex, got {} / {} / {}",
                self.reach_ext_mm, self.reach_relax_mm, self.reach_flex_mm
            )));
        }
        if !(self.half_spacing_mm > 0.0) {
            return Err(GaitError::InvalidModel("half spacing must be positive".into()));
        }
        for (name, mu) in [("μ_high", self.mu_high), ("μ_low", self.mu_low), ("μ_body", self.mu_body)] {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(GaitError::InvalidModel(format!("{name} must be positive, got {mu}")));
            }
        }
        let total = 2.0 * self.load_share_foot + self.load_share_body;
        if self.load_share_foot <= 0.0 || self.load_share_body <= 0.0 || (total - 1.0).abs() > 1e-9 {
            return Err(GaitError::InvalidModel(format!(
                "load shares must be positive and sum to 1, got 2·{} + {} = {total}",
                self.load_share_foot, self.load_share_body
            )));
        }
        Ok(())
    }

    fn reach(&self, state: LegState) -> f64 {
        match state {
            LegState::Flexion => self.reach_flex_mm,
            LegState::Extension => self.reach_ext_mm,
            LegState::Relaxation => self.reach_relax_mm,
        }
    }

    fn mu_foot(&self, state: LegState) -> f64 {
        if state.high_friction() {
            self.mu_high
        } else {
            self.mu_low
        }
    }

    /// Fraction of a reach change taken up by body-pad slip when the foot
    /// is in the given state.
    fn body_slip_weight(&self, state: LegState) -> f64 {
        let foot = self.mu_foot(state) * self.load_share_foot;
        let body = self.mu_body * self.load_share_body;
        foot / (foot + body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t_s: f64,
    pub x_mm: f64,
    pub y_mm: f64,
    pub heading_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn path_length_mm(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].x_mm - w[0].x_mm).hypot(w[1].y_mm - w[0].y_mm))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaitMetrics {
    pub mean_speed_mm_s: f64,
    /// Signed turning radius in cm, positive for left (counterclockwise)
    /// turns, infinite for straight paths.
    pub turning_radius_cm: f64,
    pub net_heading_rad: f64,
}

/// Run `cycles` repetitions of the gait program. Displacements happen
/// instantaneously at phase transitions; the trajectory samples the body
/// pose at t = 0, after every transition, and at the end of the run.
pub fn simulate(
    model: &CrawlerModel,
    gait: &GaitProgram,
    cycles: usize,
) -> Result<Trajectory, GaitError> {
    model.check_structure()?;
    gait.validate()?;

    let origin = TrajectorySample { t_s: 0.0, x_mm: 0.0, y_mm: 0.0, heading_rad: 0.0 };
    if cycles == 0 {
        return Ok(Trajectory { samples: vec![origin] });
    }

    let mut samples = vec![origin];
    let (mut x, mut y, mut heading) = (0.0f64, 0.0f64, 0.0f64);
    let mut t = 0.0f64;

    let n = gait.phases.len();
    let total_phases = n * cycles;
    for i in 0..total_phases {
        let current = &gait.phases[i % n];
        t += current.duration_s;
        if i + 1 == total_phases {
            break; // the run ends inside the last phase; no transition
        }
        let next = &gait.phases[(i + 1) % n];

        let mut dx = [0.0f64; 2];
        for (leg, (old, new)) in [(current.left, next.left), (current.right, next.right)]
            .into_iter()
            .enumerate()
        {
            let delta_reach = model.reach(new) - model.reach(old);
            // Which friction accompanies the reach change: the friction
            // chamber can lead (new state) or lag (old state) the motion.
            let governing = match gait.friction_timing {
                FrictionTiming::Leads => new,
                FrictionTiming::Lags => old,
            };
            dx[leg] = delta_reach * model.body_slip_weight(governing);
        }

        let translation = (dx[0] + dx[1]) / 2.0;
        let heading_change = (dx[1] - dx[0]) / (2.0 * model.half_spacing_mm);
        x += translation * heading.cos();
        y += translation * heading.sin();
        heading += heading_change;
        samples.push(TrajectorySample { t_s: t, x_mm: x, y_mm: y, heading_rad: heading });
    }

    samples.push(TrajectorySample { t_s: t, x_mm: x, y_mm: y, heading_rad: heading });
    Ok(Trajectory { samples })
}

/// Least-squares (Kåsa) circle fit: x² + y² = 2a·x + 2b·y + c.
fn circle_fit_radius(samples: &[TrajectorySample]) -> Option<f64> {
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sz, mut sxz, mut syz) = (0.0, 0.0, 0.0);
    for s in samples {
        let z = s.x_mm * s.x_mm + s.y_mm * s.y_mm;
        sx += s.x_mm;
        sy += s.y_mm;
        sxx += s.x_mm * s.x_mm;
        syy += s.y_mm * s.y_mm;
        sxy += s.x_mm * s.y_mm;
        sz += z;
        sxz += s.x_mm * z;
        syz += s.y_mm * z;
    }
    let aug = [
        [2.0 * sxx, 2.0 * sxy, sx, sxz],
        [2.0 * sxy, 2.0 * syy, sy, syz],
        [2.0 * sx, 2.0 * sy, n, sz],
    ];
    let [a, b, c] = solve3(aug)?;
    let r2 = c + a * a + b * b;
    if r2 > 0.0 {
        Some(r2.sqrt())
    } else {
        None
    }
}

/// Heading changes below this are treated as a straight path.
pub const STRAIGHT_HEADING_EPS_RAD: f64 = 1e-6;

/// Speed, signed turning radius, and net heading change of a trajectory.
pub fn metrics(traj: &Trajectory) -> Result<GaitMetrics, GaitError> {
    if traj.samples.len() < 2 {
        return Err(GaitError::DegenerateTrajectory);
    }
    let first = traj.samples.first().unwrap();
    let last = traj.samples.last().unwrap();
    let elapsed = last.t_s - first.t_s;
    let speed = if elapsed > 0.0 {
        traj.path_length_mm() / elapsed
    } else {
        0.0
    };
    let net_heading = last.heading_rad - first.heading_rad;
    let radius_cm = if net_heading.abs() <= STRAIGHT_HEADING_EPS_RAD {
        f64::INFINITY
    } else {
        let r_mm = circle_fit_radius(&traj.samples).unwrap_or(f64::INFINITY);
        net_heading.signum() * r_mm / 10.0
    };
    Ok(GaitMetrics {
        mean_speed_mm_s: speed,
        turning_radius_cm: radius_cm,
        net_heading_rad: net_heading,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrictionFit {
    pub model: CrawlerModel,
    /// Sum of squared relative speed errors at the fitted point.
    pub residual: f64,
    /// False when the targets could not be met and the returned model is
    /// a best effort.
    pub converged: bool,
    pub forward_speed_mm_s: f64,
    pub retrograde_speed_mm_s: f64,
}

const CALIBRATION_CYCLES: usize = 30;

fn simulated_speeds(model: &CrawlerModel) -> Result<(f64, f64), GaitError> {
    let forward = crate::control::gait_by_name("forward").expect("canonical gait");
    let retro = crate::control::gait_by_name("retrograde").expect("canonical gait");
    let vf = metrics(&simulate(model, &forward, CALIBRATION_CYCLES)?)?.mean_speed_mm_s;
    let vr = metrics(&simulate(model, &retro, CALIBRATION_CYCLES)?)?.mean_speed_mm_s;
    Ok((vf, vr))
}

/// Fit (μ_high, μ_low) so the simulated forward and retrograde speeds
/// match observed ones: a deterministic log-spaced grid scan followed by
/// shrinking coordinate descent, minimizing squared relative error.
pub fn calibrate_friction(
    template: &CrawlerModel,
    forward_speed_mm_s: f64,
    retrograde_speed_mm_s: f64,
) -> Result<FrictionFit, GaitError> {
    if !(forward_speed_mm_s > 0.0 && retrograde_speed_mm_s > 0.0)
        || retrograde_speed_mm_s >= forward_speed_mm_s
    {
        return Err(GaitError::BadSpeedTargets {
            forward: forward_speed_mm_s,
            retro: retrograde_speed_mm_s,
        });
    }
    template.check_structure()?;

    let mu_body = template.mu_body;
    let residual_of = |mu_high: f64, mu_low: f64| -> Result<f64, GaitError> {
        let mut m = *template;
        m.mu_high = mu_high;
        m.mu_low = mu_low;
        let (vf, vr) = simulated_speeds(&m)?;
        Ok((vf / forward_speed_mm_s - 1.0).powi(2) + (vr / retrograde_speed_mm_s - 1.0).powi(2))
    };

    // Stage 1: 24×24 log grid over the physically ordered region.
    let (hi_lo, hi_hi) = (mu_body * 1.02, mu_body * 30.0);
    let (lo_lo, lo_hi) = (mu_body * 1e-3, mu_body * 0.98);
    let grid = 24;
    let mut best = (template.mu_high, template.mu_low, f64::INFINITY);
    for i in 0..grid {
        let mu_high = hi_lo * (hi_hi / hi_lo).powf(i as f64 / (grid - 1) as f64);
        for j in 0..grid {
            let mu_low = lo_lo * (lo_hi / lo_lo).powf(j as f64 / (grid - 1) as f64);
            let r = residual_of(mu_high, mu_low)?;
            if r < best.2 {
                best = (mu_high, mu_low, r);
            }
        }
    }

    // Stage 2: multiplicative coordinate descent with shrinking step.
    let mut step = 0.35;
    for _ in 0..60 {
        let mut improved = false;
        for axis in 0..2 {
            for dir in [1.0 + step, 1.0 / (1.0 + step)] {
                let cand_high = if axis == 0 { (best.0 * dir).clamp(hi_lo, hi_hi) } else { best.0 };
                let cand_low = if axis == 1 { (best.1 * dir).clamp(lo_lo, lo_hi) } else { best.1 };
                let r = residual_of(cand_high, cand_low)?;
                if r < best.2 {
                    best = (cand_high, cand_low, r);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }

    let mut fitted = *template;
    fitted.mu_high = best.0;
    fitted.mu_low = best.1;
    let (vf, vr) = simulated_speeds(&fitted)?;
    Ok(FrictionFit {
        model: fitted,
        residual: best.2,
        converged: best.2 < 0.25,
        forward_speed_mm_s: vf,
        retrograde_speed_mm_s: vr,
    })
}
