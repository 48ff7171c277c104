//! Pressure ramps, haptic force→pressure mapping, the force-feedback
//! wire codec, and valve scheduling for the crawler's leg states.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ControlError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("force must be non-negative and finite, got {0}")]
    BadForce(f64),
    #[error("pressure band requires P_max > P_base, got P_max {p_max} vs base {p_base}")]
    BadPressureBand { p_max: f64, p_base: f64 },
    #[error("datagram truncated: need {need} bytes, got {got}")]
    Truncated { need: usize, got: usize },
    #[error("bad magic {0:02x?}, expected \"GPA1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported datagram version {0}")]
    UnsupportedVersion(u8),
    #[error("gait program needs at least 2 phases with positive durations")]
    BadGaitProgram,
    #[error("pump PWM fraction must lie in [0, 1], got {0}")]
    BadPwm(f64),
}

/// Default modulation rate from the pneumatic control protocol.
pub const DEFAULT_RAMP_RATE_KPA_S: f64 = 3.0;

/// Minimum baseline pressure that keeps a haptic chamber inflated.
pub const HAPTIC_BASELINE_KPA: f64 = 1.0;

/// Piecewise-linear pressure profile bounded by a slew rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RampProfile {
    pub samples: Vec<(f64, f64)>, // (t s, P kPa)
    pub rate_kpa_per_s: f64,
}

impl RampProfile {
    pub fn duration_s(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }
}

/// Ramp from `p0` to `p1` at the given rate, sampled every `dt`. The
/// final sample lands exactly on `p1`.
pub fn ramp_profile(p0: f64, p1: f64, rate: f64, dt: f64) -> Result<RampProfile, ControlError> {
    if !(rate > 0.0) {
        return Err(ControlError::NonPositive { name: "rate", value: rate });
    }
    if !(dt > 0.0) {
        return Err(ControlError::NonPositive { name: "dt", value: dt });
    }
    let span = p1 - p0;
    let duration = span.abs() / rate;
    let dir = span.signum();
    let mut samples = Vec::new();
    let mut t = 0.0;
    while t < duration {
        samples.push((t, p0 + dir * rate * t));
        t += dt;
    }
    samples.push((duration, p1));
    Ok(RampProfile { samples, rate_kpa_per_s: rate })
}

/// Haptic force→pressure mapping: linear from the 1 kPa inflation
/// baseline up to the mapping pressure, clamped above F_max.
pub fn force_to_pressure(
    force_n: f64,
    f_max_n: f64,
    p_max_kpa: f64,
    p_base_kpa: f64,
) -> Result<f64, ControlError> {
    if !(force_n >= 0.0 && force_n.is_finite()) {
        return Err(ControlError::BadForce(force_n));
    }
    if !(f_max_n > 0.0) {
        return Err(ControlError::NonPositive { name: "F_max", value: f_max_n });
    }
    if !(p_max_kpa > p_base_kpa) {
        return Err(ControlError::BadPressureBand { p_max: p_max_kpa, p_base: p_base_kpa });
    }
    let frac = (force_n.min(f_max_n)) / f_max_n;
    Ok(p_base_kpa + frac * (p_max_kpa - p_base_kpa))
}

/// Fingertip force datagram. Fixed 17-byte little-endian layout:
/// magic "GPA1", version (1), sequence u32, index and thumb forces f32.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceDatagram {
    pub seq: u32,
    pub index_force_n: f32,
    pub thumb_force_n: f32,
}

pub const DATAGRAM_MAGIC: [u8; 4] = *b"GPA1";
pub const DATAGRAM_VERSION: u8 = 1;
pub const DATAGRAM_LEN: usize = 17;

pub fn encode_force_datagram(d: &ForceDatagram) -> Result<[u8; DATAGRAM_LEN], ControlError> {
    for f in [d.index_force_n, d.thumb_force_n] {
        if !(f.is_finite() && f >= 0.0) {
            return Err(ControlError::BadForce(f as f64));
        }
    }
    let mut buf = [0u8; DATAGRAM_LEN];
    buf[0..4].copy_from_slice(&DATAGRAM_MAGIC);
    buf[4] = DATAGRAM_VERSION;
    buf[5..9].copy_from_slice(&d.seq.to_le_bytes());
    buf[9..13].copy_from_slice(&d.index_force_n.to_le_bytes());
    buf[13..17].copy_from_slice(&d.thumb_force_n.to_le_bytes());
    Ok(buf)
}

/// Decode a datagram, validating magic and version before any field
/// reads. Trailing bytes beyond the fixed layout are ignored.
pub fn decode_force_datagram(bytes: &[u8]) -> Result<ForceDatagram, ControlError> {
    if bytes.len() < DATAGRAM_LEN {
        return Err(ControlError::Truncated { need: DATAGRAM_LEN, got: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != DATAGRAM_MAGIC {
        return Err(ControlError::BadMagic(magic));
    }
    if bytes[4] != DATAGRAM_VERSION {
        return Err(ControlError::UnsupportedVersion(bytes[4]));
    }
    let d = ForceDatagram {
        seq: u32::from_le_bytes(bytes[5..9].try_into().unwrap()),
        index_force_n: f32::from_le_bytes(bytes[9..13].try_into().unwrap()),
        thumb_force_n: f32::from_le_bytes(bytes[13..17].try_into().unwrap()),
    };
    for f in [d.index_force_n, d.thumb_force_n] {
        if !(f.is_finite() && f >= 0.0) {
            return Err(ControlError::BadForce(f as f64));
        }
    }
    Ok(d)
}

/// Leg operating state. The friction control actuator shares the
/// extension pneumatic line, so ground friction is high exactly when the
/// extension chamber is inflated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegState {
    Flexion,
    Extension,
    Relaxation,
}

impl LegState {
    pub fn high_friction(self) -> bool {
        matches!(self, LegState::Extension)
    }
}

/// Whether the friction chamber leads or lags the leg's reach change at
/// phase transitions. Forward gaits let friction switch first; the
/// retrograde gait inverts the pairing so the reach change happens under
/// the previous phase's friction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrictionTiming {
    Leads,
    Lags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitPhase {
    pub duration_s: f64,
    pub left: LegState,
    pub right: LegState,
}

/// Timed valve/pump program driving the two legs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitProgram {
    pub name: String,
    pub phases: Vec<GaitPhase>,
    /// Pump PWM as a fraction of the 40–60 kPa supply band.
    pub pump_pwm: f64,
    pub friction_timing: FrictionTiming,
}

pub const PUMP_SUPPLY_KPA: (f64, f64) = (40.0, 60.0);

impl GaitProgram {
    pub fn validate(&self) -> Result<(), ControlError> {
        if self.phases.len() < 2 || self.phases.iter().any(|p| !(p.duration_s > 0.0)) {
            return Err(ControlError::BadGaitProgram);
        }
        if !(0.0..=1.0).contains(&self.pump_pwm) {
            return Err(ControlError::BadPwm(self.pump_pwm));
        }
        Ok(())
    }

    /// Supply pressure selected by the pump PWM inside the 40–60 kPa band.
    pub fn supply_kpa(&self) -> f64 {
        PUMP_SUPPLY_KPA.0 + self.pump_pwm * (PUMP_SUPPLY_KPA.1 - PUMP_SUPPLY_KPA.0)
    }

    /// Swap the leg columns (turn_left ↔ turn_right).
    pub fn mirrored(&self, name: &str) -> GaitProgram {
        GaitProgram {
            name: name.to_string(),
            phases: self
                .phases
                .iter()
                .map(|p| GaitPhase { duration_s: p.duration_s, left: p.right, right: p.left })
                .collect(),
            pump_pwm: self.pump_pwm,
            friction_timing: self.friction_timing,
        }
    }
}

/// One row of the 4-channel valve schedule. Channel order is
/// (L-flex, L-ext, R-flex, R-ext); the friction actuators share the ext
/// channels, so no fifth channel exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValvePhase {
    pub t_start_s: f64,
    pub duration_s: f64,
    pub channels: [bool; 4],
}

fn leg_channels(state: LegState) -> [bool; 2] {
    match state {
        LegState::Flexion => [true, false],
        LegState::Extension => [false, true],
        // Relaxation vents both chambers.
        LegState::Relaxation => [false, false],
    }
}

/// Expand a gait program into the per-channel boolean time series.
pub fn leg_valve_schedule(program: &GaitProgram) -> Result<Vec<ValvePhase>, ControlError> {
    program.validate()?;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(program.phases.len());
    for phase in &program.phases {
        let l = leg_channels(phase.left);
        let r = leg_channels(phase.right);
        out.push(ValvePhase {
            t_start_s: t,
            duration_s: phase.duration_s,
            channels: [l[0], l[1], r[0], r[1]],
        });
        t += phase.duration_s;
    }
    Ok(out)
}

/// Default phase duration for the canonical gaits.
pub const DEFAULT_PHASE_S: f64 = 2.0;

/// The four canonical locomotion modes. Forward alternates synchronous
/// extension and flexion; retrograde pairs extension with relaxation
/// under lagging friction; turns drive one leg while the other relaxes.
pub fn canonical_gaits() -> [GaitProgram; 4] {
    let phase = |left, right| GaitPhase { duration_s: DEFAULT_PHASE_S, left, right };
    let forward = GaitProgram {
        name: "forward".into(),
        phases: vec![
            phase(LegState::Extension, LegState::Extension),
            phase(LegState::Flexion, LegState::Flexion),
        ],
        pump_pwm: 1.0,
        friction_timing: FrictionTiming::Leads,
    };
    let retrograde = GaitProgram {
        name: "retrograde".into(),
        phases: vec![
            phase(LegState::Extension, LegState::Extension),
            phase(LegState::Relaxation, LegState::Relaxation),
        ],
        pump_pwm: 1.0,
        friction_timing: FrictionTiming::Lags,
    };
    let turn_left = GaitProgram {
        name: "turn_left".into(),
        phases: vec![
            phase(LegState::Relaxation, LegState::Extension),
            phase(LegState::Relaxation, LegState::Flexion),
        ],
        pump_pwm: 1.0,
        friction_timing: FrictionTiming::Leads,
    };
    let turn_right = turn_left.mirrored("turn_right");
    [forward, retrograde, turn_left, turn_right]
}

pub fn gait_by_name(name: &str) -> Option<GaitProgram> {
    canonical_gaits().into_iter().find(|g| g.name == name)
}
