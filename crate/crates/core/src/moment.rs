//! Virtual-work torque model.
//!
//! The chamber cross-section at a held joint angle θ is a symmetric lens:
//! two inextensible fabric faces of arc length ℓ = L0/2 span the mouth
//! chord c(θ) = 2·s·sin(θ/2) between the seal lines. Each face is a
//! circular arc whose half-subtended angle φ solves sin(φ)/φ = c/ℓ.
//! Chamber volume is the lens area times the chamber width, and the
//! pneumatic moment follows from virtual work: M = scale · P · dV/dψ with
//! ψ = π − θ the closing displacement, so positive M closes the joint.
//!
//! The derivative collapses to a closed form. With r = ℓ/(2φ):
//!   A(φ)  = 2·r²·(φ − sin φ·cos φ)
//!   dA/dc = −ℓ·cos φ / φ
//!   dV/dψ = W·s·ℓ·cos φ·cos(θ/2)/φ
//! The volume peaks where the two faces close into a full circle
//! (φ = π/2); with the default seal offset s = L0/4 that happens at
//! θ* = 2·asin(2/π) ≈ 79.1° and the flat state θ = π is exactly taut
//! (zero volume). Near the taut point both cos(θ/2) and φ vanish; series
//! expansions below φ < 1e-4 keep the evaluation finite and accurate.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::actuator::{ActuatorSpec, ChamberSpec};
use crate::angle::AngleRad;

/// Exact unit conversion: 1 kPa·mm³ = 1e-3 N·mm.
pub const NMM_PER_KPA_MM3: f64 = 1e-3;

/// Below this half-angle the closed forms lose precision to cancellation
/// and 4th-order series take over (φ² ≈ y = 6·(1 − c/ℓ) < 1e-8).
const SERIES_Y_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("chord {chord_mm:.6} mm exceeds face arc length {face_mm:.6} mm; geometry infeasible")]
    ChordExceedsFace { chord_mm: f64, face_mm: f64 },
    #[error("joint angle {theta_deg:.4}° outside (0°, 180°]")]
    ThetaOutOfRange { theta_deg: f64 },
    #[error("moment diverges at the taut angle {theta_deg:.4}° (seal offset exceeds L0/4)")]
    TautSingularity { theta_deg: f64 },
    #[error("unknown joint `{0}`")]
    UnknownJoint(String),
}

/// Solved lens cross-section for a chord/face pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossSectionSolution {
    pub chord_mm: f64,
    pub face_mm: f64,
    /// Half-subtended angle of each face arc; 0 is the taut-flat limit.
    pub half_angle_rad: f64,
    /// Face arc radius, infinite at the taut-flat limit.
    pub radius_mm: f64,
    pub lens_area_mm2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeResult {
    pub theta: AngleRad,
    pub volume_mm3: f64,
}

/// Solve sin(φ)/φ = x on (0, π] by bracketed bisection, with a series
/// inversion once the root drops below the precision of the closed form.
fn solve_half_angle(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x <= 0.0 {
        return PI;
    }
    let y = 6.0 * (1.0 - x);
    if y < SERIES_Y_THRESHOLD {
        // Inverse series of sin(φ)/φ = 1 − φ²/6 + φ⁴/120 − …:
        // φ² = y + y²/20 + 2y³/525.
        return (y + y * y / 20.0 + 2.0 * y * y * y / 525.0).sqrt();
    }
    let mut lo = 0.0_f64;
    let mut hi = PI;
    // sin(φ)/φ − x is positive at lo and non-positive at hi; halving π
    // 60 times leaves an interval below 1e-17.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let f = mid.sin() / mid - x;
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn lens_area(phi: f64, face_mm: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    if phi * phi < SERIES_Y_THRESHOLD {
        // A = ℓ²·(φ/3 − φ³/15 + 2φ⁵/315): cancellation-free near taut.
        let p2 = phi * phi;
        return face_mm * face_mm * phi * (1.0 / 3.0 - p2 / 15.0 + 2.0 * p2 * p2 / 315.0);
    }
    let r = face_mm / (2.0 * phi);
    2.0 * r * r * (phi - phi.sin() * phi.cos())
}

/// Solve the lens cross-section for a chord `c` spanned by fabric faces of
/// arc length `ℓ`. `c == ℓ` is the taut-flat limit (φ → 0, zero area).
pub fn solve_cross_section(chord_mm: f64, face_mm: f64) -> Result<CrossSectionSolution, MomentError> {
    if !(chord_mm > 0.0 && chord_mm.is_finite()) {
        return Err(MomentError::NonPositive { name: "chord", value: chord_mm });
    }
    if !(face_mm > 0.0 && face_mm.is_finite()) {
        return Err(MomentError::NonPositive { name: "face length", value: face_mm });
    }
    if chord_mm > face_mm {
        return Err(MomentError::ChordExceedsFace {
            chord_mm,
            face_mm,
        });
    }
    let phi = solve_half_angle(chord_mm / face_mm);
    let radius = if phi == 0.0 { f64::INFINITY } else { face_mm / (2.0 * phi) };
    Ok(CrossSectionSolution {
        chord_mm,
        face_mm,
        half_angle_rad: phi,
        radius_mm: radius,
        lens_area_mm2: lens_area(phi, face_mm),
    })
}

fn check_theta(theta: AngleRad) -> Result<f64, MomentError> {
    let t = theta.radians();
    if !(t > 0.0 && t <= PI) {
        return Err(MomentError::ThetaOutOfRange { theta_deg: theta.degrees() });
    }
    Ok(t)
}

/// Seal-line chord at joint angle θ for seal offset s.
pub fn chord_at(theta: AngleRad, seal_offset_mm: f64) -> f64 {
    2.0 * seal_offset_mm * (theta.radians() / 2.0).sin()
}

/// Enclosed chamber volume at a held joint angle.
pub fn chamber_volume(theta: AngleRad, chamber: &ChamberSpec) -> Result<VolumeResult, MomentError> {
    let t = check_theta(theta)?;
    let s = chamber.seal_offset();
    let ell = chamber.face_length_mm();
    if !(s > 0.0) {
        return Err(MomentError::NonPositive { name: "seal offset", value: s });
    }
    let chord = 2.0 * s * (t / 2.0).sin();
    if chord > ell {
        return Err(MomentError::ChordExceedsFace { chord_mm: chord, face_mm: ell });
    }
    let x = chord / ell;
    let phi = if x >= 1.0 { 0.0 } else { solve_half_angle(x) };
    Ok(VolumeResult {
        theta,
        volume_mm3: chamber.width_mm * lens_area(phi, ell),
    })
}

/// The joint angle of maximum volume (faces form a full circle), when it
/// exists for the chamber's seal offset.
pub fn peak_volume_angle(chamber: &ChamberSpec) -> Option<AngleRad> {
    let s = chamber.seal_offset();
    let ell = chamber.face_length_mm();
    // c(θ*) = 2ℓ/π  ⇒  sin(θ*/2) = ℓ/(π·s)
    let sin_half = ell / (PI * s);
    if !(0.0..=1.0).contains(&sin_half) {
        return None;
    }
    AngleRad::from_radians(2.0 * sin_half.asin()).ok()
}

/// dV/dψ per unit width and pressure: s·ℓ·cos(φ)·cos(θ/2)/φ, evaluated
/// stably through the taut limit.
fn closing_volume_gradient(theta_rad: f64, seal_offset: f64, face: f64) -> Result<f64, MomentError> {
    let half = theta_rad / 2.0;
    let sin_half = half.sin();
    let cos_half = half.cos();
    let k = 2.0 * seal_offset / face;
    let x = k * sin_half;
    if x > 1.0 {
        return Err(MomentError::ChordExceedsFace {
            chord_mm: 2.0 * seal_offset * sin_half,
            face_mm: face,
        });
    }
    // 1 − k·sin = k·cos²/(1+sin) + (1−k): exact split that avoids the
    // catastrophic cancellation of computing 1 − x directly near taut.
    let one_minus_x = (k * cos_half * cos_half / (1.0 + sin_half) + (1.0 - k)).max(0.0);
    let y = 6.0 * one_minus_x;

    if y < SERIES_Y_THRESHOLD {
        let phi2 = y * (1.0 + y / 20.0 + 2.0 * y * y / 525.0);
        let ratio = if phi2 == 0.0 {
            if cos_half.abs() < 1e-7 {
                // Joint-flat taut limit (default s = L0/4): both cos(θ/2)
                // and φ vanish; their ratio tends to √((1+sin)/6k).
                ((1.0 + sin_half) / (6.0 * k)).sqrt()
            } else {
                // Taut strictly inside the range (s > L0/4): the gradient
                // genuinely diverges.
                return Err(MomentError::TautSingularity {
                    theta_deg: theta_rad.to_degrees(),
                });
            }
        } else {
            cos_half / phi2.sqrt()
        };
        let cos_phi = 1.0 - phi2 / 2.0 + phi2 * phi2 / 24.0;
        Ok(seal_offset * face * cos_phi * ratio)
    } else {
        let phi = solve_half_angle(x);
        Ok(seal_offset * face * phi.cos() * cos_half / phi)
    }
}

/// Quasi-static moment about the joint, in N·mm, positive closing.
///
/// The pressure enters as a single multiplicative factor, so
/// moment(θ, 2P) = 2·moment(θ, P) holds exactly in floating point.
pub fn moment(
    theta: AngleRad,
    pressure_kpa: f64,
    chamber: &ChamberSpec,
    scale: f64,
) -> Result<f64, MomentError> {
    let t = check_theta(theta)?;
    let gradient = closing_volume_gradient(t, chamber.seal_offset(), chamber.face_length_mm())?;
    let base = scale * chamber.width_mm * gradient * NMM_PER_KPA_MM3;
    Ok(pressure_kpa * base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorqueSample {
    pub theta: AngleRad,
    pub moment_nmm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepInfo {
    pub joint: String,
    pub theta_start: AngleRad,
    pub theta_end: AngleRad,
    pub rate_deg_per_s: f64,
    pub sample_dt_s: f64,
}

/// Sampled moment-vs-angle curve at fixed pressure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorqueCurve {
    pub pressure_kpa: f64,
    /// Samples ordered by strictly increasing θ.
    pub samples: Vec<TorqueSample>,
    pub chamber_ids: Vec<String>,
    pub scale: f64,
    pub sweep: SweepInfo,
}

/// Emulate the servo characterization protocol: sweep the joint at a
/// constant rate (default 3 °/s) and record the quasi-static moment,
/// summing contributions from every chamber driving the swept joint.
pub fn torque_sweep(
    spec: &ActuatorSpec,
    joint_id: &str,
    pressure_kpa: f64,
    theta_start: AngleRad,
    theta_end: AngleRad,
    rate_deg_per_s: f64,
    sample_dt_s: f64,
    scale: f64,
) -> Result<TorqueCurve, MomentError> {
    if !(rate_deg_per_s > 0.0) {
        return Err(MomentError::NonPositive { name: "sweep rate", value: rate_deg_per_s });
    }
    if !(sample_dt_s > 0.0) {
        return Err(MomentError::NonPositive { name: "sample dt", value: sample_dt_s });
    }
    if spec.joint(joint_id).is_none() {
        return Err(MomentError::UnknownJoint(joint_id.to_string()));
    }

    let drivers: Vec<&ChamberSpec> = spec
        .chambers
        .iter()
        .filter(|c| c.drives.iter().any(|d| d.joint == joint_id))
        .collect();

    let start = theta_start.radians();
    let end = theta_end.radians();
    let span_deg = (end - start).abs().to_degrees();
    let duration = span_deg / rate_deg_per_s;
    let direction = if end >= start { 1.0 } else { -1.0 };
    let rate_rad = rate_deg_per_s.to_radians();

    let mut thetas = Vec::new();
    let mut t = 0.0;
    while t < duration {
        thetas.push(start + direction * rate_rad * t);
        t += sample_dt_s;
    }
    thetas.push(end); // exact endpoint

    let mut samples = Vec::with_capacity(thetas.len());
    for theta_rad in thetas {
        let theta = AngleRad::from_radians(theta_rad)
            .map_err(|_| MomentError::ThetaOutOfRange { theta_deg: theta_rad.to_degrees() })?;
        let mut total = 0.0;
        for chamber in &drivers {
            let sign = chamber
                .drives
                .iter()
                .find(|d| d.joint == joint_id)
                .map(|d| d.sign.factor())
                .unwrap_or(1.0);
            total += sign * moment(theta, pressure_kpa, chamber, scale)?;
        }
        samples.push(TorqueSample { theta, moment_nmm: total });
    }

    samples.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    samples.dedup_by(|a, b| a.theta == b.theta);

    Ok(TorqueCurve {
        pressure_kpa,
        samples,
        chamber_ids: drivers.iter().map(|c| c.id.clone()).collect(),
        scale,
        sweep: SweepInfo {
            joint: joint_id.to_string(),
            theta_start,
            theta_end,
            rate_deg_per_s,
            sample_dt_s,
        },
    })
}

/// One-parameter torque calibration: the least-squares scale that maps
/// model moments onto measured ones, scale = Σ(meas·model)/Σ(model²).
pub fn fit_torque_scale(model_nmm: &[f64], measured_nmm: &[f64]) -> Option<f64> {
    if model_nmm.len() != measured_nmm.len() || model_nmm.is_empty() {
        return None;
    }
    let num: f64 = model_nmm.iter().zip(measured_nmm).map(|(m, y)| m * y).sum();
    let den: f64 = model_nmm.iter().map(|m| m * m).sum();
    if den == 0.0 {
        return None;
    }
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuator::{JointDrive, Sign};

    fn deg(v: f64) -> AngleRad {
        AngleRad::from_degrees(v).unwrap()
    }

    fn chamber(l0: f64, w: f64, s: Option<f64>) -> ChamberSpec {
        ChamberSpec {
            id: "c".into(),
            circumferential_length_mm: l0,
            overall_length_mm: 80.0,
            width_mm: w,
            rest_angle: deg(120.0),
            seal_offset_mm: s,
            drives: vec![JointDrive { joint: "j".into(), rest_angle: deg(120.0), sign: Sign::Plus }],
        }
    }

    #[test]
    fn taut_face_has_zero_area() {
        let sol = solve_cross_section(12.0, 12.0).unwrap();
        assert_eq!(sol.half_angle_rad, 0.0);
        assert_eq!(sol.lens_area_mm2, 0.0);
        assert!(sol.radius_mm.is_infinite());
    }

    #[test]
    fn semicircular_faces_close_a_circle() {
        let ell = 12.0;
        let sol = solve_cross_section(ell * 2.0 / PI, ell).unwrap();
        assert!((sol.half_angle_rad - PI / 2.0).abs() < 1e-9);
        assert!((sol.lens_area_mm2 - ell * ell / PI).abs() / (ell * ell / PI) < 1e-9);
    }

    #[test]
    fn chord_longer_than_face_is_rejected() {
        assert!(matches!(
            solve_cross_section(12.1, 12.0),
            Err(MomentError::ChordExceedsFace { .. })
        ));
        assert!(solve_cross_section(-1.0, 12.0).is_err());
        assert!(solve_cross_section(1.0, 0.0).is_err());
    }

    #[test]
    fn half_angle_solution_satisfies_equation() {
        for x in [0.05, 0.3, 0.64, 0.9, 0.99, 0.999999] {
            let phi = solve_half_angle(x);
            assert!(
                (phi.sin() / phi - x).abs() < 1e-12,
                "x={x}, phi={phi}, residual={}",
                phi.sin() / phi - x
            );
        }
    }

    #[test]
    fn flat_state_volume_is_exactly_zero_with_default_offset() {
        let c = chamber(24.0, 20.0, None); // s = L0/4 = 6
        let v = chamber_volume(deg(180.0), &c).unwrap();
        assert_eq!(v.volume_mm3, 0.0);
    }

    #[test]
    fn volume_peaks_at_circle_closure() {
        let c = chamber(24.0, 20.0, None);
        let theta_star = peak_volume_angle(&c).unwrap();
        assert!((theta_star.radians() - 2.0 * (2.0 / PI).asin()).abs() < 1e-12);
        let v = chamber_volume(theta_star, &c).unwrap().volume_mm3;
        let closed_form = 20.0 * 24.0 * 24.0 / (4.0 * PI); // W·L0²/4π
        assert!((v - closed_form).abs() / closed_form < 1e-9);
        // Neighbours are lower.
        for d in [-2.0, 2.0] {
            let nearby = chamber_volume(deg(theta_star.degrees() + d), &c).unwrap().volume_mm3;
            assert!(nearby < v);
        }
    }

    #[test]
    fn volume_is_nonnegative_over_the_whole_range() {
        for l0 in [19.0, 24.0, 29.0, 34.0] {
            let c = chamber(l0, 20.0, None);
            for i in 1..=720 {
                let theta = deg(180.0 * i as f64 / 720.0);
                let v = chamber_volume(theta, &c).unwrap().volume_mm3;
                assert!(v >= 0.0, "V({}) = {v}", theta.degrees());
            }
        }
    }

    #[test]
    fn moment_is_linear_in_pressure_exactly() {
        let c = chamber(24.0, 20.0, Some(6.0));
        for theta in [95.0, 120.0, 150.0, 179.0, 180.0] {
            let m1 = moment(deg(theta), 40.0, &c, 1.0).unwrap();
            let m2 = moment(deg(theta), 80.0, &c, 1.0).unwrap();
            assert_eq!(m2, 2.0 * m1, "theta={theta}");
        }
    }

    #[test]
    fn moment_vanishes_at_volume_peak() {
        let c = chamber(24.0, 20.0, None);
        let theta_star = peak_volume_angle(&c).unwrap();
        let m = moment(theta_star, 50.0, &c, 1.0).unwrap();
        assert!(m.abs() < 1e-9, "moment at θ* should vanish, got {m}");
    }

    #[test]
    fn moment_positive_and_increasing_between_peak_and_flat() {
        let c = chamber(24.0, 20.0, None);
        let theta_star = peak_volume_angle(&c).unwrap().degrees();
        let mut prev = 0.0;
        for i in 1..=200 {
            let theta = theta_star + (180.0 - theta_star) * (i as f64) / 200.0;
            let m = moment(deg(theta), 50.0, &c, 1.0).unwrap();
            assert!(m > prev, "moment must rise monotonically, θ={theta}");
            prev = m;
        }
    }

    #[test]
    fn flat_moment_hits_taut_limit() {
        // At θ = π with s = L0/4 the gradient tends to W·s·ℓ/√3.
        let c = chamber(24.0, 20.0, None);
        let m = moment(deg(180.0), 50.0, &c, 1.0).unwrap();
        let expected = 50.0 * 20.0 * 6.0 * 12.0 / 3.0_f64.sqrt() * NMM_PER_KPA_MM3;
        assert!((m - expected).abs() / expected < 1e-9, "m={m} expected={expected}");
    }

    #[test]
    fn oversized_seal_offset_errors_at_taut() {
        // s > L0/4 means the chord reaches ℓ before the joint is flat.
        let c = chamber(24.0, 20.0, Some(8.0));
        // chord = 16·sin(θ/2) = 12 at θ = 2·asin(0.75) ≈ 97.2°; beyond that
        // geometry is infeasible.
        assert!(matches!(
            moment(deg(150.0), 50.0, &c, 1.0),
            Err(MomentError::ChordExceedsFace { .. })
        ));
    }

    #[test]
    fn zero_pressure_sweep_is_identically_zero() {
        let spec = four_chamber_parallel();
        let curve = torque_sweep(&spec, "j", 0.0, deg(180.0), deg(95.0), 3.0, 1.0, 1.0).unwrap();
        assert!(curve.samples.iter().all(|s| s.moment_nmm == 0.0));
        assert!(!curve.samples.is_empty());
    }

    #[test]
    fn sweep_thetas_strictly_increase() {
        let spec = four_chamber_parallel();
        let curve = torque_sweep(&spec, "j", 80.0, deg(180.0), deg(95.0), 3.0, 0.5, 1.0).unwrap();
        for pair in curve.samples.windows(2) {
            assert!(pair[0].theta < pair[1].theta);
        }
        let first = curve.samples.first().unwrap().theta;
        let last = curve.samples.last().unwrap().theta;
        assert!((first.degrees() - 95.0).abs() < 1e-9);
        assert!((last.degrees() - 180.0).abs() < 1e-9);
    }

    #[test]
    fn doubling_width_doubles_every_sample() {
        let mut spec = four_chamber_parallel();
        let base = torque_sweep(&spec, "j", 80.0, deg(180.0), deg(120.0), 3.0, 1.0, 1.0).unwrap();
        for c in &mut spec.chambers {
            c.width_mm *= 2.0;
        }
        let wide = torque_sweep(&spec, "j", 80.0, deg(180.0), deg(120.0), 3.0, 1.0, 1.0).unwrap();
        for (a, b) in base.samples.iter().zip(&wide.samples) {
            assert!((b.moment_nmm - 2.0 * a.moment_nmm).abs() <= 1e-12 * a.moment_nmm.abs());
        }
    }

    #[test]
    fn torque_scale_fit_recovers_ratio() {
        let model = [1.0, 2.0, 3.0];
        let measured = [1.5, 3.0, 4.5];
        let s = fit_torque_scale(&model, &measured).unwrap();
        assert!((s - 1.5).abs() < 1e-12);
    }

    fn four_chamber_parallel() -> ActuatorSpec {
        use crate::actuator::{Architecture, JointSpec, LinkSpec};
        let mk = |id: &str| ChamberSpec {
            id: id.into(),
            circumferential_length_mm: 27.0,
            overall_length_mm: 83.0,
            width_mm: 50.0,
            rest_angle: deg(140.0),
            seal_offset_mm: None,
            drives: vec![JointDrive { joint: "j".into(), rest_angle: deg(140.0), sign: Sign::Plus }],
        };
        ActuatorSpec {
            architecture: Architecture::Parallel,
            links: vec![
                LinkSpec { id: "forearm".into(), length_mm: 60.0 },
                LinkSpec { id: "hand".into(), length_mm: 40.0 },
            ],
            joints: vec![JointSpec {
                id: "j".into(),
                between: ["forearm".into(), "hand".into()],
                rest_angle: deg(140.0),
            }],
            chambers: vec![mk("p1"), mk("p2"), mk("p3"), mk("p4")],
            constraint_layers: vec![],
        }
    }
}
