//! Least-squares fitting, signal processing, and study-report arithmetic.
//!
//! Covers the calibration work around the actuator model: ordinary least
//! squares for the affine angle map, damped Gauss–Newton for the
//! exponential FSR curve, AIC-ranked model-family comparison, the
//! moving-average filter used on force recordings, and step-response
//! metrics.

use serde::Serialize;
use thiserror::Error;

use crate::angle::AngleRad;
use crate::kinematics::{AngleMap, KinematicsError};

#[derive(Debug, Error, PartialEq)]
pub enum CalibrateError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("fit did not converge after {iterations} iterations (residual norm {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("resistance {r_kohm:.4} kΩ outside the model support ({lo:.4}, {hi:.4}) kΩ")]
    ResistanceOutOfRange { r_kohm: f64, lo: f64, hi: f64 },
    #[error("window must satisfy 1 ≤ window ≤ n, got window {window} for {n} samples")]
    BadWindow { window: usize, n: usize },
    #[error("empty series")]
    EmptySeries,
    #[error("step never reaches the {threshold} threshold")]
    ThresholdNotReached { threshold: &'static str },
    #[error("baseline and final value must differ")]
    FlatStep,
    #[error("baseline RMS must be positive, got {0}")]
    NonPositiveBaseline(f64),
    #[error(transparent)]
    Map(#[from] KinematicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamily {
    Affine,
    Exponential,
    Power,
}

/// Outcome of one model-family fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub family: FitFamily,
    /// Named parameters; affine also reports per-parameter standard errors.
    pub params: Vec<(String, f64)>,
    pub rmse: f64,
    /// Gaussian AIC: n·ln(SSR/n) + 2k. Comparable across families at
    /// equal n; only the ranking is meaningful.
    pub aic: f64,
    pub n: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

fn gaussian_aic(ssr: f64, n: usize, k: usize) -> f64 {
    (n as f64) * (ssr / n as f64).max(1e-300).ln() + 2.0 * k as f64
}

/// Plain OLS line fit y = slope·x + intercept.
fn ols_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64 /*ssr*/, f64 /*sxx*/), CalibrateError> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(CalibrateError::Degenerate("all x values identical".into()));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Ok((slope, intercept, ssr, sxx))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit {
    pub report: FitReport,
    pub map: AngleMap,
}

/// Fit the α0 → α1 angle map by ordinary least squares. Points are in
/// radians; the map's validity domain is the fitted x-range.
pub fn fit_affine(points: &[(f64, f64)]) -> Result<AffineFit, CalibrateError> {
    if points.len() < 2 {
        return Err(CalibrateError::TooFewPoints { need: 2, got: points.len() });
    }
    let (slope, intercept, ssr, sxx) = ols_line(points)?;
    let n = points.len();
    let rmse = (ssr / n as f64).sqrt();

    // Standard errors from the residual variance (n−2 dof when available).
    let dof = (n.saturating_sub(2)).max(1) as f64;
    let s2 = ssr / dof;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / n as f64 + mean_x * mean_x / sxx)).sqrt();

    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let map = AngleMap::new(
        slope,
        intercept,
        AngleRad::from_radians(lo).map_err(|_| CalibrateError::Degenerate("non-finite x".into()))?,
        AngleRad::from_radians(hi).map_err(|_| CalibrateError::Degenerate("non-finite x".into()))?,
    )?;

    Ok(AffineFit {
        report: FitReport {
            family: FitFamily::Affine,
            params: vec![
                ("slope".into(), slope),
                ("intercept_rad".into(), intercept),
                ("se_slope".into(), se_slope),
                ("se_intercept_rad".into(), se_intercept),
            ],
            rmse,
            aic: gaussian_aic(ssr, n, 2),
            n,
            converged: true,
            warnings: vec![],
        },
        map,
    })
}

/// Fitted FSR model R(F) = a·exp(−b·F) + c, valid over the force range
/// the calibration data covered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsrCalibration {
    pub a_kohm: f64,
    pub b_per_n: f64,
    pub c_kohm: f64,
    pub force_range_n: (f64, f64),
}

impl FsrCalibration {
    pub fn resistance(&self, force_n: f64) -> f64 {
        self.a_kohm * (-self.b_per_n * force_n).exp() + self.c_kohm
    }
}

/// Solve the damped 3×3 normal equations by Gaussian elimination.
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

fn exp_ssr(points: &[(f64, f64)], p: [f64; 3]) -> f64 {
    points
        .iter()
        .map(|&(f, r)| (p[0] * (-p[1] * f).exp() + p[2] - r).powi(2))
        .sum()
}

/// Nonlinear least squares for the FSR curve: Gauss–Newton steps with
/// Levenberg damping, deterministic schedule, converging to gradient
/// norm < 1e-10 or 500 iterations.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<(FsrCalibration, FitReport), CalibrateError> {
    if points.len() < 4 {
        return Err(CalibrateError::TooFewPoints { need: 4, got: points.len() });
    }
    for &(f, r) in points {
        if f < 0.0 || !f.is_finite() {
            return Err(CalibrateError::Degenerate(format!("negative or non-finite force {f}")));
        }
        if r <= 0.0 || !r.is_finite() {
            return Err(CalibrateError::Degenerate(format!("non-positive resistance {r}")));
        }
    }

    let r_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let r_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if r_max - r_min <= 0.0 {
        return Err(CalibrateError::Degenerate("constant resistance data".into()));
    }

    // Initial guess: offset at the resistance floor, amplitude from the
    // zero-force end, decay rate from a two-point log slope.
    let first = points
        .iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();
    let last = points
        .iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();
    let c0 = r_min - 1e-3 * (r_max - r_min);
    let a0 = (first.1 - c0).max(1e-6 * r_max);
    let span_f = (last.0 - first.0).max(1e-12);
    let b0 = {
        let num = (first.1 - c0).max(1e-12);
        let den = (last.1 - c0).max(1e-12);
        let slope = (num / den).ln() / span_f;
        if slope.is_finite() && slope > 0.0 { slope } else { 1.0 / span_f }
    };

    let mut p = [a0, b0, c0];
    let mut ssr = exp_ssr(points, p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    while iterations < 500 {
        iterations += 1;
        // Assemble JᵀJ and Jᵀr for residuals model − data.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(f, r) in points {
            let e = (-p[1] * f).exp();
            let resid = p[0] * e + p[2] - r;
            let row = [e, -p[0] * f * e, 1.0];
            for i in 0..3 {
                jtr[i] += row[i] * resid;
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        grad_norm = jtr.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm < 1e-10 {
            break;
        }

        // Try damped steps; raise damping until the step improves SSR.
        let mut stepped = false;
        for _ in 0..25 {
            let mut aug = [[0.0f64; 4]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    aug[i][j] = jtj[i][j];
                }
                aug[i][i] += lambda * jtj[i][i].max(1e-12);
                aug[i][3] = -jtr[i];
            }
            if let Some(delta) = solve3(aug) {
                let cand = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
                let cand_ssr = exp_ssr(points, cand);
                if cand_ssr.is_finite() && cand_ssr < ssr {
                    p = cand;
                    ssr = cand_ssr;
                    lambda = (lambda / 3.0).max(1e-15);
                    stepped = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !stepped {
            break; // damping exhausted; gradient check below decides
        }
    }

    if grad_norm >= 1e-10 && iterations >= 500 {
        return Err(CalibrateError::NonConvergence { iterations, residual: ssr.sqrt() });
    }
    if !(p[0] > 0.0 && p[1] > 0.0) {
        return Err(CalibrateError::Degenerate(format!(
            "fitted curve is not decreasing (a = {:.4}, b = {:.4})",
            p[0], p[1]
        )));
    }

    let mut warnings = Vec::new();
    let mut sorted: Vec<_> = points.to_vec();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    if sorted.windows(2).any(|w| w[1].1 > w[0].1) {
        warnings.push("resistance data is not monotone decreasing in force".into());
    }

    let n = points.len();
    let f_lo = sorted.first().unwrap().0;
    let f_hi = sorted.last().unwrap().0;
    Ok((
        FsrCalibration {
            a_kohm: p[0],
            b_per_n: p[1],
            c_kohm: p[2],
            force_range_n: (f_lo, f_hi),
        },
        FitReport {
            family: FitFamily::Exponential,
            params: vec![
                ("a_kohm".into(), p[0]),
                ("b_per_n".into(), p[1]),
                ("c_kohm".into(), p[2]),
            ],
            rmse: (ssr / n as f64).sqrt(),
            aic: gaussian_aic(ssr, n, 3),
            n,
            converged: true,
            warnings,
        },
    ))
}

/// Power-law fit y = A·x^p via log-log least squares; rmse reported in
/// the original y space so AIC stays comparable.
fn fit_power(points: &[(f64, f64)]) -> Result<FitReport, CalibrateError> {
    if points.len() < 4 {
        return Err(CalibrateError::TooFewPoints { need: 4, got: points.len() });
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(CalibrateError::Degenerate(
            "power fit requires strictly positive x and y".into(),
        ));
    }
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (p, log_a, _, _) = ols_line(&logged)?;
    let a = log_a.exp();
    let ssr: f64 = points.iter().map(|&(x, y)| (a * x.powf(p) - y).powi(2)).sum();
    let n = points.len();
    Ok(FitReport {
        family: FitFamily::Power,
        params: vec![("amplitude".into(), a), ("exponent".into(), p)],
        rmse: (ssr / n as f64).sqrt(),
        aic: gaussian_aic(ssr, n, 2),
        n,
        converged: true,
        warnings: vec![],
    })
}

fn fit_generic_affine(points: &[(f64, f64)]) -> Result<FitReport, CalibrateError> {
    if points.len() < 2 {
        return Err(CalibrateError::TooFewPoints { need: 2, got: points.len() });
    }
    let (slope, intercept, ssr, _) = ols_line(points)?;
    let n = points.len();
    Ok(FitReport {
        family: FitFamily::Affine,
        params: vec![("slope".into(), slope), ("intercept".into(), intercept)],
        rmse: (ssr / n as f64).sqrt(),
        aic: gaussian_aic(ssr, n, 2),
        n,
        converged: true,
        warnings: vec![],
    })
}

/// Fit every requested family and rank ascending by AIC. A family that
/// cannot be fitted is kept in the list, marked non-converged with the
/// reason, and ranked after every successful fit.
pub fn compare_fits(points: &[(f64, f64)], families: &[FitFamily]) -> Vec<FitReport> {
    let mut reports: Vec<FitReport> = families
        .iter()
        .map(|&family| {
            let outcome = match family {
                FitFamily::Affine => fit_generic_affine(points),
                FitFamily::Exponential => fit_exponential(points).map(|(_, r)| r),
                FitFamily::Power => fit_power(points),
            };
            outcome.unwrap_or_else(|err| FitReport {
                family,
                params: vec![],
                rmse: f64::NAN,
                aic: f64::INFINITY,
                n: points.len(),
                converged: false,
                warnings: vec![err.to_string()],
            })
        })
        .collect();
    reports.sort_by(|a, b| {
        b.converged
            .cmp(&a.converged)
            .then(a.aic.partial_cmp(&b.aic).unwrap_or(std::cmp::Ordering::Equal))
    });
    reports
}

/// Closed-form inverse of the FSR model: F = −ln((R − c)/a)/b.
pub fn estimate_force(cal: &FsrCalibration, r_kohm: f64) -> Result<f64, CalibrateError> {
    let r_at_zero = cal.resistance(0.0);
    if r_kohm <= cal.c_kohm || r_kohm > r_at_zero {
        return Err(CalibrateError::ResistanceOutOfRange {
            r_kohm,
            lo: cal.c_kohm,
            hi: r_at_zero,
        });
    }
    Ok(-((r_kohm - cal.c_kohm) / cal.a_kohm).ln() / cal.b_per_n)
}

/// Centered moving mean. Interior samples average a full window of
/// `window` points ([i−⌊(w−1)/2⌋, i+⌊w/2⌋]); the window clamps at the
/// edges, shrinking toward the series ends. Output length equals input
/// length and a constant series is a fixed point.
pub fn moving_average(series: &[(f64, f64)], window: usize) -> Result<Vec<(f64, f64)>, CalibrateError> {
    if series.is_empty() {
        return Err(CalibrateError::EmptySeries);
    }
    if window < 1 || window > series.len() {
        return Err(CalibrateError::BadWindow { window, n: series.len() });
    }
    let half_lo = (window - 1) / 2;
    let half_hi = window / 2;
    let n = series.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half_lo);
        let hi = (i + half_hi).min(n - 1);
        let sum: f64 = series[lo..=hi].iter().map(|p| p.1).sum();
        out.push((series[i].0, sum / (hi - lo + 1) as f64));
    }
    Ok(out)
}

/// Step-response metrics: delay = onset to the 10% crossing, rise = 10%
/// to 90% crossing, both linearly interpolated between samples. The 10%
/// and 10–90% definitions follow the usual control-engineering
/// convention; onset is the first sample's timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    pub delay_time_s: f64,
    pub rise_time_s: f64,
}

pub fn step_metrics(
    series: &[(f64, f64)],
    baseline: f64,
    final_value: f64,
) -> Result<StepMetrics, CalibrateError> {
    if series.is_empty() {
        return Err(CalibrateError::EmptySeries);
    }
    let span = final_value - baseline;
    if span == 0.0 {
        return Err(CalibrateError::FlatStep);
    }
    let onset = series[0].0;
    let v10 = baseline + 0.10 * span;
    let v90 = baseline + 0.90 * span;

    let t10 = first_crossing(series, v10, span.signum(), 0)
        .ok_or(CalibrateError::ThresholdNotReached { threshold: "10%" })?;
    let from = series.iter().position(|&(t, _)| t >= t10.0).unwrap_or(0);
    let t90 = first_crossing(series, v90, span.signum(), from)
        .ok_or(CalibrateError::ThresholdNotReached { threshold: "90%" })?;

    Ok(StepMetrics {
        delay_time_s: t10.1 - onset,
        rise_time_s: (t90.1 - t10.1).max(0.0),
    })
}

/// First time the series crosses `level` in the step direction, starting
/// at sample `from`. Returns (sample time at/after crossing, interpolated
/// crossing time).
fn first_crossing(
    series: &[(f64, f64)],
    level: f64,
    direction: f64,
    from: usize,
) -> Option<(f64, f64)> {
    let reached = |y: f64| {
        if direction > 0.0 { y >= level } else { y <= level }
    };
    if reached(series[from].1) {
        return Some((series[from].0, series[from].0));
    }
    for i in from..series.len().saturating_sub(1) {
        let (t0, y0) = series[i];
        let (t1, y1) = series[i + 1];
        if !reached(y0) && reached(y1) {
            let frac = if y1 == y0 { 0.0 } else { (level - y0) / (y1 - y0) };
            return Some((t1, t0 + frac * (t1 - t0)));
        }
    }
    None
}

/// EMG study arithmetic: percent reduction of MVC-normalized RMS
/// activity, 100·(baseline − assisted)/baseline.
pub fn percent_reduction(baseline_rms: f64, assisted_rms: f64) -> Result<f64, CalibrateError> {
    if !(baseline_rms > 0.0) {
        return Err(CalibrateError::NonPositiveBaseline(baseline_rms));
    }
    Ok(100.0 * (baseline_rms - assisted_rms) / baseline_rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn deg2rad(d: f64) -> f64 {
        d * PI / 180.0
    }

    /// Tiny deterministic generator for reproducible noise (SplitMix64
    /// stepped into a uniform in [-1, 1)).
    struct Lcg(u64);
    impl Lcg {
        fn next_unit(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
        /// Approximate standard normal from 12 uniform draws.
        fn next_gauss(&mut self) -> f64 {
            (0..12).map(|_| self.next_unit()).sum::<f64>() / 2.0
        }
    }

    #[test]
    fn exact_line_recovers_exactly() {
        let points: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = deg2rad(40.0 + 6.0 * i as f64);
                (x, 0.7 * x + deg2rad(10.0))
            })
            .collect();
        let fit = fit_affine(&points).unwrap();
        assert!((fit.map.slope() - 0.7).abs() < 1e-12);
        assert!((fit.map.intercept_rad() - deg2rad(10.0)).abs() < 1e-12);
        assert!(fit.report.rmse < 1e-10);
    }

    #[test]
    fn noisy_line_recovers_within_three_sigma() {
        let mut rng = Lcg(42);
        let sigma = deg2rad(0.5);
        let points: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = deg2rad(40.0 + 3.0 * i as f64);
                (x, 0.6 * x + deg2rad(5.0) + sigma * rng.next_gauss())
            })
            .collect();
        let fit = fit_affine(&points).unwrap();
        let se_slope = fit.report.params.iter().find(|p| p.0 == "se_slope").unwrap().1;
        let se_int = fit
            .report
            .params
            .iter()
            .find(|p| p.0 == "se_intercept_rad")
            .unwrap()
            .1;
        assert!((fit.map.slope() - 0.6).abs() < 3.0 * se_slope);
        assert!((fit.map.intercept_rad() - deg2rad(5.0)).abs() < 3.0 * se_int);
    }

    #[test]
    fn identical_x_is_degenerate() {
        let points = vec![(1.0, 2.0), (1.0, 3.0)];
        assert!(matches!(fit_affine(&points), Err(CalibrateError::Degenerate(_))));
    }

    fn synthetic_fsr(a: f64, b: f64, c: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let f = 10.0 * i as f64 / (n - 1) as f64;
                (f, a * (-b * f).exp() + c)
            })
            .collect()
    }

    #[test]
    fn exponential_recovers_noiseless_parameters() {
        let points = synthetic_fsr(80.0, 0.5, 2.0, 25);
        let (cal, report) = fit_exponential(&points).unwrap();
        assert!((cal.a_kohm - 80.0).abs() / 80.0 < 1e-3);
        assert!((cal.b_per_n - 0.5).abs() / 0.5 < 1e-3);
        assert!((cal.c_kohm - 2.0).abs() / 2.0 < 1e-3);
        assert!(report.converged);
    }

    #[test]
    fn constant_resistance_is_degenerate() {
        let points = vec![(0.0, 5.0), (1.0, 5.0), (2.0, 5.0), (3.0, 5.0)];
        assert!(matches!(
            fit_exponential(&points),
            Err(CalibrateError::Degenerate(_))
        ));
    }

    #[test]
    fn noisy_exponential_rmse_below_two_sigma() {
        let mut rng = Lcg(7);
        let mut points = synthetic_fsr(80.0, 0.5, 2.0, 40);
        let sigma_frac = 0.01;
        let mut sigma_abs = 0.0;
        for p in &mut points {
            let s = sigma_frac * p.1;
            sigma_abs += s * s;
            p.1 += s * rng.next_gauss();
        }
        sigma_abs = (sigma_abs / points.len() as f64).sqrt();
        let (_, report) = fit_exponential(&points).unwrap();
        assert!(report.rmse < 2.0 * sigma_abs, "rmse {} vs 2σ {}", report.rmse, 2.0 * sigma_abs);
    }

    #[test]
    fn comparison_ranks_exponential_first_on_exponential_data() {
        let points = synthetic_fsr(80.0, 0.5, 2.0, 25);
        let ranked = compare_fits(
            &points,
            &[FitFamily::Affine, FitFamily::Exponential, FitFamily::Power],
        );
        assert_eq!(ranked[0].family, FitFamily::Exponential);
    }

    #[test]
    fn comparison_ranks_affine_first_on_linear_data() {
        let points: Vec<(f64, f64)> = (1..=25).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        let ranked = compare_fits(
            &points,
            &[FitFamily::Affine, FitFamily::Exponential, FitFamily::Power],
        );
        assert_eq!(ranked[0].family, FitFamily::Affine);
    }

    #[test]
    fn three_points_skip_nonlinear_families() {
        let points = vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.1)];
        let ranked = compare_fits(
            &points,
            &[FitFamily::Affine, FitFamily::Exponential, FitFamily::Power],
        );
        assert_eq!(ranked[0].family, FitFamily::Affine);
        assert!(ranked[0].converged);
        for r in &ranked[1..] {
            assert!(!r.converged);
            assert!(!r.warnings.is_empty());
        }
    }

    #[test]
    fn ranking_is_invariant_under_y_scaling() {
        let points = synthetic_fsr(80.0, 0.5, 2.0, 25);
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, 1000.0 * y)).collect();
        let fams = [FitFamily::Affine, FitFamily::Exponential, FitFamily::Power];
        let a: Vec<FitFamily> = compare_fits(&points, &fams).iter().map(|r| r.family).collect();
        let b: Vec<FitFamily> = compare_fits(&scaled, &fams).iter().map(|r| r.family).collect();
        assert_eq!(a, b);
    }

    fn cal() -> FsrCalibration {
        FsrCalibration { a_kohm: 80.0, b_per_n: 0.5, c_kohm: 2.0, force_range_n: (0.0, 10.0) }
    }

    #[test]
    fn zero_force_at_full_resistance() {
        let f = estimate_force(&cal(), 82.0).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn unit_exponent_identity() {
        let c = cal();
        let r = c.a_kohm * (-1.0f64).exp() + c.c_kohm;
        let f = estimate_force(&c, r).unwrap();
        assert!((f - 1.0 / c.b_per_n).abs() < 1e-12);
    }

    #[test]
    fn force_estimate_matches_bisection_oracle() {
        let c = cal();
        let r = c.resistance(3.7);
        // independent bisection inverse on the forward model
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c.resistance(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let f = estimate_force(&c, r).unwrap();
        assert!((f - oracle).abs() < 1e-9);
    }

    #[test]
    fn round_trip_through_resistance_model() {
        let c = cal();
        for i in 1..20 {
            let f = 10.0 * i as f64 / 20.0;
            let back = estimate_force(&c, c.resistance(f)).unwrap();
            assert!((back - f).abs() < 1e-9);
        }
    }

    #[test]
    fn resistance_out_of_support_is_rejected() {
        assert!(estimate_force(&cal(), 1.9).is_err()); // below c
        assert!(estimate_force(&cal(), 90.0).is_err()); // above R(0)
    }

    #[test]
    fn constant_series_is_fixed_point() {
        let series: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 3.5)).collect();
        let out = moving_average(&series, 20).unwrap();
        assert_eq!(out.len(), series.len());
        for (a, b) in series.iter().zip(&out) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn impulse_response_is_a_plateau() {
        let mut series: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, 0.0)).collect();
        series[50].1 = 1.0;
        let out = moving_average(&series, 20).unwrap();
        let covered: Vec<f64> = out.iter().map(|p| p.1).filter(|&v| v > 0.0).collect();
        assert_eq!(covered.len(), 20);
        for v in covered {
            assert!((v - 1.0 / 20.0).abs() < 1e-15);
        }
    }

    #[test]
    fn filter_reduces_white_noise_variance() {
        let mut rng = Lcg(1234);
        let series: Vec<(f64, f64)> = (0..500).map(|i| (i as f64, rng.next_gauss())).collect();
        let out = moving_average(&series, 20).unwrap();
        let var = |s: &[(f64, f64)]| {
            let m = s.iter().map(|p| p.1).sum::<f64>() / s.len() as f64;
            s.iter().map(|p| (p.1 - m).powi(2)).sum::<f64>() / s.len() as f64
        };
        assert!(var(&out) < var(&series));
    }

    #[test]
    fn mean_preserved_on_constant_padded_input() {
        let mut rng = Lcg(9);
        let w = 20usize;
        let pad = 1.25f64;
        let mut series: Vec<(f64, f64)> = Vec::new();
        for i in 0..200 {
            let y = if i < w || i >= 200 - w { pad } else { pad + rng.next_gauss() };
            series.push((i as f64, y));
        }
        let out = moving_average(&series, w).unwrap();
        let mean = |s: &[(f64, f64)]| s.iter().map(|p| p.1).sum::<f64>() / s.len() as f64;
        assert!((mean(&series) - mean(&out)).abs() < 1e-12);
    }

    #[test]
    fn instantaneous_step_has_zero_delay_and_rise() {
        let series = vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)];
        let m = step_metrics(&series, 0.0, 1.0).unwrap();
        assert_eq!(m.delay_time_s, 0.0);
        assert_eq!(m.rise_time_s, 0.0);
    }

    #[test]
    fn first_order_with_dead_time_matches_analytics() {
        // y(t) = 0 for t < 0.05, then 1 − exp(−(t−0.05)/0.1)
        let dt = 0.001;
        let series: Vec<(f64, f64)> = (0..1000)
            .map(|i| {
                let t = i as f64 * dt;
                let y = if t < 0.05 { 0.0 } else { 1.0 - (-(t - 0.05) / 0.1).exp() };
                (t, y)
            })
            .collect();
        let m = step_metrics(&series, 0.0, 1.0).unwrap();
        let expect_delay = 0.05 + 0.1 * (10.0f64 / 9.0).ln();
        let expect_rise = 0.1 * 9.0f64.ln();
        assert!((m.delay_time_s - expect_delay).abs() < dt, "delay {}", m.delay_time_s);
        assert!((m.rise_time_s - expect_rise).abs() < dt, "rise {}", m.rise_time_s);
    }

    #[test]
    fn falling_step_is_handled_symmetrically() {
        let dt = 0.001;
        let series: Vec<(f64, f64)> = (0..1000)
            .map(|i| {
                let t = i as f64 * dt;
                let y = if t < 0.05 { 1.0 } else { (-(t - 0.05) / 0.1).exp() };
                (t, y)
            })
            .collect();
        let m = step_metrics(&series, 1.0, 0.0).unwrap();
        let expect_delay = 0.05 + 0.1 * (10.0f64 / 9.0).ln();
        assert!((m.delay_time_s - expect_delay).abs() < dt);
    }

    #[test]
    fn step_that_never_rises_reports_absent_metric() {
        let series: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.01, 0.02)).collect();
        assert!(matches!(
            step_metrics(&series, 0.0, 1.0),
            Err(CalibrateError::ThresholdNotReached { threshold: "10%" })
        ));
    }

    #[test]
    fn reduction_fixtures_match_reported_figures() {
        let r = percent_reduction(1.0, 0.7063).unwrap();
        assert!((r - 29.37).abs() < 1e-9);
        let r = percent_reduction(1.0, 0.4858).unwrap();
        assert!((r - 51.42).abs() < 1e-9);
        assert_eq!(percent_reduction(2.0, 2.0).unwrap(), 0.0);
        assert!(percent_reduction(0.0, 1.0).is_err());
    }
}
