use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::error::{domain, Result};
use crate::exponents::{predicted_lifespan_law, solve_a, LawKind};
use crate::scalar::Real;

pub const MIN_FIT_POINTS: usize = 4;
/// Relative gap allowed between a fitted and a predicted power-law exponent.
pub const POWER_LAW_TOLERANCE: f64 = 0.2;
pub const CRITICAL_R2_THRESHOLD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct LifespanPoint<T> {
    pub eps: T,
    pub t_h: T,
    pub uncertainty: T,
}

/// Unflagged records as fit points.
pub fn points_from_records<T: Real>(records: &[SweepRecord<T>]) -> Vec<LifespanPoint<T>> {
    records
        .iter()
        .filter(|r| !r.flagged())
        .filter_map(|r| Some(LifespanPoint { eps: r.eps, t_h: r.t_h?, uncertainty: r.uncertainty? }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `log T = θ log(1/ε) + b`.
    PowerLaw,
    /// `log T = C ε^{-p(p-1)} + b`.
    CriticalExponential,
    /// `log T = s log a(ε) + b`, with `s` expected near 1.
    LogA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct FitReport<T> {
    pub model: FitModel,
    /// Slope of the regression: `θ̂`, `Ĉ` or `ŝ`.
    pub fitted: T,
    pub intercept: T,
    pub r_squared: T,
    pub predicted: Option<T>,
    pub relative_gap: Option<T>,
    /// Relative tolerance for slope models, r² threshold for the critical model.
    pub tolerance: T,
    pub verdict: Verdict,
    pub points: usize,
    /// Residuals in the order the points were given.
    pub residuals: Vec<T>,
}

struct Ols<T> {
    slope: T,
    intercept: T,
    r_squared: T,
    residuals: Vec<T>,
}

fn ols<T: Real>(x: &[T], y: &[T]) -> Result<Ols<T>> {
    let n = x.len();
    if n < MIN_FIT_POINTS {
        return Err(domain(format!("a fit needs at least {MIN_FIT_POINTS} points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(domain("fit data must be finite"));
    }
    let nn = T::from_count(n);
    let mx = x.iter().copied().sum::<T>() / nn;
    let my = y.iter().copied().sum::<T>() / nn;
    let sxx: T = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let spread = x.iter().fold(T::zero(), |m, &v| m.max((v - mx).abs()));
    if !(spread > T::epsilon() * T::lit(64.0) * mx.abs().max(T::one())) {
        return Err(domain("abscissas are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<T> = x.iter().zip(y).map(|(&a, &b)| b - (intercept + slope * a)).collect();
    let ss_res: T = residuals.iter().map(|&r| r * r).sum();
    let ss_tot: T = y.iter().map(|&b| (b - my) * (b - my)).sum();
    let r_squared = if ss_tot > T::zero() { T::one() - ss_res / ss_tot } else { T::one() };
    Ok(Ols { slope, intercept, r_squared: r_squared.max(T::zero()).min(T::one()), residuals })
}

fn log_lifespans<T: Real>(points: &[LifespanPoint<T>]) -> Result<Vec<T>> {
    points
        .iter()
        .map(|p| {
            if p.t_h > T::zero() && p.eps > T::zero() {
                Ok(p.t_h.ln())
            } else {
                Err(domain(format!("fit points need eps > 0 and T_h > 0, got ({}, {})", p.eps, p.t_h)))
            }
        })
        .collect()
}

fn slope_report<T: Real>(model: FitModel, fit: Ols<T>, predicted: T, tolerance: T, n: usize) -> FitReport<T> {
    let gap = (fit.slope - predicted).abs() / predicted.abs();
    FitReport {
        model,
        fitted: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        predicted: Some(predicted),
        relative_gap: Some(gap),
        tolerance,
        verdict: if gap <= tolerance { Verdict::Pass } else { Verdict::Fail },
        points: n,
        residuals: fit.residuals,
    }
}

/// Least squares of `log T_h` on `log(1/ε)`.
pub fn fit_power_law<T: Real>(points: &[LifespanPoint<T>], predicted: T, tolerance: T) -> Result<FitReport<T>> {
    if !(predicted != T::zero()) || !predicted.is_finite() {
        return Err(domain("predicted exponent must be finite and nonzero"));
    }
    let y = log_lifespans(points)?;
    let x: Vec<T> = points.iter().map(|p| -p.eps.ln()).collect();
    Ok(slope_report(FitModel::PowerLaw, ols(&x, &y)?, predicted, tolerance, points.len()))
}

/// Least squares of `log T_h` on `ε^{-p(p-1)}`. Passes when the slope is
/// positive and `r² ≥ r2_threshold`.
pub fn fit_critical_law<T: Real>(points: &[LifespanPoint<T>], p: T, r2_threshold: T) -> Result<FitReport<T>> {
    if !(p > T::one()) {
        return Err(domain(format!("p = {p} must exceed 1")));
    }
    let y = log_lifespans(points)?;
    let rate = p * (p - T::one());
    let x: Vec<T> = points.iter().map(|pt| pt.eps.powf(-rate)).collect();
    let fit = ols(&x, &y)?;
    let pass = fit.slope > T::zero() && fit.r_squared >= r2_threshold;
    Ok(FitReport {
        model: FitModel::CriticalExponential,
        fitted: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        predicted: None,
        relative_gap: None,
        tolerance: r2_threshold,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        points: points.len(),
        residuals: fit.residuals,
    })
}

/// Least squares of `log T_h` on `log a(ε)`, `a²ε² log(1 + a) = 1`; the
/// predicted slope is 1.
pub fn fit_log_a<T: Real>(points: &[LifespanPoint<T>], tolerance: T) -> Result<FitReport<T>> {
    let y = log_lifespans(points)?;
    let x = points.iter().map(|p| solve_a(p.eps).map(|a| a.ln())).collect::<Result<Vec<T>>>()?;
    Ok(slope_report(FitModel::LogA, ols(&x, &y)?, T::one(), tolerance, points.len()))
}

/// Power-law exponent the exponent tables predict, `None` for the
/// critical and two-dimensional `p = 2` laws.
pub fn predicted_exponent<T: Real>(n: u32, p: T, moment: T) -> Result<Option<T>> {
    let law = predicted_lifespan_law(n, p, moment == T::zero())?;
    Ok(match law.kind {
        LawKind::PowerLaw { exponent } => Some(exponent),
        _ => None,
    })
}

/// CSV with header `eps,T_h,uncertainty`.
pub fn write_points_csv<T: Real, W: Write>(points: &[LifespanPoint<T>], mut out: W) -> Result<()> {
    writeln!(out, "eps,T_h,uncertainty")?;
    for p in points {
        writeln!(out, "{},{},{}", p.eps, p.t_h, p.uncertainty)?;
    }
    Ok(())
}
