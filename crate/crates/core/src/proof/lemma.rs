//! Numerical estimate of the lemma constant `M(n, p, g)`.
//!
//! The free wave `ε w` with data `(0, εg)` is a lower bound for `u` when
//! `f ≡ 0, g ≥ 0`. Putting it once through the integral inequality gives, at
//! each `(r, t) ∈ Σ = {3δ ≤ t - r ≤ r}`,
//!
//! ```text
//! M(r,t) = (t-r)^q / (2π^{3-n}) ∬_{R(r,t)} λ^{(n-1)/2} |w(λ,τ)|^p dλ dτ
//! ```
//!
//! (the `ε^p` and `r^{-(n-1)/2}` factors cancel). The integral is computed in
//! characteristic variables `α = τ + λ`, `β = τ - λ` with the exact Jacobian
//! `dλ dτ = dα dβ / 2`; `R(r,t)` becomes `3δ ≤ β ≤ t - r`,
//! `2(t-r) + β ≤ α ≤ t + r`. The certified constant is `0.9 · min` over the
//! sample grid, so it is conditional on that grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::free::{free_wave_2d, free_wave_3d};
use crate::profile::Profile;
use crate::quadrature::Simpson;
use crate::scalar::Real;

pub const SAFETY_FACTOR: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MEstimate<T> {
    /// Certified constant, `SAFETY_FACTOR · infimum`.
    pub m: T,
    pub infimum: T,
    pub argmin: (T, T),
    /// `((r, t), M(r, t))` for every grid point, in input order.
    pub values: Vec<((T, T), T)>,
    pub safety_factor: T,
}

/// Default grid: `t - r ∈ {1.5, 2, 4, 8} · 3δ` crossed with `r / (t - r) ∈ {1, 2, 4}`.
pub fn default_m_grid<T: Real>(delta: T) -> Vec<(T, T)> {
    let mut grid = Vec::new();
    for f in [1.5, 2.0, 4.0, 8.0] {
        let d = T::lit(3.0 * f) * delta;
        for rho in [1.0, 2.0, 4.0] {
            let r = d * T::lit(rho);
            grid.push((r, r + d));
        }
    }
    grid
}

pub fn estimate_m<T: Real>(n: u32, p: T, g: &Profile<T>, delta: T, grid: &[(T, T)]) -> Result<MEstimate<T>> {
    if n != 2 && n != 3 {
        return Err(domain(format!("the lemma holds for n = 2, 3, not {n}")));
    }
    if !(p > T::one()) {
        return Err(domain("p must exceed 1"));
    }
    g.validate()?;
    if !g.is_radial() || !g.is_nonnegative() {
        return Err(precondition("the lemma needs radial data with g ≥ 0"));
    }
    if !(delta > T::zero()) {
        return Err(domain("delta must be positive"));
    }
    if !(g.eval(T::lit(2.0) * delta) > T::zero()) {
        return Err(precondition(format!("g(2δ) = g({}) must be positive", T::lit(2.0) * delta)));
    }
    if grid.is_empty() {
        return Err(precondition("empty sample grid"));
    }
    let three_delta = T::lit(3.0) * delta;
    for &(r, t) in grid {
        let d = t - r;
        if !(d >= three_delta && d <= r) {
            return Err(precondition(format!("grid point ({r}, {t}) lies outside Σ")));
        }
    }

    let values: Vec<((T, T), T)> =
        grid.par_iter().map(|&(r, t)| Ok(((r, t), m_at(n, p, g, three_delta, r, t)?))).collect::<Result<_>>()?;

    let (argmin, infimum) =
        values.iter().copied().fold(((T::nan(), T::nan()), T::infinity()), |acc, v| if v.1 < acc.1 { v } else { acc });
    if !(infimum > T::zero()) {
        return Err(domain(format!(
            "lemma constant infimum {infimum} at {argmin:?} is not positive: grid touches the boundary of Σ or g is too small"
        )));
    }
    let safety = T::lit(SAFETY_FACTOR);
    Ok(MEstimate { m: safety * infimum, infimum, argmin, values, safety_factor: safety })
}

fn m_at<T: Real>(n: u32, p: T, g: &Profile<T>, three_delta: T, r: T, t: T) -> Result<T> {
    let two = T::lit(2.0);
    let nf = T::lit(f64::from(n));
    let half_dim = (nf - T::one()) / two;
    let q = half_dim * p - (nf + T::one()) / two;
    let d = t - r;
    let inner_w = Simpson::with_rel_tol(T::lit(1e-7)).panels(4).depths(1, 24);

    let w = |lambda: T, tau: T| -> T {
        let v = if n == 3 { free_wave_3d(g, lambda, tau) } else { free_wave_2d(g, lambda, tau, &inner_w) };
        v.unwrap_or_else(|_| T::nan())
    };

    let quad = Simpson::with_rel_tol(T::lit(1e-5)).panels(8).depths(1, 24);
    let est = quad.integrate_2d(
        &quad,
        |beta, alpha| {
            let lambda = (alpha - beta) / two;
            let tau = (alpha + beta) / two;
            lambda.powf(half_dim) * w(lambda, tau).abs().powf(p)
        },
        three_delta,
        d,
        |beta| (two * d + beta, t + r),
    );
    if !est.value.is_finite() {
        return Err(Error::NumericalFailure(format!("lemma integral is not finite at ({r}, {t})")));
    }
    // prefactor 1/(2π^{3-n}) and Jacobian 1/2
    let prefactor = T::one() / (T::lit(4.0) * T::PI().powf(T::lit(3.0) - nf));
    Ok(d.powf(q) * prefactor * est.value)
}
