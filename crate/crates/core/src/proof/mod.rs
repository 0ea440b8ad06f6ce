//! The slicing iteration behind the upper lifespan bound at the critical
//! power `p = p_0(n)`, `n = 2, 3`.
//!
//! Starting from the lower bound
//!
//! ```text
//! ũ(r,t) ≥ C_j r^{-(n-1)/2} (t-r)^{-q} (log((t-r)/(l_j k)))^{a_j}   on Σ_j
//! Σ_j = { l_j k ≤ t - r ≤ r },   q = (n-1)p/2 - (n+1)/2,
//! ```
//!
//! each step feeds the bound back into the integral inequality for `ũ` and
//! gets the next one on the smaller domain `Σ_{j+1}` with
//! `C_{j+1} = N C_j^p / (2p)^j`. Shrinking `l_j ↗ 2` slowly is what keeps a
//! fixed fraction `1 - l_j/l_{j+1} ≥ 2^{-(j+2)}` of the log integral at every
//! step. This module computes all the constants and sequences; [`verify`]
//! checks the step inequalities by quadrature and [`lemma`] estimates the
//! initial constant `M`.

pub mod lemma;
pub mod verify;

use num_traits::{pow, Num};
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::exponents::strauss_exponent;
use crate::scalar::Real;

pub use lemma::{default_m_grid, estimate_m, MEstimate};
pub use verify::{
    default_step_samples, verify_beta_slicing_bound, verify_iteration_step, BetaSlicingReport, PointCheck, StepVerdict,
    VerdictStatus, STEP_TOLERANCE,
};

/// Raw `C_j` is only materialised when `|log C_j|` is below this.
pub const MAX_MATERIALISED_LOG: f64 = 700.0;

/// `l_j = Σ_{i=0}^{j} 2^{-i} = 2 - 2^{-j}`.
///
/// Generic over any exact field; with [`crate::Rational`] the identities
/// `l_j < 2` and `1 - l_j/l_{j+1} = 1/(2^{j+1} l_{j+1})` hold without rounding.
pub fn slicing_l<T: Num + Clone>(j: u32) -> T {
    let two = T::one() + T::one();
    two.clone() - T::one() / pow(two, j as usize)
}

/// `a_j = (p^{j-1} - 1)/(p - 1)` for `j ≥ 1`.
pub fn slicing_a<T: Num + Clone + PartialOrd>(j: u32, p: T) -> Result<T> {
    if j < 1 {
        return Err(precondition("a_j is defined for j ≥ 1"));
    }
    if p <= T::one() {
        return Err(domain("a_j needs p > 1"));
    }
    Ok((pow(p.clone(), (j - 1) as usize) - T::one()) / (p - T::one()))
}

/// Exponent of `2p` in the closed form of `C_{j+1}`:
/// `j + p(j-1) + ⋯ + p^{j-1} = Σ_{i=0}^{j-1} (j-i) p^i`.
pub fn exponent_sum<T: Num + Clone>(j: u32, p: T) -> T {
    let mut acc = T::zero();
    let mut power = T::one();
    for i in 0..j {
        let weight = (0..(j - i)).fold(T::zero(), |w, _| w + T::one());
        acc = acc + weight * power.clone();
        power = power * p.clone();
    }
    acc
}

/// `j/p^{j-1} + (j-1)/p^{j-2} + ⋯ + 1 = Σ_{m=1}^{j} m / p^{m-1}`, increasing to `S_p`.
pub fn s_p_partial_sum<T: Num + Clone>(j: u32, p: T) -> T {
    let mut acc = T::zero();
    let mut inv_power = T::one();
    let mut m = T::zero();
    for _ in 0..j {
        m = m + T::one();
        acc = acc + m.clone() * inv_power.clone();
        inv_power = inv_power / p.clone();
    }
    acc
}

/// `S_p = Σ_{m≥1} m/p^{m-1} = (p/(p-1))²`.
pub fn s_p<T: Real>(p: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(domain(format!("S_p diverges for p = {p} ≤ 1")));
    }
    let r = p / (p - T::one());
    Ok(r * r)
}

/// Every constant entering the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicingConstants<T> {
    pub n: u32,
    pub p: T,
    pub delta: T,
    /// `k = 3δ`.
    pub k: T,
    /// Initial constant of the lemma, `C_1 = M ε^p`.
    pub m: T,
    /// `2^{-2} π^{n-3}`.
    pub c_geom: T,
    /// `N = 2^{-2} 3^{(n-1)(1-p)/2} (p-1) C_geom`.
    pub n_coeff: T,
    pub s_p: T,
    /// `A = N^{-1} (2p)^{S_p(p-1)/p} M^{-(p-1)}`, so that `log T ≤ 2A ε^{-p(p-1)}`.
    pub a_coeff: T,
}

impl<T: Real> SlicingConstants<T> {
    /// Constants at the critical power `p = p_0(n)`.
    pub fn new(n: u32, delta: T, m: T) -> Result<Self> {
        let p = strauss_exponent::<T>(n)?;
        Self::build(n, p, delta, m)
    }

    /// As [`SlicingConstants::new`] with an explicitly supplied power, which
    /// must equal `p_0(n)` to a relative `1e-9`.
    pub fn with_power(n: u32, p: T, delta: T, m: T) -> Result<Self> {
        let p0 = strauss_exponent::<T>(n)?;
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        if (p - p0).abs() > tol * p0 {
            return Err(domain(format!("the slicing iteration needs p = p_0({n}) = {p0}, got {p}")));
        }
        Self::build(n, p0, delta, m)
    }

    fn build(n: u32, p: T, delta: T, m: T) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(domain(format!("the slicing iteration covers n = 2, 3, not {n}")));
        }
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(domain(format!("delta must be positive, got {delta}")));
        }
        if !(m > T::zero()) || !m.is_finite() {
            return Err(domain(format!("M must be positive, got {m}")));
        }
        let one = T::one();
        let quarter = T::lit(0.25);
        let nf = T::lit(f64::from(n));
        let c_geom = quarter * T::PI().powf(nf - T::lit(3.0));
        let n_coeff = quarter * T::lit(3.0).powf((nf - one) * (one - p) / T::lit(2.0)) * (p - one) * c_geom;
        let s_p = s_p(p)?;
        let a_coeff = (T::lit(2.0) * p).powf(s_p * (p - one) / p) * m.powf(-(p - one)) / n_coeff;
        Ok(SlicingConstants { n, p, delta, k: T::lit(3.0) * delta, m, c_geom, n_coeff, s_p, a_coeff })
    }

    /// `q = (n-1)p/2 - (n+1)/2`, the power of `(t - r)` in the bounds.
    pub fn q(&self) -> T {
        let nf = T::lit(f64::from(self.n));
        (nf - T::one()) * self.p / T::lit(2.0) - (nf + T::one()) / T::lit(2.0)
    }

    /// Lifespan constant `C = 2A`.
    pub fn c_final(&self) -> T {
        T::lit(2.0) * self.a_coeff
    }

    /// `p(p-1)`, the rate exponent of the lifespan bound.
    pub fn rate_exponent(&self) -> T {
        self.p * (self.p - T::one())
    }
}

/// One rung of the iteration ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationState<T> {
    pub j: u32,
    pub l_j: T,
    pub a_j: T,
    /// Natural log of `C_j`.
    pub log_c: T,
}

impl<T: Real> IterationState<T> {
    /// `C_j` itself, when it fits comfortably in the floating point range.
    pub fn c_value(&self) -> Option<T> {
        (self.log_c.abs() < T::lit(MAX_MATERIALISED_LOG)).then(|| self.log_c.exp())
    }
}

/// `log C_1 = log M + p log ε`, `log C_{j+1} = log N + p log C_j - j log(2p)`.
pub fn iterate_log_c<T: Real>(j_max: u32, consts: &SlicingConstants<T>, eps: T) -> Result<Vec<IterationState<T>>> {
    if j_max < 1 {
        return Err(precondition("j_max must be at least 1"));
    }
    check_eps(eps)?;
    let p = consts.p;
    let ln_n = consts.n_coeff.ln();
    let ln_2p = (T::lit(2.0) * p).ln();
    let mut log_c = consts.m.ln() + p * eps.ln();
    let mut out = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        out.push(IterationState { j, l_j: slicing_l(j), a_j: slicing_a(j, p)?, log_c });
        log_c = ln_n + p * log_c - T::lit(f64::from(j)) * ln_2p;
    }
    Ok(out)
}

/// Closed form
/// `C_{j+1} = N^{(p^j-1)/(p-1)} (Mε^p)^{p^j} / (2p)^{j + p(j-1) + ⋯ + p^{j-1}}`,
/// evaluated in log space for index `j + 1 = index ≥ 1`.
pub fn closed_form_log_c<T: Real>(index: u32, consts: &SlicingConstants<T>, eps: T) -> Result<T> {
    if index < 1 {
        return Err(precondition("C_j is defined for j ≥ 1"));
    }
    check_eps(eps)?;
    let p = consts.p;
    let j = index - 1;
    let pj = p.powi(j as i32);
    let n_power = (pj - T::one()) / (p - T::one());
    Ok(n_power * consts.n_coeff.ln() + pj * (consts.m.ln() + p * eps.ln())
        - exponent_sum(j, p) * (T::lit(2.0) * p).ln())
}

/// `I(r,t) = log N^{1/(p-1)} + log Mε^p - log (2p)^{S_p/p} + log (log((t-r)/(2k)))^{1/(p-1)}`.
///
/// Once `I > 0` at some point of `Σ_∞ = {2k ≤ t - r ≤ r}`, the lower bounds
/// grow like `exp(I p^j)` and no classical solution can reach that point.
pub fn blowup_functional<T: Real>(r: T, t: T, consts: &SlicingConstants<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    let d = t - r;
    let two_k = T::lit(2.0) * consts.k;
    if !(d >= two_k && d <= r) {
        return Err(precondition(format!("(r, t) = ({r}, {t}) lies outside Σ_∞ = {{{two_k} ≤ t - r ≤ r}}")));
    }
    let inner = (d / two_k).ln();
    if !(inner > T::zero()) {
        return Err(domain(format!("log((t - r)/(2k)) = {inner} ≤ 0: the double logarithm is undefined")));
    }
    let p = consts.p;
    let pm1 = p - T::one();
    Ok(consts.n_coeff.ln() / pm1 + consts.m.ln() + p * eps.ln() - consts.s_p / p * (T::lit(2.0) * p).ln()
        + inner.ln() / pm1)
}

/// `log t*` for `t* = 4k exp(A ε^{-p(p-1)})`: on the ray `t = 2r`, `I > 0`
/// exactly when `t > t*`.
pub fn ln_blowup_time_threshold<T: Real>(eps: T, consts: &SlicingConstants<T>) -> Result<T> {
    check_eps(eps)?;
    Ok((T::lit(4.0) * consts.k).ln() + consts.a_coeff * eps.powf(-consts.rate_exponent()))
}

/// `ε_0` from `4k = exp(A ε_0^{-p(p-1)})`, i.e. `ε_0 = (A / log 4k)^{1/(p(p-1))}`.
pub fn epsilon_zero<T: Real>(consts: &SlicingConstants<T>) -> Result<T> {
    let four_k = T::lit(4.0) * consts.k;
    if !(four_k > T::one()) {
        return Err(domain(format!(
            "4k = {four_k} ≤ 1 (k = {}): log(4k) ≤ 0 and ε_0 has no positive solution",
            consts.k
        )));
    }
    Ok((consts.a_coeff / four_k.ln()).powf(T::one() / consts.rate_exponent()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanBound<T> {
    pub eps: T,
    pub eps_zero: T,
    /// `C = 2A`.
    pub c_final: T,
    /// `log T̄ = C ε^{-p(p-1)}`.
    pub ln_bound: T,
    /// `T̄` itself; `None` when it overflows.
    pub bound: Option<T>,
}

/// `T(ε) ≤ exp(C ε^{-p(p-1)})` for `0 < ε ≤ ε_0`.
pub fn lifespan_upper_bound<T: Real>(eps: T, consts: &SlicingConstants<T>) -> Result<LifespanBound<T>> {
    check_eps(eps)?;
    let eps_zero = epsilon_zero(consts)?;
    if eps > eps_zero * (T::one() + T::epsilon() * T::lit(4.0)) {
        return Err(domain(format!("eps = {eps} exceeds ε_0 = {eps_zero}: the bound is only proven for ε ≤ ε_0")));
    }
    let c_final = consts.c_final();
    let ln_bound = c_final * eps.powf(-consts.rate_exponent());
    let bound = ln_bound.exp();
    Ok(LifespanBound { eps, eps_zero, c_final, ln_bound, bound: bound.is_finite().then_some(bound) })
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(domain(format!("eps must be positive and finite, got {eps}")));
    }
    Ok(())
}
