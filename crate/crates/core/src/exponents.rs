//! Strauss exponent, `γ(n, p)` and the lifespan law that applies to each
//! `(n, p, ∫g)` case in the blow-up range `1 < p ≤ p_0(n)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::roots;
use crate::scalar::Real;

/// `γ(n, p) = 1 + (n+1)p/2 - (n-1)p²/2`.
pub fn gamma<T: Real>(n: u32, p: T) -> Result<T> {
    check_dimension(n, 1)?;
    check_power(p)?;
    let n = T::lit(f64::from(n));
    let half = T::lit(0.5);
    let one = T::one();
    Ok(one + (n + one) * half * p - (n - one) * half * p * p)
}

/// Strauss exponent `p_0(n) = (n + 1 + √(n² + 10n - 7)) / (2(n - 1))`, the
/// positive root of `γ(n, ·)`.
pub fn strauss_exponent<T: Real>(n: u32) -> Result<T> {
    check_dimension(n, 2)?;
    let nf = T::lit(f64::from(n));
    let one = T::one();
    let disc = nf * nf + T::lit(10.0) * nf - T::lit(7.0);
    Ok((nf + one + disc.sqrt()) / (T::lit(2.0) * (nf - one)))
}

/// `p_0(n)` located by bisection on `γ(n, ·)` instead of the closed form.
///
/// `γ(n, ·)` is positive at `p = 1` and eventually negative, with a single
/// sign change above 1, so the doubling bracket always succeeds.
pub fn strauss_exponent_by_bisection<T: Real>(n: u32) -> Result<T> {
    check_dimension(n, 2)?;
    let g = |p: T| {
        -(T::one() + T::lit(f64::from(n) + 1.0) * T::lit(0.5) * p - T::lit(f64::from(n) - 1.0) * T::lit(0.5) * p * p)
    };
    roots::increasing_root(g, T::one(), T::lit(2.0), T::lit(1e-14))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    N1GmomNonzero,
    N1GmomZero,
    N2FirstCase,
    GenericSubcritical,
    Critical,
    D2P2GmomNonzero,
    D2P2GmomZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawKind<T> {
    /// `T(ε) ~ C ε^{-exponent}`.
    PowerLaw { exponent: T },
    /// `T(ε) ~ exp(C ε^{-rate_exponent})`.
    ExponentialLaw { rate_exponent: T },
    /// `T(ε) ~ a(ε)` with `a` the root of `a²ε² log(1 + a) = 1`.
    TwoDimP2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanLaw<T> {
    pub kind: LawKind<T>,
    pub case_tag: CaseTag,
}

impl<T: Real> LifespanLaw<T> {
    /// Exponent a power-law fit of `log T` on `log(1/ε)` should recover, if
    /// the law is a power law.
    pub fn power_exponent(&self) -> Option<T> {
        match self.kind {
            LawKind::PowerLaw { exponent } => Some(exponent),
            _ => None,
        }
    }
}

/// Resolves the lifespan law for dimension `n`, power `p` and the vanishing
/// (or not) of `∫ g`.
///
/// `p` within a relative `1e-9` of `p_0(n)` is treated as critical; `p`
/// above that is rejected since small data then exist globally.
pub fn predicted_lifespan_law<T: Real>(n: u32, p: T, g_moment_is_zero: bool) -> Result<LifespanLaw<T>> {
    check_dimension(n, 1)?;
    check_power(p)?;
    let one = T::one();
    let two = T::lit(2.0);
    let rate = p * (p - one);

    if n == 1 {
        let (exponent, case_tag) = if g_moment_is_zero {
            // γ(1, p) = p + 1
            (rate / gamma(1, p)?, CaseTag::N1GmomZero)
        } else {
            ((p - one) / two, CaseTag::N1GmomNonzero)
        };
        return Ok(LifespanLaw { kind: LawKind::PowerLaw { exponent }, case_tag });
    }

    let p0 = strauss_exponent::<T>(n)?;
    let crit_tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) * p0;
    if (p - p0).abs() <= crit_tol {
        return Ok(LifespanLaw { kind: LawKind::ExponentialLaw { rate_exponent: rate }, case_tag: CaseTag::Critical });
    }
    if p > p0 {
        return Err(domain(format!(
            "p = {p} exceeds the Strauss exponent p_0({n}) = {p0}: small data exist globally, no lifespan law"
        )));
    }

    let p2_tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
    if n == 2 && (p - two).abs() <= p2_tol {
        let law = if g_moment_is_zero {
            LifespanLaw { kind: LawKind::PowerLaw { exponent: one }, case_tag: CaseTag::D2P2GmomZero }
        } else {
            LifespanLaw { kind: LawKind::TwoDimP2, case_tag: CaseTag::D2P2GmomNonzero }
        };
        return Ok(law);
    }
    if n == 2 && p < two && !g_moment_is_zero {
        return Ok(LifespanLaw {
            kind: LawKind::PowerLaw { exponent: (p - one) / (T::lit(3.0) - p) },
            case_tag: CaseTag::N2FirstCase,
        });
    }
    Ok(LifespanLaw { kind: LawKind::PowerLaw { exponent: rate / gamma(n, p)? }, case_tag: CaseTag::GenericSubcritical })
}

/// Unique `a > 0` with `a² ε² log(1 + a) = 1`.
pub fn solve_a<T: Real>(eps: T) -> Result<T> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(domain(format!("eps must be positive and finite, got {eps}")));
    }
    let e2 = eps * eps;
    let residual = move |a: T| a * a * e2 * a.ln_1p() - T::one();
    // The residual is strictly increasing from -1 at a = 0.
    roots::increasing_root(residual, T::zero(), T::one(), T::lit(1e-14))
}

/// `|a² ε² log(1 + a) - 1|`.
pub fn solve_a_residual<T: Real>(eps: T, a: T) -> T {
    (a * a * eps * eps * a.ln_1p() - T::one()).abs()
}

fn check_dimension(n: u32, min: u32) -> Result<()> {
    if n < min {
        return Err(domain(format!("dimension n = {n} must be at least {min}")));
    }
    Ok(())
}

fn check_power<T: Real>(p: T) -> Result<()> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(domain(format!("power p = {p} must be a finite number above 1")));
    }
    Ok(())
}
