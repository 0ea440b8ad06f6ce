//! Quadrature replay of one induction step.
//!
//! For a sample `(r, t) ∈ Σ_{j+1}` with `d = t - r` the step claims
//!
//! ```text
//! C_geom r^{-(n-1)/2} ∫_{l_j k}^{d} dβ ∫_{2d+β}^{3d} (α-β)^{(n-1)/2} [B_j((α-β)/2, (α+β)/2)]^p dα
//!     ≥ C_{j+1} r^{-(n-1)/2} d^{-q} (log(d/(l_{j+1} k)))^{a_{j+1}}
//! ```
//!
//! where `B_j` is the j-th lower bound. Both sides carry `C_j^p`, and the
//! log factors reach powers in the hundreds by `j = 5`, so everything is
//! evaluated after dividing by `C_j^p · L^{p a_j} · r^{-(n-1)/2}`,
//! `L = log(d/(l_j k))`. The divided-out factor is reported as `scale_ln`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iterate_log_c, slicing_a, slicing_l, SlicingConstants};
use crate::error::{precondition, Result};
use crate::quadrature::Simpson;
use crate::scalar::Real;

/// One-sided tolerance of the step check: pass iff computed ≥ claimed·(1 - tol).
pub const STEP_TOLERANCE: f64 = 1e-3;
/// One-sided tolerance of the β-slicing check.
pub const SLICING_TOLERANCE: f64 = 1e-6;
pub const MIN_SAMPLES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Passed,
    Failed,
    /// Quadrature error too large to decide.
    Inconclusive,
}

impl VerdictStatus {
    /// Conjunction with inconclusive dominating a pass but not a failure.
    fn merge(self, other: VerdictStatus) -> VerdictStatus {
        use VerdictStatus::*;
        match (self, other) {
            (Failed, _) | (_, Failed) => Failed,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCheck<T> {
    pub r: T,
    pub t: T,
    /// Quadrature value of the double integral, in units of `exp(scale_ln)`.
    pub computed_lower: T,
    /// The (j+1)-th bound, same units.
    pub claimed: T,
    pub scale_ln: T,
    /// Absolute quadrature error estimate, same units.
    pub error_estimate: T,
    pub status: VerdictStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepVerdict<T> {
    pub j: u32,
    pub n: u32,
    pub p: T,
    pub eps: T,
    /// `M` used for `C_1 = M ε^p`; the check itself is independent of it.
    pub m: T,
    pub tolerance: T,
    pub points: Vec<PointCheck<T>>,
    pub status: VerdictStatus,
    pub passed: bool,
    /// Largest relative quadrature error over the samples.
    pub quadrature_error_estimate: T,
}

/// Default deterministic sample set in `Σ_{j+1}`: `t - r = f · l_{j+1} k`
/// and `r = ρ (t - r)` for `(f, ρ)` in
/// `(1.25, 1), (2, 1), (4, 1.5), (8, 2), (16, 3)`. The first two lie on
/// `t = 2r`.
pub fn default_step_samples<T: Real>(j: u32, k: T) -> Vec<(T, T)> {
    let base = slicing_l::<T>(j + 1) * k;
    [(1.25, 1.0), (2.0, 1.0), (4.0, 1.5), (8.0, 2.0), (16.0, 3.0)]
        .iter()
        .map(|&(f, rho)| {
            let d = base * T::lit(f);
            let r = d * T::lit(rho);
            (r, r + d)
        })
        .collect()
}

fn check_samples<T: Real>(samples: &[(T, T)], lower: T) -> Result<()> {
    if samples.len() < MIN_SAMPLES {
        return Err(precondition(format!("at least {MIN_SAMPLES} sample points are required, got {}", samples.len())));
    }
    for &(r, t) in samples {
        let d = t - r;
        if !(d >= lower && d <= r) || !r.is_finite() || !t.is_finite() {
            return Err(precondition(format!("sample (r, t) = ({r}, {t}) violates {lower} ≤ t - r ≤ r")));
        }
    }
    Ok(())
}

/// Checks the j → j+1 step at every sample. Points are evaluated in
/// parallel and merged in input order.
pub fn verify_iteration_step<T: Real>(
    j: u32,
    consts: &SlicingConstants<T>,
    eps: T,
    samples: &[(T, T)],
) -> Result<StepVerdict<T>> {
    if j < 1 {
        return Err(precondition("the iteration starts at j = 1"));
    }
    let lj_k = slicing_l::<T>(j) * consts.k;
    let lj1_k = slicing_l::<T>(j + 1) * consts.k;
    check_samples(samples, lj1_k)?;

    let p = consts.p;
    let one = T::one();
    let two = T::lit(2.0);
    let half_dim = (T::lit(f64::from(consts.n)) - one) / two;
    let q = consts.q();
    let a_j = slicing_a(j, p)?;
    let a_next = slicing_a(j + 1, p)?;
    let log_c_j = iterate_log_c(j, consts, eps)?[j as usize - 1].log_c;
    let tol = T::lit(STEP_TOLERANCE);
    // (N / (2p)^j) in log form
    let ln_step = consts.n_coeff.ln() - T::lit(f64::from(j)) * (two * p).ln();

    let inner = Simpson::with_rel_tol(T::lit(1e-10));
    let outer = Simpson::with_rel_tol(T::lit(1e-8)).depths(4, 40);

    let check = |&(r, t): &(T, T)| -> PointCheck<T> {
        let d = t - r;
        let big_l = (d / lj_k).ln();
        let small_l = (d / lj1_k).ln().max(T::zero());

        let est = outer.integrate_2d(
            &inner,
            |beta, alpha| {
                let lambda = (alpha - beta) / two;
                let log_ratio = ((beta / lj_k).ln() / big_l).max(T::zero());
                (alpha - beta).powf(half_dim) * lambda.powf(-half_dim * p) * beta.powf(-q * p) * log_ratio.powf(p * a_j)
            },
            lj_k,
            d,
            |beta| (two * d + beta, T::lit(3.0) * d),
        );
        let computed = consts.c_geom * est.value;
        let error = consts.c_geom * est.error;

        let claimed = if small_l <= T::zero() {
            T::zero()
        } else {
            (ln_step - q * d.ln() + a_next * small_l.ln() - p * a_j * big_l.ln()).exp()
        };
        let status = if !est.value.is_finite() || !est.converged || (claimed > T::zero() && error > tol * claimed) {
            VerdictStatus::Inconclusive
        } else if computed >= claimed * (one - tol) {
            VerdictStatus::Passed
        } else {
            VerdictStatus::Failed
        };
        let scale_ln = p * log_c_j + p * a_j * big_l.ln() - half_dim * r.ln();
        PointCheck { r, t, computed_lower: computed, claimed, scale_ln, error_estimate: error, status }
    };

    let points: Vec<PointCheck<T>> = samples.par_iter().map(check).collect();
    let status = points.iter().fold(VerdictStatus::Passed, |acc, pt| acc.merge(pt.status));
    let quadrature_error_estimate = points
        .iter()
        .map(|pt| if pt.computed_lower > T::zero() { pt.error_estimate / pt.computed_lower } else { T::zero() })
        .fold(T::zero(), T::max);
    Ok(StepVerdict {
        j,
        n: consts.n,
        p,
        eps,
        m: consts.m,
        tolerance: tol,
        points,
        status,
        passed: status == VerdictStatus::Passed,
        quadrature_error_estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSlicingReport<T> {
    pub j: u32,
    pub r: T,
    pub t: T,
    /// `∫_{l_j k}^{t-r} (log(β/(l_j k)))^{p a_j + 1} dβ`, divided by `L^{p a_j + 1}`.
    pub lhs: T,
    /// `(1 - l_j/l_{j+1}) (t-r) (log((t-r)/(l_{j+1} k)))^{p a_j + 1}`, same units.
    pub rhs: T,
    /// `log L`, `L = log((t-r)/(l_j k))`.
    pub scale_ln: T,
    pub error_estimate: T,
    /// `1 - l_j/l_{j+1}`.
    pub gap: T,
    /// `|gap - 1/(2^{j+1} l_{j+1})|`.
    pub gap_identity_error: T,
    /// `gap ≥ 2^{-(j+2)}`.
    pub coarse_gap_holds: bool,
    pub status: VerdictStatus,
    pub passed: bool,
}

/// Checks the slicing estimate
/// `∫_{l_j k}^{t-r} (log(β/(l_j k)))^{p a_j + 1} dβ ≥ (1 - l_j/l_{j+1}) (t-r) (log((t-r)/(l_{j+1} k)))^{p a_j + 1}`
/// at one point of `Σ_{j+1}`.
pub fn verify_beta_slicing_bound<T: Real>(j: u32, p: T, k: T, r: T, t: T) -> Result<BetaSlicingReport<T>> {
    if j < 1 {
        return Err(precondition("the iteration starts at j = 1"));
    }
    let lj = slicing_l::<T>(j);
    let lj1 = slicing_l::<T>(j + 1);
    let d = t - r;
    if !(d >= lj1 * k && d <= r) {
        return Err(precondition(format!("(r, t) = ({r}, {t}) lies outside Σ_{{j+1}}")));
    }
    let power = p * slicing_a(j, p)? + T::one();
    let lj_k = lj * k;
    let big_l = (d / lj_k).ln();
    let est = Simpson::with_rel_tol(T::lit(1e-12)).depths(4, 44).integrate(
        |beta| ((beta / lj_k).ln() / big_l).max(T::zero()).powf(power),
        lj_k,
        d,
    );
    let gap = T::one() - lj / lj1;
    let two = T::lit(2.0);
    let identity = T::one() / (two.powi(j as i32 + 1) * lj1);
    let small_l = (d / (lj1 * k)).ln().max(T::zero());
    let rhs = gap * d * (small_l / big_l).powf(power);
    let tol = T::lit(SLICING_TOLERANCE);
    let coarse_gap_holds = gap >= two.powi(-(j as i32 + 2));
    let status = if !est.converged || (rhs > T::zero() && est.error > tol * rhs) {
        VerdictStatus::Inconclusive
    } else if est.value >= rhs * (T::one() - tol) && coarse_gap_holds {
        VerdictStatus::Passed
    } else {
        VerdictStatus::Failed
    };
    Ok(BetaSlicingReport {
        j,
        r,
        t,
        lhs: est.value,
        rhs,
        scale_ln: big_l.ln(),
        error_estimate: est.error,
        gap,
        gap_identity_error: (gap - identity).abs(),
        coarse_gap_holds,
        status,
        passed: status == VerdictStatus::Passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(n: u32) -> SlicingConstants<f64> {
        SlicingConstants::new(n, 0.125, 1.0).unwrap()
    }

    #[test]
    fn first_step_three_dimensions_on_diagonal() {
        let c = consts(3);
        let base = slicing_l::<f64>(2) * c.k;
        let samples: Vec<(f64, f64)> = [1.5, 3.0, 6.0].iter().map(|f| (base * f, 2.0 * base * f)).collect();
        let v = verify_iteration_step(1, &c, 0.5, &samples).unwrap();
        assert!(v.passed, "{v:#?}");
        for pt in &v.points {
            assert!(pt.computed_lower > pt.claimed);
        }
    }

    #[test]
    fn boundary_sample_has_zero_claim() {
        let c = consts(3);
        let base = slicing_l::<f64>(3) * c.k;
        let samples = vec![(base, 2.0 * base), (2.0 * base, 4.0 * base), (3.0 * base, 5.0 * base)];
        let v = verify_iteration_step(2, &c, 0.5, &samples).unwrap();
        assert_eq!(v.points[0].claimed, 0.0);
        assert_eq!(v.points[0].status, VerdictStatus::Passed);
        assert!(v.passed);
    }

    #[test]
    fn rejects_bad_samples() {
        let c = consts(2);
        let base = slicing_l::<f64>(2) * c.k;
        let ok = (2.0 * base, 4.0 * base);
        // too few
        assert!(matches!(verify_iteration_step(1, &c, 0.5, &[ok, ok]), Err(crate::Error::Precondition(_))));
        // outside Σ_{j+1}
        let bad = (base, base * 1.5);
        assert!(verify_iteration_step(1, &c, 0.5, &[ok, ok, bad]).is_err());
        assert!(verify_iteration_step(0, &c, 0.5, &[ok, ok, ok]).is_err());
    }

    #[test]
    fn inner_integral_against_closed_form() {
        // ∫_{2d+β}^{3d} (α-β)^h ((α-β)/2)^{-hp} dα = 2^{hp} [s^{e+1}/(e+1)]_{2d}^{3d-β}, e = h(1-p)
        let c = consts(3);
        let (h, p) = (1.0, c.p);
        let (d, beta) = (2.0f64, 0.9f64);
        let e = h * (1.0 - p);
        let exact = 2f64.powf(h * p) * ((3.0 * d - beta).powf(e + 1.0) - (2.0 * d).powf(e + 1.0)) / (e + 1.0);
        let num = Simpson::with_rel_tol(1e-12)
            .integrate(|a: f64| (a - beta).powf(h) * ((a - beta) / 2.0).powf(-h * p), 2.0 * d + beta, 3.0 * d)
            .value;
        assert!((num - exact).abs() < 1e-11 * exact.abs());
    }

    #[test]
    fn beta_slicing_examples() {
        let rep = verify_beta_slicing_bound(1, 2.0, 1.0, 10.0, 20.0).unwrap();
        assert!(rep.passed && rep.lhs > rep.rhs, "{rep:?}");

        let lj1 = slicing_l::<f64>(3);
        let edge = verify_beta_slicing_bound(2, 2.0, 1.0, 5.0, 5.0 + lj1).unwrap();
        assert_eq!(edge.rhs, 0.0);
        assert!(edge.passed);

        for j in 1..=30 {
            let rep = verify_beta_slicing_bound(j, 2.0, 1.0, 10.0, 20.0).unwrap();
            assert!(rep.gap_identity_error < 1e-15);
            assert!(rep.coarse_gap_holds);
        }
    }

    #[test]
    fn beta_slicing_closed_form_oracle() {
        // exponent 1: ∫_{a}^{d} log(β/a) dβ = d log(d/a) - d + a
        let (k, d) = (1.0f64, 10.0f64);
        let rep = verify_beta_slicing_bound(1, 2.0, k, d, 2.0 * d).unwrap();
        let a = 1.5 * k;
        let exact = d * (d / a).ln() - d + a;
        let l = (d / a).ln();
        assert!((rep.lhs * l - exact).abs() < 1e-9 * exact);
    }
}
