//! Free (linear) waves with data `(u, u_t)(0) = (0, g)` for radial `g`.
//!
//! These are the exact oracles for the linear solver modes and the input
//! of the lemma constant estimate in [`crate::proof::lemma`].

use crate::error::{domain, Result};
use crate::profile::Profile;
use crate::quadrature::Simpson;
use crate::scalar::Real;

/// d'Alembert: `w(x, t) = (G(x + t) - G(x - t)) / 2` with `G' = g`.
pub fn free_wave_1d<T: Real>(g: &Profile<T>, x: T, t: T) -> T {
    (g.primitive(x + t) - g.primitive(x - t)) / T::lit(2.0)
}

/// Radial Kirchhoff formula `w(r, t) = (Φ(r + t) - Φ(r - t)) / (2r)` with
/// `Φ' = s g(|s|)`, i.e. `v = r w` solves the 1-D wave equation with odd data.
pub fn free_wave_3d<T: Real>(g: &Profile<T>, r: T, t: T) -> Result<T> {
    let two = T::lit(2.0);
    if r <= T::zero() {
        // limit r → 0: t g(t)
        return Ok(t * g.eval(t));
    }
    match (g.radial_flux_potential(r + t), g.radial_flux_potential(r - t)) {
        (Some(a), Some(b)) => Ok((a - b) / (two * r)),
        _ => {
            if !g.is_radial() {
                return Err(domain("three-dimensional free wave needs radial data"));
            }
            let q = Simpson::with_rel_tol(T::lit(1e-12));
            let lo = (r - t).abs();
            let hi = r + t;
            Ok(q.integrate(|s| s * g.eval(s), lo, hi.min(lo.max(g.support_radius()))).value / (two * r))
        }
    }
}

/// Complete elliptic integral of the first kind `K(k)` from the complementary
/// modulus `k' = √(1 - k²)` by the arithmetic-geometric mean.
pub fn elliptic_k_from_complement<T: Real>(kc: T) -> T {
    let mut a = T::one();
    let mut b = kc.max(T::min_positive_value().sqrt());
    for _ in 0..64 {
        let an = (a + b) / T::lit(2.0);
        let bn = (a * b).sqrt();
        let converged = (an - bn).abs() <= T::epsilon() * an;
        a = an;
        b = bn;
        if converged {
            break;
        }
    }
    T::FRAC_PI_2() / a
}

/// `∫_0^{2π} (A + B cos θ)_+^{-1/2} dθ` for `B ≥ 0`, taking `A - B` and
/// `A + B` separately so callers can supply them without cancellation.
fn circle_weight<T: Real>(a_minus_b: T, a_plus_b: T, b: T) -> T {
    let two = T::lit(2.0);
    if a_plus_b <= T::zero() {
        return T::zero();
    }
    if b <= T::zero() {
        return two * T::PI() / a_plus_b.sqrt();
    }
    if a_minus_b >= T::zero() {
        // whole circle; k'² = (A-B)/(A+B)
        let kc = (a_minus_b / a_plus_b).sqrt();
        T::lit(4.0) * elliptic_k_from_complement(kc) / a_plus_b.sqrt()
    } else {
        // arc |θ| < θ₀ with cos θ₀ = -A/B; k'² = (B-A)/(2B)
        let kc = (-a_minus_b / (two * b)).sqrt();
        two * (two / b).sqrt() * elliptic_k_from_complement(kc)
    }
}

/// Poisson formula for radial data in the plane, reduced to one radial
/// quadrature with the angular integral in closed (elliptic) form:
/// `w(λ, t) = (1/2π) ∫_0^R s g(s) ∫_0^{2π} (t² - λ² - s² + 2λs cos θ)_+^{-1/2} dθ ds`.
pub fn free_wave_2d<T: Real>(g: &Profile<T>, lambda: T, t: T, quad: &Simpson<T>) -> Result<T> {
    if !g.is_radial() {
        return Err(domain("two-dimensional free wave needs radial data"));
    }
    if t <= T::zero() {
        return Ok(T::zero());
    }
    let support = g.support_radius();
    if !support.is_finite() {
        // constant data: w = t · value
        return Ok(t * g.eval(T::zero()));
    }
    let lambda = lambda.abs();
    let lo = (lambda - t).max(T::zero());
    let hi = (lambda + t).min(support);
    if hi <= lo {
        return Ok(T::zero());
    }
    // A = t² - λ² - s², B = 2λs; with δ = t - λ - s:
    // A - B = δ (t + λ + s), A + B = (t - λ + s)(t + λ - s).
    let integrand = |s: T, delta: T| {
        let b = T::lit(2.0) * lambda * s;
        let a_minus_b = delta * (t + lambda + s);
        let a_plus_b = (t - lambda + s) * (delta + T::lit(2.0) * lambda);
        s * g.eval(s) * circle_weight(a_minus_b, a_plus_b, b)
    };
    // The weight is singular at the tangency radius s = t - λ (log for λ > 0,
    // inverse square root for λ = 0). Substituting s = kink ∓ u² on either
    // side makes both integrable singularities mild.
    let kink = (t - lambda).max(lo).min(hi);
    let offset = t - lambda - kink;
    // u = 0 is a removable singularity; evaluate just off it.
    let nudge = T::min_positive_value().sqrt().sqrt();
    let below = |u: T| {
        let u = u.max(nudge);
        let s = kink - u * u;
        T::lit(2.0) * u * integrand(s, offset + u * u)
    };
    let above = |u: T| {
        let u = u.max(nudge);
        let s = kink + u * u;
        T::lit(2.0) * u * integrand(s, offset - u * u)
    };
    let value = quad.integrate(below, T::zero(), (kink - lo).sqrt()).value
        + quad.integrate(above, T::zero(), (hi - kink).sqrt()).value;
    Ok(value / (T::lit(2.0) * T::PI()))
}

/// Free wave in dimension `n ∈ {1, 2, 3}` at radius (or abscissa) `r`.
pub fn free_wave<T: Real>(n: u32, g: &Profile<T>, r: T, t: T) -> Result<T> {
    match n {
        1 => Ok(free_wave_1d(g, r, t)),
        2 => free_wave_2d(g, r, t, &Simpson::with_rel_tol(T::lit(1e-9)).depths(2, 30)),
        3 => free_wave_3d(g, r, t),
        _ => Err(domain(format!("free waves are implemented for n = 1, 2, 3, not {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_k_known_values() {
        assert!((elliptic_k_from_complement(1.0f64) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        // K(1/√2) = Γ(1/4)² / (4√π) = 1.854074677301372
        let kc = (0.5f64).sqrt();
        assert!((elliptic_k_from_complement(kc) - 1.854_074_677_301_372).abs() < 1e-13);
    }

    #[test]
    fn circle_weight_matches_direct_quadrature() {
        let q = Simpson::<f64>::with_rel_tol(1e-9).depths(4, 30);
        for &(a, b) in &[(5.0, 1.0), (2.0, 1.5), (0.3, 1.0), (-0.5, 1.0)] {
            let direct = q
                .integrate(
                    |th: f64| {
                        let v = a + b * th.cos();
                        if v > 0.0 {
                            1.0 / v.sqrt()
                        } else {
                            0.0
                        }
                    },
                    0.0,
                    2.0 * std::f64::consts::PI,
                )
                .value;
            let closed = circle_weight(a - b, a + b, b);
            assert!((direct - closed).abs() < 2e-4 * closed.max(1.0), "A={a} B={b}: {direct} vs {closed}");
        }
    }

    #[test]
    fn two_dimensional_at_origin_matches_radial_poisson() {
        // At λ = 0: w(0,t) = ∫_0^t s g(s) / √(t² - s²) ds
        let g = Profile::bump(1.0, 1.0, 2.0);
        let q = Simpson::with_rel_tol(1e-11);
        for &t in &[0.5f64, 0.9, 2.0] {
            let hi = t.min(1.0);
            // substitute s = t sin φ
            let phi_hi = (hi / t).asin();
            let direct = q.integrate(|phi: f64| t * phi.sin() * g.eval(t * phi.sin()), 0.0, phi_hi).value;
            let w = free_wave_2d(&g, 0.0, t, &q).unwrap();
            assert!((w - direct).abs() < 1e-9, "t = {t}: {w} vs {direct}");
        }
    }

    #[test]
    fn constant_data_grow_linearly() {
        let g = Profile::Constant { value: 2.0 };
        assert_eq!(free_wave_1d(&g, 0.3, 1.5), 3.0);
    }

    #[test]
    fn three_dimensional_huygens() {
        let g = Profile::bump(1.0, 1.0, 2.0);
        // sharp Huygens principle: zero once t - r exceeds the support radius
        assert_eq!(free_wave_3d(&g, 5.0, 6.5).unwrap(), 0.0);
        assert!(free_wave_3d(&g, 5.0, 5.5).unwrap() > 0.0);
    }
}
