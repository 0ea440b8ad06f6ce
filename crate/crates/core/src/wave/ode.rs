use crate::error::{domain, Error, Result};
use crate::quadrature::Simpson;
use crate::scalar::Real;

/// Blow-up time of `y'' = y^p` with `y(0) = y0 ≥ 0`, `y'(0) = y1 ≥ 0`, not both zero.
///
/// Energy conservation gives `y'² = y1² + 2(y^{p+1} - y0^{p+1})/(p+1)`, so
/// `T = ∫_{y0}^∞ dy / y'`. The integral is split at `y_mid`; below it
/// `y = y0 + w²` removes the inverse square root of the `y1 = 0` case, above
/// it `y = y_mid s^{-2/(p-1)}` maps the tail onto `s ∈ (0, 1]` with a bounded
/// integrand.
pub fn ode_blowup_oracle<T: Real>(p: T, y0: T, y1: T) -> Result<T> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(domain(format!("p = {p} must exceed 1")));
    }
    if !(y0 >= T::zero()) || !(y1 >= T::zero()) || !y0.is_finite() || !y1.is_finite() {
        return Err(domain("the oracle needs y0 ≥ 0 and y1 ≥ 0"));
    }
    if y0 == T::zero() && y1 == T::zero() {
        return Err(domain("zero data never blow up"));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let pp1 = p + one;
    let y0_pow = y0.powf(pp1);
    // y^{p+1} - y0^{p+1} for y = y0 + w², without cancellation near w = 0.
    let rise = |w2: T| {
        if y0 > T::zero() {
            y0_pow * (pp1 * (w2 / y0).ln_1p()).exp_m1()
        } else {
            w2.powf(pp1)
        }
    };
    let y_mid = (two * y0).max(y1.powf(two / pp1));
    let quad = Simpson::<T>::with_rel_tol(T::clamp_tol(T::lit(1e-12)));
    let lower = quad.integrate(
        |w: T| {
            if w == T::zero() {
                return if y1 > T::zero() { T::zero() } else { two / (two * y0.powf(p)).sqrt() };
            }
            let speed2 = y1 * y1 + two * rise(w * w) / pp1;
            two * w / speed2.sqrt()
        },
        T::zero(),
        (y_mid - y0).sqrt(),
    );
    let k = two / (p - one);
    let tail_coeff = (y1 * y1 - two * y0_pow / pp1) / (y_mid * y_mid);
    let head = two * y_mid.powf(p - one) / pp1;
    let upper = quad.integrate(|s: T| k / (s.powf(two + two * k) * tail_coeff + head).sqrt(), T::zero(), one);
    if !lower.converged || !upper.converged {
        return Err(Error::Inconclusive("blow-up time quadrature did not converge".into()));
    }
    Ok(lower.value + upper.value)
}
