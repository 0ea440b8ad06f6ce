//! Initial data profiles.
//!
//! Radial profiles are functions of `|x|`; in one dimension the same formula
//! is read as a function of `x`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::Simpson;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile<T> {
    Zero,
    /// `amplitude · max(0, 1 - (r/radius)²)^shape`.
    Bump {
        amplitude: T,
        radius: T,
        shape: T,
    },
    /// One-dimensional `b(x - shift) - b(x + shift)` for a bump `b`; odd, so
    /// `∫ g = 0`. Sign-changing, hence outside the blow-up theorem's data class.
    Dipole {
        amplitude: T,
        radius: T,
        shape: T,
        shift: T,
    },
    /// Spatially constant data, only meaningful on a periodic grid.
    Constant {
        value: T,
    },
}

impl<T: Real> Default for Profile<T> {
    fn default() -> Self {
        Profile::bump(T::one(), T::one(), T::lit(2.0))
    }
}

fn bump_eval<T: Real>(amplitude: T, radius: T, shape: T, x: T) -> T {
    let s = x / radius;
    let base = T::one() - s * s;
    if base <= T::zero() {
        T::zero()
    } else {
        amplitude * base.powf(shape)
    }
}

/// `∫_{-radius}^{x} b`, exact for integer `shape` (binomial expansion).
fn bump_primitive<T: Real>(amplitude: T, radius: T, shape: T, x: T) -> T {
    let x = x.max(-radius).min(radius);
    let m = shape.round();
    if (shape - m).abs() < T::epsilon() && m >= T::zero() && m <= T::lit(64.0) {
        let m = m.to_usize().unwrap_or(0);
        let odd = |y: T| {
            // Σ_k C(m,k) (-1)^k y^{2k+1} / ((2k+1) R^{2k})
            let u = y / radius;
            let mut term_binom = T::one();
            let mut acc = T::zero();
            let mut upow = u;
            for k in 0..=m {
                if k > 0 {
                    term_binom = term_binom * T::from_count(m + 1 - k) / T::from_count(k);
                    upow = upow * u * u;
                }
                let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                acc = acc + sign * term_binom * upow / T::from_count(2 * k + 1);
            }
            acc * radius
        };
        amplitude * (odd(x) - odd(-radius))
    } else {
        let quad = Simpson::with_rel_tol(T::lit(1e-13));
        quad.integrate(|y| bump_eval(amplitude, radius, shape, y), -radius, x).value
    }
}

impl<T: Real> Profile<T> {
    pub fn bump(amplitude: T, radius: T, shape: T) -> Self {
        Profile::Bump { amplitude, radius, shape }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |amplitude: T, radius: T, shape: T| -> Result<()> {
            if !(radius > T::zero()) || !radius.is_finite() {
                return Err(domain(format!("profile radius must be positive, got {radius}")));
            }
            if !(shape >= T::lit(2.0)) || !shape.is_finite() {
                return Err(domain(format!("profile shape exponent must be at least 2, got {shape}")));
            }
            if !amplitude.is_finite() {
                return Err(domain("profile amplitude must be finite"));
            }
            Ok(())
        };
        match *self {
            Profile::Zero => Ok(()),
            Profile::Bump { amplitude, radius, shape } => check(amplitude, radius, shape),
            Profile::Dipole { amplitude, radius, shape, shift } => {
                check(amplitude, radius, shape)?;
                if !(shift >= T::zero()) || !shift.is_finite() {
                    return Err(domain("dipole shift must be nonnegative"));
                }
                Ok(())
            }
            Profile::Constant { value } if value.is_finite() => Ok(()),
            Profile::Constant { .. } => Err(domain("constant profile must be finite")),
        }
    }

    pub fn eval(&self, x: T) -> T {
        match *self {
            Profile::Zero => T::zero(),
            Profile::Bump { amplitude, radius, shape } => bump_eval(amplitude, radius, shape, x),
            Profile::Dipole { amplitude, radius, shape, shift } => {
                bump_eval(amplitude, radius, shape, x - shift) - bump_eval(amplitude, radius, shape, x + shift)
            }
            Profile::Constant { value } => value,
        }
    }

    /// Antiderivative `∫_{-∞}^{x} g` of the one-dimensional reading.
    /// For [`Profile::Constant`] this is `value · x` (only differences matter).
    pub fn primitive(&self, x: T) -> T {
        match *self {
            Profile::Zero => T::zero(),
            Profile::Bump { amplitude, radius, shape } => bump_primitive(amplitude, radius, shape, x),
            Profile::Dipole { amplitude, radius, shape, shift } => {
                bump_primitive(amplitude, radius, shape, x - shift)
                    - bump_primitive(amplitude, radius, shape, x + shift)
            }
            Profile::Constant { value } => value * x,
        }
    }

    /// Radius outside which the profile vanishes; infinite for constants.
    pub fn support_radius(&self) -> T {
        match *self {
            Profile::Zero => T::zero(),
            Profile::Bump { radius, .. } => radius,
            Profile::Dipole { radius, shift, .. } => radius + shift,
            Profile::Constant { value } if value == T::zero() => T::zero(),
            Profile::Constant { .. } => T::infinity(),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Profile::Dipole { .. })
    }

    pub fn is_nonnegative(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Bump { amplitude, .. } => amplitude >= T::zero(),
            Profile::Dipole { amplitude, .. } => amplitude == T::zero(),
            Profile::Constant { value } => value >= T::zero(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Bump { amplitude, .. } | Profile::Dipole { amplitude, .. } => amplitude == T::zero(),
            Profile::Constant { value } => value == T::zero(),
        }
    }

    /// Same profile multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match *self {
            Profile::Zero => Profile::Zero,
            Profile::Bump { amplitude, radius, shape } => Profile::Bump { amplitude: amplitude * c, radius, shape },
            Profile::Dipole { amplitude, radius, shape, shift } => {
                Profile::Dipole { amplitude: amplitude * c, radius, shape, shift }
            }
            Profile::Constant { value } => Profile::Constant { value: value * c },
        }
    }

    /// `Φ(s)` with `Φ'(s) = s g(|s|)`, even in `s`; the radial flux behind the
    /// closed-form three-dimensional free wave. `None` unless a bump.
    pub fn radial_flux_potential(&self, s: T) -> Option<T> {
        match *self {
            Profile::Zero => Some(T::zero()),
            Profile::Bump { amplitude, radius, shape } => {
                let u = s.abs() / radius;
                let base = T::one() - u * u;
                let g = if base <= T::zero() { T::zero() } else { base.powf(shape + T::one()) };
                Some(-radius * radius * amplitude / (T::lit(2.0) * (shape + T::one())) * g)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let g = Profile::bump(2.0, 1.0, 2.0);
        assert_eq!(g.eval(0.0), 2.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.eval(-3.0), 0.0);
        assert!((g.eval(0.5) - 2.0 * 0.75f64.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn primitive_closed_form_matches_quadrature() {
        let exact = Profile::bump(1.0, 1.3, 3.0);
        let quad = Simpson::with_rel_tol(1e-13);
        for &x in &[-1.0f64, -0.2, 0.0, 0.7, 1.3, 4.0] {
            let q = quad.integrate(|y| exact.eval(y), -1.3, x.min(1.3)).value;
            assert!((exact.primitive(x) - q).abs() < 1e-12, "x = {x}");
        }
        // non-integer shape goes through quadrature
        let frac = Profile::bump(1.0f64, 1.0, 2.5);
        assert!((frac.primitive(1.0) - 2.0 * frac.primitive(0.0)).abs() < 1e-11);
    }

    #[test]
    fn dipole_is_odd_with_zero_mass() {
        let d = Profile::Dipole { amplitude: 1.0f64, radius: 1.0, shape: 2.0, shift: 1.5 };
        assert!((d.eval(0.4) + d.eval(-0.4)).abs() < 1e-15);
        assert!(d.primitive(10.0).abs() < 1e-14);
        assert!(!d.is_nonnegative());
        assert!(!d.is_radial());
    }

    #[test]
    fn flux_potential_derivative() {
        let g = Profile::bump(1.0f64, 2.0, 2.0);
        let h = 1e-5;
        for &s in &[0.3, 1.0, 1.7] {
            let d = (g.radial_flux_potential(s + h).unwrap() - g.radial_flux_potential(s - h).unwrap()) / (2.0 * h);
            assert!((d - s * g.eval(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn validation() {
        assert!(Profile::bump(1.0, 0.0, 2.0).validate().is_err());
        assert!(Profile::bump(1.0, 1.0, 1.0).validate().is_err());
        assert!(Profile::<f64>::default().validate().is_ok());
    }
}
