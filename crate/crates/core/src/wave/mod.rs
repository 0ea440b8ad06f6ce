//! Finite-difference solvers for `u_tt - Δu = |u|^p` with blow-up detection.
//!
//! All schemes are explicit leapfrog, second order in space and time, with a
//! Taylor first step. Radial problems in `n = 2, 3` are centered at the
//! origin. A run stops at the first step where `max|u|` exceeds the cap;
//! that time is the numerical lifespan `T_h`.

mod driver;
mod lifespan;
mod line;
mod ode;
mod radial;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::profile::Profile;
use crate::scalar::Real;

pub use driver::Scheme;
pub use lifespan::{detect_lifespan, lifespan_at_cap, LifespanEstimate};
pub use line::LineSolver;
pub use ode::ode_blowup_oracle;
pub use radial::RadialSolver;

/// Run statuses need this many monotone steps before a cap crossing counts
/// as blow-up.
pub const MONOTONE_WINDOW: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    /// Zero data outside a grid wide enough that the stencil never reaches
    /// its edge before `t_max`.
    #[default]
    Open,
    /// Periodic line of `cells` cells (n = 1 only); used with constant data
    /// to reduce the equation to `y'' = |y|^p`.
    Periodic { cells: usize },
}

/// A problem minus its amplitude `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct Setup<T> {
    pub n: u32,
    pub p: T,
    #[serde(default = "zero_profile")]
    pub f_profile: Profile<T>,
    #[serde(default)]
    pub g_profile: Profile<T>,
    #[serde(default = "default_dx")]
    pub dx: T,
    #[serde(default = "default_courant")]
    pub courant: T,
    #[serde(default = "default_cap")]
    pub cap: T,
    #[serde(default = "default_t_max")]
    pub t_max: T,
    /// `false` switches the source term off (linear test mode).
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default)]
    pub boundary: Boundary,
    /// Radial grids: `true` puts a node at `r = 0` (regularized origin stencil
    /// for n = 2, `v = r u` for n = 3); `false` uses cells centred at
    /// `(i + ½) dr` in flux form, which never evaluate the origin.
    #[serde(default = "yes")]
    pub regularize_origin: bool,
    /// Every `trace_stride`-th step is kept in the amplitude trace.
    #[serde(default = "default_stride")]
    pub trace_stride: usize,
}

fn zero_profile<T: Real>() -> Profile<T> {
    Profile::Zero
}
fn default_dx<T: Real>() -> T {
    T::lit(0.05)
}
fn default_courant<T: Real>() -> T {
    T::lit(0.5)
}
fn default_cap<T: Real>() -> T {
    T::lit(1e10)
}
fn default_t_max<T: Real>() -> T {
    T::lit(200.0)
}
fn yes() -> bool {
    true
}
fn default_stride() -> usize {
    10
}

impl<T: Real> Setup<T> {
    /// Theorem setting: `f ≡ 0`, default bump for `g`, default grid.
    pub fn new(n: u32, p: T) -> Self {
        Setup {
            n,
            p,
            f_profile: Profile::Zero,
            g_profile: Profile::default(),
            dx: default_dx(),
            courant: default_courant(),
            cap: default_cap(),
            t_max: default_t_max(),
            nonlinear: true,
            boundary: Boundary::Open,
            regularize_origin: true,
            trace_stride: default_stride(),
        }
    }

    pub fn with_eps(&self, eps: T) -> ProblemSpec<T> {
        ProblemSpec { eps, setup: self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(domain(format!("n = {} is not one of 1, 2, 3", self.n)));
        }
        if !(self.p > T::one()) || !self.p.is_finite() {
            return Err(domain(format!("p = {} must exceed 1", self.p)));
        }
        if !(self.dx > T::zero()) || !self.dx.is_finite() {
            return Err(domain(format!("dx = {} must be positive", self.dx)));
        }
        if !(self.courant > T::zero() && self.courant <= T::one()) {
            return Err(domain(format!("courant = {} must lie in (0, 1]", self.courant)));
        }
        if !(self.cap > T::zero()) {
            return Err(domain("cap must be positive"));
        }
        if !(self.t_max > T::zero()) || !self.t_max.is_finite() {
            return Err(domain("t_max must be positive and finite"));
        }
        if self.trace_stride == 0 {
            return Err(domain("trace_stride must be at least 1"));
        }
        self.f_profile.validate()?;
        self.g_profile.validate()?;
        let unbounded = !self.f_profile.support_radius().is_finite() || !self.g_profile.support_radius().is_finite();
        match self.boundary {
            Boundary::Periodic { cells } => {
                if self.n != 1 {
                    return Err(domain("periodic boundaries are only available for n = 1"));
                }
                if cells < 3 {
                    return Err(domain("a periodic grid needs at least 3 cells"));
                }
            }
            Boundary::Open if unbounded => {
                return Err(domain("data without compact support need a periodic grid"));
            }
            Boundary::Open => {}
        }
        if self.n > 1 && (!self.f_profile.is_radial() || !self.g_profile.is_radial()) {
            return Err(domain("radial solvers need radial profiles"));
        }
        Ok(())
    }

    /// Whether the data satisfy `f ≡ 0`, `g ≥ 0`, `g ≢ 0`.
    pub fn within_theorem_hypotheses(&self) -> bool {
        self.f_profile.is_identically_zero() && self.g_profile.is_nonnegative() && !self.g_profile.is_identically_zero()
    }

    /// Same setup with `dx` halved `level` times.
    pub fn refined(&self, level: u32) -> Self {
        let mut s = self.clone();
        s.dx = self.dx / T::lit(2.0).powi(level as i32);
        s
    }
}

/// One simulation instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct ProblemSpec<T> {
    pub eps: T,
    #[serde(flatten)]
    pub setup: Setup<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(n: u32, p: T, eps: T) -> Self {
        Setup::new(n, p).with_eps(eps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= T::zero()) || !self.eps.is_finite() {
            return Err(domain(format!("eps = {} must be nonnegative", self.eps)));
        }
        self.setup.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct RunRecord<T> {
    pub spec: ProblemSpec<T>,
    pub blew_up: bool,
    /// First time `max|u|` exceeded the cap, or `t_max`.
    pub t_h: T,
    /// `(t, max|u|)` every `trace_stride` steps, plus the last step.
    pub max_amplitude_trace: Vec<(T, T)>,
    pub refinement_level: u32,
    pub steps: usize,
    pub dt: T,
}

/// Runs the scheme matching `spec.setup.n`.
pub fn simulate<T: Real>(spec: &ProblemSpec<T>) -> Result<RunRecord<T>> {
    simulate_refined(spec, 0)
}

/// Runs with `dx` halved `level` times.
pub fn simulate_refined<T: Real>(spec: &ProblemSpec<T>, level: u32) -> Result<RunRecord<T>> {
    let refined = ProblemSpec { eps: spec.eps, setup: spec.setup.refined(level) };
    let mut record = match refined.setup.n {
        1 => simulate_1d(&refined)?,
        _ => simulate_radial(&refined)?,
    };
    record.refinement_level = level;
    Ok(record)
}

/// Full-line scheme, `n = 1`.
pub fn simulate_1d<T: Real>(spec: &ProblemSpec<T>) -> Result<RunRecord<T>> {
    if spec.setup.n != 1 {
        return Err(domain("simulate_1d needs n = 1"));
    }
    let solver = LineSolver::new(spec)?;
    driver::run(solver, spec)
}

/// Radial reduction, `n = 2, 3`.
pub fn simulate_radial<T: Real>(spec: &ProblemSpec<T>) -> Result<RunRecord<T>> {
    if spec.setup.n != 2 && spec.setup.n != 3 {
        return Err(domain("simulate_radial needs n = 2 or 3"));
    }
    let solver = RadialSolver::new(spec)?;
    driver::run(solver, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setup_validation() {
        let mut s = Setup::<f64>::new(1, 2.0);
        assert!(s.validate().is_ok());
        s.courant = 1.5;
        assert!(s.validate().is_err());
        let mut s = Setup::<f64>::new(3, 2.0);
        s.g_profile = Profile::Dipole { amplitude: 1.0, radius: 1.0, shape: 2.0, shift: 2.0 };
        assert!(s.validate().is_err());
        let mut s = Setup::<f64>::new(1, 2.0);
        s.g_profile = Profile::Constant { value: 1.0 };
        assert!(s.validate().is_err());
        s.boundary = Boundary::Periodic { cells: 8 };
        assert!(s.validate().is_ok());
        assert!(ProblemSpec::new(1, 2.0, -1.0).validate().is_err());
    }

    #[test]
    fn hypotheses_label() {
        assert!(Setup::<f64>::new(3, 2.0).within_theorem_hypotheses());
        let mut s = Setup::<f64>::new(1, 2.0);
        s.g_profile = Profile::Dipole { amplitude: 1.0, radius: 1.0, shape: 2.0, shift: 2.0 };
        assert!(!s.within_theorem_hypotheses());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ProblemSpec::new(3, 2.0f64, 0.5);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ProblemSpec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
