use serde::{Deserialize, Serialize};

use super::{simulate_refined, ProblemSpec, RunRecord};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Lifespan read off a refinement pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct LifespanEstimate<T> {
    /// `T_h` on the finer grid.
    pub t_h: T,
    /// `|T_h(coarse) - T_h(fine)|` plus one fine time step.
    pub uncertainty: T,
    pub coarse_t_h: T,
    pub fine_dt: T,
}

impl<T: Real> LifespanEstimate<T> {
    pub fn relative_uncertainty(&self) -> T {
        self.uncertainty / self.t_h
    }
}

/// Combines two runs of the same problem at different resolutions.
///
/// Both runs must have blown up; a pair that disagrees on that is reported
/// as inconclusive.
pub fn detect_lifespan<T: Real>(coarse: &RunRecord<T>, fine: &RunRecord<T>) -> Result<LifespanEstimate<T>> {
    let (a, b) = (&coarse.spec, &fine.spec);
    if a.eps != b.eps || a.setup.n != b.setup.n || a.setup.p != b.setup.p || a.setup.g_profile != b.setup.g_profile {
        return Err(domain("refinement pair must share n, p, eps and data"));
    }
    if !(fine.dt < coarse.dt) {
        return Err(domain("the second run must be the finer one"));
    }
    match (coarse.blew_up, fine.blew_up) {
        (true, true) => Ok(LifespanEstimate {
            t_h: fine.t_h,
            uncertainty: (coarse.t_h - fine.t_h).abs() + fine.dt,
            coarse_t_h: coarse.t_h,
            fine_dt: fine.dt,
        }),
        (false, false) => Err(Error::Inconclusive(format!("no blow-up before t_max = {}", fine.spec.setup.t_max))),
        _ => Err(Error::Inconclusive("only one of the refinement pair blew up".into())),
    }
}

/// Runs `spec` at refinement levels 0 and 1 and combines the results.
pub fn lifespan_at_cap<T: Real>(spec: &ProblemSpec<T>) -> Result<LifespanEstimate<T>> {
    let coarse = simulate_refined(spec, 0)?;
    let fine = simulate_refined(spec, 1)?;
    detect_lifespan(&coarse, &fine)
}
