use std::collections::VecDeque;

use super::{ProblemSpec, RunRecord, MONOTONE_WINDOW};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A time stepper that the blow-up driver can run.
pub trait Scheme<T: Real> {
    fn dt(&self) -> T;
    /// Completed steps.
    fn steps(&self) -> usize;
    fn time(&self) -> T {
        T::from_count(self.steps()) * self.dt()
    }
    /// `max|u|` over the grid at the current level.
    fn max_abs(&self) -> T;
    fn advance(&mut self);
}

/// Number of whole steps that fit in `t_max`.
pub(super) fn step_count<T: Real>(t_max: T, dt: T) -> usize {
    (t_max / dt + T::lit(1e-6)).floor().to_usize().unwrap_or(0).max(1)
}

fn is_monotone<T: Real>(window: &VecDeque<T>) -> bool {
    window.iter().zip(window.iter().skip(1)).all(|(a, b)| b >= a)
}

pub(super) fn run<T: Real, S: Scheme<T>>(mut scheme: S, spec: &ProblemSpec<T>) -> Result<RunRecord<T>> {
    let setup = &spec.setup;
    let dt = scheme.dt();
    let total = step_count(setup.t_max, dt);
    let m0 = scheme.max_abs();
    if !m0.is_finite() {
        return Err(Error::NumericalFailure("initial data are not finite".into()));
    }
    if m0 > setup.cap {
        return Err(Error::Precondition(format!("initial amplitude {m0} already exceeds the cap {}", setup.cap)));
    }
    let mut trace = vec![(T::zero(), m0)];
    let mut window = VecDeque::with_capacity(MONOTONE_WINDOW + 2);
    window.push_back(m0);
    let finish = |trace: Vec<(T, T)>, blew_up: bool, t_h: T, steps: usize| RunRecord {
        spec: spec.clone(),
        blew_up,
        t_h,
        max_amplitude_trace: trace,
        refinement_level: 0,
        steps,
        dt,
    };
    for step in 1..=total {
        scheme.advance();
        let m = scheme.max_abs();
        let t = scheme.time();
        if !m.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "amplitude became non-finite at t = {t} before reaching the cap"
            )));
        }
        window.push_back(m);
        if window.len() > MONOTONE_WINDOW + 1 {
            window.pop_front();
        }
        if m > setup.cap {
            if !is_monotone(&window) {
                return Err(Error::NumericalFailure(format!(
                    "amplitude crossed the cap at t = {t} without growing monotonically over the last {MONOTONE_WINDOW} steps"
                )));
            }
            trace.push((t, m));
            return Ok(finish(trace, true, t, step));
        }
        if step % setup.trace_stride == 0 || step == total {
            trace.push((t, m));
        }
    }
    Ok(finish(trace, false, setup.t_max, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::Setup;

    /// Replays a fixed amplitude sequence.
    struct Replay {
        values: Vec<f64>,
        steps: usize,
    }

    impl Scheme<f64> for Replay {
        fn dt(&self) -> f64 {
            0.1
        }
        fn steps(&self) -> usize {
            self.steps
        }
        fn max_abs(&self) -> f64 {
            self.values[self.steps]
        }
        fn advance(&mut self) {
            self.steps += 1;
        }
    }

    fn spec() -> ProblemSpec<f64> {
        let mut s = Setup::new(1, 2.0);
        s.cap = 100.0;
        s.t_max = 10.0;
        s.with_eps(1.0)
    }

    #[test]
    fn monotone_growth_is_blow_up() {
        let values: Vec<f64> = (0..=100).map(|i| 1.1f64.powi(i)).collect();
        let r = run(Replay { values, steps: 0 }, &spec()).unwrap();
        assert!(r.blew_up);
        // 1.1^48 < 100 < 1.1^49
        assert!((r.t_h - 4.9).abs() < 1e-12, "{}", r.t_h);
        assert!(r.t_h < spec().setup.t_max);
    }

    #[test]
    fn oscillating_crossing_is_a_failure() {
        let values: Vec<f64> = (0..=100).map(|i| 1.1f64.powi(i) * if i % 2 == 0 { 1.0 } else { 0.5 }).collect();
        let e = run(Replay { values, steps: 0 }, &spec()).unwrap_err();
        assert!(matches!(e, Error::NumericalFailure(_)));
    }

    #[test]
    fn non_finite_is_a_failure() {
        let mut values = vec![1.0; 101];
        values[20] = f64::NAN;
        let e = run(Replay { values, steps: 0 }, &spec()).unwrap_err();
        assert!(matches!(e, Error::NumericalFailure(_)));
    }

    #[test]
    fn quiet_run_reaches_t_max() {
        let r = run(Replay { values: vec![1.0; 101], steps: 0 }, &spec()).unwrap();
        assert!(!r.blew_up);
        assert_eq!(r.t_h, 10.0);
        assert_eq!(r.steps, 100);
        let times: Vec<f64> = r.max_amplitude_trace.iter().map(|p| p.0).collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*times.last().unwrap(), 10.0);
    }
}
