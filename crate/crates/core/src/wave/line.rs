use super::driver::{step_count, Scheme};
use super::{Boundary, ProblemSpec};
use crate::error::Result;
use crate::scalar::Real;

/// Leapfrog scheme on the line.
///
/// On an open grid only the nodes the data can have reached are updated;
/// everything else is exactly zero.
#[derive(Clone, Debug)]
pub struct LineSolver<T> {
    x0: T,
    dx: T,
    dt: T,
    p: T,
    nonlinear: bool,
    periodic: bool,
    prev: Vec<T>,
    cur: Vec<T>,
    next: Vec<T>,
    /// First-step velocity data `ε g`.
    velocity: Vec<T>,
    lo: usize,
    hi: usize,
    steps: usize,
}

impl<T: Real> LineSolver<T> {
    pub fn new(spec: &ProblemSpec<T>) -> Result<Self> {
        spec.validate()?;
        let s = &spec.setup;
        let dx = s.dx;
        let dt = s.courant * dx;
        let (x0, len, lo, hi, periodic) = match s.boundary {
            Boundary::Periodic { cells } => (T::zero(), cells, 0, cells - 1, true),
            Boundary::Open => {
                let support = s.f_profile.support_radius().max(s.g_profile.support_radius());
                let inner = (support / dx).ceil().to_usize().unwrap_or(0) + 1;
                let half = inner + step_count(s.t_max, dt) + 3;
                (-T::from_count(half) * dx, 2 * half + 1, half - inner, half + inner, false)
            }
        };
        let x = |i: usize| x0 + T::from_count(i) * dx;
        let cur: Vec<T> = (0..len).map(|i| spec.eps * s.f_profile.eval(x(i))).collect();
        let velocity: Vec<T> = (0..len).map(|i| spec.eps * s.g_profile.eval(x(i))).collect();
        Ok(LineSolver {
            x0,
            dx,
            dt,
            p: s.p,
            nonlinear: s.nonlinear,
            periodic,
            prev: vec![T::zero(); len],
            next: vec![T::zero(); len],
            cur,
            velocity,
            lo,
            hi,
            steps: 0,
        })
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.cur.len()).map(|i| self.x0 + T::from_count(i) * self.dx).collect()
    }

    pub fn values(&self) -> &[T] {
        &self.cur
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// Linear energy at the half step between the last two levels,
    /// `½Σ(δ_t u)² dx + ¼Σ[(δ_x u^m)² + (δ_x u^{m-1})²] dx`.
    /// `None` before the first step.
    pub fn energy(&self) -> Option<T> {
        if self.steps == 0 {
            return None;
        }
        let half = T::lit(0.5);
        let n = self.cur.len();
        let kinetic: T = (0..n).map(|i| ((self.cur[i] - self.prev[i]) / self.dt).powi(2)).sum();
        let edges = if self.periodic { n } else { n - 1 };
        let grad = |u: &[T]| -> T { (0..edges).map(|i| ((u[(i + 1) % n] - u[i]) / self.dx).powi(2)).sum() };
        let potential = half * (grad(&self.cur) + grad(&self.prev));
        Some(half * (kinetic + potential) * self.dx)
    }

    #[inline]
    fn source(&self, u: T) -> T {
        if self.nonlinear {
            u.abs().powf(self.p)
        } else {
            T::zero()
        }
    }
}

impl<T: Real> Scheme<T> for LineSolver<T> {
    fn dt(&self) -> T {
        self.dt
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn max_abs(&self) -> T {
        self.cur[self.lo..=self.hi].iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    fn advance(&mut self) {
        let n = self.cur.len();
        if !self.periodic {
            self.lo -= 1;
            self.hi += 1;
        }
        let lam2 = (self.dt / self.dx).powi(2);
        let dt2 = self.dt * self.dt;
        let half = T::lit(0.5);
        let first = self.steps == 0;
        for i in self.lo..=self.hi {
            let (l, r) = if self.periodic { ((i + n - 1) % n, (i + 1) % n) } else { (i - 1, i + 1) };
            let u = self.cur[i];
            let lap = self.cur[r] - u - u + self.cur[l];
            let rhs = lam2 * lap + dt2 * self.source(u);
            self.next[i] = if first { u + self.dt * self.velocity[i] + half * rhs } else { u + u - self.prev[i] + rhs };
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::free_wave_1d;
    use crate::profile::Profile;
    use crate::wave::Setup;

    fn linear_spec(dx: f64, t_max: f64) -> ProblemSpec<f64> {
        let mut s = Setup::new(1, 2.0);
        s.nonlinear = false;
        s.g_profile = Profile::bump(1.0, 1.0, 4.0);
        s.dx = dx;
        s.t_max = t_max;
        s.with_eps(1.0)
    }

    fn max_error(dx: f64) -> f64 {
        let spec = linear_spec(dx, 1.5);
        let mut solver = LineSolver::new(&spec).unwrap();
        let steps = step_count(1.5, solver.dt());
        for _ in 0..steps {
            solver.advance();
        }
        let t = solver.time();
        assert!((t - 1.5).abs() < 1e-12);
        let g = spec.setup.g_profile;
        solver
            .nodes()
            .iter()
            .zip(solver.values())
            .map(|(&x, &u)| (u - free_wave_1d(&g, x, t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn converges_at_second_order() {
        let e1 = max_error(0.04);
        let e2 = max_error(0.02);
        let e3 = max_error(0.01);
        let o1 = (e1 / e2).log2();
        let o2 = (e2 / e3).log2();
        assert!((o1 - 2.0).abs() < 0.2 && (o2 - 2.0).abs() < 0.2, "orders {o1} {o2}");
    }

    #[test]
    fn finite_propagation() {
        let spec = linear_spec(0.05, 3.0);
        let mut solver = LineSolver::new(&spec).unwrap();
        for _ in 0..step_count(3.0, solver.dt()) {
            solver.advance();
        }
        // Stencil cone: support grows by one node per step.
        let reach = 1.0 + 0.05 + solver.time() / 0.5 + 1e-9;
        for (x, u) in solver.nodes().iter().zip(solver.values()) {
            if x.abs() > reach {
                assert_eq!(*u, 0.0);
            }
        }
    }

    #[test]
    fn energy_drift_is_second_order() {
        let drift = |dx: f64| {
            let spec = linear_spec(dx, 4.0);
            let mut solver = LineSolver::new(&spec).unwrap();
            solver.advance();
            let e0 = solver.energy().unwrap();
            let mut worst = 0.0f64;
            for _ in 1..step_count(4.0, solver.dt()) {
                solver.advance();
                worst = worst.max((solver.energy().unwrap() - e0).abs() / e0);
            }
            worst
        };
        let d1 = drift(0.04);
        let d2 = drift(0.02);
        assert!(d1 < 1e-2, "drift {d1}");
        let ratio = d1 / d2;
        assert!(ratio > 3.0 && ratio < 5.5, "ratio {ratio}");
    }

    #[test]
    fn zero_amplitude_stays_zero() {
        let spec = Setup::new(1, 2.0).with_eps(0.0);
        let mut solver = LineSolver::new(&spec).unwrap();
        for _ in 0..100 {
            solver.advance();
        }
        assert!(solver.values().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn periodic_constant_data_stay_uniform() {
        let mut s = Setup::new(1, 2.0);
        s.g_profile = Profile::Constant { value: 1.0 };
        s.boundary = Boundary::Periodic { cells: 8 };
        let mut solver = LineSolver::new(&s.with_eps(0.5)).unwrap();
        for _ in 0..50 {
            solver.advance();
        }
        let v: &[f64] = solver.values();
        assert!(v.iter().all(|&u| (u - v[0]).abs() <= 1e-14 * v[0].abs()));
        assert!(v[0] > 0.5 * solver.time());
    }
}
