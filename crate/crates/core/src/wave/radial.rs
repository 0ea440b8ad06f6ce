use super::driver::{step_count, Scheme};
use super::ProblemSpec;
use crate::error::{domain, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Grid {
    /// Nodes `r_i = i dr`, `Δu(0) ≈ 4(u_1 - u_0)/dr²` (n = 2).
    Nodal,
    /// Nodes `r_i = i dr`, unknown `v = r u`, `v_0 = 0` (n = 3).
    Reduced,
    /// Cells `r_i = (i + ½) dr`, flux form with zero flux through the origin.
    Staggered,
}

/// Leapfrog scheme for radial solutions in two or three dimensions.
///
/// The state is stored as `s_i = u_i / w_i`; `w_i = 1 / r_i` on the reduced
/// grid and 1 otherwise.
#[derive(Clone, Debug)]
pub struct RadialSolver<T> {
    grid: Grid,
    dr: T,
    dt: T,
    p: T,
    nonlinear: bool,
    radii: Vec<T>,
    weight: Vec<T>,
    /// Discrete Laplacian `Δs_i = up_i s_{i+1} + down_i s_{i-1} - (up_i + down_i) s_i`.
    up: Vec<T>,
    down: Vec<T>,
    prev: Vec<T>,
    cur: Vec<T>,
    next: Vec<T>,
    velocity: Vec<T>,
    hi: usize,
    steps: usize,
}

impl<T: Real> RadialSolver<T> {
    pub fn new(spec: &ProblemSpec<T>) -> Result<Self> {
        spec.validate()?;
        let s = &spec.setup;
        let grid = match (s.n, s.regularize_origin) {
            (2, true) => Grid::Nodal,
            (3, true) => Grid::Reduced,
            (2 | 3, false) => Grid::Staggered,
            (n, _) => return Err(domain(format!("radial solver needs n = 2 or 3, got {n}"))),
        };
        let dr = s.dx;
        let dt = s.courant * dr;
        let support = s.f_profile.support_radius().max(s.g_profile.support_radius());
        let inner = (support / dr).ceil().to_usize().unwrap_or(0) + 1;
        let len = inner + step_count(s.t_max, dt) + 4;
        let half = T::lit(0.5);
        let radii: Vec<T> = (0..len)
            .map(|i| match grid {
                Grid::Staggered => (T::from_count(i) + half) * dr,
                _ => T::from_count(i) * dr,
            })
            .collect();
        let inv_dr2 = (dr * dr).recip();
        let mut up = vec![T::zero(); len];
        let mut down = vec![T::zero(); len];
        let mut weight = vec![T::one(); len];
        for i in 0..len {
            let r = radii[i];
            match grid {
                Grid::Nodal if i == 0 => up[i] = T::lit(4.0) * inv_dr2,
                Grid::Nodal => {
                    up[i] = inv_dr2 + half / (r * dr);
                    down[i] = inv_dr2 - half / (r * dr);
                }
                Grid::Reduced if i == 0 => weight[i] = T::zero(),
                Grid::Reduced => {
                    weight[i] = r.recip();
                    up[i] = inv_dr2;
                    down[i] = inv_dr2;
                }
                Grid::Staggered => {
                    let nn = T::from_count(s.n as usize);
                    let outer = r + half * dr;
                    let inner_face = r - half * dr;
                    let volume = (outer.powf(nn) - inner_face.powf(nn)) / (nn * dr);
                    up[i] = outer.powf(nn - T::one()) / volume * inv_dr2;
                    down[i] = if i == 0 { T::zero() } else { inner_face.powf(nn - T::one()) / volume * inv_dr2 };
                }
            }
        }
        let state = |i: usize, u: T| if weight[i] == T::zero() { T::zero() } else { u / weight[i] };
        let cur: Vec<T> = (0..len).map(|i| state(i, spec.eps * s.f_profile.eval(radii[i]))).collect();
        let velocity: Vec<T> = (0..len).map(|i| state(i, spec.eps * s.g_profile.eval(radii[i]))).collect();
        Ok(RadialSolver {
            grid,
            dr,
            dt,
            p: s.p,
            nonlinear: s.nonlinear,
            radii,
            weight,
            up,
            down,
            prev: vec![T::zero(); len],
            next: vec![T::zero(); len],
            cur,
            velocity,
            hi: inner,
            steps: 0,
        })
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn dr(&self) -> T {
        self.dr
    }

    /// `u` at the nodes. On the reduced grid the origin value is the
    /// parabolic extrapolation `(4u_1 - u_2)/3`, exact for `a + b r²`.
    pub fn values(&self) -> Vec<T> {
        let mut u: Vec<T> = self.cur.iter().zip(&self.weight).map(|(&s, &w)| s * w).collect();
        if self.grid == Grid::Reduced {
            u[0] = self.origin_value();
        }
        u
    }

    /// Raw unknowns: `v = r u` on the reduced grid, `u` otherwise.
    pub fn state(&self) -> &[T] {
        &self.cur
    }

    fn origin_value(&self) -> T {
        let u1 = self.cur[1] * self.weight[1];
        let u2 = self.cur[2] * self.weight[2];
        (T::lit(4.0) * u1 - u2) / T::lit(3.0)
    }
}

impl<T: Real> Scheme<T> for RadialSolver<T> {
    fn dt(&self) -> T {
        self.dt
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn max_abs(&self) -> T {
        let m = (0..=self.hi).fold(T::zero(), |m, i| m.max((self.cur[i] * self.weight[i]).abs()));
        if self.grid == Grid::Reduced {
            m.max(self.origin_value().abs())
        } else {
            m
        }
    }

    fn advance(&mut self) {
        self.hi += 1;
        let dt2 = self.dt * self.dt;
        let half = T::lit(0.5);
        let first = self.steps == 0;
        let start = usize::from(self.grid == Grid::Reduced);
        for i in start..=self.hi {
            let s = self.cur[i];
            let below = if i == 0 { T::zero() } else { self.cur[i - 1] };
            let lap = self.up[i] * (self.cur[i + 1] - s) + self.down[i] * (below - s);
            let w = self.weight[i];
            let source = if self.nonlinear { (s * w).abs().powf(self.p) / w } else { T::zero() };
            let rhs = dt2 * (lap + source);
            self.next[i] = if first { s + self.dt * self.velocity[i] + half * rhs } else { s + s - self.prev[i] + rhs };
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.steps += 1;
    }
}
