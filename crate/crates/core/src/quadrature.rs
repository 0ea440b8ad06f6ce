//! Adaptive Simpson quadrature with error estimates, in one and two
//! (iterated) dimensions.
//!
//! The tolerance is `max(abs_tol, rel_tol * |I₀|)` where `I₀` is a composite
//! Simpson estimate on the initial uniform panels (32 by default); it is split evenly between the two halves of
//! every subdivided panel. A panel is accepted once the Richardson difference
//! `|S₂ - S₁|` is below `15 · tol`, and the accepted error contributions are
//! summed into [`Estimate::error`].

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    /// Summed Richardson error estimate of the accepted panels.
    pub error: T,
    /// False when some panel hit `max_depth` before meeting its tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

impl<T: Real> Estimate<T> {
    pub fn zero() -> Self {
        Estimate { value: T::zero(), error: T::zero(), converged: true, evaluations: 0 }
    }

    pub fn relative_error(&self) -> T {
        if self.value == T::zero() {
            if self.error == T::zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            self.error / self.value.abs()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simpson<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Panels are always split at least this many times.
    pub min_depth: u32,
    pub max_depth: u32,
    /// Once this many evaluations are spent, remaining panels are accepted
    /// as they are and the estimate is marked unconverged.
    pub max_evaluations: usize,
    /// Panels of the initial uniform pass.
    pub panels: usize,
}

impl<T: Real> Default for Simpson<T> {
    fn default() -> Self {
        Simpson {
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            rel_tol: T::lit(1e-10),
            min_depth: 3,
            max_depth: 40,
            max_evaluations: 4_000_000,
            panels: 32,
        }
    }
}

struct Panel<T> {
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

impl<T: Real> Simpson<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Simpson { rel_tol, ..Self::default() }
    }

    pub fn with_tolerances(abs_tol: T, rel_tol: T) -> Self {
        Simpson { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn budget(mut self, max_evaluations: usize) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }

    pub fn panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn depths(mut self, min_depth: u32, max_depth: u32) -> Self {
        self.min_depth = min_depth;
        self.max_depth = max_depth.max(min_depth);
        self
    }

    /// `∫_a^b f`. Reversed limits give the negated integral; `a == b` gives 0.
    pub fn integrate<F>(&self, mut f: F, a: T, b: T) -> Estimate<T>
    where
        F: FnMut(T) -> T,
    {
        if a == b {
            return Estimate::zero();
        }
        if b < a {
            let mut e = self.integrate(f, b, a);
            e.value = -e.value;
            return e;
        }
        let six = T::lit(6.0);
        let two = T::lit(2.0);

        // Coarse composite estimate, used only to turn rel_tol into a target.
        let panels = self.panels.max(1);
        let h = (b - a) / T::from_count(panels);
        let mut samples = Vec::with_capacity(2 * panels + 1);
        for i in 0..=2 * panels {
            let x = if i == 2 * panels { b } else { a + h * T::from_count(i) / two };
            samples.push(f(x));
        }
        let mut coarse = T::zero();
        for i in 0..panels {
            coarse = coarse + h / six * (samples[2 * i] + T::lit(4.0) * samples[2 * i + 1] + samples[2 * i + 2]);
        }
        let tol = self.abs_tol.max(self.rel_tol * coarse.abs());
        let panel_tol = tol / T::from_count(panels);

        let mut out = Estimate { value: T::zero(), error: T::zero(), converged: true, evaluations: samples.len() };
        for i in 0..panels {
            let pa = a + h * T::from_count(i);
            let pb = if i + 1 == panels { b } else { a + h * T::from_count(i + 1) };
            let (fa, fm, fb) = (samples[2 * i], samples[2 * i + 1], samples[2 * i + 2]);
            let pm = (pa + pb) / two;
            let whole = (pb - pa) / six * (fa + T::lit(4.0) * fm + fb);
            let panel = Panel { a: pa, m: pm, b: pb, fa, fm, fb, whole };
            self.refine(&mut f, panel, panel_tol, 0, &mut out);
        }
        out
    }

    fn refine<F>(&self, f: &mut F, p: Panel<T>, tol: T, depth: u32, out: &mut Estimate<T>)
    where
        F: FnMut(T) -> T,
    {
        let two = T::lit(2.0);
        let twelve = T::lit(12.0);
        let four = T::lit(4.0);
        let (lm, rm) = ((p.a + p.m) / two, (p.m + p.b) / two);
        let (flm, frm) = (f(lm), f(rm));
        out.evaluations += 2;
        let h = p.b - p.a;
        let left = h * (p.fa + four * flm + p.fm) / twelve;
        let right = h * (p.fm + four * frm + p.fb) / twelve;
        let both = left + right;
        let diff = both - p.whole;
        let fifteen = T::lit(15.0);

        let settled = depth >= self.min_depth && diff.abs() <= fifteen * tol;
        // Splitting further is pointless once the midpoints collide.
        let exhausted =
            depth >= self.max_depth || out.evaluations >= self.max_evaluations || lm <= p.a || rm >= p.b || lm >= p.m;
        if settled || exhausted || !diff.is_finite() {
            if !settled {
                out.converged = false;
            }
            out.value = out.value + both + diff / fifteen;
            out.error = out.error + (diff / fifteen).abs();
            return;
        }
        let half = tol / two;
        self.refine(f, Panel { a: p.a, m: lm, b: p.m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, half, depth + 1, out);
        self.refine(
            f,
            Panel { a: p.m, m: rm, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right },
            half,
            depth + 1,
            out,
        );
    }

    /// Iterated integral `∫_a^b ∫_{lo(x)}^{hi(x)} f(x, y) dy dx`.
    ///
    /// `self` controls the outer axis, `inner` the inner one. The returned
    /// error is the outer estimate plus `(b - a) · max(inner error)`.
    pub fn integrate_2d<F, L>(&self, inner: &Simpson<T>, f: F, a: T, b: T, limits: L) -> Estimate<T>
    where
        F: Fn(T, T) -> T,
        L: Fn(T) -> (T, T),
    {
        let mut worst_inner = T::zero();
        let mut inner_converged = true;
        let mut inner_evals = 0usize;
        let outer = self.integrate(
            |x| {
                let (lo, hi) = limits(x);
                if hi <= lo {
                    return T::zero();
                }
                let e = inner.integrate(|y| f(x, y), lo, hi);
                worst_inner = worst_inner.max(e.error);
                inner_converged &= e.converged;
                inner_evals += e.evaluations;
                e.value
            },
            a,
            b,
        );
        Estimate {
            value: outer.value,
            error: outer.error + (b - a).abs() * worst_inner,
            converged: outer.converged && inner_converged,
            evaluations: outer.evaluations + inner_evals,
        }
    }
}
