use blowup_core::free::free_wave;
use blowup_core::wave::{
    detect_lifespan, lifespan_at_cap, ode_blowup_oracle, simulate, simulate_refined, Boundary, ProblemSpec, Setup,
};
use blowup_core::{Error, Profile};

fn setup(n: u32, p: f64, t_max: f64) -> Setup<f64> {
    let mut s = Setup::new(n, p);
    s.t_max = t_max;
    s
}

#[test]
fn zero_amplitude_never_blows_up() {
    for n in 1..=3 {
        let r = simulate(&setup(n, 2.0, 20.0).with_eps(0.0)).unwrap();
        assert!(!r.blew_up);
        assert_eq!(r.t_h, 20.0);
        assert!(r.max_amplitude_trace.iter().all(|&(_, m)| m == 0.0));
    }
}

#[test]
fn line_lifespan_grows_as_eps_shrinks() {
    let s = setup(1, 2.0, 100.0);
    let t: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&eps| {
            let r = simulate(&s.with_eps(eps)).unwrap();
            assert!(r.blew_up);
            r.t_h
        })
        .collect();
    assert!(t[0] < t[1] && t[1] < t[2], "{t:?}");
}

#[test]
fn three_dimensional_quadratic_anchors() {
    // Regression values on the default grid (dx = 0.05, courant 0.5).
    let s = setup(3, 2.0, 200.0);
    let r = simulate(&s.with_eps(4.0)).unwrap();
    assert!(r.blew_up);
    assert!((r.t_h - 44.15).abs() < 0.05, "{}", r.t_h);
    let r = simulate(&s.with_eps(2.0)).unwrap();
    assert!(r.blew_up);
    assert!((r.t_h - 178.6).abs() < 0.1, "{}", r.t_h);
    // T ~ C ε^{-2} with C ≈ 710 puts ε = 0.5 near t = 2800.
    assert!(!simulate(&s.with_eps(0.5)).unwrap().blew_up);
}

fn ode_mode(cap: f64) -> ProblemSpec<f64> {
    let mut s = setup(1, 2.0, 2.0);
    s.f_profile = Profile::Constant { value: 6.0 };
    s.g_profile = Profile::Constant { value: 12.0 };
    s.boundary = Boundary::Periodic { cells: 8 };
    s.dx = 1e-3;
    s.cap = cap;
    s.with_eps(1.0)
}

#[test]
fn constant_data_follow_the_ode() {
    let oracle = ode_blowup_oracle(2.0, 6.0, 12.0).unwrap();
    let r = simulate(&ode_mode(1e10)).unwrap();
    assert!(r.blew_up);
    assert!((r.t_h - oracle).abs() < 0.02 * oracle, "{} vs {oracle}", r.t_h);
}

#[test]
fn lifespan_is_insensitive_to_the_cap() {
    let mut s = setup(1, 2.0, 100.0);
    let hi = lifespan_at_cap(&s.with_eps(0.2)).unwrap();
    s.cap = 1e8;
    let lo = lifespan_at_cap(&s.with_eps(0.2)).unwrap();
    assert!((hi.t_h - lo.t_h).abs() < hi.uncertainty, "{hi:?} {lo:?}");
}

#[test]
fn lifespan_spread_shrinks_under_refinement() {
    for (n, eps) in [(1, 0.2), (2, 1.0), (3, 4.0)] {
        let spec = setup(n, 2.0, 200.0).with_eps(eps);
        let t: Vec<f64> = (0..3).map(|l| simulate_refined(&spec, l).unwrap().t_h).collect();
        let (d01, d12) = ((t[0] - t[1]).abs(), (t[1] - t[2]).abs());
        // Crossing times are quantized to steps; three identical ones are fine.
        assert!(d12 < d01 || (d01 == 0.0 && d12 == 0.0), "n = {n}: {t:?}");
    }
}

#[test]
fn non_blow_up_pair_is_inconclusive() {
    let spec = setup(1, 2.0, 2.0).with_eps(0.1);
    let a = simulate_refined(&spec, 0).unwrap();
    let b = simulate_refined(&spec, 1).unwrap();
    assert!(matches!(detect_lifespan(&a, &b), Err(Error::Inconclusive(_))));
}

#[test]
fn solution_dominates_the_free_wave() {
    for (n, eps) in [(1u32, 0.2f64), (2, 1.0), (3, 4.0)] {
        let mut s = setup(n, 2.0, 200.0);
        s.trace_stride = 40;
        let r = simulate(&s.with_eps(eps)).unwrap();
        let g = s.g_profile.scaled(eps);
        for &(t, m) in r.max_amplitude_trace.iter().filter(|&&(t, _)| t > 0.0 && t < r.t_h) {
            let reach = 1.0 + t;
            let free_max =
                (0..=200).map(|i| free_wave(n, &g, reach * i as f64 / 200.0, t).unwrap().abs()).fold(0.0, f64::max);
            assert!(m >= 0.95 * free_max, "n = {n}, t = {t}: {m} < {free_max}");
        }
    }
}
