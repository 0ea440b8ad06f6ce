use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use blowup_core::exponents::{gamma, predicted_lifespan_law, strauss_exponent};
use blowup_core::proof::{
    default_m_grid, default_step_samples, epsilon_zero, estimate_m, lifespan_upper_bound, slicing_l,
    verify_iteration_step, LifespanBound, MEstimate, SlicingConstants, VerdictStatus,
};
use blowup_core::sweep::{
    fit_critical_law, fit_log_a, fit_power_law, moment_of_g, points_from_records, predicted_exponent, read_records,
    run_sweep, write_points_csv, FitReport, RecordStatus, SweepConfig, Verdict, CRITICAL_R2_THRESHOLD,
    POWER_LAW_TOLERANCE,
};
use blowup_core::wave::{simulate_refined, Setup};
use blowup_core::{Error, LifespanLawF64, Profile, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{
    BoundArgs, Cli, Command, ExponentsArgs, FitArgs, Format, Model, SimulateArgs, SweepArgs, VerifyStepArgs,
};
use crate::exit;

/// Directory for sweep output when neither the config nor `--output` names a file.
pub const OUTPUT_DIR_VAR: &str = "BLOWUP_OUTPUT_DIR";

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) | Error::NumericalFailure(_) | Error::NoBracket(_) => exit::INCONCLUSIVE,
        Error::Domain(_) | Error::Precondition(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) => exit::USAGE,
    }
}

pub fn dispatch(cli: &Cli) -> Result<u8> {
    let out = Output { format: cli.format, quiet: cli.quiet };
    match &cli.command {
        Command::Exponents(a) => exponents(&out, a),
        Command::Bound(a) => bound(&out, a),
        Command::VerifyStep(a) => verify_step(&out, a, cli.seed),
        Command::Simulate(a) => simulate(&out, a),
        Command::Sweep(a) => sweep(&out, a),
        Command::Fit(a) => fit(&out, a),
    }
}

struct Output {
    format: Format,
    quiet: bool,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        let mut stdout = std::io::stdout().lock();
        match self.format {
            Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(value)?)?,
            Format::Text => write!(stdout, "{}", text())?,
        }
        Ok(())
    }

    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn parse_list(s: &str, what: &str, len: usize) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("{what} `{s}`: {e}")))?;
    if parts.len() != len {
        return Err(Error::Config(format!("{what} `{s}` needs {len} comma-separated numbers")));
    }
    Ok(parts)
}

fn parse_profile(s: Option<&str>) -> Result<Profile<f64>> {
    let g = match s {
        None => Profile::default(),
        Some(s) => {
            let v = parse_list(s, "--profile", 3)?;
            Profile::bump(v[0], v[1], v[2])
        }
    };
    g.validate()?;
    Ok(g)
}

#[derive(Serialize)]
struct ExponentsOut {
    n: u32,
    p0: Option<f64>,
    p: Option<f64>,
    gamma: Option<f64>,
    gamma_row: Vec<(f64, f64)>,
    law_nonzero_moment: Option<LifespanLawF64>,
    law_zero_moment: Option<LifespanLawF64>,
    /// Set when `p > p_0(n)`: small data exist globally.
    global_existence: bool,
}

fn exponents(out: &Output, a: &ExponentsArgs) -> Result<u8> {
    if a.n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let p0 = if a.n >= 2 { Some(strauss_exponent::<f64>(a.n)?) } else { None };
    let p = a.p.or(p0);
    let gamma_row = [1.5, 2.0, 2.5, 3.0].iter().map(|&q| Ok((q, gamma(a.n, q)?))).collect::<Result<Vec<_>>>()?;
    let (mut law_nonzero_moment, mut law_zero_moment, mut global_existence) = (None, None, false);
    let mut g = None;
    if let Some(p) = p {
        g = Some(gamma(a.n, p)?);
        match (predicted_lifespan_law(a.n, p, false), predicted_lifespan_law(a.n, p, true)) {
            (Ok(l0), Ok(l1)) => {
                law_nonzero_moment = Some(l0);
                law_zero_moment = Some(l1);
            }
            _ if p0.is_some_and(|p0| p > p0) => global_existence = true,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let report =
        ExponentsOut { n: a.n, p0, p, gamma: g, gamma_row, law_nonzero_moment, law_zero_moment, global_existence };
    out.emit(&report, || {
        let mut s = format!("n        {}\n", report.n);
        if let Some(p0) = report.p0 {
            s += &format!("p_0(n)   {p0}\n");
        }
        if let (Some(p), Some(g)) = (report.p, report.gamma) {
            s += &format!("p        {p}\ngamma    {g}\n");
        }
        s += "gamma row:\n";
        for (q, g) in &report.gamma_row {
            s += &format!("  p = {q:<4} gamma = {g}\n");
        }
        if let (Some(a), Some(b)) = (&report.law_nonzero_moment, &report.law_zero_moment) {
            s += &format!("law (moment != 0)  {:?} [{:?}]\n", a.kind, a.case_tag);
            s += &format!("law (moment == 0)  {:?} [{:?}]\n", b.kind, b.case_tag);
        }
        if report.global_existence {
            s += "p > p_0(n): small data exist globally, no lifespan law\n";
        }
        s
    })?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct BoundOut {
    constants: SlicingConstants<f64>,
    m_source: &'static str,
    m_estimate: Option<MEstimate<f64>>,
    rate_exponent: f64,
    c_final: f64,
    eps_zero: f64,
    bound: Option<LifespanBound<f64>>,
}

fn bound(out: &Output, a: &BoundArgs) -> Result<u8> {
    let g = parse_profile(a.profile.as_deref())?;
    let delta = a.delta.unwrap_or(g.support_radius() / 8.0);
    let p = match a.p {
        Some(p) => p,
        None => strauss_exponent(a.n)?,
    };
    let (m, m_source, m_estimate) = match a.m {
        Some(m) => (m, "given", None),
        None => {
            out.info("estimating M by quadrature on the default grid");
            let est = estimate_m(a.n, p, &g, delta, &default_m_grid(delta))?;
            (est.m, "estimated", Some(est))
        }
    };
    let constants = SlicingConstants::with_power(a.n, p, delta, m)?;
    let eps_zero = epsilon_zero(&constants)?;
    let bound = a.eps.map(|eps| lifespan_upper_bound(eps, &constants)).transpose()?;
    let report = BoundOut {
        constants,
        m_source,
        m_estimate,
        rate_exponent: constants.rate_exponent(),
        c_final: constants.c_final(),
        eps_zero,
        bound,
    };
    out.emit(&report, || {
        let c = &report.constants;
        let mut s = format!(
            "n          {}\np          {}\ndelta      {}\nk          {}\nM          {} ({})\nC_geom     {}\nN          {}\nS_p        {}\nA          {}\nC = 2A     {}\np(p-1)     {}\neps_0      {}\n",
            c.n, c.p, c.delta, c.k, c.m, report.m_source, c.c_geom, c.n_coeff, c.s_p, c.a_coeff, report.c_final,
            report.rate_exponent, report.eps_zero
        );
        if let Some(b) = &report.bound {
            s += &format!("eps        {}\nlog bound  {}\n", b.eps, b.ln_bound);
            match b.bound {
                Some(v) => s += &format!("bound      {v}\n"),
                None => s += "bound      overflows f64\n",
            }
        }
        s
    })?;
    Ok(exit::OK)
}

fn random_samples(j: u32, k: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower = slicing_l::<f64>(j + 1) * k;
    (0..count)
        .map(|_| {
            let d = lower * rng.gen_range(0.0..16f64.ln()).exp();
            let r = d * rng.gen_range(1.0..3.0);
            (r, r + d)
        })
        .collect()
}

fn verify_step(out: &Output, a: &VerifyStepArgs, seed: u64) -> Result<u8> {
    let constants = SlicingConstants::new(a.n, a.delta, a.m)?;
    let samples = match a.samples {
        None => default_step_samples(a.j, constants.k),
        Some(count) => random_samples(a.j, constants.k, count, seed),
    };
    let verdict = verify_iteration_step(a.j, &constants, a.eps, &samples)?;
    out.emit(&verdict, || {
        let mut s = format!("step j = {} -> {}  (n = {}, p = {})\n", verdict.j, verdict.j + 1, verdict.n, verdict.p);
        for pt in &verdict.points {
            s += &format!(
                "  r = {:<12.6} t = {:<12.6} computed = {:.10e} claimed = {:.10e} [{:?}]\n",
                pt.r, pt.t, pt.computed_lower, pt.claimed, pt.status
            );
        }
        s += &format!(
            "status {:?}, max relative quadrature error {:.3e}\n",
            verdict.status, verdict.quadrature_error_estimate
        );
        s
    })?;
    Ok(match verdict.status {
        VerdictStatus::Passed => exit::OK,
        VerdictStatus::Failed => exit::FAILED,
        VerdictStatus::Inconclusive => exit::INCONCLUSIVE,
    })
}

fn simulate(out: &Output, a: &SimulateArgs) -> Result<u8> {
    let mut setup = Setup::new(a.n, a.p);
    setup.g_profile = parse_profile(a.profile.as_deref())?;
    setup.dx = a.dx;
    setup.courant = a.courant;
    setup.cap = a.cap;
    setup.t_max = a.t_max;
    setup.nonlinear = !a.linear;
    setup.regularize_origin = !a.staggered;
    setup.trace_stride = a.trace_stride;
    let spec = setup.with_eps(a.eps);
    let record = simulate_refined(&spec, a.refine)?;
    if let Some(path) = &a.trace {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "t,max_abs_u")?;
        for (t, m) in &record.max_amplitude_trace {
            writeln!(w, "{t},{m}")?;
        }
        w.flush()?;
        out.info(format!("trace written to {}", path.display()));
    }
    out.emit(&record, || {
        format!(
            "blew_up  {}\nT_h      {}\nsteps    {}\ndt       {}\nmax|u|   {}\n",
            record.blew_up,
            record.t_h,
            record.steps,
            record.dt,
            record.max_amplitude_trace.last().map_or(0.0, |p| p.1)
        )
    })?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct SweepEntry {
    eps: f64,
    status: RecordStatus,
    t_h: Option<f64>,
    uncertainty: Option<f64>,
    message: Option<String>,
}

#[derive(Serialize)]
struct SweepOut {
    output: PathBuf,
    entries: Vec<SweepEntry>,
}

fn sweep(out: &Output, a: &SweepArgs) -> Result<u8> {
    let mut config = SweepConfig::<f64>::load(&a.config)?;
    if let Some(path) = &a.output {
        config.output = Some(path.clone());
    }
    let path = config.output.clone().unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")).join("sweep.jsonl")
    });
    config.output = Some(path.clone());
    out.info(format!("sweeping {} values of eps into {}", config.eps_list.len(), path.display()));
    let records = run_sweep(&config)?;
    let flagged = records.iter().filter(|r| r.flagged()).count();
    if flagged > 0 {
        out.info(format!("{flagged} record(s) flagged and excluded from fits"));
    }
    let report = SweepOut {
        output: path,
        entries: records
            .iter()
            .map(|r| SweepEntry {
                eps: r.eps,
                status: r.status,
                t_h: r.t_h,
                uncertainty: r.uncertainty,
                message: r.message.clone(),
            })
            .collect(),
    };
    out.emit(&report, || {
        let mut s = String::from("eps,status,T_h,uncertainty\n");
        for e in &report.entries {
            let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
            s += &format!("{},{:?},{},{}\n", e.eps, e.status, opt(e.t_h), opt(e.uncertainty));
        }
        s
    })?;
    Ok(exit::OK)
}

fn fit(out: &Output, a: &FitArgs) -> Result<u8> {
    if !a.input.is_file() {
        return Err(Error::Config(format!("input file {} does not exist", a.input.display())));
    }
    let records = read_records::<f64>(&a.input)?;
    let points = points_from_records(&records);
    let (n, p, moment) = match &a.predicted_from {
        Some(s) => {
            let v = parse_list(s, "--predicted-from", 3)?;
            if v[0] < 1.0 || v[0].fract() != 0.0 {
                return Err(Error::Config(format!("--predicted-from: n = {} is not a dimension", v[0])));
            }
            (v[0] as u32, v[1], v[2])
        }
        None => {
            let run = records
                .iter()
                .flat_map(|r| r.runs.first())
                .next()
                .ok_or_else(|| Error::Config("records carry no runs to read n, p and g from".into()))?;
            let s = &run.spec.setup;
            (s.n, s.p, moment_of_g(&s.g_profile, s.n)?)
        }
    };
    let fitted = match a.model {
        Model::Power => {
            let predicted = predicted_exponent(n, p, moment)?.ok_or_else(|| {
                Error::Config(format!("the law for n = {n}, p = {p} is not a power law; try --model critical or log-a"))
            })?;
            fit_power_law(&points, predicted, a.tolerance.unwrap_or(POWER_LAW_TOLERANCE))
        }
        Model::Critical => fit_critical_law(&points, p, a.tolerance.unwrap_or(CRITICAL_R2_THRESHOLD)),
        Model::LogA => fit_log_a(&points, a.tolerance.unwrap_or(POWER_LAW_TOLERANCE)),
    };
    let report: FitReport<f64> = match fitted {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit::INCONCLUSIVE);
        }
    };
    if let Some(path) = &a.csv {
        write_points_csv(&points, BufWriter::new(File::create(path)?))?;
        out.info(format!("points written to {}", path.display()));
    }
    out.emit(&report, || {
        let mut s = format!(
            "model      {:?}\nfitted     {}\nintercept  {}\nr_squared  {}\n",
            report.model, report.fitted, report.intercept, report.r_squared
        );
        if let (Some(pr), Some(gap)) = (report.predicted, report.relative_gap) {
            s += &format!("predicted  {pr}\ngap        {gap}\n");
        }
        s += &format!("points     {}\nverdict    {:?}\n", report.points, report.verdict);
        s
    })?;
    Ok(match report.verdict {
        Verdict::Pass => exit::OK,
        Verdict::Fail => exit::FAILED,
    })
}
