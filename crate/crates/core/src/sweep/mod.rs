//! ε-sweeps over the solver, their JSON-lines records and the scaling fits.

mod fit;

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::profile::Profile;
use crate::quadrature::Simpson;
use crate::scalar::Real;
use crate::wave::{detect_lifespan, simulate_refined, RunRecord, Setup};

pub use fit::{
    fit_critical_law, fit_log_a, fit_power_law, points_from_records, predicted_exponent, write_points_csv, FitModel,
    FitReport, LifespanPoint, Verdict, CRITICAL_R2_THRESHOLD, MIN_FIT_POINTS, POWER_LAW_TOLERANCE,
};

/// Bumped whenever a field of [`SweepRecord`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct SweepConfig<T> {
    pub base: Setup<T>,
    /// Strictly decreasing, positive.
    pub eps_list: Vec<T>,
    #[serde(default = "default_levels")]
    pub refinement_levels: u32,
    /// Records are appended here as they complete, in `eps_list` order.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; `None` uses the available parallelism.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_levels() -> u32 {
    2
}

impl<T: Real> SweepConfig<T> {
    pub fn new(base: Setup<T>, eps_list: Vec<T>) -> Self {
        SweepConfig { base, eps_list, refinement_levels: 2, output: None, threads: None }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::Config("eps_list is empty".into()));
        }
        if self.eps_list.iter().any(|&e| !(e > T::zero()) || !e.is_finite()) {
            return Err(Error::Config("every eps must be positive and finite".into()));
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("eps_list must be strictly decreasing".into()));
        }
        if self.refinement_levels < 2 {
            return Err(Error::Config("refinement_levels must be at least 2".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.base.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    /// The refinement pair disagreed or nothing blew up before `t_max`.
    Inconclusive,
    /// A run hit a numerical failure.
    Failed,
}

/// One line of a sweep's output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct SweepRecord<T> {
    pub schema_version: u32,
    /// Seconds since the Unix epoch; the only field allowed to differ between reruns.
    pub timestamp: u64,
    pub index: usize,
    pub eps: T,
    pub n: u32,
    pub p: T,
    pub status: RecordStatus,
    pub t_h: Option<T>,
    pub uncertainty: Option<T>,
    pub message: Option<String>,
    /// `f ≡ 0`, `g ≥ 0`, `g ≢ 0`.
    pub within_theorem_hypotheses: bool,
    /// One run per refinement level, coarsest first.
    pub runs: Vec<RunRecord<T>>,
}

impl<T: Real> SweepRecord<T> {
    pub fn flagged(&self) -> bool {
        self.status != RecordStatus::Ok
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn run_entry<T: Real>(config: &SweepConfig<T>, index: usize) -> SweepRecord<T> {
    let eps = config.eps_list[index];
    let spec = config.base.with_eps(eps);
    let mut record = SweepRecord {
        schema_version: SCHEMA_VERSION,
        timestamp: 0,
        index,
        eps,
        n: config.base.n,
        p: config.base.p,
        status: RecordStatus::Ok,
        t_h: None,
        uncertainty: None,
        message: None,
        within_theorem_hypotheses: config.base.within_theorem_hypotheses(),
        runs: Vec::new(),
    };
    for level in 0..config.refinement_levels {
        match simulate_refined(&spec, level) {
            Ok(run) => record.runs.push(run),
            Err(e) => {
                record.status = RecordStatus::Failed;
                record.message = Some(e.to_string());
                record.timestamp = now();
                return record;
            }
        }
    }
    let k = record.runs.len();
    match detect_lifespan(&record.runs[k - 2], &record.runs[k - 1]) {
        Ok(est) => {
            record.t_h = Some(est.t_h);
            record.uncertainty = Some(est.uncertainty);
        }
        Err(e) => {
            record.status = RecordStatus::Inconclusive;
            record.message = Some(e.to_string());
        }
    }
    record.timestamp = now();
    record
}

/// Runs every `eps` of the sweep.
///
/// Entries run concurrently; records are appended to `config.output` in
/// `eps_list` order as soon as all earlier ones are done, so an interrupted
/// sweep leaves a valid prefix. Failed or inconclusive entries are flagged
/// and the sweep carries on.
pub fn run_sweep<T: Real>(config: &SweepConfig<T>) -> Result<Vec<SweepRecord<T>>> {
    config.validate()?;
    let mut sink = match &config.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Some(OpenOptions::new().create(true).append(true).open(path)?)
        }
        None => None,
    };
    let total = config.eps_list.len();
    let workers =
        config.threads.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).min(total);
    let next_task = AtomicUsize::new(0);
    let mut slots: Vec<Option<SweepRecord<T>>> = vec![None; total];
    let mut written = 0;
    let mut io_error = None;
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let next_task = &next_task;
            scope.spawn(move || loop {
                let i = next_task.fetch_add(1, Ordering::Relaxed);
                if i >= total || tx.send(run_entry(config, i)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for record in rx {
            let i = record.index;
            slots[i] = Some(record);
            while written < total {
                let Some(ready) = slots[written].as_ref() else { break };
                if let (Some(file), None) = (sink.as_mut(), io_error.as_ref()) {
                    if let Err(e) = append_record(file, ready) {
                        io_error = Some(e);
                    }
                }
                written += 1;
            }
        }
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    Ok(slots.into_iter().map(|r| r.expect("every entry reports")).collect())
}

fn append_record<T: Real>(file: &mut File, record: &SweepRecord<T>) -> Result<()> {
    let mut line = serde_json::to_string(record)?;
    line.push('\n');
    file.write_all(line.as_bytes())?;
    file.flush()?;
    Ok(())
}

/// Reads a JSON-lines record file, skipping blank lines.
pub fn read_records<T: Real>(path: &Path) -> Result<Vec<SweepRecord<T>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SweepRecord<T> = serde_json::from_str(&line)
            .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "{}:{}: schema version {} is not {SCHEMA_VERSION}",
                path.display(),
                lineno + 1,
                record.schema_version
            )));
        }
        out.push(record);
    }
    Ok(out)
}

/// `∫_{R^n} g`, with `g` read as a radial profile for `n ≥ 2`.
pub fn moment_of_g<T: Real>(g: &Profile<T>, n: u32) -> Result<T> {
    if n == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    match *g {
        Profile::Zero => return Ok(T::zero()),
        Profile::Constant { value } if value == T::zero() => return Ok(T::zero()),
        Profile::Constant { value } => return Ok(value.signum() * T::infinity()),
        Profile::Dipole { .. } if n > 1 => return Err(domain("dipole data are one-dimensional")),
        _ => {}
    }
    if n == 1 {
        let r = g.support_radius();
        return Ok(g.primitive(r) - g.primitive(-r));
    }
    // |S^{n-1}|: ω_1 = 2, ω_2 = 2π, ω_{m+2} = 2π ω_m / m.
    let two_pi = T::lit(2.0) * T::PI();
    let (mut m, mut area) = if n % 2 == 1 { (1, T::lit(2.0)) } else { (2, two_pi) };
    while m < n {
        area = area * two_pi / T::from_count(m as usize);
        m += 2;
    }
    let radius = g.support_radius();
    let nm1 = (n - 1) as i32;
    let quad = Simpson::with_rel_tol(T::clamp_tol(T::lit(1e-13)));
    let radial = quad.integrate(|r| g.eval(r) * r.powi(nm1), T::zero(), radius);
    Ok(area * radial.value)
}
