//! Configuration-driven experiments and their CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::capacity::capacity_on;
use crate::channels::{sample_gain, sample_states, FadingSpec, ScenarioKind, ScenarioSpec};
use crate::error::{Error, Result};
use crate::numerics::stats::variance;
use crate::numerics::{db_to_linear, RngStream};
use crate::power::{solve_lambda_on, ConstraintSet};
use crate::rap::{
    ks_rayleigh, random_weights, sample_basis_channels, equivalent_gain, sample_equivalent_amplitudes,
    sample_rap_states, PhaseProfiles, RapConfig,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// Stream ids, one family per experiment.
const STREAM_TRAIN: u64 = 1;
const STREAM_EVAL: u64 = 2;
const STREAM_PROFILE: u64 = 3;
const STREAM_PDF: u64 = 4;
const STREAM_TIMESERIES: u64 = 5;
const STREAM_BASIS: u64 = 6;

/// Deep-fade threshold as a fraction of `√ḡ`.
pub const DEEP_FADE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenarios: Vec<ScenarioKind>,
    pub q_av_db: Vec<f64>,
    /// `Q_p/Q_av`; `f64::INFINITY` disables the peak limit.
    pub rho: Vec<f64>,
    pub k_s_db: f64,
    pub k_sp_db: f64,
    pub k_ps_db: f64,
    pub gain_s_db: f64,
    pub gain_sp_db: f64,
    pub gain_ps_db: f64,
    pub pu_power_db: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub m_grid: Vec<usize>,
    pub bins: usize,
    pub duration: usize,
    pub timeseries_m: usize,
    pub basis_scenarios: Vec<ScenarioKind>,
    pub basis_q_av_db: f64,
    pub basis_rho: f64,
    pub lambda_rel_tol: f64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenarios: ScenarioKind::ALL.to_vec(),
            q_av_db: (0..11).map(|i| -5.0 + 2.0 * i as f64).collect(),
            rho: vec![1.2, f64::INFINITY],
            k_s_db: 10.0,
            k_sp_db: 10.0,
            k_ps_db: 10.0,
            gain_s_db: 0.0,
            gain_sp_db: 0.0,
            gain_ps_db: 0.0,
            pu_power_db: 1.0,
            n_samples: 100_000,
            seed: 1,
            m_grid: vec![1, 2, 3, 5, 8],
            bins: 50,
            duration: 1000,
            timeseries_m: 5,
            basis_scenarios: vec![
                ScenarioKind::RicianRayleigh,
                ScenarioKind::RicianRician,
                ScenarioKind::RayleighRayleigh,
            ],
            basis_q_av_db: 0.0,
            basis_rho: f64::INFINITY,
            lambda_rel_tol: 1e-6,
            output: None,
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| format!("not a number: {s:?}")),
    }
}

fn parse_int<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    let t = s.trim().replace('_', "");
    t.parse().map_err(|_| format!("not an integer: {s:?}"))
}

/// Comma list, or `start:step:stop` inclusive.
fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    if let [a, b, c] = s.split(':').collect::<Vec<_>>()[..] {
        let (start, step, stop) = (parse_f64(a)?, parse_f64(b)?, parse_f64(c)?);
        if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
            return Err(format!("bad range {s:?}"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    s.split(',').map(parse_f64).collect()
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|t| f(t.trim())).collect()
}

fn parse_scenarios(s: &str) -> std::result::Result<Vec<ScenarioKind>, String> {
    parse_list(s, |t| t.parse::<ScenarioKind>().map_err(|e| e.to_string()))
}

impl ExperimentConfig {
    /// Flat `key = value` text; `#` starts a comment. Missing keys keep their
    /// defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}: {e}", lineno + 1, key.trim())))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "scenarios" => self.scenarios = parse_scenarios(value)?,
            "q_av_db" => self.q_av_db = parse_grid(value)?,
            "rho" => self.rho = parse_list(value, parse_f64)?,
            "k_factor_db" => {
                let k = parse_f64(value)?;
                (self.k_s_db, self.k_sp_db, self.k_ps_db) = (k, k, k);
            }
            "k_s_db" => self.k_s_db = parse_f64(value)?,
            "k_sp_db" => self.k_sp_db = parse_f64(value)?,
            "k_ps_db" => self.k_ps_db = parse_f64(value)?,
            "gain_s_db" => self.gain_s_db = parse_f64(value)?,
            "gain_sp_db" => self.gain_sp_db = parse_f64(value)?,
            "gain_ps_db" => self.gain_ps_db = parse_f64(value)?,
            "pu_power_db" => self.pu_power_db = parse_f64(value)?,
            "n_samples" => self.n_samples = parse_int(value)?,
            "seed" => self.seed = parse_int(value)?,
            "m_grid" => self.m_grid = parse_list(value, parse_int)?,
            "bins" => self.bins = parse_int(value)?,
            "duration" => self.duration = parse_int(value)?,
            "timeseries_m" => self.timeseries_m = parse_int(value)?,
            "basis_scenarios" => self.basis_scenarios = parse_scenarios(value)?,
            "basis_q_av_db" => self.basis_q_av_db = parse_f64(value)?,
            "basis_rho" => self.basis_rho = parse_f64(value)?,
            "lambda_rel_tol" => self.lambda_rel_tol = parse_f64(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.scenarios.is_empty() || self.q_av_db.is_empty() || self.rho.is_empty() {
            return bad("scenarios, q_av_db and rho must be non-empty");
        }
        if self.q_av_db.iter().any(|q| !q.is_finite()) {
            return bad("q_av_db values must be finite");
        }
        if self.rho.iter().chain([&self.basis_rho]).any(|r| !(*r > 1.0)) {
            return bad("rho must exceed 1");
        }
        let finite = [
            self.k_s_db,
            self.k_sp_db,
            self.k_ps_db,
            self.gain_s_db,
            self.gain_sp_db,
            self.gain_ps_db,
            self.pu_power_db,
            self.basis_q_av_db,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("dB parameters must be finite");
        }
        if self.n_samples < 10_000 {
            return bad("n_samples must be at least 10000");
        }
        if self.m_grid.is_empty() || self.m_grid.contains(&0) || self.timeseries_m == 0 {
            return bad("basis-pattern counts must be at least 1");
        }
        if self.bins == 0 {
            return bad("bins must be positive");
        }
        if self.duration < 100 {
            return bad("duration must be at least 100 instants");
        }
        if !(self.lambda_rel_tol > 0.0 && self.lambda_rel_tol <= 0.05) {
            return bad("lambda_rel_tol must lie in (0, 0.05]");
        }
        Ok(())
    }

    /// Canonical text form; [`ExperimentConfig::parse`] reads it back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("scenarios", join(&self.scenarios, |k| k.label().to_string()));
        kv("q_av_db", join(&self.q_av_db, |x| fmt_num(*x)));
        kv("rho", join(&self.rho, |x| fmt_num(*x)));
        kv("k_s_db", fmt_num(self.k_s_db));
        kv("k_sp_db", fmt_num(self.k_sp_db));
        kv("k_ps_db", fmt_num(self.k_ps_db));
        kv("gain_s_db", fmt_num(self.gain_s_db));
        kv("gain_sp_db", fmt_num(self.gain_sp_db));
        kv("gain_ps_db", fmt_num(self.gain_ps_db));
        kv("pu_power_db", fmt_num(self.pu_power_db));
        kv("n_samples", self.n_samples.to_string());
        kv("seed", self.seed.to_string());
        kv("m_grid", join(&self.m_grid, |m| m.to_string()));
        kv("bins", self.bins.to_string());
        kv("duration", self.duration.to_string());
        kv("timeseries_m", self.timeseries_m.to_string());
        kv("basis_scenarios", join(&self.basis_scenarios, |k| k.label().to_string()));
        kv("basis_q_av_db", fmt_num(self.basis_q_av_db));
        kv("basis_rho", fmt_num(self.basis_rho));
        kv("lambda_rel_tol", fmt_num(self.lambda_rel_tol));
        if let Some(p) = &self.output {
            kv("output", p.display().to_string());
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded. The output path is
    /// excluded so the same experiment hashes the same wherever it is written.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output = None;
        Sha256::digest(canon.to_text().as_bytes())
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    pub fn pu_power(&self) -> f64 {
        db_to_linear(self.pu_power_db)
    }

    /// The named scenario under this config's K-factors and mean powers.
    pub fn scenario(&self, kind: ScenarioKind) -> Result<ScenarioSpec> {
        let link = |rician: bool, k_db: f64, g_db: f64| {
            let g = db_to_linear(g_db);
            if kind == ScenarioKind::Awgn {
                FadingSpec::deterministic(g)
            } else if rician {
                FadingSpec::rician(db_to_linear(k_db), g)
            } else {
                FadingSpec::rayleigh(g)
            }
        };
        ScenarioSpec::new(
            link(kind.rician_secondary(), self.k_s_db, self.gain_s_db)?,
            link(kind.rician_interference(), self.k_sp_db, self.gain_sp_db)?,
            link(kind.rician_interference(), self.k_ps_db, self.gain_ps_db)?,
            self.pu_power(),
        )
    }

    /// The frozen line-of-sight phases for an `m × m` pattern pair.
    pub fn phase_profiles(&self, m: usize) -> PhaseProfiles {
        let mut rng = RngStream::new(self.seed, STREAM_PROFILE).substream(m as u64);
        PhaseProfiles::random(m, m, &mut rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CapacitySweep,
    RapPdf,
    RapTimeseries,
    BasisSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::CapacitySweep,
        Experiment::RapPdf,
        Experiment::RapTimeseries,
        Experiment::BasisSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CapacitySweep => "capacity-sweep",
            Experiment::RapPdf => "rap-pdf",
            Experiment::RapTimeseries => "rap-timeseries",
            Experiment::BasisSweep => "basis-sweep",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<Table> {
        match self {
            Experiment::CapacitySweep => run_capacity_sweep(cfg),
            Experiment::RapPdf => run_pdf_experiment(cfg),
            Experiment::RapTimeseries => run_timeseries(cfg),
            Experiment::BasisSweep => run_basis_sweep(cfg),
        }
    }
}

/// An experiment's output rows, already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: Experiment,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Rows whose solver failed.
    pub failures: usize,
}

impl Table {
    fn new(experiment: Experiment, columns: &[&'static str]) -> Self {
        Self {
            experiment,
            columns: columns.to_vec(),
            rows: Vec::new(),
            failures: 0,
        }
    }

    /// The CSV file: one `#` comment line, the column header, then the rows.
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> Result<Vec<u8>> {
        let mut out = format!(
            "# experiment={} config_sha256={} seed={} version={}\n",
            self.experiment.name(),
            cfg.hash(),
            cfg.seed,
            VERSION
        )
        .into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(&self.columns).map_err(io)?;
            for row in &self.rows {
                w.write_record(row).map_err(io)?;
            }
            w.flush()?;
        }
        Ok(out)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Capacity of each scenario, `ρ` and `Q_av`. Every scenario shares the same
/// training and evaluation streams; λ is solved on the training set and the
/// capacity is averaged over the independent evaluation set.
pub fn run_capacity_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(
        Experiment::CapacitySweep,
        &["q_av_db", "scenario", "rho", "capacity_bps_hz", "std_error", "lambda", "status"],
    );
    let train_rng = RngStream::new(cfg.seed, STREAM_TRAIN);
    let eval_rng = RngStream::new(cfg.seed, STREAM_EVAL);
    let mut kinds = cfg.scenarios.clone();
    kinds.sort();
    kinds.dedup();
    let mut rhos = cfg.rho.clone();
    rhos.sort_by(f64::total_cmp);
    rhos.dedup();
    let mut qs = cfg.q_av_db.clone();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    for kind in kinds {
        let scen = cfg.scenario(kind)?;
        let train = sample_states(&scen, cfg.n_samples, &train_rng);
        let eval = sample_states(&scen, cfg.n_samples, &eval_rng);
        for &rho in &rhos {
            for &q_db in &qs {
                let mut row = vec![fmt_num(q_db), kind.label().to_string(), fmt_num(rho)];
                let solved = ConstraintSet::with_rho(db_to_linear(q_db), rho, scen.pu_power)
                    .and_then(|c| solve_lambda_on(&train, c, cfg.lambda_rel_tol));
                match solved {
                    Ok(policy) => {
                        let cap = capacity_on(&eval, &policy);
                        row.extend([
                            fmt_num(cap.bits_per_hz),
                            fmt_num(cap.std_error),
                            fmt_num(policy.lambda()),
                            if policy.is_slack() { "slack" } else { "ok" }.to_string(),
                        ]);
                    }
                    Err(e) => {
                        table.failures += 1;
                        row.extend([String::new(), String::new(), String::new(), format!("error: {e}")]);
                    }
                }
                table.rows.push(row);
            }
        }
    }
    Ok(table)
}

/// Range of the amplitude histograms, in units of `√ḡ`.
const HIST_MAX: f64 = 3.0;

fn histogram(samples: &[f64], bins: usize, max: f64) -> Vec<f64> {
    let width = max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let b = (x / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / (samples.len() as f64 * width)).collect()
}

/// Amplitude densities of the SU-to-PU link before and after precoding, per
/// pattern count, followed by KS-vs-Rayleigh rows (`ks_statistic`,
/// `ks_p_value`) for each pattern count.
pub fn run_pdf_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let spec = FadingSpec::rician(db_to_linear(cfg.k_sp_db), db_to_linear(cfg.gain_sp_db))?;
    let g = spec.mean_power();
    let root = RngStream::new(cfg.seed, STREAM_PDF);
    let before: Vec<f64> = crate::numerics::sharded(cfg.n_samples, &root.substream(0), |r| sample_gain(&spec, r).norm());
    let before_ks = ks_rayleigh(&before, g)?;
    let max = HIST_MAX * g.sqrt();
    let dens_before = histogram(&before, cfg.bins, max);
    let mut table = Table::new(
        Experiment::RapPdf,
        &["m", "amplitude_bin", "density_before", "density_after"],
    );
    let mut summaries = Vec::new();
    for &m in &cfg.m_grid {
        let phases = cfg.phase_profiles(m).su_to_pu;
        let after = sample_equivalent_amplitudes(&spec, &phases, cfg.n_samples, &root.substream(m as u64))?;
        let dens_after = histogram(&after, cfg.bins, max);
        let width = max / cfg.bins as f64;
        for b in 0..cfg.bins {
            table.rows.push(vec![
                m.to_string(),
                fmt_num((b as f64 + 0.5) * width),
                fmt_num(dens_before[b]),
                fmt_num(dens_after[b]),
            ]);
        }
        let ks = ks_rayleigh(&after, g)?;
        summaries.push(vec![m.to_string(), "ks_statistic".into(), fmt_num(before_ks.statistic), fmt_num(ks.statistic)]);
        summaries.push(vec![m.to_string(), "ks_p_value".into(), fmt_num(before_ks.p_value), fmt_num(ks.p_value)]);
    }
    table.rows.extend(summaries);
    Ok(table)
}

/// Paired amplitude trajectories of one interference link with and without
/// precoding, then `deep_fades` and `variance` summary rows.
pub fn run_timeseries(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let spec = FadingSpec::rician(db_to_linear(cfg.k_sp_db), db_to_linear(cfg.gain_sp_db))?;
    let m = cfg.timeseries_m;
    let phases = cfg.phase_profiles(m).su_to_pu;
    let mut rng = RngStream::new(cfg.seed, STREAM_TIMESERIES);
    let mut table = Table::new(Experiment::RapTimeseries, &["k", "amplitude_before", "amplitude_after"]);
    let mut before = Vec::with_capacity(cfg.duration);
    let mut after = Vec::with_capacity(cfg.duration);
    for k in 0..cfg.duration {
        let plain = sample_gain(&spec, &mut rng).norm();
        let w = random_weights(m, &mut rng)?;
        let h = sample_basis_channels(&spec, &phases, &mut rng);
        let precoded = equivalent_gain(&w, &h)?.norm();
        table.rows.push(vec![k.to_string(), fmt_num(plain), fmt_num(precoded)]);
        before.push(plain);
        after.push(precoded);
    }
    let threshold = DEEP_FADE * spec.mean_power().sqrt();
    let fades = |xs: &[f64]| xs.iter().filter(|&&x| x < threshold).count();
    table.rows.push(vec!["deep_fades".into(), fades(&before).to_string(), fades(&after).to_string()]);
    table.rows.push(vec!["variance".into(), fmt_num(variance(&before)), fmt_num(variance(&after))]);
    Ok(table)
}

/// Capacity against the number of basis patterns (`M_tx = M_rx = M`). Smart
/// receive combining is used when the secondary link is Rician; `M = 1` is
/// the unprecoded baseline.
pub fn run_basis_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(
        Experiment::BasisSweep,
        &["m", "scenario", "smart_rx", "capacity_bps_hz", "std_error", "status"],
    );
    let root = RngStream::new(cfg.seed, STREAM_BASIS);
    let (train_rng, eval_rng) = (root.substream(0), root.substream(1));
    let mut kinds = cfg.basis_scenarios.clone();
    kinds.sort();
    kinds.dedup();
    let mut ms = cfg.m_grid.clone();
    ms.sort();
    ms.dedup();
    for kind in kinds {
        let scen = cfg.scenario(kind)?;
        let smart = scen.su_link.specular_amplitude() > 0.0 && kind != ScenarioKind::Awgn;
        for &m in &ms {
            let mut row = vec![m.to_string(), kind.label().to_string(), smart.to_string()];
            let profiles = cfg.phase_profiles(m);
            let result = RapConfig::new(m, m, smart).and_then(|rap| {
                let train = sample_rap_states(&scen, &rap, &profiles, cfg.n_samples, &train_rng)?;
                let eval = sample_rap_states(&scen, &rap, &profiles, cfg.n_samples, &eval_rng)?;
                let c = ConstraintSet::with_rho(db_to_linear(cfg.basis_q_av_db), cfg.basis_rho, scen.pu_power)?;
                let policy = solve_lambda_on(&train, c, cfg.lambda_rel_tol)?;
                Ok((capacity_on(&eval, &policy), policy.is_slack()))
            });
            match result {
                Ok((cap, slack)) => row.extend([
                    fmt_num(cap.bits_per_hz),
                    fmt_num(cap.std_error),
                    if slack { "slack" } else { "ok" }.to_string(),
                ]),
                Err(e) => {
                    table.failures += 1;
                    row.extend([String::new(), String::new(), format!("error: {e}")]);
                }
            }
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// A gnuplot script that plots `csv_path` as written by `experiment`.
pub fn gnuplot_script(experiment: Experiment, cfg: &ExperimentConfig, csv_path: &str) -> String {
    let file = csv_path.replace('\'', "''");
    let mut s = String::from("set datafile separator ','\nset datafile commentschars '#'\nset key outside\n");
    let mut plots = Vec::new();
    match experiment {
        Experiment::CapacitySweep => {
            s.push_str("set xlabel 'Q_{av} (dB)'\nset ylabel 'capacity (bps/Hz)'\n");
            for kind in &cfg.scenarios {
                for &rho in &cfg.rho {
                    let r = fmt_num(rho);
                    plots.push(format!(
                        "'{file}' skip 2 using 1:((strcol(2) eq '{k}' && strcol(3) eq '{r}') ? $4 : 1/0) \
                         with linespoints title '{k}, rho={r}'",
                        k = kind.label()
                    ));
                }
            }
        }
        Experiment::RapPdf => {
            s.push_str("set xlabel 'amplitude'\nset ylabel 'density'\n");
            if let Some(m) = cfg.m_grid.first() {
                plots.push(format!(
                    "'{file}' skip 2 using (($1=={m} && strcol(2) ne 'ks_statistic' && strcol(2) ne 'ks_p_value') ? $2 : 1/0):3 \
                     with lines title 'before'"
                ));
            }
            for m in &cfg.m_grid {
                plots.push(format!(
                    "'{file}' skip 2 using (($1=={m} && strcol(2) ne 'ks_statistic' && strcol(2) ne 'ks_p_value') ? $2 : 1/0):4 \
                     with lines title 'M={m}'"
                ));
            }
        }
        Experiment::RapTimeseries => {
            s.push_str("set xlabel 'instant'\nset ylabel 'amplitude'\n");
            let n = cfg.duration;
            plots.push(format!("'{file}' skip 2 every ::0::{} using 1:2 with lines title 'before'", n - 1));
            plots.push(format!("'{file}' skip 2 every ::0::{} using 1:3 with lines title 'after'", n - 1));
        }
        Experiment::BasisSweep => {
            s.push_str("set xlabel 'basis patterns'\nset ylabel 'capacity (bps/Hz)'\n");
            for kind in &cfg.basis_scenarios {
                plots.push(format!(
                    "'{file}' skip 2 using 1:(strcol(2) eq '{k}' ? $4 : 1/0) with linespoints title '{k}'",
                    k = kind.label()
                ));
            }
        }
    }
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
