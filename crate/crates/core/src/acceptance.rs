//! Executable acceptance criteria. Each check returns a [`CriterionOutcome`]
//! carrying the measured quantities, so callers can print one verdict line
//! per criterion.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::capacity::{capacity_mc, capacity_quadrature};
use crate::channels::{power_pdf, ratio_pdf, ratio_pdf_los_limit, sample_states, FadingSpec, ScenarioKind, ScenarioSpec};
use crate::error::Result;
use crate::espar::{
    basis_decompose, basis_weights, currents, inner_product, pattern_from_currents, pattern_from_weights,
    EsparGeometry, ReactiveLoads,
};
use crate::experiments::{run_basis_sweep, run_capacity_sweep, Experiment, ExperimentConfig, Table};
use crate::numerics::stats::variance;
use crate::numerics::{db_to_linear, integrate, QuadratureSpec, RngStream};
use crate::power::{allocate, interference_plus_noise, solve_lambda, solve_lambda_on, ConstraintSet, PowerPolicy};
use crate::rap::{ks_rayleigh, random_weights, sample_equivalent_amplitudes, specular_sum};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceOptions {
    pub seed: u64,
    pub n_samples: usize,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            n_samples: 100_000,
        }
    }
}

impl AcceptanceOptions {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed,
            n_samples: self.n_samples,
            ..ExperimentConfig::default()
        }
    }
}

pub const NAMES: [&str; 12] = [
    "scenario ordering",
    "quoted capacity gaps",
    "peak-constraint effect",
    "constraint satisfaction",
    "allocation optimality",
    "quadrature vs Monte Carlo",
    "Rayleigh-ization",
    "CLT variance",
    "basis-sweep convergence",
    "ESPAR beamspace",
    "pdf correctness",
    "determinism",
];

pub fn run(id: u8, opts: &AcceptanceOptions) -> CriterionOutcome {
    let name = NAMES[(id - 1) as usize];
    let result = match id {
        1 => scenario_ordering(opts),
        2 => quoted_gaps(opts),
        3 => peak_constraint_effect(opts),
        4 => constraint_satisfaction(opts),
        5 => allocation_optimality(opts),
        6 => quadrature_vs_mc(opts),
        7 => rayleighization(opts),
        8 => clt_variance(opts),
        9 => basis_sweep_convergence(opts),
        10 => espar_beamspace(),
        11 => pdf_correctness(),
        12 => determinism(opts),
        _ => unreachable!("criteria are numbered 1 to 12"),
    };
    match result {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionOutcome> {
    (1..=12).map(|id| run(id, opts)).collect()
}

type Check = Result<(bool, String)>;

struct SweepPoint {
    q_av_db: f64,
    scenario: ScenarioKind,
    rho: f64,
    capacity: f64,
    std_error: f64,
}

fn sweep_points(table: &Table) -> Vec<SweepPoint> {
    table
        .rows
        .iter()
        .filter_map(|r| {
            Some(SweepPoint {
                q_av_db: r[0].parse().ok()?,
                scenario: r[1].parse().ok()?,
                rho: r[2].parse().ok().or_else(|| (r[2] == "inf").then_some(f64::INFINITY))?,
                capacity: r[3].parse().ok()?,
                std_error: r[4].parse().ok()?,
            })
        })
        .collect()
}

fn find(points: &[SweepPoint], q: f64, kind: ScenarioKind, rho: f64) -> Option<&SweepPoint> {
    points.iter().find(|p| p.q_av_db == q && p.scenario == kind && p.rho == rho)
}

const ORDER: [ScenarioKind; 5] = [
    ScenarioKind::RayleighRician,
    ScenarioKind::RayleighRayleigh,
    ScenarioKind::RicianRician,
    ScenarioKind::RicianRayleigh,
    ScenarioKind::Awgn,
];

fn scenario_ordering(opts: &AcceptanceOptions) -> Check {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        rho: vec![f64::INFINITY],
        ..opts.config()
    };
    let table = run_capacity_sweep(&cfg)?;
    let elapsed = start.elapsed();
    let points = sweep_points(&table);
    let mut violations = Vec::new();
    for &q in &cfg.q_av_db {
        for pair in ORDER.windows(2) {
            let (Some(hi), Some(lo)) = (
                find(&points, q, pair[0], f64::INFINITY),
                find(&points, q, pair[1], f64::INFINITY),
            ) else {
                violations.push(format!("{q} dB: missing row"));
                continue;
            };
            let slack = 3.0 * hi.std_error.hypot(lo.std_error);
            if hi.capacity + slack < lo.capacity {
                violations.push(format!(
                    "{q} dB: {} {:.3} < {} {:.3}",
                    pair[0], hi.capacity, pair[1], lo.capacity
                ));
            }
        }
    }
    let fast = elapsed < Duration::from_secs(120);
    let mut detail = format!("{} violations, {:.1} s", violations.len(), elapsed.as_secs_f64());
    if !violations.is_empty() {
        let _ = write!(detail, " [{}]", violations.join("; "));
    }
    Ok((violations.is_empty() && fast, detail))
}

fn quoted_gaps(opts: &AcceptanceOptions) -> Check {
    let cfg = ExperimentConfig {
        rho: vec![f64::INFINITY],
        scenarios: vec![ScenarioKind::RayleighRician, ScenarioKind::RayleighRayleigh, ScenarioKind::RicianRician],
        ..opts.config()
    };
    let points = sweep_points(&run_capacity_sweep(&cfg)?);
    let inf = f64::INFINITY;
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut hit = None;
    for &q in &cfg.q_av_db {
        let (Some(a), Some(b), Some(c)) = (
            find(&points, q, ScenarioKind::RayleighRician, inf),
            find(&points, q, ScenarioKind::RayleighRayleigh, inf),
            find(&points, q, ScenarioKind::RicianRician, inf),
        ) else {
            continue;
        };
        let (g1, g2) = (a.capacity - c.capacity, b.capacity - c.capacity);
        let miss = (g1 - 1.05).abs().max((g2 - 0.75).abs());
        if best.is_none_or(|b| miss < b.3) {
            best = Some((q, g1, g2, miss));
        }
        if (g1 - 1.05).abs() <= 0.2 && (g2 - 0.75).abs() <= 0.2 {
            hit.get_or_insert(q);
        }
    }
    let (q, g1, g2, _) = best.unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN));
    Ok((
        hit.is_some(),
        format!("closest grid point {q} dB: rayleigh-rician gap {g1:.3} (want 1.05±0.2), rayleigh-rayleigh gap {g2:.3} (want 0.75±0.2)"),
    ))
}

fn peak_constraint_effect(opts: &AcceptanceOptions) -> Check {
    let cfg = ExperimentConfig {
        rho: vec![1.2, f64::INFINITY],
        ..opts.config()
    };
    let points = sweep_points(&run_capacity_sweep(&cfg)?);
    let mut problems = Vec::new();
    let (q_min, q_max) = (cfg.q_av_db[0], *cfg.q_av_db.last().unwrap_or(&0.0));
    let mut summary = Vec::new();
    for kind in ScenarioKind::ALL {
        for &q in &cfg.q_av_db {
            if let (Some(pk), Some(free)) = (find(&points, q, kind, 1.2), find(&points, q, kind, f64::INFINITY)) {
                // Both rows share the evaluation set; allow for the solver's tolerance on λ.
                if pk.capacity > free.capacity * (1.0 + 10.0 * cfg.lambda_rel_tol) {
                    problems.push(format!("{kind} at {q} dB: {:.4} > {:.4}", pk.capacity, free.capacity));
                }
            }
        }
        if !kind.rician_secondary() && kind != ScenarioKind::Awgn {
            let loss = |q| -> Option<f64> {
                Some(find(&points, q, kind, f64::INFINITY)?.capacity - find(&points, q, kind, 1.2)?.capacity)
            };
            let (lo, hi) = (loss(q_min).unwrap_or(f64::NAN), loss(q_max).unwrap_or(f64::NAN));
            summary.push(format!("{kind} loss {lo:.3} at {q_min} dB vs {hi:.3} at {q_max} dB"));
            if !(lo > hi) {
                problems.push(format!("{kind}: loss not larger at the smallest Q_av"));
            }
        }
    }
    let mut detail = summary.join(", ");
    if !problems.is_empty() {
        let _ = write!(detail, " [{}]", problems.join("; "));
    }
    Ok((problems.is_empty(), detail))
}

fn constraint_satisfaction(opts: &AcceptanceOptions) -> Check {
    let cfg = opts.config();
    let train_rng = RngStream::new(opts.seed, 101);
    let valid_rng = RngStream::new(opts.seed, 102);
    let mut worst_rel: f64 = 0.0;
    let mut peak_violations = 0usize;
    let mut policies = 0usize;
    let mut failures = Vec::new();
    for kind in ScenarioKind::ALL {
        let scen = cfg.scenario(kind)?;
        // A large training set keeps λ's own sampling error well below the
        // validation set's.
        let train = sample_states(&scen, 10 * opts.n_samples, &train_rng);
        let valid = sample_states(&scen, 100_000, &valid_rng);
        for &rho in &cfg.rho {
            for &q_db in &cfg.q_av_db {
                let c = ConstraintSet::with_rho(db_to_linear(q_db), rho, scen.pu_power)?;
                let policy = solve_lambda_on(&train, c, cfg.lambda_rel_tol)?;
                policies += 1;
                let interference: Vec<f64> = valid.iter().map(|s| s.gamma_sp * allocate(s, &policy)).collect();
                peak_violations += interference.iter().filter(|&&i| i > c.q_p() * (1.0 + 1e-12)).count();
                if !policy.is_slack() {
                    let m = interference.iter().sum::<f64>() / interference.len() as f64;
                    let rel = (m - c.q_av()).abs() / c.q_av();
                    let se = (crate::numerics::stats::variance(&interference) / interference.len() as f64).sqrt() / c.q_av();
                    if rel > 0.01 {
                        failures.push(format!("{kind} rho={rho} {q_db} dB: {:.2}% (validation s.e. {:.2}%)", 100.0 * rel, 100.0 * se));
                    }
                    worst_rel = worst_rel.max(rel);
                }
            }
        }
    }
    let mut detail = format!(
        "{policies} policies, worst average-constraint error {:.3}%, {peak_violations} peak violations",
        100.0 * worst_rel
    );
    if !failures.is_empty() {
        let _ = write!(detail, " [{}]", failures.join("; "));
    }
    Ok((failures.is_empty() && peak_violations == 0, detail))
}

fn allocation_optimality(opts: &AcceptanceOptions) -> Check {
    let mut worst: f64 = 0.0;
    for kind in ScenarioKind::ALL {
        let scen = ScenarioSpec::reference(kind);
        for q_db in [-5.0, 5.0, 15.0] {
            let c = ConstraintSet::with_rho(db_to_linear(q_db), 1.2, scen.pu_power)?;
            let policy = solve_lambda(&scen, c, 10_000, &RngStream::new(opts.seed, 201), 1e-6)?;
            let states = sample_states(&scen, 10_000, &RngStream::new(opts.seed, 202));
            let mut total = 0.0;
            for s in &states {
                let step = 1e-3 * c.q_p() / s.gamma_sp;
                let grid_best = grid_argmax(s, &policy, step);
                total += (allocate(s, &policy) - grid_best).abs() / step;
            }
            worst = worst.max(total / states.len() as f64);
        }
    }
    Ok((worst < 1.0, format!("worst mean deviation {worst:.3} grid steps")))
}

fn grid_argmax(s: &crate::channels::ChannelState, policy: &PowerPolicy, step: f64) -> f64 {
    let a = interference_plus_noise(s, policy.constraints().pu_power());
    let lagrangian = |p: f64| (1.0 + s.gamma_s * p / a).log2() - policy.lambda() * s.gamma_sp * p;
    (0..=1000)
        .map(|j| j as f64 * step)
        .max_by(|x, y| lagrangian(*x).total_cmp(&lagrangian(*y)))
        .unwrap_or(0.0)
}

fn quadrature_vs_mc(opts: &AcceptanceOptions) -> Check {
    let pu = db_to_linear(1.0);
    let los = FadingSpec::deterministic(1.0)?;
    let rayleigh = FadingSpec::rayleigh(1.0)?;
    let cases = [
        (ScenarioKind::RayleighRayleigh, ScenarioSpec::new(rayleigh, rayleigh, rayleigh, pu)?),
        (ScenarioKind::RicianRayleigh, ScenarioSpec::new(rayleigh, los, los, pu)?),
    ];
    let quad = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    for (kind, scen) in cases {
        for q_db in [-3.0, 3.0, 9.0] {
            for rho in [1.2, f64::INFINITY] {
                let c = ConstraintSet::with_rho(db_to_linear(q_db), rho, pu)?;
                let policy = solve_lambda(&scen, c, opts.n_samples, &RngStream::new(opts.seed, 301), 1e-6)?;
                let q = capacity_quadrature(&scen, &policy, &quad)?.bits_per_hz;
                let mc = capacity_mc(&scen, &policy, opts.n_samples, &RngStream::new(opts.seed, 302))?;
                let tol = (0.01 * q).max(3.0 * mc.std_error);
                let diff = (q - mc.bits_per_hz).abs();
                worst = worst.max(diff / tol);
                if diff > tol {
                    fails.push(format!("{kind} {q_db} dB rho={rho}: {q:.4} vs {:.4}", mc.bits_per_hz));
                }
            }
        }
    }
    let mut detail = format!("worst |quad - mc| is {worst:.2} of tolerance");
    if !fails.is_empty() {
        let _ = write!(detail, " [{}]", fails.join("; "));
    }
    Ok((fails.is_empty(), detail))
}

fn rayleighization(opts: &AcceptanceOptions) -> Check {
    let start = Instant::now();
    let cfg = opts.config();
    let spec = FadingSpec::rician(db_to_linear(cfg.k_sp_db), 1.0)?;
    let ks = |m: usize| -> Result<_> {
        let phases = cfg.phase_profiles(m).su_to_pu;
        let a = sample_equivalent_amplitudes(&spec, &phases, 10_000, &RngStream::new(opts.seed, 400 + m as u64))?;
        ks_rayleigh(&a, 1.0)
    };
    let (k5, k8) = (ks(5)?, ks(8)?);
    let ratio = k8.statistic / k5.statistic;
    let elapsed = start.elapsed();
    let passed = k5.p_value > 0.01 && (0.5..=2.0).contains(&ratio) && elapsed < Duration::from_secs(10);
    Ok((
        passed,
        format!(
            "M=5: D={:.4}, p={:.2e} (want p > 0.01); M=8: D={:.4}, ratio {ratio:.2}; {:.2} s",
            k5.statistic,
            k5.p_value,
            k8.statistic,
            elapsed.as_secs_f64()
        ),
    ))
}

fn clt_variance(opts: &AcceptanceOptions) -> Check {
    let k = 10.0;
    let spec = FadingSpec::rician(k, 1.0)?;
    let phases = ExperimentConfig {
        seed: opts.seed,
        ..ExperimentConfig::default()
    }
    .phase_profiles(8)
    .su_to_pu;
    let mut rng = RngStream::new(opts.seed, 500);
    let re = (0..100_000)
        .map(|_| Ok(specular_sum(&random_weights(8, &mut rng)?, &spec, &phases)?.re))
        .collect::<Result<Vec<f64>>>()?;
    let target = k / (2.0 * (k + 1.0));
    let rel = variance(&re) / target - 1.0;
    Ok((rel.abs() <= 0.05, format!("Var(Re) = {:.4} vs {target:.4} ({:+.2}%)", variance(&re), 100.0 * rel)))
}

fn basis_sweep_convergence(opts: &AcceptanceOptions) -> Check {
    let cfg = ExperimentConfig {
        m_grid: vec![1, 2, 8],
        basis_scenarios: vec![ScenarioKind::RicianRayleigh, ScenarioKind::RayleighRayleigh],
        ..opts.config()
    };
    let table = run_basis_sweep(&cfg)?;
    let cap = |kind: &str, m: &str| -> Option<f64> {
        table.rows.iter().find(|r| r[1] == kind && r[0] == m)?[3].parse().ok()
    };
    let (Some(base), Some(two), Some(eight), Some(target)) = (
        cap("rician-rayleigh", "1"),
        cap("rician-rayleigh", "2"),
        cap("rician-rayleigh", "8"),
        cap("rayleigh-rayleigh", "1"),
    ) else {
        return Ok((false, "solver failed on a basis-sweep row".into()));
    };
    let close = (eight - target).abs() <= 0.05 * target;
    let fraction = (two - base) / (target - base);
    Ok((
        close && fraction >= 0.5,
        format!(
            "no precoding {base:.4}, M=2 {two:.4} ({:.0}% of gap), M=8 {eight:.4} vs rayleigh-rayleigh {target:.4} ({:+.2}%)",
            100.0 * fraction,
            100.0 * (eight / target - 1.0)
        ),
    ))
}

fn espar_beamspace() -> Check {
    let g = EsparGeometry::default_five_element();
    let basis = basis_decompose(&g)?;
    let phi = basis.patterns();
    let scale = Complex64::new(std::f64::consts::TAU / g.grid_points() as f64, 0.0);
    let gram = phi.adjoint() * phi * scale;
    let m = g.elements();
    let ortho = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    let mut rng = RngStream::new(10, 0);
    let (mut round_trip, mut parseval): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let loads = ReactiveLoads::new((0..m - 1).map(|_| 200.0 * (rng.uniform() - 0.5)).collect())?;
        let i = currents(&g, &loads, Complex64::new(1.0, 0.0))?;
        let direct = pattern_from_currents(&g, &i)?;
        let w = basis_weights(&i, &basis)?;
        let synth = pattern_from_weights(&w, &basis)?;
        let peak = direct.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let err = direct.iter().zip(&synth).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        round_trip = round_trip.max(err / peak);
        let energy = inner_product(&direct, &direct).re;
        let w_energy: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        parseval = parseval.max((energy - w_energy).abs() / energy);
    }
    Ok((
        round_trip < 1e-9 && ortho < 1e-10 && parseval < 1e-9,
        format!("round trip {round_trip:.1e}, orthonormality {ortho:.1e}, Parseval {parseval:.1e}"),
    ))
}

fn pdf_correctness() -> Check {
    let quad = QuadratureSpec::default();
    let mut mass_err: f64 = 0.0;
    for k in [0.0, 1.0, 10.0, 100.0] {
        let spec = FadingSpec::rician(k, 1.0)?;
        let power = integrate(|g| power_pdf(g, &spec).unwrap_or(f64::NAN), 0.0, f64::INFINITY, &quad)?.value;
        let ratio = integrate(|z| ratio_pdf(z, k, 1.0, 1.0), 0.0, f64::INFINITY, &quad)?.value;
        mass_err = mass_err.max((power - 1.0).abs()).max((ratio - 1.0).abs());
    }
    let mut loglogistic: f64 = 0.0;
    let mut limit: f64 = 0.0;
    for i in 0..=2000 {
        let z = i as f64 * 0.01;
        let (gs, gsp) = (1.3, 0.7);
        let c = gsp / gs;
        let ll = c / ((1.0 + c * z) * (1.0 + c * z));
        loglogistic = loglogistic.max((ratio_pdf(z, 0.0, gs, gsp) - ll).abs() / ll);
        limit = limit.max((ratio_pdf(z, 1000.0, gs, gsp) - ratio_pdf_los_limit(z, gs, gsp)).abs());
    }
    Ok((
        mass_err <= 1e-6 && loglogistic < 1e-12 && limit < 0.01,
        format!("mass error {mass_err:.1e}, log-logistic rel. error {loglogistic:.1e}, K=1000 sup-norm {limit:.1e}"),
    ))
}

fn determinism(opts: &AcceptanceOptions) -> Check {
    let cfg = ExperimentConfig {
        seed: opts.seed,
        n_samples: 10_000,
        ..ExperimentConfig::default()
    };
    let mut differing = Vec::new();
    for exp in Experiment::ALL {
        let a = exp.run(&cfg)?.to_csv(&cfg)?;
        let b = exp.run(&cfg)?.to_csv(&cfg)?;
        if a != b {
            differing.push(exp.name());
        }
    }
    Ok((
        differing.is_empty(),
        if differing.is_empty() {
            "all experiments byte-identical on rerun".into()
        } else {
            format!("differs: {}", differing.join(", "))
        },
    ))
}
