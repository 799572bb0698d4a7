//! Ergodic secondary capacity: a Monte Carlo estimator over channel states
//! and a semi-analytic estimator that integrates against the density of
//! `z = γ_s/γ_sp` and the law of `γ_ps`.

use crate::channels::{power_pdf, ratio_pdf, ratio_pdf_los_limit, ChannelState, FadingSpec, ScenarioSpec};
use crate::error::{Error, Result};
use crate::channels::sample_states;
use crate::numerics::{integrate, shard_sum, QuadratureSpec, RngStream};
use crate::power::{allocate, check_pu_power, interference_plus_noise, PowerPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    /// bits/s/Hz
    pub bits_per_hz: f64,
    /// Standard error of the mean; zero for quadrature.
    pub std_error: f64,
    pub method: Method,
    /// Zero for quadrature.
    pub n_samples: usize,
}

/// `log2(1 + γ_s·P_s/(γ_ps·ḡ_p + 1))` for one state.
pub fn instantaneous_rate(state: &ChannelState, policy: &PowerPolicy) -> f64 {
    let p = allocate(state, policy);
    if p == 0.0 {
        return 0.0;
    }
    let a = interference_plus_noise(state, policy.constraints().pu_power());
    (state.gamma_s * p / a).ln_1p() / std::f64::consts::LN_2
}

/// Sample mean of the instantaneous rate over `states`.
pub fn capacity_on(states: &[ChannelState], policy: &PowerPolicy) -> CapacityResult {
    let n = states.len();
    let rates: Vec<f64> = states.iter().map(|s| instantaneous_rate(s, policy)).collect();
    let mean = shard_sum(&rates, |r| *r) / n as f64;
    let ss = shard_sum(&rates, |r| (r - mean) * (r - mean));
    let std_error = if n > 1 {
        (ss / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    CapacityResult {
        bits_per_hz: mean,
        std_error,
        method: Method::MonteCarlo,
        n_samples: n,
    }
}

pub fn capacity_mc(
    scenario: &ScenarioSpec,
    policy: &PowerPolicy,
    n_samples: usize,
    rng: &RngStream,
) -> Result<CapacityResult> {
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!("n_samples {n_samples} below 10^4")));
    }
    check_pu_power(scenario, policy.constraints())?;
    let states = sample_states(scenario, n_samples, rng);
    Ok(capacity_on(&states, policy))
}

/// Law of `z = γ_s/γ_sp`.
enum RatioLaw {
    PointMass(f64),
    Density(Box<dyn Fn(f64) -> f64>),
}

fn ratio_law(scenario: &ScenarioSpec) -> Result<RatioLaw> {
    let s = scenario.su_link;
    let sp = scenario.su_to_pu;
    let (gs, gsp) = (s.mean_power(), sp.mean_power());
    Ok(match (s.is_deterministic(), sp.is_deterministic()) {
        (true, true) => RatioLaw::PointMass(gs / gsp),
        _ if s.is_rayleigh() && sp.is_deterministic() => {
            RatioLaw::Density(Box::new(move |z| ratio_pdf_los_limit(z, gs, gsp)))
        }
        _ if s.is_rayleigh() => {
            let k = sp.k_factor();
            RatioLaw::Density(Box::new(move |z| ratio_pdf(z, k, gs, gsp)))
        }
        (false, true) => {
            // z = γ_s/ḡ_sp
            RatioLaw::Density(Box::new(move |z| gsp * pdf_or_zero(z * gsp, &s)))
        }
        (true, false) => {
            // z = ḡ_s/γ_sp
            RatioLaw::Density(Box::new(move |z| {
                if z <= 0.0 {
                    0.0
                } else {
                    gs / (z * z) * pdf_or_zero(gs / z, &sp)
                }
            }))
        }
        (false, false) => {
            return Err(Error::Unsupported(
                "no closed-form ratio density for a Rician secondary link over a \
                 random interference link"
                    .into(),
            ))
        }
    })
}

fn pdf_or_zero(x: f64, spec: &FadingSpec) -> f64 {
    power_pdf(x, spec).unwrap_or(0.0)
}

// Expected rate given A = 1 + γ_ps·ḡ_p.
fn conditional_rate(law: &RatioLaw, policy: &PowerPolicy, a: f64, quad: &QuadratureSpec) -> Result<f64> {
    let z_on = policy.activation_ratio(a);
    let z_peak = policy.peak_ratio(a);
    let q_p = policy.constraints().q_p();
    let rate = |z: f64| {
        if z <= z_on {
            0.0
        } else if z < z_peak {
            (z / z_on).log2()
        } else {
            (q_p * z / a).ln_1p() / std::f64::consts::LN_2
        }
    };
    match law {
        RatioLaw::PointMass(z) => Ok(rate(*z)),
        RatioLaw::Density(f) => {
            let water = integrate(|z| (z / z_on).log2() * f(z), z_on, z_peak, quad)?;
            let peak = if z_peak.is_finite() {
                integrate(|z| (q_p * z / a).ln_1p() / std::f64::consts::LN_2 * f(z), z_peak, f64::INFINITY, quad)?
                    .value
            } else {
                0.0
            };
            Ok(water.value + peak)
        }
    }
}

/// Semi-analytic capacity: the rate integrated over `z` on the water-filling
/// range `[λ ln2·A, A/(1/(λ ln2) - Q_p)]` and the peak range beyond it, then
/// averaged over `γ_ps` (point evaluation for a deterministic link).
pub fn capacity_quadrature(
    scenario: &ScenarioSpec,
    policy: &PowerPolicy,
    quad: &QuadratureSpec,
) -> Result<CapacityResult> {
    quad.validate()?;
    check_pu_power(scenario, policy.constraints())?;
    let law = ratio_law(scenario)?;
    let pu = policy.constraints().pu_power();
    let ps = scenario.pu_to_su;
    let value = if ps.is_deterministic() {
        conditional_rate(&law, policy, 1.0 + ps.mean_power() * pu, quad)?
    } else {
        // Errors from the inner integrals surface through this cell.
        let failure = std::cell::RefCell::new(None);
        let outer = integrate(
            |g| {
                let density = pdf_or_zero(g, &ps);
                if density == 0.0 {
                    return 0.0;
                }
                match conditional_rate(&law, policy, 1.0 + g * pu, quad) {
                    Ok(v) => v * density,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            f64::INFINITY,
            quad,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        outer.value
    };
    Ok(CapacityResult {
        bits_per_hz: value,
        std_error: 0.0,
        method: Method::Quadrature,
        n_samples: 0,
    })
}
