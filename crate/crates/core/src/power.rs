//! Optimal secondary power allocation under joint average/peak interference
//! constraints, and the Lagrange-multiplier search that makes the average
//! constraint bind.

use std::f64::consts::LN_2;

use crate::channels::{sample_states, ChannelState, ScenarioSpec};
use crate::error::{Error, Result};
use crate::numerics::{shard_sum, RngStream};

/// Interference limits at the primary receiver and the primary's power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    q_av: f64,
    q_p: f64,
    pu_power: f64,
}

impl ConstraintSet {
    /// `q_p` may be `f64::INFINITY` (no peak constraint) but must exceed `q_av`.
    pub fn new(q_av: f64, q_p: f64, pu_power: f64) -> Result<Self> {
        if !(q_av.is_finite() && q_av > 0.0) {
            return Err(Error::InvalidParameter(format!("Q_av {q_av}")));
        }
        if q_p.is_nan() || q_p <= q_av {
            return Err(Error::InvalidParameter(format!(
                "peak limit {q_p} must exceed the average limit {q_av}"
            )));
        }
        if !(pu_power.is_finite() && pu_power >= 0.0) {
            return Err(Error::InvalidParameter(format!("PU power {pu_power}")));
        }
        Ok(Self { q_av, q_p, pu_power })
    }

    /// `Q_p = rho·Q_av`.
    pub fn with_rho(q_av: f64, rho: f64, pu_power: f64) -> Result<Self> {
        Self::new(q_av, rho * q_av, pu_power)
    }

    pub fn q_av(&self) -> f64 {
        self.q_av
    }

    pub fn q_p(&self) -> f64 {
        self.q_p
    }

    pub fn pu_power(&self) -> f64 {
        self.pu_power
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPolicy {
    lambda: f64,
    constraints: ConstraintSet,
    slack: bool,
}

impl PowerPolicy {
    pub fn new(lambda: f64, constraints: ConstraintSet) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda {lambda}")));
        }
        Ok(Self {
            lambda,
            constraints,
            slack: false,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// True when the average constraint could not be made to bind.
    pub fn is_slack(&self) -> bool {
        self.slack
    }

    /// `1/(λ·ln 2)`.
    pub fn water_level(&self) -> f64 {
        1.0 / (self.lambda * LN_2)
    }

    /// Smallest `z = γ_s/γ_sp` that receives power, `λ·ln2·A`.
    pub fn activation_ratio(&self, interference_plus_noise: f64) -> f64 {
        self.lambda * LN_2 * interference_plus_noise
    }

    /// `z` beyond which the peak constraint binds, or `+inf` if it never does.
    pub fn peak_ratio(&self, interference_plus_noise: f64) -> f64 {
        let excess = self.water_level() - self.constraints.q_p;
        if excess > 0.0 {
            interference_plus_noise / excess
        } else {
            f64::INFINITY
        }
    }
}

/// `1 + γ_ps·ḡ_p`, the noise-normalized interference-plus-noise at the SU
/// receiver.
pub fn interference_plus_noise(state: &ChannelState, pu_power: f64) -> f64 {
    1.0 + state.gamma_ps * pu_power
}

/// Transmit power for one channel state.
///
/// With `z = γ_s/γ_sp`, `A = 1 + γ_ps·ḡ_p` and `t = 1/(λ ln 2)`:
/// zero for `z ≤ A/t`, the peak power `Q_p/γ_sp` for `z ≥ A/(t - Q_p)`
/// (only reachable when `t > Q_p`), and `t/γ_sp - A/γ_s` in between.
/// A state with `γ_sp = 0` and `γ_s > 0` has no interference cost and gets
/// `+inf`.
pub fn allocate(state: &ChannelState, policy: &PowerPolicy) -> f64 {
    let (gs, gsp) = (state.gamma_s, state.gamma_sp);
    if gs <= 0.0 {
        return 0.0;
    }
    let a = interference_plus_noise(state, policy.constraints.pu_power);
    let t = policy.water_level();
    let q_p = policy.constraints.q_p;
    if t * gs <= a * gsp {
        return 0.0;
    }
    if t > q_p && (t - q_p) * gs >= a * gsp {
        return q_p / gsp;
    }
    (t / gsp - a / gs).min(q_p / gsp)
}

/// Average interference `E[γ_sp·P_s]` over `states`.
pub fn mean_interference(states: &[ChannelState], policy: &PowerPolicy) -> f64 {
    shard_sum(states, |s| {
        let p = allocate(s, policy);
        if p == 0.0 {
            0.0
        } else {
            s.gamma_sp * p
        }
    }) / states.len() as f64
}

const LAMBDA_FLOOR: f64 = 1e-300;
const LAMBDA_CEILING: f64 = 1e12;

/// Solves for λ on a fixed sample set so the empirical average interference
/// equals `Q_av` within `rel_tol`.
pub fn solve_lambda_on(
    states: &[ChannelState],
    constraints: ConstraintSet,
    rel_tol: f64,
) -> Result<PowerPolicy> {
    if !(rel_tol > 0.0 && rel_tol <= 0.05) {
        return Err(Error::InvalidParameter(format!("rel_tol {rel_tol} not in (0, 0.05]")));
    }
    if states.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let target = constraints.q_av;
    let avg = |lambda: f64| {
        let policy = PowerPolicy {
            lambda,
            constraints,
            slack: false,
        };
        mean_interference(states, &policy)
    };

    let mut lo = 1e-6;
    let mut g_lo = avg(lo);
    while g_lo < target && lo > LAMBDA_FLOOR {
        lo = (lo * 1e-10).max(LAMBDA_FLOOR);
        g_lo = avg(lo);
    }
    if g_lo < target {
        return Ok(PowerPolicy {
            lambda: lo,
            constraints,
            slack: true,
        });
    }
    let mut hi = 1e3;
    let mut g_hi = avg(hi);
    while g_hi > target && hi < LAMBDA_CEILING {
        hi *= 10.0;
        g_hi = avg(hi);
    }
    if g_hi > target {
        return Err(Error::NonBracketing {
            min_interference: g_hi,
            max_interference: g_lo,
            target,
        });
    }

    let mut mid = (lo * hi).sqrt();
    for _ in 0..400 {
        mid = (lo * hi).sqrt();
        let g = avg(mid);
        if (g - target).abs() <= rel_tol * target {
            break;
        }
        if g > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-14 {
            break;
        }
    }
    PowerPolicy::new(mid, constraints)
}

/// Draws `n_samples` states from `scenario` and solves for λ on them.
pub fn solve_lambda(
    scenario: &ScenarioSpec,
    constraints: ConstraintSet,
    n_samples: usize,
    rng: &RngStream,
    rel_tol: f64,
) -> Result<PowerPolicy> {
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "n_samples {n_samples} below 10^4"
        )));
    }
    check_pu_power(scenario, &constraints)?;
    let states = sample_states(scenario, n_samples, rng);
    solve_lambda_on(&states, constraints, rel_tol)
}

pub(crate) fn check_pu_power(scenario: &ScenarioSpec, constraints: &ConstraintSet) -> Result<()> {
    if scenario.pu_power != constraints.pu_power {
        return Err(Error::InvalidParameter(format!(
            "scenario PU power {} differs from constraint PU power {}",
            scenario.pu_power, constraints.pu_power
        )));
    }
    Ok(())
}
