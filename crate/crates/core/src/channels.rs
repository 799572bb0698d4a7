//! Rician/Rayleigh fading links, their power densities, and the density of
//! the secondary-to-interference power ratio.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::numerics::{laguerre_half, ln_bessel_i0, sharded, RngStream};

/// Rician fading parameters of one link.
///
/// `k_factor = 0` is Rayleigh. The line-of-sight-only (AWGN) limit is a
/// separate flag so the densities never have to cope with `K = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    k_factor: f64,
    mean_power: f64,
    los_phase: f64,
    deterministic: bool,
}

impl FadingSpec {
    pub fn rician(k_factor: f64, mean_power: f64) -> Result<Self> {
        if !(k_factor.is_finite() && k_factor >= 0.0) {
            return Err(Error::InvalidParameter(format!("K-factor {k_factor}")));
        }
        check_power(mean_power)?;
        Ok(Self {
            k_factor,
            mean_power,
            los_phase: 0.0,
            deterministic: false,
        })
    }

    pub fn rayleigh(mean_power: f64) -> Result<Self> {
        Self::rician(0.0, mean_power)
    }

    /// Pure line-of-sight channel, `h = √ḡ·e^{jφ}`.
    pub fn deterministic(mean_power: f64) -> Result<Self> {
        check_power(mean_power)?;
        Ok(Self {
            k_factor: f64::INFINITY,
            mean_power,
            los_phase: 0.0,
            deterministic: true,
        })
    }

    pub fn with_los_phase(mut self, phase: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&phase) {
            return Err(Error::InvalidParameter(format!("LoS phase {phase} not in [0, 2π)")));
        }
        self.los_phase = phase;
        Ok(self)
    }

    /// Linear K-factor; `+inf` for the deterministic flag.
    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn mean_power(&self) -> f64 {
        self.mean_power
    }

    pub fn los_phase(&self) -> f64 {
        self.los_phase
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn is_rayleigh(&self) -> bool {
        !self.deterministic && self.k_factor == 0.0
    }

    /// `√(K/(K+1))`, the normalized specular amplitude.
    pub fn specular_amplitude(&self) -> f64 {
        if self.deterministic {
            1.0
        } else {
            (self.k_factor / (self.k_factor + 1.0)).sqrt()
        }
    }

    /// Standard deviation of each quadrature of the normalized diffuse part.
    pub fn diffuse_std(&self) -> f64 {
        if self.deterministic {
            0.0
        } else {
            (0.5 / (self.k_factor + 1.0)).sqrt()
        }
    }
}

fn check_power(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mean power {p}")))
    }
}

/// The named fading combinations. `X-Y` means interference links follow `X`
/// and the secondary link follows `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    RayleighRician,
    RayleighRayleigh,
    RicianRician,
    RicianRayleigh,
    Awgn,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::RayleighRician,
        ScenarioKind::RayleighRayleigh,
        ScenarioKind::RicianRician,
        ScenarioKind::RicianRayleigh,
        ScenarioKind::Awgn,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::RayleighRician => "rayleigh-rician",
            ScenarioKind::RayleighRayleigh => "rayleigh-rayleigh",
            ScenarioKind::RicianRician => "rician-rician",
            ScenarioKind::RicianRayleigh => "rician-rayleigh",
            ScenarioKind::Awgn => "awgn",
        }
    }

    /// Whether the interference links carry a LoS component.
    pub fn rician_interference(self) -> bool {
        matches!(self, ScenarioKind::RicianRician | ScenarioKind::RicianRayleigh)
    }

    /// Whether the secondary link carries a LoS component.
    pub fn rician_secondary(self) -> bool {
        matches!(self, ScenarioKind::RicianRician | ScenarioKind::RayleighRician)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// Mean powers of the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPowers {
    pub su: f64,
    pub su_to_pu: f64,
    pub pu_to_su: f64,
}

impl Default for LinkPowers {
    fn default() -> Self {
        Self {
            su: 1.0,
            su_to_pu: 1.0,
            pu_to_su: 1.0,
        }
    }
}

/// Fading of the secondary link `h_s`, the secondary-to-primary link `h_sp`,
/// the primary-to-secondary link `h_ps`, plus the primary transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub su_link: FadingSpec,
    pub su_to_pu: FadingSpec,
    pub pu_to_su: FadingSpec,
    pub pu_power: f64,
}

impl ScenarioSpec {
    pub fn new(
        su_link: FadingSpec,
        su_to_pu: FadingSpec,
        pu_to_su: FadingSpec,
        pu_power: f64,
    ) -> Result<Self> {
        if !(pu_power.is_finite() && pu_power >= 0.0) {
            return Err(Error::InvalidParameter(format!("PU power {pu_power}")));
        }
        Ok(Self {
            su_link,
            su_to_pu,
            pu_to_su,
            pu_power,
        })
    }

    /// Builds a named scenario where every Rician link shares `k_factor`.
    pub fn from_kind(
        kind: ScenarioKind,
        k_factor: f64,
        powers: LinkPowers,
        pu_power: f64,
    ) -> Result<Self> {
        let link = |rician: bool, p: f64| {
            if kind == ScenarioKind::Awgn {
                FadingSpec::deterministic(p)
            } else if rician {
                FadingSpec::rician(k_factor, p)
            } else {
                FadingSpec::rayleigh(p)
            }
        };
        Self::new(
            link(kind.rician_secondary(), powers.su)?,
            link(kind.rician_interference(), powers.su_to_pu)?,
            link(kind.rician_interference(), powers.pu_to_su)?,
            pu_power,
        )
    }

    /// Unit-power links, `K = 10 dB` and a 1 dB primary transmitter.
    pub fn reference(kind: ScenarioKind) -> Self {
        Self::from_kind(
            kind,
            10.0,
            LinkPowers::default(),
            crate::numerics::db_to_linear(1.0),
        )
        .expect("reference parameters are valid")
    }
}

/// Instantaneous channel powers `(γ_s, γ_sp, γ_ps)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelState {
    pub gamma_s: f64,
    pub gamma_sp: f64,
    pub gamma_ps: f64,
}

impl ChannelState {
    pub fn new(gamma_s: f64, gamma_sp: f64, gamma_ps: f64) -> Self {
        debug_assert!(gamma_s >= 0.0 && gamma_sp >= 0.0 && gamma_ps >= 0.0);
        Self {
            gamma_s,
            gamma_sp,
            gamma_ps,
        }
    }
}

/// Draws `h = √ḡ(√(K/(K+1))·e^{jφ} + v)`, `v ~ CN(0, 1/(K+1))`.
pub fn sample_gain(spec: &FadingSpec, rng: &mut RngStream) -> Complex64 {
    let los = Complex64::from_polar(spec.specular_amplitude(), spec.los_phase);
    let amp = spec.mean_power.sqrt();
    if spec.deterministic {
        return los * amp;
    }
    let s = spec.diffuse_std();
    let v = Complex64::new(s * rng.std_normal(), s * rng.std_normal());
    (los + v) * amp
}

/// Density of `γ = |h|²` for a Rician link, evaluated in log space.
pub fn power_pdf(gamma: f64, spec: &FadingSpec) -> Result<f64> {
    if spec.deterministic {
        return Err(domain("power_pdf", "deterministic link has a point-mass power"));
    }
    if !(gamma >= 0.0) {
        return Err(domain("power_pdf", format!("power {gamma} must be >= 0")));
    }
    if gamma.is_infinite() {
        return Ok(0.0);
    }
    let k = spec.k_factor;
    let g = spec.mean_power;
    let arg = 2.0 * (k * (1.0 + k) * gamma / g).sqrt();
    let ln = ((1.0 + k) / g).ln() - k - (1.0 + k) * gamma / g + ln_bessel_i0(arg);
    Ok(ln.exp())
}

/// Standard deviation squared of the envelope `|h|`.
pub fn amplitude_variance(spec: &FadingSpec) -> Result<f64> {
    if spec.deterministic {
        return Err(domain("amplitude_variance", "deterministic link"));
    }
    let k = spec.k_factor;
    let g = spec.mean_power;
    let two_sigma2 = g / (k + 1.0);
    let nu2 = g * k / (k + 1.0);
    let l = laguerre_half(-nu2 / two_sigma2)?;
    Ok((two_sigma2 + nu2 - PI * two_sigma2 / 4.0 * l * l).max(0.0))
}

/// Density of `z = γ_s/γ_sp` when `h_s` is Rayleigh with mean power `gbar_s`
/// and `h_sp` is Rician with `(k_sp, gbar_sp)`.
pub fn ratio_pdf(z: f64, k_sp: f64, gbar_s: f64, gbar_sp: f64) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let c = gbar_sp / gbar_s;
    let u = z * c;
    let a = 1.0 + k_sp;
    let d = a + u;
    c * (a * a * a + u * a) / (d * d * d) * (-k_sp * u / d).exp()
}

/// Limit of [`ratio_pdf`] as `k_sp → ∞`: exponential with rate `gbar_sp/gbar_s`.
pub fn ratio_pdf_los_limit(z: f64, gbar_s: f64, gbar_sp: f64) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let c = gbar_sp / gbar_s;
    c * (-c * z).exp()
}

pub fn sample_state(scenario: &ScenarioSpec, rng: &mut RngStream) -> ChannelState {
    let hs = sample_gain(&scenario.su_link, rng);
    let hsp = sample_gain(&scenario.su_to_pu, rng);
    let hps = sample_gain(&scenario.pu_to_su, rng);
    ChannelState::new(hs.norm_sqr(), hsp.norm_sqr(), hps.norm_sqr())
}

/// `n` independent states, sharded over substreams of `rng`.
pub fn sample_states(scenario: &ScenarioSpec, n: usize, rng: &RngStream) -> Vec<ChannelState> {
    sharded(n, rng, |r| sample_state(scenario, r))
}
