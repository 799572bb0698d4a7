//! Random aerial precoding over ESPAR basis patterns.
//!
//! Each instant the transmitter (and receiver) draws i.i.d. uniform phases for
//! its basis-pattern weights. The fixed line-of-sight phasors seen through the
//! individual patterns then add with random rotations, so the equivalent
//! channel loses its stable specular component. In smart receive mode the
//! receiver instead combines its patterns with MRC weights computed from the
//! known transmit phases, which restores the specular term on the secondary
//! link while the interference links stay randomized.

use num_complex::Complex64;

use crate::channels::{ChannelState, FadingSpec, ScenarioSpec};
use crate::error::{Error, Result};
use crate::numerics::stats::{ks_pvalue, ks_statistic};
use crate::numerics::{sharded, RngStream};

/// Basis-pattern weights `e^{jθ_m}/√M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights {
    phases: Vec<f64>,
}

impl BasisWeights {
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidParameter("need at least one basis pattern".into()));
        }
        Ok(Self { phases })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitude(&self) -> f64 {
        (self.phases.len() as f64).recip().sqrt()
    }

    pub fn weights(&self) -> Vec<Complex64> {
        let a = self.amplitude();
        self.phases.iter().map(|&t| Complex64::from_polar(a, t)).collect()
    }
}

/// Fresh i.i.d. uniform phases for `m` patterns.
pub fn random_weights(m: usize, rng: &mut RngStream) -> Result<BasisWeights> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one basis pattern".into()));
    }
    BasisWeights::from_phases((0..m).map(|_| rng.phase()).collect())
}

/// Per-pattern gains of one link at one instant.
#[derive(Debug, Clone)]
pub struct BasisChannelSet {
    pub gains: Vec<Complex64>,
    pub spec: FadingSpec,
    pub los_phases: Vec<f64>,
}

/// `h^m = √ḡ(√(K/(K+1))·e^{jφ_m} + v^m)` with independent scattered parts.
pub fn sample_basis_channels(spec: &FadingSpec, los_phases: &[f64], rng: &mut RngStream) -> BasisChannelSet {
    let amp = spec.mean_power().sqrt();
    let los = spec.specular_amplitude();
    let s = spec.diffuse_std();
    let gains = los_phases
        .iter()
        .map(|&phi| {
            let specular = Complex64::from_polar(los, phi);
            if spec.is_deterministic() {
                return specular * amp;
            }
            let v = Complex64::new(s * rng.std_normal(), s * rng.std_normal());
            (specular + v) * amp
        })
        .collect();
    BasisChannelSet {
        gains,
        spec: *spec,
        los_phases: los_phases.to_vec(),
    }
}

fn check_len(weights: &BasisWeights, m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {m} basis patterns",
            weights.len()
        )));
    }
    Ok(())
}

/// `Σ_m w_m·h^m`.
pub fn equivalent_gain(weights: &BasisWeights, channels: &BasisChannelSet) -> Result<Complex64> {
    check_len(weights, channels.gains.len())?;
    Ok(weights.weights().iter().zip(&channels.gains).map(|(w, h)| w * h).sum())
}

/// Specular part of the equivalent channel, normalized to unit mean power:
/// `Σ_m w_m·√(K/(K+1))·e^{jφ_m}`.
pub fn equivalent_los(weights: &BasisWeights, channels: &BasisChannelSet) -> Result<Complex64> {
    specular_sum(weights, &channels.spec, &channels.los_phases)
}

/// As [`equivalent_los`] but from the fixed phase profile alone; no channel
/// realization is needed.
pub fn specular_sum(weights: &BasisWeights, spec: &FadingSpec, los_phases: &[f64]) -> Result<Complex64> {
    check_len(weights, los_phases.len())?;
    let los = spec.specular_amplitude();
    if los == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(weights
        .weights()
        .iter()
        .zip(los_phases)
        .map(|(w, &phi)| w * Complex64::from_polar(los, phi))
        .sum())
}

/// MRC weights `w_u = l̄*_u/‖l̄‖`.
pub fn mrc_receive_weights(specular: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = specular.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroSpecular);
    }
    Ok(specular.iter().map(|c| c.conj() / norm).collect())
}

/// Fixed line-of-sight phases per basis pattern, drawn once and then frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfiles {
    /// One per transmit pattern.
    pub su_to_pu: Vec<f64>,
    /// One per receive pattern.
    pub pu_to_su: Vec<f64>,
    /// `su_link[u][m]`: transmit pattern `m` to receive pattern `u`.
    pub su_link: Vec<Vec<f64>>,
}

impl PhaseProfiles {
    pub fn random(m_tx: usize, m_rx: usize, rng: &mut RngStream) -> Self {
        let su_to_pu = (0..m_tx).map(|_| rng.phase()).collect();
        let pu_to_su = (0..m_rx).map(|_| rng.phase()).collect();
        let su_link = (0..m_rx).map(|_| (0..m_tx).map(|_| rng.phase()).collect()).collect();
        Self {
            su_to_pu,
            pu_to_su,
            su_link,
        }
    }

    fn check(&self, cfg: &RapConfig) -> Result<()> {
        let ok = self.su_to_pu.len() == cfg.m_tx
            && self.pu_to_su.len() == cfg.m_rx
            && self.su_link.len() == cfg.m_rx
            && self.su_link.iter().all(|r| r.len() == cfg.m_tx);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "phase profiles do not match a {}×{} array pair",
                cfg.m_tx, cfg.m_rx
            )))
        }
    }
}

/// Pattern counts at each end of the secondary link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RapConfig {
    pub m_tx: usize,
    pub m_rx: usize,
    /// MRC combining at the receiver instead of random receive phases.
    pub smart_rx: bool,
}

impl RapConfig {
    pub fn new(m_tx: usize, m_rx: usize, smart_rx: bool) -> Result<Self> {
        if m_tx == 0 || m_rx == 0 {
            return Err(Error::InvalidParameter("pattern counts must be at least 1".into()));
        }
        Ok(Self { m_tx, m_rx, smart_rx })
    }

    /// Smart combining needs a specular component on the secondary link.
    pub fn validate_for(&self, scenario: &ScenarioSpec) -> Result<()> {
        if self.smart_rx && scenario.su_link.specular_amplitude() == 0.0 {
            return Err(Error::Config(
                "smart receive combining requires a Rician secondary link (K > 0)".into(),
            ));
        }
        Ok(())
    }
}

/// Equivalent gains of the three links at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapLinkState {
    pub su: Complex64,
    pub su_to_pu: Complex64,
    pub pu_to_su: Complex64,
}

impl RapLinkState {
    pub fn channel_state(&self) -> ChannelState {
        ChannelState::new(self.su.norm_sqr(), self.su_to_pu.norm_sqr(), self.pu_to_su.norm_sqr())
    }
}

/// One instant with fresh weights and scattering on every link.
///
/// The PU-to-SU link always sees its own random receive phases. Smart mode
/// reports the combined specular as `‖l̄_s‖/√M_rx`, so the secondary link
/// keeps mean power `ḡ_s` and tends to its original Rician law as `M_rx`
/// grows.
pub fn rap_link_step(
    scenario: &ScenarioSpec,
    cfg: &RapConfig,
    profiles: &PhaseProfiles,
    rng: &mut RngStream,
) -> Result<RapLinkState> {
    let tx = random_weights(cfg.m_tx, rng)?;
    let su_to_pu = sample_basis_channels(&scenario.su_to_pu, &profiles.su_to_pu, rng);
    let pu_to_su = sample_basis_channels(&scenario.pu_to_su, &profiles.pu_to_su, rng);
    let per_rx: Vec<Complex64> = profiles
        .su_link
        .iter()
        .map(|phases| equivalent_gain(&tx, &sample_basis_channels(&scenario.su_link, phases, rng)))
        .collect::<Result<_>>()?;
    let h_sp = equivalent_gain(&tx, &su_to_pu)?;

    let h_s = if cfg.smart_rx {
        let specular: Vec<Complex64> = profiles
            .su_link
            .iter()
            .map(|phases| specular_sum(&tx, &scenario.su_link, phases))
            .collect::<Result<_>>()?;
        let rx = mrc_receive_weights(&specular)?;
        let amp = scenario.su_link.mean_power().sqrt();
        let norm = specular.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let scattered: Complex64 = rx
            .iter()
            .zip(per_rx.iter().zip(&specular))
            .map(|(w, (h, l))| w * (h - l * amp))
            .sum();
        amp * norm / (cfg.m_rx as f64).sqrt() + scattered
    } else {
        let rx = random_weights(cfg.m_rx, rng)?.weights();
        rx.iter().zip(&per_rx).map(|(w, h)| w * h).sum()
    };
    let h_ps = equivalent_gain(&random_weights(cfg.m_rx, rng)?, &pu_to_su)?;
    Ok(RapLinkState {
        su: h_s,
        su_to_pu: h_sp,
        pu_to_su: h_ps,
    })
}

/// `n` independent instants as channel states, sharded over substreams.
pub fn sample_rap_states(
    scenario: &ScenarioSpec,
    cfg: &RapConfig,
    profiles: &PhaseProfiles,
    n: usize,
    rng: &RngStream,
) -> Result<Vec<ChannelState>> {
    cfg.validate_for(scenario)?;
    profiles.check(cfg)?;
    sharded(n, rng, |r| rap_link_step(scenario, cfg, profiles, r).map(|s| s.channel_state()))
        .into_iter()
        .collect()
}

/// `n` amplitudes `|Σ_m w_m h^m|` of a single precoded link.
pub fn sample_equivalent_amplitudes(
    spec: &FadingSpec,
    los_phases: &[f64],
    n: usize,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    if los_phases.is_empty() {
        return Err(Error::InvalidParameter("need at least one basis pattern".into()));
    }
    sharded(n, rng, |r| {
        let w = random_weights(los_phases.len(), r)?;
        let h = sample_basis_channels(spec, los_phases, r);
        equivalent_gain(&w, &h).map(|g| g.norm())
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test of amplitudes against Rayleigh with `E[a²] = ḡ`.
pub fn ks_rayleigh(amplitudes: &[f64], mean_power: f64) -> Result<KsOutcome> {
    if amplitudes.len() < 100 {
        return Err(Error::TooFewSamples(amplitudes.len()));
    }
    if !(mean_power > 0.0) {
        return Err(Error::InvalidParameter(format!("mean power {mean_power} must be positive")));
    }
    let statistic = ks_statistic(amplitudes, |a| {
        if a <= 0.0 {
            0.0
        } else {
            -(-a * a / mean_power).exp_m1()
        }
    });
    Ok(KsOutcome {
        statistic,
        p_value: ks_pvalue(statistic, amplitudes.len() as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{sample_gain, sample_states, LinkPowers, ScenarioKind};
    use crate::numerics::stats::{ks_two_sample, mean, variance};
    use std::f64::consts::{PI, TAU};

    const K10: f64 = 10.0;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rician(k: f64) -> FadingSpec {
        FadingSpec::rician(k, 1.0).unwrap()
    }

    fn fixed_phases(m: usize, seed: u64) -> Vec<f64> {
        let mut r = RngStream::new(seed, 99);
        (0..m).map(|_| r.phase()).collect()
    }

    #[test]
    fn weights_have_unit_energy() {
        let mut rng = RngStream::new(1, 0);
        let w = random_weights(1, &mut rng).unwrap();
        assert!((w.weights()[0].norm() - 1.0).abs() < 1e-15);
        for m in 1..=8 {
            let w = random_weights(m, &mut rng).unwrap();
            let e: f64 = w.weights().iter().map(|x| x.norm_sqr()).sum();
            assert!((e - 1.0).abs() < 1e-14);
        }
        assert!(random_weights(0, &mut rng).is_err());
    }

    #[test]
    fn weight_phases_are_uniform() {
        let mut rng = RngStream::new(2, 0);
        let theta: Vec<f64> = (0..100_000).map(|_| random_weights(4, &mut rng).unwrap().phases()[0]).collect();
        assert!((mean(&theta) - PI).abs() < 0.02);
        let d = ks_statistic(&theta, |t| (t / TAU).clamp(0.0, 1.0));
        assert!(ks_pvalue(d, theta.len() as f64) > 0.01);
    }

    #[test]
    fn deterministic_basis_channels_are_pure_phasors() {
        let spec = FadingSpec::deterministic(2.0).unwrap();
        let phases = fixed_phases(4, 1);
        let set = sample_basis_channels(&spec, &phases, &mut RngStream::new(0, 0));
        for (h, phi) in set.gains.iter().zip(&phases) {
            assert!((h - Complex64::from_polar(2f64.sqrt(), *phi)).norm() < 1e-15);
        }
    }

    #[test]
    fn rayleigh_basis_channels_are_uncorrelated() {
        let spec = rician(0.0);
        let phases = fixed_phases(3, 2);
        let mut rng = RngStream::new(3, 0);
        let n = 100_000;
        let mut cross = c(0.0, 0.0);
        for _ in 0..n {
            let s = sample_basis_channels(&spec, &phases, &mut rng);
            cross += s.gains[0] * s.gains[1].conj();
        }
        assert!((cross / n as f64).norm() < 0.01);
    }

    #[test]
    fn basis_channel_mean_power() {
        let phases = fixed_phases(2, 3);
        let mut rng = RngStream::new(4, 0);
        let p: Vec<f64> = (0..100_000)
            .map(|_| sample_basis_channels(&rician(K10), &phases, &mut rng).gains[1].norm_sqr())
            .collect();
        assert!((mean(&p) - 1.0).abs() < 0.01);
    }

    #[test]
    fn equivalent_gain_small_cases() {
        let spec = rician(1.0);
        let h = BasisChannelSet {
            gains: vec![c(0.3, -0.4)],
            spec,
            los_phases: vec![0.0],
        };
        let w = BasisWeights::from_phases(vec![0.0]).unwrap();
        assert_eq!(equivalent_gain(&w, &h).unwrap(), c(0.3, -0.4));
        let h2 = BasisChannelSet {
            gains: vec![c(0.3, -0.4); 2],
            spec,
            los_phases: vec![0.0; 2],
        };
        let w2 = BasisWeights::from_phases(vec![0.0, 0.0]).unwrap();
        assert!((equivalent_gain(&w2, &h2).unwrap() - c(0.3, -0.4) * 2f64.sqrt()).norm() < 1e-15);
        assert!(equivalent_gain(&w2, &h).is_err());
    }

    #[test]
    fn equivalent_los_limits() {
        let mut rng = RngStream::new(5, 0);
        let w = random_weights(3, &mut rng).unwrap();
        assert_eq!(specular_sum(&w, &rician(0.0), &fixed_phases(3, 4)).unwrap(), c(0.0, 0.0));
        let target = (K10 / (K10 + 1.0)).sqrt();
        let mut args = Vec::new();
        for _ in 0..2000 {
            let w = random_weights(1, &mut rng).unwrap();
            let l = specular_sum(&w, &rician(K10), &[0.7]).unwrap();
            assert!((l.norm() - target).abs() < 1e-14);
            args.push(l.arg().rem_euclid(TAU));
        }
        let d = ks_statistic(&args, |t| t / TAU);
        assert!(ks_pvalue(d, args.len() as f64) > 0.01);
    }

    #[test]
    fn specular_variance_follows_clt_value() {
        let phases = fixed_phases(8, 5);
        let mut rng = RngStream::new(6, 0);
        let spec = rician(K10);
        let re: Vec<f64> = (0..100_000)
            .map(|_| specular_sum(&random_weights(8, &mut rng).unwrap(), &spec, &phases).unwrap().re)
            .collect();
        let target = K10 / (2.0 * (K10 + 1.0));
        assert!((variance(&re) / target - 1.0).abs() < 0.05);
        // Var(Re l̄) is exactly K/(2(K+1)) for every M; only the shape is asymptotic.
        assert!(mean(&re).abs() < 0.01);
    }

    #[test]
    fn mrc_weights() {
        let w = mrc_receive_weights(&[c(0.6, 0.8)]).unwrap();
        assert!((w[0] - c(0.6, -0.8)).norm() < 1e-15);
        let l = vec![c(0.3, -1.2), c(-0.5, 0.1), c(2.0, 0.4)];
        let w = mrc_receive_weights(&l).unwrap();
        let norm: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        let combined: Complex64 = w.iter().zip(&l).map(|(a, b)| a * b).sum();
        let l_norm = l.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((combined - c(l_norm, 0.0)).norm() < 1e-12);
        assert!(matches!(mrc_receive_weights(&[c(0.0, 0.0); 2]), Err(Error::ZeroSpecular)));
    }

    #[test]
    fn ks_rayleigh_is_calibrated() {
        let spec = rician(0.0);
        let mut rejections = 0;
        for rep in 0..200 {
            let mut rng = RngStream::new(7, rep);
            let a: Vec<f64> = (0..1000).map(|_| sample_gain(&spec, &mut rng).norm()).collect();
            if ks_rayleigh(&a, 1.0).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let frac = rejections as f64 / 200.0;
        assert!((frac - 0.05).abs() <= 0.04, "{frac}");
        assert!(matches!(ks_rayleigh(&[1.0; 99], 1.0), Err(Error::TooFewSamples(99))));
    }

    #[test]
    fn ks_rayleigh_rejects_unprecoded_los() {
        let mut rng = RngStream::new(8, 0);
        let a: Vec<f64> = (0..10_000).map(|_| sample_gain(&rician(K10), &mut rng).norm()).collect();
        assert!(ks_rayleigh(&a, 1.0).unwrap().p_value < 1e-6);
    }

    #[test]
    fn precoding_conserves_power() {
        for m in 1..=8 {
            let a = sample_equivalent_amplitudes(&rician(K10), &fixed_phases(m, 6), 100_000, &RngStream::new(9, m as u64))
                .unwrap();
            let p: Vec<f64> = a.iter().map(|x| x * x).collect();
            let se = (variance(&p) / p.len() as f64).sqrt();
            assert!((mean(&p) - 1.0).abs() < 3.0 * se.max(1e-3), "m = {m}: {}", mean(&p));
        }
    }

    #[test]
    fn rayleighization_improves_with_patterns() {
        let ms = [1, 2, 3, 5, 8];
        let mut avg = [0.0; 5];
        for trial in 0..50u64 {
            for (slot, &m) in ms.iter().enumerate() {
                let a = sample_equivalent_amplitudes(
                    &rician(K10),
                    &fixed_phases(m, 100 + trial),
                    2_000,
                    &RngStream::new(10 + trial, m as u64),
                )
                .unwrap();
                avg[slot] += ks_rayleigh(&a, 1.0).unwrap().statistic / 50.0;
            }
        }
        for w in avg.windows(2) {
            assert!(w[1] <= w[0], "{avg:?}");
        }
        assert!(avg[4] >= 0.5 * avg[3], "{avg:?}");
    }

    #[test]
    fn five_patterns_get_close_to_rayleigh() {
        // The M = 5 amplitude law is close to Rayleigh but not equal: the
        // specular sum of five rotated phasors is bounded by √(5K/(K+1)).
        let a = sample_equivalent_amplitudes(&rician(K10), &fixed_phases(5, 7), 10_000, &RngStream::new(11, 0)).unwrap();
        let before: Vec<f64> = {
            let mut r = RngStream::new(11, 1);
            (0..10_000).map(|_| sample_gain(&rician(K10), &mut r).norm()).collect()
        };
        let after = ks_rayleigh(&a, 1.0).unwrap();
        let pre = ks_rayleigh(&before, 1.0).unwrap();
        assert!(after.statistic < 0.25 * pre.statistic, "{after:?} vs {pre:?}");
        let p: Vec<f64> = a.iter().map(|x| x * x).collect();
        assert!((mean(&p) - 1.0).abs() < 0.02);
    }

    #[test]
    fn precoding_leaves_rayleigh_unchanged() {
        let a = sample_equivalent_amplitudes(&rician(0.0), &fixed_phases(5, 8), 20_000, &RngStream::new(12, 0)).unwrap();
        let mut r = RngStream::new(12, 1);
        let b: Vec<f64> = (0..20_000).map(|_| sample_gain(&rician(0.0), &mut r).norm()).collect();
        let d = ks_two_sample(&a, &b);
        assert!(ks_pvalue(d, 10_000.0) > 0.01);
    }

    #[test]
    fn precoding_creates_deep_fades() {
        let n = 100_000;
        let a = sample_equivalent_amplitudes(&rician(K10), &fixed_phases(5, 9), n, &RngStream::new(13, 0)).unwrap();
        let mut r = RngStream::new(13, 1);
        let before = (0..n).filter(|_| sample_gain(&rician(K10), &mut r).norm() < 0.1).count();
        let after = a.iter().filter(|&&x| x < 0.1).count();
        assert!(after > before, "{after} vs {before}");
    }

    #[test]
    fn single_pattern_link_matches_plain_sampling() {
        let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
        let cfg = RapConfig::new(1, 1, false).unwrap();
        let profiles = PhaseProfiles::random(1, 1, &mut RngStream::new(14, 0));
        let rap = sample_rap_states(&scen, &cfg, &profiles, 20_000, &RngStream::new(14, 1)).unwrap();
        let plain = sample_states(&scen, 20_000, &RngStream::new(14, 2));
        type Pick = fn(&ChannelState) -> f64;
        let picks: [Pick; 3] = [|s| s.gamma_s, |s| s.gamma_sp, |s| s.gamma_ps];
        for pick in picks {
            let a: Vec<f64> = rap.iter().map(pick).collect();
            let b: Vec<f64> = plain.iter().map(pick).collect();
            assert!(ks_pvalue(ks_two_sample(&a, &b), 10_000.0) > 0.01);
        }
    }

    #[test]
    fn dumb_patterns_spread_every_link() {
        let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
        let cfg = RapConfig::new(5, 5, false).unwrap();
        let profiles = PhaseProfiles::random(5, 5, &mut RngStream::new(15, 0));
        let states = sample_rap_states(&scen, &cfg, &profiles, 100_000, &RngStream::new(15, 1)).unwrap();
        type Pick = fn(&ChannelState) -> f64;
        let picks: [Pick; 3] = [|s| s.gamma_s, |s| s.gamma_sp, |s| s.gamma_ps];
        let mut r = RngStream::new(15, 2);
        let unprecoded: Vec<f64> = (0..100_000).map(|_| sample_gain(&rician(K10), &mut r).norm()).collect();
        let pre = ks_rayleigh(&unprecoded, 1.0).unwrap().statistic;
        for pick in picks {
            let amps: Vec<f64> = states.iter().map(|s| pick(s).sqrt()).collect();
            let ks = ks_rayleigh(&amps, 1.0).unwrap();
            assert!(ks.statistic < 0.25 * pre, "{ks:?} vs {pre}");
            let p: Vec<f64> = states.iter().map(pick).collect();
            assert!((mean(&p) - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn smart_combining_stabilizes_specular() {
        let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
        let m_tx = 5;
        let mut prev = f64::INFINITY;
        for m_rx in [2, 4, 8] {
            // Averaged over frozen profiles; a single profile can be lucky.
            let mut v = 0.0;
            for p in 0..20u64 {
                let profiles = PhaseProfiles::random(m_tx, m_rx, &mut RngStream::new(16, p));
                let mut rng = RngStream::new(17, 100 * m_rx as u64 + p);
                let mags: Vec<f64> = (0..5_000)
                    .map(|_| {
                        let tx = random_weights(m_tx, &mut rng).unwrap();
                        let l: Vec<Complex64> = profiles
                            .su_link
                            .iter()
                            .map(|ph| specular_sum(&tx, &scen.su_link, ph).unwrap())
                            .collect();
                        let w = mrc_receive_weights(&l).unwrap();
                        w.iter().zip(&l).map(|(a, b)| a * b).sum::<Complex64>().norm() / (m_rx as f64).sqrt()
                    })
                    .collect();
                v += variance(&mags) / 20.0;
            }
            assert!(v < prev, "{m_rx}: {v} vs {prev}");
            prev = v;
        }
    }

    #[test]
    fn smart_link_keeps_mean_power_and_los() {
        let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
        let cfg = RapConfig::new(8, 8, true).unwrap();
        let profiles = PhaseProfiles::random(8, 8, &mut RngStream::new(18, 0));
        let states = sample_rap_states(&scen, &cfg, &profiles, 50_000, &RngStream::new(18, 1)).unwrap();
        let gs: Vec<f64> = states.iter().map(|s| s.gamma_s).collect();
        assert!((mean(&gs) - 1.0).abs() < 0.02);
        // Far fewer deep fades on the secondary link than on a Rayleigh link.
        let deep = gs.iter().filter(|&&g| g < 0.01).count() as f64 / gs.len() as f64;
        assert!(deep < 0.2 * (1.0 - (-0.01f64).exp()), "{deep}");
        // The interference link from the PU is still randomized.
        let gps: Vec<f64> = states.iter().map(|s| s.gamma_ps).collect();
        assert!((mean(&gps) - 1.0).abs() < 0.02);
        assert!(variance(&gps) > 0.8);
    }

    #[test]
    fn smart_mode_rejected_on_rayleigh_link() {
        let scen = ScenarioSpec::reference(ScenarioKind::RicianRayleigh);
        let cfg = RapConfig::new(4, 4, true).unwrap();
        let profiles = PhaseProfiles::random(4, 4, &mut RngStream::new(0, 0));
        assert!(matches!(
            sample_rap_states(&scen, &cfg, &profiles, 10, &RngStream::new(0, 1)),
            Err(Error::Config(_))
        ));
        let wrong = PhaseProfiles::random(3, 4, &mut RngStream::new(0, 0));
        let cfg = RapConfig::new(4, 4, false).unwrap();
        assert!(sample_rap_states(&scen, &cfg, &wrong, 10, &RngStream::new(0, 1)).is_err());
        assert!(RapConfig::new(0, 1, false).is_err());
    }

    #[test]
    fn statistics_do_not_depend_on_phase_profile() {
        let powers = LinkPowers::default();
        let scen = ScenarioSpec::from_kind(ScenarioKind::RicianRician, K10, powers, 1.0).unwrap();
        let cfg = RapConfig::new(5, 5, false).unwrap();
        let mut stats = Vec::new();
        for p in 0..5 {
            let profiles = PhaseProfiles::random(5, 5, &mut RngStream::new(19, p));
            let states = sample_rap_states(&scen, &cfg, &profiles, 20_000, &RngStream::new(20, p)).unwrap();
            let amps: Vec<f64> = states.iter().map(|s| s.gamma_sp.sqrt()).collect();
            stats.push(amps);
        }
        for other in &stats[1..] {
            assert!(ks_pvalue(ks_two_sample(&stats[0], other), 10_000.0) > 0.001);
        }
    }
}
