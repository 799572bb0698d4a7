//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Semi-infinite ranges `[a, ∞)` are mapped onto `[0, 1)` with
//! `z = a + s·t/(1-t)`, `s = max(1, |a|)`. The subinterval touching `t = 1` is accepted as soon as
//! its mass plus error drops below `tail_cutoff_mass`.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub tail_cutoff_mass: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_cutoff_mass: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_subdivisions >= 1
            && self.tail_cutoff_mass > 0.0
            && self.tail_cutoff_mass <= 1e-6;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("quadrature spec {self:?}")))
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    touches_infinity: bool,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Integrates `f` over `[lower, upper]`; pass `f64::INFINITY` as `upper` for a
/// semi-infinite range.
pub fn integrate<F>(f: F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !lower.is_finite() || upper.is_nan() || lower >= upper {
        return Err(Error::InvalidParameter(format!(
            "integration range [{lower}, {upper}]"
        )));
    }
    if upper.is_infinite() {
        let scale = lower.abs().max(1.0);
        let g = |t: f64| {
            let one_minus = 1.0 - t;
            let z = lower + scale * t / one_minus;
            let v = scale * f(z) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        adapt(&g, 0.0, 1.0, true, spec)
    } else {
        adapt(&f, lower, upper, false, spec)
    }
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    infinite: bool,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let (value, error) = kronrod(f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
        touches_infinity: infinite,
    }];
    let mut subdivisions = 0;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            return Ok(Integral {
                value: total,
                error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("segment list is never empty");
        if worst.touches_infinity && worst.value.abs() + worst.error < spec.tail_cutoff_mass {
            segments[idx].error = 0.0;
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let (v1, e1) = kronrod(f, worst.a, mid);
        let (v2, e2) = kronrod(f, mid, worst.b);
        segments[idx] = Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            touches_infinity: false,
        };
        segments.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            touches_infinity: worst.touches_infinity,
        });
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(|_| 1.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_tail() {
        let spec = QuadratureSpec::default();
        let r = integrate(|z: f64| (-z).exp(), 0.0, f64::INFINITY, &spec).unwrap();
        assert!((r.value - 1.0).abs() < spec.rel_tol);
    }

    #[test]
    fn fat_tail() {
        // ∫_0^∞ 1/(1+z)² dz = 1 and ∫_0^∞ ln(1+z)/(1+z)² dz = 1
        let spec = QuadratureSpec::default();
        let r = integrate(|z: f64| 1.0 / ((1.0 + z) * (1.0 + z)), 0.0, f64::INFINITY, &spec)
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let r = integrate(
            |z: f64| (1.0 + z).ln() / ((1.0 + z) * (1.0 + z)),
            0.0,
            f64::INFINITY,
            &spec,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn reports_non_convergence_with_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..QuadratureSpec::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &spec).unwrap_err();
        match err {
            Error::Quadrature {
                estimate,
                subdivisions,
                ..
            } => {
                assert_eq!(subdivisions, 3);
                assert!(estimate.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = QuadratureSpec::default();
        assert!(integrate(|x| x, 1.0, 0.0, &spec).is_err());
        let bad = QuadratureSpec {
            tail_cutoff_mass: 1e-3,
            ..spec
        };
        assert!(integrate(|x| x, 0.0, 1.0, &bad).is_err());
    }

    fn poly(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
    }

    proptest! {
        #[test]
        fn linearity(
            f in prop::collection::vec(-5.0f64..5.0, 1..8),
            g in prop::collection::vec(-5.0f64..5.0, 1..8),
            a in -1.0f64..0.0,
            w in 0.1f64..1.5,
        ) {
            let spec = QuadratureSpec::default();
            let b = a + w;
            let i_f = integrate(|x| poly(&f, x), a, b, &spec).unwrap().value;
            let i_g = integrate(|x| poly(&g, x), a, b, &spec).unwrap().value;
            let i_fg = integrate(|x| poly(&f, x) + poly(&g, x), a, b, &spec).unwrap().value;
            prop_assert!((i_f + i_g - i_fg).abs() <= 2.0 * spec.abs_tol);
        }
    }
}
