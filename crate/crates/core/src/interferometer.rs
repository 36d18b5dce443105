//! The polarizing Mach-Zehnder as a probability machine.
//!
//! The reference arm couples with `t1` and reaches the dark port with
//! analyzer acceptance `t2`; the object arm couples with `r1 = 1 − t1` and
//! reaches the dark port with `r2 = 1 − t2`. Dark-port amplitude:
//!
//! ```text
//! A = √(T₁T₂) − t·e^{iφ}·√(R₁R₂)
//! ```
//!
//! so an opaque object yields `P_ifm = T₁T₂` and an absent object is nulled
//! whenever `T₂ = R₁`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::polarization::{analyzer_project, linear_polarized, object_operator};

/// Slack allowed on `|cos φ| ≤ 1` before phase inversion reports bad data.
pub const PHASE_DOMAIN_TOL: f64 = 1e-9;

/// Tolerance for the dark-port condition `T₂ = R₁`.
pub const DARK_PORT_TOL: f64 = 1e-12;

/// Interferometer couplings, visibility and PBS cross-talk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvConfig {
    /// Coupling into the reference (non-object) arm, T₁.
    pub t1: f64,
    /// Analyzer acceptance of reference-arm light, T₂.
    pub t2: f64,
    /// Fringe visibility V in (0, 1].
    pub visibility: f64,
    /// PBS cross-talk ε in [0, 0.5).
    #[serde(default)]
    pub crosstalk_eps: f64,
}

impl EvConfig {
    pub fn new(t1: f64, t2: f64, visibility: f64, crosstalk_eps: f64) -> Result<Self> {
        let c = Self {
            t1,
            t2,
            visibility,
            crosstalk_eps,
        };
        c.validate()?;
        Ok(c)
    }

    /// Balanced 50/50 interferometer with perfect visibility.
    pub fn balanced() -> Self {
        Self {
            t1: 0.5,
            t2: 0.5,
            visibility: 1.0,
            crosstalk_eps: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("t1", self.t1, 0.0, 1.0, "[0, 1]")?;
        check_range("t2", self.t2, 0.0, 1.0, "[0, 1]")?;
        check_range("visibility", self.visibility, 0.0, 1.0, "(0, 1]")?;
        if self.visibility <= 0.0 {
            return Err(Error::Domain {
                name: "visibility",
                value: self.visibility,
                domain: "(0, 1]",
            });
        }
        crate::polarization::PbsModel::new(self.crosstalk_eps)?;
        Ok(())
    }

    pub fn r1(&self) -> f64 {
        1.0 - self.t1
    }

    pub fn r2(&self) -> f64 {
        1.0 - self.t2
    }

    /// Dark-port noise floor σ = (1 − V)/(1 + V).
    pub fn noise_floor(&self) -> f64 {
        (1.0 - self.visibility) / (1.0 + self.visibility)
    }

    /// Object-arm coupling including cross-talk leakage, R₁' = R₁ + ε(1 − R₁).
    pub fn effective_r1(&self) -> f64 {
        let r1 = self.r1();
        r1 + self.crosstalk_eps * (1.0 - r1)
    }

    /// Dark-port amplitude for a (possibly beam-averaged) object amplitude.
    pub fn dark_port_amplitude(&self, object_amplitude: Complex64) -> Complex64 {
        let reference = (self.t1 * self.t2).sqrt();
        let object = (self.r1() * self.r2()).sqrt();
        Complex64::new(reference, 0.0) - object_amplitude * object
    }

    /// The same dark-port amplitude computed by Jones calculus: input at θ₁
    /// with T₁ = sin²θ₁, object in the vertical slot, analyzer at θ₂ with
    /// T₂ = sin²θ₂.
    pub fn jones_dark_amplitude(&self, sample: &ObjectSample) -> Result<Complex64> {
        let theta1 = self.t1.sqrt().asin();
        let theta2 = self.t2.sqrt().asin();
        let object = object_operator(sample.t, sample.phi)?.swapped();
        Ok(analyzer_project(&(object * linear_polarized(theta1)), theta2))
    }
}

/// A point object: amplitude transmittance `t` and phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectSample {
    pub t: f64,
    pub phi: f64,
}

impl ObjectSample {
    pub fn new(t: f64, phi: f64) -> Result<Self> {
        check_range("t", t, 0.0, 1.0, "[0, 1]")?;
        if !phi.is_finite() {
            return Err(Error::Domain {
                name: "phi",
                value: phi,
                domain: "finite",
            });
        }
        Ok(Self { t, phi })
    }

    pub const fn opaque() -> Self {
        Self { t: 0.0, phi: 0.0 }
    }

    pub const fn absent() -> Self {
        Self { t: 1.0, phi: 0.0 }
    }

    /// Normalized transmission P_norm = t².
    pub fn p_norm(&self) -> f64 {
        self.t * self.t
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.t, self.phi)
    }
}

/// Outcome probabilities for one photon: dark-port (interaction-free),
/// absorbed by the object, and bright-port (no result).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTriple {
    pub p_ifm: f64,
    pub p_abs: f64,
    pub p_noresult: f64,
}

impl ProbabilityTriple {
    /// Complete a triple from its two informative outcomes. If they already
    /// exceed unit total (possible only with cross-talk or a noise floor),
    /// both are rescaled to sum to one and no-result becomes zero.
    pub fn from_ifm_abs(p_ifm: f64, p_abs: f64) -> Self {
        let total = p_ifm + p_abs;
        if total > 1.0 {
            Self {
                p_ifm: p_ifm / total,
                p_abs: p_abs / total,
                p_noresult: 0.0,
            }
        } else {
            Self {
                p_ifm,
                p_abs,
                p_noresult: (1.0 - total).max(0.0),
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.p_ifm + self.p_abs + self.p_noresult
    }
}

/// Ideal (noise-free) outcome probabilities for a point object.
pub fn measure(config: &EvConfig, sample: &ObjectSample) -> ProbabilityTriple {
    let p_ifm = config.dark_port_amplitude(sample.amplitude()).norm_sqr();
    let p_abs = config.effective_r1() * (1.0 - sample.p_norm());
    ProbabilityTriple::from_ifm_abs(p_ifm, p_abs)
}

/// Balanced (50/50) IFM probability `(1 + P_norm − 2cosφ·√P_norm)/4`.
pub fn p_ifm_balanced(p_norm: f64, phi: f64) -> f64 {
    (1.0 + p_norm - 2.0 * phi.cos() * p_norm.sqrt()) / 4.0
}

/// Recover |φ| ∈ [0, π] from a dark-port probability and the transmission.
pub fn invert_phase(p_ifm: f64, p_norm: f64, config: &EvConfig) -> Result<f64> {
    if p_norm <= 0.0 {
        return Err(Error::UndefinedPhase);
    }
    let tt = config.t1 * config.t2;
    let rr = config.r1() * config.r2();
    let denom = 2.0 * (tt * rr * p_norm).sqrt();
    if denom == 0.0 {
        // One arm never reaches the dark port; no interference term.
        return Err(Error::UndefinedPhase);
    }
    let cos_phi = (tt + rr * p_norm - p_ifm) / denom;
    if !cos_phi.is_finite() || cos_phi.abs() > 1.0 + PHASE_DOMAIN_TOL {
        return Err(Error::InconsistentData(cos_phi));
    }
    Ok(cos_phi.clamp(-1.0, 1.0).acos())
}

/// IFM efficiency η = P_ifm / (P_ifm + P_abs).
pub fn efficiency(triple: &ProbabilityTriple) -> Result<f64> {
    let informative = triple.p_ifm + triple.p_abs;
    if informative <= 0.0 {
        return Err(Error::UndefinedEfficiency);
    }
    Ok(triple.p_ifm / informative)
}

/// Opaque-object efficiency `(1 − R)/(2 − R)` under `R₁ = T₂ = R`.
pub fn efficiency_ideal(r: f64) -> f64 {
    (1.0 - r) / (2.0 - r)
}

/// Blend an ideal dark-port probability toward one by the visibility floor σ.
pub fn apply_noise_floor(p_ifm_ideal: f64, config: &EvConfig) -> f64 {
    with_floor(p_ifm_ideal, config.noise_floor())
}

/// Inverse of [`apply_noise_floor`] for a floor σ < 1.
pub fn remove_noise_floor(p_ifm: f64, sigma: f64) -> f64 {
    (p_ifm - sigma) / (1.0 - sigma)
}

pub(crate) fn with_floor(p: f64, sigma: f64) -> f64 {
    p + sigma * (1.0 - p)
}

/// True iff an absent object is perfectly nulled at the dark port (T₂ = R₁).
pub fn dark_port_condition(config: &EvConfig) -> bool {
    (config.t2 - config.r1()).abs() < DARK_PORT_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn wire_config() -> EvConfig {
        EvConfig::new(0.525, 0.462, 1.0, 0.0).unwrap()
    }

    /// Independent phase oracle: bisection on the balanced closed form,
    /// which is monotone increasing in φ on [0, π].
    fn bisect_balanced_phase(p_ifm: f64, p_norm: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p_ifm_balanced(p_norm, mid) < p_ifm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn measure_examples() {
        let opaque = measure(&wire_config(), &ObjectSample::opaque());
        assert_abs_diff_eq!(opaque.p_ifm, 0.24255, epsilon = 1e-12);
        assert_abs_diff_eq!(opaque.p_abs, 0.475, epsilon = 1e-12);

        let absent = measure(&EvConfig::balanced(), &ObjectSample::absent());
        assert_eq!(absent.p_ifm, 0.0);
        assert_eq!(absent.p_abs, 0.0);
        assert_eq!(absent.p_noresult, 1.0);

        let slit = measure(&wire_config(), &ObjectSample::new(0.15f64.sqrt(), 0.0).unwrap());
        assert_abs_diff_eq!(slit.p_ifm, 0.088_034_913_808_209_67, epsilon = 1e-12);

        let pi_shift = measure(&EvConfig::balanced(), &ObjectSample::new(1.0, PI).unwrap());
        assert_abs_diff_eq!(pi_shift.p_ifm, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(efficiency(&pi_shift).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_examples() {
        for phi in [0.0, 1.0, PI] {
            assert_abs_diff_eq!(p_ifm_balanced(0.0, phi), 0.25);
        }
        assert_abs_diff_eq!(p_ifm_balanced(1.0, 0.0), 0.0);
        assert_abs_diff_eq!(p_ifm_balanced(0.69, 1.8078), 0.52, epsilon = 5e-5);
    }

    #[test]
    fn invert_phase_examples() {
        let balanced = EvConfig::balanced();
        let phi = invert_phase(0.52, 0.69, &balanced).unwrap();
        assert_abs_diff_eq!(phi.to_degrees(), 103.6, epsilon = 0.05);
        assert_abs_diff_eq!(phi, bisect_balanced_phase(0.52, 0.69), epsilon = 1e-12);

        assert!(matches!(
            invert_phase(0.25, 0.0, &balanced),
            Err(Error::UndefinedPhase)
        ));
        assert_eq!(invert_phase(0.0, 1.0, &balanced).unwrap(), 0.0);
        assert!(matches!(
            invert_phase(0.9, 0.01, &balanced),
            Err(Error::InconsistentData(_))
        ));
    }

    #[test]
    fn efficiency_examples() {
        let t = ProbabilityTriple::from_ifm_abs(0.25, 0.5);
        assert_abs_diff_eq!(efficiency(&t).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let t = ProbabilityTriple::from_ifm_abs(0.2426, 0.46);
        assert_abs_diff_eq!(efficiency(&t).unwrap(), 0.345, epsilon = 5e-4);
        let t = ProbabilityTriple::from_ifm_abs(1.0, 0.0);
        assert_eq!(efficiency(&t).unwrap(), 1.0);
        let t = ProbabilityTriple::from_ifm_abs(0.0, 0.0);
        assert!(matches!(efficiency(&t), Err(Error::UndefinedEfficiency)));
    }

    #[test]
    fn efficiency_ideal_examples() {
        assert_abs_diff_eq!(efficiency_ideal(0.5), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(efficiency_ideal(1e-12), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(efficiency_ideal(0.9), 1.0 / 11.0, epsilon = 1e-15);
    }

    #[test]
    fn noise_floor_examples() {
        let cfg = EvConfig::new(0.5, 0.5, 0.933, 0.0).unwrap();
        assert_abs_diff_eq!(apply_noise_floor(0.0, &cfg), 0.0347, epsilon = 5e-5);
        assert_abs_diff_eq!(apply_noise_floor(1.0, &cfg), 1.0, epsilon = 1e-15);
        assert_eq!(apply_noise_floor(0.3, &EvConfig::balanced()), 0.3);
        let p = 0.123;
        assert_abs_diff_eq!(
            remove_noise_floor(apply_noise_floor(p, &cfg), cfg.noise_floor()),
            p,
            epsilon = 1e-15
        );
    }

    #[test]
    fn dark_port_examples() {
        assert!(dark_port_condition(&EvConfig::balanced()));
        assert!(!dark_port_condition(&wire_config()));
        let leak = measure(&wire_config(), &ObjectSample::absent()).p_ifm;
        assert_abs_diff_eq!(leak, 1.696_735_485_977_65e-4, epsilon = 1e-15);
        assert!(dark_port_condition(&EvConfig::new(0.3, 0.7, 1.0, 0.0).unwrap()));
    }

    #[test]
    fn config_validation() {
        assert!(EvConfig::new(1.1, 0.5, 1.0, 0.0).is_err());
        assert!(EvConfig::new(0.5, 0.5, 0.0, 0.0).is_err());
        assert!(EvConfig::new(0.5, 0.5, 1.0, 0.5).is_err());
        assert!(ObjectSample::new(1.01, 0.0).is_err());
    }

    #[test]
    fn crosstalk_overflow_is_renormalized() {
        // T₂ = 1 sends the whole reference arm to the dark port; with leakage
        // into the object arm the raw terms exceed one.
        let cfg = EvConfig::new(0.9, 1.0, 1.0, 0.2).unwrap();
        let p = measure(&cfg, &ObjectSample::opaque());
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-15);
        assert_eq!(p.p_noresult, 0.0);
    }

    fn arb_config() -> impl Strategy<Value = EvConfig> {
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(t1, t2)| EvConfig::new(t1, t2, 1.0, 0.0).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn conservation(c in arb_config(), t in 0.0..=1.0f64, phi in -PI..PI) {
            let p = measure(&c, &ObjectSample::new(t, phi).unwrap());
            prop_assert!((p.total() - 1.0).abs() < 1e-12);
            // Bright-port flux computed directly: what exits minus the dark port.
            let exits = c.t1 + c.r1() * t * t;
            prop_assert!((p.p_noresult - (exits - p.p_ifm)).abs() < 1e-12);
        }

        #[test]
        fn opaque_limit(c in arb_config()) {
            let p = measure(&c, &ObjectSample::opaque());
            prop_assert!((p.p_ifm - c.t1 * c.t2).abs() < 1e-15);
            prop_assert!((p.p_abs - c.r1()).abs() < 1e-15);
        }

        #[test]
        fn balanced_consistency(t in 0.0..=1.0f64, phi in -PI..PI) {
            let p = measure(&EvConfig::balanced(), &ObjectSample::new(t, phi).unwrap());
            prop_assert!((p.p_ifm - p_ifm_balanced(t * t, phi)).abs() < 1e-12);
        }

        #[test]
        fn phase_round_trip(c in arb_config(), t in 0.01..=1.0f64, phi in 0.0..=PI) {
            prop_assume!(c.t1 * c.t2 * c.r1() * c.r2() > 1e-6);
            let p = measure(&c, &ObjectSample::new(t, phi).unwrap());
            let back = invert_phase(p.p_ifm, t * t, &c).unwrap();
            // arccos amplifies rounding near 0 and π; compare through cos as well.
            prop_assert!((back.cos() - phi.cos()).abs() < 1e-9);
            if phi > 1e-3 && phi < PI - 1e-3 {
                prop_assert!((back - phi).abs() < 1e-9);
            }
        }

        #[test]
        fn jones_equivalence(c in arb_config(), t in 0.0..=1.0f64, phi in -PI..PI) {
            let s = ObjectSample::new(t, phi).unwrap();
            let jones = c.jones_dark_amplitude(&s).unwrap().norm_sqr();
            prop_assert!((jones - measure(&c, &s).p_ifm).abs() < 1e-12);
        }

        #[test]
        fn sweep_shape(r in 0.001..0.999f64) {
            let c = EvConfig::new(1.0 - r, r, 1.0, 0.0).unwrap();
            let p = measure(&c, &ObjectSample::opaque());
            prop_assert!((p.p_ifm - r * (1.0 - r)).abs() < 1e-12);
            prop_assert!(p.p_ifm <= 0.25 + 1e-15);
            prop_assert!((efficiency(&p).unwrap() - efficiency_ideal(r)).abs() < 1e-12);
        }

        #[test]
        fn noise_floor_monotone(p in 0.0..=1.0f64, q in 0.0..=1.0f64, v in 0.01..=1.0f64) {
            let c = EvConfig::new(0.5, 0.5, v, 0.0).unwrap();
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(apply_noise_floor(lo, &c) <= apply_noise_floor(hi, &c));
            prop_assert!(apply_noise_floor(p, &c) >= p);
        }
    }
}
