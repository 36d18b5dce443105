//! Jones-calculus primitives for the polarizing interferometer.
//!
//! States are ordered `[horizontal; vertical]` and linear polarization
//! angles are measured from the vertical axis, so a state at angle θ is
//! `[sin θ; cos θ]`.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Two-component complex polarization state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    pub h: Complex64,
    pub v: Complex64,
}

impl JonesVector {
    pub const fn new(h: Complex64, v: Complex64) -> Self {
        Self { h, v }
    }

    pub const fn horizontal() -> Self {
        Self::new(ONE, ZERO)
    }

    pub const fn vertical() -> Self {
        Self::new(ZERO, ONE)
    }

    /// Total power `|h|² + |v|²`.
    pub fn power(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// Row-vector dot product `[a, b] · self` (no conjugation).
    pub fn project(&self, row: [Complex64; 2]) -> Complex64 {
        row[0] * self.h + row[1] * self.v
    }
}

/// 2×2 complex matrix acting on [`JonesVector`]s, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diagonal(a: Complex64, b: Complex64) -> Self {
        Self::new([[a, ZERO], [ZERO, b]])
    }

    /// Rotation taking a linear state at θ to θ + `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new([
            [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    /// Linear retarder with retardance `retardance` and fast axis at
    /// `axis` from the vertical.
    pub fn retarder(retardance: f64, axis: f64) -> Self {
        // Retarder in its own frame is diag(e^{iδ/2}, e^{-iδ/2}) on (h, v),
        // with the slow/fast split along the frame axes.
        let own = Self::diagonal(
            Complex64::from_polar(1.0, 0.5 * retardance),
            Complex64::from_polar(1.0, -0.5 * retardance),
        );
        Self::rotation(axis) * own * Self::rotation(-axis)
    }

    /// Half-wave plate with its axis at `axis` from the vertical.
    pub fn half_wave_plate(axis: f64) -> Self {
        Self::retarder(std::f64::consts::PI, axis)
    }

    pub fn quarter_wave_plate(axis: f64) -> Self {
        Self::retarder(std::f64::consts::FRAC_PI_2, axis)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Exchange the roles of the horizontal and vertical slots
    /// (`S·M·S` with `S` the swap matrix).
    pub fn swapped(&self) -> Self {
        let m = &self.m;
        Self::new([[m[1][1], m[1][0]], [m[0][1], m[0][0]]])
    }

    /// Largest entrywise deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 2] {
        // Eigenvalues of the Hermitian matrix M†M.
        let p = self.adjoint() * *self;
        let a = p.m[0][0].re;
        let d = p.m[1][1].re;
        let b = p.m[0][1].norm_sqr();
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b).sqrt();
        [(mean + disc).max(0.0).sqrt(), (mean - disc).max(0.0).sqrt()]
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        JonesMatrix::new(out)
    }
}

impl Mul<JonesVector> for JonesMatrix {
    type Output = JonesVector;

    fn mul(self, s: JonesVector) -> JonesVector {
        JonesVector::new(
            self.m[0][0] * s.h + self.m[0][1] * s.v,
            self.m[1][0] * s.h + self.m[1][1] * s.v,
        )
    }
}

/// Polarizing beamsplitter with scalar cross-talk.
///
/// A fraction `crosstalk_eps` of each polarization's power is routed to the
/// wrong port. The leak is incoherent: amplitudes are rescaled, no relative
/// phase is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PbsModel {
    pub crosstalk_eps: f64,
}

impl PbsModel {
    pub fn new(crosstalk_eps: f64) -> Result<Self> {
        let pbs = Self { crosstalk_eps };
        pbs.validate()?;
        Ok(pbs)
    }

    pub const fn ideal() -> Self {
        Self { crosstalk_eps: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("crosstalk_eps", self.crosstalk_eps, 0.0, 0.5, "[0, 0.5)")?;
        if self.crosstalk_eps >= 0.5 {
            return Err(crate::Error::Domain {
                name: "crosstalk_eps",
                value: self.crosstalk_eps,
                domain: "[0, 0.5)",
            });
        }
        Ok(())
    }
}

/// Linear polarization at `theta` from the vertical axis: `[sin θ; cos θ]`.
pub fn linear_polarized(theta: f64) -> JonesVector {
    let (s, c) = theta.sin_cos();
    JonesVector::new(Complex64::new(s, 0.0), Complex64::new(c, 0.0))
}

/// Semi-transparent object with amplitude transmittance `t` and phase `phi`,
/// placed in the horizontal slot: `diag(t·e^{iφ}, 1)`.
pub fn object_operator(t: f64, phi: f64) -> Result<JonesMatrix> {
    check_range("t", t, 0.0, 1.0, "[0, 1]")?;
    if !phi.is_finite() {
        return Err(crate::Error::Domain {
            name: "phi",
            value: phi,
            domain: "finite",
        });
    }
    Ok(JonesMatrix::diagonal(Complex64::from_polar(t, phi), ONE))
}

/// Amplitude passed by an analyzer at `theta2`: `[sin θ₂, −cos θ₂] · state`.
pub fn analyzer_project(state: &JonesVector, theta2: f64) -> Complex64 {
    let (s, c) = theta2.sin_cos();
    state.project([Complex64::new(s, 0.0), Complex64::new(-c, 0.0)])
}

/// Split `state` into (transmitted, reflected) ports. The ideal splitter
/// transmits horizontal and reflects vertical light.
pub fn pbs_split(state: &JonesVector, pbs: &PbsModel) -> (JonesVector, JonesVector) {
    let eps = pbs.crosstalk_eps;
    let keep = (1.0 - eps).sqrt();
    let leak = eps.sqrt();
    let transmitted = JonesVector::new(state.h * keep, state.v * leak);
    let reflected = JonesVector::new(state.h * leak, state.v * keep);
    (transmitted, reflected)
}
