//! Coupled-mode description of grating mode-beamsplitters and asymmetric
//! directional couplers.
//!
//! Throughout, the splitting ratio `η` is the probability that a photon
//! exchanges modes at the coupler (the cross-coupling probability).

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::wgmodes::{effective_index, grating_period, ModeId, WaveguideGeometry};

/// Coupling per grating period at the reference depth.
pub const DEFAULT_KAPPA_PER_PERIOD: f64 = 0.041;
/// Tooth depth (nm) at which [`DEFAULT_KAPPA_PER_PERIOD`] applies.
pub const REFERENCE_DEPTH_NM: f64 = 24.0;
pub const DEFAULT_PERIODS: u32 = 20;
/// Directional-coupler interaction length in µm.
pub const DEFAULT_COUPLING_LENGTH_UM: f64 = 18.0;

const UNITARY_TOL: f64 = 1e-12;

/// `sin²(κN)`: cross-coupling probability after `periods` grating periods.
pub fn splitting_ratio(kappa: f64, periods: u32) -> f64 {
    (kappa * periods as f64).sin().powi(2)
}

/// Two-mode coupled-mode solution with phase mismatch:
/// `κ²/(κ² + δ²) · sin²(√(κ² + δ²)·L)`.
///
/// `kappa` and `delta` are per unit length, `length` in the same unit.
pub fn detuned_splitting(kappa: f64, delta: f64, length: f64) -> f64 {
    if delta == 0.0 {
        return (kappa * length).sin().powi(2);
    }
    let s2 = kappa * kappa + delta * delta;
    if !s2.is_finite() {
        return 0.0;
    }
    kappa * kappa / s2 * (s2.sqrt() * length).sin().powi(2)
}

/// Mismatch parameter δ (rad/µm) of a grating of period `actual` (µm) when
/// the modes need `ideal` (µm). The coupled-mode phase advances at `2δ`.
pub fn phase_mismatch(actual: f64, ideal: f64) -> f64 {
    std::f64::consts::PI * (1.0 / ideal - 1.0 / actual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `[[t, i·r], [i·r, t]]`
    #[default]
    Symmetric,
    /// `[[t, -r], [r, t]]`
    Real,
}

/// Lossless 2×2 coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerUnitary {
    pub matrix: Matrix2<Complex64>,
}

impl CouplerUnitary {
    /// Cross-coupling probability `|U₀₁|²`.
    pub fn splitting_ratio(&self) -> f64 {
        self.matrix[(0, 1)].norm_sqr()
    }

    pub fn unitarity_error(&self) -> f64 {
        let product = self.matrix.adjoint() * self.matrix;
        (product - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn coupler_unitary(eta: f64, convention: PhaseConvention) -> Result<CouplerUnitary> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!(
            "splitting ratio must lie in [0, 1], got {eta}"
        )));
    }
    let t = Complex64::new((1.0 - eta).sqrt(), 0.0);
    let r = eta.sqrt();
    let matrix = match convention {
        PhaseConvention::Symmetric => {
            let ir = Complex64::new(0.0, r);
            Matrix2::new(t, ir, ir, t)
        }
        PhaseConvention::Real => {
            let r = Complex64::new(r, 0.0);
            Matrix2::new(t, -r, r, t)
        }
    };
    let coupler = CouplerUnitary { matrix };
    debug_assert!(coupler.unitarity_error() < UNITARY_TOL);
    Ok(coupler)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GratingSymmetry {
    /// Couples modes of equal parity.
    Symmetric,
    /// Couples modes of opposite parity.
    Asymmetric,
}

impl GratingSymmetry {
    pub fn for_pair(a: ModeId, b: ModeId) -> Self {
        if a.is_even() == b.is_even() {
            GratingSymmetry::Symmetric
        } else {
            GratingSymmetry::Asymmetric
        }
    }
}

/// Periodic width perturbation coupling two co-propagating modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingSpec {
    /// µm
    pub period: f64,
    /// nm
    pub depth: f64,
    pub num_periods: u32,
    /// rad per period
    pub kappa_per_period: f64,
    pub mode_pair: (ModeId, ModeId),
    pub symmetry: GratingSymmetry,
    /// Phase mismatch δ in rad/µm; zero for a resonant grating.
    #[serde(default)]
    pub detuning: f64,
}

impl GratingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(invalid(format!(
                "grating period must be positive, got {}",
                self.period
            )));
        }
        if !(self.kappa_per_period.is_finite() && self.kappa_per_period >= 0.0) {
            return Err(invalid(format!(
                "coupling per period must be non-negative, got {}",
                self.kappa_per_period
            )));
        }
        if !(self.depth.is_finite() && self.depth >= 0.0) {
            return Err(invalid(format!(
                "grating depth must be non-negative, got {}",
                self.depth
            )));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("grating detuning must be finite"));
        }
        let (a, b) = self.mode_pair;
        if a == b {
            return Err(invalid(format!("grating couples {a} to itself")));
        }
        if GratingSymmetry::for_pair(a, b) != self.symmetry {
            return Err(invalid(format!(
                "{:?} grating cannot couple {a} and {b}",
                self.symmetry
            )));
        }
        Ok(())
    }

    /// Device length in µm.
    pub fn length(&self) -> f64 {
        self.period * self.num_periods as f64
    }

    pub fn splitting_ratio(&self) -> f64 {
        if self.detuning == 0.0 {
            return splitting_ratio(self.kappa_per_period, self.num_periods);
        }
        detuned_splitting(
            self.kappa_per_period / self.period,
            self.detuning,
            self.length(),
        )
    }

    pub fn unitary(&self) -> Result<CouplerUnitary> {
        self.validate()?;
        coupler_unitary(self.splitting_ratio(), PhaseConvention::Symmetric)
    }
}

/// κ per period at tooth depth `depth` (nm), first order in the perturbation.
pub fn kappa_for_depth(depth: f64) -> f64 {
    DEFAULT_KAPPA_PER_PERIOD * depth / REFERENCE_DEPTH_NM
}

/// Designs a resonant grating for `mode_pair` in `geometry`.
pub fn grating_from_geometry(
    geometry: &WaveguideGeometry,
    mode_pair: (ModeId, ModeId),
    depth: f64,
    num_periods: u32,
    kappa_override: Option<f64>,
) -> Result<GratingSpec> {
    if !(depth.is_finite() && depth >= 0.0) {
        return Err(invalid(format!(
            "grating depth must be non-negative, got {depth}"
        )));
    }
    let (a, b) = mode_pair;
    let delta_n = (effective_index(geometry, a)? - effective_index(geometry, b)?).abs();
    let period = grating_period(geometry.stack.wavelength, delta_n)?;
    let spec = GratingSpec {
        period,
        depth,
        num_periods,
        kappa_per_period: kappa_override.unwrap_or_else(|| kappa_for_depth(depth)),
        mode_pair,
        symmetry: GratingSymmetry::for_pair(a, b),
        detuning: 0.0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Asymmetric directional coupler feeding the fundamental mode of a
/// single-mode waveguide into `target` of the multimode bus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionalCouplerSpec {
    /// µm
    #[serde(default = "default_coupling_length")]
    pub coupling_length: f64,
    pub target: ModeId,
    /// Power fraction leaked to the other bus modes.
    #[serde(default)]
    pub crosstalk: f64,
}

fn default_coupling_length() -> f64 {
    DEFAULT_COUPLING_LENGTH_UM
}

impl DirectionalCouplerSpec {
    pub fn ideal(target: ModeId) -> Self {
        Self {
            coupling_length: DEFAULT_COUPLING_LENGTH_UM,
            target,
            crosstalk: 0.0,
        }
    }
}

/// Power delivered by a multiplexer port into each of `channels` bus modes.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingMap {
    pub target_channel: usize,
    pub power: Vec<f64>,
}

impl RoutingMap {
    /// A real unitary whose `target_channel` column carries the routing
    /// amplitudes (Householder completion).
    pub fn unitary(&self) -> DMatrix<Complex64> {
        let m = self.power.len();
        let mut w: Vec<f64> = self.power.iter().map(|p| -p.sqrt()).collect();
        w[self.target_channel] += 1.0;
        let norm2: f64 = w.iter().map(|x| x * x).sum();
        DMatrix::from_fn(m, m, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            let reflect = if norm2 > 0.0 {
                2.0 * w[i] * w[j] / norm2
            } else {
                0.0
            };
            Complex64::new(delta - reflect, 0.0)
        })
    }
}

pub fn multiplexer_transfer(spec: &DirectionalCouplerSpec, channels: usize) -> Result<RoutingMap> {
    let eps = spec.crosstalk;
    if !(0.0..1.0).contains(&eps) {
        return Err(invalid(format!("crosstalk must lie in [0, 1), got {eps}")));
    }
    let target = spec.target.order as usize;
    if target >= channels {
        return Err(Error::ChannelMismatch(format!(
            "multiplexer targets {} but the circuit has {channels} channels",
            spec.target
        )));
    }
    if channels == 1 && eps > 0.0 {
        return Err(invalid("crosstalk needs at least two channels"));
    }
    let leak = if channels > 1 {
        eps / (channels - 1) as f64
    } else {
        0.0
    };
    let mut power = vec![leak; channels];
    power[target] = 1.0 - eps;
    Ok(RoutingMap {
        target_channel: target,
        power,
    })
}
