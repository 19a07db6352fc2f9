//! Effective indices of rectangular dielectric waveguides.
//!
//! Modes are computed with the effective-index method: the rectangular core is
//! reduced to a vertical slab (height) whose fundamental effective index becomes
//! the core index of a horizontal slab (width). TE-like modes solve the TE slab
//! equation vertically and the TM slab equation horizontally; TM-like modes swap
//! the two.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Refractive index of LPCVD Si3N4 at 808 nm (two-term Sellmeier fit, dispersion
/// constants B = 3.0249, 40314 and C = 0.1353406, 1239.842 µm).
pub const SI3N4_INDEX_808NM: f64 = 2.023634420853;

/// Refractive index of fused SiO2 at 808 nm (three-term Sellmeier).
pub const SIO2_INDEX_808NM: f64 = 1.453180236035;

pub const DEFAULT_WAVELENGTH_NM: f64 = 808.0;

/// Device geometries of the single-mode feed and the three-mode bus.
pub const SINGLE_MODE_WIDTH_NM: f64 = 420.0;
pub const MULTIMODE_WIDTH_NM: f64 = 1600.0;
pub const CORE_HEIGHT_NM: f64 = 190.0;

/// Index differences at or below this are treated as degenerate.
pub const DEGENERATE_DELTA_N: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    fn other(self) -> Self {
        match self {
            Polarization::TE => Polarization::TM,
            Polarization::TM => Polarization::TE,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::TE => f.write_str("TE"),
            Polarization::TM => f.write_str("TM"),
        }
    }
}

/// A guided mode, labelled by polarization family and lateral order.
/// Serialized as its label, e.g. `"TE2"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ModeId {
    pub family: Polarization,
    pub order: u32,
}

impl ModeId {
    pub const fn te(order: u32) -> Self {
        Self {
            family: Polarization::TE,
            order,
        }
    }

    pub const fn tm(order: u32) -> Self {
        Self {
            family: Polarization::TM,
            order,
        }
    }

    /// Even modes have a symmetric lateral profile.
    pub fn is_even(&self) -> bool {
        self.order.is_multiple_of(2)
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.order)
    }
}

impl FromStr for ModeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = if let Some(rest) = s.strip_prefix("TE") {
            (Polarization::TE, rest)
        } else if let Some(rest) = s.strip_prefix("TM") {
            (Polarization::TM, rest)
        } else {
            return Err(invalid(format!("mode `{s}` must start with TE or TM")));
        };
        let order = rest
            .parse::<u32>()
            .map_err(|_| invalid(format!("mode `{s}` has no valid order")))?;
        Ok(Self { family, order })
    }
}

impl TryFrom<String> for ModeId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModeId> for String {
    fn from(mode: ModeId) -> String {
        mode.to_string()
    }
}

/// Core and cladding indices at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialStack {
    pub n_core: f64,
    pub n_clad: f64,
    /// Vacuum wavelength in nm.
    pub wavelength: f64,
}

impl MaterialStack {
    pub fn new(n_core: f64, n_clad: f64, wavelength: f64) -> Result<Self> {
        let stack = Self {
            n_core,
            n_clad,
            wavelength,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn validate(&self) -> Result<()> {
        check_indices(self.n_core, self.n_clad)?;
        check_positive("wavelength", self.wavelength)
    }
}

impl Default for MaterialStack {
    fn default() -> Self {
        Self {
            n_core: SI3N4_INDEX_808NM,
            n_clad: SIO2_INDEX_808NM,
            wavelength: DEFAULT_WAVELENGTH_NM,
        }
    }
}

/// Rectangular channel waveguide cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    /// nm
    pub width: f64,
    /// nm
    pub height: f64,
    pub stack: MaterialStack,
}

impl WaveguideGeometry {
    pub fn new(width: f64, height: f64, stack: MaterialStack) -> Result<Self> {
        let geometry = Self {
            width,
            height,
            stack,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn single_mode() -> Self {
        Self {
            width: SINGLE_MODE_WIDTH_NM,
            height: CORE_HEIGHT_NM,
            stack: MaterialStack::default(),
        }
    }

    pub fn multimode() -> Self {
        Self {
            width: MULTIMODE_WIDTH_NM,
            height: CORE_HEIGHT_NM,
            stack: MaterialStack::default(),
        }
    }

    pub fn with_width(self, width: f64) -> Self {
        Self { width, ..self }
    }

    pub fn with_height(self, height: f64) -> Self {
        Self { height, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("width", self.width)?;
        check_positive("height", self.height)?;
        self.stack.validate()
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn check_indices(n_core: f64, n_clad: f64) -> Result<()> {
    if !(n_core.is_finite() && n_clad.is_finite()) || n_clad <= 0.0 || n_core <= n_clad {
        return Err(invalid(format!(
            "indices must satisfy n_core > n_clad > 0, got n_core = {n_core}, n_clad = {n_clad}"
        )));
    }
    Ok(())
}

/// Transverse resonance residual of a symmetric three-layer slab:
///
/// `k0·t·κ − m·π − 2·atan(ρ·γ/κ)` with `κ = √(n_core² − n²)`,
/// `γ = √(n² − n_clad²)` and `ρ = 1` (TE) or `(n_core/n_clad)²` (TM).
///
/// Decreasing in `n` on `[n_clad, n_core]`; its zero is the guided mode of
/// order `m`.
pub fn slab_residual(
    n_core: f64,
    n_clad: f64,
    thickness: f64,
    wavelength: f64,
    family: Polarization,
    order: u32,
    n_eff: f64,
) -> f64 {
    let k0 = 2.0 * PI / wavelength;
    let rho = match family {
        Polarization::TE => 1.0,
        Polarization::TM => (n_core / n_clad).powi(2),
    };
    let kappa = (n_core * n_core - n_eff * n_eff).max(0.0).sqrt();
    let gamma = (n_eff * n_eff - n_clad * n_clad).max(0.0).sqrt();
    k0 * thickness * kappa - order as f64 * PI - 2.0 * (rho * gamma).atan2(kappa)
}

/// Effective index of the order-`order` guided mode of a symmetric slab.
pub fn slab_neff(
    n_core: f64,
    n_clad: f64,
    thickness: f64,
    wavelength: f64,
    family: Polarization,
    order: u32,
) -> Result<f64> {
    check_indices(n_core, n_clad)?;
    check_positive("thickness", thickness)?;
    check_positive("wavelength", wavelength)?;

    let residual = |n: f64| slab_residual(n_core, n_clad, thickness, wavelength, family, order, n);
    let cutoff = || Error::ModeCutoff {
        mode: ModeId { family, order },
        detail: format!("slab of thickness {thickness} nm at {wavelength} nm"),
    };

    let (mut lo, mut hi) = (n_clad, n_core);
    if residual(lo) <= 0.0 {
        return Err(cutoff());
    }
    // Bisect to the floating-point limit; the residual is monotone on the bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n_eff = if residual(hi).abs() < residual(lo).abs() {
        hi
    } else {
        lo
    };
    if n_eff <= n_clad || n_eff >= n_core {
        return Err(cutoff());
    }
    Ok(n_eff)
}

/// Effective index of `mode` in `geometry` by the effective-index method.
pub fn effective_index(geometry: &WaveguideGeometry, mode: ModeId) -> Result<f64> {
    geometry.validate()?;
    let stack = &geometry.stack;
    let vertical = slab_neff(
        stack.n_core,
        stack.n_clad,
        geometry.height,
        stack.wavelength,
        mode.family,
        0,
    )?;
    slab_neff(
        vertical,
        stack.n_clad,
        geometry.width,
        stack.wavelength,
        mode.family.other(),
        mode.order,
    )
    .map_err(|err| match err {
        Error::ModeCutoff { detail, .. } => Error::ModeCutoff {
            mode,
            detail: format!("{} x {} nm core: {detail}", geometry.width, geometry.height),
        },
        other => other,
    })
}

/// Effective index with cutoff mapped to the cladding index, so the index is a
/// continuous function of width.
fn index_or_cladding(geometry: &WaveguideGeometry, mode: ModeId) -> Result<f64> {
    match effective_index(geometry, mode) {
        Ok(n) => Ok(n),
        Err(Error::ModeCutoff { .. }) => Ok(geometry.stack.n_clad),
        Err(e) => Err(e),
    }
}

/// Multimode width at which `target_mode` has the same effective index as the
/// fundamental mode of `single_mode`. Used to size asymmetric directional
/// couplers.
pub fn phase_match_width(
    single_mode: &WaveguideGeometry,
    target_mode: ModeId,
    width_range: (f64, f64),
) -> Result<f64> {
    let fundamental = ModeId {
        family: target_mode.family,
        order: 0,
    };
    let reference = effective_index(single_mode, fundamental)?;
    if target_mode == fundamental {
        return Ok(single_mode.width);
    }

    let (lo, hi) = width_range;
    check_positive("width range start", lo)?;
    check_positive("width range end", hi)?;
    if lo >= hi {
        return Err(invalid(format!("width range [{lo}, {hi}] is empty")));
    }

    let mismatch =
        |w: f64| index_or_cladding(&single_mode.with_width(w), target_mode).map(|n| n - reference);
    let no_match = || Error::NoPhaseMatch {
        mode: target_mode,
        lo,
        hi,
    };

    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (mismatch(a)?, mismatch(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(no_match());
    }
    let rising = fa < 0.0;
    while b - a > 1e-9 {
        let mid = 0.5 * (a + b);
        let fm = mismatch(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Grating period in µm that bridges an effective-index difference `delta_n`
/// at `wavelength` (nm).
pub fn grating_period(wavelength: f64, delta_n: f64) -> Result<f64> {
    check_positive("wavelength", wavelength)?;
    if !delta_n.is_finite() {
        return Err(invalid(format!(
            "index difference must be finite, got {delta_n}"
        )));
    }
    if delta_n.abs() <= DEGENERATE_DELTA_N {
        return Err(Error::DegeneratePhaseMatch { delta_n });
    }
    if delta_n < 0.0 {
        return Err(invalid(format!(
            "index difference must be positive, got {delta_n}"
        )));
    }
    Ok(wavelength / delta_n * 1e-3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Width,
    Height,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParameter::Width => f.write_str("width"),
            SweepParameter::Height => f.write_str("height"),
        }
    }
}

/// Effective indices of several modes over a width or height sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub parameter: SweepParameter,
    /// Sweep values in nm, ascending.
    pub values: Vec<f64>,
    pub modes: Vec<ModeId>,
    /// `n_eff[mode][point]`; `None` where the mode is cut off.
    pub n_eff: Vec<Vec<Option<f64>>>,
    pub wavelength: f64,
}

impl DispersionCurve {
    pub fn curve(&self, mode: ModeId) -> Option<&[Option<f64>]> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .map(|i| self.n_eff[i].as_slice())
    }

    /// Long-format CSV, one row per (point, mode). Cut-off modes leave
    /// `n_eff` empty.
    pub fn to_csv(&self, fmt_num: impl Fn(f64) -> String) -> String {
        let mut out = String::from("sweep_param,mode_family,mode_order,n_eff\n");
        for (p, value) in self.values.iter().enumerate() {
            for (m, mode) in self.modes.iter().enumerate() {
                let n = self.n_eff[m][p].map(&fmt_num).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_num(*value),
                    mode.family,
                    mode.order,
                    n
                ));
            }
        }
        out
    }
}

/// Sweeps `parameter` of `base` over `values`. Cutoff points are recorded as
/// `None` rather than failing the sweep.
pub fn dispersion_sweep(
    base: &WaveguideGeometry,
    parameter: SweepParameter,
    values: &[f64],
    modes: &[ModeId],
) -> Result<DispersionCurve> {
    if values.is_empty() {
        return Err(invalid("empty sweep"));
    }
    if modes.is_empty() {
        return Err(invalid("no modes requested"));
    }
    let mut values = values.to_vec();
    for v in &values {
        check_positive(&parameter.to_string(), *v)?;
    }
    values.sort_by(f64::total_cmp);

    let mut n_eff = Vec::with_capacity(modes.len());
    for mode in modes {
        let mut row = Vec::with_capacity(values.len());
        for &v in &values {
            let geometry = match parameter {
                SweepParameter::Width => base.with_width(v),
                SweepParameter::Height => base.with_height(v),
            };
            match effective_index(&geometry, *mode) {
                Ok(n) => row.push(Some(n)),
                Err(Error::ModeCutoff { .. }) => row.push(None),
                Err(e) => return Err(e),
            }
        }
        n_eff.push(row);
    }

    Ok(DispersionCurve {
        parameter,
        values,
        modes: modes.to_vec(),
        n_eff,
        wavelength: base.stack.wavelength,
    })
}
