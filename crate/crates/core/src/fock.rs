//! Bosonic Fock-state engine over spatial-mode channels.
//!
//! Multi-photon transition amplitudes are matrix permanents of the mode
//! unitary. Two-photon statistics with partial spectral distinguishability are
//! a convex mixture of the fully indistinguishable and fully distinguishable
//! cases, weighted by the wavepacket overlap `x`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Speed of light in µm/s.
pub const SPEED_OF_LIGHT_UM_PER_S: f64 = 2.997_924_58e14;

/// Largest matrix handled by [`permanent`].
pub const PERMANENT_SIZE_LIMIT: usize = 20;

const UNITARY_TOL: f64 = 1e-12;

/// Occupation numbers over `m` channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState(pub Vec<u32>);

impl FockState {
    pub fn new(occupation: Vec<u32>) -> Result<Self> {
        if occupation.is_empty() {
            return Err(invalid("a Fock state needs at least one channel"));
        }
        Ok(Self(occupation))
    }

    /// One photon in each listed channel (channels may repeat).
    pub fn from_channels(modes: usize, channels: &[usize]) -> Result<Self> {
        let mut occ = vec![0; modes];
        for &c in channels {
            if c >= modes {
                return Err(Error::ChannelMismatch(format!(
                    "channel {c} out of range for {modes} channels"
                )));
            }
            occ[c] += 1;
        }
        Self::new(occ)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Channel index of every photon, with repetition.
    fn photon_channels(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n as usize))
            .collect()
    }

    fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    if !matrix.is_square() {
        return f64::INFINITY;
    }
    let n = matrix.nrows();
    let product = matrix.adjoint() * matrix;
    (product - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// An `m×m` unitary acting on mode amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary(DMatrix<Complex64>);

impl ModeUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARY_TOL)
    }

    pub fn with_tolerance(matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let deviation = unitarity_deviation(&matrix);
        if deviation > tol || matrix.nrows() == 0 {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(matrix))
    }

    pub fn identity(modes: usize) -> Self {
        Self(DMatrix::identity(modes, modes))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Amplitude for a photon entering `input` to leave in `output`.
    pub fn amplitude(&self, output: usize, input: usize) -> Complex64 {
        self.0[(output, input)]
    }
}

/// Matrix permanent by Ryser's formula, visiting subsets in Gray-code order.
pub fn permanent(matrix: &DMatrix<Complex64>) -> Result<Complex64> {
    if !matrix.is_square() {
        return Err(invalid(format!(
            "permanent needs a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let n = matrix.nrows();
    if n > PERMANENT_SIZE_LIMIT {
        return Err(Error::SizeLimit {
            size: n,
            limit: PERMANENT_SIZE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        gray = next;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if added {
                *sum += matrix[(i, col)];
            } else {
                *sum -= matrix[(i, col)];
            }
        }
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

fn check_pair(unitary: &ModeUnitary, input: &FockState, output: &FockState) -> Result<()> {
    let m = unitary.modes();
    if input.modes() != m || output.modes() != m {
        return Err(Error::ChannelMismatch(format!(
            "states over {} and {} channels for a {m}-channel unitary",
            input.modes(),
            output.modes()
        )));
    }
    if input.photons() != output.photons() {
        return Err(Error::PhotonNumberMismatch {
            input: input.photons(),
            output: output.photons(),
        });
    }
    Ok(())
}

/// `⟨output| Û |input⟩ = Per(U_sub) / √(Π nᵢ! Π n'ⱼ!)`, where `U_sub` repeats
/// row `j` of `U` `n'ⱼ` times and column `i` `nᵢ` times.
pub fn transition_amplitude(
    unitary: &ModeUnitary,
    input: &FockState,
    output: &FockState,
) -> Result<Complex64> {
    check_pair(unitary, input, output)?;
    let rows = output.photon_channels();
    let cols = input.photon_channels();
    let u = unitary.matrix();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| u[(rows[r], cols[c])]);
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub)? / norm)
}

/// Every occupation vector of `photons` photons over `modes` channels, in
/// descending lexicographic order.
pub fn fock_basis(photons: usize, modes: usize) -> Vec<FockState> {
    fn fill(rest: usize, prefix: &mut Vec<u32>, modes: usize, out: &mut Vec<FockState>) {
        if prefix.len() == modes - 1 {
            prefix.push(rest as u32);
            out.push(FockState(prefix.clone()));
            prefix.pop();
            return;
        }
        for n in (0..=rest).rev() {
            prefix.push(n as u32);
            fill(rest - n, prefix, modes, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes > 0 {
        fill(photons, &mut Vec::with_capacity(modes), modes, &mut out);
    }
    out
}

/// Amplitudes over the full Fock basis of fixed photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub basis: Vec<FockState>,
    pub amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, state: &FockState) -> f64 {
        self.basis
            .iter()
            .position(|s| s == state)
            .map(|i| self.amplitudes[i].norm_sqr())
            .unwrap_or(0.0)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (state, amp) in self.basis.iter().zip(&self.amplitudes) {
            if amp.norm_sqr() > 0.0 {
                writeln!(f, "{state}: {:+.6}{:+.6}i", amp.re, amp.im)?;
            }
        }
        Ok(())
    }
}

/// Evolves `input` through `unitary` into the full output distribution.
pub fn evolve(unitary: &ModeUnitary, input: &FockState) -> Result<PureState> {
    let basis = fock_basis(input.photons(), unitary.modes());
    let amplitudes = basis
        .iter()
        .map(|out| transition_amplitude(unitary, input, out))
        .collect::<Result<Vec<_>>>()?;
    Ok(PureState { basis, amplitudes })
}

/// Phenomenological photon-pair source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonPairSource {
    /// nm
    pub center_wavelength: f64,
    /// Intensity FWHM of the bandpass filters, nm.
    pub filter_fwhm: f64,
    /// Wavepacket overlap at zero delay.
    pub intrinsic_overlap: f64,
    /// Hz
    pub pair_rate: f64,
    /// Hz, one entry per arm.
    pub singles_rates: [f64; 2],
}

impl Default for PhotonPairSource {
    fn default() -> Self {
        Self {
            center_wavelength: 808.0,
            filter_fwhm: 3.0,
            intrinsic_overlap: 0.92,
            pair_rate: 2_000.0,
            singles_rates: [40_000.0, 40_000.0],
        }
    }
}

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3; // 2·√(2 ln 2)

impl PhotonPairSource {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.intrinsic_overlap) {
            return Err(invalid(format!(
                "intrinsic overlap must lie in [0, 1], got {}",
                self.intrinsic_overlap
            )));
        }
        if !(self.filter_fwhm.is_finite() && self.filter_fwhm > 0.0) {
            return Err(invalid("filter FWHM must be positive"));
        }
        if !(self.center_wavelength.is_finite() && self.center_wavelength > 0.0) {
            return Err(invalid("center wavelength must be positive"));
        }
        let rates = [self.pair_rate, self.singles_rates[0], self.singles_rates[1]];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(invalid("rates must be non-negative"));
        }
        Ok(())
    }

    /// RMS angular-frequency width (rad/s) of the Gaussian intensity spectrum.
    pub fn spectral_sigma(&self) -> f64 {
        let lambda_um = self.center_wavelength * 1e-3;
        let fwhm_um = self.filter_fwhm * 1e-3;
        let fwhm_omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_UM_PER_S * fwhm_um
            / (lambda_um * lambda_um);
        fwhm_omega / FWHM_PER_SIGMA
    }

    /// Coherence time τ_c (s) of the overlap `x(τ) = x₀·exp(−τ²/2τ_c²)`.
    pub fn coherence_time(&self) -> f64 {
        1.0 / self.spectral_sigma()
    }

    /// FWHM of `x(τ)` expressed as free-space path length, µm.
    pub fn overlap_fwhm(&self) -> f64 {
        FWHM_PER_SIGMA * self.coherence_time() * SPEED_OF_LIGHT_UM_PER_S
    }
}

/// Wavepacket overlap of the two photons after a free-space path difference
/// `delay` (µm).
///
/// Both photons carry the amplitude spectrum `√S(ω)` of the Gaussian filter;
/// the overlap is the first-order coherence `|∫ S(ω) e^{iωτ} dω|`, scaled by
/// the intrinsic overlap `x₀`.
pub fn spectral_overlap(source: &PhotonPairSource, delay: f64) -> f64 {
    if !delay.is_finite() {
        return 0.0;
    }
    let tau = delay / SPEED_OF_LIGHT_UM_PER_S;
    let tc = source.coherence_time();
    source.intrinsic_overlap * (-tau * tau / (2.0 * tc * tc)).exp()
}

fn check_channel(unitary: &ModeUnitary, channel: usize) -> Result<()> {
    if channel >= unitary.modes() {
        return Err(Error::ChannelMismatch(format!(
            "channel {channel} out of range for {} channels",
            unitary.modes()
        )));
    }
    Ok(())
}

/// Probability of finding one photon in `outputs.0` and one in `outputs.1`
/// (both in the same channel when equal) for photons entering `inputs`.
pub fn two_photon_probability(
    unitary: &ModeUnitary,
    inputs: (usize, usize),
    outputs: (usize, usize),
    overlap: f64,
) -> Result<f64> {
    let (i, j) = inputs;
    let (k, l) = outputs;
    for c in [i, j, k, l] {
        check_channel(unitary, c)?;
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(invalid(format!(
            "overlap must lie in [0, 1], got {overlap}"
        )));
    }
    let m = unitary.modes();
    let input = FockState::from_channels(m, &[i, j])?;
    let output = FockState::from_channels(m, &[k, l])?;
    let indistinguishable = transition_amplitude(unitary, &input, &output)?.norm_sqr();

    let p = |out: usize, inp: usize| unitary.amplitude(out, inp).norm_sqr();
    let distinguishable = if k == l {
        p(k, i) * p(k, j)
    } else {
        p(k, i) * p(l, j) + p(l, i) * p(k, j)
    };
    Ok(overlap * indistinguishable + (1.0 - overlap) * distinguishable)
}

/// Coincidence probability between distinct outputs `k ≠ l` for photons in
/// distinct inputs `i ≠ j`.
pub fn two_photon_coincidence(
    unitary: &ModeUnitary,
    inputs: (usize, usize),
    outputs: (usize, usize),
    overlap: f64,
) -> Result<f64> {
    if inputs.0 == inputs.1 {
        return Err(Error::ChannelMismatch("input channels must differ".into()));
    }
    if outputs.0 == outputs.1 {
        return Err(Error::ChannelMismatch("output channels must differ".into()));
    }
    two_photon_probability(unitary, inputs, outputs, overlap)
}

/// Ideal HOM visibility of a coupler with splitting ratio `eta`:
/// `2η(1−η) / (η² + (1−η)²)`.
pub fn hom_visibility(eta: f64) -> f64 {
    2.0 * eta * (1.0 - eta) / (eta * eta + (1.0 - eta) * (1.0 - eta))
}

/// Visibility seen with a source of intrinsic overlap `x0`.
pub fn measured_visibility(eta: f64, x0: f64) -> f64 {
    x0 * hom_visibility(eta)
}

/// Ratio of same-output pair probability at overlap `x` to the
/// distinguishable baseline, for a coupler of splitting ratio `eta`.
pub fn coalescence_enhancement(eta: f64, overlap: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!(
            "splitting ratio must lie in (0, 1), got {eta}"
        )));
    }
    let coupler = crate::coupling::coupler_unitary(eta, Default::default())?;
    let unitary = ModeUnitary::new(DMatrix::from_fn(2, 2, |r, c| coupler.matrix[(r, c)]))?;
    let bunched = two_photon_probability(&unitary, (0, 1), (0, 0), overlap)?;
    let baseline = two_photon_probability(&unitary, (0, 1), (0, 0), 0.0)?;
    Ok(bunched / baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn coupler(eta: f64) -> ModeUnitary {
        let c = crate::coupling::coupler_unitary(eta, Default::default()).unwrap();
        ModeUnitary::new(DMatrix::from_fn(2, 2, |r, col| c.matrix[(r, col)])).unwrap()
    }

    #[test]
    fn permanent_small_cases() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert_abs_diff_eq!(permanent(&id).unwrap().re, 1.0);
        let ones = DMatrix::from_element(3, 3, Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(permanent(&ones).unwrap().re, 6.0, epsilon = 1e-12);
        let empty = DMatrix::<Complex64>::zeros(0, 0);
        assert_eq!(permanent(&empty).unwrap(), Complex64::new(1.0, 0.0));
        let two =
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0].map(|v| Complex64::new(v, 0.0)));
        assert_abs_diff_eq!(permanent(&two).unwrap().re, 10.0);
    }

    #[test]
    fn permanent_size_limit() {
        let big = DMatrix::<Complex64>::identity(21, 21);
        assert!(matches!(
            permanent(&big),
            Err(Error::SizeLimit { size: 21, .. })
        ));
        assert!(permanent(&DMatrix::<Complex64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn hom_cancellation_at_balanced_coupler() {
        let u = coupler(0.5);
        let s11 = FockState(vec![1, 1]);
        assert!(transition_amplitude(&u, &s11, &s11).unwrap().norm() < 1e-15);
        let id = ModeUnitary::identity(2);
        assert_abs_diff_eq!(transition_amplitude(&id, &s11, &s11).unwrap().re, 1.0);
    }

    #[test]
    fn unbalanced_coupler_leaks_coincidences() {
        let u = coupler(0.55);
        let s11 = FockState(vec![1, 1]);
        let p = transition_amplitude(&u, &s11, &s11).unwrap().norm_sqr();
        assert_abs_diff_eq!(p, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn photon_number_mismatch() {
        let u = ModeUnitary::identity(2);
        let err =
            transition_amplitude(&u, &FockState(vec![1, 1]), &FockState(vec![1, 0])).unwrap_err();
        assert!(matches!(
            err,
            Error::PhotonNumberMismatch {
                input: 2,
                output: 1
            }
        ));
        let err = transition_amplitude(&u, &FockState(vec![1, 1, 0]), &FockState(vec![1, 1]))
            .unwrap_err();
        assert!(matches!(err, Error::ChannelMismatch(_)));
    }

    #[test]
    fn basis_size_is_binomial() {
        assert_eq!(fock_basis(2, 2).len(), 3);
        assert_eq!(fock_basis(3, 4).len(), 20);
        assert_eq!(fock_basis(0, 3), vec![FockState(vec![0, 0, 0])]);
        assert_eq!(fock_basis(2, 2)[0], FockState(vec![2, 0]));
    }

    #[test]
    fn evolved_state_prints_kets() {
        let state = evolve(&coupler(0.5), &FockState(vec![1, 1])).unwrap();
        assert_abs_diff_eq!(state.norm_sqr(), 1.0, epsilon = 1e-12);
        let text = state.to_string();
        assert!(text.contains("|2,0⟩:"));
        assert!(!text.contains("|1,1⟩:"));
    }

    #[test]
    fn coincidence_limits() {
        let u = coupler(0.5);
        assert!(two_photon_coincidence(&u, (0, 1), (0, 1), 1.0).unwrap() < 1e-15);
        assert_abs_diff_eq!(
            two_photon_coincidence(&u, (0, 1), (0, 1), 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let u = coupler(0.55);
        assert_abs_diff_eq!(
            two_photon_coincidence(&u, (0, 1), (0, 1), 1.0).unwrap(),
            0.01,
            epsilon = 1e-12
        );
        assert!(two_photon_coincidence(&u, (0, 0), (0, 1), 1.0).is_err());
        assert!(two_photon_coincidence(&u, (0, 1), (1, 1), 1.0).is_err());
        assert!(two_photon_coincidence(&u, (0, 2), (0, 1), 1.0).is_err());
    }

    #[test]
    fn visibility_examples() {
        assert_abs_diff_eq!(hom_visibility(0.5), 1.0);
        assert!((hom_visibility(0.64) - 0.8546).abs() < 1e-4);
        assert!((measured_visibility(0.64, 0.92) - 0.786).abs() < 5e-4);
        assert!((hom_visibility(0.55) - 0.9802).abs() < 1e-4);
        assert!((measured_visibility(0.55, 0.92) - 0.902).abs() < 5e-4);
        assert_eq!(hom_visibility(0.0), 0.0);
    }

    #[test]
    fn coalescence_examples() {
        assert_abs_diff_eq!(
            coalescence_enhancement(0.55, 1.0).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            coalescence_enhancement(0.55, 0.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            coalescence_enhancement(0.3, 0.92).unwrap(),
            1.92,
            epsilon = 1e-12
        );
        assert!(coalescence_enhancement(0.0, 0.5).is_err());
        assert!(coalescence_enhancement(1.0, 0.5).is_err());
    }

    #[test]
    fn overlap_limits() {
        let source = PhotonPairSource::default();
        assert_eq!(spectral_overlap(&source, 0.0), 0.92);
        assert!(spectral_overlap(&source, 1e5) < 1e-12);
        assert_eq!(spectral_overlap(&source, f64::INFINITY), 0.0);
        let half = source.overlap_fwhm() / 2.0;
        assert_abs_diff_eq!(spectral_overlap(&source, half), 0.46, epsilon = 1e-12);
    }
}
