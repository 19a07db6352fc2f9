//! Multimode circuits: element composition, count simulation, and triangular
//! (Reck) decomposition of arbitrary unitaries into two-channel couplers.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coupling::{
    coupler_unitary, multiplexer_transfer, DirectionalCouplerSpec, GratingSpec, PhaseConvention,
};
use crate::error::{invalid, Error, Result};
use crate::fock::{
    spectral_overlap, two_photon_coincidence, unitarity_deviation, ModeUnitary, PhotonPairSource,
};

/// Aggregate on-chip loss, dB.
pub const DEFAULT_DEVICE_LOSS_DB: f64 = 0.2;
pub const DEFAULT_WINDOW_NS: f64 = 2.0;
pub const DEFAULT_HEATER_POWER_PER_2PI_W: f64 = 1.3;
/// Largest unitary accepted by [`reck_decompose`].
pub const RECK_MODE_LIMIT: usize = 16;

const ELEMENT_TOL: f64 = 1e-10;

/// Linear power-to-phase model of a thermo-optic heater.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaterModel {
    /// Electrical power producing a 2π differential phase, W.
    pub power_per_2pi: f64,
    /// rad
    #[serde(default)]
    pub phase_offset: f64,
}

impl Default for HeaterModel {
    fn default() -> Self {
        Self {
            power_per_2pi: DEFAULT_HEATER_POWER_PER_2PI_W,
            phase_offset: 0.0,
        }
    }
}

impl HeaterModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_per_2pi.is_finite() && self.power_per_2pi > 0.0) {
            return Err(invalid(format!(
                "power per 2π must be positive, got {}",
                self.power_per_2pi
            )));
        }
        Ok(())
    }
}

/// `φ = 2π·power/P_2π + φ₀`
pub fn heater_phase(model: &HeaterModel, power: f64) -> f64 {
    2.0 * PI * power / model.power_per_2pi + model.phase_offset
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseModel {
    Fixed { phase: f64 },
    Heater { heater: HeaterModel },
}

impl PhaseModel {
    fn phase(&self, heater_power: f64) -> f64 {
        match self {
            PhaseModel::Fixed { phase } => *phase,
            PhaseModel::Heater { heater } => heater_phase(heater, heater_power),
        }
    }
}

/// One device in a circuit. Bus channel `k` carries lateral mode order `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    MultiplexerIn(DirectionalCouplerSpec),
    GratingBs(GratingSpec),
    /// Two-channel coupler between arbitrary channels, e.g. an off-chip
    /// fiber splitter.
    BeamSplitter {
        channels: (usize, usize),
        eta: f64,
    },
    PhaseShifter {
        channels: Vec<usize>,
        model: PhaseModel,
    },
    /// Extra free-space path (µm) in front of an input channel.
    RelativeDelay {
        channel: usize,
        delay: f64,
    },
    Loss {
        db: f64,
    },
    MultiplexerOut(DirectionalCouplerSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub channels: usize,
    pub elements: Vec<Element>,
}

/// Lossless transfer matrix plus the scalar parts of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    pub unitary: ModeUnitary,
    /// Power transmission per channel, applied to rates.
    pub transmission: Vec<f64>,
    /// Accumulated delay per input channel, µm.
    pub delays: Vec<f64>,
}

fn check_channel(channel: usize, m: usize, what: &str) -> Result<()> {
    if channel >= m {
        return Err(Error::ChannelMismatch(format!(
            "{what} uses channel {channel} but the circuit has {m} channels"
        )));
    }
    Ok(())
}

fn embed(
    block: &nalgebra::Matrix2<Complex64>,
    (a, b): (usize, usize),
    m: usize,
) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(m, m);
    out[(a, a)] = block[(0, 0)];
    out[(a, b)] = block[(0, 1)];
    out[(b, a)] = block[(1, 0)];
    out[(b, b)] = block[(1, 1)];
    out
}

impl Element {
    /// Mode matrix of the element, or `None` for scalar elements.
    fn matrix(&self, m: usize, heater_power: f64) -> Result<Option<DMatrix<Complex64>>> {
        let matrix = match self {
            Element::MultiplexerIn(spec) | Element::MultiplexerOut(spec) => {
                // The Householder completion is Hermitian, so the demultiplexer
                // (its adjoint) has the same matrix.
                multiplexer_transfer(spec, m)?.unitary()
            }
            Element::GratingBs(spec) => {
                let (a, b) = (
                    spec.mode_pair.0.order as usize,
                    spec.mode_pair.1.order as usize,
                );
                check_channel(a.max(b), m, "grating")?;
                embed(&spec.unitary()?.matrix, (a, b), m)
            }
            Element::BeamSplitter { channels, eta } => {
                let (a, b) = *channels;
                check_channel(a.max(b), m, "beam splitter")?;
                if a == b {
                    return Err(Error::ChannelMismatch(
                        "beam splitter needs two distinct channels".into(),
                    ));
                }
                embed(
                    &coupler_unitary(*eta, PhaseConvention::Symmetric)?.matrix,
                    (a, b),
                    m,
                )
            }
            Element::PhaseShifter { channels, model } => {
                if let PhaseModel::Heater { heater } = model {
                    heater.validate()?;
                }
                let phase = Complex64::from_polar(1.0, model.phase(heater_power));
                let mut out = DMatrix::identity(m, m);
                for &c in channels {
                    check_channel(c, m, "phase shifter")?;
                    out[(c, c)] = phase;
                }
                out
            }
            Element::RelativeDelay { channel, .. } => {
                check_channel(*channel, m, "delay")?;
                return Ok(None);
            }
            Element::Loss { db } => {
                if !(db.is_finite() && *db >= 0.0) {
                    return Err(invalid(format!("loss must be non-negative, got {db} dB")));
                }
                return Ok(None);
            }
        };
        Ok(Some(matrix))
    }
}

/// Multiplies the element matrices in light-propagation order.
pub fn compile(
    elements: &[Element],
    channels: usize,
    heater_power: f64,
) -> Result<CompiledCircuit> {
    if channels == 0 {
        return Err(Error::ChannelMismatch(
            "a circuit needs at least one channel".into(),
        ));
    }
    let mut unitary = DMatrix::<Complex64>::identity(channels, channels);
    let mut transmission = 1.0;
    let mut delays = vec![0.0; channels];
    for (index, element) in elements.iter().enumerate() {
        match element {
            Element::Loss { db } => transmission *= 10f64.powf(-db / 10.0),
            Element::RelativeDelay { channel, delay } => {
                if !delay.is_finite() {
                    return Err(invalid("delay must be finite"));
                }
                check_channel(*channel, channels, "delay")?;
                delays[*channel] += delay;
            }
            _ => {}
        }
        if let Some(matrix) = element.matrix(channels, heater_power)? {
            let deviation = unitarity_deviation(&matrix);
            if !(deviation <= ELEMENT_TOL) {
                return Err(Error::NonUnitaryElement { index, deviation });
            }
            unitary = matrix * unitary;
        }
    }
    Ok(CompiledCircuit {
        unitary: ModeUnitary::with_tolerance(unitary, ELEMENT_TOL)?,
        transmission: vec![transmission; channels],
        delays,
    })
}

impl Circuit {
    pub fn compile(&self) -> Result<CompiledCircuit> {
        compile(&self.elements, self.channels, 0.0)
    }

    pub fn compile_at(&self, heater_power: f64) -> Result<CompiledCircuit> {
        compile(&self.elements, self.channels, heater_power)
    }
}

/// Accidental coincidence rate (Hz) for singles `s1`, `s2` (Hz) in a window
/// of `window` ns.
pub fn accidentals(s1: f64, s2: f64, window: f64) -> f64 {
    s1 * s2 * window * 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceConfig {
    /// ns
    pub window: f64,
    /// Uncorrelated detector singles (dark counts, stray light), Hz per detector.
    pub background_singles: [f64; 2],
    /// s
    pub integration_time: f64,
    pub subtract_accidentals: bool,
    /// Enables Poisson sampling when set.
    pub seed: Option<u64>,
}

impl Default for CoincidenceConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW_NS,
            background_singles: [0.0, 0.0],
            integration_time: 10.0,
            subtract_accidentals: true,
            seed: None,
        }
    }
}

impl CoincidenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(invalid("coincidence window must be positive"));
        }
        if !(self.integration_time.is_finite() && self.integration_time > 0.0) {
            return Err(invalid("integration time must be positive"));
        }
        if self
            .background_singles
            .iter()
            .any(|s| !(s.is_finite() && *s >= 0.0))
        {
            return Err(invalid("background singles must be non-negative"));
        }
        Ok(())
    }
}

/// Counts accumulated over one integration period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub raw: f64,
    pub accidentals: f64,
    pub net: f64,
    pub singles: [f64; 2],
    /// √raw
    pub stderr: f64,
}

impl MeasurementRecord {
    /// The coincidence figure a plot would show.
    pub fn coincidences(&self, subtract_accidentals: bool) -> f64 {
        if subtract_accidentals {
            self.net
        } else {
            self.raw
        }
    }
}

/// Photons launched into the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Excitation {
    /// Both photons of a pair; source arm 0 feeds `channels.0`.
    Pair { channels: (usize, usize) },
    /// One source arm only.
    Single { channel: usize, arm: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanVariable {
    /// Free-space path (µm) added in front of `channel`.
    Delay { channel: usize, values: Vec<f64> },
    /// Power (W) applied to every heater in the circuit.
    HeaterPower { values: Vec<f64> },
}

impl ScanVariable {
    pub fn values(&self) -> &[f64] {
        match self {
            ScanVariable::Delay { values, .. } | ScanVariable::HeaterPower { values } => values,
        }
    }
}

/// One detection experiment: circuit, source, detectors, counting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSetup {
    pub circuit: Circuit,
    pub source: PhotonPairSource,
    pub config: CoincidenceConfig,
    pub excitation: Excitation,
    /// Output channels of detectors A and B.
    pub detectors: (usize, usize),
}

/// Expected rates (Hz) at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Rates {
    coincidences: f64,
    singles: [f64; 2],
}

fn expected_rates(
    setup: &CountSetup,
    compiled: &CompiledCircuit,
    extra_delay: (usize, f64),
) -> Result<Rates> {
    let u = &compiled.unitary;
    let t = &compiled.transmission;
    let (k, l) = setup.detectors;
    let m = u.modes();
    check_channel(k, m, "detector A")?;
    check_channel(l, m, "detector B")?;
    if k == l {
        return Err(Error::ChannelMismatch(
            "detectors must watch distinct channels".into(),
        ));
    }
    let source = &setup.source;
    let bg = setup.config.background_singles;
    let delay_of = |c: usize| {
        compiled.delays[c]
            + if extra_delay.0 == c {
                extra_delay.1
            } else {
                0.0
            }
    };

    match setup.excitation {
        Excitation::Pair { channels: (i, j) } => {
            check_channel(i, m, "input")?;
            check_channel(j, m, "input")?;
            let overlap = spectral_overlap(source, delay_of(j) - delay_of(i));
            let p = two_photon_coincidence(u, (i, j), (k, l), overlap)?;
            let singles_at = |d: usize| {
                source.singles_rates[0] * u.amplitude(d, i).norm_sqr() * t[d]
                    + source.singles_rates[1] * u.amplitude(d, j).norm_sqr() * t[d]
            };
            Ok(Rates {
                coincidences: source.pair_rate * p * t[k] * t[l],
                singles: [singles_at(k) + bg[0], singles_at(l) + bg[1]],
            })
        }
        Excitation::Single { channel, arm } => {
            check_channel(channel, m, "input")?;
            if arm > 1 {
                return Err(invalid(format!("source arm must be 0 or 1, got {arm}")));
            }
            let rate = source.singles_rates[arm];
            let singles_at = |d: usize| rate * u.amplitude(d, channel).norm_sqr() * t[d];
            Ok(Rates {
                coincidences: 0.0,
                singles: [singles_at(k) + bg[0], singles_at(l) + bg[1]],
            })
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    if mean > 0.0 {
        Poisson::new(mean).map(|d| d.sample(rng)).unwrap_or(mean)
    } else {
        0.0
    }
}

fn record(
    rates: Rates,
    config: &CoincidenceConfig,
    rng: Option<&mut ChaCha8Rng>,
) -> MeasurementRecord {
    let time = config.integration_time;
    let acc_rate = accidentals(rates.singles[0], rates.singles[1], config.window);
    match rng {
        None => {
            let acc = acc_rate * time;
            let raw = (rates.coincidences + acc_rate) * time;
            MeasurementRecord {
                raw,
                accidentals: acc,
                net: raw - acc,
                singles: rates.singles.map(|s| s * time),
                stderr: raw.sqrt(),
            }
        }
        Some(rng) => {
            let singles = [
                sample(rng, rates.singles[0] * time),
                sample(rng, rates.singles[1] * time),
            ];
            let raw = sample(rng, rates.coincidences * time) + sample(rng, acc_rate * time);
            // Accidentals are estimated from the measured singles, never above raw.
            let estimate = accidentals(singles[0], singles[1], config.window) / time;
            let acc = estimate.min(raw);
            MeasurementRecord {
                raw,
                accidentals: acc,
                net: raw - acc,
                singles,
                stderr: raw.sqrt(),
            }
        }
    }
}

/// Counts at every point of `scan`, in scan order. Deterministic expected
/// counts unless `config.seed` is set.
pub fn simulate_counts(
    setup: &CountSetup,
    scan: &ScanVariable,
) -> Result<Vec<(f64, MeasurementRecord)>> {
    setup.source.validate()?;
    setup.config.validate()?;
    let base = setup.circuit.compile()?;

    scan.values()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !value.is_finite() {
                return Err(invalid("scan values must be finite"));
            }
            let rates = match scan {
                ScanVariable::Delay { channel, .. } => {
                    check_channel(*channel, setup.circuit.channels, "delay scan")?;
                    expected_rates(setup, &base, (*channel, value))?
                }
                ScanVariable::HeaterPower { .. } => {
                    if value < 0.0 {
                        return Err(invalid("heater power must be non-negative"));
                    }
                    let compiled = setup.circuit.compile_at(value)?;
                    expected_rates(setup, &compiled, (usize::MAX, 0.0))?
                }
            };
            let mut rng = setup.config.seed.map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index as u64);
                rng
            });
            Ok((value, record(rates, &setup.config, rng.as_mut())))
        })
        .collect()
}

/// One coupler of a triangular mesh: a phase `phase` on `channels.0`
/// followed by a symmetric coupler of splitting ratio `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReckStage {
    pub channels: (usize, usize),
    pub eta: f64,
    pub phase: f64,
}

impl ReckStage {
    fn matrix(&self) -> nalgebra::Matrix2<Complex64> {
        let t = (1.0 - self.eta).sqrt();
        let r = self.eta.sqrt();
        let e = Complex64::from_polar(1.0, self.phase);
        let ir = Complex64::new(0.0, r);
        nalgebra::Matrix2::new(e * t, ir, e * ir, Complex64::new(t, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReckDecomposition {
    pub modes: usize,
    /// In light-propagation order.
    pub stages: Vec<ReckStage>,
    /// Phases applied to each output channel after the mesh.
    pub output_phases: Vec<f64>,
}

impl ReckDecomposition {
    pub fn recompose(&self) -> DMatrix<Complex64> {
        let m = self.modes;
        let mut out = DMatrix::<Complex64>::identity(m, m);
        for stage in &self.stages {
            let (a, b) = stage.channels;
            let block = stage.matrix();
            for col in 0..m {
                let (xa, xb) = (out[(a, col)], out[(b, col)]);
                out[(a, col)] = block[(0, 0)] * xa + block[(0, 1)] * xb;
                out[(b, col)] = block[(1, 0)] * xa + block[(1, 1)] * xb;
            }
        }
        for (row, phase) in self.output_phases.iter().enumerate() {
            let p = Complex64::from_polar(1.0, *phase);
            for col in 0..m {
                out[(row, col)] *= p;
            }
        }
        out
    }

    /// The same mesh as circuit elements.
    pub fn to_elements(&self) -> Vec<Element> {
        let mut elements = Vec::with_capacity(2 * self.stages.len() + self.modes);
        for stage in &self.stages {
            elements.push(Element::PhaseShifter {
                channels: vec![stage.channels.0],
                model: PhaseModel::Fixed { phase: stage.phase },
            });
            elements.push(Element::BeamSplitter {
                channels: stage.channels,
                eta: stage.eta,
            });
        }
        for (c, phase) in self.output_phases.iter().enumerate() {
            elements.push(Element::PhaseShifter {
                channels: vec![c],
                model: PhaseModel::Fixed { phase: *phase },
            });
        }
        elements
    }
}

/// Factorizes `target` into a triangular mesh of two-channel couplers by
/// nulling the sub-diagonal of each row from the bottom up.
pub fn reck_decompose(target: &DMatrix<Complex64>) -> Result<ReckDecomposition> {
    if !target.is_square() || target.nrows() == 0 {
        return Err(invalid("decomposition needs a non-empty square matrix"));
    }
    let m = target.nrows();
    if m > RECK_MODE_LIMIT {
        return Err(invalid(format!(
            "at most {RECK_MODE_LIMIT} modes supported, got {m}"
        )));
    }
    let deviation = unitarity_deviation(target);
    if !(deviation <= 1e-10) {
        return Err(Error::NotUnitary { deviation });
    }

    let mut work = target.clone();
    let mut stages = Vec::new();
    for row in (1..m).rev() {
        for col in 0..row {
            let a = work[(row, col)];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let b = work[(row, col + 1)];
            let eta = a.norm_sqr() / (a.norm_sqr() + b.norm_sqr());
            let phase = a.arg() - b.arg() - PI / 2.0;
            let stage = ReckStage {
                channels: (col, col + 1),
                eta,
                phase,
            };
            // work ← work · T†
            let t_dag = stage.matrix().adjoint();
            for r in 0..m {
                let (x, y) = (work[(r, col)], work[(r, col + 1)]);
                work[(r, col)] = x * t_dag[(0, 0)] + y * t_dag[(1, 0)];
                work[(r, col + 1)] = x * t_dag[(0, 1)] + y * t_dag[(1, 1)];
            }
            work[(row, col)] = Complex64::new(0.0, 0.0);
            stages.push(stage);
        }
    }
    let output_phases = (0..m).map(|k| work[(k, k)].arg()).collect();
    Ok(ReckDecomposition {
        modes: m,
        stages,
        output_phases,
    })
}
