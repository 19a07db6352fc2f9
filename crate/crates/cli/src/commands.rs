use std::collections::BTreeMap;

use modeweaver::circuit::reck_decompose;
use modeweaver::coupling::grating_from_geometry;
use modeweaver::experiments::{
    reproduce_paper as run_reproduction, run_hom_dip, run_hom_peak, run_noon, run_splitting_vs_n,
    PaperTarget, ReproduceOptions, ScanResult,
};
use modeweaver::fock::unitarity_deviation;
use modeweaver::wgmodes::{
    dispersion_sweep, effective_index, MaterialStack, SweepParameter, WaveguideGeometry,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_num, to_json, Sink};

pub enum Outcome {
    Success,
    TargetsFailed(Vec<String>),
}

pub enum Sweep {
    Width(Vec<f64>),
    Height(Vec<f64>),
}

fn sink(cfg: &RunConfig) -> Sink {
    Sink {
        dir: cfg.output.clone(),
    }
}

fn format(cfg: &RunConfig) -> Format {
    cfg.format.unwrap_or_default()
}

/// Seed used for Poisson counting, when enabled.
fn counting_seed(cfg: &RunConfig) -> Option<u64> {
    cfg.poisson.then(|| cfg.seed.unwrap_or(0))
}

fn stack(
    n_core: Option<f64>,
    n_clad: Option<f64>,
    wavelength: Option<f64>,
) -> Result<MaterialStack, CliError> {
    let d = MaterialStack::default();
    Ok(MaterialStack::new(
        n_core.unwrap_or(d.n_core),
        n_clad.unwrap_or(d.n_clad),
        wavelength.unwrap_or(d.wavelength),
    )?)
}

pub fn dispersion(cfg: &RunConfig, sweep: Sweep) -> Result<Outcome, CliError> {
    let c = &cfg.dispersion;
    let base = WaveguideGeometry::new(c.width, c.height, stack(c.n_core, c.n_clad, c.wavelength)?)?;
    let (parameter, values) = match sweep {
        Sweep::Width(v) => (SweepParameter::Width, v),
        Sweep::Height(v) => (SweepParameter::Height, v),
    };
    let curve = dispersion_sweep(&base, parameter, &values, &c.modes)?;
    match format(cfg) {
        Format::Csv => sink(cfg).emit("dispersion.csv", &curve.to_csv(fmt_num))?,
        Format::Json => sink(cfg).emit("dispersion.json", &to_json(&curve))?,
    }
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct GratingDesign {
    grating: modeweaver::coupling::GratingSpec,
    n_eff: BTreeMap<String, f64>,
    delta_n: f64,
    length_um: f64,
    splitting_ratio: f64,
}

fn key_value_csv(rows: &[(&str, f64)]) -> String {
    let mut out = String::from("field,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{}\n", fmt_num(*v)));
    }
    out
}

pub fn design_grating(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = &cfg.design_grating;
    let geometry =
        WaveguideGeometry::new(c.width, c.height, stack(c.n_core, c.n_clad, c.wavelength)?)?;
    let grating = grating_from_geometry(&geometry, c.modes, c.depth, c.periods, c.kappa)?;
    let (na, nb) = (
        effective_index(&geometry, c.modes.0)?,
        effective_index(&geometry, c.modes.1)?,
    );
    let design = GratingDesign {
        grating,
        n_eff: BTreeMap::from([(c.modes.0.to_string(), na), (c.modes.1.to_string(), nb)]),
        delta_n: (na - nb).abs(),
        length_um: grating.length(),
        splitting_ratio: grating.splitting_ratio(),
    };
    match format(cfg) {
        Format::Json => sink(cfg).emit("design-grating.json", &to_json(&design))?,
        Format::Csv => {
            let rows = [
                ("period_um", grating.period),
                ("depth_nm", grating.depth),
                ("num_periods", grating.num_periods as f64),
                ("kappa_per_period", grating.kappa_per_period),
                ("delta_n", design.delta_n),
                ("length_um", design.length_um),
                ("splitting_ratio", design.splitting_ratio),
            ];
            sink(cfg).emit("design-grating.csv", &key_value_csv(&rows))?
        }
    }
    Ok(Outcome::Success)
}

pub fn splitting(cfg: &RunConfig, periods: &[u32]) -> Result<Outcome, CliError> {
    let c = &cfg.splitting;
    let rows = run_splitting_vs_n(c.kappa, periods, c.overlap)?;
    match format(cfg) {
        Format::Json => sink(cfg).emit("splitting.json", &to_json(&rows))?,
        Format::Csv => sink(cfg).emit("splitting.csv", &splitting_csv(&rows))?,
    }
    Ok(Outcome::Success)
}

fn splitting_csv(rows: &[modeweaver::experiments::SplittingRow]) -> String {
    let mut out = String::from("num_periods,eta,visibility_ideal,visibility_measured\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.num_periods,
            fmt_num(r.eta),
            fmt_num(r.visibility_ideal),
            fmt_num(r.visibility_measured)
        ));
    }
    out
}

#[derive(Serialize)]
struct FitReport<'a, C: Serialize> {
    name: &'a str,
    variable: &'a str,
    units: &'a str,
    observable: &'a str,
    fit: &'a modeweaver::experiments::FitOutcome,
    residual_norm: f64,
    metrics: &'a BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    targets: Vec<&'a PaperTarget>,
    pass: bool,
    config: &'a C,
}

#[derive(Serialize)]
struct ScanDump<'a, C: Serialize> {
    #[serde(flatten)]
    report: FitReport<'a, C>,
    points: &'a [modeweaver::experiments::ScanPoint],
}

/// One scan to be written as `<file>.csv` and `<file>.fit.json`.
struct Emission<'a, C: Serialize> {
    file: String,
    scan: &'a ScanResult,
    targets: Vec<&'a PaperTarget>,
    config: &'a C,
}

impl<'a, C: Serialize> Emission<'a, C> {
    fn new(scan: &'a ScanResult, config: &'a C) -> Self {
        Self {
            file: scan.name.clone(),
            scan,
            targets: Vec::new(),
            config,
        }
    }

    fn named(mut self, file: &str) -> Self {
        self.file = file.to_string();
        self
    }

    fn scored(mut self, all: &'a [PaperTarget], names: &[&str]) -> Self {
        self.targets = all
            .iter()
            .filter(|t| names.contains(&t.name.as_str()))
            .collect();
        self
    }

    fn report(&self) -> FitReport<'_, C> {
        FitReport {
            name: &self.file,
            variable: &self.scan.variable,
            units: &self.scan.units,
            observable: &self.scan.observable,
            fit: &self.scan.fit,
            residual_norm: self.scan.fit.residual_norm(),
            metrics: &self.scan.metrics,
            targets: self.targets.clone(),
            pass: self.targets.iter().all(|t| t.pass),
            config: self.config,
        }
    }
}

fn emit_scans<C: Serialize>(cfg: &RunConfig, scans: &[Emission<'_, C>]) -> Result<(), CliError> {
    let sink = sink(cfg);
    if !sink.to_stdout() {
        for e in scans {
            sink.emit(&format!("{}.csv", e.file), &e.scan.to_csv(fmt_num))?;
            sink.emit(&format!("{}.fit.json", e.file), &to_json(&e.report()))?;
        }
        return Ok(());
    }
    match format(cfg) {
        Format::Json => {
            let dumps: Vec<_> = scans
                .iter()
                .map(|e| ScanDump {
                    report: e.report(),
                    points: &e.scan.points,
                })
                .collect();
            sink.emit("", &to_json(&dumps))
        }
        Format::Csv if scans.len() == 1 => sink.emit("", &scans[0].scan.to_csv(fmt_num)),
        Format::Csv => {
            let mut out = format!("scan,{}\n", ScanResult::CSV_HEADER);
            for e in scans {
                for line in e.scan.to_csv(fmt_num).lines().skip(1) {
                    out.push_str(&format!("{},{line}\n", e.file));
                }
            }
            sink.emit("", &out)
        }
    }
}

pub fn hom_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut config = cfg.hom_scan.clone();
    if let Some(seed) = counting_seed(cfg) {
        config.counting.seed = Some(seed);
    }
    let run = run_hom_dip(&config)?;
    emit_scans(cfg, &[Emission::new(&run.scan, &run.config)])?;
    Ok(Outcome::Success)
}

pub fn hom_peak(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut config = cfg.hom_peak.clone();
    if let Some(seed) = counting_seed(cfg) {
        config.counting.seed = Some(seed);
    }
    let run = run_hom_peak(&config)?;
    emit_scans(
        cfg,
        &[
            Emission::new(&run.fundamental, &run.config),
            Emission::new(&run.higher_order, &run.config),
        ],
    )?;
    Ok(Outcome::Success)
}

pub fn noon_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut config = cfg.noon_scan.clone();
    if let Some(seed) = counting_seed(cfg) {
        config.counting.seed = Some(seed);
    }
    let run = run_noon(&config)?;
    emit_scans(
        cfg,
        &[
            Emission::new(&run.classical, &run.config),
            Emission::new(&run.quantum, &run.config),
        ],
    )?;
    Ok(Outcome::Success)
}

fn matrix_from_spec(spec: &crate::config::MatrixSpec) -> Result<DMatrix<Complex64>, CliError> {
    let n = spec.re.len();
    let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if n == 0 || !square(&spec.re) || !(spec.im.is_empty() || square(&spec.im)) {
        return Err(CliError::Config(
            "unitary must be a non-empty square matrix".into(),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(spec.re[r][c], spec.im.get(r).map_or(0.0, |row| row[c]))
    }))
}

#[derive(Serialize)]
struct DecomposeReport {
    #[serde(flatten)]
    mesh: modeweaver::circuit::ReckDecomposition,
    recomposition_error: f64,
}

pub fn decompose(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = &cfg.decompose;
    let target = match (&c.unitary, &c.circuit) {
        (Some(spec), _) => matrix_from_spec(spec)?,
        (None, Some(circuit)) => circuit.compile_at(c.heater_power)?.unitary.into_matrix(),
        (None, None) => {
            return Err(crate::usage_error(
                "decompose",
                "give --unitary or a `decompose` section in --config",
            ))
        }
    };
    let mesh = reck_decompose(&target)?;
    let recomposition_error = (mesh.recompose() - &target)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    debug_assert!(unitarity_deviation(&mesh.recompose()) < 1e-9);
    match format(cfg) {
        Format::Json => sink(cfg).emit(
            "decompose.json",
            &to_json(&DecomposeReport {
                mesh,
                recomposition_error,
            }),
        )?,
        Format::Csv => {
            let mut out = String::from("element,channel_a,channel_b,eta,phase\n");
            for s in &mesh.stages {
                out.push_str(&format!(
                    "coupler,{},{},{},{}\n",
                    s.channels.0,
                    s.channels.1,
                    fmt_num(s.eta),
                    fmt_num(s.phase)
                ));
            }
            for (ch, phase) in mesh.output_phases.iter().enumerate() {
                out.push_str(&format!("output_phase,{ch},,,{}\n", fmt_num(*phase)));
            }
            sink(cfg).emit("decompose.csv", &out)?
        }
    }
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct Summary<'a> {
    all_pass: bool,
    poisson: bool,
    seed: Option<u64>,
    targets: &'a [PaperTarget],
}

#[derive(Serialize)]
struct GratingReport<'a> {
    grating: &'a modeweaver::coupling::GratingSpec,
    phase_match_width_nm: f64,
}

pub fn reproduce_paper(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = counting_seed(cfg);
    let report = run_reproduction(ReproduceOptions { seed })?;
    let sink = sink(cfg);

    sink.emit("dispersion.csv", &report.dispersion.to_csv(fmt_num))?;
    sink.emit("splitting.csv", &splitting_csv(&report.splitting))?;
    sink.emit(
        "grating.json",
        &to_json(&GratingReport {
            grating: &report.grating,
            phase_match_width_nm: report.phase_match_width_nm,
        }),
    )?;

    let all = &report.targets;
    let dip = &report.hom_dip;
    let dip_te1 = &report.hom_dip_te0_te1;
    emit_scans(
        cfg,
        &[
            Emission::new(&dip.scan, &dip.config)
                .scored(all, &["hom_dip_visibility", "dip_fwhm_um"]),
            Emission::new(&dip_te1.scan, &dip_te1.config).scored(all, &["te0_te1_visibility"]),
        ],
    )?;
    let peak = &report.hom_peak;
    let ideal = &report.hom_peak_ideal_source;
    emit_scans(
        cfg,
        &[
            Emission::new(&peak.fundamental, &peak.config)
                .scored(all, &["hom_peak_ratio", "peak_to_dip_width_ratio"]),
            Emission::new(&peak.higher_order, &peak.config)
                .scored(all, &["hom_peak_ratio_te2_arm"]),
            Emission::new(&ideal.fundamental, &ideal.config)
                .named("hom_peak_ideal_source_te0")
                .scored(all, &["hom_peak_ratio_ideal_source"]),
            Emission::new(&ideal.higher_order, &ideal.config).named("hom_peak_ideal_source_te2"),
        ],
    )?;
    let noon = &report.noon;
    emit_scans(
        cfg,
        &[
            Emission::new(&noon.classical, &noon.config).scored(
                all,
                &["noon_classical_visibility", "noon_classical_period_w"],
            ),
            Emission::new(&noon.quantum, &noon.config).scored(
                all,
                &[
                    "noon_quantum_visibility",
                    "noon_quantum_period_w",
                    "noon_period_ratio",
                ],
            ),
        ],
    )?;

    let summary = Summary {
        all_pass: report.all_pass(),
        poisson: cfg.poisson,
        seed: cfg.seed,
        targets: &report.targets,
    };
    sink.emit("summary.json", &to_json(&summary))?;
    for t in &report.targets {
        println!(
            "{} {:<36} computed {:>12.6} expected {:>10.4} tol {:.4}",
            if t.pass { "PASS" } else { "FAIL" },
            t.name,
            t.computed,
            t.expected,
            t.tolerance
        );
    }

    let failed: Vec<String> = report
        .targets
        .iter()
        .filter(|t| !t.pass)
        .map(|t| t.name.clone())
        .collect();
    Ok(if failed.is_empty() {
        Outcome::Success
    } else {
        Outcome::TargetsFailed(failed)
    })
}
