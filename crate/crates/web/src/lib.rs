//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every function returns a flat `Float64Array`: rows of equal length laid out
//! one after another, with `NaN` marking cut-off modes. Errors come back as
//! JavaScript exceptions carrying the message.

use modeweaver::experiments::{linear_grid, run_hom_dip, run_noon, HomDipConfig, NoonConfig};
use modeweaver::fock::PhotonPairSource;
use modeweaver::wgmodes::{dispersion_sweep, ModeId, SweepParameter, WaveguideGeometry};
use wasm_bindgen::prelude::*;

fn js_err(e: modeweaver::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn source(overlap: f64) -> PhotonPairSource {
    PhotonPairSource {
        intrinsic_overlap: overlap,
        ..PhotonPairSource::default()
    }
}

/// Rows of `[width_nm, n_TE0, n_TE1, n_TE2]` for a width sweep at fixed
/// core height.
#[wasm_bindgen]
pub fn dispersion(
    height_nm: f64,
    width_min_nm: f64,
    width_max_nm: f64,
    step_nm: f64,
) -> Result<Vec<f64>, JsError> {
    let widths = linear_grid(width_min_nm, width_max_nm, step_nm);
    let base = WaveguideGeometry::multimode().with_height(height_nm);
    let modes = [ModeId::te(0), ModeId::te(1), ModeId::te(2)];
    let curve = dispersion_sweep(&base, SweepParameter::Width, &widths, &modes).map_err(js_err)?;
    let mut out = Vec::with_capacity(widths.len() * 4);
    for (p, w) in curve.values.iter().enumerate() {
        out.push(*w);
        out.extend(curve.n_eff.iter().map(|row| row[p].unwrap_or(f64::NAN)));
    }
    Ok(out)
}

/// Rows of `[delay_um, coincidences / baseline]`, followed by one final row
/// `[visibility, fwhm_um]` from the Gaussian fit.
#[wasm_bindgen]
pub fn hom_dip(eta: f64, overlap: f64) -> Result<Vec<f64>, JsError> {
    let run = run_hom_dip(&HomDipConfig {
        eta,
        source: source(overlap),
        ..HomDipConfig::default()
    })
    .map_err(js_err)?;
    let baseline = run.scan.points.first().map_or(1.0, |p| p.record.net);
    let mut out: Vec<f64> = run
        .scan
        .points
        .iter()
        .flat_map(|p| [p.value, p.record.net / baseline])
        .collect();
    out.extend([run.scan.metric("visibility"), run.scan.metric("fwhm_um")]);
    Ok(out)
}

/// Rows of `[power_W, singles / max, coincidences / max]`, followed by one
/// final row `[classical visibility, quantum visibility, period ratio]`.
#[wasm_bindgen]
pub fn noon_fringes(eta1: f64, eta2: f64, overlap: f64) -> Result<Vec<f64>, JsError> {
    let run = run_noon(&NoonConfig {
        eta1,
        eta2,
        source: source(overlap),
        ..NoonConfig::default()
    })
    .map_err(js_err)?;
    let peak = |values: &mut dyn Iterator<Item = f64>| values.fold(f64::MIN_POSITIVE, f64::max);
    let classical_max = peak(&mut run.classical.points.iter().map(|p| p.record.singles[0]));
    let quantum_max = peak(&mut run.quantum.points.iter().map(|p| p.record.net));
    let mut out = Vec::with_capacity(3 * run.classical.points.len() + 3);
    for (c, q) in run.classical.points.iter().zip(&run.quantum.points) {
        out.extend([
            c.value,
            c.record.singles[0] / classical_max,
            q.record.net / quantum_max,
        ]);
    }
    out.extend([
        run.classical.metric("visibility"),
        run.quantum.metric("visibility"),
        run.period_ratio,
    ]);
    Ok(out)
}
