//! Least-squares curve fits: Gaussian dips/peaks and periodic fringes.
//!
//! All fits share one damped Gauss–Newton (Levenberg–Marquardt) refinement;
//! they differ in the model and in how the starting point is found.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;
/// Grid minima refined when separating fringe harmonics.
const HARMONIC_CANDIDATES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub value: f64,
    pub stderr: f64,
}

struct Refined {
    params: Vec<f64>,
    covariance: Option<DMatrix<f64>>,
    rss: f64,
}

/// Levenberg–Marquardt on `model(params, x) -> (value, gradient)`.
fn refine<F>(model: F, xs: &[f64], ys: &[f64], start: Vec<f64>) -> Result<Refined>
where
    F: Fn(&[f64], f64) -> (f64, Vec<f64>),
{
    let n = xs.len();
    let p = start.len();
    let rss_of = |params: &[f64]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (y - model(params, x).0).powi(2))
            .sum()
    };
    let scale: f64 = ys.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);

    let mut params = start;
    let mut rss = rss_of(&params);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..MAX_ITERATIONS {
        if rss <= 1e-30 * scale {
            converged = true;
            break;
        }
        let mut jtj = DMatrix::<f64>::zeros(p, p);
        let mut jtr = DVector::<f64>::zeros(p);
        for (&x, &y) in xs.iter().zip(ys) {
            let (value, grad) = model(&params, x);
            let r = y - value;
            for a in 0..p {
                jtr[a] += grad[a] * r;
                for b in 0..p {
                    jtj[(a, b)] += grad[a] * grad[b];
                }
            }
        }

        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj.clone();
            for a in 0..p {
                damped[(a, a)] += lambda * jtj[(a, a)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let trial_rss = rss_of(&trial);
            if trial_rss.is_finite() && trial_rss <= rss {
                let small_step = step
                    .iter()
                    .zip(&params)
                    .all(|(d, a)| d.abs() <= 1e-13 * (a.abs() + 1e-13));
                let small_gain = rss - trial_rss <= 1e-15 * rss;
                params = trial;
                rss = trial_rss;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No downhill step at any damping: stationary point.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::FitDiverged {
            iterations: MAX_ITERATIONS,
        });
    }

    let mut jtj = DMatrix::<f64>::zeros(p, p);
    for &x in xs {
        let (_, grad) = model(&params, x);
        for a in 0..p {
            for b in 0..p {
                jtj[(a, b)] += grad[a] * grad[b];
            }
        }
    }
    let dof = n.saturating_sub(p).max(1) as f64;
    let covariance = jtj.try_inverse().map(|inv| inv * (rss / dof));
    Ok(Refined {
        params,
        covariance,
        rss,
    })
}

fn stderr(cov: &Option<DMatrix<f64>>, i: usize) -> f64 {
    cov.as_ref()
        .map(|c| c[(i, i)].max(0.0).sqrt())
        .unwrap_or(f64::NAN)
}

fn sorted_points(points: &[(f64, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    if points
        .iter()
        .any(|(x, y)| !(x.is_finite() && y.is_finite()))
    {
        return Err(Error::InvalidInput("fit data must be finite".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(sorted.into_iter().unzip())
}

/// `offset + amplitude·exp(−(x − center)²/2σ²)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub amplitude: FitParam,
    pub center: FitParam,
    pub sigma: FitParam,
    pub offset: FitParam,
    pub residual_norm: f64,
}

impl GaussianFit {
    /// `|amplitude| / offset`
    pub fn visibility(&self) -> f64 {
        if self.offset.value == 0.0 {
            return 0.0;
        }
        self.amplitude.value.abs() / self.offset.value
    }

    /// `(offset + amplitude) / offset`: above 1 for a peak.
    pub fn peak_ratio(&self) -> f64 {
        (self.offset.value + self.amplitude.value) / self.offset.value
    }

    pub fn fwhm(&self) -> f64 {
        FWHM_PER_SIGMA * self.sigma.value.abs()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.sigma.value;
        if s == 0.0 {
            return self.offset.value;
        }
        self.offset.value
            + self.amplitude.value * (-(x - self.center.value).powi(2) / (2.0 * s * s)).exp()
    }
}

fn gaussian_model(p: &[f64], x: f64) -> (f64, Vec<f64>) {
    let (a, c, s, o) = (p[0], p[1], p[2], p[3]);
    let d = x - c;
    let e = (-d * d / (2.0 * s * s)).exp();
    let value = o + a * e;
    (
        value,
        vec![e, a * e * d / (s * s), a * e * d * d / (s * s * s), 1.0],
    )
}

/// Gaussian dip or peak on a constant background.
pub fn fit_gaussian(points: &[(f64, f64)]) -> Result<GaussianFit> {
    if points.len() < 5 {
        return Err(Error::InsufficientSpan(format!(
            "a Gaussian fit needs at least 5 points, got {}",
            points.len()
        )));
    }
    let (xs, ys) = sorted_points(points)?;
    let n = xs.len();

    // Baseline from the outer fifth on each side.
    let tail = (n / 5).max(1);
    let offset =
        (ys[..tail].iter().sum::<f64>() + ys[n - tail..].iter().sum::<f64>()) / (2 * tail) as f64;
    let (peak_idx, peak_dev) = ys
        .iter()
        .map(|y| y - offset)
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    let span = xs[n - 1] - xs[0];

    if peak_dev.abs() <= 1e-12 * offset.abs().max(f64::MIN_POSITIVE) {
        let center = xs.iter().sum::<f64>() / n as f64;
        let zero = FitParam {
            value: 0.0,
            stderr: 0.0,
        };
        return Ok(GaussianFit {
            amplitude: zero,
            center: FitParam {
                value: center,
                stderr: 0.0,
            },
            sigma: zero,
            offset: FitParam {
                value: offset,
                stderr: 0.0,
            },
            residual_norm: ys.iter().map(|y| (y - offset).powi(2)).sum::<f64>().sqrt(),
        });
    }

    // Width from the contiguous region beyond half of the extremum.
    let beyond_half = |i: usize| (ys[i] - offset) / peak_dev >= 0.5;
    let mut lo = peak_idx;
    while lo > 0 && beyond_half(lo - 1) {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < n && beyond_half(hi + 1) {
        hi += 1;
    }
    let step = span / (n - 1).max(1) as f64;
    let width = (xs[hi] - xs[lo]).max(step);
    let start = vec![
        peak_dev,
        0.5 * (xs[lo] + xs[hi]),
        width / FWHM_PER_SIGMA,
        offset,
    ];

    let fit = refine(gaussian_model, &xs, &ys, start)?;
    let p = &fit.params;
    let param = |i: usize| FitParam {
        value: p[i],
        stderr: stderr(&fit.covariance, i),
    };
    let mut sigma = param(2);
    sigma.value = sigma.value.abs();
    Ok(GaussianFit {
        amplitude: param(0),
        center: param(1),
        sigma,
        offset: param(3),
        residual_norm: fit.rss.sqrt(),
    })
}

/// `offset + amplitude·cos(2π·x/period + phase)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub amplitude: FitParam,
    pub offset: FitParam,
    pub period: FitParam,
    pub phase: FitParam,
    pub residual_norm: f64,
}

impl SinusoidFit {
    pub fn visibility(&self) -> f64 {
        self.amplitude.value / self.offset.value
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.offset.value
            + self.amplitude.value * (2.0 * PI * x / self.period.value + self.phase.value).cos()
    }
}

/// Least-squares coefficients of `columns` for `ys`, plus the residual sum.
fn linear_fit(columns: &[Vec<f64>], ys: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = ys.len();
    let p = columns.len();
    let design = DMatrix::from_fn(n, p, |r, c| columns[c][r]);
    let rhs = DVector::from_column_slice(ys);
    let coef = (design.transpose() * &design)
        .lu()
        .solve(&(design.transpose() * &rhs))?;
    let resid = rhs - design * &coef;
    Some((coef.iter().copied().collect(), resid.norm_squared()))
}

/// Harmonic columns `1, cos(hωx), sin(hωx)` for `h = 1..=harmonics`.
fn harmonic_columns(xs: &[f64], omega: f64, harmonics: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![vec![1.0; xs.len()]];
    for h in 1..=harmonics {
        let w = omega * h as f64;
        cols.push(xs.iter().map(|x| (w * x).cos()).collect());
        cols.push(xs.iter().map(|x| (w * x).sin()).collect());
    }
    cols
}

/// `c + Σ_h a_h cos(hωx) + b_h sin(hωx)`; parameters `[c, a1, b1, …, ω]`.
fn harmonic_model(harmonics: usize) -> impl Fn(&[f64], f64) -> (f64, Vec<f64>) {
    move |p: &[f64], x: f64| {
        let omega = p[2 * harmonics + 1];
        let mut value = p[0];
        let mut grad = vec![0.0; 2 * harmonics + 2];
        grad[0] = 1.0;
        let mut d_omega = 0.0;
        for h in 1..=harmonics {
            let hf = h as f64;
            let (s, c) = (hf * omega * x).sin_cos();
            let (a, b) = (p[2 * h - 1], p[2 * h]);
            value += a * c + b * s;
            grad[2 * h - 1] = c;
            grad[2 * h] = s;
            d_omega += hf * x * (-a * s + b * c);
        }
        grad[2 * harmonics + 1] = d_omega;
        (value, grad)
    }
}

struct FringeSearch {
    xs: Vec<f64>,
    ys: Vec<f64>,
    span: f64,
}

impl FringeSearch {
    fn new(points: &[(f64, f64)], what: &str) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InsufficientSpan(format!(
                "a {what} fit needs at least 8 points, got {}",
                points.len()
            )));
        }
        let (xs, ys) = sorted_points(points)?;
        let span = xs[xs.len() - 1] - xs[0];
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let spread = ys.iter().map(|y| (y - mean).abs()).fold(0.0, f64::max);
        if !(span > 0.0) || spread <= 1e-12 * mean.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InsufficientSpan("data show no oscillation".into()));
        }
        Ok(Self { xs, ys, span })
    }

    /// Angular frequencies from 1.5 cycles per span up to the Nyquist rate.
    fn grid(&self) -> Vec<f64> {
        let n = self.xs.len();
        let lo = 1.5 / self.span;
        let hi = 0.5 * (n - 1) as f64 / self.span;
        let step = 0.02 / self.span;
        let count = ((hi - lo) / step).floor() as usize + 1;
        (0..count)
            .map(|k| 2.0 * PI * (lo + k as f64 * step))
            .collect()
    }

    fn check_period(&self, omega: f64) -> Result<()> {
        let period = 2.0 * PI / omega.abs();
        if !(period * 1.5 <= self.span * (1.0 + 1e-9)) {
            return Err(Error::InsufficientSpan(format!(
                "fitted period {period} is not covered 1.5 times by a span of {}",
                self.span
            )));
        }
        Ok(())
    }
}

/// Single sinusoid; period seeded by a frequency-grid search.
pub fn fit_sinusoid(points: &[(f64, f64)]) -> Result<SinusoidFit> {
    let search = FringeSearch::new(points, "sinusoid")?;
    let (xs, ys) = (&search.xs, &search.ys);

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for omega in search.grid() {
        if let Some((coef, rss)) = linear_fit(&harmonic_columns(xs, omega, 1), ys) {
            if best.as_ref().is_none_or(|b| rss < b.2) {
                best = Some((omega, coef, rss));
            }
        }
    }
    let (omega, coef, _) =
        best.ok_or_else(|| Error::InsufficientSpan("no frequency fits".into()))?;
    let start = vec![coef[0], coef[1], coef[2], omega];
    let fit = refine(harmonic_model(1), xs, ys, start)?;
    let p = &fit.params;
    let (c, a, b, w) = (p[0], p[1], p[2], p[3].abs());
    search.check_period(w)?;

    let amp = a.hypot(b);
    let cov = fit.covariance.as_ref();
    let var = |g: &[f64; 4]| -> f64 {
        cov.map(|m| {
            let mut v = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    v += g[i] * m[(i, j)] * g[j];
                }
            }
            v.max(0.0).sqrt()
        })
        .unwrap_or(f64::NAN)
    };
    let amp_err = if amp > 0.0 {
        var(&[0.0, a / amp, b / amp, 0.0])
    } else {
        f64::NAN
    };
    let phase_err = if amp > 0.0 {
        var(&[0.0, b / (amp * amp), -a / (amp * amp), 0.0])
    } else {
        f64::NAN
    };

    // a·cos + b·sin = A·cos(ωx + θ) with θ = atan2(−b, a); the sign of ω is
    // folded into the phase.
    let phase = if p[3] >= 0.0 {
        (-b).atan2(a)
    } else {
        b.atan2(a)
    };
    Ok(SinusoidFit {
        amplitude: FitParam {
            value: amp,
            stderr: amp_err,
        },
        offset: FitParam {
            value: c,
            stderr: stderr(&fit.covariance, 0),
        },
        period: FitParam {
            value: 2.0 * PI / w,
            stderr: 2.0 * PI * stderr(&fit.covariance, 3) / (w * w),
        },
        phase: FitParam {
            value: phase,
            stderr: phase_err,
        },
        residual_norm: fit.rss.sqrt(),
    })
}

/// Fringe with a fundamental and a second harmonic sharing one base period.
///
/// The second harmonic carries two-photon (NOON) interference; the first
/// carries the single-photon leakage of an unbalanced interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFringeFit {
    pub offset: FitParam,
    pub fundamental_amplitude: FitParam,
    pub second_amplitude: FitParam,
    /// Period of the fundamental.
    pub base_period: FitParam,
    pub residual_norm: f64,
}

impl HarmonicFringeFit {
    /// Period of the second-harmonic (two-photon) fringe.
    pub fn second_period(&self) -> f64 {
        self.base_period.value / 2.0
    }

    /// Second-harmonic amplitude over offset.
    pub fn second_visibility(&self) -> f64 {
        self.second_amplitude.value / self.offset.value
    }
}

/// Fits a two-harmonic fringe. The base frequency is the lowest grid
/// frequency whose residual is within 5% of the best, so a pure second
/// harmonic is not mistaken for a fundamental at twice the frequency.
pub fn fit_harmonic_fringe(points: &[(f64, f64)]) -> Result<HarmonicFringeFit> {
    let search = FringeSearch::new(points, "harmonic fringe")?;
    let (xs, ys) = (&search.xs, &search.ys);

    let scored: Vec<(f64, Vec<f64>, f64)> = search
        .grid()
        .into_iter()
        .filter(|w| 2.0 * w / (2.0 * PI) <= 0.5 * (xs.len() - 1) as f64 / search.span)
        .filter_map(|w| linear_fit(&harmonic_columns(xs, w, 2), ys).map(|(c, rss)| (w, c, rss)))
        .collect();
    if scored.is_empty() {
        return Err(Error::InsufficientSpan("no frequency fits".into()));
    }

    // A fringe whose fundamental vanishes also fits as a fundamental at twice
    // the frequency, so refine the deepest grid minima and keep the lowest
    // frequency that fits as well as the best one.
    let mut minima: Vec<usize> = (0..scored.len())
        .filter(|&i| {
            let r = scored[i].2;
            (i == 0 || r <= scored[i - 1].2) && (i + 1 == scored.len() || r <= scored[i + 1].2)
        })
        .collect();
    minima.sort_by(|&a, &b| scored[a].2.total_cmp(&scored[b].2));
    minima.truncate(HARMONIC_CANDIDATES);
    let mut refined: Vec<(f64, Refined)> = minima
        .into_iter()
        .filter_map(|i| {
            let (w, coef, _) = &scored[i];
            let mut start = coef.clone();
            start.push(*w);
            let fit = refine(harmonic_model(2), xs, ys, start).ok()?;
            Some((fit.params[5].abs(), fit))
        })
        .collect();
    let best_rss = refined
        .iter()
        .map(|r| r.1.rss)
        .fold(f64::INFINITY, f64::min);
    if !best_rss.is_finite() {
        return Err(Error::FitDiverged {
            iterations: MAX_ITERATIONS,
        });
    }
    let floor = 1e-20 * ys.iter().map(|y| y * y).sum::<f64>();
    refined.retain(|r| r.1.rss <= best_rss * 1.05 + floor);
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fit = refined.swap_remove(0).1;
    let p = &fit.params;
    let w = p[5].abs();
    search.check_period(w)?;

    let cov = fit.covariance.as_ref();
    let amp_with_err = |ia: usize, ib: usize| -> FitParam {
        let (a, b) = (p[ia], p[ib]);
        let amp = a.hypot(b);
        let err = match (cov, amp > 0.0) {
            (Some(m), true) => {
                let (ga, gb) = (a / amp, b / amp);
                (ga * ga * m[(ia, ia)] + 2.0 * ga * gb * m[(ia, ib)] + gb * gb * m[(ib, ib)])
                    .max(0.0)
                    .sqrt()
            }
            _ => f64::NAN,
        };
        FitParam {
            value: amp,
            stderr: err,
        }
    };
    Ok(HarmonicFringeFit {
        offset: FitParam {
            value: p[0],
            stderr: stderr(&fit.covariance, 0),
        },
        fundamental_amplitude: amp_with_err(1, 2),
        second_amplitude: amp_with_err(3, 4),
        base_period: FitParam {
            value: 2.0 * PI / w,
            stderr: 2.0 * PI * stderr(&fit.covariance, 5) / (w * w),
        },
        residual_norm: fit.rss.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gaussian_points(a: f64, c: f64, s: f64, o: f64) -> Vec<(f64, f64)> {
        (-50..=50)
            .map(|k| {
                let x = k as f64 * 10.0;
                (x, o + a * (-(x - c).powi(2) / (2.0 * s * s)).exp())
            })
            .collect()
    }

    #[test]
    fn exact_gaussian_is_recovered() {
        let fit = fit_gaussian(&gaussian_points(-90.0, 12.0, 71.3, 100.0)).unwrap();
        assert_abs_diff_eq!(fit.amplitude.value, -90.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.center.value, 12.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.sigma.value, 71.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.offset.value, 100.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.visibility(), 0.9, epsilon = 1e-10);
    }

    #[test]
    fn exact_peak_is_recovered() {
        let fit = fit_gaussian(&gaussian_points(100.0, -30.0, 80.0, 100.0)).unwrap();
        assert_abs_diff_eq!(fit.peak_ratio(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn flat_data_has_no_dip() {
        let pts: Vec<_> = (0..20).map(|k| (k as f64, 5.0)).collect();
        let fit = fit_gaussian(&pts).unwrap();
        assert_eq!(fit.amplitude.value, 0.0);
        assert_eq!(fit.visibility(), 0.0);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_gaussian(&[(0.0, 1.0); 4]),
            Err(Error::InsufficientSpan(_))
        ));
        assert!(matches!(
            fit_sinusoid(&[(0.0, 1.0); 7]),
            Err(Error::InsufficientSpan(_))
        ));
    }

    #[test]
    fn exact_sinusoid_is_recovered() {
        let pts: Vec<_> = (0..61)
            .map(|k| {
                let x = k as f64 * 0.05;
                (x, 10.0 + 8.2 * (2.0 * PI * x / 1.3 + 0.4).cos())
            })
            .collect();
        let fit = fit_sinusoid(&pts).unwrap();
        assert_abs_diff_eq!(fit.period.value, 1.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.amplitude.value, 8.2, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.offset.value, 10.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.phase.value, 0.4, epsilon = 1e-8);
        assert_abs_diff_eq!(
            fit.eval(0.77),
            10.0 + 8.2 * (2.0 * PI * 0.77 / 1.3 + 0.4).cos(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn constant_fringe_is_rejected() {
        let pts: Vec<_> = (0..20).map(|k| (k as f64, 3.0)).collect();
        assert!(matches!(
            fit_sinusoid(&pts),
            Err(Error::InsufficientSpan(_))
        ));
    }

    #[test]
    fn short_span_is_rejected() {
        // One period over the scan.
        let pts: Vec<_> = (0..20)
            .map(|k| {
                let x = k as f64 / 19.0;
                (x, 1.0 + 0.5 * (2.0 * PI * x).cos())
            })
            .collect();
        assert!(matches!(
            fit_sinusoid(&pts),
            Err(Error::InsufficientSpan(_))
        ));
    }

    #[test]
    fn pure_second_harmonic_keeps_its_base() {
        let pts: Vec<_> = (0..61)
            .map(|k| {
                let x = k as f64 * 0.05;
                (x, 1.0 + (4.0 * PI * x / 1.3).cos())
            })
            .collect();
        let fit = fit_harmonic_fringe(&pts).unwrap();
        assert_abs_diff_eq!(fit.base_period.value, 1.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.second_period(), 0.65, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.second_amplitude.value, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.fundamental_amplitude.value, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn mixed_harmonics_are_separated() {
        let pts: Vec<_> = (0..61)
            .map(|k| {
                let x = k as f64 * 0.05;
                let t = 2.0 * PI * x / 1.3;
                (x, 0.44 - 0.18 * t.cos() + 0.39 * (2.0 * t).cos())
            })
            .collect();
        let fit = fit_harmonic_fringe(&pts).unwrap();
        assert_abs_diff_eq!(fit.base_period.value, 1.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.second_period(), 0.65, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.fundamental_amplitude.value, 0.18, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.second_visibility(), 0.39 / 0.44, epsilon = 1e-8);
    }
}
