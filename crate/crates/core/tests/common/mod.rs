//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use modeweaver::fock::SPEED_OF_LIGHT_UM_PER_S;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal moved into Q.
pub fn random_unitary(m: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..m {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..m {
            q[(row, c)] *= phase;
        }
    }
    q
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sum over all n! permutations.
pub fn naive_permanent(a: &DMatrix<Complex64>) -> Complex64 {
    permutations(a.nrows())
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(r, &c)| a[(r, c)])
                .product::<Complex64>()
        })
        .sum()
}

/// Probability of output occupation {k, l} for photons entering distinct
/// channels i and j, obtained by summing the amplitudes of every ordered
/// pair of paths that lands on that occupation.
pub fn enumerate_two_photon(
    u: &DMatrix<Complex64>,
    (i, j): (usize, usize),
    (k, l): (usize, usize),
    x: f64,
) -> f64 {
    let m = u.nrows();
    let mut amplitude = Complex64::new(0.0, 0.0);
    let mut classical = 0.0;
    for a in 0..m {
        for b in 0..m {
            let same = (a == k && b == l) || (a == l && b == k);
            if !same {
                continue;
            }
            let path = u[(a, i)] * u[(b, j)];
            amplitude += path;
            classical += path.norm_sqr();
        }
    }
    // a†ₖ² |0⟩ = √2 |2ₖ⟩
    let bunching = if k == l { 2.0 } else { 1.0 };
    x * bunching * amplitude.norm_sqr() + (1.0 - x) * classical
}

/// Two-mode interferometer: coupler, phase on the second arm, coupler.
/// Couplers are `[[√(1−η), i√η], [i√η, √(1−η)]]`.
pub fn mach_zehnder(eta1: f64, eta2: f64, phi: f64) -> DMatrix<Complex64> {
    let coupler = |eta: f64| {
        let t = Complex64::new((1.0 - eta).sqrt(), 0.0);
        let r = Complex64::new(0.0, eta.sqrt());
        DMatrix::from_row_slice(2, 2, &[t, r, r, t])
    };
    let phase = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, phi),
        ],
    );
    coupler(eta2) * phase * coupler(eta1)
}

/// `|∫ S(λ) e^{iω(λ)τ} dλ| / ∫ S(λ) dλ` for a Gaussian intensity spectrum in
/// wavelength; delay in µm of free-space path.
pub fn wavelength_integral_overlap(center_nm: f64, fwhm_nm: f64, delay_um: f64) -> f64 {
    let sigma = fwhm_nm / (2.0 * (2.0 * 2f64.ln()).sqrt());
    let steps = 4000;
    let (lo, hi) = (center_nm - 8.0 * sigma, center_nm + 8.0 * sigma);
    let h = (hi - lo) / steps as f64;
    let tau = delay_um / SPEED_OF_LIGHT_UM_PER_S;
    let mut total = Complex64::new(0.0, 0.0);
    let mut norm = 0.0;
    for s in 0..=steps {
        let lambda = lo + s as f64 * h;
        let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
        let weight = w * (-(lambda - center_nm).powi(2) / (2.0 * sigma * sigma)).exp();
        let omega = 2.0 * PI * SPEED_OF_LIGHT_UM_PER_S / (lambda * 1e-3);
        total += weight * Complex64::from_polar(1.0, omega * tau);
        norm += weight;
    }
    total.norm() / norm
}

/// FWHM (µm) of the integral overlap, by bisection on the half-maximum.
pub fn wavelength_integral_fwhm(center_nm: f64, fwhm_nm: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1000.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if wavelength_integral_overlap(center_nm, fwhm_nm, mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}
