use num::ToPrimitive;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Equation, LatticeError, LatticeParams};

/// Samples beyond this magnitude abort an evolution.
pub const OVERFLOW_GUARD: f64 = 1e150;

fn dft(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
    if inverse {
        let n = data.len() as f64;
        data.iter_mut().for_each(|z| *z /= n);
    }
}

fn guard(data: &[Complex64]) -> Result<(), LatticeError> {
    match data.iter().find(|z| !z.norm().is_finite() || z.norm() > OVERFLOW_GUARD) {
        Some(z) => Err(LatticeError::InstabilityDetected(z.norm())),
        None => Ok(()),
    }
}

/// Per-mode growth of the evolution on a periodic ring of `n` points: the
/// rate `λ_k` (continuous time) or the factor per step (time lattice).
pub fn mode_symbol(eq: Equation, p: &LatticeParams, n: usize) -> Vec<Complex64> {
    let f = |r: &crate::qseries::Rational| r.to_f64().unwrap_or(f64::NAN);
    let (s, tau, m) = (f(&p.grid.sigma), f(&p.grid.tau), f(&p.m));
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            match eq {
                // Circulant eigenvalue of Δx²/2m: (ω − 1)²/(2mσ²).
                Equation::SpaceLattice => {
                    let w = Complex64::from_polar(1.0, theta);
                    (w - 1.0) * (w - 1.0) / (2.0 * m * s * s)
                }
                // 1 + (τ/2m)·(−q²) for the Fourier wavenumber q of mode k
                // on a ring of length nσ.
                Equation::TimeLattice => {
                    let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                    let q = 2.0 * std::f64::consts::PI * kk / (n as f64 * s);
                    Complex64::new(1.0 - tau * q * q / (2.0 * m), 0.0)
                }
            }
        })
        .collect()
}

/// Evolves periodic samples: to time `time` by the exact exponential of
/// the circulant (space lattice), or by `steps` explicit steps (time
/// lattice). Returns the samples after each of `steps` equal increments.
pub fn evolve(
    eq: Equation,
    initial: &[Complex64],
    p: &LatticeParams,
    steps: usize,
    time: f64,
) -> Result<Vec<Vec<Complex64>>, LatticeError> {
    let n = initial.len();
    let symbol = mode_symbol(eq, p, n);
    let mut hat = initial.to_vec();
    dft(&mut hat, false);
    let mut out = Vec::with_capacity(steps);
    for step in 1..=steps {
        let mut h: Vec<Complex64> = hat
            .iter()
            .zip(&symbol)
            .map(|(c, l)| match eq {
                Equation::SpaceLattice => c * (l * (time * step as f64 / steps as f64)).exp(),
                Equation::TimeLattice => c * l.powu(step as u32),
            })
            .collect();
        dft(&mut h, true);
        guard(&h)?;
        out.push(h);
    }
    Ok(out)
}

/// `φ(·, t + τ) = φ + (τ/2m) ∂x² φ` on Taylor coefficients in `x`.
pub fn jet_step(coeffs: &[f64], p: &LatticeParams) -> Vec<f64> {
    let f = |r: &crate::qseries::Rational| r.to_f64().unwrap_or(f64::NAN);
    let c = f(&p.grid.tau) / (2.0 * f(&p.m));
    (0..coeffs.len())
        .map(|i| {
            let second = coeffs.get(i + 2).map_or(0.0, |a| a * ((i + 2) * (i + 1)) as f64);
            coeffs[i] + c * second
        })
        .collect()
}

pub fn jet_value(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}
