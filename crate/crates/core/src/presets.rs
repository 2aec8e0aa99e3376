//! Initial conditions. All are trigonometric polynomials or band-limited random fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::SimState;
use crate::spectral::{SpectralError, SpectralGrid, VectorField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("band [{k_min}, {k_max}] is empty or not resolved by the dealiased grid (cutoff {cutoff})")]
    InvalidBand { k_min: f64, k_max: f64, cutoff: usize },
    #[error("invalid preset parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// u = (−sin x2, sin x1), b = β(−sin x2, sin 2x1).
    OrszagTang { beta: f64 },
    /// Independent Gaussian stream-function modes on k_min ≤ |k| ≤ k_max for u and b,
    /// each rescaled to ‖·‖_{L²} = amplitude.
    RandomBand { amplitude: f64, k_min: f64, k_max: f64, seed: u64 },
    /// ω = A sin x1, j = 0.
    SingleMode { amplitude: f64 },
}

pub fn initial_state(grid: &SpectralGrid, preset: &Preset) -> Result<SimState, PresetError> {
    match *preset {
        Preset::OrszagTang { beta } => {
            check_finite("beta", beta)?;
            let u = VectorField {
                x1: grid.forward(&grid.sample(|_, x2| -x2.sin())),
                x2: grid.forward(&grid.sample(|x1, _| x1.sin())),
            };
            let b = VectorField {
                x1: grid.forward(&grid.sample(|_, x2| -beta * x2.sin())),
                x2: grid.forward(&grid.sample(|x1, _| beta * (2.0 * x1).sin())),
            };
            Ok(SimState::from_fields(grid, &u, &b)?)
        }
        Preset::SingleMode { amplitude } => {
            check_finite("amplitude", amplitude)?;
            let w = grid.forward(&grid.sample(|x1, _| amplitude * x1.sin()));
            Ok(SimState::new(grid, w, grid.zeros())?)
        }
        Preset::RandomBand { amplitude, k_min, k_max, seed } => {
            check_finite("amplitude", amplitude)?;
            let cutoff = grid.n() / 3;
            if !(k_min > 0.0 && k_min <= k_max && k_max <= cutoff as f64) {
                return Err(PresetError::InvalidBand { k_min, k_max, cutoff });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_solenoidal(grid, &mut rng, k_min, k_max, amplitude);
            let b = random_solenoidal(grid, &mut rng, k_min, k_max, amplitude);
            Ok(SimState::from_fields(grid, &u, &b)?)
        }
    }
}

fn check_finite(name: &str, v: f64) -> Result<(), PresetError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(PresetError::InvalidParameter(format!("{name} must be finite")))
    }
}

/// ∇⊥ψ for a random band-limited ψ, scaled to the requested L² norm.
fn random_solenoidal(grid: &SpectralGrid, rng: &mut ChaCha8Rng, k_min: f64, k_max: f64, norm: f64) -> VectorField {
    let n = grid.n();
    let mut psi = grid.zeros();
    for i in 0..grid.spectral_len() {
        let (k1, k2) = (grid.k1()[i], grid.k2()[i]);
        let kk = grid.k_sq()[i].sqrt();
        if grid.is_nyquist(i) || kk < k_min || kk > k_max || (k1 == 0.0 && k2 < 0.0) {
            continue;
        }
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        psi.0[i] = Complex64::new(re, im);
    }
    for b in 1..n / 2 {
        psi.0[n - b] = psi.0[b].conj();
    }
    // u = (∂2ψ, −∂1ψ)
    let u = VectorField { x1: grid.d2(&psi), x2: grid.d1(&psi).scale(-1.0) };
    let e = grid.l2_sq(&u.x1) + grid.l2_sq(&u.x2);
    if e == 0.0 {
        return u;
    }
    let s = norm / e.sqrt();
    VectorField { x1: u.x1.scale(s), x2: u.x2.scale(s) }
}

/// ‖v‖_{L²} of a vector field over the torus.
pub fn l2_norm(grid: &SpectralGrid, v: &VectorField) -> f64 {
    (grid.l2_sq(&v.x1) + grid.l2_sq(&v.x2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn orszag_tang_curls() {
        let g = SpectralGrid::new(32).unwrap();
        let s = initial_state(&g, &Preset::OrszagTang { beta: 0.5 }).unwrap();
        let w = g.inverse(&s.omega_hat);
        let j = g.inverse(&s.j_hat);
        assert!(max_diff(&w.0, &g.sample(|x1, x2| x1.cos() + x2.cos()).0) < 1e-14);
        assert!(max_diff(&j.0, &g.sample(|x1, x2| (2.0 * x1).cos() + 0.5 * x2.cos()).0) < 1e-14);
    }

    #[test]
    fn random_band_is_normalized_band_limited_and_seeded() {
        let g = SpectralGrid::new(32).unwrap();
        let p = Preset::RandomBand { amplitude: 1.0, k_min: 2.0, k_max: 8.0, seed: 42 };
        let s = initial_state(&g, &p).unwrap();
        let u = g.biot_savart(&s.omega_hat).unwrap();
        let b = g.biot_savart(&s.j_hat).unwrap();
        assert!((l2_norm(&g, &u) - 1.0).abs() < 1e-13);
        assert!((l2_norm(&g, &b) - 1.0).abs() < 1e-13);
        for i in 0..g.spectral_len() {
            let k = g.k_sq()[i].sqrt();
            if !(2.0..=8.0).contains(&k) {
                assert_eq!(s.omega_hat.0[i].norm(), 0.0);
            }
        }
        let again = initial_state(&g, &p).unwrap();
        assert_eq!(s, again);
        let other =
            initial_state(&g, &Preset::RandomBand { amplitude: 1.0, k_min: 2.0, k_max: 8.0, seed: 43 }).unwrap();
        assert_ne!(s.omega_hat, other.omega_hat);
        // round trip through real space keeps the field real
        let back = g.forward(&g.inverse(&s.omega_hat));
        assert!(back.sub(&s.omega_hat).max_norm() < 1e-15);
    }

    #[test]
    fn band_beyond_cutoff_is_rejected() {
        let g = SpectralGrid::new(16).unwrap();
        let p = Preset::RandomBand { amplitude: 1.0, k_min: 2.0, k_max: 8.0, seed: 1 };
        assert!(matches!(initial_state(&g, &p), Err(PresetError::InvalidBand { .. })));
    }

    #[test]
    fn single_mode() {
        let g = SpectralGrid::new(16).unwrap();
        let s = initial_state(&g, &Preset::SingleMode { amplitude: 2.0 }).unwrap();
        assert!(max_diff(&g.inverse(&s.omega_hat).0, &g.sample(|x1, _| 2.0 * x1.sin()).0) < 1e-14);
        assert_eq!(s.j_hat, g.zeros());
    }
}
