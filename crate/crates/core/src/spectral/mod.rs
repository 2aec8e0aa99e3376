//! Periodic grid on [0, 2π)², FFTs and spectral operators.
//!
//! Real-space samples are row-major with the row index along x2: `f[j2 * n + j1]` sits at
//! `(2π j1/n, 2π j2/n)`. Spectral coefficients store the half plane k1 = 0..=n/2 as
//! `c[a * n + b]` with k1 = a and k2 = b (b < n/2) or b − n. Coefficients are normalized so that
//! `f(x) = Σ_k c_k e^{ik·x}` over the full lattice.

mod ops;

use std::f64::consts::TAU;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size must be even and at least 4, got {0}")]
    InvalidResolution(usize),
    #[error("field has nonzero mean coefficient {0}")]
    NonZeroMean(f64),
    #[error("symbol has no value for wavenumber magnitude {0}")]
    SymbolGridMismatch(f64),
    #[error("field length {got} does not match grid ({want})")]
    LengthMismatch { got: usize, want: usize },
}

/// Real-space samples of a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField(pub Vec<f64>);

/// Half-plane Fourier coefficients of a real scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField(pub Vec<Complex64>);

/// A planar vector field in spectral representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x1: SpectralField,
    pub x2: SpectralField,
}

pub struct SpectralGrid {
    n: usize,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k_sq: Vec<f64>,
    mask: Vec<bool>,
    nyquist: Vec<bool>,
    weight: Vec<f64>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).finish()
    }
}

impl SpectralGrid {
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 4 || n % 2 != 0 {
            return Err(SpectralError::InvalidResolution(n));
        }
        let nh = n / 2 + 1;
        let third = (n / 3) as i64;
        let half = (n / 2) as i64;
        let mut k1 = Vec::with_capacity(nh * n);
        let mut k2 = Vec::with_capacity(nh * n);
        let mut mask = Vec::with_capacity(nh * n);
        let mut nyquist = Vec::with_capacity(nh * n);
        let mut weight = Vec::with_capacity(nh * n);
        for a in 0..nh as i64 {
            for b in 0..n as i64 {
                let kb = if b < half { b } else { b - n as i64 };
                k1.push(a as f64);
                k2.push(kb as f64);
                mask.push(a <= third && kb.abs() <= third);
                nyquist.push(a == half || kb == -half);
                weight.push(if a == 0 || a == half { 1.0 } else { 2.0 });
            }
        }
        let k_sq = k1.iter().zip(&k2).map(|(a, b)| a * a + b * b).collect();
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        Ok(Self {
            n,
            k1,
            k2,
            k_sq,
            mask,
            nyquist,
            weight,
            r2c: rp.plan_fft_forward(n),
            c2r: rp.plan_fft_inverse(n),
            fwd: cp.plan_fft_forward(n),
            inv: cp.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Number of stored spectral coefficients, (n/2 + 1) n.
    pub fn spectral_len(&self) -> usize {
        self.k1.len()
    }

    pub fn physical_len(&self) -> usize {
        self.n * self.n
    }

    pub fn k1(&self) -> &[f64] {
        &self.k1
    }

    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.nyquist[idx]
    }

    /// Multiplicity of a stored coefficient in the full lattice (1 on the k1 = 0 column, else 2).
    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    /// Coordinates of grid point (j1, j2).
    pub fn point(&self, j1: usize, j2: usize) -> (f64, f64) {
        (self.dx() * j1 as f64, self.dx() * j2 as f64)
    }

    /// Index of the stored coefficient for lattice point (k1, k2) with k1 ≥ 0.
    pub fn index(&self, k1: i64, k2: i64) -> Option<usize> {
        let n = self.n as i64;
        if k1 < 0 || k1 > n / 2 || k2 < -n / 2 || k2 >= n / 2 {
            return None;
        }
        let b = if k2 < 0 { k2 + n } else { k2 };
        Some(k1 as usize * self.n + b as usize)
    }

    /// Sorted distinct |k| over the non-Nyquist lattice, including 0.
    pub fn kappas(&self) -> Vec<f64> {
        let mut sq: Vec<u64> =
            (0..self.spectral_len()).filter(|&i| !self.nyquist[i]).map(|i| self.k_sq[i] as u64).collect();
        sq.sort_unstable();
        sq.dedup();
        sq.into_iter().map(|s| (s as f64).sqrt()).collect()
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField(vec![Complex64::new(0.0, 0.0); self.spectral_len()])
    }

    /// Forward transform with 1/n² normalization; Nyquist modes are dropped and the
    /// k1 = 0 column is made exactly Hermitian.
    pub fn forward(&self, f: &PhysicalField) -> SpectralField {
        let n = self.n;
        let nh = n / 2 + 1;
        assert_eq!(f.0.len(), n * n, "physical field length");
        let mut rows = vec![Complex64::new(0.0, 0.0); n * nh];
        let mut input = f.0.clone();
        let mut scratch = self.r2c.make_scratch_vec();
        for (src, dst) in input.chunks_exact_mut(n).zip(rows.chunks_exact_mut(nh)) {
            self.r2c.process_with_scratch(src, dst, &mut scratch).expect("r2c length");
        }
        // transpose rows (x2, k1) into columns (k1, x2)
        let mut out = vec![Complex64::new(0.0, 0.0); nh * n];
        for j2 in 0..n {
            for a in 0..nh {
                out[a * n + j2] = rows[j2 * nh + a];
            }
        }
        let mut cs = vec![Complex64::new(0.0, 0.0); self.fwd.get_inplace_scratch_len()];
        self.fwd.process_with_scratch(&mut out, &mut cs);
        let scale = 1.0 / (n * n) as f64;
        for (i, c) in out.iter_mut().enumerate() {
            *c = if self.nyquist[i] { Complex64::new(0.0, 0.0) } else { *c * scale };
        }
        symmetrize_column(&mut out[..n]);
        SpectralField(out)
    }

    pub fn inverse(&self, s: &SpectralField) -> PhysicalField {
        let n = self.n;
        let nh = n / 2 + 1;
        assert_eq!(s.0.len(), nh * n, "spectral field length");
        let mut cols = s.0.clone();
        let mut cs = vec![Complex64::new(0.0, 0.0); self.inv.get_inplace_scratch_len()];
        self.inv.process_with_scratch(&mut cols, &mut cs);
        let mut rows = vec![Complex64::new(0.0, 0.0); n * nh];
        for a in 0..nh {
            for j2 in 0..n {
                rows[j2 * nh + a] = cols[a * n + j2];
            }
        }
        let mut out = vec![0.0; n * n];
        let mut scratch = self.c2r.make_scratch_vec();
        for (src, dst) in rows.chunks_exact_mut(nh).zip(out.chunks_exact_mut(n)) {
            src[0].im = 0.0;
            src[nh - 1].im = 0.0;
            self.c2r.process_with_scratch(src, dst, &mut scratch).expect("c2r length");
        }
        PhysicalField(out)
    }

    /// Samples a closure on the grid.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> PhysicalField {
        let n = self.n;
        let mut v = Vec::with_capacity(n * n);
        for j2 in 0..n {
            for j1 in 0..n {
                let (x1, x2) = self.point(j1, j2);
                v.push(f(x1, x2));
            }
        }
        PhysicalField(v)
    }

    /// ‖s‖²_{L²} over the torus from the coefficients (Parseval).
    pub fn l2_sq(&self, s: &SpectralField) -> f64 {
        TAU * TAU * s.0.iter().zip(&self.weight).map(|(c, w)| w * c.norm_sqr()).sum::<f64>()
    }

    /// Σ_k w(k) |c_k|² over the full lattice, with a per-mode multiplier.
    pub fn weighted_sum(&self, s: &SpectralField, mult: impl Fn(usize) -> f64) -> f64 {
        s.0.iter().zip(&self.weight).enumerate().map(|(i, (c, w))| w * mult(i) * c.norm_sqr()).sum()
    }

    pub fn check_len(&self, s: &SpectralField) -> Result<(), SpectralError> {
        if s.0.len() == self.spectral_len() {
            Ok(())
        } else {
            Err(SpectralError::LengthMismatch { got: s.0.len(), want: self.spectral_len() })
        }
    }
}

/// Makes c(0, −k2) the conjugate of c(0, k2) and the mean real.
fn symmetrize_column(col: &mut [Complex64]) {
    let n = col.len();
    col[0].im = 0.0;
    for b in 1..n / 2 {
        let avg = 0.5 * (col[b] + col[n - b].conj());
        col[b] = avg;
        col[n - b] = avg.conj();
    }
}

/// Real-space helpers.
impl PhysicalField {
    /// Grid sup norm; NaN if any entry is NaN.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
    }

    pub fn mul(&self, other: &PhysicalField) -> PhysicalField {
        PhysicalField(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}
