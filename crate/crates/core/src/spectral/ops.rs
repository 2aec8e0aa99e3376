use rustfft::num_complex::Complex64;

use super::{PhysicalField, SpectralError, SpectralField, SpectralGrid, VectorField};
use crate::kernel::DissipationSymbol;

const I: Complex64 = Complex64::new(0.0, 1.0);

impl SpectralGrid {
    fn map(&self, s: &SpectralField, f: impl Fn(usize, Complex64) -> Complex64) -> SpectralField {
        SpectralField(s.0.iter().enumerate().map(|(i, &c)| f(i, c)).collect())
    }

    /// ∂1 v2 − ∂2 v1.
    pub fn curl_2d(&self, v: &VectorField) -> SpectralField {
        SpectralField((0..self.spectral_len()).map(|i| I * (self.k1[i] * v.x2.0[i] - self.k2[i] * v.x1.0[i])).collect())
    }

    pub fn divergence(&self, v: &VectorField) -> SpectralField {
        SpectralField((0..self.spectral_len()).map(|i| I * (self.k1[i] * v.x1.0[i] + self.k2[i] * v.x2.0[i])).collect())
    }

    /// Divergence-free field with the given curl: û = (i k2, −i k1) ω̂ / |k|².
    pub fn biot_savart(&self, omega: &SpectralField) -> Result<VectorField, SpectralError> {
        let mean = omega.0[0].norm();
        let scale = omega.0.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if mean > 1e-14 * scale.max(1.0) {
            return Err(SpectralError::NonZeroMean(mean));
        }
        Ok(self.biot_savart_unchecked(omega))
    }

    pub(crate) fn biot_savart_unchecked(&self, omega: &SpectralField) -> VectorField {
        let inv = |i: usize| if self.k_sq[i] == 0.0 { 0.0 } else { 1.0 / self.k_sq[i] };
        VectorField {
            x1: self.map(omega, |i, c| I * self.k2[i] * inv(i) * c),
            x2: self.map(omega, |i, c| -I * self.k1[i] * inv(i) * c),
        }
    }

    pub fn gradient(&self, s: &SpectralField) -> VectorField {
        VectorField { x1: self.d1(s), x2: self.d2(s) }
    }

    pub fn d1(&self, s: &SpectralField) -> SpectralField {
        self.map(s, |i, c| I * self.k1[i] * c)
    }

    pub fn d2(&self, s: &SpectralField) -> SpectralField {
        self.map(s, |i, c| I * self.k2[i] * c)
    }

    pub fn laplacian(&self, s: &SpectralField) -> SpectralField {
        self.map(s, |i, c| -self.k_sq[i] * c)
    }

    /// σ(|k|) per stored coefficient; Nyquist slots get 0 since they are never populated.
    pub fn mode_symbol(&self, sym: &DissipationSymbol) -> Result<Vec<f64>, SpectralError> {
        (0..self.spectral_len())
            .map(|i| {
                if self.nyquist[i] {
                    return Ok(0.0);
                }
                let kappa = self.k_sq[i].sqrt();
                sym.get(kappa).ok_or(SpectralError::SymbolGridMismatch(kappa))
            })
            .collect()
    }

    /// 𝓛s, i.e. σ(|k|) ŝ(k).
    pub fn apply_symbol(&self, s: &SpectralField, sym: &DissipationSymbol) -> Result<SpectralField, SpectralError> {
        let sig = self.mode_symbol(sym)?;
        Ok(self.map(s, |i, c| sig[i] * c))
    }

    pub fn dealias(&self, s: &SpectralField) -> SpectralField {
        self.map(s, |i, c| if self.mask[i] { c } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dealias_in_place(&self, s: &mut SpectralField) {
        for (c, &m) in s.0.iter_mut().zip(&self.mask) {
            if !m {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Product in real space, transformed back and dealiased.
    pub fn pointwise_product(&self, a: &SpectralField, b: &SpectralField) -> SpectralField {
        let p = self.inverse(a).mul(&self.inverse(b));
        let mut s = self.forward(&p);
        self.dealias_in_place(&mut s);
        s
    }

    pub fn inverse_vector(&self, v: &VectorField) -> [PhysicalField; 2] {
        [self.inverse(&v.x1), self.inverse(&v.x2)]
    }
}

impl SpectralField {
    pub fn add(&self, other: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: f64) -> SpectralField {
        SpectralField(self.0.iter().map(|a| a * k).collect())
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{compute_symbol, KernelProfile};

    fn max_diff(a: &PhysicalField, b: &PhysicalField) -> f64 {
        a.0.iter().zip(&b.0).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn curl_of_single_mode() {
        let g = SpectralGrid::new(16).unwrap();
        let v = VectorField { x1: g.zeros(), x2: g.forward(&g.sample(|x1, _| -x1.cos())) };
        let w = g.inverse(&g.curl_2d(&v));
        assert!(max_diff(&w, &g.sample(|x1, _| x1.sin())) < 1e-14);
        assert_eq!(g.curl_2d(&VectorField { x1: g.zeros(), x2: g.zeros() }), g.zeros());
    }

    #[test]
    fn biot_savart_examples() {
        let g = SpectralGrid::new(16).unwrap();
        let u = g.biot_savart(&g.forward(&g.sample(|x1, _| x1.sin()))).unwrap();
        let [u1, u2] = g.inverse_vector(&u);
        assert!(u1.max_abs() < 1e-15);
        assert!(max_diff(&u2, &g.sample(|x1, _| -x1.cos())) < 1e-14);

        let w = g.forward(&g.sample(|x1, x2| x1.sin() + x2.cos()));
        let u = g.biot_savart(&w).unwrap();
        let [u1, u2] = g.inverse_vector(&u);
        assert!(max_diff(&u1, &g.sample(|_, x2| -x2.sin())) < 1e-14);
        assert!(max_diff(&u2, &g.sample(|x1, _| -x1.cos())) < 1e-14);
        assert!(g.curl_2d(&u).sub(&w).max_norm() < 1e-15);

        let zero = g.biot_savart(&g.zeros()).unwrap();
        assert_eq!(zero.x1, g.zeros());
        assert!(matches!(
            g.biot_savart(&g.forward(&g.sample(|x1, _| 1.0 + x1.sin()))),
            Err(SpectralError::NonZeroMean(_))
        ));
    }

    #[test]
    fn laplacian_and_product() {
        let g = SpectralGrid::new(16).unwrap();
        let s = g.forward(&g.sample(|x1, _| x1.sin()));
        assert!(max_diff(&g.inverse(&g.laplacian(&s)), &g.sample(|x1, _| -x1.sin())) < 1e-14);
        let p = g.inverse(&g.pointwise_product(&s, &s));
        assert!(max_diff(&p, &g.sample(|x1, _| 0.5 - 0.5 * (2.0 * x1).cos())) < 1e-14);
    }

    #[test]
    fn symbol_application() {
        let g = SpectralGrid::new(16).unwrap();
        let sym = compute_symbol(&KernelProfile::power_law(0.5, false).unwrap(), &g.kappas()).unwrap();
        let c = g.forward(&g.sample(|_, _| 3.0));
        assert!(g.apply_symbol(&c, &sym).unwrap().max_norm() == 0.0);
        let s = g.forward(&g.sample(|x1, _| (2.0 * x1).sin()));
        let ls = g.inverse(&g.apply_symbol(&s, &sym).unwrap());
        let s1 = sym.get(1.0).unwrap();
        assert!(max_diff(&ls, &g.sample(|x1, _| 2.0 * s1 * (2.0 * x1).sin())) < 1e-8);

        let short = compute_symbol(&KernelProfile::power_law(0.5, false).unwrap(), &[0.0, 1.0]).unwrap();
        assert!(matches!(g.apply_symbol(&s, &short), Err(SpectralError::SymbolGridMismatch(_))));
    }
}
