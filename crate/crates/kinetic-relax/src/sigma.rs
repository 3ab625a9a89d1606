//! Nonnegative relaxation cross-sections `sigma(x)` on the torus.
//!
//! A cross-section is defined by its values on the native collocation grid;
//! the band-limited interpolant through those values is the canonical
//! function used everywhere else (quadratures, convolution matrices, closed
//! forms). Discontinuous profiles such as indicators are therefore
//! represented by their band-limited stand-in: the defining samples are
//! clipped at zero, while evaluations between grid points keep whatever
//! oscillation the interpolant has. This keeps every consumer — relaxation
//! factors, weighted quadratures and Fourier-side identities — consistent
//! with one single function.

use crate::error::{Error, Result};
use crate::spectral::TorusSpectrum;

/// Negative sample values larger than this are treated as genuine errors
/// rather than roundoff or ringing to clip.
const NEGATIVE_SAMPLE_TOL: f64 = 1e-10;

/// A nonnegative multiplicative cross-section on `T^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    spectrum: TorusSpectrum,
    samples: Vec<f64>,
}

impl CrossSection {
    /// Builds a cross-section from collocation samples. Values in
    /// `[-1e-10, 0)` are clipped to zero; anything more negative is rejected.
    pub fn from_samples(dim: usize, cutoff: usize, samples: &[f64]) -> Result<Self> {
        for (i, &s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "cross-section sample {i} is not finite"
                )));
            }
            if s < -NEGATIVE_SAMPLE_TOL {
                return Err(Error::InvalidInput(format!(
                    "cross-section sample {i} is negative ({s:.3e}); sigma must be >= 0"
                )));
            }
        }
        let clipped: Vec<f64> = samples.iter().map(|&s| s.max(0.0)).collect();
        let spectrum = TorusSpectrum::from_samples(dim, cutoff, &clipped)?;
        Ok(CrossSection {
            spectrum,
            samples: clipped,
        })
    }

    /// Resamples an arbitrary spectrum on its native grid, clips the ringing
    /// at zero and rebuilds. Lossy exactly when clipping bites.
    pub fn from_spectrum(spectrum: &TorusSpectrum) -> Result<Self> {
        let samples = spectrum.to_samples();
        let clipped: Vec<f64> = samples.iter().map(|&s| s.max(0.0)).collect();
        let rebuilt = TorusSpectrum::from_samples(spectrum.dim(), spectrum.cutoff(), &clipped)?;
        Ok(CrossSection {
            spectrum: rebuilt,
            samples: clipped,
        })
    }

    /// The constant cross-section `sigma = c >= 0`.
    pub fn constant(dim: usize, cutoff: usize, c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidInput(
                "constant cross-section needs a finite value >= 0".into(),
            ));
        }
        let m = (2 * cutoff + 1).pow(dim as u32);
        Self::from_samples(dim, cutoff, &vec![c; m])
    }

    /// `amplitude * prod_a max(0, cos(2 pi x_a))`: a Lipschitz bump that
    /// vanishes on half of each axis.
    pub fn cosine_bump(dim: usize, cutoff: usize, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidInput(
                "cosine bump needs a finite amplitude >= 0".into(),
            ));
        }
        let profile = |x: [f64; 2]| {
            let mut v = amplitude;
            for a in 0..dim {
                v *= (2.0 * std::f64::consts::PI * x[a]).cos().max(0.0);
            }
            v
        };
        let m = 2 * cutoff + 1;
        let samples: Vec<f64> = match dim {
            1 => (0..m).map(|j| profile([j as f64 / m as f64, 0.0])).collect(),
            _ => {
                let mut s = Vec::with_capacity(m * m);
                for j0 in 0..m {
                    for j1 in 0..m {
                        s.push(profile([j0 as f64 / m as f64, j1 as f64 / m as f64]));
                    }
                }
                s
            }
        };
        Self::from_samples(dim, cutoff, &samples)
    }

    /// Indicator of the interval `[a, b]` in one dimension (sampled, so the
    /// canonical function is its band-limited interpolant).
    pub fn indicator(cutoff: usize, a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
            return Err(Error::InvalidInput(
                "indicator needs 0 <= a < b <= 1".into(),
            ));
        }
        let m = 2 * cutoff + 1;
        let samples: Vec<f64> = (0..m)
            .map(|j| {
                let x = j as f64 / m as f64;
                if (a..=b).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self::from_samples(1, cutoff, &samples)
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn cutoff(&self) -> usize {
        self.spectrum.cutoff()
    }

    /// The defining collocation samples (all `>= 0`).
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// The canonical band-limited representation.
    pub fn spectrum(&self) -> &TorusSpectrum {
        &self.spectrum
    }

    /// `integral sigma dx`, the zero Fourier coefficient.
    pub fn integral(&self) -> f64 {
        self.spectrum.mean().re
    }

    /// Fourier coefficient of mode `k`.
    pub fn fourier(&self, k: [i64; 2]) -> num_complex::Complex64 {
        if k[0].unsigned_abs() as usize > self.cutoff() || k[1].unsigned_abs() as usize > self.cutoff() {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            self.spectrum.coeff(k)
        }
    }

    /// Interpolant values on a finer uniform grid (kept as-is, see module
    /// docs: off-sample evaluation may ring below zero for rough profiles).
    pub fn values_on(&self, m: usize) -> Vec<f64> {
        self.spectrum.samples_on(m).iter().map(|c| c.re).collect()
    }

    pub fn min_sample(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn max_sample(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }
}

/// Exact quadrature of `integral sigma |field|^2 dx` using a zero-padded
/// evaluation grid: with `m > cutoff(sigma) + 2 * cutoff(field)` the uniform
/// rectangle rule integrates the band-limited product without aliasing.
pub fn weighted_l2_sq(sigma: &CrossSection, field: &TorusSpectrum, m: usize) -> f64 {
    assert_eq!(sigma.dim(), field.dim(), "sigma and field dims must match");
    debug_assert!(
        m > sigma.cutoff() + 2 * field.cutoff(),
        "evaluation grid too coarse for exact quadrature"
    );
    let sig = sigma.values_on(m);
    let vals = field.samples_on(m);
    let cells = sig.len() as f64;
    sig.iter()
        .zip(&vals)
        .map(|(s, v)| s * v.norm_sqr())
        .sum::<f64>()
        / cells
}

/// Smallest padded grid that makes [`weighted_l2_sq`] exact for one sigma
/// factor against a squared field.
pub fn exact_quadrature_points(sigma: &CrossSection, field: &TorusSpectrum) -> usize {
    sigma.cutoff() + 2 * field.cutoff() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn eval_reference(s: &TorusSpectrum, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in s.modes() {
            let theta = 2.0 * std::f64::consts::PI * n[0] as f64 * x;
            acc += c * Complex64::new(theta.cos(), theta.sin());
        }
        acc
    }

    #[test]
    fn constant_profile_has_flat_spectrum() {
        let cs = CrossSection::constant(1, 8, 2.5).unwrap();
        assert!((cs.integral() - 2.5).abs() < 1e-12);
        assert!((cs.min_sample() - 2.5).abs() < 1e-15);
        for (n, c) in cs.spectrum().modes() {
            if n != [0, 0] {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn indicator_integral_matches_sample_fraction() {
        let cs = CrossSection::indicator(16, 0.0, 0.5).unwrap();
        let m = 33.0;
        let ones = cs.samples().iter().filter(|&&s| s > 0.5).count() as f64;
        assert!((cs.integral() - ones / m).abs() < 1e-12);
        // Half-interval indicator: 17 of 33 points fall in [0, 1/2].
        assert_eq!(ones as usize, 17);
    }

    #[test]
    fn cosine_bump_vanishes_on_half_the_torus() {
        let cs = CrossSection::cosine_bump(1, 16, 1.0).unwrap();
        let quarter = cs.samples().iter().filter(|&&s| s == 0.0).count();
        // cos(2 pi x) < 0 on (1/4, 3/4): about half of the samples clip.
        assert!(quarter >= 15 && quarter <= 17, "clipped {quarter} of 33");
        assert!(cs.min_sample() >= 0.0);
    }

    #[test]
    fn negative_samples_are_rejected_but_ringing_is_clipped() {
        let err = CrossSection::from_samples(1, 2, &[1.0, -0.5, 0.0, 0.0, 0.0]);
        assert!(err.is_err());
        // A spectrum whose resampling rings slightly negative is clipped.
        let mut spec = TorusSpectrum::zeros(1, 4);
        spec.set_coeff([0, 0], Complex64::new(0.05, 0.0));
        spec.set_coeff([1, 0], Complex64::new(0.5, 0.0));
        spec.set_coeff([-1, 0], Complex64::new(0.5, 0.0));
        let cs = CrossSection::from_spectrum(&spec).unwrap();
        assert!(cs.min_sample() >= 0.0);
    }

    #[test]
    fn weighted_quadrature_matches_pointwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma_samples: Vec<f64> = (0..17).map(|_| rng.gen_range(0.0..2.0)).collect();
        let sigma = CrossSection::from_samples(1, 8, &sigma_samples).unwrap();
        let field_samples: Vec<f64> = (0..17).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = TorusSpectrum::from_samples(1, 8, &field_samples).unwrap();

        let m = exact_quadrature_points(&sigma, &field);
        let fast = weighted_l2_sq(&sigma, &field, m);

        // Oracle: dense rectangle rule from independent pointwise evaluation.
        let points = 4096;
        let slow: f64 = (0..points)
            .map(|j| {
                let x = j as f64 / points as f64;
                eval_reference(sigma.spectrum(), x).re * eval_reference(&field, x).norm_sqr()
            })
            .sum::<f64>()
            / points as f64;
        assert!(
            (fast - slow).abs() <= 1e-10 * (1.0 + slow.abs()),
            "quadrature defect {}",
            (fast - slow).abs()
        );
    }

    #[test]
    fn padded_quadrature_is_stable_under_refinement() {
        let sigma = CrossSection::indicator(8, 0.2, 0.7).unwrap();
        let field = TorusSpectrum::from_grid_fn(1, 8, |x| {
            (2.0 * std::f64::consts::PI * 3.0 * x[0]).sin()
        });
        let base = weighted_l2_sq(&sigma, &field, exact_quadrature_points(&sigma, &field));
        let refined = weighted_l2_sq(&sigma, &field, 4 * exact_quadrature_points(&sigma, &field));
        assert!((base - refined).abs() < 1e-11);
    }
}
