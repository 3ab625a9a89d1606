//! Fourier-spectral fields on the periodic torus, plus discrete velocity sets.
//!
//! Spatial fields live on the unit torus `T^d = (R/Z)^d` (`d` is 1 or 2) and
//! are stored as trigonometric polynomials
//!
//! ```text
//!     f(x) = sum_{|n|_inf <= N} c_n exp(i 2 pi n . x)
//! ```
//!
//! with a hard cutoff `N` in the max norm. The associated collocation grid is
//! the uniform grid with `M = 2N + 1` points per axis, `x_j = j / M`. Because
//! `M` exceeds the bandwidth `2N` of any product of grid values with a single
//! field, the discrete Fourier transform on that grid inverts exactly: a
//! spectrum is equivalent to its grid samples and either view can be used.
//!
//! Transforms are plain `O(M^2)` summations per axis pair; cutoffs here are a
//! few dozen modes, where the naive transform is both fast enough and free of
//! library dependencies.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest tolerated deviation from conjugate symmetry for "real" fields.
pub const REALITY_TOL: f64 = 1e-10;

/// A band-limited complex field on `T^d` with max-norm cutoff `N`.
///
/// Coefficients are stored row-major over mode tuples `(n_0, n_1)` with each
/// component running `-N ..= N`; for `d = 1` only `n_0` is active.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSpectrum {
    dim: usize,
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

/// Returns the complex `m`-th roots of unity `exp(i 2 pi k / m)`, `k < m`.
fn unit_roots(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect()
}

impl TorusSpectrum {
    /// The zero field.
    pub fn zeros(dim: usize, cutoff: usize) -> Self {
        assert!(dim == 1 || dim == 2, "spatial dimension must be 1 or 2");
        let m = 2 * cutoff + 1;
        let len = m.pow(dim as u32);
        TorusSpectrum {
            dim,
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Builds a spectrum from real samples on the collocation grid
    /// (row-major, `(2N+1)^d` values). The transform is exactly invertible.
    pub fn from_samples(dim: usize, cutoff: usize, samples: &[f64]) -> Result<Self> {
        let complex: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        Self::from_complex_samples(dim, cutoff, &complex)
    }

    /// As [`from_samples`](Self::from_samples) for complex grid values.
    pub fn from_complex_samples(dim: usize, cutoff: usize, samples: &[Complex64]) -> Result<Self> {
        assert!(dim == 1 || dim == 2, "spatial dimension must be 1 or 2");
        let m = 2 * cutoff + 1;
        let len = m.pow(dim as u32);
        if samples.len() != len {
            return Err(Error::InvalidInput(format!(
                "expected {} collocation samples for dim {} cutoff {}, got {}",
                len,
                dim,
                cutoff,
                samples.len()
            )));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::InvalidInput(
                "collocation samples must be finite".into(),
            ));
        }
        let roots = unit_roots(m);
        let mut out = Self::zeros(dim, cutoff);
        let nm = m as i64;
        match dim {
            1 => {
                for (idx, n) in (-(cutoff as i64)..=cutoff as i64).enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &s) in samples.iter().enumerate() {
                        let k = (-(n * j as i64)).rem_euclid(nm) as usize;
                        acc += s * roots[k];
                    }
                    out.coeffs[idx] = acc / m as f64;
                }
            }
            _ => {
                let n_range = -(cutoff as i64)..=cutoff as i64;
                let mut idx = 0;
                for n0 in n_range.clone() {
                    for n1 in n_range.clone() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j0 in 0..m {
                            for j1 in 0..m {
                                let s = samples[j0 * m + j1];
                                let k = (-(n0 * j0 as i64 + n1 * j1 as i64)).rem_euclid(nm) as usize;
                                acc += s * roots[k];
                            }
                        }
                        out.coeffs[idx] = acc / (m * m) as f64;
                        idx += 1;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Samples a closure on the collocation grid and transforms it.
    pub fn from_grid_fn(dim: usize, cutoff: usize, f: impl Fn([f64; 2]) -> f64) -> Self {
        let m = 2 * cutoff + 1;
        let samples: Vec<f64> = match dim {
            1 => (0..m).map(|j| f([j as f64 / m as f64, 0.0])).collect(),
            _ => {
                let mut s = Vec::with_capacity(m * m);
                for j0 in 0..m {
                    for j1 in 0..m {
                        s.push(f([j0 as f64 / m as f64, j1 as f64 / m as f64]));
                    }
                }
                s
            }
        };
        Self::from_samples(dim, cutoff, &samples).expect("closure sampling is always well-formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of retained modes, `(2N+1)^d`.
    pub fn num_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Grid points per axis, `2N+1`.
    pub fn grid_points(&self) -> usize {
        2 * self.cutoff + 1
    }

    fn index_of(&self, n: [i64; 2]) -> usize {
        let nc = self.cutoff as i64;
        debug_assert!(n[0].abs() <= nc && n[1].abs() <= nc, "mode out of band");
        let m = 2 * self.cutoff + 1;
        match self.dim {
            1 => (n[0] + nc) as usize,
            _ => (n[0] + nc) as usize * m + (n[1] + nc) as usize,
        }
    }

    /// Coefficient of mode `n` (unused components must be zero for `d = 1`).
    pub fn coeff(&self, n: [i64; 2]) -> Complex64 {
        self.coeffs[self.index_of(n)]
    }

    pub fn set_coeff(&mut self, n: [i64; 2], value: Complex64) {
        let idx = self.index_of(n);
        self.coeffs[idx] = value;
    }

    /// Iterates `(mode, coefficient)` pairs; modes use `[n0, n1]` with
    /// `n1 = 0` in one dimension.
    pub fn modes(&self) -> impl Iterator<Item = ([i64; 2], Complex64)> + '_ {
        let nc = self.cutoff as i64;
        let m = 2 * self.cutoff + 1;
        let dim = self.dim;
        self.coeffs.iter().enumerate().map(move |(idx, &c)| {
            let n = match dim {
                1 => [idx as i64 - nc, 0],
                _ => [(idx / m) as i64 - nc, (idx % m) as i64 - nc],
            };
            (n, c)
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Mean value over the torus (the `n = 0` coefficient).
    pub fn mean(&self) -> Complex64 {
        self.coeff([0, 0])
    }

    /// Complex values on the native collocation grid (row-major).
    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        self.samples_on(2 * self.cutoff + 1)
    }

    /// Real parts of the native collocation values. Exact for real fields.
    pub fn to_samples(&self) -> Vec<f64> {
        self.to_complex_samples().iter().map(|c| c.re).collect()
    }

    /// Evaluates the trigonometric interpolant on a uniform `m^d` grid.
    ///
    /// With `m > bandwidth` this turns the rectangle rule on that grid into an
    /// exact quadrature for products of evaluated fields, which is how the
    /// sigma-weighted forms elsewhere avoid aliasing.
    pub fn samples_on(&self, m: usize) -> Vec<Complex64> {
        assert!(m >= 1);
        let roots = unit_roots(m);
        let nm = m as i64;
        match self.dim {
            1 => {
                let mut out = vec![Complex64::new(0.0, 0.0); m];
                for (n, c) in self.modes() {
                    for (j, o) in out.iter_mut().enumerate() {
                        let k = (n[0] * j as i64).rem_euclid(nm) as usize;
                        *o += c * roots[k];
                    }
                }
                out
            }
            _ => {
                let mut out = vec![Complex64::new(0.0, 0.0); m * m];
                for (n, c) in self.modes() {
                    for j0 in 0..m {
                        let base = (n[0] * j0 as i64).rem_euclid(nm);
                        for j1 in 0..m {
                            let k = (base + n[1] * j1 as i64).rem_euclid(nm) as usize;
                            out[j0 * m + j1] += c * roots[k];
                        }
                    }
                }
                out
            }
        }
    }

    /// Pointwise evaluation of the interpolant at an arbitrary position.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in self.modes() {
            let phase = 2.0 * std::f64::consts::PI * (n[0] as f64 * x[0] + n[1] as f64 * x[1]);
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc
    }

    /// Free advection by velocity `v` for time `t`: mode `n` picks up the
    /// phase `exp(-i 2 pi (n . v) t)`. An exact `L^2` isometry.
    pub fn advect(&self, v: [f64; 2], t: f64) -> Self {
        let mut out = self.clone();
        for (idx, (n, _)) in self.modes().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (n[0] as f64 * v[0] + n[1] as f64 * v[1]) * t;
            out.coeffs[idx] *= Complex64::from_polar(1.0, theta);
        }
        out
    }

    /// Fractional smoothing multiplier `(1 - Laplacian)^(-order/2)`, realized
    /// on mode `n` as the factor `(1 + 4 pi^2 |n|^2)^(-order/2)`.
    ///
    /// Positive orders smooth, negative orders measure Sobolev growth, and
    /// `order = 0` is the identity. Orders compose additively.
    pub fn bessel_multiplier(&self, order: f64) -> Self {
        let mut out = self.clone();
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        for (idx, (n, _)) in self.modes().enumerate() {
            let nsq = (n[0] * n[0] + n[1] * n[1]) as f64;
            out.coeffs[idx] *= (1.0 + four_pi_sq * nsq).powf(-order / 2.0);
        }
        out
    }

    /// Squared `L^2(T^d)` norm, `sum |c_n|^2` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Maximum deviation from the conjugate symmetry `c_{-n} = conj(c_n)`
    /// satisfied by real-valued fields.
    pub fn reality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (n, c) in self.modes() {
            let mirrored = self.coeff([-n[0], -n[1]]);
            worst = worst.max((mirrored - c.conj()).norm());
        }
        worst
    }

    pub fn is_real_field(&self) -> bool {
        self.reality_defect() <= REALITY_TOL
    }

    /// Returns `self + scale * other` (shapes must match).
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        assert_eq!(
            (self.dim, self.cutoff),
            (other.dim, other.cutoff),
            "spectrum shapes must match"
        );
        let mut out = self.clone();
        for (o, &c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += scale * c;
        }
        out
    }

    pub fn scaled(&self, scale: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= scale;
        }
        out
    }

    /// Band-limited product computed on a zero-padded grid (no aliasing):
    /// both factors are evaluated on a `>= 2 * (Na + Nb) + 1` point grid,
    /// multiplied pointwise and transformed back at the combined cutoff
    /// `Na + Nb`.
    pub fn dealiased_product(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "spectrum dims must match");
        let cutoff = self.cutoff + other.cutoff;
        let m = 2 * cutoff + 1;
        let a = self.samples_on(m);
        let b = other.samples_on(m);
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_complex_samples(self.dim, cutoff, &prod)
            .expect("padded product samples are well-formed")
    }

    /// Projects onto the band `|n|_inf <= cutoff` (or pads with zeros).
    pub fn truncated(&self, cutoff: usize) -> Self {
        let mut out = Self::zeros(self.dim, cutoff);
        let keep = cutoff.min(self.cutoff) as i64;
        for (n, c) in self.modes() {
            if n[0].abs() <= keep && n[1].abs() <= keep {
                out.set_coeff(n, c);
            }
        }
        out
    }
}

/// A finite velocity set with positive quadrature weights and a declared
/// bounding box. Models a measure on the velocity domain; for the transport
/// models the measure is normalized to one, for collision quadratures it is
/// the Lebesgue cell measure.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    dim: usize,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
    bbox: [[f64; 2]; 2],
}

impl VelocityGrid {
    /// Uniform inclusive grid on `[-half_width, half_width]^dim` with
    /// `per_axis` nodes per axis and equal weights summing to one.
    ///
    /// For odd `per_axis` the zero velocity is one of the nodes.
    pub fn uniform_symmetric(dim: usize, per_axis: usize, half_width: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidInput("velocity dimension must be 1 or 2".into()));
        }
        if per_axis == 0 || !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidInput(
                "velocity grid needs per_axis >= 1 and a positive half width".into(),
            ));
        }
        let axis: Vec<f64> = if per_axis == 1 {
            vec![0.0]
        } else {
            (0..per_axis)
                .map(|i| -half_width + 2.0 * half_width * i as f64 / (per_axis - 1) as f64)
                .collect()
        };
        let nodes: Vec<[f64; 2]> = match dim {
            1 => axis.iter().map(|&v| [v, 0.0]).collect(),
            _ => {
                let mut n = Vec::with_capacity(per_axis * per_axis);
                for &v0 in &axis {
                    for &v1 in &axis {
                        n.push([v0, v1]);
                    }
                }
                n
            }
        };
        let w = 1.0 / nodes.len() as f64;
        let weights = vec![w; nodes.len()];
        Ok(VelocityGrid {
            dim,
            nodes,
            weights,
            bbox: [[-half_width, -half_width], [half_width, half_width]],
        })
    }

    /// A grid from explicit nodes and weights; weights must be positive and
    /// nodes must lie inside the declared bounding box.
    pub fn custom(
        dim: usize,
        nodes: Vec<[f64; 2]>,
        weights: Vec<f64>,
        bbox: [[f64; 2]; 2],
    ) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidInput("velocity dimension must be 1 or 2".into()));
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidInput(
                "velocity nodes and weights must be non-empty and of equal length".into(),
            ));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "velocity weight {i} must be positive and finite"
                )));
            }
        }
        let tol = 1e-12;
        for (i, n) in nodes.iter().enumerate() {
            for a in 0..dim {
                if !n[a].is_finite() || n[a] < bbox[0][a] - tol || n[a] > bbox[1][a] + tol {
                    return Err(Error::InvalidInput(format!(
                        "velocity node {i} lies outside the declared bounding box"
                    )));
                }
            }
        }
        Ok(VelocityGrid {
            dim,
            nodes,
            weights,
            bbox,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, j: usize) -> [f64; 2] {
        self.nodes[j]
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bbox(&self) -> [[f64; 2]; 2] {
        self.bbox
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when the weights form a probability measure (total mass one).
    pub fn is_unit_measure(&self) -> bool {
        (self.total_weight() - 1.0).abs() <= 1e-12
    }
}

/// A kinetic distribution: one spatial spectrum per velocity node.
#[derive(Debug, Clone)]
pub struct KineticState {
    grid: Arc<VelocityGrid>,
    spectra: Vec<TorusSpectrum>,
}

impl KineticState {
    pub fn new(grid: Arc<VelocityGrid>, spectra: Vec<TorusSpectrum>) -> Self {
        assert_eq!(grid.len(), spectra.len(), "one spectrum per velocity node");
        if let Some(first) = spectra.first() {
            assert_eq!(
                first.dim(),
                grid.dim(),
                "spatial and velocity dimensions must agree"
            );
            assert!(
                spectra
                    .iter()
                    .all(|s| (s.dim(), s.cutoff()) == (first.dim(), first.cutoff())),
                "all node spectra must share one shape"
            );
        }
        KineticState { grid, spectra }
    }

    /// The zero state with the given spatial cutoff.
    pub fn zeros(grid: Arc<VelocityGrid>, cutoff: usize) -> Self {
        let dim = grid.dim();
        let spectra = (0..grid.len())
            .map(|_| TorusSpectrum::zeros(dim, cutoff))
            .collect();
        KineticState { grid, spectra }
    }

    pub fn grid(&self) -> &Arc<VelocityGrid> {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.spectra.first().map_or(0, |s| s.cutoff())
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn spectrum(&self, j: usize) -> &TorusSpectrum {
        &self.spectra[j]
    }

    pub fn spectrum_mut(&mut self, j: usize) -> &mut TorusSpectrum {
        &mut self.spectra[j]
    }

    pub fn spectra(&self) -> &[TorusSpectrum] {
        &self.spectra
    }

    /// Velocity integral `sum_j w_j f_j`; for a unit-measure grid this is the
    /// velocity average that relaxation drives the state towards.
    pub fn velocity_average(&self) -> TorusSpectrum {
        let mut acc = TorusSpectrum::zeros(self.dim(), self.cutoff());
        for (j, s) in self.spectra.iter().enumerate() {
            acc = acc.add_scaled(s, self.grid.weight(j));
        }
        acc
    }

    /// Squared norm in `L^2(T^d x V)`: `sum_j w_j ||f_j||^2`.
    pub fn norm_sq(&self) -> f64 {
        self.spectra
            .iter()
            .enumerate()
            .map(|(j, s)| self.grid.weight(j) * s.l2_norm_sq())
            .sum()
    }

    /// Applies free transport `x -> x - v t` to every node exactly.
    pub fn advect(&self, t: f64) -> Self {
        let spectra = self
            .spectra
            .iter()
            .enumerate()
            .map(|(j, s)| s.advect(self.grid.node(j), t))
            .collect();
        KineticState {
            grid: Arc::clone(&self.grid),
            spectra,
        }
    }

    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        assert_eq!(self.grid.len(), other.grid.len());
        let spectra = self
            .spectra
            .iter()
            .zip(&other.spectra)
            .map(|(a, b)| a.add_scaled(b, scale))
            .collect();
        KineticState {
            grid: Arc::clone(&self.grid),
            spectra,
        }
    }

    /// Worst-case conjugate-symmetry defect across nodes.
    pub fn reality_defect(&self) -> f64 {
        self.spectra
            .iter()
            .map(|s| s.reality_defect())
            .fold(0.0, f64::max)
    }
}
