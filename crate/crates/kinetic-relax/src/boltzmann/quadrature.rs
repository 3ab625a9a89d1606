//! Collision kernels, Maxwellians, and the velocity/angle quadrature for
//! the linearized collision operator (two velocity dimensions).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::VelocityGrid;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Angular shape of the collision kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `B = |v - v*|^beta`, independent of the deflection direction.
    PowerLaw,
    /// `B = |v - v*|^beta (1 + |cos theta|)` with `theta` the angle between
    /// the deflection direction and the relative velocity. Exercises
    /// angle-dependent kernels at quadrature level.
    AngularWeighted,
}

/// Collision kernel with its growth envelope:
/// the collision frequency is expected to grow like `M1 (1 + |v|)^alpha`
/// from below, and the kernel itself is bounded by `M2 |v - v*|^beta`
/// (the two-dimensional case makes the deflection-distance factor trivial).
#[derive(Debug, Clone, Copy)]
pub struct CollisionKernelSpec {
    pub alpha: f64,
    pub beta: f64,
    pub m1: f64,
    pub m2: f64,
    pub shape: KernelShape,
    scale: f64,
}

impl CollisionKernelSpec {
    /// Power-law kernel `|v - v*|^beta`. Requires `alpha > -1` and
    /// `-1 < beta <= alpha + 2/3`.
    pub fn power_law(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(alpha, beta, 1.0, 1.0, KernelShape::PowerLaw)
    }

    /// Angle-weighted kernel `|v - v*|^beta (1 + |cos theta|)`; its sharp
    /// envelope constant is `M2 = 2`.
    pub fn angular_weighted(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(alpha, beta, 1.0, 2.0, KernelShape::AngularWeighted)
    }

    fn build(alpha: f64, beta: f64, m1: f64, m2: f64, shape: KernelShape) -> Result<Self> {
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::validation("alpha", "must exceed -1"));
        }
        if !(beta.is_finite() && beta > -1.0 && beta <= alpha + 2.0 / 3.0) {
            return Err(Error::validation(
                "beta",
                "must satisfy -1 < beta <= alpha + 2/3",
            ));
        }
        Ok(CollisionKernelSpec {
            alpha,
            beta,
            m1,
            m2,
            shape,
            scale: 1.0,
        })
    }

    /// Multiplies the kernel by a constant (useful for probing the envelope
    /// bound; the default scale is one).
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn is_hard(&self) -> bool {
        self.alpha > 0.0 && self.beta > 0.0
    }

    pub fn is_soft(&self) -> bool {
        self.alpha < 0.0 && self.beta < 0.0
    }

    /// Kernel value at relative speed `r` and deflection cosine `cos_theta`.
    ///
    /// The coincidence point `r = 0` carries zero continuum measure; it is
    /// graded by continuity: `0` for `beta > 0`, the angular factor alone
    /// for `beta = 0`, and `0` for `beta < 0` (the singular self-collision
    /// is skipped rather than extrapolated).
    pub fn eval(&self, r: f64, cos_theta: f64) -> f64 {
        let radial = if r == 0.0 {
            match self.beta.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Equal) => 1.0,
                _ => return 0.0,
            }
        } else {
            r.powf(self.beta)
        };
        let angular = match self.shape {
            KernelShape::PowerLaw => 1.0,
            KernelShape::AngularWeighted => 1.0 + cos_theta.abs(),
        };
        self.scale * radial * angular
    }
}

/// Macroscopic Gaussian parameters (density, bulk velocity, temperature).
#[derive(Debug, Clone, Copy)]
pub struct MaxwellianParams {
    pub rho: f64,
    pub u: [f64; 2],
    pub temp: f64,
}

impl MaxwellianParams {
    pub fn new(rho: f64, u: [f64; 2], temp: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0 && temp.is_finite() && temp > 0.0)
            || !u.iter().all(|c| c.is_finite())
        {
            return Err(Error::InvalidInput(
                "Maxwellian needs rho > 0, temp > 0 and finite velocity".into(),
            ));
        }
        Ok(MaxwellianParams { rho, u, temp })
    }
}

/// Gaussian `rho / (2 pi T) * exp(-|v - u|^2 / (2T))` in two dimensions.
pub fn maxwellian(v: [f64; 2], params: &MaxwellianParams) -> f64 {
    let dx = v[0] - params.u[0];
    let dy = v[1] - params.u[1];
    params.rho / (TWO_PI * params.temp) * (-(dx * dx + dy * dy) / (2.0 * params.temp)).exp()
}

/// The normalized equilibrium `(2 pi)^(-1) exp(-|v|^2 / 2)`.
pub fn standard_maxwellian(v: [f64; 2]) -> f64 {
    (-(v[0] * v[0] + v[1] * v[1]) / 2.0).exp() / TWO_PI
}

/// Cell-centered velocity grid on `[-v_max, v_max]^2` with uniform cell
/// weights, plus a uniform set of deflection directions on the unit circle
/// and cached Maxwellian values.
#[derive(Debug)]
pub struct VelocityQuadrature {
    v_max: f64,
    h: f64,
    per_axis: usize,
    nodes: Vec<[f64; 2]>,
    omegas: Vec<[f64; 2]>,
    d_omega: f64,
    mu: Vec<f64>,
    sqrt_mu: Vec<f64>,
    grid: Arc<VelocityGrid>,
}

impl VelocityQuadrature {
    pub fn new(v_max: f64, h: f64, n_omega: usize) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0 && h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput("quadrature needs v_max > 0, h > 0".into()));
        }
        let per_axis = (2.0 * v_max / h).round() as usize;
        if per_axis < 2 || (per_axis as f64 * h - 2.0 * v_max).abs() > 1e-9 {
            return Err(Error::InvalidInput(
                "cell width must divide the velocity box evenly".into(),
            ));
        }
        if n_omega < 4 {
            return Err(Error::InvalidInput(
                "need at least 4 deflection directions".into(),
            ));
        }
        let axis: Vec<f64> = (0..per_axis)
            .map(|i| -v_max + (i as f64 + 0.5) * h)
            .collect();
        let mut nodes = Vec::with_capacity(per_axis * per_axis);
        for &x in &axis {
            for &y in &axis {
                nodes.push([x, y]);
            }
        }
        let mu: Vec<f64> = nodes.iter().map(|&v| standard_maxwellian(v)).collect();
        let mass: f64 = mu.iter().sum::<f64>() * h * h;
        if !(0.999..=1.001).contains(&mass) {
            return Err(Error::InvalidInput(format!(
                "velocity grid captures Maxwellian mass {mass:.6}, outside [0.999, 1.001]"
            )));
        }
        let omegas: Vec<[f64; 2]> = (0..n_omega)
            .map(|i| {
                let phi = TWO_PI * i as f64 / n_omega as f64;
                [phi.cos(), phi.sin()]
            })
            .collect();
        let sqrt_mu = mu.iter().map(|m| m.sqrt()).collect();
        let weights = vec![h * h; nodes.len()];
        let grid = Arc::new(VelocityGrid::custom(
            2,
            nodes.clone(),
            weights,
            [[-v_max, -v_max], [v_max, v_max]],
        )?);
        Ok(VelocityQuadrature {
            v_max,
            h,
            per_axis,
            nodes,
            omegas,
            d_omega: TWO_PI / n_omega as f64,
            mu,
            sqrt_mu,
            grid,
        })
    }

    /// Default desk-scale quadrature: `v_max = 6`, `h = 0.5`, 16 angles.
    pub fn default_desk() -> Result<Self> {
        Self::new(6.0, 0.5, 16)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    /// Uniform cell weight `h^2`.
    pub fn weight(&self) -> f64 {
        self.h * self.h
    }

    pub fn node(&self, j: usize) -> [f64; 2] {
        self.nodes[j]
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn mu(&self, j: usize) -> f64 {
        self.mu[j]
    }

    pub fn sqrt_mu(&self, j: usize) -> f64 {
        self.sqrt_mu[j]
    }

    pub fn omegas(&self) -> &[[f64; 2]] {
        &self.omegas
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    /// Captured Maxwellian mass `sum_j h^2 mu(v_j)`.
    pub fn maxwellian_mass(&self) -> f64 {
        self.mu.iter().sum::<f64>() * self.weight()
    }

    /// The grid as a velocity measure for kinetic states.
    pub fn velocity_grid(&self) -> Arc<VelocityGrid> {
        Arc::clone(&self.grid)
    }

    /// Bilinear interpolation stencil at `v`: four `(node, weight)` pairs,
    /// or `None` when `v` leaves the convex hull of the cell centers.
    pub fn locate(&self, v: [f64; 2]) -> Option<[(usize, f64); 4]> {
        let bound = self.per_axis - 1;
        let mut idx = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for a in 0..2 {
            let s = (v[a] + self.v_max) / self.h - 0.5;
            if !(0.0..=bound as f64).contains(&s) {
                return None;
            }
            let i = (s.floor() as usize).min(bound - 1);
            idx[a] = i;
            frac[a] = s - i as f64;
        }
        let (ix, iy) = (idx[0], idx[1]);
        let (fx, fy) = (frac[0], frac[1]);
        let base = ix * self.per_axis + iy;
        Some([
            (base, (1.0 - fx) * (1.0 - fy)),
            (base + 1, (1.0 - fx) * fy),
            (base + self.per_axis, fx * (1.0 - fy)),
            (base + self.per_axis + 1, fx * fy),
        ])
    }
}

/// Collision frequencies `nu(v_j) = sum_(k, omega) h^2 d_omega B mu(v_k)`
/// together with the empirical growth-floor constant
/// `min_j nu(v_j) / (1 + |v_j|)^alpha`.
pub fn collision_frequency(
    spec: &CollisionKernelSpec,
    quad: &VelocityQuadrature,
) -> (Vec<f64>, f64) {
    let n = quad.len();
    let mut nu = vec![0.0f64; n];
    for j in 0..n {
        let vj = quad.node(j);
        let mut acc = 0.0;
        for k in 0..n {
            let vk = quad.node(k);
            let dx = vk[0] - vj[0];
            let dy = vk[1] - vj[1];
            let r = (dx * dx + dy * dy).sqrt();
            let mut angular = 0.0;
            for w in quad.omegas() {
                let cos_theta = if r > 0.0 {
                    (dx * w[0] + dy * w[1]) / r
                } else {
                    0.0
                };
                angular += spec.eval(r, cos_theta);
            }
            acc += angular * quad.mu(k);
        }
        nu[j] = acc * quad.weight() * quad.d_omega();
    }
    let empirical_m1 = nu
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let n = quad.node(j);
            let speed = (n[0] * n[0] + n[1] * n[1]).sqrt();
            v / (1.0 + speed).powf(spec.alpha)
        })
        .fold(f64::INFINITY, f64::min);
    (nu, empirical_m1)
}

/// Pointwise check of the kernel envelope
/// `B(|v - v*|, omega) <= M2 |v - v*|^beta` over every node pair and
/// deflection direction (the two-dimensional deflection-distance factor is
/// identically one).
pub fn check_envelope(spec: &CollisionKernelSpec, quad: &VelocityQuadrature) -> bool {
    let n = quad.len();
    for j in 0..n {
        let vj = quad.node(j);
        for k in 0..n {
            if k == j {
                continue;
            }
            let vk = quad.node(k);
            let dx = vk[0] - vj[0];
            let dy = vk[1] - vj[1];
            let r = (dx * dx + dy * dy).sqrt();
            let envelope = spec.m2 * r.powf(spec.beta);
            for w in quad.omegas() {
                let cos_theta = (dx * w[0] + dy * w[1]) / r;
                if spec.eval(r, cos_theta) > envelope * (1.0 + 1e-12) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_maxwellian_values() {
        assert!((standard_maxwellian([0.0, 0.0]) - 1.0 / TWO_PI).abs() < 1e-15);
        let p = MaxwellianParams::new(1.0, [0.0, 0.0], 1.0).unwrap();
        for v in [[0.3, -1.2], [2.0, 0.5]] {
            assert!((maxwellian(v, &p) - standard_maxwellian(v)).abs() < 1e-15);
            let neg = [-v[0], -v[1]];
            assert!((standard_maxwellian(v) - standard_maxwellian(neg)).abs() < 1e-15);
        }
        assert!(MaxwellianParams::new(-1.0, [0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn default_quadrature_captures_the_maxwellian_mass() {
        let quad = VelocityQuadrature::default_desk().unwrap();
        assert_eq!(quad.len(), 576);
        assert!((quad.maxwellian_mass() - 1.0).abs() < 1e-3);
        // The mid-point rule on a Gaussian is far better than the hard gate.
        assert!((quad.maxwellian_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_is_symmetric_under_velocity_reflection() {
        let quad = VelocityQuadrature::new(4.0, 0.5, 8).unwrap();
        for j in 0..quad.len() {
            let v = quad.node(j);
            let neg = [-v[0], -v[1]];
            assert!(
                quad.nodes()
                    .iter()
                    .any(|n| (n[0] - neg[0]).abs() < 1e-12 && (n[1] - neg[1]).abs() < 1e-12),
                "missing mirror of node {j}"
            );
        }
    }

    #[test]
    fn bilinear_stencil_reproduces_bilinear_functions() {
        let quad = VelocityQuadrature::new(4.0, 0.5, 4).unwrap();
        let f = |v: [f64; 2]| 1.3 - 0.7 * v[0] + 0.2 * v[1] + 0.9 * v[0] * v[1];
        for v in [[0.1, 0.3], [-1.2, 0.7], [3.6, -3.6], [0.0, 0.0]] {
            let stencil = quad.locate(v).expect("interior point");
            let total: f64 = stencil.iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let interp: f64 = stencil.iter().map(|&(j, w)| w * f(quad.node(j))).sum();
            assert!((interp - f(v)).abs() < 1e-12, "at {v:?}");
        }
        // Outside the hull of cell centers there is no stencil.
        assert!(quad.locate([3.9, 0.0]).is_none());
        assert!(quad.locate([0.0, -4.0]).is_none());
    }

    #[test]
    fn unit_kernel_collision_frequency_is_the_circle_measure() {
        let spec = CollisionKernelSpec::power_law(0.5, 0.0).unwrap();
        let quad = VelocityQuadrature::default_desk().unwrap();
        let (nu, _) = collision_frequency(&spec, &quad);
        for v in &nu {
            assert!((v - TWO_PI).abs() < 1e-6, "nu = {v}");
        }
    }

    #[test]
    fn hard_kernel_frequency_grows_with_speed() {
        let spec = CollisionKernelSpec::power_law(0.5, 0.5).unwrap();
        let quad = VelocityQuadrature::default_desk().unwrap();
        let (nu, m1) = collision_frequency(&spec, &quad);
        assert!(m1 > 0.0, "empirical floor {m1}");
        let center = quad
            .nodes()
            .iter()
            .position(|n| n[0].abs() < 0.3 && n[1].abs() < 0.3)
            .unwrap();
        let corner = 0; // (-5.75, -5.75), the fastest node
        assert!(nu[corner] > nu[center]);
    }

    #[test]
    fn soft_kernel_frequency_has_a_weighted_floor() {
        let spec = CollisionKernelSpec::power_law(-0.5, -0.5).unwrap();
        let quad = VelocityQuadrature::default_desk().unwrap();
        let (nu, m1) = collision_frequency(&spec, &quad);
        assert!(nu.iter().all(|v| *v > 0.0));
        // nu (1 + |v|)^(1/2) bounded below away from zero.
        assert!(m1 > 0.05, "weighted floor {m1}");
    }

    #[test]
    fn kernel_envelope_check_accepts_defaults_and_rejects_inflation() {
        let quad = VelocityQuadrature::new(4.5, 0.75, 8).unwrap();
        let hard = CollisionKernelSpec::power_law(0.5, 0.5).unwrap();
        assert!(check_envelope(&hard, &quad));
        let doubled = hard.with_scale(2.0);
        assert!(!check_envelope(&doubled, &quad));
        let angular = CollisionKernelSpec::angular_weighted(0.5, 0.5).unwrap();
        assert!(check_envelope(&angular, &quad));
    }

    #[test]
    fn kernel_exponent_constraints_are_enforced() {
        assert!(CollisionKernelSpec::power_law(-1.2, -0.5).is_err());
        assert!(CollisionKernelSpec::power_law(0.0, 1.0).is_err());
        assert!(CollisionKernelSpec::power_law(0.5, -1.1).is_err());
        assert!(CollisionKernelSpec::power_law(0.5, 0.5).unwrap().is_hard());
        assert!(CollisionKernelSpec::power_law(-0.5, -0.5).unwrap().is_soft());
    }

    #[test]
    fn coincidence_value_follows_the_continuity_grade() {
        let hard = CollisionKernelSpec::power_law(0.5, 0.5).unwrap();
        assert_eq!(hard.eval(0.0, 0.3), 0.0);
        let neutral = CollisionKernelSpec::power_law(0.5, 0.0).unwrap();
        assert_eq!(neutral.eval(0.0, 0.3), 1.0);
        let soft = CollisionKernelSpec::power_law(-0.5, -0.5).unwrap();
        assert_eq!(soft.eval(0.0, 0.3), 0.0);
        assert!(soft.eval(2.0, 0.0) > 0.0);
    }
}
