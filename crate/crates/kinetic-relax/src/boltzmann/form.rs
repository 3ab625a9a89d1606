//! Assembly of the linearized-collision Dirichlet form.
//!
//! The quadratic form is assembled in the fluctuation variables
//! `phi = f / sqrt(mu)`: for every ordered node pair `(v_j, v_k)` and every
//! deflection direction `omega` the post-collision pair
//! `v' = v + ((v* - v) . omega) omega`, `v*' = v* - ((v* - v) . omega) omega`
//! is formed, off-grid values of `phi` are filled in by bilinear
//! interpolation, and the square of the collision bracket
//! `phi(v*') + phi(v') - phi(v*) - phi(v)` is accumulated with weight
//! `(1/4) h^4 d_omega B mu_j mu_k`. The result is a symmetric
//! positive-semidefinite matrix `Q` with `D(f) = f^T Q f` and the collision
//! generator `L = -Q / h^2` in the cell-weighted inner product, so that the
//! squared norm decays as `dH/dt = -2 D(f)`.
//!
//! Interpolating `phi` rather than `f` makes the brackets of the constant,
//! `v_x`, and `v_y` fluctuations vanish identically (bilinear interpolation
//! reproduces bilinear functions), so three of the four collision invariants
//! sit in the kernel of `Q` exactly; the energy invariant leaks only the
//! `O(h^2)` interpolation error of `|v|^2`.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::KineticState;

use super::quadrature::{collision_frequency, CollisionKernelSpec, VelocityQuadrature};

/// Number of row blocks in the parallel assembly. Fixed independently of the
/// thread count so the floating-point reduction order (and therefore the
/// output bytes) never depends on available parallelism.
const ASSEMBLY_BLOCKS: usize = 16;

/// Sparse collision bracket: at most ten `(node, coefficient)` pairs
/// (two four-point interpolation stencils plus the two on-grid nodes).
type Bracket = ([(usize, f64); 10], usize);

struct BucketAssembly {
    grams: Vec<DMatrix<f64>>,
    dropped: f64,
    total: f64,
}

/// Accumulates one Gram matrix per kernel bucket in a single traversal of
/// the `(j, k, omega)` terms, so bucketed assemblies are exact term-level
/// partitions of the full one. Terms whose post-collision points leave the
/// grid hull are dropped whole and their measure recorded.
fn assemble_buckets(
    spec: &CollisionKernelSpec,
    quad: &VelocityQuadrature,
    n_buckets: usize,
    bucket_of: &(dyn Fn(f64) -> usize + Sync),
) -> BucketAssembly {
    let n = quad.len();
    let rows_per_block = n.div_ceil(ASSEMBLY_BLOCKS);
    let blocks: Vec<(usize, usize)> = (0..ASSEMBLY_BLOCKS)
        .map(|b| (b * rows_per_block, ((b + 1) * rows_per_block).min(n)))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let partials: Vec<BucketAssembly> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut grams = vec![DMatrix::<f64>::zeros(n, n); n_buckets];
            let mut dropped = 0.0;
            let mut total = 0.0;
            let base = 0.25 * quad.weight() * quad.weight() * quad.d_omega();
            for j in lo..hi {
                let vj = quad.node(j);
                let mu_j = quad.mu(j);
                for k in 0..n {
                    if k == j {
                        // Coincident pair: the bracket vanishes identically
                        // and the singular soft kernel is graded to zero.
                        continue;
                    }
                    let vk = quad.node(k);
                    let dx = vk[0] - vj[0];
                    let dy = vk[1] - vj[1];
                    let r = (dx * dx + dy * dy).sqrt();
                    let bucket = bucket_of(r);
                    let pair_weight = base * mu_j * quad.mu(k);
                    for omega in quad.omegas() {
                        let cos_theta = (dx * omega[0] + dy * omega[1]) / r;
                        let kernel = spec.eval(r, cos_theta);
                        if kernel == 0.0 {
                            continue;
                        }
                        let coeff = pair_weight * kernel;
                        total += coeff;
                        let dot = dx * omega[0] + dy * omega[1];
                        let v_post = [vj[0] + dot * omega[0], vj[1] + dot * omega[1]];
                        let v_star_post = [vk[0] - dot * omega[0], vk[1] - dot * omega[1]];
                        let (sa, sb) = match (quad.locate(v_post), quad.locate(v_star_post)) {
                            (Some(a), Some(b)) => (a, b),
                            _ => {
                                dropped += coeff;
                                continue;
                            }
                        };
                        // Combine duplicate node indices (overlapping
                        // stencils) so each matrix entry receives exactly
                        // one contribution per term; together with the
                        // commutative product below this makes the
                        // assembled matrix symmetric to the last bit.
                        let mut bracket: Bracket = ([(0, 0.0); 10], 0);
                        let push = |bracket: &mut Bracket, m: usize, w: f64| {
                            for slot in bracket.0[..bracket.1].iter_mut() {
                                if slot.0 == m {
                                    slot.1 += w;
                                    return;
                                }
                            }
                            bracket.0[bracket.1] = (m, w);
                            bracket.1 += 1;
                        };
                        for (m, w) in sa.iter().chain(sb.iter()) {
                            push(&mut bracket, *m, w / quad.sqrt_mu(*m));
                        }
                        push(&mut bracket, k, -1.0 / quad.sqrt_mu(k));
                        push(&mut bracket, j, -1.0 / quad.sqrt_mu(j));
                        let gram = &mut grams[bucket];
                        let entries = &bracket.0[..bracket.1];
                        for &(p, a) in entries {
                            for &(q, b) in entries {
                                gram[(p, q)] += coeff * (a * b);
                            }
                        }
                    }
                }
            }
            BucketAssembly {
                grams,
                dropped,
                total,
            }
        })
        .collect();

    let mut out = BucketAssembly {
        grams: vec![DMatrix::<f64>::zeros(n, n); n_buckets],
        dropped: 0.0,
        total: 0.0,
    };
    for part in partials {
        for (acc, gram) in out.grams.iter_mut().zip(part.grams) {
            *acc += gram;
        }
        out.dropped += part.dropped;
        out.total += part.total;
    }
    out
}

/// The assembled linearized collision operator: the Dirichlet matrix `Q`,
/// its eigendecomposition (for exact semigroup substeps), the collision
/// frequencies, and the collision-invariant subspace.
#[derive(Debug)]
pub struct LinearizedOperator {
    quad: Arc<VelocityQuadrature>,
    spec: CollisionKernelSpec,
    q: DMatrix<f64>,
    basis: DMatrix<f64>,
    eigs: DVector<f64>,
    min_eigenvalue: f64,
    nu: Vec<f64>,
    empirical_m1: f64,
    dropped_fraction: f64,
    invariants: InvariantBasis,
}

/// Assembles the Dirichlet form of the linearized collision operator on the
/// given quadrature and eigendecomposes it. Fails when the dropped-measure
/// fraction exceeds one part in a thousand or the matrix is not
/// positive-semidefinite to roundoff.
pub fn assemble_dirichlet_form(
    spec: &CollisionKernelSpec,
    quad: Arc<VelocityQuadrature>,
) -> Result<LinearizedOperator> {
    let assembly = assemble_buckets(spec, &quad, 1, &|_| 0);
    let q = assembly.grams.into_iter().next().expect("one bucket");
    let dropped_fraction = if assembly.total > 0.0 {
        assembly.dropped / assembly.total
    } else {
        0.0
    };
    if dropped_fraction >= 1e-3 {
        return Err(Error::Numerical(format!(
            "dropped collision measure fraction {dropped_fraction:.2e} exceeds 1e-3; \
             enlarge the velocity box"
        )));
    }
    let eigen = q.clone().symmetric_eigen();
    let min_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0f64, |a, b| a.max(b.abs()));
    if min_eigenvalue < -1e-10 * (1.0 + scale) {
        return Err(Error::Numerical(format!(
            "Dirichlet matrix has eigenvalue {min_eigenvalue:.3e}; not positive-semidefinite"
        )));
    }
    let eigs = eigen.eigenvalues.map(|l| l.max(0.0));
    let (nu, empirical_m1) = collision_frequency(spec, &quad);
    let invariants = InvariantBasis::new(&quad);
    Ok(LinearizedOperator {
        quad,
        spec: *spec,
        q,
        basis: eigen.eigenvectors,
        eigs,
        min_eigenvalue,
        nu,
        empirical_m1,
        dropped_fraction,
        invariants,
    })
}

impl LinearizedOperator {
    pub fn quadrature(&self) -> &Arc<VelocityQuadrature> {
        &self.quad
    }

    pub fn kernel_spec(&self) -> &CollisionKernelSpec {
        &self.spec
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Most negative raw eigenvalue of `Q` (diagnostic; the applied spectrum
    /// is floored at zero).
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigs
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// `min_j nu(v_j) / (1 + |v_j|)^alpha`, the measured lower constant of
    /// the collision-frequency envelope.
    pub fn empirical_m1(&self) -> f64 {
        self.empirical_m1
    }

    pub fn dropped_fraction(&self) -> f64 {
        self.dropped_fraction
    }

    pub fn invariants(&self) -> &InvariantBasis {
        &self.invariants
    }

    /// Dirichlet form `D(f) = f^T Q f` of a real velocity profile.
    pub fn dirichlet_real(&self, f: &DVector<f64>) -> f64 {
        f.dot(&(&self.q * f))
    }

    /// Dirichlet form summed over the real and imaginary parts of the
    /// columns of a packed profile matrix (velocity nodes by components).
    pub fn dirichlet_packed(&self, packed: &DMatrix<f64>) -> f64 {
        let image = &self.q * packed;
        packed.iter().zip(image.iter()).map(|(a, b)| a * b).sum()
    }

    /// Total Dirichlet form of a kinetic state (summed over spatial modes).
    pub fn dissipation(&self, state: &KineticState) -> f64 {
        self.dirichlet_packed(&pack_state(state))
    }

    /// Rayleigh quotient `D(f) / |f|_W^2` of a real velocity profile.
    pub fn rayleigh_quotient(&self, f: &DVector<f64>) -> f64 {
        let norm = self.quad.weight() * f.norm_squared();
        self.dirichlet_real(f) / norm
    }

    /// Diagonal factors of `exp(dt L)` in the eigenbasis of `Q`, with
    /// `L = -Q / h^2`.
    pub fn semigroup_factors(&self, dt: f64) -> DVector<f64> {
        let h2 = self.quad.weight();
        self.eigs.map(|l| (-dt * l / h2).exp())
    }

    /// Applies `exp(dt L)` to every spatial mode of the state.
    pub fn collision_step(&self, state: &mut KineticState, dt: f64) {
        let factors = self.semigroup_factors(dt);
        let packed = pack_state(state);
        let mut spectral = self.basis.tr_mul(&packed);
        for (i, f) in factors.iter().enumerate() {
            spectral.row_mut(i).scale_mut(*f);
        }
        let evolved = &self.basis * spectral;
        unpack_state(state, &evolved);
    }
}

/// Packs a kinetic state into a real matrix: one row per velocity node, two
/// columns (real, imaginary) per spatial mode. Lets the collision substep
/// run as two dense matrix products.
pub(super) fn pack_state(state: &KineticState) -> DMatrix<f64> {
    let nv = state.grid().len();
    let nm = state.spectrum(0).coeffs().len();
    let mut packed = DMatrix::<f64>::zeros(nv, 2 * nm);
    for j in 0..nv {
        for (i, c) in state.spectrum(j).coeffs().iter().enumerate() {
            packed[(j, 2 * i)] = c.re;
            packed[(j, 2 * i + 1)] = c.im;
        }
    }
    packed
}

pub(super) fn unpack_state(state: &mut KineticState, packed: &DMatrix<f64>) {
    let nv = state.grid().len();
    for j in 0..nv {
        let coeffs = state.spectrum_mut(j).coeffs_mut();
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = Complex::new(packed[(j, 2 * i)], packed[(j, 2 * i + 1)]);
        }
    }
}

/// Splitting of the collision operator at relative speed `1 / epsilon`:
/// `q_near` collects the kernel on `|v - v*| <= 1/epsilon` (bounded part),
/// `q_far` the remainder. `c1` bounds the square root of the near part on
/// the plain cell-weighted space; `c2` bounds the square root of the far
/// part from the `(1 + |v|)^(alpha/2)`-weighted space, and is the constant
/// expected to vanish as `epsilon` shrinks for soft kernels.
#[derive(Debug)]
pub struct EpsilonSplit {
    pub epsilon: f64,
    pub q_near: DMatrix<f64>,
    pub q_far: DMatrix<f64>,
    pub c1: f64,
    pub c2: f64,
    pub dropped_fraction: f64,
}

/// Assembles the near/far kernel split at threshold `1 / epsilon` in one
/// traversal, so every collision term lands in exactly one of the two parts.
pub fn epsilon_split(
    spec: &CollisionKernelSpec,
    quad: &VelocityQuadrature,
    epsilon: f64,
) -> Result<EpsilonSplit> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let threshold = 1.0 / epsilon;
    let assembly = assemble_buckets(spec, quad, 2, &move |r| usize::from(r > threshold));
    let mut grams = assembly.grams.into_iter();
    let q_near = grams.next().expect("near bucket");
    let q_far = grams.next().expect("far bucket");
    let h2 = quad.weight();
    let c1 = (lambda_max(&q_near) / h2).max(0.0).sqrt();
    // Conjugate the far part by the weight (1 + |v|)^(alpha/2) and the cell
    // measure, then take the top of its spectrum.
    let weights: Vec<f64> = quad
        .nodes()
        .iter()
        .map(|v| {
            let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
            (h2 * (1.0 + speed).powf(spec.alpha)).sqrt()
        })
        .collect();
    let n = quad.len();
    let mut conjugated = q_far.clone();
    for p in 0..n {
        for q in 0..n {
            conjugated[(p, q)] /= weights[p] * weights[q];
        }
    }
    let c2 = lambda_max(&conjugated).max(0.0).sqrt();
    let dropped_fraction = if assembly.total > 0.0 {
        assembly.dropped / assembly.total
    } else {
        0.0
    };
    Ok(EpsilonSplit {
        epsilon,
        q_near,
        q_far,
        c1,
        c2,
        dropped_fraction,
    })
}

impl EpsilonSplit {
    /// Largest entry of `q_near + q_far - q_full` relative to the largest
    /// entry of `q_full`. The split is a term-level partition, so this is
    /// pure floating-point regrouping noise.
    pub fn partition_defect(&self, q_full: &DMatrix<f64>) -> f64 {
        let scale = q_full.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
        let mut worst = 0.0f64;
        for p in 0..q_full.nrows() {
            for q in 0..q_full.ncols() {
                let diff = self.q_near[(p, q)] + self.q_far[(p, q)] - q_full[(p, q)];
                worst = worst.max(diff.abs());
            }
        }
        worst / scale
    }
}

/// Largest eigenvalue of a symmetric positive-semidefinite matrix by power
/// iteration with a fixed starting vector (deterministic, no factorization).
fn lambda_max(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut x = DVector::<f64>::from_fn(n, |i, _| (i as f64 + 0.5).sin());
    let norm = x.norm();
    x /= norm;
    let mut lambda = 0.0f64;
    for _ in 0..5000 {
        let y = m * &x;
        let next = x.dot(&y);
        let ynorm = y.norm();
        if ynorm <= 1e-300 {
            return 0.0;
        }
        x = y / ynorm;
        if (next - lambda).abs() <= 1e-13 * next.abs().max(1e-300) {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Orthonormal basis (in the cell-weighted inner product) of the collision
/// invariants: the Maxwellian-weighted moments `1, v_x, v_y, |v|^2`.
#[derive(Debug)]
pub struct InvariantBasis {
    weight: f64,
    vectors: Vec<DVector<f64>>,
}

impl InvariantBasis {
    /// The four raw invariant profiles `sqrt(mu) * (1, v_x, v_y, |v|^2)`.
    pub fn raw_profiles(quad: &VelocityQuadrature) -> [DVector<f64>; 4] {
        let n = quad.len();
        let profile = |f: &dyn Fn([f64; 2]) -> f64| {
            DVector::<f64>::from_fn(n, |j, _| f(quad.node(j)) * quad.sqrt_mu(j))
        };
        [
            profile(&|_| 1.0),
            profile(&|v| v[0]),
            profile(&|v| v[1]),
            profile(&|v| v[0] * v[0] + v[1] * v[1]),
        ]
    }

    pub fn new(quad: &VelocityQuadrature) -> Self {
        let weight = quad.weight();
        let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(4);
        for mut candidate in Self::raw_profiles(quad) {
            for prev in &vectors {
                let overlap = weight * prev.dot(&candidate);
                candidate -= prev * overlap;
            }
            let norm = (weight * candidate.norm_squared()).sqrt();
            vectors.push(candidate / norm);
        }
        InvariantBasis { weight, vectors }
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// Largest invariant moment `|<b_i, g>_W|` of a complex profile.
    pub fn moment_defect(&self, profile: &[Complex64]) -> f64 {
        self.vectors
            .iter()
            .map(|b| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (bv, g) in b.iter().zip(profile) {
                    acc += g * *bv;
                }
                (acc * self.weight).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Removes the invariant components of a complex profile in place.
    pub fn project_profile(&self, profile: &mut [Complex64]) {
        for b in &self.vectors {
            let mut overlap = Complex64::new(0.0, 0.0);
            for (bv, g) in b.iter().zip(profile.iter()) {
                overlap += g * *bv;
            }
            overlap *= self.weight;
            for (bv, g) in b.iter().zip(profile.iter_mut()) {
                *g -= overlap * *bv;
            }
        }
    }

    /// Projects every spatial mode of a state onto the orthogonal
    /// complement of the invariants; returns the largest moment found
    /// before projection.
    pub fn project_state(&self, state: &mut KineticState) -> f64 {
        let nv = state.grid().len();
        let nm = state.spectrum(0).coeffs().len();
        let mut worst = 0.0f64;
        let mut column = vec![Complex64::new(0.0, 0.0); nv];
        for i in 0..nm {
            for (j, slot) in column.iter_mut().enumerate() {
                *slot = state.spectrum(j).coeffs()[i];
            }
            worst = worst.max(self.moment_defect(&column));
            self.project_profile(&mut column);
            for (j, slot) in column.iter().enumerate() {
                state.spectrum_mut(j).coeffs_mut()[i] = *slot;
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn small_quad() -> Arc<VelocityQuadrature> {
        Arc::new(VelocityQuadrature::new(4.0, 0.5, 8).unwrap())
    }

    fn hard_spec() -> CollisionKernelSpec {
        CollisionKernelSpec::power_law(0.5, 0.5).unwrap()
    }

    #[test]
    fn dirichlet_matrix_is_symmetric_and_psd() {
        let quad = small_quad();
        let op = assemble_dirichlet_form(&hard_spec(), Arc::clone(&quad)).unwrap();
        let q = op.q();
        for p in 0..q.nrows() {
            for c in (p + 1)..q.ncols() {
                assert_eq!(q[(p, c)], q[(c, p)], "exact symmetry at ({p}, {c})");
            }
        }
        assert!(op.min_eigenvalue() >= -1e-10);
        assert!(op.dropped_fraction() < 1e-3, "dropped {}", op.dropped_fraction());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let f = DVector::<f64>::from_fn(quad.len(), |_, _| rng.gen_range(-1.0..1.0));
            assert!(op.dirichlet_real(&f) >= 0.0);
        }
    }

    #[test]
    fn collision_invariants_sit_in_the_kernel() {
        let quad = small_quad();
        let op = assemble_dirichlet_form(&hard_spec(), Arc::clone(&quad)).unwrap();
        let profiles = InvariantBasis::raw_profiles(&quad);
        // Constant and linear fluctuations are reproduced exactly by the
        // bilinear stencil, so their brackets vanish identically; the
        // assembled quadratic form still carries matvec roundoff.
        for (label, f) in ["mass", "momentum_x", "momentum_y"].iter().zip(&profiles) {
            let quotient = op.rayleigh_quotient(f);
            assert!(quotient.abs() < 1e-12, "{label} quotient {quotient:.3e}");
        }
        // The energy profile leaks only the quadratic interpolation error.
        let energy_quotient = op.rayleigh_quotient(&profiles[3]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut generic = Vec::new();
        for _ in 0..20 {
            let f = DVector::<f64>::from_fn(quad.len(), |_, _| rng.gen_range(-1.0..1.0));
            generic.push(op.rayleigh_quotient(&f));
        }
        generic.sort_by(f64::total_cmp);
        let median = generic[generic.len() / 2];
        assert!(
            energy_quotient < 1e-2 * median,
            "energy {energy_quotient:.3e} vs median {median:.3e}"
        );
    }

    #[test]
    fn kernel_projection_is_idempotent_and_kills_moments() {
        let quad = small_quad();
        let basis = InvariantBasis::new(&quad);
        // W-orthonormality of the constructed basis.
        for (i, a) in basis.vectors().iter().enumerate() {
            for (j, b) in basis.vectors().iter().enumerate() {
                let dot = quad.weight() * a.dot(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "gram ({i}, {j}) = {dot}");
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut profile: Vec<Complex64> = (0..quad.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        basis.project_profile(&mut profile);
        assert!(basis.moment_defect(&profile) < 1e-12);
        let snapshot = profile.clone();
        basis.project_profile(&mut profile);
        let drift: f64 = profile
            .iter()
            .zip(&snapshot)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(drift < 1e-12, "projection moved a projected profile by {drift:.3e}");
    }

    #[test]
    fn epsilon_split_partitions_the_form() {
        let quad = small_quad();
        let spec = CollisionKernelSpec::power_law(-0.5, -0.5).unwrap();
        let op = assemble_dirichlet_form(&spec, Arc::clone(&quad)).unwrap();
        let split = epsilon_split(&spec, &quad, 0.25).unwrap();
        assert!(split.partition_defect(op.q()) < 1e-12);
        // Threshold below the minimal node distance puts everything far.
        let all_far = epsilon_split(&spec, &quad, 4.0).unwrap();
        let near_mass: f64 = all_far.q_near.iter().map(|v| v.abs()).sum();
        assert_eq!(near_mass, 0.0);
        // Threshold beyond the grid diameter puts everything near.
        let all_near = epsilon_split(&spec, &quad, 0.05).unwrap();
        let far_mass: f64 = all_near.q_far.iter().map(|v| v.abs()).sum();
        assert_eq!(far_mass, 0.0);
        assert_eq!(all_near.c2, 0.0);
    }

    #[test]
    fn far_part_weighted_norm_shrinks_with_epsilon() {
        let quad = small_quad();
        let spec = CollisionKernelSpec::power_law(-0.5, -0.5).unwrap();
        let c2s: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&eps| epsilon_split(&spec, &quad, eps).unwrap().c2)
            .collect();
        assert!(c2s[0] > 0.0);
        assert!(c2s[1] <= c2s[0] * 1.05, "{c2s:?}");
        assert!(c2s[2] <= c2s[1] * 1.05, "{c2s:?}");
    }

    #[test]
    fn power_iteration_matches_the_symmetric_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DMatrix::<f64>::from_fn(40, 40, |_, _| rng.gen_range(-1.0..1.0));
        let psd = &a * a.transpose();
        let exact = psd
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0f64, f64::max);
        let power = lambda_max(&psd);
        assert!((power - exact).abs() < 1e-8 * exact, "{power} vs {exact}");
    }

    #[test]
    fn semigroup_factors_shrink_positive_modes_only() {
        let quad = small_quad();
        let op = assemble_dirichlet_form(&hard_spec(), Arc::clone(&quad)).unwrap();
        let factors = op.semigroup_factors(0.3);
        let mut saw_decay = false;
        for (f, l) in factors.iter().zip(op.eigenvalues().iter()) {
            assert!(*f <= 1.0 + 1e-15);
            if *l > 1e-12 {
                assert!(*f < 1.0);
                saw_decay = true;
            }
        }
        assert!(saw_decay);
    }
}
