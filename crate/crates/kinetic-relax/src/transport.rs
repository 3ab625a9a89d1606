//! Velocity-averaged relaxation transport on the torus.
//!
//! A density `f(t, x, v)` over `T^d x V` (finite velocity grid, unit total
//! weight) advects freely and relaxes towards its velocity average:
//!
//! ```text
//!     df/dt + v . grad_x f = sigma(x) (fbar - f)           (plain)
//!     df/dt + v . grad_x f = K (fbar - f),                 (weak)
//!         K = sigma (1 - Laplacian_x)^(-eps) sigma
//! ```
//!
//! with `fbar(t, x)` the weighted velocity average. The weak variant damps
//! high spatial modes only through the inverse-Bessel weight, so its decay
//! degrades from exponential to polynomial; both conserve total mass and
//! dissipate the squared distance to the global equilibrium.
//!
//! Steps are Strang splits of exact sub-flows. The plain relaxation acts
//! pointwise on the collocation grid; the weak damping acts per velocity
//! node on the deviation from `fbar` through one Hermitian matrix
//! exponential over the spatial modes ([`DampingMatrix`]). Observability
//! integrals evaluate the same dissipation functionals along the *free*
//! flow, and [`unit_sigma_asymptote`] provides the phase-averaged long-time
//! limit they approach for the unit cross-section.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::analysis::{fit_polynomial, EnergyTrace};
use crate::error::{Error, Result};
use crate::flows;
use crate::sigma::{self, CrossSection};
use crate::spectral::{KineticState, TorusSpectrum, VelocityGrid};

/// Model parameters: velocity grid (unit measure), cross-section, and the
/// fractional damping order (`epsilon = 0` selects the plain model).
#[derive(Debug, Clone)]
pub struct TransportConfig {
    grid: Arc<VelocityGrid>,
    sigma: CrossSection,
    epsilon: f64,
}

impl TransportConfig {
    pub fn new(grid: Arc<VelocityGrid>, sigma: CrossSection, epsilon: f64) -> Result<Self> {
        if grid.dim() != sigma.dim() {
            return Err(Error::InvalidInput(
                "velocity grid and cross-section dimensions must match".into(),
            ));
        }
        if !grid.is_unit_measure() {
            return Err(Error::InvalidInput(
                "transport needs a unit-measure velocity grid".into(),
            ));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidInput("epsilon must be finite and >= 0".into()));
        }
        Ok(TransportConfig {
            grid,
            sigma,
            epsilon,
        })
    }

    /// The default velocity domain `[-1/2, 1/2]^dim` with a uniform
    /// inclusive grid of `per_axis` nodes per axis.
    pub fn default_grid(dim: usize, per_axis: usize) -> Result<Arc<VelocityGrid>> {
        Ok(Arc::new(VelocityGrid::uniform_symmetric(dim, per_axis, 0.5)?))
    }

    pub fn grid(&self) -> &Arc<VelocityGrid> {
        &self.grid
    }

    pub fn sigma(&self) -> &CrossSection {
        &self.sigma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn cutoff(&self) -> usize {
        self.sigma.cutoff()
    }

    fn check_state(&self, f: &KineticState) -> Result<()> {
        if f.dim() != self.dim() || f.cutoff() != self.cutoff() {
            return Err(Error::InvalidInput(
                "state shape does not match the transport configuration".into(),
            ));
        }
        if f.grid().len() != self.grid.len() {
            return Err(Error::InvalidInput(
                "state velocity grid does not match the configuration".into(),
            ));
        }
        Ok(())
    }

    /// Conserved global equilibrium value `sum_j w_j fhat_j(0)`.
    pub fn equilibrium(&self, f: &KineticState) -> f64 {
        f.velocity_average().mean().re
    }

    /// Squared distance to the flat equilibrium:
    /// `sum_j w_j ||f_j - f_inf||^2`.
    pub fn energy(&self, f: &KineticState, f_inf: f64) -> f64 {
        let c = Complex64::new(f_inf, 0.0);
        f.spectra()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let m = s.mean();
                self.grid.weight(j) * (s.l2_norm_sq() - m.norm_sqr() + (m - c).norm_sqr())
            })
            .sum()
    }

    /// Sobolev-weighted deviation energy
    /// `sum_j w_j sum_n (1 + 4 pi^2 |n|^2)^eps |fhat_j(n) - f_inf delta_n|^2`.
    pub fn sobolev_energy(&self, f: &KineticState, f_inf: f64, eps: f64) -> f64 {
        let c = Complex64::new(f_inf, 0.0);
        f.spectra()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let mut dev = s.clone();
                let m = dev.mean();
                dev.set_coeff([0, 0], m - c);
                self.grid.weight(j) * dev.bessel_multiplier(-eps).l2_norm_sq()
            })
            .sum()
    }

    /// Spatial-frequency moment `sum_n |n|^power sum_j w_j |fhat_j(n)|^2`
    /// (the zero mode contributes nothing).
    pub fn frequency_moment(&self, f: &KineticState, power: f64) -> f64 {
        let mut acc = 0.0;
        for (j, s) in f.spectra().iter().enumerate() {
            let w = self.grid.weight(j);
            for (n, c) in s.modes() {
                let nn = (n[0] * n[0] + n[1] * n[1]) as f64;
                if nn > 0.0 {
                    acc += w * nn.powf(power / 2.0) * c.norm_sqr();
                }
            }
        }
        acc
    }

    /// Plain dissipation rate `sum_j w_j integral sigma |f_j - fbar|^2 dx`.
    pub fn dissipation_plain(&self, f: &KineticState) -> f64 {
        let fbar = f.velocity_average();
        f.spectra()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let dev = s.add_scaled(&fbar, -1.0);
                let m = sigma::exact_quadrature_points(&self.sigma, &dev);
                self.grid.weight(j) * sigma::weighted_l2_sq(&self.sigma, &dev, m)
            })
            .sum()
    }

    /// One plain Strang step: half advection, pointwise relaxation of the
    /// velocity deviation by `exp(-sigma(x) dt)`, half advection.
    pub fn step_plain(&self, f: &KineticState, dt: f64) -> Result<KineticState> {
        self.check_state(f)?;
        if self.epsilon != 0.0 {
            return Err(Error::InvalidInput(
                "plain stepping requires epsilon = 0 (use the weak stepper)".into(),
            ));
        }
        let damp: Vec<f64> = self
            .sigma
            .samples()
            .iter()
            .map(|&s| (-s * dt).exp())
            .collect();
        Ok(self.plain_substeps(f, dt, &damp))
    }

    fn plain_substeps(&self, f: &KineticState, dt: f64, damp: &[f64]) -> KineticState {
        let half = f.advect(dt / 2.0);
        let cutoff = half.cutoff();
        let dim = half.dim();
        let node_samples: Vec<Vec<Complex64>> = half
            .spectra()
            .iter()
            .map(|s| s.to_complex_samples())
            .collect();
        let npoints = node_samples[0].len();
        let mut mean = vec![Complex64::new(0.0, 0.0); npoints];
        for (j, samples) in node_samples.iter().enumerate() {
            let w = self.grid.weight(j);
            for (m, &v) in mean.iter_mut().zip(samples) {
                *m += w * v;
            }
        }
        let spectra = node_samples
            .iter()
            .map(|samples| {
                let relaxed: Vec<Complex64> = samples
                    .iter()
                    .zip(&mean)
                    .zip(damp)
                    .map(|((&v, &m), &e)| m + (v - m) * e)
                    .collect();
                TorusSpectrum::from_complex_samples(dim, cutoff, &relaxed)
                    .expect("collocation samples stay well-formed")
            })
            .collect();
        KineticState::new(Arc::clone(&self.grid), spectra).advect(dt / 2.0)
    }

    /// Builds the Fourier-side damping matrix for this configuration.
    pub fn damping_matrix(&self) -> Result<DampingMatrix> {
        DampingMatrix::assemble(&self.sigma, self.epsilon)
    }

    /// One weak Strang step with a pre-assembled [`DampingMatrix`].
    pub fn step_weak(&self, f: &KineticState, b: &DampingMatrix, dt: f64) -> Result<KineticState> {
        self.check_state(f)?;
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(
                "weak stepping requires epsilon > 0".into(),
            ));
        }
        if b.size() != f.spectrum(0).coeffs().len() {
            return Err(Error::InvalidInput(
                "damping matrix size does not match the state band".into(),
            ));
        }
        let half = f.advect(dt / 2.0);
        Ok(b.damp_state(&half, dt).advect(dt / 2.0))
    }

    /// Runs the plain model over `[0, t]`; samples every `sample_every`
    /// steps (and at both ends).
    pub fn evolve_plain(
        &self,
        f0: &KineticState,
        t: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<(KineticState, TransportTrace)> {
        self.check_state(f0)?;
        if self.epsilon != 0.0 {
            return Err(Error::InvalidInput(
                "plain evolution requires epsilon = 0".into(),
            ));
        }
        check_horizon(t, dt)?;
        let damp: Vec<f64> = self
            .sigma
            .samples()
            .iter()
            .map(|&s| (-s * dt).exp())
            .collect();
        self.evolve_with(f0, t, dt, sample_every, |f| self.plain_substeps(f, dt, &damp), None)
    }

    /// Runs the weak model over `[0, t]`; assembles the damping matrix once.
    pub fn evolve_weak(
        &self,
        f0: &KineticState,
        t: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<(KineticState, TransportTrace)> {
        self.check_state(f0)?;
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(
                "weak evolution requires epsilon > 0".into(),
            ));
        }
        check_horizon(t, dt)?;
        let b = self.damping_matrix()?;
        self.evolve_with(
            f0,
            t,
            dt,
            sample_every,
            |f| {
                let half = f.advect(dt / 2.0);
                b.damp_state(&half, dt).advect(dt / 2.0)
            },
            Some(&b),
        )
    }

    fn evolve_with(
        &self,
        f0: &KineticState,
        t: f64,
        dt: f64,
        sample_every: usize,
        step: impl Fn(&KineticState) -> KineticState,
        b: Option<&DampingMatrix>,
    ) -> Result<(KineticState, TransportTrace)> {
        let f_inf = self.equilibrium(f0);
        let every = sample_every.max(1);
        let steps = (t / dt).round().max(1.0) as usize;
        let mut trace = TransportTrace {
            times: Vec::new(),
            energies: Vec::new(),
            dissipation: Vec::new(),
            sobolev: Vec::new(),
            states: Vec::new(),
        };
        let mut f = f0.clone();
        self.record(&f, 0.0, f_inf, b, &mut trace)?;
        for s in 1..=steps {
            f = step(&f);
            if s % every == 0 || s == steps {
                self.record(&f, s as f64 * dt, f_inf, b, &mut trace)?;
            }
        }
        Ok((f, trace))
    }

    fn record(
        &self,
        f: &KineticState,
        time: f64,
        f_inf: f64,
        b: Option<&DampingMatrix>,
        trace: &mut TransportTrace,
    ) -> Result<()> {
        let e = self.energy(f, f_inf);
        if !e.is_finite() {
            return Err(Error::Numerical(format!(
                "transport energy became non-finite at t = {time}"
            )));
        }
        trace.times.push(time);
        trace.energies.push(e);
        trace.dissipation.push(match b {
            Some(b) => b.dissipation(f),
            None => self.dissipation_plain(f),
        });
        trace.sobolev.push(self.sobolev_energy(f, f_inf, self.epsilon));
        trace.states.push(f.clone());
        Ok(())
    }

    /// Time-quadrature of the plain dissipation along the free flow:
    /// `integral_0^T sum_j w_j integral sigma |g_j - gbar|^2 dx dt` with
    /// `g(t) = advect(g0, t)` and `nt` trapezoid subintervals.
    pub fn observability_lhs_plain(
        &self,
        g0: &KineticState,
        t_final: f64,
        nt: usize,
    ) -> Result<f64> {
        self.check_state(g0)?;
        check_quadrature(t_final, nt)?;
        let dt = t_final / nt as f64;
        let mut acc = 0.0;
        for i in 0..=nt {
            let g = g0.advect(i as f64 * dt);
            let w = if i == 0 || i == nt { 0.5 } else { 1.0 };
            acc += w * self.dissipation_plain(&g);
        }
        Ok(acc * dt)
    }

    /// Same quadrature for the weak dissipation `<K g_dev, g_dev>`.
    pub fn observability_lhs_weak(
        &self,
        g0: &KineticState,
        t_final: f64,
        nt: usize,
    ) -> Result<f64> {
        self.check_state(g0)?;
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(
                "weak observability requires epsilon > 0".into(),
            ));
        }
        check_quadrature(t_final, nt)?;
        let b = self.damping_matrix()?;
        let dt = t_final / nt as f64;
        let mut acc = 0.0;
        for i in 0..=nt {
            let g = g0.advect(i as f64 * dt);
            let w = if i == 0 || i == nt { 0.5 } else { 1.0 };
            acc += w * b.dissipation(&g);
        }
        Ok(acc * dt)
    }

    /// Empirical observability constant for the plain model:
    /// `lhs / (T * E_g(0))`.
    pub fn observability_report_plain(
        &self,
        g0: &KineticState,
        t_final: f64,
        nt: usize,
    ) -> Result<ObservabilityReport> {
        let initial_energy = self.energy(g0, self.equilibrium(g0));
        if initial_energy <= 0.0 {
            return Err(Error::InvalidInput(
                "observability constant needs nonzero initial energy".into(),
            ));
        }
        let lhs = self.observability_lhs_plain(g0, t_final, nt)?;
        Ok(ObservabilityReport {
            lhs,
            t_final,
            initial_energy,
            c_emp: lhs / (t_final * initial_energy),
        })
    }
}

fn check_horizon(t: f64, dt: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite() && dt > 0.0 && dt <= t) {
        return Err(Error::InvalidInput("evolution needs 0 < dt <= t".into()));
    }
    Ok(())
}

fn check_quadrature(t_final: f64, nt: usize) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) || nt == 0 {
        return Err(Error::InvalidInput(
            "observability quadrature needs t_final > 0 and nt >= 1".into(),
        ));
    }
    Ok(())
}

/// Sampled history of one transport run. `sobolev` carries the
/// epsilon-weighted deviation energy (equal to `energies` when
/// `epsilon = 0`); `states` holds the sampled distributions for post-hoc
/// sequence analysis.
#[derive(Debug, Clone)]
pub struct TransportTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub sobolev: Vec<f64>,
    pub states: Vec<KineticState>,
}

impl TransportTrace {
    pub fn energy_trace(&self) -> EnergyTrace {
        EnergyTrace::new(self.times.clone(), self.energies.clone())
            .expect("simulation samples are ordered")
            .with_dissipation(self.dissipation.clone())
            .expect("matching series lengths")
    }
}

/// Observability integral with its empirical constant.
#[derive(Debug, Clone, Copy)]
pub struct ObservabilityReport {
    pub lhs: f64,
    pub t_final: f64,
    pub initial_energy: f64,
    pub c_emp: f64,
}

/// The spatial part of the weak damping operator on the Fourier band:
/// `B = S M_eps S` with `S` the (band-truncated, Hermitian) convolution by
/// sigma and `M_eps` the diagonal inverse-Bessel weight
/// `(1 + 4 pi^2 |n|^2)^(-eps)`.
///
/// The full damping operator acts as `B` on the deviation from the velocity
/// average and as zero on the average itself; [`damp_state`]
/// (Self::damp_state) implements exactly that split, so the velocity
/// average — in particular any equilibrium — is fixed exactly.
#[derive(Debug, Clone)]
pub struct DampingMatrix {
    epsilon: f64,
    matrix: DMatrix<Complex64>,
    basis: DMatrix<Complex64>,
    eigs: DVector<f64>,
}

impl DampingMatrix {
    pub fn assemble(sigma: &CrossSection, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidInput("epsilon must be finite and >= 0".into()));
        }
        let probe = TorusSpectrum::zeros(sigma.dim(), sigma.cutoff());
        let modes: Vec<[i64; 2]> = probe.modes().map(|(n, _)| n).collect();
        let m = modes.len();
        let s = DMatrix::from_fn(m, m, |p, q| {
            sigma.fourier([modes[p][0] - modes[q][0], modes[p][1] - modes[q][1]])
        });
        let weights: Vec<f64> = modes
            .iter()
            .map(|n| {
                let nn = (n[0] * n[0] + n[1] * n[1]) as f64;
                (1.0 + 4.0 * std::f64::consts::PI * std::f64::consts::PI * nn).powf(-epsilon)
            })
            .collect();
        let scaled = DMatrix::from_fn(m, m, |p, q| s[(p, q)] * weights[p]);
        let b = &s * scaled;
        let scale = 1.0 + b.norm();
        let mut defect = 0.0_f64;
        for p in 0..m {
            for q in 0..m {
                defect = defect.max((b[(p, q)] - b[(q, p)].conj()).norm());
            }
        }
        if defect > 1e-10 * scale {
            return Err(Error::Numerical(format!(
                "damping matrix lost Hermitian symmetry (defect {defect:.3e})"
            )));
        }
        let b = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = b.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.min();
        if min_eig < -1e-10 * scale {
            return Err(Error::Numerical(format!(
                "damping matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(DampingMatrix {
            epsilon,
            matrix: b,
            basis: eig.eigenvectors,
            eigs: eig.eigenvalues.map(|l| l.max(0.0)),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `<B x, x>` (real by Hermitian symmetry).
    pub fn quadratic_form(&self, x: &DVector<Complex64>) -> f64 {
        x.dotc(&(&self.matrix * x)).re
    }

    /// `exp(-tau B) x` through the cached eigenbasis.
    pub fn exp_apply(&self, tau: f64, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut y = self.basis.adjoint() * x;
        for (i, v) in y.iter_mut().enumerate() {
            *v *= (-self.eigs[i] * tau).exp();
        }
        &self.basis * y
    }

    /// Applies `exp(-dt B)` to the deviation of every node from the
    /// velocity average; the average itself is untouched.
    pub fn damp_state(&self, f: &KineticState, dt: f64) -> KineticState {
        let fbar = f.velocity_average();
        let spectra = f
            .spectra()
            .iter()
            .map(|s| {
                let dev = s.add_scaled(&fbar, -1.0);
                let x = DVector::from_column_slice(dev.coeffs());
                let damped = self.exp_apply(dt, &x);
                let mut out = fbar.clone();
                for (c, d) in out.coeffs_mut().iter_mut().zip(damped.iter()) {
                    *c += d;
                }
                out
            })
            .collect();
        KineticState::new(Arc::clone(f.grid()), spectra)
    }

    /// Weak dissipation rate `sum_j w_j <B (f_j - fbar), (f_j - fbar)>`.
    pub fn dissipation(&self, f: &KineticState) -> f64 {
        let fbar = f.velocity_average();
        f.spectra()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let dev = s.add_scaled(&fbar, -1.0);
                let x = DVector::from_column_slice(dev.coeffs());
                f.grid().weight(j) * self.quadratic_form(&x)
            })
            .sum()
    }
}

/// Long-time average of the unit-cross-section dissipation along the free
/// flow, `lim_(T -> inf) (1/T) integral_0^T sum_j w_j ||g_j - gbar||^2 dt`:
/// phases `exp(-i 2 pi n.v_j t)` average out except between nodes sharing
/// the same frequency `n . v_j`, which are grouped exactly.
pub fn unit_sigma_asymptote(g0: &KineticState) -> f64 {
    grouped_asymptote(g0, |_| 1.0)
}

/// Same long-time average with a per-mode spectral weight (e.g. the
/// inverse-Bessel weight of the weak model for constant sigma).
pub fn weighted_asymptote(g0: &KineticState, weight: impl Fn([i64; 2]) -> f64) -> f64 {
    grouped_asymptote(g0, weight)
}

fn grouped_asymptote(g0: &KineticState, weight: impl Fn([i64; 2]) -> f64) -> f64 {
    let grid = g0.grid();
    let probe = g0.spectrum(0);
    let mut total = 0.0;
    for (n, _) in probe.modes() {
        // Per mode: sum_j w_j |A_nj|^2 minus the persistent part of
        // |sum_j w_j A_nj exp(-i 2 pi (n.v_j) t)|^2.
        let mut second_moment = 0.0;
        let mut keyed: Vec<(f64, Complex64)> = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let w = grid.weight(j);
            let a = g0.spectrum(j).coeff(n);
            second_moment += w * a.norm_sqr();
            let v = grid.node(j);
            keyed.push((n[0] as f64 * v[0] + n[1] as f64 * v[1], w * a));
        }
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies"));
        let mut persistent = 0.0;
        let mut i = 0;
        while i < keyed.len() {
            let mut sum = keyed[i].1;
            let mut k = i + 1;
            while k < keyed.len() && keyed[k].0 - keyed[k - 1].0 <= 1e-9 {
                sum += keyed[k].1;
                k += 1;
            }
            persistent += sum.norm_sqr();
            i = k;
        }
        total += weight(n) * (second_moment - persistent);
    }
    total
}

/// Fits the growth degree of a Sobolev-norm series against `log(1 + t)`;
/// passes when the degree is at most `1.1` (at most linear growth, with
/// slack for fit noise).
pub fn sobolev_growth_check(times: &[f64], sobolev_sq: &[f64]) -> Result<(f64, bool)> {
    let trace = EnergyTrace::new(times.to_vec(), sobolev_sq.to_vec())?;
    let window = (times[0], times[times.len() - 1]);
    let fit = fit_polynomial(&trace, window)?;
    let degree = -fit.rate;
    Ok((degree, degree <= 1.1))
}

/// Result of the windowed decay iteration for the weak model.
#[derive(Debug, Clone, Copy)]
pub struct JensenReport {
    /// Implied polynomial decay order `k1 / k3`.
    pub poly_order: f64,
    /// Smallest `C > 0` for which
    /// `H(lT) - C H(lT) (H(lT) / (l T C))^(k3/k1) >= H((l+1)T)` holds on
    /// every usable window.
    pub recurrence_constant: f64,
    /// Smallest `C` with `M(lT) <= l T C` along the supplied moment series.
    pub moment_constant: f64,
    /// Envelope constant from the recurrence sequence bound.
    pub ammari_constant: f64,
    /// Number of windows the recurrence was verified on.
    pub windows_used: usize,
}

/// Verifies the polynomial-decay window recurrence along a sampled energy
/// sequence `h[l] = H(l T)` with frequency-moment series `m[l]`.
///
/// The exponents must satisfy `k1, k2, k3 > 0`, `-2 eps k1 + k2 k3 > 0`
/// and `k2 < eps`; these force `k3 > 2 k1`, so the recurrence exponent
/// `r = k3 / k1` exceeds two and a finite fitted constant exists whenever
/// the sequence strictly decreases. The rescaled sequence
/// `E_l = h[l] / (l T C)` is then certified against the sequence bound
/// `E_(l+1) <= E_l - C E_(l+1)^(1+r)`, yielding the envelope
/// `E_l <= M (l+1)^(-k1/k3)`.
pub fn jensen_iteration(
    h_values: &[f64],
    m_values: &[f64],
    t_step: f64,
    epsilon: f64,
    k1: f64,
    k2: f64,
    k3: f64,
) -> Result<JensenReport> {
    if !(k1 > 0.0 && k2 > 0.0 && k3 > 0.0) {
        return Err(Error::validation("k", "exponents must be positive"));
    }
    if -2.0 * epsilon * k1 + k2 * k3 <= 0.0 {
        return Err(Error::validation(
            "k",
            "exponents must satisfy -2 eps k1 + k2 k3 > 0",
        ));
    }
    if k2 >= epsilon {
        return Err(Error::validation("k2", "must be smaller than epsilon"));
    }
    if h_values.len() != m_values.len() {
        return Err(Error::InvalidInput(
            "energy and moment series must have equal length".into(),
        ));
    }
    if m_values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(
            "moment series must be finite and nonnegative".into(),
        ));
    }

    let recurrence = flows::window_recurrence(h_values, t_step, k3 / k1)?;
    let mut moment_constant = 0.0_f64;
    for l in 1..recurrence.windows_used {
        let lt = l as f64 * t_step;
        moment_constant = moment_constant.max(m_values[l] / lt);
    }

    Ok(JensenReport {
        poly_order: k1 / k3,
        recurrence_constant: recurrence.constant,
        moment_constant,
        ammari_constant: recurrence.ammari_constant,
        windows_used: recurrence.windows_used,
    })
}
