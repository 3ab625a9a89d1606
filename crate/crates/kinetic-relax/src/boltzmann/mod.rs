//! Linearized Boltzmann relaxation on the two-dimensional torus.
//!
//! The unknown is the fluctuation of a phase-space density around a global
//! Maxwellian, discretized spectrally in position and on a cell-centered
//! velocity grid. Transport is exact (phase shifts per spatial mode), the
//! collision substep applies the exact semigroup of the assembled linearized
//! operator through its eigendecomposition, and the two are composed by
//! Strang splitting. On top of the dynamics the module provides the
//! free-flow observability functional, the near/far kernel splitting with
//! its operator-norm table, and the windowed decay iteration that certifies
//! polynomial relaxation rates for soft kernels.

mod form;
mod quadrature;

pub use form::{
    assemble_dirichlet_form, epsilon_split, EpsilonSplit, InvariantBasis, LinearizedOperator,
};
pub use quadrature::{
    check_envelope, collision_frequency, maxwellian, standard_maxwellian, CollisionKernelSpec,
    KernelShape, MaxwellianParams, VelocityQuadrature,
};

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{integrate_series, EnergyTrace};
use crate::error::{Error, Result};
use crate::flows;
use crate::spectral::{KineticState, TorusSpectrum};

/// Relative moment size above which initial data counts as unprojected and
/// is pulled back onto the orthogonal complement of the collision
/// invariants before evolving.
const PROJECTION_WARN_TOL: f64 = 1e-9;

/// Sampled history of a Boltzmann relaxation run.
#[derive(Debug, Clone)]
pub struct BoltzmannTrace {
    pub times: Vec<f64>,
    /// Squared phase-space norm `H(t)`.
    pub h_values: Vec<f64>,
    /// Dirichlet form `D(f(t))`; the energy balance is `dH/dt = -2 D`.
    pub dissipation: Vec<f64>,
    /// Sampled states (same instants as `times`).
    pub states: Vec<KineticState>,
    /// Whether the initial state carried visible collision-invariant
    /// moments and was projected before the run.
    pub projected_initial: bool,
    /// Largest invariant moment found in the supplied initial state.
    pub initial_moment_defect: f64,
}

impl BoltzmannTrace {
    pub fn energy_trace(&self) -> Result<EnergyTrace> {
        EnergyTrace::new(self.times.clone(), self.h_values.clone())?
            .with_dissipation(self.dissipation.clone())
    }
}

fn check_state(op: &LinearizedOperator, state: &KineticState) -> Result<()> {
    let quad = op.quadrature();
    if state.dim() != 2 {
        return Err(Error::InvalidInput(
            "Boltzmann states live on the two-dimensional torus".into(),
        ));
    }
    if state.grid().len() != quad.len() {
        return Err(Error::InvalidInput(format!(
            "state has {} velocity nodes, operator expects {}",
            state.grid().len(),
            quad.len()
        )));
    }
    for (j, node) in state.grid().nodes().iter().enumerate() {
        let expect = quad.node(j);
        if (node[0] - expect[0]).abs() > 1e-12
            || (node[1] - expect[1]).abs() > 1e-12
            || (state.grid().weight(j) - quad.weight()).abs() > 1e-12
        {
            return Err(Error::InvalidInput(format!(
                "state velocity node {j} does not match the operator quadrature"
            )));
        }
    }
    Ok(())
}

impl LinearizedOperator {
    /// Strang-splits exact transport against the exact collision semigroup.
    ///
    /// Initial data with visible collision-invariant moments is projected
    /// onto the fluctuation space first; the trace records the defect and
    /// whether the projection fired.
    pub fn evolve(
        &self,
        state0: &KineticState,
        t_final: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<(KineticState, BoltzmannTrace)> {
        check_state(self, state0)?;
        if !(t_final > 0.0 && dt > 0.0 && t_final.is_finite() && dt.is_finite()) {
            return Err(Error::InvalidInput("need positive horizon and step".into()));
        }
        let mut f = state0.clone();
        let initial_moment_defect = {
            let mut probe = state0.clone();
            self.invariants().project_state(&mut probe)
        };
        let scale = 1.0 + state0.norm_sq().sqrt();
        let projected_initial = initial_moment_defect > PROJECTION_WARN_TOL * scale;
        if projected_initial {
            self.invariants().project_state(&mut f);
        }

        let every = sample_every.max(1);
        let steps = (t_final / dt).round().max(1.0) as usize;
        let mut trace = BoltzmannTrace {
            times: Vec::new(),
            h_values: Vec::new(),
            dissipation: Vec::new(),
            states: Vec::new(),
            projected_initial,
            initial_moment_defect,
        };
        record(self, &f, 0.0, &mut trace)?;
        for s in 1..=steps {
            f = f.advect(0.5 * dt);
            self.collision_step(&mut f, dt);
            f = f.advect(0.5 * dt);
            if s % every == 0 || s == steps {
                record(self, &f, s as f64 * dt, &mut trace)?;
            }
        }
        Ok((f, trace))
    }

    /// Integral of the Dirichlet form along the free transport flow,
    /// with the observability quotient against the kernel-weighted norm
    /// `|(1 + |v|)^(alpha/2) f0|^2`.
    pub fn observability_report(
        &self,
        state0: &KineticState,
        t_final: f64,
        samples: usize,
    ) -> Result<ObservabilityReport> {
        check_state(self, state0)?;
        if !(t_final > 0.0 && t_final.is_finite()) || samples < 2 {
            return Err(Error::InvalidInput(
                "observability needs a positive horizon and at least 2 samples".into(),
            ));
        }
        let weighted_initial = weighted_norm_sq(state0, self.kernel_spec().alpha);
        if weighted_initial <= 1e-30 {
            return Err(Error::InvalidInput(
                "observability quotient needs data with nonzero weighted norm".into(),
            ));
        }
        let dt = t_final / samples as f64;
        let mut g = state0.clone();
        let mut times = Vec::with_capacity(samples + 1);
        let mut values = Vec::with_capacity(samples + 1);
        for i in 0..=samples {
            times.push(i as f64 * dt);
            values.push(self.dissipation(&g));
            if i < samples {
                g = g.advect(dt);
            }
        }
        let lhs = integrate_series(&times, &values, 0.0, t_final);
        Ok(ObservabilityReport {
            t_final,
            lhs,
            weighted_initial,
            c_emp: lhs / weighted_initial,
        })
    }
}

fn record(op: &LinearizedOperator, f: &KineticState, time: f64, trace: &mut BoltzmannTrace) -> Result<()> {
    let h = f.norm_sq();
    if !h.is_finite() {
        return Err(Error::Numerical(format!(
            "phase-space energy became non-finite at t = {time}"
        )));
    }
    trace.times.push(time);
    trace.h_values.push(h);
    trace.dissipation.push(op.dissipation(f));
    trace.states.push(f.clone());
    Ok(())
}

/// Observability of the collision form along free transport.
#[derive(Debug, Clone, Copy)]
pub struct ObservabilityReport {
    pub t_final: f64,
    /// `int_0^T D(g(t)) dt` along the free flow started from `f0`.
    pub lhs: f64,
    /// `|(1 + |v|)^(alpha/2) f0|^2`.
    pub weighted_initial: f64,
    /// Empirical observability constant `lhs / weighted_initial`.
    pub c_emp: f64,
}

/// Velocity-weighted squared norm
/// `sum_n sum_j h^2 (1 + |v_j|)^power |f_j(n)|^2`.
pub fn weighted_norm_sq(state: &KineticState, power: f64) -> f64 {
    let grid = state.grid();
    (0..grid.len())
        .map(|j| {
            let v = grid.node(j);
            let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
            grid.weight(j) * (1.0 + speed).powf(power) * state.spectrum(j).l2_norm_sq()
        })
        .sum()
}

/// Report of the windowed polynomial-decay iteration for soft kernels.
#[derive(Debug, Clone, Copy)]
pub struct SoftDecayReport {
    /// Implied polynomial decay order `k1 / k3`.
    pub poly_order: f64,
    /// Smallest relative slack in the interpolation inequality
    /// `A^k1 B^k3 >= H^(k1+k3)` across the windows (nonnegative up to
    /// roundoff by construction).
    pub holder_margin: f64,
    /// Smallest `C` with `B(lT) <= l T C B(0)` along the sampled
    /// `(1 + |v|)^k2`-weighted norms.
    pub growth_constant: f64,
    /// Fitted window-recurrence constant.
    pub recurrence_constant: f64,
    /// Envelope constant of the rescaled sequence bound.
    pub ammari_constant: f64,
    /// Envelope constant `M` with `H(lT) <= M (lT)^(-k1/k3)`, fitted on the
    /// first half of the windows.
    pub envelope_constant: f64,
    /// Whether the full tail stays below the fitted envelope (5% slack).
    pub envelope_ok: bool,
    pub windows_used: usize,
}

/// Runs the interpolation/growth/recurrence chain along a sampled
/// relaxation trace whose samples must land on the window boundaries
/// `t = 0, T, 2T, ...`.
///
/// The exponents must be positive with `alpha k1 + k2 k3 > 0`, which makes
/// the weighted interpolation inequality
/// `A^k1 B^k3 >= H^(k1+k3)` (with `A` the kernel-weighted and `B` the
/// `k2`-weighted norm) a pointwise consequence of the power-mean
/// inequality. The energy windows are then fitted to the recurrence
/// `H_l - H_(l+1) >= C^(1-r) H_l^(1+r) / (lT)^r` with `r = k3/k1` and
/// certified through the sequence bound, yielding a `t^(-k1/k3)` envelope.
pub fn soft_decay_iteration(
    op: &LinearizedOperator,
    trace: &BoltzmannTrace,
    window: f64,
    k1: f64,
    k2: f64,
    k3: f64,
) -> Result<SoftDecayReport> {
    if !(k1 > 0.0 && k2 > 0.0 && k3 > 0.0) {
        return Err(Error::validation("k", "exponents must be positive"));
    }
    let alpha = op.kernel_spec().alpha;
    if alpha * k1 + k2 * k3 <= 0.0 {
        return Err(Error::validation(
            "k",
            "exponents must satisfy alpha k1 + k2 k3 > 0",
        ));
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::InvalidInput("window must be positive".into()));
    }

    // Pick out the samples sitting on window boundaries.
    let mut boundary = Vec::new();
    for l in 0.. {
        let target = l as f64 * window;
        if target > trace.times.last().copied().unwrap_or(0.0) + 1e-9 {
            break;
        }
        match trace
            .times
            .iter()
            .position(|t| (t - target).abs() <= 1e-9 * (1.0 + target))
        {
            Some(i) => boundary.push(i),
            None => {
                return Err(Error::InvalidInput(format!(
                    "trace has no sample at window boundary t = {target}"
                )))
            }
        }
    }
    if boundary.len() < 5 {
        return Err(Error::InvalidInput(
            "decay iteration needs at least 5 window boundaries".into(),
        ));
    }

    let h: Vec<f64> = boundary.iter().map(|&i| trace.h_values[i]).collect();
    let a: Vec<f64> = boundary
        .iter()
        .map(|&i| weighted_norm_sq(&trace.states[i], alpha))
        .collect();
    let b: Vec<f64> = boundary
        .iter()
        .map(|&i| weighted_norm_sq(&trace.states[i], k2))
        .collect();

    // Interpolation inequality at every boundary.
    let mut holder_margin = f64::INFINITY;
    for l in 0..h.len() {
        if h[l] <= 0.0 {
            break;
        }
        let lhs = (a[l] / h[l]).powf(k1) * (b[l] / h[l]).powf(k3);
        holder_margin = holder_margin.min(lhs - 1.0);
    }
    if holder_margin < -1e-10 {
        return Err(Error::Numerical(format!(
            "interpolation inequality violated by {holder_margin:.3e}"
        )));
    }

    // Weighted-norm growth constant over the windows.
    let mut growth_constant = 0.0f64;
    for l in 1..b.len() {
        growth_constant = growth_constant.max(b[l] / (l as f64 * window * b[0]));
    }

    let recurrence = flows::window_recurrence(&h, window, k3 / k1)?;

    // Envelope fitted on the first half of the windows, checked on all.
    let p = k1 / k3;
    let half = (recurrence.windows_used / 2).max(1);
    let mut envelope_constant = 0.0f64;
    for l in 1..=half {
        envelope_constant = envelope_constant.max(h[l] * (l as f64 * window).powf(p));
    }
    let envelope_ok = (1..h.len())
        .all(|l| h[l] <= 1.05 * envelope_constant * (l as f64 * window).powf(-p));

    Ok(SoftDecayReport {
        poly_order: p,
        holder_margin,
        growth_constant,
        recurrence_constant: recurrence.constant,
        ammari_constant: recurrence.ammari_constant,
        envelope_constant,
        envelope_ok,
        windows_used: recurrence.windows_used,
    })
}

/// Smooth random fluctuation: independent band-limited noise per velocity
/// node, mollified by one inverse Bessel power in position and shaped by
/// the square-root Maxwellian envelope in velocity. Deterministic in the
/// seed; collision-invariant moments are *not* removed.
pub fn random_fluctuation(quad: &VelocityQuadrature, cutoff: usize, seed: u64) -> KineticState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = quad.velocity_grid();
    let points = (2 * cutoff + 1) * (2 * cutoff + 1);
    let spectra = (0..quad.len())
        .map(|j| {
            let samples: Vec<f64> = (0..points).map(|_| rng.gen_range(-1.0..1.0)).collect();
            TorusSpectrum::from_samples(2, cutoff, &samples)
                .expect("sample count matches the collocation grid")
                .bessel_multiplier(2.0)
                .scaled(quad.sqrt_mu(j))
        })
        .collect();
    KineticState::new(grid, spectra)
}
