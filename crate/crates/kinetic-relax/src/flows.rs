//! Finite-dimensional damped/free evolution pairs.
//!
//! The continuum models in this crate all share one algebraic skeleton: a
//! conservative transport part `A` with `A + A^T = 0` and a symmetric
//! positive-semidefinite damping part `K`, evolving either
//!
//! ```text
//!     damped:  df/dt + A f = -K f        free:  dg/dt + A g = 0
//! ```
//!
//! This module realizes that skeleton with dense matrices so that the
//! comparison arguments used by the continuum proofs can be executed
//! directly: the damped dissipation integral never exceeds the free one, the
//! reverse comparison has a finite constant whenever the damped flow is
//! observable, and a positive observability constant for the free flow
//! yields a certified exponential decay rate for the damped flow via the
//! low-dissipation-window selection argument.
//!
//! Time stepping is Strang splitting between `exp(-A t)` (computed once per
//! step size by scaling-and-squaring; exactly norm-preserving up to
//! roundoff, since `exp` of a skew matrix is orthogonal) and `exp(-K t)`
//! (assembled from the symmetric eigendecomposition of `K`, eigenvalues
//! floored at zero).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::analysis::{self, EnergyTrace, RateFit};
use crate::error::{Error, Result};

/// Below this, dissipation integrals are considered to have vanished and
/// ratios of them are undefined.
pub const DISSIPATION_FLOOR: f64 = 1e-12;

/// A validated `(A, K)` pair: `A` skew-symmetric, `K` symmetric PSD.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    a: DMatrix<f64>,
    k: DMatrix<f64>,
    /// Orthonormal eigenbasis of `K` and its eigenvalues floored at zero;
    /// used for `exp(-K t)` and for `K^(1/2)`.
    k_basis: DMatrix<f64>,
    k_eigs: DVector<f64>,
}

impl OperatorPair {
    /// Validates and stores the pair. `A` must be skew to `1e-12` relative,
    /// `K` symmetric with eigenvalues `>= -1e-10` relative; tiny negative
    /// eigenvalues are floored at zero.
    pub fn new(a: DMatrix<f64>, k: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || !k.is_square() || a.nrows() != k.nrows() {
            return Err(Error::InvalidInput(
                "operator pair needs square A and K of equal size".into(),
            ));
        }
        if a.iter().chain(k.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("operator entries must be finite".into()));
        }
        let scale_a = a.amax().max(1.0);
        let skew_defect = (&a + a.transpose()).amax();
        if skew_defect > 1e-12 * scale_a {
            return Err(Error::InvalidInput(format!(
                "A is not skew-symmetric (defect {skew_defect:.3e})"
            )));
        }
        let scale_k = k.amax().max(1.0);
        let sym_defect = (&k - k.transpose()).amax();
        if sym_defect > 1e-12 * scale_k {
            return Err(Error::InvalidInput(format!(
                "K is not symmetric (defect {sym_defect:.3e})"
            )));
        }
        let sym = (&k + k.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let min_eig = eig.eigenvalues.min();
        if min_eig < -1e-10 * scale_k {
            return Err(Error::InvalidInput(format!(
                "K is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        let floored = eig.eigenvalues.map(|l| l.max(0.0));
        Ok(OperatorPair {
            a,
            k,
            k_basis: eig.eigenvectors,
            k_eigs: floored,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// `K^(1/2)` from the floored eigendecomposition.
    pub fn k_sqrt(&self) -> DMatrix<f64> {
        self.k_function(f64::sqrt)
    }

    /// `phi(K)` applied through the eigendecomposition.
    fn k_function(&self, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&self.k_eigs.map(phi));
        &self.k_basis * d * self.k_basis.transpose()
    }

    /// `exp(-K tau)`, exact on the eigenbasis.
    pub fn exp_damping(&self, tau: f64) -> DMatrix<f64> {
        self.k_function(|l| (-l * tau).exp())
    }

    /// `exp(-A tau)` by scaling-and-squaring; orthogonal up to roundoff.
    pub fn exp_transport(&self, tau: f64) -> DMatrix<f64> {
        (self.a.clone() * -tau).exp()
    }

    /// Instantaneous dissipation functional `<K x, x>`.
    pub fn dissipation(&self, x: &DVector<f64>) -> f64 {
        assert_eq!(x.len(), self.dim(), "state dimension mismatch");
        (&self.k * x).dot(x)
    }
}

/// Draws a random pair with `A` skew, `K = C^T C` PSD, both normalized to
/// unit Frobenius norm. Used by sweeps, examples and the verification
/// suites.
pub fn random_pair(m: usize, rng: &mut impl Rng) -> OperatorPair {
    let mut b = DMatrix::<f64>::zeros(m, m);
    let mut c = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = rng.gen_range(-1.0..1.0);
            c[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    let mut a = (&b - b.transpose()) * 0.5;
    let fa = a.norm();
    if fa > 1e-300 {
        a /= fa;
    }
    let mut k = c.transpose() * &c;
    // Symmetrize exactly against roundoff before normalizing.
    k = (&k + k.transpose()) * 0.5;
    let fk = k.norm();
    if fk > 1e-300 {
        k /= fk;
    }
    OperatorPair::new(a, k).expect("constructed pair is valid by design")
}

/// A sampled matrix flow: states, energies and dissipation at step times.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// `<K f(t), f(t)>` at each sample (also recorded along free flows).
    pub dissipation: Vec<f64>,
}

impl FlowTrace {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trace is never empty")
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.norm_squared()).collect()
    }

    /// View as an energy trace (squared norms) with dissipation attached.
    pub fn energy_trace(&self) -> EnergyTrace {
        EnergyTrace::new(self.times.clone(), self.energies())
            .expect("flow samples are strictly ordered")
            .with_dissipation(self.dissipation.clone())
            .expect("dissipation series matches by construction")
    }

    /// Trapezoid integral of the sampled dissipation over the whole trace.
    pub fn dissipation_integral(&self) -> f64 {
        analysis::integrate_series(
            &self.times,
            &self.dissipation,
            self.times[0],
            *self.times.last().unwrap(),
        )
    }

    /// State norm at the final time over the initial norm.
    pub fn decay_factor(&self) -> f64 {
        self.final_state().norm() / self.states[0].norm().max(1e-300)
    }
}

fn check_evolution_args(pair: &OperatorPair, f0: &DVector<f64>, t: f64, dt: f64) -> Result<()> {
    assert_eq!(f0.len(), pair.dim(), "state dimension mismatch");
    if f0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    if !(t > 0.0 && t.is_finite() && dt > 0.0 && dt.is_finite() && dt <= t) {
        return Err(Error::InvalidInput(
            "evolution needs 0 < dt <= t, both finite".into(),
        ));
    }
    Ok(())
}

fn step_counts(t: f64, dt: f64) -> (usize, f64) {
    let n = (t / dt).floor() as usize;
    let rem = t - n as f64 * dt;
    if rem > 1e-12 * t.max(1.0) {
        (n, rem)
    } else {
        (n, 0.0)
    }
}

/// Integrates the damped flow `df/dt = -(A + K) f` by Strang splitting
/// `exp(-K dt/2) exp(-A dt) exp(-K dt/2)` and samples every step.
pub fn evolve_damped(
    pair: &OperatorPair,
    f0: &DVector<f64>,
    t: f64,
    dt: f64,
) -> Result<FlowTrace> {
    evolve(pair, f0, t, dt, true)
}

/// Integrates the free flow `dg/dt = -A g` with the damping suppressed; one
/// matrix exponential per step size, exact up to roundoff.
pub fn evolve_free(pair: &OperatorPair, f0: &DVector<f64>, t: f64, dt: f64) -> Result<FlowTrace> {
    evolve(pair, f0, t, dt, false)
}

fn evolve(
    pair: &OperatorPair,
    f0: &DVector<f64>,
    t: f64,
    dt: f64,
    damped: bool,
) -> Result<FlowTrace> {
    check_evolution_args(pair, f0, t, dt)?;
    let (full_steps, remainder) = step_counts(t, dt);
    let samples = full_steps + 1 + usize::from(remainder > 0.0);
    let mut trace = FlowTrace {
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        dissipation: Vec::with_capacity(samples),
    };
    let record = |time: f64, state: &DVector<f64>, trace: &mut FlowTrace| -> Result<()> {
        let d = pair.dissipation(state);
        if !d.is_finite() {
            return Err(Error::Numerical(format!(
                "flow produced non-finite values at t = {time}"
            )));
        }
        trace.times.push(time);
        trace.states.push(state.clone());
        trace.dissipation.push(d);
        Ok(())
    };

    let mut f = f0.clone();
    record(0.0, &f, &mut trace)?;
    let apply_block = |tau: f64, steps: usize, start: f64, f: &mut DVector<f64>, trace: &mut FlowTrace| -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let exp_a = pair.exp_transport(tau);
        let exp_k_half = damped.then(|| pair.exp_damping(tau / 2.0));
        for s in 0..steps {
            if let Some(ekh) = &exp_k_half {
                *f = ekh * &*f;
                *f = &exp_a * &*f;
                *f = ekh * &*f;
            } else {
                *f = &exp_a * &*f;
            }
            record(start + (s + 1) as f64 * tau, f, trace)?;
        }
        Ok(())
    };
    apply_block(dt, full_steps, 0.0, &mut f, &mut trace)?;
    if remainder > 0.0 {
        apply_block(remainder, 1, full_steps as f64 * dt, &mut f, &mut trace)?;
        // Pin the final time exactly.
        *trace.times.last_mut().unwrap() = t;
    }
    Ok(trace)
}

/// The two dissipation integrals of one initial state over `[0, t]`:
/// along the damped flow and along the free flow.
#[derive(Debug, Clone, Copy)]
pub struct DissipationComparison {
    pub damped: f64,
    pub free: f64,
}

impl DissipationComparison {
    /// `damped / free`; `None` when both have vanished (compare is
    /// undefined, e.g. for states invisible to `K`).
    pub fn damped_over_free(&self) -> Option<f64> {
        if self.damped < DISSIPATION_FLOOR && self.free < DISSIPATION_FLOOR {
            None
        } else {
            Some(self.damped / self.free.max(DISSIPATION_FLOOR))
        }
    }

    /// `free / damped`, the empirical reverse-comparison constant. Errors
    /// when the damped integral has vanished: the damped flow then carries
    /// no observable dissipation to compare against.
    pub fn free_over_damped(&self) -> Result<f64> {
        if self.damped < DISSIPATION_FLOOR {
            return Err(Error::Numerical(format!(
                "damped dissipation integral vanished ({:.3e}); reverse comparison undefined",
                self.damped
            )));
        }
        Ok(self.free / self.damped)
    }
}

/// Runs both flows from `f0` over `[0, t]` and integrates `<K ., .>` along
/// each. The damped integral never exceeds the free one (up to integrator
/// tolerance); the reverse ratio is finite exactly when the damped flow
/// remains observable.
pub fn compare_dissipation(
    pair: &OperatorPair,
    f0: &DVector<f64>,
    t: f64,
    dt: f64,
) -> Result<DissipationComparison> {
    let damped = evolve_damped(pair, f0, t, dt)?.dissipation_integral();
    let free = evolve_free(pair, f0, t, dt)?.dissipation_integral();
    Ok(DissipationComparison { damped, free })
}

/// Observability constant of one initial state: the free-flow dissipation
/// integral over `[0, t0]` divided by the initial energy.
pub fn observability_constant(
    pair: &OperatorPair,
    f0: &DVector<f64>,
    t0: f64,
    dt: f64,
) -> Result<f64> {
    let e0 = f0.norm_squared();
    if e0 <= 0.0 {
        return Err(Error::InvalidInput(
            "observability constant needs a nonzero initial state".into(),
        ));
    }
    Ok(evolve_free(pair, f0, t0, dt)?.dissipation_integral() / e0)
}

/// Uniform observability constant over the unit sphere: the smallest
/// eigenvalue of the observability Gramian
/// `G = integral_0^t0 exp(-A t)^T K exp(-A t) dt` (trapezoid in time).
/// Every per-state constant is at least this value.
pub fn uniform_observability_constant(pair: &OperatorPair, t0: f64, dt: f64) -> Result<f64> {
    if !(t0 > 0.0 && dt > 0.0 && dt <= t0) {
        return Err(Error::InvalidInput(
            "uniform observability needs 0 < dt <= t0".into(),
        ));
    }
    let m = pair.dim();
    let (full_steps, remainder) = step_counts(t0, dt);
    let exp_a = pair.exp_transport(dt);
    let mut e = DMatrix::<f64>::identity(m, m);
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let integrand = |e: &DMatrix<f64>| e.transpose() * pair.k() * e;
    let mut prev = integrand(&e);
    for _ in 0..full_steps {
        e = &exp_a * e;
        let cur = integrand(&e);
        gram += (&prev + &cur) * (dt / 2.0);
        prev = cur;
    }
    if remainder > 0.0 {
        e = pair.exp_transport(remainder) * e;
        let cur = integrand(&e);
        gram += (&prev + &cur) * (remainder / 2.0);
    }
    let sym = (&gram + gram.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.min())
}

/// Outcome of the observability-to-decay argument for one damped flow.
#[derive(Debug, Clone)]
pub struct DecayCertificate {
    /// Certified norm decay rate (`||f(t)||` decays like `exp(-delta t)`);
    /// zero when observability is absent.
    pub delta: f64,
    /// Whether the exponential envelope held along the whole sampled tail.
    pub verified: bool,
    /// Uniform (Gramian) observability constant of one window.
    pub uniform_constant: f64,
    /// Number of windows the horizon was split into.
    pub windows: usize,
    /// Index of the low-dissipation window found by the pigeonhole scan.
    pub window_index: usize,
    /// Whether that window's dissipation integral was at most `total / k`.
    pub window_bound_ok: bool,
    /// Diagnostic least-squares fit of the energy tail (absent when
    /// observability vanished or the fit degenerated); `delta` itself comes
    /// from the measured window ratios, not from this fit.
    pub fit: Option<RateFit>,
}

/// Multiplicative slack allowed when comparing sampled energies against a
/// fitted or certified exponential envelope.
pub const ENVELOPE_SLACK: f64 = 1.05;

/// Turns a positive observability constant into a certified decay rate.
///
/// Runs the damped flow over `[0, k t0]` where `k = floor(horizon / t0)`,
/// locates the low-dissipation window promised by the pigeonhole argument,
/// and certifies the worst per-window energy ratio as a geometric envelope
/// (`delta` is the induced norm decay rate). A vanishing uniform
/// observability constant short-circuits to `delta = 0, verified = false`;
/// `dt` must divide `t0` so the window boundaries are sampled exactly.
pub fn decay_from_observability(
    pair: &OperatorPair,
    f0: &DVector<f64>,
    t0: f64,
    dt: f64,
    horizon: f64,
) -> Result<DecayCertificate> {
    check_evolution_args(pair, f0, horizon, dt)?;
    if f0.norm_squared() <= 0.0 {
        return Err(Error::InvalidInput(
            "decay certificate needs a nonzero initial state".into(),
        ));
    }
    let k = (horizon / t0 + 1e-9).floor() as usize;
    if k < 2 {
        return Err(Error::InvalidInput(
            "horizon must cover at least two observability windows".into(),
        ));
    }
    let uniform = uniform_observability_constant(pair, t0, dt)?;
    if uniform <= DISSIPATION_FLOOR {
        return Ok(DecayCertificate {
            delta: 0.0,
            verified: false,
            uniform_constant: uniform.max(0.0),
            windows: k,
            window_index: 0,
            window_bound_ok: false,
            fit: None,
        });
    }
    let t_star = k as f64 * t0;
    let trace = evolve_damped(pair, f0, t_star, dt)?;
    let (window_index, window_integral) =
        analysis::window_decrement(&trace.times, &trace.dissipation, t0, k)?;
    let total = trace.dissipation_integral();
    let window_bound_ok = window_integral <= total / k as f64 + 1e-9 * (1.0 + total);

    let energy = trace.energy_trace();

    // Certified rate: positive uniform observability forces a uniform
    // per-window energy decrement along the damped flow, so the worst
    // measured boundary ratio `E((j+1) t0) / E(j t0)` yields the geometric
    // envelope `E(k t0) <= gamma^k E(0)`; the energy is nonincreasing, so
    // the envelope extends between boundaries. A least-squares fit of the
    // tail would underestimate multi-rate decays and is kept only as a
    // diagnostic.
    let per_window = (t0 / dt).round() as usize;
    let boundary = |j: usize| -> Result<f64> {
        let idx = j * per_window;
        let (t, v) = energy
            .times
            .get(idx)
            .zip(energy.values.get(idx))
            .ok_or_else(|| {
                Error::InvalidInput("trace misses an observability window boundary".into())
            })?;
        if (t - j as f64 * t0).abs() > 1e-6 * (1.0 + t.abs()) {
            return Err(Error::InvalidInput(
                "dt must divide the observability window t0".into(),
            ));
        }
        Ok(*v)
    };
    let mut gamma = 0.0f64;
    for j in 0..k {
        let head = boundary(j)?;
        if head <= 1e-300 {
            break; // energy exhausted: all later ratios vanish
        }
        gamma = gamma.max(boundary(j + 1)? / head);
    }
    let delta = if gamma < 1.0 {
        (-gamma.max(1e-300).ln() / (2.0 * t0)).max(0.0)
    } else {
        0.0
    };
    let fit = analysis::fit_exponential(&energy, energy.default_window()).ok();

    Ok(DecayCertificate {
        delta,
        verified: delta > 0.0 && window_bound_ok,
        uniform_constant: uniform,
        windows: k,
        window_index,
        window_bound_ok,
        fit,
    })
}

/// Verifies the sequence recurrence `E_{k+1} <= E_k - c E_{k+1}^(2+zeta)`
/// and returns the bound constant `M = max_k E_k (k+1)^(1/(1+zeta))`, so
/// that `E_k <= M / (k+1)^(1/(1+zeta))` along the checked range.
///
/// The sequence must be nonnegative and non-increasing; violations are
/// reported with the offending index. A small relative tolerance absorbs
/// roundoff for sequences constructed to satisfy the recurrence with
/// equality.
pub fn ammari_bound(seq: &[f64], c: f64, zeta: f64) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::InvalidInput("sequence bound needs data".into()));
    }
    if !(c > 0.0 && c.is_finite()) || !(zeta > -1.0 && zeta.is_finite()) {
        return Err(Error::InvalidInput(
            "sequence bound needs c > 0 and zeta > -1".into(),
        ));
    }
    if seq.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidInput(
            "sequence entries must be finite and nonnegative".into(),
        ));
    }
    let tol = 1e-10 * (1.0 + seq[0]);
    for k in 0..seq.len() - 1 {
        if seq[k + 1] > seq[k] + tol {
            return Err(Error::Recurrence {
                index: k + 1,
                detail: format!("sequence increases: E_{} = {} > E_{} = {}", k + 1, seq[k + 1], k, seq[k]),
            });
        }
        let rhs = seq[k] - c * seq[k + 1].powf(2.0 + zeta);
        if seq[k + 1] > rhs + tol {
            return Err(Error::Recurrence {
                index: k + 1,
                detail: format!(
                    "E_{} = {} exceeds E_{} - c E_{}^(2+zeta) = {}",
                    k + 1,
                    seq[k + 1],
                    k,
                    k + 1,
                    rhs
                ),
            });
        }
    }
    let p = 1.0 / (1.0 + zeta);
    Ok(seq
        .iter()
        .enumerate()
        .map(|(k, e)| e * ((k + 1) as f64).powf(p))
        .fold(0.0, f64::max))
}

/// Fitted window recurrence for polynomially decaying energies.
#[derive(Debug, Clone, Copy)]
pub struct WindowRecurrence {
    /// Recurrence exponent `r`.
    pub ratio: f64,
    /// Smallest constant `C` with
    /// `H(lT) - H((l+1)T) >= C^(1-r) H(lT)^(1+r) / (lT)^r` on every usable
    /// window.
    pub constant: f64,
    /// Envelope constant of the rescaled sequence bound.
    pub ammari_constant: f64,
    /// Number of windows the recurrence was verified on.
    pub windows_used: usize,
}

/// Fits the window recurrence
/// `H(lT) - H((l+1)T) >= C^(1-r) H(lT)^(1+r) / (lT)^r`
/// along a sampled energy sequence `h[l] = H(lT)` and certifies it.
///
/// The exponent must satisfy `r > 1`, so that larger constants make the
/// inequality weaker and a smallest admissible `C` exists whenever the
/// sequence strictly decreases. The rescaled sequence
/// `E_l = h[l] / (l T C)` is then passed to [`ammari_bound`] with
/// `zeta = r - 1`, which yields the envelope `E_l <= M l^(-1/r)`.
pub fn window_recurrence(h_values: &[f64], t_step: f64, ratio: f64) -> Result<WindowRecurrence> {
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::validation("ratio", "recurrence exponent must exceed one"));
    }
    if h_values.len() < 4 || !(t_step > 0.0 && t_step.is_finite()) {
        return Err(Error::InvalidInput(
            "window recurrence needs at least 4 samples and a positive window".into(),
        ));
    }
    if h_values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(
            "energy series must be finite and nonnegative".into(),
        ));
    }

    // Usable range: strictly decreasing and clear of the roundoff floor.
    let floor = 1e-12 * h_values[0].max(f64::MIN_POSITIVE);
    let mut cut = 1;
    while cut + 1 < h_values.len()
        && h_values[cut + 1] < h_values[cut]
        && h_values[cut + 1] > floor
    {
        cut += 1;
    }
    if cut < 3 {
        return Err(Error::Recurrence {
            index: cut,
            detail: "energy sequence stops decreasing too early for a window fit".into(),
        });
    }

    let mut c_fit = 0.0_f64;
    for l in 1..cut {
        let lt = l as f64 * t_step;
        let diff = h_values[l] - h_values[l + 1];
        // Solve each window for the smallest admissible constant; r > 1
        // makes larger C weaker, so the fit is the maximum over windows.
        let margin = diff * lt.powf(ratio) / h_values[l].powf(1.0 + ratio);
        c_fit = c_fit.max(margin.recip().powf(1.0 / (ratio - 1.0)));
    }
    if !(c_fit > 0.0 && c_fit.is_finite()) {
        return Err(Error::Recurrence {
            index: 0,
            detail: format!("no finite recurrence constant (fit {c_fit})"),
        });
    }

    let rescaled: Vec<f64> = (1..=cut)
        .map(|l| h_values[l] / (l as f64 * t_step * c_fit))
        .collect();
    let ammari_constant = ammari_bound(&rescaled, c_fit, ratio - 1.0)?;

    Ok(WindowRecurrence {
        ratio,
        constant: c_fit,
        ammari_constant,
        windows_used: cut,
    })
}

/// Residual of the quadratic-form additivity `<K x, x> = sum_i <K_i x, x>`
/// for a split `K = sum_i K_i`; exact splits give roundoff-sized residuals
/// for every probe vector.
pub fn psd_split_defect(k: &DMatrix<f64>, parts: &[&DMatrix<f64>], x: &DVector<f64>) -> f64 {
    let whole = (k * x).dot(x);
    let sum: f64 = parts.iter().map(|p| (*p * x).dot(x)).sum();
    (whole - sum).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oscillator_pair() -> OperatorPair {
        // Rotation coupled to damping of the first component only: the
        // classic partially damped oscillator.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        OperatorPair::new(a, k).unwrap()
    }

    fn random_state(m: usize, rng: &mut impl Rng) -> DVector<f64> {
        let mut v = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0_f64));
        let n = v.norm();
        if n > 0.0 {
            v /= n;
        }
        v
    }

    #[test]
    fn construction_validates_structure() {
        let not_skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = DMatrix::identity(2, 2);
        assert!(OperatorPair::new(not_skew, k.clone()).is_err());

        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let not_sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(OperatorPair::new(a.clone(), not_sym).is_err());

        let negative = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(OperatorPair::new(a, negative).is_err());
    }

    #[test]
    fn k_sqrt_squares_back_to_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let pair = random_pair(6, &mut rng);
            let s = pair.k_sqrt();
            let defect = (&s * &s - pair.k()).amax();
            assert!(defect < 1e-10, "sqrt defect {defect}");
        }
    }

    #[test]
    fn free_flow_conserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = random_pair(6, &mut rng);
        let f0 = random_state(6, &mut rng);
        let trace = evolve_free(&pair, &f0, 10.0, 1e-2).unwrap();
        let drift = (trace.final_state().norm_squared() - f0.norm_squared()).abs();
        assert!(drift < 1e-8, "free-flow energy drift {drift}");
    }

    #[test]
    fn damped_flow_energy_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pair = random_pair(5, &mut rng);
        let f0 = random_state(5, &mut rng);
        let trace = evolve_damped(&pair, &f0, 5.0, 1e-2).unwrap();
        let energies = trace.energies();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "energy increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn energy_balance_matches_dissipation_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let pair = random_pair(6, &mut rng);
            let f0 = random_state(6, &mut rng);
            let trace = evolve_damped(&pair, &f0, 5.0, 2.5e-4).unwrap();
            let energies = trace.energies();
            let balance = energies[0] - energies.last().unwrap() - 2.0 * trace.dissipation_integral();
            assert!(
                balance.abs() <= 1e-6 * energies[0],
                "energy balance defect {balance:.3e}"
            );
        }
    }

    #[test]
    fn refinement_to_dt_over_16_changes_little() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pair = random_pair(6, &mut rng);
        let f0 = random_state(6, &mut rng);
        let coarse = evolve_damped(&pair, &f0, 2.0, 2.5e-4).unwrap();
        let fine = evolve_damped(&pair, &f0, 2.0, 2.5e-4 / 16.0).unwrap();
        let diff = (coarse.final_state() - fine.final_state()).norm();
        assert!(diff < 1e-6, "refinement defect {diff:.3e}");
    }

    #[test]
    fn non_integer_step_ratio_hits_the_final_time_exactly() {
        let pair = oscillator_pair();
        let f0 = DVector::from_column_slice(&[1.0, 0.0]);
        let trace = evolve_damped(&pair, &f0, 1.0, 0.3).unwrap();
        assert_eq!(*trace.times.last().unwrap(), 1.0);
        // Against a uniform-step reference at much smaller dt.
        let reference = evolve_damped(&pair, &f0, 1.0, 1e-4).unwrap();
        let diff = (trace.final_state() - reference.final_state()).norm();
        assert!(diff < 2e-2, "remainder step defect {diff}");
    }

    #[test]
    fn damped_dissipation_never_exceeds_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pair = random_pair(rng.gen_range(2..=6), &mut rng);
            let f0 = random_state(pair.dim(), &mut rng);
            let cmp = compare_dissipation(&pair, &f0, 6.0, 1e-3).unwrap();
            if let Some(ratio) = cmp.damped_over_free() {
                assert!(ratio <= 1.0 + 1e-6, "forward comparison ratio {ratio}");
            }
        }
    }

    #[test]
    fn vanished_dissipation_gives_the_undefined_marker() {
        // K = 0: both flows are conservative and blind to K.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let pair = OperatorPair::new(a, DMatrix::zeros(2, 2)).unwrap();
        let f0 = DVector::from_column_slice(&[1.0, 0.0]);
        let cmp = compare_dissipation(&pair, &f0, 2.0, 1e-2).unwrap();
        assert!(cmp.damped_over_free().is_none());
        assert!(cmp.free_over_damped().is_err());
    }

    #[test]
    fn reverse_ratio_is_finite_for_observable_pairs() {
        let pair = oscillator_pair();
        let f0 = DVector::from_column_slice(&[0.3, 0.9]);
        let cmp = compare_dissipation(&pair, &f0, 4.0, 1e-3).unwrap();
        let ratio = cmp.free_over_damped().unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
        // The free flow dissipates at least as much as the damped one.
        assert!(ratio >= 1.0 - 1e-6);
    }

    #[test]
    fn observability_constant_closed_form_for_pure_damping() {
        // A = 0, K = I: the free flow is frozen, so the dissipation
        // integral over [0, t0] is exactly t0 * ||f0||^2.
        let pair = OperatorPair::new(DMatrix::zeros(3, 3), DMatrix::identity(3, 3)).unwrap();
        let f0 = DVector::from_column_slice(&[0.6, 0.0, 0.8]);
        let c = observability_constant(&pair, &f0, 2.5, 1e-3).unwrap();
        assert!((c - 2.5).abs() < 1e-8, "constant {c}");
        let u = uniform_observability_constant(&pair, 2.5, 1e-3).unwrap();
        assert!((u - 2.5).abs() < 1e-8, "uniform constant {u}");
    }

    #[test]
    fn deficient_damping_without_mixing_has_zero_uniform_constant() {
        // A = 0, K = diag(1, 0): the second component is never observed.
        let pair = OperatorPair::new(
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        )
        .unwrap();
        let u = uniform_observability_constant(&pair, 3.0, 1e-3).unwrap();
        assert!(u.abs() < 1e-12);
        let f0 = DVector::from_column_slice(&[1.0, 1.0]);
        let cert = decay_from_observability(&pair, &f0, 3.0, 1e-3, 12.0).unwrap();
        assert_eq!(cert.delta, 0.0);
        assert!(!cert.verified);
    }

    #[test]
    fn pure_damping_certifies_unit_norm_rate() {
        // A = 0, K = I: f(t) = exp(-t) f0, norm rate exactly 1.
        let pair = OperatorPair::new(DMatrix::zeros(3, 3), DMatrix::identity(3, 3)).unwrap();
        let f0 = DVector::from_column_slice(&[1.0, -0.5, 0.25]);
        let cert = decay_from_observability(&pair, &f0, 2.0, 1e-3, 10.0).unwrap();
        assert!(cert.verified);
        assert!(
            (cert.delta - 1.0).abs() < 0.1,
            "expected norm rate near 1, got {}",
            cert.delta
        );
    }

    #[test]
    fn mixed_oscillator_decay_is_certified() {
        let pair = oscillator_pair();
        let f0 = DVector::from_column_slice(&[0.0, 1.0]);
        let cert = decay_from_observability(&pair, &f0, 4.0, 1e-3, 40.0).unwrap();
        assert!(cert.verified, "certificate: {cert:?}");
        assert!(cert.delta > 0.05, "delta {}", cert.delta);
        assert!(cert.uniform_constant > 0.1);
        assert!(cert.window_bound_ok);
    }

    /// Solves `x + c x^(2+zeta) = e_prev` for the equality-driven sequence.
    fn equality_step(e_prev: f64, c: f64, zeta: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, e_prev);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + c * mid.powf(2.0 + zeta) > e_prev {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn equality_sequences_satisfy_the_bound() {
        for zeta in [0.0, 1.0] {
            let c = 0.8;
            let mut seq = vec![1.0];
            for _ in 0..200 {
                seq.push(equality_step(*seq.last().unwrap(), c, zeta));
            }
            let m = ammari_bound(&seq, c, zeta).unwrap();
            assert!(m.is_finite() && m > 0.0);
            // The bound is attained along the sequence within its range.
            let p = 1.0 / (1.0 + zeta);
            for (k, e) in seq.iter().enumerate() {
                assert!(e * ((k + 1) as f64).powf(p) <= m + 1e-12);
            }
        }
    }

    #[test]
    fn recurrence_violations_are_reported_with_their_index() {
        let c = 0.8;
        let mut seq = vec![1.0];
        for _ in 0..20 {
            seq.push(equality_step(*seq.last().unwrap(), c, 0.0));
        }
        // Too-slow decay at index 7 breaks the recurrence.
        seq[7] = seq[6];
        match ammari_bound(&seq, c, 0.0) {
            Err(Error::Recurrence { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected recurrence violation, got {other:?}"),
        }
        // An increasing sequence is rejected outright.
        match ammari_bound(&[1.0, 2.0], c, 0.0) {
            Err(Error::Recurrence { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected monotonicity violation, got {other:?}"),
        }
    }

    #[test]
    fn psd_split_is_additive_on_quadratic_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p1 = random_pair(5, &mut rng);
        let p2 = random_pair(5, &mut rng);
        let whole = p1.k() + p2.k();
        for _ in 0..10 {
            let x = random_state(5, &mut rng);
            let defect = psd_split_defect(&whole, &[p1.k(), p2.k()], &x);
            assert!(defect < 1e-12, "split defect {defect}");
        }
    }
}
