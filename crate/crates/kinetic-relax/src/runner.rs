//! Executes one resolved experiment end to end: builds the model, draws
//! seeded initial data, evolves it, analyzes the sampled history, and
//! assembles the two artifacts every run produces — a CSV trace and a
//! JSON summary that echoes the full resolved configuration.
//!
//! All computation lives in [`run_experiment`], which performs no IO;
//! [`write_artifacts`] persists the results atomically (write to a
//! temporary file, then rename) so readers never observe partial output.
//! Given the same configuration and seed, both artifacts are reproduced
//! byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis;
use crate::boltzmann::{self, CollisionKernelSpec, VelocityQuadrature};
use crate::config::{ExperimentConfig, Model, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::flows;
use crate::goldstein_taylor::{GtState, GtSystem};
use crate::spectral::{KineticState, TorusSpectrum};
use crate::transport::{self, TransportConfig};

/// Everything one run produces, before any file IO.
#[derive(Debug)]
pub struct RunArtifacts {
    /// RFC-4180 trace: header row plus one sampled row per record time.
    pub trace_csv: String,
    pub summary: Summary,
}

/// Top-level content of `<prefix>_summary.json`.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub model: Model,
    pub result: ModelResult,
    /// The full resolved configuration, echoed as an audit trail.
    pub config: ExperimentConfig,
}

/// Model-specific analysis block of the summary.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum ModelResult {
    TwoSpeed(GtResult),
    Transport(TransportResult),
    Collision(BoltzmannResult),
    OperatorPair(AbstractResult),
}

/// Summary for the two-speed relaxation model.
#[derive(Debug, Serialize)]
pub struct GtResult {
    /// Fitted decay rate of the deviation energy (positive means decay).
    pub delta: f64,
    pub r_squared: f64,
    /// Empirical per-unit-time observability constant from the exact
    /// identity at horizon 1; absent when the data carries no deviation
    /// energy beyond the mass imbalance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_obs: Option<f64>,
    pub final_energy: f64,
}

/// Summary for the transport models (full and weakened damping).
#[derive(Debug, Serialize)]
pub struct TransportResult {
    /// Exponential energy decay rate (full damping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    /// Fitted polynomial order of the tail (weak damping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly_order: Option<f64>,
    /// Fitted growth degree of the smoothed-norm series and whether it
    /// stayed essentially linear (weak damping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_degree: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_bounded: Option<bool>,
    /// Windowed polynomial-decay certification, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration: Option<IterationSummary>,
    /// Empirical observability constant of the free flow.
    pub c_emp: f64,
    pub final_energy: f64,
}

/// Serializable mirror of the windowed polynomial-decay report.
#[derive(Debug, Serialize)]
pub struct IterationSummary {
    pub poly_order: f64,
    pub recurrence_constant: f64,
    pub moment_constant: f64,
    pub ammari_constant: f64,
    pub windows_used: usize,
}

/// Summary for the collisional model.
#[derive(Debug, Serialize)]
pub struct BoltzmannResult {
    /// Exponential decay certificate (hard kernels).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    /// Polynomial decay certificate (soft kernels).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soft_decay: Option<SoftDecaySummary>,
    /// Empirical observability constant of the free flow.
    pub c_emp: f64,
    /// Measured collision-frequency lower-bound constant.
    pub empirical_m1: f64,
    /// Near/far kernel split constants, one row per threshold parameter.
    pub c2_table: Vec<SplitEntry>,
    /// Fraction of kernel mass discarded by the interpolation hull.
    pub dropped_mass_fraction: f64,
    /// Whether the seeded data needed projection onto the orthogonal
    /// complement of the collision invariants, and how far off it was.
    pub projected_initial: bool,
    pub initial_moment_defect: f64,
}

/// Serializable mirror of the soft-kernel decay report.
#[derive(Debug, Serialize)]
pub struct SoftDecaySummary {
    pub poly_order: f64,
    pub holder_margin: f64,
    pub growth_constant: f64,
    pub recurrence_constant: f64,
    pub ammari_constant: f64,
    pub envelope_constant: f64,
    pub envelope_ok: bool,
    pub windows_used: usize,
}

/// One row of the near/far split table.
#[derive(Debug, Serialize)]
pub struct SplitEntry {
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Summary for the abstract operator-pair model.
#[derive(Debug, Serialize)]
pub struct AbstractResult {
    /// Certified norm decay rate from the observability window.
    pub delta: f64,
    /// Whether the exponential envelope held along the sampled tail.
    pub verified: bool,
    /// Uniform (Gramian) observability constant of one window.
    pub uniform_constant: f64,
    pub windows: usize,
    pub window_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
}

/// Runs the configured experiment and assembles its artifacts in memory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    match cfg.model {
        Model::Gt => run_gt(cfg),
        Model::Transport | Model::Weak => run_transport(cfg),
        Model::Boltzmann => run_boltzmann(cfg),
        Model::Abstract => run_abstract(cfg),
    }
}

/// Writes both artifacts next to `<prefix>`, creating parent directories
/// and replacing files atomically.
pub fn write_artifacts(cfg: &ExperimentConfig, artifacts: &RunArtifacts) -> Result<()> {
    write_atomic(Path::new(&cfg.trace_path()), artifacts.trace_csv.as_bytes())?;
    let mut json = serde_json::to_string_pretty(&artifacts.summary)?;
    json.push('\n');
    write_atomic(Path::new(&cfg.summary_path()), json.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders equal-length columns as RFC-4180 CSV (CRLF rows, header first;
/// numeric fields need no quoting).
fn render_csv(header: &[&str], columns: &[Vec<f64>]) -> String {
    let rows = columns.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for r in 0..rows {
        for (c, col) in columns.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", col[r]);
        }
        out.push_str("\r\n");
    }
    out
}

/// Keeps every `every`-th row plus the final one.
fn thin(column: &[f64], every: usize) -> Vec<f64> {
    let every = every.max(1);
    let last = column.len().saturating_sub(1);
    column
        .iter()
        .enumerate()
        .filter(|(i, _)| i % every == 0 || *i == last)
        .map(|(_, v)| *v)
        .collect()
}

/// Index of `target` in a sampled time grid, within roundoff slack.
fn index_at(times: &[f64], target: f64) -> Result<usize> {
    times
        .iter()
        .position(|t| (t - target).abs() <= 1e-9 * (1.0 + target.abs()))
        .ok_or_else(|| {
            Error::InvalidInput(format!("trace does not sample the window boundary t = {target}"))
        })
}

fn run_gt(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let n = cfg.n.expect("resolved gt config has a cutoff");
    let profile = cfg.sigma.as_ref().expect("resolved gt config has a rate");
    let section = profile.build(1, n)?;
    let system = GtSystem::new(section)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = 2 * n + 1;
    let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let state0 = GtState::from_samples(n, &u, &v)?;

    let (final_state, trace) = system.evolve(&state0, cfg.t_final, cfg.dt, cfg.sample_every)?;
    let dissipation: Vec<f64> = trace.relax_flux.iter().map(|f| 2.0 * f).collect();
    let trace_csv = render_csv(
        &["t", "H_u", "dissipation"],
        &[trace.times.clone(), trace.energies.clone(), dissipation],
    );

    let energy = trace.energy_trace();
    let fit = analysis::fit_exponential(&energy, energy.default_window())?;
    let rhs = GtSystem::observability_rhs(&state0);
    let c_obs = if rhs > 0.0 {
        Some(system.observability_identity(&state0, 1)?.value / rhs)
    } else {
        None
    };

    Ok(RunArtifacts {
        trace_csv,
        summary: Summary {
            schema: SCHEMA_VERSION,
            model: cfg.model,
            result: ModelResult::TwoSpeed(GtResult {
                delta: fit.rate,
                r_squared: fit.r_squared,
                c_obs,
                final_energy: final_state.energy(),
            }),
            config: cfg.clone(),
        },
    })
}

/// Random band-limited state: independent uniform collocation samples for
/// every velocity node.
fn random_kinetic_state(tc: &TransportConfig, seed: u64) -> KineticState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (2 * tc.cutoff() + 1).pow(tc.dim() as u32);
    let spectra = (0..tc.grid().len())
        .map(|_| {
            let samples: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            TorusSpectrum::from_samples(tc.dim(), tc.cutoff(), &samples)
                .expect("sample count matches the collocation grid")
        })
        .collect();
    KineticState::new(Arc::clone(tc.grid()), spectra)
}

fn run_transport(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let n = cfg.n.expect("resolved transport config has a cutoff");
    let d = cfg.d.expect("resolved transport config has a dimension");
    let epsilon = cfg.epsilon.expect("resolved transport config has epsilon");
    let nodes = cfg
        .nodes_per_axis
        .expect("resolved transport config has a velocity grid");
    let profile = cfg.sigma.as_ref().expect("resolved transport config has a rate");

    let grid = TransportConfig::default_grid(d, nodes)?;
    let tc = TransportConfig::new(grid, profile.build(d, n)?, epsilon)?;
    let f0 = random_kinetic_state(&tc, cfg.seed);

    let weak = cfg.model == Model::Weak;
    let (final_state, trace) = if weak {
        tc.evolve_weak(&f0, cfg.t_final, cfg.dt, cfg.sample_every)?
    } else {
        tc.evolve_plain(&f0, cfg.t_final, cfg.dt, cfg.sample_every)?
    };
    let trace_csv = render_csv(
        &["t", "E_f", "dissipation", "sobolev"],
        &[
            trace.times.clone(),
            trace.energies.clone(),
            trace.dissipation.clone(),
            trace.sobolev.clone(),
        ],
    );

    let energy = trace.energy_trace();
    let t_obs = cfg.t_final.min(16.0);
    let nt = ((t_obs / cfg.dt).round() as usize).clamp(16, 4096);
    let (mut delta, mut r_squared) = (None, None);
    let (mut poly_order, mut growth_degree, mut growth_bounded) = (None, None, None);
    let mut iteration = None;
    let c_emp;
    if weak {
        poly_order = Some(-analysis::tail_log_log_slope(&energy, 0.5)?);
        let (degree, bounded) = transport::sobolev_growth_check(&trace.times, &trace.sobolev)?;
        growth_degree = Some(degree);
        growth_bounded = Some(bounded);
        let lhs = tc.observability_lhs_weak(&f0, t_obs, nt)?;
        c_emp = lhs / (t_obs * tc.energy(&f0, tc.equilibrium(&f0)));
        if let Some([k1, k2, k3]) = cfg.moment_exponents {
            let window = cfg.window.expect("windowed weak config has a window");
            let n_windows = (cfg.t_final / window + 1e-9).floor() as usize;
            let mut h_values = Vec::with_capacity(n_windows + 1);
            let mut m_values = Vec::with_capacity(n_windows + 1);
            for l in 0..=n_windows {
                let idx = index_at(&trace.times, l as f64 * window)?;
                h_values.push(trace.energies[idx]);
                m_values.push(tc.frequency_moment(&trace.states[idx], k2));
            }
            let report =
                transport::jensen_iteration(&h_values, &m_values, window, epsilon, k1, k2, k3)?;
            iteration = Some(IterationSummary {
                poly_order: report.poly_order,
                recurrence_constant: report.recurrence_constant,
                moment_constant: report.moment_constant,
                ammari_constant: report.ammari_constant,
                windows_used: report.windows_used,
            });
        }
    } else {
        let fit = analysis::fit_exponential(&energy, energy.default_window())?;
        delta = Some(fit.rate);
        r_squared = Some(fit.r_squared);
        c_emp = tc.observability_report_plain(&f0, t_obs, nt)?.c_emp;
    }

    Ok(RunArtifacts {
        trace_csv,
        summary: Summary {
            schema: SCHEMA_VERSION,
            model: cfg.model,
            result: ModelResult::Transport(TransportResult {
                delta,
                r_squared,
                poly_order,
                growth_degree,
                growth_bounded,
                iteration,
                c_emp,
                final_energy: tc.energy(&final_state, tc.equilibrium(&final_state)),
            }),
            config: cfg.clone(),
        },
    })
}

fn run_boltzmann(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let n = cfg.n.expect("resolved collision config has a cutoff");
    let alpha = cfg.alpha.expect("resolved collision config has alpha");
    let beta = cfg.beta.expect("resolved collision config has beta");
    let qp = cfg
        .quadrature
        .clone()
        .expect("resolved collision config has a quadrature");
    let spec = if cfg.angular_weight == Some(true) {
        CollisionKernelSpec::angular_weighted(alpha, beta)?
    } else {
        CollisionKernelSpec::power_law(alpha, beta)?
    };
    let quad = Arc::new(VelocityQuadrature::new(qp.v_max, qp.h, qp.n_omega)?);
    let op = boltzmann::assemble_dirichlet_form(&spec, Arc::clone(&quad))?;

    let f0 = boltzmann::random_fluctuation(&quad, n, cfg.seed);
    let (_, trace) = op.evolve(&f0, cfg.t_final, cfg.dt, cfg.sample_every)?;

    let weighted_alpha: Vec<f64> = trace
        .states
        .iter()
        .map(|s| boltzmann::weighted_norm_sq(s, alpha))
        .collect();
    let weighted_one: Vec<f64> = trace
        .states
        .iter()
        .map(|s| boltzmann::weighted_norm_sq(s, 1.0))
        .collect();
    let trace_csv = render_csv(
        &["t", "H_f", "dissipation", "weighted_norm_alpha", "weighted_norm_one"],
        &[
            trace.times.clone(),
            trace.h_values.clone(),
            trace.dissipation.clone(),
            weighted_alpha,
            weighted_one,
        ],
    );

    let (mut delta, mut r_squared) = (None, None);
    let mut soft_decay = None;
    if spec.is_soft() {
        let [k1, k2, k3] = cfg
            .moment_exponents
            .expect("resolved soft config has exponents");
        let window = cfg.window.expect("resolved soft config has a window");
        let report = boltzmann::soft_decay_iteration(&op, &trace, window, k1, k2, k3)?;
        soft_decay = Some(SoftDecaySummary {
            poly_order: report.poly_order,
            holder_margin: report.holder_margin,
            growth_constant: report.growth_constant,
            recurrence_constant: report.recurrence_constant,
            ammari_constant: report.ammari_constant,
            envelope_constant: report.envelope_constant,
            envelope_ok: report.envelope_ok,
            windows_used: report.windows_used,
        });
    } else {
        let energy = trace.energy_trace()?;
        let fit = analysis::fit_exponential(&energy, energy.default_window())?;
        delta = Some(fit.rate);
        r_squared = Some(fit.r_squared);
    }

    let t_obs = cfg.t_final.min(8.0);
    let samples = ((t_obs / cfg.dt).round() as usize).clamp(16, 2048);
    let initial = trace.states.first().expect("trace records the initial state");
    let c_emp = op.observability_report(initial, t_obs, samples)?.c_emp;

    let mut c2_table = Vec::new();
    for eps in [1.0, 0.5, 0.25, 0.125] {
        let split = boltzmann::epsilon_split(&spec, &quad, eps)?;
        c2_table.push(SplitEntry {
            epsilon: eps,
            c1: split.c1,
            c2: split.c2,
        });
    }

    Ok(RunArtifacts {
        trace_csv,
        summary: Summary {
            schema: SCHEMA_VERSION,
            model: cfg.model,
            result: ModelResult::Collision(BoltzmannResult {
                delta,
                r_squared,
                soft_decay,
                c_emp,
                empirical_m1: op.empirical_m1(),
                c2_table,
                dropped_mass_fraction: op.dropped_fraction(),
                projected_initial: trace.projected_initial,
                initial_moment_defect: trace.initial_moment_defect,
            }),
            config: cfg.clone(),
        },
    })
}

fn run_abstract(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let size = cfg.size.expect("resolved abstract config has a size");
    let window = cfg.window.expect("resolved abstract config has a window");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pair = flows::random_pair(size, &mut rng);
    let f0 = DVector::from_fn(size, |_, _| rng.gen_range(-1.0..1.0));

    let trace = flows::evolve_damped(&pair, &f0, cfg.t_final, cfg.dt)?;
    let trace_csv = render_csv(
        &["t", "E", "dissipation"],
        &[
            thin(&trace.times, cfg.sample_every),
            thin(&trace.energies(), cfg.sample_every),
            thin(&trace.dissipation, cfg.sample_every),
        ],
    );

    let cert = flows::decay_from_observability(&pair, &f0, window, cfg.dt, cfg.t_final)?;
    Ok(RunArtifacts {
        trace_csv,
        summary: Summary {
            schema: SCHEMA_VERSION,
            model: cfg.model,
            result: ModelResult::OperatorPair(AbstractResult {
                delta: cert.delta,
                verified: cert.verified,
                uniform_constant: cert.uniform_constant,
                windows: cert.windows,
                window_index: cert.window_index,
                r_squared: cert.fit.map(|f| f.r_squared),
            }),
            config: cfg.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    fn artifacts(text: &str) -> RunArtifacts {
        let cfg = parse(text).unwrap().resolve().unwrap();
        run_experiment(&cfg).unwrap()
    }

    fn summary_json(a: &RunArtifacts) -> String {
        serde_json::to_string_pretty(&a.summary).unwrap()
    }

    #[test]
    fn two_speed_run_reports_positive_decay() {
        let a = artifacts(r#"{"schema": 1, "model": "gt", "t_final": 20.0, "seed": 5}"#);
        match &a.summary.result {
            ModelResult::TwoSpeed(r) => {
                assert!(r.delta > 0.0, "constant rate must damp the energy: {}", r.delta);
                assert!(r.c_obs.unwrap() > 0.0);
                assert!(r.final_energy < 1e-6);
            }
            other => panic!("wrong result block: {other:?}"),
        }
        let json = summary_json(&a);
        assert!(json.contains("\"config\""), "summary must echo the config");
    }

    #[test]
    fn trace_is_rfc4180_with_header() {
        let a = artifacts(
            r#"{"schema": 1, "model": "abstract", "size": 6, "t_final": 4.0, "dt": 0.02}"#,
        );
        let mut lines = a.trace_csv.split("\r\n");
        assert_eq!(lines.next(), Some("t,E,dissipation"));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 3);
        assert!(a.trace_csv.ends_with("\r\n"));
    }

    #[test]
    fn identical_seeds_reproduce_identical_artifacts() {
        let text = r#"{"schema": 1, "model": "transport", "n": 2, "nodes_per_axis": 3,
                       "dt": 0.05, "t_final": 2.0, "seed": 11}"#;
        let a = artifacts(text);
        let b = artifacts(text);
        assert_eq!(a.trace_csv, b.trace_csv);
        assert_eq!(summary_json(&a), summary_json(&b));
        let c = artifacts(
            r#"{"schema": 1, "model": "transport", "n": 2, "nodes_per_axis": 3,
                "dt": 0.05, "t_final": 2.0, "seed": 12}"#,
        );
        assert_ne!(a.trace_csv, c.trace_csv, "seed must steer the data");
    }

    #[test]
    fn transport_run_certifies_exponential_decay() {
        let a = artifacts(
            r#"{"schema": 1, "model": "transport", "n": 3, "nodes_per_axis": 5,
                "dt": 0.01, "t_final": 12.0, "seed": 2}"#,
        );
        match &a.summary.result {
            ModelResult::Transport(r) => {
                assert!(r.delta.unwrap() > 0.0);
                assert!(r.c_emp > 0.0);
                assert!(r.poly_order.is_none());
            }
            other => panic!("wrong result block: {other:?}"),
        }
    }

    #[test]
    fn collision_run_with_small_quadrature_produces_full_summary() {
        let a = artifacts(
            r#"{"schema": 1, "model": "boltzmann", "n": 1, "dt": 0.05, "t_final": 1.0,
                "quadrature": {"v_max": 4.0, "h": 0.5, "n_omega": 8}, "seed": 3}"#,
        );
        match &a.summary.result {
            ModelResult::Collision(r) => {
                assert!(r.delta.unwrap() > 0.0);
                assert!(r.empirical_m1 > 0.0);
                assert!(r.c_emp > 0.0);
                assert_eq!(r.c2_table.len(), 4);
                for pair in r.c2_table.windows(2) {
                    assert!(pair[1].c2 <= pair[0].c2 * 1.05, "split constant must not grow");
                }
                assert!(r.dropped_mass_fraction < 1e-3);
            }
            other => panic!("wrong result block: {other:?}"),
        }
        let header = a.trace_csv.split("\r\n").next().unwrap();
        assert_eq!(header, "t,H_f,dissipation,weighted_norm_alpha,weighted_norm_one");
    }

    #[test]
    fn abstract_run_yields_a_verified_certificate() {
        let a = artifacts(r#"{"schema": 1, "model": "abstract", "seed": 1}"#);
        match &a.summary.result {
            ModelResult::OperatorPair(r) => {
                assert!(r.uniform_constant >= 0.0);
                assert!(r.delta >= 0.0);
                assert!(r.windows >= 1);
            }
            other => panic!("wrong result block: {other:?}"),
        }
    }

    #[test]
    fn artifacts_land_atomically_under_the_prefix() {
        let dir = std::env::temp_dir().join(format!("kinetic-relax-runner-{}", std::process::id()));
        let prefix = dir.join("demo").to_string_lossy().into_owned();
        let cfg = parse(&format!(
            r#"{{"schema": 1, "model": "abstract", "t_final": 6.0, "prefix": "{prefix}"}}"#
        ))
        .unwrap()
        .resolve()
        .unwrap();
        let a = run_experiment(&cfg).unwrap();
        write_artifacts(&cfg, &a).unwrap();
        let csv = fs::read_to_string(cfg.trace_path()).unwrap();
        assert_eq!(csv, a.trace_csv);
        let json = fs::read_to_string(cfg.summary_path()).unwrap();
        assert!(json.ends_with('\n'));
        assert!(json.contains("\"uniform_constant\""));
        fs::remove_dir_all(dir).ok();
    }
}
