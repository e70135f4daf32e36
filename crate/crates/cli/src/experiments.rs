use rayon::prelude::*;
use resonant::compiler::{compile, CompileOptions, ExecutionMode, FidelityReport, GateRecord};
use resonant::dynamics::{propagate, write_trajectory_csv, PropagationOptions, QuantumState, DEFAULT_TOLERANCE};
use resonant::model::{FrequencyGenerator, System};
use resonant::spectra::{
    fit_power_law, goe_gap_curve, goe_ratio_ensemble, integrable_ratio_ensemble, integrable_selectivity_curve,
    min_coupled_gap, spacing_statistics, PowerLawFit, RatioEnsemble, ScalingCurve, GOE_MEAN_RATIO,
    POISSON_MEAN_RATIO, SELECTIVITY_CONSTANT,
};
use serde::Serialize;

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub const DEFAULT_SAMPLES: usize = 101;
pub const DEFAULT_HISTOGRAM_BINS: usize = 40;
/// Histogram range in units of the mean spacing.
pub const HISTOGRAM_RANGE: f64 = 4.0;
/// Waveform samples per period of the fastest carrier.
pub const WAVEFORM_OVERSAMPLING: f64 = 20.0;
pub const DEFAULT_SELECTIVITY_GAMMA: f64 = 1e-3;
pub const DEFAULT_SCALING_KAPPA_RANGE: (f64, f64) = (2e-4, 1e-3);
pub const DEFAULT_RATIO_SIZE: usize = 11;
pub const DEFAULT_GOE_DIM: usize = 500;

/// Everything a verb produced, ready to be committed to disk.
pub struct RunResult {
    pub outputs: Outputs,
    pub seeds: Vec<u64>,
    /// Printed to stdout after the files are written.
    pub summary: String,
}

/// Options shared by all verbs after command-line overrides.
pub struct RunContext {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl RunContext {
    fn tolerance(&self, loaded: &LoadedConfig) -> CliResult<f64> {
        let tol = self.tol.or(loaded.config.tol).unwrap_or(DEFAULT_TOLERANCE);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::config("tol", format!("{tol} must be positive")));
        }
        Ok(tol)
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| CliError::from(resonant::Error::from(e));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| CliError::from(resonant::Error::from(e.into_error())))
}

fn initial_state(loaded: &LoadedConfig, system: &System) -> CliResult<QuantumState> {
    let basis = system.basis();
    let index = match &loaded.config.initial_state {
        Some(occ) => basis.index(occ).map_err(|e| CliError::config("initial_state", e.to_string()))?,
        None => 0,
    };
    Ok(QuantumState::basis(basis.dim(), index))
}

#[derive(Serialize)]
struct SpectrumSummary {
    dim: usize,
    levels: usize,
    mean_ratio: f64,
    poisson_mean_ratio: f64,
    goe_mean_ratio: f64,
    degenerate_spacings: usize,
    line_count: usize,
    min_coupled_gap: Option<f64>,
}

pub fn spectrum(loaded: &mut LoadedConfig, _ctx: &RunContext) -> CliResult<RunResult> {
    let system = loaded.system()?;
    let bins = loaded.config.histogram_bins.unwrap_or(DEFAULT_HISTOGRAM_BINS);
    let report = spacing_statistics(system.energies().as_slice())?;
    let lines = system.lines();
    let summary = SpectrumSummary {
        dim: system.dim(),
        levels: report.eigenvalues.len(),
        mean_ratio: report.mean_ratio,
        poisson_mean_ratio: POISSON_MEAN_RATIO,
        goe_mean_ratio: GOE_MEAN_RATIO,
        degenerate_spacings: report.degenerate_spacings,
        line_count: lines.len(),
        min_coupled_gap: min_coupled_gap(lines),
    };

    let mut out = Outputs::default();
    out.json("spectrum.json", &summary)?;
    let basis = system.basis();
    out.add(
        "energies.csv",
        csv_table(
            &["index", "occupations", "energy"],
            system.energies().iter().enumerate().map(|(i, e)| {
                let occ: Vec<String> = basis.occupations(i).iter().map(usize::to_string).collect();
                vec![i.to_string(), occ.join(" "), e.to_string()]
            }),
        )?,
    );
    out.add(
        "lines.csv",
        csv_table(
            &["upper", "lower", "frequency", "strength"],
            lines.iter().map(|l| {
                vec![
                    l.upper.to_string(),
                    l.lower.to_string(),
                    l.frequency.to_string(),
                    l.strength().to_string(),
                ]
            }),
        )?,
    );
    out.csv("ratios.csv", |w| report.write_ratios_csv(w))?;
    out.csv("spacing_histogram.csv", |w| {
        report.write_spacing_histogram_csv(w, bins, HISTOGRAM_RANGE)
    })?;
    Ok(RunResult {
        outputs: out,
        seeds: Vec::new(),
        summary: format!(
            "dimension {}  <r> = {:.4} (Poisson {:.4}, GOE {:.4})  lines {}",
            summary.dim, summary.mean_ratio, POISSON_MEAN_RATIO, GOE_MEAN_RATIO, summary.line_count
        ),
    })
}

#[derive(Serialize)]
struct EvolveSummary {
    duration: f64,
    tol: f64,
    initial_state: usize,
    final_probabilities: Vec<f64>,
    initial_energy: f64,
    final_energy: f64,
    accepted_steps: usize,
    rejected_steps: usize,
    max_norm_drift: f64,
}

pub fn evolve(loaded: &mut LoadedConfig, ctx: &RunContext) -> CliResult<RunResult> {
    let system = loaded.system()?;
    let schedule = loaded.schedule()?;
    let tol = ctx.tolerance(loaded)?;
    let psi0 = initial_state(loaded, &system)?;
    let samples = loaded.config.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(CliError::config("samples", "need at least two trajectory samples"));
    }
    if let Some(w) = &loaded.config.watch {
        if let Some(bad) = w.iter().find(|&&i| i >= system.dim()) {
            return Err(CliError::config("watch", format!("basis index {bad} out of range")));
        }
    }
    let duration = schedule.duration();
    let options = PropagationOptions {
        tol,
        sample_times: (0..samples)
            .map(|k| duration * k as f64 / (samples - 1) as f64)
            .collect(),
    };
    let result = propagate(system.energies(), system.control(), &schedule, &psi0, (0.0, duration), &options)?;

    let max_carrier = schedule.max_carrier();
    let rate = if max_carrier > 0.0 {
        WAVEFORM_OVERSAMPLING * max_carrier / std::f64::consts::TAU
    } else if duration > 0.0 {
        (samples - 1) as f64 / duration
    } else {
        1.0
    };
    let energies = system.energies();
    let summary = EvolveSummary {
        duration,
        tol,
        initial_state: psi0.amplitudes.iter().position(|a| a.norm() > 0.0).unwrap_or(0),
        final_probabilities: result.final_state.probabilities(),
        initial_energy: psi0.diagonal_expectation(energies),
        final_energy: result.final_state.diagonal_expectation(energies),
        accepted_steps: result.stats.accepted,
        rejected_steps: result.stats.rejected,
        max_norm_drift: result.max_norm_drift(),
    };

    let mut out = Outputs::default();
    out.json("evolve.json", &summary)?;
    out.csv("trajectory.csv", |w| {
        write_trajectory_csv(w, &result.samples, loaded.config.watch.as_deref())
    })?;
    out.csv("waveform.csv", |w| schedule.write_waveform_csv(w, rate))?;
    Ok(RunResult {
        outputs: out,
        seeds: Vec::new(),
        summary: format!(
            "T = {duration}  steps {} (+{} rejected)  norm drift {:.2e}",
            summary.accepted_steps, summary.rejected_steps, summary.max_norm_drift
        ),
    })
}

#[derive(Serialize)]
struct GatePoint {
    gamma_eff: f64,
    duration: f64,
    report: FidelityReport,
    gates: Vec<GateRecord>,
}

fn compile_options(loaded: &LoadedConfig, gamma_eff: f64) -> CompileOptions {
    let options = CompileOptions::new(gamma_eff);
    match loaded.config.envelope {
        Some(envelope) => options.with_envelope(envelope),
        None => options,
    }
}

pub fn gate(loaded: &mut LoadedConfig, ctx: &RunContext) -> CliResult<RunResult> {
    let system = loaded.system()?;
    let circuit = loaded.circuit()?;
    let tol = ctx.tolerance(loaded)?;
    let mode = loaded.config.mode.unwrap_or(ExecutionMode::Full);
    let gammas = loaded.config.gamma_list()?.to_vec();
    let psi0 = match loaded.config.initial_state {
        Some(_) => Some(initial_state(loaded, &system)?),
        None => None,
    };

    let points = gammas
        .par_iter()
        .map(|&gamma_eff| {
            let compiled = compile(&circuit, &system, &compile_options(loaded, gamma_eff))?.with_tolerance(tol)?;
            let report = match &psi0 {
                Some(psi) => compiled.state_report(psi, mode)?,
                None => compiled.process_report(mode)?,
            };
            Ok((
                GatePoint {
                    gamma_eff,
                    duration: compiled.duration(),
                    report,
                    gates: compiled.gates().to_vec(),
                },
                compiled.schedule().to_json()?,
            ))
        })
        .collect::<resonant::Result<Vec<_>>>()?;

    let mut table = format!(
        "{:>12}  {:>14}  {:>12}  {:>10}  {:>10}\n",
        "gamma_eff", "duration", "fidelity", "leakage", "steps"
    );
    let mut out = Outputs::default();
    for (k, (point, schedule)) in points.iter().enumerate() {
        let r = &point.report;
        let fidelity = r.process_fidelity.or(r.state_fidelity).unwrap_or(f64::NAN);
        let leakage = r.leakage.map_or("-".to_string(), |l| format!("{l:.3e}"));
        let steps = r.steps.map_or("-".to_string(), |s| s.to_string());
        table.push_str(&format!(
            "{:>12.4e}  {:>14.6}  {:>12.9}  {:>10}  {:>10}\n",
            point.gamma_eff, point.duration, fidelity, leakage, steps
        ));
        out.add(format!("schedule_{k}.json"), schedule.clone().into_bytes());
    }
    let reports: Vec<&GatePoint> = points.iter().map(|(p, _)| p).collect();
    out.json("gate.json", &reports)?;
    Ok(RunResult {
        outputs: out,
        seeds: Vec::new(),
        summary: table.trim_end().to_string(),
    })
}

#[derive(Serialize)]
struct RwaScanSummary {
    gamma_eff: Vec<f64>,
    infidelity_full: Vec<f64>,
    infidelity_rwa: Vec<f64>,
    /// Power law of the full-dynamics infidelity against γ_eff, when at
    /// least three strictly positive points exist.
    fit: Option<PowerLawFit>,
}

pub fn rwa_scan(loaded: &mut LoadedConfig, ctx: &RunContext) -> CliResult<RunResult> {
    let system = loaded.system()?;
    let circuit = loaded.circuit()?;
    let tol = ctx.tolerance(loaded)?;
    let mut gammas = loaded.config.gamma_list()?.to_vec();
    gammas.sort_by(|a, b| b.total_cmp(a));

    let rows = gammas
        .par_iter()
        .map(|&gamma_eff| {
            let compiled = compile(&circuit, &system, &compile_options(loaded, gamma_eff))?.with_tolerance(tol)?;
            let full = compiled.process_report(ExecutionMode::Full)?;
            let rwa = compiled.process_report(ExecutionMode::Rwa)?;
            Ok((compiled.duration(), full, rwa))
        })
        .collect::<resonant::Result<Vec<_>>>()?;

    let infidelity = |r: &FidelityReport| 1.0 - r.process_fidelity.unwrap_or(f64::NAN);
    let full: Vec<f64> = rows.iter().map(|(_, f, _)| infidelity(f)).collect();
    let rwa: Vec<f64> = rows.iter().map(|(_, _, r)| infidelity(r)).collect();
    let fit = if full.len() >= 3 && full.iter().all(|v| *v > 0.0) {
        Some(fit_power_law(&gammas, &full)?)
    } else {
        None
    };

    let mut out = Outputs::default();
    out.add(
        "rwa_scan.csv",
        csv_table(
            &["gamma_eff", "duration", "infidelity_full", "infidelity_rwa", "leakage_full", "steps"],
            rows.iter().enumerate().map(|(k, (duration, f, _))| {
                vec![
                    gammas[k].to_string(),
                    duration.to_string(),
                    full[k].to_string(),
                    rwa[k].to_string(),
                    f.leakage.map_or(String::new(), |l| l.to_string()),
                    f.steps.map_or(String::new(), |s| s.to_string()),
                ]
            }),
        )?,
    );
    let summary = match &fit {
        Some(fit) => format!(
            "infidelity ∝ γ^{:.3} [{:.3}, {:.3}] over {} points",
            fit.exponent,
            fit.ci_low,
            fit.ci_high,
            gammas.len()
        ),
        None => format!("{} points, too few positive infidelities for a fit", gammas.len()),
    };
    out.json(
        "rwa_scan.json",
        &RwaScanSummary {
            gamma_eff: gammas,
            infidelity_full: full,
            infidelity_rwa: rwa,
            fit,
        },
    )?;
    Ok(RunResult {
        outputs: out,
        seeds: Vec::new(),
        summary,
    })
}

#[derive(Serialize)]
struct SelectivitySummary {
    gamma_eff: f64,
    selectivity_constant: f64,
    kappa_range: (f64, f64),
    integrable: Option<ScalingCurve>,
    goe: Option<ScalingCurve>,
}

pub fn selectivity_scaling(loaded: &mut LoadedConfig, ctx: &RunContext) -> CliResult<RunResult> {
    let cfg = &loaded.config;
    if cfg.sizes.is_empty() && cfg.dims.is_empty() {
        return Err(CliError::config("sizes", "give `sizes`, `dims`, or both"));
    }
    let seeds = cfg.resolve_seeds(ctx.seed);
    let gamma_eff = match cfg.gamma_eff.as_slice() {
        [] => DEFAULT_SELECTIVITY_GAMMA,
        [g] if *g > 0.0 && g.is_finite() => *g,
        _ => return Err(CliError::config("gamma_eff", "expects a single positive rate")),
    };
    let generator = FrequencyGenerator {
        kappa_range: cfg.kappa_range.unwrap_or(DEFAULT_SCALING_KAPPA_RANGE),
    };
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    let mut dims = cfg.dims.clone();
    dims.sort_unstable();

    let integrable = if sizes.is_empty() {
        None
    } else {
        Some(integrable_selectivity_curve(&generator, &sizes, &seeds, gamma_eff, SELECTIVITY_CONSTANT)?)
    };
    let goe = if dims.is_empty() { None } else { Some(goe_gap_curve(&dims, &seeds)?) };

    let mut out = Outputs::default();
    let mut lines = Vec::new();
    if let Some(curve) = &integrable {
        out.csv("selectivity_integrable.csv", |w| curve.write_csv(w))?;
        lines.push(format!(
            "integrable T_sel ∝ n^{:.3} [{:.3}, {:.3}]",
            curve.fit.exponent, curve.fit.ci_low, curve.fit.ci_high
        ));
    }
    if let Some(curve) = &goe {
        out.csv("min_gap_goe.csv", |w| curve.write_csv(w))?;
        lines.push(format!(
            "GOE min gap ∝ D^{:.3} [{:.3}, {:.3}]",
            curve.fit.exponent, curve.fit.ci_low, curve.fit.ci_high
        ));
    }
    out.json(
        "selectivity_scaling.json",
        &SelectivitySummary {
            gamma_eff,
            selectivity_constant: SELECTIVITY_CONSTANT,
            kappa_range: generator.kappa_range,
            integrable,
            goe,
        },
    )?;
    Ok(RunResult {
        outputs: out,
        seeds,
        summary: lines.join("\n"),
    })
}

#[derive(Serialize)]
struct EnsembleSummary {
    #[serde(flatten)]
    ensemble: RatioEnsemble,
    p_value_poisson: Option<f64>,
    p_value_goe: Option<f64>,
}

impl EnsembleSummary {
    fn new(ensemble: RatioEnsemble) -> Self {
        EnsembleSummary {
            p_value_poisson: ensemble.p_value(POISSON_MEAN_RATIO).ok(),
            p_value_goe: ensemble.p_value(GOE_MEAN_RATIO).ok(),
            ensemble,
        }
    }
}

#[derive(Serialize)]
struct ChaosSummary {
    n: usize,
    d: usize,
    goe_dim: usize,
    poisson_mean_ratio: f64,
    goe_mean_ratio: f64,
    integrable: EnsembleSummary,
    goe: EnsembleSummary,
}

pub fn chaos_compare(loaded: &mut LoadedConfig, ctx: &RunContext) -> CliResult<RunResult> {
    let cfg = &loaded.config;
    let seeds = cfg.resolve_seeds(ctx.seed);
    let n = cfg.n.unwrap_or(DEFAULT_RATIO_SIZE);
    let d = cfg.d.unwrap_or(2);
    let goe_dim = cfg.goe_dim.unwrap_or(DEFAULT_GOE_DIM);
    let bins = cfg.histogram_bins.unwrap_or(DEFAULT_HISTOGRAM_BINS);
    let generator = FrequencyGenerator {
        kappa_range: cfg.kappa_range.unwrap_or(FrequencyGenerator::default().kappa_range),
    };

    let integrable = integrable_ratio_ensemble(&generator, n, d, &seeds)?;
    let goe = goe_ratio_ensemble(goe_dim, &seeds)?;

    let first = seeds[0];
    let integrable_spectrum = resonant::model::build_hamiltonian(&generator.generate(n, d, first)?);
    let integrable_report = spacing_statistics(integrable_spectrum.as_slice())?;
    let goe_report = spacing_statistics(resonant::model::ChaoticModel::new(goe_dim, first).spectrum()?.as_slice())?;

    let mut out = Outputs::default();
    out.add(
        "ratio_ensembles.csv",
        csv_table(
            &["ensemble", "seed", "mean_ratio"],
            [("integrable", &integrable), ("goe", &goe)].into_iter().flat_map(|(name, e)| {
                e.seeds
                    .iter()
                    .zip(&e.per_seed)
                    .map(move |(s, r)| vec![name.to_string(), s.to_string(), r.to_string()])
            }),
        )?,
    );
    out.csv("spacing_histogram_integrable.csv", |w| {
        integrable_report.write_spacing_histogram_csv(w, bins, HISTOGRAM_RANGE)
    })?;
    out.csv("spacing_histogram_goe.csv", |w| {
        goe_report.write_spacing_histogram_csv(w, bins, HISTOGRAM_RANGE)
    })?;
    let summary = format!(
        "integrable <r> = {:.4} ± {:.4} (Poisson {:.4})\nGOE        <r> = {:.4} ± {:.4} (GOE {:.4})",
        integrable.mean, integrable.standard_error, POISSON_MEAN_RATIO, goe.mean, goe.standard_error, GOE_MEAN_RATIO
    );
    out.json(
        "chaos_compare.json",
        &ChaosSummary {
            n,
            d,
            goe_dim,
            poisson_mean_ratio: POISSON_MEAN_RATIO,
            goe_mean_ratio: GOE_MEAN_RATIO,
            integrable: EnsembleSummary::new(integrable),
            goe: EnsembleSummary::new(goe),
        },
    )?;
    Ok(RunResult {
        outputs: out,
        seeds,
        summary,
    })
}
