//! The ε sweep: MLMC and standard MC for every tolerance and repetition.

use std::time::Instant;

use mlmc::{
    derive_seed, fit_rates, mlmc, standard_mc, Estimate64, MlmcConfig, MlmcMode, RateEstimates64, SchemeKind,
    StandardMcConfig,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, ModelConfig, PayoffConfig};
use crate::error::BenchError;

/// Outcome of one estimator call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRecord {
    pub estimate: Option<Estimate64>,
    pub error: Option<String>,
    /// `√((1.96σ)² + bias²)`, the quantity held to `ε`.
    pub rms_half_width: Option<f64>,
    pub cost_times_eps2: Option<f64>,
    /// Set when the estimator failed or `rms_half_width > ε`.
    pub flagged: bool,
}

impl MethodRecord {
    fn new(result: mlmc::Result<Estimate64>, epsilon: f64) -> Self {
        match result {
            Ok(est) => {
                let rms = est.rms_half_width();
                let scaled = est.total_cost as f64 * epsilon * epsilon;
                Self {
                    flagged: !(rms <= epsilon),
                    rms_half_width: Some(rms),
                    cost_times_eps2: Some(scaled),
                    estimate: Some(est),
                    error: None,
                }
            }
            Err(e) => Self {
                estimate: None,
                error: Some(e.to_string()),
                rms_half_width: None,
                cost_times_eps2: None,
                flagged: true,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub repetition: u32,
    pub seed: u64,
    pub mlmc: MethodRecord,
    pub std_mc: MethodRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRecord {
    pub epsilon: f64,
    /// `N_l` of the first repetition's MLMC run, indexed by level.
    pub n_l: Vec<u64>,
    /// Means over the repetitions that succeeded.
    pub mlmc_cost_times_eps2: Option<f64>,
    pub std_mc_cost_times_eps2: Option<f64>,
    pub runs: Vec<RunRecord>,
    /// Seconds spent in each method, summed over repetitions. Machine
    /// dependent, so kept out of the JSON report.
    #[serde(skip)]
    pub wall_seconds: WallTime,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct WallTime {
    pub mlmc: f64,
    pub std_mc: f64,
}

/// The parts of [`ExperimentConfig`] that affect results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub model: ModelConfig,
    pub payoff: PayoffConfig,
    pub scheme: SchemeKind,
    pub refinement_factor: u32,
    pub epsilon_list: Vec<f64>,
    pub mode: MlmcMode,
    pub seed: u64,
    pub repetitions: u32,
    pub n_warm: u64,
    pub l_max: u32,
    pub max_reallocations: usize,
    pub pilot_paths: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub build: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub settings: Settings,
    pub environment: Environment,
    pub records: Vec<EpsilonRecord>,
    /// Fitted on the deepest first-repetition MLMC run.
    pub rates: Option<RateEstimates64>,
    pub rates_error: Option<String>,
    pub flagged_runs: usize,
}

impl ExperimentReport {
    pub fn has_flags(&self) -> bool {
        self.flagged_runs > 0
    }
}

/// Seed for repetition `rep` at the `index`-th tolerance.
pub fn run_seed(base: u64, index: usize, rep: u32) -> u64 {
    derive_seed(derive_seed(base, index as u64), u64::from(rep))
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0u32), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / f64::from(n))
}

/// Runs both estimators for every tolerance and repetition. Estimator
/// failures are recorded and flagged rather than aborting the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    config.validate()?;
    let model = config.build_model()?;
    let payoff = config.build_payoff()?;
    let mlmc_cfg = MlmcConfig { refinement_factor: config.refinement_factor, mode: config.mode, ..MlmcConfig::default() };
    let std_cfg = StandardMcConfig { refinement_factor: config.refinement_factor, l_max: mlmc_cfg.l_max, ..StandardMcConfig::default() };

    let mut records = Vec::with_capacity(config.epsilon_list.len());
    for (index, &eps) in config.epsilon_list.iter().enumerate() {
        let mut wall = WallTime::default();
        let mut runs = Vec::new();
        for rep in 0..config.repetitions {
            let seed = run_seed(config.seed, index, rep);
            let t = Instant::now();
            let ml = mlmc(&model, &payoff, config.scheme, eps, &mlmc_cfg, seed);
            wall.mlmc += t.elapsed().as_secs_f64();
            let t = Instant::now();
            let sm = standard_mc(&model, &payoff, config.scheme, eps, &std_cfg, seed);
            wall.std_mc += t.elapsed().as_secs_f64();
            runs.push(RunRecord {
                repetition: rep,
                seed,
                mlmc: MethodRecord::new(ml, eps),
                std_mc: MethodRecord::new(sm, eps),
            });
        }
        let n_l = runs[0]
            .mlmc
            .estimate
            .as_ref()
            .map(|e| e.levels.iter().map(|s| s.n_samples).collect())
            .unwrap_or_default();
        records.push(EpsilonRecord {
            epsilon: eps,
            n_l,
            mlmc_cost_times_eps2: mean(runs.iter().filter_map(|r| r.mlmc.cost_times_eps2)),
            std_mc_cost_times_eps2: mean(runs.iter().filter_map(|r| r.std_mc.cost_times_eps2)),
            runs,
            wall_seconds: wall,
        });
    }

    let deepest = records
        .iter()
        .filter_map(|r| r.runs[0].mlmc.estimate.as_ref())
        .max_by_key(|e| (e.levels.len(), e.total_cost));
    let (rates, rates_error) = match deepest.map(|e| fit_rates(&e.levels, config.refinement_factor)) {
        Some(Ok(r)) => (Some(r), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, Some("no successful MLMC run".into())),
    };
    let flagged_runs = records
        .iter()
        .flat_map(|r| &r.runs)
        .map(|run| usize::from(run.mlmc.flagged) + usize::from(run.std_mc.flagged))
        .sum();

    Ok(ExperimentReport {
        settings: Settings {
            model: config.model.clone(),
            payoff: config.payoff.clone(),
            scheme: config.scheme,
            refinement_factor: config.refinement_factor,
            epsilon_list: config.epsilon_list.clone(),
            mode: config.mode,
            seed: config.seed,
            repetitions: config.repetitions,
            n_warm: mlmc_cfg.n_warm,
            l_max: mlmc_cfg.l_max,
            max_reallocations: mlmc_cfg.max_reallocations,
            pilot_paths: std_cfg.pilot_paths,
        },
        environment: Environment {
            seed: config.seed,
            build: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        },
        records,
        rates,
        rates_error,
        flagged_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig { epsilon_list: vec![0.5, 0.25], repetitions: 2, ..ExperimentConfig::default() }
    }

    #[test]
    fn record_layout() {
        let report = run_experiment(&small()).unwrap();
        assert_eq!(report.records.len(), 2);
        for rec in &report.records {
            assert_eq!(rec.runs.len(), 2);
            let first = rec.runs[0].mlmc.estimate.as_ref().unwrap();
            assert_eq!(rec.n_l, first.levels.iter().map(|s| s.n_samples).collect::<Vec<_>>());
            assert_ne!(rec.runs[0].seed, rec.runs[1].seed);
        }
        assert_eq!(report.flagged_runs, 0);
    }

    #[test]
    fn deterministic_model_has_no_statistical_error() {
        let mut cfg = small();
        cfg.model.sigma = 0.0;
        cfg.epsilon_list = vec![0.1];
        cfg.repetitions = 1;
        let report = run_experiment(&cfg).unwrap();
        let run = &report.records[0].runs[0];
        for method in [&run.mlmc, &run.std_mc] {
            let est = method.estimate.as_ref().unwrap();
            assert_eq!(est.statistical_variance, 0.0);
            assert!(!method.flagged);
        }
        // Only the pilot samples are needed: 100 per MLMC level, 1000 paths
        // of 16 + 8 steps for standard MC.
        let ml = run.mlmc.estimate.as_ref().unwrap();
        assert!(ml.levels.iter().all(|s| s.n_samples == 100));
        assert_eq!(run.std_mc.estimate.as_ref().unwrap().total_cost, 1000 * 24);
    }

    #[test]
    fn failures_are_flagged_not_fatal() {
        let mut cfg = small();
        cfg.mode = MlmcMode::FixedL;
        cfg.epsilon_list = vec![0.5, 1e-9];
        cfg.repetitions = 1;
        let report = run_experiment(&cfg).unwrap();
        assert!(report.records[0].runs[0].mlmc.estimate.is_some());
        let failed = &report.records[1].runs[0].mlmc;
        assert!(failed.flagged && failed.estimate.is_none() && failed.error.is_some());
        assert!(report.records[1].runs[0].std_mc.error.is_some());
        assert!(report.records[1].n_l.is_empty());
        assert!(report.has_flags());
    }
}
