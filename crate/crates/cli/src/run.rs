use std::path::PathBuf;

use bilop::experiments::{
    holder_sweep, limsup_bound, local_estimate_check, offdiag_decay, restricted_type_harness, weighted_continuity,
    ExperimentReport, LimsupConfig, LocalConfig, OffDiagConfig, RestrictedConfig, SweepConfig, TrilinearForm,
};
use bilop::symbol::{bht_sign_symbol, truncate_near_line};
use bilop::weights::{ClassScan, Weight};
use bilop::{Grid, Interval, SingularLine, Symbol};
use num_complex::Complex;

use crate::config::{Experiment, RunConfig, SymbolKind, SymbolSpec};
use crate::CliError;

pub fn build_symbol(spec: &SymbolSpec) -> Result<Symbol, CliError> {
    let line = SingularLine::new(spec.lambda.0, spec.lambda.1)?;
    Ok(match spec.kind {
        SymbolKind::Product => Symbol::constant(Complex::new(1.0, 0.0)).with_name("product"),
        SymbolKind::Bht => bht_sign_symbol(&line),
        SymbolKind::TruncatedBht => truncate_near_line(&bht_sign_symbol(&line), &line, spec.scale)?,
    })
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    SweepConfig {
        triples: cfg.triples.clone(),
        members: cfg.members,
        period: cfg.grid.period,
        n: cfg.grid.n,
        seed: cfg.seed,
        ..SweepConfig::default()
    }
}

/// Runs the experiment named by `cfg.kind` and returns its report.
pub fn execute(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let sigma = build_symbol(&cfg.symbol)?;
    let grid = Grid::centered(cfg.grid.period, cfg.grid.n)?;
    let report = match cfg.kind {
        Experiment::OffdiagDecay => {
            let oc = OffDiagConfig {
                interval_center: cfg.interval.center,
                interval_length: cfg.interval.length,
                e_offsets: cfg.ladder.offsets.clone(),
                f_offsets: cfg.ladder.offsets.iter().map(|d| -d).collect(),
                exponents: cfg.triples[0],
                ..OffDiagConfig::default()
            };
            offdiag_decay(&sigma, &grid, &oc)?
        }
        Experiment::HolderSweep => holder_sweep(&sigma, &sweep_config(cfg))?,
        Experiment::WeightedContinuity => {
            let wc = cfg.weight.as_ref().ok_or_else(|| CliError::Usage("weighted_continuity needs [weight]".into()))?;
            let w = Weight::from_spec(&wc.spec, wc.theta)?;
            weighted_continuity(&sigma, &w, wc.theta, wc.l, &ClassScan::default(), &sweep_config(cfg))?
        }
        Experiment::RestrictedType => {
            let rc = RestrictedConfig {
                inv_p: cfg.inv_p,
                configurations: cfg.configurations,
                period: cfg.grid.period,
                n: cfg.grid.n,
                seed: cfg.seed,
                ..RestrictedConfig::default()
            };
            let interval = Interval::new(cfg.interval.center, cfg.interval.length)?;
            restricted_type_harness(&TrilinearForm::operator(sigma, Some(interval)), &rc)?
        }
        Experiment::LimsupBound => {
            let (f, g) = sweep_config(cfg).member(0, &grid)?;
            let lc = LimsupConfig { center: cfg.interval.center, ladder: cfg.ladder.lengths.clone(), ..LimsupConfig::default() };
            limsup_bound(&sigma, cfg.symbol.scale, &f, &g, &lc)?
        }
        Experiment::LocalEstimate => {
            let lc = LocalConfig {
                interval_center: cfg.interval.center,
                interval_length: cfg.interval.length,
                triple: cfg.triples[0],
                delta: cfg.delta,
                ensemble: sweep_config(cfg),
                ..LocalConfig::default()
            };
            local_estimate_check(&sigma, &lc)?
        }
    };
    Ok(report)
}

/// Outcome of [`run`]: the report and the files written for it.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: ExperimentReport,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    /// 0 when every verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.pass() {
            0
        } else {
            1
        }
    }
}

/// Runs the experiment and writes `<id>.json`, one CSV per table and the
/// resolved config into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let report = execute(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::Io(format!("{}: {e}", cfg.output_dir.display())))?;
    let mut artifacts = report.write_artifacts(&cfg.output_dir)?;
    let conf = cfg.output_dir.join(format!("{}.conf", report.id));
    std::fs::write(&conf, cfg.to_text()).map_err(|e| CliError::Io(format!("{}: {e}", conf.display())))?;
    artifacts.push(conf);
    Ok(RunOutcome { report, artifacts })
}
