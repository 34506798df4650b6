//! End-to-end orchestration: seed -> run -> verify -> blowup -> plot, with a
//! content-hashed manifest indexing every artifact. A pipeline exits cleanly
//! only when every enabled verdict passes, so the default configuration is a
//! one-command regression check of the whole flow.

use crate::blowup::{self, BlowupFrame};
use crate::config::{Expectation, RunConfig};
use crate::error::{Error, Result};
use crate::flow::{self, FlowHistory};
use crate::io::{self, BlowupDoc, FrameFitDoc, StageRecord};
use crate::monitors::{self, MonitorOptions};
use crate::plot;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct StageOutcome {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub ok: bool,
    pub stages: Vec<StageOutcome>,
    pub out_dir: PathBuf,
}

impl PipelineOutcome {
    fn record(&mut self, name: &str, status: StageStatus, detail: impl Into<String>) {
        self.stages.push(StageOutcome {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }
}

/// Run every enabled stage into `out_dir`. With `dry_run` the config is
/// validated and echoed but nothing is written.
pub fn run_pipeline(
    config: &RunConfig,
    out_dir: &Path,
    strict: bool,
    dry_run: bool,
) -> Result<PipelineOutcome> {
    config.validate()?;
    let mut outcome = PipelineOutcome {
        ok: true,
        stages: Vec::new(),
        out_dir: out_dir.to_path_buf(),
    };
    if dry_run {
        outcome.record("config", StageStatus::Ok, "validated (dry run)");
        return Ok(outcome);
    }
    let mut artifacts: Vec<PathBuf> = Vec::new();

    // Stage 1: seed.
    let seed = match config.seed_spec().build() {
        Ok(seed) => {
            io::write_curve_csv(&out_dir.join("seed.csv"), &seed)?;
            io::write_curve_json(&out_dir.join("seed.json"), &seed)?;
            artifacts.push(PathBuf::from("seed.csv"));
            artifacts.push(PathBuf::from("seed.json"));
            outcome.record(
                "seed",
                StageStatus::Ok,
                format!("{:?}, m = {}, {} nodes", config.seed.kind, seed.m(), seed.node_count()),
            );
            Some(seed)
        }
        Err(e) => {
            outcome.ok = false;
            outcome.record("seed", StageStatus::Failed, e.to_string());
            None
        }
    };

    // Stage 2: run.
    let history = match &seed {
        Some(seed) => match flow::run(seed, &config.flow_config()) {
            Ok(history) => {
                artifacts.extend(io::write_history(out_dir, &history)?);
                let failed_geometry =
                    history.termination == flow::Termination::GeometryFailure;
                outcome.record(
                    "run",
                    if failed_geometry {
                        StageStatus::Failed
                    } else {
                        StageStatus::Ok
                    },
                    format!(
                        "{:?} after {} steps, t = {:.6e}",
                        history.termination,
                        history.series.len() - 1,
                        history.t_final()
                    ),
                );
                if failed_geometry {
                    outcome.ok = false;
                }
                Some(history)
            }
            Err(e) => {
                outcome.ok = false;
                outcome.record("run", StageStatus::Failed, e.to_string());
                None
            }
        },
        None => {
            outcome.record("run", StageStatus::Skipped, "no seed");
            None
        }
    };

    // Stage 3: verify.
    if config.monitors.enabled {
        match &history {
            Some(history) => {
                let report = monitors::check_history_with(
                    history,
                    MonitorOptions {
                        growth_horizon: config.monitors.growth_horizon,
                    },
                );
                artifacts.extend(io::write_report(out_dir, &report)?);
                if report.all_pass() {
                    outcome.record("verify", StageStatus::Ok, "all verdicts pass");
                } else {
                    let failed: Vec<String> =
                        report.failed().iter().map(|v| v.id.clone()).collect();
                    outcome.ok = false;
                    outcome.record(
                        "verify",
                        StageStatus::Failed,
                        format!("failed: {}", failed.join(", ")),
                    );
                }
            }
            None => outcome.record("verify", StageStatus::Skipped, "no run"),
        }
    } else {
        outcome.record("verify", StageStatus::Skipped, "disabled");
    }

    // Stage 4: blowup.
    if config.blowup.enabled {
        match &history {
            Some(history) => match blowup_stage(config, history, out_dir) {
                Ok((doc, arts)) => {
                    artifacts.extend(arts);
                    if doc.pass {
                        outcome.record("blowup", StageStatus::Ok, doc.detail.clone());
                    } else {
                        outcome.ok = false;
                        outcome.record("blowup", StageStatus::Failed, doc.detail.clone());
                    }
                }
                Err(e) => {
                    outcome.ok = false;
                    outcome.record("blowup", StageStatus::Failed, e.to_string());
                }
            },
            None => outcome.record("blowup", StageStatus::Skipped, "no run"),
        }
    } else {
        outcome.record("blowup", StageStatus::Skipped, "disabled");
    }

    // Stage 5: plot.
    if config.output.plots {
        match plot::emit_plots(out_dir, strict) {
            Ok(arts) => {
                let n = arts.len();
                artifacts.extend(arts);
                outcome.record("plot", StageStatus::Ok, format!("{n} file(s)"));
            }
            Err(e) => {
                outcome.ok = false;
                outcome.record("plot", StageStatus::Failed, e.to_string());
            }
        }
    } else {
        outcome.record("plot", StageStatus::Skipped, "disabled");
    }

    let records: Vec<StageRecord> = outcome
        .stages
        .iter()
        .map(|s| StageRecord {
            name: s.name.clone(),
            status: match s.status {
                StageStatus::Ok => "ok".into(),
                StageStatus::Failed => "failed".into(),
                StageStatus::Skipped => "skipped".into(),
            },
            detail: s.detail.clone(),
        })
        .collect();
    io::write_manifest(out_dir, outcome.ok, records, &artifacts, config)?;
    Ok(outcome)
}

/// Capture frames, evaluate trends and the translator fit, write artifacts.
pub fn blowup_stage(
    config: &RunConfig,
    history: &FlowHistory,
    out_dir: &Path,
) -> Result<(BlowupDoc, Vec<PathBuf>)> {
    let a0 = config.blowup.a0_factor * history.initial_max_k;
    let frames = blowup::capture_frames(history, a0, config.blowup.rho, config.blowup.window)?;
    let indicator = blowup::type_indicator(history, &frames);
    let distances = blowup::intersection_distance(&frames);

    let mut fits: Vec<FrameFitDoc> = Vec::new();
    for (i, frame) in frames.iter().enumerate() {
        let fit = blowup::reaper_fit(frame).ok();
        fits.push(FrameFitDoc {
            j: frame.j,
            a: frame.a,
            t: frame.t,
            r_j: frame.r_j,
            delta: indicator.delta.get(i).copied(),
            resolution: frame.resolution,
            theta: fit.as_ref().map(|f| f.theta),
            speed: fit.as_ref().map(|f| f.speed),
            residual: fit.as_ref().map(|f| f.residual),
        });
    }

    // The fit verdict uses the last frame whose source snapshot still
    // resolved the tip.
    let fitted_idx = frames
        .iter()
        .enumerate()
        .rev()
        .find(|(_, f)| f.resolution <= config.blowup.fit_resolution_guard)
        .map(|(i, _)| i);
    let fit = fitted_idx.and_then(|i| blowup::reaper_fit(&frames[i]).ok());

    let expect = config.resolved_expectation();
    let mut pass = true;
    let mut notes: Vec<String> = Vec::new();
    notes.push(format!("{} frames", frames.len()));
    if let Some(g) = indicator.type_ii {
        notes.push(format!(
            "delta growth {:.2}x -> {}",
            indicator.growth,
            if g { "type-II" } else { "bounded (type-I)" }
        ));
    }
    match expect {
        Expectation::TypeIi => {
            if indicator.type_ii != Some(true) {
                pass = false;
                notes.push("expected type-II signature not observed".into());
            }
            notes.push(format!(
                "rescaled origin distance grew {:.2}x",
                distances.growth
            ));
            // Fit gate at arbitrary run depth: speed near one, residual
            // within the pre-asymptotic envelope and non-increasing over the
            // last four resolved frames. The sharp residual level at the
            // calibrated depth is the acceptance suite's business.
            match &fit {
                Some(f) if f.residual <= 0.1 && (0.9..=1.1).contains(&f.speed) => {
                    notes.push(format!(
                        "grim reaper fit: residual {:.3e}, speed {:.4}",
                        f.residual, f.speed
                    ));
                }
                Some(f) => {
                    pass = false;
                    notes.push(format!(
                        "grim reaper fit out of tolerance: residual {:.3e}, speed {:.4}",
                        f.residual, f.speed
                    ));
                }
                None => {
                    pass = false;
                    notes.push("no resolved frame for the translator fit".into());
                }
            }
            let resolved: Vec<f64> = fits
                .iter()
                .filter(|f| {
                    f.resolution <= config.blowup.fit_resolution_guard && f.residual.is_some()
                })
                .map(|f| f.residual.unwrap())
                .collect();
            if resolved.len() >= 4 {
                let tail = &resolved[resolved.len() - 4..];
                if tail.windows(2).any(|w| w[1] > w[0] + 1e-12) {
                    pass = false;
                    notes.push(format!(
                        "translator residual not settling over the last frames: {tail:?}"
                    ));
                }
            }
        }
        Expectation::TypeI => {
            if indicator.type_ii != Some(false) {
                pass = false;
                notes.push("expected bounded (type-I) indicator".into());
            }
        }
        Expectation::None | Expectation::Auto => {}
    }

    let doc = BlowupDoc {
        frames: frames.len(),
        t_hat: indicator.t_hat,
        delta_growth: indicator.growth,
        r_j_growth: distances.growth,
        type_ii: indicator.type_ii,
        unbounded_trend: distances.unbounded_trend,
        fitted_frame: fitted_idx.map(|i| frames[i].j),
        fit,
        pass,
        detail: notes.join("; "),
    };
    let artifacts = io::write_frames(out_dir, &frames, &fits, &indicator, &distances, &doc)?;
    Ok((doc, artifacts))
}

/// Capture frames for a run directory on disk (the `blowup` subcommand).
pub fn blowup_dir(
    config: &RunConfig,
    run_dir: &Path,
) -> Result<(BlowupDoc, Vec<BlowupFrame>)> {
    let history = io::read_history(run_dir)?;
    let (doc, _) = blowup_stage(config, &history, run_dir)?;
    let a0 = config.blowup.a0_factor * history.initial_max_k;
    let frames = blowup::capture_frames(&history, a0, config.blowup.rho, config.blowup.window)?;
    Ok((doc, frames))
}

/// Run several configs concurrently into numbered subdirectories.
/// Returns one outcome per config, in order.
pub fn run_sweep(
    configs: &[RunConfig],
    base_dir: &Path,
    strict: bool,
) -> Result<Vec<PipelineOutcome>> {
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (i, cfg) in configs.iter().enumerate() {
            let dir = base_dir.join(format!("sweep_{i:04}"));
            handles.push(scope.spawn(move || run_pipeline(cfg, &dir, strict, false)));
        }
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| Error::Config("sweep worker panicked".into()))?)
            .collect()
    })
}
