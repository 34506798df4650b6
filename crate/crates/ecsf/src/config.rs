//! Run configuration: strict JSON parsing (unknown keys are errors), default
//! values, and the mapping onto seed and flow parameters.

use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::geom;
use crate::seeds::{SeedKind, SeedSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Top-level configuration for a pipeline run. Every field has a default;
/// `{}` is a valid config (figure-eight seed, m = 2, N = 1024, cfl = 0.25).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: SeedSection,
    pub flow: FlowSection,
    pub monitors: MonitorSection,
    pub blowup: BlowupSection,
    pub output: OutputSection,
    /// Seed for deterministic parameter draws (perturbation amplitude from
    /// `epsilon_range` in sweeps). Recorded in the manifest.
    pub rng_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub kind: SeedKind,
    /// Segment count of the seed curve.
    pub n: usize,
    /// Circle radius.
    #[serde(rename = "R")]
    pub radius: f64,
    /// Perturbation amplitude.
    pub epsilon: f64,
    /// When set, the amplitude is drawn deterministically from this range
    /// using `rng_seed` (overrides `epsilon`).
    pub epsilon_range: Option<[f64; 2]>,
    /// Perturbation mode.
    pub mode: u32,
    /// Optional Ricci validation threshold c.
    pub ricci_c: Option<f64>,
}

impl Default for SeedSection {
    fn default() -> Self {
        SeedSection {
            kind: SeedKind::Whitney,
            n: 1024,
            radius: 1.0,
            epsilon: 0.05,
            epsilon_range: None,
            mode: 2,
            ricci_c: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    /// Ambient complex dimension.
    pub m: u32,
    pub cfl: f64,
    pub a_stop_factor: f64,
    pub dt_floor: f64,
    pub redistribute_every: u32,
    pub t_max: Option<f64>,
    pub max_steps: u64,
    pub snapshot_growth: f64,
    pub refine_threshold: f64,
    pub max_nodes: usize,
}

impl Default for FlowSection {
    fn default() -> Self {
        let f = FlowConfig::default();
        FlowSection {
            m: 2,
            cfl: f.cfl,
            a_stop_factor: f.a_stop_factor,
            dt_floor: f.dt_floor,
            redistribute_every: f.redistribute_every,
            t_max: f.t_max,
            max_steps: f.max_steps,
            snapshot_growth: f.snapshot_growth,
            refine_threshold: f.refine_threshold,
            max_nodes: f.max_nodes,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorSection {
    pub enabled: bool,
    /// Curvature growth horizon for the lemma verdicts.
    pub growth_horizon: f64,
}

impl Default for MonitorSection {
    fn default() -> Self {
        MonitorSection {
            enabled: true,
            growth_horizon: 50.0,
        }
    }
}

/// What the blow-up stage should assert about the singularity type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Type-II for figure-eight seeds, no assertion for loops.
    Auto,
    TypeIi,
    TypeI,
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupSection {
    pub enabled: bool,
    /// First capture level as a multiple of the initial max|k|.
    pub a0_factor: f64,
    /// Geometric spacing of capture levels.
    pub rho: f64,
    /// Rescaled window half-width.
    pub window: f64,
    pub expect: Expectation,
    /// Largest max|k| * spacing at which a frame still participates in the
    /// translator-fit verdict.
    pub fit_resolution_guard: f64,
}

impl Default for BlowupSection {
    fn default() -> Self {
        BlowupSection {
            // Capture from the initial curve: the indicator trends are
            // logarithmic in the curvature, so an early anchor is needed to
            // see them at desk scale.
            a0_factor: 1.0,
            enabled: true,
            rho: crate::blowup::DEFAULT_RHO,
            window: crate::blowup::DEFAULT_WINDOW,
            expect: Expectation::Auto,
            fit_resolution_guard: 0.2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".into(),
            plots: true,
        }
    }
}

impl RunConfig {
    /// Parse and validate a JSON config file. Unknown keys, malformed JSON
    /// and constraint violations are all reported with the offending key.
    pub fn parse(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed.n < 64 {
            return Err(Error::Config(format!(
                "seed.n must be at least 64, got {}",
                self.seed.n
            )));
        }
        if self.seed.radius <= 0.0 {
            return Err(Error::Config("seed.R must be positive".into()));
        }
        if self.seed.epsilon < 0.0 {
            return Err(Error::Config("seed.epsilon must be nonnegative".into()));
        }
        if self.seed.mode < 2 {
            return Err(Error::Config("seed.mode must be at least 2".into()));
        }
        if let Some([lo, hi]) = self.seed.epsilon_range {
            if !(0.0 <= lo && lo <= hi) {
                return Err(Error::Config(
                    "seed.epsilon_range must satisfy 0 <= lo <= hi".into(),
                ));
            }
        }
        if self.flow.m < 2 {
            return Err(Error::Config(format!(
                "flow.m must be at least 2, got {}",
                self.flow.m
            )));
        }
        self.flow_config().validate()?;
        if self.monitors.growth_horizon <= 1.0 {
            return Err(Error::Config(
                "monitors.growth_horizon must exceed 1".into(),
            ));
        }
        if self.blowup.a0_factor < 1.0 {
            return Err(Error::Config("blowup.a0_factor must be at least 1".into()));
        }
        if self.blowup.rho <= 1.0 {
            return Err(Error::Config("blowup.rho must exceed 1".into()));
        }
        if self.blowup.window <= 0.0 {
            return Err(Error::Config("blowup.window must be positive".into()));
        }
        if self.blowup.fit_resolution_guard <= 0.0 {
            return Err(Error::Config(
                "blowup.fit_resolution_guard must be positive".into(),
            ));
        }
        if self.output.dir.is_empty() {
            return Err(Error::Config("output.dir must not be empty".into()));
        }
        Ok(())
    }

    /// Effective perturbation amplitude (resolved from the range draw).
    pub fn effective_epsilon(&self) -> f64 {
        match self.seed.epsilon_range {
            Some([lo, hi]) => lo + (hi - lo) * geom::unit_draw(self.rng_seed),
            None => self.seed.epsilon,
        }
    }

    pub fn seed_spec(&self) -> SeedSpec {
        SeedSpec {
            kind: self.seed.kind,
            m: self.flow.m,
            n: self.seed.n,
            radius: self.seed.radius,
            amplitude: self.effective_epsilon(),
            mode: self.seed.mode,
            ricci_constant: self.seed.ricci_c,
        }
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            cfl: self.flow.cfl,
            a_stop_factor: self.flow.a_stop_factor,
            dt_floor: self.flow.dt_floor,
            redistribute_every: self.flow.redistribute_every,
            t_max: self.flow.t_max,
            max_steps: self.flow.max_steps,
            snapshot_growth: self.flow.snapshot_growth,
            refine_threshold: self.flow.refine_threshold,
            max_nodes: self.flow.max_nodes,
        }
    }

    /// Expectation with `auto` resolved against the seed kind.
    pub fn resolved_expectation(&self) -> Expectation {
        match self.blowup.expect {
            Expectation::Auto => match self.seed.kind {
                SeedKind::Circle => Expectation::None,
                _ => Expectation::TypeIi,
            },
            other => other,
        }
    }
}

/// Parse a config file into a validated [`RunConfig`].
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    RunConfig::parse(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = RunConfig::parse_str("{}").unwrap();
        assert_eq!(cfg.seed.kind, SeedKind::Whitney);
        assert_eq!(cfg.flow.m, 2);
        assert_eq!(cfg.seed.n, 1024);
        assert!((cfg.flow.cfl - 0.25).abs() < 1e-15);
    }

    #[test]
    fn circle_control_config() {
        let cfg =
            RunConfig::parse_str(r#"{"seed": {"kind": "circle", "R": 2.0}, "flow": {"m": 3}}"#)
                .unwrap();
        assert_eq!(cfg.seed.kind, SeedKind::Circle);
        assert_eq!(cfg.flow.m, 3);
        assert!((cfg.seed.radius - 2.0).abs() < 1e-15);
        assert_eq!(cfg.resolved_expectation(), Expectation::None);
    }

    #[test]
    fn cfl_out_of_range_rejected() {
        let err = RunConfig::parse_str(r#"{"flow": {"cfl": 0.9}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfl") && msg.contains("(0, 0.5]"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected_with_name() {
        let err = RunConfig::parse_str(r#"{"flow": {"cffl": 0.2}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cffl"), "{msg}");
        let err = RunConfig::parse_str(r#"{"speling": 1}"#).unwrap_err();
        assert!(err.to_string().contains("speling"));
    }

    #[test]
    fn config_round_trips_losslessly() {
        let mut cfg = RunConfig::default();
        cfg.flow.m = 4;
        cfg.seed.n = 777;
        cfg.rng_seed = 123456;
        cfg.blowup.rho = 1.7;
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = RunConfig::parse_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&cfg).unwrap());
    }

    #[test]
    fn epsilon_range_draw_is_deterministic() {
        let mut cfg = RunConfig::default();
        cfg.seed.epsilon_range = Some([0.01, 0.05]);
        cfg.rng_seed = 7;
        let a = cfg.effective_epsilon();
        let b = cfg.effective_epsilon();
        assert_eq!(a, b);
        assert!((0.01..=0.05).contains(&a));
        cfg.rng_seed = 8;
        assert_ne!(a, cfg.effective_epsilon());
    }
}
