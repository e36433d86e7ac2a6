//! Run configuration, read from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fhtgibbs_core::{Geometry, PotentialSpec, ScheduleKind, SiteOrder};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub fht: FhtConfig,
    #[serde(default)]
    pub io: IoConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    Chain,
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub geometry: GeometryName,
    pub d: usize,
    pub lambda_factor: f64,
    #[serde(default)]
    pub cubic_a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleName {
    Linear,
    Geometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    AllPlus,
    AllMinus,
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub beta0: f64,
    pub beta: f64,
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleName,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_mala_steps")]
    pub mala_steps: usize,
    /// Unscaled Langevin step; the step actually taken is `dt * scale`.
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub scale: f64,
    #[serde(default = "default_ensembles")]
    pub n_ensembles: usize,
    #[serde(default = "default_particles")]
    pub particles_per_ensemble: usize,
    /// ULA steps per particle per level; default `round(1 / (levels * dt * scale))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ula_substeps: Option<usize>,
    #[serde(default = "default_stretch")]
    pub stretch: f64,
    #[serde(default = "default_init")]
    pub init: InitMode,
    /// Unscaled time of the initial MALA run at `beta0`.
    #[serde(default = "default_burn_in")]
    pub burn_in_time: f64,
    /// Unscaled time of the MALA run at `beta`; default matches the step
    /// budget of burn-in plus annealing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_time: Option<f64>,
    #[serde(default)]
    pub baseline: bool,
    /// MALA steps between trace points.
    #[serde(default = "default_trace_every")]
    pub trace_every: usize,
    #[serde(default = "yes")]
    pub snooker: bool,
    #[serde(default = "yes")]
    pub birth_death: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FhtConfig {
    pub q: usize,
    pub half_width: f64,
    pub rank: usize,
    pub oversampling: f64,
    pub svd_tol: f64,
    pub sketch_seed: u64,
    pub sample_grid: usize,
}

impl Default for FhtConfig {
    fn default() -> Self {
        FhtConfig {
            q: 15,
            half_width: 2.5,
            rank: 3,
            oversampling: 2.0,
            svd_tol: 1e-8,
            sketch_seed: 0,
            sample_grid: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            out: PathBuf::from("out"),
            seed: 0,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseConfig {
    /// Site pairs for marginals and moments (0-based; grid sites are
    /// `row * side + col`).
    pub pairs: Vec<(usize, usize)>,
    /// Draws from the fitted model used for its ratio report; 0 skips it.
    pub model_samples: usize,
    pub grid_points: usize,
    pub ball_radius: f64,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            pairs: vec![(1, 0)],
            model_samples: 0,
            grid_points: 200,
            ball_radius: 0.5,
        }
    }
}

fn default_schedule() -> ScheduleName {
    ScheduleName::Geometric
}
fn default_levels() -> usize {
    10
}
fn default_mala_steps() -> usize {
    700
}
fn default_dt() -> f64 {
    0.0005
}
fn default_ensembles() -> usize {
    60
}
fn default_particles() -> usize {
    100
}
fn default_stretch() -> f64 {
    2.0
}
fn default_init() -> InitMode {
    InitMode::AllPlus
}
fn default_burn_in() -> f64 {
    7.0
}
fn default_trace_every() -> usize {
    100
}
fn yes() -> bool {
    true
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.to_string()))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// The resolved configuration with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.potential;
        self.potential_spec()
            .validate()
            .map_err(|e| CliError::Config(format!("potential: {e}")))?;
        check(p.cubic_a.is_finite(), "potential.cubic_a must be finite")?;
        let s = &self.sampler;
        check(
            s.beta0 > 0.0 && s.beta0.is_finite(),
            "sampler.beta0 must be positive",
        )?;
        check(
            s.beta > s.beta0 && s.beta.is_finite(),
            "sampler.beta must exceed sampler.beta0",
        )?;
        check(s.levels >= 1, "sampler.levels must be at least 1")?;
        check(
            s.dt > 0.0 && s.dt.is_finite(),
            "sampler.dt must be positive",
        )?;
        check(
            s.scale > 0.0 && s.scale.is_finite(),
            "sampler.scale must be positive",
        )?;
        check(s.n_ensembles >= 1, "sampler.n_ensembles must be at least 1")?;
        check(
            s.particles_per_ensemble >= 1,
            "sampler.particles_per_ensemble must be at least 1",
        )?;
        check(
            s.ula_substeps.is_none_or(|v| v >= 1),
            "sampler.ula_substeps must be at least 1",
        )?;
        check(
            s.stretch > 1.0 && s.stretch.is_finite(),
            "sampler.stretch must exceed 1",
        )?;
        check(
            s.burn_in_time >= 0.0 && s.burn_in_time.is_finite(),
            "sampler.burn_in_time must be nonnegative",
        )?;
        check(
            s.baseline_time.is_none_or(|t| t >= 0.0 && t.is_finite()),
            "sampler.baseline_time must be nonnegative",
        )?;
        check(s.trace_every >= 1, "sampler.trace_every must be at least 1")?;
        let f = &self.fht;
        check(
            f.half_width > 0.0 && f.half_width.is_finite(),
            "fht.half_width must be positive",
        )?;
        check(f.rank >= 1, "fht.rank must be at least 1")?;
        check(
            f.oversampling >= 1.5 && f.oversampling.is_finite(),
            "fht.oversampling must be at least 1.5",
        )?;
        check(
            (0.0..1.0).contains(&f.svd_tol),
            "fht.svd_tol must lie in [0, 1)",
        )?;
        check(f.sample_grid >= 64, "fht.sample_grid must be at least 64")?;
        let dg = &self.diagnose;
        for &(i, j) in &dg.pairs {
            check(
                i < p.d && j < p.d && i != j,
                &format!("diagnose.pairs: invalid pair ({i}, {j}) for d = {}", p.d),
            )?;
        }
        check(
            dg.grid_points >= 2,
            "diagnose.grid_points must be at least 2",
        )?;
        check(
            dg.ball_radius > 0.0,
            "diagnose.ball_radius must be positive",
        )?;
        Ok(())
    }

    pub fn potential_spec(&self) -> PotentialSpec {
        let p = &self.potential;
        match p.geometry {
            GeometryName::Chain => PotentialSpec::chain(p.d, p.lambda_factor, p.cubic_a),
            GeometryName::Grid => PotentialSpec::grid(p.d, p.lambda_factor, p.cubic_a),
        }
    }

    pub fn site_order(&self) -> SiteOrder {
        match self.potential_spec().geometry {
            Geometry::Chain1D => SiteOrder::Identity,
            Geometry::Grid2D => SiteOrder::Morton2D,
        }
    }

    pub fn schedule_kind(&self) -> ScheduleKind {
        match self.sampler.schedule {
            ScheduleName::Linear => ScheduleKind::Linear,
            ScheduleName::Geometric => ScheduleKind::Geometric,
        }
    }

    /// Langevin step actually taken.
    pub fn step(&self) -> f64 {
        self.sampler.dt * self.sampler.scale
    }

    pub fn ula_substeps(&self) -> usize {
        self.sampler.ula_substeps.unwrap_or_else(|| {
            fhtgibbs_core::ais::default_ula_substeps(self.sampler.levels, self.step())
        })
    }

    /// MALA steps covering `time` in unscaled units.
    pub fn steps_for(&self, time: f64) -> usize {
        (time / self.sampler.dt).round() as usize
    }

    pub fn burn_in_steps(&self) -> usize {
        self.steps_for(self.sampler.burn_in_time)
    }

    pub fn baseline_steps(&self) -> usize {
        match self.sampler.baseline_time {
            Some(t) => self.steps_for(t),
            None => {
                self.burn_in_steps()
                    + self.sampler.levels * (self.ula_substeps() + self.sampler.mala_steps)
            }
        }
    }
}
