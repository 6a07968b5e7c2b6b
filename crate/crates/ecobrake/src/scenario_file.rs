//! Human-editable scenario files (TOML with explicit units in key names).

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Environment, VehicleParams};
use crate::numerics::{NewtonConfig, NlpConfig};
use crate::scenario::Scenario;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scenario field error in `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub vehicle: VehicleBlock,
    pub environment: EnvironmentBlock,
    pub boundary: BoundaryBlock,
    pub weights: WeightsBlock,
    #[serde(default)]
    pub solver: SolverBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleBlock {
    pub mass_kg: f64,
    pub frontal_area_m2: f64,
    pub drag_coeff: f64,
    pub rolling_coeff: f64,
    pub engine_drag_decel_ms2: f64,
    pub u_min_ms2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentBlock {
    pub slope_deg: f64,
    pub gravity_ms2: f64,
    pub air_density_kgm3: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryBlock {
    pub v0_kmh: Option<f64>,
    pub v0_ms: Option<f64>,
    pub distance_m: f64,
    pub vf_kmh: Option<f64>,
    pub vf_ms: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsBlock {
    pub w_u: f64,
    pub w_t: f64,
}

/// Optional numeric overrides; defaults match the library configs.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub newton_tol: Option<f64>,
    pub newton_max_iters: Option<usize>,
    pub shooting_steps: Option<usize>,
    pub nlp_tol_kkt: Option<f64>,
    pub nlp_tol_constraint: Option<f64>,
    pub nlp_max_outer: Option<usize>,
    pub guess_t_s1: Option<f64>,
    pub guess_t_s2: Option<f64>,
    pub guess_t_f: Option<f64>,
}

fn one_of(
    kmh: Option<f64>,
    ms: Option<f64>,
    field: &'static str,
) -> Result<f64, ConfigError> {
    match (kmh, ms) {
        (Some(k), None) => Ok(k / 3.6),
        (None, Some(m)) => Ok(m),
        (None, None) => Err(ConfigError::Field {
            field,
            reason: "give exactly one of *_kmh or *_ms".to_string(),
        }),
        (Some(_), Some(_)) => Err(ConfigError::Field {
            field,
            reason: "both *_kmh and *_ms given; pick one".to_string(),
        }),
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_scenario(&self) -> Result<Scenario<f64>, ConfigError> {
        let v0 = one_of(self.boundary.v0_kmh, self.boundary.v0_ms, "boundary.v0")?;
        let v_f = one_of(self.boundary.vf_kmh, self.boundary.vf_ms, "boundary.vf")?;
        let scn = Scenario {
            v0,
            distance_to_target: self.boundary.distance_m,
            v_f,
            w_u: self.weights.w_u,
            w_t: self.weights.w_t,
            vehicle: VehicleParams {
                mass: self.vehicle.mass_kg,
                frontal_area: self.vehicle.frontal_area_m2,
                drag_coeff: self.vehicle.drag_coeff,
                rolling_coeff: self.vehicle.rolling_coeff,
                engine_drag_decel: self.vehicle.engine_drag_decel_ms2,
                u_min: self.vehicle.u_min_ms2,
            },
            env: Environment::with_slope_degrees(
                self.environment.slope_deg,
                self.environment.gravity_ms2,
                self.environment.air_density_kgm3,
            ),
        };
        scn.validate().map_err(|e| ConfigError::Field {
            field: "scenario",
            reason: e.to_string(),
        })?;
        Ok(scn)
    }

    pub fn newton_config(&self) -> NewtonConfig {
        let mut cfg = NewtonConfig {
            tol_residual: 1e-11,
            max_iters: 80,
            ..NewtonConfig::default()
        };
        if let Some(t) = self.solver.newton_tol {
            cfg.tol_residual = t;
        }
        if let Some(m) = self.solver.newton_max_iters {
            cfg.max_iters = m;
        }
        cfg
    }

    pub fn nlp_config(&self) -> NlpConfig {
        let mut cfg = NlpConfig::default();
        if let Some(t) = self.solver.nlp_tol_kkt {
            cfg.tol_kkt = t;
        }
        if let Some(t) = self.solver.nlp_tol_constraint {
            cfg.tol_constraint = t;
        }
        if let Some(m) = self.solver.nlp_max_outer {
            cfg.max_outer = m;
        }
        cfg
    }
}

/// The bundled case-study scenario.
pub const CASE_STUDY_TOML: &str = include_str!("../scenarios/case_study.toml");
