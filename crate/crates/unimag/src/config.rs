//! Run configuration: a single JSON document describing the model, the time
//! window, the method and its truncation orders, the initial state, and the
//! output destination.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyson::{state_norm, Method, TimeGrid, MAX_DYSON_ORDER};
use crate::hamiltonians::{
    build_hatano_nelson, random_bounded_hamiltonian, HamiltonianSpec, HatanoNelsonSpec, TimeProfile,
};
use crate::magnus::{MAX_BCH_ORDER, MAX_OMEGA_ORDER};
use crate::matrix::{ComplexMatrix, MAX_DIM};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Time-dependence family exposed by the CLI for the Hatano–Nelson bond
/// asymmetries: `γ_i(t) = g0_i + g1_i sin(ω_i t)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaConfig {
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    HatanoNelson {
        l: usize,
        tau: Vec<f64>,
        gamma: GammaConfig,
    },
    /// A fixed matrix `A` modulated by the profile: `A`, `(1 + t) A`, or
    /// `(1 + sin t) A`.
    ExplicitMatrix {
        dim: usize,
        entries_real: Vec<Vec<f64>>,
        entries_imag: Vec<Vec<f64>>,
        time_profile: TimeProfile,
    },
    Random {
        dim: usize,
        bound: f64,
        seed: u64,
        time_profile: TimeProfile,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeConfig {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
}

fn default_output_every() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrdersConfig {
    #[serde(default = "default_dyson_k")]
    pub dyson_k: usize,
    #[serde(default = "default_omega_n")]
    pub omega_n: usize,
    #[serde(default = "default_bch_order")]
    pub bch_order: usize,
}

impl Default for OrdersConfig {
    fn default() -> Self {
        Self {
            dyson_k: default_dyson_k(),
            omega_n: default_omega_n(),
            bch_order: default_bch_order(),
        }
    }
}

fn default_dyson_k() -> usize {
    4
}

fn default_omega_n() -> usize {
    2
}

fn default_bch_order() -> usize {
    3
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateConfig {
    #[default]
    #[serde(rename = "site_1_localized")]
    Site1Localized,
    Uniform,
    Explicit {
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    pub path: String,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub time: TimeConfig,
    pub method: Method,
    #[serde(default)]
    pub orders: OrdersConfig,
    #[serde(default)]
    pub initial_state: InitialStateConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn from_file(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Replace the seed of a random model, as the `UNIMAG_SEED` environment
    /// variable does.
    pub fn override_seed(&mut self, seed: u64) {
        if let ModelConfig::Random { seed: s, .. } = &mut self.model {
            *s = seed;
        }
    }
}

/// A validated configuration, ready to execute.
#[derive(Debug)]
pub struct Scenario {
    pub config: RunConfig,
    pub hamiltonian: HamiltonianSpec,
    pub grid: TimeGrid,
    pub psi0: Array1<C64>,
}

/// Validate a parsed config and assemble the runnable scenario. Every
/// rejection names the offending field.
pub fn build_scenario(config: RunConfig) -> Result<Scenario, ConfigError> {
    let grid = TimeGrid::new(config.time.t0, config.time.t1, config.time.steps)
        .map_err(|e| invalid("time", e.to_string()))?;
    if config.time.output_every == 0 {
        return Err(invalid("time.output_every", "must be at least 1"));
    }
    if config.orders.dyson_k > MAX_DYSON_ORDER {
        return Err(invalid(
            "orders.dyson_k",
            format!("must be at most {MAX_DYSON_ORDER}"),
        ));
    }
    if !(1..=MAX_OMEGA_ORDER).contains(&config.orders.omega_n) {
        return Err(invalid(
            "orders.omega_n",
            format!("must be in 1..={MAX_OMEGA_ORDER}"),
        ));
    }
    if !(1..=MAX_BCH_ORDER).contains(&config.orders.bch_order) {
        return Err(invalid(
            "orders.bch_order",
            format!("must be in 1..={MAX_BCH_ORDER}"),
        ));
    }

    let hamiltonian = build_model(&config.model, &grid)?;
    let psi0 = build_initial_state(&config.initial_state, hamiltonian.dim())?;
    Ok(Scenario {
        config,
        hamiltonian,
        grid,
        psi0,
    })
}

fn build_model(model: &ModelConfig, grid: &TimeGrid) -> Result<HamiltonianSpec, ConfigError> {
    match model {
        ModelConfig::HatanoNelson { l, tau, gamma } => {
            if *l < 2 {
                return Err(invalid(
                    "model.hatano_nelson.l",
                    "lattice size must be >= 2",
                ));
            }
            if *l > MAX_DIM {
                return Err(invalid(
                    "model.hatano_nelson.l",
                    format!("lattice size must be at most {MAX_DIM}"),
                ));
            }
            let bonds = *l - 1;
            for (name, len) in [
                ("model.hatano_nelson.tau", tau.len()),
                ("model.hatano_nelson.gamma.g0", gamma.g0.len()),
                ("model.hatano_nelson.gamma.g1", gamma.g1.len()),
                ("model.hatano_nelson.gamma.omega", gamma.omega.len()),
            ] {
                if len != bonds {
                    return Err(invalid(
                        name,
                        format!("expected {bonds} entries, got {len}"),
                    ));
                }
            }
            let gamma_fns: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>> = (0..bonds)
                .map(|i| {
                    let (g0, g1, om) = (gamma.g0[i], gamma.g1[i], gamma.omega[i]);
                    Arc::new(move |t: f64| g0 + g1 * (om * t).sin())
                        as Arc<dyn Fn(f64) -> f64 + Send + Sync>
                })
                .collect();
            let spec = HatanoNelsonSpec {
                l: *l,
                tau: tau.clone(),
                gamma: gamma_fns,
            };
            let h = build_hatano_nelson(&spec)
                .map_err(|e| invalid("model.hatano_nelson", e.to_string()))?
                .with_sampled_bound(grid);
            h.validate_on(grid)
                .map_err(|e| invalid("model.hatano_nelson", e.to_string()))?;
            Ok(h)
        }
        ModelConfig::ExplicitMatrix {
            dim,
            entries_real,
            entries_imag,
            time_profile,
        } => {
            if *dim == 0 || *dim > MAX_DIM {
                return Err(invalid(
                    "model.explicit_matrix.dim",
                    format!("must be in 1..={MAX_DIM}"),
                ));
            }
            let check = |name: &str, m: &Vec<Vec<f64>>| -> Result<(), ConfigError> {
                if m.len() != *dim || m.iter().any(|row| row.len() != *dim) {
                    return Err(invalid(
                        &format!("model.explicit_matrix.{name}"),
                        format!("expected a {dim}x{dim} matrix"),
                    ));
                }
                if m.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(invalid(
                        &format!("model.explicit_matrix.{name}"),
                        "entries must be finite",
                    ));
                }
                Ok(())
            };
            check("entries_real", entries_real)?;
            check("entries_imag", entries_imag)?;
            let base = ComplexMatrix::from_fn(*dim, |i, j| {
                C64::new(entries_real[i][j], entries_imag[i][j])
            });
            let profile = *time_profile;
            let h = HamiltonianSpec::new(*dim, f64::INFINITY, move |t| match profile {
                TimeProfile::Constant => base.clone(),
                TimeProfile::Polynomial => base.scale_re(1.0 + t),
                TimeProfile::Trigonometric => base.scale_re(1.0 + t.sin()),
            })
            .with_sampled_bound(grid);
            h.validate_on(grid)
                .map_err(|e| invalid("model.explicit_matrix", e.to_string()))?;
            Ok(h)
        }
        ModelConfig::Random {
            dim,
            bound,
            seed,
            time_profile,
        } => {
            if *dim == 0 || *dim > MAX_DIM {
                return Err(invalid(
                    "model.random.dim",
                    format!("must be in 1..={MAX_DIM}"),
                ));
            }
            if !bound.is_finite() || *bound <= 0.0 {
                return Err(invalid("model.random.bound", "must be positive and finite"));
            }
            let h = random_bounded_hamiltonian(*dim, *bound, *seed, *time_profile);
            h.validate_on(grid)
                .map_err(|e| invalid("model.random", e.to_string()))?;
            Ok(h)
        }
    }
}

fn build_initial_state(state: &InitialStateConfig, dim: usize) -> Result<Array1<C64>, ConfigError> {
    match state {
        InitialStateConfig::Site1Localized => {
            let mut psi = Array1::zeros(dim);
            psi[0] = C64::new(1.0, 0.0);
            Ok(psi)
        }
        InitialStateConfig::Uniform => {
            let amp = 1.0 / (dim as f64).sqrt();
            Ok(Array1::from_elem(dim, C64::new(amp, 0.0)))
        }
        InitialStateConfig::Explicit { re, im } => {
            if re.len() != dim || im.len() != dim {
                return Err(invalid(
                    "initial_state.explicit",
                    format!("expected {dim} amplitudes"),
                ));
            }
            let mut psi = Array1::from_shape_fn(dim, |k| C64::new(re[k], im[k]));
            let norm = state_norm(&psi);
            if !norm.is_finite() || norm <= 1e-12 {
                return Err(invalid(
                    "initial_state.explicit",
                    "state must have a nonzero finite norm",
                ));
            }
            psi.mapv_inplace(|z| z / norm);
            Ok(psi)
        }
    }
}
