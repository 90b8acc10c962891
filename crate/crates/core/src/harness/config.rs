use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibration::PulseContext;
use crate::engine::{mhz_to_rad_per_ns, EvolutionMethod, QubitGraph};
use crate::noise::NoiseModel;
use crate::protocol::{uniform_phis, InsertGate, LvSign, Mode, ProtocolSpec};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BUTTERFLY_OUT_DIR";

/// Output directory used when neither the config, the command line nor the
/// environment names one.
pub const DEFAULT_OUT_DIR: &str = "out";

/// JSON schema of [`ExperimentConfig`], shipped with the crate.
pub const CONFIG_SCHEMA: &str = include_str!("../../config.schema.json");

/// Lattice: a preset name (`n6`, `n8`, `n10`, `pair`, `single`, `chainN`,
/// `gridRxC`) or an explicit node count and edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Preset(String),
    Explicit(ExplicitGraph),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGraph {
    pub n_qubits: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec::Preset("n6".into())
    }
}

/// Evolution times in ns: an inclusive `{start, stop, step}` range or an
/// explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    // lists first: serde would otherwise accept `[a, b, c]` as a range
    List(Vec<f64>),
    Range(TimeRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::Range(TimeRange { start: 0.0, stop: 160.0, step: 8.0 })
    }
}

impl TimeGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range(r) => {
                if !(r.step > 0.0) || !r.start.is_finite() || !r.stop.is_finite() || r.stop < r.start {
                    return Err(Error::Config(format!(
                        "times_ns range needs start <= stop and step > 0 (got {}..{} step {})",
                        r.start, r.stop, r.step
                    )));
                }
                let n = ((r.stop - r.start) / r.step + 1e-9).floor() as usize;
                (0..=n).map(|k| r.start + k as f64 * r.step).collect()
            }
        };
        if values.is_empty() {
            return Err(Error::Config("times_ns is empty".into()));
        }
        if let Some(t) = values.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!("evolution time {t} ns must be finite and >= 0")));
        }
        Ok(values)
    }
}

/// Encoded phases in rad: `{count}` uniform points on `[−π, π]` or an
/// explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiGrid {
    List(Vec<f64>),
    Uniform(PhiCount),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiCount {
    pub count: usize,
}

impl Default for PhiGrid {
    fn default() -> Self {
        PhiGrid::Uniform(PhiCount { count: 41 })
    }
}

impl PhiGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            PhiGrid::Uniform(c) => uniform_phis(c.count),
            PhiGrid::List(v) => v.clone(),
        };
        if values.is_empty() {
            return Err(Error::Config("phis is empty".into()));
        }
        if values.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("phases must be finite".into()));
        }
        Ok(values)
    }
}

/// Noise: `"table1"`, `"none"`, or an explicit [`NoiseModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Preset(String),
    Model(NoiseModel),
}

/// Options of the calibration subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationOptions {
    /// Number of exponential terms in the distortion fit.
    pub n_terms: usize,
    pub pulse: PulseContext,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { n_terms: 4, pulse: PulseContext::default() }
    }
}

/// One experiment, as read from JSON. Every field has a default, so `{}` is
/// a valid configuration (the six-qubit preset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    /// Center qubit; defaults to a graph center.
    pub center: Option<usize>,
    /// Exchange coupling `J/2π` in MHz.
    pub j_mhz: f64,
    pub times_ns: TimeGrid,
    pub phis: PhiGrid,
    pub n_mask_sets: usize,
    /// Never flip the center qubit in the random X layers.
    pub exclude_center_from_masks: bool,
    pub seed: u64,
    pub mode: Mode,
    pub insert: InsertGate,
    pub lv_sign: LvSign,
    /// Local operation used for the butterfly state in `gme`.
    pub gme_insert: InsertGate,
    /// Trotter step in ns; exact evolution when absent.
    pub trotter_dt_ns: Option<f64>,
    pub noise: Option<NoiseSpec>,
    pub n_trajectories: usize,
    pub out_dir: Option<PathBuf>,
    pub calibration: CalibrationOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSpec::default(),
            center: None,
            j_mhz: 3.0,
            times_ns: TimeGrid::default(),
            phis: PhiGrid::default(),
            n_mask_sets: 10,
            exclude_center_from_masks: false,
            seed: 1,
            mode: Mode::Hardware,
            insert: InsertGate::X,
            lv_sign: LvSign::Plus,
            gme_insert: InsertGate::RxPlusHalfPi,
            trotter_dt_ns: None,
            noise: None,
            n_trajectories: 2000,
            out_dir: None,
            calibration: CalibrationOptions::default(),
        }
    }
}

/// Read, parse and validate a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parse and validate a configuration from JSON text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Check everything that can be checked without running a simulation.
    pub fn validate(&self) -> Result<()> {
        if !(self.j_mhz.is_finite() && self.j_mhz > 0.0) {
            return Err(Error::Config(format!("j_mhz = {} must be positive", self.j_mhz)));
        }
        self.times_ns.values()?;
        self.phis.values()?;
        if self.n_mask_sets == 0 {
            return Err(Error::Config("n_mask_sets must be at least 1".into()));
        }
        if self.n_trajectories == 0 {
            return Err(Error::Config("n_trajectories must be at least 1".into()));
        }
        if let Some(dt) = self.trotter_dt_ns {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("trotter_dt_ns = {dt} must be positive")));
            }
        }
        let graph = self.graph()?;
        self.noise_model(&graph)?;
        Ok(())
    }

    /// The lattice with the configured center.
    pub fn graph(&self) -> Result<QubitGraph> {
        let mut graph = match &self.graph {
            GraphSpec::Preset(name) => QubitGraph::preset(name)?,
            GraphSpec::Explicit(g) => QubitGraph::with_graph_center(g.n_qubits, g.edges.clone())?,
        };
        if let Some(c) = self.center {
            graph.set_center(c)?;
        }
        Ok(graph)
    }

    pub fn method(&self) -> EvolutionMethod {
        match self.trotter_dt_ns {
            Some(dt) => EvolutionMethod::Trotter2 { dt },
            None => EvolutionMethod::ExactEigen,
        }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.times_ns.values()
    }

    pub fn phis(&self) -> Result<Vec<f64>> {
        self.phis.values()
    }

    /// Protocol description with times, phases and random masks filled in.
    pub fn protocol_spec(&self) -> Result<ProtocolSpec> {
        let mut spec = ProtocolSpec::from_graph(self.graph()?, mhz_to_rad_per_ns(self.j_mhz))
            .with_mode(self.mode)
            .with_insert(self.insert)
            .with_lv_sign(self.lv_sign)
            .with_method(self.method())
            .with_random_masks(self.n_mask_sets, self.seed, self.exclude_center_from_masks);
        spec.times = self.times()?;
        spec.phis = self.phis()?;
        spec.validate()?;
        Ok(spec)
    }

    /// Resolved noise model, or `None` for noiseless runs.
    pub fn noise_model(&self, graph: &QubitGraph) -> Result<Option<NoiseModel>> {
        let model = match &self.noise {
            None => return Ok(None),
            Some(NoiseSpec::Preset(name)) => match name.as_str() {
                "none" => return Ok(None),
                "table1" => NoiseModel::table1(graph).map_err(|e| Error::Config(format!("noise: {e}")))?,
                other => return Err(Error::Config(format!("unknown noise preset `{other}` (expected table1 or none)"))),
            },
            Some(NoiseSpec::Model(m)) => m.clone(),
        };
        model.validate().map_err(|e| Error::Config(format!("noise: {e}")))?;
        if model.n_qubits() != graph.n_qubits() {
            return Err(Error::Config(format!(
                "noise model has {} qubits, graph has {}",
                model.n_qubits(),
                graph.n_qubits()
            )));
        }
        Ok(Some(model))
    }

    /// Output directory: the config value, else `$BUTTERFLY_OUT_DIR`, else
    /// `out`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    /// SHA-256 of the canonical JSON form of the configuration. The output
    /// directory does not affect results and is excluded.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig { out_dir: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("configuration serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
