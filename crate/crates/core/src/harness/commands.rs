use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::calibration::{coupling_from_oscillation, fit_distortion, zgate_calibrate, zgate_invert};
use crate::engine::{Observable, Op};
use crate::entanglement::gme_concurrence_pure;
use crate::metrology::{eta_inv_from_otoc, sensitivity_at_zero, std_dev, PhaseCurve};
use crate::noise::{normalize_signal, REFERENCE_GUARD, run_noisy_branches, Branch, NoiseModel, TrajectoryConfig};
use crate::protocol::{
    butterfly_state, run_otoc_all, run_reference, sensing_curve, ProtocolSpec, XMask,
};
use crate::{Error, Result};

use super::config::ExperimentConfig;
use super::sweep::{derive_seed, run_sweep};
use super::table::{Column, ResultTable, Value, TOOL_VERSION};

/// Sweep commands that produce a CSV table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Otoc,
    Sense,
    Sensitivity,
    Gme,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Otoc => "otoc",
            Command::Sense => "sense",
            Command::Sensitivity => "sensitivity",
            Command::Gme => "gme",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }

    pub fn run(self, config: &ExperimentConfig, workers: Option<usize>) -> Result<ResultTable> {
        match self {
            Command::Otoc => cmd_otoc(config, workers),
            Command::Sense => cmd_sense(config, workers),
            Command::Sensitivity => cmd_sensitivity(config, workers),
            Command::Gme => cmd_gme(config, workers),
        }
    }
}

/// Run a sweep command and write its table to `<out_dir>/<command>.csv`.
pub fn run_and_write(command: Command, config: &ExperimentConfig, workers: Option<usize>, out_dir: &Path) -> Result<PathBuf> {
    let table = command.run(config, workers)?;
    let path = out_dir.join(command.file_name());
    table.write_csv(&path)?;
    Ok(path)
}

/// Everything a sweep needs, resolved once from the configuration.
struct Setup {
    spec: ProtocolSpec,
    noise: Option<NoiseModel>,
    times: Vec<f64>,
    /// `(t index, mask index)`, time-major.
    points: Vec<(usize, usize)>,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.protocol_spec()?;
        let noise = config.noise_model(spec.graph())?;
        let times = spec.times.clone();
        let points = (0..times.len()).flat_map(|ti| (0..spec.masks.len()).map(move |mi| (ti, mi))).collect();
        Ok(Self { spec, noise, times, points })
    }

    fn n_masks(&self) -> usize {
        self.spec.masks.len()
    }

    fn point(&self, p: &(usize, usize)) -> (f64, &XMask) {
        (self.times[p.0], &self.spec.masks[p.1])
    }

    fn table(&self, config: &ExperimentConfig, command: Command, columns: Vec<Column>) -> ResultTable {
        let g = self.spec.graph();
        let noise = match &self.noise {
            None => "none".to_string(),
            Some(_) => format!("{} trajectories", config.n_trajectories),
        };
        ResultTable::new(columns)
            .with_metadata("tool", TOOL_VERSION)
            .with_metadata("command", command.name())
            .with_metadata("config_sha256", config.hash())
            .with_metadata("seed", config.seed)
            .with_metadata("n_qubits", g.n_qubits())
            .with_metadata("center", g.center())
            .with_metadata("j_mhz", config.j_mhz)
            .with_metadata("mode", format!("{:?}", config.mode).to_lowercase())
            .with_metadata("n_masks", self.n_masks())
            .with_metadata("noise", noise)
    }

    fn trajectories(&self, config: &ExperimentConfig, seed: u64) -> Result<TrajectoryConfig> {
        TrajectoryConfig::new(config.n_trajectories, seed)
    }

    /// Trajectory means of several observables/tails after a common prefix.
    fn noisy_branches(&self, noise: &NoiseModel, prefix: &[Op], branches: &[Branch], traj: TrajectoryConfig) -> Result<Vec<f64>> {
        let spec = &self.spec;
        Ok(run_noisy_branches(spec.n_qubits(), prefix, branches, spec.hamiltonian(), spec.method, noise, traj)?
            .into_iter()
            .map(|e| e.mean)
            .collect())
    }

    fn otocs(&self, config: &ExperimentConfig, noise: Option<&NoiseModel>, index: usize, t: f64, mask: &XMask) -> Result<Vec<f64>> {
        let spec = &self.spec;
        match noise {
            None => run_otoc_all(spec, t, mask),
            Some(noise) => {
                let circuit = spec.otoc_circuit(t, 0, mask, spec.mode)?;
                let branches: Vec<Branch> = (0..spec.n_qubits())
                    .map(|q| Branch { ops: Vec::new(), observable: Observable::SigmaZ(q) })
                    .collect();
                let traj = self.trajectories(config, derive_seed(config.seed, index))?;
                self.noisy_branches(noise, &circuit.ops, &branches, traj)
            }
        }
    }

    fn sensing(&self, config: &ExperimentConfig, index: usize, t: f64, mask: &XMask) -> Result<Vec<f64>> {
        let spec = &self.spec;
        match &self.noise {
            None => sensing_curve(spec, t, mask, &spec.phis),
            Some(noise) => {
                let prefix = spec.sensing_prefix(t, mask, spec.mode)?;
                let observable = spec.sensing_observable(spec.mode);
                let branches: Vec<Branch> = spec
                    .phis
                    .iter()
                    .map(|&phi| Branch { ops: spec.sensing_suffix(t, phi, mask, spec.mode), observable })
                    .collect();
                let traj = self.trajectories(config, derive_seed(config.seed, index))?;
                self.noisy_branches(noise, &prefix, &branches, traj)
            }
        }
    }

    fn reference(&self, config: &ExperimentConfig, index: usize, t: f64, mask: &XMask) -> Result<f64> {
        let spec = &self.spec;
        match &self.noise {
            None => run_reference(spec, t, mask),
            Some(noise) => {
                let circuit = spec.reference_circuit(t, mask, spec.mode)?;
                let branch = [Branch { ops: circuit.ops, observable: circuit.observable }];
                // a stream of its own, independent of the sensing trajectories
                let traj = self.trajectories(config, derive_seed(!config.seed, index))?;
                Ok(self.noisy_branches(noise, &[], &branch, traj)?[0])
            }
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `O_j(t)` for every qubit, averaged over the random X masks.
pub fn cmd_otoc(config: &ExperimentConfig, workers: Option<usize>) -> Result<ResultTable> {
    let setup = Setup::new(config)?;
    let per_point = run_sweep(&setup.points, workers, |i, p| {
        let (t, mask) = setup.point(p);
        setup.otocs(config, setup.noise.as_ref(), i, t, mask)
    })?;
    let spec = &setup.spec;
    let distance = spec.graph().graph_distance(spec.center())?;
    let mut table = setup.table(
        config,
        Command::Otoc,
        vec![
            Column::new("t_ns", "ns"),
            Column::new("qubit", ""),
            Column::new("distance", "edges"),
            Column::new("otoc_mean", ""),
            Column::new("otoc_std", ""),
            Column::new("n_masks", ""),
        ],
    );
    let m = setup.n_masks();
    for (ti, &t) in setup.times.iter().enumerate() {
        let block = &per_point[ti * m..(ti + 1) * m];
        for q in 0..spec.n_qubits() {
            let values: Vec<f64> = block.iter().map(|v| v[q]).collect();
            table.push_row(vec![
                t.into(),
                q.into(),
                distance[q].into(),
                mean(&values).into(),
                std_dev(&values).into(),
                m.into(),
            ])?;
        }
    }
    Ok(table)
}

/// `⟨σx⟩(t, φ)` averaged over masks.
pub fn cmd_sense(config: &ExperimentConfig, workers: Option<usize>) -> Result<ResultTable> {
    let setup = Setup::new(config)?;
    let per_point = run_sweep(&setup.points, workers, |i, p| {
        let (t, mask) = setup.point(p);
        setup.sensing(config, i, t, mask)
    })?;
    let spec = &setup.spec;
    let mut table = setup.table(
        config,
        Command::Sense,
        vec![
            Column::new("N", "qubits"),
            Column::new("t_ns", "ns"),
            Column::new("phi", "rad"),
            Column::new("sx_mean", ""),
            Column::new("sx_std", ""),
        ],
    );
    let m = setup.n_masks();
    for (ti, &t) in setup.times.iter().enumerate() {
        let block = &per_point[ti * m..(ti + 1) * m];
        for (k, &phi) in spec.phis.iter().enumerate() {
            let values: Vec<f64> = block.iter().map(|v| v[k]).collect();
            table.push_row(vec![
                spec.n_qubits().into(),
                t.into(),
                phi.into(),
                mean(&values).into(),
                std_dev(&values).into(),
            ])?;
        }
    }
    Ok(table)
}

/// Per-point ingredients of the sensitivity analysis.
struct SensitivitySample {
    curve: Vec<f64>,
    reference: f64,
    otocs: Vec<f64>,
}

/// Inverted sensitivity versus time from the mask-averaged `⟨σx⟩(φ)`
/// curve, raw and divided by the reference signal, next to the OTOC
/// prediction `N/2 − Σ_j Ō_j/2`.
///
/// With noise, the sensing curve and the reference come from trajectories;
/// the OTOC prediction is always the noiseless one. Rows whose reference
/// signal falls below [`REFERENCE_GUARD`] for any mask report
/// `eta_inv_norm = nan`.
pub fn cmd_sensitivity(config: &ExperimentConfig, workers: Option<usize>) -> Result<ResultTable> {
    let setup = Setup::new(config)?;
    let per_point = run_sweep(&setup.points, workers, |i, p| {
        let (t, mask) = setup.point(p);
        Ok(SensitivitySample {
            curve: setup.sensing(config, i, t, mask)?,
            reference: setup.reference(config, i, t, mask)?,
            otocs: setup.otocs(config, None, i, t, mask)?,
        })
    })?;
    let spec = &setup.spec;
    let n = spec.n_qubits();
    let mut table = setup.table(
        config,
        Command::Sensitivity,
        vec![
            Column::new("N", "qubits"),
            Column::new("t_ns", "ns"),
            Column::new("eta_inv_raw", "rad^-1"),
            Column::new("eta_inv_norm", "rad^-1"),
            Column::new("eta_inv_otoc", "rad^-1"),
            Column::new("slope", "rad^-1"),
            Column::new("F0", "rad^-2"),
        ],
    );
    table = table.with_metadata("reference_guard", REFERENCE_GUARD);
    let m = setup.n_masks();
    for (ti, &t) in setup.times.iter().enumerate() {
        let block = &per_point[ti * m..(ti + 1) * m];
        let row = || -> Result<Vec<Value>> {
            let average = |f: &dyn Fn(&SensitivitySample, usize) -> Result<f64>| -> Result<PhaseCurve> {
                let values = (0..spec.phis.len())
                    .map(|k| Ok(block.iter().map(|s| f(s, k)).collect::<Result<Vec<_>>>()?.iter().sum::<f64>() / m as f64))
                    .collect::<Result<Vec<_>>>()?;
                PhaseCurve::new(spec.phis.clone(), values, n, t)
            };
            let raw = sensitivity_at_zero(&average(&|s, k| Ok(s.curve[k]))?)?;
            // a reference below the guard leaves nothing to normalize by
            let eta_inv_norm = match average(&|s, k| Ok(normalize_signal(s.curve[k], s.reference)?.value)) {
                Ok(curve) => sensitivity_at_zero(&curve)?.eta_inv,
                Err(Error::ReferenceBelowGuard(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            let otoc_mean: Vec<f64> = (0..n).map(|q| block.iter().map(|s| s.otocs[q]).sum::<f64>() / m as f64).collect();
            Ok(vec![
                n.into(),
                t.into(),
                raw.eta_inv.into(),
                eta_inv_norm.into(),
                eta_inv_from_otoc(&otoc_mean, n).into(),
                raw.slope.value().into(),
                raw.fisher_at_zero.into(),
            ])
        };
        let cells = row().map_err(|e| Error::Point { index: ti * m, source: Box::new(e) })?;
        table.push_row(cells)?;
    }
    Ok(table)
}

/// Pure-state GME concurrence of the butterfly state versus time, averaged
/// over masks, with the bipartition that most often attains the minimum.
///
/// The measure is defined for pure states only, so any configured noise is
/// ignored here.
pub fn cmd_gme(config: &ExperimentConfig, workers: Option<usize>) -> Result<ResultTable> {
    let mut setup = Setup::new(config)?;
    setup.spec = setup.spec.clone().with_insert(config.gme_insert);
    let per_point = run_sweep(&setup.points, workers, |_, p| {
        let (t, mask) = setup.point(p);
        let c = gme_concurrence_pure(&butterfly_state(&setup.spec, t, mask)?);
        Ok((c.value, c.min_cut))
    })?;
    let ignored = setup.noise.take().is_some();
    let mut table = setup.table(
        config,
        Command::Gme,
        vec![Column::new("t_ns", "ns"), Column::new("c_gme", ""), Column::new("min_cut", "qubits|qubits")],
    );
    if ignored {
        table = table.with_metadata("noise_note", "ignored; pure-state measure");
    }
    let m = setup.n_masks();
    for (ti, &t) in setup.times.iter().enumerate() {
        let block = &per_point[ti * m..(ti + 1) * m];
        let values: Vec<f64> = block.iter().map(|(v, _)| *v).collect();
        let mut votes: BTreeMap<usize, (usize, String)> = BTreeMap::new();
        for cut in block.iter().filter_map(|(_, c)| c.as_ref()) {
            votes.entry(cut.mask()).or_insert((0, cut.to_string())).0 += 1;
        }
        // most frequent cut; ties go to the smallest cut mask
        let min_cut = votes
            .values()
            .fold(None::<&(usize, String)>, |best, v| match best {
                Some(b) if b.0 >= v.0 => Some(b),
                _ => Some(v),
            })
            .map(|(_, s)| s.clone())
            .unwrap_or_default();
        table.push_row(vec![t.into(), mean(&values).into(), min_cut.into()])?;
    }
    Ok(table)
}

/// Calibration analyses run on measured (or synthetic) CSV data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationKind {
    /// Columns `t_d_ns, delta_phi_rad`: multi-exponential flux distortion.
    Distortion,
    /// Columns `z_amp, phi_rad`: Z-gate amplitude→phase spline.
    Zgate,
    /// Columns `t_ns, population`: chevron oscillation → coupling `J`.
    Chevron,
}

impl CalibrationKind {
    pub fn name(self) -> &'static str {
        match self {
            CalibrationKind::Distortion => "distortion",
            CalibrationKind::Zgate => "zgate",
            CalibrationKind::Chevron => "chevron",
        }
    }

    fn columns(self) -> [&'static str; 2] {
        match self {
            CalibrationKind::Distortion => ["t_d_ns", "delta_phi_rad"],
            CalibrationKind::Zgate => ["z_amp", "phi_rad"],
            CalibrationKind::Chevron => ["t_ns", "population"],
        }
    }

    pub fn file_name(self) -> String {
        format!("calibration_{}.json", self.name())
    }
}

/// Read two named numeric columns from a CSV file (`#` starts a comment).
pub fn read_columns(path: &Path, names: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Error::Config(format!("{}: {e}", path.display())))?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("{}: missing column `{name}`", path.display())))
    };
    let (ia, ib) = (index(names[0])?, index(names[1])?);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let parse = |i: usize| -> Result<f64> {
            let cell = record.get(i).unwrap_or("");
            cell.parse().map_err(|_| Error::Config(format!("{}: data row {}: `{cell}` is not a number", path.display(), line + 1)))
        };
        a.push(parse(ia)?);
        b.push(parse(ib)?);
    }
    Ok((a, b))
}

/// Result of a calibration subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub tool: String,
    pub kind: String,
    pub n_samples: usize,
    pub result: serde_json::Value,
}

/// Fit a calibration CSV. `targets` are phases (rad) to invert for the
/// Z-gate calibration and are ignored otherwise.
pub fn cmd_calibrate(kind: CalibrationKind, input: &Path, config: &ExperimentConfig, targets: &[f64]) -> Result<CalibrationReport> {
    let (x, y) = read_columns(input, kind.columns())?;
    let result = match kind {
        CalibrationKind::Distortion => {
            let opts = &config.calibration;
            serde_json::to_value(fit_distortion(&x, &y, opts.n_terms, opts.pulse)?).expect("fit serializes")
        }
        CalibrationKind::Zgate => {
            let knots: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
            let cal = zgate_calibrate(&knots)?;
            let inverse = targets
                .iter()
                .map(|&phi| Ok(json!({ "phi_rad": phi, "z_amp": zgate_invert(&cal, phi)? })))
                .collect::<Result<Vec<_>>>()?;
            let (lo, hi) = cal.monotone_range();
            json!({
                "knots": knots,
                "monotone_end": cal.monotone_end,
                "monotone_range_rad": [lo, hi],
                "inverse": inverse,
            })
        }
        CalibrationKind::Chevron => {
            let j = coupling_from_oscillation(&x, &y)?;
            json!({
                "omega_rad_per_ns": 4.0 * j,
                "j_rad_per_ns": j,
                "j_mhz": j / (2.0 * std::f64::consts::PI) * 1e3,
            })
        }
    };
    Ok(CalibrationReport { tool: TOOL_VERSION.into(), kind: kind.name().into(), n_samples: x.len(), result })
}
