//! The experiment registry: config schemas, compute-free validation, and
//! the dispatch that executes one experiment and shapes its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use photonbench::experiments::{
    beta_factor, bragg_spectrum, grating_extraction, taper_cascade_estimate, taper_sweep,
    BetaConfig, BraggConfig, EfficiencyBudget, GratingConfig, TaperSweepConfig,
};
use photonbench::geometry::{build_paper_device, DeviceParams};
use photonbench::photonstats::{run_g2_pipeline, G2PipelineConfig};

use crate::output::{write_artifacts, RunOutput};

/// Registered experiments, stable order, one-line descriptions.
pub fn registry() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "taper_sweep",
            "beam-to-strip transfer efficiency vs adiabatic taper length",
        ),
        (
            "beta_factor",
            "fraction of dipole emission captured by the fundamental beam mode",
        ),
        (
            "bragg_spectrum",
            "reflectance/transmittance spectrum of the nanobeam hole mirror",
        ),
        (
            "grating_extraction",
            "four-way power partition of the surface grating out-coupler",
        ),
        (
            "efficiency_budget",
            "chained source-to-lens efficiency arithmetic",
        ),
        (
            "g2_pipeline",
            "stochastic emitter, beamsplitter, g2 histogram, and antibunching fit",
        ),
    ]
}

/// A run request as stored on disk: which experiment plus its parameter
/// document (missing fields fall back to the experiment's defaults).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDocument {
    pub experiment: String,
    #[serde(default = "empty_params")]
    pub params: Value,
}

fn empty_params() -> Value {
    json!({})
}

impl RunDocument {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag overrides applied on top of the config document before running.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub resolution_scale: Option<f64>,
    pub threads: Option<usize>,
}

/// Budget parameters: the four chain fractions, plus an optional measured
/// first-lens value to compare against the ideal chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BudgetParams {
    pub beta: f64,
    pub taper: f64,
    pub grating: f64,
    pub setup: f64,
    pub first_lens_measured: Option<f64>,
}

impl Default for BudgetParams {
    fn default() -> Self {
        Self {
            beta: 0.85,
            taper: 0.401,
            grating: 0.267,
            setup: 1.0,
            first_lens_measured: Some(0.022),
        }
    }
}

/// Full schema check with field-level messages; no simulation starts here.
/// These mirror the guards the library applies again on the run path.
pub fn validate_document(doc: &RunDocument) -> std::result::Result<(), Vec<String>> {
    match doc.experiment.as_str() {
        "taper_sweep" => {
            let c: TaperSweepConfig = parse(&doc.params)?;
            let mut v = Vec::new();
            check_device(&c.device, &mut v);
            check_lengths("lengths", &c.lengths, &mut v);
            check_scale(c.resolution_scale, &mut v);
            if c.device.beam_length < 3e-6 {
                v.push("device.beam_length: too short to separate source and port".into());
            }
            if c.device.ln_lead < 1e-6 {
                v.push("device.ln_lead: too short to place the output port".into());
            }
            finish(v)
        }
        "beta_factor" => {
            let c: BetaConfig = parse(&doc.params)?;
            let mut v = Vec::new();
            check_device(&c.device, &mut v);
            check_wavelengths("wavelengths", &c.wavelengths, &mut v);
            check_scale(c.resolution_scale, &mut v);
            if !c.dipole_offset.is_finite() {
                v.push("dipole_offset: must be finite".into());
            }
            finish(v)
        }
        "bragg_spectrum" => {
            let c: BraggConfig = parse(&doc.params)?;
            let mut v = Vec::new();
            check_device(&c.device, &mut v);
            check_wavelengths("wavelengths", &c.wavelengths, &mut v);
            check_scale(c.resolution_scale, &mut v);
            finish(v)
        }
        "grating_extraction" => {
            let c: GratingConfig = parse(&doc.params)?;
            let mut v = Vec::new();
            if !(c.period > 0.0 && c.period.is_finite()) {
                v.push("period: must be finite and > 0".into());
            }
            if !(c.duty > 0.0 && c.duty < 1.0) {
                v.push("duty: must lie strictly between 0 and 1".into());
            }
            if let Some(e) = c.etch_depth {
                if !(e > 0.0 && e.is_finite()) {
                    v.push("etch_depth: must be finite and > 0 when given".into());
                }
            }
            check_wavelengths("wavelengths", &c.wavelengths, &mut v);
            check_scale(c.resolution_scale, &mut v);
            finish(v)
        }
        "efficiency_budget" => {
            let c: BudgetParams = parse(&doc.params)?;
            let mut v = Vec::new();
            if let Err(e) = EfficiencyBudget::new(c.beta, c.taper, c.grating, c.setup) {
                v.push(e.to_string());
            }
            if let Some(m) = c.first_lens_measured {
                if !(0.0..=1.0).contains(&m) {
                    v.push("first_lens_measured: must lie in [0, 1]".into());
                }
            }
            finish(v)
        }
        "g2_pipeline" => {
            let c: G2PipelineConfig = parse(&doc.params)?;
            let mut v = Vec::new();
            if let Err(e) = c.emitter.validate() {
                v.push(format!("emitter: {e}"));
            }
            if !(0.0..=1.0).contains(&c.split) {
                v.push("split: must lie in [0, 1]".into());
            }
            if !(0.0..=1.0).contains(&c.det_eff) {
                v.push("det_eff: must lie in [0, 1]".into());
            }
            if !(c.dark_rate >= 0.0 && c.dark_rate.is_finite()) {
                v.push("dark_rate: must be finite and >= 0".into());
            }
            if !(c.jitter >= 0.0 && c.jitter.is_finite()) {
                v.push("jitter: must be finite and >= 0".into());
            }
            if !(c.bin_width > 0.0 && c.bin_width.is_finite()) {
                v.push("bin_width: must be finite and > 0".into());
            } else if c.max_tau < 10.0 * c.bin_width {
                v.push("max_tau: must cover at least 10 bins".into());
            }
            finish(v)
        }
        other => Err(vec![format!(
            "experiment: unknown name {other:?}; registered: {}",
            registry()
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        )]),
    }
}

fn parse<T: DeserializeOwned>(params: &Value) -> std::result::Result<T, Vec<String>> {
    serde_json::from_value(params.clone()).map_err(|e| vec![format!("params: {e}")])
}

fn finish(v: Vec<String>) -> std::result::Result<(), Vec<String>> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn check_device(device: &DeviceParams, v: &mut Vec<String>) {
    if let Err(e) = build_paper_device(device) {
        v.push(format!("device: {e}"));
    }
}

fn check_scale(scale: f64, v: &mut Vec<String>) {
    if !(scale > 0.0 && scale.is_finite()) {
        v.push("resolution_scale: must be finite and > 0".into());
    }
}

fn check_lengths(name: &str, lengths: &[f64], v: &mut Vec<String>) {
    if lengths.is_empty() {
        v.push(format!("{name}: must not be empty"));
        return;
    }
    if lengths.iter().any(|l| !l.is_finite() || *l < 0.0) {
        v.push(format!("{name}: every entry must be finite and >= 0"));
    }
    if lengths.windows(2).any(|w| w[1] <= w[0]) {
        v.push(format!("{name}: must be strictly increasing"));
    }
}

fn check_wavelengths(name: &str, wavelengths: &[f64], v: &mut Vec<String>) {
    if wavelengths.is_empty() {
        v.push(format!("{name}: must not be empty"));
        return;
    }
    if wavelengths.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        v.push(format!("{name}: every entry must be finite and > 0"));
    }
    if wavelengths.windows(2).any(|w| w[1] <= w[0]) {
        v.push(format!("{name}: must be strictly increasing"));
    }
}

/// Outcome of a run: where the artifacts landed and what was flagged.
pub struct RunReport {
    pub dir: PathBuf,
    pub flagged: Vec<String>,
}

/// Execute one validated experiment and write its artifacts under
/// `<out_root>/<experiment>/`.
pub fn run_experiment(
    doc: &RunDocument,
    overrides: &Overrides,
    out_root: &Path,
    verbose: u8,
) -> Result<RunReport> {
    let started = Instant::now();
    let (effective, output) = execute(doc, overrides)?;
    let wall = started.elapsed().as_secs_f64();
    if verbose > 0 {
        eprintln!("{}: finished in {wall:.1} s", doc.experiment);
    }
    let dir = out_root.join(&doc.experiment);
    write_artifacts(
        &dir,
        &doc.experiment,
        &effective,
        &output,
        overrides,
        wall,
    )?;
    Ok(RunReport {
        dir,
        flagged: output.flagged,
    })
}

/// Parse the params, apply flag overrides, run, and shape the outputs.
/// Returns the effective parameter document (what actually ran) alongside.
fn execute(doc: &RunDocument, overrides: &Overrides) -> Result<(Value, RunOutput)> {
    match doc.experiment.as_str() {
        "taper_sweep" => {
            let mut c: TaperSweepConfig = serde_json::from_value(doc.params.clone())?;
            if let Some(s) = overrides.resolution_scale {
                c.resolution_scale = s;
            }
            let effective = serde_json::to_value(&c)?;
            let sweep = taper_sweep(&c)?;
            let cascade = taper_cascade_estimate(&c.device, 50)?;
            let flagged = sweep
                .parameter
                .iter()
                .zip(&sweep.converged)
                .filter(|(_, ok)| !**ok)
                .map(|(l, _)| format!("taper length {l:.3e} m did not converge"))
                .collect();
            let summary = json!({
                "sweep": serde_json::to_value(&sweep)?,
                "cascade_estimate_50": cascade,
            });
            Ok((
                effective,
                RunOutput {
                    csv: sweep.to_csv(),
                    summary,
                    flagged,
                },
            ))
        }
        "beta_factor" => {
            let mut c: BetaConfig = serde_json::from_value(doc.params.clone())?;
            if let Some(s) = overrides.resolution_scale {
                c.resolution_scale = s;
            }
            let effective = serde_json::to_value(&c)?;
            let r = beta_factor(&c)?;
            let flagged = if r.converged {
                vec![]
            } else {
                vec!["field energy did not decay to the stop threshold".into()]
            };
            let summary = json!({
                "result": serde_json::to_value(&r)?,
                "beta_at_band_center": r.band_center(),
            });
            Ok((
                effective,
                RunOutput {
                    csv: r.to_csv(),
                    summary,
                    flagged,
                },
            ))
        }
        "bragg_spectrum" => {
            let mut c: BraggConfig = serde_json::from_value(doc.params.clone())?;
            if let Some(s) = overrides.resolution_scale {
                c.resolution_scale = s;
            }
            let effective = serde_json::to_value(&c)?;
            let r = bragg_spectrum(&c)?;
            let flagged = if r.converged {
                vec![]
            } else {
                vec!["field energy did not decay to the stop threshold".into()]
            };
            let summary = json!({ "spectrum": serde_json::to_value(&r)? });
            Ok((
                effective,
                RunOutput {
                    csv: r.to_csv(),
                    summary,
                    flagged,
                },
            ))
        }
        "grating_extraction" => {
            let mut c: GratingConfig = serde_json::from_value(doc.params.clone())?;
            if let Some(s) = overrides.resolution_scale {
                c.resolution_scale = s;
            }
            let effective = serde_json::to_value(&c)?;
            let r = grating_extraction(&c)?;
            let flagged = if r.converged {
                vec![]
            } else {
                vec!["field energy did not decay to the stop threshold".into()]
            };
            let summary = json!({
                "partition": serde_json::to_value(&r)?,
                "sums": r.sums(),
            });
            Ok((
                effective,
                RunOutput {
                    csv: r.to_csv(),
                    summary,
                    flagged,
                },
            ))
        }
        "efficiency_budget" => {
            let c: BudgetParams = serde_json::from_value(doc.params.clone())?;
            let effective = serde_json::to_value(&c)?;
            let budget = EfficiencyBudget::new(c.beta, c.taper, c.grating, c.setup)?;
            let mut summary = budget.summary();
            if let Some(measured) = c.first_lens_measured {
                let map = summary.as_object_mut().expect("summary is an object");
                map.insert("first_lens_measured".into(), json!(measured));
                map.insert(
                    "excess_loss_ratio".into(),
                    json!(budget.excess_loss_ratio(measured)?),
                );
            }
            let mut csv = String::from("quantity,value\n");
            for (key, value) in summary.as_object().expect("object") {
                if let Some(x) = value.as_f64() {
                    csv.push_str(&format!("{key},{x:.15e}\n"));
                }
            }
            Ok((
                effective,
                RunOutput {
                    csv,
                    summary,
                    flagged: vec![],
                },
            ))
        }
        "g2_pipeline" => {
            let mut c: G2PipelineConfig = serde_json::from_value(doc.params.clone())?;
            if let Some(seed) = overrides.seed {
                c.emitter.seed = seed;
            }
            let effective = serde_json::to_value(&c)?;
            let r = run_g2_pipeline(&c)?;
            let flagged = r
                .fit
                .flag
                .iter()
                .map(|f| format!("fit flagged: {f:?}"))
                .collect();
            let summary = serde_json::to_value(&r)?;
            Ok((
                effective,
                RunOutput {
                    csv: r.to_csv(),
                    summary,
                    flagged,
                },
            ))
        }
        other => anyhow::bail!("unknown experiment {other:?}"),
    }
}
