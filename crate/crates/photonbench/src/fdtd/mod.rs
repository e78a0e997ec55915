//! 2D finite-difference time-domain engine on a Yee grid.
//!
//! TE means (Ez, H̃x, H̃y); TM means (H̃z, Ex, Ey). The magnetic field is
//! stored as H̃ = Z0·H and the vacuum permittivity is dropped from the unit
//! system, so field energy is ½∫(εr·E² + H̃²)dA and Poynting flux is c·E×H̃.
//! Absorbing boundaries are complex-frequency-shifted PML with the shift
//! parameter at zero, which is harmless at optical frequencies (the omitted
//! α·dt term would be ~1e-7) and keeps the recursion branchless.

mod kernel;
pub mod monitor;
pub mod source;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::PermittivityMap;
use crate::modesolver::Polarization;
use crate::units::C0;

use kernel::{AxisPml, Fields, Stencil};
use monitor::{DftAccumulator, FluxTally, LineMonitor, LineSpan, MonitorSpectra, Snapshot};
use source::{Envelope, Orientation, Source, SourceKind};

/// Default Courant factor relative to the 2D stability limit.
pub const COURANT_DEFAULT: f64 = 0.7;
/// Minimum PML thickness accepted at validation.
pub const MIN_PML_CELLS: usize = 8;
/// Minimum grid sampling of a source's center wavelength in the densest
/// material on the grid.
pub const MIN_CELLS_PER_SOURCE_WAVELENGTH: f64 = 15.0;
/// Cadence of the energy/NaN sweep during a run.
const ENERGY_CHECK_EVERY: usize = 50;

#[derive(Debug, Error)]
pub enum FdtdError {
    #[error("time step {dt:.6e} s exceeds the Courant limit {limit:.6e} s")]
    CourantViolation { dt: f64, limit: f64 },
    #[error("absorbing layer is {got} cells; at least {min} are required")]
    PmlTooThin { got: usize, min: usize },
    #[error(
        "source center wavelength spans only {cells:.1} cells in the densest \
         material; at least {required:.0} are required"
    )]
    SourceBandUnresolved { cells: f64, required: f64 },
    #[error("invalid simulation: {0}")]
    Validation(String),
    #[error("non-finite {field} at cell ({i}, {j}) on step {step}")]
    NonFinite {
        step: usize,
        field: String,
        i: usize,
        j: usize,
    },
    #[error("mode expansion requires a normalization run")]
    NormalizationMissing,
    #[error("monitor line too short for the mode: tail at {tail_fraction:.3} of peak")]
    MonitorSpanTooShort { tail_fraction: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

/// Boundary condition on one wall of the domain, ordered
/// `[x_lo, x_hi, y_lo, y_hi]` in the simulation spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Absorbing layer backed by a perfect electric conductor.
    Pml,
    /// Perfect electric conductor: tangential E pinned to zero.
    Pec,
    /// Perfect magnetic conductor: tangential H̃ zero (TE only).
    Pmc,
}

/// Graded-conductivity PML profile parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmlParams {
    pub thickness: usize,
    pub grading: f64,
    pub kappa_max: f64,
    /// σ_max = sigma_factor·(grading+1)·c/Δ.
    pub sigma_factor: f64,
}

impl Default for PmlParams {
    fn default() -> Self {
        Self {
            thickness: 12,
            grading: 3.0,
            kappa_max: 5.0,
            sigma_factor: 0.8,
        }
    }
}

/// When to stop time stepping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopCondition {
    /// Run exactly this many steps.
    FixedSteps(usize),
    /// Run until the field energy decays below `threshold` times its peak
    /// (checked after every source has switched off), or `max_steps`.
    EnergyDecay { threshold: f64, max_steps: usize },
}

impl Default for StopCondition {
    fn default() -> Self {
        StopCondition::EnergyDecay {
            threshold: 1e-5,
            max_steps: 200_000,
        }
    }
}

/// A point probe recording the primary field (Ez for TE, H̃z for TM) at
/// every time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub i: usize,
    pub j: usize,
}

/// Complete description of one FDTD run.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub map: PermittivityMap,
    pub polarization: Polarization,
    /// Time step (s). The constructor picks the default Courant factor.
    pub dt: f64,
    /// Wall boundaries ordered [x_lo, x_hi, y_lo, y_hi].
    pub boundaries: [Boundary; 4],
    pub pml: PmlParams,
    pub sources: Vec<Source>,
    pub monitors: Vec<LineMonitor>,
    /// Named time-domain flux tallies (net energy through a line).
    pub flux_tallies: Vec<(String, LineSpan)>,
    pub probes: Vec<Probe>,
    /// Steps (1-based, counted after the update) at which to snapshot the
    /// primary field.
    pub snapshot_steps: Vec<usize>,
    /// Accumulate Σ Ez²·dt on every node (TE only).
    pub accumulate_intensity: bool,
    pub stop: StopCondition,
}

impl SimulationSpec {
    pub fn new(map: PermittivityMap, polarization: Polarization) -> Self {
        let dt = COURANT_DEFAULT * map.dx.min(map.dy) / (C0 * 2f64.sqrt());
        Self {
            map,
            polarization,
            dt,
            boundaries: [Boundary::Pml; 4],
            pml: PmlParams::default(),
            sources: Vec::new(),
            monitors: Vec::new(),
            flux_tallies: Vec::new(),
            probes: Vec::new(),
            snapshot_steps: Vec::new(),
            accumulate_intensity: false,
            stop: StopCondition::default(),
        }
    }

    /// 2D stability bound min(dx,dy)/(c·√2).
    pub fn courant_limit(&self) -> f64 {
        self.map.dx.min(self.map.dy) / (C0 * 2f64.sqrt())
    }

    fn span_in_range(&self, span: &LineSpan) -> bool {
        let (nx, ny) = (self.map.nx, self.map.ny);
        match (self.polarization, span) {
            (Polarization::Te, LineSpan::Vertical { i, j0, len }) => {
                *len >= 1 && *i <= nx && j0 + len <= ny + 1
            }
            (Polarization::Te, LineSpan::Horizontal { j, i0, len }) => {
                *len >= 1 && *j <= ny && i0 + len <= nx + 1
            }
            (Polarization::Tm, LineSpan::Vertical { i, j0, len }) => {
                *len >= 1 && *i <= nx && j0 + len <= ny
            }
            (Polarization::Tm, LineSpan::Horizontal { j, i0, len }) => {
                *len >= 1 && *j <= ny && i0 + len <= nx
            }
        }
    }

    pub fn validate(&self) -> Result<(), FdtdError> {
        let (nx, ny) = (self.map.nx, self.map.ny);
        if nx < 3 || ny < 3 {
            return Err(FdtdError::Validation(format!(
                "grid {nx}×{ny} is too small to update"
            )));
        }
        if !(self.dt > 0.0) {
            return Err(FdtdError::Validation("time step must be positive".into()));
        }
        let limit = self.courant_limit();
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(FdtdError::CourantViolation { dt: self.dt, limit });
        }

        let uses_pml = self.boundaries.contains(&Boundary::Pml);
        if uses_pml {
            if self.pml.thickness < MIN_PML_CELLS {
                return Err(FdtdError::PmlTooThin {
                    got: self.pml.thickness,
                    min: MIN_PML_CELLS,
                });
            }
            if self.pml.grading < 1.0 || self.pml.kappa_max < 1.0 || self.pml.sigma_factor <= 0.0 {
                return Err(FdtdError::Validation(
                    "absorbing-layer grading, kappa_max, and sigma_factor must be ≥1, ≥1, >0"
                        .into(),
                ));
            }
            let pml_cells = |lo: Boundary, hi: Boundary| {
                self.pml.thickness
                    * ((lo == Boundary::Pml) as usize + (hi == Boundary::Pml) as usize)
            };
            if nx <= pml_cells(self.boundaries[0], self.boundaries[1])
                || ny <= pml_cells(self.boundaries[2], self.boundaries[3])
            {
                return Err(FdtdError::Validation(
                    "grid is not larger than the absorbing layers".into(),
                ));
            }
        }
        if self.polarization == Polarization::Tm && self.boundaries.contains(&Boundary::Pmc) {
            return Err(FdtdError::Unsupported(
                "magnetic-wall boundaries are only available for TE".into(),
            ));
        }
        if self.polarization == Polarization::Tm && self.accumulate_intensity {
            return Err(FdtdError::Unsupported(
                "intensity accumulation is only available for TE".into(),
            ));
        }

        let n_max = self
            .map
            .eps
            .iter()
            .fold(1.0f64, |m, e| m.max(*e))
            .sqrt();
        let d_max = self.map.dx.max(self.map.dy);
        for src in &self.sources {
            src.envelope
                .validate()
                .map_err(FdtdError::Validation)?;
            if !src.amplitude.is_finite() {
                return Err(FdtdError::Validation("source amplitude must be finite".into()));
            }
            let lambda = C0 / (n_max * src.envelope.center_freq());
            let cells = lambda / d_max;
            if cells < MIN_CELLS_PER_SOURCE_WAVELENGTH {
                return Err(FdtdError::SourceBandUnresolved {
                    cells,
                    required: MIN_CELLS_PER_SOURCE_WAVELENGTH,
                });
            }
            match (&src.kind, self.polarization) {
                (SourceKind::PointDipole { orientation, .. }, Polarization::Te) => {
                    if *orientation != Orientation::Z {
                        return Err(FdtdError::Validation(
                            "TE dipoles must be z-oriented".into(),
                        ));
                    }
                }
                (SourceKind::PointDipole { orientation, .. }, Polarization::Tm) => {
                    if *orientation == Orientation::Z {
                        return Err(FdtdError::Validation(
                            "TM dipoles must be x- or y-oriented".into(),
                        ));
                    }
                }
                (SourceKind::ModeLine { .. }, Polarization::Tm) => {
                    return Err(FdtdError::Unsupported(
                        "mode-line sources are only available for TE".into(),
                    ));
                }
                (SourceKind::ModeLine { .. }, Polarization::Te) => {}
            }
            match &src.kind {
                SourceKind::PointDipole { i, j, orientation } => {
                    let ok = match (self.polarization, orientation) {
                        (Polarization::Te, _) => *i <= nx && *j <= ny,
                        (Polarization::Tm, Orientation::X) => *i < nx && *j <= ny,
                        (Polarization::Tm, _) => *i <= nx && *j < ny,
                    };
                    if !ok {
                        return Err(FdtdError::Validation(format!(
                            "dipole at ({i}, {j}) lies outside the grid"
                        )));
                    }
                }
                SourceKind::ModeLine { i, j0, profile } => {
                    if profile.is_empty() {
                        return Err(FdtdError::Validation("mode-line profile is empty".into()));
                    }
                    if *i > nx || j0 + profile.len() > ny + 1 {
                        return Err(FdtdError::Validation(format!(
                            "mode line at i = {i} exceeds the grid"
                        )));
                    }
                }
            }
        }

        for mon in &self.monitors {
            if mon.freqs.is_empty() {
                return Err(FdtdError::Validation(format!(
                    "monitor '{}' has no frequencies",
                    mon.name
                )));
            }
            if !self.span_in_range(&mon.span) {
                return Err(FdtdError::Validation(format!(
                    "monitor '{}' lies outside the grid",
                    mon.name
                )));
            }
            for f in &mon.freqs {
                let covered = self.sources.iter().any(|s| {
                    let (lo, hi) = s.envelope.band();
                    *f >= lo && *f <= hi
                });
                if !covered {
                    return Err(FdtdError::Validation(format!(
                        "monitor '{}' frequency {f:.4e} Hz lies outside every source band",
                        mon.name
                    )));
                }
            }
        }
        for (name, span) in &self.flux_tallies {
            if !self.span_in_range(span) {
                return Err(FdtdError::Validation(format!(
                    "flux tally '{name}' lies outside the grid"
                )));
            }
        }
        for p in &self.probes {
            let ok = match self.polarization {
                Polarization::Te => p.i <= nx && p.j <= ny,
                Polarization::Tm => p.i < nx && p.j < ny,
            };
            if !ok {
                return Err(FdtdError::Validation(format!(
                    "probe at ({}, {}) lies outside the grid",
                    p.i, p.j
                )));
            }
        }
        match self.stop {
            StopCondition::FixedSteps(n) if n == 0 => {
                return Err(FdtdError::Validation("step count must be positive".into()));
            }
            StopCondition::EnergyDecay {
                threshold,
                max_steps,
            } if !(threshold > 0.0) || max_steps == 0 => {
                return Err(FdtdError::Validation(
                    "decay stop needs a positive threshold and step cap".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub monitors: Vec<MonitorSpectra>,
    /// Net energy through each named tally line (positive along +axis).
    pub tallies: Vec<(String, f64)>,
    /// One trace per probe, one sample per step.
    pub probes: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    /// Σ Ez²·dt per node, (nx+1)×(ny+1) row-major, when requested.
    pub intensity: Option<Vec<f64>>,
    pub steps: usize,
    /// False when an energy-decay stop hit its step cap first.
    pub converged: bool,
    /// Work done by the soft sources on the field.
    pub energy_injected: f64,
    pub final_energy: f64,
}

impl RunResult {
    pub fn monitor(&self, name: &str) -> Option<&MonitorSpectra> {
        self.monitors.iter().find(|m| m.name == name)
    }

    pub fn tally(&self, name: &str) -> Option<f64> {
        self.tallies
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| *e)
    }
}

/// One injection point of a prepared source.
struct InjectionPoint {
    idx: usize,
    weight: f64,
    eps: f64,
}

enum InjectionTarget {
    Ez,
    Ex,
    Ey,
}

struct PreparedSource {
    target: InjectionTarget,
    points: Vec<InjectionPoint>,
    envelope: Envelope,
    amplitude: f64,
}

/// A validated, ready-to-step simulation.
pub struct Simulation {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    dt: f64,
    polarization: Polarization,
    fields: Fields,
    stencil: Stencil,
    pml_x: AxisPml,
    pml_y: AxisPml,
    sources: Vec<PreparedSource>,
    sources_inactive_after: f64,
    dfts: Vec<DftAccumulator>,
    tally_names: Vec<String>,
    tallies: Vec<FluxTally>,
    probes: Vec<Probe>,
    probe_traces: Vec<Vec<f64>>,
    snapshot_steps: Vec<usize>,
    snapshots: Vec<Snapshot>,
    intensity: Option<Vec<f64>>,
    stop: StopCondition,
    step_count: usize,
    energy_injected: f64,
    peak_energy: f64,
}

impl Simulation {
    pub fn new(spec: SimulationSpec) -> Result<Self, FdtdError> {
        spec.validate()?;
        let SimulationSpec {
            map,
            polarization,
            dt,
            boundaries,
            pml,
            sources,
            monitors,
            flux_tallies,
            probes,
            mut snapshot_steps,
            accumulate_intensity,
            stop,
        } = spec;

        let (nx, ny) = (map.nx, map.ny);
        let mut fields = Fields::new(&map, polarization);
        fields.set_dt(dt);
        let stencil = Stencil::new(nx, ny, map.dx, map.dy, dt, &boundaries);
        let pml_x = kernel::build_axis_pml(nx, map.dx, dt, boundaries[0], boundaries[1], &pml);
        let pml_y = kernel::build_axis_pml(ny, map.dy, dt, boundaries[2], boundaries[3], &pml);

        let prepared: Vec<PreparedSource> = sources
            .iter()
            .map(|src| prepare_source(src, &fields))
            .collect();
        let sources_inactive_after = sources
            .iter()
            .map(|s| s.envelope.active_until())
            .fold(0.0f64, f64::max);

        let dfts: Vec<DftAccumulator> = monitors
            .into_iter()
            .map(|m| {
                let dl = match m.span {
                    LineSpan::Vertical { .. } => map.dy,
                    LineSpan::Horizontal { .. } => map.dx,
                };
                DftAccumulator::new(m, dt, dl)
            })
            .collect();
        let (tally_names, tallies): (Vec<String>, Vec<FluxTally>) = flux_tallies
            .into_iter()
            .map(|(name, span)| (name, FluxTally::new(span)))
            .unzip();

        snapshot_steps.sort_unstable();
        snapshot_steps.dedup();
        let n_probes = probes.len();
        let intensity = accumulate_intensity.then(|| vec![0.0; (nx + 1) * (ny + 1)]);

        Ok(Self {
            nx,
            ny,
            dx: map.dx,
            dy: map.dy,
            dt,
            polarization,
            fields,
            stencil,
            pml_x,
            pml_y,
            sources: prepared,
            sources_inactive_after,
            dfts,
            tally_names,
            tallies,
            probes,
            probe_traces: vec![Vec::new(); n_probes],
            snapshot_steps,
            snapshots: Vec::new(),
            intensity,
            stop,
            step_count: 0,
            energy_injected: 0.0,
            peak_energy: 0.0,
        })
    }

    /// Advance one full leapfrog step (H half-step, then E, then sources,
    /// then measurement accumulation). [`run`](Self::run) drives this loop;
    /// it is public so callers can interleave their own measurements.
    pub fn step(&mut self) {
        match self.polarization {
            Polarization::Te => {
                kernel::update_h_te(&mut self.fields, &self.stencil, &self.pml_x, &self.pml_y);
                kernel::update_e_te(&mut self.fields, &self.stencil, &self.pml_x, &self.pml_y);
            }
            Polarization::Tm => {
                kernel::update_h_tm(&mut self.fields, &self.stencil, &self.pml_x, &self.pml_y);
                kernel::update_e_tm(&mut self.fields, &self.stencil, &self.pml_x, &self.pml_y);
            }
        }

        let t = (self.step_count + 1) as f64 * self.dt;
        let da = self.dx * self.dy;
        for src in &self.sources {
            if t > src.envelope.active_until() {
                continue;
            }
            let v = src.amplitude * src.envelope.value(t);
            if v == 0.0 {
                continue;
            }
            let field = match src.target {
                InjectionTarget::Ez => &mut self.fields.ez,
                InjectionTarget::Ex => &mut self.fields.ex,
                InjectionTarget::Ey => &mut self.fields.ey,
            };
            for p in &src.points {
                let delta = v * p.weight;
                let e = field[p.idx];
                self.energy_injected += p.eps * (e * delta + 0.5 * delta * delta) * da;
                field[p.idx] = e + delta;
            }
        }

        for dft in &mut self.dfts {
            dft.accumulate(&self.fields);
        }
        for tally in &mut self.tallies {
            let dl = match tally.span {
                LineSpan::Vertical { .. } => self.dy,
                LineSpan::Horizontal { .. } => self.dx,
            };
            tally.accumulate(&self.fields, dl, self.dt);
        }
        for (k, p) in self.probes.iter().enumerate() {
            let v = match self.polarization {
                Polarization::Te => self.fields.ez[self.fields.ez_idx(p.i, p.j)],
                Polarization::Tm => self.fields.hz[self.fields.hz_idx(p.i, p.j)],
            };
            self.probe_traces[k].push(v);
        }
        if let Some(acc) = &mut self.intensity {
            for (a, e) in acc.iter_mut().zip(&self.fields.ez) {
                *a += e * e * self.dt;
            }
        }

        self.step_count += 1;
        if self.snapshot_steps.binary_search(&self.step_count).is_ok() {
            self.snapshots.push(self.take_snapshot());
        }
    }

    fn take_snapshot(&self) -> Snapshot {
        let (field, nx, ny, data) = match self.polarization {
            Polarization::Te => (
                "Ez",
                self.nx + 1,
                self.ny + 1,
                self.fields.ez.clone(),
            ),
            Polarization::Tm => ("Hz", self.nx, self.ny, self.fields.hz.clone()),
        };
        Snapshot {
            step: self.step_count,
            field: field.to_string(),
            nx,
            ny,
            dx: self.dx,
            dy: self.dy,
            data,
        }
    }

    /// Time step (s).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Steps taken so far.
    pub fn steps_taken(&self) -> usize {
        self.step_count
    }

    /// Time after which every source envelope has switched off (s).
    pub fn sources_inactive_after(&self) -> f64 {
        self.sources_inactive_after
    }

    /// Instantaneous field energy ½Σ(εr·E² + H̃²)·dA.
    pub fn field_energy(&self) -> f64 {
        kernel::total_energy(&self.fields, self.dx, self.dy)
    }

    /// The exactly conserved leapfrog invariant (source-free PEC evolution):
    /// like [`field_energy`](Self::field_energy) but with the magnetic term
    /// taken as the staggered product H̃^{n-1/2}·H̃^{n+1/2}.
    pub fn invariant_energy(&self) -> f64 {
        kernel::conserved_energy(
            &self.fields,
            &self.stencil,
            &self.pml_x,
            &self.pml_y,
            self.dx,
            self.dy,
        )
    }

    fn check_fields(&self) -> Result<(), FdtdError> {
        if let Some((field, i, j)) = kernel::find_non_finite(&self.fields) {
            return Err(FdtdError::NonFinite {
                step: self.step_count,
                field: field.to_string(),
                i,
                j,
            });
        }
        Ok(())
    }

    /// Step to completion and collect results.
    pub fn run(mut self) -> Result<RunResult, FdtdError> {
        let mut converged = true;
        match self.stop {
            StopCondition::FixedSteps(n) => {
                for _ in 0..n {
                    self.step();
                    if self.step_count % ENERGY_CHECK_EVERY == 0 {
                        self.check_fields()?;
                    }
                }
            }
            StopCondition::EnergyDecay {
                threshold,
                max_steps,
            } => {
                converged = false;
                while self.step_count < max_steps {
                    self.step();
                    if self.step_count % ENERGY_CHECK_EVERY != 0 {
                        continue;
                    }
                    self.check_fields()?;
                    let u = self.field_energy();
                    self.peak_energy = self.peak_energy.max(u);
                    let t = self.step_count as f64 * self.dt;
                    if t > self.sources_inactive_after && u <= threshold * self.peak_energy {
                        converged = true;
                        break;
                    }
                }
            }
        }
        self.check_fields()?;

        let final_energy = self.field_energy();
        let monitors: Vec<MonitorSpectra> = self
            .dfts
            .into_iter()
            .map(|d| d.finish(self.dt, self.polarization))
            .collect();
        let tallies = self
            .tally_names
            .into_iter()
            .zip(self.tallies.into_iter().map(|t| t.energy))
            .collect();
        Ok(RunResult {
            monitors,
            tallies,
            probes: self.probe_traces,
            snapshots: self.snapshots,
            intensity: self.intensity,
            steps: self.step_count,
            converged,
            energy_injected: self.energy_injected,
            final_energy,
        })
    }
}

fn prepare_source(src: &Source, fields: &Fields) -> PreparedSource {
    match &src.kind {
        SourceKind::PointDipole { i, j, orientation } => {
            let (target, idx, eps) = match (fields.polarization, orientation) {
                (Polarization::Te, _) => {
                    let idx = fields.ez_idx(*i, *j);
                    (InjectionTarget::Ez, idx, fields.eps_node[idx])
                }
                (Polarization::Tm, Orientation::X) => {
                    let idx = fields.ex_idx(*i, *j);
                    (InjectionTarget::Ex, idx, fields.eps_ex[idx])
                }
                (Polarization::Tm, _) => {
                    let idx = fields.ey_idx(*i, *j);
                    (InjectionTarget::Ey, idx, fields.eps_ey[idx])
                }
            };
            PreparedSource {
                target,
                points: vec![InjectionPoint {
                    idx,
                    weight: 1.0,
                    eps,
                }],
                envelope: src.envelope,
                amplitude: src.amplitude,
            }
        }
        SourceKind::ModeLine { i, j0, profile } => {
            let points = profile
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let idx = fields.ez_idx(*i, j0 + k);
                    InjectionPoint {
                        idx,
                        weight: *w,
                        eps: fields.eps_node[idx],
                    }
                })
                .collect();
            PreparedSource {
                target: InjectionTarget::Ez,
                points,
                envelope: src.envelope,
                amplitude: src.amplitude,
            }
        }
    }
}

/// Validate and run a simulation in one call.
pub fn run(spec: SimulationSpec) -> Result<RunResult, FdtdError> {
    Simulation::new(spec)?.run()
}
