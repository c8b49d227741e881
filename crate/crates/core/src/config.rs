//! Run configuration: a TOML file with nested sections in which every knob
//! has a default, so a minimal file names only the physics.
//!
//! ```toml
//! [qubit]
//! delta = 0.5
//!
//! [drive]
//! preset = "f2"            # or: harmonics = [[1, 1.0, 0.0], [2, 0.5, 0.0]]
//!
//! [bath]
//! alpha = 1e-3
//! beta = 10.0
//! coupling = "x"           # "x" | "z" | "mixed:<theta>"
//! ```

use serde::{Deserialize, Serialize};

use crate::analytic::Coupling;
use crate::floquet::FloquetOptions;
use crate::model::{BathParams, DrivingShape, Harmonic, QubitParams, DEFAULT_MAX_HARMONIC};
use crate::num::linspace;
use crate::redfield::{PipelineOptions, MAX_SIDEBANDS};
use crate::spectra::SweepOptions;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitSection {
    /// Tunnel splitting in units of `hbar Omega`.
    pub delta: f64,
    /// Static detuning used by single-point subcommands (`floquet`).
    pub epsilon0: f64,
    /// Driving amplitude of amplitude-slice subcommands.
    pub amplitude: f64,
}

impl Default for QubitSection {
    fn default() -> Self {
        Self { delta: 0.5, epsilon0: 0.0, amplitude: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    /// `cos`, `f1`, `f2` or `f3`; ignored when `harmonics` is given.
    pub preset: String,
    /// Explicit `(k, a_k, b_k)` triples of `sum_k a_k cos(k Omega t) + b_k sin(k Omega t)`.
    pub harmonics: Option<Vec<(u32, f64, f64)>>,
    pub omega: f64,
    pub max_harmonic: u32,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { preset: "cos".into(), harmonics: None, omega: 1.0, max_harmonic: DEFAULT_MAX_HARMONIC }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    pub alpha: f64,
    /// Inverse temperature in units of `1 / hbar Omega`.
    pub beta: f64,
    /// `x`, `z` or `mixed:<theta>` with `X = cos(theta) sigma_x + sin(theta) sigma_z`.
    pub coupling: String,
}

impl Default for BathSection {
    fn default() -> Self {
        Self { alpha: 1e-3, beta: 10.0, coupling: "x".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    pub amp_min: f64,
    pub amp_max: f64,
    pub amp_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { eps_min: -10.0, eps_max: 10.0, eps_points: 201, amp_min: 0.0, amp_max: 15.0, amp_points: 151 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// Density-operator sideband cutoff `K`.
    pub sidebands: usize,
    /// Transition-element harmonics `K_X` (must be at least `2 K`).
    pub k_x: usize,
    /// Kept Floquet-mode Fourier coefficients.
    pub k_modes: usize,
    /// Samples per period (power of two).
    pub samples: usize,
    /// Local error tolerance of the period propagation.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let p = PipelineOptions::<f64>::default();
        Self {
            sidebands: p.sidebands,
            k_x: p.k_x,
            k_modes: p.floquet.k_modes,
            samples: p.floquet.samples,
            tol: p.floquet.tol,
            max_steps: p.floquet.max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Zero-padding factor of the 2D Fourier transform.
    pub pad: usize,
    pub subtract_mean: bool,
    /// Largest `|n|` of the closed-form resonance sums.
    pub n_max: usize,
    /// Phenomenological rate of the closed-form peaks.
    pub gamma: f64,
    /// Time scan resolution of the stationary-phase arc solver.
    pub arc_scan: usize,
    /// Points on the `tau_eps` axis of predicted arcs, over one period.
    pub arc_points: usize,
    /// Decay fit window in units of the period; `[1/8, 3/8]` by default.
    pub decay_window: (f64, f64),
    /// Mixing angles of the overlap table.
    pub overlap_thetas: Vec<f64>,
    pub overlap_subtract_mean: bool,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        let q = std::f64::consts::FRAC_PI_8;
        Self {
            pad: 2,
            subtract_mean: true,
            n_max: 60,
            gamma: 0.01,
            arc_scan: crate::analytic::DEFAULT_ARC_SCAN,
            arc_points: 257,
            decay_window: (0.125, 0.375),
            overlap_thetas: (0..=4).map(|i| q * i as f64).collect(),
            overlap_subtract_mean: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Sweep worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), workers: 0 }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Every algorithm is deterministic; kept as an explicit record in artifacts.
    pub deterministic: bool,
    pub qubit: QubitSection,
    pub drive: DriveSection,
    pub bath: BathSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            deterministic: true,
            qubit: Default::default(),
            drive: Default::default(),
            bath: Default::default(),
            grid: Default::default(),
            solver: Default::default(),
            analysis: Default::default(),
            output: Default::default(),
        }
    }
}

/// Parses `x`, `z` or `mixed:<theta>` into the coupling angle.
pub fn parse_coupling(s: &str) -> Result<f64, ConfigError> {
    let s = s.trim().to_ascii_lowercase();
    match s.as_str() {
        "x" | "sigma_x" => Ok(0.0),
        "z" | "sigma_z" => Ok(std::f64::consts::FRAC_PI_2),
        _ => {
            let theta = s
                .strip_prefix("mixed:")
                .ok_or_else(|| invalid("bath.coupling", format!("`{s}` is not x, z or mixed:<theta>")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| invalid("bath.coupling", e.to_string()))?;
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
                return Err(invalid("bath.coupling", format!("theta {theta} outside [0, pi/2]")));
            }
            Ok(theta)
        }
    }
}

/// Canonical coupling string for an angle.
pub fn coupling_name(theta: f64) -> String {
    if theta == 0.0 {
        "x".into()
    } else if theta == std::f64::consts::FRAC_PI_2 {
        "z".into()
    } else {
        format!("mixed:{theta}")
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.shape()?;
        self.qubit_params()?;
        self.bath_params()?;
        let g = &self.grid;
        if g.eps_points == 0 {
            return Err(invalid("grid.eps_points", "axis is empty"));
        }
        if g.amp_points == 0 {
            return Err(invalid("grid.amp_points", "axis is empty"));
        }
        if !(g.eps_min.is_finite() && g.eps_max.is_finite()) || (g.eps_points > 1 && g.eps_max <= g.eps_min) {
            return Err(invalid("grid.eps_max", "needs eps_min < eps_max"));
        }
        if !(g.amp_min.is_finite() && g.amp_max.is_finite()) || (g.amp_points > 1 && g.amp_max <= g.amp_min) {
            return Err(invalid("grid.amp_max", "needs amp_min < amp_max"));
        }
        let s = &self.solver;
        if s.sidebands > MAX_SIDEBANDS {
            return Err(invalid("solver.sidebands", format!("{} exceeds {MAX_SIDEBANDS}", s.sidebands)));
        }
        if 2 * s.sidebands > s.k_x {
            return Err(invalid("solver.k_x", format!("K = {} needs k_x >= {}", s.sidebands, 2 * s.sidebands)));
        }
        if !s.samples.is_power_of_two() || s.samples < 8 {
            return Err(invalid("solver.samples", "must be a power of two >= 8"));
        }
        if 2 * s.k_x >= s.samples || 2 * s.k_modes >= s.samples {
            return Err(invalid("solver.samples", "too few samples for k_x / k_modes"));
        }
        if !(s.tol > 0.0) {
            return Err(invalid("solver.tol", "must be positive"));
        }
        let a = &self.analysis;
        if a.pad == 0 {
            return Err(invalid("analysis.pad", "must be >= 1"));
        }
        if !(a.gamma > 0.0) {
            return Err(invalid("analysis.gamma", "must be positive"));
        }
        if !(0.0 <= a.decay_window.0 && a.decay_window.0 < a.decay_window.1) {
            return Err(invalid("analysis.decay_window", "needs 0 <= lo < hi"));
        }
        if a.arc_points < 2 || a.arc_scan < 8 {
            return Err(invalid("analysis.arc_points", "too few points"));
        }
        for &t in &a.overlap_thetas {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&t) {
                return Err(invalid("analysis.overlap_thetas", format!("{t} outside [0, pi/2]")));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Result<DrivingShape<f64>, ConfigError> {
        let d = &self.drive;
        let err = |e: crate::model::ModelError| invalid("drive", e.to_string());
        let harmonics: Vec<Harmonic<f64>> = match &d.harmonics {
            Some(h) => h.iter().map(|&(k, a, b)| Harmonic { k, a, b }).collect(),
            None => DrivingShape::<f64>::preset(&d.preset).map_err(err)?.harmonics().to_vec(),
        };
        DrivingShape::with_cap(d.omega, harmonics, d.max_harmonic).map_err(err)
    }

    pub fn qubit_params(&self) -> Result<QubitParams<f64>, ConfigError> {
        QubitParams::new(self.qubit.epsilon0, self.qubit.delta, self.qubit.amplitude)
            .map_err(|e| invalid("qubit", e.to_string()))
    }

    pub fn theta(&self) -> Result<f64, ConfigError> {
        parse_coupling(&self.bath.coupling)
    }

    pub fn bath_params(&self) -> Result<BathParams<f64>, ConfigError> {
        BathParams::new(self.bath.alpha, self.bath.beta, self.theta()?).map_err(|e| invalid("bath", e.to_string()))
    }

    /// Closed-form coupling class; mixed couplings have no closed form.
    pub fn analytic_coupling(&self) -> Result<Coupling, ConfigError> {
        let theta = self.theta()?;
        if theta == 0.0 {
            Ok(Coupling::Transverse)
        } else if theta == std::f64::consts::FRAC_PI_2 {
            Ok(Coupling::Longitudinal)
        } else {
            Err(invalid("bath.coupling", "closed forms exist only for x or z coupling"))
        }
    }

    pub fn eps_axis(&self) -> Vec<f64> {
        linspace(self.grid.eps_min, self.grid.eps_max, self.grid.eps_points)
    }

    pub fn amp_axis(&self) -> Vec<f64> {
        linspace(self.grid.amp_min, self.grid.amp_max, self.grid.amp_points)
    }

    pub fn floquet_options(&self) -> FloquetOptions<f64> {
        let s = &self.solver;
        FloquetOptions { tol: s.tol, samples: s.samples, k_modes: s.k_modes, max_steps: s.max_steps }
    }

    pub fn pipeline_options(&self) -> PipelineOptions<f64> {
        PipelineOptions { floquet: self.floquet_options(), k_x: self.solver.k_x, sidebands: self.solver.sidebands }
    }

    pub fn sweep_options(&self) -> SweepOptions<f64> {
        SweepOptions { pipeline: self.pipeline_options(), workers: self.output.workers }
    }
}
