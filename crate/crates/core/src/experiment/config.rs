//! Experiment configuration documents (TOML).
//!
//! ```toml
//! kind = "weak"            # eraser | weak | theta2_sweep | eq14_check
//! output_path = "weak.csv" # optional, --out wins
//! seed = 7                 # optional, default 0
//!
//! [weak]
//! theta = 0.7853981633974483   # two-level example shortcut, or give
//! # psi_i = { polar = 0.0, azimuth = 0.0 }
//! # psi_f = { amplitudes = [[0.6, 0.0], [0.8, 0.0]] }
//! # observable = "sigma_x"     # or { pauli = [a0, ax, ay, az] }
//! couplings = [0.05]
//! delta_ps = [0.1]
//! ```
//!
//! States are either raw complex amplitude pairs `[[re, im], [re, im]]` or
//! Bloch angles; see [`StateSpec`].

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eraser::PathState;
use crate::operator::{Observable, SELECTION_TOL};
use crate::probe::{worked_example_post_selection, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH};
use crate::state::{inner_product, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Eraser,
    Weak,
    Theta2Sweep,
    Eq14Check,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Eraser => "eraser",
            ExperimentKind::Weak => "weak",
            ExperimentKind::Theta2Sweep => "theta2_sweep",
            ExperimentKind::Eq14Check => "eq14_check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A state written either as amplitudes or as Bloch angles
/// `cos(polar/2)|+> + e^{i azimuth} sin(polar/2)|->`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateSpec {
    Amplitudes { amplitudes: [[f64; 2]; 2] },
    Bloch { polar: f64, azimuth: f64 },
}

impl StateSpec {
    pub fn to_state(&self) -> crate::Result<PureState> {
        match self {
            StateSpec::Amplitudes { amplitudes: [p, m] } => {
                PureState::new(Complex64::new(p[0], p[1]), Complex64::new(m[0], m[1]))
            }
            StateSpec::Bloch { polar, azimuth } => PureState::from_bloch_angles(*polar, *azimuth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    /// `identity`, `sigma_x`, `sigma_y` or `sigma_z`.
    Named(String),
    Pauli { pauli: [f64; 4] },
}

impl ObservableSpec {
    pub fn to_observable(&self) -> Result<Observable, String> {
        match self {
            ObservableSpec::Named(name) => match name.as_str() {
                "identity" => Ok(Observable::identity()),
                "sigma_x" => Ok(Observable::sigma_x()),
                "sigma_y" => Ok(Observable::sigma_y()),
                "sigma_z" => Ok(Observable::sigma_z()),
                other => Err(format!(
                    "unknown observable '{other}' (expected identity, sigma_x, sigma_y or sigma_z)"
                )),
            },
            ObservableSpec::Pauli { pauli } => {
                if pauli.iter().all(|v| v.is_finite()) {
                    Ok(Observable::from_pauli(pauli[0], pauli[1], pauli[2], pauli[3]))
                } else {
                    Err("Pauli coefficients must be finite".into())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EraserCase {
    pub c1: [f64; 2],
    pub c2: [f64; 2],
    pub psi_i: StateSpec,
    pub psi_m1: StateSpec,
    pub psi_m2: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_f: Option<StateSpec>,
}

impl EraserCase {
    pub fn path(&self) -> crate::Result<PathState> {
        PathState::new(
            Complex64::new(self.c1[0], self.c1[1]),
            Complex64::new(self.c2[0], self.c2[1]),
        )
    }
}

fn default_n_grid() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EraserConfig {
    #[serde(default)]
    pub scenarios: Vec<EraserCase>,
    /// Number of additional seeded random scenarios.
    #[serde(default)]
    pub random: usize,
    #[serde(default = "default_n_grid")]
    pub n_grid: usize,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}

fn default_max_ratio() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakConfig {
    /// Shortcut for the two-level example with post-selection angle `theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_i: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_f: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    #[serde(default)]
    pub couplings: Vec<f64>,
    #[serde(default)]
    pub delta_ps: Vec<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Grid half-width in units of `delta_p`.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default)]
    pub p_center: f64,
    /// Number of additional seeded random scenarios.
    #[serde(default)]
    pub random: usize,
    /// Upper end of the weakness ratios drawn for random scenarios.
    #[serde(default = "default_max_ratio")]
    pub max_ratio: f64,
}

impl WeakConfig {
    pub fn has_explicit_scenario(&self) -> bool {
        self.theta.is_some()
            || self.psi_i.is_some()
            || self.psi_f.is_some()
            || self.observable.is_some()
    }
}

fn default_thetas() -> Vec<f64> {
    vec![PI / 16.0, PI / 8.0, PI / 4.0]
}

fn default_g() -> f64 {
    1.0
}

fn default_p_max() -> f64 {
    PI / 2.0 - 0.01
}

fn default_p_min() -> f64 {
    -default_p_max()
}

fn default_samples() -> usize {
    1001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_p_min")]
    pub p_min: f64,
    #[serde(default = "default_p_max")]
    pub p_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Explicit momentum samples; replaces the uniform range when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            thetas: default_thetas(),
            g: default_g(),
            hbar: default_hbar(),
            p_min: default_p_min(),
            p_max: default_p_max(),
            samples: default_samples(),
            p_values: None,
        }
    }
}

impl SweepConfig {
    pub fn momenta(&self) -> Vec<f64> {
        if let Some(values) = &self.p_values {
            return values.clone();
        }
        if self.samples == 1 {
            return vec![0.5 * (self.p_min + self.p_max)];
        }
        let step = (self.p_max - self.p_min) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| self.p_min + step * k as f64)
            .collect()
    }
}

fn default_triples() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eq14Config {
    #[serde(default = "default_triples")]
    pub triples: usize,
}

impl Default for Eq14Config {
    fn default() -> Self {
        Self {
            triples: default_triples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eraser: Option<EraserConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak: Option<WeakConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2_sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq14_check: Option<Eq14Config>,
}

/// A single schema or domain-precondition violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Dotted path of the offending field, e.g. `weak.grid_points`.
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Violation> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = e
                .span()
                .map(|span| locate_key(text, span.start))
                .unwrap_or_else(|| "<document>".into());
            Violation::new(field, message)
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fills in defaults for the sections that can run without one.
    pub fn with_defaults(mut self) -> Self {
        match self.kind {
            Some(ExperimentKind::Theta2Sweep) if self.theta2_sweep.is_none() => {
                self.theta2_sweep = Some(SweepConfig::default())
            }
            Some(ExperimentKind::Eq14Check) if self.eq14_check.is_none() => {
                self.eq14_check = Some(Eq14Config::default())
            }
            _ => {}
        }
        self
    }
}

/// Best-effort dotted key path for a byte offset in a TOML document: the
/// innermost `[table]` header above the offset joined with the key on the
/// offending line.
fn locate_key(text: &str, offset: usize) -> String {
    let head = &text[..offset.min(text.len())];
    let line_start = head.rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[line_start..]
        .find('\n')
        .map_or(text.len(), |i| line_start + i);
    let line = text[line_start..line_end].trim();
    let table = head[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').to_string());
    let key = line
        .split_once('=')
        .map(|(k, _)| k.trim().to_string())
        .filter(|k| !k.is_empty() && !k.starts_with('['));
    match (table, key) {
        (Some(t), Some(k)) => format!("{t}.{k}"),
        (Some(t), None) => t,
        (None, Some(k)) => k,
        (None, None) => "<document>".into(),
    }
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation::new(field, message));
    }

    fn finite(&mut self, field: &str, v: f64) -> bool {
        if !v.is_finite() {
            self.push(field, format!("must be finite (got {v})"));
            return false;
        }
        true
    }

    fn positive(&mut self, field: &str, v: f64) -> bool {
        if !(v.is_finite() && v > 0.0) {
            self.push(field, format!("must be positive and finite (got {v})"));
            return false;
        }
        true
    }

    fn state(&mut self, field: &str, spec: &StateSpec) -> Option<PureState> {
        match spec.to_state() {
            Ok(s) => Some(s),
            Err(e) => {
                self.push(field, format!("state is not normalizable: {e}"));
                None
            }
        }
    }
}

/// Checks a configuration for the given kind (falling back to `config.kind`).
/// An empty result means `run` will not raise a configuration error.
pub fn validate(config: &ExperimentConfig, kind: Option<ExperimentKind>) -> Vec<Violation> {
    let mut ck = Checker {
        violations: Vec::new(),
    };
    let kind = match (kind, config.kind) {
        (Some(k), Some(c)) if k != c => {
            ck.push("kind", format!("config declares '{c}' but '{k}' was requested"));
            return ck.violations;
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => {
            ck.push("kind", "missing experiment kind");
            return ck.violations;
        }
    };
    let config = ExperimentConfig {
        kind: Some(kind),
        ..config.clone()
    }
    .with_defaults();

    match kind {
        ExperimentKind::Eraser => match &config.eraser {
            None => ck.push("eraser", "missing [eraser] section"),
            Some(e) => check_eraser(&mut ck, e),
        },
        ExperimentKind::Weak => match &config.weak {
            None => ck.push("weak", "missing [weak] section"),
            Some(w) => check_weak(&mut ck, w),
        },
        ExperimentKind::Theta2Sweep => {
            check_sweep(&mut ck, config.theta2_sweep.as_ref().expect("defaulted"))
        }
        ExperimentKind::Eq14Check => {
            let e = config.eq14_check.as_ref().expect("defaulted");
            if e.triples == 0 {
                ck.push("eq14_check.triples", "must be at least 1");
            }
        }
    }
    ck.violations
}

fn check_eraser(ck: &mut Checker, e: &EraserConfig) {
    if e.n_grid < 16 {
        ck.push("eraser.n_grid", format!("must be at least 16 (got {})", e.n_grid));
    }
    if e.scenarios.is_empty() && e.random == 0 {
        ck.push("eraser.scenarios", "no scenarios given and random = 0");
    }
    for (i, case) in e.scenarios.iter().enumerate() {
        let base = format!("eraser.scenarios[{i}]");
        if case.path().is_err() {
            ck.push(format!("{base}.c1"), "path amplitudes must be finite and not both zero");
        }
        ck.state(&format!("{base}.psi_i"), &case.psi_i);
        ck.state(&format!("{base}.psi_m1"), &case.psi_m1);
        ck.state(&format!("{base}.psi_m2"), &case.psi_m2);
        if let Some(f) = &case.psi_f {
            ck.state(&format!("{base}.psi_f"), f);
        }
    }
}

fn check_weak(ck: &mut Checker, w: &WeakConfig) {
    if !w.grid_points.is_power_of_two() || w.grid_points < 256 {
        ck.push(
            "weak.grid_points",
            format!("must be a power of two >= 256 (got {})", w.grid_points),
        );
    }
    ck.positive("weak.hbar", w.hbar);
    if !(w.half_width.is_finite() && w.half_width >= 6.0) {
        ck.push("weak.half_width", format!("must be at least 6 (got {})", w.half_width));
    }
    ck.finite("weak.p_center", w.p_center);

    if w.has_explicit_scenario() {
        if w.couplings.is_empty() {
            ck.push("weak.couplings", "must list at least one coupling G");
        }
        if w.delta_ps.is_empty() {
            ck.push("weak.delta_ps", "must list at least one probe width");
        }
        for (i, g) in w.couplings.iter().enumerate() {
            ck.finite(&format!("weak.couplings[{i}]"), *g);
        }
        for (i, dp) in w.delta_ps.iter().enumerate() {
            ck.positive(&format!("weak.delta_ps[{i}]"), *dp);
        }
        check_weak_states(ck, w);
    } else if w.random == 0 {
        ck.push("weak", "no scenario given (set theta, or psi_i/psi_f/observable) and random = 0");
    }
    if w.random > 0 && !(w.max_ratio > 0.0 && w.max_ratio.is_finite()) {
        ck.push("weak.max_ratio", format!("must be positive (got {})", w.max_ratio));
    }
}

fn check_weak_states(ck: &mut Checker, w: &WeakConfig) {
    let (psi_i, psi_f) = if let Some(theta) = w.theta {
        if w.psi_i.is_some() || w.psi_f.is_some() || w.observable.is_some() {
            ck.push("weak.theta", "theta shortcut cannot be combined with psi_i/psi_f/observable");
            return;
        }
        if !ck.finite("weak.theta", theta) {
            return;
        }
        (Some(PureState::plus()), worked_example_post_selection(theta).ok())
    } else {
        let psi_i = match &w.psi_i {
            Some(s) => ck.state("weak.psi_i", s),
            None => {
                ck.push("weak.psi_i", "missing pre-selected state");
                None
            }
        };
        let psi_f = match &w.psi_f {
            Some(s) => ck.state("weak.psi_f", s),
            None => {
                ck.push("weak.psi_f", "missing post-selected state");
                None
            }
        };
        match &w.observable {
            Some(o) => {
                if let Err(msg) = o.to_observable() {
                    ck.push("weak.observable", msg);
                }
            }
            None => ck.push("weak.observable", "missing observable"),
        }
        (psi_i, psi_f)
    };
    if let (Some(i), Some(f)) = (psi_i, psi_f) {
        let overlap = inner_product(&f, &i).norm();
        if overlap < SELECTION_TOL {
            let field = if w.theta.is_some() { "weak.theta" } else { "weak.psi_f" };
            ck.push(
                field,
                format!(
                    "post-selection is orthogonal to pre-selection (|<psi_f|psi_i>| = {overlap:.3e}); the weak value diverges"
                ),
            );
        }
    }
}

fn check_sweep(ck: &mut Checker, s: &SweepConfig) {
    if s.thetas.is_empty() {
        ck.push("theta2_sweep.thetas", "must list at least one angle");
    }
    for (i, t) in s.thetas.iter().enumerate() {
        let field = format!("theta2_sweep.thetas[{i}]");
        if ck.finite(&field, *t) && worked_example_post_selection(*t)
            .map(|f| f.amp_plus().norm() < SELECTION_TOL)
            .unwrap_or(true)
        {
            ck.push(field, "post-selection orthogonal to |+> (sin(theta) = 0)");
        }
    }
    ck.finite("theta2_sweep.g", s.g);
    ck.positive("theta2_sweep.hbar", s.hbar);
    match &s.p_values {
        Some(values) => {
            if values.is_empty() {
                ck.push("theta2_sweep.p_values", "must not be empty");
            }
            for (i, p) in values.iter().enumerate() {
                ck.finite(&format!("theta2_sweep.p_values[{i}]"), *p);
            }
        }
        None => {
            if s.samples == 0 {
                ck.push("theta2_sweep.samples", "must be at least 1");
            }
            let ok = ck.finite("theta2_sweep.p_min", s.p_min) & ck.finite("theta2_sweep.p_max", s.p_max);
            if ok && s.p_min >= s.p_max && s.samples > 1 {
                ck.push("theta2_sweep.p_max", "sweep range is empty (p_max <= p_min)");
            }
        }
    }
}
