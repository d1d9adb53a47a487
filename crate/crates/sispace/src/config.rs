//! Job configuration: a JSON document with the keys `grid`, `generators`,
//! `signal`, `tolerances` and `command`.
//!
//! ```json
//! {
//!   "grid": {"M": 256, "K": 8},
//!   "generators": [
//!     {"name": "a", "kind": "bandlimited_random", "seed": 7, "radius": 6.0},
//!     {"name": "b", "kind": "bspline", "order": 1}
//!   ],
//!   "signal": {"synthesize": [[{"k": 0, "re": 1.0}], [{"k": -1, "re": 0.5, "im": 2.0}]]},
//!   "tolerances": {"zero_tol": 1e-12},
//!   "command": "check"
//! }
//! ```
//!
//! Relative paths (sampled generators and signals) are resolved against the
//! directory holding the configuration file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sispace_core::{
    build_generator, make_grid, synthesize, Complex64, FiberedFunction, GeneratorKind, GeneratorSpec, GridSpec,
    TrigPoly, DEFAULT_REL_TOL, DEFAULT_ZERO_TOL,
};

use crate::error::CliError;
use crate::formats::load_spectrum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Orthogonalize,
    Project,
    Coeffs,
    Check,
    Demo,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "M")]
    pub fibers: usize,
    #[serde(rename = "K")]
    pub radius: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorConfig {
    Bspline { name: String, order: u32 },
    Gaussian { name: String, sigma: f64 },
    BandlimitedRandom { name: String, seed: u64, radius: f64 },
    Indicator { name: String },
    /// Spectrum CSV.
    Sampled { name: String, path: PathBuf },
}

impl GeneratorConfig {
    pub fn name(&self) -> &str {
        match self {
            GeneratorConfig::Bspline { name, .. }
            | GeneratorConfig::Gaussian { name, .. }
            | GeneratorConfig::BandlimitedRandom { name, .. }
            | GeneratorConfig::Indicator { name }
            | GeneratorConfig::Sampled { name, .. } => name,
        }
    }

    /// The analytic description, `None` for sampled generators.
    pub fn spec(&self) -> Option<GeneratorSpec> {
        let kind = match *self {
            GeneratorConfig::Bspline { order, .. } => GeneratorKind::BSpline { order },
            GeneratorConfig::Gaussian { sigma, .. } => GeneratorKind::Gaussian { sigma },
            GeneratorConfig::BandlimitedRandom { seed, radius, .. } => GeneratorKind::BandlimitedRandom { seed, radius },
            GeneratorConfig::Indicator { .. } => GeneratorKind::Indicator,
            GeneratorConfig::Sampled { .. } => return None,
        };
        Some(GeneratorSpec::new(self.name(), kind))
    }
}

/// Coefficient `γ_k` of the shift `φ(· + k)`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftCoeff {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    /// One list of shift coefficients per generator.
    Synthesize(Vec<Vec<ShiftCoeff>>),
    /// Spectrum CSV.
    Sampled(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub zero_tol: f64,
    pub rel_tol: f64,
    /// Relative reconstruction residual allowed for in-space signals.
    pub residual_bound: f64,
    /// The remaining entries are multiples of the Gram scale unless noted.
    pub orthogonality: f64,
    pub reconstruction: f64,
    pub isometry: f64,
    pub cauchy_schwarz: f64,
    /// Relative to `‖f‖`.
    pub idempotence: f64,
    pub self_adjoint: f64,
    /// Relative to the oracle projection.
    pub oracle: f64,
    /// Tail bound relative to the peak generator weight.
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_tol: DEFAULT_ZERO_TOL,
            rel_tol: DEFAULT_REL_TOL,
            residual_bound: 1e-8,
            orthogonality: 1e-10,
            reconstruction: 1e-12,
            isometry: 1e-12,
            cauchy_schwarz: 1e-12,
            idempotence: 1e-9,
            self_adjoint: 1e-10,
            oracle: 1e-8,
            tail: 1e-10,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 11] {
        [
            ("zero_tol", self.zero_tol),
            ("rel_tol", self.rel_tol),
            ("residual_bound", self.residual_bound),
            ("orthogonality", self.orthogonality),
            ("reconstruction", self.reconstruction),
            ("isometry", self.isometry),
            ("cauchy_schwarz", self.cauchy_schwarz),
            ("idempotence", self.idempotence),
            ("self_adjoint", self.self_adjoint),
            ("oracle", self.oracle),
            ("tail", self.tail),
        ]
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub grid: GridConfig,
    pub generators: Vec<GeneratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
}

/// The signal under analysis.
#[derive(Clone, Debug)]
pub struct Signal {
    pub f: FiberedFunction,
    /// Synthesis polynomials when `f` was built in `S(G)`.
    pub polys: Option<Vec<TrigPoly>>,
}

impl Signal {
    pub fn in_space(&self) -> bool {
        self.polys.is_some()
    }
}

/// A validated configuration with generators and signal materialized.
#[derive(Clone, Debug)]
pub struct Job {
    pub grid: GridSpec,
    pub generators: Vec<GeneratorConfig>,
    pub spectra: Vec<FiberedFunction>,
    pub signal: Option<Signal>,
    pub tolerances: Tolerances,
    pub command: Option<Command>,
}

impl Job {
    pub fn names(&self) -> Vec<&str> {
        self.generators.iter().map(GeneratorConfig::name).collect()
    }
}

/// 1-based line of the first occurrence of `needle` at or after line `from`.
fn line_of(text: &str, needle: &str, from: usize) -> usize {
    text.lines()
        .enumerate()
        .skip(from.saturating_sub(1))
        .find(|(_, l)| l.contains(needle))
        .map_or(from.max(1), |(n, _)| n + 1)
}

fn strip_position(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    match msg.rfind(" at line ") {
        Some(idx) => msg[..idx].to_string(),
        None => msg,
    }
}

impl JobConfig {
    /// Parses JSON; errors carry `origin:line:column`.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::input(format!("{origin}:{}:{}: {}", e.line(), e.column(), strip_position(&e))))
    }

    /// Validates and materializes the job. `text` is the source document,
    /// used to anchor semantic errors to a line.
    pub fn resolve(&self, text: &str, origin: &str, base: &Path) -> Result<Job, CliError> {
        let at = |needle: &str, from: usize| line_of(text, needle, from);
        let fail = |line: usize, msg: String| CliError::input(format!("{origin}:{line}: {msg}"));

        let grid_line = at("\"grid\"", 1);
        let grid = make_grid(self.grid.fibers, self.grid.radius).map_err(|e| fail(grid_line, e.to_string()))?;

        for (name, value) in self.tolerances.entries() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(fail(at(&format!("\"{name}\""), 1), format!("tolerance {name} must be finite and nonnegative, got {value}")));
            }
        }

        let gen_line = at("\"generators\"", 1);
        if self.generators.is_empty() {
            return Err(fail(gen_line, "at least one generator is required".into()));
        }
        let mut spectra = Vec::with_capacity(self.generators.len());
        for (j, g) in self.generators.iter().enumerate() {
            let line = at(&format!("\"{}\"", g.name()), gen_line);
            if g.name().is_empty() {
                return Err(fail(line, format!("generator {} has an empty name", j + 1)));
            }
            if self.generators[..j].iter().any(|h| h.name() == g.name()) {
                return Err(fail(line, format!("duplicate generator name '{}'", g.name())));
            }
            let phi = match (g, g.spec()) {
                (_, Some(spec)) => build_generator(&spec, &grid).map_err(CliError::from),
                (GeneratorConfig::Sampled { path, .. }, None) => load_spectrum(&base.join(path), &grid),
                _ => unreachable!("only sampled generators lack a spec"),
            }
            .map_err(|e| fail(line, format!("generator '{}': {e}", g.name())))?;
            spectra.push(phi);
        }

        let signal = match &self.signal {
            None => None,
            Some(cfg) => {
                let line = at("\"signal\"", 1);
                Some(match cfg {
                    SignalConfig::Synthesize(lists) => {
                        if lists.len() != spectra.len() {
                            return Err(fail(
                                line,
                                format!("{} coefficient lists for {} generators", lists.len(), spectra.len()),
                            ));
                        }
                        let polys = lists
                            .iter()
                            .map(|l| TrigPoly::from_coeffs(l.iter().map(|c| (c.k, Complex64::new(c.re, c.im)))))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|e| fail(line, e.to_string()))?;
                        let f = synthesize(&polys, &spectra).map_err(|e| fail(line, e.to_string()))?;
                        Signal { f, polys: Some(polys) }
                    }
                    SignalConfig::Sampled(path) => Signal {
                        f: load_spectrum(&base.join(path), &grid).map_err(|e| fail(line, e.to_string()))?,
                        polys: None,
                    },
                })
            }
        };

        Ok(Job {
            grid,
            generators: self.generators.clone(),
            spectra,
            signal,
            tolerances: self.tolerances.clone(),
            command: self.command,
        })
    }
}

/// Reads, parses and resolves a configuration file.
pub fn load_job(path: &Path) -> Result<Job, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let origin = path.display().to_string();
    let base = path.parent().unwrap_or(Path::new("."));
    JobConfig::parse(&text, &origin)?.resolve(&text, &origin, base)
}

/// Configuration used by `demo`: three band-limited generators with a
/// synthesized signal.
pub fn demo_config() -> JobConfig {
    let gen = |name: &str, seed, radius| GeneratorConfig::BandlimitedRandom { name: name.into(), seed, radius };
    let c = |k, re, im| ShiftCoeff { k, re, im };
    JobConfig {
        grid: GridConfig { fibers: 256, radius: 8 },
        generators: vec![gen("g1", 7, 6.0), gen("g2", 8, 7.5), gen("g3", 9, 8.5)],
        signal: Some(SignalConfig::Synthesize(vec![
            vec![c(0, 1.0, 0.0), c(1, -0.5, 0.25)],
            vec![c(-2, 0.3, -0.7)],
            vec![c(0, 0.2, 0.1), c(2, 0.4, 0.0)],
        ])),
        tolerances: Tolerances::default(),
        command: Some(Command::Check),
    }
}
