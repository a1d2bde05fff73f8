//! Run configuration: TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use instanton_core::torus::validate_degree;

use crate::error::{CliError, CliResult};

pub const SUITE_NAMES: [&str; 7] = ["calabi", "semiflat", "rotation", "slag", "monodromy", "lattice", "torelli"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Modulus `tau` as `[re, im]`.
    pub tau: [f64; 2],
    pub b: i64,
    /// Exponent `p` of the Kähler potential `(2/3) t^p` on the Calabi end.
    pub exponent: f64,
    /// Free-form provenance stamp copied into the report; when absent,
    /// `SOURCE_DATE_EPOCH` is used if set.
    pub timestamp: Option<String>,
    /// Output path; not echoed into the report.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    pub suites: SuiteSelection,
    pub calabi: CalabiConfig,
    pub decay: DecayConfig,
    pub semiflat: SemiflatConfig,
    pub rotation: RotationConfig,
    pub slag: SlagConfig,
    pub monodromy: MonodromyConfig,
    pub lattice: LatticeConfig,
    pub torelli: TorelliConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tau: [0.0, 1.0],
            b: 1,
            exponent: 1.5,
            timestamp: None,
            output: None,
            suites: SuiteSelection::default(),
            calabi: CalabiConfig::default(),
            decay: DecayConfig::default(),
            semiflat: SemiflatConfig::default(),
            rotation: RotationConfig::default(),
            slag: SlagConfig::default(),
            monodromy: MonodromyConfig::default(),
            lattice: LatticeConfig::default(),
            torelli: TorelliConfig::default(),
        }
    }
}

/// Suites run by `all`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSelection {
    pub calabi: bool,
    pub semiflat: bool,
    pub rotation: bool,
    pub slag: bool,
    pub monodromy: bool,
    pub lattice: bool,
    pub torelli: bool,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        Self { calabi: true, semiflat: true, rotation: true, slag: true, monodromy: true, lattice: true, torelli: true }
    }
}

impl SuiteSelection {
    pub fn enabled(&self) -> Vec<&'static str> {
        let flags = [self.calabi, self.semiflat, self.rotation, self.slag, self.monodromy, self.lattice, self.torelli];
        SUITE_NAMES.iter().zip(flags).filter(|(_, on)| *on).map(|(n, _)| *n).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalabiConfig {
    pub samples: usize,
    /// Range of `t = -log |w|^2_h` for sample points.
    pub depth: [f64; 2],
    pub triple_tolerance: f64,
    pub curvature_points: usize,
    pub ricci_tolerance: f64,
    pub fd_step: f64,
    pub fd_tolerance: f64,
}

impl Default for CalabiConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            depth: [0.5, 40.0],
            triple_tolerance: 1e-8,
            curvature_points: 16,
            ricci_tolerance: 1e-8,
            fd_step: 1e-2,
            fd_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    /// Base point `z` of the ray, `[re, im]`.
    pub base: [f64; 2],
    pub phase: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub samples: usize,
    pub curvature_slope: [f64; 2],
    pub circle_slope: [f64; 2],
    pub min_decades: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            base: [0.3, 0.2],
            phase: 0.0,
            depth_min: 60.0,
            depth_max: 2000.0,
            samples: 12,
            curvature_slope: [-2.1, -1.9],
            circle_slope: [-0.38, -0.28],
            min_decades: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiflatConfig {
    pub eps: f64,
    /// Connection shift of the non-standard family; the standard family has 0.
    pub b0: f64,
    pub samples: usize,
    /// Range of `|u|` for sample points.
    pub radius: [f64; 2],
    /// Radii of the cycles used for period checks.
    pub period_radii: Vec<f64>,
    pub period_grid: usize,
    pub triple_tolerance: f64,
    pub curvature_points: usize,
    pub ricci_tolerance: f64,
    /// Finite-difference step relative to `|u|`.
    pub fd_relative_step: f64,
    pub fd_tolerance: f64,
    pub area_tolerance: f64,
    pub flatness_tolerance: f64,
    pub calibration_tolerance: f64,
}

impl Default for SemiflatConfig {
    fn default() -> Self {
        Self {
            eps: 1.0,
            b0: -0.4,
            samples: 1000,
            radius: [0.01, 0.5],
            period_radii: vec![0.3, 0.6],
            period_grid: 64,
            triple_tolerance: 1e-8,
            curvature_points: 8,
            ricci_tolerance: 1e-8,
            fd_relative_step: 1e-2,
            fd_tolerance: 1e-6,
            area_tolerance: 1e-8,
            flatness_tolerance: 1e-12,
            calibration_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusCase {
    pub tau: [f64; 2],
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationConfig {
    pub cases: Vec<ModulusCase>,
    pub level: f64,
    pub nodes: usize,
    pub period_tolerance: f64,
    pub round_trip_tolerance: f64,
    pub involution_tolerance: f64,
}

impl Default for RotationConfig {
    fn default() -> Self {
        let case = |re, im, b| ModulusCase { tau: [re, im], b };
        Self {
            cases: vec![case(0.0, 1.0, 1), case(0.0, 2.0, 2), case(1.0, 1.0, 2)],
            level: 0.04,
            nodes: 32,
            period_tolerance: 1e-4,
            round_trip_tolerance: 1e-12,
            involution_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlagConfig {
    /// Homology classes `(p, q)` of the base lines.
    pub classes: Vec<[i64; 2]>,
    pub levels: Vec<f64>,
    pub offset: [f64; 2],
    pub grid: usize,
    pub tolerance: f64,
    /// Size of the tilt applied to build the negative control.
    pub control_tilt: f64,
    pub control_threshold: f64,
    /// Radius of the cycles in the fibration criterion.
    pub criterion_radius: f64,
    pub criterion_tolerance: f64,
    /// `m` for which `b0` is tuned so that `m [C] + [F]` is fibred.
    pub tuned_m: i64,
}

impl Default for SlagConfig {
    fn default() -> Self {
        Self {
            classes: vec![[1, 0], [0, 1], [1, 1], [2, -1]],
            levels: vec![0.04, 0.01, 0.0025],
            offset: [0.1, 0.05],
            grid: 32,
            tolerance: 1e-10,
            control_tilt: 0.2,
            control_threshold: 1e-3,
            criterion_radius: 0.3,
            criterion_tolerance: 1e-9,
            tuned_m: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonodromyConfig {
    pub degrees: Vec<i64>,
    /// Degrees that must be refused.
    pub rejected: Vec<i64>,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        Self { degrees: (1..=9).collect(), rejected: vec![0, 10] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub random_cases: usize,
    pub chamber_points: usize,
    pub word_bound: usize,
    /// Marked-lattice fixture files, relative to the config file.
    pub fixtures: Vec<PathBuf>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { random_cases: 10_000, chamber_points: 400, word_bound: 8, fixtures: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorelliConfig {
    pub round_trips: usize,
    pub max_word: usize,
    pub word_bound: usize,
    pub fixtures: Vec<PathBuf>,
}

impl Default for TorelliConfig {
    fn default() -> Self {
        Self { round_trips: 100, max_word: 6, word_bound: 8, fixtures: Vec::new() }
    }
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

fn at_least(name: &str, n: usize, min: usize) -> CliResult<()> {
    if n >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be at least {min}, got {n}")))
    }
}

fn interval(name: &str, r: [f64; 2]) -> CliResult<()> {
    if r[0] < r[1] && r[0].is_finite() && r[1].is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be an increasing pair, got {r:?}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.lattice.fixtures.iter_mut().chain(cfg.torelli.fixtures.iter_mut()) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Rejects configurations no suite could run with. Called before any
    /// suite starts.
    pub fn validate(&self) -> CliResult<()> {
        validate_degree(self.b).map_err(|e| CliError::Config(e.to_string()))?;
        positive("tau imaginary part", self.tau[1])?;
        if !self.tau[0].is_finite() {
            return Err(CliError::Config("tau real part must be finite".into()));
        }
        positive("exponent", self.exponent)?;

        let c = &self.calabi;
        at_least("calabi.samples", c.samples, 2)?;
        interval("calabi.depth", c.depth)?;
        positive("calabi.depth lower end", c.depth[0])?;
        at_least("calabi.curvature_points", c.curvature_points, 1)?;
        for (n, x) in [
            ("calabi.triple_tolerance", c.triple_tolerance),
            ("calabi.ricci_tolerance", c.ricci_tolerance),
            ("calabi.fd_step", c.fd_step),
            ("calabi.fd_tolerance", c.fd_tolerance),
        ] {
            positive(n, x)?;
        }

        let d = &self.decay;
        positive("decay.depth_min", d.depth_min)?;
        interval("decay depth window", [d.depth_min, d.depth_max])?;
        at_least("decay.samples", d.samples, instanton_core::hk::decay::MIN_DECAY_SAMPLES)?;
        interval("decay.curvature_slope", d.curvature_slope)?;
        interval("decay.circle_slope", d.circle_slope)?;
        positive("decay.min_decades", d.min_decades)?;

        let s = &self.semiflat;
        positive("semiflat.eps", s.eps)?;
        at_least("semiflat.samples", s.samples, 2)?;
        interval("semiflat.radius", s.radius)?;
        if !(s.radius[0] > 0.0 && s.radius[1] < 1.0) {
            return Err(CliError::Config(format!("semiflat.radius must lie in (0, 1), got {:?}", s.radius)));
        }
        if s.period_radii.len() < 2 || s.period_radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(CliError::Config("semiflat.period_radii needs at least two radii in (0, 1)".into()));
        }
        at_least("semiflat.period_grid", s.period_grid, 4)?;
        at_least("semiflat.curvature_points", s.curvature_points, 1)?;
        for (n, x) in [
            ("semiflat.triple_tolerance", s.triple_tolerance),
            ("semiflat.ricci_tolerance", s.ricci_tolerance),
            ("semiflat.fd_relative_step", s.fd_relative_step),
            ("semiflat.fd_tolerance", s.fd_tolerance),
            ("semiflat.area_tolerance", s.area_tolerance),
            ("semiflat.flatness_tolerance", s.flatness_tolerance),
            ("semiflat.calibration_tolerance", s.calibration_tolerance),
        ] {
            positive(n, x)?;
        }

        let r = &self.rotation;
        for case in &r.cases {
            validate_degree(case.b).map_err(|e| CliError::Config(format!("rotation case: {e}")))?;
            positive("rotation case tau imaginary part", case.tau[1])?;
        }
        positive("rotation.level", r.level)?;
        at_least("rotation.nodes", r.nodes, 4)?;
        positive("rotation.period_tolerance", r.period_tolerance)?;
        positive("rotation.round_trip_tolerance", r.round_trip_tolerance)?;
        positive("rotation.involution_tolerance", r.involution_tolerance)?;

        let l = &self.slag;
        if l.classes.is_empty() || l.levels.is_empty() {
            return Err(CliError::Config("slag.classes and slag.levels must be non-empty".into()));
        }
        for &lv in &l.levels {
            positive("slag level", lv)?;
        }
        at_least("slag.grid", l.grid, 4)?;
        for (n, x) in [
            ("slag.tolerance", l.tolerance),
            ("slag.control_tilt", l.control_tilt),
            ("slag.control_threshold", l.control_threshold),
            ("slag.criterion_radius", l.criterion_radius),
            ("slag.criterion_tolerance", l.criterion_tolerance),
        ] {
            positive(n, x)?;
        }
        if l.tuned_m == 0 {
            return Err(CliError::Config("slag.tuned_m must be non-zero".into()));
        }

        at_least("lattice.word_bound", self.lattice.word_bound, 1)?;
        at_least("lattice.chamber_points", self.lattice.chamber_points, 6)?;
        at_least("torelli.word_bound", self.torelli.word_bound, 1)?;
        if self.torelli.max_word > self.torelli.word_bound {
            return Err(CliError::Config("torelli.max_word exceeds torelli.word_bound".into()));
        }
        Ok(())
    }

    /// Seed for one suite, independent of the order suites run in.
    pub fn suite_seed(&self, suite: &str) -> u64 {
        let salt = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, c| (h ^ u64::from(c)).wrapping_mul(0x1_0000_0001_b3));
        self.seed ^ salt
    }

    pub fn resolved_timestamp(&self) -> Option<String> {
        self.timestamp.clone().or_else(|| std::env::var("SOURCE_DATE_EPOCH").ok().map(|s| format!("unix:{s}")))
    }
}
