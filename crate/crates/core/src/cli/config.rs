//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TopError};
use crate::geometry::PhysicalConstants;
use crate::lorentz::SignConvention;
use crate::spin::{a_from_mass, FieldConfig};

/// Verification suites in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lorentz,
    Curvature,
    WeylGauge,
    Madelung,
    Reduction,
    Dirac,
    Current,
    TrajectoryConvergence,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lorentz,
        Suite::Curvature,
        Suite::WeylGauge,
        Suite::Madelung,
        Suite::Reduction,
        Suite::Dirac,
        Suite::Current,
        Suite::TrajectoryConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lorentz => "lorentz",
            Suite::Curvature => "curvature",
            Suite::WeylGauge => "weyl-gauge",
            Suite::Madelung => "madelung",
            Suite::Reduction => "reduction",
            Suite::Dirac => "dirac",
            Suite::Current => "current",
            Suite::TrajectoryConvergence => "trajectory-convergence",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// ħ = c = 1; every input is already dimensionless.
    #[default]
    Natural,
    /// m in kg, e in C, a in m; converted with m as the mass unit and ħ/(mc) as the length unit.
    Si,
}

const HBAR_SI: f64 = 1.054_571_817e-34;
const C_SI: f64 = 299_792_458.0;
const EPS0_SI: f64 = 8.854_187_812_8e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default)]
    pub units: Units,
    pub m: f64,
    pub e: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derive_from_mass: Option<bool>,
    /// Curvature coupling used only by the negative Madelung check.
    #[serde(default = "default_gamma2_override")]
    pub gamma2_override: f64,
}

fn default_gamma2_override() -> f64 {
    0.25
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            units: Units::Natural,
            m: 1.0,
            e: 0.3,
            a: None,
            derive_from_mass: Some(true),
            gamma2_override: default_gamma2_override(),
        }
    }
}

impl ConstantsConfig {
    /// Natural-unit constants; fails unless exactly one of `a` and `derive_from_mass = true` is given.
    pub fn resolve(&self) -> Result<PhysicalConstants> {
        let (m, e, a) = match self.units {
            Units::Natural => (self.m, self.e, self.a),
            Units::Si => {
                let compton = HBAR_SI / (self.m * C_SI);
                let e = self.e / (4.0 * std::f64::consts::PI * EPS0_SI * HBAR_SI * C_SI).sqrt();
                (1.0, e, self.a.map(|a| a / compton))
            }
        };
        if !(m > 0.0 && m.is_finite()) {
            return Err(TopError::Config(format!("mass must be positive, got {}", self.m)));
        }
        if !e.is_finite() {
            return Err(TopError::Config("charge must be finite".into()));
        }
        let mut k = PhysicalConstants::natural(m, e, 1.0);
        match (a, self.derive_from_mass.unwrap_or(false)) {
            (Some(_), true) => return Err(TopError::Config("give either `a` or `derive_from_mass = true`, not both".into())),
            (None, false) => return Err(TopError::Config("one of `a` or `derive_from_mass = true` is required".into())),
            (Some(a), false) => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(TopError::Config(format!("a must be positive, got {a}")));
                }
                k.a = a;
            }
            (None, true) => k.a = a_from_mass(m, &k)?,
        }
        Ok(k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub algebra: f64,
    pub representation: f64,
    pub curvature: f64,
    pub weyl_forms: f64,
    pub madelung: f64,
    pub madelung_negative_min: f64,
    pub reduction: f64,
    pub calibration: f64,
    pub dirac: f64,
    pub dirac_off_shell_min: f64,
    pub assembly: f64,
    pub current: f64,
    pub current_reality: f64,
    pub slope: f64,
    pub convergence_order_min: f64,
    pub fourleg_drift: f64,
    pub zitterbewegung_ratio_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            representation: 1e-10,
            curvature: 1e-8,
            weyl_forms: 1e-10,
            madelung: 1e-8,
            madelung_negative_min: 1e-3,
            reduction: 1e-6,
            calibration: 1e-8,
            dirac: 1e-10,
            dirac_off_shell_min: 1e-3,
            assembly: 1e-8,
            current: 1e-6,
            current_reality: 1e-14,
            slope: 1e-8,
            convergence_order_min: 3.7,
            fourleg_drift: 1e-9,
            zitterbewegung_ratio_min: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub lorentz_angles: usize,
    pub curvature_points: usize,
    pub weyl_points: usize,
    pub madelung_pairs: usize,
    pub reduction_points: usize,
    pub dirac_waves: usize,
    pub current_points: usize,
    pub calibration_points: usize,
    pub trajectory_steps: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            lorentz_angles: 100,
            curvature_points: 20,
            weyl_points: 20,
            madelung_pairs: 20,
            reduction_points: 10,
            dirac_waves: 10,
            current_points: 10,
            calibration_points: 4,
            trajectory_steps: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: PathBuf,
    pub calibration: PathBuf,
    pub trace_dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            report: "report.json".into(),
            calibration: "calibration.json".into(),
            trace_dir: "trace".into(),
        }
    }
}

/// One (0,0) plane wave A e^{iφ} e^{ip·x/ħ} with p on the mass shell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub momentum: [f64; 3],
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    pub x: [f64; 4],
    pub theta: [f64; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub waves: Vec<WaveSpec>,
    pub starts: Vec<StartSpec>,
    pub sigma_span: f64,
    pub steps: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            waves: vec![
                WaveSpec { momentum: [0.4, 0.0, 0.0], amplitude: 1.0, phase: 0.0 },
                WaveSpec { momentum: [-0.3, 0.2, 0.0], amplitude: 0.3, phase: 0.0 },
            ],
            starts: vec![StartSpec { x: [0.0; 4], theta: [0.0, 0.0, 0.0, 0.3, 0.0, 0.0] }],
            sigma_span: 20.0,
            steps: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub sign: SignConvention,
    #[serde(default = "default_fields")]
    pub fields: FieldConfig,
    /// Empty selects every suite.
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default = "default_true")]
    pub madelung_negative: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub trace: TraceConfig,
}

fn default_true() -> bool {
    true
}

fn default_fields() -> FieldConfig {
    FieldConfig::Uniform { e: [0.1, 0.0, -0.2], h: [0.05, 0.3, 0.0] }
}

pub const DEFAULT_SEED: u64 = 20240611;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            constants: ConstantsConfig::default(),
            sign: SignConvention::default(),
            fields: default_fields(),
            suites: Vec::new(),
            madelung_negative: true,
            tolerances: Tolerances::default(),
            samples: Samples::default(),
            output: OutputConfig::default(),
            trace: TraceConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| TopError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TopError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.resolve()?;
        let t = &self.trace;
        if !(t.sigma_span > 0.0 && t.sigma_span.is_finite()) {
            return Err(TopError::Config("trace.sigma_span must be positive".into()));
        }
        if t.waves.iter().any(|w| !(w.amplitude.is_finite() && w.phase.is_finite() && w.momentum.iter().all(|p| p.is_finite()))) {
            return Err(TopError::Config("trace waves must be finite".into()));
        }
        Ok(())
    }

    pub fn physical_constants(&self) -> Result<PhysicalConstants> {
        self.constants.resolve()
    }

    pub fn selected_suites(&self) -> Vec<Suite> {
        if self.suites.is_empty() {
            Suite::ALL.to_vec()
        } else {
            let mut s = self.suites.clone();
            s.sort();
            s.dedup();
            s
        }
    }
}

/// Commented template whose values are the defaults.
pub const TEMPLATE: &str = r#"# dirac-top run configuration (TOML). Every value shown is the default.

# RNG seed; mandatory. Same seed and config give byte-identical outputs.
seed = 20240611

# Sign of the group metric: "rotations-positive" (g_ab = -a^2 tr, rotations spacelike-positive)
# or "literal" (g_ab = +a^2 tr).
sign = "rotations-positive"

# Suites to run; empty runs all of:
# lorentz, curvature, weyl-gauge, madelung, reduction, dirac, current, trajectory-convergence
suites = []

# Also assert that the Madelung identity breaks at gamma2_override.
madelung_negative = true

[constants]
# "natural" (hbar = c = 1) or "si" (m in kg, e in C, a in m; converted with m as mass unit).
units = "natural"
m = 1.0
e = 0.3
# Exactly one of `a` or `derive_from_mass = true`.
# derive_from_mass sets a = (hbar/mc) sqrt(3(1 + 4 gamma^2)/2) with gamma^2 = 2/9.
derive_from_mass = true
# a = 1.0
# Curvature coupling for the negative Madelung check only.
gamma2_override = 0.25

# Electromagnetic background: kind = "none", "uniform" (e, h) or "plane-wave" (amplitude A_mu, k^mu).
[fields]
kind = "uniform"
e = [0.1, 0.0, -0.2]
h = [0.05, 0.3, 0.0]

[tolerances]
algebra = 1e-12
representation = 1e-10
curvature = 1e-8
weyl_forms = 1e-10
madelung = 1e-8
madelung_negative_min = 1e-3
reduction = 1e-6
calibration = 1e-8
dirac = 1e-10
dirac_off_shell_min = 1e-3
assembly = 1e-8
current = 1e-6
current_reality = 1e-14
slope = 1e-8
convergence_order_min = 3.7
fourleg_drift = 1e-9
zitterbewegung_ratio_min = 10.0

[samples]
lorentz_angles = 100
curvature_points = 20
weyl_points = 20
madelung_pairs = 20
reduction_points = 10
dirac_waves = 10
current_points = 10
calibration_points = 4
trajectory_steps = 1000

[output]
report = "report.json"
calibration = "calibration.json"
trace_dir = "trace"

# Guiding wave for `trace`: a sum of (0,0) plane waves with on-shell momenta.
[trace]
sigma_span = 20.0
steps = 1000

[[trace.waves]]
momentum = [0.4, 0.0, 0.0]
amplitude = 1.0
phase = 0.0

[[trace.waves]]
momentum = [-0.3, 0.2, 0.0]
amplitude = 0.3
phase = 0.0

[[trace.starts]]
x = [0.0, 0.0, 0.0, 0.0]
theta = [0.0, 0.0, 0.0, 0.3, 0.0, 0.0]
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_parses_to_defaults() {
        assert_eq!(RunConfig::from_toml(TEMPLATE).unwrap(), RunConfig::default());
    }

    #[test]
    fn exactly_one_length_source() {
        let both = TEMPLATE.replace("# a = 1.0", "a = 1.0");
        assert!(matches!(RunConfig::from_toml(&both), Err(TopError::Config(_))));
        let none = TEMPLATE.replace("derive_from_mass = true", "");
        assert!(matches!(RunConfig::from_toml(&none), Err(TopError::Config(_))));
        let explicit = TEMPLATE.replace("derive_from_mass = true", "a = 1.5");
        assert_eq!(RunConfig::from_toml(&explicit).unwrap().physical_constants().unwrap().a, 1.5);
        let k = RunConfig::default().physical_constants().unwrap();
        assert!((k.a - (17.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn seed_is_mandatory_and_unknown_keys_fail() {
        let no_seed = TEMPLATE.replace("seed = 20240611", "");
        assert!(RunConfig::from_toml(&no_seed).is_err());
        assert!(RunConfig::from_toml("seed = 1\nbogus = 2").is_err());
        let minimal = RunConfig::from_toml("seed = 5").unwrap();
        assert_eq!(minimal.seed, 5);
        assert_eq!(minimal.selected_suites(), Suite::ALL.to_vec());
    }

    #[test]
    fn si_inputs_convert_to_natural_units() {
        let mut c = ConstantsConfig { units: Units::Si, m: 9.109_383_7e-31, e: 1.602_176_634e-19, ..Default::default() };
        let k = c.resolve().unwrap();
        assert_eq!(k.m, 1.0);
        // e²/(4πε₀ħc) is the fine-structure constant
        assert!((k.e * k.e - 1.0 / 137.035_999).abs() < 1e-8);
        c.derive_from_mass = None;
        c.a = Some(HBAR_SI / (c.m * C_SI) * 2.0);
        assert!((c.resolve().unwrap().a - 2.0).abs() < 1e-9);
    }
}
