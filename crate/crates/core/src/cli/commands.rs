//! Calibration report and trajectory export.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use crate::cx::{Cx, C64};
use crate::dynamics::{integrate_trajectory, zitterbewegung_report, PsiVelocity, Superposition, Trajectory, ZitterbewegungReport};
use crate::error::{Result, TopError};
use crate::geometry::{config_metric, curvature, scalar_curvature_closed_form, ConfigPoint, PhysicalConstants};
use crate::lorentz::{casimir_matrix, SpinorRep};
use crate::spin::reduction::{reduction_calibration, CalibrationReport, PlaneWaveSpinor, SpinorField};
use crate::spin::a_from_mass;
use crate::wave::NoPotential;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasimirRow {
    pub label: String,
    pub dim: usize,
    /// Mean diagonal of J² − K² built from the generators.
    pub computed: f64,
    /// 2[u(u+1) + v(v+1)].
    pub closed_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub scalar: f64,
    pub closed_form: f64,
    pub scalar_a2: f64,
    pub paper_scalar_a2: f64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationOutput {
    pub seed: u64,
    pub constants: PhysicalConstants,
    pub gamma2: f64,
    pub gamma2_conformal: f64,
    pub a_from_mass: f64,
    pub a_mc_over_hbar: f64,
    pub curvature: CurvatureSummary,
    pub casimir_table: Vec<CasimirRow>,
    pub reduction: CalibrationReport,
}

fn label(rep: SpinorRep) -> String {
    let h = |t: u32| if t.is_multiple_of(2) { format!("{}", t / 2) } else { format!("{t}/2") };
    format!("({},{})", h(rep.two_u), h(rep.two_v))
}

pub fn calibrate(cfg: &RunConfig) -> Result<CalibrationOutput> {
    cfg.validate()?;
    let k = cfg.physical_constants()?;
    let a_m = a_from_mass(k.m, &k)?;
    let q = ConfigPoint::new([0.0; 4], [0.3, -0.2, 0.1, 0.2, 0.1, -0.3]).to_array();
    let r = curvature(&config_metric(&k, cfg.sign), &q)?.scalar;
    let mut table = Vec::new();
    for u in 0..=3 {
        for v in 0..=3 {
            let rep = SpinorRep::new(u, v)?;
            let c = casimir_matrix(rep)?;
            let n = rep.dim();
            let computed = (0..n).map(|i| c[(i, i)].re).sum::<f64>() / n as f64;
            table.push(CasimirRow { label: label(rep), dim: n, computed, closed_form: rep.casimir() });
        }
    }
    let reduction = reduction_calibration(&k, cfg.sign, cfg.samples.calibration_points, cfg.seed)?;
    Ok(CalibrationOutput {
        seed: cfg.seed,
        constants: k,
        gamma2: k.gamma2,
        gamma2_conformal: PhysicalConstants::conformal_gamma2(k.n),
        a_from_mass: a_m,
        a_mc_over_hbar: a_m * k.m * k.c / k.hbar,
        curvature: CurvatureSummary {
            scalar: r,
            closed_form: scalar_curvature_closed_form(&k, cfg.sign),
            scalar_a2: r * k.a * k.a,
            paper_scalar_a2: 6.0,
            relative_deviation: (r * k.a * k.a - 6.0) / 6.0,
        },
        casimir_table: table,
        reduction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveSummary {
    pub p: [f64; 4],
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub index: usize,
    pub file: String,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// For a single wave: max |Δx/Δσ − p| / max|p|.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_defect: Option<f64>,
    pub fourleg_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zitterbewegung: Option<ZitterbewegungReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub seed: u64,
    pub steps: usize,
    pub sigma_span: f64,
    pub waves: Vec<WaveSummary>,
    pub trajectories: Vec<TrajectorySummary>,
}

/// Trajectories together with their summary, before anything is written.
pub struct TraceRun {
    pub summary: TraceSummary,
    pub trajectories: Vec<Trajectory>,
}

pub const CSV_HEADER: [&str; 16] = [
    "sigma", "tau", "x0", "x1", "x2", "x3", "theta1", "theta2", "theta3", "theta4", "theta5", "theta6", "y0", "y1",
    "y2", "y3",
];

fn guiding_wave(cfg: &RunConfig, k: &PhysicalConstants) -> Result<(Superposition<SpinorField<PlaneWaveSpinor>>, Vec<WaveSummary>)> {
    if cfg.trace.waves.is_empty() {
        return Err(TopError::Config("trace needs at least one wave".into()));
    }
    let rep = SpinorRep::new(0, 0)?;
    let mut fields = Vec::new();
    let mut summary = Vec::new();
    for w in &cfg.trace.waves {
        let pv = w.momentum;
        let p0 = ((k.m * k.c).powi(2) + pv.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let p = [p0, pv[0], pv[1], pv[2]];
        let amp: C64 = Cx::expi(w.phase).scale(w.amplitude);
        fields.push(SpinorField::new(rep, PlaneWaveSpinor { p, amplitude: vec![amp], hbar: k.hbar })?);
        summary.push(WaveSummary { p, amplitude: w.amplitude, phase: w.phase });
    }
    Ok((Superposition(fields), summary))
}

pub fn trace(cfg: &RunConfig) -> Result<TraceRun> {
    cfg.validate()?;
    if cfg.trace.starts.is_empty() {
        return Err(TopError::Config("trace needs at least one start point".into()));
    }
    let k = cfg.physical_constants()?;
    let (psi, waves) = guiding_wave(cfg, &k)?;
    let single_p = (waves.len() == 1).then(|| waves[0].p);
    let flow = PsiVelocity { constants: k, metric: config_metric(&k, cfg.sign), potential: NoPotential, psi };
    let steps = cfg.trace.steps;
    let mut summaries = Vec::new();
    let mut trajectories = Vec::new();
    for (index, s) in cfg.trace.starts.iter().enumerate() {
        let start = ConfigPoint::new(s.x, s.theta);
        let mut t = integrate_trajectory(&start, &flow, (0.0, cfg.trace.sigma_span), steps)?;
        t.seed = Some(cfg.seed);
        let warning = (steps == 0).then(|| "zero steps requested; trajectory is empty".to_string());
        let slope_defect = single_p.filter(|_| t.samples.len() > 1).map(|p| {
            let pmax = p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            t.samples
                .iter()
                .skip(1)
                .flat_map(|x| (0..4).map(move |mu| ((x.q.x[mu] - start.x[mu]) / x.sigma - p[mu]).abs() / pmax))
                .fold(0.0, f64::max)
        });
        let zitterbewegung = zitterbewegung_report(&t, &k).ok();
        summaries.push(TrajectorySummary {
            index,
            file: format!("trajectory_{index}.csv"),
            samples: t.samples.len(),
            truncated: t.truncated.clone(),
            warning,
            slope_defect,
            fourleg_drift: t.fourleg_drift(),
            final_tau: t.end().map(|e| e.tau),
            zitterbewegung,
        });
        trajectories.push(t);
    }
    Ok(TraceRun {
        summary: TraceSummary { seed: cfg.seed, steps, sigma_span: cfg.trace.sigma_span, waves, trajectories: summaries },
        trajectories,
    })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> TopError {
    TopError::Io(format!("{}: {e}", path.display()))
}

pub fn write_trajectory_csv(path: &Path, t: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| io_err(path, e))?;
    for s in &t.samples {
        let mut row = vec![s.sigma, s.tau];
        row.extend(s.q.x);
        row.extend(s.q.theta.0);
        row.extend(s.y);
        w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes one CSV per trajectory and `summary.json` into `dir`; returns the written paths.
pub fn write_trace(run: &TraceRun, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = Vec::new();
    for (s, t) in run.summary.trajectories.iter().zip(&run.trajectories) {
        let p = dir.join(&s.file);
        write_trajectory_csv(&p, t)?;
        out.push(p);
    }
    let p = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&run.summary).expect("summary serializes");
    std::fs::write(&p, json + "\n").map_err(|e| io_err(&p, e))?;
    out.push(p);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::WaveSpec;

    #[test]
    fn calibration_table_and_constants() {
        let c = calibrate(&RunConfig::default()).unwrap();
        let row = c.casimir_table.iter().find(|r| r.label == "(0,1/2)").unwrap();
        assert!((row.computed - 1.5).abs() < 1e-12);
        assert!(c.casimir_table.iter().all(|r| (r.computed - r.closed_form).abs() < 1e-10));
        assert_eq!(c.gamma2, 2.0 / 9.0);
        assert!((c.a_mc_over_hbar - (17.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!((c.curvature.scalar - c.curvature.closed_form).abs() < 1e-8);
    }

    #[test]
    fn single_wave_trace_is_straight() {
        let mut cfg = RunConfig::default();
        cfg.trace.waves = vec![WaveSpec { momentum: [0.2, 0.1, 0.0], amplitude: 1.0, phase: 0.3 }];
        cfg.trace.steps = 200;
        let run = trace(&cfg).unwrap();
        let s = &run.summary.trajectories[0];
        assert_eq!(s.samples, 201);
        assert!(s.slope_defect.unwrap() < 1e-8);
        cfg.trace.steps = 0;
        let empty = trace(&cfg).unwrap();
        assert_eq!(empty.summary.trajectories[0].samples, 0);
        assert!(empty.summary.trajectories[0].warning.is_some());
    }

    #[test]
    fn two_wave_trace_writes_csv() {
        let mut cfg = RunConfig::default();
        cfg.trace.steps = 300;
        let run = trace(&cfg).unwrap();
        assert!(run.summary.trajectories[0].zitterbewegung.as_ref().unwrap().oscillation_amplitude > 0.0);
        let dir = tempfile::tempdir().unwrap();
        let files = write_trace(&run, dir.path()).unwrap();
        let text = std::fs::read_to_string(&files[0]).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "sigma,tau,x0,x1,x2,x3,theta1,theta2,theta3,theta4,theta5,theta6,y0,y1,y2,y3");
        assert_eq!(text.lines().count(), 302);
    }
}
