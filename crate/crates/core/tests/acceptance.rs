//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always reach stdout; exits non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dirac_top::cli::{verify, RunConfig, Suite, SuiteReport, VerifyReport};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dirac-top")
}

fn suite(r: &VerifyReport, s: Suite) -> &SuiteReport {
    r.suites.iter().find(|x| x.suite == s).expect("suite ran")
}

fn describe(s: &SuiteReport) -> String {
    let failed: Vec<&str> = s.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        let worst = s
            .checks
            .iter()
            .filter(|c| c.tolerance < 1.0)
            .map(|c| c.max_residual / c.tolerance)
            .fold(0.0, f64::max);
        format!("{} checks, worst residual/tolerance {worst:.1e}", s.checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    }
}

fn config_file(dir: &Path, extra: &str) -> std::path::PathBuf {
    let text = format!(
        "seed = 424242\n{extra}\n[output]\nreport = \"{0}/report.json\"\ncalibration = \"{0}/calibration.json\"\ntrace_dir = \"{0}/trace\"\n",
        dir.display()
    );
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Duration) {
    let t0 = Instant::now();
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), t0.elapsed())
}

fn criterion_cli() -> Result<String, String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (ca, cb) = (config_file(a.path(), ""), config_file(b.path(), ""));

    let (code, full) = run(&["verify", "--config", ca.to_str().unwrap()]);
    if code != 0 {
        return Err(format!("default verify exited {code}"));
    }
    if full > Duration::from_secs(300) {
        return Err(format!("full verify took {full:?}"));
    }
    let (code, _) = run(&["verify", "--config", cb.to_str().unwrap()]);
    if code != 0 {
        return Err(format!("second verify exited {code}"));
    }
    let ra = std::fs::read(a.path().join("report.json")).map_err(|e| e.to_string())?;
    let rb = std::fs::read(b.path().join("report.json")).map_err(|e| e.to_string())?;
    if ra != rb {
        return Err("reports differ between identical runs".into());
    }
    for dir in [a.path(), b.path()] {
        let cfg = dir.join("config.toml");
        if run(&["trace", "--config", cfg.to_str().unwrap()]).0 != 0 {
            return Err("trace failed".into());
        }
    }
    for f in ["trajectory_0.csv", "summary.json"] {
        let x = std::fs::read(a.path().join("trace").join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join("trace").join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{f} differs between identical runs"));
        }
    }

    let bad = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = bad.path().join("config.toml");
    std::fs::write(&cfg, format!("seed = \n[output]\nreport = \"{}/report.json\"\n", bad.path().display())).unwrap();
    let (code, _) = run(&["verify", "--config", cfg.to_str().unwrap()]);
    if code != 2 || bad.path().join("report.json").exists() {
        return Err(format!("malformed config exited {code}"));
    }
    let strict = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = config_file(strict.path(), "suites = [\"lorentz\"]\n[tolerances]\nalgebra = 0.0");
    let (code, _) = run(&["verify", "--config", cfg.to_str().unwrap()]);
    if code != 1 || !strict.path().join("report.json").exists() {
        return Err(format!("failing suite exited {code}"));
    }
    let (code, _) = run(&["verify", "--suite", "no-such-suite"]);
    if code != 2 {
        return Err(format!("unknown suite exited {code}"));
    }
    Ok(format!("byte-identical reports and CSV, exit codes 0/1/2, full verify {:.1} s", full.as_secs_f64()))
}

fn main() -> ExitCode {
    let report = verify(&RunConfig::default(), false).expect("default configuration is valid");
    let mut all = true;
    let mut line = |n: usize, title: &str, ok: bool, detail: String| {
        all &= ok;
        println!("criterion {n} [{}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    };
    let rows = [
        (1, "lorentz", Suite::Lorentz),
        (2, "curvature", Suite::Curvature),
        (3, "weyl", Suite::WeylGauge),
        (4, "madelung", Suite::Madelung),
        (5, "reduction", Suite::Reduction),
        (6, "dirac", Suite::Dirac),
        (7, "current", Suite::Current),
        (8, "dynamics", Suite::TrajectoryConvergence),
    ];
    for (n, title, s) in rows {
        let r = suite(&report, s);
        let mut detail = describe(r);
        if s == Suite::Curvature {
            if let Some(o) = r.observations.iter().find(|o| o.name == "curvature.r-a2") {
                detail += &format!("; R·a² = {:.6} (quoted {})", o.value, o.reference.unwrap_or(f64::NAN));
            }
        }
        line(n, title, r.pass, detail);
    }
    match criterion_cli() {
        Ok(d) => line(9, "cli", true, d),
        Err(d) => line(9, "cli", false, d),
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
