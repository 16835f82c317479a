//! Verification suites and their structured report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, Suite};
use crate::cx::{CMat, Cx, C64};
use crate::dynamics::{
    convergence_order, integrate_trajectory, start_point, zitterbewegung_report, PairVelocity, PsiVelocity,
    ScaledVelocity, Superposition,
};
use crate::error::{Result, TopError};
use crate::geometry::{
    config_metric, conformal_scale, curvature, scalar_curvature_closed_form, ConfigMetric, ConfigPoint,
    PhysicalConstants, Polynomial, ScalarField, Sphere2, DIM,
};
use crate::lorentz::{
    casimir_matrix, lorentz_from_euler, rep_matrix, sl2c_from_euler, vector_map, EulerAngles, SignConvention, SpinorRep,
};
use crate::spin::dirac::{assembled_coefficient_residual, mass_shell_defect};
use crate::spin::reduction::{
    predicted_dirac_wave_residual, predicted_wave_residual, reduction_calibration, reduction_sample, wave_setup,
    DiracField, PlaneWaveSpinor, PolynomialSpinor, ReductionCoefficients, SpinorField,
};
use crate::spin::{a_from_mass, dirac_plane_wave, squared_dirac_residual, FieldConfig, LiftedPotential};
use crate::wave::{psi_from_potentials, CurvatureRoute, NoPotential, PotentialPair, WaveSetup};
use crate::weyl::{connection_scalar_curvature, gauge_transform, weyl_scalar_curvature, WeylPotential};

/// Outcome of one check; `pass` holds exactly when `max_residual ≤ tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A reported quantity that is compared but never thresholded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub observations: Vec<Observation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.suites.iter().flat_map(|s| &s.checks)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Measure {
    residual: f64,
    tolerance: f64,
    samples: usize,
    detail: Option<String>,
}

fn at_most(residual: f64, tolerance: f64, samples: usize) -> Measure {
    Measure { residual, tolerance, samples, detail: None }
}

/// Lower-bound check expressed as bound/measured ≤ 1.
fn at_least(measured: f64, bound: f64, samples: usize) -> Measure {
    let residual = if measured > 0.0 { bound / measured } else { f64::INFINITY };
    Measure { residual, tolerance: 1.0, samples, detail: Some(format!("measured {measured:e}, required at least {bound:e}")) }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    k: PhysicalConstants,
    timings: bool,
    checks: Vec<CheckResult>,
    observations: Vec<Observation>,
}

fn mix(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, folded into the run seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

impl<'a> Ctx<'a> {
    fn rng(&self, name: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.cfg.seed, name))
    }

    fn check(&mut self, name: &str, f: impl FnOnce(&Self) -> Result<Measure>) {
        let t0 = Instant::now();
        let out = f(self);
        let wall = self.timings.then(|| t0.elapsed().as_secs_f64() * 1e3);
        let result = match out {
            Ok(m) => CheckResult {
                name: name.to_string(),
                max_residual: m.residual,
                tolerance: m.tolerance,
                samples: m.samples,
                pass: m.residual <= m.tolerance,
                wall_time_ms: wall,
                detail: m.detail,
            },
            Err(e) => CheckResult {
                name: name.to_string(),
                max_residual: f64::INFINITY,
                tolerance: 0.0,
                samples: 0,
                pass: false,
                wall_time_ms: wall,
                detail: Some(e.to_string()),
            },
        };
        self.checks.push(result);
    }

    fn observe(&mut self, name: &str, value: f64, reference: Option<f64>, note: &str) {
        self.observations.push(Observation { name: name.into(), value, reference, note: note.into() });
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a: f64, b| if b.is_nan() || b > a { b } else { a })
}

fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
    EulerAngles(std::array::from_fn(|_| rng.gen_range(-1.2..1.2)))
}

fn sign_name(sign: SignConvention) -> &'static str {
    match sign {
        SignConvention::RotationsPositive => "rotations-positive",
        SignConvention::Literal => "literal",
    }
}

fn labels() -> Vec<SpinorRep> {
    [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(u, v)| SpinorRep::new(u, v).expect("supported label")).collect()
}

fn label_name(rep: SpinorRep) -> String {
    let h = |t: u32| if t.is_multiple_of(2) { format!("{}", t / 2) } else { format!("{t}/2") };
    format!("({},{})", h(rep.two_u), h(rep.two_v))
}

/// Uniform test fields: the configured ones when uniform and nonzero, a fixed set otherwise.
fn uniform_fields(cfg: &RunConfig) -> FieldConfig {
    match &cfg.fields {
        f @ FieldConfig::Uniform { .. } if !f.is_zero() => f.clone(),
        _ => FieldConfig::Uniform { e: [0.2, -0.1, 0.3], h: [0.1, 0.25, -0.15] },
    }
}

fn suite_lorentz(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.cfg.samples.lorentz_angles;
    let tol = ctx.cfg.tolerances.clone();
    let mut rng = ctx.rng("lorentz.angles");
    let angles: Vec<EulerAngles> = (0..n).map(|_| random_angles(&mut rng)).collect();
    let pairs: Vec<_> = angles
        .iter()
        .map(|a| Ok((lorentz_from_euler(a)?, sl2c_from_euler(a)?.0)))
        .collect::<Result<_>>()?;
    ctx.check("lorentz.orthogonality", |_| Ok(at_most(max_of(pairs.iter().map(|(l, _)| l.orthogonality_defect())), tol.algebra, n)));
    ctx.check("lorentz.proper-orthochronous", |_| {
        let r = max_of(pairs.iter().map(|(l, _)| (l.determinant() - 1.0).abs().max((1.0 - l.0[0][0]).max(0.0))));
        Ok(at_most(r, tol.algebra, n))
    });
    ctx.check("lorentz.sl2c-determinant", |_| {
        Ok(at_most(max_of(pairs.iter().map(|(_, a)| (a.det2() - Cx::one()).abs())), tol.algebra, n))
    });
    ctx.check("lorentz.sl2c-vector-map", |_| {
        let r = max_of(pairs.iter().map(|(l, a)| {
            let v = vector_map(a);
            max_of((0..16).map(|k| (v[k / 4][k % 4] - l.0[k / 4][k % 4]).abs()))
        }));
        Ok(at_most(r, tol.algebra, n))
    });
    ctx.check("lorentz.conjugate-rep", |_| {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for a in angles.iter().take(10) {
            for u in 0..=3 {
                for v in 0..=3 {
                    let rep = SpinorRep::new(u, v)?;
                    let d = rep_matrix(rep, a)?;
                    let dc = rep_matrix(rep.conjugate(), a)?;
                    let prod = if u != v {
                        d.adjoint().matmul(&dc)
                    } else {
                        // self-conjugate label: up to the swap of the two tensor factors
                        let m = u as usize + 1;
                        let swap = CMat::from_fn(m * m, m * m, |r, c| if r == (c % m) * m + c / m { Cx::one() } else { Cx::zero() });
                        swap.matmul(&d.adjoint()).matmul(&swap).matmul(&dc)
                    };
                    worst = worst.max(prod.max_abs_diff(&CMat::identity(rep.dim())));
                    count += 1;
                }
            }
        }
        Ok(at_most(worst, tol.representation, count))
    });
    Ok(())
}

fn suite_curvature(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.cfg.tolerances.curvature;
    let n = ctx.cfg.samples.curvature_points;
    ctx.check("curvature.sphere-oracle", |ctx| {
        let mut rng = ctx.rng("curvature.sphere");
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let r = rng.gen_range(0.3..3.0);
            let q = [rng.gen_range(0.2..2.9), rng.gen_range(-3.0..3.0)];
            let c = curvature(&Sphere2 { radius: r }, &q)?.scalar;
            worst = worst.max((c - 2.0 / (r * r)).abs());
        }
        Ok(at_most(worst, tol, n))
    });
    for sign in [SignConvention::RotationsPositive, SignConvention::Literal] {
        let k = ctx.k;
        let metric = config_metric(&k, sign);
        let mut rng = ctx.rng(&format!("curvature.points.{}", sign_name(sign)));
        let points: Vec<[f64; DIM]> = (0..n).map(|_| ConfigPoint::random(&mut rng).to_array()).collect();
        let values: Vec<f64> = points.par_iter().map(|q| curvature(&metric, q).map(|c| c.scalar)).collect::<Result<_>>()?;
        let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
        let spread = max_of(values.iter().map(|v| (v - mean).abs())) / mean.abs();
        ctx.check(&format!("curvature.constant.{}", sign_name(sign)), |_| Ok(at_most(spread, tol, n)));
        let closed = scalar_curvature_closed_form(&k, sign);
        ctx.check(&format!("curvature.closed-form.{}", sign_name(sign)), |_| {
            Ok(at_most(max_of(values.iter().map(|v| (v - closed).abs())), tol, n))
        });
        if sign == ctx.cfg.sign {
            ctx.observe("curvature.r-a2", mean * k.a * k.a, Some(6.0), "computed R·a² against the quoted R = 6/a²; the deviation is reported, not asserted");
        }
    }
    Ok(())
}

struct WeylSample {
    identity: f64,
    gauge: f64,
    forms: f64,
    printed: f64,
    connection: f64,
}

fn suite_weyl(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.cfg.samples.weyl_points;
    let tol = ctx.cfg.tolerances.clone();
    let metric = config_metric(&ctx.k, ctx.cfg.sign);
    let mut rng = ctx.rng("weyl.inputs");
    let inputs: Vec<_> = (0..n)
        .map(|_| {
            let chi = Polynomial::<DIM>::random_quadratic(&mut rng, 1.5, 0.1);
            let rho = Polynomial::<DIM>::random_quadratic(&mut rng, 1.2, 0.1);
            (chi, rho, ConfigPoint::random(&mut rng).to_array())
        })
        .collect();
    let samples: Vec<WeylSample> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, (chi, rho, q))| {
            let rw = weyl_scalar_curvature(&metric, chi, q)?;
            let c = chi.eval(q);
            let r_bar = curvature(&conformal_scale(&metric, chi), q)?.scalar;
            let (m2, chi2) = gauge_transform(&metric, chi, rho);
            let lhs = chi2.eval(q).powi(2) * weyl_scalar_curvature(&m2, &chi2, q)?.value();
            let rhs = c * c * rw.value();
            let connection = if i < 5 {
                (connection_scalar_curvature(&metric, &WeylPotential::from_factor(chi), q)? - rw.value()).abs()
            } else {
                0.0
            };
            Ok(WeylSample {
                identity: (r_bar - rhs).abs() / r_bar.abs().max(1.0),
                gauge: (lhs - rhs).abs() / rhs.abs().max(1.0),
                forms: rw.form_disagreement(),
                printed: (rw.printed_phi_form - rw.chi_form).abs(),
                connection,
            })
        })
        .collect::<Result<_>>()?;
    ctx.check("weyl.conformal-identity", |_| Ok(at_most(max_of(samples.iter().map(|s| s.identity)), tol.curvature, n)));
    ctx.check("weyl.gauge-covariance", |_| Ok(at_most(max_of(samples.iter().map(|s| s.gauge)), tol.curvature, n)));
    ctx.check("weyl.chi-phi-forms", |_| Ok(at_most(max_of(samples.iter().map(|s| s.forms)), tol.weyl_forms, n)));
    ctx.check("weyl.connection-route", |_| {
        Ok(at_most(max_of(samples.iter().map(|s| s.connection)), tol.curvature, n.min(5)))
    });
    ctx.observe(
        "weyl.printed-phi-coefficient",
        max_of(samples.iter().map(|s| s.printed)),
        None,
        "φ-form with coefficient (n−1) on |φ|² differs from the χ-form; the (n−1)(n−2) coefficient is used",
    );
    Ok(())
}

fn field_setup(k: &PhysicalConstants, sign: SignConvention, fields: &FieldConfig) -> WaveSetup<ConfigMetric, LiftedPotential, DIM> {
    WaveSetup::new(*k, config_metric(k, sign), LiftedPotential { fields: fields.clone(), a: k.a })
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(PotentialPair<Polynomial<DIM>, Polynomial<DIM>>, [f64; DIM])> {
    (0..n)
        .map(|_| {
            let pair = PotentialPair {
                s: Polynomial::random_cubic(rng, 0.0, 0.5),
                chi: Polynomial::random_quadratic(rng, 1.5, 0.1),
            };
            (pair, ConfigPoint::random(rng).to_array())
        })
        .collect()
}

fn suite_madelung(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.cfg.samples.madelung_pairs;
    let tol = ctx.cfg.tolerances.clone();
    let w = field_setup(&ctx.k, ctx.cfg.sign, &ctx.cfg.fields);
    let mut rng = ctx.rng("madelung.pairs");
    let pairs = random_pairs(&mut rng, n);
    let good: Vec<f64> = pairs.par_iter().map(|(p, q)| w.madelung_defect(p, q).map(|s| s.relative_defect())).collect::<Result<_>>()?;
    ctx.check("madelung.decomposition", |_| Ok(at_most(max_of(good.iter().copied()), tol.madelung, n)));
    ctx.check("madelung.hj-routes", |_| {
        let mut worst: f64 = 0.0;
        for (p, q) in pairs.iter().take(3) {
            let a = w.hj_residual(p, q)?;
            let b = w.hj_residual_via(p, q, CurvatureRoute::Weyl)?;
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        Ok(at_most(worst, tol.curvature, n.min(3)))
    });
    if ctx.cfg.madelung_negative {
        let mut bad = field_setup(&ctx.k, ctx.cfg.sign, &ctx.cfg.fields);
        bad.constants.gamma2 = ctx.cfg.constants.gamma2_override;
        let defects: Vec<f64> =
            pairs.par_iter().map(|(p, q)| bad.madelung_defect(p, q).map(|s| s.relative_defect())).collect::<Result<_>>()?;
        let min = defects.iter().copied().fold(f64::INFINITY, f64::min);
        ctx.observe("madelung.perturbed-min-defect", min, None, "smallest per-pair defect with the perturbed coupling");
        ctx.check("madelung.perturbed-coupling-fails", |_| Ok(at_least(max_of(defects), tol.madelung_negative_min, n)));
    }
    Ok(())
}

fn suite_reduction(ctx: &mut Ctx) -> Result<()> {
    let k = ctx.k;
    let sign = ctx.cfg.sign;
    let tol = ctx.cfg.tolerances.clone();
    let n = ctx.cfg.samples.reduction_points;
    let coeffs = ReductionCoefficients::calibrated(&k, sign)?;
    for (tag, fields) in [("zero-field", FieldConfig::None), ("uniform-field", uniform_fields(ctx.cfg))] {
        let setup = wave_setup(&k, sign, &fields, coeffs.curvature);
        for rep in labels() {
            let name = format!("reduction.{tag}.{}", label_name(rep));
            let mut rng = ctx.rng(&name);
            let inputs: Vec<_> = (0..n)
                .map(|_| (PolynomialSpinor::random(&mut rng, rep.dim()), ConfigPoint::random(&mut rng)))
                .collect();
            let defects: Result<Vec<f64>> = inputs
                .into_par_iter()
                .map(|(c, q)| {
                    let field = SpinorField::new(rep, c)?;
                    let pred = predicted_wave_residual(&field, &q, &fields, &k, &coeffs)?;
                    Ok(reduction_sample(&field, pred, &q, &setup)?.relative_defect())
                })
                .collect();
            ctx.check(&name, |_| Ok(at_most(max_of(defects?), tol.reduction, n)));
        }
    }
    ctx.check("reduction.dirac-blocks", |ctx| {
        let fields = uniform_fields(ctx.cfg);
        let setup = wave_setup(&k, sign, &fields, coeffs.curvature);
        let mut rng = ctx.rng("reduction.dirac-blocks");
        let rep = SpinorRep::new(0, 1)?;
        let mut worst: f64 = 0.0;
        let m = n.min(3);
        for _ in 0..m {
            let d = DiracField::new(rep, PolynomialSpinor::random(&mut rng, 2), PolynomialSpinor::random(&mut rng, 2))?;
            let q = ConfigPoint::random(&mut rng);
            let pred = predicted_dirac_wave_residual(&d, &q, &fields, &k, &coeffs)?;
            worst = worst.max(reduction_sample(&d, pred, &q, &setup)?.relative_defect());
        }
        Ok(at_most(worst, tol.reduction, m))
    });
    ctx.check("reduction.casimir-(0,1/2)", |_| {
        let c = casimir_matrix(SpinorRep::new(0, 1)?)?;
        Ok(at_most(c.max_abs_diff(&CMat::identity(2).scale(Cx::real(1.5))), tol.algebra, 1))
    });
    let cal = reduction_calibration(&k, sign, ctx.cfg.samples.calibration_points, mix(ctx.cfg.seed, "reduction.calibration"))?;
    ctx.check("reduction.calibration-closure", |_| Ok(at_most(cal.closure_defect, tol.calibration, cal.samples)));
    ctx.check("reduction.calibration-spread", |_| Ok(at_most(cal.casimir_spread, tol.calibration, cal.samples)));
    ctx.observe("reduction.casimir-coefficient", cal.c_casimir, Some(cal.paper_casimir), "measured ν in −a²Δ_group D = ν(J²−K²)D");
    ctx.observe("reduction.curvature-a2", cal.curvature_a2, Some(cal.paper_curvature_a2), "computed R·a²");
    Ok(())
}

fn dirac_constants(k: &PhysicalConstants) -> Result<PhysicalConstants> {
    let mut kd = *k;
    kd.a = a_from_mass(k.m, k)?;
    Ok(kd)
}

fn on_shell(m: f64, c: f64, pv: [f64; 3]) -> [f64; 4] {
    [((m * c).powi(2) + pv.iter().map(|v| v * v).sum::<f64>()).sqrt(), pv[0], pv[1], pv[2]]
}

fn random_spin(rng: &mut ChaCha8Rng) -> [C64; 2] {
    std::array::from_fn(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn suite_dirac(ctx: &mut Ctx) -> Result<()> {
    let k = dirac_constants(&ctx.k)?;
    let tol = ctx.cfg.tolerances.clone();
    let n = ctx.cfg.samples.dirac_waves;
    ctx.check("dirac.a-from-mass", |_| Ok(at_most((k.a * k.m * k.c / k.hbar - (17.0f64 / 6.0).sqrt()).abs(), tol.algebra, 1)));
    let mut rng = ctx.rng("dirac.waves");
    let waves: Vec<_> = (0..n)
        .map(|_| {
            let pv = std::array::from_fn(|_| rng.gen_range(-1.5..1.5) * k.m * k.c);
            let x = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let scale = rng.gen_range(1.02..1.2);
            (on_shell(k.m, k.c, pv), random_spin(&mut rng), x, scale)
        })
        .collect();
    let built: Vec<_> = waves.iter().map(|(p, s, _, _)| dirac_plane_wave(*p, *s, k.m, &k)).collect::<Result<_>>()?;
    ctx.check("dirac.on-shell", |_| {
        let r: Vec<f64> = built.iter().zip(&waves).map(|(w, (_, _, x, _))| w.relative_squared_residual(x, &k)).collect::<Result<_>>()?;
        Ok(at_most(max_of(r), tol.dirac, n))
    });
    ctx.check("dirac.off-shell", |_| {
        let mut min = f64::INFINITY;
        for (w, (p, _, x, scale)) in built.iter().zip(&waves) {
            let off = w.with_momentum([p[0] * scale, p[1], p[2], p[3]]);
            let defect = mass_shell_defect(&off.p, k.m, k.c).abs() / (k.m * k.c).powi(2);
            if defect <= 0.01 {
                return Err(TopError::Domain(format!("off-shell sample too close to the shell: {defect}")));
            }
            min = min.min(off.relative_squared_residual(x, &k)?);
        }
        Ok(at_least(min, tol.dirac_off_shell_min, n))
    });
    let paper = ReductionCoefficients::paper(&k);
    let rep = SpinorRep::new(0, 1)?;
    let mut rng = ctx.rng("dirac.assembly");
    let d = DiracField::new(rep, PolynomialSpinor::random(&mut rng, 2), PolynomialSpinor::random(&mut rng, 2))?;
    let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let field_sets = [FieldConfig::Uniform { e: [0.0; 3], h: [0.0, 0.0, 0.4] }, uniform_fields(ctx.cfg)];
    ctx.check("dirac.block-assembly", |_| {
        let mut worst: f64 = 0.0;
        for f in &field_sets {
            let a = assembled_coefficient_residual(&d, &x, f, &k, &paper)?;
            let b = squared_dirac_residual(&d, &x, f, &k, true)?;
            worst = worst.max(max_of((0..4).map(|i| (a[i] - b[i]).abs() / (1.0 + b[i].abs()))));
        }
        Ok(at_most(worst, tol.assembly, field_sets.len()))
    });
    ctx.check("dirac.f2-toggle", |_| {
        let mut worst: f64 = 0.0;
        let psi: Vec<C64> = {
            use crate::spin::reduction::SpinorCoefficients;
            d.upper.coeffs.eval(&x).into_iter().chain(d.lower.coeffs.eval(&x)).collect()
        };
        let ea = k.e * k.a / k.c;
        for f in &field_sets {
            let with = squared_dirac_residual(&d, &x, f, &k, true)?;
            let without = squared_dirac_residual(&d, &x, f, &k, false)?;
            let (e, h) = (f.electric(&x), f.magnetic(&x));
            let f2 = h.iter().map(|v| v * v).sum::<f64>() - e.iter().map(|v| v * v).sum::<f64>();
            worst = worst.max(max_of((0..4).map(|i| (with[i] - without[i] - psi[i].scale(ea * ea * f2)).abs() / (1.0 + with[i].abs()))));
        }
        Ok(at_most(worst, tol.algebra, field_sets.len()))
    });
    Ok(())
}

fn suite_current(ctx: &mut Ctx) -> Result<()> {
    let k = ctx.k;
    let sign = ctx.cfg.sign;
    let tol = ctx.cfg.tolerances.clone();
    let n = ctx.cfg.samples.current_points;
    let coeffs = ReductionCoefficients::calibrated(&k, sign)?;
    let free = wave_setup(&k, sign, &FieldConfig::None, coeffs.curvature);
    let mut rng = ctx.rng("current.plane-waves");
    let mut inputs = Vec::new();
    for rep in labels() {
        let mass2 = k.hbar * k.hbar * k.gamma2 * coeffs.curvature + coeffs.nu * (k.hbar / k.a).powi(2) * rep.casimir();
        for _ in 0..n {
            let mut pv: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
            let p2: f64 = pv.iter().map(|v| v * v).sum();
            if mass2 + p2 <= 0.0 {
                // negative mass term: keep p⁰ real
                let s = ((0.25 - mass2) / p2.max(f64::MIN_POSITIVE)).sqrt();
                pv = pv.map(|v| v * s);
            }
            let p0 = (mass2 + pv.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let amplitude = (0..rep.dim()).map(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let c = PlaneWaveSpinor { p: [p0, pv[0], pv[1], pv[2]], amplitude, hbar: k.hbar };
            inputs.push((rep, c, ConfigPoint::random(&mut rng).to_array()));
        }
    }
    let samples: Vec<(f64, f64)> = inputs
        .into_par_iter()
        .map(|(rep, c, q)| {
            let pmax = c.p.iter().fold(0.0f64, |a, v| a.max(v.abs())) + k.hbar / k.a;
            let field = SpinorField::new(rep, c)?;
            let cur = free.current(&field, &q)?;
            let div = free.current_divergence(&field, &q)?;
            let jmax = cur.j.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            Ok((div.abs() / (jmax * pmax / k.hbar).max(f64::MIN_POSITIVE), cur.imaginary_part))
        })
        .collect::<Result<_>>()?;
    let count = samples.len();
    ctx.check("current.plane-wave-divergence", |_| Ok(at_most(max_of(samples.iter().map(|s| s.0)), tol.current, count)));
    ctx.check("current.reality", |_| Ok(at_most(max_of(samples.iter().map(|s| s.1)), tol.current_reality, count)));
    ctx.check("current.continuity-identity", |ctx| {
        let w = field_setup(&k, sign, &ctx.cfg.fields);
        let mut rng = ctx.rng("current.pairs");
        let pairs = random_pairs(&mut rng, n.min(5));
        let r: Vec<f64> = pairs
            .into_par_iter()
            .map(|(pair, q)| {
                let psi = psi_from_potentials(pair, &k);
                let div = w.current_divergence(&psi, &q)?;
                let wpsi = w.wave_residual(&psi, &q)?;
                let val = crate::geometry::ComplexField::<DIM>::eval(&psi, &q);
                let expect = -(val.conj() * wpsi).im / k.hbar;
                Ok((div - expect).abs() / (1.0 + expect.abs()))
            })
            .collect::<Result<_>>()?;
        let m = r.len();
        Ok(at_most(max_of(r), tol.current, m))
    });
    Ok(())
}

type ScalarWave = SpinorField<PlaneWaveSpinor>;

/// Sum of plane waves of one label with momenta put on the shell p² = −mass2.
pub fn plane_wave_sum(rep: SpinorRep, mass2: f64, waves: &[([f64; 3], Vec<C64>)], hbar: f64) -> Result<Superposition<ScalarWave>> {
    waves
        .iter()
        .map(|(pv, amp)| {
            let p0 = (mass2 + pv.iter().map(|v| v * v).sum::<f64>()).sqrt();
            SpinorField::new(rep, PlaneWaveSpinor { p: [p0, pv[0], pv[1], pv[2]], amplitude: amp.clone(), hbar })
        })
        .collect::<Result<Vec<_>>>()
        .map(Superposition)
}

fn psi_flow(k: &PhysicalConstants, sign: SignConvention, psi: Superposition<ScalarWave>) -> PsiVelocity<ConfigMetric, NoPotential, Superposition<ScalarWave>> {
    PsiVelocity { constants: *k, metric: config_metric(k, sign), potential: NoPotential, psi }
}

fn suite_trajectory(ctx: &mut Ctx) -> Result<()> {
    let k = ctx.k;
    let sign = ctx.cfg.sign;
    let tol = ctx.cfg.tolerances.clone();
    let steps = ctx.cfg.samples.trajectory_steps;
    let scalar = SpinorRep::new(0, 0)?;
    let m2 = (k.m * k.c).powi(2);
    let mut rng = ctx.rng("trajectory.inputs");
    let pv: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.6..0.6));
    let start = start_point(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)), std::array::from_fn(|_| rng.gen_range(-0.5..0.5)));
    let single = psi_flow(&k, sign, plane_wave_sum(scalar, m2, &[(pv, vec![Cx::one()])], k.hbar)?);
    let two = [([0.4, 0.0, 0.0], vec![Cx::one()]), ([-0.3, 0.2, 0.0], vec![Cx::real(0.3)])];
    let double = psi_flow(&k, sign, plane_wave_sum(scalar, m2, &two, k.hbar)?);

    ctx.check("trajectory.plane-wave-slope", |_| {
        let t = integrate_trajectory(&start, &single, (0.0, 2.0), steps.max(1))?;
        let p = single.psi.0[0].coeffs.p;
        let pmax = p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let x0 = start.x;
        let worst = max_of(t.samples.iter().skip(1).map(|s| {
            max_of((0..4).map(|mu| ((s.q.x[mu] - x0[mu]) / s.sigma - p[mu]).abs())) / pmax
        }));
        Ok(at_most(worst, tol.slope, t.samples.len()))
    });
    ctx.check("trajectory.convergence-order", |_| {
        let order = convergence_order(&start, &double, (0.0, 4.0), 40)?;
        Ok(at_least(order, tol.convergence_order_min, 3))
    });
    ctx.check("trajectory.fourleg-drift", |_| {
        // spinor-label waves make the angles evolve
        let rep = SpinorRep::new(0, 1)?;
        let waves = [
            ([0.3, 0.0, 0.1], vec![Cx::one(), Cx::new(0.0, 0.5)]),
            ([-0.2, 0.3, 0.0], vec![Cx::real(0.4), Cx::real(-0.2)]),
        ];
        let flow = psi_flow(&k, sign, plane_wave_sum(rep, m2, &waves, k.hbar)?);
        let t = integrate_trajectory(&start, &flow, (0.0, 2.0), steps.max(1))?;
        if let Some(reason) = &t.truncated {
            return Err(TopError::Domain(reason.clone()));
        }
        Ok(at_most(t.fourleg_drift(), tol.fourleg_drift, t.samples.len()))
    });
    let zb = (|| -> Result<_> {
        let span = (0.0, 20.0);
        let n = steps.max(crate::dynamics::MIN_REPORT_SAMPLES);
        let a = zitterbewegung_report(&integrate_trajectory(&start, &single, span, n)?, &k)?;
        let b = zitterbewegung_report(&integrate_trajectory(&start, &double, span, n)?, &k)?;
        Ok((a, b, n))
    })();
    if let Ok((a, b, _)) = &zb {
        ctx.observe("trajectory.zitterbewegung-amplitude", b.oscillation_amplitude, None, "max deviation of x − y from its linear drift");
        ctx.observe("trajectory.zitterbewegung-frequency", b.dominant_frequency, Some(b.reference_frequency), "dominant angular frequency per unit τ against 2mc²/ħ; informational");
        ctx.observe("trajectory.single-wave-noise", a.oscillation_amplitude, None, "same diagnostic for one plane wave");
    }
    ctx.check("trajectory.zitterbewegung-contrast", |_| {
        let (a, b, n) = zb.clone()?;
        let floor = a.oscillation_amplitude.max(f64::EPSILON);
        Ok(at_least(b.oscillation_amplitude / floor, tol.zitterbewegung_ratio_min, 2 * n))
    });
    ctx.check("trajectory.reparametrization", |_| {
        let a = integrate_trajectory(&start, &double, (0.0, 3.0), 300)?;
        let b = integrate_trajectory(&start, &ScaledVelocity(&double, 2.5), (0.0, 1.2), 300)?;
        let worst = max_of(a.samples.iter().zip(&b.samples).map(|(s, t)| {
            let (p, q) = (s.q.to_array(), t.q.to_array());
            max_of(p.iter().zip(&q).map(|(u, v)| (u - v).abs())).max((s.tau - t.tau).abs())
        }));
        Ok(at_most(worst, tol.slope, a.samples.len()))
    });
    ctx.check("trajectory.gauge-invariant-tau", |ctx| {
        let mut rng = ctx.rng("trajectory.gauge");
        let metric = config_metric(&k, sign);
        let mut s = Polynomial::<DIM>::random_quadratic(&mut rng, 0.0, 0.02);
        s.terms.push((-1.1, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));
        let chi = Polynomial::<DIM>::random_quadratic(&mut rng, 1.5, 0.05);
        let rho = Polynomial::<DIM>::random_quadratic(&mut rng, 1.3, 0.05);
        let potential = LiftedPotential { fields: ctx.cfg.fields.clone(), a: k.a };
        let (m2, chi2) = gauge_transform(&metric, &chi, &rho);
        let a = PairVelocity { constants: k, metric, potential: potential.clone(), pair: PotentialPair { s: s.clone(), chi } };
        let b = PairVelocity { constants: k, metric: m2, potential, pair: PotentialPair { s, chi: chi2 } };
        let ta = integrate_trajectory(&start, &a, (0.0, 0.5), 50)?;
        let tb = integrate_trajectory(&start, &b, (0.0, 0.5), 50)?;
        let worst = max_of(ta.samples.iter().zip(&tb.samples).map(|(u, v)| (u.tau - v.tau).abs()));
        Ok(at_most(worst, tol.slope, ta.samples.len()))
    });
    Ok(())
}

/// Runs one suite; an error outside any check becomes a failing `<suite>.error` entry.
pub fn run_suite(suite: Suite, cfg: &RunConfig, timings: bool) -> Result<SuiteReport> {
    let k = cfg.physical_constants()?;
    let mut ctx = Ctx { cfg, k, timings, checks: Vec::new(), observations: Vec::new() };
    let out = match suite {
        Suite::Lorentz => suite_lorentz(&mut ctx),
        Suite::Curvature => suite_curvature(&mut ctx),
        Suite::WeylGauge => suite_weyl(&mut ctx),
        Suite::Madelung => suite_madelung(&mut ctx),
        Suite::Reduction => suite_reduction(&mut ctx),
        Suite::Dirac => suite_dirac(&mut ctx),
        Suite::Current => suite_current(&mut ctx),
        Suite::TrajectoryConvergence => suite_trajectory(&mut ctx),
    };
    if let Err(e) = out {
        ctx.checks.push(CheckResult {
            name: format!("{}.error", suite.name()),
            max_residual: f64::INFINITY,
            tolerance: 0.0,
            samples: 0,
            pass: false,
            wall_time_ms: None,
            detail: Some(e.to_string()),
        });
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(SuiteReport { suite, pass, checks: ctx.checks, observations: ctx.observations })
}

/// Runs the selected suites in parallel; fails only on configuration errors.
pub fn verify(cfg: &RunConfig, timings: bool) -> Result<VerifyReport> {
    cfg.validate()?;
    let suites = cfg.selected_suites();
    let reports: Vec<SuiteReport> = suites.par_iter().map(|s| run_suite(*s, cfg, timings)).collect::<Result<_>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(VerifyReport { seed: cfg.seed, pass, suites: reports })
}
