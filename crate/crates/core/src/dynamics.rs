//! Lagrangians of the top, the Hamilton–Jacobi velocity field and integration of
//! its flow together with proper time and the center-of-energy world line.

use serde::Serialize;

use crate::cx::{Cx, C64};
use crate::dual::{lift, Dual, Scalar};
use crate::error::{Result, TopError};
use crate::geometry::{
    config_metric, conformal_scale, curvature, invert, positive_weyl_factor, ComplexField, ConfigPoint, MetricField,
    PhysicalConstants, ScalarField, DIM,
};
use crate::lorentz::{lorentz_from_euler_t, EulerAngles, LorentzMatrix, Mat4, SignConvention, MINKOWSKI};
use crate::spin::fields::{em_lift_t, FieldConfig};
use crate::wave::{potentials_from_psi, PotentialPair, VectorPotential};

/// Both factorizations of L₀ together with L_em.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalLagrangian {
    /// −mc√(−ẋ² + s·a² g_μν g^{ab} ė^μ_a ė^ν_b), s the sign-convention factor.
    pub l0_fourleg: f64,
    /// −mc√(−g_ij q̇^i q̇^j).
    pub l0_metric: f64,
    /// −(e/c) A_i q̇^i.
    pub l_em: f64,
    pub radicand: f64,
}

impl ClassicalLagrangian {
    pub fn total(&self) -> f64 {
        self.l0_metric + self.l_em
    }
}

pub fn lagrangian_classical(
    constants: &PhysicalConstants,
    sign: SignConvention,
    q: &ConfigPoint,
    qdot: &[f64; DIM],
    fields: &FieldConfig,
) -> Result<ClassicalLagrangian> {
    q.validate()?;
    let qa = q.to_array();
    let g = config_metric(constants, sign).metric(&qa);
    let mut quad = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            quad += g[i][j] * qdot[i] * qdot[j];
        }
    }
    let radicand = -quad;

    // ė^μ_a along θ̇ by one dual layer on the curve θ + t θ̇
    let theta: [Dual<f64>; 6] = std::array::from_fn(|k| Dual::new(q.theta.0[k], qdot[4 + k]));
    let edot: Mat4<f64> = lorentz_from_euler_t(&theta).map(|r| r.map(|v| v.eps));
    let mut rot = 0.0;
    for mu in 0..4 {
        for a in 0..4 {
            rot += MINKOWSKI[mu] * MINKOWSKI[a] * edot[mu][a] * edot[mu][a];
        }
    }
    let xdot2: f64 = (0..4).map(|mu| MINKOWSKI[mu] * qdot[mu] * qdot[mu]).sum();
    let radicand_fourleg = -xdot2 + sign.factor() * constants.a * constants.a * rot;
    if radicand < 0.0 {
        return Err(TopError::ImaginaryRadicand(radicand));
    }
    let mc = constants.m * constants.c;
    let a = em_lift_t(fields, constants.a, &qa);
    let l_em = -(constants.e / constants.c) * (0..DIM).map(|i| a[i] * qdot[i]).sum::<f64>();
    Ok(ClassicalLagrangian {
        l0_fourleg: -mc * radicand_fourleg.max(0.0).sqrt(),
        l0_metric: -mc * radicand.sqrt(),
        l_em,
        radicand,
    })
}

/// A configuration-space flow dq/dσ.
pub trait VelocitySource: Sync {
    fn velocity(&self, q: &[f64; DIM]) -> Result<[f64; DIM]>;
}

impl<V: VelocitySource> VelocitySource for &V {
    fn velocity(&self, q: &[f64; DIM]) -> Result<[f64; DIM]> {
        (**self).velocity(q)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantVelocity(pub [f64; DIM]);

impl VelocitySource for ConstantVelocity {
    fn velocity(&self, _q: &[f64; DIM]) -> Result<[f64; DIM]> {
        Ok(self.0)
    }
}

/// λ·v for a positive constant λ.
#[derive(Clone, Copy, Debug)]
pub struct ScaledVelocity<V>(pub V, pub f64);

impl<V: VelocitySource> VelocitySource for ScaledVelocity<V> {
    fn velocity(&self, q: &[f64; DIM]) -> Result<[f64; DIM]> {
        Ok(self.0.velocity(q)?.map(|v| v * self.1))
    }
}

fn raise_scaled<M: MetricField<DIM>>(metric: &M, q: &[f64; DIM], chi: f64, pi: &[f64; DIM]) -> Result<[f64; DIM]> {
    let (ginv, _) = invert(&metric.metric(q))?;
    Ok(std::array::from_fn(|i| chi * chi * (0..DIM).map(|j| ginv[i][j] * pi[j]).sum::<f64>()))
}

/// χ² g^{ij}(∂_jS − eA_j) from a potential pair.
#[derive(Clone, Debug)]
pub struct PairVelocity<M, A, S, C> {
    pub constants: PhysicalConstants,
    pub metric: M,
    pub potential: A,
    pub pair: PotentialPair<S, C>,
}

impl<M: MetricField<DIM>, A: VectorPotential<DIM>, S: ScalarField<DIM>, C: ScalarField<DIM>> VelocitySource
    for PairVelocity<M, A, S, C>
{
    fn velocity(&self, q: &[f64; DIM]) -> Result<[f64; DIM]> {
        let chi = positive_weyl_factor(&self.pair.chi, q)?;
        let ds = crate::dual::gradient(q, |p| self.pair.s.eval(p));
        let a = self.potential.covector(q);
        let e = self.constants.e / self.constants.c;
        let pi = std::array::from_fn(|i| ds[i] - e * a[i]);
        raise_scaled(&self.metric, q, chi, &pi)
    }
}

/// The same flow read from ψ: ∂S = ħ Im(∂ψ/ψ), χ = |ψ|^{−1/4}.
#[derive(Clone, Debug)]
pub struct PsiVelocity<M, A, P> {
    pub constants: PhysicalConstants,
    pub metric: M,
    pub potential: A,
    pub psi: P,
}

impl<M: MetricField<DIM>, A: VectorPotential<DIM>, P: ComplexField<DIM>> VelocitySource for PsiVelocity<M, A, P> {
    fn velocity(&self, q: &[f64; DIM]) -> Result<[f64; DIM]> {
        let local = potentials_from_psi(&self.psi, q, &self.constants)?;
        let a = self.potential.covector(q);
        let e = self.constants.e / self.constants.c;
        let pi = std::array::from_fn(|i| local.grad_s[i] - e * a[i]);
        raise_scaled(&self.metric, q, local.chi, &pi)
    }
}

pub fn velocity_field<V: VelocitySource>(source: &V, q: &ConfigPoint) -> Result<[f64; DIM]> {
    source.velocity(&q.to_array())
}

/// Sum of complex fields.
#[derive(Clone, Debug)]
pub struct Superposition<F>(pub Vec<F>);

impl<F: ComplexField<DIM>> ComplexField<DIM> for Superposition<F> {
    fn eval<T: Scalar>(&self, q: &[T; DIM]) -> Cx<T> {
        self.0.iter().fold(Cx::zero(), |acc, f| acc + f.eval(q))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryState {
    pub sigma: f64,
    pub q: ConfigPoint,
    pub tau: f64,
    pub y: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryState>,
    pub step: f64,
    pub order: u32,
    pub seed: Option<u64>,
    /// Reason the integration stopped early, if it did.
    pub truncated: Option<String>,
}

impl Trajectory {
    /// max |ΛᵀGΛ − G| over samples.
    pub fn fourleg_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| LorentzMatrix(lorentz_from_euler_t(&s.q.theta.0)).orthogonality_defect())
            .fold(0.0, f64::max)
    }

    pub fn end(&self) -> Option<&TrajectoryState> {
        self.samples.last()
    }
}

const STATE: usize = DIM + 5;

fn rhs<V: VelocitySource>(source: &V, s: &[f64; STATE]) -> Result<[f64; STATE]> {
    let q: [f64; DIM] = std::array::from_fn(|k| s[k]);
    let v = source.velocity(&q)?;
    let u2: f64 = (0..4).map(|mu| MINKOWSKI[mu] * v[mu] * v[mu]).sum();
    let dtau = (-u2).max(0.0).sqrt();
    let theta: [f64; 6] = std::array::from_fn(|k| q[4 + k]);
    let l = lorentz_from_euler_t(&lift::<f64, 6>(&theta));
    let mut out = [0.0; STATE];
    out[..DIM].copy_from_slice(&v);
    out[DIM] = dtau;
    for mu in 0..4 {
        out[DIM + 1 + mu] = l[mu][0] * dtau;
    }
    Ok(out)
}

fn axpy(s: &[f64; STATE], h: f64, k: &[f64; STATE]) -> [f64; STATE] {
    std::array::from_fn(|i| s[i] + h * k[i])
}

fn rk4_step<V: VelocitySource>(source: &V, s: &[f64; STATE], h: f64) -> Result<[f64; STATE]> {
    let k1 = rhs(source, s)?;
    let k2 = rhs(source, &axpy(s, 0.5 * h, &k1))?;
    let k3 = rhs(source, &axpy(s, 0.5 * h, &k2))?;
    let k4 = rhs(source, &axpy(s, h, &k3))?;
    Ok(std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

fn to_state(s: &[f64; STATE], sigma: f64) -> TrajectoryState {
    let q: [f64; DIM] = std::array::from_fn(|k| s[k]);
    TrajectoryState { sigma, q: ConfigPoint::from_array(&q), tau: s[DIM], y: std::array::from_fn(|k| s[DIM + 1 + k]) }
}

/// Fixed-step RK4 over σ ∈ [span.0, span.1] starting with τ = 0 and y = x.
pub fn integrate_trajectory<V: VelocitySource>(
    start: &ConfigPoint,
    source: &V,
    span: (f64, f64),
    steps: usize,
) -> Result<Trajectory> {
    start.validate()?;
    let h = if steps == 0 { 0.0 } else { (span.1 - span.0) / steps as f64 };
    let mut traj = Trajectory { samples: Vec::new(), step: h, order: 4, seed: None, truncated: None };
    if steps == 0 {
        return Ok(traj);
    }
    if !(h > 0.0) {
        return Err(TopError::Domain(format!("empty or reversed span {span:?}")));
    }
    let mut s = [0.0; STATE];
    s[..DIM].copy_from_slice(&start.to_array());
    s[DIM + 1..].copy_from_slice(&start.x);
    traj.samples.push(to_state(&s, span.0));
    for n in 0..steps {
        match rk4_step(source, &s, h) {
            Ok(next) => {
                s = next;
                traj.samples.push(to_state(&s, span.0 + (n + 1) as f64 * h));
            }
            Err(e @ TopError::ZeroAmplitude(_)) => {
                traj.truncated = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// Oscillation diagnostics of x − y along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZitterbewegungReport {
    /// max |x(τ) − y(τ)| over the spatial components.
    pub max_separation: f64,
    /// max deviation of the spatial x − y from its least-squares line in τ.
    pub oscillation_amplitude: f64,
    /// Angular frequency (per unit τ) of the strongest DFT bin of that deviation.
    pub dominant_frequency: f64,
    /// 2mc²/ħ, for comparison only.
    pub reference_frequency: f64,
    pub samples: usize,
}

pub const MIN_REPORT_SAMPLES: usize = 100;

pub fn zitterbewegung_report(traj: &Trajectory, constants: &PhysicalConstants) -> Result<ZitterbewegungReport> {
    let n = traj.samples.len();
    if n < MIN_REPORT_SAMPLES {
        return Err(TopError::TooShort(n));
    }
    let tau: Vec<f64> = traj.samples.iter().map(|s| s.tau).collect();
    let diff: Vec<[f64; 3]> =
        traj.samples.iter().map(|s| std::array::from_fn(|k| s.q.x[k + 1] - s.y[k + 1])).collect();
    let max_separation = diff.iter().map(|d| d.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);

    let tm = tau.iter().sum::<f64>() / n as f64;
    let stt: f64 = tau.iter().map(|t| (t - tm) * (t - tm)).sum();
    let mut resid = vec![[0.0; 3]; n];
    for k in 0..3 {
        let dm = diff.iter().map(|d| d[k]).sum::<f64>() / n as f64;
        let slope = if stt > 0.0 {
            tau.iter().zip(&diff).map(|(t, d)| (t - tm) * (d[k] - dm)).sum::<f64>() / stt
        } else {
            0.0
        };
        for i in 0..n {
            resid[i][k] = diff[i][k] - dm - slope * (tau[i] - tm);
        }
    }
    let oscillation_amplitude = resid.iter().map(|d| d.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);

    // uniform-in-sample DFT, converted with the mean τ increment
    let mut best = (0.0, 0usize);
    for bin in 1..n / 2 {
        let mut power = 0.0;
        for k in 0..3 {
            let mut z = C64::zero();
            for (i, r) in resid.iter().enumerate() {
                z += Cx::expi(-2.0 * std::f64::consts::PI * (bin * i) as f64 / n as f64).scale(r[k]);
            }
            power += z.norm_sqr();
        }
        if power > best.0 {
            best = (power, bin);
        }
    }
    let dtau = (tau[n - 1] - tau[0]) / (n - 1) as f64;
    let dominant_frequency =
        if dtau > 0.0 && best.1 > 0 { 2.0 * std::f64::consts::PI * best.1 as f64 / (n as f64 * dtau) } else { 0.0 };
    Ok(ZitterbewegungReport {
        max_separation,
        oscillation_amplitude,
        dominant_frequency,
        reference_frequency: 2.0 * constants.m * constants.c * constants.c / constants.hbar,
        samples: n,
    })
}

/// R̄√|ḡ| at up to `max_points` evenly spaced samples; reported, never thresholded.
pub fn synchronous_diagnostic<M: MetricField<DIM>, C: ScalarField<DIM>>(
    traj: &Trajectory,
    metric: &M,
    chi: &C,
    max_points: usize,
) -> Result<Vec<(f64, f64)>> {
    let n = traj.samples.len();
    if n == 0 || max_points == 0 {
        return Ok(Vec::new());
    }
    let stride = n.div_ceil(max_points).max(1);
    let bar = conformal_scale(metric, chi);
    traj.samples
        .iter()
        .step_by(stride)
        .map(|s| {
            let q = s.q.to_array();
            let rep = curvature(&bar, &q)?;
            let (_, det) = invert(&bar.metric(&q))?;
            Ok((s.sigma, rep.scalar * det.abs().sqrt()))
        })
        .collect()
}

/// Endpoint-difference convergence order from runs with N, 2N and 4N steps.
pub fn convergence_order<V: VelocitySource>(start: &ConfigPoint, source: &V, span: (f64, f64), steps: usize) -> Result<f64> {
    let end = |n: usize| -> Result<[f64; DIM + 1]> {
        let t = integrate_trajectory(start, source, span, n)?;
        let s = t.end().ok_or(TopError::TooShort(0))?;
        if t.truncated.is_some() {
            return Err(TopError::Domain("trajectory truncated during convergence study".into()));
        }
        let q = s.q.to_array();
        Ok(std::array::from_fn(|k| if k < DIM { q[k] } else { s.tau }))
    };
    let (a, b, c) = (end(steps)?, end(2 * steps)?, end(4 * steps)?);
    let dist = |u: &[f64; DIM + 1], v: &[f64; DIM + 1]| u.iter().zip(v).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    Ok((dist(&a, &b) / dist(&b, &c)).log2())
}

/// Configuration point from position and Euler angles.
pub fn start_point(x: [f64; 4], theta: [f64; 6]) -> ConfigPoint {
    ConfigPoint { x, theta: EulerAngles(theta) }
}
