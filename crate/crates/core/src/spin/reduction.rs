//! Mode expansion over D^{(u,v)}(Λ⁻¹), the matrix Δ_J and the coefficient
//! equation on space-time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cx::{CMat, Cx, C64};
use crate::dual::{lift, seed, seed2, Dual, Scalar};
use crate::error::{Result, TopError};
use crate::geometry::{
    config_metric, curvature, laplace_beltrami_complex, ComplexField, ConfigPoint, PhysicalConstants,
    Polynomial, ScalarField, DIM,
};
use crate::lorentz::{rep_generators, rep_matrix_inverse_t, square_triple, Chirality, SignConvention, SpinorRep, MINKOWSKI};
use crate::wave::WaveSetup;

use super::fields::{FieldConfig, LiftedPotential};

/// Space-time coefficient spinor c(x) of a mode expansion.
pub trait SpinorCoefficients: Sync {
    fn dim(&self) -> usize;
    fn eval<T: Scalar>(&self, x: &[T; 4]) -> Vec<Cx<T>>;
}

impl<C: SpinorCoefficients> SpinorCoefficients for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<T: Scalar>(&self, x: &[T; 4]) -> Vec<Cx<T>> {
        (**self).eval(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSpinor(pub Vec<C64>);

impl SpinorCoefficients for ConstantSpinor {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval<T: Scalar>(&self, _x: &[T; 4]) -> Vec<Cx<T>> {
        self.0.iter().map(|z| Cx::cst(z.re, z.im)).collect()
    }
}

/// u e^{i p_μ x^μ/ħ} with contravariant p^μ.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveSpinor {
    pub p: [f64; 4],
    pub amplitude: Vec<C64>,
    pub hbar: f64,
}

impl SpinorCoefficients for PlaneWaveSpinor {
    fn dim(&self) -> usize {
        self.amplitude.len()
    }
    fn eval<T: Scalar>(&self, x: &[T; 4]) -> Vec<Cx<T>> {
        let mut phase = T::zero();
        for mu in 0..4 {
            phase += x[mu] * (MINKOWSKI[mu] * self.p[mu] / self.hbar);
        }
        let w = Cx::expi(phase);
        self.amplitude.iter().map(|z| w * Cx::cst(z.re, z.im)).collect()
    }
}

/// Componentwise complex polynomial in x.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSpinor {
    pub components: Vec<(Polynomial<4>, Polynomial<4>)>,
}

impl PolynomialSpinor {
    pub fn random(rng: &mut impl rand::Rng, dim: usize) -> Self {
        PolynomialSpinor {
            components: (0..dim)
                .map(|_| (Polynomial::random_quadratic(rng, 0.5, 0.4), Polynomial::random_quadratic(rng, 0.0, 0.4)))
                .collect(),
        }
    }
}

impl SpinorCoefficients for PolynomialSpinor {
    fn dim(&self) -> usize {
        self.components.len()
    }
    fn eval<T: Scalar>(&self, x: &[T; 4]) -> Vec<Cx<T>> {
        self.components.iter().map(|(r, i)| Cx::new(r.eval(x), i.eval(x))).collect()
    }
}

/// Coefficients ψ^{σ'}(x) of a single representation block.
#[derive(Clone, Debug)]
pub struct SpinorField<C> {
    pub rep: SpinorRep,
    pub coeffs: C,
}

impl<C: SpinorCoefficients> SpinorField<C> {
    pub fn new(rep: SpinorRep, coeffs: C) -> Result<Self> {
        let rep = SpinorRep::new(rep.two_u, rep.two_v)?;
        if coeffs.dim() != rep.dim() {
            return Err(TopError::Domain(format!("spinor of length {} for label dimension {}", coeffs.dim(), rep.dim())));
        }
        Ok(SpinorField { rep, coeffs })
    }
}

/// Undotted block with label (u, v) stacked over the dotted block (v, u).
#[derive(Clone, Debug)]
pub struct DiracField<C1, C2> {
    pub upper: SpinorField<C1>,
    pub lower: SpinorField<C2>,
}

impl<C1: SpinorCoefficients, C2: SpinorCoefficients> DiracField<C1, C2> {
    pub fn new(rep: SpinorRep, upper: C1, lower: C2) -> Result<Self> {
        Ok(DiracField { upper: SpinorField::new(rep, upper)?, lower: SpinorField::new(rep.conjugate(), lower)? })
    }
}

/// Row of D(Λ(θ)⁻¹) contracted with c(x); the lower index is fixed to the first row.
fn expand_block<T: Scalar, C: SpinorCoefficients>(field: &SpinorField<C>, q: &[T; DIM]) -> Cx<T> {
    let x: [T; 4] = std::array::from_fn(|k| q[k]);
    let theta: [T; 6] = std::array::from_fn(|k| q[4 + k]);
    let c = field.coeffs.eval(&x);
    if field.rep.dim() == 1 {
        return c[0];
    }
    let d = rep_matrix_inverse_t(field.rep, &theta);
    let mut acc = Cx::zero();
    for (s, cs) in c.iter().enumerate() {
        acc += d[(0, s)] * *cs;
    }
    acc
}

/// A configuration-space scalar built by mode expansion.
pub trait ModeExpansion: ComplexField<DIM> {}

impl<C: SpinorCoefficients> ComplexField<DIM> for SpinorField<C> {
    fn eval<T: Scalar>(&self, q: &[T; DIM]) -> Cx<T> {
        expand_block(self, q)
    }
}

impl<C1: SpinorCoefficients, C2: SpinorCoefficients> ComplexField<DIM> for DiracField<C1, C2> {
    fn eval<T: Scalar>(&self, q: &[T; DIM]) -> Cx<T> {
        expand_block(&self.upper, q) + expand_block(&self.lower, q)
    }
}

impl<C: SpinorCoefficients> ModeExpansion for SpinorField<C> {}
impl<C1: SpinorCoefficients, C2: SpinorCoefficients> ModeExpansion for DiracField<C1, C2> {}

pub fn mode_expand<F: ModeExpansion>(field: &F, q: &ConfigPoint) -> C64 {
    field.eval(&q.to_array())
}

/// Scalar coefficients of the reduced equation
/// [Π² + ħ²γ²R]ψ + ν·Δ_J(κ)ψ = 0, where Δ_J(κ) = (ħ/a J − κH)² − (ħ/a K − κE)².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReductionCoefficients {
    pub curvature: f64,
    pub nu: f64,
    pub coupling: f64,
}

impl ReductionCoefficients {
    /// R = 6/a², ν = 1, κ = e a.
    pub fn paper(constants: &PhysicalConstants) -> Self {
        let a = constants.a;
        ReductionCoefficients { curvature: 6.0 / (a * a), nu: 1.0, coupling: constants.e * a / constants.c }
    }

    /// The coefficients the configuration metric actually produces, with R
    /// computed by the curvature engine at a reference point.
    pub fn calibrated(constants: &PhysicalConstants, sign: SignConvention) -> Result<Self> {
        let q = ConfigPoint::new([0.0; 4], [0.3, -0.2, 0.1, 0.2, 0.1, -0.3]).to_array();
        let r = curvature(&config_metric(constants, sign), &q)?.scalar;
        Ok(Self::with_curvature(constants, sign, r))
    }

    pub fn with_curvature(constants: &PhysicalConstants, sign: SignConvention, r: f64) -> Self {
        ReductionCoefficients { curvature: r, nu: -0.5 * sign.factor(), coupling: constants.e / constants.c }
    }
}

/// (ħ/a J − κH)² − (ħ/a K − κE)² for the generators of `rep` in the given chirality.
pub fn delta_j(
    rep: SpinorRep,
    kind: Chirality,
    e_field: &[f64; 3],
    h_field: &[f64; 3],
    constants: &PhysicalConstants,
    coupling: f64,
) -> Result<CMat<f64>> {
    let (j, k) = rep_generators(rep, kind)?;
    let n = rep.dim();
    let id = CMat::<f64>::identity(n);
    let s = constants.hbar / constants.a;
    let shift = |g: &CMat<f64>, f: f64| g.scale(Cx::real(s)).sub(&id.scale(Cx::real(coupling * f)));
    let m: [CMat<f64>; 3] = std::array::from_fn(|i| shift(&j[i], h_field[i]));
    let b: [CMat<f64>; 3] = std::array::from_fn(|i| shift(&k[i], e_field[i]));
    Ok(square_triple(&m).sub(&square_triple(&b)))
}

/// Value, gradient and Hessian in x of each spinor component.
pub(crate) fn spinor_jet<C: SpinorCoefficients>(c: &C, x: &[f64; 4]) -> (Vec<C64>, Vec<[C64; 4]>, Vec<[[C64; 4]; 4]>) {
    let n = c.dim();
    let z = Cx::zero();
    let mut val = vec![z; n];
    let mut grad = vec![[z; 4]; n];
    let mut hess = vec![[[z; 4]; 4]; n];
    let x0 = lift::<f64, 4>(x);
    for mu in 0..4 {
        for nu in mu..4 {
            let r: Vec<Cx<Dual<Dual<f64>>>> = c.eval(&seed2(&x0, mu, nu));
            for s in 0..n {
                let v = r[s];
                val[s] = Cx::new(v.re.re.re, v.im.re.re);
                grad[s][mu] = Cx::new(v.re.re.eps, v.im.re.eps);
                grad[s][nu] = Cx::new(v.re.eps.re, v.im.eps.re);
                let h = Cx::new(v.re.eps.eps, v.im.eps.eps);
                hess[s][mu][nu] = h;
                hess[s][nu][mu] = h;
            }
        }
    }
    (val, grad, hess)
}

/// g^{μν}(−iħ∂_μ − eA_μ)(−iħ∂_ν − eA_ν) applied to each component of c(x).
pub fn kinetic_term<C: SpinorCoefficients>(c: &C, x: &[f64; 4], fields: &FieldConfig, constants: &PhysicalConstants) -> Vec<C64> {
    let (hb, e) = (constants.hbar, constants.e / constants.c);
    let a = fields.potential(x);
    let da: [[f64; 4]; 4] = std::array::from_fn(|mu| fields.potential_t(&seed(x, mu)).map(|v| v.eps));
    let (val, grad, hess) = spinor_jet(c, x);
    let i = Cx::i();
    (0..c.dim())
        .map(|s| {
            let mut acc = Cx::zero();
            for mu in 0..4 {
                let g = MINKOWSKI[mu];
                let term = hess[s][mu][mu].scale(-hb * hb)
                    + (i * val[s]).scale(hb * e * da[mu][mu])
                    + (i * grad[s][mu]).scale(2.0 * hb * e * a[mu])
                    + val[s].scale(e * e * a[mu] * a[mu]);
                acc += term.scale(g);
            }
            acc
        })
        .collect()
}

/// Left side of the coefficient equation for one block.
pub fn coefficient_residual<C: SpinorCoefficients>(
    field: &SpinorField<C>,
    kind: Chirality,
    x: &[f64; 4],
    fields: &FieldConfig,
    constants: &PhysicalConstants,
    coeffs: &ReductionCoefficients,
) -> Result<Vec<C64>> {
    let kin = kinetic_term(&field.coeffs, x, fields, constants);
    let c: Vec<C64> = field.coeffs.eval(x);
    let delta = delta_j(field.rep, kind, &fields.electric(x), &fields.magnetic(x), constants, coeffs.coupling)?;
    let dc = delta.apply(&c);
    let mass = constants.hbar * constants.hbar * constants.gamma2 * coeffs.curvature;
    Ok((0..c.len()).map(|s| kin[s] + c[s].scale(mass) + dc[s].scale(coeffs.nu)).collect())
}

/// First row of D(Λ⁻¹)·v.
fn contract_row(rep: SpinorRep, theta: &[f64; 6], v: &[C64]) -> C64 {
    let d = rep_matrix_inverse_t(rep, theta);
    (0..v.len()).fold(Cx::zero(), |acc, s| acc + d[(0, s)] * v[s])
}

/// The reduced prediction for the 10-D wave residual of a single block.
pub fn predicted_wave_residual<C: SpinorCoefficients>(
    field: &SpinorField<C>,
    q: &ConfigPoint,
    fields: &FieldConfig,
    constants: &PhysicalConstants,
    coeffs: &ReductionCoefficients,
) -> Result<C64> {
    let r = coefficient_residual(field, Chirality::Undotted, &q.x, fields, constants, coeffs)?;
    Ok(contract_row(field.rep, &q.theta.0, &r))
}

pub fn predicted_dirac_wave_residual<C1: SpinorCoefficients, C2: SpinorCoefficients>(
    field: &DiracField<C1, C2>,
    q: &ConfigPoint,
    fields: &FieldConfig,
    constants: &PhysicalConstants,
    coeffs: &ReductionCoefficients,
) -> Result<C64> {
    Ok(predicted_wave_residual(&field.upper, q, fields, constants, coeffs)?
        + predicted_wave_residual(&field.lower, q, fields, constants, coeffs)?)
}

/// 10-D operator on the expansion versus the reduced prediction at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReductionSample {
    pub full: C64,
    pub predicted: C64,
    pub psi: C64,
}

impl ReductionSample {
    pub fn relative_defect(&self) -> f64 {
        let scale = self.full.abs().max(self.predicted.abs()).max(self.psi.abs());
        (self.full - self.predicted).abs() / scale
    }
}

pub fn wave_setup(
    constants: &PhysicalConstants,
    sign: SignConvention,
    fields: &FieldConfig,
    r: f64,
) -> WaveSetup<crate::geometry::ConfigMetric, LiftedPotential, DIM> {
    WaveSetup::new(*constants, config_metric(constants, sign), LiftedPotential { fields: fields.clone(), a: constants.a })
        .with_curvature(r)
}

pub fn reduction_sample<F: ModeExpansion>(
    field: &F,
    predicted: C64,
    q: &ConfigPoint,
    setup: &WaveSetup<crate::geometry::ConfigMetric, LiftedPotential, DIM>,
) -> Result<ReductionSample> {
    let qa = q.to_array();
    Ok(ReductionSample { full: setup.wave_residual(field, &qa)?, predicted, psi: field.eval(&qa) })
}

/// Empirical reduction constants against the values the paper implies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// ν in −a²Δ_group D(Λ⁻¹) = ν·(J² − K²)·D(Λ⁻¹), least squares over points.
    pub c_casimir: f64,
    pub casimir_spread: f64,
    pub paper_casimir: f64,
    /// Computed scalar curvature R.
    pub c_curvature: f64,
    pub curvature_a2: f64,
    pub paper_curvature_a2: f64,
    pub curvature_deviation: f64,
    pub curvature_spread: f64,
    /// W(ψ)/ψ for a constant (0,1/2) spinor with no fields.
    pub mass_term_measured: f64,
    /// ħ²γ²R + (ħ/a)²·c_casimir·(3/2).
    pub mass_term_predicted: f64,
    pub closure_defect: f64,
    pub samples: usize,
}

struct DEntry {
    rep: SpinorRep,
    row: usize,
    col: usize,
}

impl ComplexField<DIM> for DEntry {
    fn eval<T: Scalar>(&self, q: &[T; DIM]) -> Cx<T> {
        let theta: [T; 6] = std::array::from_fn(|k| q[4 + k]);
        rep_matrix_inverse_t(self.rep, &theta)[(self.row, self.col)]
    }
}

pub fn reduction_calibration(
    constants: &PhysicalConstants,
    sign: SignConvention,
    samples: usize,
    seed_value: u64,
) -> Result<CalibrationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_value);
    let metric = config_metric(constants, sign);
    let rep = SpinorRep::new(0, 1)?;
    let cas = rep.casimir();
    let a2 = constants.a * constants.a;
    let points: Vec<ConfigPoint> = (0..samples.max(1)).map(|_| ConfigPoint::random(&mut rng)).collect();

    let mut pairs = Vec::new();
    let mut curvatures = Vec::new();
    for p in &points {
        let q = p.to_array();
        for row in 0..2 {
            for col in 0..2 {
                let f = DEntry { rep, row, col };
                let lap = laplace_beltrami_complex(&metric, &f, &q)?;
                pairs.push((f.eval(&q).scale(cas), lap.scale(-a2)));
            }
        }
        curvatures.push(curvature(&metric, &q)?.scalar);
    }
    // least-squares ν minimizing Σ|y − ν x|²
    let num: f64 = pairs.iter().map(|(x, y)| (x.conj() * *y).re).sum();
    let den: f64 = pairs.iter().map(|(x, _)| x.norm_sqr()).sum();
    let c_casimir = num / den;
    let casimir_spread = pairs
        .iter()
        .map(|(x, y)| (*y - x.scale(c_casimir)).abs() / x.abs().max(1e-300))
        .fold(0.0, f64::max);

    let r = curvatures.iter().sum::<f64>() / curvatures.len() as f64;
    let curvature_spread = curvatures.iter().map(|c| (c - r).abs()).fold(0.0, f64::max) / r.abs();
    let hb = constants.hbar;
    let mass_term_predicted = hb * hb * constants.gamma2 * r + hb * hb / a2 * c_casimir * cas;

    let setup = wave_setup(constants, sign, &FieldConfig::None, r);
    let field = SpinorField::new(rep, ConstantSpinor(vec![Cx::new(0.7, 0.1), Cx::new(-0.3, 0.5)]))?;
    let mut mass_term_measured = 0.0;
    let mut worst: f64 = 0.0;
    for p in &points {
        let q = p.to_array();
        let w = setup.wave_residual(&field, &q)?;
        let ratio = w / field.eval(&q);
        mass_term_measured = ratio.re;
        worst = worst.max((ratio - Cx::real(mass_term_predicted)).abs());
    }
    let closure_defect = worst / mass_term_predicted.abs();

    let paper_curvature_a2 = 6.0;
    Ok(CalibrationReport {
        c_casimir,
        casimir_spread,
        paper_casimir: 1.0,
        c_curvature: r,
        curvature_a2: r * a2,
        paper_curvature_a2,
        curvature_deviation: (r * a2 - paper_curvature_a2) / paper_curvature_a2,
        curvature_spread,
        mass_term_measured,
        mass_term_predicted,
        closure_defect,
        samples: points.len(),
    })
}
