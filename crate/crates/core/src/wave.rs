//! Hamilton–Jacobi and continuity residuals, the ψ map and the linear wave
//! operator that combines them.

use std::marker::PhantomData;

use crate::cx::{Cx, C64};
use crate::dual::{hessian, lift, seed, Dual, Scalar};
use crate::error::{Result, TopError};
use crate::geometry::{
    christoffel, complex_hessian, conformal_scale, curvature, invert, metric_jet, positive_weyl_factor,
    scalar_curvature, ComplexField, MetricField, PhysicalConstants, ScalarField, DIM,
};
use crate::weyl::weyl_scalar_curvature;

/// |ψ| below which the amplitude is treated as a node.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Covariant electromagnetic potential A_i on an N-dimensional space.
pub trait VectorPotential<const N: usize>: Sync {
    fn covector<T: Scalar>(&self, q: &[T; N]) -> [T; N];
}

impl<const N: usize, A: VectorPotential<N>> VectorPotential<N> for &A {
    fn covector<T: Scalar>(&self, q: &[T; N]) -> [T; N] {
        (**self).covector(q)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoPotential;

impl<const N: usize> VectorPotential<N> for NoPotential {
    fn covector<T: Scalar>(&self, _q: &[T; N]) -> [T; N] {
        [T::zero(); N]
    }
}

/// A_i + ∂_iΛ.
#[derive(Clone, Copy, Debug)]
pub struct GradientShift<A, L> {
    pub base: A,
    pub lambda: L,
}

impl<const N: usize, A: VectorPotential<N>, L: ScalarField<N>> VectorPotential<N> for GradientShift<A, L> {
    fn covector<T: Scalar>(&self, q: &[T; N]) -> [T; N] {
        let mut a = self.base.covector(q);
        for (k, ak) in a.iter_mut().enumerate() {
            *ak += self.lambda.eval(&seed(q, k)).eps;
        }
        a
    }
}

/// The action S and the Weyl factor χ.
#[derive(Clone, Copy, Debug)]
pub struct PotentialPair<S, C> {
    pub s: S,
    pub chi: C,
}

/// ψ = χ^{−(n−2)/2} e^{iS/ħ}.
#[derive(Clone, Copy, Debug)]
pub struct PsiFromPotentials<S, C> {
    pub pair: PotentialPair<S, C>,
    pub hbar: f64,
    pub exponent: f64,
}

impl<S, C> PsiFromPotentials<S, C> {
    pub fn new(s: S, chi: C, constants: PhysicalConstants) -> Self {
        PsiFromPotentials {
            pair: PotentialPair { s, chi },
            hbar: constants.hbar,
            exponent: constants.amplitude_exponent(),
        }
    }
}

impl<const N: usize, S: ScalarField<N>, C: ScalarField<N>> ComplexField<N> for PsiFromPotentials<S, C> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> Cx<T> {
        let amp = self.pair.chi.eval(q).powf(-self.exponent);
        Cx::expi(self.pair.s.eval(q) * (1.0 / self.hbar)).scale(amp)
    }
}

pub fn psi_from_potentials<S, C>(pair: PotentialPair<S, C>, constants: &PhysicalConstants) -> PsiFromPotentials<S, C> {
    PsiFromPotentials::new(pair.s, pair.chi, *constants)
}

/// Local potentials read back from ψ: χ and ∂S (S itself is only defined mod 2πħ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalPotentials<const N: usize> {
    pub chi: f64,
    pub grad_s: [f64; N],
}

pub fn potentials_from_psi<const N: usize, P: ComplexField<N>>(
    psi: &P,
    q: &[f64; N],
    constants: &PhysicalConstants,
) -> Result<LocalPotentials<N>> {
    let (val, grad) = crate::geometry::complex_gradient(psi, q);
    let amp = val.abs();
    if !(amp > AMPLITUDE_FLOOR) {
        return Err(TopError::ZeroAmplitude(amp));
    }
    let inv = val.inv();
    Ok(LocalPotentials {
        chi: amp.powf(-1.0 / constants.amplitude_exponent()),
        grad_s: grad.map(|g| constants.hbar * (g * inv).im),
    })
}

/// How the curvature term of the Hamilton–Jacobi residual is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CurvatureRoute {
    /// Scalar curvature of ḡ = χ⁻²g.
    #[default]
    Direct,
    /// χ² R_W(g, χ).
    Weyl,
}

/// Metric, potential and constants shared by the residual operators.
#[derive(Clone, Debug)]
pub struct WaveSetup<M, A, const N: usize = DIM> {
    pub constants: PhysicalConstants,
    pub metric: M,
    pub potential: A,
    /// Known constant scalar curvature of g; computed pointwise when `None`.
    pub curvature: Option<f64>,
    dim: PhantomData<[(); N]>,
}

impl<M, A, const N: usize> WaveSetup<M, A, N> {
    pub fn new(constants: PhysicalConstants, metric: M, potential: A) -> Self {
        WaveSetup { constants, metric, potential, curvature: None, dim: PhantomData }
    }

    pub fn with_curvature(mut self, r: f64) -> Self {
        self.curvature = Some(r);
        self
    }
}

impl<const N: usize, M: MetricField<N>, A: VectorPotential<N>> WaveSetup<M, A, N> {
    fn curvature_at(&self, q: &[f64; N]) -> Result<f64> {
        match self.curvature {
            Some(r) => Ok(r),
            None => scalar_curvature(&self.metric, q),
        }
    }

    /// π_i = ∂_iS − eA_i and ∂_iπ_j.
    fn momentum_jet<S: ScalarField<N>>(&self, s: &S, q: &[f64; N]) -> ([f64; N], [[f64; N]; N]) {
        let e = self.constants.e;
        let (_, ds, hs) = hessian(q, |p| s.eval(p));
        let a = self.potential.covector(q);
        let pi = std::array::from_fn(|i| ds[i] - e * a[i]);
        let mut dpi = hs;
        for i in 0..N {
            let da = self.potential.covector(&seed(&lift::<f64, N>(q), i));
            for j in 0..N {
                dpi[i][j] -= e * da[j].eps;
            }
        }
        (pi, dpi)
    }

    /// ḡ^{ij}π_iπ_j + ħ²γ²R̄, the difference of the two sides of the Hamilton–Jacobi equation.
    pub fn hj_residual<S: ScalarField<N>, C: ScalarField<N>>(
        &self,
        pair: &PotentialPair<S, C>,
        q: &[f64; N],
    ) -> Result<f64> {
        self.hj_residual_via(pair, q, CurvatureRoute::Direct)
    }

    pub fn hj_residual_via<S: ScalarField<N>, C: ScalarField<N>>(
        &self,
        pair: &PotentialPair<S, C>,
        q: &[f64; N],
        route: CurvatureRoute,
    ) -> Result<f64> {
        let chi = positive_weyl_factor(&pair.chi, q)?;
        let (ginv, _) = invert(&self.metric.metric(q))?;
        let (pi, _) = self.momentum_jet(&pair.s, q);
        let r_bar = match route {
            CurvatureRoute::Direct => curvature(&conformal_scale(&self.metric, &pair.chi), q)?.scalar,
            CurvatureRoute::Weyl => chi * chi * weyl_scalar_curvature(&self.metric, &pair.chi, q)?.value(),
        };
        let mut kin = 0.0;
        for i in 0..N {
            for j in 0..N {
                kin += ginv[i][j] * pi[i] * pi[j];
            }
        }
        let k = &self.constants;
        Ok(chi * chi * kin + k.hbar * k.hbar * k.gamma2 * r_bar)
    }

    /// ∇̄_i(ḡ^{ij}π_j) with the Levi-Civita connection of ḡ.
    pub fn continuity_residual<S: ScalarField<N>, C: ScalarField<N>>(
        &self,
        pair: &PotentialPair<S, C>,
        q: &[f64; N],
    ) -> Result<f64> {
        positive_weyl_factor(&pair.chi, q)?;
        let bar = conformal_scale(&self.metric, &pair.chi);
        let jet = metric_jet(&bar, q)?;
        let gamma = christoffel(&bar, q)?;
        let (pi, dpi) = self.momentum_jet(&pair.s, q);
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                let gij = jet.ginv[i][j];
                if gij == 0.0 {
                    continue;
                }
                let mut t = dpi[i][j];
                for k in 0..N {
                    t -= gamma[k][i][j] * pi[k];
                }
                acc += gij * t;
            }
        }
        Ok(acc)
    }

    /// g^{ij}(−iħ∇_i − eA_i)(−iħ∇_j − eA_j)ψ + ħ²γ²Rψ.
    pub fn wave_residual<P: ComplexField<N>>(&self, psi: &P, q: &[f64; N]) -> Result<C64> {
        let k = &self.constants;
        let (hb, e) = (k.hbar, k.e);
        let jet = metric_jet(&self.metric, q)?;
        let gamma = christoffel(&self.metric, q)?;
        let (val, grad, hess) = complex_hessian(psi, q);
        let a = self.potential.covector(q);
        let da: [[f64; N]; N] =
            std::array::from_fn(|i| self.potential.covector(&seed(&lift::<f64, N>(q), i)).map(|v| v.eps));
        let mut lap = Cx::zero();
        let mut div_a = 0.0;
        let mut a_grad = Cx::zero();
        let mut a2 = 0.0;
        for i in 0..N {
            for j in 0..N {
                let gij = jet.ginv[i][j];
                if gij == 0.0 {
                    continue;
                }
                let mut h = hess[i][j];
                let mut d = da[i][j];
                for l in 0..N {
                    h = h - grad[l].scale(gamma[l][i][j]);
                    d -= gamma[l][i][j] * a[l];
                }
                lap += h.scale(gij);
                div_a += gij * d;
                a_grad += grad[j].scale(gij * a[i]);
                a2 += gij * a[i] * a[j];
            }
        }
        let r = self.curvature_at(q)?;
        let i = Cx::i();
        Ok(lap.scale(-hb * hb)
            + (i * val).scale(hb * e * div_a)
            + (i * a_grad).scale(2.0 * hb * e)
            + val.scale(e * e * a2 + hb * hb * k.gamma2 * r))
    }

    /// j^i = g^{ij}(ħ Im(ψ* ∂_jψ) − eA_j|ψ|²), with the imaginary part of the
    /// symmetrized assembly returned alongside.
    pub fn current<P: ComplexField<N>>(&self, psi: &P, q: &[f64; N]) -> Result<CurrentSample<N>> {
        let (j, im) = current_t(&self.constants, &self.metric, &self.potential, psi, q)?;
        Ok(CurrentSample { j, imaginary_part: im })
    }

    /// (1/√|g|) ∂_i(√|g| j^i).
    pub fn current_divergence<P: ComplexField<N>>(&self, psi: &P, q: &[f64; N]) -> Result<f64> {
        let j = self.current(psi, q)?.j;
        let gamma = christoffel(&self.metric, q)?;
        let mut div = 0.0;
        for i in 0..N {
            let (ji, _) = current_t(&self.constants, &self.metric, &self.potential, psi, &seed(&lift::<f64, N>(q), i))?;
            div += ji[i].eps;
            for k in 0..N {
                div += gamma[k][k][i] * j[i];
            }
        }
        Ok(div)
    }

    /// e^{−iS/ħ}χ⁴·W(ψ) − χ⁻²(hj − iħ·cont) for ψ built from the pair.
    pub fn madelung_defect<S: ScalarField<N>, C: ScalarField<N>>(
        &self,
        pair: &PotentialPair<S, C>,
        q: &[f64; N],
    ) -> Result<MadelungSample> {
        let k = &self.constants;
        let psi = PsiFromPotentials { pair: PotentialPair { s: &pair.s, chi: &pair.chi }, hbar: k.hbar, exponent: k.amplitude_exponent() };
        let chi = positive_weyl_factor(&pair.chi, q)?;
        let w = self.wave_residual(&psi, q)?;
        let lhs = (Cx::expi(-pair.s.eval(q) / k.hbar) * w).scale(chi.powf(k.amplitude_exponent()));
        let hj = self.hj_residual(pair, q)?;
        let cont = self.continuity_residual(pair, q)?;
        let rhs = Cx::new(hj, -k.hbar * cont).scale(chi.powi(MADELUNG_CHI_POWER));
        Ok(MadelungSample { lhs, rhs, hj, cont })
    }
}

/// Power of χ relating the reduced wave residual to the Hamilton–Jacobi and
/// continuity residuals.
pub const MADELUNG_CHI_POWER: i32 = -2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MadelungSample {
    pub lhs: C64,
    pub rhs: C64,
    pub hj: f64,
    pub cont: f64,
}

impl MadelungSample {
    /// |lhs − rhs| / max(|lhs|, |rhs|, 1).
    pub fn relative_defect(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurrentSample<const N: usize> {
    pub j: [f64; N],
    /// Imaginary part of ½[ψ* g^{ij}(−iħ∂_j − eA_j)ψ + c.c.]; zero by construction.
    pub imaginary_part: f64,
}

fn current_t<T: Scalar, const N: usize, M: MetricField<N>, A: VectorPotential<N>, P: ComplexField<N>>(
    constants: &PhysicalConstants,
    metric: &M,
    potential: &A,
    psi: &P,
    q: &[T; N],
) -> Result<([T; N], f64)> {
    let (ginv, _) = invert(&metric.metric(q))?;
    let a = potential.covector(q);
    let val: Cx<T> = psi.eval(q);
    let mut cov: [Cx<T>; N] = [Cx::zero(); N];
    for k in 0..N {
        let r: Cx<Dual<T>> = psi.eval(&seed(q, k));
        let d = Cx::new(r.re.eps, r.im.eps);
        // ψ*(−iħ∂_k − eA_k)ψ
        cov[k] = val.conj() * (Cx::new(d.im, -d.re).scale_f(constants.hbar) - val.scale(a[k] * constants.e));
    }
    let mut j = [T::zero(); N];
    let mut im: f64 = 0.0;
    for i in 0..N {
        let mut z = Cx::zero();
        for k in 0..N {
            z += cov[k].scale(ginv[i][k]);
        }
        // ½(z + z̄)
        let sym = (z + z.conj()).scale_f(0.5);
        j[i] = sym.re;
        im = im.max(sym.im.value().abs());
    }
    Ok((j, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{config_metric, ConfigPoint, ConstantField, FlatMetric, Polynomial, DIM};
    use crate::lorentz::SignConvention;
    use crate::spin::fields::{FieldConfig, LiftedPotential};
    use crate::weyl::{gauge_transform, GaugedFactor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constants() -> PhysicalConstants {
        PhysicalConstants::natural(1.0, 0.7, 1.0)
    }

    fn setup(fields: FieldConfig) -> WaveSetup<crate::geometry::ConfigMetric, LiftedPotential, DIM> {
        let k = constants();
        WaveSetup::new(k, config_metric(&k, SignConvention::default()), LiftedPotential { fields, a: k.a })
    }

    fn random_pair(rng: &mut ChaCha8Rng) -> PotentialPair<Polynomial<DIM>, Polynomial<DIM>> {
        PotentialPair { s: Polynomial::random_cubic(rng, 0.0, 0.5), chi: Polynomial::random_quadratic(rng, 1.5, 0.1) }
    }

    #[test]
    fn psi_map_basics() {
        let k = constants();
        let q = [0.1; DIM];
        let one = PsiFromPotentials::new(ConstantField(0.0), ConstantField(1.0), k);
        assert_eq!(ComplexField::<DIM>::eval(&one, &q), Cx::one());
        let two = PsiFromPotentials::new(ConstantField(0.0), ConstantField(2.0), k);
        assert!((ComplexField::<DIM>::eval(&two, &q).abs() - 1.0 / 16.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pair = random_pair(&mut rng);
        let q = ConfigPoint::random(&mut rng).to_array();
        let psi = psi_from_potentials(pair.clone(), &k);
        let back = potentials_from_psi(&psi, &q, &k).unwrap();
        assert!((back.chi - pair.chi.eval(&q)).abs() < 1e-12);
        let ds = crate::dual::gradient(&q, |p| pair.s.eval(p));
        for i in 0..DIM {
            assert!((back.grad_s[i] - ds[i]).abs() < 1e-12);
        }
        let zero = PsiFromPotentials::new(ConstantField(0.0), ConstantField(1e20), k);
        assert!(matches!(potentials_from_psi(&zero, &q, &k), Err(TopError::ZeroAmplitude(_))));
    }

    #[test]
    fn trivial_residuals() {
        let w = setup(FieldConfig::None);
        let k = w.constants;
        let q = [0.2; DIM];
        let r = scalar_curvature(&w.metric, &q).unwrap();
        let res = w.wave_residual(&PsiFromPotentials::new(ConstantField(0.0), ConstantField(1.0), k), &q).unwrap();
        assert!((res - Cx::real(k.gamma2 * r)).abs() < 1e-12);
        let pair = PotentialPair { s: ConstantField(0.0), chi: ConstantField(1.0) };
        assert!((w.hj_residual(&pair, &q).unwrap() - k.gamma2 * r).abs() < 1e-10);
        // linear S on flat space has no divergence
        let flat = WaveSetup::new(k, FlatMetric([-1.0, 1.0, 1.0, 1.0]), NoPotential);
        let lin = Polynomial::<4> { terms: vec![(0.3, vec![1, 0, 0, 0]), (-0.2, vec![0, 0, 1, 0])] };
        let pair = PotentialPair { s: lin, chi: ConstantField(1.0) };
        assert!(flat.continuity_residual(&pair, &[0.5, 0.1, 0.2, 0.3]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn madelung_identity_holds_and_needs_conformal_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = setup(FieldConfig::Uniform { e: [0.1, 0.0, -0.2], h: [0.05, 0.3, 0.0] });
        let mut bad = setup(FieldConfig::Uniform { e: [0.1, 0.0, -0.2], h: [0.05, 0.3, 0.0] });
        bad.constants.gamma2 = 0.25;
        for _ in 0..3 {
            let pair = random_pair(&mut rng);
            let q = ConfigPoint::random(&mut rng).to_array();
            let s = w.madelung_defect(&pair, &q).unwrap();
            assert!(s.relative_defect() < 1e-8, "{s:?}");
            assert!(bad.madelung_defect(&pair, &q).unwrap().relative_defect() > 1e-3);
        }
    }

    #[test]
    fn hj_routes_agree_and_residuals_are_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = setup(FieldConfig::Uniform { e: [0.0, 0.2, 0.1], h: [0.1, 0.0, 0.2] });
        let pair = random_pair(&mut rng);
        let q = ConfigPoint::random(&mut rng).to_array();
        let direct = w.hj_residual(&pair, &q).unwrap();
        let weyl = w.hj_residual_via(&pair, &q, CurvatureRoute::Weyl).unwrap();
        assert!((direct - weyl).abs() < 1e-8);

        let rho = Polynomial::<DIM>::random_quadratic(&mut rng, 1.2, 0.1);
        let (m2, chi2): (_, GaugedFactor<_, _>) = gauge_transform(&w.metric, &pair.chi, &rho);
        let w2 = WaveSetup::new(w.constants, m2, w.potential.clone());
        let pair2 = PotentialPair { s: pair.s.clone(), chi: chi2 };
        assert!((w2.hj_residual(&pair2, &q).unwrap() - direct).abs() < 1e-8);
        let c1 = w.continuity_residual(&pair, &q).unwrap();
        let c2 = w2.continuity_residual(&pair2, &q).unwrap();
        assert!((c1 - c2).abs() < 1e-8);

        // electromagnetic gauge: S → S + eΛ, A → A + ∂Λ
        let lambda = Polynomial::<DIM>::random_quadratic(&mut rng, 0.0, 0.3);
        let e = w.constants.e;
        let shifted_s = Polynomial { terms: pair.s.terms.iter().cloned().chain(lambda.terms.iter().map(|(c, p)| (c * e, p.clone()))).collect() };
        let w3 = WaveSetup::new(w.constants, w.metric, GradientShift { base: w.potential.clone(), lambda: lambda.clone() });
        let pair3 = PotentialPair { s: shifted_s, chi: pair.chi.clone() };
        assert!((w3.hj_residual(&pair3, &q).unwrap() - direct).abs() < 1e-8);
        assert!((w3.continuity_residual(&pair3, &q).unwrap() - c1).abs() < 1e-8);
    }

    #[test]
    fn current_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = setup(FieldConfig::Uniform { e: [0.2, 0.0, 0.0], h: [0.0, 0.0, 0.3] });
        let k = w.constants;
        let pair = random_pair(&mut rng);
        let q = ConfigPoint::random(&mut rng).to_array();
        let psi = psi_from_potentials(pair, &k);
        let c = w.current(&psi, &q).unwrap();
        assert!(c.imaginary_part < 1e-14);
        // ∇·j = −Im(ψ* W ψ)/ħ for any ψ
        let div = w.current_divergence(&psi, &q).unwrap();
        let wpsi = w.wave_residual(&psi, &q).unwrap();
        let val = ComplexField::<DIM>::eval(&psi, &q);
        let expect = -(val.conj() * wpsi).im / k.hbar;
        assert!((div - expect).abs() < 1e-9 * (1.0 + expect.abs()));
        // real ψ, no potential: no current
        let free = setup(FieldConfig::None);
        let real = PsiFromPotentials::new(ConstantField(0.0), Polynomial::<DIM>::random_quadratic(&mut rng, 1.5, 0.1), k);
        assert!(free.current(&real, &q).unwrap().j.iter().all(|v| v.abs() < 1e-15));
    }
}
