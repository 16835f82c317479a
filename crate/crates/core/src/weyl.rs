//! Weyl conformal geometry over a metric g and a Weyl factor χ.

use crate::cx::{Cx, C64};
use crate::dual::{lift, seed, Dual, Scalar};
use crate::error::{Result, TopError};
use crate::geometry::{
    christoffel, conformal_scale, curvature, laplace_beltrami, metric_jet, positive_weyl_factor,
    scalar_curvature, ComplexField, MetricField, PhysicalConstants, ScalarField, Tensor2, Tensor3,
};

/// φ_i = ∂_i ln χ.
#[derive(Clone, Copy, Debug)]
pub struct WeylPotential<F> {
    pub chi: F,
}

impl<F> WeylPotential<F> {
    pub fn from_factor(chi: F) -> Self {
        WeylPotential { chi }
    }

    pub fn eval_t<T: Scalar, const N: usize>(&self, q: &[T; N]) -> [T; N]
    where
        F: ScalarField<N>,
    {
        std::array::from_fn(|k| {
            let v = self.chi.eval(&seed(q, k));
            v.eps / v.re
        })
    }

    pub fn eval<const N: usize>(&self, q: &[f64; N]) -> [f64; N]
    where
        F: ScalarField<N>,
    {
        self.eval_t(q)
    }

    /// max |∂_i φ_j − ∂_j φ_i|.
    pub fn curl_defect<const N: usize>(&self, q: &[f64; N]) -> f64
    where
        F: ScalarField<N>,
    {
        let d: [[f64; N]; N] = std::array::from_fn(|i| self.eval_t(&seed(&lift::<f64, N>(q), i)).map(|v| v.eps));
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((d[i][j] - d[j][i]).abs());
            }
        }
        worst
    }
}

struct LnField<F>(F);

impl<const N: usize, F: ScalarField<N>> ScalarField<N> for LnField<F> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> T {
        self.0.eval(q).ln()
    }
}

/// Γ^i_{jk} = {i jk} − δ^i_j φ_k − δ^i_k φ_j + g_{jk} φ^i: the Levi-Civita
/// connection of χ⁻² g, whose curvature contracted with g is R_W.
pub fn weyl_connection_t<T: Scalar, const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    phi: &WeylPotential<F>,
    q: &[T; N],
) -> Result<Tensor3<T, N>> {
    let jet = metric_jet(metric, q)?;
    let lc = crate::geometry::christoffel_t(metric, q)?;
    let p = phi.eval_t(q);
    let mut p_up = [T::zero(); N];
    for i in 0..N {
        for l in 0..N {
            p_up[i] += jet.ginv[i][l] * p[l];
        }
    }
    let mut out = lc;
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                let mut v = out[i][j][k] + jet.g[j][k] * p_up[i];
                if i == j {
                    v -= p[k];
                }
                if i == k {
                    v -= p[j];
                }
                out[i][j][k] = v;
            }
        }
    }
    Ok(out)
}

pub fn weyl_connection<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    phi: &WeylPotential<F>,
    q: &[f64; N],
) -> Result<Tensor3<f64, N>> {
    weyl_connection_t(metric, phi, q)
}

/// g^{jl} Ric_{jl} of the Weyl connection, assembled from the connection itself.
pub fn connection_scalar_curvature<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    phi: &WeylPotential<F>,
    q: &[f64; N],
) -> Result<f64> {
    let gamma = weyl_connection(metric, phi, q)?;
    let mut dgamma = vec![[[[0.0; N]; N]; N]; N];
    for k in 0..N {
        let gk: Tensor3<Dual<f64>, N> = weyl_connection_t(metric, phi, &seed(&lift::<f64, N>(q), k))?;
        for i in 0..N {
            for j in 0..N {
                for l in 0..N {
                    dgamma[k][i][j][l] = gk[i][j][l].eps;
                }
            }
        }
    }
    let (ginv, _) = crate::geometry::invert(&metric.metric(q))?;
    // Ric_{jl} = R^i_{jil}, R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}
    let mut r = 0.0;
    for j in 0..N {
        for l in 0..N {
            if ginv[j][l] == 0.0 {
                continue;
            }
            let mut ric = 0.0;
            for i in 0..N {
                ric += dgamma[i][i][l][j] - dgamma[l][i][i][j];
                for m in 0..N {
                    ric += gamma[i][i][m] * gamma[m][l][j] - gamma[i][l][m] * gamma[m][i][j];
                }
            }
            r += ginv[j][l] * ric;
        }
    }
    Ok(r)
}

/// Both forms of the Weyl scalar curvature at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylScalar {
    /// R + 2(n−1) Δχ/χ − n(n−1) |∇χ|²/χ².
    pub chi_form: f64,
    /// R + 2(n−1) ∇_kφ^k − (n−1)(n−2) φ_kφ^k.
    pub phi_form: f64,
    /// R + 2(n−1) ∇_kφ^k − (n−1) φ_kφ^k, the coefficient as printed.
    pub printed_phi_form: f64,
    /// Plain scalar curvature of g.
    pub r: f64,
}

impl WeylScalar {
    pub fn value(&self) -> f64 {
        self.chi_form
    }

    pub fn form_disagreement(&self) -> f64 {
        (self.chi_form - self.phi_form).abs()
    }
}

pub fn weyl_scalar_curvature<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    chi: &F,
    q: &[f64; N],
) -> Result<WeylScalar> {
    let chi_v = positive_weyl_factor(chi, q)?;
    let n = N as f64;
    let r = scalar_curvature(metric, q)?;
    let jet = metric_jet(metric, q)?;
    let grad = crate::dual::gradient(q, |p| chi.eval(p));
    let mut grad2 = 0.0;
    for i in 0..N {
        for j in 0..N {
            grad2 += jet.ginv[i][j] * grad[i] * grad[j];
        }
    }
    let lap = laplace_beltrami(metric, chi, q)?;
    let div_phi = laplace_beltrami(metric, &LnField(chi), q)?;
    let phi2 = grad2 / (chi_v * chi_v);
    Ok(WeylScalar {
        chi_form: r + 2.0 * (n - 1.0) * lap / chi_v - n * (n - 1.0) * phi2,
        phi_form: r + 2.0 * (n - 1.0) * div_phi - (n - 1.0) * (n - 2.0) * phi2,
        printed_phi_form: r + 2.0 * (n - 1.0) * div_phi - (n - 1.0) * phi2,
        r,
    })
}

/// D_i f = ∂_i f − 2w φ_i f for a scalar field of Weyl weight w.
pub fn co_covariant_derivative_scalar<const N: usize, F: ScalarField<N>, P: ComplexField<N>>(
    phi: &WeylPotential<F>,
    f: &P,
    weight: f64,
    q: &[f64; N],
) -> [C64; N] {
    let (val, grad) = crate::geometry::complex_gradient(f, q);
    let p = phi.eval(q);
    std::array::from_fn(|i| grad[i] - val.scale(2.0 * weight * p[i]))
}

/// D_i h_{jk} = ∂_i h_{jk} − Γ^l_{ij} h_{lk} − Γ^l_{ik} h_{jl} − 2w φ_i h_{jk} with the
/// Weyl connection of (g, φ), for a covariant 2-tensor field h of weight w.
pub fn co_covariant_derivative_tensor<const N: usize, M: MetricField<N>, H: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    phi: &WeylPotential<F>,
    h: &H,
    weight: f64,
    q: &[f64; N],
) -> Result<Tensor3<f64, N>> {
    let gamma = weyl_connection(metric, phi, q)?;
    let hjet = metric_jet(h, q)?;
    let p = phi.eval(q);
    let mut out = [[[0.0; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                let mut v = hjet.dg[i][j][k] - 2.0 * weight * p[i] * hjet.g[j][k];
                for l in 0..N {
                    v -= gamma[l][i][j] * hjet.g[l][k] + gamma[l][i][k] * hjet.g[j][l];
                }
                out[i][j][k] = v;
            }
        }
    }
    Ok(out)
}

/// ρ g.
#[derive(Clone, Copy, Debug)]
pub struct GaugedMetric<M, R> {
    pub base: M,
    pub rho: R,
}

impl<const N: usize, M: MetricField<N>, R: ScalarField<N>> MetricField<N> for GaugedMetric<M, R> {
    fn metric<T: Scalar>(&self, q: &[T; N]) -> Tensor2<T, N> {
        let r = self.rho.eval(q);
        self.base.metric(q).map(|row| row.map(|v| v * r))
    }
}

/// ρ^{1/2} χ.
#[derive(Clone, Copy, Debug)]
pub struct GaugedFactor<F, R> {
    pub chi: F,
    pub rho: R,
}

impl<const N: usize, F: ScalarField<N>, R: ScalarField<N>> ScalarField<N> for GaugedFactor<F, R> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> T {
        self.chi.eval(q) * self.rho.eval(q).sqrt()
    }
}

/// ψ of Weyl weight w under ρ: ρ^w ψ.
#[derive(Clone, Copy, Debug)]
pub struct GaugedWave<P, R> {
    pub psi: P,
    pub rho: R,
    pub weight: f64,
}

impl<const N: usize, P: ComplexField<N>, R: ScalarField<N>> ComplexField<N> for GaugedWave<P, R> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> Cx<T> {
        self.psi.eval(q).scale(self.rho.eval(q).powf(self.weight))
    }
}

/// g → ρ g, χ → ρ^{1/2} χ (so χ⁻² g is untouched).
pub fn gauge_transform<M: Clone, F: Clone, R: Clone>(
    metric: &M,
    chi: &F,
    rho: &R,
) -> (GaugedMetric<M, R>, GaugedFactor<F, R>) {
    (
        GaugedMetric { base: metric.clone(), rho: rho.clone() },
        GaugedFactor { chi: chi.clone(), rho: rho.clone() },
    )
}

pub fn check_gauge<const N: usize, R: ScalarField<N>>(rho: &R, q: &[f64; N]) -> Result<f64> {
    let v = rho.eval(q);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(TopError::NonpositiveGauge(v))
    }
}

/// Both integrand forms of the quantum Lagrangian at (q, q̇).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumLagrangian {
    /// −γ² R̄ ḡ_ij q̇^i q̇^j.
    pub radicand_eq4: f64,
    /// R_W g_ij q̇^i q̇^j.
    pub radicand_eq16: f64,
    /// −ħ √radicand, `None` for a negative radicand.
    pub value_eq4: Option<f64>,
    pub value_eq16: Option<f64>,
    pub r_bar: f64,
}

impl QuantumLagrangian {
    pub fn radicand_ratio(&self) -> f64 {
        self.radicand_eq16 / self.radicand_eq4
    }

    /// The Eq.-(4) form, or `ImaginaryRadicand`.
    pub fn eq4(&self) -> Result<f64> {
        self.value_eq4.ok_or(TopError::ImaginaryRadicand(self.radicand_eq4))
    }
}

pub fn lagrangian_quantum<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    constants: &PhysicalConstants,
    metric: &M,
    chi: &F,
    q: &[f64; N],
    qdot: &[f64; N],
) -> Result<QuantumLagrangian> {
    let chi_v = positive_weyl_factor(chi, q)?;
    let bar = conformal_scale(metric, chi);
    let r_bar = curvature(&bar, q)?.scalar;
    let rw = weyl_scalar_curvature(metric, chi, q)?.value();
    let g = metric.metric(q);
    let mut quad = 0.0;
    for i in 0..N {
        for j in 0..N {
            quad += g[i][j] * qdot[i] * qdot[j];
        }
    }
    let radicand_eq4 = -constants.gamma2 * r_bar * quad / (chi_v * chi_v);
    let radicand_eq16 = rw * quad;
    let value = |r: f64| (r >= 0.0).then(|| -constants.hbar * r.sqrt());
    Ok(QuantumLagrangian {
        radicand_eq4,
        radicand_eq16,
        value_eq4: value(radicand_eq4),
        value_eq16: value(radicand_eq16),
        r_bar,
    })
}

/// Levi-Civita of g, exposed for symmetry with [`weyl_connection`].
pub fn levi_civita<const N: usize, M: MetricField<N>>(metric: &M, q: &[f64; N]) -> Result<Tensor3<f64, N>> {
    christoffel(metric, q)
}
