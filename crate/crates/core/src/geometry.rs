//! Tensor calculus on the configuration space M₄ × SO(3,1).
//!
//! Metrics and scalar fields are generic over [`Scalar`], so Christoffel
//! symbols come from one dual layer and their derivatives from a second one.
//! A central-difference path is kept for cross-checking only.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cx::{Cx, C64};
use crate::dual::{lift, seed, seed2, Dual, Scalar};
use crate::error::{Result, TopError};
use crate::lorentz::{generators4, group_metric_t, EulerAngles, SignConvention, MINKOWSKI};

/// Dimension of the configuration space.
pub const DIM: usize = 10;

pub type Tensor2<T, const N: usize> = [[T; N]; N];
pub type Tensor3<T, const N: usize> = [[[T; N]; N]; N];

/// q = (x^μ, θ^α).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint {
    pub x: [f64; 4],
    pub theta: EulerAngles,
}

impl ConfigPoint {
    pub fn new(x: [f64; 4], theta: [f64; 6]) -> Self {
        ConfigPoint { x, theta: EulerAngles(theta) }
    }

    pub fn to_array(&self) -> [f64; DIM] {
        let mut q = [0.0; DIM];
        q[..4].copy_from_slice(&self.x);
        q[4..].copy_from_slice(&self.theta.0);
        q
    }

    pub fn from_array(q: &[f64; DIM]) -> Self {
        ConfigPoint::new([q[0], q[1], q[2], q[3]], [q[4], q[5], q[6], q[7], q[8], q[9]])
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.iter().all(|v| v.is_finite()) {
            self.theta.validate()
        } else {
            Err(TopError::Domain(format!("non-finite space-time point {:?}", self.x)))
        }
    }

    /// Points with |x| ≤ 1 and rotation/boost angles in ±0.8, well inside the chart.
    pub fn random(rng: &mut impl Rng) -> Self {
        ConfigPoint::new(
            std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
            std::array::from_fn(|_| rng.gen_range(-0.8..0.8)),
        )
    }
}

/// ħ, c, m, e, a and the curvature coupling γ² in natural units (ħ = c = 1 by default).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
    pub e: f64,
    pub a: f64,
    pub gamma2: f64,
    pub n: u32,
}

impl PhysicalConstants {
    /// γ² = (n − 2) / (4(n − 1)).
    pub fn conformal_gamma2(n: u32) -> f64 {
        (n as f64 - 2.0) / (4.0 * (n as f64 - 1.0))
    }

    /// Natural units with a given mass, charge and top length.
    pub fn natural(m: f64, e: f64, a: f64) -> Self {
        PhysicalConstants { hbar: 1.0, c: 1.0, m, e, a, gamma2: Self::conformal_gamma2(DIM as u32), n: DIM as u32 }
    }

    /// Exponent k in |ψ| = χ^{−k}, k = (n − 2)/2.
    pub fn amplitude_exponent(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }
}

pub trait MetricField<const N: usize>: Sync {
    fn metric<T: Scalar>(&self, q: &[T; N]) -> Tensor2<T, N>;
}

pub trait ScalarField<const N: usize>: Sync {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> T;
}

pub trait ComplexField<const N: usize>: Sync {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> Cx<T>;
}

impl<const N: usize, M: MetricField<N>> MetricField<N> for &M {
    fn metric<T: Scalar>(&self, q: &[T; N]) -> Tensor2<T, N> {
        (**self).metric(q)
    }
}

impl<const N: usize, F: ScalarField<N>> ScalarField<N> for &F {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> T {
        (**self).eval(q)
    }
}

impl<const N: usize, F: ComplexField<N>> ComplexField<N> for &F {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> Cx<T> {
        (**self).eval(q)
    }
}

/// Minkowski ⊕ trace-form group metric; independent of x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigMetric {
    pub a: f64,
    pub sign: SignConvention,
}

pub fn config_metric(constants: &PhysicalConstants, sign: SignConvention) -> ConfigMetric {
    ConfigMetric { a: constants.a, sign }
}

impl MetricField<DIM> for ConfigMetric {
    fn metric<T: Scalar>(&self, q: &[T; DIM]) -> Tensor2<T, DIM> {
        let theta: [T; 6] = std::array::from_fn(|k| q[4 + k]);
        let group = group_metric_t(&theta, self.a, self.sign);
        let mut g = [[T::zero(); DIM]; DIM];
        for mu in 0..4 {
            g[mu][mu] = T::cst(MINKOWSKI[mu]);
        }
        for i in 0..6 {
            for j in 0..6 {
                g[4 + i][4 + j] = group[i][j];
            }
        }
        g
    }
}

/// ḡ = χ⁻² g.
#[derive(Clone, Copy, Debug)]
pub struct ConformalMetric<M, F> {
    pub base: M,
    pub chi: F,
}

pub fn conformal_scale<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: M,
    chi: F,
) -> ConformalMetric<M, F> {
    ConformalMetric { base: metric, chi }
}

impl<M, F> ConformalMetric<M, F> {
    /// Fails with `NonpositiveWeylFactor` where χ ≤ 0.
    pub fn check<const N: usize>(&self, q: &[f64; N]) -> Result<()>
    where
        F: ScalarField<N>,
    {
        positive_weyl_factor(&self.chi, q).map(|_| ())
    }
}

impl<const N: usize, M: MetricField<N>, F: ScalarField<N>> MetricField<N> for ConformalMetric<M, F> {
    fn metric<T: Scalar>(&self, q: &[T; N]) -> Tensor2<T, N> {
        let w = self.chi.eval(q).powi(-2);
        self.base.metric(q).map(|row| row.map(|v| v * w))
    }
}

pub fn positive_weyl_factor<const N: usize, F: ScalarField<N>>(chi: &F, q: &[f64; N]) -> Result<f64> {
    let v = chi.eval(q);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(TopError::NonpositiveWeylFactor(v))
    }
}

/// Flat metric diag(signs).
#[derive(Clone, Copy, Debug)]
pub struct FlatMetric<const N: usize>(pub [f64; N]);

impl<const N: usize> MetricField<N> for FlatMetric<N> {
    fn metric<T: Scalar>(&self, _q: &[T; N]) -> Tensor2<T, N> {
        std::array::from_fn(|i| std::array::from_fn(|j| T::cst(if i == j { self.0[i] } else { 0.0 })))
    }
}

/// Round 2-sphere of radius r in (polar, azimuth) coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Sphere2 {
    pub radius: f64,
}

impl MetricField<2> for Sphere2 {
    fn metric<T: Scalar>(&self, q: &[T; 2]) -> Tensor2<T, 2> {
        let r2 = self.radius * self.radius;
        let s = q[0].sin();
        [[T::cst(r2), T::zero()], [T::zero(), s * s * r2]]
    }
}

/// Sum of monomials c · Π q_k^{e_k}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<const N: usize> {
    pub terms: Vec<(f64, Vec<u8>)>,
}

impl<const N: usize> Polynomial<N> {
    pub fn constant(c: f64) -> Self {
        Polynomial { terms: vec![(c, vec![0; N])] }
    }

    /// c₀ + Σ c_i q_i + Σ_{i≤j} c_ij q_i q_j with c ∈ scale·[−1, 1].
    pub fn random_quadratic(rng: &mut impl Rng, offset: f64, scale: f64) -> Self {
        let mut terms = vec![(offset, vec![0u8; N])];
        for i in 0..N {
            let mut e = vec![0u8; N];
            e[i] = 1;
            terms.push((scale * rng.gen_range(-1.0..1.0), e));
            for j in i..N {
                let mut e = vec![0u8; N];
                e[i] += 1;
                e[j] += 1;
                terms.push((scale * rng.gen_range(-1.0..1.0), e));
            }
        }
        Polynomial { terms }
    }

    /// Like [`random_quadratic`](Self::random_quadratic) with cubic terms along the diagonal.
    pub fn random_cubic(rng: &mut impl Rng, offset: f64, scale: f64) -> Self {
        let mut p = Self::random_quadratic(rng, offset, scale);
        for i in 0..N {
            let mut e = vec![0u8; N];
            e[i] = 3;
            p.terms.push((scale * rng.gen_range(-1.0..1.0), e));
        }
        p
    }
}

impl<const N: usize> ScalarField<N> for Polynomial<N> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> T {
        let mut acc = T::zero();
        for (c, e) in &self.terms {
            let mut m = T::cst(*c);
            for (k, p) in e.iter().enumerate() {
                if *p > 0 {
                    m *= q[k].powi(*p as i32);
                }
            }
            acc += m;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantField(pub f64);

impl<const N: usize> ScalarField<N> for ConstantField {
    fn eval<T: Scalar>(&self, _q: &[T; N]) -> T {
        T::cst(self.0)
    }
}

/// Gauss–Jordan inverse with partial pivoting on the real parts; also returns det.
pub fn invert<T: Scalar, const N: usize>(m: &Tensor2<T, N>) -> Result<(Tensor2<T, N>, f64)> {
    let mut a = *m;
    let mut inv: Tensor2<T, N> =
        std::array::from_fn(|i| std::array::from_fn(|j| T::cst(if i == j { 1.0 } else { 0.0 })));
    let mut det = 1.0;
    let scale = m.iter().flatten().map(|v| v.value().abs()).fold(0.0, f64::max).max(1e-300);
    for c in 0..N {
        let p = (c..N).max_by(|&x, &y| a[x][c].value().abs().total_cmp(&a[y][c].value().abs())).unwrap();
        let pivot = a[p][c].value();
        if pivot.abs() < 1e-13 * scale {
            return Err(TopError::SingularMetric { det: 0.0 });
        }
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        det *= pivot;
        let r = a[c][c].recip();
        for k in 0..N {
            a[c][k] *= r;
            inv[c][k] *= r;
        }
        for row in 0..N {
            if row != c {
                let f = a[row][c];
                for k in 0..N {
                    let (ack, ick) = (a[c][k], inv[c][k]);
                    a[row][k] -= f * ack;
                    inv[row][k] -= f * ick;
                }
            }
        }
    }
    Ok((inv, det))
}

/// Metric, its inverse and first derivatives `dg[k][i][j] = ∂_k g_ij`.
pub struct MetricJet<T, const N: usize> {
    pub g: Tensor2<T, N>,
    pub ginv: Tensor2<T, N>,
    pub dg: Tensor3<T, N>,
    pub det: f64,
}

pub fn metric_jet<T: Scalar, const N: usize, M: MetricField<N>>(
    metric: &M,
    q: &[T; N],
) -> Result<MetricJet<T, N>> {
    let mut g = [[T::zero(); N]; N];
    let mut dg = [[[T::zero(); N]; N]; N];
    for k in 0..N {
        let gk = metric.metric(&seed(q, k));
        for i in 0..N {
            for j in 0..N {
                dg[k][i][j] = gk[i][j].eps;
                g[i][j] = gk[i][j].re;
            }
        }
    }
    let (ginv, det) = invert(&g)?;
    Ok(MetricJet { g, ginv, dg, det })
}

fn gamma_from_jet<T: Scalar, const N: usize>(jet: &MetricJet<T, N>) -> Tensor3<T, N> {
    // lowered Γ_{l jk} = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let mut low = [[[T::zero(); N]; N]; N];
    for l in 0..N {
        for j in 0..N {
            for k in j..N {
                let v = (jet.dg[j][l][k] + jet.dg[k][l][j] - jet.dg[l][j][k]) * 0.5;
                low[l][j][k] = v;
                low[l][k][j] = v;
            }
        }
    }
    let mut up = [[[T::zero(); N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in j..N {
                let mut s = T::zero();
                for l in 0..N {
                    s += jet.ginv[i][l] * low[l][j][k];
                }
                up[i][j][k] = s;
                up[i][k][j] = s;
            }
        }
    }
    up
}

/// Γ^i_{jk} at any scalar type.
pub fn christoffel_t<T: Scalar, const N: usize, M: MetricField<N>>(
    metric: &M,
    q: &[T; N],
) -> Result<Tensor3<T, N>> {
    Ok(gamma_from_jet(&metric_jet(metric, q)?))
}

/// Levi-Civita symbols `gamma[i][j][k]` = Γ^i_{jk}.
pub fn christoffel<const N: usize, M: MetricField<N>>(metric: &M, q: &[f64; N]) -> Result<Tensor3<f64, N>> {
    christoffel_t(metric, q)
}

/// Central-difference Christoffel symbols (cross-check path only).
pub fn christoffel_fd<const N: usize, M: MetricField<N>>(
    metric: &M,
    q: &[f64; N],
    h: f64,
) -> Result<Tensor3<f64, N>> {
    let g = metric.metric(q);
    let mut dg = [[[0.0; N]; N]; N];
    for k in 0..N {
        let mut up = *q;
        let mut dn = *q;
        up[k] += h;
        dn[k] -= h;
        let (gu, gd) = (metric.metric(&up), metric.metric(&dn));
        for i in 0..N {
            for j in 0..N {
                dg[k][i][j] = (gu[i][j] - gd[i][j]) / (2.0 * h);
            }
        }
    }
    let (ginv, det) = invert(&g)?;
    Ok(gamma_from_jet(&MetricJet { g, ginv, dg, det }))
}

/// Dense Riemann tensor R^i_{jkl}, index order (i, j, k, l).
#[derive(Clone, Debug)]
pub struct Riemann {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Riemann {
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureReport<const N: usize> {
    /// R^i_{jkl}.
    pub riemann: Riemann,
    /// R_{ijkl} = g_{im} R^m_{jkl}.
    pub riemann_lowered: Riemann,
    pub ricci: Tensor2<f64, N>,
    pub scalar: f64,
    pub point: [f64; N],
    pub ginv: Tensor2<f64, N>,
}

impl<const N: usize> CurvatureReport<N> {
    /// max over |R_ijkl + R_jikl|, |R_ijkl + R_ijlk|.
    pub fn antisymmetry_defect(&self) -> f64 {
        let r = &self.riemann_lowered;
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    for l in 0..N {
                        let v = r.get(i, j, k, l);
                        worst = worst.max((v + r.get(j, i, k, l)).abs()).max((v + r.get(i, j, l, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// max |R^i_{jkl} + R^i_{klj} + R^i_{ljk}|.
    pub fn bianchi_defect(&self) -> f64 {
        let r = &self.riemann;
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    for l in 0..N {
                        let s = r.get(i, j, k, l) + r.get(i, k, l, j) + r.get(i, l, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// |g^{jl} R^i_{jil} − scalar| recomputed straight from the Riemann tensor.
    pub fn contraction_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                for l in 0..N {
                    s += self.ginv[j][l] * self.riemann.get(i, j, i, l);
                }
            }
        }
        (s - self.scalar).abs()
    }
}

/// Riemann, Ricci and scalar curvature with exact second derivatives:
/// R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}.
pub fn curvature<const N: usize, M: MetricField<N>>(metric: &M, q: &[f64; N]) -> Result<CurvatureReport<N>> {
    let jet = metric_jet(metric, q)?;
    let gamma = gamma_from_jet(&jet);
    let mut dgamma = vec![[[[0.0; N]; N]; N]; N];
    for k in 0..N {
        let gk = christoffel_t(metric, &seed(&lift::<f64, N>(q), k))?;
        for i in 0..N {
            for j in 0..N {
                for l in 0..N {
                    dgamma[k][i][j][l] = gk[i][j][l].eps;
                }
            }
        }
    }
    let mut riem = Riemann { n: N, data: vec![0.0; N * N * N * N] };
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for l in 0..N {
                    let mut v = dgamma[k][i][l][j] - dgamma[l][i][k][j];
                    for m in 0..N {
                        v += gamma[i][k][m] * gamma[m][l][j] - gamma[i][l][m] * gamma[m][k][j];
                    }
                    let id = riem.idx(i, j, k, l);
                    riem.data[id] = v;
                }
            }
        }
    }
    let mut low = Riemann { n: N, data: vec![0.0; N * N * N * N] };
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for l in 0..N {
                    let mut s = 0.0;
                    for m in 0..N {
                        s += jet.g[i][m] * riem.get(m, j, k, l);
                    }
                    let id = low.idx(i, j, k, l);
                    low.data[id] = s;
                }
            }
        }
    }
    let mut ricci = [[0.0; N]; N];
    for j in 0..N {
        for l in 0..N {
            ricci[j][l] = (0..N).map(|i| riem.get(i, j, i, l)).sum();
        }
    }
    let mut scalar = 0.0;
    for j in 0..N {
        for l in 0..N {
            scalar += jet.ginv[j][l] * ricci[j][l];
        }
    }
    Ok(CurvatureReport { riemann: riem, riemann_lowered: low, ricci, scalar, point: *q, ginv: jet.ginv })
}

/// Scalar curvature only.
pub fn scalar_curvature<const N: usize, M: MetricField<N>>(metric: &M, q: &[f64; N]) -> Result<f64> {
    Ok(curvature(metric, q)?.scalar)
}

/// Structure constants `f[c][a][b]` with [X_a, X_b] = f^c_{ab} X_c.
pub fn structure_constants() -> [[[f64; 6]; 6]; 6] {
    let gens = generators4();
    let tr = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
        let mut s = 0.0;
        for i in 0..4 {
            for k in 0..4 {
                s += a[i][k] * b[k][i];
            }
        }
        s
    };
    let mut f = [[[0.0; 6]; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let ab = crate::lorentz::mat4_mul(&gens[a], &gens[b]);
            let ba = crate::lorentz::mat4_mul(&gens[b], &gens[a]);
            let comm: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| ab[i][j] - ba[i][j]));
            for c in 0..6 {
                f[c][a][b] = tr(&comm, &gens[c]) / tr(&gens[c], &gens[c]);
            }
        }
    }
    f
}

/// Scalar curvature of the bi-invariant group metric from its Lie algebra alone:
/// Ric = −¼ B with B_ab = f^c_{ad} f^d_{bc}, R = g^{ab} Ric_ab. The flat M₄
/// factor adds nothing.
pub fn scalar_curvature_closed_form(constants: &PhysicalConstants, sign: SignConvention) -> f64 {
    let f = structure_constants();
    let gens = generators4();
    let mut killing = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut s = 0.0;
            for c in 0..6 {
                for d in 0..6 {
                    s += f[c][a][d] * f[d][b][c];
                }
            }
            killing[a][b] = s;
        }
    }
    let k = sign.factor() * constants.a * constants.a;
    let eta: Tensor2<f64, 6> = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += gens[a][i][j] * gens[b][j][i];
                }
            }
            k * s
        })
    });
    let (eta_inv, _) = invert(&eta).expect("trace form is nondegenerate");
    let mut r = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            r += -0.25 * eta_inv[a][b] * killing[a][b];
        }
    }
    r
}

/// Value, gradient and Hessian of a complex field.
pub fn complex_hessian<const N: usize, F: ComplexField<N>>(
    f: &F,
    q: &[f64; N],
) -> (C64, [C64; N], [[C64; N]; N]) {
    let z = Cx::zero();
    let mut val = z;
    let mut grad = [z; N];
    let mut hess = [[z; N]; N];
    let q0 = lift::<f64, N>(q);
    for j in 0..N {
        for k in j..N {
            let r = f.eval(&seed2(&q0, j, k));
            val = Cx::new(r.re.re.re, r.im.re.re);
            grad[j] = Cx::new(r.re.re.eps, r.im.re.eps);
            grad[k] = Cx::new(r.re.eps.re, r.im.eps.re);
            let h = Cx::new(r.re.eps.eps, r.im.eps.eps);
            hess[j][k] = h;
            hess[k][j] = h;
        }
    }
    (val, grad, hess)
}

pub fn complex_gradient<const N: usize, F: ComplexField<N>>(f: &F, q: &[f64; N]) -> (C64, [C64; N]) {
    let mut val = Cx::zero();
    let grad = std::array::from_fn(|k| {
        let r: Cx<Dual<f64>> = f.eval(&seed(&lift::<f64, N>(q), k));
        val = Cx::new(r.re.re, r.im.re);
        Cx::new(r.re.eps, r.im.eps)
    });
    (val, grad)
}

struct RealPart<'a, F>(&'a F);

impl<const N: usize, F: ScalarField<N>> ComplexField<N> for RealPart<'_, F> {
    fn eval<T: Scalar>(&self, q: &[T; N]) -> Cx<T> {
        Cx::real(self.0.eval(q))
    }
}

/// g^{ij}(∂_i∂_j f − Γ^k_{ij}∂_k f) for a complex field.
pub fn laplace_beltrami_complex<const N: usize, M: MetricField<N>, F: ComplexField<N>>(
    metric: &M,
    f: &F,
    q: &[f64; N],
) -> Result<C64> {
    let jet = metric_jet(metric, q)?;
    let gamma = gamma_from_jet(&jet);
    let (_, grad, hess) = complex_hessian(f, q);
    let mut acc = Cx::zero();
    for i in 0..N {
        for j in 0..N {
            let gij = jet.ginv[i][j];
            if gij == 0.0 {
                continue;
            }
            let mut term = hess[i][j];
            for k in 0..N {
                term = term - grad[k].scale(gamma[k][i][j]);
            }
            acc += term.scale(gij);
        }
    }
    Ok(acc)
}

/// (1/√|g|) ∂_i(√|g| g^{ij} ∂_j f).
pub fn laplace_beltrami<const N: usize, M: MetricField<N>, F: ScalarField<N>>(
    metric: &M,
    f: &F,
    q: &[f64; N],
) -> Result<f64> {
    Ok(laplace_beltrami_complex(metric, &RealPart(f), q)?.re)
}
