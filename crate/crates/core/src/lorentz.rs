//! SO(3,1) and SL(2,C) in six Euler angles, the right-invariant frame, the
//! trace-form group metric and the finite-dimensional (u, v) representations.
//!
//! Λ(θ) = e^{θ¹J₁}e^{θ²J₂}e^{θ³J₃}e^{θ⁴K₁}e^{θ⁵K₂}e^{θ⁶K₃}, with J₃ rotating
//! x into y and K₁ boosting along x. Every factor is in closed form, so all
//! derivatives go through [`Dual`] exactly.

use serde::{Deserialize, Serialize};

use crate::cx::{pauli, CMat, Cx};
use crate::dual::{lift, seed, Dual, Scalar};
use crate::error::{Result, TopError};

pub type Mat4<T> = [[T; 4]; 4];
pub type Mat6<T> = [[T; 6]; 6];

/// Minkowski metric diag(−1, 1, 1, 1).
pub const MINKOWSKI: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Six Euler angles: θ¹..θ³ rotation angles, θ⁴..θ⁶ boost rapidities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles(pub [f64; 6]);

impl EulerAngles {
    pub fn identity() -> Self {
        EulerAngles([0.0; 6])
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(TopError::Domain(format!("non-finite Euler angles {:?}", self.0)))
        }
    }
}

/// Which reading of the group-block sign to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// g_αβ = −a² tr(Ω_α Ω_β): rotations positive, signature (+,+,+,−,−,−).
    #[default]
    RotationsPositive,
    /// g_αβ = +a² tr(Ω_α Ω_β), the literal reading of the top Lagrangian.
    Literal,
}

impl SignConvention {
    /// Factor multiplying a² tr(Ω_α Ω_β).
    pub fn factor(self) -> f64 {
        match self {
            SignConvention::RotationsPositive => -1.0,
            SignConvention::Literal => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix(pub Mat4<f64>);

impl LorentzMatrix {
    /// max |ΛᵀGΛ − G|.
    pub fn orthogonality_defect(&self) -> f64 {
        let l = &self.0;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    s += l[mu][a] * MINKOWSKI[mu] * l[mu][b];
                }
                let target = if a == b { MINKOWSKI[a] } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        det4(&self.0)
    }

    pub fn is_proper_orthochronous(&self, tol: f64) -> bool {
        self.orthogonality_defect() < tol
            && (self.determinant() - 1.0).abs() < tol.sqrt()
            && self.0[0][0] >= 1.0 - tol
    }

    /// Timelike fourleg vector e^μ_0.
    pub fn e0(&self) -> [f64; 4] {
        std::array::from_fn(|mu| self.0[mu][0])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinHalfMatrix(pub CMat<f64>);

#[derive(Clone, Debug)]
pub struct InvariantFrame<T = f64> {
    /// Ω_α = (∂Λ/∂θ^α) Λ⁻¹.
    pub omega: [Mat4<T>; 6],
    /// `xi[a][alpha]` = ξ^a_α.
    pub xi: Mat6<T>,
}

/// Real 4×4 generators {J₁, J₂, J₃, K₁, K₂, K₃}.
pub fn generators4() -> [Mat4<f64>; 6] {
    let mut g = [[[0.0; 4]; 4]; 6];
    // J1: y -> z, J2: z -> x, J3: x -> y
    for (k, (from, to)) in [(2usize, 3usize), (3, 1), (1, 2)].into_iter().enumerate() {
        g[k][to][from] = 1.0;
        g[k][from][to] = -1.0;
    }
    for k in 0..3 {
        g[3 + k][0][k + 1] = 1.0;
        g[3 + k][k + 1][0] = 1.0;
    }
    g
}

pub fn mat4_mul<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = a[i][0] * b[0][j];
            for k in 1..4 {
                s += a[i][k] * b[k][j];
            }
            s
        })
    })
}

pub fn mat4_identity<T: Scalar>() -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| T::cst(if i == j { 1.0 } else { 0.0 })))
}

/// Λ⁻¹ = G Λᵀ G.
pub fn lorentz_inverse<T: Scalar>(l: &Mat4<T>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| l[j][i] * (MINKOWSKI[i] * MINKOWSKI[j])))
}

fn trace_product<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> T {
    let mut s = T::zero();
    for i in 0..4 {
        for k in 0..4 {
            s += a[i][k] * b[k][i];
        }
    }
    s
}

fn det4(m: &Mat4<f64>) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Closed form of e^{t X_k} for the k-th real generator.
pub fn one_parameter_factor<T: Scalar>(k: usize, t: T) -> Mat4<T> {
    let mut m = mat4_identity::<T>();
    if k < 3 {
        let (from, to) = [(2usize, 3usize), (3, 1), (1, 2)][k];
        let (c, s) = (t.cos(), t.sin());
        m[from][from] = c;
        m[to][to] = c;
        m[to][from] = s;
        m[from][to] = -s;
    } else {
        let axis = k - 2;
        let (ch, sh) = (t.cosh(), t.sinh());
        m[0][0] = ch;
        m[axis][axis] = ch;
        m[0][axis] = sh;
        m[axis][0] = sh;
    }
    m
}

pub fn lorentz_from_euler_t<T: Scalar>(theta: &[T; 6]) -> Mat4<T> {
    let mut m = one_parameter_factor(0, theta[0]);
    for k in 1..6 {
        m = mat4_mul(&m, &one_parameter_factor(k, theta[k]));
    }
    m
}

pub fn lorentz_from_euler(angles: &EulerAngles) -> Result<LorentzMatrix> {
    angles.validate()?;
    Ok(LorentzMatrix(lorentz_from_euler_t(&angles.0)))
}

/// The SL(2,C) factor matching [`one_parameter_factor`]: e^{−iθσ_k/2} for
/// rotations, e^{θσ_k/2} for boosts.
pub fn spin_half_factor<T: Scalar>(k: usize, t: T) -> CMat<T> {
    let sigma = &pauli::<T>()[k % 3];
    let half = t * 0.5;
    let (a, b) = if k < 3 {
        (Cx::real(half.cos()), Cx::new(T::zero(), -half.sin()))
    } else {
        (Cx::real(half.cosh()), Cx::real(half.sinh()))
    };
    CMat::identity(2).scale(a).add(&sigma.scale(b))
}

pub fn sl2c_from_euler_t<T: Scalar>(theta: &[T; 6]) -> CMat<T> {
    let mut m = spin_half_factor(0, theta[0]);
    for k in 1..6 {
        m = m.matmul(&spin_half_factor(k, theta[k]));
    }
    m
}

pub fn sl2c_from_euler(angles: &EulerAngles) -> Result<SpinHalfMatrix> {
    angles.validate()?;
    Ok(SpinHalfMatrix(sl2c_from_euler_t(&angles.0)))
}

/// Λ^μ_a = ½ tr(σ_μ A σ_a A†), σ_μ = (1, σ).
pub fn vector_map(a: &CMat<f64>) -> Mat4<f64> {
    let mut basis = vec![CMat::identity(2)];
    basis.extend(pauli::<f64>());
    let ad = a.adjoint();
    let mut out = [[0.0; 4]; 4];
    for col in 0..4 {
        let image = a.matmul(&basis[col]).matmul(&ad);
        for mu in 0..4 {
            let p = basis[mu].matmul(&image);
            out[mu][col] = 0.5 * (p[(0, 0)] + p[(1, 1)]).re;
        }
    }
    out
}

/// Right-invariant frame at arbitrary scalar type (used inside metric jets).
pub fn invariant_frame_t<T: Scalar>(theta: &[T; 6]) -> InvariantFrame<T> {
    let lam = lorentz_from_euler_t(theta);
    let inv = lorentz_inverse(&lam);
    let gens = generators4();
    let omega: [Mat4<T>; 6] = std::array::from_fn(|alpha| {
        let d = lorentz_from_euler_t(&seed(theta, alpha));
        let dl: Mat4<T> = std::array::from_fn(|i| std::array::from_fn(|j| d[i][j].eps));
        mat4_mul(&dl, &inv)
    });
    let norms: [f64; 6] = std::array::from_fn(|a| trace_product(&gens[a], &gens[a]));
    let xi = std::array::from_fn(|a| {
        let ga: Mat4<T> = gens[a].map(|r| r.map(T::cst));
        std::array::from_fn(|alpha| trace_product(&omega[alpha], &ga) * (1.0 / norms[a]))
    });
    InvariantFrame { omega, xi }
}

pub fn det6(m: &Mat6<f64>) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..6 {
        let p = (c..6).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..6 {
            let f = a[r][c] / a[c][c];
            for k in c..6 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Frames whose |det ξ| falls below this are rejected as chart singularities.
pub const CHART_TOLERANCE: f64 = 1e-8;

pub fn invariant_frame(angles: &EulerAngles) -> Result<InvariantFrame> {
    angles.validate()?;
    let frame = invariant_frame_t(&angles.0);
    let det = det6(&frame.xi);
    if det.abs() < CHART_TOLERANCE {
        return Err(TopError::SingularChart { det });
    }
    Ok(frame)
}

pub fn group_metric_t<T: Scalar>(theta: &[T; 6], a: f64, sign: SignConvention) -> Mat6<T> {
    let frame = invariant_frame_t(theta);
    let k = sign.factor() * a * a;
    std::array::from_fn(|i| {
        std::array::from_fn(|j| trace_product(&frame.omega[i], &frame.omega[j]) * k)
    })
}

pub fn group_metric(angles: &EulerAngles, a: f64, sign: SignConvention) -> Result<Mat6<f64>> {
    invariant_frame(angles)?;
    Ok(group_metric_t(&angles.0, a, sign))
}

/// Representation label (2u, 2v).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinorRep {
    pub two_u: u32,
    pub two_v: u32,
}

/// Undotted generators use K = +iσ/2-type boosts, dotted the conjugate ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    Undotted,
    Dotted,
}

pub const MAX_TWO_SPIN: u32 = 3;

impl SpinorRep {
    pub fn new(two_u: u32, two_v: u32) -> Result<Self> {
        if two_u > MAX_TWO_SPIN || two_v > MAX_TWO_SPIN {
            return Err(TopError::UnsupportedRep { two_u, two_v });
        }
        Ok(SpinorRep { two_u, two_v })
    }

    pub fn dim(&self) -> usize {
        ((self.two_u + 1) * (self.two_v + 1)) as usize
    }

    pub fn conjugate(&self) -> Self {
        SpinorRep { two_u: self.two_v, two_v: self.two_u }
    }

    /// 2[u(u+1) + v(v+1)].
    pub fn casimir(&self) -> f64 {
        let u = self.two_u as f64 / 2.0;
        let v = self.two_v as f64 / 2.0;
        2.0 * (u * (u + 1.0) + v * (v + 1.0))
    }

    fn check(&self) -> Result<()> {
        SpinorRep::new(self.two_u, self.two_v).map(|_| ())
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Spin-j image of a 2×2 matrix by the normalized symmetric power; basis
/// index k ↔ e₁^{2j−k} e₂^{k}, i.e. m = j − k.
pub fn symmetric_power<T: Scalar>(m: &CMat<T>, two_j: u32) -> CMat<T> {
    let n = two_j as usize + 1;
    let mut out = CMat::zeros(n, n);
    let pow = |z: Cx<T>, p: u32| (0..p).fold(Cx::one(), |acc, _| acc * z);
    for k in 0..=two_j {
        let (a, b) = (two_j - k, k);
        for i in 0..=a {
            for j in 0..=b {
                let coeff = pow(m[(0, 0)], a - i)
                    * pow(m[(1, 0)], i)
                    * pow(m[(0, 1)], b - j)
                    * pow(m[(1, 1)], j);
                let kp = i + j;
                let (ap, bp) = (two_j - kp, kp);
                let norm = binomial(a, i)
                    * binomial(b, j)
                    * (factorial(ap) * factorial(bp) / (factorial(a) * factorial(b))).sqrt();
                out[(kp as usize, k as usize)] += coeff.scale_f(norm);
            }
        }
    }
    out
}

/// D^{(u,v)} of an SL(2,C) element. For u ≤ v the space is V_u ⊗ V_v with
/// the (A†)⁻¹ factor first; for u > v the A factor (spin v) comes first.
pub fn rep_of_spin_half<T: Scalar>(rep: SpinorRep, a: &CMat<T>) -> CMat<T> {
    let abar = a.adjoint().inv2();
    if rep.two_u <= rep.two_v {
        symmetric_power(&abar, rep.two_u).kron(&symmetric_power(a, rep.two_v))
    } else {
        symmetric_power(a, rep.two_v).kron(&symmetric_power(&abar, rep.two_u))
    }
}

pub fn rep_matrix_t<T: Scalar>(rep: SpinorRep, theta: &[T; 6]) -> CMat<T> {
    rep_of_spin_half(rep, &sl2c_from_euler_t(theta))
}

pub fn rep_matrix(rep: SpinorRep, angles: &EulerAngles) -> Result<CMat<f64>> {
    rep.check()?;
    angles.validate()?;
    Ok(rep_matrix_t(rep, &angles.0))
}

/// D^{(u,v)}(Λ(θ)⁻¹), the matrix entering the mode expansion.
pub fn rep_matrix_inverse_t<T: Scalar>(rep: SpinorRep, theta: &[T; 6]) -> CMat<T> {
    rep_of_spin_half(rep, &sl2c_from_euler_t(theta).inv2())
}

/// Standard spin-j matrices (S_x, S_y, S_z) in the basis of [`symmetric_power`].
pub fn spin_matrices(two_j: u32) -> [CMat<f64>; 3] {
    let n = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut plus = CMat::zeros(n, n);
    let mut z = CMat::zeros(n, n);
    for k in 0..n {
        let m = j - k as f64;
        z[(k, k)] = Cx::real(m);
        if k > 0 {
            // |m⟩ (index k) -> |m+1⟩ (index k-1)
            plus[(k - 1, k)] = Cx::real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let minus = plus.adjoint();
    let x = plus.add(&minus).scale(Cx::real(0.5));
    let y = plus.sub(&minus).scale(Cx::new(0.0, -0.5));
    [x, y, z]
}

/// Hermitian-convention generators (J, K) with [J_i, J_j] = iε J_k,
/// [J_i, K_j] = iε K_k, [K_i, K_j] = −iε J_k. `Dotted` returns the generators
/// of the conjugate label acting on the same index space (K → −K).
pub fn rep_generators(
    rep: SpinorRep,
    kind: Chirality,
) -> Result<([CMat<f64>; 3], [CMat<f64>; 3])> {
    rep.check()?;
    let (lo, hi, abar_first) = if rep.two_u <= rep.two_v {
        (rep.two_u, rep.two_v, true)
    } else {
        (rep.two_v, rep.two_u, false)
    };
    let s_lo = spin_matrices(lo);
    let s_hi = spin_matrices(hi);
    let id_lo = CMat::identity(lo as usize + 1);
    let id_hi = CMat::identity(hi as usize + 1);
    // boost sign of each factor: +i on the A factor, −i on the (A†)⁻¹ factor
    let (sign_lo, sign_hi) = if abar_first { (-1.0, 1.0) } else { (1.0, -1.0) };
    let flip = if kind == Chirality::Dotted { -1.0 } else { 1.0 };
    let j = std::array::from_fn(|k| s_lo[k].kron(&id_hi).add(&id_lo.kron(&s_hi[k])));
    let kk = std::array::from_fn(|k| {
        s_lo[k]
            .kron(&id_hi)
            .scale(Cx::new(0.0, sign_lo * flip))
            .add(&id_lo.kron(&s_hi[k]).scale(Cx::new(0.0, sign_hi * flip)))
    });
    Ok((j, kk))
}

/// Σ_k M_k M_k for a matrix triple.
pub fn square_triple(m: &[CMat<f64>; 3]) -> CMat<f64> {
    m[0].matmul(&m[0]).add(&m[1].matmul(&m[1])).add(&m[2].matmul(&m[2]))
}

/// J² − K².
pub fn casimir_matrix(rep: SpinorRep) -> Result<CMat<f64>> {
    let (j, k) = rep_generators(rep, Chirality::Undotted)?;
    Ok(square_triple(&j).sub(&square_triple(&k)))
}

/// `∂_a D(θ)|_{θ=0}` via one dual layer.
pub fn rep_derivative_at_identity(rep: SpinorRep, axis: usize) -> CMat<f64> {
    let theta = seed(&lift::<f64, 6>(&[0.0; 6]), axis);
    let d: CMat<Dual<f64>> = rep_matrix_t(rep, &theta);
    CMat { rows: d.rows, cols: d.cols, data: d.data.iter().map(|z| Cx::new(z.re.eps, z.im.eps)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
        EulerAngles(std::array::from_fn(|_| rng.gen_range(-1.2..1.2)))
    }

    fn commutator(a: &CMat<f64>, b: &CMat<f64>) -> CMat<f64> {
        a.matmul(b).sub(&b.matmul(a))
    }

    fn labels() -> Vec<SpinorRep> {
        let mut v = Vec::new();
        for u in 0..=3 {
            for w in 0..=3 {
                v.push(SpinorRep::new(u, w).unwrap());
            }
        }
        v
    }

    #[test]
    fn identity_angles_give_identity() {
        let l = lorentz_from_euler(&EulerAngles::identity()).unwrap();
        assert_eq!(l.0, mat4_identity::<f64>());
        let a = sl2c_from_euler(&EulerAngles::identity()).unwrap();
        assert!(a.0.max_abs_diff(&CMat::identity(2)) < 1e-15);
    }

    #[test]
    fn quarter_turn_about_z_maps_x_to_y() {
        let l = lorentz_from_euler(&EulerAngles([0.0, 0.0, PI / 2.0, 0.0, 0.0, 0.0])).unwrap().0;
        // column 1 (image of e_x) is e_y
        assert!((l[2][1] - 1.0).abs() < 1e-15 && l[1][1].abs() < 1e-15);
        assert!((l[1][2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_turn_is_minus_identity_in_sl2c() {
        let a = sl2c_from_euler(&EulerAngles([0.0, 0.0, 2.0 * PI, 0.0, 0.0, 0.0])).unwrap();
        assert!(a.0.max_abs_diff(&CMat::identity(2).scale(Cx::real(-1.0))) < 1e-15);
    }

    #[test]
    fn non_finite_angles_are_rejected() {
        let bad = EulerAngles([0.0, f64::NAN, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(lorentz_from_euler(&bad), Err(TopError::Domain(_))));
        assert!(matches!(sl2c_from_euler(&bad), Err(TopError::Domain(_))));
    }

    #[test]
    fn random_matrices_are_proper_lorentz_and_double_covered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let th = random_angles(&mut rng);
            let l = lorentz_from_euler(&th).unwrap();
            assert!(l.orthogonality_defect() < 1e-12);
            assert!(l.is_proper_orthochronous(1e-12));
            let a = sl2c_from_euler(&th).unwrap().0;
            assert!((a.det2() - Cx::one()).value().abs() < 1e-12);
            let v = vector_map(&a);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((v[i][j] - l.0[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn frame_at_identity_is_aligned_with_generators() {
        let f = invariant_frame(&EulerAngles::identity()).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((f.xi[a][b] - want).abs() < 1e-15);
            }
        }
        let f = invariant_frame(&EulerAngles([0.0, 0.0, 0.8, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(f.omega[2], generators4()[2]);
    }

    #[test]
    fn frame_matrices_lie_in_the_lorentz_algebra_and_match_adjoint_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens = generators4();
        for _ in 0..20 {
            let th = random_angles(&mut rng);
            let f = invariant_frame(&th).unwrap();
            let mut prefix = mat4_identity::<f64>();
            for alpha in 0..6 {
                let o = &f.omega[alpha];
                for i in 0..4 {
                    for j in 0..4 {
                        let s = o[j][i] * MINKOWSKI[j] + MINKOWSKI[i] * o[i][j];
                        assert!(s.abs() < 1e-12);
                    }
                }
                // Ω_α = P X_α P⁻¹ with P the product of the first α factors
                let ad = mat4_mul(&mat4_mul(&prefix, &gens[alpha]), &lorentz_inverse(&prefix));
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((ad[i][j] - o[i][j]).abs() < 1e-12);
                    }
                }
                prefix = mat4_mul(&prefix, &one_parameter_factor(alpha, th.0[alpha]));
            }
        }
    }

    #[test]
    fn gimbal_lock_is_reported() {
        let th = EulerAngles([0.1, PI / 2.0, 0.3, 0.0, 0.0, 0.0]);
        assert!(matches!(invariant_frame(&th), Err(TopError::SingularChart { .. })));
    }

    #[test]
    fn group_metric_at_identity_and_signature() {
        let g = group_metric(&EulerAngles::identity(), 1.0, SignConvention::default()).unwrap();
        let want = [2.0, 2.0, 2.0, -2.0, -2.0, -2.0];
        for a in 0..6 {
            for b in 0..6 {
                let w = if a == b { want[a] } else { 0.0 };
                assert!((g[a][b] - w).abs() < 1e-14);
            }
        }
        let lit = group_metric(&EulerAngles::identity(), 1.0, SignConvention::Literal).unwrap();
        assert!((lit[0][0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn group_metric_signature_is_three_three_at_random_points() {
        // Sylvester: count sign changes of the Gaussian elimination pivots
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = group_metric(&random_angles(&mut rng), 1.3, SignConvention::default()).unwrap();
            let ev = symmetric_eigenvalues(g);
            assert_eq!(ev.iter().filter(|v| **v > 0.0).count(), 3);
            assert_eq!(ev.iter().filter(|v| **v < 0.0).count(), 3);
        }
    }

    fn symmetric_eigenvalues(mut a: Mat6<f64>) -> [f64; 6] {
        // cyclic Jacobi
        for _ in 0..100 {
            for p in 0..6 {
                for q in p + 1..6 {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..6 {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..6 {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        std::array::from_fn(|k| a[k][k])
    }

    /// Newton solve of Λ(θ') = target starting from `guess`, using the frame.
    fn chart_inverse(target: &Mat4<f64>, mut guess: [f64; 6]) -> [f64; 6] {
        let gens = generators4();
        for _ in 0..50 {
            let l = lorentz_from_euler_t(&guess);
            // target Λ⁻¹ ≈ I + δ, δ ∈ algebra to first order
            let d = mat4_mul(target, &lorentz_inverse(&l));
            let coeffs: [f64; 6] = std::array::from_fn(|a| {
                trace_product(&d, &gens[a]) / trace_product(&gens[a], &gens[a])
            });
            let f = invariant_frame_t(&guess);
            let step = solve6(f.xi, coeffs);
            for k in 0..6 {
                guess[k] += step[k];
            }
            if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-15 {
                break;
            }
        }
        guess
    }

    fn solve6(mut a: Mat6<f64>, mut b: [f64; 6]) -> [f64; 6] {
        for c in 0..6 {
            let p = (c..6).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
            a.swap(p, c);
            b.swap(p, c);
            for r in 0..6 {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in 0..6 {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
        std::array::from_fn(|k| b[k] / a[k][k])
    }

    #[test]
    fn group_metric_is_left_translation_invariant() {
        // pull back g at θ' = chart⁻¹(L Λ(θ)) through the Jacobian ∂θ'/∂θ
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let left = lorentz_from_euler_t(&[0.05, -0.04, 0.03, 0.02, -0.03, 0.04]);
        for _ in 0..5 {
            let th: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-0.6..0.6));
            let map = |t: &[f64; 6]| chart_inverse(&mat4_mul(&left, &lorentz_from_euler_t(t)), *t);
            let tp = map(&th);
            let h = 1e-5;
            let jac: [[f64; 6]; 6] = {
                let mut j = [[0.0; 6]; 6];
                for b in 0..6 {
                    let mut up = th;
                    let mut dn = th;
                    up[b] += h;
                    dn[b] -= h;
                    let (pu, pd) = (map(&up), map(&dn));
                    for a in 0..6 {
                        j[a][b] = (pu[a] - pd[a]) / (2.0 * h);
                    }
                }
                j
            };
            let g0 = group_metric_t(&th, 1.0, SignConvention::default());
            let g1 = group_metric_t(&tp, 1.0, SignConvention::default());
            for a in 0..6 {
                for b in 0..6 {
                    let mut s = 0.0;
                    for c in 0..6 {
                        for d in 0..6 {
                            s += jac[c][a] * g1[c][d] * jac[d][b];
                        }
                    }
                    // Jacobian by central differences: O(h²) ≈ 1e-10
                    assert!((s - g0[a][b]).abs() < 1e-8, "{a}{b}: {s} vs {}", g0[a][b]);
                }
            }
        }
    }

    #[test]
    fn defining_rep_reproduces_sl2c_and_respects_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rep = SpinorRep::new(0, 1).unwrap();
        for _ in 0..10 {
            let th = random_angles(&mut rng);
            let d = rep_matrix(rep, &th).unwrap();
            assert!(d.max_abs_diff(&sl2c_from_euler(&th).unwrap().0) < 1e-14);
        }
        assert!(rep_matrix(rep, &EulerAngles::identity()).unwrap().max_abs_diff(&CMat::identity(2)) < 1e-15);
        let vec_rep = SpinorRep::new(1, 1).unwrap();
        let (x, y) = (0.37, -0.82);
        for axis in 0..6 {
            let mut a = [0.0; 6];
            let mut b = [0.0; 6];
            let mut ab = [0.0; 6];
            a[axis] = x;
            b[axis] = y;
            ab[axis] = x + y;
            let lhs = rep_matrix_t(vec_rep, &a).matmul(&rep_matrix_t(vec_rep, &b));
            assert!(lhs.max_abs_diff(&rep_matrix_t(vec_rep, &ab)) < 1e-12);
        }
        // homomorphism on arbitrary SL(2,C) products
        let th1 = random_angles(&mut rng);
        let th2 = random_angles(&mut rng);
        let a1 = sl2c_from_euler_t(&th1.0);
        let a2 = sl2c_from_euler_t(&th2.0);
        for rep in labels() {
            let lhs = rep_of_spin_half(rep, &a1).matmul(&rep_of_spin_half(rep, &a2));
            let rhs = rep_of_spin_half(rep, &a1.matmul(&a2));
            assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{rep:?}");
            let d = rep_of_spin_half(rep, &a1);
            let dinv = rep_of_spin_half(rep, &a1.inv2());
            assert!(d.matmul(&dinv).max_abs_diff(&CMat::identity(rep.dim())) < 1e-10);
        }
    }

    #[test]
    fn conjugate_representation_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let th = random_angles(&mut rng);
            for rep in labels() {
                let d = rep_matrix(rep, &th).unwrap();
                let dc = rep_matrix(rep.conjugate(), &th).unwrap();
                let prod = d.adjoint().matmul(&dc);
                if rep.two_u != rep.two_v {
                    assert!(prod.max_abs_diff(&CMat::identity(rep.dim())) < 1e-10, "{rep:?}");
                } else {
                    // self-conjugate label: holds up to the swap of the two factors
                    let n = rep.two_u as usize + 1;
                    let swap = CMat::from_fn(n * n, n * n, |r, c| {
                        if r == (c % n) * n + c / n { Cx::one() } else { Cx::zero() }
                    });
                    let twisted = swap.matmul(&d.adjoint()).matmul(&swap).matmul(&dc);
                    assert!(twisted.max_abs_diff(&CMat::identity(rep.dim())) < 1e-10, "{rep:?}");
                }
            }
        }
    }

    #[test]
    fn generators_obey_lorentz_algebra_and_casimir() {
        let i = Cx::new(0.0, 1.0);
        let eps = |a: usize, b: usize| (a + 1) % 3 == b;
        for rep in labels() {
            for kind in [Chirality::Undotted, Chirality::Dotted] {
                let (j, k) = rep_generators(rep, kind).unwrap();
                for a in 0..3 {
                    for b in 0..3 {
                        if !eps(a, b) {
                            continue;
                        }
                        let c = 3 - a - b;
                        assert!(commutator(&j[a], &j[b]).max_abs_diff(&j[c].scale(i)) < 1e-12);
                        assert!(commutator(&j[a], &k[b]).max_abs_diff(&k[c].scale(i)) < 1e-12);
                        assert!(commutator(&k[a], &k[b]).max_abs_diff(&j[c].scale(-i)) < 1e-12);
                    }
                    assert!(j[a].max_abs_diff(&j[a].adjoint()) < 1e-14);
                }
                let cas = square_triple(&j).sub(&square_triple(&k));
                let want = CMat::identity(rep.dim()).scale(Cx::real(rep.casimir()));
                assert!(cas.max_abs_diff(&want) < 1e-12, "{rep:?}");
            }
        }
        assert!((SpinorRep::new(0, 1).unwrap().casimir() - 1.5).abs() < 1e-15);
        assert!((SpinorRep::new(1, 1).unwrap().casimir() - 3.0).abs() < 1e-15);
        let (j, k) = rep_generators(SpinorRep::new(0, 0).unwrap(), Chirality::Undotted).unwrap();
        assert!(j[0].max_abs() == 0.0 && k[2].max_abs() == 0.0);
    }

    #[test]
    fn spin_half_generators_are_pauli_halves() {
        let s = pauli::<f64>();
        let (j, k) = rep_generators(SpinorRep::new(0, 1).unwrap(), Chirality::Undotted).unwrap();
        let (_, kd) = rep_generators(SpinorRep::new(0, 1).unwrap(), Chirality::Dotted).unwrap();
        for a in 0..3 {
            assert!(j[a].max_abs_diff(&s[a].scale(Cx::real(0.5))) < 1e-15);
            assert!(k[a].max_abs_diff(&s[a].scale(Cx::new(0.0, 0.5))) < 1e-15);
            assert!(kd[a].max_abs_diff(&s[a].scale(Cx::new(0.0, -0.5))) < 1e-15);
        }
    }

    #[test]
    fn rep_derivative_at_identity_is_minus_i_generator() {
        let mi = Cx::new(0.0, -1.0);
        for rep in labels() {
            let (j, k) = rep_generators(rep, Chirality::Undotted).unwrap();
            for axis in 0..6 {
                let gen = if axis < 3 { &j[axis] } else { &k[axis - 3] };
                let d = rep_derivative_at_identity(rep, axis);
                assert!(d.max_abs_diff(&gen.scale(mi)) < 1e-10, "{rep:?} axis {axis}");
            }
        }
    }

    #[test]
    fn unsupported_labels_are_rejected() {
        assert!(matches!(SpinorRep::new(4, 0), Err(TopError::UnsupportedRep { two_u: 4, .. })));
        let bad = SpinorRep { two_u: 0, two_v: 5 };
        assert!(rep_matrix(bad, &EulerAngles::identity()).is_err());
        assert!(rep_generators(bad, Chirality::Undotted).is_err());
    }
}
