//! Electromagnetic field data on space-time and its lift to configuration space.
//!
//! Conventions: A_μ = (−φ, A⃗), F_μν = ∂_μA_ν − ∂_νA_μ, E_k = F_{k0},
//! F_{12} = H₃, F_{23} = H₁, F_{31} = H₂.

use serde::{Deserialize, Serialize};

use crate::dual::{seed, Scalar};
use crate::geometry::DIM;
use crate::lorentz::{invariant_frame_t, Mat4, MINKOWSKI};
use crate::wave::VectorPotential;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldConfig {
    #[default]
    None,
    /// Constant E and H in the symmetric gauge A_μ = −½ F_μν x^ν.
    Uniform { e: [f64; 3], h: [f64; 3] },
    /// A_μ = amplitude_μ cos(k·x), k contravariant.
    PlaneWave { amplitude: [f64; 4], k: [f64; 4] },
}

/// F_μν from E and H.
pub fn strength_from_eh<T: Scalar>(e: &[T; 3], h: &[T; 3]) -> Mat4<T> {
    let mut f = [[T::zero(); 4]; 4];
    for k in 0..3 {
        f[k + 1][0] = e[k];
        f[0][k + 1] = -e[k];
    }
    f[1][2] = h[2];
    f[2][1] = -h[2];
    f[2][3] = h[0];
    f[3][2] = -h[0];
    f[3][1] = h[1];
    f[1][3] = -h[1];
    f
}

/// Inverse of [`strength_from_eh`].
pub fn eh_from_strength<T: Scalar>(f: &Mat4<T>) -> ([T; 3], [T; 3]) {
    ([f[1][0], f[2][0], f[3][0]], [f[2][3], f[3][1], f[1][2]])
}

impl FieldConfig {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldConfig::None => true,
            FieldConfig::Uniform { e, h } => e.iter().chain(h).all(|v| *v == 0.0),
            FieldConfig::PlaneWave { amplitude, .. } => amplitude.iter().all(|v| *v == 0.0),
        }
    }

    pub fn is_uniform(&self) -> bool {
        !matches!(self, FieldConfig::PlaneWave { .. })
    }

    /// Covariant A_μ(x).
    pub fn potential_t<T: Scalar>(&self, x: &[T; 4]) -> [T; 4] {
        match self {
            FieldConfig::None => [T::zero(); 4],
            FieldConfig::Uniform { e, h } => {
                let f = strength_from_eh(e, h);
                std::array::from_fn(|mu| {
                    let mut s = T::zero();
                    for nu in 0..4 {
                        s += x[nu] * (-0.5 * f[mu][nu]);
                    }
                    s
                })
            }
            FieldConfig::PlaneWave { amplitude, k } => {
                let mut phase = T::zero();
                for mu in 0..4 {
                    phase += x[mu] * (MINKOWSKI[mu] * k[mu]);
                }
                let c = phase.cos();
                amplitude.map(|a| c * a)
            }
        }
    }

    pub fn potential(&self, x: &[f64; 4]) -> [f64; 4] {
        self.potential_t(x)
    }

    /// F_μν(x) by differentiating A_μ.
    pub fn strength_t<T: Scalar>(&self, x: &[T; 4]) -> Mat4<T> {
        match self {
            FieldConfig::None => [[T::zero(); 4]; 4],
            FieldConfig::Uniform { e, h } => {
                let l = |v: &[f64; 3]| v.map(T::cst);
                strength_from_eh(&l(e), &l(h))
            }
            FieldConfig::PlaneWave { .. } => {
                let d: [[T; 4]; 4] = std::array::from_fn(|mu| self.potential_t(&seed(x, mu)).map(|v| v.eps));
                std::array::from_fn(|mu| std::array::from_fn(|nu| d[mu][nu] - d[nu][mu]))
            }
        }
    }

    pub fn strength(&self, x: &[f64; 4]) -> Mat4<f64> {
        self.strength_t(x)
    }

    pub fn eh_t<T: Scalar>(&self, x: &[T; 4]) -> ([T; 3], [T; 3]) {
        eh_from_strength(&self.strength_t(x))
    }

    pub fn electric(&self, x: &[f64; 4]) -> [f64; 3] {
        self.eh_t(x).0
    }

    pub fn magnetic(&self, x: &[f64; 4]) -> [f64; 3] {
        self.eh_t(x).1
    }
}

/// A_i = (A_μ(x), a ξ^a_α(θ) F_a(x)) with F_a = (H, E).
pub fn em_lift_t<T: Scalar>(fields: &FieldConfig, a: f64, q: &[T; DIM]) -> [T; DIM] {
    let x: [T; 4] = std::array::from_fn(|k| q[k]);
    let mut out = [T::zero(); DIM];
    out[..4].copy_from_slice(&fields.potential_t(&x));
    if fields.is_zero() {
        return out;
    }
    let (e, h) = fields.eh_t(&x);
    let fa = [h[0], h[1], h[2], e[0], e[1], e[2]];
    let theta: [T; 6] = std::array::from_fn(|k| q[4 + k]);
    let frame = invariant_frame_t(&theta);
    for alpha in 0..6 {
        let mut s = T::zero();
        for b in 0..6 {
            s += frame.xi[b][alpha] * fa[b];
        }
        out[4 + alpha] = s * a;
    }
    out
}

/// Configuration-space potential built from [`em_lift_t`].
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPotential {
    pub fields: FieldConfig,
    pub a: f64,
}

impl VectorPotential<DIM> for LiftedPotential {
    fn covector<T: Scalar>(&self, q: &[T; DIM]) -> [T; DIM] {
        em_lift_t(&self.fields, self.a, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConfigPoint;
    use crate::lorentz::{invariant_frame, lorentz_from_euler_t};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_field_round_trip() {
        let f = FieldConfig::Uniform { e: [0.1, -0.2, 0.3], h: [0.4, 0.5, -0.6] };
        let x = [0.3, -0.7, 1.1, 0.2];
        // differentiate A directly and compare with the stored F
        let d: [[f64; 4]; 4] = std::array::from_fn(|mu| f.potential_t(&seed(&x, mu)).map(|v| v.eps));
        let fs = f.strength(&x);
        for mu in 0..4 {
            for nu in 0..4 {
                assert!((d[mu][nu] - d[nu][mu] - fs[mu][nu]).abs() < 1e-14);
            }
        }
        assert_eq!(f.electric(&x), [0.1, -0.2, 0.3]);
        assert_eq!(f.magnetic(&x), [0.4, 0.5, -0.6]);
    }

    #[test]
    fn plane_wave_strength_is_curl_of_potential() {
        let f = FieldConfig::PlaneWave { amplitude: [0.0, 0.2, -0.1, 0.0], k: [1.0, 0.0, 0.0, 1.0] };
        let x = [0.4, 0.1, -0.3, 0.9];
        let h = 1e-6;
        let fs = f.strength(&x);
        for mu in 0..4 {
            for nu in 0..4 {
                let dd = |a: usize, b: usize| {
                    let mut p = x;
                    p[a] += h;
                    let mut m = x;
                    m[a] -= h;
                    (f.potential(&p)[b] - f.potential(&m)[b]) / (2.0 * h)
                };
                assert!((dd(mu, nu) - dd(nu, mu) - fs[mu][nu]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn lift_at_identity_and_zero_field() {
        let q = ConfigPoint::new([0.1, 0.2, 0.3, 0.4], [0.0; 6]).to_array();
        let f = FieldConfig::Uniform { e: [0.0; 3], h: [0.0, 0.0, 2.0] };
        let l = em_lift_t(&f, 1.5, &q);
        assert_eq!(&l[4..], &[0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let z = em_lift_t(&FieldConfig::None, 1.5, &q);
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lift_follows_frame_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = FieldConfig::Uniform { e: [0.3, 0.1, -0.2], h: [-0.1, 0.4, 0.2] };
        for _ in 0..5 {
            let p = ConfigPoint::random(&mut rng);
            let q = p.to_array();
            let l = em_lift_t(&f, 1.0, &q);
            let frame = invariant_frame(&p.theta).unwrap();
            let fa = [-0.1, 0.4, 0.2, 0.3, 0.1, -0.2];
            for alpha in 0..6 {
                let direct: f64 = (0..6).map(|b| frame.xi[b][alpha] * fa[b]).sum();
                assert!((l[4 + alpha] - direct).abs() < 1e-12);
            }
            // ξ reproduces Ω from generators
            let g = crate::lorentz::generators4();
            let theta = p.theta.0;
            let dl: [Mat4<f64>; 6] = std::array::from_fn(|k| {
                lorentz_from_euler_t(&seed(&theta, k)).map(|r| r.map(|v| v.eps))
            });
            let inv = crate::lorentz::lorentz_inverse(&lorentz_from_euler_t(&theta));
            for alpha in 0..6 {
                let om = crate::lorentz::mat4_mul(&dl[alpha], &inv);
                for r in 0..4 {
                    for c in 0..4 {
                        let rebuilt: f64 = (0..6).map(|b| frame.xi[b][alpha] * g[b][r][c]).sum();
                        assert!((rebuilt - om[r][c]).abs() < 1e-10);
                    }
                }
            }
        }
    }
}
