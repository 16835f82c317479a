//! The squared Dirac equation for Ψ_D = (ψ^{σ'}; ψ^{σ̇'}) and free plane-wave solutions.

use serde::Serialize;

use crate::cx::{pauli, CMat, Cx, C64};
use crate::error::{Result, TopError};
use crate::geometry::PhysicalConstants;
use crate::lorentz::{Chirality, SpinorRep, MINKOWSKI};

use super::fields::FieldConfig;
use super::reduction::{
    coefficient_residual, kinetic_term, DiracField, PlaneWaveSpinor, ReductionCoefficients, SpinorCoefficients,
};

/// a = (ħ/mc)·√(3(1 + 4γ²)/2).
pub fn a_from_mass(m: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(TopError::NonpositiveMass(m));
    }
    Ok(constants.hbar / (m * constants.c) * (1.5 * (1.0 + 4.0 * constants.gamma2)).sqrt())
}

/// (3ħ²/2a²)(1 + 4γ²).
pub fn dirac_mass_term(constants: &PhysicalConstants) -> f64 {
    1.5 * (constants.hbar / constants.a).powi(2) * (1.0 + 4.0 * constants.gamma2)
}

/// Left side of the squared Dirac equation, four components (upper; lower).
pub fn squared_dirac_residual<C1: SpinorCoefficients, C2: SpinorCoefficients>(
    field: &DiracField<C1, C2>,
    x: &[f64; 4],
    fields: &FieldConfig,
    constants: &PhysicalConstants,
    include_f2_term: bool,
) -> Result<[C64; 4]> {
    let spin_half = SpinorRep::new(0, 1)?;
    if field.upper.rep != spin_half {
        return Err(TopError::UnsupportedRep { two_u: field.upper.rep.two_u, two_v: field.upper.rep.two_v });
    }
    let (e, h) = (fields.electric(x), fields.magnetic(x));
    let eh = constants.e * constants.hbar / constants.c;
    let ea = constants.e * constants.a / constants.c;
    let f2 = h.iter().map(|v| v * v).sum::<f64>() - e.iter().map(|v| v * v).sum::<f64>();
    let scalar = dirac_mass_term(constants) + if include_f2_term { ea * ea * f2 } else { 0.0 };
    let s = pauli::<f64>();
    let dot = |v: &[f64; 3]| {
        s[0].scale(Cx::real(v[0])).add(&s[1].scale(Cx::real(v[1]))).add(&s[2].scale(Cx::real(v[2])))
    };
    let sh = dot(&h);
    let se = dot(&e).scale(Cx::i());
    // Σ·H − iα·E on each block: σ·H ∓ iσ·E
    let upper_m = sh.sub(&se);
    let lower_m = sh.add(&se);
    let mut out = [Cx::zero(); 4];
    for (block, (coeffs, m)) in [
        (field.upper.coeffs.eval(x), upper_m),
        (field.lower.coeffs.eval(x), lower_m),
    ]
    .into_iter()
    .enumerate()
    {
        let kin = if block == 0 {
            kinetic_term(&field.upper.coeffs, x, fields, constants)
        } else {
            kinetic_term(&field.lower.coeffs, x, fields, constants)
        };
        let mc = m.apply(&coeffs);
        for i in 0..2 {
            out[2 * block + i] = kin[i] - mc[i].scale(eh) + coeffs[i].scale(scalar);
        }
    }
    Ok(out)
}

/// Stack the coefficient residuals of both blocks (undotted then dotted).
pub fn assembled_coefficient_residual<C1: SpinorCoefficients, C2: SpinorCoefficients>(
    field: &DiracField<C1, C2>,
    x: &[f64; 4],
    fields: &FieldConfig,
    constants: &PhysicalConstants,
    coeffs: &ReductionCoefficients,
) -> Result<[C64; 4]> {
    let u = coefficient_residual(&field.upper, Chirality::Undotted, x, fields, constants, coeffs)?;
    let l = coefficient_residual(&field.lower, Chirality::Undotted, x, fields, constants, coeffs)?;
    Ok([u[0], u[1], l[0], l[1]])
}

/// Positive-energy plane wave Ψ_D = (ξ; η) e^{ip_μx^μ/ħ} of the first-order equations
/// (p⁰ + p·σ)η = mξ, (p⁰ − p·σ)ξ = mη.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracPlaneWave {
    pub p: [f64; 4],
    pub m: f64,
    pub upper: [C64; 2],
    pub lower: [C64; 2],
    pub hbar: f64,
}

fn momentum_matrix(p: &[f64; 4], sign: f64) -> CMat<f64> {
    let s = pauli::<f64>();
    let mut out = CMat::identity(2).scale(Cx::real(p[0]));
    for k in 0..3 {
        out = out.add(&s[k].scale(Cx::real(sign * p[k + 1])));
    }
    out
}

/// p_μp^μ + m²c² with contravariant p.
pub fn mass_shell_defect(p: &[f64; 4], m: f64, c: f64) -> f64 {
    (0..4).map(|mu| MINKOWSKI[mu] * p[mu] * p[mu]).sum::<f64>() + m * m * c * c
}

/// Build a plane wave from a contravariant on-shell momentum and a rest-frame
/// two-spinor `spin_state`.
pub fn dirac_plane_wave(p: [f64; 4], spin_state: [C64; 2], m: f64, constants: &PhysicalConstants) -> Result<DiracPlaneWave> {
    if !(m > 0.0) {
        return Err(TopError::NonpositiveMass(m));
    }
    let defect = mass_shell_defect(&p, m, constants.c);
    if defect.abs() > 1e-10 * (m * m).max(p[0] * p[0]) || p[0] <= 0.0 {
        return Err(TopError::OffShellMomentum(defect));
    }
    // B = √(X/m) = (X/m + 1)/√(2p⁰/m + 2), B⁻¹ = (X̃/m + 1)/√(2p⁰/m + 2)
    let norm = (2.0 * p[0] / m + 2.0).sqrt();
    let b = momentum_matrix(&p, 1.0).scale(Cx::real(1.0 / m)).add(&CMat::identity(2)).scale(Cx::real(1.0 / norm));
    let binv = momentum_matrix(&p, -1.0).scale(Cx::real(1.0 / m)).add(&CMat::identity(2)).scale(Cx::real(1.0 / norm));
    let xi = b.apply(&spin_state);
    let eta = binv.apply(&spin_state);
    Ok(DiracPlaneWave { p, m, upper: [xi[0], xi[1]], lower: [eta[0], eta[1]], hbar: constants.hbar })
}

impl DiracPlaneWave {
    /// Same amplitudes with a replaced (possibly off-shell) momentum.
    pub fn with_momentum(&self, p: [f64; 4]) -> Self {
        DiracPlaneWave { p, ..self.clone() }
    }

    /// Residuals of the first-order equations on the amplitudes.
    pub fn first_order_residual(&self) -> f64 {
        let x = momentum_matrix(&self.p, 1.0);
        let xt = momentum_matrix(&self.p, -1.0);
        let a = x.apply(&self.lower);
        let b = xt.apply(&self.upper);
        (0..2)
            .map(|i| (a[i] - self.upper[i].scale(self.m)).abs().max((b[i] - self.lower[i].scale(self.m)).abs()))
            .fold(0.0, f64::max)
    }

    pub fn field(&self) -> DiracField<PlaneWaveSpinor, PlaneWaveSpinor> {
        let rep = SpinorRep { two_u: 0, two_v: 1 };
        let block = |v: &[C64; 2]| PlaneWaveSpinor { p: self.p, amplitude: v.to_vec(), hbar: self.hbar };
        DiracField::new(rep, block(&self.upper), block(&self.lower)).expect("two-component blocks")
    }

    /// max|residual| / (m²c² |Ψ|).
    pub fn relative_squared_residual(&self, x: &[f64; 4], constants: &PhysicalConstants) -> Result<f64> {
        let r = squared_dirac_residual(&self.field(), x, &FieldConfig::None, constants, false)?;
        let amp = self.upper.iter().chain(&self.lower).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = self.m * self.m * constants.c * constants.c * amp;
        Ok(r.iter().map(|z| z.abs()).fold(0.0, f64::max) / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::reduction::PolynomialSpinor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constants_for_mass(m: f64) -> PhysicalConstants {
        let mut k = PhysicalConstants::natural(m, 0.3, 1.0);
        k.a = a_from_mass(m, &k).unwrap();
        k
    }

    fn on_shell(m: f64, pv: [f64; 3]) -> [f64; 4] {
        [(m * m + pv.iter().map(|v| v * v).sum::<f64>()).sqrt(), pv[0], pv[1], pv[2]]
    }

    #[test]
    fn a_from_mass_values() {
        let k = PhysicalConstants::natural(1.0, 1.0, 1.0);
        assert!((a_from_mass(1.0, &k).unwrap() - (17.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!((a_from_mass(2.0, &k).unwrap() * 2.0 - a_from_mass(1.0, &k).unwrap()).abs() < 1e-15);
        let mut k0 = k;
        k0.gamma2 = 0.0;
        assert!((a_from_mass(1.0, &k0).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(a_from_mass(0.0, &k), Err(TopError::NonpositiveMass(_))));
        let km = constants_for_mass(1.7);
        assert!((dirac_mass_term(&km) - 1.7 * 1.7).abs() < 1e-12);
    }

    #[test]
    fn rest_frame_and_boosted_plane_waves() {
        let k = constants_for_mass(1.0);
        let up = [Cx::one(), Cx::zero()];
        let rest = dirac_plane_wave([1.0, 0.0, 0.0, 0.0], up, 1.0, &k).unwrap();
        assert_eq!(rest.upper, rest.lower);
        assert!(rest.first_order_residual() < 1e-15);
        let p = on_shell(1.0, [0.4, -1.2, 2.0]);
        let w = dirac_plane_wave(p, [Cx::new(0.6, 0.0), Cx::new(0.0, 0.8)], 1.0, &k).unwrap();
        assert!(w.first_order_residual() < 1e-12);
        assert!(w.relative_squared_residual(&[0.3, 0.1, -0.4, 0.2], &k).unwrap() < 1e-10);
        assert!(matches!(
            dirac_plane_wave([1.0, 0.5, 0.0, 0.0], up, 1.0, &k),
            Err(TopError::OffShellMomentum(_))
        ));
    }

    #[test]
    fn off_shell_momentum_leaves_a_residual() {
        let k = constants_for_mass(1.0);
        let p = on_shell(1.0, [0.3, 0.0, 0.2]);
        let w = dirac_plane_wave(p, [Cx::one(), Cx::zero()], 1.0, &k).unwrap();
        let off = w.with_momentum([p[0] * 1.02, p[1], p[2], p[3]]);
        assert!(mass_shell_defect(&off.p, 1.0, 1.0).abs() > 0.01);
        assert!(off.relative_squared_residual(&[0.0; 4], &k).unwrap() > 1e-3);
    }

    #[test]
    fn block_assembly_matches_squared_dirac() {
        let k = constants_for_mass(1.3);
        let paper = ReductionCoefficients::paper(&k);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = SpinorRep::new(0, 1).unwrap();
        let d = DiracField::new(rep, PolynomialSpinor::random(&mut rng, 2), PolynomialSpinor::random(&mut rng, 2)).unwrap();
        for fields in [
            FieldConfig::Uniform { e: [0.0; 3], h: [0.0, 0.0, 0.4] },
            FieldConfig::Uniform { e: [0.2, -0.1, 0.3], h: [0.1, 0.3, -0.2] },
        ] {
            let x = [0.2, -0.3, 0.5, 0.1];
            let a = assembled_coefficient_residual(&d, &x, &fields, &k, &paper).unwrap();
            let b = squared_dirac_residual(&d, &x, &fields, &k, true).unwrap();
            for i in 0..4 {
                assert!((a[i] - b[i]).abs() < 1e-8 * (1.0 + b[i].abs()), "{i}: {:?} {:?}", a[i], b[i]);
            }
            let without = squared_dirac_residual(&d, &x, &fields, &k, false).unwrap();
            let (e, h) = (fields.electric(&x), fields.magnetic(&x));
            let f2 = h.iter().map(|v| v * v).sum::<f64>() - e.iter().map(|v| v * v).sum::<f64>();
            let psi: Vec<C64> = d.upper.coeffs.eval(&x).into_iter().chain(d.lower.coeffs.eval(&x)).collect();
            let ea = k.e * k.a;
            for i in 0..4 {
                assert!((b[i] - without[i] - psi[i].scale(ea * ea * f2)).abs() < 1e-12);
            }
        }
    }
}
