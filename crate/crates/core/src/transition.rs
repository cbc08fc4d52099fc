//! Dipole photoemission and radiative-decay operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{gaunt_ck, spherical_harmonic};
use crate::error::{Error, Result};
use crate::fock::{Basis, ShellKind, Spin};
use crate::model::{HarmonicConvention, Model};
use crate::operator::{Leakage, OperatorMatrix, SecondQuantized};

pub type Vec3 = [f64; 3];

/// Emitted-photon linear polarizations for one emission direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationPair {
    /// Horizontal, in the xy plane.
    pub lambda1: Vec3,
    /// Vertical, along z.
    pub lambda2: Vec3,
    pub k_out: Vec3,
}

impl PolarizationPair {
    pub fn get(&self, pol: Polarization) -> Vec3 {
        match pol {
            Polarization::One => self.lambda1,
            Polarization::Two => self.lambda2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::One, Polarization::Two];

    pub fn index(self) -> usize {
        match self {
            Polarization::One => 0,
            Polarization::Two => 1,
        }
    }
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Polarization::One => "1",
            Polarization::Two => "2",
        })
    }
}

/// `λ2 = z`, `λ1 = normalize(z × k_out)`, so that `λ1 × λ2 = k_out`.
pub fn polarization_pair(k_out: Vec3) -> Result<PolarizationPair> {
    let n = k_out.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection { norm: n });
    }
    let h = k_out[0].hypot(k_out[1]);
    if h < 1e-9 {
        return Err(Error::ParallelToZ);
    }
    Ok(PolarizationPair {
        lambda1: [-k_out[1] / h, k_out[0] / h, 0.0],
        lambda2: [0.0, 0.0, 1.0],
        k_out,
    })
}

/// Coefficients `w_q` (index `q + 1`) with `a·r = Σ_q w_q r_q`, where `r_q`
/// are the spherical components of `r`.
pub fn dipole_weights(a: [Complex64; 3]) -> [Complex64; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::i();
    // spherical components a_q
    let a_p = -(a[0] + i * a[1]) * s;
    let a_0 = a[2];
    let a_m = (a[0] - i * a[1]) * s;
    // w_q = (-1)^q a_{-q}
    [-a_p, a_0, -a_m]
}

fn real_vec(v: Vec3) -> [Complex64; 3] {
    [v[0].into(), v[1].into(), v[2].into()]
}

/// Amplitude `D(m_c)` of removing core electron `m_c` into the `l_c + 1`
/// partial wave detected along `k_PE`.
pub fn photoemission_amplitudes(model: &Model) -> Result<Vec<Complex64>> {
    let cfg = &model.config;
    let lc = model.scenario().core_l();
    let lf = lc + 1;
    let w = dipole_weights(real_vec(cfg.geometry.eps_in));
    let mut out = Vec::new();
    for mc in -(lc as i32)..=(lc as i32) {
        let mut d = Complex64::new(0.0, 0.0);
        for q in -1..=1i32 {
            let mf = mc + q;
            if mf.unsigned_abs() > lf {
                continue;
            }
            let y = spherical_harmonic(lf, mf, cfg.geometry.k_pe)?;
            let y = match cfg.photoelectron_harmonic {
                HarmonicConvention::Conjugate => y.conj(),
                HarmonicConvention::Direct => y,
            };
            d += y * w[(q + 1) as usize] * gaunt_ck(1, lf, mf, lc, mc);
        }
        out.push(d);
    }
    Ok(out)
}

/// `V_PE(σ) = Σ_mc D(m_c) c_{core, m_c, σ}`.
pub fn photoemission_operator(model: &Model, spin: Spin) -> Result<SecondQuantized<Complex64>> {
    let orbitals = model.scenario().orbitals();
    let lc = model.scenario().core_l() as i32;
    let d = photoemission_amplitudes(model)?;
    let mut op = SecondQuantized::new();
    for (k, mc) in (-lc..=lc).enumerate() {
        op.add_annihilate(orbitals.index(ShellKind::Core, mc, spin), d[k]);
    }
    Ok(op)
}

/// `E(m_c, m_v) = <l_c m_c| ε*·r |l_v m_v>` with unit radial integral.
pub fn emission_amplitude(lc: u32, mc: i32, lv: u32, mv: i32, polarization: Vec3) -> Complex64 {
    let conj = [polarization[0].into(), polarization[1].into(), polarization[2].into()]
        .map(|c: Complex64| c.conj());
    let w = dipole_weights(conj);
    let q = mc - mv;
    if q.abs() > 1 {
        return Complex64::new(0.0, 0.0);
    }
    w[(q + 1) as usize] * gaunt_ck(1, lc, mc, lv, mv)
}

/// `V_ph(λ) = Σ E(m_c, m_v) c†_{core, m_c, s} c_{val, m_v, s}`.
pub fn emission_operator(model: &Model, pol: Polarization) -> Result<SecondQuantized<Complex64>> {
    let pair = polarization_pair(model.config.geometry.k_out)?;
    let eps = pair.get(pol);
    let sc = model.scenario();
    let orbitals = sc.orbitals();
    let (lc, lv) = (sc.core_l(), sc.valence_l());
    let mut op = SecondQuantized::new();
    for mc in -(lc as i32)..=(lc as i32) {
        for mv in -(lv as i32)..=(lv as i32) {
            let e = emission_amplitude(lc, mc, lv, mv, eps);
            if e.norm() < 1e-15 {
                continue;
            }
            for s in Spin::BOTH {
                op.add_one_body(
                    orbitals.index(ShellKind::Core, mc, s),
                    orbitals.index(ShellKind::Valence, mv, s),
                    e,
                );
            }
        }
    }
    Ok(op)
}

/// Matrix of a transition operator between two bases; images outside the
/// codomain (other M classes) are dropped.
pub fn transition_matrix(
    model: &Model,
    op: &SecondQuantized<Complex64>,
    domain: &Basis,
    codomain: &Basis,
) -> Result<OperatorMatrix<Complex64>> {
    OperatorMatrix::build(op, &model.scenario().orbitals(), domain, codomain, Leakage::Project)
}
