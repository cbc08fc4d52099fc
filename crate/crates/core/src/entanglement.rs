//! Spin ⊗ polarization two-qubit density matrices and their entanglement metrics.

use std::f64::consts::TAU;

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::simulation::{AmplitudeSet, Simulation, CHANNEL_LABELS};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const CLIP: f64 = 1e-12;

/// 4×4 density matrix over {U1, U2, D1, D2}.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix2Q {
    pub rho: [[Complex64; 4]; 4],
    pub e_b: f64,
    pub omega: f64,
}

fn to_mat(rho: &[[Complex64; 4]; 4]) -> Mat<Complex64> {
    Mat::from_fn(4, 4, |i, j| rho[i][j])
}

fn hermitian_eigen(m: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok((values, eig.U().to_owned()))
}

impl DensityMatrix2Q {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(rho: [[Complex64; 4]; 4], e_b: f64, omega: f64) -> Result<Self> {
        let dm = Self { rho, e_b, omega };
        dm.validate()?;
        Ok(dm)
    }

    pub fn validate(&self) -> Result<()> {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&to_mat(&self.rho))?.0)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i][j]
    }

    /// Pure state `|ψ⟩⟨ψ|` of a unit vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        check_unit(&psi)?;
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(rho, 0.0, 0.0)
    }
}

fn check_unit(psi: &[Complex64; 4]) -> Result<()> {
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n.sqrt()));
    }
    Ok(())
}

/// Unnormalized `Σ_f A(f) A(f)† w_f(ω)`.
pub fn raw_density_matrix(sim: &Simulation, amplitudes: &AmplitudeSet, omega: f64) -> [[Complex64; 4]; 4] {
    let window = sim.omega_window(amplitudes, omega);
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (f, a) in amplitudes.a.iter().enumerate() {
        let w = window[f];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] += a[i] * a[j].conj() * w;
            }
        }
    }
    c
}

/// Unit-trace density matrix at `(amplitudes.e_b, omega)`.
pub fn density_matrix(sim: &Simulation, amplitudes: &AmplitudeSet, omega: f64) -> Result<DensityMatrix2Q> {
    let mut c = raw_density_matrix(sim, amplitudes, omega);
    let tr: f64 = (0..4).map(|i| c[i][i].re).sum();
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::NoSignal);
    }
    for (i, row) in c.iter_mut().enumerate() {
        for (j, z) in row.iter_mut().enumerate() {
            *z /= tr;
            if i == j {
                z.im = 0.0;
            }
        }
    }
    // exact Hermiticity against rounding
    for i in 0..4 {
        for j in i + 1..4 {
            let avg = (c[i][j] + c[j][i].conj()) * 0.5;
            c[i][j] = avg;
            c[j][i] = avg.conj();
        }
    }
    DensityMatrix2Q::new(c, amplitudes.e_b, omega)
}

/// `(C, T)` from the eigenvalues of `√ρ ρ̃ √ρ`, with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence_tangle(dm: &DensityMatrix2Q) -> Result<(f64, f64)> {
    dm.validate()?;
    let rho = to_mat(&dm.rho);
    // σy⊗σy is real antidiagonal with signs (-1, 1, 1, -1)
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let tilde = Mat::<Complex64>::from_fn(4, 4, |i, j| dm.rho[3 - i][3 - j].conj() * (sign[i] * sign[j]));
    let (vals, vecs) = hermitian_eigen(&rho)?;
    let sqrt_rho = {
        let d = Mat::<Complex64>::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::new(vals[i].max(0.0).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &vecs * &d * vecs.adjoint()
    };
    let prod = &sqrt_rho * &tilde * &sqrt_rho;
    let sym = Mat::<Complex64>::from_fn(4, 4, |i, j| (prod[(i, j)] + prod[(j, i)].conj()) * 0.5);
    let (mut lam, _) = hermitian_eigen(&sym)?;
    lam.iter_mut().for_each(|l| {
        if *l < CLIP {
            *l = 0.0
        }
    });
    lam.sort_by(|a, b| b.total_cmp(a));
    let s: Vec<f64> = lam.iter().map(|l| l.sqrt()).collect();
    let c = (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0);
    Ok((c, c * c))
}

/// `⟨ψ|ρ|ψ⟩` for a unit vector `ψ`.
pub fn fidelity(dm: &DensityMatrix2Q, psi: &[Complex64; 4]) -> Result<f64> {
    check_unit(psi)?;
    let mut f = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            f += psi[i].conj() * dm.rho[i][j] * psi[j];
        }
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// `(|a⟩ + e^{iα}|b⟩)/√2`.
pub fn phased_bell(a: usize, b: usize, alpha: f64) -> [Complex64; 4] {
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    psi[a] += s;
    psi[b] += Complex64::from_polar(s, alpha);
    psi
}

/// Maximum of the fidelity against [`phased_bell`] over `α`.
///
/// `F(α) = (ρ_aa + ρ_bb)/2 + Re(e^{iα} ρ_ab)` peaks at `α = arg ρ_ba`.
/// A vanishing coherence gives `α = 0`.
pub fn optimal_phase_fidelity(dm: &DensityMatrix2Q, a: usize, b: usize) -> (f64, f64) {
    assert_ne!(a, b, "phase pair must name two distinct basis states");
    let rab = dm.rho[a][b];
    let f = 0.5 * (dm.rho[a][a].re + dm.rho[b][b].re) + rab.norm();
    let alpha = if rab.norm() < 1e-15 {
        0.0
    } else {
        let mut x = dm.rho[b][a].arg();
        if x < 0.0 {
            x += TAU;
        }
        if x >= TAU {
            x -= TAU;
        }
        x
    };
    (f.clamp(0.0, 1.0), alpha)
}

/// Reference state against which the fidelity is reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealState {
    Basis { index: usize },
    /// `(|a⟩ + e^{iα}|b⟩)/√2` with `α` optimized.
    PhasedPair { a: usize, b: usize },
}

impl IdealState {
    /// Reference state reported by default for each scenario.
    pub fn for_scenario(scenario: Scenario) -> Self {
        match scenario {
            Scenario::Ti3p => IdealState::Basis { index: 1 },
            Scenario::Ti2p => IdealState::PhasedPair { a: 1, b: 2 },
            Scenario::Ce4d => IdealState::PhasedPair { a: 0, b: 3 },
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            IdealState::Basis { index } => format!("|{}>", CHANNEL_LABELS[index]),
            IdealState::PhasedPair { a, b } => {
                format!("(|{}> + e^(i alpha)|{}>)/sqrt2", CHANNEL_LABELS[a], CHANNEL_LABELS[b])
            }
        }
    }
}

fn serialize_matrix<S: Serializer>(rho: &[[Complex64; 4]; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = rho
        .iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct Metrics {
    #[serde(rename = "T")]
    pub tangle: f64,
    #[serde(rename = "C")]
    pub concurrence: f64,
    #[serde(rename = "F")]
    pub fidelity: f64,
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntanglementReport {
    pub e_b: f64,
    pub omega: f64,
    pub basis: [&'static str; 4],
    #[serde(serialize_with = "serialize_matrix")]
    pub rho: [[Complex64; 4]; 4],
    pub metrics: Metrics,
    pub ideal: IdealState,
    pub ideal_description: String,
}

pub fn report(dm: &DensityMatrix2Q, ideal: IdealState) -> Result<EntanglementReport> {
    let (c, t) = concurrence_tangle(dm)?;
    let (f, alpha) = match ideal {
        IdealState::Basis { index } => {
            let mut psi = [Complex64::new(0.0, 0.0); 4];
            psi[index] = Complex64::new(1.0, 0.0);
            (fidelity(dm, &psi)?, None)
        }
        IdealState::PhasedPair { a, b } => {
            let (f, alpha) = optimal_phase_fidelity(dm, a, b);
            (f, Some(alpha))
        }
    };
    Ok(EntanglementReport {
        e_b: dm.e_b,
        omega: dm.omega,
        basis: CHANNEL_LABELS,
        rho: dm.rho,
        metrics: Metrics {
            tangle: t,
            concurrence: c,
            fidelity: f,
            alpha,
        },
        ideal,
        ideal_description: ideal.describe(),
    })
}
