//! Cached stage solutions of one model and the spectral functions built on them.

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{Basis, MClass, OrbitalSet, ShellKind, Spin, Stage};
use crate::hamiltonian::{build_stage_hamiltonian, ground_state, solve_sector, stage_basis, EigenSystem, GroundState};
use crate::krylov::{krylov_ritz, RitzSystem};
use crate::model::{GridSpec, Model};
use crate::spectra::{check_width, lorentzian, voigt, voigt_broaden, voigt_broaden_shared, Line, LineSpectrum, SpectrumGrid};
use crate::transition::{
    emission_operator, photoemission_operator, polarization_pair, transition_matrix, Polarization,
    PolarizationPair,
};

/// Channel index `2·spin + polarization` in the order U1, U2, D1, D2.
pub fn channel_index(spin: Spin, pol: Polarization) -> usize {
    2 * spin.index() + pol.index()
}

pub const CHANNEL_LABELS: [&str; 4] = ["U1", "U2", "D1", "D2"];

/// One M class of the core-hole stage.
#[derive(Clone, Debug)]
pub struct IntermediateBlock {
    pub class: MClass,
    pub basis: Basis,
    pub ritz: RitzSystem,
    /// `<i|V_PE(σ)|g>` over Ritz states, indexed by spin.
    pub photoemission: [Vec<Complex64>; 2],
    /// `<i|N_hole,s|i>` over Ritz states.
    pub hole_spin: Vec<[f64; 2]>,
}

/// One M class of the final stage with its emission couplings.
#[derive(Clone, Debug)]
pub struct FinalBlock {
    pub class: MClass,
    pub basis: Basis,
    pub eigen: EigenSystem,
    /// `couplings[λ][β]` holds `<f|V_ph(λ)|i_β>` (final × Ritz states of
    /// intermediate block β), if nonzero.
    pub couplings: [Vec<Option<Mat<Complex64>>>; 2],
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub model: Model,
    pub orbitals: OrbitalSet,
    pub ground: GroundState,
    pub intermediate: Vec<IntermediateBlock>,
    pub finals: Vec<FinalBlock>,
    pub polarizations: PolarizationPair,
}

/// XEPECS amplitudes at one binding energy.
#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeSet {
    pub e_b: f64,
    pub final_energies: Vec<f64>,
    /// `a[f][channel]` with channels in [`CHANNEL_LABELS`] order.
    pub a: Vec<[Complex64; 4]>,
}

impl AmplitudeSet {
    /// Emission energy `E_B + E_g - E_f` of each final state.
    pub fn omegas(&self, e_g: f64) -> Vec<f64> {
        self.final_energies.iter().map(|ef| self.e_b + e_g - ef).collect()
    }

    pub fn weight(&self, f: usize, channel: usize) -> f64 {
        self.a[f][channel].norm_sqr()
    }
}

fn complex_matvec_real_cols(
    v: &crate::operator::OperatorMatrix<Complex64>,
    cols: &Mat<f64>,
) -> Mat<Complex64> {
    let mut out = Mat::<Complex64>::zeros(v.nrows(), cols.ncols());
    for k in 0..cols.ncols() {
        let col = cols.col(k);
        for j in 0..v.ncols() {
            let x = col[j];
            if x == 0.0 {
                continue;
            }
            for (i, e) in v.column(j) {
                out[(i, k)] += e * x;
            }
        }
    }
    out
}

impl Simulation {
    pub fn new(model: Model) -> Result<Self> {
        let orbitals = model.scenario().orbitals();
        let polarizations = polarization_pair(model.config.geometry.k_out)?;
        let ground = ground_state(&model)?;
        let g: Vec<Complex64> = ground.vector.iter().map(|&x| x.into()).collect();
        let inter_electrons = ground.basis.states()[0].count() - 1;
        let pe_ops = [
            photoemission_operator(&model, Spin::Up)?,
            photoemission_operator(&model, Spin::Down)?,
        ];
        let core = orbitals.shell(ShellKind::Core).expect("core").clone();

        let mut intermediate = Vec::new();
        for class in MClass::all_for(inter_electrons) {
            let basis = stage_basis(&model, Stage::Intermediate, Some(class))?;
            if basis.is_empty() {
                continue;
            }
            let mut seeds_c = Vec::new();
            for op in &pe_ops {
                let t = transition_matrix(&model, op, &ground.basis, &basis)?;
                seeds_c.push(t.apply(&g));
            }
            if seeds_c.iter().all(|s| s.iter().all(|z| z.norm() == 0.0)) {
                continue;
            }
            let mut seeds = Vec::new();
            for s in &seeds_c {
                seeds.push(s.iter().map(|z| z.re).collect::<Vec<f64>>());
                seeds.push(s.iter().map(|z| z.im).collect::<Vec<f64>>());
            }
            let h = build_stage_hamiltonian(&model, Stage::Intermediate, &basis)?;
            let ritz = krylov_ritz(&h, &seeds, model.config.solver.krylov_dim)?;
            let project = |s: &Vec<Complex64>| -> Vec<Complex64> {
                (0..ritz.len())
                    .map(|k| {
                        let col = ritz.vectors.col(k);
                        s.iter().enumerate().map(|(i, z)| z * col[i]).sum()
                    })
                    .collect()
            };
            let photoemission = [project(&seeds_c[0]), project(&seeds_c[1])];
            let hole: Vec<[f64; 2]> = basis
                .states()
                .iter()
                .map(|s| {
                    let mut h = [0.0; 2];
                    for m in -(core.l as i32)..=(core.l as i32) {
                        for spin in Spin::BOTH {
                            if !s.is_occupied(core.index(m, spin)) {
                                h[spin.index()] += 1.0;
                            }
                        }
                    }
                    h
                })
                .collect();
            let hole_spin = (0..ritz.len())
                .map(|k| {
                    let col = ritz.vectors.col(k);
                    let mut acc = [0.0; 2];
                    for (i, h) in hole.iter().enumerate() {
                        let p = col[i] * col[i];
                        acc[0] += p * h[0];
                        acc[1] += p * h[1];
                    }
                    acc
                })
                .collect();
            intermediate.push(IntermediateBlock {
                class,
                basis,
                ritz,
                photoemission,
                hole_spin,
            });
        }

        let final_electrons = inter_electrons;
        let ph_ops = [
            emission_operator(&model, Polarization::One)?,
            emission_operator(&model, Polarization::Two)?,
        ];
        let mut finals = Vec::new();
        for class in MClass::all_for(final_electrons) {
            let basis = stage_basis(&model, Stage::Final, Some(class))?;
            if basis.is_empty() {
                continue;
            }
            let h = build_stage_hamiltonian(&model, Stage::Final, &basis)?;
            let eigen = solve_sector(&h)?;
            let mut couplings: [Vec<Option<Mat<Complex64>>>; 2] = [Vec::new(), Vec::new()];
            for (p, op) in ph_ops.iter().enumerate() {
                for block in &intermediate {
                    let v = transition_matrix(&model, op, &block.basis, &basis)?;
                    if v.nnz() == 0 {
                        couplings[p].push(None);
                        continue;
                    }
                    let vy = complex_matvec_real_cols(&v, &block.ritz.vectors);
                    let fc = Mat::<Complex64>::from_fn(eigen.len(), basis.len(), |i, j| {
                        eigen.vectors[(j, i)].into()
                    });
                    couplings[p].push(Some(&fc * &vy));
                }
            }
            finals.push(FinalBlock {
                class,
                basis,
                eigen,
                couplings,
            });
        }
        Ok(Self {
            model,
            orbitals,
            ground,
            intermediate,
            finals,
            polarizations,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground.energy
    }

    pub fn gamma(&self) -> f64 {
        self.model.config.gamma_core
    }

    /// One line per intermediate state at `E_i - E_g` with weight `|<i|V_PE(σ)|g>|²`.
    pub fn xps_lines(&self, spin: Spin) -> LineSpectrum {
        let eg = self.ground.energy;
        let mut lines = Vec::new();
        for block in &self.intermediate {
            for (k, e) in block.ritz.values.iter().enumerate() {
                let w = block.photoemission[spin.index()][k].norm_sqr();
                if w > 0.0 {
                    lines.push(Line {
                        position: e - eg,
                        weight: w,
                    });
                }
            }
        }
        lines.sort_by(|a, b| a.position.total_cmp(&b.position).then(a.weight.total_cmp(&b.weight)));
        LineSpectrum {
            label: spin.to_string(),
            lines,
        }
    }

    /// Broadened spin-resolved XPS on `grid`.
    pub fn xps_spectrum(&self, grid: &GridSpec) -> Result<SpectrumGrid> {
        let axis = grid.nodes();
        let width = self.model.config.broadening.xps;
        let up = voigt_broaden(&self.xps_lines(Spin::Up).lines, width, &axis)?;
        let down = voigt_broaden(&self.xps_lines(Spin::Down).lines, width, &axis)?;
        let total = up.iter().zip(&down).map(|(a, b)| a + b).collect();
        Ok(SpectrumGrid {
            axis_name: "binding_energy".into(),
            axis,
            channels: vec![("up".into(), up), ("down".into(), down), ("total".into(), total)],
        })
    }

    /// `A_σλ(f; E_B) = Σ_i <f|V_ph(λ)|i><i|V_PE(σ)|g> / (E_B + E_g - E_i + iΓ)`.
    pub fn xepecs_amplitudes(&self, e_b: f64) -> Result<AmplitudeSet> {
        let gamma = self.gamma();
        if !(gamma > 0.0) {
            return Err(Error::NonPositiveGamma(gamma));
        }
        let eg = self.ground.energy;
        let weighted: Vec<[Vec<Complex64>; 2]> = self
            .intermediate
            .iter()
            .map(|block| {
                let w = |s: usize| -> Vec<Complex64> {
                    block
                        .ritz
                        .values
                        .iter()
                        .zip(&block.photoemission[s])
                        .map(|(&ei, &b)| b / Complex64::new(e_b + eg - ei, gamma))
                        .collect()
                };
                [w(0), w(1)]
            })
            .collect();
        let mut final_energies = Vec::new();
        let mut a = Vec::new();
        for fb in &self.finals {
            let nf = fb.eigen.len();
            let mut amps = vec![[Complex64::new(0.0, 0.0); 4]; nf];
            for pol in Polarization::BOTH {
                for (beta, coupling) in fb.couplings[pol.index()].iter().enumerate() {
                    let Some(g) = coupling else { continue };
                    for spin in Spin::BOTH {
                        let c = &weighted[beta][spin.index()];
                        let ch = channel_index(spin, pol);
                        for (f, amp) in amps.iter_mut().enumerate() {
                            let row = g.row(f);
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (k, ck) in c.iter().enumerate() {
                                acc += row[k] * ck;
                            }
                            amp[ch] += acc;
                        }
                    }
                }
            }
            final_energies.extend_from_slice(&fb.eigen.values);
            a.extend(amps);
        }
        Ok(AmplitudeSet {
            e_b,
            final_energies,
            a,
        })
    }

    /// Line spectra in ω for each channel at binding energy `e_b`.
    pub fn xepecs_lines(&self, amplitudes: &AmplitudeSet) -> Vec<LineSpectrum> {
        let omegas = amplitudes.omegas(self.ground.energy);
        (0..4)
            .map(|ch| LineSpectrum {
                label: CHANNEL_LABELS[ch].into(),
                lines: omegas
                    .iter()
                    .enumerate()
                    .map(|(f, &w)| Line {
                        position: w,
                        weight: amplitudes.weight(f, ch),
                    })
                    .collect(),
            })
            .collect()
    }

    /// Broadened spin- and polarization-resolved XEPECS at `e_b` on `omega`.
    pub fn xepecs_spectrum(&self, e_b: f64, omega: &[f64]) -> Result<SpectrumGrid> {
        let amplitudes = self.xepecs_amplitudes(e_b)?;
        self.xepecs_spectrum_from(&amplitudes, omega)
    }

    pub fn xepecs_spectrum_from(&self, amplitudes: &AmplitudeSet, omega: &[f64]) -> Result<SpectrumGrid> {
        let width = self.model.config.broadening.xepecs;
        let positions = amplitudes.omegas(self.ground.energy);
        let weights: Vec<Vec<f64>> = (0..4)
            .map(|ch| (0..positions.len()).map(|f| amplitudes.weight(f, ch)).collect())
            .collect();
        let mut channels = Vec::new();
        let mut total = vec![0.0; omega.len()];
        for (ch, v) in voigt_broaden_shared(&positions, &weights, width, omega)?.into_iter().enumerate() {
            total.iter_mut().zip(&v).for_each(|(t, x)| *t += x);
            channels.push((CHANNEL_LABELS[ch].to_string(), v));
        }
        channels.push(("total".into(), total));
        Ok(SpectrumGrid {
            axis_name: "omega".into(),
            axis: omega.to_vec(),
            channels,
        })
    }

    /// Total unbroadened XEPECS weight `Σ_f Σ_σλ |A|²` at `e_b`.
    pub fn xepecs_weight(&self, e_b: f64) -> Result<f64> {
        let a = self.xepecs_amplitudes(e_b)?;
        Ok(a.a.iter().map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum())
    }

    /// NXES: XEPECS summed over σ, λ and the binding-energy grid (rectangle rule).
    pub fn nxes(&self, binding: &GridSpec, omega: &[f64]) -> Result<SpectrumGrid> {
        let total = match lattice_ratio(binding, omega) {
            Some(r) => self.nxes_on_lattice(binding, omega, r)?,
            None => {
                let mut total = vec![0.0; omega.len()];
                for e_b in binding.nodes() {
                    let s = self.xepecs_spectrum(e_b, omega)?;
                    let t = s.channel("total").expect("total channel");
                    total.iter_mut().zip(t).for_each(|(acc, x)| *acc += x * binding.step);
                }
                total
            }
        };
        Ok(SpectrumGrid {
            axis_name: "omega".into(),
            axis: omega.to_vec(),
            channels: vec![("total".into(), total)],
        })
    }

    /// NXES when the binding step is `r` omega steps: line `f` at node `k` sits at
    /// `E_B(k) + E_g - E_f`, so its profile on the grid is one tabulated kernel
    /// per final state shifted by `r k` points.
    fn nxes_on_lattice(&self, binding: &GridSpec, omega: &[f64], r: usize) -> Result<Vec<f64>> {
        let width = self.model.config.broadening.xepecs;
        check_width(width)?;
        let nodes = binding.nodes();
        let (nb, no) = (nodes.len(), omega.len());
        let h = if no > 1 { omega[1] - omega[0] } else { 0.0 };
        let shift = r * (nb - 1);
        // w[k][f]: channel-summed weight of final state f at node k
        let mut w = Vec::with_capacity(nb);
        let mut energies = Vec::new();
        for &e_b in &nodes {
            let a = self.xepecs_amplitudes(e_b)?;
            w.push((0..a.a.len()).map(|f| (0..4).map(|ch| a.weight(f, ch)).sum::<f64>()).collect::<Vec<f64>>());
            energies = a.final_energies;
        }
        let eg = self.ground.energy;
        let mut total = vec![0.0; no];
        let mut kernel = vec![0.0; no + shift];
        for (f, &ef) in energies.iter().enumerate() {
            if w.iter().all(|row| row[f] == 0.0) {
                continue;
            }
            let c = binding.start + eg - ef;
            for (i, slot) in kernel.iter_mut().enumerate() {
                let x = omega[0] + (i as f64 - shift as f64) * h - c;
                *slot = voigt(x, width);
            }
            for (k, row) in w.iter().enumerate() {
                let wk = row[f] * binding.step;
                if wk == 0.0 {
                    continue;
                }
                let base = shift - r * k;
                for (j, t) in total.iter_mut().enumerate() {
                    *t += wk * kernel[base + j];
                }
            }
        }
        Ok(total)
    }

    /// Per-spin core-hole occupancy of the intermediate mixture reached at `e_b`
    /// with photoelectron spin `spin`, normalized to sum 1.
    pub fn core_hole_spin_occupancy(&self, e_b: f64, spin: Spin) -> Result<[f64; 2]> {
        let gamma = self.gamma();
        if !(gamma > 0.0) {
            return Err(Error::NonPositiveGamma(gamma));
        }
        let eg = self.ground.energy;
        let mut acc = [0.0; 2];
        for block in &self.intermediate {
            for (k, &ei) in block.ritz.values.iter().enumerate() {
                let w = block.photoemission[spin.index()][k].norm_sqr() * lorentzian(e_b - (ei - eg), gamma);
                acc[0] += w * block.hole_spin[k][0];
                acc[1] += w * block.hole_spin[k][1];
            }
        }
        let total = acc[0] + acc[1];
        if !(total > 0.0) {
            return Err(Error::NoSignal);
        }
        Ok([acc[0] / total, acc[1] / total])
    }

    /// Voigt window of each final state evaluated at `omega`.
    pub fn omega_window(&self, amplitudes: &AmplitudeSet, omega: f64) -> Vec<f64> {
        let width = self.model.config.broadening.xepecs;
        amplitudes
            .omegas(self.ground.energy)
            .iter()
            .map(|&wf| voigt(omega - wf, width))
            .collect()
    }
}

/// `r` when `omega` is uniform and the binding step is `r` omega steps.
fn lattice_ratio(binding: &GridSpec, omega: &[f64]) -> Option<usize> {
    if omega.len() < 2 {
        return None;
    }
    let h = omega[1] - omega[0];
    if !(h > 0.0) {
        return None;
    }
    let uniform = omega
        .iter()
        .enumerate()
        .all(|(i, &x)| (x - (omega[0] + i as f64 * h)).abs() <= 1e-9 * h);
    let r = (binding.step / h).round();
    (uniform && r >= 1.0 && (binding.step - r * h).abs() <= 1e-9 * h).then_some(r as usize)
}
