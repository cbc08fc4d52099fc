//! Stage Hamiltonians of the cluster (or free-ion) model and their spectra.

use faer::{Mat, Side};

use crate::angular::{
    coulomb_tensor, crystal_field_matrix_oh, spin_orbit_matrix, OneBodyMatrix, ShellPair, SlaterSet,
};
use crate::error::{Error, Result};
use crate::fock::{build_basis, Basis, MClass, OrbitalSet, SectorLabel, ShellCounts, ShellKind, Spin, Stage};
use crate::model::Model;
use crate::operator::{Leakage, OperatorMatrix, SecondQuantized};

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Allowed shell counts of a stage, ordered by number of ligand holes.
pub fn stage_configurations(model: &Model, stage: Stage) -> Vec<ShellCounts> {
    let sc = model.scenario();
    let core_full = 2 * (2 * sc.core_l() + 1);
    let lig_full = if sc.has_ligand() { 2 * (2 * sc.valence_l() + 1) } else { 0 };
    let holes = if sc.has_ligand() { model.config.solver.max_ligand_holes } else { 0 };
    let n0 = sc.valence_electrons();
    (0..=holes)
        .filter_map(|k| {
            let (core, valence) = match stage {
                Stage::Ground => (core_full, n0 + k),
                Stage::Intermediate => (core_full - 1, n0 + k),
                Stage::Final => (core_full, (n0 + k).checked_sub(1)?),
            };
            Some(ShellCounts {
                core,
                valence,
                ligand: lig_full - k,
            })
        })
        .collect()
}

pub fn stage_sector(model: &Model, stage: Stage, class: Option<MClass>) -> SectorLabel {
    let s = SectorLabel::new(stage, stage_configurations(model, stage));
    match class {
        Some(c) => s.with_class(c),
        None => s,
    }
}

/// Electron count of every state in a stage.
pub fn stage_electrons(model: &Model, stage: Stage) -> u32 {
    stage_configurations(model, stage)[0].total()
}

fn add_one_body_matrix(op: &mut SecondQuantized<f64>, offset_a: usize, offset_b: usize, m: &OneBodyMatrix) {
    let n = m.dim();
    for a in 0..n {
        for b in 0..n {
            let v = m.get(a, b);
            if v != 0.0 {
                op.add_one_body(offset_a + a, offset_b + b, v);
            }
        }
    }
}

fn add_tensor(op: &mut SecondQuantized<f64>, map: &[usize], pair: ShellPair, slater: &SlaterSet) -> Result<()> {
    let t = coulomb_tensor(pair, slater)?;
    for (a, b, c, d, v) in t.nonzeros() {
        op.add_two_body(map[a], map[b], map[c], map[d], 0.5 * v);
    }
    Ok(())
}

/// Mean pair energy of a shell for the multipole part only (`F^0 = 0`).
pub fn multipole_pair_average(l: u32, slater: &SlaterSet) -> Result<f64> {
    let mut s = slater.clone();
    s.f.remove(&0);
    let t = coulomb_tensor(ShellPair::Same(l), &s)?;
    let n = t.dim();
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            sum += t.get(a, b, a, b) - t.get(a, b, b, a);
            pairs += 1;
        }
    }
    Ok(sum / pairs as f64)
}

/// Mean energy of one core-valence pair from `F^{k>0}` and `G^k`; only the
/// exchange part survives the average.
pub fn inter_shell_pair_average(la: u32, lb: u32, slater: &SlaterSet) -> Result<f64> {
    let mut s = slater.clone();
    s.f.remove(&0);
    let t = coulomb_tensor(ShellPair::Distinct(la, lb), &s)?;
    let na = 2 * (2 * la as usize + 1);
    let n = t.dim();
    let mut sum = 0.0;
    for a in 0..na {
        for b in na..n {
            sum += t.get(a, b, a, b) - t.get(a, b, b, a);
        }
    }
    Ok(sum / (na * (n - na)) as f64)
}

/// Projector onto the e_g orbitals of a d shell (per spin).
pub fn eg_projector() -> OneBodyMatrix {
    let mut p = crystal_field_matrix_oh(1.0);
    for i in 0..p.dim() {
        p.matrix[(i, i)] += 0.4;
    }
    p
}

/// Second-quantized Hamiltonian of one stage.
pub fn stage_operator(model: &Model, stage: Stage) -> Result<SecondQuantized<f64>> {
    let cfg = &model.config;
    let sc = model.scenario();
    let toggles = cfg.interactions;
    let orbitals = sc.orbitals();
    let params = model.stage_parameters(stage)?;
    let core = orbitals.shell(ShellKind::Core).expect("core shell").clone();
    let val = orbitals.shell(ShellKind::Valence).expect("valence shell").clone();
    let lig = orbitals.shell(ShellKind::Ligand).cloned();
    let ss = &cfg.solid_state;
    let mut op = SecondQuantized::<f64>::new();

    // level energies relative to ε_P = 0
    if lig.is_some() {
        let eps_d = ss.valence_level(sc.valence_electrons());
        for a in 0..val.len() {
            op.add_one_body(val.offset + a, val.offset + a, eps_d);
        }
    }
    if lig.is_some() && toggles.crystal_field && sc.valence_l() == 2 {
        add_one_body_matrix(&mut op, val.offset, val.offset, &crystal_field_matrix_oh(ss.ten_dq));
    }
    if toggles.valence_spin_orbit {
        add_one_body_matrix(&mut op, val.offset, val.offset, &spin_orbit_matrix(val.l, params.zeta_valence));
    }
    if let (Some(lig), true) = (&lig, toggles.hybridization) {
        let eg = eg_projector();
        let v_t2g = ss.v_eg * ss.v_ratio;
        for a in 0..val.len() {
            for b in 0..val.len() {
                let identity = if a == b { 1.0 } else { 0.0 };
                let v = ss.v_eg * eg.get(a, b) + v_t2g * (identity - eg.get(a, b));
                if v.abs() > 1e-15 {
                    op.add_one_body(val.offset + a, lig.offset + b, v);
                    op.add_one_body(lig.offset + b, val.offset + a, v);
                }
            }
        }
    }

    // valence-valence Coulomb; F^0 chosen so the mean pair energy equals U
    let mut vv = if toggles.multiplets {
        params.valence.clone()
    } else {
        SlaterSet::new((val.l, val.l))
    };
    let f0 = ss.u_dd - multipole_pair_average(val.l, &vv)?;
    vv.f.insert(0, f0);
    let val_map: Vec<usize> = (0..val.len()).map(|a| val.offset + a).collect();
    add_tensor(&mut op, &val_map, ShellPair::Same(val.l), &vv)?;

    if stage == Stage::Intermediate {
        if toggles.core_spin_orbit {
            add_one_body_matrix(&mut op, core.offset, core.offset, &spin_orbit_matrix(core.l, params.zeta_core));
        }
        if toggles.multiplets {
            if let Some(cv) = &params.core_valence {
                // the monopole belongs to U_dc, so the pair average is removed
                let mut cv = cv.clone();
                let shift = inter_shell_pair_average(core.l, val.l, &cv)?;
                cv.f.insert(0, -shift);
                let map: Vec<usize> = (0..core.len())
                    .map(|a| core.offset + a)
                    .chain((0..val.len()).map(|a| val.offset + a))
                    .collect();
                add_tensor(&mut op, &map, ShellPair::Distinct(core.l, val.l), &cv)?;
            }
        }
    }
    // -U_dc Σ n_γ (1 - n_ξ); vanishes when the core is full
    if ss.u_dc != 0.0 {
        for g in 0..val.len() {
            op.add_one_body(val.offset + g, val.offset + g, -ss.u_dc * core.len() as f64);
            for x in 0..core.len() {
                op.add_two_body(val.offset + g, core.offset + x, val.offset + g, core.offset + x, ss.u_dc);
            }
        }
    }
    Ok(op)
}

/// Basis of one stage and class.
pub fn stage_basis(model: &Model, stage: Stage, class: Option<MClass>) -> Result<Basis> {
    build_basis(&model.scenario().orbitals(), stage_sector(model, stage, class))
}

/// Matrix of a stage Hamiltonian over `basis`.
pub fn build_stage_hamiltonian(model: &Model, stage: Stage, basis: &Basis) -> Result<OperatorMatrix<f64>> {
    if basis.sector().stage != stage
        || basis.sector().configurations != stage_configurations(model, stage)
    {
        return Err(Error::BasisMismatch(format!(
            "basis belongs to the {} stage with different configurations",
            basis.sector().stage
        )));
    }
    let op = stage_operator(model, stage)?;
    let h = OperatorMatrix::build(&op, &model.scenario().orbitals(), basis, basis, Leakage::Truncate)?;
    let deviation = h.max_hermiticity_deviation();
    if deviation > HERMITICITY_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(h)
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k).iter().copied().collect()
    }
}

/// Dense symmetric eigensolve.
pub fn solve_dense(h: &Mat<f64>) -> Result<EigenSystem> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::NotHermitian {
            deviation: f64::INFINITY,
        });
    }
    let mut deviation = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            deviation = deviation.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if deviation > HERMITICITY_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    if n == 0 {
        return Ok(EigenSystem {
            values: vec![],
            vectors: Mat::zeros(0, 0),
        });
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let vectors = evd.U().to_owned();
    Ok(EigenSystem { values, vectors })
}

pub fn solve_sector(h: &OperatorMatrix<f64>) -> Result<EigenSystem> {
    let deviation = h.max_hermiticity_deviation();
    if deviation > HERMITICITY_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    solve_dense(&h.to_dense())
}

/// Lowest state of the ground stage in one M class.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub basis: Basis,
    pub class: MClass,
    /// Weight of each configuration, in the order of [`stage_configurations`].
    pub config_weights: Vec<(ShellCounts, f64)>,
    /// Dimension of the lowest (degenerate) level within the class.
    pub degeneracy: usize,
}

/// The valence `(m = -1, up)` state with full core and ligand shells.
pub fn reference_state(orbitals: &OrbitalSet) -> crate::fock::FockState {
    let mut mask = orbitals.mask(ShellKind::Core) | orbitals.mask(ShellKind::Ligand);
    mask |= 1 << orbitals.index(ShellKind::Valence, -1, Spin::Up);
    crate::fock::FockState(mask)
}

/// Pick a deterministic vector from the lowest level: within a degenerate
/// level, the one maximizing overlap with [`reference_state`], with that
/// amplitude made real positive.
pub fn select_ground(
    orbitals: &OrbitalSet,
    basis: Basis,
    system: &EigenSystem,
    class: MClass,
) -> Result<GroundState> {
    if system.is_empty() {
        return Err(Error::EmptyClass(class.to_string()));
    }
    let e0 = system.values[0];
    let degeneracy = system.values.iter().take_while(|&&e| e - e0 < DEGENERACY_TOLERANCE).count();
    let n = basis.len();
    let reference = basis.index_of(reference_state(orbitals));
    let mut v = vec![0.0; n];
    let mut projected = false;
    if let Some(r) = reference {
        for k in 0..degeneracy {
            let c = system.vectors[(r, k)];
            for (i, slot) in v.iter_mut().enumerate() {
                *slot += c * system.vectors[(i, k)];
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            projected = true;
        }
    }
    if !projected {
        v = system.vector(0);
    }
    let pivot = match reference {
        Some(r) if v[r].abs() > 1e-12 => r,
        _ => {
            let mut best = 0;
            for i in 0..n {
                if v[i].abs() > v[best].abs() + 1e-12 {
                    best = i;
                }
            }
            best
        }
    };
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let configs = basis.sector().configurations.clone();
    let mut weights: Vec<(ShellCounts, f64)> = configs.iter().map(|&c| (c, 0.0)).collect();
    for (i, &s) in basis.states().iter().enumerate() {
        let counts = ShellCounts::of(orbitals, s);
        if let Some(w) = weights.iter_mut().find(|(c, _)| *c == counts) {
            w.1 += v[i] * v[i];
        }
    }
    Ok(GroundState {
        energy: e0,
        vector: v,
        basis,
        class,
        config_weights: weights,
        degeneracy,
    })
}

/// Lowest state of the ground stage in `class`.
pub fn ground_state_in(model: &Model, class: MClass) -> Result<GroundState> {
    let basis = stage_basis(model, Stage::Ground, Some(class))?;
    if basis.is_empty() {
        return Err(Error::EmptyClass(class.to_string()));
    }
    let h = build_stage_hamiltonian(model, Stage::Ground, &basis)?;
    let system = solve_sector(&h)?;
    select_ground(&model.scenario().orbitals(), basis, &system, class)
}

/// Ground state in the `M = -1/2` class.
pub fn ground_state(model: &Model) -> Result<GroundState> {
    ground_state_in(model, MClass::from_two_m(-1))
}
