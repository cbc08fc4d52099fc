//! Occupation-number states over a fixed, canonical list of spin-orbitals.
//!
//! Orbital order is core shell first, then valence, then ligand. Inside a
//! shell orbitals run over ascending `m` with spin up before spin down, so
//! `index = offset + 2 (m + l) + (spin == down)`. Orbital `i` is bit `i` of
//! the occupation mask, and fermionic signs follow the usual convention
//! `c†_i |n⟩ = (-1)^(Σ_{j<i} n_j) |n + e_i⟩`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShellKind {
    Core,
    Valence,
    Ligand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// Twice the spin projection: +1 for up, -1 for down.
    pub fn twice(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinOrbital {
    pub shell: ShellKind,
    pub l: u32,
    pub m: i32,
    pub spin: Spin,
    pub index: usize,
}

impl SpinOrbital {
    /// Twice the total magnetic quantum number `m + s` carried by this orbital.
    pub fn two_m(&self) -> i32 {
        2 * self.m + self.spin.twice()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub kind: ShellKind,
    pub l: u32,
    pub offset: usize,
}

impl Shell {
    pub fn len(&self) -> usize {
        2 * (2 * self.l as usize + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mask(&self) -> u64 {
        ((1u64 << self.len()) - 1) << self.offset
    }

    pub fn index(&self, m: i32, spin: Spin) -> usize {
        debug_assert!(m.unsigned_abs() <= self.l);
        self.offset + 2 * (m + self.l as i32) as usize + spin.index()
    }
}

/// The canonical spin-orbital list of one model.
///
/// Ligand orbitals carry the `(m, spin)` labels of the valence orbital they
/// hybridize with, so charge transfer conserves total `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitalSet {
    shells: Vec<Shell>,
    orbitals: Vec<SpinOrbital>,
}

impl OrbitalSet {
    pub fn new(core_l: u32, valence_l: u32, ligand: bool) -> Self {
        let mut shells = Vec::new();
        let mut offset = 0;
        let mut push = |kind, l| {
            let shell = Shell { kind, l, offset };
            offset += shell.len();
            shells.push(shell);
        };
        push(ShellKind::Core, core_l);
        push(ShellKind::Valence, valence_l);
        if ligand {
            push(ShellKind::Ligand, valence_l);
        }
        let mut orbitals = Vec::new();
        for shell in &shells {
            for m in -(shell.l as i32)..=(shell.l as i32) {
                for spin in Spin::BOTH {
                    orbitals.push(SpinOrbital {
                        shell: shell.kind,
                        l: shell.l,
                        m,
                        spin,
                        index: shell.index(m, spin),
                    });
                }
            }
        }
        assert!(orbitals.len() <= 64, "at most 64 spin-orbitals supported");
        Self { shells, orbitals }
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn orbitals(&self) -> &[SpinOrbital] {
        &self.orbitals
    }

    pub fn orbital(&self, index: usize) -> &SpinOrbital {
        &self.orbitals[index]
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    pub fn shell(&self, kind: ShellKind) -> Option<&Shell> {
        self.shells.iter().find(|s| s.kind == kind)
    }

    pub fn has_ligand(&self) -> bool {
        self.shell(ShellKind::Ligand).is_some()
    }

    /// Index of `(kind, m, spin)`; panics if the shell is absent.
    pub fn index(&self, kind: ShellKind, m: i32, spin: Spin) -> usize {
        self.shell(kind)
            .unwrap_or_else(|| panic!("no {kind:?} shell"))
            .index(m, spin)
    }

    pub fn mask(&self, kind: ShellKind) -> u64 {
        self.shell(kind).map_or(0, Shell::mask)
    }

    /// Twice the total magnetic quantum number of `state`.
    pub fn two_m(&self, state: FockState) -> i32 {
        state.occupied().map(|i| self.orbitals[i].two_m()).sum()
    }
}

/// Occupation bit-vector; orbital `i` is bit `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState(pub u64);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    pub fn from_orbitals(orbitals: impl IntoIterator<Item = usize>) -> Self {
        FockState(orbitals.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn is_occupied(self, orbital: usize) -> bool {
        self.0 >> orbital & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn count_in(self, mask: u64) -> u32 {
        (self.0 & mask).count_ones()
    }

    pub fn occupied(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// `(-1)^(number of occupied orbitals below `orbital`)`.
    fn parity_below(self, orbital: usize) -> f64 {
        let below = self.0 & ((1u64 << orbital) - 1);
        if below.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn create(self, orbital: usize) -> Option<(f64, FockState)> {
        if self.is_occupied(orbital) {
            None
        } else {
            Some((self.parity_below(orbital), FockState(self.0 | 1u64 << orbital)))
        }
    }

    pub fn annihilate(self, orbital: usize) -> Option<(f64, FockState)> {
        if self.is_occupied(orbital) {
            Some((self.parity_below(orbital), FockState(self.0 & !(1u64 << orbital))))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FermionOp {
    Create(usize),
    Annihilate(usize),
}

/// Apply `ops` to `state` in list order (the first element acts first).
///
/// Returns `None` when the result is the zero vector.
pub fn apply_fermion(ops: &[FermionOp], state: FockState) -> Option<(f64, FockState)> {
    let mut sign = 1.0;
    let mut current = state;
    for op in ops {
        let (s, next) = match *op {
            FermionOp::Create(i) => current.create(i)?,
            FermionOp::Annihilate(i) => current.annihilate(i)?,
        };
        sign *= s;
        current = next;
    }
    Some((sign, current))
}

/// Total `M` modulo 4, stored as twice its representative.
///
/// Half-integer classes are `{-3/2, -1/2, 1/2, 3/2}`; integer classes
/// (used only to block even-electron sectors) are `{-1, 0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MClass(i8);

impl MClass {
    pub const HALF_INTEGER: [MClass; 4] = [MClass(-3), MClass(-1), MClass(1), MClass(3)];
    pub const INTEGER: [MClass; 4] = [MClass(-2), MClass(0), MClass(2), MClass(4)];

    pub fn from_two_m(two_m: i32) -> Self {
        // representative of 2M mod 8 in (-4, 4]
        let r = two_m.rem_euclid(8);
        MClass(if r > 4 { r - 8 } else { r } as i8)
    }

    pub fn twice(self) -> i32 {
        self.0 as i32
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.0 % 2 != 0
    }

    /// All four classes with the parity of `electrons`.
    pub fn all_for(electrons: u32) -> [MClass; 4] {
        if electrons % 2 == 1 {
            Self::HALF_INTEGER
        } else {
            Self::INTEGER
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let two_m = if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return None;
            }
            num.trim().parse::<i32>().ok()?
        } else {
            2 * s.parse::<i32>().ok()?
        };
        let class = MClass::from_two_m(two_m);
        (class.twice() == two_m).then_some(class)
    }
}

impl fmt::Display for MClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.0)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

/// `M` class of a state with an odd number of electrons.
pub fn m_class(orbitals: &OrbitalSet, state: FockState) -> Result<MClass> {
    if state.count() % 2 == 0 {
        return Err(Error::EvenElectronCount(state.count()));
    }
    Ok(MClass::from_two_m(orbitals.two_m(state)))
}

/// `M` modulo 4 for any electron count; used to block even sectors too.
pub fn m_residue(orbitals: &OrbitalSet, state: FockState) -> MClass {
    MClass::from_two_m(orbitals.two_m(state))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ground,
    Intermediate,
    Final,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ground => "ground",
            Stage::Intermediate => "intermediate",
            Stage::Final => "final",
        })
    }
}

/// Electron counts of one configuration, e.g. `2p6 3d2 L9`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShellCounts {
    pub core: u32,
    pub valence: u32,
    pub ligand: u32,
}

impl ShellCounts {
    pub fn get(&self, kind: ShellKind) -> u32 {
        match kind {
            ShellKind::Core => self.core,
            ShellKind::Valence => self.valence,
            ShellKind::Ligand => self.ligand,
        }
    }

    pub fn total(&self) -> u32 {
        self.core + self.valence + self.ligand
    }

    pub fn of(orbitals: &OrbitalSet, state: FockState) -> Self {
        ShellCounts {
            core: state.count_in(orbitals.mask(ShellKind::Core)),
            valence: state.count_in(orbitals.mask(ShellKind::Valence)),
            ligand: state.count_in(orbitals.mask(ShellKind::Ligand)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorLabel {
    pub stage: Stage,
    /// Allowed configurations; a state belongs to the sector if its shell
    /// counts match any one of them.
    pub configurations: Vec<ShellCounts>,
    /// `None` means every `M` class.
    pub m_class: Option<MClass>,
}

impl SectorLabel {
    pub fn new(stage: Stage, configurations: Vec<ShellCounts>) -> Self {
        Self {
            stage,
            configurations,
            m_class: None,
        }
    }

    pub fn with_class(mut self, class: MClass) -> Self {
        self.m_class = Some(class);
        self
    }
}

/// Ordered list of Fock states with its inverse lookup.
#[derive(Clone, Debug)]
pub struct Basis {
    states: Vec<FockState>,
    lookup: HashMap<FockState, usize>,
    sector: SectorLabel,
}

impl Basis {
    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        self.lookup.get(&state).copied()
    }

    pub fn sector(&self) -> &SectorLabel {
        &self.sector
    }

    pub fn state(&self, i: usize) -> FockState {
        self.states[i]
    }
}

fn combinations(n: usize, k: usize, offset: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, k: usize, acc: u64, offset: usize, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - k {
            rec(i + 1, n, k - 1, acc | 1u64 << (offset + i), offset, out);
        }
    }
    if k <= n {
        rec(0, n, k, 0, offset, &mut out);
    }
    out
}

/// Every Fock state satisfying `sector`, in ascending mask order.
pub fn build_basis(orbitals: &OrbitalSet, sector: SectorLabel) -> Result<Basis> {
    if sector.configurations.is_empty() {
        return Err(Error::ImpossibleSector("no configurations".into()));
    }
    if let Some(class) = sector.m_class {
        let parity = sector.configurations[0].total() % 2;
        if sector.configurations.iter().any(|c| c.total() % 2 != parity)
            || class.is_half_integer() != (parity == 1)
        {
            return Err(Error::ImpossibleSector(format!(
                "class {class} incompatible with electron-count parity"
            )));
        }
    }
    let mut states = Vec::new();
    for counts in &sector.configurations {
        let mut partial = vec![0u64];
        for kind in [ShellKind::Core, ShellKind::Valence, ShellKind::Ligand] {
            let want = counts.get(kind) as usize;
            let Some(shell) = orbitals.shell(kind) else {
                if want > 0 {
                    return Err(Error::ImpossibleSector(format!(
                        "{want} electrons requested in absent {kind:?} shell"
                    )));
                }
                continue;
            };
            if want > shell.len() {
                return Err(Error::ImpossibleSector(format!(
                    "{want} electrons exceed the {} {kind:?} spin-orbitals",
                    shell.len()
                )));
            }
            let combos = combinations(shell.len(), want, shell.offset);
            partial = partial
                .iter()
                .flat_map(|&p| combos.iter().map(move |&c| p | c))
                .collect();
        }
        states.extend(partial.into_iter().map(FockState));
    }
    if let Some(class) = sector.m_class {
        states.retain(|&s| m_residue(orbitals, s) == class);
    }
    states.sort_unstable();
    states.dedup();
    let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Ok(Basis {
        states,
        lookup,
        sector,
    })
}
