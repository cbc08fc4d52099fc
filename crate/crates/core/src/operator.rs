//! Second-quantized operators and their sparse matrices between bases.

use std::collections::BTreeMap;
use std::ops::{AddAssign, Mul, Sub};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{apply_fermion, Basis, FermionOp, FockState, OrbitalSet, SectorLabel, ShellCounts};

/// Scalar types an operator matrix may carry.
pub trait Scalar:
    Copy
    + Default
    + PartialEq
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + std::fmt::Debug
{
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn abs(&self) -> f64;
}

impl Scalar for f64 {
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn conj(&self) -> Self {
        *self
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
}

impl Scalar for Complex64 {
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn abs(&self) -> f64 {
        self.norm()
    }
}

/// Canonical key of a normal-ordered product of at most two creators and
/// two annihilators: `c†_a c_b` or `c†_a c†_b c_d c_c` with `a < b`, `c < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKey {
    Annihilate(usize),
    Create(usize),
    OneBody(usize, usize),
    CreateAnnihilate(usize, usize),
    TwoBody(usize, usize, usize, usize),
}

impl TermKey {
    /// Operators in application order (rightmost factor first).
    fn ops(&self) -> Vec<FermionOp> {
        use FermionOp::*;
        match *self {
            TermKey::Annihilate(a) => vec![Annihilate(a)],
            TermKey::Create(a) => vec![Create(a)],
            TermKey::OneBody(a, b) | TermKey::CreateAnnihilate(a, b) => vec![Annihilate(b), Create(a)],
            TermKey::TwoBody(a, b, c, d) => vec![Annihilate(c), Annihilate(d), Create(b), Create(a)],
        }
    }

    fn required_mask(&self) -> u64 {
        match *self {
            TermKey::Annihilate(a) => 1 << a,
            TermKey::Create(_) => 0,
            TermKey::OneBody(_, b) | TermKey::CreateAnnihilate(_, b) => 1 << b,
            TermKey::TwoBody(_, _, c, d) => (1 << c) | (1 << d),
        }
    }
}

/// A sum of fermionic operator products with scalar coefficients.
#[derive(Clone, Debug, Default)]
pub struct SecondQuantized<T: Scalar> {
    terms: BTreeMap<TermKey, T>,
}

impl<T: Scalar> SecondQuantized<T> {
    pub fn new() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, key: TermKey, value: T) {
        if value.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry += value;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `value · c†_a c_b`
    pub fn add_one_body(&mut self, a: usize, b: usize, value: T) {
        self.add(TermKey::OneBody(a, b), value);
    }

    /// `value · c_a`
    pub fn add_annihilate(&mut self, a: usize, value: T) {
        self.add(TermKey::Annihilate(a), value);
    }

    /// `value · c_a†`
    pub fn add_create(&mut self, a: usize, value: T) {
        self.add(TermKey::Create(a), value);
    }

    /// `value · c†_a c†_b c_d c_c`
    pub fn add_two_body(&mut self, a: usize, b: usize, c: usize, d: usize, value: T) {
        if a == b || c == d || value.is_zero() {
            return;
        }
        let mut sign = 1.0;
        let (a, b) = if a < b {
            (a, b)
        } else {
            sign = -sign;
            (b, a)
        };
        let (c, d) = if c < d {
            (c, d)
        } else {
            sign = -sign;
            (d, c)
        };
        self.add(TermKey::TwoBody(a, b, c, d), value * sign);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &T)> {
        self.terms.iter()
    }

    /// Apply to a single Fock state.
    pub fn apply(&self, state: FockState) -> Vec<(FockState, T)> {
        let mut out = Vec::new();
        for (key, &value) in &self.terms {
            let need = key.required_mask();
            if state.0 & need != need {
                continue;
            }
            if let Some((sign, next)) = apply_fermion(&key.ops(), state) {
                out.push((next, value * sign));
            }
        }
        out
    }
}

/// How to treat images that fall outside the codomain basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leakage {
    /// Drop images whose shell counts are outside the allowed configurations;
    /// images inside them but outside the basis are an error.
    Truncate,
    /// Drop every image outside the codomain basis (used when the codomain is a
    /// single M class of a larger space).
    Project,
}

/// Sparse matrix stored by columns (codomain rows × domain columns).
#[derive(Clone, Debug)]
pub struct OperatorMatrix<T: Scalar> {
    pub domain: SectorLabel,
    pub codomain: SectorLabel,
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> OperatorMatrix<T> {
    pub fn build(
        operator: &SecondQuantized<T>,
        orbitals: &OrbitalSet,
        domain: &Basis,
        codomain: &Basis,
        leakage: Leakage,
    ) -> Result<Self> {
        let allowed = &codomain.sector().configurations;
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut column: Vec<(usize, T)> = Vec::new();
        for &state in domain.states() {
            column.clear();
            for (image, value) in operator.apply(state) {
                match codomain.index_of(image) {
                    Some(row) => column.push((row, value)),
                    None if leakage == Leakage::Project => {}
                    None => {
                        let counts = ShellCounts::of(orbitals, image);
                        if allowed.contains(&counts) {
                            return Err(Error::BasisMismatch(format!(
                                "operator maps {state:?} to {image:?}, which has allowed shell counts but lies outside the codomain basis"
                            )));
                        }
                    }
                }
            }
            column.sort_by_key(|(r, _)| *r);
            let mut last: Option<usize> = None;
            for &(r, v) in column.iter() {
                if last == Some(r) {
                    *values.last_mut().unwrap() += v;
                } else {
                    row_idx.push(r);
                    values.push(v);
                    last = Some(r);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            domain: domain.sector().clone(),
            codomain: codomain.sector().clone(),
            nrows: codomain.len(),
            ncols: domain.len(),
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.ncols).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.column(j).find(|(r, _)| *r == i).map(|(_, v)| v).unwrap_or_default()
    }

    /// `y = A x`
    pub fn apply<X>(&self, x: &[X]) -> Vec<X>
    where
        X: Copy + Default + AddAssign + Mul<T, Output = X>,
    {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![X::default(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            for (i, v) in self.column(j) {
                y[i] += xj * v;
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn max_hermiticity_deviation(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (i, j, v) in self.entries() {
            let w = self.get(j, i).conj();
            let diff = v - w;
            worst = worst.max(diff.abs());
        }
        worst
    }
}

impl OperatorMatrix<f64> {
    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }

    /// `y = A x` for a dense real block of column vectors.
    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (i, v) in self.column(j) {
                y[i] += v * xj;
            }
        }
    }
}

impl OperatorMatrix<Complex64> {
    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }
}
