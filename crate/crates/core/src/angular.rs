//! Angular-momentum algebra with Condon-Shortley phases.
//!
//! One-body matrices use the shell-local ordering `2 (m + l) + (spin == down)`,
//! the same order as [`crate::fock::Shell::index`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_FACTORIAL: usize = 170;

fn factorial(n: i32) -> f64 {
    thread_local! {
        static TABLE: Vec<f64> = {
            let mut t = vec![1.0; MAX_FACTORIAL + 1];
            for i in 1..=MAX_FACTORIAL {
                t[i] = t[i - 1] * i as f64;
            }
            t
        };
    }
    assert!(n >= 0 && n as usize <= MAX_FACTORIAL, "factorial({n}) out of range");
    TABLE.with(|t| t[n as usize])
}

/// Wigner 3j symbol with every argument given as twice its value.
pub fn wigner_3j_doubled(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }
    if tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() || (tj1 + tj2 + tj3) % 2 != 0 {
        return 0.0;
    }
    // all quantities below are integers
    let (j1, j2, j3) = (tj1, tj2, tj3);
    let a = (j1 + j2 - j3) / 2;
    let b = (j1 - j2 + j3) / 2;
    let c = (-j1 + j2 + j3) / 2;
    let total = (j1 + j2 + j3) / 2 + 1;
    let triangle = factorial(a) * factorial(b) * factorial(c) / factorial(total);
    let prefactor = (triangle
        * factorial((j1 + tm1) / 2)
        * factorial((j1 - tm1) / 2)
        * factorial((j2 + tm2) / 2)
        * factorial((j2 - tm2) / 2)
        * factorial((j3 + tm3) / 2)
        * factorial((j3 - tm3) / 2))
        .sqrt();
    let k1 = (j3 - j2 + tm1) / 2;
    let k2 = (j3 - j1 - tm2) / 2;
    let k3 = a;
    let k4 = (j1 - tm1) / 2;
    let k5 = (j2 + tm2) / 2;
    let t_min = 0.max(-k1).max(-k2);
    let t_max = k3.min(k4).min(k5);
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let denom = factorial(t)
            * factorial(k1 + t)
            * factorial(k2 + t)
            * factorial(k3 - t)
            * factorial(k4 - t)
            * factorial(k5 - t);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    let phase_exp = (j1 - j2 - tm3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * prefactor * sum
}

/// Wigner 3j symbol; arguments may be integers or half-integers.
pub fn wigner_3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> f64 {
    let d = |x: f64| (2.0 * x).round() as i32;
    wigner_3j_doubled(d(j1), d(j2), d(j3), d(m1), d(m2), d(m3))
}

/// Gaunt coefficient `c^k(l m; l' m')`, the angular factor of the
/// multipole `k` between `Y_lm` and `Y_l'm'`.
pub fn gaunt_ck(k: u32, l: u32, m: i32, lp: u32, mp: i32) -> f64 {
    let (k, l, lp) = (k as i32, l as i32, lp as i32);
    if (l + lp + k) % 2 != 0 || k < (l - lp).abs() || k > l + lp {
        return 0.0;
    }
    if m.abs() > l || mp.abs() > lp || (m - mp).abs() > k {
        return 0.0;
    }
    let phase = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase
        * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt()
        * wigner_3j_doubled(2 * l, 2 * k, 2 * lp, 0, 0, 0)
        * wigner_3j_doubled(2 * l, 2 * k, 2 * lp, -2 * m, 2 * (m - mp), 2 * mp)
}

/// `Y_lm` at `direction` (must be unit length within 1e-9).
pub fn spherical_harmonic(l: u32, m: i32, direction: [f64; 3]) -> Result<Complex64> {
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection { norm });
    }
    if m.unsigned_abs() > l {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let [x, y, z] = direction;
    let cos_theta = z.clamp(-1.0, 1.0);
    let phi = y.atan2(x);
    let ma = m.unsigned_abs();
    let p = associated_legendre(l, ma, cos_theta);
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial((l - ma) as i32)
        / factorial((l + ma) as i32))
    .sqrt();
    let positive = Complex64::from_polar(norm * p, ma as f64 * phi);
    Ok(if m >= 0 {
        positive
    } else if ma % 2 == 0 {
        positive.conj()
    } else {
        -positive.conj()
    })
}

/// `P_l^m(x)` including the Condon-Shortley phase `(-1)^m`, for `m >= 0`.
fn associated_legendre(l: u32, m: u32, x: f64) -> f64 {
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = (x * (2 * ll - 1) as f64 * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Dense real symmetric matrix over the `(m, spin)` orbitals of one shell.
#[derive(Clone, Debug)]
pub struct OneBodyMatrix {
    pub l: u32,
    pub matrix: Mat<f64>,
}

impl OneBodyMatrix {
    pub fn zeros(l: u32) -> Self {
        let n = 2 * (2 * l as usize + 1);
        Self {
            l,
            matrix: Mat::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix[(a, b)]
    }

    pub fn local_index(&self, m: i32, spin_down: bool) -> usize {
        2 * (m + self.l as i32) as usize + spin_down as usize
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .matrix
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .expect("symmetric eigenvalues");
        v.sort_by(f64::total_cmp);
        v
    }

    fn add(&mut self, a: usize, b: usize, value: f64) {
        self.matrix[(a, b)] += value;
    }
}

/// `ζ l·s` over the `(m, spin)` basis of a shell with angular momentum `l`.
pub fn spin_orbit_matrix(l: u32, zeta: f64) -> OneBodyMatrix {
    let mut h = OneBodyMatrix::zeros(l);
    if l == 0 || zeta == 0.0 {
        return h;
    }
    let li = l as i32;
    let ll1 = (li * (li + 1)) as f64;
    for m in -li..=li {
        let up = h.local_index(m, false);
        let dn = h.local_index(m, true);
        // l_z s_z
        h.add(up, up, zeta * 0.5 * m as f64);
        h.add(dn, dn, -zeta * 0.5 * m as f64);
        // (l+ s- + l- s+)/2 couples (m, up) with (m+1, down)
        if m < li {
            let dn_next = h.local_index(m + 1, true);
            let v = 0.5 * zeta * (ll1 - (m * (m + 1)) as f64).sqrt();
            h.add(dn_next, up, v);
            h.add(up, dn_next, v);
        }
    }
    h
}

/// Octahedral crystal field `21 Dq [C^4_0 + √(5/14)(C^4_4 + C^4_-4)]` on a d shell.
///
/// Eigenvalues are `+6 Dq` (e_g) and `-4 Dq` (t_2g); the matrix is traceless.
pub fn crystal_field_matrix_oh(ten_dq: f64) -> OneBodyMatrix {
    let mut h = OneBodyMatrix::zeros(2);
    if ten_dq == 0.0 {
        return h;
    }
    let dq = ten_dq / 10.0;
    let side = (5.0f64 / 14.0).sqrt();
    for m in -2..=2i32 {
        for mp in -2..=2i32 {
            let q = m - mp;
            let weight = match q {
                0 => 1.0,
                4 | -4 => side,
                _ => continue,
            };
            let v = 21.0 * dq * weight * gaunt_ck(4, 2, m, 2, mp);
            if v == 0.0 {
                continue;
            }
            for down in [false, true] {
                let a = h.local_index(m, down);
                let b = h.local_index(mp, down);
                h.add(a, b, v);
            }
        }
    }
    h
}

/// Radial Coulomb integrals of one shell pair, in eV.
#[derive(Clone, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct SlaterSet {
    /// Direct integrals `F^k`.
    pub f: BTreeMap<u32, f64>,
    /// Exchange integrals `G^k`; empty for a shell with itself.
    pub g: BTreeMap<u32, f64>,
    pub shell_pair: (u32, u32),
}

impl SlaterSet {
    pub fn new(shell_pair: (u32, u32)) -> Self {
        Self {
            shell_pair,
            ..Default::default()
        }
    }

    pub fn with_f(mut self, k: u32, value: f64) -> Self {
        self.f.insert(k, value);
        self
    }

    pub fn with_g(mut self, k: u32, value: f64) -> Self {
        self.g.insert(k, value);
        self
    }

    pub fn is_same_shell(&self) -> bool {
        self.shell_pair.0 == self.shell_pair.1 && self.g.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let (l, lp) = self.shell_pair;
        for (&k, &v) in &self.f {
            if k % 2 != 0 || k > 2 * l.min(lp) {
                return Err(Error::InvalidSlaterRange(format!(
                    "F^{k} not allowed for (l, l') = ({l}, {lp})"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidSlaterRange(format!("F^{k} is not finite")));
            }
        }
        let kmin = l.abs_diff(lp);
        for (&k, &v) in &self.g {
            if k < kmin || k > l + lp || (k - kmin) % 2 != 0 {
                return Err(Error::InvalidSlaterRange(format!(
                    "G^{k} not allowed for (l, l') = ({l}, {lp})"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidSlaterRange(format!("G^{k} is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellPair {
    /// Interaction of a shell with itself.
    Same(u32),
    /// Interaction between two distinct shells; shell A orbitals come first.
    Distinct(u32, u32),
}

/// Antisymmetrizable two-body tensor `U[a][b][c][d] = ⟨ab|1/r|cd⟩` entering
/// `H = ½ Σ U_abcd c†_a c†_b c_d c_c`.
///
/// For [`ShellPair::Distinct`] only inter-shell terms are stored (direct and
/// exchange); the intra-shell parts belong to separate tensors.
#[derive(Clone, Debug)]
pub struct CoulombTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CoulombTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.data[((a * n + b) * n + c) * n + d]
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        let n = self.dim;
        self.data.iter().enumerate().filter(|(_, v)| **v != 0.0).map(move |(i, &v)| {
            let d = i % n;
            let c = i / n % n;
            let b = i / (n * n) % n;
            let a = i / (n * n * n);
            (a, b, c, d, v)
        })
    }

    pub fn max_hermiticity_violation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((self.get(a, b, c, d) - self.get(c, d, a, b)).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn coulomb_tensor(pair: ShellPair, slater: &SlaterSet) -> Result<CoulombTensor> {
    slater.validate()?;
    let (shells, expected) = match pair {
        ShellPair::Same(l) => (vec![l], (l, l)),
        ShellPair::Distinct(la, lb) => (vec![la, lb], (la, lb)),
    };
    if slater.shell_pair != expected {
        return Err(Error::InvalidSlaterRange(format!(
            "Slater set is for {:?}, tensor requested for {:?}",
            slater.shell_pair, expected
        )));
    }
    if matches!(pair, ShellPair::Same(_)) && !slater.g.is_empty() {
        return Err(Error::InvalidSlaterRange(
            "same-shell interaction takes F^k only".into(),
        ));
    }
    // (shell id, l, m, spin) for each local orbital
    let mut orbs = Vec::new();
    for (sid, &l) in shells.iter().enumerate() {
        for m in -(l as i32)..=(l as i32) {
            for spin in 0..2 {
                orbs.push((sid, l, m, spin));
            }
        }
    }
    let n = orbs.len();
    let mut data = vec![0.0; n * n * n * n];
    for (a, &(sa, la, ma, spa)) in orbs.iter().enumerate() {
        for (b, &(sb, lb, mb, spb)) in orbs.iter().enumerate() {
            for (c, &(sc, lc, mc, spc)) in orbs.iter().enumerate() {
                if spa != spc {
                    continue;
                }
                for (d, &(sd, ld, md, spd)) in orbs.iter().enumerate() {
                    if spb != spd || ma + mb != mc + md {
                        continue;
                    }
                    let radial = if sa == sc && sb == sd {
                        if sa == sb && shells.len() == 2 {
                            // intra-shell part is not part of a pair tensor
                            continue;
                        }
                        &slater.f
                    } else if sa == sd && sb == sc && sa != sb {
                        &slater.g
                    } else {
                        continue;
                    };
                    let mut v = 0.0;
                    for (&k, &rk) in radial {
                        v += gaunt_ck(k, la, ma, lc, mc) * gaunt_ck(k, ld, md, lb, mb) * rk;
                    }
                    data[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    Ok(CoulombTensor { dim: n, data })
}
