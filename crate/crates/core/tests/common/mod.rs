//! Independent oracles and invariant checks shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use xentangle::entanglement::DensityMatrix2Q;
use xentangle::fock::{Stage, FockState, apply_fermion, FermionOp};
use xentangle::hamiltonian::build_stage_hamiltonian;
use xentangle::model::{Model, ModelConfig, Width};
use xentangle::presets::preset_config;
use xentangle::simulation::Simulation;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn model_from(name: &str, tweak: impl FnOnce(&mut ModelConfig)) -> Model {
    let mut cfg = preset_config(name).expect("preset");
    tweak(&mut cfg);
    Model::from_config(cfg, std::path::Path::new(".")).expect("model")
}

pub fn sim_from(name: &str, tweak: impl FnOnce(&mut ModelConfig)) -> Simulation {
    Simulation::new(model_from(name, tweak)).expect("simulation")
}

/// Ti model small enough for dense reference solves: one ligand hole at most.
pub fn reduced_ti(name: &str) -> ModelConfig {
    let mut cfg = preset_config(name).unwrap();
    cfg.solver.max_ligand_holes = 1;
    cfg
}

// ---------------------------------------------------------------- angular

/// Clebsch-Gordan table `<j1 m1 j2 m2 | J M>` built by applying `J-` to the
/// stretched states and Gram-Schmidt within each `M`; arguments are doubled.
pub struct CgTable {
    tj1: i32,
    tj2: i32,
    // states[(tJ, tM)] as a vector over product index (m1, m2)
    states: Vec<((i32, i32), Vec<f64>)>,
}

fn lower_coeff(tj: i32, tm: i32) -> f64 {
    // j-|j m> = sqrt(j(j+1) - m(m-1)) |j m-1>, all doubled
    let (j, m) = (tj as f64 / 2.0, tm as f64 / 2.0);
    (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
}

impl CgTable {
    pub fn new(tj1: i32, tj2: i32) -> Self {
        let n1 = (tj1 + 1) as usize;
        let n2 = (tj2 + 1) as usize;
        let idx = |tm1: i32, tm2: i32| ((tm1 + tj1) / 2) as usize * n2 + ((tm2 + tj2) / 2) as usize;
        let lower = |v: &[f64]| {
            let mut out = vec![0.0; n1 * n2];
            for a in 0..n1 {
                for b in 0..n2 {
                    let x = v[a * n2 + b];
                    if x == 0.0 {
                        continue;
                    }
                    let tm1 = 2 * a as i32 - tj1;
                    let tm2 = 2 * b as i32 - tj2;
                    if tm1 > -tj1 {
                        out[idx(tm1 - 2, tm2)] += x * lower_coeff(tj1, tm1);
                    }
                    if tm2 > -tj2 {
                        out[idx(tm1, tm2 - 2)] += x * lower_coeff(tj2, tm2);
                    }
                }
            }
            out
        };
        let mut states: Vec<((i32, i32), Vec<f64>)> = Vec::new();
        let mut tj = tj1 + tj2;
        while tj >= (tj1 - tj2).abs() {
            // start vector: the M = J subspace orthogonal to the higher-J states
            let mut best: Option<Vec<f64>> = None;
            for tm1 in (-tj1..=tj1).step_by(2) {
                let tm2 = tj - tm1;
                if tm2.abs() > tj2 || (tm2 + tj2) % 2 != 0 {
                    continue;
                }
                let mut v = vec![0.0; n1 * n2];
                v[idx(tm1, tm2)] = 1.0;
                for ((_, tmm), s) in &states {
                    if *tmm == tj {
                        let d: f64 = s.iter().zip(&v).map(|(a, b)| a * b).sum();
                        v.iter_mut().zip(s).for_each(|(x, y)| *x -= d * y);
                    }
                }
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-8 {
                    v.iter_mut().for_each(|x| *x /= n);
                    best = Some(v);
                    break;
                }
            }
            let mut v = best.expect("highest-weight state");
            // Condon-Shortley: <j1 j1; j2 J-j1 | J J> > 0
            let pivot = idx(tj1, tj - tj1);
            if (tj - tj1).abs() <= tj2 && v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let mut tm = tj;
            loop {
                states.push(((tj, tm), v.clone()));
                if tm == -tj {
                    break;
                }
                let c = lower_coeff(tj, tm);
                v = lower(&v);
                v.iter_mut().for_each(|x| *x /= c);
                tm -= 2;
            }
            tj -= 2;
        }
        Self { tj1, tj2, states }
    }

    pub fn get(&self, tm1: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
        if tm1 + tm2 != tm || tm1.abs() > self.tj1 || tm2.abs() > self.tj2 {
            return 0.0;
        }
        let n2 = (self.tj2 + 1) as usize;
        let i = ((tm1 + self.tj1) / 2) as usize * n2 + ((tm2 + self.tj2) / 2) as usize;
        self.states
            .iter()
            .find(|((a, b), _)| *a == tj && *b == tm)
            .map_or(0.0, |(_, v)| v[i])
    }

    /// Wigner 3j from the CG table, all arguments doubled.
    pub fn three_j(&self, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
        let phase_exp = (self.tj1 - self.tj2 - tm3) / 2;
        let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        phase / ((tj3 + 1) as f64).sqrt() * self.get(tm1, tm2, tj3, -tm3)
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn fact(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// `Y_lm(θ, φ)` from the explicit Legendre series differentiated `|m|` times.
pub fn ylm_oracle(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let ma = m.unsigned_abs();
    // P_l(x) = 2^-l Σ_k (-1)^k C(l,k) C(2l-2k, l) x^(l-2k)
    let mut coeffs = vec![0.0; (l + 1) as usize];
    for k in 0..=l / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[(l - 2 * k) as usize] = sign * binom(l, k) * binom(2 * l - 2 * k, l) / 2f64.powi(l as i32);
    }
    for _ in 0..ma {
        coeffs = (1..coeffs.len()).map(|p| coeffs[p] * p as f64).collect();
        if coeffs.is_empty() {
            return c(0.0, 0.0);
        }
    }
    let x = theta.cos();
    let deriv: f64 = coeffs.iter().enumerate().map(|(p, a)| a * x.powi(p as i32)).sum();
    let cs = if ma % 2 == 0 { 1.0 } else { -1.0 };
    let plm = cs * theta.sin().powi(ma as i32) * deriv;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - ma) / fact(l + ma)).sqrt();
    let pos = Complex64::from_polar(norm * plm, ma as f64 * phi);
    if m >= 0 {
        pos
    } else if ma % 2 == 0 {
        pos.conj()
    } else {
        -pos.conj()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `sqrt(4π/(2k+1)) ∫ Y*_lm Y_k,m-m' Y_l'm' dΩ` by product quadrature.
pub fn gaunt_quadrature(k: u32, l: u32, m: i32, lp: u32, mp: i32) -> f64 {
    let nodes = gauss_legendre(16);
    let nphi = 24;
    let mut acc = c(0.0, 0.0);
    for &(x, w) in &nodes {
        let theta = x.acos();
        for j in 0..nphi {
            let phi = 2.0 * PI * j as f64 / nphi as f64;
            let f = ylm_oracle(l, m, theta, phi).conj()
                * ylm_oracle(k, m - mp, theta, phi)
                * ylm_oracle(lp, mp, theta, phi);
            acc += f * (w * 2.0 * PI / nphi as f64);
        }
    }
    assert!(acc.im.abs() < 1e-12);
    (4.0 * PI / (2 * k + 1) as f64).sqrt() * acc.re
}

// ---------------------------------------------------------------- spectra

/// Gauss-Hermite nodes and weights for `∫ e^{-x²} f(x) dx` (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let j = Mat::<f64>::from_fn(n, n, |a, b| {
        if a + 1 == b || b + 1 == a {
            (a.max(b) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = j.self_adjoint_eigen(faer::Side::Lower).expect("jacobi eigen");
    let s = eig.S().column_vector();
    let u = eig.U();
    (0..n).map(|k| (s[k], PI.sqrt() * u[(0, k)] * u[(0, k)])).collect()
}

/// Voigt profile by Gauss-Hermite convolution of the Lorentzian with the Gaussian.
pub fn voigt_gauss_hermite(x: f64, width: Width) -> f64 {
    let sigma = width.gauss / (2.0 * 2f64.ln()).sqrt();
    let g = width.lorentz;
    gauss_hermite(120)
        .iter()
        .map(|&(t, w)| {
            let y = x - sigma * 2f64.sqrt() * t;
            w * g / PI / (y * y + g * g)
        })
        .sum::<f64>()
        / PI.sqrt()
}

// ---------------------------------------------------------------- fock

/// Exhaustive canonical anticommutation check on `n <= 8` orbitals
/// built only on 0/1 occupation masks; returns the number of checks.
pub fn check_anticommutation(n: usize) -> Result<usize, String> {
    let dim = 1usize << n;
    let mut checks = 0;
    // dense matrices of c_i and c†_i in the occupation basis
    let op = |ops: &[FermionOp]| {
        let mut m = vec![vec![0.0; dim]; dim];
        for s in 0..dim {
            if let Some((sign, out)) = apply_fermion(ops, FockState(s as u64)) {
                m[out.0 as usize][s] += sign;
            }
        }
        m
    };
    let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
        let mut out = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for k in 0..dim {
                if a[i][k] != 0.0 {
                    for j in 0..dim {
                        out[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
        }
        out
    };
    let ann: Vec<_> = (0..n).map(|i| op(&[FermionOp::Annihilate(i)])).collect();
    let cre: Vec<_> = (0..n).map(|i| op(&[FermionOp::Create(i)])).collect();
    for i in 0..n {
        for j in 0..n {
            let pairs = [
                (&ann[i], &cre[j], if i == j { 1.0 } else { 0.0 }, "{c_i, c†_j}"),
                (&ann[i], &ann[j], 0.0, "{c_i, c_j}"),
                (&cre[i], &cre[j], 0.0, "{c†_i, c†_j}"),
            ];
            for (a, b, delta, label) in pairs {
                let ab = mul(a, b);
                let ba = mul(b, a);
                for r in 0..dim {
                    for s in 0..dim {
                        let want = if r == s { delta } else { 0.0 };
                        if (ab[r][s] + ba[r][s] - want).abs() > 0.0 {
                            return Err(format!("{label} fails for i={i} j={j}"));
                        }
                        checks += 1;
                    }
                }
            }
            // c†_i is the adjoint of c_i
            for r in 0..dim {
                for s in 0..dim {
                    if cre[i][r][s] != ann[i][s][r] {
                        return Err(format!("c†_{i} is not the adjoint of c_{i}"));
                    }
                }
            }
        }
    }
    // ordered products agree with composed single operators
    for s in 0..dim {
        for i in 0..n {
            for j in 0..n {
                let seq = apply_fermion(&[FermionOp::Annihilate(j), FermionOp::Create(i)], FockState(s as u64));
                let manual = FockState(s as u64)
                    .annihilate(j)
                    .and_then(|(s1, st)| st.create(i).map(|(s2, out)| (s1 * s2, out)));
                if seq != manual {
                    return Err(format!("apply_fermion order mismatch on state {s}"));
                }
            }
        }
    }
    Ok(checks)
}

// ---------------------------------------------------------------- linear algebra

pub fn max_offdiag_and_diag_dev(g: &Mat<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - want).abs());
        }
    }
    worst
}

/// Hermiticity of every stage Hamiltonian and eigen-residual / orthonormality
/// of the ground, intermediate and final solutions cached in `sim`.
pub fn check_eigensystems(sim: &Simulation) -> Result<String, String> {
    let model = &sim.model;
    let mut worst_res: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;

    let hg = build_stage_hamiltonian(model, Stage::Ground, &sim.ground.basis).map_err(|e| e.to_string())?;
    worst_herm = worst_herm.max(hg.max_hermiticity_deviation());
    let g = &sim.ground.vector;
    let hv = hg.apply(g);
    let res = hv.iter().zip(g).map(|(a, b)| (a - sim.ground.energy * b).powi(2)).sum::<f64>().sqrt();
    worst_res = worst_res.max(res);
    worst_orth = worst_orth.max((g.iter().map(|x| x * x).sum::<f64>() - 1.0).abs());

    for block in &sim.intermediate {
        let h = build_stage_hamiltonian(model, Stage::Intermediate, &block.basis).map_err(|e| e.to_string())?;
        worst_herm = worst_herm.max(h.max_hermiticity_deviation());
        let v = &block.ritz.vectors;
        let gram = v.transpose() * v;
        worst_orth = worst_orth.max(max_offdiag_and_diag_dev(&gram));
        // Rayleigh quotient matrix is diagonal with the Ritz values
        let mut hvm = Mat::<f64>::zeros(v.nrows(), v.ncols());
        for k in 0..v.ncols() {
            let col: Vec<f64> = (0..v.nrows()).map(|i| v[(i, k)]).collect();
            let y = h.apply(&col);
            for i in 0..v.nrows() {
                hvm[(i, k)] = y[i];
            }
        }
        let proj = v.transpose() * &hvm;
        for i in 0..proj.nrows() {
            for j in 0..proj.ncols() {
                let want = if i == j { block.ritz.values[i] } else { 0.0 };
                worst_res = worst_res.max((proj[(i, j)] - want).abs());
            }
        }
        if block.ritz.exact {
            for k in 0..v.ncols() {
                let r = (0..v.nrows())
                    .map(|i| (hvm[(i, k)] - block.ritz.values[k] * v[(i, k)]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                worst_res = worst_res.max(r);
            }
        }
    }

    for fb in &sim.finals {
        let h = build_stage_hamiltonian(model, Stage::Final, &fb.basis).map_err(|e| e.to_string())?;
        worst_herm = worst_herm.max(h.max_hermiticity_deviation());
        let v = &fb.eigen.vectors;
        worst_orth = worst_orth.max(max_offdiag_and_diag_dev(&(v.transpose() * v)));
        let hd = h.to_dense();
        let hv = &hd * v;
        for k in 0..v.ncols() {
            let r = (0..v.nrows())
                .map(|i| (hv[(i, k)] - fb.eigen.values[k] * v[(i, k)]).powi(2))
                .sum::<f64>()
                .sqrt();
            worst_res = worst_res.max(r);
        }
    }
    let summary = format!("herm {worst_herm:.1e} resid {worst_res:.1e} orth {worst_orth:.1e}");
    if worst_herm > 1e-10 || worst_res > 1e-8 || worst_orth > 1e-10 {
        Err(summary)
    } else {
        Ok(summary)
    }
}

// ---------------------------------------------------------------- two-qubit states

pub fn random_complex(r: &mut StdRng) -> Complex64 {
    // Box-Muller normal pair
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    let rad = (-2.0 * u1.ln()).sqrt();
    Complex64::from_polar(rad, 2.0 * PI * u2)
}

pub fn random_pure(r: &mut StdRng) -> [Complex64; 4] {
    let mut psi = [c(0.0, 0.0); 4];
    psi.iter_mut().for_each(|z| *z = random_complex(r));
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= n);
    psi
}

/// Random mixed state of rank 1 to 4.
pub fn random_density(r: &mut StdRng) -> [[Complex64; 4]; 4] {
    let rank = r.gen_range(1..=4);
    let mut rho = [[c(0.0, 0.0); 4]; 4];
    let mut ws: Vec<f64> = (0..rank).map(|_| r.gen_range(0.01..1.0)).collect();
    let s: f64 = ws.iter().sum();
    ws.iter_mut().for_each(|w| *w /= s);
    for w in ws {
        let psi = random_pure(r);
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += psi[i] * psi[j].conj() * w;
            }
        }
    }
    hermitize(rho)
}

pub fn hermitize(mut rho: [[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    for i in 0..4 {
        for j in i..4 {
            let z = (rho[i][j] + rho[j][i].conj()) * 0.5;
            rho[i][j] = z;
            rho[j][i] = z.conj();
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
    rho.iter_mut().for_each(|row| row.iter_mut().for_each(|z| *z /= tr));
    rho
}

/// Haar-like random SU(2) from a unit quaternion.
pub fn random_su2(r: &mut StdRng) -> [[Complex64; 2]; 2] {
    let q: Vec<f64> = (0..4).map(|_| random_complex(r).re).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(q[0] / n, q[1] / n), c(q[2] / n, q[3] / n));
    [[a, -b.conj()], [b, a.conj()]]
}

pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn conjugate_by(u: &[[Complex64; 4]; 4], rho: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = c(0.0, 0.0);
            for k in 0..4 {
                for l in 0..4 {
                    acc += u[i][k] * rho[k][l] * u[j][l].conj();
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Hermiticity, trace and positivity tolerances applied to every density
/// matrix evaluated by the tests.
pub fn check_rho(dm: &DensityMatrix2Q) -> Result<(), String> {
    let mut herm: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            herm = herm.max((dm.rho[i][j] - dm.rho[j][i].conj()).norm());
        }
    }
    let tr = dm.trace();
    let min = dm
        .eigenvalues()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if herm > 1e-12 || (tr - 1.0).abs() > 1e-12 || min < -1e-10 {
        return Err(format!("rho at E_B={} omega={}: herm {herm:e} trace {tr} min eig {min:e}", dm.e_b, dm.omega));
    }
    Ok(())
}
