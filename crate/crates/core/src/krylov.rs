//! Rayleigh-Ritz solve of a large symmetric block on the block Krylov space
//! generated by a few seed vectors.
//!
//! Every quantity of the form `s† f(H) s'` with `s, s'` in the seed span and
//! `f` a polynomial of degree below twice the space depth is reproduced
//! exactly, which covers the XPS line moments and the resolvent acting on the
//! photoemission vectors.

use faer::Mat;

use crate::error::Result;
use crate::hamiltonian::{solve_dense, EigenSystem};
use crate::operator::OperatorMatrix;

/// Ritz pairs of a block together with the flag telling whether they are the
/// full spectrum of the seed-reachable subspace.
#[derive(Clone, Debug)]
pub struct RitzSystem {
    pub values: Vec<f64>,
    /// Columns are Ritz vectors over the block basis.
    pub vectors: Mat<f64>,
    /// True when the space is invariant under `H` (or is the whole block).
    pub exact: bool,
}

impl RitzSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<EigenSystem> for RitzSystem {
    fn from(e: EigenSystem) -> Self {
        Self {
            values: e.values,
            vectors: e.vectors,
            exact: true,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalize `w` against `basis` twice; returns the remaining norm.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            if c != 0.0 {
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
    }
    norm(w)
}

/// Solve `h` on the block Krylov space of `seeds` of dimension at most
/// `max_dim`. Blocks no larger than `max_dim` are diagonalized densely.
pub fn krylov_ritz(h: &OperatorMatrix<f64>, seeds: &[Vec<f64>], max_dim: usize) -> Result<RitzSystem> {
    let n = h.nrows();
    if n <= max_dim {
        return Ok(solve_dense(&h.to_dense())?.into());
    }
    let scale = h.max_abs().max(1.0);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut hq: Vec<Vec<f64>> = Vec::new();
    for s in seeds {
        if q.len() == max_dim {
            break;
        }
        let mut w = s.clone();
        let initial = norm(&w);
        if initial == 0.0 {
            continue;
        }
        let r = orthogonalize(&q, &mut w);
        if r > 1e-10 * initial {
            w.iter_mut().for_each(|x| *x /= r);
            q.push(w);
        }
    }
    let mut next = 0;
    while next < q.len() {
        let mut w = vec![0.0; n];
        h.apply_real(&q[next], &mut w);
        hq.push(w.clone());
        next += 1;
        if q.len() < max_dim {
            let r = orthogonalize(&q, &mut w);
            if r > 1e-10 * scale {
                w.iter_mut().for_each(|x| *x /= r);
                q.push(w);
            }
        }
    }
    let m = q.len();
    let exact = m < max_dim;
    let qm = Mat::<f64>::from_fn(n, m, |i, j| q[j][i]);
    let hqm = Mat::<f64>::from_fn(n, m, |i, j| hq[j][i]);
    let raw = qm.transpose() * &hqm;
    let t = Mat::<f64>::from_fn(m, m, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    let small = solve_dense(&t)?;
    let vectors = &qm * &small.vectors;
    Ok(RitzSystem {
        values: small.values,
        vectors,
        exact,
    })
}
