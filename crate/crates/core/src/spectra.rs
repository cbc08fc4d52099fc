//! Line spectra, Voigt broadening and gridded spectra.

use std::f64::consts::PI;
use std::fmt::Write as _;

use errorfunctions::w_with_relerror;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Width;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub position: f64,
    pub weight: f64,
}

/// δ-function spectrum of one resolution channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineSpectrum {
    pub label: String,
    pub lines: Vec<Line>,
}

impl LineSpectrum {
    pub fn total_weight(&self) -> f64 {
        self.lines.iter().map(|l| l.weight).sum()
    }

    /// Summed weight of lines with `lo <= position < hi`.
    pub fn weight_between(&self, lo: f64, hi: f64) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.position >= lo && l.position < hi)
            .map(|l| l.weight)
            .sum()
    }
}

pub fn check_width(width: Width) -> Result<()> {
    let ok = width.lorentz >= 0.0
        && width.gauss >= 0.0
        && width.lorentz.is_finite()
        && width.gauss.is_finite()
        && (width.lorentz > 0.0 || width.gauss > 0.0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidBroadening {
            lorentz: width.lorentz,
            gauss: width.gauss,
        })
    }
}

/// Unit-area Voigt profile with Lorentzian HWHM `lorentz` and Gaussian HWHM
/// `gauss`, evaluated through the Faddeeva function.
pub fn voigt(x: f64, width: Width) -> f64 {
    let (gamma, hwhm) = (width.lorentz, width.gauss);
    if hwhm == 0.0 {
        return gamma / PI / (x * x + gamma * gamma);
    }
    let sigma = hwhm / (2.0 * 2f64.ln()).sqrt();
    let z = Complex64::new(x, gamma) / (sigma * 2f64.sqrt());
    w_with_relerror(z, 1e-13).re / (sigma * (2.0 * PI).sqrt())
}

pub fn lorentzian(x: f64, hwhm: f64) -> f64 {
    hwhm / PI / (x * x + hwhm * hwhm)
}

/// Sum of unit-area Voigt profiles times line weights on `grid`.
pub fn voigt_broaden(lines: &[Line], width: Width, grid: &[f64]) -> Result<Vec<f64>> {
    check_width(width)?;
    Ok(grid
        .iter()
        .map(|&x| lines.iter().map(|l| l.weight * voigt(x - l.position, width)).sum())
        .collect())
}

/// [`voigt_broaden`] for several channels whose lines share `positions`;
/// each profile is evaluated once and reused for every channel.
pub fn voigt_broaden_shared(positions: &[f64], weights: &[Vec<f64>], width: Width, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_width(width)?;
    if weights.iter().any(|w| w.len() != positions.len()) {
        return Err(Error::BasisMismatch("one weight per line position required".into()));
    }
    let live: Vec<usize> = (0..positions.len())
        .filter(|&l| weights.iter().any(|w| w[l] != 0.0))
        .collect();
    let mut out = vec![vec![0.0; grid.len()]; weights.len()];
    for (j, &x) in grid.iter().enumerate() {
        for &l in &live {
            let k = voigt(x - positions[l], width);
            for (c, w) in weights.iter().enumerate() {
                out[c][j] += w[l] * k;
            }
        }
    }
    Ok(out)
}

/// Intensities of several channels on one axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumGrid {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub channels: Vec<(String, Vec<f64>)>,
}

impl SpectrumGrid {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// CSV with a header row and 17 significant digits; `offset` is added to the axis.
    pub fn to_csv(&self, offset: f64) -> String {
        let mut out = String::new();
        out.push_str(&self.axis_name);
        for (name, _) in &self.channels {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, x) in self.axis.iter().enumerate() {
            let _ = write!(out, "{:.16e}", x + offset);
            for (_, v) in &self.channels {
                let _ = write!(out, ",{:.16e}", v[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Interior local maxima, strongest first.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks: Vec<usize> = (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks
}
