//! Deterministic choice of the (E_B, ω) point at which metrics are reported.

use serde::Serialize;

use crate::entanglement::{density_matrix, report, DensityMatrix2Q, EntanglementReport, IdealState};
use crate::error::{Error, Result};
use crate::model::GridSpec;
use crate::simulation::{AmplitudeSet, Simulation};
use crate::spectra::{argmax, SpectrumGrid};

/// Total XEPECS weight at each node of `binding`.
pub fn xepecs_weight_profile(sim: &Simulation, binding: &GridSpec) -> Result<Vec<(f64, f64)>> {
    binding
        .nodes()
        .into_iter()
        .map(|e| Ok((e, sim.xepecs_weight(e)?)))
        .collect()
}

/// Binding energy of largest total XEPECS weight; ties go to lower `E_B`.
pub fn brightest_binding(profile: &[(f64, f64)]) -> Result<f64> {
    let w: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let i = argmax(&w).ok_or_else(|| Error::InvalidGrid("empty binding grid".into()))?;
    if !(w[i] > 0.0) {
        return Err(Error::NoSignal);
    }
    Ok(profile[i].0)
}

/// Emission energy of largest total XEPECS intensity on `omega`.
pub fn brightest_omega(sim: &Simulation, amplitudes: &AmplitudeSet, omega: &[f64]) -> Result<f64> {
    let spec = sim.xepecs_spectrum_from(amplitudes, omega)?;
    let total = spec.channel("total").expect("total channel");
    let i = argmax(total).ok_or_else(|| Error::InvalidGrid("empty omega grid".into()))?;
    if !(total[i] > 0.0) {
        return Err(Error::NoSignal);
    }
    Ok(omega[i])
}

/// Intensity-weighted mean of `channel` over `lo <= x < hi`.
pub fn centroid(spec: &SpectrumGrid, channel: &str, lo: f64, hi: f64) -> Option<f64> {
    let v = spec.channel(channel)?;
    let (mut s, mut sx) = (0.0, 0.0);
    for (x, y) in spec.axis.iter().zip(v) {
        if *x >= lo && *x < hi {
            s += y;
            sx += x * y;
        }
    }
    (s > 0.0).then(|| sx / s)
}

#[derive(Clone, Debug, Serialize)]
pub struct PeakSummary {
    /// Arg-max of the total broadened XPS.
    pub main_peak: f64,
    /// Centroid of total XPS below the midpoint between main peak and satellite.
    pub main_centroid: f64,
    /// Arg-max of the total XEPECS weight over the binding grid.
    pub satellite: f64,
}

impl PeakSummary {
    pub fn separation(&self) -> f64 {
        self.satellite - self.main_centroid
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.main_peak + self.satellite)
    }
}

pub fn peak_summary(xps: &SpectrumGrid, profile: &[(f64, f64)]) -> Result<PeakSummary> {
    let total = xps.channel("total").ok_or(Error::NoSignal)?;
    let i = argmax(total).ok_or(Error::NoSignal)?;
    let main_peak = xps.axis[i];
    let satellite = brightest_binding(profile)?;
    let mid = 0.5 * (main_peak + satellite);
    let (lo, hi) = if satellite > main_peak {
        (f64::NEG_INFINITY, mid)
    } else {
        (mid, f64::INFINITY)
    };
    let main_centroid = centroid(xps, "total", lo, hi).ok_or(Error::NoSignal)?;
    Ok(PeakSummary {
        main_peak,
        main_centroid,
        satellite,
    })
}

/// Density matrix and metrics at the default reporting point.
#[derive(Clone, Debug)]
pub struct MetricsPoint {
    pub e_b: f64,
    pub omega: f64,
    pub density: DensityMatrix2Q,
    pub report: EntanglementReport,
}

pub fn metrics_at(sim: &Simulation, e_b: f64, omega: Option<f64>, ideal: IdealState) -> Result<MetricsPoint> {
    let amplitudes = sim.xepecs_amplitudes(e_b)?;
    let omega = match omega {
        Some(w) => w,
        None => brightest_omega(sim, &amplitudes, &sim.model.config.grids.omega.nodes())?,
    };
    let density = density_matrix(sim, &amplitudes, omega)?;
    let report = report(&density, ideal)?;
    Ok(MetricsPoint {
        e_b,
        omega,
        density,
        report,
    })
}

/// Metrics at the brightest binding energy and its brightest emission energy.
pub fn default_metrics(sim: &Simulation, ideal: IdealState) -> Result<MetricsPoint> {
    let profile = xepecs_weight_profile(sim, &sim.model.config.grids.binding)?;
    let e_b = brightest_binding(&profile)?;
    metrics_at(sim, e_b, None, ideal)
}
