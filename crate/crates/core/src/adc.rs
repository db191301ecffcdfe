//! Counter-based conversion: the sense output is sampled on every clock edge
//! during the window `t_s` and the ones are counted. A sweep of input
//! voltages gives the transfer curve, its linearity, and a count→code table.

use crate::device::{DeviceStack, StateBit};
use crate::error::{Error, Result};
use crate::llg::{run_recorded, IntegratorParams, MagState};
use crate::magnet::Magnet;
use crate::stats::{fit_line, LineFit};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct AdcParams {
    /// Sampling clock, Hz.
    pub f_clk: f64,
    /// Conversion window, s.
    pub t_s: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Bit precision; the sweep has 2^bits + 1 points.
    pub bits: u32,
}

impl Default for AdcParams {
    fn default() -> Self {
        Self {
            f_clk: 1e9,
            t_s: 10e-6,
            v_min: -0.4,
            v_max: 0.4,
            bits: 4,
        }
    }
}

impl AdcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_clk > 0.0 && self.f_clk.is_finite()) {
            return Err(Error::config("f_clk", "must be finite and > 0"));
        }
        self.n_samples()?;
        if !(self.v_min < self.v_max) {
            return Err(Error::config("v_min", "must be < v_max"));
        }
        if !(1..=20).contains(&self.bits) {
            return Err(Error::config("bits", "must lie in 1..=20"));
        }
        Ok(())
    }

    /// Clock edges in one window (the maximum count).
    pub fn n_samples(&self) -> Result<u64> {
        let n = self.f_clk * self.t_s;
        let r = n.round();
        if !(r >= 1.0) || (n - r).abs() > 1e-6 * r {
            return Err(Error::config(
                "t_s",
                format!("f_clk·t_s must be a positive integer, got {n}"),
            ));
        }
        Ok(r as u64)
    }

    pub fn n_points(&self) -> usize {
        (1usize << self.bits) + 1
    }

    pub fn n_codes(&self) -> u32 {
        1 << self.bits
    }

    /// Equally spaced sweep voltages from `v_min` to `v_max`.
    pub fn voltages(&self) -> Vec<f64> {
        let n = self.n_points();
        let step = (self.v_max - self.v_min) / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { self.v_max } else { self.v_min + i as f64 * step })
            .collect()
    }
}

/// Ones among the first `n_samples` entries of `stream`.
pub fn count_states(stream: &[StateBit], n_samples: usize) -> Result<u64> {
    if stream.len() < n_samples {
        return Err(Error::input(format!(
            "state stream has {} samples, {n_samples} required",
            stream.len()
        )));
    }
    Ok(stream[..n_samples].iter().filter(|b| b.0).count() as u64)
}

/// Result of one conversion window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conversion {
    pub v_in: f64,
    /// m_x averaged over the clock samples.
    pub mean_mx: f64,
    pub c_out: u64,
    pub n_samples: u64,
}

impl Conversion {
    /// Fraction of clock edges that read STATE = 1.
    pub fn duty(&self) -> f64 {
        self.c_out as f64 / self.n_samples as f64
    }
}

/// Runs one conversion window at input `v_in`, starting from `m0`.
pub fn convert(
    magnet: &Magnet,
    dev: &DeviceStack,
    params: &IntegratorParams,
    adc: &AdcParams,
    v_in: f64,
    m0: MagState,
) -> Result<Conversion> {
    let n_samples = adc.n_samples()?;
    let clock = 1.0 / adc.f_clk;
    let mut seen = 0u64;
    let mut ones = 0u64;
    let mut sum_mx = 0.0;
    run_recorded(magnet, params, m0, dev.me_voltage(v_in), adc.t_s, clock, |s| {
        // The record at t = 0 precedes the first clock edge.
        if s.t > 0.0 {
            seen += 1;
            sum_mx += s.m.x;
            ones += dev.state_of(s.m).0 as u64;
        }
    })?;
    debug_assert_eq!(seen, n_samples);
    Ok(Conversion {
        v_in,
        mean_mx: sum_mx / seen as f64,
        c_out: ones,
        n_samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferRow {
    pub v_in: f64,
    pub mean_mx: f64,
    pub c_out: u64,
    pub code: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferCurve {
    pub rows: Vec<TransferRow>,
    /// Least-squares line of `c_out` against `v_in`.
    pub fit: LineFit,
    pub nrmsd_percent: f64,
    pub n_samples: u64,
    pub bits: u32,
}

impl TransferCurve {
    pub fn counts(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.v_in, r.c_out as f64)).collect()
    }

    pub fn mean_mx(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.v_in, r.mean_mx)).collect()
    }
}

/// Converts every sweep voltage (point `i` on random stream `i` under
/// `params.seed`), fits the count line and attaches NRMSD and codes.
/// Points run on the current rayon pool; results do not depend on it.
pub fn sweep_transfer_curve(
    magnet: &Magnet,
    dev: &DeviceStack,
    params: &IntegratorParams,
    adc: &AdcParams,
) -> Result<TransferCurve> {
    adc.validate()?;
    let conversions = convert_all(magnet, dev, params, adc, &adc.voltages())?;
    transfer_curve_from(&conversions, adc)
}

/// One conversion per voltage, point `i` on stream `i`, in input order.
pub fn convert_all(
    magnet: &Magnet,
    dev: &DeviceStack,
    params: &IntegratorParams,
    adc: &AdcParams,
    voltages: &[f64],
) -> Result<Vec<Conversion>> {
    voltages
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            convert(magnet, dev, &params.for_stream(i as u64), adc, v, MagState::default_initial())
        })
        .collect()
}

/// Builds the fitted, coded transfer curve from finished conversions.
pub fn transfer_curve_from(conversions: &[Conversion], adc: &AdcParams) -> Result<TransferCurve> {
    let mut rows: Vec<TransferRow> = conversions
        .iter()
        .map(|c| TransferRow {
            v_in: c.v_in,
            mean_mx: c.mean_mx,
            c_out: c.c_out,
            code: 0,
        })
        .collect();
    rows.sort_by(|a, b| a.v_in.total_cmp(&b.v_in));
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.v_in, r.c_out as f64)).collect();
    let fit = fit_line(&points)?;
    let nrmsd_percent = nrmsd(&points)?;
    let n_samples = adc.n_samples()?;
    let mut curve = TransferCurve {
        rows,
        fit,
        nrmsd_percent,
        n_samples,
        bits: adc.bits,
    };
    if let Ok(lut) = calibrate_lut(&curve) {
        for r in &mut curve.rows {
            r.code = lut.code(r.c_out);
        }
    }
    Ok(curve)
}

/// RMS deviation from the least-squares line in percent of the fitted
/// range. A flat fit is normalized by the data range instead.
pub fn nrmsd(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::input("nrmsd needs at least 3 points"));
    }
    let fit = fit_line(points)?;
    let n = points.len() as f64;
    let rms = (points.iter().map(|&(x, y)| (y - fit.at(x)).powi(2)).sum::<f64>() / n).sqrt();
    let (x_lo, x_hi) = min_max(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = min_max(points.iter().map(|p| p.1));
    let fitted_range = (fit.slope * (x_hi - x_lo)).abs();
    let y_scale = y_lo.abs().max(y_hi.abs());
    let range = if fitted_range > 1e-12 * y_scale {
        fitted_range
    } else {
        y_hi - y_lo
    };
    if range == 0.0 {
        return Ok(0.0);
    }
    Ok(100.0 * rms / range)
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Count→code map with bin edges on the fitted line.
#[derive(Clone, Debug, PartialEq)]
pub struct Lut {
    /// Ascending count thresholds; a count at or above `edges[k]` maps to a
    /// code above `k`.
    pub edges: Vec<f64>,
    pub n_samples: u64,
}

impl Lut {
    pub fn code(&self, count: u64) -> u32 {
        let c = count as f64;
        self.edges.partition_point(|&e| e <= c) as u32
    }

    pub fn n_codes(&self) -> u32 {
        self.edges.len() as u32 + 1
    }

    /// Code for every count from 0 to `n_samples`.
    pub fn table(&self) -> Vec<u32> {
        (0..=self.n_samples).map(|c| self.code(c)).collect()
    }
}

/// Splits the fitted count range over the swept voltages into `2^bits`
/// equal bins.
pub fn calibrate_lut(curve: &TransferCurve) -> Result<Lut> {
    if !(curve.fit.slope > 0.0) {
        return Err(Error::Calibration(format!(
            "count line must rise with input, slope = {}",
            curve.fit.slope
        )));
    }
    let (Some(first), Some(last)) = (curve.rows.first(), curve.rows.last()) else {
        return Err(Error::Calibration("empty transfer curve".into()));
    };
    let lo = curve.fit.at(first.v_in);
    let hi = curve.fit.at(last.v_in);
    let n_codes = 1u64 << curve.bits;
    let width = (hi - lo) / n_codes as f64;
    let edges = (1..n_codes).map(|j| lo + j as f64 * width).collect();
    Ok(Lut {
        edges,
        n_samples: curve.n_samples,
    })
}
