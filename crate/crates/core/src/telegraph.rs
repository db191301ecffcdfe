//! Telegraph-noise analysis: dwell times between switching events, the
//! Néel–Arrhenius lifetime fit, and pulsed switching probability of
//! high-barrier magnets.

use crate::consts::kt;
use crate::error::{Error, Result};
use crate::llg::{steps_per_record, Integrator, IntegratorParams, MagState, TraceRecord};
use crate::magnet::{Magnet, MagnetConfig};
use crate::stats::{fit_line, wilson_interval, Z95};
use crate::vector::Vec3;
use rayon::prelude::*;

/// Default Schmitt thresholds on m_x.
pub const DEFAULT_HI: f64 = 0.5;
pub const DEFAULT_LO: f64 = -0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// m_x near +1 (parallel to the pinned layer).
    Up,
    Down,
}

/// Complete dwell intervals per state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DwellStats {
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub n_transitions: usize,
}

impl DwellStats {
    pub fn is_sufficient(&self) -> bool {
        self.n_transitions >= 2
    }

    pub fn mean_up(&self) -> Option<f64> {
        mean_of(&self.up)
    }

    pub fn mean_down(&self) -> Option<f64> {
        mean_of(&self.down)
    }

    /// Mean over all complete dwells of both states.
    pub fn mean_dwell(&self) -> Option<f64> {
        let n = self.up.len() + self.down.len();
        (n > 0).then(|| (self.up.iter().sum::<f64>() + self.down.iter().sum::<f64>()) / n as f64)
    }

    pub fn total(&self) -> f64 {
        self.up.iter().sum::<f64>() + self.down.iter().sum::<f64>()
    }

    /// `(level, dwell)` pairs, up dwells first.
    pub fn rows(&self) -> impl Iterator<Item = (Level, f64)> + '_ {
        self.up
            .iter()
            .map(|&d| (Level::Up, d))
            .chain(self.down.iter().map(|&d| (Level::Down, d)))
    }
}

fn mean_of(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Two-threshold state tracker fed one sample at a time. Crossing times are
/// interpolated linearly between samples.
#[derive(Clone, Debug)]
pub struct DwellDetector {
    hi: f64,
    lo: f64,
    level: Option<Level>,
    prev: Option<(f64, f64)>,
    last_change: Option<f64>,
    stats: DwellStats,
}

impl DwellDetector {
    pub fn new(hi: f64, lo: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::input(format!("thresholds need hi > lo, got {hi} <= {lo}")));
        }
        Ok(Self {
            hi,
            lo,
            level: None,
            prev: None,
            last_change: None,
            stats: DwellStats::default(),
        })
    }

    pub fn feed(&mut self, t: f64, mx: f64) {
        match self.level {
            None => {
                if mx > self.hi {
                    self.level = Some(Level::Up);
                } else if mx < self.lo {
                    self.level = Some(Level::Down);
                }
            }
            Some(Level::Up) if mx < self.lo => self.switch(Level::Down, t, mx, self.lo),
            Some(Level::Down) if mx > self.hi => self.switch(Level::Up, t, mx, self.hi),
            Some(_) => {}
        }
        self.prev = Some((t, mx));
    }

    fn switch(&mut self, to: Level, t: f64, mx: f64, threshold: f64) {
        let tc = match self.prev {
            Some((t0, x0)) if x0 != mx => t0 + (x0 - threshold) / (x0 - mx) * (t - t0),
            _ => t,
        };
        if let Some(since) = self.last_change {
            let dwell = tc - since;
            match to {
                Level::Down => self.stats.up.push(dwell),
                Level::Up => self.stats.down.push(dwell),
            }
        }
        self.last_change = Some(tc);
        self.level = Some(to);
        self.stats.n_transitions += 1;
    }

    pub fn finish(self) -> DwellStats {
        self.stats
    }
}

/// Dwell statistics of a recorded trace. The partial dwells before the
/// first and after the last transition are dropped.
pub fn extract_dwells(trace: &TraceRecord, hi: f64, lo: f64) -> Result<DwellStats> {
    let mut det = DwellDetector::new(hi, lo)?;
    for s in &trace.samples {
        det.feed(s.t, s.m.x);
    }
    Ok(det.finish())
}

/// Simulates `duration` at ME voltage `v_me` and collects dwells on the fly,
/// without storing the trace.
pub fn simulate_dwells(
    magnet: &Magnet,
    params: &IntegratorParams,
    v_me: f64,
    duration: f64,
    record_every: f64,
    hi: f64,
    lo: f64,
) -> Result<DwellStats> {
    let mut det = DwellDetector::new(hi, lo)?;
    crate::llg::run_recorded(
        magnet,
        params,
        MagState::default_initial(),
        v_me,
        duration,
        record_every,
        |s| det.feed(s.t, s.m.x),
    )?;
    Ok(det.finish())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrheniusFit {
    /// Attempt time, s.
    pub t_l0_fit: f64,
    /// d ln(t_l) / d(E_B/kT); 1 for an exact Arrhenius law.
    pub slope_fit: f64,
    pub r_squared: f64,
}

/// Minimum barrier span of an Arrhenius fit, in kT.
pub const MIN_ARRHENIUS_SPAN_KT: f64 = 1.0;

/// Fits ln(mean dwell) against E_B/kT. `points` are `(E_B [J], dwell [s])`.
pub fn fit_arrhenius(points: &[(f64, f64)], temperature: f64) -> Result<ArrheniusFit> {
    if points.len() < 3 {
        return Err(Error::input(format!(
            "Arrhenius fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if !(temperature > 0.0) {
        return Err(Error::input("temperature must be > 0"));
    }
    let kt = kt(temperature);
    let mut xy = Vec::with_capacity(points.len());
    for &(e_b, dwell) in points {
        if !(dwell > 0.0 && dwell.is_finite()) {
            return Err(Error::input(format!("dwell times must be positive, got {dwell}")));
        }
        xy.push((e_b / kt, dwell.ln()));
    }
    let (lo, hi) = xy
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.0), h.max(p.0)));
    if hi - lo < MIN_ARRHENIUS_SPAN_KT * (1.0 - 1e-9) {
        return Err(Error::input(format!(
            "barriers span {:.3} kT, need at least {MIN_ARRHENIUS_SPAN_KT} kT",
            hi - lo
        )));
    }
    let fit = fit_line(&xy)?;
    Ok(ArrheniusFit {
        t_l0_fit: fit.intercept.exp(),
        slope_fit: fit.slope,
        r_squared: fit.r_squared,
    })
}

/// One rung of a simulated barrier ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderPoint {
    pub e_b_over_kt: f64,
    pub dwells: DwellStats,
}

impl LadderPoint {
    pub fn mean_dwell(&self) -> Option<f64> {
        self.dwells.mean_dwell()
    }
}

/// Zero-bias dwell statistics for `base` re-tuned to each barrier in
/// `barriers_kt` (K_u2 adjusted, geometry fixed). Rung `i` uses stream `i`.
pub fn simulate_ladder(
    base: &MagnetConfig,
    params: &IntegratorParams,
    barriers_kt: &[f64],
    duration: f64,
    record_every: f64,
    hi: f64,
    lo: f64,
) -> Result<Vec<LadderPoint>> {
    barriers_kt
        .par_iter()
        .enumerate()
        .map(|(i, &eb)| {
            let magnet = Magnet::new(base.clone().with_barrier_kt(eb))?;
            let dwells = simulate_dwells(
                &magnet,
                &params.for_stream(i as u64),
                0.0,
                duration,
                record_every,
                hi,
                lo,
            )?;
            Ok(LadderPoint {
                e_b_over_kt: eb,
                dwells,
            })
        })
        .collect()
}

/// Fits the ladder; rungs without complete dwells are an error.
pub fn fit_ladder(points: &[LadderPoint], temperature: f64) -> Result<ArrheniusFit> {
    let kt = kt(temperature);
    let pts = points
        .iter()
        .map(|p| {
            p.mean_dwell()
                .map(|d| (p.e_b_over_kt * kt, d))
                .ok_or_else(|| Error::input(format!("no complete dwell at {} kT", p.e_b_over_kt)))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_arrhenius(&pts, temperature)
}

/// Pulse experiment timing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseProtocol {
    /// Pulse duration, s.
    pub t_pulse: f64,
    /// Zero-bias relaxation after the pulse, s.
    pub t_settle: f64,
    pub n_trials: u64,
}

impl Default for PulseProtocol {
    fn default() -> Self {
        Self {
            t_pulse: 10e-9,
            t_settle: 10e-9,
            n_trials: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchingRow {
    pub v_pulse: f64,
    pub p_switch: f64,
    pub successes: u64,
    pub n_trials: u64,
    /// Wilson 95% interval.
    pub ci: (f64, f64),
}

/// Smallest barrier accepted by the pulse experiment, in kT.
pub const MIN_PULSE_BARRIER_KT: f64 = 10.0;

/// Starting direction of a pulse trial: antiparallel with a small tilt.
pub fn pulse_initial_state() -> MagState {
    MagState::new(Vec3::new(-1.0, 1e-3, 0.0))
}

/// Runs `protocol.n_trials` pulse trials at ME voltage `v_pulse`. Trial `j`
/// draws from stream `(point << 32) | j`.
pub fn switching_probability(
    magnet: &Magnet,
    params: &IntegratorParams,
    v_pulse: f64,
    protocol: &PulseProtocol,
    point: u32,
) -> Result<SwitchingRow> {
    if magnet.config().barrier_over_kt() < MIN_PULSE_BARRIER_KT {
        return Err(Error::input(format!(
            "pulse experiment needs E_B >= {MIN_PULSE_BARRIER_KT} kT, got {:.2} kT",
            magnet.config().barrier_over_kt()
        )));
    }
    if protocol.n_trials == 0 {
        return Err(Error::input("n_trials must be >= 1"));
    }
    if protocol.n_trials > u32::MAX as u64 {
        return Err(Error::input("n_trials must fit in 32 bits"));
    }
    let pulse_steps = whole_steps(protocol.t_pulse, params.dt)?;
    let settle_steps = whole_steps(protocol.t_settle, params.dt)?;
    let successes = (0..protocol.n_trials)
        .into_par_iter()
        .map(|j| {
            let p = params.for_stream(((point as u64) << 32) | j);
            let mut integ = Integrator::new(magnet, &p, v_pulse)?;
            let s = integ.advance(pulse_initial_state(), pulse_steps)?;
            integ.set_voltage(0.0);
            let s = integ.advance(s, settle_steps)?;
            Ok((s.m.x > 0.0) as u64)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    Ok(SwitchingRow {
        v_pulse,
        p_switch: successes as f64 / protocol.n_trials as f64,
        successes,
        n_trials: protocol.n_trials,
        ci: wilson_interval(successes, protocol.n_trials, Z95),
    })
}

fn whole_steps(duration: f64, dt: f64) -> Result<u64> {
    if duration == 0.0 {
        return Ok(0);
    }
    steps_per_record(dt, duration)
}

/// Switching probability at every voltage in `voltages`.
pub fn switching_curve(
    magnet: &Magnet,
    params: &IntegratorParams,
    voltages: &[f64],
    protocol: &PulseProtocol,
) -> Result<Vec<SwitchingRow>> {
    voltages
        .iter()
        .enumerate()
        .map(|(i, &v)| switching_probability(magnet, params, v, protocol, i as u32))
        .collect()
}
