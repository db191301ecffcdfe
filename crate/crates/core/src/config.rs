//! Flat `key = value` parameter files.
//!
//! One parameter per line in SI units, `#` starts a comment, lists are
//! comma-separated. Unknown or repeated keys are errors. Every key has a
//! default, so an empty file describes the low-barrier device.

use crate::adc::AdcParams;
use crate::device::DeviceStack;
use crate::error::{Error, Result};
use crate::llg::IntegratorParams;
use crate::magnet::{Magnet, MagnetConfig};
use crate::telegraph::{PulseProtocol, DEFAULT_HI, DEFAULT_LO};
use std::collections::BTreeMap;

/// Every accepted key, in the order used when a config is written back out.
pub const KEYS: &[&str] = &[
    // magnet
    "length_x",
    "length_y",
    "thickness",
    "ms",
    "alpha",
    "ku2",
    "e_b_kt",
    "ki",
    "t_me",
    "alpha_me",
    "temperature",
    "gamma",
    // integrator
    "dt",
    "seed",
    "renorm_tol",
    // device
    "r_p",
    "r_ap",
    "r_ref",
    "v_read",
    "v_threshold",
    "me_polarity",
    // adc
    "f_clk",
    "t_s",
    "v_min",
    "v_max",
    "bits",
    // sweep
    "sweep_voltages",
    // trace
    "trace_duration",
    "record_every",
    "trace_voltages",
    // dwell / arrhenius
    "dwell_duration",
    "dwell_record_every",
    "dwell_hi",
    "dwell_lo",
    "dwell_voltage",
    "eb_ladder",
    "t_l0",
    // pulse switching
    "t_pulse",
    "t_settle",
    "n_trials",
    "psw_voltages",
];

/// Raw key/value pairs with the line each came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Entries {
    map: BTreeMap<String, (String, Option<usize>)>,
}

impl Entries {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    key: content.to_string(),
                    line: Some(line),
                    msg: "expected `key = value`".into(),
                });
            };
            let key = key.trim();
            if e.map.contains_key(key) {
                return Err(Error::Config {
                    key: key.to_string(),
                    line: Some(line),
                    msg: "duplicate key".into(),
                });
            }
            e.insert(key, value.trim(), Some(line))?;
        }
        Ok(e)
    }

    fn insert(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                key: key.to_string(),
                line,
                msg: "unknown key".into(),
            });
        }
        self.map.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    /// Sets `key`, replacing any value from the file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.insert(key, value, None)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::Config {
            key: key.to_string(),
            line: self.map.get(key).and_then(|v| v.1),
            msg: msg.into(),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some((v, _)) => parse_f64(v).ok_or_else(|| self.err(key, format!("not a number: `{v}`"))),
        }
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.map.get(key).map(|_| self.f64(key, 0.0)).transpose()
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.map.get(key) {
            None => Ok(default),
            Some((v, _)) => v
                .parse()
                .map_err(|_| self.err(key, format!("not a non-negative integer: `{v}`"))),
        }
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some((v, _)) => {
                let items: Option<Vec<f64>> = v.split(',').map(|s| parse_f64(s.trim())).collect();
                match items {
                    Some(xs) if !xs.is_empty() => Ok(xs),
                    _ => Err(self.err(key, format!("not a comma-separated number list: `{v}`"))),
                }
            }
        }
    }

    /// Attaches the source line of `key` to a validation error.
    fn locate(&self, err: Error) -> Error {
        match err {
            Error::Config { key, line: None, msg } => {
                let line = self.map.get(&key).and_then(|v| v.1);
                Error::Config { key, line, msg }
            }
            other => other,
        }
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepParams {
    /// Input voltages for the ⟨m_x⟩ sweep.
    pub voltages: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceParams {
    pub duration: f64,
    pub record_every: f64,
    /// Input voltages, one trace each.
    pub voltages: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DwellParams {
    pub duration: f64,
    pub record_every: f64,
    pub hi: f64,
    pub lo: f64,
    /// Input voltage for the `dwell` experiment.
    pub v_in: f64,
    /// Barrier ladder, in kT, for the Arrhenius experiment.
    pub ladder_kt: Vec<f64>,
    /// Attempt time used for the predicted lifetime in reports, s.
    pub t_l0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseParams {
    pub protocol: PulseProtocol,
    /// ME-oxide pulse voltages.
    pub voltages: Vec<f64>,
}

/// Fully resolved, validated parameters for every experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub magnet: MagnetConfig,
    pub integrator: IntegratorParams,
    pub device: DeviceStack,
    pub adc: AdcParams,
    pub sweep: SweepParams,
    pub trace: TraceParams,
    pub dwell: DwellParams,
    pub pulse: PulseParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::from_entries(&Entries::default()).expect("defaults are valid")
    }
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_entries(&Entries::parse(text)?)
    }

    pub fn from_entries(e: &Entries) -> Result<Self> {
        let d = MagnetConfig::low_barrier();
        let mut magnet = MagnetConfig {
            length_x: e.f64("length_x", d.length_x)?,
            length_y: e.f64("length_y", d.length_y)?,
            thickness: e.f64("thickness", d.thickness)?,
            ms: e.f64("ms", d.ms)?,
            alpha: e.f64("alpha", d.alpha)?,
            ku2: e.f64("ku2", d.ku2)?,
            ki: e.f64("ki", d.ki)?,
            t_me: e.f64("t_me", d.t_me)?,
            alpha_me: e.f64("alpha_me", d.alpha_me)?,
            temperature: e.f64("temperature", d.temperature)?,
            gamma: e.f64("gamma", d.gamma)?,
        };
        if let Some(eb) = e.opt_f64("e_b_kt")? {
            if e.map.contains_key("ku2") {
                return Err(e.err("e_b_kt", "give either ku2 or e_b_kt, not both"));
            }
            if !(eb >= 0.0) {
                return Err(e.err("e_b_kt", "must be >= 0"));
            }
            magnet = magnet.with_barrier_kt(eb);
        }
        magnet.validate().map_err(|err| e.locate(err))?;

        let di = IntegratorParams::default();
        let integrator = IntegratorParams {
            dt: e.f64("dt", di.dt)?,
            seed: e.u64("seed", di.seed)?,
            stream: 0,
            renorm_tol: e.f64("renorm_tol", di.renorm_tol)?,
        };
        integrator.validate().map_err(|err| e.locate(err))?;

        let mut device = DeviceStack::default();
        device.mtj.r_p = e.f64("r_p", device.mtj.r_p)?;
        device.mtj.r_ap = e.f64("r_ap", device.mtj.r_ap)?;
        device.sense.v_read = e.f64("v_read", device.sense.v_read)?;
        device.sense.r_ref = e.f64("r_ref", (device.mtj.r_p * device.mtj.r_ap).sqrt())?;
        device.sense.v_threshold = e.f64("v_threshold", device.sense.v_read / 2.0)?;
        device.me_polarity = e.f64("me_polarity", device.me_polarity)?;
        device.validate().map_err(|err| e.locate(err))?;

        let da = AdcParams::default();
        let bits = e.u64("bits", da.bits as u64)?;
        let adc = AdcParams {
            f_clk: e.f64("f_clk", da.f_clk)?,
            t_s: e.f64("t_s", da.t_s)?,
            v_min: e.f64("v_min", da.v_min)?,
            v_max: e.f64("v_max", da.v_max)?,
            bits: u32::try_from(bits).map_err(|_| e.err("bits", "too large"))?,
        };
        adc.validate().map_err(|err| e.locate(err))?;

        let grid: Vec<f64> = (0..9).map(|i| -0.4 + 0.1 * i as f64).collect();
        let sweep = SweepParams {
            voltages: e.list("sweep_voltages", &grid)?,
        };

        let trace = TraceParams {
            duration: e.f64("trace_duration", 500e-9)?,
            record_every: e.f64("record_every", 1.0 / adc.f_clk)?,
            voltages: e.list("trace_voltages", &[-0.8, 0.0, 0.8])?,
        };
        if !(trace.duration >= 0.0) {
            return Err(e.err("trace_duration", "must be >= 0"));
        }
        check_cadence(e, "record_every", trace.record_every, integrator.dt)?;

        let dwell = DwellParams {
            duration: e.f64("dwell_duration", 20e-6)?,
            record_every: e.f64("dwell_record_every", 5e-12)?,
            hi: e.f64("dwell_hi", DEFAULT_HI)?,
            lo: e.f64("dwell_lo", DEFAULT_LO)?,
            v_in: e.f64("dwell_voltage", 0.0)?,
            ladder_kt: e.list("eb_ladder", &[0.5, 1.0, 1.5, 2.0])?,
            t_l0: e.f64("t_l0", 1e-9)?,
        };
        if !(dwell.duration > 0.0) {
            return Err(e.err("dwell_duration", "must be > 0"));
        }
        check_cadence(e, "dwell_record_every", dwell.record_every, integrator.dt)?;
        if !(dwell.hi > dwell.lo) {
            return Err(e.err("dwell_hi", "must exceed dwell_lo"));
        }
        if dwell.ladder_kt.iter().any(|&x| !(x >= 0.0)) {
            return Err(e.err("eb_ladder", "barriers must be >= 0"));
        }
        if !(dwell.t_l0 > 0.0) {
            return Err(e.err("t_l0", "must be > 0"));
        }

        let dp = PulseProtocol::default();
        let pulse = PulseParams {
            protocol: PulseProtocol {
                t_pulse: e.f64("t_pulse", dp.t_pulse)?,
                t_settle: e.f64("t_settle", dp.t_settle)?,
                n_trials: e.u64("n_trials", dp.n_trials)?,
            },
            voltages: e.list("psw_voltages", &[0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0])?,
        };
        for key in ["t_pulse", "t_settle"] {
            let v = if key == "t_pulse" { pulse.protocol.t_pulse } else { pulse.protocol.t_settle };
            if !(v >= 0.0) {
                return Err(e.err(key, "must be >= 0"));
            }
            if v > 0.0 {
                check_cadence(e, key, v, integrator.dt)?;
            }
        }
        if pulse.protocol.n_trials == 0 {
            return Err(e.err("n_trials", "must be >= 1"));
        }

        Ok(Self {
            magnet,
            integrator,
            device,
            adc,
            sweep,
            trace,
            dwell,
            pulse,
        })
    }

    /// Validated magnet with precomputed fields.
    pub fn build_magnet(&self) -> Result<Magnet> {
        Magnet::new(self.magnet.clone())
    }

    /// Every resolved parameter as `(key, value)`, in [`KEYS`] order.
    /// `e_b_kt` is reported for information; `ku2` carries the value used.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let m = &self.magnet;
        let f = |x: f64| format!("{x:e}");
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "length_x" => f(m.length_x),
                    "length_y" => f(m.length_y),
                    "thickness" => f(m.thickness),
                    "ms" => f(m.ms),
                    "alpha" => f(m.alpha),
                    "ku2" => f(m.ku2),
                    "e_b_kt" => f(m.barrier_over_kt()),
                    "ki" => f(m.ki),
                    "t_me" => f(m.t_me),
                    "alpha_me" => f(m.alpha_me),
                    "temperature" => f(m.temperature),
                    "gamma" => f(m.gamma),
                    "dt" => f(self.integrator.dt),
                    "seed" => self.integrator.seed.to_string(),
                    "renorm_tol" => f(self.integrator.renorm_tol),
                    "r_p" => f(self.device.mtj.r_p),
                    "r_ap" => f(self.device.mtj.r_ap),
                    "r_ref" => f(self.device.sense.r_ref),
                    "v_read" => f(self.device.sense.v_read),
                    "v_threshold" => f(self.device.sense.v_threshold),
                    "me_polarity" => f(self.device.me_polarity),
                    "f_clk" => f(self.adc.f_clk),
                    "t_s" => f(self.adc.t_s),
                    "v_min" => f(self.adc.v_min),
                    "v_max" => f(self.adc.v_max),
                    "bits" => self.adc.bits.to_string(),
                    "sweep_voltages" => list(&self.sweep.voltages),
                    "trace_duration" => f(self.trace.duration),
                    "record_every" => f(self.trace.record_every),
                    "trace_voltages" => list(&self.trace.voltages),
                    "dwell_duration" => f(self.dwell.duration),
                    "dwell_record_every" => f(self.dwell.record_every),
                    "dwell_hi" => f(self.dwell.hi),
                    "dwell_lo" => f(self.dwell.lo),
                    "dwell_voltage" => f(self.dwell.v_in),
                    "eb_ladder" => list(&self.dwell.ladder_kt),
                    "t_l0" => f(self.dwell.t_l0),
                    "t_pulse" => f(self.pulse.protocol.t_pulse),
                    "t_settle" => f(self.pulse.protocol.t_settle),
                    "n_trials" => self.pulse.protocol.n_trials.to_string(),
                    "psw_voltages" => list(&self.pulse.voltages),
                    _ => unreachable!("key table out of sync: {k}"),
                };
                (k, v)
            })
            .collect()
    }
}

fn check_cadence(e: &Entries, key: &str, every: f64, dt: f64) -> Result<()> {
    crate::llg::steps_per_record(dt, every)
        .map(|_| ())
        .map_err(|err| e.err(key, err.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_low_barrier_device() {
        let c = SimConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(c.magnet, MagnetConfig::low_barrier());
        assert_eq!(c.adc, AdcParams::default());
        assert_eq!(c.integrator, IntegratorParams::default());
    }

    #[test]
    fn values_and_comments() {
        let c = SimConfig::parse("thickness = 2.7e-9  # doubled\nbits=6\nseed = 7\n").unwrap();
        assert_eq!(c.magnet.thickness, 2.7e-9);
        assert_eq!(c.adc.bits, 6);
        assert_eq!(c.integrator.seed, 7);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = SimConfig::parse("ms = 6e5\nbogus = 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                key: "bogus".into(),
                line: Some(2),
                msg: "unknown key".into()
            }
        );
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn malformed_lines() {
        assert!(SimConfig::parse("ms 6e5\n").unwrap_err().is_config());
        assert!(SimConfig::parse("ms = six\n").unwrap_err().is_config());
        assert!(SimConfig::parse("ms = 1\nms = 2\n").unwrap_err().is_config());
        assert!(SimConfig::parse("trace_voltages = 0.1,,0.2\n").unwrap_err().is_config());
    }

    #[test]
    fn validation_errors_carry_line() {
        let err = SimConfig::parse("\n\nthickness = 0\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(3), .. }), "{err:?}");
        let err = SimConfig::parse("dt = 5e-12\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "dt"), "{err:?}");
    }

    #[test]
    fn barrier_knob() {
        let c = SimConfig::parse("length_x=150e-9\nlength_y=60e-9\nthickness=2.5e-9\ne_b_kt=40\n").unwrap();
        assert!((c.magnet.barrier_over_kt() - 40.0).abs() < 1e-9);
        assert!(SimConfig::parse("ku2 = 1e4\ne_b_kt = 3\n").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut e = Entries::parse("bits = 6\n").unwrap();
        e.set("bits", "2").unwrap();
        assert_eq!(SimConfig::from_entries(&e).unwrap().adc.bits, 2);
        assert!(e.set("nope", "1").is_err());
    }

    #[test]
    fn derived_sense_defaults() {
        let c = SimConfig::parse("r_p = 2e6\nr_ap = 8e6\nv_read = 0.2\n").unwrap();
        assert!((c.device.sense.r_ref - 4e6).abs() < 1e-6);
        assert!((c.device.sense.v_threshold - 0.1).abs() < 1e-15);
    }

    #[test]
    fn resolved_round_trips() {
        let c = SimConfig::parse("bits = 3\ntrace_voltages = 0.1, -0.2\n").unwrap();
        let text: String = c
            .resolved()
            .into_iter()
            .filter(|(k, _)| *k != "e_b_kt")
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(SimConfig::parse(&text).unwrap(), c);
    }
}
