//! Experiment dispatch. Every run builds its artifacts in memory; nothing
//! touches the output directory until the whole run has succeeded.

use crate::plots;
use simadc_core::adc::{self, calibrate_lut};
use simadc_core::config::SimConfig;
use simadc_core::device::readout_summary;
use simadc_core::llg::{simulate_trace, MagState};
use simadc_core::magnet::mean_lifetime;
use simadc_core::telegraph::{self, Level};
use simadc_core::vector::Vec3;
use simadc_core::Result;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// m(t) traces, one CSV per input voltage
    Trace,
    /// ⟨m_x⟩ and counts against input voltage
    Sweep,
    /// full ADC transfer curve with fit metrics
    Adc,
    /// dwell times of the telegraph signal
    Dwell,
    /// mean dwell over a barrier ladder
    Arrhenius,
    /// pulse switching probability (high-barrier config)
    Psw,
    /// device readout and derived magnet quantities
    Report,
    /// plot scripts for the CSVs already in the output directory
    Plots,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Trace => "trace",
            Kind::Sweep => "sweep",
            Kind::Adc => "adc",
            Kind::Dwell => "dwell",
            Kind::Arrhenius => "arrhenius",
            Kind::Psw => "psw",
            Kind::Report => "report",
            Kind::Plots => "plots",
        }
    }
}

/// A named output file held in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, text: String) -> Self {
        Self {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }
}

/// Runs one experiment on the current rayon pool.
pub fn run(kind: Kind, cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let mut out = match kind {
        Kind::Trace => trace(cfg)?,
        Kind::Sweep => sweep(cfg)?,
        Kind::Adc => adc_run(cfg)?,
        Kind::Dwell => dwell(cfg)?,
        Kind::Arrhenius => arrhenius(cfg)?,
        Kind::Psw => psw(cfg)?,
        Kind::Report => report(cfg)?,
        Kind::Plots => unreachable!("plots does not simulate"),
    };
    let names: Vec<&str> = out.iter().map(|a| a.name.as_str()).collect();
    let scripts = plots::scripts_for(&names);
    out.extend(scripts);
    Ok(out)
}

/// Shortest round-trip form; exponent notation outside [1e-3, 1e7).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn trace_file_name(v: f64) -> String {
    format!("trace_v{v:+.3}.csv")
}

fn trace(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    use rayon::prelude::*;
    let magnet = cfg.build_magnet()?;
    let t = &cfg.trace;
    let records = t
        .voltages
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = cfg.integrator.for_stream(i as u64);
            let v_me = cfg.device.me_voltage(v);
            simulate_trace(&magnet, &p, MagState::default_initial(), v_me, t.duration, t.record_every)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(t.voltages
        .iter()
        .zip(records)
        .map(|(&v, rec)| {
            let mut s = String::from("t_s,m_x,m_y,m_z\n");
            for st in &rec.samples {
                let _ = writeln!(s, "{},{},{},{}", num(st.t), num(st.m.x), num(st.m.y), num(st.m.z));
            }
            Artifact::new(trace_file_name(v), s)
        })
        .collect())
}

fn sweep(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let magnet = cfg.build_magnet()?;
    let conv = adc::convert_all(&magnet, &cfg.device, &cfg.integrator, &cfg.adc, &cfg.sweep.voltages)?;
    let mut s = String::from("v_in,mean_mx,c_out,n_samples\n");
    for c in &conv {
        let _ = writeln!(s, "{},{},{},{}", num(c.v_in), num(c.mean_mx), c.c_out, c.n_samples);
    }
    Ok(vec![Artifact::new("sweep.csv", s)])
}

fn adc_run(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let magnet = cfg.build_magnet()?;
    let curve = adc::sweep_transfer_curve(&magnet, &cfg.device, &cfg.integrator, &cfg.adc)?;
    let mut s = String::from("v_in,mean_mx,c_out,code\n");
    for r in &curve.rows {
        let _ = writeln!(s, "{},{},{},{}", num(r.v_in), num(r.mean_mx), r.c_out, r.code);
    }
    let mut m = String::from("slope,intercept,nrmsd_percent,n_points,t_s,f_clk,seed\n");
    let _ = writeln!(
        m,
        "{},{},{},{},{},{},{}",
        num(curve.fit.slope),
        num(curve.fit.intercept),
        num(curve.nrmsd_percent),
        curve.rows.len(),
        num(cfg.adc.t_s),
        num(cfg.adc.f_clk),
        cfg.integrator.seed
    );
    let mut out = vec![
        Artifact::new("transfer_curve.csv", s),
        Artifact::new("adc_metrics.csv", m),
    ];
    // A falling or flat count line has no usable code table; the curve is
    // still reported with every code at 0.
    if let Ok(lut) = calibrate_lut(&curve) {
        let mut l = String::from("code,min_count\n");
        let _ = writeln!(l, "0,0");
        for (j, e) in lut.edges.iter().enumerate() {
            let _ = writeln!(l, "{},{}", j + 1, e.max(0.0).ceil() as u64);
        }
        out.push(Artifact::new("lut.csv", l));
    }
    Ok(out)
}

fn dwell_csv(stats: &telegraph::DwellStats) -> String {
    let mut s = String::from("state,dwell_s\n");
    for (level, d) in stats.rows() {
        let name = match level {
            Level::Up => "up",
            Level::Down => "down",
        };
        let _ = writeln!(s, "{name},{}", num(d));
    }
    s
}

fn dwell(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let magnet = cfg.build_magnet()?;
    let d = &cfg.dwell;
    let stats = telegraph::simulate_dwells(
        &magnet,
        &cfg.integrator,
        cfg.device.me_voltage(d.v_in),
        d.duration,
        d.record_every,
        d.hi,
        d.lo,
    )?;
    Ok(vec![Artifact::new("dwells.csv", dwell_csv(&stats))])
}

fn arrhenius(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let d = &cfg.dwell;
    let ladder = telegraph::simulate_ladder(
        &cfg.magnet,
        &cfg.integrator,
        &d.ladder_kt,
        d.duration,
        d.record_every,
        d.hi,
        d.lo,
    )?;
    let fit = telegraph::fit_ladder(&ladder, cfg.magnet.temperature)?;
    let mut s = String::from("e_b_over_kt,mean_dwell_s\n");
    for p in &ladder {
        let mean = p.mean_dwell().expect("fit_ladder checked every rung");
        let _ = writeln!(s, "{},{}", num(p.e_b_over_kt), num(mean));
    }
    let mut f = String::from("slope,t_l0_s,r_squared\n");
    let _ = writeln!(f, "{},{},{}", num(fit.slope_fit), num(fit.t_l0_fit), num(fit.r_squared));
    Ok(vec![
        Artifact::new("arrhenius.csv", s),
        Artifact::new("arrhenius_fit.csv", f),
    ])
}

fn psw(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let magnet = cfg.build_magnet()?;
    let rows = telegraph::switching_curve(&magnet, &cfg.integrator, &cfg.pulse.voltages, &cfg.pulse.protocol)?;
    let mut s = String::from("v_pulse,p_switch,ci_lo,ci_hi,n_trials\n");
    for r in &rows {
        let _ = writeln!(s, "{},{},{},{},{}", num(r.v_pulse), num(r.p_switch), num(r.ci.0), num(r.ci.1), r.n_trials);
    }
    Ok(vec![Artifact::new("switching.csv", s)])
}

/// Derived magnet quantities as `quantity,value` CSV.
pub fn derived_csv(cfg: &SimConfig) -> Result<String> {
    let magnet = cfg.build_magnet()?;
    let c = magnet.config();
    let d = magnet.demag_factors();
    let h0 = magnet.effective_field(Vec3::X, 0.0, Vec3::ZERO);
    let e_b = magnet.energy_barrier();
    let rows: [(&str, f64); 16] = [
        ("e_b_j", e_b),
        ("e_b_over_kt", c.barrier_over_kt()),
        ("volume_m3", c.volume()),
        ("n_x", d.nx),
        ("n_y", d.ny),
        ("n_z", d.nz),
        ("h_k_a_per_m", magnet.anisotropy_field()),
        ("h_i_a_per_m", magnet.interface_anisotropy_field(Vec3::Z).z),
        ("h_me_per_volt_a_per_m", magnet.me_field(1.0).x),
        ("h_eff_x_zero_bias_a_per_m", h0.x),
        ("h_eff_y_zero_bias_a_per_m", h0.y),
        ("h_eff_z_zero_bias_a_per_m", h0.z),
        ("thermal_sigma_a_per_m", magnet.thermal_sigma(cfg.integrator.dt)),
        ("dt_s", cfg.integrator.dt),
        ("t_l0_s", cfg.dwell.t_l0),
        ("lifetime_s", mean_lifetime(e_b, cfg.dwell.t_l0, c.temperature)),
    ];
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{}", num(v));
    }
    Ok(s)
}

fn report(cfg: &SimConfig) -> Result<Vec<Artifact>> {
    let mut s = String::from("state,resistance_ohm,node_voltage_v,current_a,state_bit\n");
    for r in readout_summary(&cfg.device) {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.state,
            num(r.resistance),
            num(r.node_voltage),
            num(r.current),
            r.bit.as_u8()
        );
    }
    Ok(vec![
        Artifact::new("device_report.csv", s),
        Artifact::new("derived.csv", derived_csv(cfg)?),
    ])
}
