//! Three-terminal ME-MTJ: input terminal to ME voltage, free-layer direction
//! to MTJ resistance, and the divider/threshold readout that yields STATE.

use crate::error::{Error, Result};
use crate::vector::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct MtjParams {
    /// Parallel-state resistance, Ω.
    pub r_p: f64,
    /// Antiparallel-state resistance, Ω.
    pub r_ap: f64,
    /// Pinned-layer direction.
    pub m_pinned: Vec3,
}

impl Default for MtjParams {
    fn default() -> Self {
        Self {
            r_p: 1e6,
            r_ap: 3e6,
            m_pinned: Vec3::X,
        }
    }
}

impl MtjParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_p > 0.0 && self.r_p.is_finite()) {
            return Err(Error::config("r_p", "must be finite and > 0"));
        }
        if !(self.r_ap > self.r_p && self.r_ap.is_finite()) {
            return Err(Error::config("r_ap", "must be finite and > r_p"));
        }
        if !((self.m_pinned.norm() - 1.0).abs() < 1e-9) {
            return Err(Error::config("m_pinned", "must be a unit vector"));
        }
        Ok(())
    }

    /// Resistance for free-layer direction `m`, interpolating conductance
    /// linearly in cos θ between the P and AP values.
    pub fn resistance(&self, m: Vec3) -> f64 {
        let cos = m.dot(self.m_pinned).clamp(-1.0, 1.0);
        let (gp, gap) = (1.0 / self.r_p, 1.0 / self.r_ap);
        1.0 / (0.5 * (gp + gap) + 0.5 * (gp - gap) * cos)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SenseParams {
    /// Reference resistor of the divider, Ω.
    pub r_ref: f64,
    /// Divider supply, V.
    pub v_read: f64,
    /// Comparator threshold at the sense node, V.
    pub v_threshold: f64,
}

impl SenseParams {
    /// Reference at the geometric mean of R_P and R_AP, threshold at half the
    /// read voltage.
    pub fn for_mtj(mtj: &MtjParams, v_read: f64) -> Self {
        Self {
            r_ref: (mtj.r_p * mtj.r_ap).sqrt(),
            v_read,
            v_threshold: v_read / 2.0,
        }
    }

    pub fn validate(&self, mtj: &MtjParams) -> Result<()> {
        if !(self.r_ref > mtj.r_p && self.r_ref < mtj.r_ap) {
            return Err(Error::config("r_ref", "must lie strictly between r_p and r_ap"));
        }
        if !(self.v_threshold > 0.0 && self.v_threshold < self.v_read) {
            return Err(Error::config("v_threshold", "must lie strictly between 0 and v_read"));
        }
        Ok(())
    }

    /// Divider output; rises with the MTJ resistance.
    pub fn node_voltage(&self, r_mtj: f64) -> f64 {
        self.v_read * r_mtj / (r_mtj + self.r_ref)
    }

    /// Digitized sense output. Ties resolve to 0.
    pub fn read_state(&self, r_mtj: f64) -> StateBit {
        StateBit(self.node_voltage(r_mtj) > self.v_threshold)
    }

    pub fn read_current(&self, r_mtj: f64) -> f64 {
        self.v_read / (self.r_ref + r_mtj)
    }
}

/// Sense-chain output: `true` when the junction reads antiparallel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateBit(pub bool);

impl StateBit {
    pub const ZERO: StateBit = StateBit(false);
    pub const ONE: StateBit = StateBit(true);

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }
}

/// The complete readout path plus the input-terminal polarity.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceStack {
    pub mtj: MtjParams,
    pub sense: SenseParams,
    /// Sign relating the input terminal voltage to the ME oxide voltage:
    /// `v_me = me_polarity · v_in`.
    pub me_polarity: f64,
}

impl Default for DeviceStack {
    fn default() -> Self {
        let mtj = MtjParams::default();
        let sense = SenseParams::for_mtj(&mtj, 0.17);
        Self {
            mtj,
            sense,
            me_polarity: -1.0,
        }
    }
}

impl DeviceStack {
    pub fn validate(&self) -> Result<()> {
        self.mtj.validate()?;
        self.sense.validate(&self.mtj)?;
        if self.me_polarity != 1.0 && self.me_polarity != -1.0 {
            return Err(Error::config("me_polarity", "must be +1 or -1"));
        }
        Ok(())
    }

    /// Voltage across the ME oxide for input `v_in` at terminal T2.
    pub fn me_voltage(&self, v_in: f64) -> f64 {
        self.me_polarity * v_in
    }

    pub fn state_of(&self, m: Vec3) -> StateBit {
        self.sense.read_state(self.mtj.resistance(m))
    }

    pub fn node_voltage_of(&self, m: Vec3) -> f64 {
        self.sense.node_voltage(self.mtj.resistance(m))
    }
}

/// One row of the P/AP readout summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutRow {
    pub state: &'static str,
    pub resistance: f64,
    pub node_voltage: f64,
    pub current: f64,
    pub bit: StateBit,
}

/// Readout quantities for the parallel and antiparallel states.
pub fn readout_summary(dev: &DeviceStack) -> [ReadoutRow; 2] {
    let row = |state, m: Vec3| {
        let r = dev.mtj.resistance(m);
        ReadoutRow {
            state,
            resistance: r,
            node_voltage: dev.sense.node_voltage(r),
            current: dev.sense.read_current(r),
            bit: dev.sense.read_state(r),
        }
    };
    [row("P", dev.mtj.m_pinned), row("AP", -dev.mtj.m_pinned)]
}
