//! Free-layer macrospin: device parameters and the deterministic parts of
//! the effective field.
//!
//! The free layer is a rectangular prism with its easy axis along x and the
//! film normal along z. All fields are in A/m, energies in joules.

use crate::consts::{kt, C_LIGHT, GAMMA_DEFAULT, MU0};
use crate::error::{Error, Result};
use crate::vector::Vec3;
use std::f64::consts::PI;

/// Geometry and material parameters of one free layer.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetConfig {
    /// Free-layer extent along the easy axis, m.
    pub length_x: f64,
    pub length_y: f64,
    pub thickness: f64,
    /// Saturation magnetization, A/m.
    pub ms: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Uniaxial anisotropy constant along x, J/m³.
    pub ku2: f64,
    /// Interface (perpendicular) anisotropy energy density, J/m².
    pub ki: f64,
    /// ME oxide thickness, m.
    pub t_me: f64,
    /// Magnetoelectric coefficient, s/m.
    pub alpha_me: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Gyromagnetic ratio μ0·γ, m/(A·s).
    pub gamma: f64,
}

impl Default for MagnetConfig {
    fn default() -> Self {
        Self::low_barrier()
    }
}

impl MagnetConfig {
    /// The 20×10×1.35 nm³ superparamagnetic free layer (E_B ≈ 1 kT at 300 K).
    pub fn low_barrier() -> Self {
        Self {
            length_x: 20e-9,
            length_y: 10e-9,
            thickness: 1.35e-9,
            ms: 600.3e3,
            alpha: 0.012,
            ku2: 15.3e3,
            ki: 0.01e-3,
            t_me: 5e-9,
            alpha_me: 0.05 / C_LIGHT,
            temperature: 300.0,
            gamma: GAMMA_DEFAULT,
        }
    }

    /// The 150×60×2.5 nm³ free layer with K_u2 chosen so that E_B = 40 kT.
    pub fn high_barrier() -> Self {
        Self {
            length_x: 150e-9,
            length_y: 60e-9,
            thickness: 2.5e-9,
            ..Self::low_barrier()
        }
        .with_barrier_kt(40.0)
    }

    /// Returns a copy whose K_u2 gives `e_b_kt`·kT at the configured volume
    /// and temperature.
    pub fn with_barrier_kt(mut self, e_b_kt: f64) -> Self {
        self.ku2 = e_b_kt * kt(self.temperature) / self.volume();
        self
    }

    pub fn volume(&self) -> f64 {
        self.length_x * self.length_y * self.thickness
    }

    /// E_B = K_u2·V.
    pub fn energy_barrier(&self) -> f64 {
        self.ku2 * self.volume()
    }

    pub fn barrier_over_kt(&self) -> f64 {
        self.energy_barrier() / kt(self.temperature)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length_x", self.length_x),
            ("length_y", self.length_y),
            ("thickness", self.thickness),
            ("ms", self.ms),
            ("t_me", self.t_me),
            ("gamma", self.gamma),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be finite and > 0, got {v}")));
            }
        }
        // T = 0 and α = 0 are allowed for deterministic checks.
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::config("temperature", format!("must be finite and >= 0, got {}", self.temperature)));
        }
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", format!("must lie in [0, 1), got {}", self.alpha)));
        }
        for (key, v) in [("ku2", self.ku2), ("ki", self.ki), ("alpha_me", self.alpha_me)] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        if self.ku2 < 0.0 {
            return Err(Error::config("ku2", "must be >= 0"));
        }
        Ok(())
    }
}

/// Magnetometric demagnetizing factors of a uniformly magnetized prism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemagFactors {
    pub nx: f64,
    pub ny: f64,
    pub nz: f64,
}

impl DemagFactors {
    /// Closed-form factors for a prism of full edge lengths `lx`, `ly`, `lz`.
    pub fn rectangular_prism(lx: f64, ly: f64, lz: f64) -> Self {
        let (a, b, c) = (lx / 2.0, ly / 2.0, lz / 2.0);
        Self {
            nx: prism_factor_along_c(b, c, a),
            ny: prism_factor_along_c(c, a, b),
            nz: prism_factor_along_c(a, b, c),
        }
    }

    pub fn sum(&self) -> f64 {
        self.nx + self.ny + self.nz
    }

    pub fn as_vec(&self) -> Vec3 {
        Vec3::new(self.nx, self.ny, self.nz)
    }
}

/// Aharoni's expression for the factor along the axis of half-length `c` of
/// a prism with half-lengths `a`, `b`, `c`.
fn prism_factor_along_c(a: f64, b: f64, c: f64) -> f64 {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let r = (a2 + b2 + c2).sqrt();
    let rab = (a2 + b2).sqrt();
    let rbc = (b2 + c2).sqrt();
    let rac = (a2 + c2).sqrt();
    let abc = a * b * c;

    // ln((s - u)/(s + u)) with s = sqrt(u² + w²), written to avoid cancellation.
    let ln_ratio = |u: f64, s: f64, w2: f64| ((w2 / (s + u)) / (s + u)).ln();

    let sum = (b2 - c2) / (2.0 * b * c) * ln_ratio(a, r, b2 + c2)
        + (a2 - c2) / (2.0 * a * c) * ln_ratio(b, r, a2 + c2)
        - b / (2.0 * c) * ln_ratio(a, rab, b2)
        - a / (2.0 * c) * ln_ratio(b, rab, a2)
        + c / (2.0 * a) * ln_ratio(b, rbc, c2)
        + c / (2.0 * b) * ln_ratio(a, rac, c2)
        + 2.0 * (a * b / (c * r)).atan()
        + (a2 * a + b2 * b - 2.0 * c2 * c) / (3.0 * abc)
        + (a2 + b2 - 2.0 * c2) / (3.0 * abc) * r
        + c / (a * b) * (rac + rbc)
        - (rab.powi(3) + rbc.powi(3) + rac.powi(3)) / (3.0 * abc);
    sum / PI
}

/// A validated [`MagnetConfig`] with its precomputed demag factors and field
/// coefficients.
#[derive(Clone, Debug)]
pub struct Magnet {
    cfg: MagnetConfig,
    demag: DemagFactors,
    /// H_det = diag(stiffness)·m + H_ME; collects demag, uniaxial and
    /// interface terms, all linear in one component of m.
    stiffness: Vec3,
    /// γ/(1+α²), the Landau–Lifshitz prefactor.
    gamma_ll: f64,
}

impl Magnet {
    pub fn new(cfg: MagnetConfig) -> Result<Self> {
        cfg.validate()?;
        let demag = DemagFactors::rectangular_prism(cfg.length_x, cfg.length_y, cfg.thickness);
        let hk = 2.0 * cfg.ku2 / (MU0 * cfg.ms);
        let hi = 2.0 * cfg.ki / (MU0 * cfg.ms * cfg.thickness);
        let stiffness = Vec3::new(
            hk - cfg.ms * demag.nx,
            -cfg.ms * demag.ny,
            hi - cfg.ms * demag.nz,
        );
        let gamma_ll = cfg.gamma / (1.0 + cfg.alpha * cfg.alpha);
        Ok(Self {
            cfg,
            demag,
            stiffness,
            gamma_ll,
        })
    }

    pub fn config(&self) -> &MagnetConfig {
        &self.cfg
    }

    pub fn demag_factors(&self) -> DemagFactors {
        self.demag
    }

    /// H_d = −Ms·(N_x m_x, N_y m_y, N_z m_z).
    pub fn demag_field(&self, m: Vec3) -> Vec3 {
        m.hadamard(self.demag.as_vec()) * -self.cfg.ms
    }

    /// Uniaxial anisotropy field along the easy axis x.
    pub fn uniaxial_field(&self, m: Vec3) -> Vec3 {
        Vec3::new(self.anisotropy_field() * m.x, 0.0, 0.0)
    }

    /// H_K = 2K_u2/(μ0·Ms).
    pub fn anisotropy_field(&self) -> f64 {
        2.0 * self.cfg.ku2 / (MU0 * self.cfg.ms)
    }

    /// Perpendicular surface-anisotropy field, 2K_i/(μ0·Ms·t)·m_z ẑ.
    pub fn interface_anisotropy_field(&self, m: Vec3) -> Vec3 {
        let hi = 2.0 * self.cfg.ki / (MU0 * self.cfg.ms * self.cfg.thickness);
        Vec3::new(0.0, 0.0, hi * m.z)
    }

    /// Field induced along x by a voltage `v_me` across the ME oxide.
    pub fn me_field(&self, v_me: f64) -> Vec3 {
        Vec3::new(self.me_field_x(v_me), 0.0, 0.0)
    }

    #[inline]
    pub(crate) fn me_field_x(&self, v_me: f64) -> f64 {
        self.cfg.alpha_me * (v_me / self.cfg.t_me) / MU0
    }

    /// Sum of every field contribution acting on the free layer.
    pub fn effective_field(&self, m: Vec3, v_me: f64, h_thermal: Vec3) -> Vec3 {
        self.demag_field(m)
            + self.uniaxial_field(m)
            + self.interface_anisotropy_field(m)
            + self.me_field(v_me)
            + h_thermal
    }

    /// Deterministic field in the collapsed diagonal form used by the
    /// integrator. `h_me_x` is the precomputed ME field.
    #[inline]
    pub(crate) fn deterministic_field(&self, m: Vec3, h_me_x: f64) -> Vec3 {
        let mut h = m.hadamard(self.stiffness);
        h.x += h_me_x;
        h
    }

    #[inline]
    pub(crate) fn gamma_ll(&self) -> f64 {
        self.gamma_ll
    }

    pub fn energy_barrier(&self) -> f64 {
        self.cfg.energy_barrier()
    }

    /// Per-component standard deviation of the Brown thermal field for a
    /// step `dt`, in A/m: sqrt(2αkT / (μ0·γ·Ms·V·dt)) with γ in m/(A·s).
    pub fn thermal_sigma(&self, dt: f64) -> f64 {
        let c = &self.cfg;
        (2.0 * c.alpha * kt(c.temperature) / (MU0 * c.gamma * c.ms * c.volume() * dt)).sqrt()
    }
}

/// Néel–Arrhenius mean dwell time t_l0·exp(E_B/kT).
pub fn mean_lifetime(e_b: f64, t_l0: f64, temperature: f64) -> f64 {
    t_l0 * (e_b / kt(temperature)).exp()
}
