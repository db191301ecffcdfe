//! Stochastic Landau–Lifshitz–Gilbert integration.
//!
//! The Gilbert equation is integrated in its explicit Landau–Lifshitz form
//!
//! ```text
//! dm/dt = −γ/(1+α²) · [ m × H + α · m × (m × H) ]
//! ```
//!
//! with a Brown thermal field added to `H`. Each step draws one thermal
//! field and holds it through both Heun stages (Stratonovich), then
//! renormalizes `m`.

use crate::error::{Error, Result};
use crate::magnet::Magnet;
use crate::vector::Vec3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Default integration step, s.
pub const DEFAULT_DT: f64 = 0.5e-12;
/// Largest accepted integration step, s.
pub const MAX_DT: f64 = 1e-12;
/// Default master seed.
pub const DEFAULT_SEED: u64 = 42;

/// Pre-normalization norm error beyond which a step is treated as a blow-up.
const BLOWUP_DRIFT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorParams {
    pub dt: f64,
    pub seed: u64,
    /// Independent random stream under `seed` (trial or sweep-point index).
    pub stream: u64,
    /// Allowed deviation of |m| from one, checked in diagnostic runs.
    pub renorm_tol: f64,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            seed: DEFAULT_SEED,
            stream: 0,
            renorm_tol: 1e-6,
        }
    }
}

impl IntegratorParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn for_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::config(
                "dt",
                format!("must lie in (0, {MAX_DT:e}] s, got {:e}", self.dt),
            ));
        }
        if !(self.renorm_tol > 0.0) {
            return Err(Error::config("renorm_tol", "must be > 0"));
        }
        Ok(())
    }
}

/// Random generator for stream `stream` under `seed`. ChaCha supports 2⁶⁴
/// independent streams per seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Magnetization direction together with the simulation clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagState {
    pub m: Vec3,
    pub t: f64,
}

impl MagState {
    pub fn new(m: Vec3) -> Self {
        Self { m: m.normalized(), t: 0.0 }
    }

    /// Easy axis +x with a 10⁻³ tilt toward y, off the T = 0 fixed point.
    pub fn default_initial() -> Self {
        Self::new(Vec3::new(1.0, 1e-3, 0.0))
    }
}

/// Brown thermal field generator for one random stream.
#[derive(Clone, Debug)]
pub struct ThermalFieldSampler {
    sigma: f64,
    rng: ChaCha8Rng,
}

impl ThermalFieldSampler {
    pub fn new(magnet: &Magnet, params: &IntegratorParams) -> Self {
        Self {
            sigma: magnet.thermal_sigma(params.dt),
            rng: stream_rng(params.seed, params.stream),
        }
    }

    /// Per-component standard deviation, A/m.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn sample(&mut self) -> Vec3 {
        let x: f64 = StandardNormal.sample(&mut self.rng);
        let y: f64 = StandardNormal.sample(&mut self.rng);
        let z: f64 = StandardNormal.sample(&mut self.rng);
        Vec3::new(x, y, z) * self.sigma
    }
}

/// Right-hand side of the explicit LLG equation.
#[inline]
pub fn llg_rhs(gamma: f64, alpha: f64, m: Vec3, h_eff: Vec3) -> Vec3 {
    ll_rhs(gamma / (1.0 + alpha * alpha), alpha, m, h_eff)
}

#[inline(always)]
fn ll_rhs(gamma_ll: f64, alpha: f64, m: Vec3, h_eff: Vec3) -> Vec3 {
    let mxh = m.cross(h_eff);
    (mxh + alpha * m.cross(mxh)) * -gamma_ll
}

/// Outcome of one Heun step before renormalization.
#[derive(Clone, Copy, Debug)]
pub struct StepResult {
    pub state: MagState,
    /// | |m'| − 1 | before renormalization.
    pub drift: f64,
}

/// One Heun predictor–corrector step with a fixed thermal field.
#[inline]
pub fn heun_step_with_field(
    magnet: &Magnet,
    dt: f64,
    state: MagState,
    h_me_x: f64,
    h_thermal: Vec3,
) -> Result<StepResult> {
    let (gamma_ll, alpha) = (magnet.gamma_ll(), magnet.config().alpha);
    let m = state.m;
    let f0 = ll_rhs(gamma_ll, alpha, m, magnet.deterministic_field(m, h_me_x) + h_thermal);
    let pred = m + f0 * dt;
    let f1 = ll_rhs(gamma_ll, alpha, pred, magnet.deterministic_field(pred, h_me_x) + h_thermal);
    let next = m + (f0 + f1) * (0.5 * dt);
    let norm = next.norm();
    let t = state.t + dt;
    let drift = (norm - 1.0).abs();
    if !next.is_finite() || !(drift < BLOWUP_DRIFT) {
        return Err(Error::BlowUp { t });
    }
    Ok(StepResult {
        state: MagState { m: next * (1.0 / norm), t },
        drift,
    })
}

/// Stateful stepper: a magnet, a fixed input voltage and one noise stream.
#[derive(Clone, Debug)]
pub struct Integrator<'a> {
    magnet: &'a Magnet,
    dt: f64,
    h_me_x: f64,
    sampler: ThermalFieldSampler,
    max_drift: f64,
}

impl<'a> Integrator<'a> {
    pub fn new(magnet: &'a Magnet, params: &IntegratorParams, v_me: f64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            magnet,
            dt: params.dt,
            h_me_x: magnet.me_field_x(v_me),
            sampler: ThermalFieldSampler::new(magnet, params),
            max_drift: 0.0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Changes the ME voltage without touching the noise stream.
    pub fn set_voltage(&mut self, v_me: f64) {
        self.h_me_x = self.magnet.me_field_x(v_me);
    }

    /// Largest pre-normalization drift seen so far.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    #[inline]
    pub fn heun_step(&mut self, state: MagState) -> Result<MagState> {
        let h_th = self.sampler.sample();
        let r = heun_step_with_field(self.magnet, self.dt, state, self.h_me_x, h_th)?;
        if r.drift > self.max_drift {
            self.max_drift = r.drift;
        }
        Ok(r.state)
    }

    /// Advances `n` steps. The clock is recomputed from the step count to
    /// avoid summation drift.
    pub fn advance(&mut self, mut state: MagState, n: u64) -> Result<MagState> {
        let t0 = state.t;
        for _ in 0..n {
            state = self.heun_step(state)?;
        }
        state.t = t0 + n as f64 * self.dt;
        Ok(state)
    }
}

/// Recorded magnetization samples of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceRecord {
    pub samples: Vec<MagState>,
}

impl TraceRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn final_state(&self) -> Option<MagState> {
        self.samples.last().copied()
    }

    pub fn mx(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.m.x)
    }

    /// Mean of m_x over the recorded samples, excluding the initial one.
    pub fn mean_mx(&self) -> f64 {
        let n = self.samples.len().saturating_sub(1);
        if n == 0 {
            return self.samples.first().map_or(0.0, |s| s.m.x);
        }
        self.samples[1..].iter().map(|s| s.m.x).sum::<f64>() / n as f64
    }
}

/// Number of integration steps between two records.
pub fn steps_per_record(dt: f64, record_every: f64) -> Result<u64> {
    if !(record_every >= dt) {
        return Err(Error::input(format!(
            "record_every ({record_every:e} s) must be >= dt ({dt:e} s)"
        )));
    }
    let ratio = record_every / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-6 * n {
        return Err(Error::input(format!(
            "record_every ({record_every:e} s) must be an integer multiple of dt ({dt:e} s)"
        )));
    }
    Ok(n as u64)
}

/// Number of whole recording periods in `duration`.
pub fn record_count(duration: f64, record_every: f64) -> Result<u64> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::input(format!("duration must be >= 0, got {duration:e}")));
    }
    Ok((duration / record_every * (1.0 + 1e-12)).floor() as u64)
}

/// Integrates from `m0` and hands every record (including the initial
/// state) to `observe`. Returns the final state.
pub fn run_recorded<F>(
    magnet: &Magnet,
    params: &IntegratorParams,
    m0: MagState,
    v_me: f64,
    duration: f64,
    record_every: f64,
    mut observe: F,
) -> Result<MagState>
where
    F: FnMut(&MagState),
{
    let mut integ = Integrator::new(magnet, params, v_me)?;
    let per = steps_per_record(params.dt, record_every)?;
    let n = record_count(duration, record_every)?;
    let mut state = m0;
    observe(&state);
    let t0 = m0.t;
    for k in 1..=n {
        state = integ.advance(state, per)?;
        state.t = t0 + (k * per) as f64 * params.dt;
        observe(&state);
    }
    Ok(state)
}

/// Integrates for `duration` and collects a sample every `record_every`.
pub fn simulate_trace(
    magnet: &Magnet,
    params: &IntegratorParams,
    m0: MagState,
    v_me: f64,
    duration: f64,
    record_every: f64,
) -> Result<TraceRecord> {
    let capacity = record_count(duration, record_every)? as usize + 1;
    let mut samples = Vec::with_capacity(capacity);
    run_recorded(magnet, params, m0, v_me, duration, record_every, |s| samples.push(*s))?;
    Ok(TraceRecord { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnet::MagnetConfig;

    fn reference() -> Magnet {
        Magnet::new(MagnetConfig::low_barrier()).unwrap()
    }

    #[test]
    fn rhs_vanishes_for_parallel_field() {
        let m = Vec3::new(0.2, 0.4, -0.3).normalized();
        let f = llg_rhs(2.21e5, 0.1, m, m * 1234.0);
        assert!(f.norm() < 1e-12 * 2.21e5 * 1234.0, "{}", f.norm());
    }

    #[test]
    fn rhs_undamped_precession_direction() {
        let h = 1e4;
        let f = llg_rhs(2.21e5, 0.0, Vec3::X, Vec3::Z * h);
        assert!((f.y - 2.21e5 * h).abs() < 1e-6);
        assert_eq!((f.x, f.z), (0.0, 0.0));
    }

    #[test]
    fn rhs_is_tangent() {
        let m = Vec3::new(0.6, -0.64, 0.48);
        let f = llg_rhs(2.21e5, 0.3, m, Vec3::new(1e5, -3e4, 7e3));
        assert!(m.dot(f).abs() < 1e-9 * f.norm());
    }

    #[test]
    fn thermal_sigma_reference_value() {
        let m = reference();
        let s = m.thermal_sigma(1e-12);
        // Independent route: B-field variance 2αkT/(γ_e·Ms·V·dt) with γ_e in
        // rad/(s·T), then H = B/μ0.
        let gamma_e = 1.76e11_f64;
        let kt = 1.380649e-23 * 300.0;
        let vol = 20e-9 * 10e-9 * 1.35e-9;
        let sigma_b = (2.0 * 0.012 * kt / (gamma_e * 600.3e3 * vol * 1e-12)).sqrt();
        let oracle = sigma_b / crate::consts::MU0;
        assert!((s / oracle - 1.0).abs() < 2e-3, "{s} vs {oracle}");
        assert!((s - 4.70e4).abs() < 100.0, "{s}");
        assert!((m.thermal_sigma(0.5e-12) / s - 2f64.sqrt()).abs() < 1e-12);
        let cold = Magnet::new(MagnetConfig {
            temperature: 1e-300,
            ..MagnetConfig::low_barrier()
        })
        .unwrap();
        assert!(cold.thermal_sigma(1e-12) < 1e-140);
    }

    #[test]
    fn zero_field_leaves_state() {
        let cfg = MagnetConfig {
            ku2: 0.0,
            ki: 0.0,
            length_x: 5e-9,
            length_y: 5e-9,
            thickness: 5e-9,
            ..MagnetConfig::low_barrier()
        };
        let magnet = Magnet::new(cfg).unwrap();
        let s = MagState::new(Vec3::new(0.3, 0.4, 0.5));
        let r = heun_step_with_field(&magnet, 1e-13, s, 0.0, Vec3::ZERO).unwrap();
        // A cube has isotropic demag, so the field is parallel to m.
        assert!((r.state.m - s.m).norm() < 1e-15);
        assert_eq!(r.state.t, 1e-13);
    }

    #[test]
    fn blowup_is_reported() {
        let magnet = reference();
        let s = MagState::new(Vec3::new(0.0, 0.0, 1.0));
        let err = heun_step_with_field(&magnet, 1e-9, s, 0.0, Vec3::new(1e9, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn same_seed_same_bits() {
        let magnet = reference();
        let p = IntegratorParams::with_seed(7);
        let a = simulate_trace(&magnet, &p, MagState::default_initial(), 0.1, 2e-9, 1e-10).unwrap();
        let b = simulate_trace(&magnet, &p, MagState::default_initial(), 0.1, 2e-9, 1e-10).unwrap();
        assert_eq!(a, b);
        let c = simulate_trace(&magnet, &p.for_stream(1), MagState::default_initial(), 0.1, 2e-9, 1e-10)
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_duration_has_only_initial_sample() {
        let magnet = reference();
        let tr = simulate_trace(
            &magnet,
            &IntegratorParams::default(),
            MagState::default_initial(),
            0.0,
            0.0,
            1e-9,
        )
        .unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.samples[0], MagState::default_initial());
    }

    #[test]
    fn record_cadence_checks() {
        assert_eq!(steps_per_record(0.5e-12, 1e-9).unwrap(), 2000);
        assert!(steps_per_record(0.5e-12, 0.1e-12).is_err());
        assert!(steps_per_record(0.5e-12, 0.75e-12).is_err());
        assert_eq!(record_count(500e-9, 1e-9).unwrap(), 500);
    }

    #[test]
    fn dt_bound_enforced() {
        let p = IntegratorParams {
            dt: 2e-12,
            ..Default::default()
        };
        assert!(p.validate().unwrap_err().is_config());
    }
}
