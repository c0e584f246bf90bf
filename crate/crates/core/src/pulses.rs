//! Time-dependent vacuum Rabi couplings `g1(t)`, `g2(t)`.
//!
//! An atom flying through a cavity sees a coupling that follows the
//! transverse mode profile: a Gaussian `g_peak * exp(-((t - t0) / tau)^2)`
//! with `tau` = waist / velocity. Square pulses are the idealized limit used
//! by the closed-form Rabi solution.

use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Gaussian profiles are cut off at `center +/- GAUSSIAN_CUTOFF * tau`
/// (relative amplitude `e^-16`, about `1e-7`).
pub const GAUSSIAN_CUTOFF: f64 = 4.0;

const SQUARE_EDGE_SLACK: f64 = 1e-12;

/// Pulse-area factor for cavity 1: the two-photon bright-state Rabi frequency
/// is `2 sqrt(2) g1`.
pub const CAVITY_ONE_RABI_FACTOR: f64 = 2.0 * SQRT_2;
/// Pulse-area factor for cavity 2: `Omega2 = 2 g2`.
pub const CAVITY_TWO_RABI_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Square,
    Gaussian,
}

/// One coupling profile.
///
/// For `Square`, `tau` is the half-duration: the coupling is `g_peak` on the
/// closed interval `[center - tau, center + tau]` and zero elsewhere. For
/// `Gaussian`, `tau` is the 1/e half-width and the profile vanishes beyond
/// `cutoff * tau` from the center (`cutoff = f64::INFINITY` disables the cut).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    pub shape: PulseShape,
    pub g_peak: f64,
    pub center: f64,
    pub tau: f64,
    pub cutoff: f64,
}

impl PulseSchedule {
    pub fn square(g_peak: f64, center: f64, tau: f64) -> Self {
        Self { shape: PulseShape::Square, g_peak, center, tau, cutoff: 1.0 }
    }

    /// Gaussian truncated at [`GAUSSIAN_CUTOFF`] widths.
    pub fn gaussian(g_peak: f64, center: f64, tau: f64) -> Self {
        Self { shape: PulseShape::Gaussian, g_peak, center, tau, cutoff: GAUSSIAN_CUTOFF }
    }

    /// A coupling that is identically zero.
    pub fn off() -> Self {
        Self::square(0.0, 0.0, 1.0)
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_peak >= 0.0 && self.g_peak.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "g_peak",
                reason: alloc::format!("must be finite and non-negative, got {}", self.g_peak),
            });
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: alloc::format!("must be finite and positive, got {}", self.tau),
            });
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: alloc::format!("must be positive, got {}", self.cutoff),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.tau;
        match self.shape {
            PulseShape::Square => {
                // Edges are inclusive up to the rounding of accumulated step times.
                if x.abs() <= 1.0 + SQUARE_EDGE_SLACK {
                    self.g_peak
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian => {
                if x.abs() <= self.cutoff {
                    self.g_peak * (-x * x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed interval outside of which the coupling vanishes. Unbounded for
    /// an uncut Gaussian.
    pub fn support(&self) -> (f64, f64) {
        let half = match self.shape {
            PulseShape::Square => self.tau,
            PulseShape::Gaussian => self.cutoff * self.tau,
        };
        (self.center - half, self.center + half)
    }

    /// `integral g(t) dt`, in closed form. A truncated Gaussian carries the
    /// factor `erf(cutoff)` (1 - 1.5e-8 at the default cutoff).
    pub fn integral(&self) -> f64 {
        match self.shape {
            PulseShape::Square => 2.0 * self.g_peak * self.tau,
            PulseShape::Gaussian => {
                let truncation = if self.cutoff.is_finite() { libm::erf(self.cutoff) } else { 1.0 };
                self.g_peak * self.tau * PI.sqrt() * truncation
            }
        }
    }
}

/// `rabi_factor * integral g(t) dt`; use [`CAVITY_ONE_RABI_FACTOR`] or
/// [`CAVITY_TWO_RABI_FACTOR`].
pub fn pulse_area(schedule: &PulseSchedule, rabi_factor: f64) -> f64 {
    rabi_factor * schedule.integral()
}

/// Rescales `g_peak` (keeping `tau`) so the pulse area is exactly `pi`.
pub fn calibrate_pi(schedule: &PulseSchedule, rabi_factor: f64) -> Result<PulseSchedule> {
    if !(schedule.tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: alloc::format!("cannot calibrate a pulse with tau = {}", schedule.tau),
        });
    }
    if !(rabi_factor > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rabi_factor",
            reason: alloc::format!("must be positive, got {rabi_factor}"),
        });
    }
    let unit = PulseSchedule { g_peak: 1.0, ..*schedule };
    Ok(PulseSchedule { g_peak: PI / (rabi_factor * unit.integral()), ..*schedule })
}

/// Order of the two couplings in an adiabatic-passage schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseOrdering {
    /// Cavity 2 first (`delay > 0`): transfers population through the dark state.
    Counterintuitive,
    /// Cavity 1 first or simultaneous (`delay <= 0`).
    Intuitive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapSchedule {
    pub cavity_one: PulseSchedule,
    pub cavity_two: PulseSchedule,
    pub ordering: PulseOrdering,
}

/// Two equal Gaussians, cavity 1 centered at `center` and cavity 2 at
/// `center - delay`.
///
/// A non-positive delay yields the intuitive ordering. It is accepted (it is a
/// useful negative control) but flagged in [`StirapSchedule::ordering`].
pub fn stirap_schedule(g_peak: f64, tau: f64, delay: f64, center: f64) -> Result<StirapSchedule> {
    let cavity_one = PulseSchedule::gaussian(g_peak, center, tau);
    cavity_one.validate()?;
    let cavity_two = PulseSchedule::gaussian(g_peak, center - delay, tau);
    let ordering = if delay > 0.0 { PulseOrdering::Counterintuitive } else { PulseOrdering::Intuitive };
    Ok(StirapSchedule { cavity_one, cavity_two, ordering })
}

/// Two pi pulses, cavity 1 then cavity 2, with common width `tau` and peaks
/// calibrated to the respective Rabi factors. The supports touch end to start
/// with an extra `gap` between them.
pub fn sequential_pi_schedule(
    shape: PulseShape,
    tau: f64,
    gap: f64,
    center: f64,
) -> Result<(PulseSchedule, PulseSchedule)> {
    if !(gap >= 0.0) {
        return Err(Error::InvalidParameter { name: "gap", reason: alloc::format!("must be non-negative, got {gap}") });
    }
    let template = match shape {
        PulseShape::Square => PulseSchedule::square(1.0, center, tau),
        PulseShape::Gaussian => PulseSchedule::gaussian(1.0, center, tau),
    };
    template.validate()?;
    let first = calibrate_pi(&template, CAVITY_ONE_RABI_FACTOR)?;
    let (lo, hi) = first.support();
    let reach = hi - center;
    let second_center = center + (hi - lo) / 2.0 + gap + reach;
    let second = calibrate_pi(&template.with_center(second_center), CAVITY_TWO_RABI_FACTOR)?;
    Ok((first, second))
}

/// Mixing angle `theta` with `tan(theta) = sqrt(2) g1 / g2`, in `[0, pi/2]`.
/// `None` when both couplings vanish.
pub fn mixing_angle(g1: f64, g2: f64) -> Option<f64> {
    if g1 == 0.0 && g2 == 0.0 {
        None
    } else {
        Some((SQRT_2 * g1).atan2(g2))
    }
}

/// Mixing angle of a schedule pair at time `t`.
///
/// Where both couplings vanish the angle is continued from the nearest
/// support edge; before either pulse begins it is zero.
pub fn mixing_angle_at(cavity_one: &PulseSchedule, cavity_two: &PulseSchedule, t: f64) -> f64 {
    if let Some(theta) = mixing_angle(cavity_one.evaluate(t), cavity_two.evaluate(t)) {
        return theta;
    }
    let supports = [cavity_one.support(), cavity_two.support()];
    let first_start = supports.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    if t < first_start {
        return 0.0;
    }
    let mut best: Option<(f64, f64)> = None;
    for edge in supports.iter().flat_map(|s| [s.0, s.1]) {
        let distance = (t - edge).abs();
        if let Some(theta) = mixing_angle(cavity_one.evaluate(edge), cavity_two.evaluate(edge)) {
            if best.is_none_or(|(d, _)| distance < d) {
                best = Some((distance, theta));
            }
        }
    }
    best.map_or(0.0, |(_, theta)| theta)
}

/// `theta` at the end of a counterintuitive passage.
pub const FINAL_MIXING_ANGLE: f64 = FRAC_PI_2;
