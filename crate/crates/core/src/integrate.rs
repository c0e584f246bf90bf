//! Fixed-step classical Runge-Kutta propagation of complex vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// Right-hand side of `dy/dt = f(t, y)`.
pub trait Flow {
    fn dim(&self) -> usize;
    fn derivative(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

/// Classical fourth-order Runge-Kutta with reusable scratch space.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advances `y` from `t` to `t + h` in place.
    pub fn step<F: Flow + ?Sized>(&mut self, flow: &F, t: f64, h: f64, y: &mut [C64]) {
        let half = 0.5 * h;
        flow.derivative(t, y, &mut self.k1);
        for ((s, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *s = y + k * half;
        }
        flow.derivative(t + half, &self.tmp, &mut self.k2);
        for ((s, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *s = y + k * half;
        }
        flow.derivative(t + half, &self.tmp, &mut self.k3);
        for ((s, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *s = y + k * h;
        }
        flow.derivative(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for i in 0..y.len() {
            y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }

    /// Advances `y` from `t0` to `t1`, restarting the step pattern at every
    /// breakpoint inside the interval so that no step straddles one.
    pub fn advance_through<F: Flow + ?Sized>(
        &mut self,
        flow: &F,
        t0: f64,
        t1: f64,
        dt_max: f64,
        breaks: &[f64],
        y: &mut [C64],
    ) {
        for (a, b) in segments(t0, t1, breaks) {
            self.advance(flow, a, b, dt_max, y);
        }
    }

    /// Advances `y` from `t0` to `t1` in `ceil((t1 - t0) / dt_max)` equal steps.
    pub fn advance<F: Flow + ?Sized>(&mut self, flow: &F, t0: f64, t1: f64, dt_max: f64, y: &mut [C64]) {
        let n = substeps(t1 - t0, dt_max);
        let h = (t1 - t0) / n as f64;
        for k in 0..n {
            self.step(flow, t0 + k as f64 * h, h, y);
        }
    }
}

/// Pieces of `[t0, t1]` cut at the sorted `breaks` lying strictly inside.
pub fn segments(t0: f64, t1: f64, breaks: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    let inner = breaks.iter().copied().filter(move |&b| b > t0 && b < t1);
    core::iter::once(t0).chain(inner.clone()).zip(inner.chain(core::iter::once(t1)))
}

/// Number of equal substeps of size at most `dt_max` covering `interval`.
pub fn substeps(interval: f64, dt_max: f64) -> usize {
    if interval <= 0.0 {
        return 0;
    }
    let n = libm::ceil(interval / dt_max);
    if n < 1.0 {
        1
    } else {
        n as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Rotation(f64);

    impl Flow for Rotation {
        fn dim(&self) -> usize {
            1
        }
        fn derivative(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
            dy[0] = C64::new(0.0, -self.0) * y[0];
        }
    }

    struct Ramp;

    impl Flow for Ramp {
        fn dim(&self) -> usize {
            1
        }
        fn derivative(&self, t: f64, _y: &[C64], dy: &mut [C64]) {
            dy[0] = C64::new(3.0 * t * t, 0.0);
        }
    }

    #[test]
    fn phase_rotation() {
        let mut y = [C64::new(1.0, 0.0)];
        let mut rk = Rk4::new(1);
        rk.advance(&Rotation(2.0), 0.0, 3.0, 1e-3, &mut y);
        let exact = C64::new(0.0, -6.0).exp();
        assert!((y[0] - exact).norm() < 1e-11);
    }

    #[test]
    fn cubic_is_integrated_exactly() {
        let mut y = [C64::new(0.0, 0.0)];
        Rk4::new(1).advance(&Ramp, 0.0, 2.0, 0.7, &mut y);
        assert_abs_diff_eq!(y[0].re, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn substep_count() {
        assert_eq!(substeps(1.0, 0.3), 4);
        assert_eq!(substeps(0.0, 0.3), 0);
        assert_eq!(substeps(1e-9, 0.3), 1);
    }

    #[test]
    fn segments_cut_at_inner_breaks() {
        let cuts: Vec<_> = segments(0.0, 2.0, &[-1.0, 0.0, 0.5, 1.5, 2.0, 3.0]).collect();
        assert_eq!(cuts, vec![(0.0, 0.5), (0.5, 1.5), (1.5, 2.0)]);
        assert_eq!(segments(0.0, 1.0, &[]).collect::<Vec<_>>(), vec![(0.0, 1.0)]);
    }
}
