//! Polarization correlations and the CHSH combination.
//!
//! Each photon passes a quarter-wave plate that maps circular to linear
//! polarization before a linear analyzer at angle `alpha` (cavity 1) or
//! `beta` (cavity 2). In the circular basis the two analyzers measure
//! `A(alpha) = cos(2 alpha) Z + sin(2 alpha) X` and
//! `B(beta) = cos(2 beta) Z - sin(2 beta) X`; the cavity-2 arm carries an
//! extra mirror reflection, which fixes the orientation so that the image of
//! `|E+>` reaches `2 sqrt 2` at the standard angles.

use core::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::polarization::PolarizationState;
use crate::linalg::symmetric_eigenvalues;
use crate::{Result, C64};

/// Analyzer angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerAngles {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

impl AnalyzerAngles {
    /// `(0, 45, 22.5, 67.5)` degrees.
    pub const STANDARD: AnalyzerAngles =
        AnalyzerAngles { alpha: 0.0, alpha_prime: FRAC_PI_4, beta: FRAC_PI_8, beta_prime: 3.0 * FRAC_PI_8 };

    pub fn degrees(&self) -> [f64; 4] {
        [self.alpha, self.alpha_prime, self.beta, self.beta_prime].map(f64::to_degrees)
    }
}

impl Default for AnalyzerAngles {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub s_fixed: f64,
    pub s_optimal: f64,
    pub angles: AnalyzerAngles,
}

impl ChshResult {
    pub fn evaluate(state: &PolarizationState, angles: AnalyzerAngles) -> Result<Self> {
        Ok(Self { s_fixed: chsh_fixed(state, angles)?, s_optimal: chsh_optimal(state)?, angles })
    }
}

fn pauli(k: usize) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => [[o, one], [one, o]],
        1 => [[o, -i], [i, o]],
        _ => [[one, o], [o, -one]],
    }
}

/// `T_ij = Tr[rho (sigma_i (x) sigma_j)]` with `sigma = (X, Y, Z)` in the
/// circular basis (`+` is the `Z = +1` state).
pub fn correlation_matrix(state: &PolarizationState) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        let si = pauli(i);
        for (j, entry) in row.iter_mut().enumerate() {
            let sj = pauli(j);
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            // rho[ab][cd] * (si (x) sj)[cd][ab]
                            acc += state.rho[2 * a + b][2 * c + d] * si[c][a] * sj[d][b];
                        }
                    }
                }
            }
            *entry = acc.re;
        }
    }
    t
}

fn analyzer_one(alpha: f64) -> [f64; 3] {
    [(2.0 * alpha).sin(), 0.0, (2.0 * alpha).cos()]
}

fn analyzer_two(beta: f64) -> [f64; 3] {
    [-(2.0 * beta).sin(), 0.0, (2.0 * beta).cos()]
}

fn bilinear(a: &[f64; 3], t: &[[f64; 3]; 3], b: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i] * t[i][j] * b[j];
        }
    }
    s
}

/// `E(alpha, beta) = <A(alpha) (x) B(beta)>`.
pub fn correlation(state: &PolarizationState, alpha: f64, beta: f64) -> f64 {
    bilinear(&analyzer_one(alpha), &correlation_matrix(state), &analyzer_two(beta))
}

/// `|E(a, b) - E(a, b') + E(a', b) + E(a', b')|`.
pub fn chsh_fixed(state: &PolarizationState, angles: AnalyzerAngles) -> Result<f64> {
    state.validate()?;
    let e = |a, b| correlation(state, a, b);
    let AnalyzerAngles { alpha, alpha_prime, beta, beta_prime } = angles;
    Ok((e(alpha, beta) - e(alpha, beta_prime) + e(alpha_prime, beta) + e(alpha_prime, beta_prime)).abs())
}

/// `2 sqrt(m1 + m2)`, with `m1 >= m2` the two largest eigenvalues of `T^T T`.
pub fn chsh_optimal(state: &PolarizationState) -> Result<f64> {
    state.validate()?;
    let t = correlation_matrix(state);
    let mut ttt = alloc::vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            ttt[3 * i + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let m = symmetric_eigenvalues(3, ttt);
    Ok(2.0 * (m[0] + m[1]).max(0.0).sqrt())
}

/// Direct maximization over analyzer directions.
///
/// For fixed cavity-2 directions `b`, `b'` the best cavity-1 directions
/// align with `T(b + b')` and `T(b - b')`, so
/// `S = ||T(b + b')|| + ||T(b - b')||`; this is maximized over the four
/// spherical angles of `b`, `b'` by a grid scan followed by compass search.
pub fn chsh_optimal_search(state: &PolarizationState) -> Result<f64> {
    state.validate()?;
    let t = correlation_matrix(state);
    let dir = |theta: f64, phi: f64| [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let norm_t = |v: [f64; 3]| (0..3).map(|i| (0..3).map(|j| t[i][j] * v[j]).sum::<f64>().powi(2)).sum::<f64>().sqrt();
    let s = |x: &[f64; 4]| {
        let b = dir(x[0], x[1]);
        let bp = dir(x[2], x[3]);
        norm_t([b[0] + bp[0], b[1] + bp[1], b[2] + bp[2]]) + norm_t([b[0] - bp[0], b[1] - bp[1], b[2] - bp[2]])
    };

    const GRID: usize = 7;
    let mut starts: alloc::vec::Vec<(f64, [f64; 4])> = alloc::vec::Vec::new();
    for i0 in 0..GRID {
        for i1 in 0..GRID {
            for i2 in 0..GRID {
                for i3 in 0..GRID {
                    let x = [
                        PI * (i0 as f64 + 0.5) / GRID as f64,
                        2.0 * PI * i1 as f64 / GRID as f64,
                        PI * (i2 as f64 + 0.5) / GRID as f64,
                        2.0 * PI * i3 as f64 / GRID as f64,
                    ];
                    starts.push((s(&x), x));
                }
            }
        }
    }
    starts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));

    let mut best = 0.0f64;
    for &(mut value, mut x) in starts.iter().take(8) {
        let mut step = 0.3;
        while step > 1e-11 {
            let mut improved = false;
            for k in 0..4 {
                for sign in [1.0, -1.0] {
                    let mut y = x;
                    y[k] += sign * step;
                    let v = s(&y);
                    if v > value {
                        value = v;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::SQRT_2;

    #[test]
    fn anchors() {
        let bell = PolarizationState::psi_plus();
        assert_abs_diff_eq!(chsh_fixed(&bell, AnalyzerAngles::STANDARD).unwrap(), 2.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(chsh_optimal(&bell).unwrap(), 2.0 * SQRT_2, epsilon = 1e-12);
        let mix = PolarizationState::anticorrelated_mixture();
        assert_abs_diff_eq!(chsh_fixed(&mix, AnalyzerAngles::STANDARD).unwrap(), SQRT_2, epsilon = 1e-12);
        let noise = PolarizationState::maximally_mixed();
        assert_abs_diff_eq!(chsh_fixed(&noise, AnalyzerAngles::STANDARD).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chsh_optimal(&noise).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn product_state_reaches_two() {
        let one = C64::new(1.0, 0.0);
        let o = C64::new(0.0, 0.0);
        let p = PolarizationState::pure([o, one, o, o]).unwrap();
        assert_abs_diff_eq!(chsh_optimal(&p).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chsh_optimal_search(&p).unwrap(), 2.0, epsilon = 1e-6);
    }

    #[test]
    fn psi_plus_correlations() {
        let t = correlation_matrix(&PolarizationState::psi_plus());
        let want = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(t[i][j], want[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn search_agrees_with_closed_form() {
        let bell = PolarizationState::psi_plus();
        assert_abs_diff_eq!(chsh_optimal_search(&bell).unwrap(), 2.0 * SQRT_2, epsilon = 1e-6);
        let mix = PolarizationState::anticorrelated_mixture();
        assert_abs_diff_eq!(chsh_optimal_search(&mix).unwrap(), chsh_optimal(&mix).unwrap(), epsilon = 1e-6);
    }
}
