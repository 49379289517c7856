//! Momentum-space analysis of homogeneous three-step walks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{CsvWriter, Field};

pub const DEFAULT_K_RESOLUTION: usize = 8192;
pub const MIN_K_RESOLUTION: usize = 1000;
/// The gap is open when max_k |d0| < 1 - GAP_TOL.
pub const GAP_TOL: f64 = 1e-9;
/// Largest admissible phase increment between neighbouring k points.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;
pub const WINDING_INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficients {
    pub k: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// atan2(d3, d2)
    pub theta_k: f64,
    /// |d2 + i d3|
    pub mag_d: f64,
}

/// Coefficients of the symmetric-frame Bloch operator
/// U(k) = d0 σ0 + d1 σ1 + i d2 σ2 + i d3 σ3 at momentum `k`.
pub fn bloch_coefficients(theta1: f64, theta2: f64, gamma: f64, k: f64) -> BlochCoefficients {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let sin2t2 = (2.0 * theta2).sin();
    let (sk, ck) = k.sin_cos();
    let (s3k, c3k) = (3.0 * k).sin_cos();
    let ch = (2.0 * gamma).cosh();
    let sh = (2.0 * gamma).sinh();
    let d0 = -(c1 * s2 * s2 + s1 * sin2t2 * ch) * ck + c1 * c2 * c2 * c3k;
    let d1 = sin2t2 * sh * ck;
    let d2 = (s1 * s2 * s2 - c1 * sin2t2 * ch) * ck - s1 * c2 * c2 * c3k;
    let d3 = -s2 * s2 * sk + c2 * c2 * s3k;
    BlochCoefficients { k, d0, d1, d2, d3, theta_k: d3.atan2(d2), mag_d: d2.hypot(d3) }
}

/// Quasi-energy ε = i log λ with Re ε = -arg λ in (-π, π] and
/// Im ε = ln |λ|.
pub fn quasi_energy(lambda: Complex64) -> Complex64 {
    let mut re = -lambda.arg();
    if re <= -PI {
        re = PI;
    }
    Complex64::new(re, lambda.norm().ln())
}

/// Distance of a real quasi-energy from 0 and from π, modulo 2π.
pub fn distance_to_zero_and_pi(re_eps: f64) -> (f64, f64) {
    let a = re_eps.rem_euclid(2.0 * PI);
    let to_zero = a.min(2.0 * PI - a);
    (to_zero, (a - PI).abs())
}

/// λ± = d0 ± i sqrt(1 - d0²), principal complex root; real pair for |d0| > 1.
pub fn eigenvalue_pair(d0: f64) -> (Complex64, Complex64) {
    let root = Complex64::new(1.0 - d0 * d0, 0.0).sqrt();
    let i_root = Complex64::i() * root;
    (d0 + i_root, d0 - i_root)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
    /// |d0(k)| > 1
    pub pt_broken: bool,
}

/// k_m = -π + 2π(m+1)/n for m = 0..n, covering (-π, π].
pub fn k_grid(n: usize) -> Vec<f64> {
    (0..n).map(|m| -PI + 2.0 * PI * (m + 1) as f64 / n as f64).collect()
}

pub fn dispersion(theta1: f64, theta2: f64, gamma: f64, k_grid: &[f64]) -> Vec<DispersionPoint> {
    k_grid
        .iter()
        .map(|&k| {
            let d = bloch_coefficients(theta1, theta2, gamma, k);
            let (lp, lm) = eigenvalue_pair(d.d0);
            DispersionPoint {
                k,
                lambda_plus: lp,
                lambda_minus: lm,
                eps_plus: quasi_energy(lp),
                eps_minus: quasi_energy(lm),
                pt_broken: d.d0.abs() > 1.0,
            }
        })
        .collect()
}

pub fn dispersion_csv(points: &[DispersionPoint]) -> String {
    let mut w = CsvWriter::new(&["k", "re_eps_plus", "im_eps_plus", "re_eps_minus", "im_eps_minus", "pt_broken"]);
    for p in points {
        w.row(&[
            Field::F(p.k),
            Field::F(p.eps_plus.re),
            Field::F(p.eps_plus.im),
            Field::F(p.eps_minus.re),
            Field::F(p.eps_minus.im),
            Field::B(p.pt_broken),
        ]);
    }
    w.finish()
}

/// Eigenvalues λ±(2πm/n), m = 0..n, of a homogeneous periodic chain of `n`
/// sites in the symmetric frame.
pub fn bloch_spectrum(theta1: f64, theta2: f64, gamma: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .flat_map(|m| {
            let k = 2.0 * PI * m as f64 / n as f64;
            let (a, b) = eigenvalue_pair(bloch_coefficients(theta1, theta2, gamma, k).d0);
            [a, b]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapStatus {
    pub gap_open: bool,
    /// min over k of |Re ε| for band states.
    pub min_gap_0: f64,
    /// min over k of |Re ε - π| (mod 2π).
    pub min_gap_pi: f64,
    pub max_abs_d0: f64,
    /// max |d0| lies within 10 GAP_TOL of 1.
    pub near_closing: bool,
}

fn check_resolution(k_resolution: usize) -> Result<()> {
    if k_resolution < MIN_K_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "k resolution must be at least {MIN_K_RESOLUTION}, got {k_resolution}"
        )));
    }
    Ok(())
}

pub fn bulk_gap_status(theta1: f64, theta2: f64, gamma: f64, k_resolution: usize) -> Result<GapStatus> {
    check_resolution(k_resolution)?;
    let (mut max_abs_d0, mut min_gap_0, mut min_gap_pi) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for p in dispersion(theta1, theta2, gamma, &k_grid(k_resolution)) {
        // λ+ + λ- = 2 d0 on both sides of |d0| = 1
        max_abs_d0 = max_abs_d0.max(0.5 * (p.lambda_plus.re + p.lambda_minus.re).abs());
        for e in [p.eps_plus, p.eps_minus] {
            let (z, pi) = distance_to_zero_and_pi(e.re);
            min_gap_0 = min_gap_0.min(z);
            min_gap_pi = min_gap_pi.min(pi);
        }
    }
    let near_closing = (1.0 - max_abs_d0).abs() < 10.0 * GAP_TOL;
    if near_closing {
        log::debug!("max |d0| = {max_abs_d0} is within grid tolerance of 1 at ({theta1}, {theta2}, {gamma})");
    }
    Ok(GapStatus { gap_open: max_abs_d0 < 1.0 - GAP_TOL, min_gap_0, min_gap_pi, max_abs_d0, near_closing })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologicalNumber {
    pub nu_prime: i64,
    pub nu_zero: f64,
    pub nu_pi: f64,
    /// ν'/2 + 3/2
    pub nu_shifted: f64,
    pub gap_open: bool,
}

impl TopologicalNumber {
    fn from_winding(nu_prime: i64) -> Self {
        let half = nu_prime as f64 / 2.0;
        Self { nu_prime, nu_zero: half, nu_pi: half, nu_shifted: half + 1.5, gap_open: true }
    }

    /// `nu_shifted` as an integer when it is one.
    pub fn nu_shifted_int(&self) -> Option<i64> {
        (self.nu_prime % 2 != 0).then_some((self.nu_prime + 3) / 2)
    }
}

/// Sum of wrapped increments of θ_k around the closed k loop, in units of 2π.
pub fn accumulated_winding(theta1: f64, theta2: f64, gamma: f64, k_resolution: usize) -> Result<f64> {
    let ks = k_grid(k_resolution);
    let phases: Vec<f64> = ks.iter().map(|&k| bloch_coefficients(theta1, theta2, gamma, k).theta_k).collect();
    let mut total = 0.0;
    for i in 0..phases.len() {
        let next = phases[(i + 1) % phases.len()];
        let step = (next - phases[i] + PI).rem_euclid(2.0 * PI) - PI;
        if step.abs() > MAX_PHASE_STEP {
            return Err(Error::ResolutionInsufficient { step: step.abs() });
        }
        total += step;
    }
    Ok(total / (2.0 * PI))
}

pub fn winding_number(theta1: f64, theta2: f64, gamma: f64, k_resolution: usize) -> Result<TopologicalNumber> {
    let gap = bulk_gap_status(theta1, theta2, gamma, k_resolution)?;
    if !gap.gap_open {
        return Err(Error::GapClosed { max_abs_d0: gap.max_abs_d0 });
    }
    let w = accumulated_winding(theta1, theta2, gamma, k_resolution)?;
    let rounded = w.round();
    if (w - rounded).abs() > WINDING_INTEGER_TOL {
        return Err(Error::NonIntegerWinding { winding: w });
    }
    Ok(TopologicalNumber::from_winding(rounded as i64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Number(TopologicalNumber),
    GapClosed { max_abs_d0: f64 },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub outcome: CellOutcome,
}

impl PhaseCell {
    pub fn number(&self) -> Option<&TopologicalNumber> {
        match &self.outcome {
            CellOutcome::Number(n) => Some(n),
            _ => None,
        }
    }
}

/// Cells in row-major order over (theta1, theta2).
pub fn phase_diagram(
    theta1_grid: &[f64],
    theta2_grid: &[f64],
    gamma: f64,
    k_resolution: usize,
) -> Result<Vec<PhaseCell>> {
    check_resolution(k_resolution)?;
    let pairs: Vec<(f64, f64)> = theta1_grid.iter().flat_map(|&a| theta2_grid.iter().map(move |&b| (a, b))).collect();
    Ok(pairs
        .into_par_iter()
        .map(|(theta1, theta2)| {
            let outcome = match winding_number(theta1, theta2, gamma, k_resolution) {
                Ok(n) => CellOutcome::Number(n),
                Err(Error::GapClosed { max_abs_d0 }) => CellOutcome::GapClosed { max_abs_d0 },
                Err(e) => CellOutcome::Failed { message: e.to_string() },
            };
            PhaseCell { theta1, theta2, gamma, outcome }
        })
        .collect())
}

/// `nu_shifted` is written as an integer for gapped cells and left empty
/// otherwise.
pub fn phase_diagram_csv(cells: &[PhaseCell]) -> String {
    let mut w = CsvWriter::new(&["theta1", "theta2", "gamma", "nu_shifted", "gap_open"]);
    for c in cells {
        let nu = c.number().and_then(|n| n.nu_shifted_int()).map(|v| v.to_string()).unwrap_or_default();
        w.row(&[
            Field::F(c.theta1),
            Field::F(c.theta2),
            Field::F(c.gamma),
            Field::S(&nu),
            Field::B(c.number().is_some()),
        ]);
    }
    w.finish()
}

/// n angles uniformly covering (-π, π].
pub fn angle_grid(n: usize) -> Vec<f64> {
    k_grid(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_energy_branch() {
        assert_eq!(quasi_energy(Complex64::new(-1.0, 0.0)).re, PI);
        assert_eq!(quasi_energy(Complex64::new(-1.0, -0.0)).re, PI);
        let e = quasi_energy(Complex64::from_polar(2.0, 0.3));
        assert!((e.re + 0.3).abs() < 1e-15);
        assert!((e.im - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn eigen_pair_real_when_broken() {
        let (a, b) = eigenvalue_pair(1.5);
        assert_eq!(a.im, 0.0);
        assert_eq!(b.im, 0.0);
        assert!((a.re * b.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_endpoints() {
        let g = k_grid(4);
        assert_eq!(g.len(), 4);
        assert!(g[0] > -PI);
        assert_eq!(*g.last().unwrap(), PI);
    }

    #[test]
    fn distances() {
        let (z, p) = distance_to_zero_and_pi(-3.0);
        assert!((z - 3.0).abs() < 1e-15);
        assert!((p - (PI - 3.0)).abs() < 1e-15);
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(bulk_gap_status(0.1, 0.2, 0.0, 999).is_err());
    }
}
