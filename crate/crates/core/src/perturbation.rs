//! Symmetry-breaking perturbation δ and coin disorder: δ sweeps with
//! eigenvalue tracking, exceptional-point bisection and disorder ensembles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bulk::{winding_number, DEFAULT_K_RESOLUTION};
use crate::error::{Error, Result};
use crate::io::{CsvWriter, Field};
use crate::operators::{build_operator, Layout, WalkKind, WalkSpec};
use crate::spectrum::{eigendecompose, Eigenpair, SpectrumOptions, SpectrumResult, StateClass, StateCounts};

/// |Im λ| above this (absolute) marks a tracked eigenvalue as complex.
pub const EP_IMAG_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_TOL_DELTA: f64 = 5e-4;
pub const DEFAULT_SEEDS: usize = 32;
/// Jump bound as a multiple of the secant estimate of the displacement.
pub const JUMP_FACTOR: f64 = 10.0;
pub const MAX_REFINEMENTS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AllReal,
    AtExceptional,
    ConjugatePairs,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::AllReal => "all_real",
            Regime::AtExceptional => "at_exceptional",
            Regime::ConjugatePairs => "conjugate_pairs",
        }
    }
}

/// Difference of bulk winding numbers across the interfaces of `spec`.
pub fn delta_nu(spec: &WalkSpec) -> Result<i64> {
    let (a, b) = match spec.coins.layout {
        Layout::InnerOuter { inner, outer, .. } => (inner, outer),
        Layout::LeftRight { left, right } => (left, right),
        Layout::Homogeneous(_) => return Err(Error::InvalidParameter("a homogeneous profile has no interface".into())),
    };
    let na = winding_number(a.theta1, a.theta2, spec.gamma, DEFAULT_K_RESOLUTION)?;
    let nb = winding_number(b.theta1, b.theta2, spec.gamma, DEFAULT_K_RESOLUTION)?;
    Ok(((nb.nu_prime - na.nu_prime) / 2).abs())
}

/// Localized states with Re ε at or near 0 and π: edge states and the
/// defective pairs they turn into.
pub fn tracked_states(result: &SpectrumResult) -> impl Iterator<Item = &Eigenpair> {
    result
        .eigenpairs
        .iter()
        .filter(|p| matches!(p.class, StateClass::EdgeZero | StateClass::EdgePi | StateClass::DefectivePairMember))
}

pub fn max_tracked_imag(result: &SpectrumResult) -> f64 {
    tracked_states(result).map(|p| p.lambda.im.abs()).fold(0.0, f64::max)
}

pub fn regime_of(result: &SpectrumResult) -> Regime {
    if tracked_states(result).any(|p| p.near_defective) {
        Regime::AtExceptional
    } else if max_tracked_imag(result) > EP_IMAG_THRESHOLD {
        Regime::ConjugatePairs
    } else {
        Regime::AllReal
    }
}

fn perturbed_kind(kind: WalkKind) -> WalkKind {
    match kind {
        WalkKind::ThreeStep | WalkKind::ThreeStepPerturbed => WalkKind::ThreeStepPerturbed,
        WalkKind::ThreeStepSymmetric | WalkKind::ThreeStepPerturbedSymmetric => WalkKind::ThreeStepPerturbedSymmetric,
        k => k,
    }
}

pub fn spec_at(base: &WalkSpec, delta: f64) -> WalkSpec {
    let mut s = *base;
    s.kind = perturbed_kind(base.kind);
    s.coins.delta = delta;
    s
}

pub fn spectrum_at(base: &WalkSpec, delta: f64, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    eigendecompose(&build_operator(&spec_at(base, delta))?, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta: f64,
    /// (branch id, eigenvalue) of every tracked state.
    pub eigenvalues: Vec<(usize, Complex64)>,
    pub regime: Regime,
    pub max_abs_im: f64,
    pub counts: StateCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSweep {
    pub points: Vec<SweepPoint>,
    /// First pair of neighbouring δ values whose regime goes from
    /// `all_real` to complex.
    pub ep_bracket: Option<(f64, f64)>,
    /// δ intervals where tracking exceeded the jump bound after all
    /// refinements.
    pub unresolved: Vec<(f64, f64)>,
}

impl DeltaSweep {
    pub fn point(&self, delta: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.delta == delta)
    }
}

struct Evaluated {
    delta: f64,
    values: Vec<Complex64>,
    regime: Regime,
    max_abs_im: f64,
    counts: StateCounts,
}

fn evaluate(base: &WalkSpec, delta: f64, opts: &SpectrumOptions) -> Result<Evaluated> {
    let r = spectrum_at(base, delta, opts)?;
    Ok(Evaluated {
        delta,
        values: tracked_states(&r).map(|p| p.lambda).collect(),
        regime: regime_of(&r),
        max_abs_im: max_tracked_imag(&r),
        counts: r.counts,
    })
}

/// Greedy nearest-neighbour assignment of `next` to the last value of each
/// live branch. Returns, per element of `next`, the matched branch index
/// and its displacement.
fn match_nearest(last: &[(usize, Complex64)], next: &[Complex64]) -> Vec<Option<(usize, f64)>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &(_, a)) in last.iter().enumerate() {
        for (j, &b) in next.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_last = vec![false; last.len()];
    let mut out = vec![None; next.len()];
    for (d, i, j) in pairs {
        if !used_last[i] && out[j].is_none() {
            used_last[i] = true;
            out[j] = Some((last[i].0, d));
        }
    }
    out
}

/// Sweeps δ over `deltas` (sorted ascending), tracking the eigenvalues of
/// edge and defective states by continuity. A step whose displacement
/// exceeds the jump bound is halved, up to `MAX_REFINEMENTS` times.
pub fn delta_sweep(base: &WalkSpec, deltas: &[f64], opts: &SpectrumOptions) -> Result<DeltaSweep> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("empty delta list".into()));
    }
    if deltas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("delta list must be strictly increasing".into()));
    }
    let dnu = delta_nu(&spec_at(base, 0.0))?;
    if dnu < 1 {
        return Err(Error::InvalidParameter("sweep needs a topological interface (delta nu >= 1)".into()));
    }

    let mut pending: Vec<Evaluated> =
        deltas.par_iter().map(|&d| evaluate(base, d, opts)).collect::<Result<Vec<_>>>()?;
    pending.reverse();

    let mut points: Vec<SweepPoint> = Vec::new();
    let mut unresolved = Vec::new();
    let mut next_branch = 0usize;
    let mut history: Vec<Vec<(f64, Complex64)>> = Vec::new();
    let mut depth = 0u32;

    while let Some(ev) = pending.pop() {
        let assigned: Vec<(usize, Complex64)> = match points.last() {
            None => ev
                .values
                .iter()
                .map(|&v| {
                    next_branch += 1;
                    history.push(Vec::new());
                    (next_branch - 1, v)
                })
                .collect(),
            Some(prev) => {
                let step = ev.delta - prev.delta;
                let matches = match_nearest(&prev.eigenvalues, &ev.values);
                let too_far = matches.iter().flatten().any(|&(b, d)| {
                    let h = &history[b];
                    let secant = match h.len() {
                        n if n >= 2 => (h[n - 1].1 - h[n - 2].1).norm() / (h[n - 1].0 - h[n - 2].0) * step,
                        _ => 0.0,
                    };
                    d > JUMP_FACTOR * secant.max(step)
                });
                if too_far && depth < MAX_REFINEMENTS {
                    depth += 1;
                    let mid = 0.5 * (prev.delta + ev.delta);
                    let refined = evaluate(base, mid, opts)?;
                    pending.push(ev);
                    pending.push(refined);
                    continue;
                }
                if too_far {
                    unresolved.push((prev.delta, ev.delta));
                }
                ev.values
                    .iter()
                    .zip(matches)
                    .map(|(&v, m)| match m {
                        Some((b, _)) => (b, v),
                        None => {
                            next_branch += 1;
                            history.push(Vec::new());
                            (next_branch - 1, v)
                        }
                    })
                    .collect()
            }
        };
        depth = 0;
        for &(b, v) in &assigned {
            history[b].push((ev.delta, v));
        }
        points.push(SweepPoint {
            delta: ev.delta,
            eigenvalues: assigned,
            regime: ev.regime,
            max_abs_im: ev.max_abs_im,
            counts: ev.counts,
        });
    }

    let ep_bracket = points
        .windows(2)
        .find(|w| w[0].regime == Regime::AllReal && w[1].regime != Regime::AllReal)
        .map(|w| (w[0].delta, w[1].delta));
    Ok(DeltaSweep { points, ep_bracket, unresolved })
}

pub fn sweep_csv(sweep: &DeltaSweep) -> String {
    let mut w = CsvWriter::new(&["delta", "re_lambda", "im_lambda", "branch_id", "regime"]);
    for p in &sweep.points {
        for &(b, v) in &p.eigenvalues {
            w.row(&[Field::F(p.delta), Field::F(v.re), Field::F(v.im), Field::U(b as u64), Field::S(p.regime.name())]);
        }
    }
    w.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpOptions {
    pub tol_delta: f64,
    /// Interior points checked for extra sign changes before bisecting.
    pub prescan_points: usize,
}

impl Default for EpOptions {
    fn default() -> Self {
        Self { tol_delta: DEFAULT_TOL_DELTA, prescan_points: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub delta_ep: f64,
    /// Final bracket, width <= tol_delta.
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// |<v+|v->| of the newly formed pair at the upper end of the bracket;
    /// tends to 1 as the bracket closes on the exceptional point.
    pub eigenvector_overlap: f64,
    /// max |Im λ| of tracked states at the upper end.
    pub indicator_hi: f64,
}

fn indicator(base: &WalkSpec, delta: f64, opts: &SpectrumOptions) -> Result<(bool, SpectrumResult)> {
    let r = spectrum_at(base, delta, opts)?;
    Ok((max_tracked_imag(&r) > EP_IMAG_THRESHOLD, r))
}

/// Overlap of the right eigenvectors of the conjugate pair with the
/// smallest nonzero imaginary part.
fn newest_pair_overlap(result: &SpectrumResult) -> f64 {
    let complex: Vec<&Eigenpair> = tracked_states(result).filter(|p| p.lambda.im.abs() > EP_IMAG_THRESHOLD).collect();
    let Some(a) = complex.iter().filter(|p| p.lambda.im > 0.0).min_by(|x, y| x.lambda.im.total_cmp(&y.lambda.im))
    else {
        return 0.0;
    };
    let Some(b) = complex
        .iter()
        .min_by(|x, y| (x.lambda - a.lambda.conj()).norm().total_cmp(&(y.lambda - a.lambda.conj()).norm()))
    else {
        return 0.0;
    };
    a.right_vector.iter().zip(&b.right_vector).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

/// Bisection on "some tracked eigenvalue has |Im λ| > threshold".
pub fn find_exceptional_point(
    base: &WalkSpec,
    delta_lo: f64,
    delta_hi: f64,
    ep: &EpOptions,
    opts: &SpectrumOptions,
) -> Result<ExceptionalPoint> {
    if !(delta_lo < delta_hi) {
        return Err(Error::BadBracket(format!("need delta_lo < delta_hi, got [{delta_lo}, {delta_hi}]")));
    }
    let n = ep.prescan_points;
    let grid: Vec<f64> = (0..n + 2).map(|i| delta_lo + (delta_hi - delta_lo) * i as f64 / (n + 1) as f64).collect();
    let scan: Vec<(bool, SpectrumResult)> =
        grid.par_iter().map(|&d| indicator(base, d, opts)).collect::<Result<Vec<_>>>()?;
    let mut evaluations = scan.len();
    if scan[0].0 {
        return Err(Error::BadBracket(format!(
            "tracked eigenvalues already complex at delta_lo = {delta_lo} (max |Im| = {:.3e})",
            max_tracked_imag(&scan[0].1)
        )));
    }
    if !scan[n + 1].0 {
        return Err(Error::BadBracket(format!("tracked eigenvalues still real at delta_hi = {delta_hi}")));
    }
    let changes: Vec<(f64, f64)> =
        (0..n + 1).filter(|&i| scan[i].0 != scan[i + 1].0).map(|i| (grid[i], grid[i + 1])).collect();
    if changes.len() > 1 {
        return Err(Error::MultipleExceptionalPoints { brackets: changes });
    }
    let (mut lo, mut hi) = changes[0];
    let mut hi_result = None;
    while hi - lo > ep.tol_delta {
        let mid = 0.5 * (lo + hi);
        let (on, r) = indicator(base, mid, opts)?;
        evaluations += 1;
        if on {
            hi = mid;
            hi_result = Some(r);
        } else {
            lo = mid;
        }
    }
    let hi_result = match hi_result {
        Some(r) => r,
        None => scan.into_iter().find(|(_, r)| r.spec.coins.delta == hi).map(|(_, r)| r).expect("bracket end scanned"),
    };
    Ok(ExceptionalPoint {
        delta_ep: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
        eigenvector_overlap: newest_pair_overlap(&hi_result),
        indicator_hi: max_tracked_imag(&hi_result),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderMember {
    pub seed: u64,
    pub max_im_lambda_edge: f64,
    pub regime: Regime,
    pub counts: StateCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderEnsemble {
    pub theta_r: f64,
    pub members: Vec<DisorderMember>,
}

impl DisorderEnsemble {
    pub fn seeds(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.seed).collect()
    }

    pub fn fraction(&self, regime: Regime) -> f64 {
        self.members.iter().filter(|m| m.regime == regime).count() as f64 / self.members.len().max(1) as f64
    }
}

pub fn disordered_spec(base: &WalkSpec, theta_r: f64, seed: u64) -> WalkSpec {
    let mut s = *base;
    s.kind = WalkKind::ThreeStepPerturbedDisordered;
    s.coins.disorder_amplitude = theta_r;
    s.coins.disorder_seed = seed;
    s
}

/// One spectrum per seed of the disordered walk built on `base` (δ taken
/// from `base`).
pub fn disorder_ensemble(
    base: &WalkSpec,
    theta_r: f64,
    seeds: &[u64],
    opts: &SpectrumOptions,
) -> Result<DisorderEnsemble> {
    if !(theta_r >= 0.0 && theta_r.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta_r must be >= 0, got {theta_r}")));
    }
    let members = seeds
        .par_iter()
        .map(|&seed| {
            let r = eigendecompose(&build_operator(&disordered_spec(base, theta_r, seed))?, opts)?;
            Ok(DisorderMember {
                seed,
                max_im_lambda_edge: max_tracked_imag(&r),
                regime: regime_of(&r),
                counts: r.counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ens = DisorderEnsemble { theta_r, members };
    log::info!(
        "theta_r = {theta_r}: all_real fraction {:.3}, conjugate_pairs fraction {:.3}",
        ens.fraction(Regime::AllReal),
        ens.fraction(Regime::ConjugatePairs)
    );
    Ok(ens)
}

pub fn ensemble_csv(ens: &DisorderEnsemble) -> String {
    let mut w = CsvWriter::new(&["seed", "theta_r", "max_im_lambda_edge", "regime"]);
    for m in &ens.members {
        w.row(&[Field::U(m.seed), Field::F(ens.theta_r), Field::F(m.max_im_lambda_edge), Field::S(m.regime.name())]);
    }
    w.finish()
}
