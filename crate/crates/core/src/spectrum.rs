//! Finite-system spectra: eigendecomposition, state classification, edge
//! counting and spectral summaries.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bulk::{bulk_gap_status, distance_to_zero_and_pi, quasi_energy};
use crate::error::{Error, Result};
use crate::io::{CsvWriter, Field};
use crate::operators::{build_operator, CoinAngles, CoinProfile, Lattice, Layout, WalkKind, WalkOperator, WalkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Largest lattice accepted by the dense solver.
    pub max_sites: usize,
    /// Tolerance on Re ε around 0 and π, radians.
    pub tol_edge: f64,
    /// Relative tolerance on Im λ for a real eigenvalue.
    pub tol_real: f64,
    /// Sites on either side of an interface counted as "near" it.
    pub window: usize,
    /// Minimum probability weight near an interface for a localized state.
    pub weight_fraction: f64,
    /// Largest |Re ε - {0, π}| of a defective pair member, radians.
    pub defect_window: f64,
    /// Eigenvector condition number above which a pair is near-defective.
    pub near_defective_cond: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            max_sites: 2000,
            tol_edge: 1e-6,
            tol_real: 1e-8,
            window: 25,
            weight_fraction: 0.5,
            defect_window: 0.2,
            near_defective_cond: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    Bulk,
    EdgeZero,
    EdgePi,
    DefectivePairMember,
    Impurity,
}

impl StateClass {
    pub fn name(self) -> &'static str {
        match self {
            StateClass::Bulk => "bulk",
            StateClass::EdgeZero => "edge_zero",
            StateClass::EdgePi => "edge_pi",
            StateClass::DefectivePairMember => "defective_pair_member",
            StateClass::Impurity => "impurity",
        }
    }

    pub fn is_edge(self) -> bool {
        matches!(self, StateClass::EdgeZero | StateClass::EdgePi)
    }

    pub fn is_localized(self) -> bool {
        self != StateClass::Bulk
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub lambda: Complex64,
    pub eps: Complex64,
    /// Unit Euclidean norm.
    pub right_vector: Vec<Complex64>,
    pub class: StateClass,
    /// Position of the most probable site.
    pub localization_center: i64,
    /// Decay length of the probability, for localized states whose fit
    /// is reliable.
    pub localization_length: Option<f64>,
    /// Probability weight within the window of some interface.
    pub interface_weight: f64,
    pub near_defective: bool,
    /// A classification criterion sat within tolerance of its threshold.
    pub ambiguous: bool,
}

impl Eigenpair {
    /// |a_x|² + |b_x|² per site.
    pub fn site_probabilities(&self) -> Vec<f64> {
        self.right_vector.chunks_exact(2).map(|c| c[0].norm_sqr() + c[1].norm_sqr()).collect()
    }

    pub fn is_real(&self, tol_real: f64) -> bool {
        self.lambda.im.abs() < tol_real * self.lambda.norm()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCounts {
    pub n_edge_zero: usize,
    pub n_edge_pi: usize,
    pub n_defective: usize,
    pub n_impurity: usize,
    pub n_bulk: usize,
    pub n_ambiguous: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenpairs: Vec<Eigenpair>,
    pub counts: StateCounts,
    pub eps_m: Option<f64>,
    pub spec: WalkSpec,
    pub interfaces: Vec<f64>,
    pub options: SpectrumOptions,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigenpairs.iter().map(|p| p.lambda).collect()
    }

    pub fn of_class(&self, class: StateClass) -> impl Iterator<Item = &Eigenpair> {
        self.eigenpairs.iter().filter(move |p| p.class == class)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.spec.lattice
    }
}

fn check_size(lattice: &Lattice, opts: &SpectrumOptions) -> Result<()> {
    if lattice.num_sites() > opts.max_sites {
        return Err(Error::TooManySites { num_sites: lattice.num_sites(), max_sites: opts.max_sites });
    }
    Ok(())
}

/// All 2N eigenvalues, without eigenvectors.
pub fn eigenvalues(op: &WalkOperator) -> Result<Vec<Complex64>> {
    let dense = op.to_dense();
    dense.as_ref().eigenvalues().map_err(|e| Error::EigenNonConvergence(format!("{:?}: {e:?}", op.spec())))
}

pub fn eigendecompose(op: &WalkOperator, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let spec = *op.spec();
    check_size(&spec.lattice, opts)?;
    if !spec.lattice.is_periodic() {
        log::warn!("classifying states of an open chain; interfaces are taken from the coin layout only");
    }
    let dense = op.to_dense();
    let evd = faer::linalg::solvers::Eigen::new_from_real(dense.as_ref())
        .map_err(|e| Error::EigenNonConvergence(format!("{spec:?}: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let dim = op.dim();
    let mut raw: Vec<(Complex64, Vec<Complex64>)> = (0..dim)
        .map(|j| {
            let mut v: Vec<Complex64> = (0..dim).map(|i| u[(i, j)]).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            (s[j], v)
        })
        .collect();
    raw.sort_by(|a, b| {
        let (ea, eb) = (quasi_energy(a.0), quasi_energy(b.0));
        ea.re.total_cmp(&eb.re).then(ea.im.total_cmp(&eb.im))
    });
    Ok(classify_states(raw, &spec, opts))
}

fn near_defective_flags(raw: &[(Complex64, Vec<Complex64>)], cond: f64) -> Vec<bool> {
    let mut flags = vec![false; raw.len()];
    for i in 0..raw.len() {
        for j in i + 1..raw.len() {
            if (raw[i].0 - raw[j].0).norm() > 1e-4 {
                continue;
            }
            let (a, b) = (&raw[i].1, &raw[j].1);
            let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            // Component of b orthogonal to a; accurate even when tiny.
            let sin = b.iter().zip(a).map(|(y, x)| (y - overlap * x).norm_sqr()).sum::<f64>().sqrt();
            if sin * cond < 1.0 {
                flags[i] = true;
                flags[j] = true;
            }
        }
    }
    flags
}

/// Classifies raw (eigenvalue, normalized right vector) pairs.
///
/// A state is localized when at least `weight_fraction` of its probability
/// lies within `window` sites of an interface. Localized states are then
/// `edge_zero`/`edge_pi` when λ is real or Re ε is within `tol_edge` of 0
/// or π; `defective_pair_member` when λ is not real, its conjugate is also
/// an eigenvalue and Re ε is within `defect_window` of 0 or π; otherwise
/// `impurity`. Delocalized states are `bulk`.
pub fn classify_states(
    raw: Vec<(Complex64, Vec<Complex64>)>,
    spec: &WalkSpec,
    opts: &SpectrumOptions,
) -> SpectrumResult {
    let lattice = spec.lattice;
    let interfaces = spec.coins.layout.interfaces(&lattice);
    let near_mask: Vec<bool> =
        lattice.positions().map(|x| interfaces.iter().any(|&c| lattice.distance(x, c) <= opts.window as f64)).collect();
    let flags = near_defective_flags(&raw, opts.near_defective_cond);
    let lambdas: Vec<Complex64> = raw.iter().map(|r| r.0).collect();

    let mut eigenpairs: Vec<Eigenpair> = raw
        .into_iter()
        .zip(flags)
        .map(|((lambda, right_vector), near_defective)| {
            let eps = quasi_energy(lambda);
            let probs: Vec<f64> = right_vector.chunks_exact(2).map(|c| c[0].norm_sqr() + c[1].norm_sqr()).collect();
            let interface_weight: f64 = probs.iter().zip(&near_mask).filter(|(_, &m)| m).map(|(p, _)| p).sum();
            let peak = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i);
            let localized = interface_weight >= opts.weight_fraction;
            let rel_im = lambda.im.abs() / lambda.norm();
            let real = rel_im < opts.tol_real;
            let (d0, dpi) = distance_to_zero_and_pi(eps.re);
            let near = d0.min(dpi);
            let class = if !localized {
                StateClass::Bulk
            } else if real || near < opts.tol_edge {
                if d0 <= dpi {
                    StateClass::EdgeZero
                } else {
                    StateClass::EdgePi
                }
            } else if near < opts.defect_window
                && lambdas.iter().any(|m| (m - lambda.conj()).norm() <= 1e-8 * lambda.norm().max(1.0))
            {
                StateClass::DefectivePairMember
            } else {
                StateClass::Impurity
            };
            let ambiguous = (interface_weight - opts.weight_fraction).abs() < 0.02
                || (localized && !real && rel_im < 10.0 * opts.tol_real)
                || (localized && (near - opts.tol_edge).abs() < 0.1 * opts.tol_edge);
            Eigenpair {
                lambda,
                eps,
                right_vector,
                class,
                localization_center: lattice.position(peak),
                localization_length: None,
                interface_weight,
                near_defective,
                ambiguous,
            }
        })
        .collect();

    for p in eigenpairs.iter_mut().filter(|p| p.class.is_localized()) {
        p.localization_length = localization_length(p, &lattice).ok().map(|f| f.length);
    }

    let mut counts = StateCounts::default();
    for p in &eigenpairs {
        match p.class {
            StateClass::Bulk => counts.n_bulk += 1,
            StateClass::EdgeZero => counts.n_edge_zero += 1,
            StateClass::EdgePi => counts.n_edge_pi += 1,
            StateClass::DefectivePairMember => counts.n_defective += 1,
            StateClass::Impurity => counts.n_impurity += 1,
        }
        if p.ambiguous {
            counts.n_ambiguous += 1;
        }
    }
    if counts.n_ambiguous > 0 {
        log::warn!("{} states sit near a classification threshold", counts.n_ambiguous);
    }
    let mut result = SpectrumResult { eigenpairs, counts, eps_m: None, spec: *spec, interfaces, options: *opts };
    result.eps_m = minimum_bulk_quasienergy(&result).ok();
    result
}

/// Number of eigenvalues within `tol` of `target`.
pub fn cluster_size(eigenvalues: &[Complex64], target: Complex64, tol: f64) -> usize {
    eigenvalues.iter().filter(|l| (*l - target).norm() < tol).count()
}

/// Smallest Re ε among bulk states with Re ε > 0.
pub fn minimum_bulk_quasienergy(result: &SpectrumResult) -> Result<f64> {
    result
        .of_class(StateClass::Bulk)
        .map(|p| p.eps.re)
        .filter(|&e| e > 0.0)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoBulkStates)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFit {
    /// ξ in P(d) ∝ exp(-d / ξ), sites.
    pub length: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Decades of probability below the peak covered by the fit.
pub const FIT_DECADES: f64 = 3.0;
pub const MIN_R_SQUARED: f64 = 0.9;

/// Exponential decay length of a localized state's probability.
///
/// Probabilities are summed over pairs of neighbouring sites to remove the
/// even/odd alternation of the sublattice structure, and the larger of the
/// two sides at each distance from the peak is kept, so an asymmetric state
/// is measured by its slower tail. ln P is fitted linearly against distance
/// over the points within `FIT_DECADES` decades below the peak, up to the
/// lowest point of the envelope.
pub fn localization_length(pair: &Eigenpair, lattice: &Lattice) -> Result<LocalizationFit> {
    if !pair.class.is_localized() {
        return Err(Error::NotLocalized);
    }
    let probs = pair.site_probabilities();
    let n = probs.len() as i64;
    let center = lattice.site_of(pair.localization_center).expect("center lies on the lattice") as i64;
    let wrap = |i: i64| -> Option<usize> {
        if lattice.is_periodic() {
            Some(i.rem_euclid(n) as usize)
        } else {
            (0..n).contains(&i).then_some(i as usize)
        }
    };
    let bin =
        |start: i64, dir: i64| -> f64 { [start, start + dir].iter().filter_map(|&i| wrap(i)).map(|i| probs[i]).sum() };
    let max_bins = (n / 4).max(1);
    let mut envelope = Vec::new();
    for b in 0..max_bins {
        let right = bin(center + 2 * b, 1);
        let left = bin(center - 2 * b, -1);
        envelope.push(right.max(left));
    }
    let peak = envelope.iter().cloned().fold(0.0, f64::max);
    let floor = peak * 10f64.powf(-FIT_DECADES);
    let start = envelope.iter().position(|&p| p == peak).unwrap_or(0);
    let mut tail: Vec<f64> = envelope[start..].iter().copied().take_while(|&p| p >= floor).collect();
    // On a finite ring a slow tail can meet another interface before it
    // has fallen by FIT_DECADES; stop at the lowest point instead.
    if let Some(lowest) = tail.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i) {
        tail.truncate(lowest + 1);
    }
    let pts: Vec<(f64, f64)> = tail.iter().enumerate().map(|(i, &p)| (2.0 * (start + i) as f64, p.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::UnreliableFit { r_squared: f64::NAN });
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    if !(r_squared >= MIN_R_SQUARED) || slope >= 0.0 {
        return Err(Error::UnreliableFit { r_squared });
    }
    Ok(LocalizationFit { length: -1.0 / slope, r_squared, points: pts.len() })
}

pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut w = CsvWriter::new(&["re_lambda", "im_lambda", "re_eps", "im_eps", "class", "loc_center", "loc_length"]);
    for p in &result.eigenpairs {
        let len = p.localization_length.map(crate::io::fmt_f64).unwrap_or_default();
        w.row(&[
            Field::F(p.lambda.re),
            Field::F(p.lambda.im),
            Field::F(p.eps.re),
            Field::F(p.eps.im),
            Field::S(p.class.name()),
            Field::I(p.localization_center),
            Field::S(&len),
        ]);
    }
    w.finish()
}

/// `x,prob` rows of one eigenvector.
pub fn eigenvector_csv(pair: &Eigenpair, lattice: &Lattice) -> String {
    let mut w = CsvWriter::new(&["x", "prob"]);
    for (x, p) in lattice.positions().zip(pair.site_probabilities()) {
        w.row(&[Field::I(x), Field::F(p)]);
    }
    w.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EdgeCountOutcome {
    Counts(StateCounts),
    /// The inner or outer bulk gap is closed.
    NoCount,
    Failed {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountCell {
    pub theta1_outer: f64,
    pub theta2_outer: f64,
    pub outcome: EdgeCountOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMapSetup {
    pub inner: CoinAngles,
    pub gamma: f64,
    pub half_width: usize,
    pub num_sites: usize,
    pub k_resolution: usize,
}

impl EdgeMapSetup {
    pub fn spec_for(&self, outer: CoinAngles) -> Result<WalkSpec> {
        Ok(WalkSpec::new(
            Lattice::periodic(self.num_sites)?,
            CoinProfile::new(Layout::InnerOuter { half_width: self.half_width, inner: self.inner, outer }),
            self.gamma,
            WalkKind::ThreeStepSymmetric,
        ))
    }
}

pub fn edge_count(setup: &EdgeMapSetup, outer: CoinAngles, opts: &SpectrumOptions) -> EdgeCountOutcome {
    let run = || -> Result<EdgeCountOutcome> {
        for a in [setup.inner, outer] {
            if !bulk_gap_status(a.theta1, a.theta2, setup.gamma, setup.k_resolution)?.gap_open {
                return Ok(EdgeCountOutcome::NoCount);
            }
        }
        let op = build_operator(&setup.spec_for(outer)?)?;
        Ok(EdgeCountOutcome::Counts(eigendecompose(&op, opts)?.counts))
    };
    run().unwrap_or_else(|e| EdgeCountOutcome::Failed { message: e.to_string() })
}

/// Edge counts over a grid of outer angles, in row-major (theta1, theta2)
/// order.
pub fn edge_count_map(
    theta1o_grid: &[f64],
    theta2o_grid: &[f64],
    setup: &EdgeMapSetup,
    opts: &SpectrumOptions,
) -> Vec<EdgeCountCell> {
    let pairs: Vec<(f64, f64)> = theta1o_grid.iter().flat_map(|&a| theta2o_grid.iter().map(move |&b| (a, b))).collect();
    pairs
        .into_par_iter()
        .map(|(t1, t2)| EdgeCountCell {
            theta1_outer: t1,
            theta2_outer: t2,
            outcome: edge_count(setup, CoinAngles::new(t1, t2), opts),
        })
        .collect()
}

pub fn edge_map_csv(cells: &[EdgeCountCell]) -> String {
    let mut w = CsvWriter::new(&["theta1_outer", "theta2_outer", "n_edge_zero", "n_edge_pi", "status"]);
    for c in cells {
        let (z, p, status) = match &c.outcome {
            EdgeCountOutcome::Counts(n) => (n.n_edge_zero.to_string(), n.n_edge_pi.to_string(), "ok"),
            EdgeCountOutcome::NoCount => (String::new(), String::new(), "no_count"),
            EdgeCountOutcome::Failed { .. } => (String::new(), String::new(), "failed"),
        };
        w.row(&[Field::F(c.theta1_outer), Field::F(c.theta2_outer), Field::S(&z), Field::S(&p), Field::S(status)]);
    }
    w.finish()
}

/// Re ε folded to [0, π].
pub fn folded_quasienergy(eps: Complex64) -> f64 {
    let e = eps.re.abs();
    e.min(2.0 * PI - e)
}
