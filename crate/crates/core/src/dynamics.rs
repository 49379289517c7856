//! Time evolution on the open line, return probability p0(t), its Fourier
//! spectrum and edge-count inference from the observed modes.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bulk::{winding_number, DEFAULT_K_RESOLUTION};
use crate::error::{Error, Result};
use crate::io::{CsvWriter, Field};
use crate::operators::{build_operator, Boundary, CoinAngles, CoinProfile, Lattice, WalkKind, WalkSpec};
use crate::spectrum::{eigendecompose, SpectrumOptions, SpectrumResult, StateClass};

/// Window cap as a function of the number of steps: 2 (3T) + 128 sites.
pub fn default_window_cap(steps: usize) -> usize {
    6 * steps + 128
}

/// Refuse windows larger than this many sites.
pub const MAX_WINDOW_SITES: usize = 50_000_000;
/// Squared norm outside [1/RESCALE, RESCALE] triggers a rescale.
pub const RESCALE: f64 = 1e200;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    /// Amplitudes of positions `origin .. origin + len/2`, L then R per site.
    pub amplitudes: Vec<Complex64>,
    pub origin: i64,
    pub t: usize,
}

impl WalkerState {
    pub fn localized(x: i64, left: Complex64, right: Complex64) -> Self {
        Self { amplitudes: vec![left, right], origin: x, t: 0 }
    }

    /// |x=0> ⊗ (|L> + i|R>)/√2
    pub fn standard() -> Self {
        Self::localized(0, Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Positions covered by the amplitude vector.
    pub fn window(&self) -> std::ops::RangeInclusive<i64> {
        self.origin..=self.origin + (self.amplitudes.len() / 2) as i64 - 1
    }

    pub fn probability_at(&self, x: i64) -> f64 {
        let i = x - self.origin;
        if i < 0 || 2 * i as usize >= self.amplitudes.len() {
            return 0.0;
        }
        let i = 2 * i as usize;
        self.amplitudes[i].norm_sqr() + self.amplitudes[i + 1].norm_sqr()
    }

    pub fn distribution(&self) -> Vec<(i64, f64)> {
        self.window().map(|x| (x, self.probability_at(x))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Probabilities divided by the current squared norm.
    PerStep,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Sites of the open line the window may occupy; default
    /// `default_window_cap(steps)`.
    pub window_cap: Option<usize>,
    pub snapshot_times: Vec<usize>,
    /// Which of the two p0 series feeds the Fourier analysis.
    pub normalization: Normalization,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { window_cap: None, snapshot_times: Vec::new(), normalization: Normalization::PerStep }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub p0_raw: Vec<f64>,
    pub p0_normalized: Vec<f64>,
    pub norm_sqr: Vec<f64>,
    /// (t, normalized distribution) for each requested time.
    pub snapshots: Vec<(usize, Vec<(i64, f64)>)>,
    pub final_state: WalkerState,
    pub normalization: Normalization,
    /// ln of the factor divided out of the amplitudes by rescaling.
    pub log_scale: f64,
    /// Probability carried past the window cap, relative to the norm.
    pub leaked: f64,
    pub window_cap: usize,
    pub max_window_sites: usize,
}

impl EvolutionTrace {
    pub fn steps(&self) -> usize {
        self.p0_raw.len() - 1
    }

    pub fn p0(&self) -> &[f64] {
        match self.normalization {
            Normalization::PerStep => &self.p0_normalized,
            Normalization::Raw => &self.p0_raw,
        }
    }

    /// Mean of p0 over t in `range` (inclusive).
    pub fn mean_p0(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let v = &self.p0()[range];
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Evolves `initial` for `steps` steps of the walk `spec` on the open line.
///
/// The coin layout of `spec` is evaluated on an open chain of
/// `window_cap` sites centred at 0; the lattice size of `spec` is not used.
/// Amplitude is only stored on an active window that grows by the hop
/// range each step and drops sites whose amplitudes are exactly zero.
pub fn evolve(spec: &WalkSpec, initial: &WalkerState, steps: usize, opts: &EvolveOptions) -> Result<EvolutionTrace> {
    let cap = opts.window_cap.unwrap_or_else(|| default_window_cap(steps));
    if cap > MAX_WINDOW_SITES {
        return Err(Error::WindowCapExceeded { requested: cap, cap: MAX_WINDOW_SITES });
    }
    let norm0 = initial.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("initial state has squared norm {norm0}, expected 1")));
    }
    let mut line = *spec;
    line.lattice = Lattice::new(cap, Boundary::Open)?;
    let op = build_operator(&line)?;
    let lattice = line.lattice;
    let (first, last) = (initial.window().start().to_owned(), initial.window().end().to_owned());
    let (Some(lo_site), Some(hi_site)) = (lattice.site_of(first), lattice.site_of(last)) else {
        return Err(Error::InvalidParameter("initial support lies outside the window cap".into()));
    };
    let hops = op.hops();
    let dim = op.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; dim];
    let mut y = vec![zero; dim];
    x[2 * lo_site..2 * hi_site + 2].copy_from_slice(&initial.amplitudes);
    let (mut lo, mut hi) = (lo_site, hi_site);
    let origin_site = lattice.site_of(0);

    let mut p0_raw = Vec::with_capacity(steps + 1);
    let mut p0_normalized = Vec::with_capacity(steps + 1);
    let mut norm_sqr = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    let mut log_scale = 0.0f64;
    let mut leaked = 0.0f64;
    let mut max_window_sites = hi - lo + 1;
    let mut hit_cap = false;

    let mut record = |t: usize, x: &[Complex64], lo: usize, hi: usize, log_scale: f64| -> f64 {
        let ns: f64 = x[2 * lo..2 * hi + 2].iter().map(|z| z.norm_sqr()).sum();
        let p = origin_site.map_or(0.0, |s| x[2 * s].norm_sqr() + x[2 * s + 1].norm_sqr());
        let factor = (2.0 * log_scale).exp();
        p0_raw.push(p * factor);
        p0_normalized.push(if ns > 0.0 { p / ns } else { 0.0 });
        norm_sqr.push(ns * factor);
        if opts.snapshot_times.contains(&t) {
            let dist = (lo..=hi)
                .map(|s| (lattice.position(s), (x[2 * s].norm_sqr() + x[2 * s + 1].norm_sqr()) / ns))
                .collect();
            snapshots.push((t, dist));
        }
        ns
    };

    record(0, &x, lo, hi, log_scale);
    for t in 1..=steps {
        let want_lo = lo as i64 - hops as i64;
        let want_hi = hi + hops;
        if want_lo < 0 || want_hi >= cap {
            hit_cap = true;
        }
        let new_lo = want_lo.max(0) as usize;
        let new_hi = want_hi.min(cap - 1);
        let before: f64 = x[2 * lo..2 * hi + 2].iter().map(|z| z.norm_sqr()).sum();
        op.matrix().apply_rows(&x, &mut y, 2 * new_lo..2 * new_hi + 2);
        x[2 * lo..2 * hi + 2].iter_mut().for_each(|z| *z = zero);
        std::mem::swap(&mut x, &mut y);
        lo = new_lo;
        hi = new_hi;
        while lo < hi && x[2 * lo] == zero && x[2 * lo + 1] == zero {
            lo += 1;
        }
        while hi > lo && x[2 * hi] == zero && x[2 * hi + 1] == zero {
            hi -= 1;
        }
        max_window_sites = max_window_sites.max(hi - lo + 1);
        let ns = record(t, &x, lo, hi, log_scale);
        if hit_cap && spec.gamma == 0.0 {
            leaked += (before - ns).max(0.0) / before;
        }
        if !(1.0 / RESCALE..=RESCALE).contains(&ns) {
            let s = ns.sqrt();
            x[2 * lo..2 * hi + 2].iter_mut().for_each(|z| *z /= s);
            log_scale += s.ln();
            log::info!("rescaled amplitudes at t = {t} by {s:e}");
        }
    }
    if hit_cap {
        log::warn!("window reached the cap of {cap} sites; leaked probability {leaked:e}");
    }
    let final_state =
        WalkerState { amplitudes: x[2 * lo..2 * hi + 2].to_vec(), origin: lattice.position(lo), t: initial.t + steps };
    Ok(EvolutionTrace {
        p0_raw,
        p0_normalized,
        norm_sqr,
        snapshots,
        final_state,
        normalization: opts.normalization,
        log_scale,
        leaked,
        window_cap: cap,
        max_window_sites,
    })
}

pub fn trace_csv(trace: &EvolutionTrace) -> String {
    let mut w = CsvWriter::new(&["t", "p0_raw", "p0_normalized"]);
    for (t, (r, n)) in trace.p0_raw.iter().zip(&trace.p0_normalized).enumerate() {
        w.row(&[Field::U(t as u64), Field::F(*r), Field::F(*n)]);
    }
    w.finish()
}

pub fn snapshot_csv(dist: &[(i64, f64)]) -> String {
    let mut w = CsvWriter::new(&["x", "prob"]);
    for &(x, p) in dist {
        w.row(&[Field::I(x), Field::F(p)]);
    }
    w.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    Omega,
    TwoOmega,
    PiMinusTwoOmega,
    PiMinusOmega,
    Pi,
    Other,
}

impl ModeFamily {
    pub const TAGGED: [ModeFamily; 5] = [
        ModeFamily::Omega,
        ModeFamily::TwoOmega,
        ModeFamily::PiMinusTwoOmega,
        ModeFamily::PiMinusOmega,
        ModeFamily::Pi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModeFamily::Omega => "omega_delta",
            ModeFamily::TwoOmega => "2omega_delta",
            ModeFamily::PiMinusTwoOmega => "pi-2omega_delta",
            ModeFamily::PiMinusOmega => "pi-omega_delta",
            ModeFamily::Pi => "pi",
            ModeFamily::Other => "other",
        }
    }

    pub fn frequency(self, omega_delta: f64) -> Option<f64> {
        match self {
            ModeFamily::Omega => Some(omega_delta),
            ModeFamily::TwoOmega => Some(2.0 * omega_delta),
            ModeFamily::PiMinusTwoOmega => Some(PI - 2.0 * omega_delta),
            ModeFamily::PiMinusOmega => Some(PI - omega_delta),
            ModeFamily::Pi => Some(PI),
            ModeFamily::Other => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectedMode {
    pub bin: usize,
    pub omega: f64,
    pub magnitude: f64,
    pub background: f64,
    pub family: ModeFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    /// 2πn/(T+1), n = 0..=T
    pub omegas: Vec<f64>,
    pub c: Vec<Complex64>,
    pub detected_modes: Vec<DetectedMode>,
}

impl FourierSpectrum {
    pub fn bin_width(&self) -> f64 {
        2.0 * PI / self.c.len() as f64
    }

    pub fn families(&self) -> BTreeSet<ModeFamily> {
        self.detected_modes.iter().map(|m| m.family).collect()
    }
}

/// c(ω_n) = Σ_t p0(t) e^{-i ω_n t} on ω_n = 2πn/(T+1).
pub fn dft_of(p0: &[f64]) -> FourierSpectrum {
    let n = p0.len();
    let mut buf: Vec<Complex64> = p0.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    FourierSpectrum {
        omegas: (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
        c: buf,
        detected_modes: Vec::new(),
    }
}

pub fn dft(trace: &EvolutionTrace) -> FourierSpectrum {
    dft_of(trace.p0())
}

/// p0(t) = (1/(T+1)) Σ_n c(ω_n) e^{i ω_n t}
pub fn inverse_dft(spectrum: &FourierSpectrum) -> Vec<f64> {
    let n = spectrum.c.len();
    let mut buf = spectrum.c.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

pub fn spectrum_csv(spectrum: &FourierSpectrum) -> String {
    let mut w = CsvWriter::new(&["omega_over_pi", "abs_c"]);
    for (o, c) in spectrum.omegas.iter().zip(&spectrum.c) {
        w.row(&[Field::F(o / PI), Field::F(c.norm())]);
    }
    w.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakOptions {
    /// Background = median + kappa IQR.
    pub kappa: f64,
    /// Bins on either side forming the background band.
    pub half_band: usize,
    /// Extra bins of tolerance when tagging a peak to a family.
    pub slack_bins: f64,
    /// Peaks below this fraction of |c_0| are round-off.
    pub rel_floor: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self { kappa: 6.0, half_band: 32, slack_bins: 1.0, rel_floor: 1e-9 }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, f) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

/// Family of the nearest predicted frequency within one bin plus slack;
/// without a hint only π is recognised.
pub fn tag_mode(omega: f64, bin_width: f64, omega_delta: Option<f64>, opts: &PeakOptions) -> ModeFamily {
    let tol = bin_width * (1.0 + opts.slack_bins);
    let candidates: &[ModeFamily] = if omega_delta.is_some() { &ModeFamily::TAGGED } else { &[ModeFamily::Pi] };
    candidates
        .iter()
        .filter_map(|&f| f.frequency(omega_delta.unwrap_or(0.0)).map(|w| (f, (w - omega).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|&(_, d)| d <= tol)
        .map_or(ModeFamily::Other, |(f, _)| f)
}

/// Local maxima of |c(ω)| on ω in (0, π] that exceed the sliding
/// background. The ω = 0 bin and the bins within one bin of π are left out
/// of every background band.
pub fn detect_modes(spectrum: &FourierSpectrum, omega_delta: Option<f64>, opts: &PeakOptions) -> Vec<DetectedMode> {
    let n = spectrum.c.len();
    if n < 4 {
        return Vec::new();
    }
    let a: Vec<f64> = spectrum.c.iter().map(|z| z.norm()).collect();
    let bw = spectrum.bin_width();
    let half_n = n / 2;
    let excluded = |j: usize| j == 0 || (spectrum.omegas[j] - PI).abs() <= bw;
    let mut out = Vec::new();
    for i in 1..=half_n {
        let left = a[i - 1];
        // For odd n the bin after n/2 mirrors it; they differ only by
        // rounding.
        let right = if i + 1 == n - i { a[i] } else { a[(i + 1) % n] };
        if !(a[i] >= left && a[i] >= right) {
            continue;
        }
        let lo = i.saturating_sub(opts.half_band).max(1);
        let hi = (i + opts.half_band).min(half_n);
        let mut band: Vec<f64> = (lo..=hi).filter(|&j| j != i && !excluded(j)).map(|j| a[j]).collect();
        if band.is_empty() {
            continue;
        }
        band.sort_by(f64::total_cmp);
        let (q1, med, q3) = (quantile(&band, 0.25), quantile(&band, 0.5), quantile(&band, 0.75));
        let background = med + opts.kappa * (q3 - q1);
        if a[i] > background && a[i] > opts.rel_floor * a[0] {
            let omega = spectrum.omegas[i];
            out.push(DetectedMode {
                bin: i,
                omega,
                magnitude: a[i],
                background,
                family: tag_mode(omega, bw, omega_delta, opts),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRegime {
    Large,
    Small,
}

/// ε_m below this fraction of π puts a spec in the small-gap regime.
pub const SMALL_GAP_EPS_M_OVER_PI: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModePrediction {
    /// Families expected to stand out.
    pub required: BTreeSet<ModeFamily>,
    /// Families expected to be negligible, which may still appear weakly.
    pub suppressed: BTreeSet<ModeFamily>,
}

impl ModePrediction {
    pub fn admits(&self, observed: &BTreeSet<ModeFamily>) -> bool {
        self.required.is_subset(observed)
            && observed.iter().all(|f| self.required.contains(f) || self.suppressed.contains(f))
    }
}

pub fn predict_mode_families(delta_nu: i64, regime: GapRegime) -> Result<ModePrediction> {
    use ModeFamily::*;
    let set = |v: &[ModeFamily]| v.iter().copied().collect::<BTreeSet<_>>();
    let (required, suppressed) = match (delta_nu, regime) {
        (3, GapRegime::Large) => (set(&[Omega, TwoOmega, PiMinusTwoOmega, PiMinusOmega, Pi]), set(&[])),
        (3, GapRegime::Small) => (set(&[Omega, PiMinusOmega, Pi]), set(&[TwoOmega, PiMinusTwoOmega])),
        (2, _) => (set(&[TwoOmega, PiMinusTwoOmega, Pi]), set(&[])),
        (1, _) => (set(&[Pi]), set(&[])),
        (d, _) => return Err(Error::DeltaNuOutOfRange(d)),
    };
    Ok(ModePrediction { required, suppressed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceOptions {
    pub steps: usize,
    /// Times averaged for the short-time persistence signal.
    pub short_time: (usize, usize),
    pub persistence_threshold: f64,
    /// Sites of the finite periodic chain used for the spectral hints.
    pub spectrum_sites: usize,
    pub peaks: PeakOptions,
    pub spectrum: SpectrumOptions,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            steps: 10_000,
            short_time: (12, 24),
            persistence_threshold: 0.05,
            spectrum_sites: 601,
            peaks: PeakOptions::default(),
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeInference {
    pub short_time_mean: f64,
    pub parity: Parity,
    pub omega_delta: Option<f64>,
    pub eps_m: Option<f64>,
    pub regime: GapRegime,
    pub modes: Vec<DetectedMode>,
    pub families: BTreeSet<ModeFamily>,
    /// Δν values whose predicted mode families match; in the small-gap
    /// regime the short-time parity must match as well.
    pub consistent: BTreeSet<i64>,
    pub ambiguous: bool,
}

/// Two-region walk U_δ with `left` at x <= 0 and `right` at x > 0, γ = 0.
pub fn left_right_spec(left: CoinAngles, right: CoinAngles, delta: f64, num_sites: usize) -> Result<WalkSpec> {
    Ok(WalkSpec::new(
        Lattice::periodic(num_sites)?,
        CoinProfile::left_right(left, right).with_delta(delta),
        0.0,
        WalkKind::ThreeStepPerturbed,
    ))
}

/// |Re ε| of the defective pair closest to 0, from a finite spectrum.
///
/// Pairs split by less than `min_omega` are ignored: on a ring they arise
/// from the overlap of states at the two interfaces, and they cannot be
/// resolved by a DFT whose bin is wider than `min_omega`.
pub fn defective_frequency(result: &SpectrumResult, min_omega: f64) -> Option<f64> {
    result
        .of_class(StateClass::DefectivePairMember)
        .map(|p| p.eps.re.abs())
        .filter(|&e| e >= min_omega && e < PI / 2.0)
        .min_by(f64::total_cmp)
}

pub fn infer_edge_count(
    left: CoinAngles,
    right: CoinAngles,
    delta: f64,
    opts: &InferenceOptions,
) -> Result<EdgeInference> {
    infer_edge_count_traced(left, right, delta, opts).map(|(r, _)| r)
}

/// [`infer_edge_count`] together with the evolution it analysed.
pub fn infer_edge_count_traced(
    left: CoinAngles,
    right: CoinAngles,
    delta: f64,
    opts: &InferenceOptions,
) -> Result<(EdgeInference, EvolutionTrace)> {
    let (lo, hi) = opts.short_time;
    if hi > opts.steps || lo > hi {
        return Err(Error::InvalidParameter(format!("short-time range [{lo}, {hi}] outside 0..={}", opts.steps)));
    }
    let spec = left_right_spec(left, right, delta, opts.spectrum_sites)?;
    for a in [left, right] {
        winding_number(a.theta1, a.theta2, 0.0, DEFAULT_K_RESOLUTION)?;
    }
    let finite = eigendecompose(&build_operator(&spec)?, &opts.spectrum)?;
    let omega_delta = defective_frequency(&finite, 2.0 * PI / (opts.steps + 1) as f64);
    let eps_m = finite.eps_m;
    let regime = match eps_m {
        Some(e) if e < SMALL_GAP_EPS_M_OVER_PI * PI => GapRegime::Small,
        _ => GapRegime::Large,
    };

    let trace = evolve(&spec, &WalkerState::standard(), opts.steps, &EvolveOptions::default())?;
    let short_time_mean = trace.mean_p0(lo..=hi);
    let parity = if short_time_mean > opts.persistence_threshold { Parity::Odd } else { Parity::Even };
    let modes = detect_modes(&dft(&trace), omega_delta, &opts.peaks);
    let families: BTreeSet<ModeFamily> = modes.iter().map(|m| m.family).filter(|f| *f != ModeFamily::Other).collect();

    let mut consistent = BTreeSet::new();
    for dnu in 1..=3 {
        let odd = dnu % 2 == 1;
        if regime == GapRegime::Small && odd != (parity == Parity::Odd) {
            continue;
        }
        if predict_mode_families(dnu, regime)?.admits(&families) {
            consistent.insert(dnu);
        }
    }
    let ambiguous = consistent.len() != 1;
    if ambiguous {
        log::warn!(
            "edge-count inference ambiguous: parity {parity:?}, families {families:?}, consistent {consistent:?}"
        );
    }
    Ok((
        EdgeInference { short_time_mean, parity, omega_delta, eps_m, regime, modes, families, consistent, ambiguous },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn tagging_without_hint() {
        let o = PeakOptions::default();
        assert_eq!(tag_mode(PI - 1e-4, 1e-3, None, &o), ModeFamily::Pi);
        assert_eq!(tag_mode(1.0, 1e-3, None, &o), ModeFamily::Other);
        assert_eq!(tag_mode(0.0681, 6.3e-4, Some(0.0337), &o), ModeFamily::TwoOmega);
    }

    #[test]
    fn predictions() {
        assert_eq!(predict_mode_families(3, GapRegime::Large).unwrap().required.len(), 5);
        assert!(predict_mode_families(0, GapRegime::Large).is_err());
        assert!(predict_mode_families(4, GapRegime::Small).is_err());
    }
}
