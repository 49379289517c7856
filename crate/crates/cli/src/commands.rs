use std::f64::consts::PI;

use anyhow::{bail, Result};
use ptwalk_core::bulk::{
    angle_grid, bulk_gap_status, dispersion, dispersion_csv, k_grid, phase_diagram, phase_diagram_csv, winding_number,
    CellOutcome, DEFAULT_K_RESOLUTION,
};
use ptwalk_core::dynamics::{
    defective_frequency, detect_modes, dft, evolve, infer_edge_count_traced, left_right_spec, snapshot_csv,
    spectrum_csv as fourier_csv, trace_csv, DetectedMode, EvolveOptions, InferenceOptions, Normalization, PeakOptions,
    WalkerState,
};
use ptwalk_core::perturbation::{
    delta_nu, delta_sweep, disorder_ensemble, disordered_spec, ensemble_csv, find_exceptional_point, sweep_csv,
    EpOptions, Regime,
};
use ptwalk_core::spectrum::{
    edge_count_map, edge_map_csv, eigendecompose, eigenvector_csv, spectrum_csv, EdgeCountOutcome, EdgeMapSetup,
    SpectrumResult,
};
use ptwalk_core::{build_operator, CoinAngles, Error};
use serde_json::{json, Value as Json};

use crate::settings::Settings;

pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Default)]
pub struct Output {
    pub artifacts: Vec<Artifact>,
    pub results: Json,
}

impl Output {
    fn add(&mut self, name: impl Into<String>, content: String) {
        self.artifacts.push(Artifact { name: name.into(), content });
    }
}

pub fn run(subcommand: &str, s: &mut Settings) -> Result<Output> {
    match subcommand {
        "dispersion" => run_dispersion(s),
        "phase-diagram" => run_phase_diagram(s),
        "spectrum" => run_spectrum(s),
        "edge-map" => run_edge_map(s),
        "delta-sweep" => run_delta_sweep(s),
        "ep-find" => run_ep_find(s),
        "disorder" => run_disorder(s),
        "evolve" => run_evolve(s),
        "infer-edges" => run_infer_edges(s),
        other => bail!(Error::Config(format!("unknown subcommand {other:?}"))),
    }
}

fn run_dispersion(s: &mut Settings) -> Result<Output> {
    let t1 = s.angle("theta1", None)?;
    let t2 = s.angle("theta2", None)?;
    let gamma = s.f64("gamma", 0.0)?;
    let k_res = s.usize("k_res", 1000)?;
    s.check()?;
    let mut out = Output::default();
    out.add("dispersion.csv", dispersion_csv(&dispersion(t1, t2, gamma, &k_grid(k_res))));
    let gap = bulk_gap_status(t1, t2, gamma, k_res)?;
    let number = winding_number(t1, t2, gamma, k_res).ok();
    out.results = json!({
        "gap": gap,
        "nu_shifted": number.and_then(|n| n.nu_shifted_int()),
    });
    Ok(out)
}

fn run_phase_diagram(s: &mut Settings) -> Result<Output> {
    let gamma = s.f64("gamma", 0.0)?;
    let grid = s.usize("grid", 101)?;
    let k_res = s.usize("k_res", DEFAULT_K_RESOLUTION)?;
    if grid == 0 {
        bail!(Error::InvalidParameter("grid must be positive".into()));
    }
    s.check()?;
    let g = angle_grid(grid);
    let cells = phase_diagram(&g, &g, gamma, k_res)?;
    let mut histogram = std::collections::BTreeMap::new();
    for c in &cells {
        let key = match (&c.outcome, c.number().and_then(|n| n.nu_shifted_int())) {
            (_, Some(n)) => n.to_string(),
            (CellOutcome::Failed { .. }, _) => "failed".to_string(),
            _ => "gap_closed".to_string(),
        };
        *histogram.entry(key).or_insert(0usize) += 1;
    }
    let mut out = Output::default();
    out.add("phase_diagram.csv", phase_diagram_csv(&cells));
    out.results = json!({ "cells": cells.len(), "nu_shifted_counts": histogram });
    Ok(out)
}

fn localized_summary(r: &SpectrumResult) -> Json {
    r.eigenpairs
        .iter()
        .filter(|p| p.class.is_localized())
        .map(|p| {
            json!({
                "class": p.class.name(),
                "re_lambda": p.lambda.re,
                "im_lambda": p.lambda.im,
                "loc_center": p.localization_center,
                "loc_length": p.localization_length,
            })
        })
        .collect()
}

fn spectrum_results(r: &SpectrumResult) -> Json {
    json!({
        "counts": r.counts,
        "eps_m_over_pi": r.eps_m.map(|e| e / PI),
        "delta_nu": delta_nu(&r.spec).ok(),
        "interfaces": r.interfaces,
        "localized": localized_summary(r),
    })
}

fn run_spectrum(s: &mut Settings) -> Result<Output> {
    let spec = s.walk(801)?;
    let opts = s.spectrum_options()?;
    let dump = s.string("eigenvectors", "none", &["none", "localized", "edge_min_re"])?;
    s.check()?;
    let r = eigendecompose(&build_operator(&spec)?, &opts)?;
    let mut out = Output::default();
    out.add("spectrum.csv", spectrum_csv(&r));
    let chosen: Vec<usize> = match dump.as_str() {
        "localized" => (0..r.eigenpairs.len()).filter(|&i| r.eigenpairs[i].class.is_localized()).collect(),
        "edge_min_re" => (0..r.eigenpairs.len())
            .filter(|&i| r.eigenpairs[i].class.is_edge())
            .min_by(|&a, &b| r.eigenpairs[a].lambda.re.total_cmp(&r.eigenpairs[b].lambda.re))
            .into_iter()
            .collect(),
        _ => Vec::new(),
    };
    for i in chosen {
        let p = &r.eigenpairs[i];
        out.add(format!("eigvec_{}_{i}.csv", p.class.name()), eigenvector_csv(p, &spec.lattice));
    }
    out.results = spectrum_results(&r);
    Ok(out)
}

fn run_edge_map(s: &mut Settings) -> Result<Output> {
    let inner = CoinAngles::new(s.angle("theta1_inner", Some(0.4))?, s.angle("theta2_inner", Some(0.1))?);
    let setup = EdgeMapSetup {
        inner,
        gamma: s.f64("gamma", 0.1)?,
        half_width: s.usize("half_width", 50)?,
        num_sites: s.usize("sites", 241)?,
        k_resolution: s.usize("k_res", 4096)?,
    };
    let grid = s.usize("grid", 21)?;
    let opts = s.spectrum_options()?;
    s.check()?;
    let g = angle_grid(grid);
    let cells = edge_count_map(&g, &g, &setup, &opts);
    let status = |f: fn(&EdgeCountOutcome) -> bool| cells.iter().filter(|c| f(&c.outcome)).count();
    let mut out = Output::default();
    out.add("edge_map.csv", edge_map_csv(&cells));
    out.results = json!({
        "counted": status(|o| matches!(o, EdgeCountOutcome::Counts(_))),
        "no_count": status(|o| matches!(o, EdgeCountOutcome::NoCount)),
        "failed": status(|o| matches!(o, EdgeCountOutcome::Failed { .. })),
    });
    Ok(out)
}

fn delta_grid(s: &mut Settings) -> Result<Vec<f64>> {
    if let Some(d) = s.f64_list("deltas")? {
        return Ok(d);
    }
    let lo = s.f64("delta_min", 0.0)?;
    let hi = s.f64("delta_max", 0.1)?;
    let n = s.usize("delta_count", 11)?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    })
}

fn run_delta_sweep(s: &mut Settings) -> Result<Output> {
    let base = s.walk(801)?;
    let deltas = delta_grid(s)?;
    let opts = s.spectrum_options()?;
    s.check()?;
    let sweep = delta_sweep(&base, &deltas, &opts)?;
    let mut out = Output::default();
    out.add("sweep.csv", sweep_csv(&sweep));
    let points: Vec<Json> = sweep
        .points
        .iter()
        .map(|p| json!({ "delta": p.delta, "regime": p.regime.name(), "max_abs_im": p.max_abs_im, "counts": p.counts }))
        .collect();
    out.results = json!({ "ep_bracket": sweep.ep_bracket, "unresolved": sweep.unresolved, "points": points });
    Ok(out)
}

fn run_ep_find(s: &mut Settings) -> Result<Output> {
    let base = s.walk(801)?;
    let lo = s.f64("delta_lo", 0.05)?;
    let hi = s.f64("delta_hi", 0.08)?;
    let d = EpOptions::default();
    let ep_opts = EpOptions {
        tol_delta: s.f64("tol_delta", d.tol_delta)?,
        prescan_points: s.usize("prescan_points", d.prescan_points)?,
    };
    let opts = s.spectrum_options()?;
    s.check()?;
    let ep = find_exceptional_point(&base, lo, hi, &ep_opts, &opts)?;
    let mut w = ptwalk_core::io::CsvWriter::new(&["delta_ep", "bracket_lo", "bracket_hi", "eigenvector_overlap"]);
    use ptwalk_core::io::Field;
    w.row(&[Field::F(ep.delta_ep), Field::F(ep.bracket.0), Field::F(ep.bracket.1), Field::F(ep.eigenvector_overlap)]);
    let mut out = Output::default();
    out.add("ep.csv", w.finish());
    out.results = json!({
        "delta_ep": ep.delta_ep,
        "bracket": ep.bracket,
        "evaluations": ep.evaluations,
        "eigenvector_overlap": ep.eigenvector_overlap,
        "ep_imag_threshold": ptwalk_core::perturbation::EP_IMAG_THRESHOLD,
    });
    Ok(out)
}

fn run_disorder(s: &mut Settings) -> Result<Output> {
    let base = s.walk(801)?;
    let theta_r = s.f64("theta_r", 0.1)?;
    let count = s.u64("seeds", ptwalk_core::perturbation::DEFAULT_SEEDS as u64)?;
    let first = s.u64("seed", 0)?;
    let dump = s.bool("dump_spectrum", false)?;
    let opts = s.spectrum_options()?;
    s.check()?;
    let seeds: Vec<u64> = (first..first + count).collect();
    let ens = disorder_ensemble(&base, theta_r, &seeds, &opts)?;
    let mut out = Output::default();
    out.add("ensemble.csv", ensemble_csv(&ens));
    if dump {
        let r = eigendecompose(&build_operator(&disordered_spec(&base, theta_r, first))?, &opts)?;
        out.add(format!("spectrum_seed{first}.csv"), spectrum_csv(&r));
    }
    out.results = json!({
        "all_real": ens.fraction(Regime::AllReal),
        "at_exceptional": ens.fraction(Regime::AtExceptional),
        "conjugate_pairs": ens.fraction(Regime::ConjugatePairs),
    });
    Ok(out)
}

fn modes_json(modes: &[DetectedMode]) -> Json {
    modes
        .iter()
        .map(|m| {
            json!({
                "omega_over_pi": m.omega / PI,
                "family": m.family.name(),
                "magnitude": m.magnitude,
                "background": m.background,
            })
        })
        .collect()
}

fn peak_options(s: &mut Settings) -> Result<PeakOptions> {
    let d = PeakOptions::default();
    Ok(PeakOptions {
        kappa: s.f64("kappa", d.kappa)?,
        half_band: s.usize("half_band", d.half_band)?,
        slack_bins: s.f64("slack_bins", d.slack_bins)?,
        rel_floor: s.f64("rel_floor", d.rel_floor)?,
    })
}

fn run_evolve(s: &mut Settings) -> Result<Output> {
    let spec = s.walk(801)?;
    let steps = s.usize("steps", 1000)?;
    let snapshot_times = s.usize_list("snapshots")?;
    let normalization = match s.string("normalization", "per_step", &["per_step", "raw"])?.as_str() {
        "raw" => Normalization::Raw,
        _ => Normalization::PerStep,
    };
    let cap = s.usize("window_cap", 0)?;
    let hint_sites = s.usize("hint_sites", 0)?;
    let peaks = peak_options(s)?;
    let opts = s.spectrum_options()?;
    s.check()?;
    if let Some(&t) = snapshot_times.iter().find(|&&t| t > steps) {
        bail!(Error::InvalidParameter(format!("snapshot time {t} exceeds steps {steps}")));
    }
    let evolve_opts = EvolveOptions { window_cap: (cap > 0).then_some(cap), snapshot_times, normalization };
    let trace = evolve(&spec, &WalkerState::standard(), steps, &evolve_opts)?;
    let hint = if hint_sites > 0 {
        let mut ring = spec;
        ring.lattice = ptwalk_core::Lattice::periodic(hint_sites)?;
        let r = eigendecompose(&build_operator(&ring)?, &opts)?;
        defective_frequency(&r, 2.0 * PI / (steps + 1) as f64)
    } else {
        None
    };
    let spectrum = dft(&trace);
    let modes = detect_modes(&spectrum, hint, &peaks);
    let mut out = Output::default();
    out.add("trace.csv", trace_csv(&trace));
    out.add("fourier.csv", fourier_csv(&spectrum));
    for (t, dist) in &trace.snapshots {
        out.add(format!("snapshot_t{t}.csv"), snapshot_csv(dist));
    }
    out.results = json!({
        "omega_delta_over_pi": hint.map(|w| w / PI),
        "modes": modes_json(&modes),
        "log_scale": trace.log_scale,
        "leaked": trace.leaked,
        "window_cap": trace.window_cap,
        "max_window_sites": trace.max_window_sites,
    });
    Ok(out)
}

fn run_infer_edges(s: &mut Settings) -> Result<Output> {
    let left = CoinAngles::new(s.angle("theta1_left", None)?, s.angle("theta2_left", None)?);
    let right = CoinAngles::new(s.angle("theta1_right", None)?, s.angle("theta2_right", None)?);
    let delta = s.f64("delta", 0.05)?;
    let d = InferenceOptions::default();
    let opts = InferenceOptions {
        steps: s.usize("steps", d.steps)?,
        short_time: (s.usize("short_time_lo", d.short_time.0)?, s.usize("short_time_hi", d.short_time.1)?),
        persistence_threshold: s.f64("persistence_threshold", d.persistence_threshold)?,
        spectrum_sites: s.usize("sites", d.spectrum_sites)?,
        peaks: peak_options(s)?,
        spectrum: s.spectrum_options()?,
    };
    s.check()?;
    // validates the pair before the long evolution
    left_right_spec(left, right, delta, opts.spectrum_sites)?.validate()?;
    let (inf, trace) = infer_edge_count_traced(left, right, delta, &opts)?;
    let mut out = Output::default();
    out.add("trace.csv", trace_csv(&trace));
    out.add("fourier.csv", fourier_csv(&dft(&trace)));
    out.results = json!({
        "short_time_mean": inf.short_time_mean,
        "parity": inf.parity,
        "omega_delta_over_pi": inf.omega_delta.map(|w| w / PI),
        "eps_m_over_pi": inf.eps_m.map(|e| e / PI),
        "regime": inf.regime,
        "modes": modes_json(&inf.modes),
        "families": inf.families.iter().map(|f| f.name()).collect::<Vec<_>>(),
        "consistent_delta_nu": inf.consistent,
        "ambiguous": inf.ambiguous,
    });
    Ok(out)
}
