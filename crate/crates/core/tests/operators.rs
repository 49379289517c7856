use std::f64::consts::PI;

use proptest::prelude::*;
use ptwalk_core::operators::{
    config::{format_walk_spec, parse_walk_spec},
    sublattice_reorder, unitarity_residual, verify_symmetries, BlockForm, SLOT_THETA1, SLOT_THETA2,
};
use ptwalk_core::spectrum::eigenvalues;
use ptwalk_core::{
    build_operator, Boundary, CoinAngles, CoinProfile, Complex64, Error, Lattice, Layout, WalkKind, WalkSpec,
};

type Dense = Vec<Vec<f64>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn shift(lat: &Lattice) -> Dense {
    let n = lat.num_sites();
    let mut s = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        let x = lat.position(i);
        if let Some(j) = lat.site_of(x - 1) {
            s[2 * j][2 * i] = 1.0;
        }
        if let Some(j) = lat.site_of(x + 1) {
            s[2 * j + 1][2 * i + 1] = 1.0;
        }
    }
    s
}

fn gain(n: usize, g: f64) -> Dense {
    let mut m = identity(2 * n);
    for i in 0..n {
        m[2 * i][2 * i] = g.exp();
        m[2 * i + 1][2 * i + 1] = (-g).exp();
    }
    m
}

fn coin(lat: &Lattice, theta: impl Fn(i64) -> f64, reflection: bool) -> Dense {
    let n = lat.num_sites();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        let (s, c) = theta(lat.position(i)).sin_cos();
        let (l, r) = (2 * i, 2 * i + 1);
        if reflection {
            m[l][l] = c;
            m[l][r] = s;
            m[r][l] = s;
            m[r][r] = -c;
        } else {
            m[l][l] = c;
            m[l][r] = -s;
            m[r][l] = s;
            m[r][r] = c;
        }
    }
    m
}

/// Product of explicit factor matrices, written left to right as operators
/// are composed.
fn product(factors: &[Dense]) -> Dense {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| mul(&acc, f))
}

fn oracle(spec: &WalkSpec) -> Dense {
    let lat = spec.lattice;
    let n = lat.num_sites();
    let c = spec.coins;
    let t1 = |x| c.base_angles(x).theta1;
    let t2 = |x| c.base_angles(x).theta2;
    let t2d = |x| c.base_angles(x).theta2 + c.delta;
    let half = |x| c.base_angles(x).theta1 / 2.0;
    let (s, g, gi) = (shift(&lat), gain(n, spec.gamma), gain(n, -spec.gamma));
    match spec.kind {
        WalkKind::TwoStep => product(&[g, s.clone(), coin(&lat, t2, true), gi, s, coin(&lat, t1, true)]),
        WalkKind::ThreeStep => product(&[
            gi,
            s.clone(),
            coin(&lat, t2, false),
            s.clone(),
            coin(&lat, t2, false),
            g,
            s,
            coin(&lat, t1, false),
        ]),
        WalkKind::ThreeStepSymmetric => product(&[
            coin(&lat, half, false),
            gi,
            s.clone(),
            coin(&lat, t2, false),
            s.clone(),
            coin(&lat, t2, false),
            g,
            s,
            coin(&lat, half, false),
        ]),
        WalkKind::ThreeStepPerturbed => product(&[
            gi,
            s.clone(),
            coin(&lat, t2, false),
            s.clone(),
            coin(&lat, t2d, false),
            g,
            s,
            coin(&lat, t1, false),
        ]),
        WalkKind::ThreeStepPerturbedSymmetric => product(&[
            coin(&lat, half, false),
            gi,
            s.clone(),
            coin(&lat, t2, false),
            s.clone(),
            coin(&lat, t2d, false),
            g,
            s,
            coin(&lat, half, false),
        ]),
        WalkKind::ThreeStepPerturbedDisordered => unreachable!(),
    }
}

fn max_diff(spec: &WalkSpec) -> f64 {
    let want = oracle(spec);
    let got = build_operator(spec).unwrap().to_dense();
    let mut worst: f64 = 0.0;
    for (i, row) in want.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((got[(i, j)] - v).abs());
        }
    }
    worst
}

fn homogeneous(kind: WalkKind, n: usize, t1: f64, t2: f64, gamma: f64) -> WalkSpec {
    WalkSpec::new(Lattice::periodic(n).unwrap(), CoinProfile::homogeneous(t1, t2), gamma, kind)
}

fn inner_outer(n_half: usize, half_width: usize, outer: (f64, f64), gamma: f64, kind: WalkKind) -> WalkSpec {
    WalkSpec::new(
        Lattice::symmetric(n_half),
        CoinProfile::inner_outer(half_width, CoinAngles::over_pi(0.4, 0.1), CoinAngles::over_pi(outer.0, outer.1)),
        gamma,
        kind,
    )
}

#[test]
fn matches_factor_product_for_every_kind() {
    let kinds = [
        WalkKind::TwoStep,
        WalkKind::ThreeStep,
        WalkKind::ThreeStepSymmetric,
        WalkKind::ThreeStepPerturbed,
        WalkKind::ThreeStepPerturbedSymmetric,
    ];
    for kind in kinds {
        let mut spec = inner_outer(9, 4, (-0.2, 0.3), 0.13, kind);
        if kind.is_perturbed() {
            spec.coins.delta = 0.07;
        }
        assert!(max_diff(&spec) < 1e-13, "{kind:?}");
        spec.lattice = Lattice::new(19, Boundary::Open).unwrap();
        assert!(max_diff(&spec) < 1e-13, "{kind:?} open");
    }
}

#[test]
fn unitary_at_zero_gamma() {
    let op = build_operator(&homogeneous(WalkKind::ThreeStep, 10, PI / 3.0, PI / 5.0, 0.0)).unwrap();
    assert!(unitarity_residual(&op) < 1e-12);
}

#[test]
fn zero_angles_give_triple_shift() {
    let spec = homogeneous(WalkKind::ThreeStep, 12, 0.0, 0.0, 0.0);
    let op = build_operator(&spec).unwrap();
    let lat = spec.lattice;
    let mut want = vec![vec![0.0; 24]; 24];
    for i in 0..12 {
        let x = lat.position(i);
        want[2 * lat.site_of(x - 3).unwrap()][2 * i] = 1.0;
        want[2 * lat.site_of(x + 3).unwrap() + 1][2 * i + 1] = 1.0;
    }
    let got = op.to_dense();
    for i in 0..24 {
        for j in 0..24 {
            assert_eq!(got[(i, j)], want[i][j], "({i}, {j})");
        }
    }
}

#[test]
fn unbroken_point_has_unimodular_spectrum() {
    let op = build_operator(&homogeneous(WalkKind::ThreeStep, 100, 0.4 * PI, 0.1 * PI, 0.1)).unwrap();
    let l = eigenvalues(&op).unwrap();
    assert!(l.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
}

#[test]
fn band_and_determinism() {
    let spec = inner_outer(20, 8, (-0.6, 0.2), 0.1, WalkKind::ThreeStepSymmetric);
    let a = build_operator(&spec).unwrap();
    let b = build_operator(&spec).unwrap();
    assert_eq!(a, b);
    let n = spec.lattice.num_sites();
    let hb = a.matrix().half_band();
    assert_eq!(hb, 2 * 3 + 1);
    for (r, c, _) in a.matrix().triplets() {
        let d = (r as i64 - c as i64).rem_euclid(2 * n as i64) as usize;
        assert!(d.min(2 * n - d) <= hb);
    }
}

#[test]
fn two_step_is_block_diagonal() {
    let op = build_operator(&homogeneous(WalkKind::TwoStep, 20, 0.3, -1.1, 0.1)).unwrap();
    let s = sublattice_reorder(&op).unwrap();
    assert_eq!(s.form, BlockForm::BlockDiagonal);
    assert_eq!(s.off_diagonal_norm, 0.0);
}

#[test]
fn three_step_is_block_off_diagonal() {
    let op = build_operator(&homogeneous(WalkKind::ThreeStep, 20, 0.4 * PI, 0.1 * PI, 0.1)).unwrap();
    let s = sublattice_reorder(&op).unwrap();
    assert_eq!(s.form, BlockForm::BlockOffDiagonal);
    assert_eq!(s.diagonal_norm, 0.0);
    assert!(s.anticommutator_residual < 1e-12);

    let mut p = homogeneous(WalkKind::ThreeStepPerturbed, 20, 0.4 * PI, 0.1 * PI, 0.1);
    p.coins.delta = 0.05;
    let s = sublattice_reorder(&build_operator(&p).unwrap()).unwrap();
    assert_eq!(s.form, BlockForm::BlockOffDiagonal);
}

#[test]
fn odd_ring_has_no_sublattice_split() {
    let op = build_operator(&homogeneous(WalkKind::ThreeStep, 21, 0.4, 0.1, 0.1)).unwrap();
    assert!(matches!(sublattice_reorder(&op), Err(Error::OddPeriodicLattice(21))));
}

#[test]
fn symmetric_frame_has_all_four_symmetries() {
    let op = build_operator(&inner_outer(60, 20, (-0.2, 0.3), 0.1, WalkKind::ThreeStepSymmetric)).unwrap();
    let r = verify_symmetries(&op);
    assert!(r.pt_check().unwrap().holds);
    assert!(r.trs.holds && r.phs.holds && r.chiral.holds);
}

#[test]
fn perturbation_keeps_only_particle_hole() {
    let mut spec = inner_outer(60, 20, (-0.2, 0.3), 0.1, WalkKind::ThreeStepPerturbedSymmetric);
    spec.coins.delta = 0.05;
    let r = verify_symmetries(&build_operator(&spec).unwrap());
    assert!(r.phs.holds);
    assert!(!r.trs.holds && !r.chiral.holds);
    assert!(!r.pt.unwrap().holds);
}

#[test]
fn asymmetric_profile_rejects_pt() {
    let spec = WalkSpec::new(
        Lattice::symmetric(30),
        CoinProfile::left_right(CoinAngles::over_pi(0.75, 0.05), CoinAngles::over_pi(-1.0 / 3.0, 0.0)),
        0.1,
        WalkKind::ThreeStepSymmetric,
    );
    let r = verify_symmetries(&build_operator(&spec).unwrap());
    assert!(matches!(r.pt_check(), Err(Error::ParityViolated)));
}

#[test]
fn inner_outer_is_exactly_parity_symmetric() {
    let p = CoinProfile::inner_outer(50, CoinAngles::over_pi(0.4, 0.1), CoinAngles::over_pi(-0.6, 0.15));
    let lat = Lattice::symmetric(400);
    assert!(p.is_parity_symmetric(&lat));
    for x in 0..=400 {
        assert_eq!(p.base_angles(x).theta1.to_bits(), p.base_angles(-x).theta1.to_bits());
        assert_eq!(p.base_angles(x).theta2.to_bits(), p.base_angles(-x).theta2.to_bits());
    }
}

#[test]
fn disorder_draws_are_bounded_and_reproducible() {
    let p = CoinProfile::homogeneous(0.3, 0.2).with_delta(0.05).with_disorder(0.1, 7);
    let q = CoinProfile::homogeneous(0.3, 0.2).with_delta(0.05).with_disorder(0.1, 8);
    let draws: Vec<f64> = (-200..=200).map(|x| p.disorder_offset(x, SLOT_THETA1)).collect();
    assert!(draws.iter().all(|d| d.abs() <= 0.1));
    assert!(draws.iter().any(|d| *d > 0.05) && draws.iter().any(|d| *d < -0.05));
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    assert!(mean.abs() < 0.02);
    assert_eq!(draws, (-200..=200).map(|x| p.disorder_offset(x, SLOT_THETA1)).collect::<Vec<_>>());
    assert_ne!(p.disorder_offset(3, SLOT_THETA1), q.disorder_offset(3, SLOT_THETA1));
    assert_ne!(p.disorder_offset(3, SLOT_THETA1), p.disorder_offset(3, SLOT_THETA2));

    let spec = WalkSpec::new(Lattice::symmetric(40), p, 0.1, WalkKind::ThreeStepPerturbedDisordered);
    assert_eq!(build_operator(&spec).unwrap(), build_operator(&spec).unwrap());
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = homogeneous(WalkKind::ThreeStep, 20, 0.1, 0.2, 0.1);
    s.coins.delta = 0.05;
    assert!(build_operator(&s).is_err());
    let s = homogeneous(WalkKind::ThreeStep, 7, 0.1, 0.2, 0.1);
    assert!(matches!(build_operator(&s), Err(Error::LatticeTooSmall { .. })));
    let s = homogeneous(WalkKind::ThreeStep, 20, f64::NAN, 0.2, 0.1);
    assert!(build_operator(&s).is_err());
    let s = homogeneous(WalkKind::ThreeStep, 20, 0.1, 0.2, -0.1);
    assert!(build_operator(&s).is_err());
}

#[test]
fn coo_export_lists_every_nonzero() {
    let op = build_operator(&homogeneous(WalkKind::ThreeStep, 10, 0.3, 0.7, 0.2)).unwrap();
    let text = op.export_coo();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# dim=20 band=3");
    let dense = op.to_dense();
    let mut count = 0;
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let (r, c): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(f[2].parse::<f64>().unwrap(), dense[(r, c)]);
        assert_eq!(f[3].parse::<f64>().unwrap(), 0.0);
        count += 1;
    }
    let nonzero = (0..20).flat_map(|r| (0..20).map(move |c| (r, c))).filter(|&(r, c)| dense[(r, c)] != 0.0).count();
    assert_eq!(count, nonzero);
}

#[test]
fn config_round_trip() {
    let spec = inner_outer(400, 50, (-0.6, 0.15), 0.1, WalkKind::ThreeStepSymmetric);
    let back = parse_walk_spec(&format_walk_spec(&spec)).unwrap();
    assert_eq!(back, spec);
    let text = "kind = \"three_step_perturbed\"\nsites = 601\nlayout = \"left_right\"\ndelta = 0.05\n\
                theta1_left_over_pi = 0.75\ntheta2_left_over_pi = 0.05\ntheta1_right_over_pi = -0.2\ntheta2_right = 0.0\n";
    let s = parse_walk_spec(text).unwrap();
    assert_eq!(s.lattice.num_sites(), 601);
    assert!(matches!(s.coins.layout, Layout::LeftRight { .. }));
    assert!(parse_walk_spec("sites = 10\nbogus = 1\n").is_err());
}

fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unitarity_for_any_angles(t1 in -PI..PI, t2 in -PI..PI, n in 8usize..40, kind in 0usize..3) {
        let kind = [WalkKind::ThreeStep, WalkKind::ThreeStepSymmetric, WalkKind::TwoStep][kind];
        let op = build_operator(&homogeneous(kind, n, t1, t2, 0.0)).unwrap();
        prop_assert!(unitarity_residual(&op) < 1e-12);
    }

    #[test]
    fn determinant_has_unit_modulus(t1 in -PI..PI, t2 in -PI..PI, g in 0.0f64..0.4, n in 8usize..50) {
        let op = build_operator(&homogeneous(WalkKind::ThreeStep, n, t1, t2, g)).unwrap();
        let log_det: f64 = eigenvalues(&op).unwrap().iter().map(|z| z.norm().ln()).sum();
        prop_assert!(log_det.abs() < 1e-8);
    }

    #[test]
    fn symmetric_frame_is_similar(a in -1.0f64..1.0, b in -1.0f64..1.0, g in 0.0f64..0.3, delta in -0.1f64..0.1) {
        let profile = CoinProfile::inner_outer(5, CoinAngles::over_pi(0.4, 0.1), CoinAngles::over_pi(a, b)).with_delta(delta);
        let lat = Lattice::symmetric(15);
        let u = build_operator(&WalkSpec::new(lat, profile, g, WalkKind::ThreeStepPerturbed)).unwrap();
        let v = build_operator(&WalkSpec::new(lat, profile, g, WalkKind::ThreeStepPerturbedSymmetric)).unwrap();
        let (lu, lv) = (eigenvalues(&u).unwrap(), eigenvalues(&v).unwrap());
        // eigenvalues near an exceptional point move like sqrt of the rounding error
        prop_assert!(spectrum_distance(&lu, &lv) < 1e-5);
        prop_assert!(spectrum_distance(&lv, &lu) < 1e-5);
    }

    #[test]
    fn rebuild_is_bit_identical(seed in any::<u64>(), amp in 0.0f64..0.5) {
        let p = CoinProfile::inner_outer(4, CoinAngles::new(0.3, 0.1), CoinAngles::new(-0.5, 0.9))
            .with_delta(0.05)
            .with_disorder(amp, seed);
        let spec = WalkSpec::new(Lattice::symmetric(12), p, 0.1, WalkKind::ThreeStepPerturbedDisordered);
        prop_assert_eq!(build_operator(&spec).unwrap(), build_operator(&spec).unwrap());
    }
}
