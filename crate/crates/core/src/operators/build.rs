use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::BandedMatrix;
use super::coin::{CoinProfile, SLOT_THETA1, SLOT_THETA2, SLOT_THETA2_SHIFTED};
use super::lattice::Lattice;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    /// G S R(θ2) G⁻¹ S R(θ1)
    TwoStep,
    /// G⁻¹ S C(θ2) S C(θ2) G S C(θ1)
    ThreeStep,
    /// C(θ1/2) G⁻¹ S C(θ2) S C(θ2) G S C(θ1/2)
    ThreeStepSymmetric,
    /// G⁻¹ S C(θ2) S C(θ2+δ) G S C(θ1)
    ThreeStepPerturbed,
    /// As `ThreeStepPerturbed`, each coin slot carrying its own disorder.
    ThreeStepPerturbedDisordered,
    /// C(θ1/2) G⁻¹ S C(θ2) S C(θ2+δ) G S C(θ1/2)
    ThreeStepPerturbedSymmetric,
}

impl WalkKind {
    pub const ALL: [WalkKind; 6] = [
        WalkKind::TwoStep,
        WalkKind::ThreeStep,
        WalkKind::ThreeStepSymmetric,
        WalkKind::ThreeStepPerturbed,
        WalkKind::ThreeStepPerturbedDisordered,
        WalkKind::ThreeStepPerturbedSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WalkKind::TwoStep => "two_step",
            WalkKind::ThreeStep => "three_step",
            WalkKind::ThreeStepSymmetric => "three_step_symmetric",
            WalkKind::ThreeStepPerturbed => "three_step_perturbed",
            WalkKind::ThreeStepPerturbedDisordered => "three_step_perturbed_disordered",
            WalkKind::ThreeStepPerturbedSymmetric => "three_step_perturbed_symmetric",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Number of shift operators, i.e. the farthest hop in one step.
    pub fn hops(self) -> usize {
        match self {
            WalkKind::TwoStep => 2,
            _ => 3,
        }
    }

    pub fn is_perturbed(self) -> bool {
        matches!(
            self,
            WalkKind::ThreeStepPerturbed
                | WalkKind::ThreeStepPerturbedDisordered
                | WalkKind::ThreeStepPerturbedSymmetric
        )
    }

    pub fn is_symmetric_frame(self) -> bool {
        matches!(self, WalkKind::ThreeStepSymmetric | WalkKind::ThreeStepPerturbedSymmetric)
    }

    /// Factors in the order they act on a state.
    pub fn steps(self) -> &'static [Step] {
        use Angle::*;
        use Step::*;
        const C: CoinFamily = CoinFamily::Rotation;
        const R: CoinFamily = CoinFamily::Reflection;
        match self {
            WalkKind::TwoStep => &[Coin(R, Theta1), Shift, GainInverse, Coin(R, Theta2), Shift, Gain],
            WalkKind::ThreeStep => {
                &[Coin(C, Theta1), Shift, Gain, Coin(C, Theta2), Shift, Coin(C, Theta2), Shift, GainInverse]
            }
            WalkKind::ThreeStepSymmetric => &[
                Coin(C, HalfTheta1),
                Shift,
                Gain,
                Coin(C, Theta2),
                Shift,
                Coin(C, Theta2),
                Shift,
                GainInverse,
                Coin(C, HalfTheta1),
            ],
            WalkKind::ThreeStepPerturbed | WalkKind::ThreeStepPerturbedDisordered => {
                &[Coin(C, Theta1), Shift, Gain, Coin(C, Theta2Shifted), Shift, Coin(C, Theta2), Shift, GainInverse]
            }
            WalkKind::ThreeStepPerturbedSymmetric => &[
                Coin(C, HalfTheta1),
                Shift,
                Gain,
                Coin(C, Theta2Shifted),
                Shift,
                Coin(C, Theta2),
                Shift,
                GainInverse,
                Coin(C, HalfTheta1),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinFamily {
    /// C(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]
    Rotation,
    /// R(θ) = [[cos θ, sin θ], [sin θ, -cos θ]]
    Reflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angle {
    Theta1,
    HalfTheta1,
    Theta2,
    /// θ2 + δ
    Theta2Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Coin(CoinFamily, Angle),
    /// |x, L> -> |x-1, L>, |x, R> -> |x+1, R>
    Shift,
    /// diag(e^γ, e^-γ)
    Gain,
    GainInverse,
}

#[inline]
fn apply_coin(family: CoinFamily, theta: f64, a: f64, b: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    match family {
        CoinFamily::Rotation => (c * a - s * b, s * a + c * b),
        CoinFamily::Reflection => (c * a + s * b, s * a - c * b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub lattice: Lattice,
    pub coins: CoinProfile,
    pub gamma: f64,
    pub kind: WalkKind,
}

impl WalkSpec {
    pub fn new(lattice: Lattice, coins: CoinProfile, gamma: f64, kind: WalkKind) -> Self {
        Self { lattice, coins, gamma, kind }
    }

    pub fn validate(&self) -> Result<()> {
        self.coins.validate()?;
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        let hops = self.kind.hops();
        if self.lattice.num_sites() < 2 * hops + 2 {
            return Err(Error::LatticeTooSmall { num_sites: self.lattice.num_sites(), hops });
        }
        if self.coins.delta != 0.0 && !self.kind.is_perturbed() {
            return Err(Error::InvalidParameter(format!(
                "delta = {} given for unperturbed walk {}",
                self.coins.delta,
                self.kind.name()
            )));
        }
        if self.coins.disorder_amplitude != 0.0 && self.kind != WalkKind::ThreeStepPerturbedDisordered {
            return Err(Error::InvalidParameter(format!(
                "disorder given for walk {} which has no disordered coins",
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// Effective angle of each coin slot at every site.
    fn slot_angles(&self) -> Vec<[f64; 4]> {
        let c = &self.coins;
        let disordered = self.kind == WalkKind::ThreeStepPerturbedDisordered;
        self.lattice
            .positions()
            .map(|x| {
                let a = c.base_angles(x);
                let (d1, d2s, d2) = if disordered {
                    (
                        c.disorder_offset(x, SLOT_THETA1),
                        c.disorder_offset(x, SLOT_THETA2_SHIFTED),
                        c.disorder_offset(x, SLOT_THETA2),
                    )
                } else {
                    (0.0, 0.0, 0.0)
                };
                let t1 = a.theta1 + d1;
                [t1, t1 / 2.0, a.theta2 + d2, a.theta2 + d2s + c.delta]
            })
            .collect()
    }
}

fn angle_index(a: Angle) -> usize {
    match a {
        Angle::Theta1 => 0,
        Angle::HalfTheta1 => 1,
        Angle::Theta2 => 2,
        Angle::Theta2Shifted => 3,
    }
}

/// A walk operator held as a banded real matrix. Every factor (coins,
/// shift, gain) is real, so no imaginary parts are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperator {
    matrix: BandedMatrix,
    spec: WalkSpec,
    hops: usize,
}

pub fn build_operator(spec: &WalkSpec) -> Result<WalkOperator> {
    spec.validate()?;
    if !spec.lattice.is_periodic() {
        log::warn!("open boundary: shifted amplitude past the ends is discarded");
    }
    let lattice = &spec.lattice;
    let n = lattice.num_sites();
    let hops = spec.kind.hops();
    let steps = spec.kind.steps();
    let angles = spec.slot_angles();
    let (eg, eg_inv) = (spec.gamma.exp(), (-spec.gamma).exp());
    let width = 2 * hops + 1;
    let mut matrix = BandedMatrix::zeros(2 * n, 2 * hops + 1);
    // Sites reached from the column's site at relative offsets -hops..=hops.
    let mut local_sites: Vec<Option<usize>> = vec![None; width];
    let mut buf = vec![[0.0f64; 2]; width];
    let mut next = vec![[0.0f64; 2]; width];
    for site in 0..n {
        let x0 = lattice.position(site);
        for (r, slot) in local_sites.iter_mut().enumerate() {
            *slot = lattice.site_of(x0 + r as i64 - hops as i64);
        }
        for internal in 0..2 {
            buf.iter_mut().for_each(|v| *v = [0.0; 2]);
            buf[hops][internal] = 1.0;
            for step in steps {
                match *step {
                    Step::Coin(family, angle) => {
                        let ai = angle_index(angle);
                        for (v, s) in buf.iter_mut().zip(&local_sites) {
                            if let Some(s) = s {
                                if v[0] != 0.0 || v[1] != 0.0 {
                                    let (a, b) = apply_coin(family, angles[*s][ai], v[0], v[1]);
                                    *v = [a, b];
                                }
                            }
                        }
                    }
                    Step::Shift => {
                        next.iter_mut().for_each(|v| *v = [0.0; 2]);
                        for r in 0..width {
                            if r > 0 && local_sites[r - 1].is_some() {
                                next[r - 1][0] = buf[r][0];
                            }
                            if r + 1 < width && local_sites[r + 1].is_some() {
                                next[r + 1][1] = buf[r][1];
                            }
                        }
                        std::mem::swap(&mut buf, &mut next);
                    }
                    Step::Gain => buf.iter_mut().for_each(|v| *v = [v[0] * eg, v[1] * eg_inv]),
                    Step::GainInverse => buf.iter_mut().for_each(|v| *v = [v[0] * eg_inv, v[1] * eg]),
                }
            }
            let col = 2 * site + internal;
            for (v, s) in buf.iter().zip(&local_sites) {
                if let Some(s) = s {
                    for (c, &val) in v.iter().enumerate() {
                        if val != 0.0 {
                            matrix.set(2 * s + c, col, val);
                        }
                    }
                }
            }
        }
    }
    Ok(WalkOperator { matrix, spec: *spec, hops })
}

impl WalkOperator {
    pub fn spec(&self) -> &WalkSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Farthest position hop of one step.
    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        self.matrix.to_dense()
    }

    pub fn to_dense_complex(&self) -> faer::Mat<Complex64> {
        let d = self.to_dense();
        faer::Mat::from_fn(d.nrows(), d.ncols(), |i, j| Complex64::new(d[(i, j)], 0.0))
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(x)
    }

    /// Coordinate-list text: header `# dim=<2N> band=<hops>`, then
    /// `row col re im` per nonzero entry.
    pub fn export_coo(&self) -> String {
        let mut s = format!("# dim={} band={}\n", self.dim(), self.hops);
        for (r, c, v) in self.matrix.triplets() {
            let _ = writeln!(s, "{r} {c} {} {}", crate::io::fmt_f64(v), crate::io::fmt_f64(0.0));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(kind: WalkKind, n: usize, t1: f64, t2: f64, gamma: f64) -> WalkSpec {
        WalkSpec::new(Lattice::periodic(n).unwrap(), CoinProfile::homogeneous(t1, t2), gamma, kind)
    }

    #[test]
    fn zero_angles_give_triple_shift() {
        let op = build_operator(&spec(WalkKind::ThreeStep, 10, 0.0, 0.0, 0.0)).unwrap();
        let l = op.spec().lattice;
        for site in 0..10 {
            let x = l.position(site);
            let left = l.site_of(x - 3).unwrap();
            let right = l.site_of(x + 3).unwrap();
            for r in 0..20 {
                assert_eq!(op.matrix().get(r, 2 * site), if r == 2 * left { 1.0 } else { 0.0 });
                assert_eq!(op.matrix().get(r, 2 * site + 1), if r == 2 * right + 1 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn gain_without_coins_cancels_for_three_step() {
        let op = build_operator(&spec(WalkKind::ThreeStep, 12, 0.0, 0.0, 0.4)).unwrap();
        assert!(op.matrix().triplets().all(|(_, _, v)| v == 1.0));
    }

    #[test]
    fn small_lattice_rejected() {
        assert!(matches!(
            build_operator(&spec(WalkKind::ThreeStep, 7, 0.1, 0.1, 0.0)),
            Err(Error::LatticeTooSmall { .. })
        ));
        assert!(build_operator(&spec(WalkKind::TwoStep, 6, 0.1, 0.1, 0.0)).is_ok());
    }

    #[test]
    fn delta_requires_perturbed_kind() {
        let mut s = spec(WalkKind::ThreeStep, 12, 0.1, 0.1, 0.0);
        s.coins.delta = 0.05;
        assert!(build_operator(&s).is_err());
        s.kind = WalkKind::ThreeStepPerturbed;
        assert!(build_operator(&s).is_ok());
    }

    #[test]
    fn negative_gamma_rejected() {
        assert!(build_operator(&spec(WalkKind::ThreeStep, 12, 0.1, 0.1, -0.1)).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in WalkKind::ALL {
            assert_eq!(WalkKind::from_name(k.name()), Some(k));
        }
    }

    #[test]
    fn open_boundary_drops_amplitude() {
        let mut s = spec(WalkKind::ThreeStep, 12, PI / 3.0, PI / 5.0, 0.0);
        s.lattice = Lattice::new(12, super::super::lattice::Boundary::Open).unwrap();
        let op = build_operator(&s).unwrap();
        // No couplings between the two ends.
        assert!(op.matrix().triplets().all(|(r, c, _)| (r as i64 - c as i64).abs() <= 7));
    }

    #[test]
    fn coo_export_header() {
        let op = build_operator(&spec(WalkKind::ThreeStep, 10, 0.3, 0.2, 0.0)).unwrap();
        let text = op.export_coo();
        assert!(text.starts_with("# dim=20 band=3\n"));
        assert_eq!(text.lines().count(), 1 + op.matrix().triplets().count());
    }
}
