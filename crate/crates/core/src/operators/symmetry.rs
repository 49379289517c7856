use serde::{Deserialize, Serialize};

use super::banded::BandedMatrix;
use super::build::WalkOperator;
use crate::error::{Error, Result};

/// Relative threshold: a relation holds when its residual is below
/// `SYMMETRY_RTOL * ||U||_F`.
pub const SYMMETRY_RTOL: f64 = 1e-10;

/// Internal-space matrices acting on (|L>, |R>). σ2 is imaginary and not
/// needed by any of the relations checked here.
pub const SIGMA0: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
pub const SIGMA1: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
pub const SIGMA3: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

/// Symmetry operators as (position map, internal matrix) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryOperator {
    /// Σ |-x><x| ⊗ σ3
    ParityTime,
    /// Σ |x><x| ⊗ σ1
    TimeReversal,
    /// Σ |x><x| ⊗ σ0
    ParticleHole,
    /// Σ |x><x| ⊗ σ1
    Chiral,
}

impl SymmetryOperator {
    pub fn internal(self) -> [[f64; 2]; 2] {
        match self {
            SymmetryOperator::ParityTime => SIGMA3,
            SymmetryOperator::TimeReversal | SymmetryOperator::Chiral => SIGMA1,
            SymmetryOperator::ParticleHole => SIGMA0,
        }
    }

    pub fn reflects_position(self) -> bool {
        self == SymmetryOperator::ParityTime
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub residual: f64,
    pub holds: bool,
}

impl Relation {
    fn new(residual: f64, norm: f64) -> Self {
        Self { residual, holds: residual < SYMMETRY_RTOL * norm }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub norm: f64,
    /// (PT) U* (PT)⁻¹ U - 1. `None` when the coin profile is not parity
    /// symmetric and the check is rejected.
    pub pt: Option<Relation>,
    /// T Uᵀ T⁻¹ - U
    pub trs: Relation,
    /// Ξ U* Ξ⁻¹ - U
    pub phs: Relation,
    /// Γ U† Γ⁻¹ - U
    pub chiral: Relation,
}

impl SymmetryReport {
    pub fn pt_check(&self) -> Result<Relation> {
        self.pt.ok_or(Error::ParityViolated)
    }
}

type SparseRows = Vec<Vec<(usize, f64)>>;

fn sparse_rows(m: &BandedMatrix) -> SparseRows {
    let mut rows = vec![Vec::new(); m.dim()];
    for (r, c, v) in m.triplets() {
        rows[r].push((c, v));
    }
    rows
}

/// ||A B - I||_F for sparse row lists.
fn product_minus_identity(a: &SparseRows, b: &SparseRows) -> f64 {
    let dim = a.len();
    let mut acc = vec![0.0f64; dim];
    let mut touched = Vec::new();
    let mut sum = 0.0;
    for (r, row) in a.iter().enumerate() {
        for &(k, av) in row {
            for &(c, bv) in &b[k] {
                if acc[c] == 0.0 {
                    touched.push(c);
                }
                acc[c] += av * bv;
            }
        }
        let mut diag_seen = false;
        for &c in &touched {
            let e = if c == r {
                diag_seen = true;
                acc[c] - 1.0
            } else {
                acc[c]
            };
            sum += e * e;
            acc[c] = 0.0;
        }
        if !diag_seen {
            sum += 1.0;
        }
        touched.clear();
    }
    sum.sqrt()
}

fn frobenius(m: &BandedMatrix) -> f64 {
    m.triplets().map(|(_, _, v)| v * v).sum::<f64>().sqrt()
}

/// ||U†U - 1||_F
pub fn unitarity_residual(op: &WalkOperator) -> f64 {
    let m = op.matrix();
    let mut t = BandedMatrix::zeros(m.dim(), m.half_band());
    for (r, c, v) in m.triplets() {
        t.set(c, r, v);
    }
    product_minus_identity(&sparse_rows(&t), &sparse_rows(m))
}

pub fn verify_symmetries(op: &WalkOperator) -> SymmetryReport {
    let spec = op.spec();
    if !spec.kind.is_symmetric_frame() {
        log::warn!("symmetry operators are defined for the symmetric time frame; {} given", spec.kind.name());
    }
    let m = op.matrix();
    let lattice = &spec.lattice;
    let norm = frobenius(m);

    // U is real, so U* = U and U† = Uᵀ.
    let phs = Relation::new(0.0, norm);

    // T Uᵀ T⁻¹ - U with T = 1 ⊗ σ1: entry (a, b) is U[f(b), f(a)] - U[a, b]
    // where f flips the internal index.
    let mut trs_sq = 0.0;
    for (r, c, v) in m.triplets() {
        let t = m.get(c ^ 1, r ^ 1);
        trs_sq += (t - v) * (t - v);
        // The mirrored position is empty in U but filled in T Uᵀ T⁻¹.
        if t == 0.0 {
            trs_sq += v * v;
        }
    }
    let trs = Relation::new(trs_sq.sqrt(), norm);
    let chiral = trs;

    let pt = spec.coins.is_parity_symmetric(lattice).then(|| {
        let n = lattice.num_sites();
        let mirror: Vec<usize> = (0..n).map(|i| lattice.mirror_site(i)).collect();
        let map = |idx: usize| 2 * mirror[idx / 2] + (idx & 1);
        let sign = |idx: usize| if idx & 1 == 0 { 1.0 } else { -1.0 };
        let mut a = BandedMatrix::zeros(m.dim(), m.half_band());
        for (r, c, v) in m.triplets() {
            a.set(map(r), map(c), sign(r) * sign(c) * v);
        }
        Relation::new(product_minus_identity(&sparse_rows(&a), &sparse_rows(m)), norm)
    });

    SymmetryReport { norm, pt, trs, phs, chiral }
}
