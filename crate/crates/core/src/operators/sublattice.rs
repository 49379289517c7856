use serde::{Deserialize, Serialize};

use super::build::WalkOperator;
use crate::error::{Error, Result};

/// Relative threshold for a block to count as zero.
pub const BLOCK_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockForm {
    /// even->even and odd->odd only: two decoupled subsystems.
    BlockDiagonal,
    /// even<->odd only: τ3 U τ3 = -U.
    BlockOffDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SublatticeSplit {
    pub form: BlockForm,
    /// Frobenius norms of the diagonal (even-even, odd-odd) and
    /// off-diagonal blocks.
    pub diagonal_norm: f64,
    pub off_diagonal_norm: f64,
    /// ||τ3 U τ3 + U||_F
    pub anticommutator_residual: f64,
    /// Original basis index of each reordered index: even sites first.
    pub permutation: Vec<usize>,
    /// Operator in the reordered basis.
    pub reordered: faer::Mat<f64>,
}

impl SublatticeSplit {
    pub fn half(&self) -> usize {
        self.permutation.len() / 2
    }

    /// Block (row parity, column parity), 0 = even, 1 = odd.
    pub fn block(&self, row: usize, col: usize) -> faer::MatRef<'_, f64> {
        let h = self.half();
        self.reordered.as_ref().submatrix(row * h, col * h, h, h)
    }
}

/// Parity of the site index, which is the position parity shifted by a
/// constant.
fn sublattice_of(basis: usize) -> usize {
    (basis / 2) % 2
}

pub fn sublattice_reorder(op: &WalkOperator) -> Result<SublatticeSplit> {
    let lattice = op.spec().lattice;
    let n = lattice.num_sites();
    if lattice.is_periodic() && n % 2 == 1 {
        return Err(Error::OddPeriodicLattice(n));
    }
    let dim = op.dim();
    let mut permutation: Vec<usize> = (0..dim).filter(|&b| sublattice_of(b) == 0).collect();
    permutation.extend((0..dim).filter(|&b| sublattice_of(b) == 1));
    let mut inverse = vec![0; dim];
    for (new, &old) in permutation.iter().enumerate() {
        inverse[old] = new;
    }

    let mut reordered = faer::Mat::<f64>::zeros(dim, dim);
    let (mut diag, mut off, mut total) = (0.0, 0.0, 0.0);
    for (r, c, v) in op.matrix().triplets() {
        reordered[(inverse[r], inverse[c])] = v;
        total += v * v;
        if sublattice_of(r) == sublattice_of(c) {
            diag += v * v;
        } else {
            off += v * v;
        }
    }
    let (diagonal_norm, off_diagonal_norm) = (diag.sqrt(), off.sqrt());
    let tol = BLOCK_RTOL * total.sqrt();
    let form = if off_diagonal_norm <= tol {
        BlockForm::BlockDiagonal
    } else if diagonal_norm <= tol {
        BlockForm::BlockOffDiagonal
    } else {
        return Err(Error::NoSublatticeStructure { diagonal: diagonal_norm, off_diagonal: off_diagonal_norm });
    };
    Ok(SublatticeSplit {
        form,
        diagonal_norm,
        off_diagonal_norm,
        // τ3 flips the sign of the off-diagonal blocks, so the sum keeps
        // twice the diagonal ones.
        anticommutator_residual: 2.0 * diagonal_norm,
        permutation,
        reordered,
    })
}
