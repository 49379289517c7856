use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::error::{Error, Result};

/// The two coin angles of a three-step (or two-step) walk, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinAngles {
    pub theta1: f64,
    pub theta2: f64,
}

impl CoinAngles {
    pub const fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    /// Angles given as multiples of pi.
    pub fn over_pi(t1: f64, t2: f64) -> Self {
        Self::new(t1 * std::f64::consts::PI, t2 * std::f64::consts::PI)
    }

    fn is_finite(&self) -> bool {
        self.theta1.is_finite() && self.theta2.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum Layout {
    Homogeneous(CoinAngles),
    /// `inner` for |x| < half_width, `outer` elsewhere.
    InnerOuter {
        half_width: usize,
        inner: CoinAngles,
        outer: CoinAngles,
    },
    /// `left` for x <= 0, `right` for x > 0.
    LeftRight {
        left: CoinAngles,
        right: CoinAngles,
    },
}

impl Layout {
    pub fn angles_at(&self, x: i64) -> CoinAngles {
        match *self {
            Layout::Homogeneous(a) => a,
            Layout::InnerOuter { half_width, inner, outer } => {
                if x.unsigned_abs() < half_width as u64 {
                    inner
                } else {
                    outer
                }
            }
            Layout::LeftRight { left, right } => {
                if x <= 0 {
                    left
                } else {
                    right
                }
            }
        }
    }

    /// Bond centers where the angles jump, on the given lattice.
    pub fn interfaces(&self, lattice: &Lattice) -> Vec<f64> {
        let mut out = Vec::new();
        let xs: Vec<i64> = lattice.positions().collect();
        for w in xs.windows(2) {
            if self.angles_at(w[0]) != self.angles_at(w[1]) {
                out.push(w[0] as f64 + 0.5);
            }
        }
        if lattice.is_periodic() && xs.len() > 1 {
            let (a, b) = (xs[xs.len() - 1], xs[0]);
            if self.angles_at(a) != self.angles_at(b) {
                out.push(a as f64 + 0.5);
            }
        }
        out
    }

    fn is_finite(&self) -> bool {
        match self {
            Layout::Homogeneous(a) => a.is_finite(),
            Layout::InnerOuter { inner, outer, .. } => inner.is_finite() && outer.is_finite(),
            Layout::LeftRight { left, right } => left.is_finite() && right.is_finite(),
        }
    }
}

/// Coin slot indices used for disorder draws, in order of application.
pub const SLOT_THETA1: u64 = 0;
pub const SLOT_THETA2_SHIFTED: u64 = 1;
pub const SLOT_THETA2: u64 = 2;

/// Position-dependent coin angles with an optional perturbation and
/// disorder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinProfile {
    pub layout: Layout,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub disorder_amplitude: f64,
    #[serde(default)]
    pub disorder_seed: u64,
}

impl CoinProfile {
    pub fn new(layout: Layout) -> Self {
        Self { layout, delta: 0.0, disorder_amplitude: 0.0, disorder_seed: 0 }
    }

    pub fn homogeneous(theta1: f64, theta2: f64) -> Self {
        Self::new(Layout::Homogeneous(CoinAngles::new(theta1, theta2)))
    }

    pub fn inner_outer(half_width: usize, inner: CoinAngles, outer: CoinAngles) -> Self {
        Self::new(Layout::InnerOuter { half_width, inner, outer })
    }

    pub fn left_right(left: CoinAngles, right: CoinAngles) -> Self {
        Self::new(Layout::LeftRight { left, right })
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_disorder(mut self, amplitude: f64, seed: u64) -> Self {
        self.disorder_amplitude = amplitude;
        self.disorder_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.layout.is_finite() || !self.delta.is_finite() {
            return Err(Error::NonFiniteAngle { x: 0 });
        }
        if !(self.disorder_amplitude.is_finite() && self.disorder_amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "disorder amplitude must be finite and nonnegative, got {}",
                self.disorder_amplitude
            )));
        }
        Ok(())
    }

    pub fn base_angles(&self, x: i64) -> CoinAngles {
        self.layout.angles_at(x)
    }

    /// Uniform draw on [-theta_r, theta_r) for position `x` and coin `slot`.
    ///
    /// The generator is addressed by (seed, slot, x) rather than consumed
    /// sequentially, so the value at one site does not depend on the
    /// lattice size or on the order sites are visited.
    pub fn disorder_offset(&self, x: i64, slot: u64) -> f64 {
        if self.disorder_amplitude == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.disorder_seed);
        rng.set_stream(slot);
        rng.set_word_pos(2 * (x as u64 as u128));
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.disorder_amplitude * (2.0 * u - 1.0)
    }

    /// Checks theta_j(-x) = theta_j(x) on every lattice site by exact
    /// comparison, including perturbation and disorder.
    pub fn is_parity_symmetric(&self, lattice: &Lattice) -> bool {
        let slots = [SLOT_THETA1, SLOT_THETA2_SHIFTED, SLOT_THETA2];
        (0..lattice.num_sites()).all(|i| {
            let x = lattice.position(i);
            let mx = lattice.position(lattice.mirror_site(i));
            self.base_angles(x) == self.base_angles(mx)
                && slots.iter().all(|&s| self.disorder_offset(x, s).to_bits() == self.disorder_offset(mx, s).to_bits())
        })
    }
}
