use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Amplitude shifted past either end is annihilated.
    Open,
}

/// A finite chain of `num_sites` positions, each carrying the two internal
/// states |L> = (1, 0) and |R> = (0, 1).
///
/// Positions run from `-(N-1)/2` to `(N-1)/2` for odd `N` and from `-N/2` to
/// `N/2 - 1` for even `N`. Basis index `2i` is |x_i> ⊗ |L>, `2i + 1` is
/// |x_i> ⊗ |R>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    num_sites: usize,
    boundary: Boundary,
}

impl Lattice {
    pub const INTERNAL_DIM: usize = 2;

    pub fn new(num_sites: usize, boundary: Boundary) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidParameter("lattice needs at least one site".into()));
        }
        Ok(Self { num_sites, boundary })
    }

    pub fn periodic(num_sites: usize) -> Result<Self> {
        Self::new(num_sites, Boundary::Periodic)
    }

    /// Periodic chain covering |x| <= `half_extent`.
    pub fn symmetric(half_extent: usize) -> Self {
        Self { num_sites: 2 * half_extent + 1, boundary: Boundary::Periodic }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn dim(&self) -> usize {
        Self::INTERNAL_DIM * self.num_sites
    }

    pub fn min_position(&self) -> i64 {
        -((self.num_sites / 2) as i64)
    }

    pub fn max_position(&self) -> i64 {
        self.min_position() + self.num_sites as i64 - 1
    }

    pub fn position(&self, site: usize) -> i64 {
        debug_assert!(site < self.num_sites);
        self.min_position() + site as i64
    }

    /// Site index of position `x`; wraps under periodic boundary.
    pub fn site_of(&self, x: i64) -> Option<usize> {
        let offset = x - self.min_position();
        match self.boundary {
            Boundary::Periodic => Some(offset.rem_euclid(self.num_sites as i64) as usize),
            Boundary::Open => (0..self.num_sites as i64).contains(&offset).then_some(offset as usize),
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.num_sites).map(move |i| self.position(i))
    }

    /// Site holding `-x` for the site holding `x`, modulo the ring length.
    pub fn mirror_site(&self, site: usize) -> usize {
        let x = self.position(site);
        (-x - self.min_position()).rem_euclid(self.num_sites as i64) as usize
    }

    /// Distance from position `x` to the point `c` (a bond center may sit
    /// at half-integer positions), measured around the ring when periodic.
    pub fn distance(&self, x: i64, c: f64) -> f64 {
        let d = (x as f64 - c).abs();
        match self.boundary {
            Boundary::Periodic => {
                let n = self.num_sites as f64;
                let d = d % n;
                d.min(n - d)
            }
            Boundary::Open => d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_lattice_is_centered() {
        let l = Lattice::symmetric(400);
        assert_eq!(l.num_sites(), 801);
        assert_eq!(l.min_position(), -400);
        assert_eq!(l.max_position(), 400);
        assert_eq!(l.dim(), 1602);
        assert_eq!(l.site_of(0), Some(400));
    }

    #[test]
    fn even_lattice_range() {
        let l = Lattice::periodic(10).unwrap();
        assert_eq!(l.min_position(), -5);
        assert_eq!(l.max_position(), 4);
        // -(-5) = 5 wraps to -5
        assert_eq!(l.mirror_site(0), 0);
        assert_eq!(l.position(l.mirror_site(l.site_of(3).unwrap())), -3);
    }

    #[test]
    fn positions_are_bijective() {
        for n in [1, 2, 7, 10] {
            let l = Lattice::periodic(n).unwrap();
            for (i, x) in l.positions().enumerate() {
                assert_eq!(l.site_of(x), Some(i));
            }
        }
    }

    #[test]
    fn open_boundary_has_no_wrap() {
        let l = Lattice::new(5, Boundary::Open).unwrap();
        assert_eq!(l.site_of(3), None);
        assert_eq!(l.site_of(-3), None);
        assert_eq!(l.distance(-2, 2.0), 4.0);
        let p = Lattice::periodic(5).unwrap();
        assert_eq!(p.site_of(3), Some(0));
        assert_eq!(p.distance(-2, 2.0), 1.0);
    }

    #[test]
    fn rejects_empty() {
        assert!(Lattice::periodic(0).is_err());
    }
}
