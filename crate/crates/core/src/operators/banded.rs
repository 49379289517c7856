use num_complex::Complex64;

/// Real square matrix with entries confined to a circular band.
///
/// Row `r` stores columns `(r + o) mod dim` for `o` in `-half_band..=half_band`,
/// so wrap-around couplings of a periodic chain live in the same storage.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    half_band: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(dim: usize, half_band: usize) -> Self {
        assert!(2 * half_band < dim, "band of half-width {half_band} aliases in dimension {dim}");
        Self { dim, half_band, data: vec![0.0; dim * (2 * half_band + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_band(&self) -> usize {
        self.half_band
    }

    fn width(&self) -> usize {
        2 * self.half_band + 1
    }

    /// Offset of `col` from `row` taken into (-dim/2, dim/2].
    fn offset(&self, row: usize, col: usize) -> Option<usize> {
        let n = self.dim as i64;
        let mut o = (col as i64 - row as i64).rem_euclid(n);
        if o > n / 2 {
            o -= n;
        }
        (o.unsigned_abs() as usize <= self.half_band).then(|| (o + self.half_band as i64) as usize)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.offset(row, col).map_or(0.0, |o| self.data[row * self.width() + o])
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let o = self.offset(row, col).unwrap_or_else(|| panic!("entry ({row}, {col}) outside band {}", self.half_band));
        let w = self.width();
        self.data[row * w + o] = value;
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.width();
        let n = self.dim as i64;
        (0..self.dim).flat_map(move |r| {
            let mut row: Vec<(usize, usize, f64)> = (0..w)
                .filter_map(|o| {
                    let v = self.data[r * w + o];
                    (v != 0.0).then(|| {
                        let c = (r as i64 + o as i64 - self.half_band as i64).rem_euclid(n) as usize;
                        (r, c, v)
                    })
                })
                .collect();
            row.sort_by_key(|t| t.1);
            row
        })
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// `y[r] = sum_c A[r, c] x[c]` for rows in `rows`, reading `x` with
    /// wrap-around.
    pub fn apply_rows(&self, x: &[Complex64], y: &mut [Complex64], rows: std::ops::Range<usize>) {
        debug_assert_eq!(x.len(), self.dim);
        let w = self.width();
        let hb = self.half_band;
        for r in rows {
            let coeffs = &self.data[r * w..(r + 1) * w];
            let mut acc = Complex64::new(0.0, 0.0);
            if r >= hb && r + hb < self.dim {
                for (a, xv) in coeffs.iter().zip(&x[r - hb..=r + hb]) {
                    acc += xv * a;
                }
            } else {
                for (o, a) in coeffs.iter().enumerate() {
                    let c = (r + self.dim + o - hb) % self.dim;
                    acc += x[c] * a;
                }
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_rows(x, &mut y, 0..self.dim);
        y
    }
}
