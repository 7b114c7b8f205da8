//! Planned 2D complex FFTs over row-major `ndarray` planes.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    /// Unnormalized forward transform, `Σ a e^{−2πi(..)}`.
    pub fn forward(&self, a: &mut Array2<Complex64>) {
        self.run(a, false);
    }

    /// Unnormalized inverse; divide by `rows·cols` to undo [`Fft2::forward`].
    pub fn inverse(&self, a: &mut Array2<Complex64>) {
        self.run(a, true);
    }

    fn run(&self, a: &mut Array2<Complex64>, inverse: bool) {
        assert_eq!(a.dim(), (self.rows, self.cols));
        let (row, col) = if inverse { (&self.row_inv, &self.col_inv) } else { (&self.row_fwd, &self.col_fwd) };
        row.process(a.as_slice_mut().expect("standard layout"));
        let mut t = a.t().as_standard_layout().into_owned();
        col.process(t.as_slice_mut().expect("standard layout"));
        a.assign(&t.t());
    }
}

/// Smallest `2^a 3^b 5^c` that is at least `n`.
pub(crate) fn next_fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r.is_multiple_of(f) {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
