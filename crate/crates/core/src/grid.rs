use crate::error::{Error, Result};

/// Square, cell-centred sampling grid on `[x_min, x_max]²`.
///
/// Node `(i, j)` sits at `(x_min + (j + ½)h, x_min + (i + ½)h)`; `i` is the row (x₂), `j` the column (x₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl GridSpec {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        let g = GridSpec { nx: n, ny: n, x_min, x_max };
        g.validate()?;
        Ok(g)
    }

    /// `n × n` grid on `[-half_width, half_width]²`.
    pub fn centered(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, -half_width, half_width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Grid("empty grid".into()));
        }
        if self.nx != self.ny {
            return Err(Error::Grid(format!("pixels must be square, got nx={} ny={}", self.nx, self.ny)));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(Error::Grid(format!("bad extent [{}, {}]", self.x_min, self.x_max)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn coord(&self, idx: usize) -> f64 {
        self.x_min + (idx as f64 + 0.5) * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.coord(i)).collect()
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_max - self.x_min)
    }

    /// Distance from the origin to the farthest corner of the extent.
    pub fn circumradius(&self) -> f64 {
        let a = self.x_min.abs().max(self.x_max.abs());
        a * std::f64::consts::SQRT_2
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        (self.x_min..=self.x_max).contains(&x[0]) && (self.x_min..=self.x_max).contains(&x[1])
    }

    /// Same extent, `factor`× the samples.
    pub fn refined(&self, factor: usize) -> Self {
        GridSpec { nx: self.nx * factor, ny: self.ny * factor, ..*self }
    }

    /// Index slice covering the central half of each axis (a quarter of the area).
    pub fn central_quarter(&self) -> std::ops::Range<usize> {
        self.nx / 4..self.nx - self.nx / 4
    }
}
