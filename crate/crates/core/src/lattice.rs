//! Finite windows of the integer lattice.
//!
//! Sites are addressed either by coordinates (`&[i64]`) or by a linear index
//! into a [`LatticeBox`]. Linear indices follow row-major order: the last axis
//! varies fastest.

use crate::error::{Error, Result};
use serde::Serialize;

/// Upper bound on the number of sites in one box.
pub const MAX_BOX_SITES: u128 = 1 << 31;

/// An axis-aligned box `lo ..= hi` in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    len: usize,
}

impl LatticeBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::Argument("box dimension must be positive".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::Argument(format!(
                "box corners have different dimensions ({} vs {})",
                lo.len(),
                hi.len()
            )));
        }
        let mut total: u128 = 1;
        for (a, b) in lo.iter().zip(&hi) {
            if a > b {
                return Err(Error::Argument(format!("box lower corner {lo:?} exceeds upper corner {hi:?}")));
            }
            total = total.saturating_mul((b - a + 1) as u128);
        }
        if total > MAX_BOX_SITES {
            return Err(Error::Capacity(format!("box with {total} sites exceeds the limit of {MAX_BOX_SITES}")));
        }
        let d = lo.len();
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (hi[i + 1] - lo[i + 1] + 1) as usize;
        }
        Ok(Self {
            lo,
            hi,
            strides,
            len: total as usize,
        })
    }

    /// The cube `[-half, half]^d`.
    pub fn centered(d: usize, half: i64) -> Result<Self> {
        Self::new(vec![-half; d], vec![half; d])
    }

    /// A cube with `side` sites per axis whose center sits at the origin
    /// (for even sides the extra layer goes on the positive side).
    pub fn cube_of_side(d: usize, side: i64) -> Result<Self> {
        if side < 1 {
            return Err(Error::Argument(format!("box side must be positive, got {side}")));
        }
        let lo = -(side - 1) / 2;
        Self::new(vec![lo; d], vec![lo + side - 1; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| a <= v && v <= b)
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn index(&self, x: &[i64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        Some(
            x.iter()
                .zip(&self.lo)
                .zip(&self.strides)
                .map(|((v, a), s)| (v - a) as usize * s)
                .sum(),
        )
    }

    pub fn coords(&self, idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim()];
        self.coords_into(idx, &mut out);
        out
    }

    pub fn coords_into(&self, mut idx: usize, out: &mut [i64]) {
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = self.lo[i] + (idx / s) as i64;
            idx %= s;
        }
    }

    /// Coordinate of `idx` along one axis.
    pub fn coord(&self, idx: usize, axis: usize) -> i64 {
        self.lo[axis] + ((idx / self.strides[axis]) % self.extent(axis)) as i64
    }

    /// Linear index of the neighbour `idx ± e_axis`, if it lies in the box.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, positive: bool) -> Option<usize> {
        let c = self.coord(idx, axis);
        if positive {
            (c < self.hi[axis]).then(|| idx + self.strides[axis])
        } else {
            (c > self.lo[axis]).then(|| idx - self.strides[axis])
        }
    }

    /// Neighbour with periodic wrap-around on every axis.
    #[inline]
    pub fn neighbor_wrapped(&self, idx: usize, axis: usize, positive: bool) -> usize {
        match self.neighbor(idx, axis, positive) {
            Some(j) => j,
            None => {
                let span = (self.extent(axis) - 1) * self.strides[axis];
                if positive {
                    idx - span
                } else {
                    idx + span
                }
            }
        }
    }

    /// True when `idx` lies on the outer face of the box.
    pub fn on_face(&self, idx: usize) -> bool {
        (0..self.dim()).any(|a| {
            let c = self.coord(idx, a);
            c == self.lo[a] || c == self.hi[a]
        })
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len).map(move |i| self.coords(i))
    }
}

pub fn norm1(x: &[i64]) -> i64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(x: &[i64]) -> i64 {
    x.iter().map(|v| v.abs()).max().unwrap_or(0)
}

pub fn norm2_sq(x: &[i64]) -> i64 {
    x.iter().map(|v| v * v).sum()
}

pub fn diff(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Sites of the closed Euclidean ball `{z : ‖z - c‖₂ ≤ r}` in row-major order.
pub fn ball_sites(center: &[i64], radius: f64) -> Vec<Vec<i64>> {
    let half = radius.max(0.0).floor() as i64;
    let r2 = radius * radius;
    let lo = center.iter().map(|c| c - half).collect();
    let hi = center.iter().map(|c| c + half).collect();
    let b = LatticeBox::new(lo, hi).expect("nonempty box");
    b.iter_coords()
        .filter(|x| norm2_sq(&diff(x, center)) as f64 <= r2)
        .collect()
}
