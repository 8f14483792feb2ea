//! Heights over all of `μ_d² ∖ {(1, 1)}` and their distribution.
//!
//! One height is computed per symmetry orbit and copied to the other
//! members. Cells are stored row-major with `c2` as the row index, so cell
//! `(c1, c2)` lives at `c2 * d + c1`. Cell `(0, 0)` holds NaN and is skipped
//! by index everywhere.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constants::special_values;
use crate::scalar::{CompensatedSum, Scalar};
use crate::symmetry::canonical_representative;
use crate::torsion::{total_height, HeightError, TorsionPoint, EXTREMAL_TOLERANCE};

/// Number of histogram bins over `[0, log 2]`.
pub const HISTOGRAM_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Height(#[from] HeightError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid<T> {
    d: u64,
    values: Vec<T>,
    representatives: Vec<(u64, u64)>,
}

impl<T: Scalar> HeightGrid<T> {
    pub fn modulus(&self) -> u64 {
        self.d
    }

    fn index(&self, c1: u64, c2: u64) -> usize {
        (c2 * self.d + c1) as usize
    }

    /// Height at `(c1, c2)`; `None` for the trivial cell or out-of-range residues.
    pub fn get(&self, c1: u64, c2: u64) -> Option<T> {
        if c1 >= self.d || c2 >= self.d || (c1, c2) == (0, 0) {
            return None;
        }
        Some(self.values[self.index(c1, c2)])
    }

    /// Canonical orbit representative the cell's value was copied from.
    pub fn representative(&self, c1: u64, c2: u64) -> Option<(u64, u64)> {
        if c1 >= self.d || c2 >= self.d || (c1, c2) == (0, 0) {
            return None;
        }
        Some(self.representatives[self.index(c1, c2)])
    }

    /// Raw row-major storage, sentinel included.
    pub fn raw_values(&self) -> &[T] {
        &self.values
    }

    /// Nontrivial cells as `((c1, c2), h)`, rows `c2 = 0, 1, ...` in turn.
    pub fn cells(&self) -> impl Iterator<Item = ((u64, u64), T)> + '_ {
        let d = self.d;
        (0..d)
            .flat_map(move |c2| (0..d).map(move |c1| (c1, c2)))
            .skip(1)
            .map(move |(c1, c2)| ((c1, c2), self.values[(c2 * d + c1) as usize]))
    }

    /// Rebuilds a grid from per-cell values (e.g. read back from disk).
    /// Representatives are recomputed; values are taken as given.
    pub fn from_cells(d: u64, cells: impl IntoIterator<Item = ((u64, u64), T)>) -> Result<Self, GridError> {
        if d < 2 {
            return Err(GridError::ModulusTooSmall(d));
        }
        let n = (d * d) as usize;
        let mut values = vec![T::nan(); n];
        for ((c1, c2), h) in cells {
            if c1 < d && c2 < d && (c1, c2) != (0, 0) {
                values[(c2 * d + c1) as usize] = h;
            }
        }
        Ok(Self {
            d,
            values,
            representatives: representatives(d),
        })
    }
}

fn representatives(d: u64) -> Vec<(u64, u64)> {
    let mut reps = Vec::with_capacity((d * d) as usize);
    for c2 in 0..d {
        for c1 in 0..d {
            reps.push(canonical_representative((c1, c2), d).unwrap_or((0, 0)));
        }
    }
    reps
}

/// Builds the grid with `threads` workers (0 picks the rayon default).
/// The result does not depend on the thread count.
pub fn compute_grid<T: Scalar>(d: u64, threads: usize) -> Result<HeightGrid<T>, GridError> {
    if d < 2 {
        return Err(GridError::ModulusTooSmall(d));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| GridError::ThreadPool(e.to_string()))?;

    let representatives = representatives(d);
    let distinct: Vec<(u64, u64)> = representatives
        .iter()
        .skip(1)
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let heights: Vec<T> = pool.install(|| {
        distinct
            .par_iter()
            .map(|&(c1, c2)| {
                let pt = TorsionPoint::nontrivial(d, c1 as i64, c2 as i64)?;
                Ok(total_height::<T>(&pt)?.total)
            })
            .collect::<Result<Vec<T>, GridError>>()
    })?;

    let mut values = vec![T::nan(); (d * d) as usize];
    for (i, rep) in representatives.iter().enumerate().skip(1) {
        let k = distinct.binary_search(rep).expect("every representative was evaluated");
        values[i] = heights[k];
    }
    Ok(HeightGrid {
        d,
        values,
        representatives,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistStats<T> {
    pub d: u64,
    pub eps: T,
    pub cells: u64,
    pub mean: T,
    pub min: T,
    pub max: T,
    /// `#{|h - η| < eps}`.
    pub count_near_eta: u64,
    /// `#{|h - θ| < eps}`.
    pub count_near_theta: u64,
    /// `#{|h| <= 1e-10}`.
    pub count_zero: u64,
    /// Bin `k` covers `[k, k + 1) · log 2 / 256`; the top bin is closed.
    pub histogram: Vec<u64>,
}

impl<T: Scalar> DistStats<T> {
    pub fn ratio_near_eta(&self) -> T {
        T::of_u64(self.count_near_eta) / T::of_u64(self.cells)
    }

    pub fn ratio_near_theta(&self) -> T {
        T::of_u64(self.count_near_theta) / T::of_u64(self.cells)
    }
}

/// Histogram bin of a height.
pub fn histogram_bin<T: Scalar>(h: T) -> usize {
    let width = T::LN_2() / T::of_u64(HISTOGRAM_BINS as u64);
    let k = (h / width).floor();
    if k <= T::zero() {
        0
    } else {
        k.to_usize().unwrap_or(HISTOGRAM_BINS - 1).min(HISTOGRAM_BINS - 1)
    }
}

pub fn stats<T: Scalar>(grid: &HeightGrid<T>, eps: T) -> DistStats<T> {
    let eta = T::of(special_values().eta);
    let theta = T::of(special_values().theta);
    let zero_tol = T::of(EXTREMAL_TOLERANCE);
    let mut sum = CompensatedSum::new();
    let mut min = T::infinity();
    let mut max = T::neg_infinity();
    let (mut near_eta, mut near_theta, mut zero) = (0, 0, 0);
    let mut histogram = vec![0u64; HISTOGRAM_BINS];
    let mut cells = 0u64;
    for (_, h) in grid.cells() {
        cells += 1;
        sum.add(h);
        min = min.min(h);
        max = max.max(h);
        near_eta += u64::from((h - eta).abs() < eps);
        near_theta += u64::from((h - theta).abs() < eps);
        zero += u64::from(h.abs() <= zero_tol);
        histogram[histogram_bin(h)] += 1;
    }
    DistStats {
        d: grid.d,
        eps,
        cells,
        mean: sum.value() / T::of_u64(cells),
        min,
        max,
        count_near_eta: near_eta,
        count_near_theta: near_theta,
        count_zero: zero,
        histogram,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub d: u64,
    pub mean: f64,
    pub below_eta: bool,
}

/// Mean grid height for each `d`, flagged against `η`.
pub fn mean_below_eta_scan(d_range: RangeInclusive<u64>, threads: usize) -> Result<Vec<ScanRow>, GridError> {
    let eta = special_values().eta;
    d_range
        .map(|d| {
            let grid = compute_grid::<f64>(d, threads)?;
            let mean = stats(&grid, 0.0).mean;
            Ok(ScanRow {
                d,
                mean,
                below_eta: mean < eta,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusEntry {
    pub c1: u64,
    pub c2: u64,
    pub order: u64,
    pub height: f64,
}

/// Nontrivial `d`-torsion points with `0 < h ≤ θ - eps`, in row-major order.
/// Heights within `1e-10` of zero count as zero.
pub fn small_height_census(grid: &HeightGrid<f64>, eps: f64) -> Vec<CensusEntry> {
    let upper = special_values().theta - eps;
    let d = grid.d;
    grid.cells()
        .filter(|&(_, h)| h > EXTREMAL_TOLERANCE && h <= upper)
        .map(|((c1, c2), height)| CensusEntry {
            c1,
            c2,
            order: d / num_integer::gcd(num_integer::gcd(c1, c2), d),
            height,
        })
        .collect()
}
