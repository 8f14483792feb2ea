//! One-dimensional adaptive quadrature for integrands that may carry
//! logarithmic singularities at panel endpoints.
//!
//! Each panel is integrated with the Gauss–Kronrod 7/15 pair. Both rules are
//! open, so a singular endpoint is never evaluated. The panel with the
//! largest `|K15 - G7|` is bisected until the summed discrepancy drops below
//! the requested absolute tolerance. Panels are visited in a fixed order and
//! summed with compensation, so results are bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::{Debug, Display};

use thiserror::Error;

use crate::scalar::{CompensatedSum, Scalar};

/// Default cap on integrand evaluations per integral.
pub const DEFAULT_BUDGET: usize = 1_000_000;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Sum of the per-panel `|K15 - G7|` discrepancies.
    pub err_estimate: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError<T: Debug + Display> {
    #[error("evaluation budget of {budget} exhausted (best value {}, error estimate {})", .best.value, .best.err_estimate)]
    BudgetExceeded { best: QuadResult<T>, budget: usize },
    #[error("panels reached floating-point resolution before the tolerance was met (best value {}, error estimate {})", .best.value, .best.err_estimate)]
    Stalled { best: QuadResult<T> },
    #[error("invalid integration interval or break points")]
    InvalidInterval,
    #[error("integrand is not finite at {at}")]
    NonFinite { at: T },
}

impl<T: Debug + Display + Copy> QuadError<T> {
    /// Best available estimate, if the failure still produced one.
    pub fn best(&self) -> Option<QuadResult<T>> {
        match self {
            QuadError::BudgetExceeded { best, .. } | QuadError::Stalled { best } => Some(*best),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    /// Absolute tolerance on the summed error estimate.
    pub tol: T,
    pub budget: usize,
}

impl<T: Scalar> QuadResult<T> {
    pub fn to_f64(&self) -> QuadResult<f64> {
        QuadResult {
            value: self.value.to_f64_lossy(),
            err_estimate: self.err_estimate.to_f64_lossy(),
            evaluations: self.evaluations,
        }
    }
}

impl<T: Scalar> QuadError<T> {
    /// The same error with every scalar widened to `f64`.
    pub fn to_f64(&self) -> QuadError<f64> {
        match self {
            QuadError::BudgetExceeded { best, budget } => QuadError::BudgetExceeded {
                best: best.to_f64(),
                budget: *budget,
            },
            QuadError::Stalled { best } => QuadError::Stalled { best: best.to_f64() },
            QuadError::InvalidInterval => QuadError::InvalidInterval,
            QuadError::NonFinite { at } => QuadError::NonFinite { at: at.to_f64_lossy() },
        }
    }
}

impl<T: Scalar> QuadConfig<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
    /// Insertion sequence, used to break ties deterministically.
    seq: u64,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Panel<T> {}

impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; older panels first on ties
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gauss_kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<(T, T), QuadError<T>> {
    let half = T::of(0.5);
    let centre = half * (a + b);
    let half_len = half * (b - a);
    let eval = |x: T| -> Result<T, QuadError<T>> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };
    let fc = eval(centre)?;
    let mut kronrod = fc * T::of(KRONROD_WEIGHTS[7]);
    let mut gauss = fc * T::of(GAUSS_WEIGHTS[3]);
    for (j, (&node, &wk)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let dx = half_len * T::of(node);
        let pair = eval(centre - dx)? + eval(centre + dx)?;
        kronrod += T::of(wk) * pair;
        if j % 2 == 1 {
            gauss += T::of(GAUSS_WEIGHTS[j / 2]) * pair;
        }
    }
    Ok((kronrod * half_len, ((kronrod - gauss) * half_len).abs()))
}

/// Integrates over consecutive panels `[points[i], points[i+1]]`.
///
/// `points` must be strictly increasing; interior entries are break points
/// (kinks or singularities) that no panel straddles.
pub fn integrate_with_breaks<T, F>(f: F, points: &[T], cfg: QuadConfig<T>) -> Result<QuadResult<T>, QuadError<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if points.len() < 2
        || points.iter().any(|x| !x.is_finite())
        || points.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(QuadError::InvalidInterval);
    }

    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut evaluations = 0usize;
    let mut seq = 0u64;
    let mut total_err = CompensatedSum::new();

    for w in points.windows(2) {
        let (value, err) = gauss_kronrod(&f, w[0], w[1])?;
        evaluations += EVALS_PER_PANEL;
        total_err.add(err);
        heap.push(Panel { a: w[0], b: w[1], value, err, seq });
        seq += 1;
    }

    let finish = |heap: BinaryHeap<Panel<T>>, done: Vec<Panel<T>>, evaluations: usize| {
        let mut panels: Vec<Panel<T>> = heap.into_vec();
        panels.extend(done);
        panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
        let value: CompensatedSum<T> = panels.iter().map(|p| p.value).collect();
        let err: CompensatedSum<T> = panels.iter().map(|p| p.err).collect();
        QuadResult {
            value: value.value(),
            err_estimate: err.value(),
            evaluations,
        }
    };

    loop {
        if total_err.value() <= cfg.tol {
            // confirm against a fresh sum before trusting the running one
            let exact: CompensatedSum<T> = heap.iter().chain(done.iter()).map(|p| p.err).collect();
            total_err = exact;
            if exact.value() <= cfg.tol {
                return Ok(finish(heap, done, evaluations));
            }
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadError::Stalled {
                best: finish(heap, done, evaluations),
            });
        };
        let mid = T::of(0.5) * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            done.push(worst);
            continue;
        }
        if evaluations + 2 * EVALS_PER_PANEL > cfg.budget {
            heap.push(worst);
            return Err(QuadError::BudgetExceeded {
                best: finish(heap, done, evaluations),
                budget: cfg.budget,
            });
        }
        total_err.add(-worst.err);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gauss_kronrod(&f, a, b)?;
            evaluations += EVALS_PER_PANEL;
            total_err.add(err);
            heap.push(Panel { a, b, value, err, seq });
            seq += 1;
        }
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T, F>(f: F, a: T, b: T, tol: T) -> Result<QuadResult<T>, QuadError<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_with_breaks(f, &[a, b], QuadConfig::new(tol))
}

/// Integrates `f` over `(-∞, 0]` through the substitution `u = log t`,
/// `t ∈ (0, 1]`. `f` must decay at least exponentially as `u → -∞`.
pub fn integrate_semiinfinite<T, F>(f: F, cfg: QuadConfig<T>) -> Result<QuadResult<T>, QuadError<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mapped = |t: T| f(t.ln()) / t;
    integrate_with_breaks(mapped, &[T::zero(), T::one()], cfg)
}
