//! The amoeba of `1 + z1 + z2` under `u = (-log|z1|, -log|z2|)`, its moments,
//! the Ronkin function and the Monge–Ampère check.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quad::{integrate_semiinfinite, integrate_with_breaks, QuadConfig, QuadError, QuadResult};
use crate::scalar::Scalar;

/// Half-width of the box searched by [`legendre_dual`].
pub const DUAL_SEARCH_RADIUS: f64 = 25.0;

/// Relative slack in the triangle inequalities, so that boundary points
/// computed in floating point still count as members.
const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmoebaError {
    #[error("({u1}, {u2}) is within 3h of the amoeba boundary or outside it")]
    IllConditioned { u1: f64, u2: f64 },
    #[error("({x1}, {x2}) is not in the standard simplex")]
    NotInSimplex { x1: f64, x2: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError<f64>),
}

fn widen<T: Scalar>(e: QuadError<T>) -> AmoebaError {
    AmoebaError::Quad(e.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmoebaPoint<T> {
    pub u1: T,
    pub u2: T,
}

impl<T: Scalar> AmoebaPoint<T> {
    pub fn new(u1: T, u2: T) -> Self {
        Self { u1, u2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionTag {
    /// `Ψ = 0`: `0 ≤ min(u1, u2)`.
    East,
    /// `Ψ = u1`.
    West,
    /// `Ψ = u2`.
    South,
    Outside,
    /// On the amoeba boundary, up to the membership slack.
    Boundary,
}

/// The moduli `(1, e^{-u1}, e^{-u2})` scaled so the largest is 1.
fn scaled_moduli<T: Scalar>(u: AmoebaPoint<T>) -> [T; 3] {
    let logs = [T::zero(), -u.u1, -u.u2];
    let top = logs[0].max(logs[1]).max(logs[2]);
    logs.map(|l| (l - top).exp())
}

/// Signed triangle margins `r_j + r_k - r_i`; all nonnegative iff `u ∈ 𝒜`.
fn margins<T: Scalar>(u: AmoebaPoint<T>) -> [T; 3] {
    let [a, b, c] = scaled_moduli(u);
    [b + c - a, a + c - b, a + b - c]
}

/// `u ∈ 𝒜` iff `1`, `e^{-u1}`, `e^{-u2}` satisfy the triangle inequalities.
pub fn contains<T: Scalar>(u: AmoebaPoint<T>) -> bool {
    let slack = T::of(MEMBERSHIP_SLACK);
    margins(u).iter().all(|&m| m >= -slack)
}

pub fn region<T: Scalar>(u: AmoebaPoint<T>) -> RegionTag {
    let slack = T::of(MEMBERSHIP_SLACK);
    let m = margins(u);
    if m.iter().any(|&x| x < -slack) {
        return RegionTag::Outside;
    }
    if m.iter().any(|&x| x <= slack) {
        return RegionTag::Boundary;
    }
    if u.u2 <= u.u1.min(T::zero()) {
        RegionTag::South
    } else if u.u1 <= u.u2.min(T::zero()) {
        RegionTag::West
    } else {
        RegionTag::East
    }
}

/// `Ψ(u) = min(0, u1, u2)`.
pub fn psi<T: Scalar>(u: AmoebaPoint<T>) -> T {
    T::zero().min(u.u1).min(u.u2)
}

/// `log(1 - e^x)` for `x < 0`.
fn log1m_exp<T: Scalar>(x: T) -> T {
    if x < -T::LN_2() {
        (-x.exp()).ln_1p()
    } else {
        (-x.exp_m1()).ln()
    }
}

/// `∫_{𝒜_south} u2^m du = ∫_{-∞}^0 -u^m log(1 - e^u) du = (-1)^m m! ζ(m + 2)`.
pub fn south_moment<T: Scalar>(m: u32, cfg: QuadConfig<T>) -> Result<QuadResult<T>, AmoebaError> {
    let m = m as i32;
    integrate_semiinfinite(|u: T| -u.powi(m) * log1m_exp(u), cfg).map_err(widen)
}

/// Area of the amoeba: three congruent tentacle regions of area `ζ(2)`.
pub fn volume<T: Scalar>(cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    Ok(T::of(3.0) * south_moment(0, cfg)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionIntegrals<T> {
    pub east: T,
    pub west: T,
    pub south: T,
}

impl<T: Scalar> RegionIntegrals<T> {
    pub fn total(&self) -> T {
        self.east + self.west + self.south
    }
}

/// `∫ Ψ` over each region. `Ψ = 0` on the east part, and the west part is
/// the mirror image of the south part under `u1 ↔ u2`.
pub fn psi_integral_by_region<T: Scalar>(cfg: QuadConfig<T>) -> Result<RegionIntegrals<T>, AmoebaError> {
    let south = south_moment(1, cfg)?.value;
    Ok(RegionIntegrals {
        east: T::zero(),
        west: south,
        south,
    })
}

pub fn psi_integral<T: Scalar>(cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    Ok(psi_integral_by_region(cfg)?.total())
}

/// `-(1/vol 𝒜) ∫_𝒜 Ψ`, which equals `η`.
pub fn psi_average<T: Scalar>(cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    Ok(-psi_integral(cfg)? / volume(cfg)?)
}

/// Ronkin function `ρ(u) = -∫ log|1 + z1 e^{-u1} + z2 e^{-u2}|` over the torus.
///
/// Jensen in `z2` leaves `ρ(u) = -(1/π) ∫_0^π max(½ log q(φ), -u2) dφ`
/// with `q(φ) = |1 + b e^{iφ}|² = (1 - b)² + 4b cos²(φ/2)`, `b = e^{-u1}`.
/// The two branches cross where `cos φ = (c² - 1 - b²) / 2b`, `c = e^{-u2}`.
pub fn ronkin<T: Scalar>(u: AmoebaPoint<T>, cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    let pi = T::PI();
    let half = T::of(0.5);
    let b = (-u.u1).exp();
    let floor = -u.u2;
    let one_minus_b = if u.u1.abs() < half { -(-u.u1).exp_m1() } else { T::one() - b };
    let f = |phi: T| {
        let cos_half = (half * phi).cos();
        let q = one_minus_b * one_minus_b + T::of(4.0) * b * cos_half * cos_half;
        (half * q.ln()).max(floor)
    };

    let mut points = vec![T::zero()];
    let c = (-u.u2).exp();
    let ratio = (c * c - T::one() - b * b) / (T::of(2.0) * b);
    if ratio.is_finite() && ratio > -T::one() && ratio < T::one() {
        let phi0 = ratio.acos();
        if phi0 > T::zero() && phi0 < pi {
            points.push(phi0);
        }
    }
    points.push(pi);

    let inner_cfg = QuadConfig {
        tol: cfg.tol * pi,
        budget: cfg.budget,
    };
    let r = integrate_with_breaks(f, &points, inner_cfg).map_err(widen)?;
    Ok(-r.value / pi)
}

fn in_simplex<T: Scalar>(x: (T, T)) -> bool {
    let tol = T::of(1e-12);
    x.0 >= -tol && x.1 >= -tol && x.0 + x.1 <= T::one() + tol
}

/// Legendre–Fenchel dual `ρ∨(x) = inf_u (⟨x, u⟩ - ρ(u))` for `x ∈ Δ`.
///
/// A coarse grid over `[-R, R]²` (step 1) locates the basin, then a compass
/// search halves its step down to `1e-7`. On the boundary of `Δ` the
/// infimum is approached only as `|u| → ∞`, so there the value is whatever
/// the box edge gives (of order `e^{-R}`).
pub fn legendre_dual<T: Scalar>(x: (T, T), cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    if !in_simplex(x) {
        return Err(AmoebaError::NotInSimplex {
            x1: x.0.to_f64_lossy(),
            x2: x.1.to_f64_lossy(),
        });
    }
    let r = T::of(DUAL_SEARCH_RADIUS);
    let objective = |u1: T, u2: T| -> Result<T, AmoebaError> {
        Ok(x.0 * u1 + x.1 * u2 - ronkin(AmoebaPoint::new(u1, u2), cfg)?)
    };

    let n = 2 * DUAL_SEARCH_RADIUS as i64;
    let grid: Vec<(i64, i64)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
    let values: Vec<T> = grid
        .par_iter()
        .map(|&(i, j)| objective(T::of_i64(i) - r, T::of_i64(j) - r))
        .collect::<Result<_, _>>()?;
    let mut best_k = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best_k] {
            best_k = k;
        }
    }
    let (i, j) = grid[best_k];
    let (mut u1, mut u2) = (T::of_i64(i) - r, T::of_i64(j) - r);
    let mut best = values[best_k];

    let mut step = T::of(0.5);
    let min_step = T::of(1e-7);
    while step >= min_step {
        let mut moved = false;
        for (du1, du2) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)] {
            let v1 = (u1 + T::of_i64(du1) * step).max(-r).min(r);
            let v2 = (u2 + T::of_i64(du2) * step).max(-r).min(r);
            let v = objective(v1, v2)?;
            if v < best {
                best = v;
                u1 = v1;
                u2 = v2;
                moved = true;
                break;
            }
        }
        if !moved {
            step = step * T::of(0.5);
        }
    }
    Ok(best)
}

/// `det Hess(-ρ)` by central differences with step `h`, refined by one
/// Richardson step with `h/2`. Expected `π⁻²` on the amoeba.
///
/// Rejects points closer than `3h` to the boundary or outside `𝒜`.
pub fn monge_ampere_density<T: Scalar>(u: AmoebaPoint<T>, h: T, cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    let ill = || AmoebaError::IllConditioned {
        u1: u.u1.to_f64_lossy(),
        u2: u.u2.to_f64_lossy(),
    };
    if region(u) == RegionTag::Outside || region(u) == RegionTag::Boundary {
        return Err(ill());
    }
    let reach = T::of(3.0) * h;
    for k in 0..16 {
        let a = T::of(2.0) * T::PI() * T::of_u64(k) / T::of(16.0);
        let v = AmoebaPoint::new(u.u1 + reach * a.cos(), u.u2 + reach * a.sin());
        if region(v) == RegionTag::Outside || region(v) == RegionTag::Boundary {
            return Err(ill());
        }
    }
    monge_ampere_density_unchecked(u, h, cfg)
}

/// [`monge_ampere_density`] without the interior check.
pub fn monge_ampere_density_unchecked<T: Scalar>(u: AmoebaPoint<T>, h: T, cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    let coarse = hessian_det(u, h, cfg)?;
    let fine = hessian_det(u, T::of(0.5) * h, cfg)?;
    Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
}

fn hessian_det<T: Scalar>(u: AmoebaPoint<T>, h: T, cfg: QuadConfig<T>) -> Result<T, AmoebaError> {
    let f = |d1: T, d2: T| -> Result<T, AmoebaError> { Ok(-ronkin(AmoebaPoint::new(u.u1 + d1, u.u2 + d2), cfg)?) };
    let z = T::zero();
    let f0 = f(z, z)?;
    let h2 = h * h;
    let fxx = (f(h, z)? - T::of(2.0) * f0 + f(-h, z)?) / h2;
    let fyy = (f(z, h)? - T::of(2.0) * f0 + f(z, -h)?) / h2;
    let fxy = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (T::of(4.0) * h2);
    Ok(fxx * fyy - fxy * fxy)
}
