//! Special values: `ζ(s)`, `L(χ₋₃, 2)`, the limit height
//! `η = 2ζ(3) / 3ζ(2)` and the Mahler measure
//! `θ = m(x0 + x1 + x2) = (3√3 / 4π) L(χ₋₃, 2)`, plus a quadrature route to `η`.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::quad::{integrate_with_breaks, QuadConfig, QuadError, QuadResult};
use crate::scalar::{CompensatedSum, Scalar};

/// Number of explicit terms before the tail correction kicks in.
const SERIES_TERMS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstantsError {
    #[error("zeta(s) needs s >= 2, got {0}")]
    ZetaDomain(u32),
    #[error("L(chi_-3, s) is only provided at s = 2, got {0}")]
    UnsupportedL(u32),
}

/// `ζ(s)` for integer `s ≥ 2`.
///
/// Sums `k^-s` for `k < K` (smallest terms first) and replaces the tail by
/// `∫_{K-1/2}^∞ x^-s dx`, whose error is below `s(s+1) / (24 (s-1) K^(s+1))`.
pub fn zeta<T: Scalar>(s: u32) -> Result<T, ConstantsError> {
    if s < 2 {
        return Err(ConstantsError::ZetaDomain(s));
    }
    let exponent = -(s as i32);
    let mut acc = CompensatedSum::new();
    for k in (1..SERIES_TERMS).rev() {
        acc.add(T::of_u64(k).powi(exponent));
    }
    let start = T::of_u64(SERIES_TERMS) - T::of(0.5);
    let sm1 = T::of_u64(s as u64 - 1);
    acc.add(start.powi(-(s as i32 - 1)) / sm1);
    Ok(acc.value())
}

/// `χ₋₃(n)`: 1, -1, 0 for `n ≡ 1, 2, 0 (mod 3)`.
pub fn chi_minus3(n: u64) -> i8 {
    match n % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// Partial sum `Σ_{n ≤ terms} χ₋₃(n) / n²`.
pub fn l_chi3_partial<T: Scalar>(terms: u64) -> T {
    let mut acc = CompensatedSum::new();
    for n in (1..=terms).rev() {
        match chi_minus3(n) {
            1 => acc.add(T::one() / T::of_u64(n * n)),
            -1 => acc.add(-T::one() / T::of_u64(n * n)),
            _ => {}
        }
    }
    acc.value()
}

/// `L(χ₋₃, s)`; only `s = 2` is supported.
///
/// Sums the blocks `(3m+1)^-2 - (3m+2)^-2` for `m < M` and closes with the
/// midpoint integral of the block function over `[M - 1/2, ∞)`.
pub fn l_chi3<T: Scalar>(s: u32) -> Result<T, ConstantsError> {
    if s != 2 {
        return Err(ConstantsError::UnsupportedL(s));
    }
    let blocks = SERIES_TERMS;
    let mut acc = CompensatedSum::new();
    for m in (0..blocks).rev() {
        let a = T::of_u64(3 * m + 1);
        let b = T::of_u64(3 * m + 2);
        acc.add(T::one() / (a * a) - T::one() / (b * b));
    }
    // ∫ (3x+1)^-2 - (3x+2)^-2 dx from M - 1/2 to ∞
    let x = T::of_u64(blocks) - T::of(0.5);
    let three = T::of(3.0);
    acc.add(T::one() / (three * (three * x + T::one())) - T::one() / (three * (three * x + T::of(2.0))));
    Ok(acc.value())
}

/// `η = 2ζ(3) / (3ζ(2))`.
pub fn eta<T: Scalar>() -> T {
    let z3: T = zeta(3).expect("s = 3 is in range");
    let z2: T = zeta(2).expect("s = 2 is in range");
    T::of(2.0) * z3 / (T::of(3.0) * z2)
}

/// `θ = (3√3 / 4π) L(χ₋₃, 2)`.
pub fn theta<T: Scalar>() -> T {
    let l: T = l_chi3(2).expect("s = 2 is supported");
    T::of(3.0) * T::of(3.0).sqrt() / (T::of(4.0) * T::PI()) * l
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialValues<T> {
    pub zeta2: T,
    pub zeta3: T,
    pub zeta4: T,
    #[serde(rename = "L_chi3_2")]
    pub l_chi3_2: T,
    pub eta: T,
    pub theta: T,
}

impl<T: Scalar> SpecialValues<T> {
    pub fn compute() -> Self {
        let zeta2 = zeta(2).expect("in range");
        let zeta3 = zeta(3).expect("in range");
        let l_chi3_2 = l_chi3(2).expect("supported");
        Self {
            zeta2,
            zeta3,
            zeta4: zeta(4).expect("in range"),
            l_chi3_2,
            eta: T::of(2.0) * zeta3 / (T::of(3.0) * zeta2),
            theta: T::of(3.0) * T::of(3.0).sqrt() / (T::of(4.0) * T::PI()) * l_chi3_2,
        }
    }
}

/// Double-precision table, computed once.
pub fn special_values() -> &'static SpecialValues<f64> {
    static TABLE: OnceLock<SpecialValues<f64>> = OnceLock::new();
    TABLE.get_or_init(SpecialValues::compute)
}

/// `log |e^{is} - 1| = log(2 |sin(s/2)|)`.
pub fn log_chord<T: Scalar>(s: T) -> T {
    (T::of(2.0) * (T::of(0.5) * s).sin().abs()).ln()
}

/// `∫_0^π s log|e^{is} - 1| ds` and `∫_π^{4π/3} (4π - 3s) log|e^{is} - 1| ds`.
pub fn log_sine_integrals<T: Scalar>(cfg: QuadConfig<T>) -> Result<(QuadResult<T>, QuadResult<T>), QuadError<T>> {
    let pi = T::PI();
    let first = integrate_with_breaks(|s: T| s * log_chord(s), &[T::zero(), pi], cfg)?;
    let second = integrate_with_breaks(
        |s: T| (T::of(4.0) * pi - T::of(3.0) * s) * log_chord(s),
        &[pi, T::of(4.0) * pi / T::of(3.0)],
        cfg,
    )?;
    Ok((first, second))
}

/// The limit integral
/// `I = 12/(2π)² ∫_0^{4π/3} min(u/2, 2π - 3u/2) log|e^{iu} - 1| du`,
/// i.e. the torus average of `log max(|e^{iu2} - e^{iu1}|, |e^{iu2} - 1|, |e^{iu1} - 1|)`
/// folded onto a fundamental triangle of the twelve symmetries.
pub fn integral_i<T: Scalar>(cfg: QuadConfig<T>) -> Result<QuadResult<T>, QuadError<T>> {
    let pi = T::PI();
    let two_pi = T::of(2.0) * pi;
    let scale = T::of(12.0) / (two_pi * two_pi);
    // the quadrature tolerance applies before scaling
    let inner_cfg = QuadConfig {
        tol: cfg.tol / scale,
        budget: cfg.budget,
    };
    let weight = move |u: T| (T::of(0.5) * u).min(two_pi - T::of(1.5) * u);
    let r = integrate_with_breaks(
        |u: T| weight(u) * log_chord(u),
        &[T::zero(), pi, T::of(4.0) * pi / T::of(3.0)],
        inner_cfg,
    )?;
    Ok(QuadResult {
        value: scale * r.value,
        err_estimate: scale * r.err_estimate,
        evaluations: r.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// ζ(3) to 1e-16 from an independent oracle: the Apéry-type series
    /// `ζ(3) = (5/2) Σ (-1)^{k+1} / (k³ C(2k, k))`.
    fn zeta3_oracle() -> f64 {
        let mut s = 0.0;
        let mut binom = 1.0f64;
        for k in 1..=30u32 {
            let kf = k as f64;
            binom *= (2.0 * kf - 1.0) * 2.0 / kf; // C(2k, k)
            let term = 1.0 / (kf * kf * kf * binom);
            s += if k % 2 == 1 { term } else { -term };
        }
        2.5 * s
    }

    #[test]
    fn zeta_examples() {
        let z2: f64 = zeta(2).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() <= 1e-14);
        let z3: f64 = zeta(3).unwrap();
        assert!((z3 - zeta3_oracle()).abs() <= 1e-13, "{z3} vs {}", zeta3_oracle());
        assert!((z3 - 1.2020569).abs() < 1e-7);
        let z4: f64 = zeta(4).unwrap();
        assert!((z4 - PI.powi(4) / 90.0).abs() <= 1e-14);
        let z6: f64 = zeta(6).unwrap();
        assert!((z6 - PI.powi(6) / 945.0).abs() <= 1e-14);
        assert_eq!(zeta::<f64>(1), Err(ConstantsError::ZetaDomain(1)));
        assert_eq!(zeta::<f64>(0), Err(ConstantsError::ZetaDomain(0)));
    }

    #[test]
    fn l_chi3_examples() {
        assert_eq!(l_chi3_partial::<f64>(2), 0.75);
        let l: f64 = l_chi3(2).unwrap();
        // the tail after 10^7 terms is below 1e-14
        let brute: f64 = l_chi3_partial(10_000_000);
        assert!((l - brute).abs() <= 1e-12, "{l} vs {brute}");
        assert!((3.0 * 3f64.sqrt() / (4.0 * PI) * l - 0.323065).abs() < 1e-6);
        assert_eq!(l_chi3::<f64>(3), Err(ConstantsError::UnsupportedL(3)));
    }

    #[test]
    fn eta_and_theta() {
        let e: f64 = eta();
        assert!((e - 0.487175).abs() < 1e-6);
        let z3: f64 = zeta(3).unwrap();
        assert!((e - 4.0 * z3 / (PI * PI)).abs() <= 1e-14);
        let t: f64 = theta();
        assert!((t - 0.323065).abs() < 1e-6);
        assert!(t < e && e < std::f64::consts::LN_2);
        let table = special_values();
        assert_eq!(table.eta, e);
        assert_eq!(table.theta, t);
        assert!((table.zeta2 - PI * PI / 6.0).abs() <= 1e-14);
    }

    #[test]
    fn log_sine_values() {
        let (a, b) = log_sine_integrals(QuadConfig::new(1e-10)).unwrap();
        let z3: f64 = zeta(3).unwrap();
        assert!((a.value - 1.75 * z3).abs() <= 1e-9, "{a:?}");
        assert!((b.value - 11.0 / 12.0 * z3).abs() <= 1e-9, "{b:?}");
        assert!((a.value - 2.1035996).abs() < 1e-7);
        assert!((b.value - 1.1018855).abs() < 1e-7);
        let recombined = 12.0 / (4.0 * PI * PI) * 0.5 * (a.value + b.value);
        assert!((recombined - eta::<f64>()).abs() <= 1e-9);
    }

    #[test]
    fn integral_i_matches_eta() {
        let r = integral_i(QuadConfig::new(1e-10)).unwrap();
        assert!((r.value - eta::<f64>()).abs() <= 1e-9, "{r:?}");
    }

    #[test]
    fn integral_i_split_pieces() {
        let pi = PI;
        let scale = 12.0 / (4.0 * pi * pi);
        let cfg = QuadConfig::new(1e-11);
        let first = integrate_with_breaks(|u: f64| 0.5 * u * log_chord(u), &[0.0, pi], cfg).unwrap();
        let second = integrate_with_breaks(
            |u: f64| (2.0 * pi - 1.5 * u) * log_chord(u),
            &[pi, 4.0 * pi / 3.0],
            cfg,
        )
        .unwrap();
        let z3: f64 = zeta(3).unwrap();
        assert!((scale * first.value - scale * 0.5 * 1.75 * z3).abs() < 1e-10);
        assert!((scale * second.value - scale * 0.5 * 11.0 / 12.0 * z3).abs() < 1e-10);
    }

    /// Slow cross-check of I on the full torus by a midpoint lattice, which
    /// never lands on the singular point (0, 0).
    #[test]
    fn integral_i_against_torus_lattice() {
        let n = 400;
        let h = 2.0 * PI / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let u1 = (i as f64 + 0.5) * h;
                let u2 = (j as f64 + 0.5) * h;
                let m = (2.0 * (0.5 * (u2 - u1)).sin().abs())
                    .max(2.0 * (0.5 * u2).sin().abs())
                    .max(2.0 * (0.5 * u1).sin().abs());
                s += m.ln();
            }
        }
        let lattice = s / (n * n) as f64;
        assert!((lattice - eta::<f64>()).abs() < 1e-3, "{lattice}");
    }

    #[test]
    fn single_precision_constants() {
        let e: f32 = eta();
        assert!((e as f64 - 0.487175).abs() < 1e-5);
        let t: f32 = theta();
        assert!((t as f64 - 0.323065).abs() < 1e-5);
    }
}
