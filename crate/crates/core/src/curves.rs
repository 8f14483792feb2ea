//! Torsion curves `V_{a,e} = {Φ_e(χ^a) = 0}` and the limit heights of
//! torsion points running along them.
//!
//! On the real torus `(R/2πZ)²` the curve becomes `φ(e)` parallel closed
//! segments `a1 u1 + a2 u2 ≡ 2πj/e`. Each is parameterized by `w ∈ [0, 1)`
//! as `u(w) = 2π (j/e · (x, y) + w · (-a2, a1))` where `a1 x + a2 y = 1`, so
//! the segment is traversed exactly once at unit speed in `w`.

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::constants::special_values;
use crate::quad::{integrate_with_breaks, QuadConfig, QuadError, QuadResult};
use crate::scalar::{CompensatedSum, Scalar};
use crate::torsion::{total_height, HeightError, TorsionPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("character ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("cyclotomic index e must be positive")]
    ZeroIndex,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("e = {e} does not divide d = {d}, so the curve has no d-torsion points")]
    EmptyIntersection { d: u64, e: u64 },
    #[error("modulus list must be nonempty and strictly increasing, with every d >= 2")]
    BadModuli,
    #[error(transparent)]
    Quad(#[from] QuadError<f64>),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `V_{a,e}` for a primitive character `a` and `e ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorsionCurve {
    a: (i64, i64),
    e: u64,
}

/// One closed segment `a·u ≡ 2πj/e`, written in turns (units of `2π`):
/// `u(w)/2π = offset + w · direction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub j: u64,
    pub offset: (Ratio<i64>, Ratio<i64>),
    pub direction: (i64, i64),
}

impl TorsionCurve {
    pub fn new(a: (i64, i64), e: u64) -> Result<Self, CurveError> {
        if e == 0 {
            return Err(CurveError::ZeroIndex);
        }
        if a.0.gcd(&a.1) != 1 {
            return Err(CurveError::NotPrimitive(a.0, a.1));
        }
        Ok(Self { a, e })
    }

    pub fn character(&self) -> (i64, i64) {
        self.a
    }

    pub fn index(&self) -> u64 {
        self.e
    }

    /// `(x, y)` with `a1 x + a2 y = 1`.
    fn bezout(&self) -> (i64, i64) {
        let g = self.a.0.extended_gcd(&self.a.1);
        if g.gcd < 0 {
            (-g.x, -g.y)
        } else {
            (g.x, g.y)
        }
    }

    /// The `φ(e)` parallel segments, ordered by `j`.
    pub fn segments(&self) -> Result<Vec<Segment>, CurveError> {
        let (x, y) = self.bezout();
        let e = self.e as i64;
        let direction = (-self.a.1, self.a.0);
        Ok(arith::modular_units(self.e)?
            .into_iter()
            .map(|j| {
                let j = if self.e == 1 { 0 } else { j };
                Segment {
                    j,
                    offset: (Ratio::new(j as i64 * x, e), Ratio::new(j as i64 * y, e)),
                    direction,
                }
            })
            .collect())
    }

    /// Does `ω` lie on the curve, i.e. is `χ^a(ω)` a primitive `e`-th root of unity?
    pub fn contains(&self, pt: &TorsionPoint) -> bool {
        let d = pt.modulus();
        if d % self.e != 0 {
            return false;
        }
        let (c1, c2) = pt.residues();
        let v = (self.a.0 as i128 * c1 as i128 + self.a.1 as i128 * c2 as i128).rem_euclid(d as i128) as u64;
        let step = d / self.e;
        v % step == 0 && (v / step).gcd(&self.e) == 1
    }
}

/// Points `w ∈ (0, 1)` where `f` along the segment can have a kink: two of
/// the three chords `|sin(π s)|` agree, which happens when two of the linear
/// forms `s1, s2, s2 - s1` are congruent up to sign mod 1.
fn kink_points(seg: &Segment) -> Vec<Ratio<i64>> {
    let (p1, p2) = seg.offset;
    let (q1, q2) = seg.direction;
    let forms = [(p1, q1), (p2, q2), (p2 - p1, q2 - q1)];
    let mut out = Vec::new();
    for i in 0..3 {
        for k in (i + 1)..3 {
            for sign in [1i64, -1] {
                let dp = forms[i].0 - forms[k].0 * sign;
                let dq = forms[i].1 - forms[k].1 * sign;
                if dq == 0 {
                    continue;
                }
                // dp + dq·w ∈ Z for w ∈ (0, 1)
                let (lo, hi) = if dq > 0 { (dp, dp + dq) } else { (dp + dq, dp) };
                let mut n = lo.floor().to_integer();
                while Ratio::from_integer(n) <= hi {
                    let w = (Ratio::from_integer(n) - dp) / dq;
                    if w > Ratio::from_integer(0) && w < Ratio::from_integer(1) {
                        out.push(w);
                    }
                    n += 1;
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn ratio_to<T: Scalar>(r: Ratio<i64>) -> T {
    T::of_i64(*r.numer()) / T::of_i64(*r.denom())
}

/// `2 |sin(π s)|` with `s` first reduced mod 1.
fn chord_turns<T: Scalar>(s: T) -> T {
    let t = s - s.floor();
    T::of(2.0) * (T::PI() * t).sin().abs()
}

/// `f(u) = log max(|e^{iu2} - e^{iu1}|, |e^{iu2} - 1|, |e^{iu1} - 1|)` with `u` in turns.
pub fn log_max_chord_turns<T: Scalar>(s1: T, s2: T) -> T {
    chord_turns(s1).max(chord_turns(s2)).max(chord_turns(s2 - s1)).ln()
}

/// `η_{a,e}`: the average of `f` over the segment family, each segment
/// carrying the uniform probability measure.
///
/// The singular point `u ≡ (0, 0)` can only lie on the segment when `e = 1`,
/// and then only at the endpoints `w = 0, 1`, which the open quadrature rule
/// never evaluates. Kinks of `f` are passed as break points.
pub fn eta_ae<T: Scalar>(curve: &TorsionCurve, cfg: QuadConfig<T>) -> Result<QuadResult<T>, CurveError> {
    let segments = curve.segments()?;
    let n = T::of_u64(segments.len() as u64);
    let mut value = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    let mut evaluations = 0;
    for seg in &segments {
        let mut points = vec![T::zero()];
        points.extend(kink_points(seg).into_iter().map(ratio_to::<T>));
        points.push(T::one());
        points.dedup();
        let (p1, p2) = (ratio_to::<T>(seg.offset.0), ratio_to::<T>(seg.offset.1));
        let (q1, q2) = (T::of_i64(seg.direction.0), T::of_i64(seg.direction.1));
        let r = integrate_with_breaks(
            |w: T| log_max_chord_turns(p1 + q1 * w, p2 + q2 * w),
            &points,
            cfg,
        )
        .map_err(|e| e.to_f64())?;
        value.add(r.value);
        err.add(r.err_estimate);
        evaluations += r.evaluations;
    }
    Ok(QuadResult {
        value: value.value() / n,
        err_estimate: err.value() / n,
        evaluations,
    })
}

/// `gcd(a1, a2, d) / d`; how far the character `χ^a` is from being trivial on `μ_d²`.
pub fn strictness_ratio(a: (i64, i64), d: u64) -> Result<Ratio<u64>, CurveError> {
    if d == 0 {
        return Err(CurveError::ZeroModulus);
    }
    if a == (0, 0) {
        return Err(CurveError::NotPrimitive(0, 0));
    }
    let g = a.0.unsigned_abs().gcd(&a.1.unsigned_abs()).gcd(&d);
    Ok(Ratio::new(g, d))
}

/// All nontrivial `ω ∈ μ_d²` on the curve, in lexicographic order of `(c1, c2)`.
pub fn sample_on_curve(curve: &TorsionCurve, d: u64) -> Result<Vec<TorsionPoint>, CurveError> {
    if d == 0 {
        return Err(CurveError::ZeroModulus);
    }
    if d % curve.e != 0 {
        return Err(CurveError::EmptyIntersection { d, e: curve.e });
    }
    let mut out = Vec::with_capacity((d * arith::euler_phi(curve.e)?) as usize);
    for c1 in 0..d {
        for c2 in 0..d {
            if c1 == 0 && c2 == 0 {
                continue;
            }
            let pt = TorsionPoint::new(d, c1 as i64, c2 as i64)?;
            if curve.contains(&pt) {
                out.push(pt);
            }
        }
    }
    Ok(out)
}

/// How the witness point is picked for each modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Witness {
    /// `(1, ⌊√d⌋)` without a curve; the lexicographically first point of
    /// maximal order on a curve.
    #[default]
    Sqrt,
    /// A uniformly random point of maximal order, seeded per modulus.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub d: u64,
    pub c1: u64,
    pub c2: u64,
    pub order: u64,
    pub height: f64,
    pub limit: f64,
    pub gap: f64,
    /// Sup-norm of the shortest nonzero character vanishing at the witness.
    pub relation_norm: u64,
}

/// Smallest `max(|a1|, |a2|)` over nonzero `a` with `a1 c1 + a2 c2 ≡ 0 (mod d)`.
pub fn shortest_relation_norm(c: (u64, u64), d: u64) -> u64 {
    let di = d as i128;
    for n in 1..=d as i64 {
        // boundary of the box of radius n
        for a1 in -n..=n {
            let edge = if a1.abs() == n { -n..=n } else { n..=n };
            for a2 in edge {
                for a2 in [a2, -a2] {
                    if (a1 as i128 * c.0 as i128 + a2 as i128 * c.1 as i128).rem_euclid(di) == 0 {
                        return n as u64;
                    }
                }
            }
        }
    }
    d
}

fn rng_for(seed: u64, d: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(d);
    rng
}

fn witness_point(curve: Option<&TorsionCurve>, d: u64, witness: Witness) -> Result<TorsionPoint, CurveError> {
    match (curve, witness) {
        (None, Witness::Sqrt) => {
            let s = (d as f64).sqrt().floor() as u64;
            let s = if s * s > d { s - 1 } else { s };
            Ok(TorsionPoint::nontrivial(d, 1, s as i64)?)
        }
        (None, Witness::Random { seed }) => {
            let mut rng = rng_for(seed, d);
            loop {
                let pt = TorsionPoint::new(d, rng.gen_range(0..d) as i64, rng.gen_range(0..d) as i64)?;
                if pt.order() == d {
                    return Ok(pt);
                }
            }
        }
        (Some(curve), w) => {
            let points = sample_on_curve(curve, d)?;
            let best = points.iter().map(|p| p.order()).max().ok_or(CurveError::EmptyIntersection { d, e: curve.e })?;
            let top: Vec<TorsionPoint> = points.into_iter().filter(|p| p.order() == best).collect();
            Ok(match w {
                Witness::Sqrt => top[0],
                Witness::Random { seed } => top[rng_for(seed, d).gen_range(0..top.len())],
            })
        }
    }
}

/// Heights of one witness point per modulus against the expected limit:
/// `η` without a curve, `η_{a,e}` on a curve. Rows follow `d_list`.
pub fn limit_experiment(
    curve: Option<&TorsionCurve>,
    d_list: &[u64],
    witness: Witness,
    cfg: QuadConfig<f64>,
) -> Result<Vec<LimitRow>, CurveError> {
    if d_list.is_empty() || d_list[0] < 2 || d_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CurveError::BadModuli);
    }
    let limit = match curve {
        None => special_values().eta,
        Some(c) => eta_ae(c, cfg)?.value,
    };
    d_list
        .par_iter()
        .map(|&d| {
            let pt = witness_point(curve, d, witness)?;
            let height = total_height::<f64>(&pt)?.total;
            let (c1, c2) = pt.residues();
            Ok(LimitRow {
                d,
                c1,
                c2,
                order: pt.order(),
                height,
                limit,
                gap: (height - limit).abs(),
                relation_norm: shortest_relation_norm((c1, c2), d),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::new(1e-11)
    }

    fn theta() -> f64 {
        special_values().theta
    }

    /// Brute force `η_{a,e}` oracle: midpoint rule on a fine grid along each
    /// segment, built from the defining congruence rather than `segments()`.
    fn eta_ae_midpoint(a: (i64, i64), e: u64, n: usize) -> f64 {
        let (x, y) = {
            let mut found = None;
            'outer: for x in -20i64..=20 {
                for y in -20i64..=20 {
                    if a.0 * x + a.1 * y == 1 {
                        found = Some((x, y));
                        break 'outer;
                    }
                }
            }
            found.unwrap()
        };
        let js: Vec<u64> = (0..e.max(1)).filter(|j| j.gcd(&e) == 1).collect();
        let mut total = 0.0;
        for &j in &js {
            let mut s = 0.0;
            for i in 0..n {
                let w = (i as f64 + 0.5) / n as f64;
                let s1 = j as f64 / e as f64 * x as f64 - a.1 as f64 * w;
                let s2 = j as f64 / e as f64 * y as f64 + a.0 as f64 * w;
                s += log_max_chord_turns(s1, s2);
            }
            total += s / n as f64;
        }
        total / js.len() as f64
    }

    #[test]
    fn construction() {
        assert!(TorsionCurve::new((2, -1), 1).is_ok());
        assert_eq!(TorsionCurve::new((2, 4), 1), Err(CurveError::NotPrimitive(2, 4)));
        assert_eq!(TorsionCurve::new((0, 0), 1), Err(CurveError::NotPrimitive(0, 0)));
        assert_eq!(TorsionCurve::new((1, 0), 0), Err(CurveError::ZeroIndex));
        let c = TorsionCurve::new((3, 5), 12).unwrap();
        let segs = c.segments().unwrap();
        assert_eq!(segs.len(), 4);
        for s in segs {
            let lhs = s.offset.0 * 3 + s.offset.1 * 5;
            assert_eq!(lhs, Ratio::new(s.j as i64, 12));
            assert_eq!(3 * s.direction.0 + 5 * s.direction.1, 0);
        }
    }

    #[test]
    fn jensen_identity() {
        let r = integrate_with_breaks(
            |w: f64| (2.0 * (std::f64::consts::PI * w).sin()).ln(),
            &[0.0, 1.0],
            QuadConfig::new(1e-13),
        )
        .unwrap();
        assert!(r.value.abs() <= 1e-10, "{}", r.value);
    }

    #[test]
    fn eta_ae_vanishing_examples() {
        for a in [(0, 1), (1, 0), (1, -1)] {
            let c = TorsionCurve::new(a, 1).unwrap();
            let v = eta_ae(&c, cfg()).unwrap().value;
            assert!(v.abs() <= 1e-9, "{a:?}: {v}");
        }
    }

    #[test]
    fn eta_ae_theta_examples() {
        for a in [(2, -1), (1, 1), (1, -2)] {
            let c = TorsionCurve::new(a, 1).unwrap();
            let v = eta_ae(&c, cfg()).unwrap().value;
            assert!((v - theta()).abs() <= 1e-8, "{a:?}: {v}");
        }
    }

    #[test]
    fn eta_ae_against_midpoint_oracle() {
        for (a, e) in [((1, 2), 1), ((1, 3), 2), ((2, 3), 5), ((1, 0), 4), ((3, -2), 6)] {
            let c = TorsionCurve::new(a, e).unwrap();
            let v = eta_ae(&c, cfg()).unwrap().value;
            let oracle = eta_ae_midpoint(a, e, 400_000);
            assert!((v - oracle).abs() <= 1e-4, "{a:?} {e}: {v} vs {oracle}");
        }
    }

    #[test]
    fn eta_ae_single_precision() {
        let c = TorsionCurve::new((2, -1), 1).unwrap();
        let v: f32 = eta_ae(&c, QuadConfig::new(1e-5f32)).unwrap().value;
        assert!((v as f64 - theta()).abs() <= 1e-4);
    }

    #[test]
    fn strictness_examples() {
        assert_eq!(strictness_ratio((2, 4), 6).unwrap(), Ratio::new(1, 3));
        assert_eq!(strictness_ratio((1, 0), 10).unwrap(), Ratio::new(1, 10));
        assert_eq!(strictness_ratio((3, 3), 9).unwrap(), Ratio::new(1, 3));
        assert!(strictness_ratio((0, 0), 9).is_err());
    }

    #[test]
    fn sample_examples() {
        let c = TorsionCurve::new((2, -1), 1).unwrap();
        let pts: Vec<(u64, u64)> = sample_on_curve(&c, 5).unwrap().iter().map(|p| p.residues()).collect();
        assert_eq!(pts, vec![(1, 2), (2, 4), (3, 1), (4, 3)]);

        let c = TorsionCurve::new((0, 1), 2).unwrap();
        let pts = sample_on_curve(&c, 4).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p.residues().1 == 2));

        let c = TorsionCurve::new((1, 0), 3).unwrap();
        assert_eq!(sample_on_curve(&c, 4), Err(CurveError::EmptyIntersection { d: 4, e: 3 }));
    }

    #[test]
    fn sample_cardinality_against_brute() {
        for (a, e) in [((1, 0), 1), ((2, -1), 1), ((1, 1), 2), ((3, 2), 3), ((1, -4), 4), ((5, 3), 6)] {
            let c = TorsionCurve::new(a, e).unwrap();
            for d in (e..=36).step_by(e as usize) {
                let pts = sample_on_curve(&c, d).unwrap();
                let phi = (1..=e).filter(|j| j.gcd(&e) == 1).count() as u64;
                let expected = d * phi - u64::from(e == 1);
                assert_eq!(pts.len() as u64, expected, "{a:?} e={e} d={d}");
                // brute oracle: χ^a(ω) is a primitive e-th root of unity
                let brute = (0..d)
                    .flat_map(|c1| (0..d).map(move |c2| (c1, c2)))
                    .filter(|&(c1, c2)| (c1, c2) != (0, 0))
                    .filter(|&(c1, c2)| {
                        let v = (a.0 * c1 as i64 + a.1 * c2 as i64).rem_euclid(d as i64) as u64;
                        // v/d has exact order e in Q/Z
                        let g = v.gcd(&d);
                        d / g == e
                    })
                    .count();
                assert_eq!(pts.len(), brute);
            }
        }
    }

    #[test]
    fn relation_norms() {
        assert_eq!(shortest_relation_norm((1, 2), 101), 2);
        assert_eq!(shortest_relation_norm((1, 10), 101), 10);
        assert_eq!(shortest_relation_norm((0, 1), 7), 1);
    }

    #[test]
    fn generic_ladder_tends_to_eta() {
        let primes: Vec<u64> = (101..=997).filter(|&p| is_prime(p)).collect();
        let rows = limit_experiment(None, &primes, Witness::Sqrt, cfg()).unwrap();
        assert_eq!(rows.len(), primes.len());
        for (r, &d) in rows.iter().zip(&primes) {
            assert_eq!(r.d, d);
            assert_eq!(r.order, d);
        }
        let last = rows.last().unwrap();
        assert!(last.gap < 0.02, "{last:?}");
        assert!(rows[0].gap > last.gap);
    }

    #[test]
    fn curve_ladder_tends_to_theta() {
        let c = TorsionCurve::new((2, -1), 1).unwrap();
        let primes: Vec<u64> = (5..=499).filter(|&p| is_prime(p)).collect();
        let rows = limit_experiment(Some(&c), &primes, Witness::Sqrt, cfg()).unwrap();
        for r in &rows {
            assert_eq!((r.c1, r.c2), (1, 2));
        }
        assert!(rows.last().unwrap().gap < 0.02);
        assert!(rows[0].gap > rows.last().unwrap().gap);
    }

    #[test]
    fn flat_curve_heights_vanish() {
        let c = TorsionCurve::new((0, 1), 1).unwrap();
        let rows = limit_experiment(Some(&c), &[5, 7, 11, 64], Witness::Sqrt, cfg()).unwrap();
        for r in rows {
            assert!(r.height.abs() <= 1e-12 && r.gap <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn random_witness_is_reproducible() {
        let ds = [50, 60, 70];
        let a = limit_experiment(None, &ds, Witness::Random { seed: 7 }, cfg()).unwrap();
        let b = limit_experiment(None, &ds, Witness::Random { seed: 7 }, cfg()).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert_eq!(r.order, r.d);
        }
        assert_eq!(limit_experiment(None, &[10, 9], Witness::Sqrt, cfg()), Err(CurveError::BadModuli));
    }
}
