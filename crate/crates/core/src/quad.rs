//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of largest error estimate until the
//! summed estimate meets `max(abs_tol, rel_tol·|I|)`.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// Kronrod abscissae, descending; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Scalar> Default for QuadSettings<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::clamp_tol(1e-12),
            rel_tol: T::clamp_tol(1e-12),
            max_subdivisions: 2000,
        }
    }
}

impl<T: Scalar> QuadSettings<T> {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol: T::clamp_tol(abs_tol),
            rel_tol: T::tol_floor(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss estimate.
fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let s = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * s;
        }
    }
    let value = kronrod * radius;
    let error = ((kronrod - gauss) * radius).abs();
    (value, error)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: T, b: T, settings: &QuadSettings<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    integrate_with_breaks(f, &[a, b], settings)
}

/// Integrates over `[points[0], points[last]]`, seeding the subdivision with
/// the given interior break points (kinks, branch switches).
pub fn integrate_with_breaks<T, F>(
    mut f: F,
    points: &[T],
    settings: &QuadSettings<T>,
) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    assert!(points.len() >= 2, "need at least two integration limits");
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = T::zero();
    let mut evaluations = 0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = gk15(&mut f, a, b);
        evaluations += 15;
        total = total + value;
        total_err = total_err + error;
        heap.push(Segment { a, b, value, error });
    }

    let mut subdivisions = heap.len();
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (non-finite integrand)",
                iterations: subdivisions,
                achieved: total_err.as_f64(),
            });
        }
        let target = settings.abs_tol.max(settings.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                iterations: subdivisions,
                achieved: total_err.as_f64(),
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at this precision
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (interval underflow)",
                iterations: subdivisions,
                achieved: total_err.as_f64(),
            });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed drift from the running updates.
    let (mut value, mut abs_error) = (T::zero(), T::zero());
    for s in heap.iter() {
        value = value + s.value;
        abs_error = abs_error + s.error;
    }
    Ok(QuadResult {
        value,
        abs_error,
        evaluations,
    })
}

/// [`integrate_with_breaks`] for integrands that can fail; the first error
/// raised by `f` aborts the result.
pub fn integrate_fallible<T, F>(mut f: F, points: &[T], settings: &QuadSettings<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let mut failure = None;
    let r = integrate_with_breaks(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        points,
        settings,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

/// Integrates `f` over `[a, ∞)` through `x = a + t / (1 − t)`, `t ∈ [0, 1)`.
pub fn integrate_to_infinity<T, F>(mut f: F, a: T, settings: &QuadSettings<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let one = T::one();
    integrate(
        move |t: T| {
            let u = one - t;
            let x = a + t / u;
            let v = f(x) / (u * u);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        one,
        settings,
    )
}
