//! Ergodic rate `E[ln(1 + SIR)] = ∫₀^∞ P_cov(w) / (1 + w) dw` in nats/s/Hz.
//!
//! Adaptive quadrature of that integral is the reference for every closed
//! form in this module.

use crate::analytics::coverage::{bracket, PcovKind};
use crate::analytics::load::load_model;
use crate::error::{Error, Result};
use crate::mgf::{check_beta, check_p_active, solve_c, IntersectionConstant};
use crate::quad::{integrate_fallible, QuadSettings};
use crate::scalar::Scalar;
use crate::specfun::{gamma_fn, gauss_2f1};

/// Activity probabilities below this make the rate integral effectively
/// divergent and are rejected.
pub const MIN_P_ACTIVE: f64 = 1e-6;

/// Half-width of the excluded neighbourhood around each root of
/// `2β² − 11β + 10`, where the general closed form loses all precision.
pub const SINGULAR_WIDTH: f64 = 0.02;

/// Target for the neglected tail `∫_W^∞`.
const TAIL_TARGET: f64 = 1e-10;

/// Tolerance used when checking a per-β closed form against quadrature.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-4;

/// Activity probabilities the per-β closed forms are checked at.
pub const CLOSED_FORM_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateMethod {
    ClosedFormGeneral,
    ClosedFormPerBeta,
    Quadrature,
    MonteCarlo,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::ClosedFormGeneral => "closed_form_general",
            RateMethod::ClosedFormPerBeta => "closed_form_per_beta",
            RateMethod::Quadrature => "quadrature",
            RateMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult<T> {
    /// nats/s/Hz.
    pub value: T,
    pub method: RateMethod,
    /// Standard error; zero for deterministic methods.
    pub stderr: T,
    /// Set when no base station other than the server transmits, in which
    /// case `value` is `+∞`.
    pub no_interference: bool,
}

impl<T: Scalar> RateResult<T> {
    pub(crate) fn deterministic(value: T, method: RateMethod) -> Self {
        Self {
            value,
            method,
            stderr: T::zero(),
            no_interference: false,
        }
    }

    fn no_interference() -> Self {
        Self {
            value: T::infinity(),
            method: RateMethod::Quadrature,
            stderr: T::zero(),
            no_interference: true,
        }
    }
}

/// Roots of `2β² − 11β + 10`, i.e. `(11 ∓ √41)/4`.
pub fn closed_form_singular_roots() -> [f64; 2] {
    let s = 41f64.sqrt();
    [(11.0 - s) / 4.0, (11.0 + s) / 4.0]
}

/// Upper bound on `∫_W^∞ P_cov(w)/(1+w) dw` valid for both coverage kinds:
/// `W^(−δ) / (δ P_a Γ(1−δ))`.
pub fn rate_tail_bound<T: Scalar>(beta: T, p_active: T, w: T) -> Result<T> {
    check_beta(beta)?;
    let delta = T::lit(2.0) / beta;
    let g = gamma_fn(T::one() - delta)?;
    Ok(w.powf(-delta) / (delta * p_active * g))
}

/// `ln W` such that the tail bound equals `target`.
fn log_upper_limit<T: Scalar>(beta: T, p_active: T, target: T) -> Result<T> {
    let delta = T::lit(2.0) / beta;
    let g = gamma_fn(T::one() - delta)?;
    Ok(((-target.ln()) - (delta * p_active * g).ln()) / delta)
}

/// Quadrature of the rate integral; `c` is solved when the approximate
/// coverage is requested.
pub fn rate_quadrature<T: Scalar>(beta: T, p_active: T, kind: PcovKind) -> Result<RateResult<T>> {
    match kind {
        PcovKind::Exact => rate_quadrature_with(beta, p_active, kind, None),
        PcovKind::Approx => {
            let c = solve_c(beta)?;
            rate_quadrature_with(beta, p_active, kind, Some(&c))
        }
    }
}

/// Quadrature of the rate integral on `[0, 1]` directly and on `[1, W]` in
/// `t = ln w`, with `W` set by [`rate_tail_bound`].
pub fn rate_quadrature_with<T: Scalar>(
    beta: T,
    p_active: T,
    kind: PcovKind,
    c: Option<&IntersectionConstant<T>>,
) -> Result<RateResult<T>> {
    check_beta(beta)?;
    check_p_active(p_active)?;
    if p_active < T::lit(MIN_P_ACTIVE) {
        return Err(Error::domain(
            "p_active",
            p_active.as_f64(),
            "p_active >= 1e-6 (the rate integral diverges as p_active -> 0)",
        ));
    }
    let one = T::one();
    let settings = QuadSettings {
        abs_tol: T::clamp_tol(1e-10),
        rel_tol: T::clamp_tol(1e-12),
        max_subdivisions: 4000,
    };
    let integrand = |w: T| -> Result<T> { Ok(one / ((one - p_active * bracket(kind, w, beta, c)?) * (one + w))) };

    let head = integrate_fallible(integrand, &[T::zero(), one], &settings)?;

    let t_max = log_upper_limit(beta, p_active, T::clamp_tol(TAIL_TARGET))?.max(one);
    let mut breaks = vec![T::zero()];
    if let (PcovKind::Approx, Some(c)) = (kind, c) {
        let lc = c.value().ln();
        if lc > T::zero() && lc < t_max {
            breaks.push(lc);
        }
    }
    breaks.push(t_max);
    let tail = integrate_fallible(
        |t: T| {
            let w = t.exp();
            Ok(integrand(w)? * w)
        },
        &breaks,
        &settings,
    )?;
    Ok(RateResult::deterministic(head.value + tail.value, RateMethod::Quadrature))
}

/// General-`β` closed form of the fully loaded rate under the approximate
/// coverage. Refused within [`SINGULAR_WIDTH`] of a root of `2β² − 11β + 10`.
pub fn rate_closed_general<T: Scalar>(beta: T, c: &IntersectionConstant<T>) -> Result<RateResult<T>> {
    check_beta(beta)?;
    if (c.beta - beta).abs() > T::epsilon() * T::lit(8.0) * beta {
        return Err(Error::domain(
            "intersection constant beta",
            c.beta.as_f64(),
            "must equal the network path-loss exponent",
        ));
    }
    for root in closed_form_singular_roots() {
        if (beta.as_f64() - root).abs() < SINGULAR_WIDTH {
            return Err(Error::NearSingularity {
                beta: beta.as_f64(),
                root,
                width: SINGULAR_WIDTH,
            });
        }
    }
    let one = T::one();
    let two = T::lit(2.0);
    let cv = c.value();
    let delta = two / beta;
    let k = (two * beta - two) / (beta - two);
    let alpha = (k * k + two * beta - two).sqrt();
    let d = T::lit(10.0) - T::lit(11.0) * beta + two * beta * beta;
    let four = T::lit(4.0);
    let three = T::lit(3.0);

    let t1 = (four + two * alpha - three * beta - alpha * beta) / (two * alpha * d)
        * ((cv + alpha - k) / (alpha - k)).ln();
    let t2 = (-four + two * alpha + three * beta - alpha * beta) / (two * alpha * d)
        * ((cv - alpha - k) / (-alpha - k)).ln();
    let t3 = (beta - two) / d * (cv + one).ln();
    let lower = (two * beta - two) * (t1 + t2 + t3);

    let g = gamma_fn(one - delta)?;
    let upper = beta * cv.powf(-delta) / (two * g) * gauss_2f1(one, delta, (two + beta) / beta, -one / cv)?;

    let value = lower + upper;
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            what: "general closed-form rate",
            iterations: 0,
            achieved: f64::INFINITY,
        });
    }
    Ok(RateResult::deterministic(value, RateMethod::ClosedFormGeneral))
}

/// Fully loaded rate from the closed form, switching silently to
/// quadrature inside the singular neighbourhood.
pub fn rate_fully_loaded<T: Scalar>(beta: T, c: &IntersectionConstant<T>) -> Result<RateResult<T>> {
    match rate_closed_general(beta, c) {
        Err(Error::NearSingularity { .. }) => rate_quadrature_with(beta, T::one(), PcovKind::Approx, Some(c)),
        other => other,
    }
}

/// Path-loss exponents with a per-β peak-rate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeakRateForm {
    Beta3,
    Beta4,
}

impl PeakRateForm {
    pub fn for_beta<T: Scalar>(beta: T) -> Option<Self> {
        if beta == T::lit(3.0) {
            Some(PeakRateForm::Beta3)
        } else if beta == T::lit(4.0) {
            Some(PeakRateForm::Beta4)
        } else {
            None
        }
    }

    pub fn beta(self) -> f64 {
        match self {
            PeakRateForm::Beta3 => 3.0,
            PeakRateForm::Beta4 => 4.0,
        }
    }
}

fn peak_closed_beta4<T: Scalar>(p: T, c: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let pi = T::PI();
    let b = (T::lit(9.0) + T::lit(6.0) / p).sqrt();
    let first = T::lit(-6.0) / p
        * (((c - three + b) / (-three + b)).ln() / (two * b * (-four + b))
            + ((c - three - b) / (-three - b)).ln() / (two * b * (four + b))
            - (c + one).ln() / ((-four + b) * (four + b)));
    let den = one + p * (-two + p * (one + pi));
    let second = (-two * p.ln() * (one + p) + (p - one) * ((one + c) * pi).ln()) / den;
    let third = (pi.powf(T::lit(1.5)) * p - two * pi.sqrt() * p * c.sqrt().atan()
        - two * (p - one) * (one - p + (pi * c).sqrt() * p).ln())
        / den;
    first + second + third
}

fn peak_closed_beta3<T: Scalar>(p: T, c: T) -> Result<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let five = T::lit(5.0);
    let six = T::lit(6.0);
    let pi = T::PI();
    let s3 = three.sqrt();
    let g = gamma_fn(one / three)?;
    let c13 = c.cbrt();
    let c23 = c13 * c13;
    let b = two * (four + one / p).sqrt();
    let pg = p * g;

    let t1 = -four / p
        * (((c - four + b) / (-four + b)).ln() / (two * b * (-five + b))
            + ((c - four - b) / (-four - b)).ln() / (two * b * (five + b))
            - (c + one).ln() / ((-five + b) * (five + b)));
    let t2 = -(s3 * p * ((-one + two * c13) / s3).atan() * g)
        / (one + p * (-two + p + (p - one) * g + p * g * g));

    let q = one - p;
    let inner = s3 * pg * pg * pi - two * pg * (-one + p * (one + g)) * (one + c13).ln()
        + pg * (-one + p * (one + g)) * (one - c13 + c23).ln()
        + (p - one) * (p - one)
            * (-two * (one + c).ln() - three * pg.ln() + three * (one - p * (-one + c23 * g)).ln());
    let numer = -q.powf(T::lit(1.5)) * p * pi * (-s3 + three * (-(pg) / (p - one)).sqrt()) * g
        - six * (p - one) * pg.powf(T::lit(1.5)) * ((pg / q).sqrt() * c13).atan()
        + q.sqrt() * inner;
    let denom = two * q.sqrt() * (-(p - one).powi(3) + pg.powi(3));
    Ok(t1 + t2 + numer / denom)
}

/// The per-β peak-rate expression, evaluated as stated.
///
/// Out-of-domain logarithms or square roots surface as a `Domain` error.
pub fn peak_rate_closed_form<T: Scalar>(form: PeakRateForm, p_active: T, c: T) -> Result<T> {
    check_p_active(p_active)?;
    let v = match form {
        PeakRateForm::Beta3 => peak_closed_beta3(p_active, c)?,
        PeakRateForm::Beta4 => peak_closed_beta4(p_active, c),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(
            "per-beta peak-rate expression",
            p_active.as_f64(),
            "a logarithm or square-root argument leaves its domain at this p_active",
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormRow<T> {
    pub p_active: T,
    /// `None` when the expression is not finite at this point.
    pub closed_form: Option<T>,
    pub quadrature: T,
}

impl<T: Scalar> ClosedFormRow<T> {
    pub fn abs_diff(&self) -> T {
        match self.closed_form {
            Some(v) => (v - self.quadrature).abs(),
            None => T::infinity(),
        }
    }
}

/// Comparison of a per-β expression against quadrature on [`CLOSED_FORM_GRID`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport<T> {
    pub form: PeakRateForm,
    pub rows: Vec<ClosedFormRow<T>>,
    pub max_abs_diff: T,
    /// True when any row misses by more than [`CLOSED_FORM_TOLERANCE`]; the
    /// expression is then never used.
    pub quarantined: bool,
}

impl<T: Scalar> ClosedFormReport<T> {
    /// Single-line verdict.
    pub fn headline(&self) -> String {
        format!(
            "beta={} form {}: max |closed - quadrature| = {:.3e}",
            self.form.beta(),
            if self.quarantined { "QUARANTINED" } else { "accepted" },
            self.max_abs_diff.as_f64()
        )
    }

    /// Verdict followed by one line per grid point.
    pub fn summary(&self) -> String {
        let mut s = self.headline();
        for r in &self.rows {
            let cf = r
                .closed_form
                .map(|v| format!("{:.9}", v.as_f64()))
                .unwrap_or_else(|| "non-finite".into());
            s.push_str(&format!(
                "\n  p_active={:.1}: closed={} quadrature={:.9}",
                r.p_active.as_f64(),
                cf,
                r.quadrature.as_f64()
            ));
        }
        s
    }
}

pub fn verify_peak_closed_form<T: Scalar>(form: PeakRateForm, c: &IntersectionConstant<T>) -> Result<ClosedFormReport<T>> {
    let beta = T::lit(form.beta());
    let mut rows = Vec::with_capacity(CLOSED_FORM_GRID.len());
    let mut max_abs_diff = T::zero();
    for &pa in &CLOSED_FORM_GRID {
        let p = T::lit(pa);
        let quadrature = rate_quadrature_with(beta, p, PcovKind::Approx, Some(c))?.value;
        let row = ClosedFormRow {
            p_active: p,
            closed_form: peak_rate_closed_form(form, p, c.value()).ok(),
            quadrature,
        };
        max_abs_diff = max_abs_diff.max(row.abs_diff());
        rows.push(row);
    }
    Ok(ClosedFormReport {
        form,
        quarantined: !(max_abs_diff <= T::lit(CLOSED_FORM_TOLERANCE)),
        rows,
        max_abs_diff,
    })
}

/// Peak rate under idle-mode thinning for `β ∈ {3, 4}`.
///
/// The per-β expression is used only if it passes [`verify_peak_closed_form`] and
/// is finite at `p_active`; otherwise the quadrature value is returned.
pub fn rate_peak_partial_load<T: Scalar>(
    beta: T,
    p_active: T,
    c: &IntersectionConstant<T>,
) -> Result<RateResult<T>> {
    let form = PeakRateForm::for_beta(beta)
        .ok_or(Error::domain("beta", beta.as_f64(), "per-beta forms exist for beta in {3, 4}"))?;
    let report = verify_peak_closed_form(form, c)?;
    if !report.quarantined {
        if let Ok(v) = peak_rate_closed_form(form, p_active, c.value()) {
            return Ok(RateResult::deterministic(v, RateMethod::ClosedFormPerBeta));
        }
    }
    rate_quadrature_with(beta, p_active, PcovKind::Approx, Some(c))
}

/// Peak rate for any `β`: per-β form where available, quadrature otherwise.
pub fn rate_peak<T: Scalar>(beta: T, p_active: T, c: &IntersectionConstant<T>) -> Result<RateResult<T>> {
    if PeakRateForm::for_beta(beta).is_some() {
        rate_peak_partial_load(beta, p_active, c)
    } else {
        rate_quadrature_with(beta, p_active, PcovKind::Approx, Some(c))
    }
}

/// Per-user rate `R_peak · P_selection`.
///
/// When essentially no other base station is active (`P_a < 1e-6`, which
/// includes `λ_UE = 0`) the peak rate is unbounded; the result is then
/// flagged with `no_interference` and carries `+∞`.
pub fn rate_actual<T: Scalar>(beta: T, lambda_ue: T, lambda_bs: T) -> Result<RateResult<T>> {
    check_beta(beta)?;
    let load = load_model(lambda_ue, lambda_bs)?;
    if load.p_active < T::lit(MIN_P_ACTIVE) {
        return Ok(RateResult::no_interference());
    }
    let c = solve_c(beta)?;
    let peak = rate_peak(beta, load.p_active, &c)?;
    Ok(RateResult::deterministic(peak.value * load.p_selection, peak.method))
}
