//! Coverage probability `P(SIR ≥ γ)` under Rayleigh fading on the serving link.
//!
//! Interference limited and with activity probability `P_a`, conditioning on
//! the serving path loss and averaging over it collapses to
//! `1 / (1 − P_a · B(γ))`, where `B` is the MGF exponent bracket. No density,
//! reference loss or transmit power survives.

use crate::error::{Error, Result};
use crate::mgf::{check_beta, check_p_active, exact_bracket, two_term_bracket, IntersectionConstant, NetworkParams};
use crate::quad::{integrate_to_infinity, QuadSettings};
use crate::scalar::Scalar;

/// Which MGF bracket a coverage or rate evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PcovKind {
    Exact,
    Approx,
}

fn check_gamma<T: Scalar>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && !gamma.is_nan() {
        Ok(())
    } else {
        Err(Error::domain("gamma", gamma.as_f64(), "gamma >= 0"))
    }
}

pub(crate) fn bracket<T: Scalar>(
    kind: PcovKind,
    gamma: T,
    beta: T,
    c: Option<&IntersectionConstant<T>>,
) -> Result<T> {
    match kind {
        PcovKind::Exact => exact_bracket(gamma, beta),
        PcovKind::Approx => {
            let c = c.ok_or(Error::domain(
                "intersection constant",
                f64::NAN,
                "required for the approximate bracket",
            ))?;
            two_term_bracket(gamma, beta, c)
        }
    }
}

/// `1 / (1 + (₁F₁(−δ; 1−δ; −γ) − 1) P_a)` or its piecewise approximation.
pub fn pcov<T: Scalar>(
    kind: PcovKind,
    gamma: T,
    beta: T,
    p_active: T,
    c: Option<&IntersectionConstant<T>>,
) -> Result<T> {
    check_gamma(gamma)?;
    check_beta(beta)?;
    check_p_active(p_active)?;
    let b = bracket(kind, gamma, beta, c)?;
    Ok(T::one() / (T::one() - p_active * b))
}

/// Fully loaded, exact: `1 / ₁F₁(−δ; 1−δ; −γ)`.
pub fn pcov_exact_full<T: Scalar>(gamma: T, beta: T) -> Result<T> {
    pcov(PcovKind::Exact, gamma, beta, T::one(), None)
}

/// Fully loaded, piecewise approximation.
pub fn pcov_approx_full<T: Scalar>(gamma: T, beta: T, c: &IntersectionConstant<T>) -> Result<T> {
    pcov(PcovKind::Approx, gamma, beta, T::one(), Some(c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialLoadCoverage<T> {
    pub exact: T,
    pub approx: T,
}

/// Coverage with the interferer density thinned by `p_active`.
pub fn pcov_partial_load<T: Scalar>(
    gamma: T,
    beta: T,
    p_active: T,
    c: &IntersectionConstant<T>,
) -> Result<PartialLoadCoverage<T>> {
    Ok(PartialLoadCoverage {
        exact: pcov(PcovKind::Exact, gamma, beta, p_active, Some(c))?,
        approx: pcov(PcovKind::Approx, gamma, beta, p_active, Some(c))?,
    })
}

/// Exact and approximate coverage over a grid of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve<T> {
    pub beta: T,
    pub gamma_grid: Vec<T>,
    pub pcov_exact: Vec<T>,
    pub pcov_approx: Vec<T>,
    /// `1` for a fully loaded network.
    pub p_active: T,
}

impl<T: Scalar> CoverageCurve<T> {
    pub fn compute(gamma_grid: &[T], beta: T, p_active: T, c: &IntersectionConstant<T>) -> Result<Self> {
        let mut pcov_exact = Vec::with_capacity(gamma_grid.len());
        let mut pcov_approx = Vec::with_capacity(gamma_grid.len());
        for &g in gamma_grid {
            let v = pcov_partial_load(g, beta, p_active, c)?;
            pcov_exact.push(v.exact);
            pcov_approx.push(v.approx);
        }
        Ok(Self {
            beta,
            gamma_grid: gamma_grid.to_vec(),
            pcov_exact,
            pcov_approx,
            p_active,
        })
    }

    pub fn max_abs_gap(&self) -> T {
        self.pcov_exact
            .iter()
            .zip(&self.pcov_approx)
            .fold(T::zero(), |m, (&e, &a)| m.max((e - a).abs()))
    }
}

/// Coverage including the noise factor `exp(−γ σ² L⁽⁰⁾ / P_tx)`.
///
/// With `u = πλ (L⁽⁰⁾/κ)^δ` the serving path-loss density becomes `e^(−u)`
/// and the MGF exponent `u P_a B(γ)`, leaving
/// `∫₀^∞ exp(−u (1 − P_a B)) exp(−γ σ² κ (u/πλ)^(β/2) / P_tx) du`.
pub fn pcov_with_noise<T: Scalar>(
    gamma: T,
    p: &NetworkParams<T>,
    p_active: T,
    kind: PcovKind,
    c: Option<&IntersectionConstant<T>>,
) -> Result<T> {
    p.validate()?;
    check_gamma(gamma)?;
    check_p_active(p_active)?;
    let b = bracket(kind, gamma, p.beta, c)?;
    let a = T::one() - p_active * b;
    if p.sigma_n2 == T::zero() || gamma == T::zero() {
        return Ok(T::one() / a);
    }
    let noise = gamma * p.sigma_n2 / p.p_tx;
    let half_beta = p.beta / T::lit(2.0);
    let pil = T::PI() * p.lambda_bs;
    // t = a·u so the integrand decays as e^(−t)
    let r = integrate_to_infinity(
        |t: T| {
            let u = t / a;
            let l0 = p.kappa * (u / pil).powf(half_beta);
            (-t - noise * l0).exp()
        },
        T::zero(),
        &QuadSettings::with_abs_tol(1e-11),
    )?;
    Ok(r.value / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgf::solve_c;
    use crate::quad::integrate;
    use crate::specfun::lower_inc_gamma;

    #[test]
    fn exact_examples() {
        assert_eq!(pcov_exact_full(0.0f64, 4.0).unwrap(), 1.0);
        let v = pcov_exact_full(1.0f64, 4.0).unwrap();
        assert!((v - 1.0 / 1.861_527_706_796_296).abs() < 1e-14);
        let v10 = pcov_exact_full(10.0f64, 4.0).unwrap();
        let g = lower_inc_gamma(0.5f64, 10.0).unwrap();
        assert!((v10 - 1.0 / ((-10.0f64).exp() + 10f64.sqrt() * g)).abs() < 1e-14);
        assert!((v10 - 0.178_412_35).abs() < 1e-8);
    }

    #[test]
    fn approx_examples() {
        let c = solve_c(4.0f64).unwrap();
        assert_eq!(pcov_approx_full(0.0, 4.0, &c).unwrap(), 1.0);
        let v = pcov_approx_full(1.0, 4.0, &c).unwrap();
        assert!((v - 1.0 / (-1.0 / 6.0 + 2.0)).abs() < 1e-15);
        let v = pcov_approx_full(10.0, 4.0, &c).unwrap();
        assert!((v - 1.0 / (10f64.sqrt() * std::f64::consts::PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn partial_load_examples() {
        let c = solve_c(4.0f64).unwrap();
        for g in [0.0, 0.5, 1.0, 5.0, 100.0] {
            let v = pcov_partial_load(g, 4.0, 1.0, &c).unwrap();
            assert_eq!(v.exact, pcov_exact_full(g, 4.0).unwrap());
            assert_eq!(v.approx, pcov_approx_full(g, 4.0, &c).unwrap());
            let tiny = pcov_partial_load(g, 4.0, 1e-12, &c).unwrap();
            assert!((tiny.exact - 1.0).abs() < 1e-9 && (tiny.approx - 1.0).abs() < 1e-9);
        }
        let p_active = 1.0 - (1.0f64 + 1.0 / 3.5).powf(-3.5);
        let v = pcov_partial_load(1.0, 4.0, p_active, &c).unwrap();
        assert!((v.exact - 1.0 / (1.0 + 0.861_527_706_796_296 * p_active)).abs() < 1e-14);
        assert!((v.exact - 0.664_876_84).abs() < 1e-8);
    }

    #[test]
    fn continuity_at_branch_point() {
        for i in 0..=25 {
            let beta = 2.5 + 0.1 * i as f64;
            let c = solve_c(beta).unwrap();
            let x = c.c_exact;
            let below = pcov_approx_full(x, beta, &c).unwrap();
            let above = 1.0 / (x.powf(2.0 / beta) * crate::specfun::gamma_fn(1.0 - 2.0 / beta).unwrap());
            assert!((below - above).abs() < 1e-9);
        }
    }

    #[test]
    fn overlap_within_two_percent() {
        for k in 0..6 {
            let beta = 2.5 + 0.5 * k as f64;
            let c = solve_c(beta).unwrap();
            let grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(-1.0 + 0.01 * i as f64)).collect();
            let curve = CoverageCurve::compute(&grid, beta, 1.0, &c).unwrap();
            assert!(curve.max_abs_gap() <= 0.02, "beta={beta}: {}", curve.max_abs_gap());
        }
    }

    /// Integral over the serving path loss in physical units, independent of
    /// the `u` substitution used in the library.
    fn pcov_pathloss_integral(gamma: f64, p: &NetworkParams<f64>, p_active: f64) -> f64 {
        let d = 2.0 / p.beta;
        let b = exact_bracket(gamma, p.beta).unwrap();
        let y_med = p.kappa * (std::f64::consts::LN_2 / (std::f64::consts::PI * p.lambda_bs)).powf(p.beta / 2.0);
        // y = y_med · v^(1/δ) removes the y^(δ−1) endpoint singularity
        let f = |v: f64| {
            if v == 0.0 {
                return 0.0;
            }
            let y = y_med * v.powf(1.0 / d);
            let mass = std::f64::consts::PI * p.lambda_bs * (y / p.kappa).powf(d);
            let noise = gamma * p.sigma_n2 * y / p.p_tx;
            // f(y) dy = mass' e^(−mass) dy and d(mass)/dv = mass / v · 1
            let dmass_dv = mass / v;
            dmass_dv * (-mass * (1.0 - p_active * b) - noise).exp()
        };
        let s = QuadSettings::with_abs_tol(1e-12);
        let head = integrate(f, 0.0, 1.0, &s).unwrap().value;
        let tail = integrate_to_infinity(f, 1.0, &s).unwrap().value;
        head + tail
    }

    #[test]
    fn density_does_not_enter() {
        for &beta in &[3.0, 4.0] {
            for &gamma in &[0.3, 1.0, 10.0] {
                let a = NetworkParams::new(1.27e-6, 0.0, beta, 1e3, 1.0, 0.0).unwrap();
                let b = NetworkParams { lambda_bs: 1.27e-5, ..a };
                let va = pcov_pathloss_integral(gamma, &a, 1.0);
                let vb = pcov_pathloss_integral(gamma, &b, 1.0);
                assert!((va - vb).abs() < 1e-9);
                assert!((va - pcov_exact_full(gamma, beta).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noise_matches_pathloss_integral() {
        let p = NetworkParams::new(1e-4, 0.0, 3.5, 10.0, 1.0, 1e-6).unwrap();
        for &gamma in &[0.1, 1.0, 10.0] {
            let v = pcov_with_noise(gamma, &p, 0.7, PcovKind::Exact, None).unwrap();
            let oracle = pcov_pathloss_integral(gamma, &p, 0.7);
            assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
            let clean = pcov(PcovKind::Exact, gamma, 3.5, 0.7, None).unwrap();
            assert!(v < clean);
        }
        let quiet = NetworkParams { sigma_n2: 0.0, ..p };
        assert_eq!(
            pcov_with_noise(1.0, &quiet, 1.0, PcovKind::Exact, None).unwrap(),
            pcov_exact_full(1.0, 3.5).unwrap()
        );
    }

    #[test]
    fn approx_requires_c() {
        assert!(pcov(PcovKind::Approx, 1.0f64, 4.0, 1.0, None).is_err());
    }

    mod props {
        use super::super::*;
        use crate::mgf::solve_c;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn in_unit_interval_and_nonincreasing(
                beta in 2.05f64..=5.0,
                g in 0.0f64..1e3,
                dg in 0.0f64..1e2,
                p_active in 1e-6f64..=1.0,
            ) {
                let c = solve_c(beta).unwrap();
                for kind in [PcovKind::Exact, PcovKind::Approx] {
                    let a = pcov(kind, g, beta, p_active, Some(&c)).unwrap();
                    let b = pcov(kind, g + dg, beta, p_active, Some(&c)).unwrap();
                    prop_assert!(a > 0.0 && a <= 1.0);
                    prop_assert!(b <= a * (1.0 + 1e-12));
                }
            }

            #[test]
            fn f32_tracks_f64(beta in 2.5f64..=5.0, g in 0.0f64..100.0) {
                let v64 = pcov_exact_full(g, beta).unwrap();
                let v32 = pcov_exact_full(g as f32, beta as f32).unwrap();
                prop_assert!((v64 - v32 as f64).abs() < 1e-4);
            }
        }
    }
}
