//! Idle-mode load model: probability that a base station has no user in its
//! cell, and the share of airtime a user receives.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shape of the gamma approximation to the normalised Voronoi cell area.
pub const CELL_AREA_SHAPE: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadModel<T> {
    /// `λ_UE / λ`.
    pub ratio: T,
    pub p_inactive: T,
    pub p_active: T,
    /// Fraction of time a user holds the resource block of its serving cell.
    pub p_selection: T,
}

/// Load model for the density pair `(λ_UE, λ)`.
pub fn load_model<T: Scalar>(lambda_ue: T, lambda_bs: T) -> Result<LoadModel<T>> {
    if !(lambda_bs > T::zero() && lambda_bs.is_finite()) {
        return Err(Error::domain("lambda_bs", lambda_bs.as_f64(), "lambda_bs > 0"));
    }
    if !(lambda_ue >= T::zero() && lambda_ue.is_finite()) {
        return Err(Error::domain("lambda_ue", lambda_ue.as_f64(), "lambda_ue >= 0"));
    }
    load_model_from_ratio(lambda_ue / lambda_bs)
}

/// Load model for a density ratio `λ_UE / λ ≥ 0`.
pub fn load_model_from_ratio<T: Scalar>(ratio: T) -> Result<LoadModel<T>> {
    if !(ratio >= T::zero() && ratio.is_finite()) {
        return Err(Error::domain("density ratio", ratio.as_f64(), "0 <= ratio < inf"));
    }
    let k = T::lit(CELL_AREA_SHAPE);
    // ln P_inactive = −k ln(1 + r/k)
    let log_inactive = -k * (ratio / k).ln_1p();
    let p_inactive = log_inactive.exp();
    let p_active = -log_inactive.exp_m1();
    let p_selection = if ratio == T::zero() {
        T::one()
    } else {
        (p_active / ratio).min(T::one())
    };
    Ok(LoadModel {
        ratio,
        p_inactive,
        p_active,
        p_selection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let m = load_model_from_ratio(0.0f64).unwrap();
        assert_eq!((m.p_inactive, m.p_active, m.p_selection), (1.0, 0.0, 1.0));

        let m = load_model_from_ratio(3.5f64).unwrap();
        assert!((m.p_inactive - 2f64.powf(-3.5)).abs() < 1e-15);

        let m = load_model(1.0f64, 1.0).unwrap();
        let oracle = 1.0 - (1.0f64 + 1.0 / 3.5).powf(-3.5);
        assert!((m.p_selection - oracle).abs() < 1e-15);
        assert!((m.p_active - 0.585_051_349).abs() < 1e-9);
    }

    #[test]
    fn small_ratio_limit() {
        let m = load_model_from_ratio(1e-12f64).unwrap();
        assert!((m.p_selection - 1.0).abs() < 1e-11);
        assert!(m.p_active > 0.0);
    }

    #[test]
    fn rejects_bad_densities() {
        assert!(load_model(1.0f64, 0.0).is_err());
        assert!(load_model(-1.0f64, 1.0).is_err());
        assert!(load_model_from_ratio(f64::NAN).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn probabilities_consistent(ratio in 0.0f64..1e4) {
                let m = load_model_from_ratio(ratio).unwrap();
                prop_assert!((m.p_active + m.p_inactive - 1.0).abs() < 1e-14);
                prop_assert!(m.p_selection > 0.0 && m.p_selection <= 1.0);
                if ratio > 0.0 {
                    prop_assert!(m.p_selection <= (1.0f64).min(1.0 / ratio) * (1.0 + 1e-14));
                }
            }

            #[test]
            fn p_active_increases_with_ratio(r in 0.0f64..100.0, dr in 1e-6f64..10.0) {
                let a = load_model_from_ratio(r).unwrap();
                let b = load_model_from_ratio(r + dr).unwrap();
                prop_assert!(b.p_active >= a.p_active);
                prop_assert!(b.p_selection <= a.p_selection);
            }
        }
    }
}
