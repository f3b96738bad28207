//! Distribution of the path loss `L⁽⁰⁾ = κ r^β` to the nearest base station.

use crate::error::{Error, Result};
use crate::mgf::NetworkParams;
use crate::scalar::Scalar;

/// `f(y) = (2πλ/β) κ^(−δ) y^(δ−1) exp(−πλ (y/κ)^δ)`, `δ = 2/β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossPdf<T> {
    pub lambda_bs: T,
    pub beta: T,
    pub kappa: T,
}

impl<T: Scalar> PathLossPdf<T> {
    pub fn from_params(p: &NetworkParams<T>) -> Self {
        Self {
            lambda_bs: p.lambda_bs,
            beta: p.beta,
            kappa: p.kappa,
        }
    }

    fn delta(&self) -> T {
        T::lit(2.0) / self.beta
    }

    /// `πλ (y/κ)^δ`, the mean number of base stations with lower path loss.
    pub fn mass_below(&self, y: T) -> T {
        T::PI() * self.lambda_bs * (y / self.kappa).powf(self.delta())
    }

    pub fn pdf(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        let d = self.delta();
        T::lit(2.0) * T::PI() * self.lambda_bs / self.beta
            * self.kappa.powf(-d)
            * y.powf(d - T::one())
            * (-self.mass_below(y)).exp()
    }

    pub fn cdf(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        -(-self.mass_below(y)).exp_m1()
    }

    /// Inverse of [`Self::cdf`] for `q ∈ [0, 1)`.
    pub fn quantile(&self, q: T) -> T {
        let u = -(-q).ln_1p();
        self.kappa * (u / (T::PI() * self.lambda_bs)).powf(self.beta / T::lit(2.0))
    }
}

pub fn pathloss_pdf<T: Scalar>(y: T, p: &NetworkParams<T>) -> Result<T> {
    p.validate()?;
    if !(y > T::zero()) {
        return Err(Error::domain("path loss", y.as_f64(), "y > 0"));
    }
    Ok(PathLossPdf::from_params(p).pdf(y))
}

pub fn pathloss_cdf<T: Scalar>(y: T, p: &NetworkParams<T>) -> Result<T> {
    p.validate()?;
    if !(y >= T::zero()) {
        return Err(Error::domain("path loss", y.as_f64(), "y >= 0"));
    }
    Ok(PathLossPdf::from_params(p).cdf(y))
}
