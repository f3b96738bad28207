//! Moment generating function of the aggregate other-cell interference seen
//! by a user at the origin, conditioned on the path loss `L⁽⁰⁾` to its
//! serving base station.
//!
//! Every mode evaluates `exp(πλ (L⁽⁰⁾/κ)^δ · B(x))` with `δ = 2/β` and
//! `x = s·P_tx / L⁽⁰⁾`; the modes differ only in the bracket `B`:
//!
//! | mode           | bracket `B(x)`                                            |
//! |----------------|-----------------------------------------------------------|
//! | exact          | `1 − ₁F₁(−δ; 1−δ; −x)`                                    |
//! | two-term       | `−2x/(β−2) + x²/(2β−2)` for `x ≤ c`, else `1 − x^δ Γ(1−δ)` |
//! | Taylor (n)     | `Σₖ₌₁ⁿ 2(−x)ᵏ / (k!(kβ−2))` for `x ≤ c`, upper branch above |
//! | Rayleigh marks | `E_g[1 − ₁F₁(−δ; 1−δ; −x g)]`, `g ~ Exp(1)`, by quadrature |
//!
//! Idle-mode thinning scales the bracket by the activity probability.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_fallible, QuadSettings};
use crate::roots::brent;
use crate::scalar::Scalar;
use crate::specfun::{gamma_fn, kummer_1f1_neg};

/// Upper end of the supported path-loss exponent range `(2, 5]`.
pub const BETA_MAX: f64 = 5.0;

pub(crate) fn check_beta<T: Scalar>(beta: T) -> Result<()> {
    if beta > T::lit(2.0) && beta <= T::lit(BETA_MAX) {
        Ok(())
    } else {
        Err(Error::domain(
            "beta",
            beta.as_f64(),
            "2 < beta <= 5 (open at 2: Γ(1−2/β) and 1/(β−2) diverge)",
        ))
    }
}

pub(crate) fn check_p_active<T: Scalar>(p_active: T) -> Result<()> {
    if p_active > T::zero() && p_active <= T::one() {
        Ok(())
    } else {
        Err(Error::domain("p_active", p_active.as_f64(), "0 < p_active <= 1"))
    }
}

/// Physical scenario: densities, path loss and powers (all linear units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams<T> {
    /// Base-station density (BS/m²).
    pub lambda_bs: T,
    /// User density (UE/m²).
    pub lambda_ue: T,
    /// Path-loss exponent.
    pub beta: T,
    /// Path loss at 1 m.
    pub kappa: T,
    /// Transmit power (W).
    pub p_tx: T,
    /// Noise power (W).
    pub sigma_n2: T,
}

impl<T: Scalar> NetworkParams<T> {
    pub fn new(lambda_bs: T, lambda_ue: T, beta: T, kappa: T, p_tx: T, sigma_n2: T) -> Result<Self> {
        let p = Self {
            lambda_bs,
            lambda_ue,
            beta,
            kappa,
            p_tx,
            sigma_n2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit power and reference loss, no noise, no overlay users.
    pub fn interference_limited(lambda_bs: T, beta: T) -> Result<Self> {
        Self::new(lambda_bs, T::zero(), beta, T::one(), T::one(), T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_bs > T::zero() && self.lambda_bs.is_finite()) {
            return Err(Error::domain("lambda_bs", self.lambda_bs.as_f64(), "lambda_bs > 0"));
        }
        if !(self.lambda_ue >= T::zero() && self.lambda_ue.is_finite()) {
            return Err(Error::domain("lambda_ue", self.lambda_ue.as_f64(), "lambda_ue >= 0"));
        }
        check_beta(self.beta)?;
        if !(self.kappa > T::zero()) {
            return Err(Error::domain("kappa", self.kappa.as_f64(), "kappa > 0"));
        }
        if !(self.p_tx > T::zero()) {
            return Err(Error::domain("p_tx", self.p_tx.as_f64(), "p_tx > 0"));
        }
        if !(self.sigma_n2 >= T::zero()) {
            return Err(Error::domain("sigma_n2", self.sigma_n2.as_f64(), "sigma_n2 >= 0"));
        }
        Ok(())
    }

    /// `δ = 2/β`.
    pub fn delta(&self) -> T {
        T::lit(2.0) / self.beta
    }

    /// `πλ (L⁽⁰⁾/κ)^δ`, the factor multiplying every exponent bracket.
    pub fn exponent_prefactor(&self, l0: T) -> T {
        T::PI() * self.lambda_bs * (l0 / self.kappa).powf(self.delta())
    }

    /// `x = s·P_tx / L⁽⁰⁾`.
    pub fn load_argument(&self, s: T, l0: T) -> T {
        s * self.p_tx / l0
    }

    /// Serving path loss `L⁽⁰⁾` at which the exponent prefactor equals `target`.
    pub fn l0_for_prefactor(&self, target: T) -> T {
        self.kappa * (target / (T::PI() * self.lambda_bs)).powf(self.beta / T::lit(2.0))
    }
}

/// Branch point of the piecewise approximation for one `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionConstant<T> {
    pub beta: T,
    /// Root of the two-branch intersection equation.
    pub c_exact: T,
    /// Logarithmic fit `0.06662 ln(β − 1.528) + 1.227`.
    pub c_fit: T,
}

impl<T: Scalar> IntersectionConstant<T> {
    /// The value used by downstream evaluation (the solved root).
    pub fn value(&self) -> T {
        self.c_exact
    }

    fn check_beta_matches(&self, beta: T) -> Result<()> {
        if (self.beta - beta).abs() <= T::epsilon() * T::lit(8.0) * beta {
            Ok(())
        } else {
            Err(Error::domain(
                "intersection constant beta",
                self.beta.as_f64(),
                "must equal the network path-loss exponent",
            ))
        }
    }
}

/// `0.06662 ln(β − 1.528) + 1.227`.
pub fn c_fit<T: Scalar>(beta: T) -> T {
    T::lit(0.06662) * (beta - T::lit(1.528)).ln() + T::lit(1.227)
}

/// Residual of the intersection equation:
/// `−2c/(β−2) + c²/(2β−2) + c^δ Γ(1−δ) − 1`.
pub fn intersection_residual<T: Scalar>(c: T, beta: T, gamma_1md: T) -> T {
    let two = T::lit(2.0);
    let delta = two / beta;
    -two * c / (beta - two) + c * c / (two * beta - two) + c.powf(delta) * gamma_1md - T::one()
}

/// Solves for the branch point `c` on `[1, 1.5]` with Brent's method.
pub fn solve_c<T: Scalar>(beta: T) -> Result<IntersectionConstant<T>> {
    check_beta(beta)?;
    let g = gamma_fn(T::one() - T::lit(2.0) / beta)?;
    let c_exact = brent(
        "intersection constant",
        |c| intersection_residual(c, beta, g),
        T::one(),
        T::lit(1.5),
        T::clamp_tol(1e-13),
        200,
    )?;
    Ok(IntersectionConstant {
        beta,
        c_exact,
        c_fit: c_fit(beta),
    })
}

/// Which bracket a thinned MGF is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThinnedBase {
    Exact,
    ApproxTwoTerm,
}

/// Interferer power marks `|h|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingMark {
    /// Unit-mean exponential (Rayleigh amplitude).
    Rayleigh,
    /// Deterministic `|h|² = 1`; collapses to the unmarked MGF.
    Unit,
}

/// Whether the truncated Taylor series may be used past the branch point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Series below `c`, asymptotic branch above.
    #[default]
    Piecewise,
    /// Series everywhere; refused above `c`.
    ForceLower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MgfMode<T> {
    Exact,
    ApproxTwoTerm,
    ApproxTaylor(usize),
    RayleighMarked,
    Thinned { p_active: T, base: ThinnedBase },
}

/// Evaluation point `(s, L⁽⁰⁾)` plus mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfQuery<T> {
    pub s: T,
    pub l0: T,
    pub mode: MgfMode<T>,
}

impl<T: Scalar> MgfQuery<T> {
    pub fn new(s: T, l0: T, mode: MgfMode<T>) -> Result<Self> {
        let q = Self { s, l0, mode };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.s >= T::zero()) {
            return Err(Error::domain("s", self.s.as_f64(), "s >= 0"));
        }
        if !(self.l0 > T::zero()) {
            return Err(Error::domain("l0", self.l0.as_f64(), "l0 > 0"));
        }
        match self.mode {
            MgfMode::Thinned { p_active, .. } => check_p_active(p_active),
            MgfMode::ApproxTaylor(n) if n < 2 => {
                Err(Error::domain("n_terms", n as f64, "n_terms >= 2"))
            }
            _ => Ok(()),
        }
    }

    /// Dispatches on the query mode. `c` is only consulted by the
    /// approximate modes.
    pub fn evaluate(&self, p: &NetworkParams<T>, c: &IntersectionConstant<T>) -> Result<T> {
        self.validate()?;
        match self.mode {
            MgfMode::Exact => mgf_exact(self.s, self.l0, p),
            MgfMode::ApproxTwoTerm => mgf_approx(self.s, self.l0, p, c),
            MgfMode::ApproxTaylor(n) => {
                mgf_taylor_full(self.s, self.l0, p, n, c, Branching::Piecewise)
            }
            MgfMode::RayleighMarked => mgf_rayleigh_marked(self.s, self.l0, p),
            MgfMode::Thinned { p_active, base } => {
                mgf_thinned(self.s, self.l0, p, p_active, base, c)
            }
        }
    }
}

/// `1 − ₁F₁(−δ; 1−δ; −x)`.
pub fn exact_bracket<T: Scalar>(x: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    Ok(T::one() - kummer_1f1_neg(T::lit(2.0) / beta, x)?)
}

/// `Σₖ₌₁ⁿ 2(−x)ᵏ / (k!(kβ−2))`, the series form of the exact bracket.
pub fn taylor_bracket<T: Scalar>(x: T, beta: T, n_terms: usize) -> T {
    let two = T::lit(2.0);
    let mut power = T::one(); // (−x)ᵏ / k!
    let mut sum = T::zero();
    for k in 1..=n_terms {
        let fk = T::lit(k as f64);
        power = power * (-x) / fk;
        sum = sum + two * power / (fk * beta - two);
    }
    sum
}

/// `1 − x^δ Γ(1−δ)`, the large-argument branch.
pub fn upper_bracket<T: Scalar>(x: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    let delta = T::lit(2.0) / beta;
    Ok(T::one() - x.powf(delta) * gamma_fn(T::one() - delta)?)
}

/// Two-term piecewise bracket with branch point `c`.
pub fn two_term_bracket<T: Scalar>(x: T, beta: T, c: &IntersectionConstant<T>) -> Result<T> {
    check_beta(beta)?;
    c.check_beta_matches(beta)?;
    if x <= c.value() {
        Ok(taylor_bracket(x, beta, 2))
    } else {
        upper_bracket(x, beta)
    }
}

fn check_point<T: Scalar>(s: T, l0: T, p: &NetworkParams<T>) -> Result<()> {
    p.validate()?;
    if !(s >= T::zero()) {
        return Err(Error::domain("s", s.as_f64(), "s >= 0"));
    }
    if !(l0 > T::zero()) {
        return Err(Error::domain("l0", l0.as_f64(), "l0 > 0"));
    }
    Ok(())
}

/// Exact MGF through the confluent hypergeometric closed form.
pub fn mgf_exact<T: Scalar>(s: T, l0: T, p: &NetworkParams<T>) -> Result<T> {
    check_point(s, l0, p)?;
    let x = p.load_argument(s, l0);
    Ok((p.exponent_prefactor(l0) * exact_bracket(x, p.beta)?).exp())
}

/// Piecewise two-term approximation.
pub fn mgf_approx<T: Scalar>(s: T, l0: T, p: &NetworkParams<T>, c: &IntersectionConstant<T>) -> Result<T> {
    check_point(s, l0, p)?;
    let x = p.load_argument(s, l0);
    Ok((p.exponent_prefactor(l0) * two_term_bracket(x, p.beta, c)?).exp())
}

/// Piecewise approximation keeping `n_terms` Taylor terms on the lower
/// branch. With `n_terms = 2` this is [`mgf_approx`].
pub fn mgf_taylor_full<T: Scalar>(
    s: T,
    l0: T,
    p: &NetworkParams<T>,
    n_terms: usize,
    c: &IntersectionConstant<T>,
    branching: Branching,
) -> Result<T> {
    check_point(s, l0, p)?;
    c.check_beta_matches(p.beta)?;
    if n_terms < 2 {
        return Err(Error::domain("n_terms", n_terms as f64, "n_terms >= 2"));
    }
    let x = p.load_argument(s, l0);
    let bracket = if x <= c.value() {
        taylor_bracket(x, p.beta, n_terms)
    } else {
        match branching {
            Branching::Piecewise => upper_bracket(x, p.beta)?,
            Branching::ForceLower => {
                return Err(Error::NonConvergence {
                    what: "truncated Taylor bracket beyond the branch point",
                    iterations: n_terms,
                    achieved: (x - c.value()).as_f64(),
                })
            }
        }
    };
    Ok((p.exponent_prefactor(l0) * bracket).exp())
}

/// Fading tail beyond which `P(|h|² > g) < 1e-10`.
const MARK_TAIL: f64 = 23.025_850_929_940_457; // −ln(1e-10)

/// `(1 − e^(−t)) / t`, continuous at 0.
fn one_minus_exp_over<T: Scalar>(t: T) -> T {
    if t < T::lit(1e-8) {
        T::one() - t / T::lit(2.0)
    } else {
        -(-t).exp_m1() / t
    }
}

/// `δ ∫₀¹ (e^(−y u) − 1) u^(−δ−1) du = 1 − ₁F₁(−δ; 1−δ; −y)` by quadrature.
///
/// The substitution `u = v^k`, `k = 1/(1−δ)` removes the endpoint singularity:
/// the integrand becomes `−k y (1 − e^(−t))/t` with `t = y v^k`.
pub fn marked_inner_bracket<T: Scalar>(y: T, delta: T) -> Result<T> {
    if y == T::zero() {
        return Ok(T::zero());
    }
    let k = T::one() / (T::one() - delta);
    let settings = QuadSettings {
        abs_tol: T::clamp_tol(1e-13),
        rel_tol: T::clamp_tol(1e-12),
        max_subdivisions: 500,
    };
    let r = integrate(
        |v: T| one_minus_exp_over(y * v.powf(k)),
        T::zero(),
        T::one(),
        &settings,
    )?;
    Ok(-delta * k * y * r.value)
}

/// MGF with independent power marks on every interferer.
///
/// Rayleigh marks average the inner bracket over `g ~ Exp(1)` on
/// `[0, 23.03]` (tail mass below `1e-10`).
pub fn mgf_marked<T: Scalar>(s: T, l0: T, p: &NetworkParams<T>, mark: FadingMark) -> Result<T> {
    check_point(s, l0, p)?;
    let x = p.load_argument(s, l0);
    if x == T::zero() {
        return Ok(T::one());
    }
    let delta = p.delta();
    let bracket = match mark {
        FadingMark::Unit => marked_inner_bracket(x, delta)?,
        FadingMark::Rayleigh => {
            let settings = QuadSettings {
                abs_tol: T::clamp_tol(1e-11),
                rel_tol: T::clamp_tol(1e-10),
                max_subdivisions: 500,
            };
            integrate_fallible(
                |g: T| Ok((-g).exp() * marked_inner_bracket(x * g, delta)?),
                &[T::zero(), T::lit(MARK_TAIL)],
                &settings,
            )?
            .value
        }
    };
    Ok((p.exponent_prefactor(l0) * bracket).exp())
}

pub fn mgf_rayleigh_marked<T: Scalar>(s: T, l0: T, p: &NetworkParams<T>) -> Result<T> {
    mgf_marked(s, l0, p, FadingMark::Rayleigh)
}

/// MGF with the interferer density thinned to `λ·p_active`.
pub fn mgf_thinned<T: Scalar>(
    s: T,
    l0: T,
    p: &NetworkParams<T>,
    p_active: T,
    base: ThinnedBase,
    c: &IntersectionConstant<T>,
) -> Result<T> {
    check_point(s, l0, p)?;
    check_p_active(p_active)?;
    let x = p.load_argument(s, l0);
    let bracket = match base {
        ThinnedBase::Exact => exact_bracket(x, p.beta)?,
        ThinnedBase::ApproxTwoTerm => two_term_bracket(x, p.beta, c)?,
    };
    Ok((p.exponent_prefactor(l0) * bracket * p_active).exp())
}
