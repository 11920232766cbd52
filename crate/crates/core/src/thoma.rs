//! Thoma parameters and the spherical functions of `(S∞ × S∞, diag S∞)`.
//!
//! The spherical function attached to `(α, β)` depends only on the cycle type
//! of `στ⁻¹`: each `k`-cycle contributes the factor
//! `p_k = Σ αᵢᵏ + (-1)^(k-1) Σ βⱼᵏ`. All arithmetic here is exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::perm::{moved_count, PermError, Permutation, Regime};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThomaError {
    #[error("parameter {0} is not positive")]
    NonPositive(Rational),
    #[error("parameters sum to {0}, which exceeds 1")]
    SumExceedsOne(Rational),
    #[error("power sums are defined for k >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("the Thoma formula takes permutations of plain labels")]
    SignedLabels,
    #[error("alpha must lie in (0, 1], got {0}")]
    AlphaOutOfRange(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Two weakly decreasing finite sequences of positive rationals with total
/// mass at most one. Equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThomaParams {
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
}

impl ThomaParams {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self, ThomaError> {
        make_params(alpha, beta)
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    /// `Σα + Σβ`.
    pub fn total(&self) -> Rational {
        self.alpha.iter().chain(&self.beta).sum()
    }

    /// Parses two comma-separated lists such as `"1/2,1/4"` and `"1/4"`.
    /// An empty string is the empty sequence.
    pub fn parse(alpha: &str, beta: &str) -> Result<Self, ThomaError> {
        make_params(parse_rational_list(alpha)?, parse_rational_list(beta)?)
    }

    pub fn power_sum(&self, k: usize) -> Result<Rational, ThomaError> {
        power_sum(self, k)
    }
}

impl fmt::Display for ThomaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "alpha={{{}}} beta={{{}}}", join(&self.alpha), join(&self.beta))
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, ThomaError> {
    let bad = || ThomaError::BadRational(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ThomaError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_rational).collect()
}

/// Validates and sorts (descending) a parameter pair.
pub fn make_params(
    mut alpha: Vec<Rational>,
    mut beta: Vec<Rational>,
) -> Result<ThomaParams, ThomaError> {
    if let Some(bad) = alpha.iter().chain(&beta).find(|x| !x.is_positive()) {
        return Err(ThomaError::NonPositive(bad.clone()));
    }
    alpha.sort_by(|a, b| b.cmp(a));
    beta.sort_by(|a, b| b.cmp(a));
    let params = ThomaParams { alpha, beta };
    let total = params.total();
    if total > Rational::one() {
        return Err(ThomaError::SumExceedsOne(total));
    }
    Ok(params)
}

/// `Σ αᵢᵏ + (-1)^(k-1) Σ βⱼᵏ`.
pub fn power_sum(params: &ThomaParams, k: usize) -> Result<Rational, ThomaError> {
    if k < 2 {
        return Err(ThomaError::DegreeTooSmall(k));
    }
    let exp = k as i32;
    let a: Rational = params.alpha.iter().map(|x| x.pow(exp)).sum();
    let b: Rational = params.beta.iter().map(|x| x.pow(exp)).sum();
    Ok(if k % 2 == 0 { a - b } else { a + b })
}

fn require_plain(p: &Permutation) -> Result<(), ThomaError> {
    match p.regime() {
        Some(Regime::Signed) => Err(ThomaError::SignedLabels),
        _ => Ok(()),
    }
}

/// The spherical function `Φ_{α,β}(σ, τ)`: the product of `p_k` over the
/// nontrivial cycles of `στ⁻¹`.
pub fn phi(
    params: &ThomaParams,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<Rational, ThomaError> {
    require_plain(sigma)?;
    require_plain(tau)?;
    let relative = sigma.compose(&tau.inverse())?;
    let mut value = Rational::one();
    for k in relative.cycle_type() {
        value *= power_sum(params, k)?;
        if value.is_zero() {
            break;
        }
    }
    Ok(value)
}

/// `α^m` where `m` counts the points with `σ(i) != τ(i)`.
pub fn psi(alpha: f64, sigma: &Permutation, tau: &Permutation) -> Result<f64, ThomaError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ThomaError::AlphaOutOfRange(alpha.to_string()));
    }
    let m = moved_count(sigma, tau)?;
    Ok(alpha.powi(m as i32))
}

/// Exact variant of [`psi`] for rational `α`.
pub fn psi_exact(
    alpha: &Rational,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<Rational, ThomaError> {
    if !alpha.is_positive() || *alpha > Rational::one() {
        return Err(ThomaError::AlphaOutOfRange(alpha.to_string()));
    }
    let m = moved_count(sigma, tau)?;
    Ok(alpha.pow(m as i32))
}

/// Parameters of the product of two spherical functions:
/// `α̃ = {αᵢα'ₖ} ∪ {βⱼβ'ₗ}`, `β̃ = {αᵢβ'ₗ} ∪ {βⱼα'ₖ}`.
pub fn combine(p: &ThomaParams, q: &ThomaParams) -> ThomaParams {
    let products = |xs: &[Rational], ys: &[Rational]| -> Vec<Rational> {
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| x * y))
            .collect()
    };
    let mut alpha = products(&p.alpha, &q.alpha);
    alpha.extend(products(&p.beta, &q.beta));
    let mut beta = products(&p.alpha, &q.beta);
    beta.extend(products(&p.beta, &q.alpha));
    make_params(alpha, beta).expect("products of valid parameters stay valid")
}
