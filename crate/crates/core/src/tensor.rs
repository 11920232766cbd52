//! Finitely supported vectors in `ℓ₂^{⊗r}` with coefficients that are formal
//! linear forms `a·s + b·t` over the rationals.
//!
//! Keeping `s` and `t` symbolic lets cocycle identities be checked as exact
//! structural equalities; numeric values enter only through
//! [`QuadraticNorm::eval`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::perm::{Label, PermError, Permutation};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("a {tuple}-tuple of permutations cannot act on arity-{arity} tensors")]
    ActionShape { tuple: usize, arity: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// The formal value `s_coeff·s + t_coeff·t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    pub s: Rational,
    pub t: Rational,
}

impl Coefficient {
    pub fn new(s: Rational, t: Rational) -> Self {
        Coefficient { s, t }
    }

    /// `1·s`.
    pub fn s() -> Self {
        Coefficient::new(Rational::from_integer(1.into()), Rational::zero())
    }

    /// `1·t`.
    pub fn t() -> Self {
        Coefficient::new(Rational::zero(), Rational::from_integer(1.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero() && self.t.is_zero()
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.s.to_f64().unwrap_or(f64::NAN) * s + self.t.to_f64().unwrap_or(f64::NAN) * t
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Coefficient) -> Coefficient {
        Coefficient::new(self.s + rhs.s, self.t + rhs.t)
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        self.s += &rhs.s;
        self.t += &rhs.t;
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient::new(-self.s, -self.t)
    }
}

impl Mul<&Coefficient> for &Coefficient {
    type Output = QuadraticNorm;
    fn mul(self, rhs: &Coefficient) -> QuadraticNorm {
        QuadraticNorm {
            css: &self.s * &rhs.s,
            cst: &self.s * &rhs.t + &self.t * &rhs.s,
            ctt: &self.t * &rhs.t,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_form(f, &[(&self.s, "s"), (&self.t, "t")])
    }
}

/// The quadratic form `css·s² + cst·st + ctt·t²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadraticNorm {
    pub css: Rational,
    pub cst: Rational,
    pub ctt: Rational,
}

impl QuadraticNorm {
    pub fn is_zero(&self) -> bool {
        self.css.is_zero() && self.cst.is_zero() && self.ctt.is_zero()
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let c = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        c(&self.css) * s * s + c(&self.cst) * s * t + c(&self.ctt) * t * t
    }
}

impl Add for QuadraticNorm {
    type Output = QuadraticNorm;
    fn add(self, rhs: QuadraticNorm) -> QuadraticNorm {
        QuadraticNorm {
            css: self.css + rhs.css,
            cst: self.cst + rhs.cst,
            ctt: self.ctt + rhs.ctt,
        }
    }
}

impl fmt::Display for QuadraticNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_form(f, &[(&self.css, "s^2"), (&self.cst, "st"), (&self.ctt, "t^2")])
    }
}

fn write_form(f: &mut fmt::Formatter<'_>, terms: &[(&Rational, &str)]) -> fmt::Result {
    let mut first = true;
    for (c, sym) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = **c < Rational::zero();
        let abs = if neg { -(*c).clone() } else { (*c).clone() };
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
            (true, false) => {}
        }
        if abs == Rational::from_integer(1.into()) {
            write!(f, "{sym}")?;
        } else {
            write!(f, "{abs}{sym}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// A basis tensor `e_{l₁} ⊗ ... ⊗ e_{l_r}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorIndex(pub Vec<Label>);

impl TensorIndex {
    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for TensorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| format!("e{l}")).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Finite linear combination of basis tensors of a fixed arity, with no
/// stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseTensor {
    arity: usize,
    entries: BTreeMap<TensorIndex, Coefficient>,
}

impl SparseTensor {
    pub fn zero(arity: usize) -> Self {
        SparseTensor { arity, entries: BTreeMap::new() }
    }

    pub fn basis(idx: TensorIndex, c: Coefficient) -> Self {
        let mut t = SparseTensor::zero(idx.arity());
        if !c.is_zero() {
            t.entries.insert(idx, c);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TensorIndex, &Coefficient)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: &TensorIndex) -> Option<&Coefficient> {
        self.entries.get(idx)
    }

    fn check_arity(&self, other: &SparseTensor) -> Result<(), TensorError> {
        if self.arity != other.arity {
            return Err(TensorError::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    fn accumulate(&mut self, idx: TensorIndex, c: &Coefficient) {
        let slot = self.entries.entry(idx.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&idx);
        }
    }

    pub fn add(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.entries {
            out.accumulate(idx.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparseTensor {
        SparseTensor {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), -v.clone()))
                .collect(),
        }
    }

    /// Relabels every basis tensor. A single permutation acts on all factors
    /// at once; a tuple of `arity` permutations acts factor by factor.
    pub fn act(&self, g: &[Permutation]) -> Result<SparseTensor, TensorError> {
        if g.len() != 1 && g.len() != self.arity {
            return Err(TensorError::ActionShape { tuple: g.len(), arity: self.arity });
        }
        let mut out = SparseTensor::zero(self.arity);
        for (idx, c) in &self.entries {
            let labels = idx
                .0
                .iter()
                .enumerate()
                .map(|(slot, &l)| g[if g.len() == 1 { 0 } else { slot }].apply(l))
                .collect::<Result<Vec<_>, _>>()?;
            // relabeling is injective, so no two entries collide
            out.entries.insert(TensorIndex(labels), c.clone());
        }
        Ok(out)
    }

    /// `⟨x, y⟩` in the orthonormal basis, as a formal quadratic form.
    pub fn inner(&self, other: &SparseTensor) -> Result<QuadraticNorm, TensorError> {
        self.check_arity(other)?;
        let mut acc = QuadraticNorm::default();
        for (idx, c) in &self.entries {
            if let Some(d) = other.entries.get(idx) {
                acc = acc + c * d;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> QuadraticNorm {
        self.inner(self).expect("same tensor, same arity")
    }
}

impl fmt::Display for SparseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(idx, c)| format!("({c}) {idx}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
