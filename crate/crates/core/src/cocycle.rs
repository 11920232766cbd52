//! Affine isometric actions of infinite symmetric groups built from a
//! pattern vector `η` that lies outside the Hilbert space.
//!
//! For each of the four pair kinds the group acts on a tensor power of `ℓ₂`
//! by relabeling, and `Ξ(g) = U(g)η − η` is a 1-cocycle with values in the
//! finitely supported tensors. `η` itself is an infinite sum of terms
//! `term_j`; only finitely many terms are moved by a given `g`, so `Ξ(g)` is
//! computed over those and never needs `η` in full.
//!
//! | kind | group               | labels | `term_j`                          |
//! |------|---------------------|--------|-----------------------------------|
//! | A    | `S∞ × S∞`           | plain  | `s·e_j⊗e_j`                       |
//! | B    | `S(ℕ₊ ⊔ ℕ₋)`        | signed | `s·(e_j⁺⊗e_j⁻ + e_j⁻⊗e_j⁺)`       |
//! | C    | `S(ℕ₊ ⊔ ℕ₋)`        | signed | `s·e_j⁺⊗e_j⁻ + t·e_j⁻⊗e_j⁺`       |
//! | D    | `S∞ × S∞ × S∞`      | plain  | `s·e_j⊗e_j⊗e_j`                   |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::perm::{parse_permutation, random_permutation, Label, PermError, Permutation, Regime, Tag};
use crate::tensor::{Coefficient, QuadraticNorm, SparseTensor, TensorError, TensorIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CocycleError {
    #[error("s must be positive, got {0}")]
    NonPositiveS(f64),
    #[error("pair {0} takes a second parameter t")]
    MissingT(PairKind),
    #[error("t is not a parameter of pair {0}")]
    UnexpectedT(PairKind),
    #[error("pair {kind} expects {expected}, got {got}")]
    Shape { kind: PairKind, expected: String, got: String },
    #[error("unknown pair kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairKind {
    /// `(S∞ × S∞, diagonal)`.
    A,
    /// `(S(ℕ₊ ⊔ ℕ₋), hyperoctahedral)`.
    B,
    /// `(S(ℕ₊ ⊔ ℕ₋), ordered-pair subgroup)`.
    C,
    /// `(S∞ × S∞ × S∞, diagonal)`.
    D,
}

impl PairKind {
    pub const ALL: [PairKind; 4] = [PairKind::A, PairKind::B, PairKind::C, PairKind::D];

    /// Number of permutations in a group element.
    pub fn slots(self) -> usize {
        match self {
            PairKind::A => 2,
            PairKind::B | PairKind::C => 1,
            PairKind::D => 3,
        }
    }

    /// Tensor arity of the ambient space.
    pub fn arity(self) -> usize {
        match self {
            PairKind::D => 3,
            _ => 2,
        }
    }

    pub fn regime(self) -> Regime {
        match self {
            PairKind::A | PairKind::D => Regime::Plain,
            PairKind::B | PairKind::C => Regime::Signed,
        }
    }

    /// The `j`-th summand of `η`, with formal coefficients.
    pub fn pattern_term(self, j: u32) -> SparseTensor {
        let (p, m, e) = (Label::plus(j), Label::minus(j), Label::plain(j));
        let b = |labels: Vec<Label>, c: Coefficient| SparseTensor::basis(TensorIndex(labels), c);
        let sum = |x: SparseTensor, y: SparseTensor| x.add(&y).expect("same arity");
        match self {
            PairKind::A => b(vec![e, e], Coefficient::s()),
            PairKind::B => sum(b(vec![p, m], Coefficient::s()), b(vec![m, p], Coefficient::s())),
            PairKind::C => sum(b(vec![p, m], Coefficient::s()), b(vec![m, p], Coefficient::t())),
            PairKind::D => b(vec![e, e, e], Coefficient::s()),
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PairKind::A => "A",
            PairKind::B => "B",
            PairKind::C => "C",
            PairKind::D => "D",
        };
        write!(f, "{c}")
    }
}

impl FromStr for PairKind {
    type Err = CocycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(PairKind::A),
            "B" | "b" => Ok(PairKind::B),
            "C" | "c" => Ok(PairKind::C),
            "D" | "d" => Ok(PairKind::D),
            other => Err(CocycleError::UnknownKind(other.to_string())),
        }
    }
}

/// A pair kind together with its numeric parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSpec {
    kind: PairKind,
    s: f64,
    t: Option<f64>,
}

pub fn make_pair(kind: PairKind, s: f64, t: Option<f64>) -> Result<PairSpec, CocycleError> {
    // NaN fails this test too
    if !(s > 0.0) {
        return Err(CocycleError::NonPositiveS(s));
    }
    match (kind, t) {
        (PairKind::C, None) => Err(CocycleError::MissingT(kind)),
        (PairKind::C, Some(_)) | (_, None) => Ok(PairSpec { kind, s, t }),
        (_, Some(_)) => Err(CocycleError::UnexpectedT(kind)),
    }
}

impl PairSpec {
    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> Option<f64> {
        self.t
    }

    fn check(&self, g: &GroupElement) -> Result<(), CocycleError> {
        check_shape(self.kind, g)
    }

    /// `Ξ(g) = U(g)η − η`, exactly, as a formal tensor in `s` and `t`.
    pub fn xi(&self, g: &GroupElement) -> Result<SparseTensor, CocycleError> {
        self.check(g)?;
        let mut out = SparseTensor::zero(self.kind.arity());
        for j in g.touched_indices() {
            let term = self.kind.pattern_term(j);
            out = out.add(&term.act(g.perms())?)?.sub(&term)?;
        }
        Ok(out)
    }

    /// Whether `g` lies in the subgroup `K` of this pair.
    pub fn in_subgroup(&self, g: &GroupElement) -> Result<bool, CocycleError> {
        self.check(g)?;
        let perms = g.perms();
        Ok(match self.kind {
            PairKind::A | PairKind::D => perms.iter().all(|p| p == &perms[0]),
            PairKind::B | PairKind::C => {
                let sigma = &perms[0];
                g.touched_indices().into_iter().all(|j| {
                    let a = sigma.image(Label::plus(j));
                    let b = sigma.image(Label::minus(j));
                    let ordered = a.tag == Tag::Plus && b.tag == Tag::Minus && a.index == b.index;
                    let flipped = a.tag == Tag::Minus && b.tag == Tag::Plus && a.index == b.index;
                    ordered || (self.kind == PairKind::B && flipped)
                })
            }
        })
    }

    /// `Ξ(g₁g₂) − U(g₁)Ξ(g₂) − Ξ(g₁)`; zero for a genuine cocycle.
    pub fn check_cocycle(
        &self,
        g1: &GroupElement,
        g2: &GroupElement,
    ) -> Result<SparseTensor, CocycleError> {
        let product = g1.compose(g2)?;
        let lhs = self.xi(&product)?;
        let moved = self.xi(g2)?.act(g1.perms())?;
        Ok(lhs.sub(&moved)?.sub(&self.xi(g1)?)?)
    }

    /// The affine map `h ↦ U(g)h + Ξ(g)`.
    pub fn affine(&self, g: &GroupElement) -> Result<AffineMap, CocycleError> {
        Ok(AffineMap { linear: g.clone(), translation: self.xi(g)? })
    }

    /// `‖Ξ(g)‖²` as a formal quadratic form.
    pub fn norm_sq(&self, g: &GroupElement) -> Result<QuadraticNorm, CocycleError> {
        Ok(self.xi(g)?.norm_sq())
    }

    /// `exp(−½‖Ξ(g)‖²)` at the numeric `s`, `t`.
    pub fn spherical(&self, g: &GroupElement) -> Result<f64, CocycleError> {
        let n = self.norm_sq(g)?;
        Ok((-0.5 * n.eval(self.s, self.t.unwrap_or(0.0))).exp())
    }

    /// Uniform random element with every slot supported in a window of
    /// `window` indices.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, window: u32) -> GroupElement {
        random_element(self.kind, rng, window)
    }

    /// Random element of `K` supported in the same window.
    pub fn random_subgroup_element<R: Rng + ?Sized>(&self, rng: &mut R, window: u32) -> GroupElement {
        random_subgroup_element(self.kind, rng, window)
    }
}

fn check_shape(kind: PairKind, g: &GroupElement) -> Result<(), CocycleError> {
    let shape_err = || CocycleError::Shape {
        kind,
        expected: format!(
            "{} permutation(s) of {} labels",
            kind.slots(),
            match kind.regime() {
                Regime::Plain => "plain",
                Regime::Signed => "signed",
            }
        ),
        got: g.to_string(),
    };
    if g.perms().len() != kind.slots() {
        return Err(shape_err());
    }
    if g.perms().iter().any(|p| p.regime().is_some_and(|r| r != kind.regime())) {
        return Err(shape_err());
    }
    Ok(())
}

pub fn random_element<R: Rng + ?Sized>(kind: PairKind, rng: &mut R, window: u32) -> GroupElement {
    GroupElement::new(
        (0..kind.slots())
            .map(|_| random_permutation(rng, window, kind.regime()))
            .collect(),
    )
}

pub fn random_subgroup_element<R: Rng + ?Sized>(
    kind: PairKind,
    rng: &mut R,
    window: u32,
) -> GroupElement {
    match kind {
        PairKind::A | PairKind::D => {
            let sigma = random_permutation(rng, window, Regime::Plain);
            GroupElement::new(vec![sigma; kind.slots()])
        }
        PairKind::B | PairKind::C => {
            let mut targets: Vec<u32> = (1..=window).collect();
            targets.shuffle(rng);
            let mut map = BTreeMap::new();
            for (j, m) in (1..=window).zip(targets) {
                let flip = kind == PairKind::B && rng.random_bool(0.5);
                let (a, b) = if flip {
                    (Label::minus(m), Label::plus(m))
                } else {
                    (Label::plus(m), Label::minus(m))
                };
                map.insert(Label::plus(j), a);
                map.insert(Label::minus(j), b);
            }
            let sigma = Permutation::from_map(map).expect("pairs are permuted bijectively");
            GroupElement::new(vec![sigma])
        }
    }
}

/// A tuple of permutations acting slot-wise; a 1-tuple acts diagonally on
/// every tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement(Vec<Permutation>);

impl GroupElement {
    pub fn new(perms: Vec<Permutation>) -> Self {
        GroupElement(perms)
    }

    pub fn identity(kind: PairKind) -> Self {
        GroupElement(vec![Permutation::identity(); kind.slots()])
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.0
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement, CocycleError> {
        if self.0.len() != other.0.len() {
            return Err(CocycleError::Shape {
                kind: PairKind::A,
                expected: format!("{} slot(s)", self.0.len()),
                got: other.to_string(),
            });
        }
        let perms = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(p, q)| p.compose(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement(perms))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.iter().map(Permutation::inverse).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Permutation::is_identity)
    }

    /// Indices `j` whose pattern term may be moved: every index carried by
    /// a moved label of any slot.
    pub fn touched_indices(&self) -> BTreeSet<u32> {
        self.0
            .iter()
            .flat_map(|p| p.support().map(|l| l.index).collect::<Vec<_>>())
            .collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// Parses permutations joined by `|`, e.g. `"(1 2)|e"`.
pub fn parse_group_element(text: &str) -> Result<GroupElement, CocycleError> {
    let perms = text
        .split('|')
        .map(parse_permutation)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupElement(perms))
}

impl FromStr for GroupElement {
    type Err = CocycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_group_element(s)
    }
}

/// An affine isometry `h ↦ U·h + v` with `U` a relabeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: GroupElement,
    pub translation: SparseTensor,
}

impl AffineMap {
    pub fn apply(&self, h: &SparseTensor) -> Result<SparseTensor, CocycleError> {
        Ok(h.act(self.linear.perms())?.add(&self.translation)?)
    }

    /// `(U₁, v₁) ∘ (U₂, v₂) = (U₁U₂, U₁v₂ + v₁)`.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap, CocycleError> {
        Ok(AffineMap {
            linear: self.linear.compose(&other.linear)?,
            translation: self.apply(&other.translation)?,
        })
    }
}
