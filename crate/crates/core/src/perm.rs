//! Finite-support permutations of countable label sets.
//!
//! Two label regimes exist: plain labels `1, 2, 3, ...` and signed labels
//! `1+, 2+, ..., 1-, 2-, ...` (two disjoint copies of the naturals). A single
//! permutation never mixes the two. Permutations are stored without fixed
//! points, so structural equality is group equality.
//!
//! Composition follows `(p * q)(x) = p(q(x))`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("malformed permutation literal {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("label {0} appears more than once")]
    RepeatedLabel(Label),
    #[error("plain and signed labels cannot be mixed")]
    MixedRegime,
}

/// Which copy of the naturals a label lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Plain,
    Plus,
    Minus,
}

/// Plain labels and signed labels form two separate universes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Plain,
    Signed,
}

impl Tag {
    pub fn regime(self) -> Regime {
        match self {
            Tag::Plain => Regime::Plain,
            Tag::Plus | Tag::Minus => Regime::Signed,
        }
    }
}

/// A point of the countable set being permuted. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub index: u32,
    pub tag: Tag,
}

impl Label {
    pub fn plain(index: u32) -> Self {
        Label { index, tag: Tag::Plain }
    }

    pub fn plus(index: u32) -> Self {
        Label { index, tag: Tag::Plus }
    }

    pub fn minus(index: u32) -> Self {
        Label { index, tag: Tag::Minus }
    }

    pub fn regime(&self) -> Regime {
        self.tag.regime()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            Tag::Plain => write!(f, "{}", self.index),
            Tag::Plus => write!(f, "{}+", self.index),
            Tag::Minus => write!(f, "{}-", self.index),
        }
    }
}

impl FromStr for Label {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| PermError::Malformed {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let (digits, tag) = if let Some(d) = s.strip_suffix('+') {
            (d, Tag::Plus)
        } else if let Some(d) = s.strip_suffix('-') {
            (d, Tag::Minus)
        } else {
            (s, Tag::Plain)
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("label must be a positive integer, optionally suffixed by + or -"));
        }
        let index: u32 = digits.parse().map_err(|_| bad("label index out of range"))?;
        if index == 0 {
            return Err(bad("labels are 1-based"));
        }
        Ok(Label { index, tag })
    }
}

/// A bijection of a label set that moves only finitely many points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Permutation {
    // moved points only
    map: BTreeMap<Label, Label>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    /// Builds a permutation from an explicit mapping. Fixed points are dropped.
    pub fn from_map(map: BTreeMap<Label, Label>) -> Result<Self, PermError> {
        let keys: BTreeSet<Label> = map.keys().copied().collect();
        let values: BTreeSet<Label> = map.values().copied().collect();
        if keys != values {
            return Err(PermError::Malformed {
                text: format!("{map:?}"),
                reason: "mapping is not a bijection of its support".into(),
            });
        }
        check_single_regime(keys.iter())?;
        let map = map.into_iter().filter(|(k, v)| k != v).collect();
        Ok(Permutation { map })
    }

    /// Permutation of plain labels `1..=images.len()` given in one-line
    /// notation: `i + 1 -> images[i]`.
    pub fn from_images(images: &[u32]) -> Result<Self, PermError> {
        let map = images
            .iter()
            .enumerate()
            .map(|(i, &img)| (Label::plain(i as u32 + 1), Label::plain(img)))
            .collect();
        Permutation::from_map(map)
    }

    /// Product of the given cycles (applied right to left).
    pub fn from_cycles(cycles: &[Vec<Label>]) -> Result<Self, PermError> {
        let mut acc = Permutation::identity();
        for cycle in cycles {
            let mut seen = BTreeSet::new();
            for l in cycle {
                if !seen.insert(*l) {
                    return Err(PermError::RepeatedLabel(*l));
                }
            }
            let mut map = BTreeMap::new();
            for (i, &l) in cycle.iter().enumerate() {
                map.insert(l, cycle[(i + 1) % cycle.len()]);
            }
            acc = acc.compose(&Permutation::from_map(map)?)?;
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// `None` for the identity, which is compatible with either regime.
    pub fn regime(&self) -> Option<Regime> {
        self.map.keys().next().map(Label::regime)
    }

    /// Moved points, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = Label> + '_ {
        self.map.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, x: Label) -> Result<Label, PermError> {
        if let Some(r) = self.regime() {
            if r != x.regime() {
                return Err(PermError::MixedRegime);
            }
        }
        Ok(self.image(x))
    }

    /// Image of `x` without the regime check; off-regime labels are fixed.
    pub fn image(&self, x: Label) -> Label {
        self.map.get(&x).copied().unwrap_or(x)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        compatible(self, other)?;
        let mut map = BTreeMap::new();
        for x in self.map.keys().chain(other.map.keys()) {
            let y = self.image(other.image(*x));
            if y != *x {
                map.insert(*x, y);
            }
        }
        Ok(Permutation { map })
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(k, v)| (*v, *k)).collect(),
        }
    }

    /// Nontrivial cycles, each starting at its smallest label, ordered by
    /// that label.
    pub fn cycles(&self) -> Vec<Vec<Label>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start);
            let mut x = self.image(start);
            while x != start {
                seen.insert(x);
                cycle.push(x);
                x = self.image(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Lengths of the nontrivial cycles, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Largest label index moved, or 0 for the identity.
    pub fn max_index(&self) -> u32 {
        self.map.keys().map(|l| l.index).max().unwrap_or(0)
    }
}

fn check_single_regime<'a>(labels: impl Iterator<Item = &'a Label>) -> Result<(), PermError> {
    let mut regime = None;
    for l in labels {
        match regime {
            None => regime = Some(l.regime()),
            Some(r) if r != l.regime() => return Err(PermError::MixedRegime),
            _ => {}
        }
    }
    Ok(())
}

fn compatible(p: &Permutation, q: &Permutation) -> Result<(), PermError> {
    match (p.regime(), q.regime()) {
        (Some(a), Some(b)) if a != b => Err(PermError::MixedRegime),
        _ => Ok(()),
    }
}

/// Number of points `x` with `sigma(x) != tau(x)`.
pub fn moved_count(sigma: &Permutation, tau: &Permutation) -> Result<usize, PermError> {
    compatible(sigma, tau)?;
    let candidates: BTreeSet<Label> = sigma.support().chain(tau.support()).collect();
    Ok(candidates
        .into_iter()
        .filter(|&x| sigma.image(x) != tau.image(x))
        .count())
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, l) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Parses `e` or a sequence of disjoint parenthesized cycles such as
/// `(1 2 3)(4 5)` or `(1+ 2+)(1- 3-)`.
pub fn parse_permutation(text: &str) -> Result<Permutation, PermError> {
    let bad = |reason: &str| PermError::Malformed {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    if trimmed == "e" {
        return Ok(Permutation::identity());
    }
    if trimmed.is_empty() {
        return Err(bad("empty literal (use \"e\" for the identity)"));
    }

    let mut cycles = Vec::new();
    let mut rest = trimmed;
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| bad("expected '('"))?;
        let close = inner.find(')').ok_or_else(|| bad("unclosed cycle"))?;
        let body = &inner[..close];
        if body.contains('(') {
            return Err(bad("nested '('"));
        }
        let labels = body
            .split_whitespace()
            .map(Label::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        if labels.is_empty() {
            return Err(bad("empty cycle"));
        }
        cycles.push(labels);
        rest = inner[close + 1..].trim_start();
    }

    let mut seen = BTreeSet::new();
    for l in cycles.iter().flatten() {
        if !seen.insert(*l) {
            return Err(PermError::RepeatedLabel(*l));
        }
    }
    check_single_regime(seen.iter())?;
    Permutation::from_cycles(&cycles)
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_permutation(s)
    }
}

/// Every permutation of `{1..n}` (plain labels), in lexicographic order of
/// their one-line notation.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<u32> = (1..=n as u32).collect();
    loop {
        out.push(Permutation::from_images(&images).expect("one-line notation is a bijection"));
        // next lexicographic permutation
        let Some(i) = (1..images.len()).rev().find(|&i| images[i - 1] < images[i]) else {
            break;
        };
        let j = (i..images.len()).rev().find(|&j| images[j] > images[i - 1]).unwrap();
        images.swap(i - 1, j);
        images[i..].reverse();
    }
    out
}

/// Uniformly random permutation of `{1..window}` (plain) or of
/// `{1+..window+, 1-..window-}` (signed).
pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, window: u32, regime: Regime) -> Permutation {
    let labels: Vec<Label> = match regime {
        Regime::Plain => (1..=window).map(Label::plain).collect(),
        Regime::Signed => (1..=window)
            .map(Label::plus)
            .chain((1..=window).map(Label::minus))
            .collect(),
    };
    let mut images = labels.clone();
    images.shuffle(rng);
    Permutation::from_map(labels.into_iter().zip(images).collect())
        .expect("shuffle of a label set is a bijection")
}
