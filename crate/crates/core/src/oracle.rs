//! Finite-rank brute-force model of the tensor-product construction of
//! spherical representations.
//!
//! `H = H₀ ⊕ H₁` has an even basis `eᵢ` (weights `αᵢ`) and an odd basis `fⱼ`
//! (weights `βⱼ`). The unit vector `ξ = Σ √αᵢ eᵢ⊗eᵢ + Σ √βⱼ fⱼ⊗fⱼ` is placed in
//! each of `n` brackets `(H⊗H)`, giving a vector in `H^{⊗2n}` laid out as
//! `x₁ y₁ x₂ y₂ … xₙ yₙ`. `σ` permutes the `x` slots and `τ` the `y` slots;
//! moving vectors past one another follows the super sign rule, where
//! exchanging two odd vectors costs a factor `-1`.
//!
//! The coefficient `⟨U(σ,τ)ξ^{⊗n}, ξ^{⊗n}⟩` is expanded over all basis
//! assignments. Paired coefficients multiply to a square of a rational, so
//! the result is exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::perm::{all_permutations, Label, Permutation, Regime};
use crate::thoma::{phi, ThomaError, ThomaParams};
use crate::Rational;

/// Largest bracket count accepted by [`matrix_coefficient`].
pub const MAX_BRACKETS: usize = 6;
/// Largest number of basis vectors (`|α| + |β|`) accepted.
pub const MAX_BASIS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("parameters must sum to exactly 1, got {0}")]
    NotNormalized(Rational),
    #[error("bracket count must be in 1..={MAX_BRACKETS}, got {0}")]
    BracketCount(usize),
    #[error("at most {MAX_BASIS} parameters are supported, got {0}")]
    TooManyParameters(usize),
    #[error("permutation {0} is not supported in {{1..{1}}}")]
    SupportExceeds(String, usize),
    #[error("parity list has length {0}, permutation needs {1}")]
    ParityLength(usize, usize),
    #[error("paired weight {0} is not a perfect square")]
    NotASquare(Rational),
    #[error(transparent)]
    Thoma(#[from] ThomaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// One vector of the graded basis of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GradedBasisLabel {
    pub index: usize,
    pub parity: Parity,
}

/// Parameters with total mass exactly one, and a bracket count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    params: ThomaParams,
    n: usize,
}

impl OracleConfig {
    pub fn new(params: ThomaParams, n: usize) -> Result<Self, OracleError> {
        let total = params.total();
        if total != Rational::one() {
            return Err(OracleError::NotNormalized(total));
        }
        if n == 0 || n > MAX_BRACKETS {
            return Err(OracleError::BracketCount(n));
        }
        let basis = params.alpha().len() + params.beta().len();
        if basis > MAX_BASIS {
            return Err(OracleError::TooManyParameters(basis));
        }
        Ok(OracleConfig { params, n })
    }

    pub fn params(&self) -> &ThomaParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn basis(&self) -> Vec<(GradedBasisLabel, Rational)> {
        let even = self.params.alpha().iter().enumerate().map(|(i, w)| {
            (GradedBasisLabel { index: i, parity: Parity::Even }, w.clone())
        });
        let odd = self.params.beta().iter().enumerate().map(|(j, w)| {
            (GradedBasisLabel { index: j, parity: Parity::Odd }, w.clone())
        });
        even.chain(odd).collect()
    }
}

/// Sign of the operator that moves the vector in slot `i` to slot `p(i)`
/// (slots numbered from 1), given the parity of the vector originally in
/// each slot. Every crossing of two odd vectors contributes `-1`.
pub fn koszul_sign(p: &Permutation, parities: &[Parity]) -> Result<i32, OracleError> {
    let n = parities.len();
    if p.max_index() as usize > n {
        return Err(OracleError::ParityLength(n, p.max_index() as usize));
    }
    let dest = |i: usize| p.image(Label::plain(i as u32 + 1)).index;
    let mut crossings = 0usize;
    for i in 0..n {
        if parities[i] != Parity::Odd {
            continue;
        }
        for j in i + 1..n {
            if parities[j] == Parity::Odd && dest(i) > dest(j) {
                crossings += 1;
            }
        }
    }
    Ok(if crossings % 2 == 0 { 1 } else { -1 })
}

fn check_support(p: &Permutation, n: usize) -> Result<(), OracleError> {
    if p.regime() == Some(Regime::Signed) {
        return Err(ThomaError::SignedLabels.into());
    }
    if p.max_index() as usize > n {
        return Err(OracleError::SupportExceeds(p.to_string(), n));
    }
    Ok(())
}

fn exact_sqrt(x: &Rational) -> Result<Rational, OracleError> {
    let not_square = || OracleError::NotASquare(x.clone());
    if x.is_negative() {
        return Err(not_square());
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.sqrt();
        (&r * &r == *v).then_some(r)
    };
    let num = root(x.numer()).ok_or_else(not_square)?;
    let den = root(x.denom()).ok_or_else(not_square)?;
    Ok(Rational::new(num, den))
}

/// `⟨U(σ,τ)ξ^{⊗n}, ξ^{⊗n}⟩`, exactly.
pub fn matrix_coefficient(
    cfg: &OracleConfig,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<Rational, OracleError> {
    let n = cfg.n;
    check_support(sigma, n)?;
    check_support(tau, n)?;

    // slot permutation of H^{⊗2n}: x_m is slot 2m-1, y_m is slot 2m
    let mut slot_map = std::collections::BTreeMap::new();
    for m in 1..=n as u32 {
        slot_map.insert(Label::plain(2 * m - 1), Label::plain(2 * sigma.image(Label::plain(m)).index - 1));
        slot_map.insert(Label::plain(2 * m), Label::plain(2 * tau.image(Label::plain(m)).index));
    }
    let slots = Permutation::from_map(slot_map).expect("product of slot permutations");

    let basis = cfg.basis();
    let mut total = Rational::zero();
    let mut assignment = vec![0usize; n];
    loop {
        // source vector ⊗_m (b_{t_m} ⊗ b_{t_m})
        let source: Vec<usize> = assignment.iter().flat_map(|&a| [a, a]).collect();
        let parities: Vec<Parity> = source.iter().map(|&a| basis[a].0.parity).collect();
        let mut target = vec![0usize; 2 * n];
        for (i, &b) in source.iter().enumerate() {
            let d = slots.image(Label::plain(i as u32 + 1)).index as usize - 1;
            target[d] = b;
        }
        // only diagonal brackets pair with ξ^{⊗n}
        if target.chunks(2).all(|c| c[0] == c[1]) {
            let sign = koszul_sign(&slots, &parities)?;
            let weight = |labels: &mut dyn Iterator<Item = usize>| -> Rational {
                labels.map(|a| basis[a].1.clone()).product()
            };
            let w_source = weight(&mut source.iter().step_by(2).copied());
            let w_target = weight(&mut target.iter().step_by(2).copied());
            let amplitude = exact_sqrt(&(w_source * w_target))?;
            if sign > 0 {
                total += amplitude;
            } else {
                total -= amplitude;
            }
        }

        // next assignment in base |basis|
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(total);
            }
            assignment[pos] += 1;
            if assignment[pos] < basis.len() {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// A pair `(σ, τ)` where the oracle and the closed form disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub sigma: Permutation,
    pub tau: Permutation,
    pub oracle: Rational,
    pub formula: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub params: ThomaParams,
    pub n: usize,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares [`matrix_coefficient`] against the closed-form spherical
/// function on all of `S_n × S_n`.
pub fn compare_with_phi(cfg: &OracleConfig) -> Result<OracleReport, OracleError> {
    let perms = all_permutations(cfg.n);
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for sigma in &perms {
        for tau in &perms {
            let oracle = matrix_coefficient(cfg, sigma, tau)?;
            let formula = phi(&cfg.params, sigma, tau)?;
            checked += 1;
            if oracle != formula {
                mismatches.push(Mismatch {
                    sigma: sigma.clone(),
                    tau: tau.clone(),
                    oracle,
                    formula,
                });
            }
        }
    }
    Ok(OracleReport { params: cfg.params.clone(), n: cfg.n, checked, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_permutation;
    use crate::thoma::parse_rational;

    fn p(s: &str) -> Permutation {
        parse_permutation(s).unwrap()
    }

    fn cfg(a: &str, b: &str, n: usize) -> OracleConfig {
        OracleConfig::new(ThomaParams::parse(a, b).unwrap(), n).unwrap()
    }

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    /// Sign obtained by sorting the slots with adjacent swaps, paying `-1`
    /// whenever two odd vectors are exchanged.
    fn bubble_sign(p: &Permutation, parities: &[Parity]) -> i32 {
        let n = parities.len();
        let mut items: Vec<(u32, Parity)> = (0..n)
            .map(|i| (p.image(Label::plain(i as u32 + 1)).index, parities[i]))
            .collect();
        let mut sign = 1;
        for _ in 0..n {
            for i in 0..n.saturating_sub(1) {
                if items[i].0 > items[i + 1].0 {
                    if items[i].1 == Parity::Odd && items[i + 1].1 == Parity::Odd {
                        sign = -sign;
                    }
                    items.swap(i, i + 1);
                }
            }
        }
        sign
    }

    #[test]
    fn koszul_examples() {
        use Parity::*;
        assert_eq!(koszul_sign(&p("e"), &[Odd, Odd, Even]).unwrap(), 1);
        assert_eq!(koszul_sign(&p("(1 2)"), &[Odd, Odd]).unwrap(), -1);
        assert_eq!(koszul_sign(&p("(1 2)"), &[Odd, Even]).unwrap(), 1);
        assert_eq!(koszul_sign(&p("(1 2)"), &[Even, Even]).unwrap(), 1);
        // a distant swap of two odd vectors crossing an odd one: 3 exchanges
        assert_eq!(koszul_sign(&p("(1 3)"), &[Odd, Odd, Odd]).unwrap(), -1);
        assert_eq!(koszul_sign(&p("(1 3)"), &[Odd, Even, Odd]).unwrap(), -1);
        assert!(koszul_sign(&p("(1 4)"), &[Odd, Odd]).is_err());
    }

    #[test]
    fn koszul_matches_adjacent_swaps() {
        use Parity::*;
        for q in all_permutations(5) {
            for mask in 0u32..32 {
                let parities: Vec<Parity> =
                    (0..5).map(|i| if mask >> i & 1 == 1 { Odd } else { Even }).collect();
                assert_eq!(koszul_sign(&q, &parities).unwrap(), bubble_sign(&q, &parities));
            }
        }
    }

    #[test]
    fn koszul_all_even_and_all_odd() {
        for n in 1..=6 {
            for q in all_permutations(n) {
                assert_eq!(koszul_sign(&q, &vec![Parity::Even; n]).unwrap(), 1);
                assert_eq!(koszul_sign(&q, &vec![Parity::Odd; n]).unwrap(), q.sign());
            }
        }
    }

    #[test]
    fn matrix_coefficient_examples() {
        let c = cfg("1/2,1/4", "1/4", 3);
        for s in all_permutations(3) {
            assert_eq!(matrix_coefficient(&c, &s, &s).unwrap(), r("1"));
        }
        assert_eq!(matrix_coefficient(&cfg("", "1", 2), &p("(1 2)"), &p("e")).unwrap(), r("-1"));
        assert_eq!(
            matrix_coefficient(&cfg("1/2,1/2", "", 2), &p("(1 2)"), &p("e")).unwrap(),
            r("1/2")
        );
    }

    #[test]
    fn config_validation() {
        let params = ThomaParams::parse("1/2", "1/4").unwrap();
        assert_eq!(OracleConfig::new(params, 2), Err(OracleError::NotNormalized(r("3/4"))));
        let ok = ThomaParams::parse("1", "").unwrap();
        assert_eq!(OracleConfig::new(ok.clone(), 0), Err(OracleError::BracketCount(0)));
        assert_eq!(OracleConfig::new(ok, 7), Err(OracleError::BracketCount(7)));
        let many = ThomaParams::parse("1/5,1/5,1/5", "1/5,1/5").unwrap();
        assert_eq!(OracleConfig::new(many, 2), Err(OracleError::TooManyParameters(5)));
        let c = cfg("1", "", 2);
        assert!(matches!(
            matrix_coefficient(&c, &p("(1 3)"), &p("e")),
            Err(OracleError::SupportExceeds(_, 2))
        ));
        assert!(matches!(matrix_coefficient(&c, &p("(1+ 2+)"), &p("e")), Err(OracleError::Thoma(_))));
    }

    #[test]
    fn compare_examples() {
        let r2 = compare_with_phi(&cfg("1", "", 2)).unwrap();
        assert_eq!(r2.checked, 4);
        assert!(r2.pass());
        let r3 = compare_with_phi(&cfg("", "1", 3)).unwrap();
        assert!(r3.pass());
        for s in all_permutations(3) {
            for t in all_permutations(3) {
                let expected = Rational::from_integer(s.compose(&t.inverse()).unwrap().sign().into());
                assert_eq!(matrix_coefficient(&cfg("", "1", 3), &s, &t).unwrap(), expected);
            }
        }
    }

    #[test]
    fn depends_only_on_relative_cycle_type() {
        let c = cfg("1/2", "1/3,1/6", 3);
        let perms = all_permutations(3);
        let mut by_type = std::collections::BTreeMap::new();
        for s in &perms {
            for t in &perms {
                let ty = s.compose(&t.inverse()).unwrap().cycle_type();
                let v = matrix_coefficient(&c, s, t).unwrap();
                let prev = by_type.entry(ty).or_insert_with(|| v.clone());
                assert_eq!(*prev, v);
            }
        }
        assert_eq!(by_type.len(), 3);
    }
}
