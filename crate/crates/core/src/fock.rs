//! Degree-truncated model of the boson Fock space of holomorphic functions
//! on `ℂⁿ` with the Gaussian inner product.
//!
//! Monomials are orthogonal with `⟨zᵃ, zᵃ⟩ = Π aᵢ!`. Orthogonal operators act
//! by linear substitution, which preserves degree and so is exact at every
//! truncation. Translations multiply by `exp(−⟨z,v⟩ − ½⟨v,v⟩)`, whose power
//! series is cut at total degree `d`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("matrix is not orthogonal (defect {0:e})")]
    NotOrthogonal(f64),
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Largest allowed `‖AᵀA − I‖` entry for an orthogonal matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Exponent vector of a monomial `z₁^{a₁} ⋯ zₙ^{aₙ}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `Π aᵢ!`, the squared norm of the monomial.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// A polynomial in `n` variables of total degree at most `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPolynomial {
    n: usize,
    d: u32,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl TruncatedPolynomial {
    pub fn zero(n: usize, d: u32) -> Self {
        TruncatedPolynomial { n, d, coeffs: BTreeMap::new() }
    }

    /// The vacuum vector `f(z) = 1`.
    pub fn vacuum(n: usize, d: u32) -> Self {
        TruncatedPolynomial::monomial(MultiIndex::zero(n), Complex64::new(1.0, 0.0), d)
    }

    pub fn monomial(index: MultiIndex, c: Complex64, d: u32) -> Self {
        let mut p = TruncatedPolynomial::zero(index.0.len(), d);
        p.add_term(index, c);
        p
    }

    /// `z_var` (0-based variable index).
    pub fn variable(n: usize, var: usize, d: u32) -> Self {
        let mut idx = MultiIndex::zero(n);
        idx.0[var] = 1;
        TruncatedPolynomial::monomial(idx, Complex64::new(1.0, 0.0), d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, index: &MultiIndex) -> Complex64 {
        self.coeffs.get(index).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Actual total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::degree).max()
    }

    /// Adds `c·zᵃ`, dropping it if its degree exceeds the bound.
    pub fn add_term(&mut self, index: MultiIndex, c: Complex64) {
        if index.degree() > self.d || c == Complex64::default() {
            return;
        }
        let slot = self.coeffs.entry(index.clone()).or_default();
        *slot += c;
        if *slot == Complex64::default() {
            self.coeffs.remove(&index);
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = TruncatedPolynomial::zero(self.n, self.d);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        if self.n != other.n {
            return Err(FockError::Dimension(self.n, other.n));
        }
        let mut out = self.clone();
        out.d = self.d.max(other.d);
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FockError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product truncated at `d`.
    pub fn mul(&self, other: &Self, d: u32) -> Result<Self, FockError> {
        if self.n != other.n {
            return Err(FockError::Dimension(self.n, other.n));
        }
        let mut out = TruncatedPolynomial::zero(self.n, d);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                if a.degree() + b.degree() > d {
                    continue;
                }
                let idx = MultiIndex(a.0.iter().zip(&b.0).map(|(i, j)| i + j).collect());
                out.add_term(idx, x * y);
            }
        }
        Ok(out)
    }

    /// Same polynomial viewed in `n + extra` variables.
    pub fn embed(&self, extra: usize) -> Self {
        let mut out = TruncatedPolynomial::zero(self.n + extra, self.d);
        for (k, v) in &self.coeffs {
            let mut idx = k.0.clone();
            idx.resize(self.n + extra, 0);
            out.add_term(MultiIndex(idx), *v);
        }
        out
    }

    pub fn norm(&self) -> f64 {
        fock_inner(self, self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }
}

/// `⟨f, g⟩ = Σₐ f_a · conj(g_a) · Π aᵢ!`.
pub fn fock_inner(f: &TruncatedPolynomial, g: &TruncatedPolynomial) -> Result<Complex64, FockError> {
    if f.n != g.n {
        return Err(FockError::Dimension(f.n, g.n));
    }
    Ok(f.coeffs
        .iter()
        .filter_map(|(a, x)| g.coeffs.get(a).map(|y| x * y.conj() * a.norm_sq()))
        .sum())
}

/// Largest entry of `|AᵀA − I|`.
pub fn orthogonality_defect(a: &DMatrix<f64>) -> f64 {
    let gram = a.transpose() * a;
    let id = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    (gram - id).abs().max()
}

fn check_orthogonal(a: &DMatrix<f64>) -> Result<(), FockError> {
    if a.nrows() != a.ncols() {
        return Err(FockError::NotSquare(a.nrows(), a.ncols()));
    }
    let defect = orthogonality_defect(a);
    if !(defect <= ORTHOGONALITY_TOL) {
        return Err(FockError::NotOrthogonal(defect));
    }
    Ok(())
}

/// `Exp(A)f(z) = f(zA)`, where `(zA)_j = Σᵢ zᵢ A_{ij}`.
pub fn exp_orthogonal(
    a: &DMatrix<f64>,
    f: &TruncatedPolynomial,
) -> Result<TruncatedPolynomial, FockError> {
    check_orthogonal(a)?;
    let n = f.n;
    if a.nrows() != n {
        return Err(FockError::Dimension(a.nrows(), n));
    }
    let d = f.d;
    let linear_forms: Vec<TruncatedPolynomial> = (0..n)
        .map(|j| {
            let mut form = TruncatedPolynomial::zero(n, d);
            for i in 0..n {
                let mut idx = MultiIndex::zero(n);
                idx.0[i] = 1;
                form.add_term(idx, Complex64::new(a[(i, j)], 0.0));
            }
            form
        })
        .collect();

    let mut out = TruncatedPolynomial::zero(n, d);
    for (idx, c) in &f.coeffs {
        let mut term = TruncatedPolynomial::monomial(MultiIndex::zero(n), *c, d);
        for (j, &power) in idx.0.iter().enumerate() {
            for _ in 0..power {
                term = term.mul(&linear_forms[j], d)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `Exp(v)f(z) = f(z + v)·exp(−⟨z,v⟩ − ½⟨v,v⟩)`, truncated at total degree `d`.
pub fn exp_translation(
    v: &[f64],
    f: &TruncatedPolynomial,
    d: u32,
) -> Result<TruncatedPolynomial, FockError> {
    let n = f.n;
    if v.len() != n {
        return Err(FockError::Dimension(v.len(), n));
    }
    let c = |x: f64| Complex64::new(x, 0.0);

    // f(z + v): expand each variable shift with binomial coefficients
    let mut shifted = f.clone();
    shifted.d = d;
    for (var, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let mut next = TruncatedPolynomial::zero(n, d);
        for (idx, coef) in &shifted.coeffs {
            let a = idx.0[var];
            let mut binom = 1.0;
            for k in 0..=a {
                // (z + v)^a = Σ_k C(a,k) z^k v^(a-k)
                let mut new_idx = idx.clone();
                new_idx.0[var] = k;
                next.add_term(new_idx, coef * c(binom * vi.powi((a - k) as i32)));
                binom = binom * f64::from(a - k) / f64::from(k + 1);
            }
        }
        shifted = next;
    }

    // exp(−⟨z,v⟩) = Π_i Σ_k (−vᵢzᵢ)^k / k!
    let mut multiplier = TruncatedPolynomial::vacuum(n, d);
    for (var, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let mut series = TruncatedPolynomial::zero(n, d);
        let mut term = 1.0;
        for k in 0..=d {
            let mut idx = MultiIndex::zero(n);
            idx.0[var] = k;
            series.add_term(idx, c(term));
            term *= -vi / f64::from(k + 1);
        }
        multiplier = multiplier.mul(&series, d)?;
    }
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    Ok(shifted.mul(&multiplier, d)?.scale(c((-0.5 * norm_sq).exp())))
}

/// A point of `O(n) ⋉ ℝⁿ`, acting by `h ↦ Ah + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    a: DMatrix<f64>,
    v: DVector<f64>,
}

impl AffinePoint {
    pub fn new(a: DMatrix<f64>, v: DVector<f64>) -> Result<Self, FockError> {
        check_orthogonal(&a)?;
        if a.nrows() != v.len() {
            return Err(FockError::Dimension(a.nrows(), v.len()));
        }
        Ok(AffinePoint { a, v })
    }

    pub fn translation(v: DVector<f64>) -> Self {
        let n = v.len();
        AffinePoint { a: DMatrix::identity(n, n), v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.v
    }

    /// `(A₁, v₁) ∘ (A₂, v₂) = (A₁A₂, A₁v₂ + v₁)`.
    pub fn compose(&self, other: &AffinePoint) -> Result<AffinePoint, FockError> {
        if self.dim() != other.dim() {
            return Err(FockError::Dimension(self.dim(), other.dim()));
        }
        Ok(AffinePoint {
            a: &self.a * &other.a,
            v: &self.a * &other.v + &self.v,
        })
    }

    pub fn apply(&self, h: &DVector<f64>) -> DVector<f64> {
        &self.a * h + &self.v
    }
}

/// `⟨Exp(v)Exp(A)·1, 1⟩` at truncation degree `d`.
///
/// The translation is split in half and the inner product is taken between
/// two truncated states, `⟨Exp(v/2)Exp(A)·1, Exp(−v/2)·1⟩`, so the degree
/// cut is actually exercised. The error is at most [`tail_bound`].
pub fn vacuum_coefficient(p: &AffinePoint, d: u32) -> Result<Complex64, FockError> {
    let n = p.dim();
    let half: Vec<f64> = p.v.iter().map(|x| 0.5 * x).collect();
    let neg_half: Vec<f64> = half.iter().map(|x| -x).collect();
    let rotated = exp_orthogonal(&p.a, &TruncatedPolynomial::vacuum(n, d))?;
    let left = exp_translation(&half, &rotated, d)?;
    let right = exp_translation(&neg_half, &TruncatedPolynomial::vacuum(n, d), d)?;
    fock_inner(&left, &right)
}

/// `Σ_{k>d} (x/2)^k / k!` with `x = |v|²`.
pub fn tail_bound(norm_sq: f64, d: u32) -> f64 {
    let y = 0.5 * norm_sq;
    let mut term = 1.0;
    for k in 1..=d {
        term *= y / f64::from(k);
    }
    let mut sum = 0.0;
    let mut k = d + 1;
    loop {
        term *= y / f64::from(k);
        sum += term;
        if term <= sum * f64::EPSILON || term == 0.0 {
            break;
        }
        k += 1;
    }
    sum
}

/// Floating-point slack added to [`tail_bound`] when comparing a computed
/// vacuum coefficient with its target: a few ulps of the larger of the
/// target and one.
pub fn roundoff_allowance(target: f64) -> f64 {
    4.0 * f64::EPSILON * target.abs().max(1.0)
}

/// Every monomial of `n` variables with total degree at most `d`.
pub fn monomial_basis(n: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n {
            out.push(MultiIndex(prefix.clone()));
            return;
        }
        for a in 0..=budget {
            prefix.push(a);
            rec(n, budget - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `max |⟨Exp(A)bᵢ, Exp(A)bⱼ⟩ − δᵢⱼ‖bᵢ‖²|` over the truncated monomial basis.
pub fn unitarity_defect(a: &DMatrix<f64>, d: u32) -> Result<f64, FockError> {
    check_orthogonal(a)?;
    let n = a.nrows();
    let basis = monomial_basis(n, d);
    let images = basis
        .iter()
        .map(|b| exp_orthogonal(a, &TruncatedPolynomial::monomial(b.clone(), Complex64::new(1.0, 0.0), d)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = 0.0_f64;
    for (i, fi) in images.iter().enumerate() {
        for (j, fj) in images.iter().enumerate().skip(i) {
            let expected = if i == j { basis[i].norm_sq() } else { 0.0 };
            let got = fock_inner(fi, fj)?;
            worst = worst.max((got - Complex64::new(expected, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Permutation matrix sending basis vector `i` to `images[i]`.
pub fn permutation_matrix(images: &[usize]) -> DMatrix<f64> {
    let n = images.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, &j) in images.iter().enumerate() {
        m[(j, i)] = 1.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn rotation(theta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    /// `(1/π)∫_ℂ |z|^{2m} e^{-|z|²} dA` by the midpoint rule in polar
    /// coordinates.
    fn radial_moment(m: i32) -> f64 {
        let steps = 200_000;
        let r_max = 12.0;
        let h = r_max / steps as f64;
        // angular integral gives 2π; 2π/π = 2
        (0..steps)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                r.powi(2 * m) * (-r * r).exp() * r
            })
            .sum::<f64>()
            * h
            * 2.0
    }

    #[test]
    fn inner_examples() {
        let v = TruncatedPolynomial::vacuum(2, 4);
        assert_eq!(fock_inner(&v, &v).unwrap(), one());
        let z1 = TruncatedPolynomial::variable(2, 0, 4);
        let z2 = TruncatedPolynomial::variable(2, 1, 4);
        assert_eq!(fock_inner(&z1, &z2).unwrap(), Complex64::default());
        let z1sq = z1.mul(&z1, 4).unwrap();
        assert_eq!(fock_inner(&z1sq, &z1sq).unwrap(), Complex64::new(2.0, 0.0));
        assert!(fock_inner(&v, &TruncatedPolynomial::vacuum(3, 4)).is_err());
    }

    #[test]
    fn inner_matches_quadrature() {
        for m in 0..5 {
            let idx = MultiIndex(vec![m as u32]);
            assert!((idx.norm_sq() - radial_moment(m)).abs() < 1e-6, "m = {m}");
        }
    }

    #[test]
    fn inner_is_conjugate_symmetric_and_positive() {
        let mut f = TruncatedPolynomial::zero(2, 3);
        f.add_term(MultiIndex(vec![1, 0]), Complex64::new(0.5, -1.0));
        f.add_term(MultiIndex(vec![0, 2]), Complex64::new(2.0, 0.25));
        let mut g = TruncatedPolynomial::zero(2, 3);
        g.add_term(MultiIndex(vec![1, 0]), Complex64::new(-1.5, 0.5));
        g.add_term(MultiIndex(vec![0, 2]), Complex64::new(0.0, 1.0));
        assert_eq!(fock_inner(&f, &g).unwrap(), fock_inner(&g, &f).unwrap().conj());
        assert!(fock_inner(&f, &f).unwrap().re > 0.0);
    }

    #[test]
    fn exp_orthogonal_examples() {
        let z1 = TruncatedPolynomial::variable(2, 0, 3);
        assert_eq!(exp_orthogonal(&DMatrix::identity(2, 2), &z1).unwrap(), z1);
        let swap = permutation_matrix(&[1, 0]);
        assert_eq!(exp_orthogonal(&swap, &z1).unwrap(), TruncatedPolynomial::variable(2, 1, 3));
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(exp_orthogonal(&bad, &z1), Err(FockError::NotOrthogonal(_))));
    }

    #[test]
    fn exp_orthogonal_preserves_degree() {
        let mut f = TruncatedPolynomial::zero(2, 5);
        f.add_term(MultiIndex(vec![2, 3]), one());
        let g = exp_orthogonal(&rotation(0.4), &f).unwrap();
        assert!(g.terms().all(|(k, _)| k.degree() == 5));
    }

    #[test]
    fn exp_translation_examples() {
        let mut f = TruncatedPolynomial::zero(2, 4);
        f.add_term(MultiIndex(vec![1, 1]), Complex64::new(0.3, 0.0));
        f.add_term(MultiIndex(vec![0, 0]), one());
        assert_eq!(exp_translation(&[0.0, 0.0], &f, 4).unwrap(), f);

        let v = [0.6, -0.8];
        let g = exp_translation(&v, &TruncatedPolynomial::vacuum(2, 8), 8).unwrap();
        let c0 = g.coeff(&MultiIndex::zero(2));
        assert!((c0.re - (-0.5_f64).exp()).abs() < 1e-15);
        // linear coefficients come from −⟨z,v⟩
        assert!((g.coeff(&MultiIndex(vec![1, 0])).re + 0.6 * (-0.5_f64).exp()).abs() < 1e-15);
        assert!(g.total_degree().unwrap() <= 8);
    }

    #[test]
    fn translation_round_trip_converges() {
        let v = [0.9, 0.5];
        let vac = TruncatedPolynomial::vacuum(2, 0);
        let err = |d| {
            let forward = exp_translation(&v, &vac, d).unwrap();
            let back = exp_translation(&[-v[0], -v[1]], &forward, d).unwrap();
            back.sub(&vac.embed(0)).unwrap().norm()
        };
        let mut prev = f64::INFINITY;
        for d in [2, 6, 10, 14] {
            let e = err(d);
            assert!(e < prev, "d = {d}: {e} !< {prev}");
            prev = e;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn vacuum_coefficient_examples() {
        let a = rotation(1.1);
        let p = AffinePoint::new(a, DVector::zeros(2)).unwrap();
        assert!((vacuum_coefficient(&p, 6).unwrap() - one()).norm() < 1e-15);

        let q = AffinePoint::translation(DVector::from_vec(vec![0.6, 0.8]));
        let got = vacuum_coefficient(&q, 10).unwrap();
        assert!((got.re - (-0.5_f64).exp()).abs() < 1e-8);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn vacuum_error_within_tail_and_decreasing() {
        let v: DVector<f64> = DVector::from_vec(vec![1.2, -0.9, 0.5]);
        let x = v.norm_squared();
        let target = (-0.5 * x).exp();
        let p = AffinePoint::translation(v);
        let mut prev = f64::INFINITY;
        for d in [2, 4, 6, 8, 10] {
            let err = (vacuum_coefficient(&p, d).unwrap().re - target).abs();
            assert!(err <= tail_bound(x, d), "d = {d}");
            assert!(err < prev, "d = {d}");
            prev = err;
        }
    }

    #[test]
    fn vacuum_coefficient_respects_affine_composition() {
        let p1 = AffinePoint::new(rotation(0.7), DVector::from_vec(vec![0.3, -0.4])).unwrap();
        let p2 = AffinePoint::new(permutation_matrix(&[1, 0]), DVector::from_vec(vec![0.5, 0.1])).unwrap();
        let p12 = p1.compose(&p2).unwrap();
        let h = DVector::from_vec(vec![2.0, -1.0]);
        assert!((p12.apply(&h) - p1.apply(&p2.apply(&h))).norm() < 1e-14);
        let target = (-0.5 * p12.vector().norm_squared()).exp();
        assert!((vacuum_coefficient(&p12, 12).unwrap().re - target).abs() < 1e-12);
    }

    #[test]
    fn unitarity_defect_examples() {
        assert_eq!(unitarity_defect(&DMatrix::identity(3, 3), 4).unwrap(), 0.0);
        assert_eq!(unitarity_defect(&permutation_matrix(&[2, 0, 1]), 4).unwrap(), 0.0);
        assert!(unitarity_defect(&rotation(0.3), 6).unwrap() <= 1e-10);
    }

    #[test]
    fn embedding_is_isometric() {
        let mut f = TruncatedPolynomial::zero(2, 3);
        f.add_term(MultiIndex(vec![1, 2]), Complex64::new(1.5, 0.0));
        f.add_term(MultiIndex(vec![0, 1]), Complex64::new(0.0, 2.0));
        let g = f.embed(2);
        assert_eq!(g.n(), 4);
        assert_eq!(fock_inner(&g, &g).unwrap(), fock_inner(&f, &f).unwrap());
    }

    #[test]
    fn tail_bound_values() {
        assert!(tail_bound(0.0, 3) == 0.0);
        // Σ_{k>0} 1/k! = e - 1
        assert!((tail_bound(2.0, 0) - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(tail_bound(4.0, 12) < 1e-4);
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(3, 4).len(), 35);
    }
}
