//! Positive-definiteness certification and the cross-module check suites
//! driven by the command line.
//!
//! Every suite is deterministic given its seed. Reports render numbers as
//! decimal strings so the JSON form is byte-stable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cocycle::{make_pair, random_element, CocycleError, GroupElement, PairKind, PairSpec};
use crate::fock::{
    permutation_matrix, roundoff_allowance, tail_bound, unitarity_defect, vacuum_coefficient, AffinePoint, FockError,
};
use crate::oracle::{matrix_coefficient, OracleConfig, OracleError};
use crate::perm::{all_permutations, moved_count, random_permutation, PermError, Regime};
use crate::tensor::{QuadraticNorm, TensorIndex};
use crate::thoma::{combine, phi, psi, ThomaError, ThomaParams};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("Gram matrix is not symmetric at ({0}, {1}): value(g⁻¹) != value(g)")]
    NotSymmetric(usize, usize),
    #[error("element {0} does not match the value source")]
    Shape(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Thoma(#[from] ThomaError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Default PSD tolerance: only eigensolver round-off is absorbed.
pub const PSD_TOL: f64 = 1e-9;

/// A spherical function to certify.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueSource {
    /// `Φ_{α,β}` on pairs `(σ, τ)`.
    Thoma(ThomaParams),
    /// `exp(−½‖Ξ(g)‖²)` for one of the affine constructions.
    Construction(PairSpec),
}

impl ValueSource {
    pub fn value(&self, g: &GroupElement) -> Result<f64, VerifyError> {
        match self {
            ValueSource::Thoma(params) => {
                let [sigma, tau] = g.perms() else {
                    return Err(VerifyError::Shape(g.to_string()));
                };
                Ok(to_f64(&phi(params, sigma, tau)?))
            }
            ValueSource::Construction(pair) => Ok(pair.spherical(g)?),
        }
    }

    fn kind(&self) -> PairKind {
        match self {
            // pairs (σ, τ) of plain permutations, same shape as kind A
            ValueSource::Thoma(_) => PairKind::A,
            ValueSource::Construction(pair) => pair.kind(),
        }
    }
}

impl fmt::Display for ValueSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSource::Thoma(p) => write!(f, "thoma({p})"),
            ValueSource::Construction(pair) => match pair.t() {
                Some(t) => write!(f, "construction({}, s={}, t={})", pair.kind(), pair.s(), t),
                None => write!(f, "construction({}, s={})", pair.kind(), pair.s()),
            },
        }
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    pub elements: Vec<String>,
    #[serde(serialize_with = "as_decimal")]
    pub min_eigenvalue: f64,
    #[serde(serialize_with = "as_decimal")]
    pub tolerance: f64,
    pub pass: bool,
}

fn as_decimal<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Builds `M_ij = Φ(g_i g_j⁻¹)` and certifies that its smallest eigenvalue
/// is at least `-tol`.
pub fn gram_psd(
    source: &ValueSource,
    elements: &[GroupElement],
    tol: f64,
) -> Result<GramReport, VerifyError> {
    let n = elements.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (i, gi) in elements.iter().enumerate() {
        for (j, gj) in elements.iter().enumerate() {
            m[(i, j)] = source.value(&gi.compose(&gj.inverse())?)?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            // entries come from exact values, so equal values are equal bits
            if m[(i, j)] != m[(j, i)] {
                return Err(VerifyError::NotSymmetric(i, j));
            }
        }
    }
    let min_eigenvalue = if n == 0 {
        0.0
    } else {
        SymmetricEigen::new(m).eigenvalues.min()
    };
    Ok(GramReport {
        elements: elements.iter().map(|g| g.to_string()).collect(),
        min_eigenvalue,
        tolerance: tol,
        pass: min_eigenvalue >= -tol,
    })
}

/// One line of a suite report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub abs_err: String,
    pub tol: String,
    pub pass: bool,
}

impl Check {
    /// Exact comparison of two displayable values.
    pub fn exact<T: PartialEq + fmt::Display>(name: String, lhs: &T, rhs: &T) -> Self {
        let pass = lhs == rhs;
        Check {
            name,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            abs_err: if pass { "0".into() } else { "nonzero".into() },
            tol: "0".into(),
            pass,
        }
    }

    /// Exact rational comparison reporting the numeric gap.
    pub fn rational(name: String, lhs: &Rational, rhs: &Rational) -> Self {
        let err = (lhs - rhs).abs();
        Check {
            name,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            abs_err: err.to_string(),
            tol: "0".into(),
            pass: err.is_zero(),
        }
    }

    pub fn approx(name: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let err = (lhs - rhs).abs();
        Check {
            name,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            abs_err: err.to_string(),
            tol: tol.to_string(),
            pass: err <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Oracle,
    Cocycle,
    Kinv,
    PairA,
    Product,
    Psd,
    Fock,
    Sign,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Oracle,
        Suite::Cocycle,
        Suite::Kinv,
        Suite::PairA,
        Suite::Product,
        Suite::Psd,
        Suite::Fock,
        Suite::Sign,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Oracle => "oracle",
            Suite::Cocycle => "cocycle",
            Suite::Kinv => "kinv",
            Suite::PairA => "pairA",
            Suite::Product => "product",
            Suite::Psd => "psd",
            Suite::Fock => "fock",
            Suite::Sign => "sign",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| VerifyError::Config(format!("unknown suite {s:?}")))
    }
}

/// Knobs shared by all suites. `None` / empty fields select the suite's
/// built-in battery.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: Option<usize>,
    pub n: Option<usize>,
    pub params: Option<ThomaParams>,
    pub pairs: Vec<PairKind>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub window: u32,
    pub elements: usize,
    pub tol: Option<f64>,
    pub degree: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            samples: None,
            n: None,
            params: None,
            pairs: Vec::new(),
            s: None,
            t: None,
            window: 6,
            elements: 40,
            tol: None,
            degree: 12,
        }
    }
}

const DEFAULT_S: f64 = 0.7;
const DEFAULT_T: f64 = 0.4;

impl SuiteConfig {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn pair_kinds(&self) -> Vec<PairKind> {
        if self.pairs.is_empty() {
            PairKind::ALL.to_vec()
        } else {
            self.pairs.clone()
        }
    }

    fn pair_spec(&self, kind: PairKind) -> Result<PairSpec, VerifyError> {
        let s = self.s.unwrap_or(DEFAULT_S);
        let t = (kind == PairKind::C).then(|| self.t.unwrap_or(DEFAULT_T));
        Ok(make_pair(kind, s, t)?)
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if self.window == 0 {
            return Err(VerifyError::Config("window must be at least 1".into()));
        }
        if let Some(tol) = self.tol {
            if !(tol >= 0.0) {
                return Err(VerifyError::Config(format!("tolerance must be non-negative, got {tol}")));
            }
        }
        Ok(())
    }
}

fn params(alpha: &str, beta: &str) -> ThomaParams {
    ThomaParams::parse(alpha, beta).expect("built-in parameter set is valid")
}

/// Parameter sets (all of total mass one) checked against the tensor
/// construction.
pub fn oracle_parameter_sets() -> Vec<ThomaParams> {
    vec![
        params("1", ""),
        params("", "1"),
        params("1/2,1/2", ""),
        params("1/2,1/4", "1/4"),
        params("", "1/2,1/2"),
    ]
}

/// Pairs of parameter sets for the product rule.
pub fn product_parameter_pairs() -> Vec<(ThomaParams, ThomaParams)> {
    vec![
        (params("1/2,1/4", "1/4"), params("1/3", "1/3,1/6")),
        (params("", "1/2,1/2"), params("2/3", "1/5")),
    ]
}

/// Thoma parameter sets whose Gram matrices are certified.
pub fn psd_parameter_sets() -> Vec<ThomaParams> {
    vec![params("1/2,1/4", "1/4"), params("1/3", "1/3"), params("", "1/2,1/2")]
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    cfg.validate()?;
    let checks = match suite {
        Suite::Oracle => oracle_suite(cfg)?,
        Suite::Cocycle => cocycle_suite(cfg)?,
        Suite::Kinv => kinv_suite(cfg)?,
        Suite::PairA => pair_a_suite(cfg)?,
        Suite::Product => product_suite(cfg)?,
        Suite::Psd => psd_suite(cfg)?,
        Suite::Fock => fock_suite(cfg)?,
        Suite::Sign => sign_suite(cfg)?,
    };
    Ok(SuiteReport::new(suite, checks))
}

fn oracle_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let sets = match &cfg.params {
        Some(p) => vec![p.clone()],
        None => oracle_parameter_sets(),
    };
    let ns = match cfg.n {
        Some(n) => vec![n],
        None => vec![2, 3, 4],
    };
    let mut checks = Vec::new();
    for p in &sets {
        for &n in &ns {
            if n > 4 {
                return Err(VerifyError::Config(format!("oracle sweep limited to n <= 4, got {n}")));
            }
            let oc = OracleConfig::new(p.clone(), n)
                .map_err(|e| VerifyError::Config(e.to_string()))?;
            let perms = all_permutations(n);
            for sigma in &perms {
                for tau in &perms {
                    let lhs = matrix_coefficient(&oc, sigma, tau)?;
                    let rhs = phi(p, sigma, tau)?;
                    checks.push(Check::rational(
                        format!("oracle {p} n={n} sigma={sigma} tau={tau}"),
                        &lhs,
                        &rhs,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

fn cocycle_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let samples = cfg.samples.unwrap_or(200);
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for kind in cfg.pair_kinds() {
        let pair = cfg.pair_spec(kind)?;
        for _ in 0..samples {
            let g1 = pair.random_element(&mut rng, cfg.window);
            let g2 = pair.random_element(&mut rng, cfg.window);
            let residual = pair.check_cocycle(&g1, &g2)?;
            checks.push(Check {
                name: format!("cocycle {kind} g1={g1} g2={g2}"),
                lhs: residual.to_string(),
                rhs: "0".into(),
                abs_err: residual.len().to_string(),
                tol: "0".into(),
                pass: residual.is_zero(),
            });
        }
    }
    Ok(checks)
}

fn kinv_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let samples = cfg.samples.unwrap_or(100);
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for kind in cfg.pair_kinds() {
        let pair = cfg.pair_spec(kind)?;
        for _ in 0..samples {
            let k = pair.random_subgroup_element(&mut rng, cfg.window);
            let xi = pair.xi(&k)?;
            checks.push(Check {
                name: format!("xi vanishes on K {kind} k={k}"),
                lhs: xi.to_string(),
                rhs: "0".into(),
                abs_err: xi.len().to_string(),
                tol: "0".into(),
                pass: xi.is_zero() && pair.in_subgroup(&k)?,
            });
        }
        for _ in 0..samples {
            let k1 = pair.random_subgroup_element(&mut rng, cfg.window);
            let g = pair.random_element(&mut rng, cfg.window);
            let k2 = pair.random_subgroup_element(&mut rng, cfg.window);
            let kgk = k1.compose(&g)?.compose(&k2)?;
            checks.push(Check::exact(
                format!("bi-K-invariant norm {kind} k1={k1} g={g} k2={k2}"),
                &pair.norm_sq(&kgk)?,
                &pair.norm_sq(&g)?,
            ));
        }
    }
    Ok(checks)
}

fn pair_a_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let samples = cfg.samples.unwrap_or(500);
    let tol = cfg.tol.unwrap_or(1e-12);
    let s_values = match cfg.s {
        Some(s) => vec![s],
        None => vec![0.3, 0.7, 1.2],
    };
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for s in s_values {
        let pair = make_pair(PairKind::A, s, None)?;
        let alpha = (-s * s).exp();
        for _ in 0..samples {
            let g = pair.random_element(&mut rng, cfg.window);
            let [sigma, tau] = g.perms() else { unreachable!("pair A elements have two slots") };
            let m = moved_count(sigma, tau)?;
            let expected = QuadraticNorm {
                css: Rational::from_integer((2 * m).into()),
                ..Default::default()
            };
            checks.push(Check::exact(
                format!("norm = 2s^2*moved s={s} g={g}"),
                &pair.norm_sq(&g)?,
                &expected,
            ));
            checks.push(Check::approx(
                format!("spherical = psi(exp(-s^2)) s={s} g={g}"),
                pair.spherical(&g)?,
                psi(alpha, sigma, tau)?,
                tol,
            ));
        }
    }
    Ok(checks)
}

fn product_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let pairs = match &cfg.params {
        Some(p) => vec![(p.clone(), p.clone())],
        None => product_parameter_pairs(),
    };
    let n = cfg.n.unwrap_or(4);
    let perms = all_permutations(n);
    let mut checks = Vec::new();
    for (p, q) in &pairs {
        let pq = combine(p, q);
        for sigma in &perms {
            for tau in &perms {
                let lhs = phi(&pq, sigma, tau)?;
                let rhs = phi(p, sigma, tau)? * phi(q, sigma, tau)?;
                checks.push(Check::rational(
                    format!("product [{p}]x[{q}] sigma={sigma} tau={tau}"),
                    &lhs,
                    &rhs,
                ));
            }
        }
    }
    Ok(checks)
}

fn sign_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let n = cfg.n.unwrap_or(5);
    let beta_only = params("", "1");
    let perms = all_permutations(n);
    let mut checks = Vec::new();
    for sigma in &perms {
        for tau in &perms {
            let lhs = phi(&beta_only, sigma, tau)?;
            let rhs = Rational::from_integer(sigma.compose(&tau.inverse())?.sign().into());
            checks.push(Check::rational(format!("sign sigma={sigma} tau={tau}"), &lhs, &rhs));
        }
    }
    Ok(checks)
}

/// Seeded random elements for a value source, each slot uniform over the
/// permutations of the window.
pub fn random_elements(
    source: &ValueSource,
    count: usize,
    window: u32,
    seed: u64,
) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_element(source.kind(), &mut rng, window))
        .collect()
}

fn psd_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let tol = cfg.tol.unwrap_or(PSD_TOL);
    let mut sources = Vec::new();
    match (&cfg.params, cfg.pairs.is_empty()) {
        (Some(p), _) => sources.push(ValueSource::Thoma(p.clone())),
        (None, false) => {}
        (None, true) => sources.extend(psd_parameter_sets().into_iter().map(ValueSource::Thoma)),
    }
    if cfg.params.is_none() || !cfg.pairs.is_empty() {
        for kind in cfg.pair_kinds() {
            sources.push(ValueSource::Construction(cfg.pair_spec(kind)?));
        }
    }
    let mut checks = Vec::new();
    for (i, source) in sources.iter().enumerate() {
        let elements = random_elements(source, cfg.elements, cfg.window, cfg.seed.wrapping_add(i as u64));
        let report = gram_psd(source, &elements, tol)?;
        checks.push(Check {
            name: format!("gram psd {source} size={}", elements.len()),
            lhs: report.min_eigenvalue.to_string(),
            rhs: format!(">= -{tol}"),
            abs_err: (-report.min_eigenvalue).max(0.0).to_string(),
            tol: tol.to_string(),
            pass: report.pass,
        });
    }
    Ok(checks)
}

/// The affine map `h ↦ U(g)h + Ξ(g)` restricted to the smallest set of
/// coordinates containing the support of `Ξ(g)` and closed under `U(g)`.
pub fn affine_point_of(
    pair: &PairSpec,
    g: &GroupElement,
) -> Result<(AffinePoint, Vec<TensorIndex>), VerifyError> {
    let xi = pair.xi(g)?;
    let mut coords: BTreeSet<TensorIndex> = BTreeSet::new();
    let mut frontier: Vec<TensorIndex> = xi.entries().map(|(k, _)| k.clone()).collect();
    while let Some(idx) = frontier.pop() {
        if !coords.insert(idx.clone()) {
            continue;
        }
        frontier.push(act_index(g, &idx)?);
    }
    let coords: Vec<TensorIndex> = coords.into_iter().collect();
    let position = |idx: &TensorIndex| coords.binary_search(idx).expect("orbit is closed");
    let images = coords
        .iter()
        .map(|c| Ok(position(&act_index(g, c)?)))
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let (s, t) = (pair.s(), pair.t().unwrap_or(0.0));
    let v = DVector::from_iterator(
        coords.len(),
        coords.iter().map(|c| xi.get(c).map_or(0.0, |coef| coef.eval(s, t))),
    );
    Ok((AffinePoint::new(permutation_matrix(&images), v)?, coords))
}

fn act_index(g: &GroupElement, idx: &TensorIndex) -> Result<TensorIndex, VerifyError> {
    let perms = g.perms();
    let labels = idx
        .0
        .iter()
        .enumerate()
        .map(|(slot, &l)| perms[if perms.len() == 1 { 0 } else { slot }].apply(l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TensorIndex(labels))
}

/// Norms `|v|²` at which the vacuum coefficient is checked.
pub const FOCK_NORMS: [f64; 3] = [0.25, 1.0, 4.0];

fn fock_suite(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let d = cfg.degree;
    let mut checks = Vec::new();

    for x in FOCK_NORMS {
        let v = DVector::from_vec(vec![0.6 * x.sqrt(), 0.8 * x.sqrt()]);
        let got = vacuum_coefficient(&AffinePoint::translation(v), d)?;
        let target = (-0.5 * x).exp();
        let bound = tail_bound(x, d) + roundoff_allowance(target);
        checks.push(Check::approx(
            format!("vacuum |v|^2={x} d={d} within tail bound + round-off"),
            got.re,
            target,
            bound,
        ));
        if x <= 1.0 {
            checks.push(Check::approx(format!("vacuum |v|^2={x} d={d} absolute"), got.re, target, 1e-8));
        }
    }

    let degree = d.min(4);
    for images in [vec![1, 0, 2], vec![2, 0, 1], vec![0, 2, 1]] {
        let defect = unitarity_defect(&permutation_matrix(&images), degree)?;
        checks.push(Check::approx(
            format!("unitarity permutation {images:?} d={degree}"),
            defect,
            0.0,
            0.0,
        ));
    }
    let theta: f64 = 0.3;
    let rot = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    checks.push(Check::approx(
        format!("unitarity rotation {theta} rad d=6"),
        unitarity_defect(&rot, 6)?,
        0.0,
        1e-10,
    ));

    // pair A elements on a small window keep the coordinate count low
    let pair = cfg.pair_spec(PairKind::A)?;
    let samples = cfg.samples.unwrap_or(20);
    let window = cfg.window.min(3);
    let mut rng = cfg.rng();
    for _ in 0..samples {
        let g = GroupElement::new(vec![
            random_permutation(&mut rng, window, Regime::Plain),
            random_permutation(&mut rng, window, Regime::Plain),
        ]);
        let (point, _) = affine_point_of(&pair, &g)?;
        let fock = vacuum_coefficient(&point, d)?;
        checks.push(Check::approx(
            format!("fock vacuum = construction g={g} d={d}"),
            fock.re,
            pair.spherical(&g)?,
            1e-6,
        ));
    }
    Ok(checks)
}
