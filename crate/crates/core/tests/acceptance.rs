//! Acceptance battery. Each test prints one `criterion N: PASS|FAIL` line;
//! run with `cargo test -p thoma --test acceptance -- --nocapture`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thoma::cocycle::{make_pair, GroupElement, PairKind};
use thoma::fock::{
    permutation_matrix, roundoff_allowance, tail_bound, unitarity_defect, vacuum_coefficient,
    AffinePoint,
};
use thoma::oracle::{matrix_coefficient, OracleConfig};
use thoma::perm::{all_permutations, random_permutation, Label, Permutation, Regime};
use thoma::tensor::QuadraticNorm;
use thoma::thoma::{combine, phi, psi, ThomaParams};
use thoma::verify::{affine_point_of, gram_psd, random_elements, ValueSource};
use thoma::Rational;

const SEED: u64 = 42;
const WINDOW: u32 = 6;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn params(alpha: &str, beta: &str) -> ThomaParams {
    ThomaParams::parse(alpha, beta).unwrap()
}

fn spec(kind: PairKind) -> thoma::cocycle::PairSpec {
    let t = (kind == PairKind::C).then_some(0.4);
    make_pair(kind, 0.7, t).unwrap()
}

// Reference evaluations computed from images on {1..n}, independent of the
// cycle machinery in the library.

fn images(p: &Permutation, n: u32) -> Vec<u32> {
    (1..=n).map(|i| p.image(Label::plain(i)).index).collect()
}

fn sign_by_inversions(p: &Permutation, n: u32) -> i32 {
    let img = images(p, n);
    let mut inversions = 0;
    for i in 0..img.len() {
        for j in i + 1..img.len() {
            if img[i] > img[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn disagreements(sigma: &Permutation, tau: &Permutation, n: u32) -> usize {
    images(sigma, n)
        .iter()
        .zip(images(tau, n))
        .filter(|(a, b)| **a != *b)
        .count()
}

#[test]
fn criterion_1_oracle_matches_thoma_formula() {
    let sets = [
        params("1", ""),
        params("", "1"),
        params("1/2,1/2", ""),
        params("1/2,1/4", "1/4"),
        params("", "1/2,1/2"),
    ];
    let start = Instant::now();
    let (mut checked, mut bad) = (0, 0);
    for p in &sets {
        for n in 2..=4 {
            let cfg = OracleConfig::new(p.clone(), n).unwrap();
            let perms = all_permutations(n);
            for sigma in &perms {
                for tau in &perms {
                    checked += 1;
                    if matrix_coefficient(&cfg, sigma, tau).unwrap() != phi(p, sigma, tau).unwrap() {
                        bad += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad == 0 && checked == 5 * (4 + 36 + 576);
    report(1, pass, format!("{checked} exact comparisons, {bad} mismatches, {secs:.2}s"));
    assert!(pass);
    assert!(secs < 30.0, "runtime {secs}s");
}

#[test]
fn criterion_2_cocycle_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let (mut checked, mut bad) = (0, 0);
    for kind in PairKind::ALL {
        let pair = spec(kind);
        for _ in 0..200 {
            let g1 = pair.random_element(&mut rng, WINDOW);
            let g2 = pair.random_element(&mut rng, WINDOW);
            let lhs = pair.xi(&g1.compose(&g2).unwrap()).unwrap();
            let rhs = pair
                .xi(&g2)
                .unwrap()
                .act(g1.perms())
                .unwrap()
                .add(&pair.xi(&g1).unwrap())
                .unwrap();
            let by_hand = lhs.sub(&rhs).unwrap().is_zero();
            let by_lib = pair.check_cocycle(&g1, &g2).unwrap().is_zero();
            checked += 1;
            if !(by_hand && by_lib) {
                bad += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad == 0;
    report(2, pass, format!("{checked} (g1, g2) samples, {bad} nonzero residuals, {secs:.2}s"));
    assert!(pass);
    assert!(secs < 5.0, "runtime {secs}s");
}

#[test]
fn criterion_3_k_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut vanish_bad, mut norm_bad) = (0, 0);
    for kind in PairKind::ALL {
        let pair = spec(kind);
        for _ in 0..100 {
            let k = pair.random_subgroup_element(&mut rng, WINDOW);
            if !pair.in_subgroup(&k).unwrap() || !pair.xi(&k).unwrap().is_zero() {
                vanish_bad += 1;
            }
        }
        for _ in 0..100 {
            let k1 = pair.random_subgroup_element(&mut rng, WINDOW);
            let g = pair.random_element(&mut rng, WINDOW);
            let k2 = pair.random_subgroup_element(&mut rng, WINDOW);
            let kgk = k1.compose(&g).unwrap().compose(&k2).unwrap();
            if pair.norm_sq(&kgk).unwrap() != pair.norm_sq(&g).unwrap() {
                norm_bad += 1;
            }
        }
    }
    let pass = vanish_bad == 0 && norm_bad == 0;
    report(
        3,
        pass,
        format!("4 kinds x (100 K elements, 100 k1 g k2): {vanish_bad} nonzero xi, {norm_bad} norm changes"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_pair_a_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut norm_bad, mut worst) = (0, 0.0f64);
    for s in [0.3, 0.7, 1.2] {
        let pair = make_pair(PairKind::A, s, None).unwrap();
        let alpha = (-s * s).exp();
        for _ in 0..500 {
            let sigma = random_permutation(&mut rng, WINDOW, Regime::Plain);
            let tau = random_permutation(&mut rng, WINDOW, Regime::Plain);
            let m = disagreements(&sigma, &tau, WINDOW);
            let g = GroupElement::new(vec![sigma.clone(), tau.clone()]);
            let expected = QuadraticNorm {
                css: Rational::from_integer((2 * m).into()),
                cst: Rational::zero(),
                ctt: Rational::zero(),
            };
            if pair.norm_sq(&g).unwrap() != expected {
                norm_bad += 1;
            }
            let spherical = pair.spherical(&g).unwrap();
            worst = worst.max((spherical - alpha.powi(m as i32)).abs());
            worst = worst.max((spherical - psi(alpha, &sigma, &tau).unwrap()).abs());
        }
    }
    let pass = norm_bad == 0 && worst <= 1e-12;
    report(4, pass, format!("1500 samples: {norm_bad} norm mismatches, max |err| {worst:e} (tol 1e-12)"));
    assert!(pass);
}

#[test]
fn criterion_5_product_rule() {
    let pairs = [
        (params("1/2,1/4", "1/4"), params("1/3", "1/3,1/6")),
        (params("", "1/2,1/2"), params("2/3", "1/5")),
    ];
    let perms = all_permutations(4);
    let (mut checked, mut bad) = (0, 0);
    for (p, q) in &pairs {
        let pq = combine(p, q);
        for sigma in &perms {
            for tau in &perms {
                checked += 1;
                let lhs = phi(&pq, sigma, tau).unwrap();
                let rhs = phi(p, sigma, tau).unwrap() * phi(q, sigma, tau).unwrap();
                if lhs != rhs {
                    bad += 1;
                }
            }
        }
    }
    let pass = bad == 0;
    report(5, pass, format!("{checked} exact comparisons on S4 x S4, {bad} mismatches"));
    assert!(pass);
}

#[test]
fn criterion_6_sign_law() {
    let beta = params("", "1");
    let perms = all_permutations(5);
    let (mut checked, mut bad) = (0, 0);
    for sigma in &perms {
        for tau in &perms {
            checked += 1;
            let rel = sigma.compose(&tau.inverse()).unwrap();
            let expected = Rational::from_integer(sign_by_inversions(&rel, 5).into());
            if phi(&beta, sigma, tau).unwrap() != expected {
                bad += 1;
            }
        }
    }
    let pass = bad == 0;
    report(6, pass, format!("{checked} exact comparisons on S5 x S5, {bad} mismatches"));
    assert!(pass);
}

#[test]
fn criterion_7_positive_definiteness() {
    let mut sources: Vec<ValueSource> = [
        params("1/2,1/4", "1/4"),
        params("1/3", "1/3"),
        params("", "1/2,1/2"),
    ]
    .into_iter()
    .map(ValueSource::Thoma)
    .collect();
    sources.extend(PairKind::ALL.into_iter().map(|k| ValueSource::Construction(spec(k))));
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut all_pass = true;
    for (i, source) in sources.iter().enumerate() {
        let elements = random_elements(source, 40, WINDOW, SEED + i as u64);
        let gram = gram_psd(source, &elements, 1e-9).unwrap();
        worst = worst.min(gram.min_eigenvalue);
        all_pass &= gram.pass && gram.min_eigenvalue >= -1e-9;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        7,
        all_pass,
        format!("{} Gram matrices of size 40, min eigenvalue {worst:e} (>= -1e-9), {secs:.2}s", sources.len()),
    );
    assert!(all_pass);
    assert!(secs < 10.0, "runtime {secs}s");
}

#[test]
fn criterion_8_fock_model() {
    let d = 12;
    let mut lines = Vec::new();
    let mut pass = true;
    for x in [0.25f64, 1.0, 4.0] {
        let v = DVector::from_vec(vec![0.6 * x.sqrt(), 0.8 * x.sqrt()]);
        let got = vacuum_coefficient(&AffinePoint::translation(v), d).unwrap().re;
        let target = (-0.5 * x).exp();
        let err = (got - target).abs();
        let bound = tail_bound(x, d);
        let ok = err <= bound + roundoff_allowance(target) && (x > 1.0 || err <= 1e-8);
        pass &= ok;
        lines.push(format!("|v|^2={x}: err {err:e} tail {bound:e}"));
    }
    let mut perm_defect = 0.0f64;
    for imgs in [vec![1, 0, 2], vec![2, 0, 1], vec![0, 2, 1]] {
        perm_defect = perm_defect.max(unitarity_defect(&permutation_matrix(&imgs), 6).unwrap());
    }
    let theta: f64 = 0.3;
    let rot = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    let rot_defect = unitarity_defect(&rot, 6).unwrap();
    pass &= perm_defect == 0.0 && rot_defect <= 1e-10;
    report(
        8,
        pass,
        format!(
            "{}; permutation defect {perm_defect:e}; rotation defect {rot_defect:e}",
            lines.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_fock_agrees_with_construction() {
    let pair = make_pair(PairKind::A, 0.7, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = GroupElement::new(vec![
            random_permutation(&mut rng, 3, Regime::Plain),
            random_permutation(&mut rng, 3, Regime::Plain),
        ]);
        let (point, _) = affine_point_of(&pair, &g).unwrap();
        let fock = vacuum_coefficient(&point, 12).unwrap();
        worst = worst.max((fock.re - pair.spherical(&g).unwrap()).abs()).max(fock.im.abs());
    }
    let pass = worst <= 1e-6;
    report(9, pass, format!("20 pair-A elements at d=12, max |err| {worst:e} (tol 1e-6)"));
    assert!(pass);
}

#[test]
fn identity_is_spherical_unit() {
    // every source is normalized: value at the identity is one
    let p = params("1/2,1/4", "1/4");
    let e = Permutation::identity();
    assert!(phi(&p, &e, &e).unwrap().is_one());
    for kind in PairKind::ALL {
        assert_eq!(spec(kind).spherical(&GroupElement::identity(kind)).unwrap(), 1.0);
    }
}
