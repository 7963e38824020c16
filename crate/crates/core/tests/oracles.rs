mod common;

use common::{brute_force_min, hnf, hnf_of, mixed_basis, projected_gram, random_basis, shortest_norm_sq, Rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use potlll_core::exact::{gram_determinants, integral_gso, ln_bigint, potential, ExactGso};
use potlll_core::*;

fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[test]
fn hnf_oracle_on_known_lattices() {
    assert_eq!(hnf(&big(&[vec![2, 0], vec![1, 1]])), big(&[vec![1, 1], vec![0, 2]]));
    assert_eq!(hnf(&big(&[vec![4, 6], vec![6, 9]])), big(&[vec![2, 3]]));
    assert_eq!(hnf(&big(&[vec![0, 3], vec![5, 0]])), big(&[vec![5, 0], vec![0, 3]]));
    assert_eq!(hnf(&big(&[vec![-3, 1], vec![0, -2]])), big(&[vec![3, 1], vec![0, 2]]));
}

#[test]
fn hnf_oracle_ignores_unimodular_changes() {
    let mut rng = Rng(11);
    for _ in 0..50 {
        let n = rng.range(2, 7) as usize;
        let b = random_basis(&mut rng, n, n + 1, 30);
        let mut rows = b.rows().to_vec();
        for _ in 0..20 {
            let i = rng.range(0, n as i64 - 1) as usize;
            let j = rng.range(0, n as i64 - 1) as usize;
            if i == j {
                rows.swap(i, (i + 1) % n);
                continue;
            }
            let f = BigInt::from(rng.range(-3, 3));
            let src = rows[j].clone();
            for (x, y) in rows[i].iter_mut().zip(&src) {
                *x += &f * y;
            }
        }
        assert_eq!(hnf(&rows), hnf_of(&b));
        // a proper sublattice has a different form
        let mut doubled = rows.clone();
        for x in doubled[0].iter_mut() {
            *x *= 2;
        }
        assert_ne!(hnf(&doubled), hnf_of(&b));
    }
}

#[test]
fn brute_force_on_known_lattices() {
    assert_eq!(shortest_norm_sq(&Basis::identity(5)), BigInt::from(1));
    assert_eq!(shortest_norm_sq(&Basis::from_i64(&[vec![5, 0], vec![4, 1]]).unwrap()), BigInt::from(2));
    // A_2 scaled: all minimal vectors have norm 2
    let b = Basis::from_i64(&[vec![1, -1, 0], vec![0, 1, -1]]).unwrap();
    assert_eq!(shortest_norm_sq(&b), BigInt::from(2));
    // projection of (7,3,4), (2,0,5) orthogonal to e_1
    let b = Basis::from_i64(&[vec![1, 0, 0], vec![7, 3, 4], vec![2, 0, 5]]).unwrap();
    assert_eq!(brute_force_min(&projected_gram(&b, 1, 2)), BigRational::from_integer(BigInt::from(10)));
}

#[test]
fn enumeration_agrees_with_brute_force() {
    let mut rng = Rng(5);
    for _ in 0..60 {
        let n = rng.range(3, 8) as usize;
        let mut b = random_basis(&mut rng, n, n, 20);
        lll_reduce(&mut b, &ReductionParams::default()).unwrap();
        let g: GsoState = compute_gso(&b).unwrap();
        let k = rng.range(0, n as i64 - 2) as usize;
        let h = rng.range(k as i64, n as i64 - 1) as usize;
        let exact = brute_force_min(&projected_gram(&b, k, h)).to_f64().unwrap();
        let found = svp_enumerate(&g, k, h, g.bstar_sq(k) * (1.0 + 1e-6)).unwrap().expect("b*_k itself qualifies");
        assert!((found.norm_sq - exact).abs() <= 1e-9 * exact, "k={k} h={h}: {} vs {exact}", found.norm_sq);
        assert!(found.coeffs.iter().any(|&c| c != 0));
    }
}

#[test]
fn exact_and_float_gso_agree() {
    let mut rng = Rng(9);
    for _ in 0..40 {
        let n = rng.range(2, 10) as usize;
        let b = mixed_basis(&mut rng, n);
        let exact = ExactGso::new(&b).unwrap();
        let g: GsoState<ExtFloat> = compute_gso(&b).unwrap();
        for i in 0..n {
            let e = exact.bstar_sq[i].to_f64().unwrap();
            assert!((g.bstar_sq(i).to_f64() - e).abs() <= 1e-9 * e);
            for j in 0..i {
                let m = exact.mu[i][j].to_f64().unwrap();
                assert!((g.mu(i, j).to_f64() - m).abs() <= 1e-9 * m.abs().max(1.0));
            }
        }
        let d = gram_determinants(&b).unwrap();
        let log_det = ln_bigint(d.last().unwrap());
        assert!((2.0 * log_volume(&g).unwrap() - log_det).abs() <= 1e-9 * log_det.abs().max(1.0));
    }
}

#[test]
fn generated_bases_have_prime_determinant() {
    for (dim, seed) in [(2, 0), (5, 3), (10, 0), (20, 7)] {
        let spec = GenSpec::new(dim, seed);
        let b = generate_random_hnf(&spec).unwrap();
        let p = BigInt::from(latgen::hnf_modulus(spec.bits));
        let (d, _) = integral_gso(&b).unwrap();
        assert_eq!(d.last().unwrap(), &(&p * &p));
        for (i, row) in b.rows().iter().enumerate() {
            for (j, x) in row.iter().enumerate().skip(1) {
                assert_eq!(x, &BigInt::from((i == j) as i64));
            }
        }
        assert_eq!(generate_random_hnf(&spec).unwrap(), b);
    }
}

#[test]
fn golden_generator_files() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let b = read_basis(format!("{dir}/hnf_dim2_bits4_seed0.txt")).unwrap();
    assert_eq!(b, generate_random_hnf(&GenSpec::new(2, 0).with_bits(4)).unwrap());
    assert_eq!(b, Basis::from_i64(&[vec![17, 0], vec![15, 1]]).unwrap());
    let text = std::fs::read_to_string(format!("{dir}/hnf_dim10_seed0.txt")).unwrap();
    assert_eq!(format_basis(&generate_random_hnf(&GenSpec::new(10, 0)).unwrap()), text);
}

#[test]
fn fplll_fixture_reduces() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fplll_knapsack_10.txt");
    let b = read_basis(path).unwrap();
    assert_eq!((b.rank(), b.ambient_dim()), (10, 11));
    assert_eq!(format_basis(&b), std::fs::read_to_string(path).unwrap());
    let mut r = b.clone();
    pot_lll_reduce(&mut r, &ReductionParams::default()).unwrap();
    assert!(is_pot_reduced(&r, 0.99).unwrap().is_reduced());
    assert_eq!(hnf_of(&r), hnf_of(&b));
}

#[test]
fn exact_fallback_for_hnf_bases() {
    let b = generate_random_hnf(&GenSpec::new(8, 1)).unwrap();
    let exact = ExactGso::new(&b).unwrap();
    let double: GsoState<f64> = compute_gso(&b).unwrap();
    let ext: GsoState<ExtFloat> = compute_gso(&b).unwrap();
    let ext: Vec<f64> = ext.bstar_sq_all().iter().map(|x| GsoFloat::to_f64(*x)).collect();
    for g in [double.bstar_sq_all().to_vec(), ext] {
        for (x, e) in g.iter().zip(&exact.bstar_sq) {
            let e = e.to_f64().unwrap();
            assert!((x - e).abs() <= 1e-12 * e);
        }
    }
    assert!(!is_lll_reduced(&b, 0.99).unwrap().is_reduced());
    let dependent = Basis::from_i64(&[vec![1 << 40, 3], vec![1 << 41, 6]]).unwrap();
    assert!(matches!(compute_gso::<_, f64>(&dependent), Err(LatticeError::DependentRows { row: 1 })));
}

#[test]
fn critical_basis_values() {
    let b = critical_basis(&CriticalBasisSpec::new(2)).unwrap();
    let h = 3f64.sqrt() / 2.0;
    assert_eq!(b.rows()[0], vec![1.0, 0.0]);
    assert!((b.rows()[1][0] - 0.5).abs() < 1e-15 && (b.rows()[1][1] - h).abs() < 1e-15);
}

#[test]
fn exact_potential_examples() {
    assert_eq!(potential(&Basis::diagonal(&[2, 1])).unwrap(), BigInt::from(16));
    assert_eq!(potential(&Basis::identity(6)).unwrap(), BigInt::from(1));
    let g: GsoState = compute_gso(&Basis::diagonal(&[3, 5])).unwrap();
    assert!((volume(&g).unwrap() - 15.0).abs() < 1e-12);
}
