use nalgebra::DVector;
use proptest::prelude::*;

use finslerclass::coset::parse_preset;
use finslerclass::norms::{random_invariant_norm, random_invariant_randers, MinkowskiNorm};
use finslerclass::rootsys::{angle, build_root_system, weyl_reflect, Angle};
use finslerclass::{Family, QNum, Rational, RootVector};

fn qnum() -> impl Strategy<Value = QNum> {
    let r = (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rational::new(p as i128, q as i128));
    (r.clone(), r.clone(), r.clone(), r).prop_map(|(a, b, c, d)| QNum::new(a, b, c, d))
}

proptest! {
    #[test]
    fn qnum_field_axioms(x in qnum(), y in qnum(), z in qnum()) {
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
        prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
        prop_assert_eq!(x.clone() - x.clone(), QNum::zero());
        if let Some(inv) = x.inv() {
            prop_assert_eq!(x.clone() * inv, QNum::one());
        } else {
            prop_assert!(x.is_zero());
        }
    }

    #[test]
    fn qnum_matches_floats(x in qnum(), y in qnum()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assert!(((x.clone() * y.clone()).to_f64() - fx * fy).abs() < 1e-9 * (1.0 + (fx * fy).abs()));
        prop_assert!(((x.clone() + y.clone()).to_f64() - (fx + fy)).abs() < 1e-9 * (1.0 + fx.abs() + fy.abs()));
        prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        prop_assert_eq!(x.signum(), if fx > 0.0 { 1 } else if fx < 0.0 { -1 } else { 0 });
    }

    #[test]
    fn qnum_json_round_trip(x in qnum()) {
        let s = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<QNum>(&s).unwrap(), x);
    }

    #[test]
    fn reflections_preserve_lengths_and_angles(which in 0usize..5, i in 0usize..240, j in 0usize..240, k in 0usize..240) {
        let (f, n) = [(Family::B, 3), (Family::C, 4), (Family::F4, 4), (Family::G2, 2), (Family::E8, 8)][which];
        let rs = build_root_system(f, n).unwrap();
        let m = rs.roots.len();
        let (a, b, c) = (&rs.roots[i % m], &rs.roots[j % m], &rs.roots[k % m]);
        let (sb, sc) = (weyl_reflect(&rs, a, b).unwrap(), weyl_reflect(&rs, a, c).unwrap());
        prop_assert_eq!(sb.dot(&sc), b.dot(c));
        prop_assert!(rs.contains(&sb));
        prop_assert_eq!(weyl_reflect(&rs, a, &sb).unwrap(), b.clone());
        if b != c && *b != -c {
            prop_assert_eq!(angle(&sb, &sc).unwrap(), angle(b, c).unwrap());
        }
    }
}

fn unit(seed: u64, n: usize) -> DVector<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).normalize()
}

fn norm_for(kind: usize, seed: u64) -> (MinkowskiNorm, usize) {
    let names = ["bn_excluded_subcase1(2)", "sphere_un(3)", "a1a1_diagonal(2)"];
    let s = parse_preset(names[(seed % 3) as usize]).unwrap();
    let f = match kind {
        0 => random_invariant_norm(&s, seed),
        _ => random_invariant_randers(&s, seed, 0.4).unwrap(),
    };
    (f, s.dim_m())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_homogeneity_and_euler(kind in 0usize..2, seed in 0u64..1000, lambda in 0.1f64..10.0) {
        let (f, n) = norm_for(kind, seed);
        let y = unit(seed + 1, n);
        let fy = f.evaluate(&y);
        prop_assert!(fy > 0.0);
        prop_assert!((f.evaluate(&(&y * lambda)) - lambda * fy).abs() < 1e-12 * lambda.max(1.0) * fy);
        let g = f.hessian(&y).unwrap();
        prop_assert!((g.inner(&y, &y) - fy * fy).abs() < 1e-7 * fy * fy);
        prop_assert!(f.min_gram_eigenvalue(&y).unwrap() > 0.0);
    }

    #[test]
    fn cartan_tensor_is_symmetric_and_kills_y(kind in 0usize..2, seed in 0u64..1000) {
        let (f, n) = norm_for(kind, seed);
        let y = unit(seed + 2, n);
        let (u, w) = (unit(seed + 3, n), unit(seed + 4, n));
        prop_assert!(f.cartan(&y, &y, &u, &w).unwrap().abs() < 1e-7);
        let a = f.cartan(&y, &u, &w, &y).unwrap();
        prop_assert!(a.abs() < 1e-7);
        let c = f.cartan_tensor(&y).unwrap();
        let (i, j, k) = ((seed as usize) % n, (seed as usize / 7) % n, (seed as usize / 49) % n);
        prop_assert!((c.get(i, j, k) - c.get(k, i, j)).abs() < 1e-7);
        prop_assert!((c.get(i, j, k) - c.get(j, i, k)).abs() < 1e-7);
    }

    #[test]
    fn reversibility_flag_matches_values(kind in 0usize..2, seed in 0u64..1000) {
        let (f, n) = norm_for(kind, seed);
        let y = unit(seed + 5, n);
        let symmetric = (f.evaluate(&-&y) - f.evaluate(&y)).abs() < 1e-12;
        if f.is_reversible() {
            prop_assert!(symmetric);
        }
    }
}

#[test]
fn angle_of_orthogonal_a3_pair() {
    let a = RootVector::from_ints(&[1, 0, 0, -1]);
    let b = RootVector::from_ints(&[0, -1, 1, 0]);
    assert_eq!(angle(&a, &b).unwrap(), Angle::Pi2);
}
