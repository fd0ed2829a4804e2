use gsp4_ssc::cyclo::{psi, CycloSum, Cyclotomic};
use gsp4_ssc::gsp4;
use gsp4_ssc::padic::PAdic;
use gsp4_ssc::Field;
use proptest::prelude::*;

fn padic(p: u32) -> impl Strategy<Value = PAdic> {
    (1i64..100_000, -4i32..5).prop_map(move |(n, v)| Field::new(p, 12).unwrap().int(n) * Field::new(p, 12).unwrap().pi(v))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(a in padic(3), b in padic(3), c in padic(3)) {
        prop_assert!(((a + b) + c - (a + (b + c))).is_zero());
        prop_assert!((a * (b + c) - (a * b + a * c)).is_zero());
        prop_assert!((a * b - b * a).is_zero());
        prop_assert!((a * a.inv().unwrap() - PAdic::one(3, 12)).is_zero());
    }

    #[test]
    fn psi_is_a_character(a in padic(5), b in padic(5)) {
        prop_assert_eq!(psi(&(a + b)).unwrap(), psi(&a).unwrap().mul(&psi(&b).unwrap()));
        prop_assert_eq!(psi(&(-a)).unwrap(), psi(&a).unwrap().conjugate());
    }

    #[test]
    fn cyclotomic_normal_form(a in 0u64..27, b in 0u64..27) {
        let x = Cyclotomic::root_of_unity(3, a, 3).unwrap();
        let y = Cyclotomic::root_of_unity(3, b, 3).unwrap();
        let mut s = CycloSum::new(3);
        s.add_root(a, 3, 1).unwrap();
        s.add_root(b, 3, 1).unwrap();
        prop_assert_eq!(s.value(), x.add(&y));
        prop_assert_eq!(x.mul(&y), Cyclotomic::root_of_unity(3, (a + b) % 27, 3).unwrap());
    }

    #[test]
    fn group_inverse(seed in any::<u64>()) {
        use rand::SeedableRng;
        let f = Field::new(3, 16).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = gsp4::random_paramodular(&f, &mut rng, 5).mul(&gsp4::d_pi(&f, 1, 2));
        prop_assert!(g.mul(&g.inv().unwrap()).approx_eq(&gsp4_ssc::GSp4::identity(&f)));
    }
}
