use gsp4_ssc::cyclo::Cyclotomic;
use gsp4_ssc::gsp4::{self, GSp4};
use gsp4_ssc::reps::{Model, ModelVector};
use gsp4_ssc::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(p: u32, t: i64, eps: i8) -> Model {
    let f = Field::new(p, 20).unwrap();
    Model::new(&f, f.int(t), eps).unwrap()
}

fn int(p: u32, n: i64) -> Cyclotomic {
    Cyclotomic::from_int(p, n)
}

#[test]
fn newvector_basic_values() {
    for eps in [1, -1] {
        let m = model(3, 1, eps);
        let f = m.f;
        assert_eq!(m.eval(&ModelVector::New, &m.d).unwrap(), int(3, 1));
        assert_eq!(m.eval(&ModelVector::New, &GSp4::identity(&f)).unwrap(), int(3, 0));
        assert_eq!(m.eval(&ModelVector::Minimal, &m.sc.hp.gchi).unwrap(), int(3, eps as i64));
    }
}

#[test]
fn norms() {
    let m = model(3, 2, 1);
    let nn = m.inner_product(&ModelVector::New, &ModelVector::New).unwrap();
    assert_eq!(nn, int(3, 576));
    let mm = m.inner_product(&ModelVector::Minimal, &ModelVector::Minimal).unwrap();
    assert_eq!(mm, int(3, 1));
    let shifted = ModelVector::Minimal.translate(m.d);
    assert_eq!(m.inner_product(&ModelVector::Minimal, &shifted).unwrap(), int(3, 0));
}

#[test]
fn expansion_and_atkin_lehner() {
    for eps in [1i8, -1] {
        let m = model(3, 2, eps);
        let f = m.f;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u5 = gsp4::u_n(&f, 5);
        for k in 0..12 {
            let g = if k == 0 {
                m.d
            } else {
                let (h, _) = gsp4::random_hprime(&f, &mut rng, &m.sc.hp);
                h.mul(&m.d).mul(&gsp4::random_paramodular(&f, &mut rng, 5))
            };
            let a = m.eval(&ModelVector::New, &g).unwrap();
            let b = m.new_from_minimal(&g).unwrap();
            assert_eq!(a, b);
            let c = m.eval(&ModelVector::New, &g.mul(&u5)).unwrap();
            assert_eq!(c, a.scale_int(eps as i64));
        }
    }
}

#[test]
fn hecke_terms() {
    let m = model(3, 1, 1);
    let f = m.f;
    for (name, t5) in [("printed", gsp4::t5_unipotent_variant(&f)), ("t_n", gsp4::t_n(&f, 5))] {
        let terms = m.hecke_t01_terms(&t5).unwrap();
        eprintln!("{name}: {:?}", terms.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
}

#[test]
fn matcoeff_at_identity() {
    let m = model(3, 1, 1);
    let f = m.f;
    let g = GSp4::identity(&f);
    assert_eq!(m.matcoeff_new_bruteforce(&g, None).unwrap(), int(3, 576));
    let z = f.zero();
    let mut total = Cyclotomic::zero(3);
    for k in 1..=4 {
        let fam = m.matcoeff_new_family(k, z, z, z, z).unwrap();
        let bf = m.matcoeff_new_bruteforce(&g, Some(k)).unwrap();
        assert_eq!(fam, bf, "family {k}");
        total = total.add(&fam);
    }
    assert_eq!(total, int(3, 576));
}
