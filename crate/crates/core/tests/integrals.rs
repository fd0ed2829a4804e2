use gsp4_ssc::cyclo::{ratio, Cyclotomic};
use gsp4_ssc::gsp4::{self, GSp4};
use gsp4_ssc::integrals::*;
use gsp4_ssc::padic::PAdic;
use gsp4_ssc::reps::Model;
use gsp4_ssc::Field;

fn setup() -> (Field, Model, PsiU) {
    let f = Field::new(3, 12).unwrap();
    let m = Model::new(&f, f.one(), 1).unwrap();
    let psi = PsiU::new(f.int(-1), f.int(-1)).unwrap();
    (f, m, psi)
}

fn int(n: i64) -> Cyclotomic {
    Cyclotomic::from_int(3, n)
}

#[test]
fn trivial_lattice_integrals() {
    let f = Field::new(3, 12).unwrap();
    let one = |_: &[PAdic], acc: &mut Accum| acc.add_psi(&f.zero(), 1, 0);
    let wave = |x: &[PAdic], acc: &mut Accum| acc.add_psi(&x[0].shift(-1), 1, 0);
    let steep = |x: &[PAdic], acc: &mut Accum| acc.add_psi(&x[0].shift(-2), 1, 0);
    let o = LatticeBox::new(vec![Coord::add(0, 2)]);
    assert_eq!(integrate(&f, &one, &o).unwrap(), int(1));
    assert_eq!(integrate(&f, &one, &LatticeBox::new(vec![Coord::shell(0, 1)])).unwrap(), int(1));
    assert_eq!(integrate(&f, &wave, &o).unwrap(), int(0));
    assert!(refinement_check(&f, &wave, &o).unwrap());
    assert!(!refinement_check(&f, &steep, &LatticeBox::new(vec![Coord::add(0, 1)])).unwrap());
    // d^x measure of the shell v = 2 is still 1
    assert_eq!(integrate(&f, &one, &LatticeBox::new(vec![Coord::shell(2, 4)])).unwrap(), int(1));
}

#[test]
fn laurent_normal_form() {
    let mut l = LaurentInQs::zero(3);
    l.add_term(1, 7, &int(2));
    // 2 q^{7/2} = 54 q^{1/2}
    assert_eq!(l.terms().next().unwrap(), ((1, 1), &int(54)));
    l.add_term(1, 1, &int(-54));
    assert!(l.is_zero());
}

#[test]
fn j0_minimal_values() {
    let (f, m, psi) = setup();
    let b = AutoBudget::default();
    let g = f.pi(-1) * psi.c1.inv().unwrap();
    let d = f.pi(-1) * psi.c2.inv().unwrap();
    let r = j0_minimal(&f, &m.sc, &psi, (g, d), (g, d), b).unwrap();
    assert!(r.refined);
    assert_eq!(r.value, int(3i64.pow(7)));
    let r = j0_minimal(&f, &m.sc, &psi, (f.one(), d), (f.one(), d), b).unwrap();
    assert!(r.value.is_zero());
}

#[test]
fn whittaker_support_and_equivariance() {
    let (f, m, psi) = setup();
    let b = AutoBudget::default();
    let id = GSp4::identity(&f);
    let d = gsp4::d_ab(&f, f.pi(-1) * psi.c1, f.pi(-1) * psi.c2).unwrap();
    let w = whittaker(&f, &m.sc, &psi, &id, &d, b).unwrap();
    assert_eq!(w.value, int(2187));
    let u = gsp4::u_abce(&f, f.pi(-1), f.int(2), f.pi(-2), f.one());
    let wu = whittaker(&f, &m.sc, &psi, &id, &u.mul(&d), b).unwrap();
    let phase = gsp4_ssc::cyclo::psi(&(psi.c1 * f.pi(-1) + psi.c2 * f.one())).unwrap();
    assert_eq!(wu.value, w.value.mul(&phase));
}

#[test]
fn j0_newvector_second_family() {
    let (_, m, psi) = setup();
    let r = j0_newvector_family(&m, &psi, 2, Some([1; 4]), AutoBudget::default()).unwrap();
    assert!(r.refined);
    assert_eq!(r.value, int(81));
}

#[test]
fn bessel_value_and_volume() {
    let (f, m, _) = setup();
    let a = f.one();
    let s = BesselSetup::new(a, 2, f.one()).unwrap();
    let g0 = gsp4::d_ab(&f, f.pi(-1), f.pi(1)).unwrap().inv().unwrap();
    let r = bessel(&f, &m.sc, &s, &BesselShape::standard(&f, a), &g0, AutoBudget::default()).unwrap();
    assert_eq!(r.value.to_rational().unwrap(), ratio(1, 3));
    // perturbing alpha off u0 (1 + p) kills the torus sum
    let g1 = gsp4::d_ab(&f, f.pi(-1) * f.int(2), f.pi(1)).unwrap().inv().unwrap();
    let r = bessel(&f, &m.sc, &s, &BesselShape::standard(&f, a), &g1, AutoBudget::default()).unwrap();
    assert!(r.value.is_zero());
    assert_eq!(bessel_volume(&f, a, 5).unwrap(), ratio(4, 3));
    assert!(BesselSetup::new(f.int(2), 2, f.one()).is_err(), "-2 is a square mod 3");
}

#[test]
fn germ_is_multiplicative() {
    let f = Field::new(5, 10).unwrap();
    // -2 = 3 is a non-square mod 5
    let s = BesselSetup::new(f.int(2), 2, f.int(3)).unwrap();
    for (y1, y2) in [(1, 2), (4, 4), (7, 11), (0, 3)] {
        assert!(germ_multiplicative(&f, &s, f.int(y1), f.int(y2)).unwrap());
    }
}

#[test]
fn formal_degree_q3() {
    let (deg, orders) = formal_degree(3, 1_000_000).unwrap();
    assert_eq!(orders.index(), 640);
    assert_eq!(deg, ratio(320, 1));
}
