//! Lattice integration over p-adic coordinates and the local integrals of
//! the minimal vector and the newvector: Whittaker functions, the
//! Novodvorsky zeta integral, J0 and the Bessel integral.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cyclo::{q_pow, ratio, CycloSum, Cyclotomic};
use crate::gsp4::{self, GSp4};
use crate::padic::PAdic;
use crate::reps::{Model, SignedChar};
use crate::{Error, Field};

// ---------------------------------------------------------------------------
// accumulation

/// Sum of `w q^k psi(x)` terms plus arbitrary cyclotomic values.
#[derive(Clone, Debug)]
pub struct Accum {
    p: u32,
    parts: BTreeMap<i32, CycloSum>,
    extra: Option<Cyclotomic>,
    touched: bool,
}

impl Accum {
    pub fn new(p: u32) -> Self {
        Accum { p, parts: BTreeMap::new(), extra: None, touched: false }
    }

    /// Adds `w q^qexp psi(x)`.
    pub fn add_psi(&mut self, x: &PAdic, w: i128, qexp: i32) -> Result<(), Error> {
        self.touched = true;
        self.parts.entry(qexp).or_insert_with(|| CycloSum::new(self.p)).add_psi(x, w)
    }

    pub fn add_value(&mut self, c: &Cyclotomic) {
        self.touched = true;
        self.extra = Some(match self.extra.take() {
            None => c.clone(),
            Some(e) => e.add(c),
        });
    }

    pub fn merge(&mut self, o: Accum) {
        self.touched |= o.touched;
        for (k, s) in o.parts {
            self.parts.entry(k).or_insert_with(|| CycloSum::new(self.p)).merge(&s);
        }
        if let Some(c) = o.extra {
            self.add_value(&c);
        }
    }

    pub fn touched(&self) -> bool {
        self.touched
    }

    pub fn value(&self) -> Cyclotomic {
        let mut v = self.extra.clone().unwrap_or_else(|| Cyclotomic::zero(self.p));
        for (k, s) in &self.parts {
            v = v.add(&s.value().scale(&q_pow(self.p, *k)));
        }
        v
    }
}

// ---------------------------------------------------------------------------
// lattice boxes

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Coord {
    /// Multiplicative coordinates range over the shell `v(x) = low`.
    pub mult: bool,
    pub low: i32,
    /// Cells are cosets of `p^high o`.
    pub high: i32,
}

impl Coord {
    pub fn add(low: i32, high: i32) -> Self {
        Coord { mult: false, low, high }
    }

    pub fn shell(v: i32, high: i32) -> Self {
        Coord { mult: true, low: v, high }
    }

    fn points(&self, f: &Field) -> Vec<PAdic> {
        let all = f.residues(self.low, self.high);
        if self.mult {
            all.into_iter().filter(|x| x.valuation() == Some(self.low)).collect()
        } else {
            all
        }
    }

    /// Points of valuation exactly `v` at this resolution.
    fn ring(&self, f: &Field, v: i32) -> Vec<PAdic> {
        if v >= self.high {
            return Vec::new();
        }
        f.residues(v, self.high).into_iter().filter(|x| x.valuation() == Some(v)).collect()
    }

    /// Haar measure of one cell.
    fn cell_measure(&self, p: u32) -> BigRational {
        let q = p as i64;
        if self.mult {
            ratio(q, q - 1) * q_pow(p, self.low - self.high)
        } else {
            q_pow(p, -self.high)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LatticeBox {
    pub coords: Vec<Coord>,
}

impl LatticeBox {
    pub fn new(coords: Vec<Coord>) -> Self {
        LatticeBox { coords }
    }

    pub fn refined(&self) -> Self {
        LatticeBox {
            coords: self.coords.iter().map(|c| Coord { high: c.high + 1, ..*c }).collect(),
        }
    }

    pub fn cells(&self, p: u32) -> u128 {
        self.coords
            .iter()
            .map(|c| {
                let n = (p as u128).pow((c.high - c.low) as u32);
                if c.mult {
                    n - n / p as u128
                } else {
                    n
                }
            })
            .product()
    }
}

pub trait Integrand: Fn(&[PAdic], &mut Accum) -> Result<(), Error> + Sync {}
impl<T: Fn(&[PAdic], &mut Accum) -> Result<(), Error> + Sync> Integrand for T {}

fn sum_grid<F: Integrand>(f: &F, p: u32, grids: &[Vec<PAdic>]) -> Result<Accum, Error> {
    if grids.iter().any(|g| g.is_empty()) {
        return Ok(Accum::new(p));
    }
    let rest: Vec<&Vec<PAdic>> = grids[1..].iter().collect();
    let total: usize = rest.iter().map(|g| g.len()).product();
    let parts: Vec<Result<Accum, Error>> = grids[0]
        .par_iter()
        .map(|x0| {
            let mut acc = Accum::new(p);
            let mut pt = vec![*x0; grids.len()];
            for mut idx in 0..total {
                for (k, g) in rest.iter().enumerate().rev() {
                    pt[k + 1] = g[idx % g.len()];
                    idx /= g.len();
                }
                f(&pt, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut acc = Accum::new(p);
    for part in parts {
        acc.merge(part?);
    }
    Ok(acc)
}

/// Riemann sum over the cells of `bx`, each weighted by its Haar measure.
pub fn integrate<F: Integrand>(f: &Field, integrand: &F, bx: &LatticeBox) -> Result<Cyclotomic, Error> {
    let grids: Vec<Vec<PAdic>> = bx.coords.iter().map(|c| c.points(f)).collect();
    let acc = sum_grid(integrand, f.p, &grids)?;
    let measure = bx.coords.iter().fold(BigRational::one(), |m, c| m * c.cell_measure(f.p));
    Ok(acc.value().scale(&measure))
}

/// True when one more level of resolution on every coordinate leaves the
/// value unchanged.
pub fn refinement_check<F: Integrand>(f: &Field, integrand: &F, bx: &LatticeBox) -> Result<bool, Error> {
    Ok(integrate(f, integrand, bx)? == integrate(f, integrand, &bx.refined())?)
}

/// First coordinate whose next `shells` valuation rings outside the box
/// carry a point where the integrand does not vanish.
pub fn support_guard<F: Integrand>(f: &Field, integrand: &F, bx: &LatticeBox, shells: i32) -> Result<Option<usize>, Error> {
    let base: Vec<Vec<PAdic>> = bx.coords.iter().map(|c| c.points(f)).collect();
    for (i, c) in bx.coords.iter().enumerate() {
        // multiplicative shells are scanned by the caller
        if c.mult {
            continue;
        }
        for k in 1..=shells {
            let mut grids = base.clone();
            grids[i] = c.ring(f, c.low - k);
            if sum_grid(integrand, f.p, &grids)?.touched() {
                return Ok(Some(i));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy)]
pub struct AutoBudget {
    pub max_expand: u32,
    pub max_refine: u32,
    pub max_cells: u128,
    pub guard_shells: i32,
}

impl Default for AutoBudget {
    fn default() -> Self {
        AutoBudget { max_expand: 6, max_refine: 3, max_cells: 20_000_000, guard_shells: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct AutoResult {
    pub value: Cyclotomic,
    pub bx: LatticeBox,
    /// The value survived one extra level of resolution.
    pub refined: bool,
}

/// Integrates over a box grown until its faces are clear of the support
/// and refined until the value is stable.
pub fn integrate_auto<F: Integrand>(
    f: &Field,
    integrand: &F,
    start: &LatticeBox,
    budget: AutoBudget,
) -> Result<AutoResult, Error> {
    let mut bx = start.clone();
    let mut expansions = 0;
    let grow = |bx: &mut LatticeBox, expansions: &mut u32| -> Result<bool, Error> {
        if let Some(i) = support_guard(f, integrand, bx, budget.guard_shells)? {
            *expansions += 1;
            if *expansions > budget.max_expand {
                return Err(Error::SupportNotLocated);
            }
            bx.coords[i].low -= 1;
            return Ok(true);
        }
        Ok(false)
    };
    while grow(&mut bx, &mut expansions)? {}
    let mut refines = 0;
    loop {
        if bx.refined().cells(f.p) > budget.max_cells {
            let value = integrate(f, integrand, &bx)?;
            return Ok(AutoResult { value, bx, refined: false });
        }
        let v0 = integrate(f, integrand, &bx)?;
        let v1 = integrate(f, integrand, &bx.refined())?;
        if v0 == v1 {
            return Ok(AutoResult { value: v0, bx, refined: true });
        }
        refines += 1;
        bx = bx.refined();
        while grow(&mut bx, &mut expansions)? {}
        if refines > budget.max_refine {
            return Ok(AutoResult { value: v1, bx, refined: false });
        }
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials in q^s

/// `sum c_{a,b} q^{a s + b}` with `b` in `{0, 1/2}`; integral parts of the
/// exponent `b` are folded into the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentInQs {
    p: u32,
    terms: BTreeMap<(i32, u8), Cyclotomic>,
}

impl LaurentInQs {
    pub fn zero(p: u32) -> Self {
        LaurentInQs { p, terms: BTreeMap::new() }
    }

    /// Adds `c q^{a s + b2/2}`.
    pub fn add_term(&mut self, a: i32, b2: i32, c: &Cyclotomic) {
        let half = b2.rem_euclid(2) as u8;
        let c = c.scale(&q_pow(self.p, b2.div_euclid(2)));
        let e = self.terms.entry((a, half)).or_insert_with(|| Cyclotomic::zero(self.p));
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&(a, half));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((a, h), c) in &o.terms {
            out.add_term(*a, *h as i32, c);
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = Self::zero(self.p);
        for ((a, h), x) in &self.terms {
            out.add_term(*a, *h as i32, &x.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `((a, 2b), coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), &Cyclotomic)> {
        self.terms.iter().map(|((a, h), c)| ((*a, *h as i32), c))
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((a, h), c)| {
                let s = match a {
                    0 => String::new(),
                    1 => "*q^s".into(),
                    a => format!("*q^({a}s)"),
                };
                let h = if *h == 1 { "*q^(1/2)" } else { "" };
                format!("({c}){s}{h}")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Whittaker functions and J0

/// Additive character data: `psi_{c1,c2}(u) = psi(c1 a + c2 e)`.
#[derive(Debug, Clone, Copy)]
pub struct PsiU {
    pub c1: PAdic,
    pub c2: PAdic,
}

impl PsiU {
    pub fn new(c1: PAdic, c2: PAdic) -> Result<Self, Error> {
        if !c1.is_unit()? || !c2.is_unit()? {
            return Err(Error::BadParameter("c1, c2 must be units".into()));
        }
        Ok(PsiU { c1, c2 })
    }

    /// Argument of `psi_{c1,c2}^{-1}(u(a,b,c,e))`.
    pub fn inv_arg(&self, a: PAdic, e: PAdic) -> PAdic {
        -(self.c1 * a + self.c2 * e)
    }
}

fn u_from(f: &Field, x: &[PAdic]) -> GSp4 {
    gsp4::u_abce(f, x[0], x[1], x[2], x[3])
}

/// Adds `f_min(g) psi(extra)` to the accumulator.
fn add_min(sc: &SignedChar, g: &GSp4, extra: &PAdic, acc: &mut Accum, qexp: i32) -> Result<(), Error> {
    if let Some((x, s)) = sc.phase(g)? {
        acc.add_psi(&(x.shift(-1) + *extra), s as i128, qexp)?;
    }
    Ok(())
}

/// `J0(d_{al,be} f_min, d_{ga,de} f_min)`, integrating over the box
/// `a in ga o, b in ga de o, c in ga^2 de o, e in de o` (grown if needed).
pub fn j0_minimal(
    f: &Field,
    sc: &SignedChar,
    psi: &PsiU,
    (al, be): (PAdic, PAdic),
    (ga, de): (PAdic, PAdic),
    budget: AutoBudget,
) -> Result<AutoResult, Error> {
    let left = gsp4::d_ab(f, ga, de)?.inv()?;
    let right = gsp4::d_ab(f, al, be)?;
    let integrand = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let g = left.mul(&u_from(f, x)).mul(&right);
        add_min(sc, &g, &psi.inv_arg(x[0], x[3]), acc, 0)
    };
    let v = |x: PAdic| x.valuation().expect("nonzero");
    let (vg, vd) = (v(ga), v(de));
    let lows = [vg, vg + vd, 2 * vg + vd, vd];
    let bx = LatticeBox::new(lows.iter().map(|&l| Coord::add(l, l + 1)).collect());
    integrate_auto(f, &integrand, &bx, budget)
}

/// `W(g) = int_U f_min(d_{w c1, w c2} u g g0) psi^{-1}_{c1,c2}(u) du` for the
/// translate `g0 . f_min`.
pub fn whittaker(
    f: &Field,
    sc: &SignedChar,
    psi: &PsiU,
    g0: &GSp4,
    g: &GSp4,
    budget: AutoBudget,
) -> Result<AutoResult, Error> {
    let left = gsp4::d_ab(f, f.pi(1) * psi.c1, f.pi(1) * psi.c2)?;
    let right = g.mul(g0);
    let integrand = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let h = left.mul(&u_from(f, x)).mul(&right);
        add_min(sc, &h, &psi.inv_arg(x[0], x[3]), acc, 0)
    };
    integrate_auto(f, &integrand, &whittaker_box(), budget)
}

fn whittaker_box() -> LatticeBox {
    LatticeBox::new([-1, -2, -3, -1].iter().map(|&l| Coord::add(l, l + 1)).collect())
}

/// Character of `F^x` of conductor at most 1 with values in the cyclotomic
/// ring: trivial or quadratic on units, with a chosen value at `varpi`.
#[derive(Debug, Clone)]
pub struct ChiData {
    pub ramified: bool,
    pub at_pi: Cyclotomic,
}

impl ChiData {
    pub fn trivial(p: u32) -> Self {
        ChiData { ramified: false, at_pi: Cyclotomic::one(p) }
    }

    pub fn eval(&self, x: &PAdic) -> Result<Cyclotomic, Error> {
        let p = x.prime();
        let v = x.valuation().ok_or(Error::DivisionByZero)?;
        let mut out = Cyclotomic::one(p);
        let base = if v >= 0 { self.at_pi.clone() } else { self.at_pi.conjugate() };
        for _ in 0..v.unsigned_abs() {
            out = out.mul(&base);
        }
        if self.ramified {
            let r = x.shift(-v).residue(1)?;
            out = out.scale_int(legendre(r, p));
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Self {
        ChiData { ramified: self.ramified, at_pi: self.at_pi.conjugate() }
    }
}

pub fn legendre(r: u64, p: u32) -> i64 {
    let p = p as u64;
    let r = r % p;
    if r == 0 {
        return 0;
    }
    let mut acc = 1u64;
    for _ in 0..(p - 1) / 2 {
        acc = acc * r % p;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone)]
pub struct ZetaResult {
    pub value: LaurentInQs,
    /// `(v(gamma), shell sum, refined)` for every scanned shell.
    pub shells: Vec<(i32, Cyclotomic, bool)>,
}

/// The shell `v(gamma) = k` of the Novodvorsky integral of `W_{g0 f_min}`:
/// `int_{v(ga)=k} int_x W(M(ga, x) g0) chi(ga) dx d^x ga`.
fn zeta_shell(
    f: &Field,
    sc: &SignedChar,
    psi: &PsiU,
    g0: &GSp4,
    chi: &ChiData,
    k: i32,
    budget: AutoBudget,
) -> Result<AutoResult, Error> {
    let left = gsp4::d_ab(f, f.pi(1) * psi.c1, f.pi(1) * psi.c2)?;
    // coordinates: gamma (shell k), x, then a, b, c, e
    let integrand = |pt: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let (ga, x) = (pt[0], pt[1]);
        let o = f.one();
        let mut m = [[f.zero(); 4]; 4];
        m[0][0] = ga;
        m[1][1] = ga;
        m[2][1] = x;
        m[2][2] = o;
        m[3][3] = o;
        let mg = GSp4::make(m)?.mul(g0);
        let h = left.mul(&u_from(f, &pt[2..])).mul(&mg);
        if let Some((ph, s)) = sc.phase(&h)? {
            let c = chi.eval(&ga)?;
            let arg = ph.shift(-1) + psi.inv_arg(pt[2], pt[5]);
            let w = crate::cyclo::psi(&arg)?.mul(&c).scale_int(s as i64);
            acc.add_value(&w);
        }
        Ok(())
    };
    let mut coords = vec![Coord::shell(k, k + 1), Coord::add(0, 1)];
    coords.extend(whittaker_box().coords);
    integrate_auto(f, &integrand, &LatticeBox::new(coords), budget)
}

/// `Z(s, W_{g0 f_min}, chi)` as a Laurent polynomial in `q^s`, scanning
/// shells outward from `v(gamma) = start` until two consecutive shells
/// vanish on each side.
pub fn novodvorsky_zeta(
    f: &Field,
    sc: &SignedChar,
    psi: &PsiU,
    g0: &GSp4,
    chi: &ChiData,
    start: i32,
    max_shells: i32,
    budget: AutoBudget,
) -> Result<ZetaResult, Error> {
    let mut value = LaurentInQs::zero(f.p);
    let mut shells = Vec::new();
    for dir in [-1, 1] {
        let mut empty = 0;
        let mut k = if dir < 0 { start } else { start + 1 };
        let mut steps = 0;
        while empty < 2 {
            if steps >= max_shells {
                return Err(Error::SupportNotLocated);
            }
            let r = zeta_shell(f, sc, psi, g0, chi, k, budget)?;
            if r.value.is_zero() {
                empty += 1;
            } else {
                empty = 0;
                // |gamma|^{s - 3/2} = q^{-k s + 3k/2}
                value.add_term(-k, 3 * k, &r.value);
            }
            shells.push((k, r.value, r.refined));
            k += dir;
            steps += 1;
        }
    }
    shells.sort_by_key(|s| s.0);
    Ok(ZetaResult { value, shells })
}

// ---------------------------------------------------------------------------
// J0 of the newvector

/// Support boxes `(a, b, c, e)` of the four families.
pub const FAMILY_BOXES: [[i32; 4]; 4] = [[-1, 0, -2, 1], [0, 0, -2, 0], [-2, -1, -3, 1], [-1, -1, -3, 0]];

#[derive(Debug, Clone)]
pub struct J0NewResult {
    pub families: Vec<AutoResult>,
    pub total: BigRational,
}

/// `J_{0,i} = int_U Phi~_{new,i}(u) psi^{-1}_{c1,c2}(d^{-1} u d) du` over the
/// family box, using the closed family sums.
pub fn j0_newvector_family(model: &Model, psi: &PsiU, family: u8, resolution: Option<[i32; 4]>, budget: AutoBudget) -> Result<AutoResult, Error> {
    let f = model.f;
    let integrand = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let v = model.matcoeff_new_family(family, x[0], x[1], x[2], x[3])?;
        if v.is_zero() {
            return Ok(());
        }
        // d^{-1} u d scales a and e by varpi^{-1}
        let arg = psi.inv_arg(x[0], x[3]).shift(-1);
        acc.add_value(&v.mul(&crate::cyclo::psi(&arg)?));
        Ok(())
    };
    let lows = FAMILY_BOXES[family as usize - 1];
    let res = resolution.unwrap_or([1; 4]);
    let bx = LatticeBox::new((0..4).map(|i| Coord::add(lows[i], lows[i] + res[i])).collect());
    match resolution {
        Some(_) => {
            let value = integrate(&f, &integrand, &bx)?;
            let refined = value == integrate(&f, &integrand, &bx.refined())?;
            Ok(AutoResult { value, bx, refined })
        }
        None => integrate_auto(&f, &integrand, &bx, AutoBudget { guard_shells: 0, ..budget }),
    }
}

/// `J0(f_new) = q^5 / ((q-1)^2 (q+1)^2) * sum_i J_{0,i}`.
pub fn j0_newvector(model: &Model, psi: &PsiU, resolutions: Option<[[i32; 4]; 4]>, budget: AutoBudget) -> Result<J0NewResult, Error> {
    let mut families = Vec::new();
    let mut sum = Cyclotomic::zero(model.p());
    for i in 1..=4u8 {
        let r = j0_newvector_family(model, psi, i, resolutions.map(|rs| rs[i as usize - 1]), budget)?;
        sum = sum.add(&r.value);
        families.push(r);
    }
    let q = model.f.q();
    let norm = ratio(q.pow(5), (q - 1).pow(2) * (q + 1).pow(2));
    let total = sum.to_rational()? * norm;
    Ok(J0NewResult { families, total })
}

// ---------------------------------------------------------------------------
// Bessel integral

/// `S = diag(sa, sc)` with `sqrt(-sa sc) = r sqrt(-a)`; the torus element
/// with image `1 + Y sqrt(-a)` is `[[1, sc Y/r], [-sa Y/r, 1]]`.
#[derive(Debug, Clone, Copy)]
pub struct BesselShape {
    pub sa: PAdic,
    pub sc: PAdic,
    pub r: PAdic,
}

impl BesselShape {
    pub fn standard(f: &Field, a: PAdic) -> Self {
        BesselShape { sa: a, sc: f.one(), r: f.one() }
    }

    /// `lam S`.
    pub fn scaled(&self, lam: PAdic) -> Self {
        BesselShape { sa: self.sa * lam, sc: self.sc * lam, r: self.r * lam }
    }

    /// `tA S A` for `A = diag(1, u)`.
    pub fn twisted(&self, u: PAdic) -> Self {
        BesselShape { sa: self.sa, sc: self.sc * u * u, r: self.r * u }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BesselSetup {
    pub a: PAdic,
    pub m0: i32,
    pub u0: PAdic,
}

impl BesselSetup {
    pub fn new(a: PAdic, m0: i32, u0: PAdic) -> Result<Self, Error> {
        let p = a.prime();
        if m0 < 2 {
            return Err(Error::BadParameter("m0 must be at least 2".into()));
        }
        if !u0.is_unit()? {
            return Err(Error::BadParameter("u0 must be a unit".into()));
        }
        if !a.is_unit()? {
            return Err(Error::BadParameter("a must be a unit".into()));
        }
        let r = (-a).residue(1)?;
        if legendre(r, p) != -1 {
            return Err(Error::BadParameter("-a must be a non-square".into()));
        }
        if 2 * m0 - 3 < 0 {
            return Err(Error::BadParameter("2 m0 - 3 < v(a)".into()));
        }
        Ok(BesselSetup { a, m0, u0 })
    }

    /// Argument `x` with `Lambda(1 + Y sqrt(-a)) = psi(x)` for
    /// `Y in p^{m0-1}`.
    pub fn germ_arg(&self, y: &PAdic) -> Result<PAdic, Error> {
        if !y.in_ideal(self.m0 - 1)? {
            return Err(Error::UnsupportedVector);
        }
        Ok((self.u0 * *y).shift(-self.m0))
    }
}

/// `B(g0 . f_min)` for `theta_S` and `Lambda` given by the germ: the
/// integral over `Y, u, w, z` of
/// `f_min(g0^{-1} n(u,w,z) t(Y) g0) Lambda^{-1}(1 + Y sqrt(-a))
/// theta_S^{-1}(n) |1 + a Y^2|^{-1}`.
pub fn bessel(
    f: &Field,
    sc: &SignedChar,
    setup: &BesselSetup,
    shape: &BesselShape,
    g0: &GSp4,
    budget: AutoBudget,
) -> Result<AutoResult, Error> {
    let g0i = g0.inv()?;
    let m0 = setup.m0;
    let rinv = shape.r.inv()?;
    let integrand = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let (y, u, w, z) = (x[0], x[1], x[2], x[3]);
        let ys = y * rinv;
        let t = embed_torus(f, shape.sc * ys, -(shape.sa * ys))?;
        let g = g0i.mul(&gsp4::n_uwz(f, u, w, z)).mul(&t).mul(g0);
        if let Some((ph, s)) = sc.phase(&g)? {
            let det = f.one() + setup.a * y * y;
            let qexp = det.valuation().unwrap_or(0);
            let arg = ph.shift(-1) - setup.germ_arg(&y)? - (shape.sa * z + shape.sc * w);
            acc.add_psi(&arg, s as i128, qexp)?;
        }
        Ok(())
    };
    let lows = [m0 - 1, m0 - 2, -1, 2 * m0 - 3];
    let bx = LatticeBox::new(lows.iter().map(|&l| Coord::add(l, l + 1)).collect());
    integrate_auto(f, &integrand, &bx, budget)
}

/// `[[g, 0], [0, det(g) w tg^{-1} w]]` for `g = [[1, x], [y, 1]]`.
pub fn embed_torus(f: &Field, x: PAdic, y: PAdic) -> Result<GSp4, Error> {
    let o = f.one();
    let mut m = [[f.zero(); 4]; 4];
    m[0][0] = o;
    m[0][1] = x;
    m[1][0] = y;
    m[1][1] = o;
    m[2][2] = o;
    m[2][3] = -x;
    m[3][2] = -y;
    m[3][3] = o;
    GSp4::make(m)
}

/// `int_F |1 + a y^2|^{-1} dy`: the unit ball and `shells` valuation rings
/// by lattice sums, the remaining geometric tail in closed form.
pub fn bessel_volume(f: &Field, a: PAdic, shells: i32) -> Result<BigRational, Error> {
    let q = f.q();
    let integrand = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
        let det = f.one() + a * x[0] * x[0];
        acc.add_psi(&f.zero(), 1, det.valuation().ok_or(Error::PrecisionExhausted)?)
    };
    let mut total = integrate(f, &integrand, &LatticeBox::new(vec![Coord::add(0, 1)]))?.to_rational()?;
    for k in 1..=shells {
        // ring v(y) = -k at resolution p^{-k+1}
        let bx = LatticeBox::new(vec![Coord::add(-k, -k + 1)]);
        let ring = |x: &[PAdic], acc: &mut Accum| -> Result<(), Error> {
            if x[0].valuation() == Some(-k) {
                integrand(x, acc)?;
            }
            Ok(())
        };
        total += integrate(f, &ring, &bx)?.to_rational()?;
    }
    // sum_{k > shells} (1 - q^{-1}) q^{-k}
    let tail = (BigRational::one() - ratio(1, q)) * q_pow(f.p, -(shells + 1)) / (BigRational::one() - ratio(1, q));
    Ok(total + tail)
}

/// Germ multiplicativity on `1 + p^{m0-1} o_L` modulo `F^x`: the germ of
/// the normalized product agrees with the sum of the germs.
pub fn germ_multiplicative(f: &Field, setup: &BesselSetup, y1: PAdic, y2: PAdic) -> Result<bool, Error> {
    let m = setup.m0;
    let (a1, a2) = (y1 * f.pi(m - 1), y2 * f.pi(m - 1));
    // (1 + a1 s)(1 + a2 s) = (1 - a a1 a2) + (a1 + a2) s
    let x = f.one() - setup.a * a1 * a2;
    let ynorm = (a1 + a2) * x.inv()?;
    let lhs = setup.germ_arg(&ynorm)?;
    let rhs = setup.germ_arg(&a1)? + setup.germ_arg(&a2)?;
    (lhs - rhs).in_ideal(0)
}

/// `(q^4 - 1)(q^2 - 1) / 2` recovered as `1 / vol(Z\H')` from the residue
/// group orders.
pub fn formal_degree(q: u32, cap: usize) -> Result<(BigRational, gsp4::ResidueOrders), Error> {
    let orders = gsp4::residue_group_order(q, cap)?;
    let vol_h = ratio(orders.image as i64, orders.group as i64);
    let vol_hprime = vol_h * BigRational::from_integer(2.into());
    if vol_hprime.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((vol_hprime.recip(), orders))
}
