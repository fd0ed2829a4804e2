//! Affine generic characters, the minimal vector and the paramodular
//! newvector in the induced model, matrix coefficients, and the Hecke,
//! Atkin-Lehner and support checks at level 5.

use rand::Rng;
use rayon::prelude::*;

use crate::cyclo::{CycloSum, Cyclotomic};
use crate::gsp4::{self, h_scalar, GSp4, HClass, HPrime, SRep, SubgroupTag};
use crate::padic::PAdic;
use crate::{Error, Field};

/// `chi_{t1,t2,t3}` on `H = Z K'`, trivial on the centre.
#[derive(Debug, Clone, Copy)]
pub struct AffineChar {
    pub t1: PAdic,
    pub t2: PAdic,
    pub t3: PAdic,
}

impl AffineChar {
    pub fn new(t1: PAdic, t2: PAdic, t3: PAdic) -> Result<Self, Error> {
        for t in [t1, t2, t3] {
            if !t.is_unit()? {
                return Err(Error::BadParameter(format!("{t:?} is not a unit")));
            }
        }
        Ok(AffineChar { t1, t2, t3 })
    }

    /// `chi_{1,1,t}`.
    pub fn standard(f: &Field, t: PAdic) -> Result<Self, Error> {
        Self::new(f.one(), f.one(), t)
    }

    /// `x` with `chi(h) = psi0(x)`, or `None` if `h` is not in `H`.
    pub fn phase(&self, h: &GSp4) -> Result<Option<PAdic>, Error> {
        let Some(z) = h_scalar(h)? else { return Ok(None) };
        let zi = z.inv()?;
        let r = self.t1 * h.entry(0, 1) + self.t2 * h.entry(1, 2) + (self.t3 * h.entry(3, 0)).shift(-1);
        Ok(Some(r * zi))
    }

    pub fn eval(&self, h: &GSp4) -> Result<Cyclotomic, Error> {
        match self.phase(h)? {
            Some(x) => crate::cyclo::psi0(&x),
            None => Err(Error::NotInH),
        }
    }

    /// `chi^m(x) = chi(m x m^{-1})` for `m = diag(a, b, c/b, c/a)`.
    pub fn orbit_act(&self, m: &GSp4) -> Result<AffineChar, Error> {
        let (a, b) = (m.entry(0, 0), m.entry(1, 1));
        let c = m.mu();
        for (i, j) in (0..4).flat_map(|i| (0..4).map(move |j| (i, j))) {
            if i != j && !m.entry(i, j).is_zero() {
                return Err(Error::BadParameter("orbit action needs a diagonal element".into()));
            }
        }
        Self::new(self.t1 * a.div(&b)?, self.t2 * b * b.div(&c)?, self.t3 * c.div(&(a * a))?)
    }

    /// `t1^2 t2 t3` modulo `p`.
    pub fn orbit_invariant(&self) -> Result<u64, Error> {
        (self.t1 * self.t1 * self.t2 * self.t3).residue(1)
    }

    /// `m0 = diag(1, t1/l1, t1 t2/(l1 l2), t1^2 t2/(l1^2 l2))`, which carries
    /// `self` to `eta` when the invariants agree.
    pub fn transporter(&self, f: &Field, eta: &AffineChar) -> Result<GSp4, Error> {
        let r1 = self.t1.div(&eta.t1)?;
        let r2 = self.t2.div(&eta.t2)?;
        gsp4::diag(f, [f.one(), r1, r1 * r2, r1 * r1 * r2])
    }
}

/// `chi^eps` on `H' = H ⊔ g_chi H` for `chi = chi_{1,1,t}`.
#[derive(Clone, Copy)]
pub struct SignedChar {
    pub chi: AffineChar,
    pub eps: i8,
    pub hp: HPrime,
}

impl SignedChar {
    pub fn new(f: &Field, t: PAdic, eps: i8) -> Result<Self, Error> {
        if eps != 1 && eps != -1 {
            return Err(Error::BadParameter(format!("sign {eps}")));
        }
        let chi = AffineChar::standard(f, t)?;
        Ok(SignedChar { chi, eps, hp: HPrime::new(f, chi.t2, chi.t3)? })
    }

    /// `(x, s)` with `chi^eps(g) = s psi0(x)`, `None` off `H'`.
    pub fn phase(&self, g: &GSp4) -> Result<Option<(PAdic, i8)>, Error> {
        match self.hp.split(g)? {
            None => Ok(None),
            Some((class, h)) => {
                let x = self.chi.phase(&h)?.ok_or(Error::NotInH)?;
                let s = if matches!(class, HClass::InGchiH) { self.eps } else { 1 };
                Ok(Some((x, s)))
            }
        }
    }

    pub fn eval(&self, g: &GSp4) -> Result<Cyclotomic, Error> {
        Ok(match self.phase(g)? {
            None => Cyclotomic::zero(g.prime()),
            Some((x, s)) => crate::cyclo::psi0(&x)?.scale_int(s as i64),
        })
    }
}

#[derive(Clone, Debug)]
pub enum ModelVector {
    Minimal,
    New,
    ShiftedNew,
    /// `(f . g0)(g) = f(g g0)`.
    Translate(Box<ModelVector>, GSp4),
}

impl ModelVector {
    pub fn translate(self, g0: GSp4) -> Self {
        ModelVector::Translate(Box::new(self), g0)
    }
}

/// The representation `sigma_chi^eps` with its cached coset data.
pub struct Model {
    pub f: Field,
    pub t: PAdic,
    pub sc: SignedChar,
    pub s: Vec<SRep>,
    s_inv: Vec<GSp4>,
    /// `S d^{-1}`, the representatives for the shifted newvector.
    pub s_tilde: Vec<GSp4>,
    s_tilde_inv: Vec<GSp4>,
    pub d: GSp4,
}

impl Model {
    pub fn new(f: &Field, t: PAdic, eps: i8) -> Result<Self, Error> {
        let sc = SignedChar::new(f, t, eps)?;
        let s = gsp4::representatives_s(f);
        let d = gsp4::d_pi(f, 1, 1);
        let d_inv = d.inv()?;
        let s_inv = s.iter().map(|r| r.g.inv()).collect::<Result<Vec<_>, _>>()?;
        let s_tilde: Vec<GSp4> = s.iter().map(|r| r.g.mul(&d_inv)).collect();
        let s_tilde_inv = s_tilde.iter().map(|g| g.inv()).collect::<Result<Vec<_>, _>>()?;
        Ok(Model { f: *f, t, sc, s, s_inv, s_tilde, s_tilde_inv, d })
    }

    pub fn eps(&self) -> i8 {
        self.sc.eps
    }

    pub fn p(&self) -> u32 {
        self.f.p
    }

    /// Value of the newvector as a phase, by locating the coset `H' s`.
    fn new_phase(&self, g: &GSp4) -> Result<Option<(PAdic, i8)>, Error> {
        for si in &self.s_inv {
            if let Some(ph) = self.sc.phase(&g.mul(si))? {
                return Ok(Some(ph));
            }
        }
        Ok(None)
    }

    /// Index of the representative of `S` whose `H'`-coset contains `g`.
    pub fn locate(&self, g: &GSp4) -> Result<Option<usize>, Error> {
        for (i, si) in self.s_inv.iter().enumerate() {
            if self.sc.hp.contains(&g.mul(si))? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn phase(&self, v: &ModelVector, g: &GSp4) -> Result<Option<(PAdic, i8)>, Error> {
        match v {
            ModelVector::Minimal => self.sc.phase(g),
            ModelVector::New => self.new_phase(g),
            ModelVector::ShiftedNew => self.new_phase(&g.mul(&self.d)),
            ModelVector::Translate(base, g0) => self.phase(base, &g.mul(g0)),
        }
    }

    pub fn eval(&self, v: &ModelVector, g: &GSp4) -> Result<Cyclotomic, Error> {
        Ok(match self.phase(v, g)? {
            None => Cyclotomic::zero(self.p()),
            Some((x, s)) => crate::cyclo::psi0(&x)?.scale_int(s as i64),
        })
    }

    /// `H'`-coset representatives covering the support of `v`.
    pub fn support_reps(&self, v: &ModelVector) -> Result<Vec<GSp4>, Error> {
        Ok(match v {
            ModelVector::Minimal => vec![GSp4::identity(&self.f)],
            ModelVector::New => self.s.iter().map(|r| r.g).collect(),
            ModelVector::ShiftedNew => self.s_tilde.clone(),
            ModelVector::Translate(base, g0) => {
                let gi = g0.inv()?;
                self.support_reps(base)?.iter().map(|r| r.mul(&gi)).collect()
            }
        })
    }

    /// `<v1, v2>` normalized so that the minimal vector has norm 1.
    pub fn inner_product(&self, v1: &ModelVector, v2: &ModelVector) -> Result<Cyclotomic, Error> {
        let mut acc = CycloSum::new(self.p());
        for r in self.support_reps(v1)? {
            let (Some((x1, s1)), Some((x2, s2))) = (self.phase(v1, &r)?, self.phase(v2, &r)?) else {
                continue;
            };
            acc.add_psi(&(x1 - x2).shift(-1), (s1 * s2) as i128)?;
        }
        Ok(acc.value())
    }

    /// The newvector rebuilt as a sum of minimal-vector translates, using the
    /// inverse representatives written out family by family.
    pub fn new_from_minimal(&self, g: &GSp4) -> Result<Cyclotomic, Error> {
        let f = &self.f;
        let q = f.q();
        let o = f.one();
        let tail = gsp4::diag(f, [o, f.pi(1), f.pi(2), f.pi(3)])?;
        let lead1 = GSp4::from_ints(f, [[1, 0, 0, 0], [0, 0, -1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])?;
        let mk = |entries: [(usize, usize, PAdic); 4]| -> Result<GSp4, Error> {
            let mut m = [[f.zero(); 4]; 4];
            for (i, j, x) in entries {
                m[i][j] = x;
            }
            GSp4::make(m)
        };
        let lead3 = mk([(0, 3, -f.pi(-5)), (1, 2, -o), (2, 1, o), (3, 0, f.pi(5))])?;
        let lead4 = mk([(0, 3, -f.pi(-5)), (1, 1, o), (2, 2, o), (3, 0, f.pi(5))])?;
        let mut acc = CycloSum::new(self.p());
        for family in 1..=4 {
            let lead = match family {
                1 => Some(lead1),
                2 => None,
                3 => Some(lead3),
                _ => Some(lead4),
            };
            let xs = if family % 2 == 1 { q * q } else { q };
            let ys = if family <= 2 { q * q } else { q };
            for u in 1..q {
                for v in 1..q {
                    let dt = gsp4::d_uv(f, f.int(u), f.int(v)).mul(&tail);
                    for x in 0..xs {
                        let xv = if family % 2 == 1 { f.int(x) } else { f.int(x) * f.pi(1) };
                        let ld = gsp4::lower_32(f, xv).mul(&dt);
                        for y in 0..ys {
                            let yv = f.int(y) * f.pi(if family <= 2 { -5 } else { -4 });
                            let mut gi = gsp4::upper_14(f, yv).mul(&ld);
                            if let Some(l) = &lead {
                                gi = l.mul(&gi);
                            }
                            if let Some((x, s)) = self.sc.phase(&g.mul(&gi))? {
                                acc.add_psi(&x.shift(-1), s as i128)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(acc.value())
    }

    /// `Phi~_new(g)` by summing over pairs `(s, s')` of `S d^{-1}` with
    /// `s g s'^{-1}` in `H`, optionally restricted to one family.
    pub fn matcoeff_new_bruteforce(&self, g: &GSp4, family: Option<u8>) -> Result<Cyclotomic, Error> {
        let keep: Vec<usize> =
            (0..self.s.len()).filter(|&i| family.is_none_or(|k| self.s[i].family == k)).collect();
        let parts: Vec<Result<CycloSum, Error>> = keep
            .par_iter()
            .map(|&i| {
                let sg = self.s_tilde[i].mul(g);
                let mut acc = CycloSum::new(self.p());
                for &j in &keep {
                    let h = sg.mul(&self.s_tilde_inv[j]);
                    if let Some(x) = self.sc.chi.phase(&h)? {
                        acc.add_psi(&x.shift(-1), 1)?;
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut total = CycloSum::new(self.p());
        for part in parts {
            total.merge(&part?);
        }
        Ok(total.value())
    }

    /// Closed character sums for the four families on unipotent elements
    /// `u(a,b,c,e)`; zero outside each family's support box.
    pub fn matcoeff_new_family(&self, family: u8, a: PAdic, b: PAdic, c: PAdic, e: PAdic) -> Result<Cyclotomic, Error> {
        let f = &self.f;
        let q = f.q();
        let p = self.p();
        let mut acc = CycloSum::new(p);
        let pi = f.pi(1);
        let abc = a * b + c;
        let unit = |x: PAdic| x.is_unit();
        match family {
            1 => {
                if !(a.in_ideal(-1)? && b.in_ideal(0)? && c.in_ideal(-2)? && e.in_ideal(1)?) {
                    return Ok(Cyclotomic::zero(p));
                }
                let w0 = ((q - 1) * q * q) as i128;
                for v in 1..q {
                    for x in 0..q * q {
                        let w = a * pi * f.int(x) + b;
                        if w.in_ideal(1)? {
                            acc.add_psi(&(f.int(v) * w).shift(-2), w0)?;
                        }
                    }
                }
            }
            2 => {
                if !(a.in_ideal(0)? && b.in_ideal(0)? && c.in_ideal(-2)? && e.in_ideal(0)?) {
                    return Ok(Cyclotomic::zero(p));
                }
                for u in 1..q {
                    for v in 1..q {
                        for x in 0..q {
                            let ex = f.one() + e * f.int(x);
                            if !unit(ex)? {
                                continue;
                            }
                            let (uu, vv) = (f.int(u), f.int(v));
                            let arg = vv * (a - b * f.int(x)) + e * uu * (vv * ex).inv()?;
                            acc.add_psi(&arg.shift(-1), (q * q) as i128)?;
                        }
                    }
                }
            }
            3 => {
                if !(a.in_ideal(-2)? && b.in_ideal(-1)? && c.in_ideal(-3)? && e.in_ideal(1)?) {
                    return Ok(Cyclotomic::zero(p));
                }
                for u in 1..q {
                    for v in 1..q {
                        for x in 0..q * q {
                            let bx = b + a * pi * f.int(x);
                            if !bx.in_ideal(0)? {
                                continue;
                            }
                            for y in 0..q {
                                let den = f.one() - abc * f.pi(3) * f.int(y);
                                if !unit(den)? {
                                    continue;
                                }
                                let arg = -(f.int(v) * bx * f.int(y)).shift(-1) - f.int(u) * abc * f.pi(2);
                                acc.add_psi(&arg, 1)?;
                            }
                        }
                    }
                }
            }
            4 => {
                if !(a.in_ideal(-1)? && b.in_ideal(-1)? && c.in_ideal(-3)? && e.in_ideal(0)?) {
                    return Ok(Cyclotomic::zero(p));
                }
                for u in 1..q {
                    for v in 1..q {
                        for x in 0..q {
                            let ex = f.one() + e * f.int(x);
                            if !unit(ex)? {
                                continue;
                            }
                            for y in 0..q {
                                let den = f.one() - abc * f.pi(3) * f.int(y);
                                if !unit(den)? {
                                    continue;
                                }
                                let (uu, vv) = (f.int(u), f.int(v));
                                let di = den.inv()?;
                                let arg = -(vv * (a - b * f.int(x)) * f.int(y) * di)
                                    + (e * uu * (vv * ex).inv()? * di).shift(-1)
                                    - self.t * abc * f.pi(2) * (uu * vv).inv()? * di * di;
                                acc.add_psi(&arg, 1)?;
                            }
                        }
                    }
                }
            }
            _ => return Err(Error::BadParameter(format!("family {family}"))),
        }
        Ok(acc.value())
    }

    /// The four sums making up `(T_{0,1} f)(d_{w,w})`, with the given
    /// element in the role of `t_5`.
    pub fn hecke_t01_terms(&self, t5: &GSp4) -> Result<[Cyclotomic; 4], Error> {
        let f = &self.f;
        let q = f.q();
        let d = self.d;
        let d1 = gsp4::d_ab(f, f.one(), f.pi(1))?;
        let d2 = gsp4::d_ab(f, f.pi(1), f.pi(-1))?;
        let z0 = f.zero();
        let res: Vec<PAdic> = (0..q).map(|n| f.int(n)).collect();
        let new = ModelVector::New;
        let mut sums = [CycloSum::new(self.p()), CycloSum::new(self.p()), CycloSum::new(self.p()), CycloSum::new(self.p())];
        let mut add = |k: usize, g: GSp4| -> Result<(), Error> {
            if let Some((x, s)) = self.phase(&new, &g)? {
                sums[k].add_psi(&x.shift(-1), s as i128)?;
            }
            Ok(())
        };
        for &x in &res {
            for &y in &res {
                for &z in &res {
                    let m = gsp4::u_abce(f, z0, y, z * f.pi(-5), x);
                    add(0, d.mul(&m).mul(&d1))?;
                }
                // C: [[1,,y,],[,1,x,y],[,,1,],[,,,1]]
                let m = gsp4::u_abce(f, z0, y, z0, x);
                add(2, d.mul(t5).mul(&m).mul(&d1))?;
            }
            for &z in &res {
                let m = gsp4::u_abce(f, x, z0, z * f.pi(-5), z0);
                add(1, d.mul(&m).mul(&d2))?;
            }
            let m = gsp4::u_abce(f, x, z0, z0, z0);
            add(3, d.mul(t5).mul(&m).mul(&d2))?;
        }
        Ok([sums[0].value(), sums[1].value(), sums[2].value(), sums[3].value()])
    }
}

/// `#{(i, j) : i, j >= 1, 2i + j <= n - 2}`.
pub fn dim_astar(n: i64) -> i64 {
    let mut c = 0;
    for i in 1..=n.max(0) {
        for j in 1..=n.max(0) {
            if support_pair_admissible(i, j, n) {
                c += 1;
            }
        }
    }
    c
}

pub fn support_pair_admissible(i: i64, j: i64, n: i64) -> bool {
    i >= 1 && j >= 1 && 2 * i + j <= n - 2
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct SupportReport {
    pub trials: usize,
    /// Samples whose conjugate landed in `H`.
    pub hits: usize,
    /// Hits on which `chi` was nontrivial.
    pub witnesses: usize,
}

/// Samples `k` in `K(n)` and tests `chi` on `g k g^{-1}` for
/// `g = d_{w^i, w^j}` whenever that lies in `H`. Half of the samples are
/// drawn from root elements already adapted to `H ∩ g K(n) g^{-1}`.
pub fn support_criterion_check<R: Rng>(
    f: &Field,
    chi: &AffineChar,
    i: i32,
    j: i32,
    n: i32,
    trials: usize,
    rng: &mut R,
) -> Result<SupportReport, Error> {
    let g = gsp4::d_pi(f, i, j);
    let gi = g.inv()?;
    // conjugation shifts for the roots x1..x4 under g
    let shift = [i, j, i + j, 2 * i + j];
    let k_pos = [0, 0, 0, -n];
    let k_neg = [n, 0, n, n];
    let mut rep = SupportReport { trials, ..Default::default() };
    for trial in 0..trials {
        let k = if trial % 2 == 0 {
            gsp4::random_paramodular(f, rng, n)
        } else {
            let torus = gsp4::torus(
                f,
                f.one() + gsp4::random_in_ideal(f, rng, 1),
                f.one() + gsp4::random_in_ideal(f, rng, 1),
                f.one() + gsp4::random_in_ideal(f, rng, 1),
            )?;
            let mut k = torus;
            for _ in 0..8 {
                let r = rng.gen_range(0..8usize);
                let (w, pos) = (r % 4, r < 4);
                let depth = if pos { k_pos[w].max(-shift[w]) } else { k_neg[w].max(1 + shift[w]) };
                let x = gsp4::random_in_ideal(f, rng, depth);
                let e = if pos { gsp4::root_x(f, w as u8 + 1, x) } else { gsp4::root_y(f, w as u8 + 1, x) };
                k = k.mul(&e);
            }
            debug_assert!(gsp4::member(&k, SubgroupTag::Paramodular(n as u32)).unwrap_or(false));
            k
        };
        let h = g.mul(&k).mul(&gi);
        if let Some(x) = chi.phase(&h)? {
            rep.hits += 1;
            if !x.in_ideal(1)? {
                rep.witnesses += 1;
            }
        }
    }
    Ok(rep)
}
