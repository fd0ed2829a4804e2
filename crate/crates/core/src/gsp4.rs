//! GSp(4) over Q_p at working precision: elements, special matrices,
//! congruence subgroups, the coset representatives of `H d K(5)`, random
//! samplers and the residue-field group orders.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::padic::PAdic;
use crate::{Error, Field};

pub type Mat4 = [[PAdic; 4]; 4];

/// Signs of the antidiagonal form: `J[i][3-i] = EPS[i]`.
const EPS: [i64; 4] = [1, 1, -1, -1];

fn zero_mat(p: u32) -> Mat4 {
    [[PAdic::zero(p); 4]; 4]
}

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let p = a[0][0].prime();
    let mut out = zero_mat(p);
    for i in 0..4 {
        for j in 0..4 {
            let mut s = PAdic::zero(p);
            for k in 0..4 {
                // skipping exact zeros keeps constant patterns exact
                if a[i][k].is_zero() && a[i][k].precision().is_none() {
                    continue;
                }
                if b[k][j].is_zero() && b[k][j].precision().is_none() {
                    continue;
                }
                s = s + a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// An element of GSp(4) with its multiplier.
#[derive(Clone, Copy)]
pub struct GSp4 {
    m: Mat4,
    mu: PAdic,
}

impl GSp4 {
    /// Checks `tg J g = mu J` and returns the element.
    pub fn make(m: Mat4) -> Result<Self, Error> {
        let p = m[0][0].prime();
        let mut x = zero_mat(p);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = PAdic::zero(p);
                for k in 0..4 {
                    let t = m[k][i] * m[3 - k][j];
                    s = if EPS[k] > 0 { s + t } else { s - t };
                }
                x[i][j] = s;
            }
        }
        let mu = x[0][3];
        if mu.is_zero() {
            return Err(Error::NotInGroup);
        }
        for i in 0..4 {
            for j in 0..4 {
                let target = if j == 3 - i {
                    if EPS[i] > 0 {
                        mu
                    } else {
                        -mu
                    }
                } else {
                    PAdic::zero(p)
                };
                if !(x[i][j] - target).is_zero() {
                    return Err(Error::NotInGroup);
                }
            }
        }
        Ok(GSp4 { m, mu })
    }

    /// Builds an element from integer entries (scaled by nothing).
    pub fn from_ints(f: &Field, rows: [[i64; 4]; 4]) -> Result<Self, Error> {
        let mut m = zero_mat(f.p);
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = f.int(rows[i][j]);
            }
        }
        Self::make(m)
    }

    pub fn identity(f: &Field) -> Self {
        let mut m = zero_mat(f.p);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = f.one();
        }
        GSp4 { m, mu: f.one() }
    }

    pub fn prime(&self) -> u32 {
        self.mu.prime()
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    /// Entry at row `i`, column `j`, both 0-based.
    pub fn entry(&self, i: usize, j: usize) -> PAdic {
        self.m[i][j]
    }

    pub fn mu(&self) -> PAdic {
        self.mu
    }

    pub fn mul(&self, o: &GSp4) -> GSp4 {
        GSp4 { m: mat_mul(&self.m, &o.m), mu: self.mu * o.mu }
    }

    /// `g^{-1} = mu^{-1} J^{-1} tg J`, entrywise
    /// `(g^{-1})_{ij} = mu^{-1} eps_i eps_j g_{3-j,3-i}`.
    pub fn inv(&self) -> Result<GSp4, Error> {
        let mi = self.mu.inv()?;
        let p = self.prime();
        let mut m = zero_mat(p);
        for i in 0..4 {
            for j in 0..4 {
                let e = self.m[3 - j][3 - i];
                let e = if EPS[i] * EPS[j] > 0 { e } else { -e };
                m[i][j] = if e.is_zero() && e.precision().is_none() { e } else { e * mi };
            }
        }
        Ok(GSp4 { m, mu: mi })
    }

    /// `z g` for a scalar `z`.
    pub fn scale(&self, z: PAdic) -> GSp4 {
        let mut m = self.m;
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                if !(e.is_zero() && e.precision().is_none()) {
                    *e = *e * z;
                }
            }
        }
        GSp4 { m, mu: self.mu * z * z }
    }

    /// `g^{-1} h` without forming the inverse separately.
    pub fn ldiv(&self, h: &GSp4) -> Result<GSp4, Error> {
        Ok(self.inv()?.mul(h))
    }

    /// Entrywise equality at the tracked precision.
    pub fn approx_eq(&self, o: &GSp4) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.m[i][j] - o.m[i][j]).is_zero()))
            && (self.mu - o.mu).is_zero()
    }

    /// Smallest absolute precision among the entries.
    pub fn min_precision(&self) -> Option<i32> {
        self.m.iter().flatten().filter_map(|e| e.precision()).min()
    }
}

impl fmt::Debug for GSp4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GSp4 (mu = {:?})", self.mu)?;
        for row in &self.m {
            writeln!(f, "  {:?}", row)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// special elements

fn from_entries(f: &Field, entries: &[(usize, usize, PAdic)]) -> Result<GSp4, Error> {
    let mut m = zero_mat(f.p);
    for &(i, j, x) in entries {
        m[i][j] = x;
    }
    GSp4::make(m)
}

fn unit_required(x: &PAdic) -> Result<(), Error> {
    if x.is_unit().unwrap_or(false) {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("{x:?} is not a unit")))
    }
}

pub fn s1(f: &Field) -> GSp4 {
    let o = f.one();
    from_entries(f, &[(0, 1, o), (1, 0, o), (2, 3, o), (3, 2, o)]).expect("s1")
}

pub fn s2(f: &Field) -> GSp4 {
    let o = f.one();
    from_entries(f, &[(0, 0, o), (1, 2, o), (2, 1, -o), (3, 3, o)]).expect("s2")
}

pub fn diag(f: &Field, d: [PAdic; 4]) -> Result<GSp4, Error> {
    from_entries(f, &[(0, 0, d[0]), (1, 1, d[1]), (2, 2, d[2]), (3, 3, d[3])])
}

/// `d_{a,b} = diag(a^2 b, a b, a, 1)`.
pub fn d_ab(f: &Field, a: PAdic, b: PAdic) -> Result<GSp4, Error> {
    diag(f, [a * a * b, a * b, a, f.one()])
}

/// `d_{varpi^i, varpi^j}`.
pub fn d_pi(f: &Field, i: i32, j: i32) -> GSp4 {
    d_ab(f, f.pi(i), f.pi(j)).expect("diagonal")
}

/// The torus element `diag(a, b, c/b, c/a)` with multiplier `c`.
pub fn torus(f: &Field, a: PAdic, b: PAdic, c: PAdic) -> Result<GSp4, Error> {
    diag(f, [a, b, c.div(&b)?, c.div(&a)?])
}

/// The element normalizing `K'` and `H` attached to `(t1, t2, t3)`; depends
/// only on `t2/t3`.
pub fn g_chi(f: &Field, t2: PAdic, t3: PAdic) -> Result<GSp4, Error> {
    unit_required(&t2)?;
    unit_required(&t3)?;
    let w = f.pi(1) * t2.div(&t3)?;
    let o = f.one();
    from_entries(f, &[(0, 2, o), (1, 3, -o), (2, 0, -w), (3, 1, w)])
}

/// Atkin-Lehner element of level `n`.
pub fn u_n(f: &Field, n: i32) -> GSp4 {
    let o = f.one();
    let w = f.pi(n);
    from_entries(f, &[(0, 2, o), (1, 3, -o), (2, 0, w), (3, 1, -w)]).expect("u_n")
}

/// The Hecke element `t_n` with zero `(1,1)` entry.
pub fn t_n(f: &Field, n: i32) -> GSp4 {
    let o = f.one();
    from_entries(f, &[(0, 3, -f.pi(-n)), (1, 1, o), (2, 2, o), (3, 0, f.pi(n))]).expect("t_n")
}

/// Variant of `t_5` with a `1` in the `(1,1)` position; it is again
/// symplectic with multiplier 1.
pub fn t5_unipotent_variant(f: &Field) -> GSp4 {
    let o = f.one();
    from_entries(
        f,
        &[(0, 0, o), (0, 3, -f.pi(-5)), (1, 1, o), (2, 2, o), (3, 0, f.pi(5))],
    )
    .expect("t5 variant")
}

/// `u(a,b,c,e)`, the generic element of the upper unipotent radical.
pub fn u_abce(f: &Field, a: PAdic, b: PAdic, c: PAdic, e: PAdic) -> GSp4 {
    let o = f.one();
    from_entries(
        f,
        &[
            (0, 0, o),
            (0, 1, a),
            (0, 2, b + a * e),
            (0, 3, c + a * b),
            (1, 1, o),
            (1, 2, e),
            (1, 3, b),
            (2, 2, o),
            (2, 3, -a),
            (3, 3, o),
        ],
    )
    .expect("u(a,b,c,e)")
}

/// Siegel unipotent `n(u,w,z)`.
pub fn n_uwz(f: &Field, u: PAdic, w: PAdic, z: PAdic) -> GSp4 {
    let o = f.one();
    from_entries(
        f,
        &[(0, 0, o), (0, 2, u), (0, 3, z), (1, 1, o), (1, 2, w), (1, 3, u), (2, 2, o), (3, 3, o)],
    )
    .expect("n(u,w,z)")
}

/// Torus of the Bessel subgroup: `[[1,y,,],[-ya,1,,],[,,1,-y],[,,ya,1]]`.
pub fn bessel_torus(f: &Field, y: PAdic, a: PAdic) -> Result<GSp4, Error> {
    let o = f.one();
    let ya = y * a;
    from_entries(
        f,
        &[(0, 0, o), (0, 1, y), (1, 0, -ya), (1, 1, o), (2, 2, o), (2, 3, -y), (3, 2, ya), (3, 3, o)],
    )
}

/// `diag(uv, u, v, 1)`.
pub fn d_uv(f: &Field, u: PAdic, v: PAdic) -> GSp4 {
    diag(f, [u * v, u, v, f.one()]).expect("diag(uv,u,v,1)")
}

/// Identity plus `x` in position (3,2).
pub fn lower_32(f: &Field, x: PAdic) -> GSp4 {
    root_y(f, 2, x)
}

/// Identity plus `y` in position (1,4).
pub fn upper_14(f: &Field, y: PAdic) -> GSp4 {
    root_x(f, 4, y)
}

/// `[[,,,w^-5],[,,1,],[,-1,,],[-w^5,,,]]`.
pub fn w3(f: &Field) -> GSp4 {
    let o = f.one();
    from_entries(f, &[(0, 3, f.pi(-5)), (1, 2, o), (2, 1, -o), (3, 0, -f.pi(5))]).expect("w3")
}

/// `[[,,,w^-5],[,1,,],[,,1,],[-w^5,,,]]`.
pub fn w4(f: &Field) -> GSp4 {
    let o = f.one();
    from_entries(f, &[(0, 3, f.pi(-5)), (1, 1, o), (2, 2, o), (3, 0, -f.pi(5))]).expect("w4")
}

/// Positive root elements: 1: `E12 - E34`, 2: `E23`, 3: `E13 + E24`, 4: `E14`.
pub fn root_x(f: &Field, which: u8, r: PAdic) -> GSp4 {
    let o = f.one();
    let mut e: Vec<(usize, usize, PAdic)> = (0..4).map(|i| (i, i, o)).collect();
    match which {
        1 => e.extend([(0, 1, r), (2, 3, -r)]),
        2 => e.push((1, 2, r)),
        3 => e.extend([(0, 2, r), (1, 3, r)]),
        4 => e.push((0, 3, r)),
        _ => panic!("root index {which}"),
    }
    from_entries(f, &e).expect("root element")
}

/// Negative root elements, transposes of [`root_x`].
pub fn root_y(f: &Field, which: u8, r: PAdic) -> GSp4 {
    let o = f.one();
    let mut e: Vec<(usize, usize, PAdic)> = (0..4).map(|i| (i, i, o)).collect();
    match which {
        1 => e.extend([(1, 0, r), (3, 2, -r)]),
        2 => e.push((2, 1, r)),
        3 => e.extend([(2, 0, r), (3, 1, r)]),
        4 => e.push((3, 0, r)),
        _ => panic!("root index {which}"),
    }
    from_entries(f, &e).expect("root element")
}

// ---------------------------------------------------------------------------
// subgroups

#[derive(Debug, Clone, Copy)]
pub enum SubgroupTag {
    K,
    Kprime,
    Klingen(u32),
    Paramodular(u32),
    /// `d_{w,w} K(5) d_{w,w}^{-1}`
    ParamodularShifted5,
    Z,
    H,
    /// `H ⊔ g_chi H`, with `g_chi` given by the ratio `t2/t3`.
    Hprime(PAdic),
    E,
}

const NONE: i32 = i32::MIN;

fn pattern_ok(g: &GSp4, low: &[[i32; 4]; 4], one_plus_p_diag: bool) -> Result<bool, Error> {
    for i in 0..4 {
        for j in 0..4 {
            let e = g.m[i][j];
            if low[i][j] != NONE && !e.in_ideal(low[i][j])? {
                return Ok(false);
            }
            if one_plus_p_diag && i == j && !e.in_one_plus_p()? {
                return Ok(false);
            }
        }
    }
    g.mu.is_unit()
}

fn klingen_pattern(n: i32) -> [[i32; 4]; 4] {
    [[0, 0, 0, 0], [n, 0, 0, 0], [n, 0, 0, 0], [n, n, n, 0]]
}

/// Entry valuations of `d_{w,w} K(5) d_{w,w}^{-1}`.
pub const SHIFTED5_PATTERN: [[i32; 4]; 4] =
    [[0, 1, 2, -2], [4, 0, 1, 2], [3, -1, 0, 1], [2, 3, 4, 0]];

pub fn member(g: &GSp4, tag: SubgroupTag) -> Result<bool, Error> {
    match tag {
        SubgroupTag::K => pattern_ok(g, &[[0; 4]; 4], false),
        SubgroupTag::Kprime => {
            pattern_ok(g, &[[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]], true)
        }
        SubgroupTag::Klingen(n) => pattern_ok(g, &klingen_pattern(n as i32), false),
        SubgroupTag::Paramodular(n) => {
            let mut pat = klingen_pattern(n as i32);
            pat[0][3] = -(n as i32);
            pattern_ok(g, &pat, false)
        }
        SubgroupTag::ParamodularShifted5 => pattern_ok(g, &SHIFTED5_PATTERN, false),
        SubgroupTag::Z => {
            let d = g.m[0][0];
            if d.is_zero() {
                return Ok(false);
            }
            for i in 0..4 {
                for j in 0..4 {
                    let e = g.m[i][j];
                    let ok = if i == j { (e - d).is_zero() } else { e.is_zero() };
                    if !ok {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        SubgroupTag::H => Ok(h_scalar(g)?.is_some()),
        SubgroupTag::Hprime(w) => {
            let f = Field { p: g.prime(), prec: crate::padic::DEFAULT_PRECISION };
            let hp = HPrime::new(&f, w, f.one())?;
            Ok(!matches!(hp.classify(g)?, HClass::Neither))
        }
        SubgroupTag::E => Ok(g.mu.valuation().expect("nonzero multiplier") % 2 == 0),
    }
}

/// If `g` lies in `H = Z K'`, returns the scalar `z = g_44`.
pub fn h_scalar(g: &GSp4) -> Result<Option<PAdic>, Error> {
    let z = g.m[3][3];
    if z.is_zero() {
        let a = z.precision().unwrap_or(i32::MAX);
        let decided = g.m.iter().flatten().any(|e| e.valuation().is_some_and(|v| v < a));
        return if decided { Ok(None) } else { Err(Error::PrecisionExhausted) };
    }
    let vz = z.valuation().unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let e = g.m[i][j];
            if i == j {
                if i < 3 && !(e - z).in_ideal(vz + 1)? {
                    return Ok(None);
                }
            } else if !e.in_ideal(vz + (i > j) as i32)? {
                return Ok(None);
            }
        }
    }
    Ok(Some(z))
}

/// `g = z k'` with `z = g_44` and `k' in K'`.
pub fn decompose_h(g: &GSp4) -> Result<(PAdic, GSp4), Error> {
    match h_scalar(g)? {
        Some(z) => Ok((z, g.scale(z.inv()?))),
        None => Err(Error::NotInH),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum HClass {
    /// `g = h` with `h` in `H`; carries `h`'s scalar part.
    InH,
    /// `g = h g_chi` with `h` in `H`.
    InGchiH,
    Neither,
}

/// Membership in `H' = H ⊔ g_chi H` for a fixed `g_chi`.
#[derive(Clone, Copy)]
pub struct HPrime {
    pub gchi: GSp4,
    pub gchi_inv: GSp4,
}

impl HPrime {
    pub fn new(f: &Field, t2: PAdic, t3: PAdic) -> Result<Self, Error> {
        let gchi = g_chi(f, t2, t3)?;
        Ok(HPrime { gchi, gchi_inv: gchi.inv()? })
    }

    /// The two cosets are separated by the parity of `v(mu)`; the odd case
    /// is tested through `g g_chi^{-1}`, which lies in `H` exactly when
    /// `g_chi^{-1} g` does.
    pub fn classify(&self, g: &GSp4) -> Result<HClass, Error> {
        Ok(self.split(g)?.map_or(HClass::Neither, |(c, _)| c))
    }

    /// Class together with the `H` part `h` (`g = h` or `g = h g_chi`).
    pub fn split(&self, g: &GSp4) -> Result<Option<(HClass, GSp4)>, Error> {
        let v = g.mu.valuation().expect("nonzero multiplier");
        if v.rem_euclid(2) == 0 {
            Ok(h_scalar(g)?.map(|_| (HClass::InH, *g)))
        } else {
            let h = g.mul(&self.gchi_inv);
            Ok(h_scalar(&h)?.map(|_| (HClass::InGchiH, h)))
        }
    }

    pub fn contains(&self, g: &GSp4) -> Result<bool, Error> {
        Ok(self.split(g)?.is_some())
    }
}

// ---------------------------------------------------------------------------
// coset representatives

/// One representative of `H' \ H' d_{w,w} K(5)` with its parameters.
#[derive(Clone, Copy, Debug)]
pub struct SRep {
    pub family: u8,
    pub u: i64,
    pub v: i64,
    pub x: i64,
    /// `y` for families 1 and 2, `z` for families 3 and 4.
    pub y: i64,
    pub g: GSp4,
}

/// The four families of representatives; the ambient `d_{w,w}` is included.
pub fn representatives_s(f: &Field) -> Vec<SRep> {
    let q = f.q();
    let d = d_pi(f, 1, 1);
    let (s2m, w3m, w4m) = (s2(f), w3(f), w4(f));
    let mut out = Vec::with_capacity(((q - 1) * q * (q + 1)).pow(2) as usize);
    for family in 1u8..=4 {
        let x_range = if family % 2 == 1 { q * q } else { q };
        let y_range = if family <= 2 { q * q } else { q };
        for u in 1..q {
            for v in 1..q {
                let duv = d.mul(&d_uv(f, f.int(u), f.int(v)));
                for x in 0..x_range {
                    let xl = if family % 2 == 1 { f.int(x) } else { f.int(x) * f.pi(1) };
                    let dl = duv.mul(&lower_32(f, xl));
                    for y in 0..y_range {
                        let yy = if family <= 2 { f.int(y) * f.pi(-5) } else { f.int(y) * f.pi(-4) };
                        let dly = dl.mul(&upper_14(f, yy));
                        let g = match family {
                            1 => dly.mul(&s2m),
                            2 => dly,
                            3 => dly.mul(&w3m),
                            _ => dly.mul(&w4m),
                        };
                        out.push(SRep { family, u, v, x, y, g });
                    }
                }
            }
        }
    }
    out
}

/// Representatives of `H \ H d_{w,w} Kl(5)` (the Klingen-level families).
pub fn representatives_klingen(f: &Field) -> Vec<SRep> {
    let q = f.q();
    let d = d_pi(f, 1, 1);
    let s2m = s2(f);
    let mut out = Vec::new();
    for family in 1u8..=2 {
        let x_range = if family == 1 { q * q } else { q };
        for u in 1..q {
            for v in 1..q {
                for x in 0..x_range {
                    let xl = if family == 1 { f.int(x) } else { f.int(x) * f.pi(1) };
                    let mut g = d.mul(&d_uv(f, f.int(u), f.int(v))).mul(&lower_32(f, xl));
                    if family == 1 {
                        g = g.mul(&s2m);
                    }
                    out.push(SRep { family, u, v, x, y: 0, g });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct PartitionReport {
    pub reps: usize,
    pub pairs_checked: usize,
    /// Index pairs whose cosets coincide.
    pub overlaps: Vec<(usize, usize)>,
    pub samples: usize,
    pub unmatched: usize,
    pub multiply_matched: usize,
    pub precision_failures: usize,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.overlaps.is_empty()
            && self.unmatched == 0
            && self.multiply_matched == 0
            && self.precision_failures == 0
    }
}

/// Checks that `coset_test(s s'^{-1})` fails for distinct representatives
/// (when `pairwise` is set) and that each sample `g` matches exactly one
/// representative through `coset_test(g s^{-1})`.
pub fn verify_coset_partition<F>(
    reps: &[GSp4],
    coset_test: F,
    samples: &[GSp4],
    pairwise: bool,
) -> PartitionReport
where
    F: Fn(&GSp4) -> Result<bool, Error> + Sync,
{
    let inv: Vec<GSp4> = reps.iter().map(|s| s.inv().expect("invertible")).collect();
    let mut rep = PartitionReport { reps: reps.len(), samples: samples.len(), ..Default::default() };
    if pairwise {
        let found: Vec<(Vec<(usize, usize)>, usize)> = (0..reps.len())
            .into_par_iter()
            .map(|i| {
                let mut hits = Vec::new();
                let mut bad = 0;
                for j in i + 1..reps.len() {
                    match coset_test(&reps[i].mul(&inv[j])) {
                        Ok(true) => hits.push((i, j)),
                        Ok(false) => {}
                        Err(_) => bad += 1,
                    }
                }
                (hits, bad)
            })
            .collect();
        for (hits, bad) in found {
            rep.overlaps.extend(hits);
            rep.precision_failures += bad;
        }
        let n = reps.len();
        rep.pairs_checked = n * n.saturating_sub(1) / 2;
    }
    let counts: Vec<Result<usize, Error>> = samples
        .par_iter()
        .map(|g| {
            let mut c = 0;
            for si in &inv {
                if coset_test(&g.mul(si))? {
                    c += 1;
                }
            }
            Ok(c)
        })
        .collect();
    for c in counts {
        match c {
            Ok(0) => rep.unmatched += 1,
            Ok(1) => {}
            Ok(_) => rep.multiply_matched += 1,
            Err(_) => rep.precision_failures += 1,
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// random samplers

/// Random element of `p^k o` (sometimes zero).
pub fn random_in_ideal<R: Rng>(f: &Field, rng: &mut R, k: i32) -> PAdic {
    let m = (f.p as i64).pow(4);
    f.int(rng.gen_range(0..m)) * f.pi(k)
}

pub fn random_unit<R: Rng>(f: &Field, rng: &mut R) -> PAdic {
    loop {
        let n = rng.gen_range(1..(f.p as i64).pow(4));
        if n % f.p as i64 != 0 {
            return f.int(n);
        }
    }
}

fn random_one_plus_p<R: Rng>(f: &Field, rng: &mut R) -> PAdic {
    f.one() + random_in_ideal(f, rng, 1)
}

/// Random word in the generators of a congruence subgroup: a torus element
/// followed by root elements with entries in the prescribed ideals.
/// `depth[i]` (resp. `depth[4+i]`) is the ideal exponent for the positive
/// (resp. negative) root `i+1`.
fn random_word<R: Rng>(f: &Field, rng: &mut R, depth: [i32; 8], unipotent_torus: bool, len: usize) -> GSp4 {
    let (a, b, c) = if unipotent_torus {
        (random_one_plus_p(f, rng), random_one_plus_p(f, rng), random_one_plus_p(f, rng))
    } else {
        (random_unit(f, rng), random_unit(f, rng), random_unit(f, rng))
    };
    let mut g = torus(f, a, b, c).expect("unit torus");
    for _ in 0..len {
        let r = rng.gen_range(0..8usize);
        let x = random_in_ideal(f, rng, depth[r]);
        let e = if r < 4 { root_x(f, r as u8 + 1, x) } else { root_y(f, r as u8 - 3, x) };
        g = g.mul(&e);
    }
    g
}

pub fn random_kprime<R: Rng>(f: &Field, rng: &mut R) -> GSp4 {
    random_word(f, rng, [0, 0, 0, 0, 1, 1, 1, 1], true, 10)
}

/// `z k'` with `v(z)` in `[-3, 3]`.
pub fn random_h<R: Rng>(f: &Field, rng: &mut R) -> GSp4 {
    let z = random_unit(f, rng) * f.pi(rng.gen_range(-3..=3));
    random_kprime(f, rng).scale(z)
}

/// Random element of `H'`, returned with a flag telling whether it lies in
/// the `g_chi` coset.
pub fn random_hprime<R: Rng>(f: &Field, rng: &mut R, hp: &HPrime) -> (GSp4, bool) {
    let h = random_h(f, rng);
    if rng.gen_bool(0.5) {
        (h.mul(&hp.gchi), true)
    } else {
        (h, false)
    }
}

pub fn random_klingen<R: Rng>(f: &Field, rng: &mut R, n: i32) -> GSp4 {
    random_word(f, rng, [0, 0, 0, 0, n, 0, n, n], false, 10)
}

/// Words in the Klingen generators, `x_4(p^{-n})` and `t_n`.
pub fn random_paramodular<R: Rng>(f: &Field, rng: &mut R, n: i32) -> GSp4 {
    let tn = t_n(f, n);
    let mut g = random_klingen(f, rng, n);
    for _ in 0..3 {
        let y = random_in_ideal(f, rng, -n);
        g = g.mul(&root_x(f, 4, y));
        if rng.gen_bool(0.5) {
            g = g.mul(&tn);
        }
        g = g.mul(&random_klingen(f, rng, n));
    }
    g
}

// ---------------------------------------------------------------------------
// groups over the residue field

type Small = [[u8; 4]; 4];

fn small_encode(m: &Small) -> u64 {
    let mut c = 0u64;
    for row in m {
        for &e in row {
            c = (c << 4) | e as u64;
        }
    }
    c
}

fn small_decode(mut c: u64) -> Small {
    let mut m = [[0u8; 4]; 4];
    for i in (0..4).rev() {
        for j in (0..4).rev() {
            m[i][j] = (c & 15) as u8;
            c >>= 4;
        }
    }
    m
}

fn small_mul(a: &Small, b: &Small, q: u32) -> Small {
    let mut m = [[0u8; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0u32;
            for k in 0..4 {
                s += a[i][k] as u32 * b[k][j] as u32;
            }
            m[i][j] = (s % q) as u8;
        }
    }
    m
}

fn small_identity() -> Small {
    let mut m = [[0u8; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn small_root(q: u32, positive: bool, which: u8) -> Small {
    let mut m = small_identity();
    let neg = (q - 1) as u8;
    let mut set = |i: usize, j: usize, v: u8| {
        if positive {
            m[i][j] = v
        } else {
            m[j][i] = v
        }
    };
    match which {
        1 => {
            set(0, 1, 1);
            set(2, 3, neg)
        }
        2 => set(1, 2, 1),
        3 => {
            set(0, 2, 1);
            set(1, 3, 1)
        }
        _ => set(0, 3, 1),
    }
    m
}

fn primitive_root(q: u32) -> u32 {
    (2..q).find(|&g| (1..q - 1).all(|k| (0..k).fold(1u32, |acc, _| acc * g % q) != 1)).unwrap_or(1)
}

/// Closure of the generators under right multiplication, as a set size.
pub fn bfs_closure(gens: &[Small], q: u32, cap: usize) -> Result<usize, Error> {
    let start = small_encode(&small_identity());
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(start);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let next: Vec<u64> = frontier
            .par_iter()
            .flat_map_iter(|&c| {
                let m = small_decode(c);
                gens.iter().map(move |g| small_encode(&small_mul(&m, g, q)))
            })
            .collect();
        frontier.clear();
        for c in next {
            if seen.insert(c) {
                frontier.push(c);
            }
        }
        if seen.len() > cap {
            return Err(Error::BudgetExceeded);
        }
    }
    Ok(seen.len())
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidueOrders {
    /// `|GSp4(F_q)|`
    pub group: u64,
    /// `|Sp4(F_q)|` when it was enumerated instead of the full group.
    pub symplectic: Option<u64>,
    /// Image of `H ∩ K` modulo `p`.
    pub image: u64,
}

impl ResidueOrders {
    pub fn index(&self) -> u64 {
        self.group / self.image
    }
}

/// Orders of `GSp4(F_q)` and of the image of `H ∩ K` by breadth-first
/// closure. When the full group exceeds `cap`, `Sp4(F_q)` is enumerated and
/// multiplied by the `q-1` possible multipliers.
pub fn residue_group_order(q: u32, cap: usize) -> Result<ResidueOrders, Error> {
    let mut roots = Vec::new();
    for w in 1..=4 {
        roots.push(small_root(q, true, w));
        roots.push(small_root(q, false, w));
    }
    let g = primitive_root(q) as u8;
    let mut sim = small_identity();
    sim[2][2] = g;
    sim[3][3] = g;
    let full_size = {
        let qq = q as u64;
        (qq - 1) * qq.pow(4) * (qq * qq - 1) * (qq.pow(4) - 1)
    };
    let (group, symplectic) = if full_size as usize <= cap {
        let mut gens = roots.clone();
        gens.push(sim);
        (bfs_closure(&gens, q, cap)? as u64, None)
    } else {
        let sp = bfs_closure(&roots, q, cap)? as u64;
        (sp * (q as u64 - 1), Some(sp))
    };
    let mut scalar = small_identity();
    for (i, row) in scalar.iter_mut().enumerate() {
        row[i] = g;
    }
    let mut img_gens: Vec<Small> = (1..=4).map(|w| small_root(q, true, w)).collect();
    img_gens.push(scalar);
    let image = bfs_closure(&img_gens, q, cap)? as u64;
    Ok(ResidueOrders { group, symplectic, image })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> Field {
        Field::new(3, 20).unwrap()
    }

    #[test]
    fn specials_are_symplectic() {
        let f = f3();
        assert!((s1(&f).mu() + f.one()).is_zero() || (s1(&f).mu() - f.one()).is_zero());
        assert!((s2(&f).mu() - f.one()).is_zero());
        let d = d_ab(&f, f.int(2), f.pi(1)).unwrap();
        assert!((d.mu() - f.int(4) * f.pi(1)).is_zero());
        assert!((t5_unipotent_variant(&f).mu() - f.one()).is_zero());
        assert!((t_n(&f, 5).mu() - f.one()).is_zero());
        for w in 1..=4 {
            root_x(&f, w, f.int(2));
            root_y(&f, w, f.int(2));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_paramodular(&f, &mut rng, 5);
            assert!(g.mul(&g.inv().unwrap()).approx_eq(&GSp4::identity(&f)));
        }
    }

    #[test]
    fn gchi_squared_is_scalar() {
        let f = f3();
        let t = f.int(2);
        let g = g_chi(&f, f.one(), t).unwrap();
        let sq = g.mul(&g);
        let s = -(f.pi(1).div(&t).unwrap());
        assert!(sq.approx_eq(&GSp4::identity(&f).scale(s)) || member(&sq, SubgroupTag::Z).unwrap());
        assert!((sq.entry(0, 0) - s).is_zero());
    }

    #[test]
    fn subgroup_samplers_land_in_subgroups() {
        let f = f3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            assert!(member(&random_kprime(&f, &mut rng), SubgroupTag::Kprime).unwrap());
            assert!(member(&random_klingen(&f, &mut rng, 5), SubgroupTag::Klingen(5)).unwrap());
            assert!(member(&random_paramodular(&f, &mut rng, 5), SubgroupTag::Paramodular(5)).unwrap());
            assert!(member(&random_h(&f, &mut rng), SubgroupTag::H).unwrap());
        }
    }

    #[test]
    fn d_pi_pi_outside() {
        let f = f3();
        let d = d_pi(&f, 1, 1);
        assert!(!member(&d, SubgroupTag::K).unwrap());
        assert!(matches!(decompose_h(&d), Err(Error::NotInH)));
        let hp = HPrime::new(&f, f.one(), f.int(2)).unwrap();
        assert!(matches!(hp.classify(&d).unwrap(), HClass::Neither));
        assert!(matches!(hp.classify(&hp.gchi).unwrap(), HClass::InGchiH));
    }

    #[test]
    fn residue_orders_q3() {
        let r = residue_group_order(3, 1 << 20).unwrap();
        assert_eq!(r.group, 103_680);
        assert_eq!(r.image, 2 * 81);
        assert_eq!(r.index(), 640);
    }
}
