//! Batch verification harness: named check suites run against a
//! configuration, with JSON, CSV or text reports.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cyclo::{psi, q_pow, ratio, render_rational, Cyclotomic};
use crate::gsp4::{self, GSp4};
use crate::integrals::{self, AutoBudget, BesselSetup, BesselShape, ChiData, LaurentInQs, PsiU};
use crate::padic::PAdic;
use crate::reps::{self, AffineChar, Model, ModelVector};
use crate::{Error, Field};

pub const CHECKS: [&str; 14] = [
    "cosets",
    "characters",
    "newvector-expansion",
    "matcoeff",
    "hecke",
    "atkin-lehner",
    "dims",
    "support-criterion",
    "formal-degree",
    "j0-min",
    "j0-new",
    "whittaker",
    "zeta",
    "bessel",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "gsp4-ssc", about = "Verify local computations for simple supercuspidals of GSp(4)")]
#[serde(default)]
pub struct RunConfig {
    #[arg(long, env = "GSP4_SSC_P", default_value_t = 3)]
    pub p: u32,
    /// Character parameter `t` of `chi_{1,1,t}`.
    #[arg(long, env = "GSP4_SSC_T", default_value_t = 1)]
    pub t: i64,
    #[arg(long, env = "GSP4_SSC_SIGN", default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    /// Relative p-adic precision.
    #[arg(long, env = "GSP4_SSC_PRECISION", default_value_t = 12)]
    pub precision: i32,
    #[arg(long, env = "GSP4_SSC_C1", default_value_t = -1, allow_hyphen_values = true)]
    pub c1: i64,
    #[arg(long, env = "GSP4_SSC_C2", default_value_t = -1, allow_hyphen_values = true)]
    pub c2: i64,
    #[arg(long, env = "GSP4_SSC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// A check name or `all`.
    #[arg(long, env = "GSP4_SSC_CHECK", default_value = "all")]
    pub check: String,
    #[arg(long, env = "GSP4_SSC_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, env = "GSP4_SSC_OUT")]
    pub out: Option<PathBuf>,
    /// Independent checks run in parallel when above 1.
    #[arg(long, env = "GSP4_SSC_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// JSON file with any of these fields; flags and environment win.
    #[arg(long, env = "GSP4_SSC_CONFIG")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Random trials for sampled checks.
    #[arg(long, env = "GSP4_SSC_TRIALS", default_value_t = 200)]
    pub trials: usize,
    /// Points per family or per side in the pointwise checks.
    #[arg(long, env = "GSP4_SSC_POINTS", default_value_t = 30)]
    pub points: usize,
    #[arg(long, env = "GSP4_SSC_BESSEL_A", default_value_t = 1, allow_hyphen_values = true)]
    pub bessel_a: i64,
    #[arg(long, env = "GSP4_SSC_BESSEL_M0", value_delimiter = ',', default_values_t = [2, 3])]
    pub bessel_m0: Vec<i32>,
    #[arg(long, env = "GSP4_SSC_BESSEL_U0", default_value_t = 1, allow_hyphen_values = true)]
    pub bessel_u0: i64,
    /// Value of the ramified zeta character at the uniformizer, as `k` in
    /// `exp(2 pi i k / p)`; its unit part is the quadratic character.
    #[arg(long, env = "GSP4_SSC_ZETA_CHI_PI", default_value_t = 0)]
    pub zeta_chi_pi: u64,
    /// Largest `q` for the formal-degree enumeration.
    #[arg(long, env = "GSP4_SSC_DEGREE_MAX_Q", default_value_t = 3)]
    pub degree_max_q: u32,
    /// Element cap for the residue-group enumeration.
    #[arg(long, env = "GSP4_SSC_BFS_CAP", default_value_t = 40_000_000)]
    pub bfs_cap: usize,
    /// Write zero wall times so reports are byte-stable.
    #[arg(long, env = "GSP4_SSC_NO_TIMING")]
    pub no_timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::parse_from(["gsp4-ssc"])
    }
}

impl RunConfig {
    /// Parses flags and environment, then fills values left at their
    /// defaults from the optional JSON config file.
    pub fn from_args<I, T>(args: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let m: ArgMatches = RunConfig::command()
            .try_get_matches_from(args)
            .map_err(|e| Error::BadConfig(e.to_string()))?;
        let parsed = RunConfig::from_arg_matches(&m).map_err(|e| Error::BadConfig(e.to_string()))?;
        let Some(path) = parsed.config.clone() else {
            parsed.validate()?;
            return Ok(parsed);
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::BadConfig(format!("{}: {e}", path.display())))?;
        let file: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| Error::BadConfig(e.to_string()))?;
        let mut merged = serde_json::to_value(&parsed).map_err(|e| Error::BadConfig(e.to_string()))?;
        for (k, v) in file {
            if merged.get(&k).is_none() {
                return Err(Error::BadConfig(format!("unknown config key {k}")));
            }
            if m.value_source(&k) == Some(ValueSource::DefaultValue) {
                merged[&k] = v;
            }
        }
        let mut cfg: RunConfig = serde_json::from_value(merged).map_err(|e| Error::BadConfig(e.to_string()))?;
        cfg.config = Some(path);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |s: String| Err(Error::BadConfig(s));
        if self.p == 2 || !crate::padic::is_supported_prime(self.p) {
            return bad(format!("p = {} is not a supported odd prime", self.p));
        }
        for (name, v) in [("t", self.t), ("c1", self.c1), ("c2", self.c2), ("bessel-u0", self.bessel_u0)] {
            if v.rem_euclid(self.p as i64) == 0 {
                return bad(format!("{name} must be prime to p"));
            }
        }
        if self.sign != 1 && self.sign != -1 {
            return bad(format!("sign must be 1 or -1, got {}", self.sign));
        }
        if self.precision < 8 || self.precision > crate::padic::rel_cap(self.p) {
            return bad(format!("precision {} outside 8..={}", self.precision, crate::padic::rel_cap(self.p)));
        }
        Ok(())
    }

    pub fn field(&self) -> Result<Field, Error> {
        Field::new(self.p, self.precision)
    }

    fn base_params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("p".into(), self.p.to_string());
        m.insert("t".into(), self.t.to_string());
        m.insert("sign".into(), self.sign.to_string());
        m.insert("precision".into(), self.precision.to_string());
        m.insert("c1".into(), self.c1.to_string());
        m.insert("c2".into(), self.c2.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub expected: Option<String>,
    pub computed: String,
    pub pass: bool,
    pub seconds: f64,
    pub terms: u64,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    f: Field,
    rng: ChaCha8Rng,
    out: Vec<CheckReport>,
    check: &'static str,
    started: Instant,
}

impl<'a> Ctx<'a> {
    fn push(&mut self, case: &str, extra: &[(&str, String)], expected: Option<String>, computed: String, pass: bool, terms: u64) {
        let mut params = self.cfg.base_params();
        if !case.is_empty() {
            params.insert("case".into(), case.into());
        }
        for (k, v) in extra {
            params.insert((*k).into(), v.clone());
        }
        let seconds = if self.cfg.no_timing { 0.0 } else { self.started.elapsed().as_secs_f64() };
        self.started = Instant::now();
        self.out.push(CheckReport { check: self.check.into(), params, expected, computed, pass, seconds, terms });
    }

    fn compare(&mut self, case: &str, extra: &[(&str, String)], expected: String, computed: String, terms: u64) {
        let pass = expected == computed;
        self.push(case, extra, Some(expected), computed, pass, terms);
    }

    fn model(&self) -> Result<Model, Error> {
        Model::new(&self.f, self.f.int(self.cfg.t), self.cfg.sign)
    }

    fn psi_u(&self) -> Result<PsiU, Error> {
        PsiU::new(self.f.int(self.cfg.c1), self.f.int(self.cfg.c2))
    }
}

/// Runs one named check (or `all`); module errors become failed reports.
pub fn run(check: &str, cfg: &RunConfig) -> Result<Vec<CheckReport>, Error> {
    cfg.validate()?;
    if check == "all" {
        let names: Vec<&'static str> = CHECKS.to_vec();
        let runs = |name: &&'static str| run_one(name, cfg);
        let parts: Vec<Vec<CheckReport>> = if cfg.jobs > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs)
                .build()
                .map_err(|e| Error::BadConfig(e.to_string()))?;
            pool.install(|| names.par_iter().map(runs).collect())
        } else {
            names.iter().map(runs).collect()
        };
        return Ok(parts.into_iter().flatten().collect());
    }
    let name = CHECKS.iter().find(|c| **c == check).ok_or_else(|| Error::UnknownCheck(check.into()))?;
    Ok(run_one(name, cfg))
}

fn run_one(name: &'static str, cfg: &RunConfig) -> Vec<CheckReport> {
    let f = match cfg.field() {
        Ok(f) => f,
        Err(e) => return vec![error_report(name, cfg, &e)],
    };
    let seed = cfg.seed ^ (CHECKS.iter().position(|c| *c == name).unwrap_or(0) as u64).wrapping_mul(0x9e37_79b9);
    let mut ctx = Ctx { cfg, f, rng: ChaCha8Rng::seed_from_u64(seed), out: Vec::new(), check: name, started: Instant::now() };
    let res = match name {
        "cosets" => check_cosets(&mut ctx),
        "characters" => check_characters(&mut ctx),
        "newvector-expansion" => check_expansion(&mut ctx),
        "matcoeff" => check_matcoeff(&mut ctx),
        "hecke" => check_hecke(&mut ctx),
        "atkin-lehner" => check_atkin_lehner(&mut ctx),
        "dims" => check_dims(&mut ctx),
        "support-criterion" => check_support(&mut ctx),
        "formal-degree" => check_formal_degree(&mut ctx),
        "j0-min" => check_j0_min(&mut ctx),
        "j0-new" => check_j0_new(&mut ctx),
        "whittaker" => check_whittaker(&mut ctx),
        "zeta" => check_zeta(&mut ctx),
        "bessel" => check_bessel(&mut ctx),
        _ => Err(Error::UnknownCheck(name.into())),
    };
    let mut out = ctx.out;
    if let Err(e) = res {
        out.push(error_report(name, cfg, &e));
    }
    out
}

fn error_report(name: &str, cfg: &RunConfig, e: &Error) -> CheckReport {
    CheckReport {
        check: name.into(),
        params: cfg.base_params(),
        expected: None,
        computed: format!("error: {e}"),
        pass: false,
        seconds: 0.0,
        terms: 0,
    }
}

fn rat(r: &BigRational) -> String {
    render_rational(r)
}

fn qpow(q: i64, k: u32) -> BigRational {
    BigRational::from_integer(q.pow(k).into())
}

// ---------------------------------------------------------------------------
// group and representation checks

fn check_cosets(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let q = f.q();
    let model = ctx.model()?;
    let reps: Vec<GSp4> = model.s.iter().map(|r| r.g).collect();
    let expected = (q - 1).pow(2) * q.pow(2) * (q + 1).pow(2);
    ctx.compare("cardinality", &[], expected.to_string(), reps.len().to_string(), reps.len() as u64);
    let samples: Vec<GSp4> = (0..ctx.cfg.trials)
        .map(|_| {
            let (h, _) = gsp4::random_hprime(&f, &mut ctx.rng, &model.sc.hp);
            h.mul(&model.d).mul(&gsp4::random_paramodular(&f, &mut ctx.rng, 5))
        })
        .collect();
    let hp = model.sc.hp;
    let rep = gsp4::verify_coset_partition(&reps, |g| hp.contains(g), &samples, true);
    let computed = format!(
        "overlaps={} unmatched={} multiply_matched={} precision_failures={}",
        rep.overlaps.len(),
        rep.unmatched,
        rep.multiply_matched,
        rep.precision_failures
    );
    let terms = (rep.pairs_checked + rep.samples) as u64;
    ctx.compare("partition", &[("samples", samples.len().to_string())], "overlaps=0 unmatched=0 multiply_matched=0 precision_failures=0".into(), computed, terms);
    Ok(())
}

fn check_characters(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let chi = AffineChar::standard(&f, f.int(ctx.cfg.t))?;
    let n = ctx.cfg.trials;
    let mut bad_hom = 0;
    let mut bad_conj = 0;
    let gchi = gsp4::g_chi(&f, chi.t2, chi.t3)?;
    let gchi_inv = gchi.inv()?;
    for _ in 0..n {
        let (h1, h2) = (gsp4::random_h(&f, &mut ctx.rng), gsp4::random_h(&f, &mut ctx.rng));
        if chi.eval(&h1.mul(&h2))? != chi.eval(&h1)?.mul(&chi.eval(&h2)?) {
            bad_hom += 1;
        }
        if chi.eval(&gchi.mul(&h1).mul(&gchi_inv))? != chi.eval(&h1)? {
            bad_conj += 1;
        }
    }
    ctx.compare("homomorphism", &[("pairs", n.to_string())], "0".into(), bad_hom.to_string(), n as u64);
    ctx.compare("gchi-conjugation", &[], "0".into(), bad_conj.to_string(), n as u64);

    let inv = chi.orbit_invariant()?;
    let mut bad_orbit = 0;
    let mut bad_transport = 0;
    for _ in 0..n {
        let (a, b, c) = (gsp4::random_unit(&f, &mut ctx.rng), gsp4::random_unit(&f, &mut ctx.rng), gsp4::random_unit(&f, &mut ctx.rng));
        let m = gsp4::torus(&f, a, b, c)?;
        let moved = chi.orbit_act(&m)?;
        if moved.orbit_invariant()? != inv {
            bad_orbit += 1;
        }
        // transporter back from the moved character
        let m0 = chi.transporter(&f, &moved)?;
        let back = chi.orbit_act(&m0)?;
        let same = [(back.t1, moved.t1), (back.t2, moved.t2), (back.t3, moved.t3)]
            .iter()
            .all(|(x, y)| x.residue(1).ok() == y.residue(1).ok());
        let h = gsp4::random_h(&f, &mut ctx.rng);
        if !same || back.eval(&h)? != moved.eval(&h)? {
            bad_transport += 1;
        }
    }
    ctx.compare("orbit-invariant", &[], "0".into(), bad_orbit.to_string(), n as u64);
    ctx.compare("transporter", &[], "0".into(), bad_transport.to_string(), n as u64);
    Ok(())
}

fn check_expansion(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let want = ctx.cfg.points.max(20);
    let (mut on, mut off, mut bad, mut tries) = (0usize, 0usize, 0usize, 0usize);
    let others = [(0, 0), (0, 1), (1, 0), (2, 1), (1, 2), (2, 2)];
    while (on < want || off < want) && tries < 20 * want {
        tries += 1;
        let g = if on < want && tries % 2 == 0 {
            let (h, _) = gsp4::random_hprime(&f, &mut ctx.rng, &model.sc.hp);
            h.mul(&model.d).mul(&gsp4::random_paramodular(&f, &mut ctx.rng, 5))
        } else {
            let (i, j) = others[ctx.rng.gen_range(0..others.len())];
            let (h, _) = gsp4::random_hprime(&f, &mut ctx.rng, &model.sc.hp);
            h.mul(&gsp4::d_pi(&f, i, j)).mul(&gsp4::random_paramodular(&f, &mut ctx.rng, 5))
        };
        let a = model.eval(&ModelVector::New, &g)?;
        let b = model.new_from_minimal(&g)?;
        if a != b {
            bad += 1;
        }
        if model.locate(&g)?.is_some() {
            on += 1;
        } else {
            off += 1;
        }
    }
    let computed = format!("support>={} off>={} mismatches={}", on.min(want), off.min(want), bad);
    ctx.compare("both-evaluators", &[], format!("support>={want} off>={want} mismatches=0"), computed, tries as u64);
    Ok(())
}

/// Coordinate drawn as 0 or `unit * varpi^(low + k)`, `k` in `0..3`.
fn sample_coord(f: &Field, rng: &mut ChaCha8Rng, low: i32) -> PAdic {
    if rng.gen_range(0..4) == 0 {
        return f.zero();
    }
    let k = rng.gen_range(0..3);
    let x = gsp4::random_unit(f, rng) * f.pi(low + k);
    x + gsp4::random_in_ideal(f, rng, low + k + 1)
}

fn check_matcoeff(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let n = ctx.cfg.points;
    for fam in 1..=4u8 {
        let lows = integrals::FAMILY_BOXES[fam as usize - 1];
        let (mut bad, mut nonzero) = (0, 0);
        for _ in 0..n {
            let x: Vec<PAdic> = lows.iter().map(|&l| sample_coord(&f, &mut ctx.rng, l)).collect();
            let a = model.matcoeff_new_family(fam, x[0], x[1], x[2], x[3])?;
            let b = model.matcoeff_new_bruteforce(&gsp4::u_abce(&f, x[0], x[1], x[2], x[3]), Some(fam))?;
            if a != b {
                bad += 1;
            }
            if !b.is_zero() {
                nonzero += 1;
            }
        }
        ctx.compare(&format!("family-{fam}-inside"), &[("points", n.to_string()), ("nonzero", nonzero.to_string())], "0".into(), bad.to_string(), n as u64);
        // one shell outside each face
        let mut bad = 0;
        let mut count = 0;
        for face in 0..4 {
            for _ in 0..(n / 4).max(3) {
                let mut x: Vec<PAdic> = lows.iter().map(|&l| sample_coord(&f, &mut ctx.rng, l)).collect();
                x[face] = gsp4::random_unit(&f, &mut ctx.rng) * f.pi(lows[face] - 1);
                let a = model.matcoeff_new_family(fam, x[0], x[1], x[2], x[3])?;
                let b = model.matcoeff_new_bruteforce(&gsp4::u_abce(&f, x[0], x[1], x[2], x[3]), Some(fam))?;
                if !a.is_zero() || !b.is_zero() {
                    bad += 1;
                }
                count += 1;
            }
        }
        ctx.compare(&format!("family-{fam}-outside"), &[("points", count.to_string())], "0".into(), bad.to_string(), count as u64);
    }
    Ok(())
}

fn check_hecke(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let q = f.q() as u64;
    for (label, t5) in [("printed-t5", gsp4::t5_unipotent_variant(&f)), ("standard-t5", gsp4::t_n(&f, 5))] {
        let terms = model.hecke_t01_terms(&t5)?;
        let total = terms.iter().fold(Cyclotomic::zero(f.p), |a, b| a.add(b));
        let computed = format!("A={} B={} C={} D={} total={}", terms[0], terms[1], terms[2], terms[3], total);
        ctx.compare(label, &[], "A=0 B=0 C=0 D=0 total=0".into(), computed, q * q * q + 2 * q * q + q);
    }
    Ok(())
}

fn check_atkin_lehner(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let u5 = gsp4::u_n(&f, 5);
    for eps in [1i8, -1] {
        let model = Model::new(&f, f.int(ctx.cfg.t), eps)?;
        let mut bad = 0;
        let n = ctx.cfg.points.max(20);
        for k in 0..n {
            let g = if k % 2 == 0 {
                let (h, _) = gsp4::random_hprime(&f, &mut ctx.rng, &model.sc.hp);
                h.mul(&model.d).mul(&gsp4::random_paramodular(&f, &mut ctx.rng, 5))
            } else {
                gsp4::random_kprime(&f, &mut ctx.rng).mul(&gsp4::d_pi(&f, 1, 1)).mul(&gsp4::random_klingen(&f, &mut ctx.rng, 5))
            };
            let a = model.eval(&ModelVector::New, &g)?;
            let b = model.eval(&ModelVector::New, &g.mul(&u5))?;
            if b != a.scale_int(eps as i64) {
                bad += 1;
            }
        }
        ctx.compare(&format!("sign{eps:+}"), &[("points", n.to_string())], "0".into(), bad.to_string(), n as u64);
    }
    Ok(())
}

/// `floor((n-3)^2/4)` for `n >= 3`, zero below.
pub fn dim_formula(n: i64) -> i64 {
    if n < 3 {
        0
    } else {
        (n - 3) * (n - 3) / 4
    }
}

fn check_dims(ctx: &mut Ctx) -> Result<(), Error> {
    let counted: Vec<String> = (0..=12).map(|n| reps::dim_astar(n).to_string()).collect();
    let expected: Vec<String> = (0..=12).map(|n| dim_formula(n).to_string()).collect();
    ctx.compare("n=0..12", &[], expected.join(","), counted.join(","), 13);
    Ok(())
}

fn check_support(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let chi = AffineChar::standard(&f, f.int(ctx.cfg.t))?;
    let n = 7;
    let trials = ctx.cfg.trials;
    let mut wrong = Vec::new();
    let mut total = 0u64;
    for i in 1..=3 {
        for j in 1..=3 {
            let rep = reps::support_criterion_check(&f, &chi, i, j, n, trials, &mut ctx.rng)?;
            total += rep.trials as u64;
            let admissible = reps::support_pair_admissible(i as i64, j as i64, n as i64);
            // admissible pairs carry no witness; the others must show one
            if admissible == (rep.witnesses > 0) {
                wrong.push(format!("({i},{j})"));
            }
        }
    }
    let computed = if wrong.is_empty() { "consistent".to_string() } else { format!("inconsistent at {}", wrong.join(" ")) };
    ctx.compare("level-7", &[("trials", trials.to_string())], "consistent".into(), computed, total);
    Ok(())
}

fn check_formal_degree(ctx: &mut Ctx) -> Result<(), Error> {
    for q in [3u32, 5, 7] {
        if q > ctx.cfg.degree_max_q {
            continue;
        }
        let qi = q as i64;
        let (deg, orders) = integrals::formal_degree(q, ctx.cfg.bfs_cap)?;
        let index = (qi.pow(4) - 1) * (qi * qi - 1);
        ctx.compare(&format!("index-q{q}"), &[], index.to_string(), orders.index().to_string(), orders.group);
        ctx.compare(&format!("degree-q{q}"), &[], rat(&ratio(index, 2)), rat(&deg), orders.group);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// integrals

fn check_j0_min(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let psi_u = ctx.psi_u()?;
    let b = AutoBudget::default();
    let q7 = qpow(f.q(), 7);
    let ga = f.pi(-1) * psi_u.c1.inv()?;
    let de = f.pi(-1) * psi_u.c2.inv()?;
    let two = f.int(2);
    let cases: [(&str, (PAdic, PAdic), (PAdic, PAdic), BigRational); 4] = [
        ("stated", (ga, de), (ga, de), q7.clone()),
        ("gamma-unit", (f.one(), de), (f.one(), de), BigRational::from_integer(0.into())),
        ("alpha-over-gamma", (ga * two, de), (ga, de), BigRational::from_integer(0.into())),
        ("beta-over-delta", (ga, de * two), (ga, de), BigRational::from_integer(0.into())),
    ];
    for (name, ab, gd, want) in cases {
        let r = integrals::j0_minimal(&f, &model.sc, &psi_u, ab, gd, b)?;
        let computed = if r.refined { r.value.to_string() } else { format!("{} (unrefined)", r.value) };
        ctx.compare(name, &[], rat(&want), computed, r.bx.cells(f.p) as u64);
    }
    // Hermitian symmetry on a nonzero and a zero pair
    let pert = f.one() + f.pi(1);
    for (name, ab, gd) in [("hermitian-near", (ga * pert, de), (ga, de * pert)), ("hermitian-far", (ga * two, de), (ga, de))] {
        let x = integrals::j0_minimal(&f, &model.sc, &psi_u, ab, gd, b)?;
        let y = integrals::j0_minimal(&f, &model.sc, &psi_u, gd, ab, b)?;
        ctx.compare(name, &[], x.value.to_string(), y.value.conjugate().to_string(), 0);
    }
    Ok(())
}

fn check_j0_new(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let psi_u = ctx.psi_u()?;
    let q = f.q();
    let r = integrals::j0_newvector(&model, &psi_u, None, AutoBudget::default())?;
    for (i, fam) in r.families.iter().enumerate() {
        let want = if i == 1 { qpow(q, 4) } else { BigRational::from_integer(0.into()) };
        let computed = if fam.refined { fam.value.to_string() } else { format!("{} (unrefined)", fam.value) };
        let res: Vec<String> = fam.bx.coords.iter().map(|c| (c.high - c.low).to_string()).collect();
        ctx.compare(&format!("J0,{}", i + 1), &[("resolution", res.join(","))], rat(&want), computed, fam.bx.cells(f.p) as u64);
    }
    // q^5 (1 - q^{-2})^{-2}
    let one = BigRational::from_integer(1.into());
    let want = qpow(q, 5) / ((&one - q_pow(f.p, -2)) * (&one - q_pow(f.p, -2)));
    ctx.compare("total", &[], rat(&want), rat(&r.total), 0);
    Ok(())
}

fn check_whittaker(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let psi_u = ctx.psi_u()?;
    let b = AutoBudget::default();
    let id = GSp4::identity(&f);
    let al = f.pi(-1) * psi_u.c1.inv()?;
    let be = f.pi(-1) * psi_u.c2.inv()?;
    let q7 = qpow(f.q(), 7);
    let d = gsp4::d_ab(&f, al, be)?;
    let w = integrals::whittaker(&f, &model.sc, &psi_u, &id, &d, b)?;
    ctx.compare("support-point", &[], rat(&q7), w.value.to_string(), w.bx.cells(f.p) as u64);
    let w0 = integrals::whittaker(&f, &model.sc, &psi_u, &id, &gsp4::d_ab(&f, f.one(), be)?, b)?;
    ctx.compare("alpha-unit", &[], "0".into(), w0.value.to_string(), w0.bx.cells(f.p) as u64);
    // W(u g) = psi_{c1,c2}(u) W(g)
    let mut bad = 0;
    let n = 3;
    for _ in 0..n {
        let x: Vec<PAdic> = (0..4).map(|_| gsp4::random_in_ideal(&f, &mut ctx.rng, -1)).collect();
        let u = gsp4::u_abce(&f, x[0], x[1], x[2], x[3]);
        let lhs = integrals::whittaker(&f, &model.sc, &psi_u, &id, &u.mul(&d), b)?.value;
        let rhs = w.value.mul(&psi(&(psi_u.c1 * x[0] + psi_u.c2 * x[3]))?);
        if lhs != rhs {
            bad += 1;
        }
    }
    ctx.compare("equivariance", &[("samples", n.to_string())], "0".into(), bad.to_string(), n as u64);
    Ok(())
}

/// `(1 - q^{-1})^{-1} q^{s + 7/2} |beta|^{1/2 - s} chi(beta varpi c2)^{-1}`
/// for `beta = varpi^vb`.
fn zeta_expected(p: u32, vb: i32, chi: &ChiData, c2: &PAdic, f: &Field) -> Result<LaurentInQs, Error> {
    let q = p as i64;
    let mut out = LaurentInQs::zero(p);
    let lead = ratio(q, q - 1);
    let arg = f.pi(vb + 1) * *c2;
    let c = chi.eval(&arg)?.conjugate().scale(&lead);
    // q^{s + 7/2} q^{vb (s - 1/2)} = q^{(1 + vb) s + (7 - vb)/2}
    out.add_term(1 + vb, 7 - vb, &c);
    Ok(out)
}

fn check_zeta(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let psi_u = ctx.psi_u()?;
    let b = AutoBudget::default();
    let al = f.pi(-1) * psi_u.c1.inv()?;
    let ramified = ChiData { ramified: true, at_pi: Cyclotomic::root_of_unity(f.p, ctx.cfg.zeta_chi_pi, 1)? };
    let cases = [
        ("trivial-beta-1", al, 0, ChiData::trivial(f.p)),
        ("trivial-beta-pi", al, 1, ChiData::trivial(f.p)),
        ("ramified-beta-1", al, 0, ramified.clone()),
        ("alpha-unit", f.one(), 0, ChiData::trivial(f.p)),
    ];
    for (name, a, vb, chi) in cases {
        let d = gsp4::d_ab(&f, a, f.pi(vb))?;
        // support sits at v(gamma) = -1 - v(beta)
        let r = integrals::novodvorsky_zeta(&f, &model.sc, &psi_u, &d, &chi, -1 - vb, 10, b)?;
        let want = if a.is_unit()? { LaurentInQs::zero(f.p) } else { zeta_expected(f.p, vb, &chi, &psi_u.c2, &f)? };
        let single = r.value.terms().map(|((a, _), _)| a).collect::<std::collections::BTreeSet<_>>().len() <= 1;
        let refined = r.shells.iter().all(|s| s.2);
        let mut computed = r.value.render();
        if !single {
            computed.push_str(" (several exponents)");
        }
        if !refined {
            computed.push_str(" (unrefined)");
        }
        ctx.compare(name, &[("shells", r.shells.len().to_string())], want.render(), computed, r.shells.len() as u64);
    }
    Ok(())
}

fn check_bessel(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.f;
    let model = ctx.model()?;
    let b = AutoBudget::default();
    let a = f.int(ctx.cfg.bessel_a);
    let u0 = f.int(ctx.cfg.bessel_u0);
    let shape = BesselShape::standard(&f, a);
    let q = f.q();
    let vec_for = |m0: i32, beta: PAdic| -> Result<GSp4, Error> {
        let al = f.pi(1 - m0) * u0;
        gsp4::d_ab(&f, al, beta)?.inv()
    };
    for &m0 in &ctx.cfg.bessel_m0.clone() {
        let setup = BesselSetup::new(a, m0, u0)?;
        let r = integrals::bessel(&f, &model.sc, &setup, &shape, &vec_for(m0, f.pi(1))?, b)?;
        let want = q_pow(f.p, 7 - 4 * m0);
        let computed = if r.refined { r.value.to_string() } else { format!("{} (unrefined)", r.value) };
        ctx.compare(&format!("m0={m0}"), &[("a", ctx.cfg.bessel_a.to_string())], rat(&want), computed, r.bx.cells(f.p) as u64);
    }
    let setup = BesselSetup::new(a, 2, u0)?;
    let vol = integrals::bessel_volume(&f, a, 6)?;
    ctx.compare("torus-volume", &[], rat(&(BigRational::from_integer(1.into()) + ratio(1, q))), rat(&vol), 7);
    let mut bad = 0;
    for _ in 0..ctx.cfg.trials {
        let (y1, y2) = (gsp4::random_in_ideal(&f, &mut ctx.rng, 0), gsp4::random_in_ideal(&f, &mut ctx.rng, 0));
        if !integrals::germ_multiplicative(&f, &setup, y1, y2)? {
            bad += 1;
        }
    }
    ctx.compare("germ-multiplicative", &[], "0".into(), bad.to_string(), ctx.cfg.trials as u64);

    // B_S(pi(m) v) = |lam det A|^3 B_{lam tA S A}(v), m = diag(lam A, A')
    let v_prime = vec_for(2, f.pi(1))?;
    let base = integrals::bessel(&f, &model.sc, &setup, &shape, &v_prime, b)?.value;
    let lam = f.pi(1);
    let m = gsp4::d_ab(&f, f.one(), lam)?;
    let v = m.inv()?.mul(&v_prime);
    let other = integrals::bessel(&f, &model.sc, &setup, &shape.scaled(lam), &v, b)?.value;
    ctx.compare("covariance-lambda-pi", &[], base.to_string(), other.scale(&q_pow(f.p, -3)).to_string(), 0);
    let u = gsp4::random_unit(&f, &mut ctx.rng);
    let m = gsp4::diag(&f, [f.one(), u, u.inv()?, f.one()])?;
    let v = m.inv()?.mul(&v_prime);
    let other = integrals::bessel(&f, &model.sc, &setup, &shape.twisted(u), &v, b)?.value;
    ctx.compare("covariance-diag-1-u", &[("u", u.to_string())], base.to_string(), other.to_string(), 0);
    Ok(())
}

// ---------------------------------------------------------------------------
// output

pub fn render_params(p: &BTreeMap<String, String>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Serializes reports with a stable field order.
pub fn report_emit(reports: &[CheckReport], format: Format) -> Result<Vec<u8>, Error> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(reports).map_err(|e| Error::BadConfig(e.to_string()))?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "params", "expected", "computed", "pass", "seconds", "terms"])
                .map_err(|e| Error::BadConfig(e.to_string()))?;
            for r in reports {
                w.write_record([
                    r.check.clone(),
                    render_params(&r.params),
                    r.expected.clone().unwrap_or_default(),
                    r.computed.clone(),
                    r.pass.to_string(),
                    format!("{:.3}", r.seconds),
                    r.terms.to_string(),
                ])
                .map_err(|e| Error::BadConfig(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Error::BadConfig(e.to_string()))
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let case = r.params.get("case").map(|c| format!(" [{c}]")).unwrap_or_default();
                s.push_str(&format!(
                    "{} {}{}: computed {} expected {} ({:.2}s)\n",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check,
                    case,
                    r.computed,
                    r.expected.as_deref().unwrap_or("-"),
                    r.seconds
                ));
            }
            Ok(s.into_bytes())
        }
    }
}

/// Exit status: 0 when every report passes, 1 otherwise, 2 on errors
/// outside the checks.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = RunConfig::command().try_get_matches_from(args.clone()) {
        let _ = e.print();
        return e.exit_code();
    }
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let reports = match run(&cfg.check, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let bytes = match report_emit(&reports, cfg.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| e.to_string()),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return 2;
    }
    i32::from(reports.iter().any(|r| !r.pass))
}
