//! The module pipelines behind each subcommand, recorded into a [`Report`].

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use tcm_core::algebra::QuotientAlgebraExt;
use tcm_core::character::{self, LambdaAlgebra};
use tcm_core::fgl::Fgl;
use tcm_core::groups::{self, corpus, FiniteGroup, GroupInput};
use tcm_core::series::Series1;
use tcm_core::torsion::{self, SubtractionUnit};
use tcm_core::weierstrass::weierstrass_prepare;
use tcm_core::{Error, RingCtx, RingElem, RingSpec};

use crate::cache::FglCache;
use crate::report::{Check, Report, Status};

pub struct Session {
    cache: FglCache,
    fgls: HashMap<(u64, usize, u32, i32, usize), Arc<Fgl>>,
    pub report: Report,
}

impl Session {
    pub fn new(report: Report, cache: FglCache) -> Session {
        Session { cache, fgls: HashMap::new(), report }
    }

    /// Runs `f`, adding its wall-clock time to `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        *self.report.timings.entry(stage.into()).or_default() += t0.elapsed().as_secs_f64();
        out
    }

    pub fn fgl(&mut self, p: u64, n: usize, a: u32, d: i32, df: usize) -> tcm_core::Result<Arc<Fgl>> {
        if let Some(f) = self.fgls.get(&(p, n, a, d, df)) {
            return Ok(f.clone());
        }
        let name = format!("fgl p={p} n={n} a={a} d={d} df={df}");
        let t0 = Instant::now();
        let (f, ev) = self.cache.load_or_build(p, n, a, d, df)?;
        self.report.timings.insert(name.clone(), t0.elapsed().as_secs_f64());
        self.report.cache.insert(name, ev.name().into());
        self.fgls.insert((p, n, a, d, df), f.clone());
        Ok(f)
    }

    pub fn check(&mut self, name: &str, ok: bool, evidence: &str) {
        self.check_with(name, ok, evidence, None);
    }

    pub fn check_with(&mut self, name: &str, ok: bool, evidence: &str, detail: Option<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.report.checks.push(Check { name: name.into(), status, evidence: evidence.into(), detail });
    }

    /// Records an error as a failed check; a missing witness is inconclusive.
    pub fn error(&mut self, name: &str, e: &Error) {
        let status = if matches!(e, Error::WitnessNotFound(_)) { Status::Inconclusive } else { Status::Fail };
        self.report.checks.push(Check { name: name.into(), status, evidence: "error".into(), detail: Some(e.to_string()) });
    }

    /// `results[section][key] = v`.
    pub fn put(&mut self, section: &str, key: &str, v: Value) {
        let entry = self.report.results.entry(section.to_string()).or_insert_with(|| json!({}));
        entry.as_object_mut().expect("sections are objects").insert(key.into(), v);
    }

    /// Runs a fallible stage; an error becomes a check named `name`.
    pub fn guard<T>(&mut self, name: &str, r: tcm_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(name, &e);
                None
            }
        }
    }
}

pub fn lt_ring(p: u64, n: usize, a: u32, t: usize, d: i32, e: i32) -> tcm_core::Result<Arc<RingCtx>> {
    RingCtx::new(RingSpec::lt_flavor(p, n, a, t, d, e))
}

/// `(exponent of u_t, coefficient)` of the lowest `u_t`-term of `c mod m_t`,
/// provided every other term has higher `u_t`-degree and no other variable.
pub fn leading_u_term(c: &RingElem, t: usize) -> Option<(i32, u64)> {
    let terms = c.reduce_mod_mt().terms();
    let v = t - 1;
    let clean = terms.iter().all(|(e, _)| e.iter().enumerate().all(|(i, &x)| i == v || x == 0));
    let min = terms.iter().min_by_key(|(e, _)| e[v])?;
    let unique = terms.iter().filter(|(e, _)| e[v] == min.0[v]).count() == 1;
    (clean && unique).then(|| (min.0[v], min.1))
}

/// Degrees of the nonzero coefficients of `s mod m_t`.
fn residue_support(s: &Series1) -> Vec<usize> {
    let r = s.reduce_mod_mt();
    (0..r.coeffs().len()).filter(|&i| !r.coeff(i).is_zero()).collect()
}

/// `s mod (p, u_1^2)` over `E` with `n = 2`, as `(x-degree, u-exponent)` pairs.
fn residue_mod_p_u2(s: &Series1) -> Vec<(usize, i32)> {
    let p = s.ctx().p();
    let mut out = vec![];
    for (i, c) in s.coeffs().iter().enumerate() {
        for (e, v) in c.terms() {
            if v % p != 0 && e.iter().sum::<i32>() < 2 {
                out.push((i, e[0]));
            }
        }
    }
    out
}

fn monomial(ctx: &Arc<RingCtx>, deg: usize) -> Series1 {
    Series1::monomial(ctx, deg, ctx.one())
}

fn unit_ok(su: &SubtractionUnit) -> bool {
    let one = su.unit.mul(&su.unit_inverse);
    one.is_one() && one.precision() >= 1
}

/// Axioms, congruences and (at height one, `p = 2`) the multiplicative law.
pub fn fgl_section(s: &mut Session, label: &str, f: &Fgl) {
    axioms_section(s, label, f);
    if f.n() == 1 && f.p() == 2 {
        multiplicative_section(s, label, f);
    }
    congruence_section(s, label, f);
}

pub fn axioms_section(s: &mut Session, label: &str, f: &Fgl) {
    let ax = s.timed(&format!("{label}: axioms"), || f.axiom_check());
    if let Some(ax) = s.guard(&format!("{label}.axioms"), ax) {
        s.check(&format!("{label}.axioms.unital"), ax.unital, "exact");
        s.check(&format!("{label}.axioms.commutative"), ax.commutative, "exact");
        s.check(&format!("{label}.axioms.associative"), ax.associative, "exact");
        s.check(&format!("{label}.axioms.p_series_endomorphism"), ax.endomorphism, "exact");
        s.put(label, "axioms", ax.to_json());
    }
    s.put(label, "law_terms", json!(f.law().terms().len()));
    s.put(label, "d_f", json!(f.df()));
}

/// Height one at `p = 2` must be the multiplicative law `x + y + xy`.
pub fn multiplicative_section(s: &mut Session, label: &str, f: &Fgl) {
    let terms = f.law().terms();
    let ok = terms.len() == 3
        && terms.iter().all(|(i, j, c)| matches!((i, j), (1, 0) | (0, 1) | (1, 1)) && c.is_one());
    s.check(&format!("{label}.multiplicative_closed_form"), ok, "oracle:x+y+xy");
    s.put(label, "law", f.law().to_json());
}

pub fn congruence_section(s: &mut Session, label: &str, f: &Fgl) {
    let (mut reps, mut skipped) = (vec![], vec![]);
    for k in 1..=2 {
        for h in 0..f.n() {
            let name = format!("{label}.congruence.h{h}.k{k}");
            // p^k·x vanishes mod p^a: nothing to compare
            if h == 0 && k >= f.ring().spec().a {
                skipped.push(name);
                continue;
            }
            let r = s.timed(&format!("{label}: congruences"), || f.congruence_check(h, k));
            if let Some(r) = s.guard(&name, r) {
                let p = f.p();
                let expected = if h == 0 { k as u64 } else { (p.pow(h as u32 * k) - 1) / (p.pow(h as u32) - 1) };
                s.check(&name, r.pass && r.exponent == expected, "exact");
                reps.push(r.to_json());
            }
        }
    }
    s.put(label, "congruences", json!(reps));
    if !skipped.is_empty() {
        s.put(label, "congruences_skipped_p_power_vanishes", json!(skipped));
    }
}

/// Weierstrass preparation of `[p^k](x)` over `E` and over `L_t`.
pub fn prep_section(s: &mut Session, label: &str, f: &Fgl, lt: &Arc<RingCtx>, k: u32, t: usize) {
    let (p, n) = (f.p() as usize, f.n());
    let rank = p.pow(k * n as u32);
    let te = s.timed(&format!("{label}: torsion E"), || torsion::torsion_algebra_e(f, k));
    let Some(te) = s.guard(&format!("{label}.E"), te) else { return };
    let dmax = te.series_degree.unwrap_or(2 * rank);
    let series = f.p_power_series(k, dmax);
    let Some(series) = s.guard(&format!("{label}.E.series"), series) else { return };
    let Some(pr) = s.guard(&format!("{label}.E.prepare"), weierstrass_prepare(&series)) else { return };
    s.check(&format!("{label}.E.monic_degree"), pr.monic.is_monic() && pr.monic.degree() == Some(rank), "exact");
    s.check(&format!("{label}.E.multiply_back"), pr.monic.mul(&pr.unit) == series, "exact");
    let ectx = series.ctx().clone();
    s.check(&format!("{label}.E.residue_is_x_power"), pr.monic.reduce_mod_mt() == monomial(&ectx, rank), "exact");
    if k == 1 && n == 2 {
        let got = residue_mod_p_u2(&pr.monic);
        let want = vec![(p, 1), (rank, 0)];
        s.check_with(&format!("{label}.E.mod_p_u2"), got == want, "exact", Some(format!("{got:?}")));
    }
    s.put(label, "E_monic", pr.monic.to_json());
    s.put(label, "E_series_degree", json!(dmax));

    let conn = p.pow(k * t as u32);
    let Some(sl) = s.guard(&format!("{label}.Lt.convert"), series.convert(lt)) else { return };
    let pl = s.timed(&format!("{label}: prepare Lt"), || weierstrass_prepare(&sl));
    let Some(pl) = s.guard(&format!("{label}.Lt.prepare"), pl) else { return };
    s.check(&format!("{label}.Lt.monic_degree"), pl.monic.is_monic() && pl.monic.degree() == Some(conn), "exact");
    s.check(&format!("{label}.Lt.multiply_back"), pl.monic.mul(&pl.unit) == sl, "exact");
    s.check(&format!("{label}.Lt.residue_is_x_power"), pl.monic.reduce_mod_mt() == monomial(lt, conn), "exact");
    s.put(label, "Lt_monic", pl.monic.to_json());
}

/// Torsion algebra, connected–étale splitting and the CRT certificate.
pub fn torsion_section(s: &mut Session, label: &str, la: &LambdaAlgebra, t: usize) {
    let (p, n, k) = (la.p() as usize, la.fgl.n(), la.level);
    let te = &la.torsion;
    let rank = p.pow(k * n as u32);
    let conn = p.pow(k * t as u32);
    s.check(&format!("{label}.E.rank"), te.rank() == rank, "exact");
    let nil_ok = matches!((te.nilpotency, te.series_degree), (Some(nu), Some(dm)) if nu <= dm + 1);
    s.check(&format!("{label}.E.nilpotent_within_truncation"), nil_ok, "exact");
    let sp = &la.split;
    s.check(&format!("{label}.split.g_degree"), sp.g.degree() == Some(conn), "exact");
    s.check(&format!("{label}.split.h_degree"), sp.h.degree() == Some(rank - conn), "exact");
    s.check(&format!("{label}.split.product"), sp.g.mul(&sp.h) == sp.f, "exact");
    let lt = la.lt().clone();
    let bez = sp.bezout_a.mul(&sp.g).add(&sp.bezout_b.mul(&sp.h));
    s.check(&format!("{label}.split.bezout_mod_mt"), bez.reduce_mod_mt() == monomial(&lt, 0), "certificate");
    s.check(&format!("{label}.split.idempotent_mod_mt"), sp.idempotent_mod_mt, "certificate");
    s.check(&format!("{label}.split.g_residue"), sp.g.reduce_mod_mt() == monomial(&lt, conn), "exact");
    if k == 1 {
        let support = residue_support(&sp.h);
        let lead = leading_u_term(&sp.h.coeff(0), t);
        let ok = support == vec![0, rank - conn] && matches!(lead, Some((1, c)) if c % p as u64 != 0);
        s.check_with(&format!("{label}.split.h_residue"), ok, "exact", Some(format!("support {support:?}, constant term leading {lead:?}")));
    }
    s.put(label, "rank", json!(te.rank()));
    s.put(label, "nilpotency", json!(te.nilpotency));
    s.put(label, "split", sp.to_json());
}

/// Étale coordinate, minimal polynomial, smoothness and subtraction units.
pub fn etale_section(s: &mut Session, label: &str, la: &LambdaAlgebra, t: usize) {
    let (p, n, k) = (la.p() as usize, la.fgl.n(), la.level);
    let et = &la.etale;
    let et_rank = p.pow(k * (n - t) as u32);
    s.check(&format!("{label}.Y_congruent_to_x_power"), et.y_congruence, "exact");
    s.check(&format!("{label}.g_divides_Y"), et.divisible_by_g, "exact");
    s.check(&format!("{label}.j_of_Y_zero"), et.j_of_y_zero, "exact");
    s.check(&format!("{label}.j_monic_degree"), et.j.is_monic() && et.j.degree() == Some(et_rank), "exact");
    let q = s.timed(&format!("{label}: quotient series"), || torsion::quotient_series_check(&la.fgl, k, t, &et.j));
    if let Some((prep, same)) = s.guard(&format!("{label}.j_matches_prepared_quotient"), q) {
        s.check(&format!("{label}.j_matches_prepared_quotient"), same, "exact");
        s.put(label, "prepared_quotient_series", prep.to_json());
    }
    let pp = p as u64;
    let lowest = (pp.pow(k) - 1) / (pp - 1);
    let lead = leading_u_term(&et.j.coeff(1), t);
    let ok = matches!(lead, Some((e, c)) if e == lowest as i32 && c % pp != 0);
    s.check_with(&format!("{label}.j_lowest_coefficient"), ok, "exact", Some(format!("leading term {lead:?}, expected exponent {lowest}")));
    if k == 1 {
        let support = residue_support(&et.j);
        s.check_with(&format!("{label}.j_residue"), support == vec![1, et_rank], "exact", Some(format!("support {support:?}")));
    }
    let sm = s.timed(&format!("{label}: smoothness"), || torsion::etale_smoothness_check(&et.j, &et.y));
    if let Some(sm) = s.guard(&format!("{label}.smoothness"), sm) {
        let aj = sm.inverse_mod_j.algebra().clone();
        let ok = aj.from_poly(0, &sm.derivative).map(|d| d.mul(&sm.inverse_mod_j).is_one()).unwrap_or(false);
        s.check(&format!("{label}.smoothness"), ok, "certificate");
        s.put(label, "smoothness", sm.to_json());
    }
    s.put(label, "etale", et.to_json());
}

pub fn subtraction_section(s: &mut Session, label: &str, la: &LambdaAlgebra) {
    let f = la.fgl.clone();
    let ta = s.timed(&format!("{label}: subtraction g"), || {
        torsion::torsion_algebra(&f, la.lt(), la.level).and_then(|ta| torsion::subtraction_unit(&f, &ta))
    });
    if let Some(su) = s.guard(&format!("{label}.subtraction_unit.g"), ta) {
        s.check(&format!("{label}.subtraction_unit.g"), unit_ok(&su), "certificate");
        s.put(label, "subtraction_unit_g", su.to_json());
    }
    let es = s.timed(&format!("{label}: subtraction j"), || la.etale_subtraction().cloned());
    if let Some(su) = s.guard(&format!("{label}.subtraction_unit.j"), es) {
        s.check(&format!("{label}.subtraction_unit.j"), unit_ok(&su), "certificate");
        s.put(label, "subtraction_unit_j", su.to_json());
    }
}

pub fn vandermonde_section(s: &mut Session, label: &str, la: &LambdaAlgebra) {
    let v = s.timed(&format!("{label}: vandermonde"), || character::vandermonde_certificate(la));
    let Some(v) = s.guard(&format!("{label}.vandermonde"), v) else { return };
    let ok = v.verify(la);
    let ok = s.guard(&format!("{label}.vandermonde"), ok).unwrap_or(false);
    s.check(&format!("{label}.vandermonde"), ok, "certificate");
    let pairs_ok = v.pairs.iter().all(|c| c.verify(|d| la.phi_y(d)).unwrap_or(false));
    s.check(&format!("{label}.pairwise"), pairs_ok && !v.pairs.is_empty(), "certificate");
    s.put(label, "vandermonde", v.to_json());
}

/// `"2"`, `"4"`, `"2x2"` → cyclic factor levels `[1]`, `[2]`, `[1, 1]`.
pub fn parse_abelian(g: &str, p: u64) -> Result<Vec<u32>, String> {
    if g == "1" {
        return Ok(vec![]);
    }
    g.split(['x', 'X', '*'])
        .map(|f| {
            let mut m: u64 = f.trim().trim_start_matches("Z/").trim_start_matches('Z').parse().map_err(|_| format!("bad group factor `{f}`"))?;
            let mut k = 0;
            while m > 1 && m % p == 0 {
                m /= p;
                k += 1;
            }
            if m != 1 || k == 0 {
                return Err(format!("group factor `{f}` is not a nontrivial power of p = {p}"));
            }
            Ok(k)
        })
        .collect()
}

pub fn charmap_section(s: &mut Session, label: &str, la: &LambdaAlgebra, factors: &[u32], budget: u32) {
    let name = if factors.is_empty() { "1".to_string() } else {
        factors.iter().map(|k| la.p().pow(*k).to_string()).collect::<Vec<_>>().join("x")
    };
    let l = format!("{label}.G={name}");
    let m = s.timed(&format!("{l}: matrix"), || character::character_map_abelian(factors, la));
    let Some(m) = s.guard(&format!("{l}.matrix"), m) else { return };
    s.check(&format!("{l}.ring_map"), m.ring_map, "exact");
    s.check(&format!("{l}.zero_class_inclusion"), m.zero_class_inclusion, "exact");
    // p^{k'n} = p^{k't} · p^{k'(n−t)} for each factor Z/p^{k'}
    let levels: u32 = factors.iter().sum();
    let p = la.p() as usize;
    let ok = m.rank_identity()
        && m.factor_rank == p.pow(levels * la.fgl.n().saturating_sub(la.r) as u32)
        && m.classes.len() == p.pow(levels * la.r as u32);
    s.check(&format!("{l}.rank_identity"), ok, "exact");
    let mut summary = json!({
        "size": m.size(),
        "classes": m.classes.len(),
        "factor_rank": m.factor_rank,
        "domain_rank": m.domain_rank,
    });
    s.put(label, &format!("charmap G={name}"), m.to_json());
    if factors.len() <= 1 {
        let c = s.timed(&format!("{l}: iso"), || character::iso_certificate(&m, la, budget));
        if let Some(c) = s.guard(&format!("{l}.iso_certificate"), c) {
            let ok = c.verify(la).unwrap_or(false) && c.exponents.iter().all(|&e| e <= budget);
            s.check(&format!("{l}.iso_certificate"), ok, "certificate");
            summary["iso_exponents"] = json!(c.exponents);
            s.put(label, &format!("iso G={name}"), c.to_json());
        }
    } else {
        let c = s.timed(&format!("{l}: iso"), || character::iso_certificate_abelian(factors, la, budget));
        if let Some(c) = s.guard(&format!("{l}.iso_certificate"), c) {
            let ok = c.verify(la).unwrap_or(false);
            s.check(&format!("{l}.iso_certificate"), ok, "certificate");
            summary["iso_exponents"] = json!(c.exponents);
            s.put(label, &format!("iso G={name}"), c.to_json());
        }
    }
    s.put(label, &format!("summary G={name}"), summary);
}

/// Corpus name (`1`, `Zn` or `n`, `ZmxZn` or `mxn`, `S3`, `D4`, `Q8`) or a JSON file.
pub fn load_group(spec: &str) -> Result<FiniteGroup, String> {
    let norm = spec.replace("Z/", "Z").replace('×', "x");
    let cyc = |s: &str| s.strip_prefix('Z').unwrap_or(s).parse::<usize>().ok().filter(|&n| (1..=64).contains(&n));
    match norm.as_str() {
        "1" | "trivial" => return Ok(corpus::trivial()),
        "S3" => return Ok(corpus::symmetric3()),
        "D4" => return Ok(corpus::dihedral4()),
        "Q8" => return Ok(corpus::quaternion()),
        _ => {}
    }
    if let Some(n) = cyc(&norm) {
        return Ok(corpus::cyclic(n));
    }
    if let Some((a, b)) = norm.split_once('x') {
        if let (Some(m), Some(n)) = (cyc(a), cyc(b)) {
            return Ok(corpus::cyclic_product(m, n));
        }
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("group `{spec}`: not a corpus name, and {e}"))?;
    let input: GroupInput = serde_json::from_str(&text).map_err(|e| format!("group file {spec}: {e}"))?;
    input.build().map_err(|e| format!("group file {spec}: {e}"))
}

pub fn group_section(s: &mut Session, label: &str, g: &FiniteGroup, p: usize, r: usize, t: u32) {
    let l = format!("{label}.{}", g.name());
    let (tuples, classes, cf) = s.timed(&format!("{label}: groups"), || {
        (groups::commuting_p_tuples(g, p, r).len(), groups::tuple_classes(g, p, r), groups::class_function_report(g, p, r, t))
    });
    let orbit_sum: usize = classes.iter().map(|c| c.orbit_size).sum();
    s.check(&format!("{l}.orbits_partition_tuples"), orbit_sum == tuples, "exact");
    let stab = classes.iter().all(|c| c.orbit_size * c.centralizer.len() == g.order());
    s.check(&format!("{l}.orbit_stabilizer"), stab, "exact");
    if g.is_abelian() {
        let pg = (0..g.order()).filter(|&a| is_p_power(g.element_order(a), p)).count() as u64;
        s.check(&format!("{l}.abelian_rank_identity"), cf.total_rank == Some(pg.pow(r as u32 + t)), "exact");
    }
    let mut cents: Vec<usize> = classes.iter().map(|c| c.centralizer.len()).collect();
    cents.sort_unstable_by(|a, b| b.cmp(a));
    s.put(label, g.name(), json!({
        "order": g.order(),
        "p": p,
        "r": r,
        "commuting_tuples": tuples,
        "classes": classes.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        "centralizer_orders": cents,
        "class_functions": cf.to_json(),
    }));
}

fn is_p_power(mut m: usize, p: usize) -> bool {
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

pub fn induction_section(s: &mut Session, label: &str) {
    let mut out = vec![];
    for (g, h, p) in corpus::induction_pairs() {
        let name = format!("{label}.induction.{}.|H|={}.p={p}", g.name(), h.len());
        let r = s.timed(&format!("{label}: induction"), || groups::induction_check(&g, &h, p, 1));
        if let Some(r) = s.guard(&name, r) {
            s.check(&name, r.matches, "oracle:brute-force orbit count");
            out.push(json!({ "group": g.name(), "subgroup_order": h.len(), "p": p, "report": r.to_json() }));
        }
    }
    s.put(label, "induction", json!(out));
}
