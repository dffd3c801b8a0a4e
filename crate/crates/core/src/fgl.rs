//! Formal group laws over the truncated `E` ring.
//!
//! Height `n >= 2` uses the `p`-typical law whose logarithm
//! `Σ m_i x^{p^i}` satisfies `p·m_i = Σ_{j<i} m_j v_{i-j}^{p^j}` with
//! `v_i = u_i` (`i < n`), `v_n = 1` and `v_i = 0` beyond. Its `p`-series is
//! congruent to `u_h x^{p^h} + …` modulo `(p, u_1, …, u_{h-1})`. Series are
//! obtained by a degree-doubling Newton iteration against the scaled
//! logarithm `p^K·log`, which is integral below degree `p^{K+1}`.
//!
//! Height 1 uses the classical Lubin–Tate law of `p·x + x^p` (integer
//! coefficients), built degree by degree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElem, QuotientAlgebraExt};
use crate::biseries::{BiSeries, MSeries};
use crate::error::{Error, Result};
use crate::ring::{inv_mod, RingCtx, RingElem, RingSpec};
use crate::series::Series1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    /// Law with logarithm built from the Hazewinkel recursion.
    PTypical,
    /// Law with `[p](x) = p·x + x^p` exactly (height 1 only).
    LubinTate,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PSeriesSpec {
    pub p: u64,
    pub n: usize,
    pub coordinate: Coordinate,
}

impl PSeriesSpec {
    pub fn standard(p: u64, n: usize) -> PSeriesSpec {
        let coordinate = if n == 1 { Coordinate::LubinTate } else { Coordinate::PTypical };
        PSeriesSpec { p, n, coordinate }
    }
}

/// A formal group law with its truncation parameters.
pub struct Fgl {
    spec: PSeriesSpec,
    ring: Arc<RingCtx>,
    df: usize,
    law: BiSeries,
    log: Vec<String>,
    boxes: Mutex<HashMap<(usize, usize, bool), BiSeries>>,
}

trait Graded: Clone {
    fn with_tot(&self, d: usize) -> Self;
    fn g_add(&self, o: &Self) -> Self;
    fn g_sub(&self, o: &Self) -> Self;
    fn g_mul(&self, o: &Self) -> Self;
    fn g_scale(&self, r: &RingElem) -> Self;
    fn g_div_p(&self, v: u32) -> Result<Self>;
    fn g_one(&self) -> Self;
    fn g_is_zero(&self) -> bool;
}

impl Graded for Series1 {
    fn with_tot(&self, d: usize) -> Self {
        Series1::new(self.ctx(), self.coeffs().to_vec(), d)
    }
    fn g_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn g_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn g_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn g_scale(&self, r: &RingElem) -> Self {
        self.scale(r)
    }
    fn g_div_p(&self, v: u32) -> Result<Self> {
        self.map_coeffs(self.ctx(), |c| c.div_p_pow(v))
    }
    fn g_one(&self) -> Self {
        Series1::new(self.ctx(), vec![self.ctx().one()], self.x_precision())
    }
    fn g_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Graded for BiSeries {
    fn with_tot(&self, d: usize) -> Self {
        let (bx, by, _) = self.bounds();
        let mut s = BiSeries::zero(self.ctx(), bx, by, d);
        for (i, j, c) in self.terms() {
            s.set(i, j, c);
        }
        s
    }
    fn g_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn g_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn g_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn g_scale(&self, r: &RingElem) -> Self {
        self.scale(r)
    }
    fn g_div_p(&self, v: u32) -> Result<Self> {
        self.div_p_pow(v)
    }
    fn g_one(&self) -> Self {
        self.constant(&self.ctx().one())
    }
    fn g_is_zero(&self) -> bool {
        self.is_zero()
    }
}

fn ilog(p: u64, t: usize) -> u32 {
    let mut k = 0;
    let mut q = p;
    while q <= t as u64 {
        q *= p;
        k += 1;
    }
    k
}

/// Scaled logarithm data over a padded ring: `P_i = p^i m_i`.
struct LogData {
    ctx: Arc<RingCtx>,
    p: u64,
    k: u32,
    pc: Vec<RingElem>,
}

impl LogData {
    fn new(spec: &PSeriesSpec, ring: &RingSpec, tot: usize) -> Result<LogData> {
        let p = spec.p;
        let k = ilog(p, tot);
        let a = ring.a + k + 2;
        if p.checked_pow(a).map_or(true, |q| q >= 1 << 31) {
            return Err(Error::InvalidParams(format!("padded precision p^{a} too large for degree {tot}")));
        }
        let ctx = RingCtx::new(ring.with_a(a))?;
        let v = |m: usize| -> RingElem {
            if m < spec.n {
                ctx.var(m)
            } else if m == spec.n {
                ctx.one()
            } else {
                ctx.zero()
            }
        };
        let mut pc = vec![ctx.one()];
        for i in 1..=k as usize {
            let mut acc = ctx.zero();
            for (j, pj) in pc.iter().enumerate() {
                let vm = v(i - j);
                if vm.is_zero() {
                    continue;
                }
                let term = pj.mul(&vm.pow(p.pow(j as u32))).scale(p.pow((i - 1 - j) as u32) as i64);
                acc = acc.add(&term);
            }
            pc.push(acc);
        }
        Ok(LogData { ctx, p, k, pc })
    }

    /// `w^{p^i}` for `i = 0..=K`.
    fn powers<G: Graded>(&self, w: &G) -> Vec<G> {
        let mut v = vec![w.clone()];
        for _ in 0..self.k {
            let last = v.last().unwrap();
            v.push(gpow(last, self.p));
        }
        v
    }

    /// `p^K · log(w)`.
    fn log<G: Graded>(&self, pw: &[G]) -> G {
        let mut acc = pw[0].g_scale(&self.pc[0].scale(self.p.pow(self.k) as i64));
        for i in 1..=self.k as usize {
            let coef = self.pc[i].scale(self.p.pow(self.k - i as u32) as i64);
            acc = acc.g_add(&pw[i].g_scale(&coef));
        }
        acc
    }

    /// `(p^K · log)'(w) / p^K = Σ P_i w^{p^i - 1}`.
    fn omega<G: Graded>(&self, pw: &[G]) -> G {
        let mut acc = pw[0].g_one();
        // w^{p^i - 1} = w^{p^{i-1} - 1} · (w^{p^{i-1}})^{p-1}
        let mut q = pw[0].g_one();
        for i in 1..=self.k as usize {
            q = q.g_mul(&gpow(&pw[i - 1], self.p - 1));
            acc = acc.g_add(&q.g_scale(&self.pc[i]));
        }
        acc
    }

    /// Solve `p^K log(w) = target` with `w ≡ w0` in degree 1. The inverse of
    /// `ω(w)` is refined alongside, one Newton step per doubling.
    fn solve<G: Graded>(&self, w0: &G, target: &G, tot: usize) -> Result<G> {
        let mut w = w0.with_tot(1);
        let mut inv = w.g_one().with_tot(0);
        let mut s = 1;
        while s < tot {
            let s2 = (2 * s + 1).min(tot);
            w = w.with_tot(s2);
            let pw = self.powers(&w);
            let e = self.log(&pw).g_sub(&target.with_tot(s2));
            let e = e.g_div_p(self.k).map_err(|_| Error::SolveFailure(s2))?;
            let om = self.omega(&pw).with_tot(s);
            let inv_s = inv.with_tot(s);
            inv = inv_s.g_add(&inv_s.g_mul(&om.g_one().g_sub(&om.g_mul(&inv_s))));
            let delta = e.g_mul(&inv.with_tot(s2));
            w = w.g_sub(&delta);
            s = s2;
        }
        let chk = self.log(&self.powers(&w)).g_sub(&target.with_tot(tot));
        if !chk.g_is_zero() {
            return Err(Error::SolveFailure(tot));
        }
        Ok(w)
    }
}

fn gpow<G: Graded>(w: &G, mut e: u64) -> G {
    let mut r: Option<G> = None;
    let mut b = w.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = Some(match r {
                Some(r) => r.g_mul(&b),
                None => b.clone(),
            });
        }
        e >>= 1;
        if e > 0 {
            b = b.g_mul(&b);
        }
    }
    r.unwrap_or_else(|| w.g_one())
}

impl Fgl {
    /// Construct the law for `(p, n)` with coefficients mod `p^a`, `u`-box `d`,
    /// and the stored series to total degree `df`.
    pub fn new(p: u64, n: usize, a: u32, d: i32, df: usize) -> Result<Fgl> {
        Fgl::with_spec(PSeriesSpec::standard(p, n), a, d, df)
    }

    pub fn with_spec(spec: PSeriesSpec, a: u32, d: i32, df: usize) -> Result<Fgl> {
        let ring = RingCtx::new(RingSpec::e_flavor(spec.p, spec.n, a, d))?;
        if spec.coordinate == Coordinate::LubinTate && spec.n != 1 {
            return Err(Error::InvalidParams("integer p-series coordinate needs height 1".into()));
        }
        let mut f = Fgl { spec, ring, df, law: BiSeries::zero(&RingCtx::new(RingSpec::e_flavor(2, 1, 1, 0))?, 0, 0, 0), log: vec![], boxes: Mutex::new(HashMap::new()) };
        f.law = f.compute_box(df, df, df, false)?;
        f.log.push(format!("{:?} law to total degree {df} at p^{a}, u-box {d}", f.spec.coordinate));
        Ok(f)
    }

    /// Rebuild from a stored law (e.g. from a cache file).
    pub fn from_parts(spec: PSeriesSpec, a: u32, d: i32, df: usize, law: &serde_json::Value) -> Result<Fgl> {
        let ring = RingCtx::new(RingSpec::e_flavor(spec.p, spec.n, a, d))?;
        let law = BiSeries::from_json(&ring, law)
            .ok_or_else(|| Error::InvalidParams("malformed stored law".into()))?;
        if law.bounds() != (df, df, df) {
            return Err(Error::InvalidParams("stored law has wrong truncation".into()));
        }
        Ok(Fgl { spec, ring, df, law, log: vec!["loaded from cache".into()], boxes: Mutex::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &PSeriesSpec {
        &self.spec
    }
    pub fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    pub fn n(&self) -> usize {
        self.spec.n
    }
    pub fn df(&self) -> usize {
        self.df
    }
    /// `F(x, y)` to total degree `D_F`.
    pub fn law(&self) -> &BiSeries {
        &self.law
    }
    pub fn construction_log(&self) -> &[String] {
        &self.log
    }

    fn compute_box(&self, bx: usize, by: usize, tot: usize, diff: bool) -> Result<BiSeries> {
        let r = &self.ring;
        match self.spec.coordinate {
            Coordinate::PTypical => {
                let ld = LogData::new(&self.spec, r.spec(), tot)?;
                let c = &ld.ctx;
                let x = BiSeries::x(c, bx, by, tot);
                let y = BiSeries::y(c, bx, by, tot);
                let (w0, target) = if diff {
                    (x.sub(&y), ld.log(&ld.powers(&x)).sub(&ld.log(&ld.powers(&y))))
                } else {
                    (x.add(&y), ld.log(&ld.powers(&x)).add(&ld.log(&ld.powers(&y))))
                };
                ld.solve(&w0, &target, tot)?.convert(r)
            }
            Coordinate::LubinTate => {
                let full = self.lubin_tate_law(tot)?;
                let g = if diff {
                    let inv = self.lt_inverse(&full, tot)?;
                    let xs = MSeries::var(full.ctx(), 2, tot, 0);
                    let ys = MSeries::var(full.ctx(), 2, tot, 1);
                    MSeries::apply_bivariate(&full, &xs, &ys.apply_univariate(&inv)).to_biseries()
                } else {
                    full
                };
                Ok(g.convert(r)?.restrict(bx, by))
            }
        }
    }

    fn lt_ctx(&self, tot: usize) -> Result<Arc<RingCtx>> {
        let extra = 2 * ilog(self.spec.p, tot) + 2;
        RingCtx::new(self.ring.spec().with_a(self.ring.spec().a + extra))
    }

    /// Height-one law of `p·x + x^p`, degree by degree:
    /// `h(p·x, p·y) − p·h = −(f(F) − F(f(x), f(y)))` in each new degree.
    fn lubin_tate_law(&self, tot: usize) -> Result<BiSeries> {
        let c = self.lt_ctx(tot)?;
        let p = self.spec.p;
        let f = self.lt_pseries_poly(&c);
        let mut law = BiSeries::zero(&c, tot, tot, tot);
        law.set(1, 0, c.one());
        law.set(0, 1, c.one());
        for m in 1..tot {
            let t = m + 1;
            let x = MSeries::var(&c, 2, t, 0);
            let y = MSeries::var(&c, 2, t, 1);
            let lf = MSeries::from_biseries(&law.truncate(t));
            let lhs = lf.apply_univariate(&f);
            let rhs = MSeries::apply_bivariate(&law.truncate(t), &x.apply_univariate(&f), &y.apply_univariate(&f));
            let err = lhs.sub(&rhs);
            let q = c.modulus();
            let unit = (1 + q - (p.pow(m as u32) % q)) % q;
            let uinv = c.from_int(inv_mod(unit, q).ok_or(Error::SolveFailure(t))? as i64);
            for (e, v) in err.terms() {
                if (e[0] + e[1]) as usize != t {
                    continue;
                }
                let h = v.div_p_pow(1).map_err(|_| Error::SolveFailure(t))?.mul(&uinv).neg();
                law.set(e[0] as usize, e[1] as usize, h);
            }
        }
        Ok(law)
    }

    fn lt_pseries_poly(&self, c: &Arc<RingCtx>) -> Series1 {
        let p = self.spec.p as usize;
        let mut v = vec![c.zero(); p + 1];
        v[1] = c.from_int(p as i64);
        v[p] = v[p].add(&c.one());
        Series1::poly(c, v)
    }

    /// Formal inverse `[-1](x)` for the height-one law, by fixed point.
    fn lt_inverse(&self, law: &BiSeries, tot: usize) -> Result<Series1> {
        let c = law.ctx();
        let x = MSeries::var(c, 1, tot, 0);
        let mut i = x.scale(&c.from_int(-1));
        for _ in 0..tot {
            // i ← i − F(x, i)
            let v = MSeries::apply_bivariate(law, &x, &i);
            i = i.sub(&v);
        }
        let coeffs = (0..=tot).map(|k| i.coeff(&[k as u32])).collect();
        Ok(Series1::new(c, coeffs, tot))
    }

    fn cached_box(&self, bx: usize, by: usize, diff: bool) -> Result<BiSeries> {
        if !diff && bx <= self.df && by <= self.df && bx + by <= self.df {
            return Ok(self.law.restrict(bx, by));
        }
        if let Some(b) = self.boxes.lock().unwrap().get(&(bx, by, diff)) {
            return Ok(b.clone());
        }
        let b = self.compute_box(bx, by, bx + by, diff)?;
        self.boxes.lock().unwrap().insert((bx, by, diff), b.clone());
        Ok(b)
    }

    /// All coefficients `c_ij` of `F` with `i <= bx`, `j <= by`.
    pub fn law_box(&self, bx: usize, by: usize) -> Result<BiSeries> {
        self.cached_box(bx, by, false)
    }

    /// All coefficients of `x −_F y` with `i <= bx`, `j <= by`.
    pub fn difference_box(&self, bx: usize, by: usize) -> Result<BiSeries> {
        self.cached_box(bx, by, true)
    }

    /// `[m](x)` to x-degree `dmax`.
    pub fn int_series(&self, m: i64, dmax: usize) -> Result<Series1> {
        let r = &self.ring;
        match self.spec.coordinate {
            Coordinate::PTypical => {
                let ld = LogData::new(&self.spec, r.spec(), dmax)?;
                let c = &ld.ctx;
                let x = Series1::new(c, vec![c.zero(), c.one()], dmax);
                let target = ld.log(&ld.powers(&x)).scale(&c.from_int(m));
                let w0 = x.scale(&c.from_int(m));
                ld.solve(&w0, &target, dmax)?.convert(r)
            }
            Coordinate::LubinTate => {
                let law = self.lubin_tate_law(dmax)?;
                let c = law.ctx().clone();
                let x = MSeries::var(&c, 1, dmax, 0);
                let base = if m < 0 {
                    let inv = self.lt_inverse(&law, dmax)?;
                    x.apply_univariate(&inv)
                } else {
                    x.clone()
                };
                let mut acc = MSeries::zero(&c, 1, dmax);
                for _ in 0..m.unsigned_abs() {
                    acc = MSeries::apply_bivariate(&law, &acc, &base);
                }
                let coeffs = (0..=dmax).map(|k| acc.coeff(&[k as u32])).collect();
                Series1::new(&c, coeffs, dmax).convert(r)
            }
        }
    }

    /// `[p^k](x)` to x-degree `dmax`.
    pub fn p_power_series(&self, k: u32, dmax: usize) -> Result<Series1> {
        self.int_series(self.spec.p.pow(k) as i64, dmax)
    }

    /// `F(a, b)` for nilpotent elements of a common algebra.
    pub fn fgl_sum(&self, a: &AlgElem, b: &AlgElem) -> Result<AlgElem> {
        let pa = a.nilpotent_powers()?;
        let pb = b.nilpotent_powers()?;
        let g = self.law_box(pa.len() - 1, pb.len() - 1)?;
        eval_on_powers(&g, &pa, &pb)
    }

    /// `a −_F b` for nilpotent elements of a common algebra.
    pub fn fgl_difference(&self, a: &AlgElem, b: &AlgElem) -> Result<AlgElem> {
        let pa = a.nilpotent_powers()?;
        let pb = b.nilpotent_powers()?;
        let g = self.difference_box(pa.len() - 1, pb.len() - 1)?;
        eval_on_powers(&g, &pa, &pb)
    }

    /// `F(s, t)` for series without constant term, to x-degree `dmax`.
    pub fn fgl_sum_series(&self, s: &Series1, t: &Series1, dmax: usize) -> Result<Series1> {
        let g = self.law_box(dmax, dmax)?;
        let lift = |u: &Series1| {
            let mut m = MSeries::zero(&self.ring, 1, dmax);
            for (i, c) in u.coeffs().iter().enumerate().take(dmax + 1) {
                let mut e = MSeries::var(&self.ring, 1, dmax, 0);
                for _ in 1..i {
                    e = e.mul(&MSeries::var(&self.ring, 1, dmax, 0));
                }
                if i == 0 {
                    e = MSeries::constant(&self.ring, 1, dmax, &self.ring.one());
                }
                m = m.add(&e.scale(c));
            }
            m
        };
        let v = MSeries::apply_bivariate(&g, &lift(s), &lift(t));
        let coeffs = (0..=dmax).map(|k| v.coeff(&[k as u32])).collect();
        Ok(Series1::new(&self.ring, coeffs, dmax.min(s.x_precision()).min(t.x_precision())))
    }

    /// Check `[p^k](x) ≡ u_h^{(p^{hk}-1)/(p^h-1)} x^{p^{kh}} + …` modulo
    /// `(p, u_1, …, u_{h-1})` (for `h = 0`: `p^k x + …` with no reduction),
    /// and that only powers of `x^{p^{kh}}` survive.
    pub fn congruence_check(&self, h: usize, k: u32) -> Result<CongruenceReport> {
        if h >= self.spec.n {
            return Err(Error::InvalidParams("need 0 <= h < n".into()));
        }
        let p = self.spec.p;
        let step = p.pow(k * h as u32) as usize;
        let dmax = 3 * step.max(p as usize);
        let s = self.p_power_series(k, dmax)?;
        let red: Vec<RingElem> = s.coeffs().iter().map(|c| reduce_mod_mh(c, h)).collect();
        let red = Series1::new(&self.ring, red, dmax);
        let (lead_deg, exponent, expect) = if h == 0 {
            (1, k as u64, self.ring.from_int(p.pow(k) as i64))
        } else {
            let e = (p.pow(h as u32 * k) - 1) / (p.pow(h as u32) - 1);
            let ex: Vec<i32> = (1..self.spec.n).map(|i| if i == h { e as i32 } else { 0 }).collect();
            (step, e, self.ring.monomial(&ex, 1)?)
        };
        let lowest = red.valuation();
        let only_multiples = red
            .coeffs()
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || i % step == 0);
        let lead = red.coeff(lead_deg);
        let pass = lowest == lead_deg && lead == expect && only_multiples;
        let extracted_c = (0..=dmax / step).map(|j| red.coeff(j * step)).collect();
        let extracted = Series1::new(&self.ring, extracted_c, dmax / step);
        let rep = CongruenceReport {
            h,
            k,
            exponent,
            leading_degree: lowest,
            leading_coefficient: lead.to_string(),
            expected_coefficient: expect.to_string(),
            only_powers_of_x_pkh: only_multiples,
            pass,
            extracted,
        };
        if !pass {
            return Err(Error::CongruenceFailure(format!(
                "h={h} k={k}: lowest degree {lowest}, coefficient {lead}, expected {expect}"
            )));
        }
        Ok(rep)
    }

    /// Group-law identities to total degree `D_F`, and `[p]` being an
    /// endomorphism: `F([p]x, [p]y) = [p](F(x, y))`.
    pub fn axiom_check(&self) -> Result<AxiomReport> {
        let (c, tot) = (&self.ring, self.df);
        let law = &self.law;
        let v = |nv, i| MSeries::var(c, nv, tot, i);
        let (x, y) = (v(2, 0), v(2, 1));
        let fxy = MSeries::apply_bivariate(law, &x, &y);
        let zero = MSeries::zero(c, 2, tot);
        let same = |s: &MSeries, t: &MSeries| s.sub(t).is_zero();
        let unital = same(&MSeries::apply_bivariate(law, &x, &zero), &x) && same(&MSeries::apply_bivariate(law, &zero, &y), &y);
        let commutative = same(&fxy, &MSeries::apply_bivariate(law, &y, &x));
        let (a, b, z) = (v(3, 0), v(3, 1), v(3, 2));
        let left = MSeries::apply_bivariate(law, &MSeries::apply_bivariate(law, &a, &b), &z);
        let right = MSeries::apply_bivariate(law, &a, &MSeries::apply_bivariate(law, &b, &z));
        let associative = same(&left, &right);
        let ps = self.int_series(self.spec.p as i64, tot)?;
        let endomorphism =
            same(&MSeries::apply_bivariate(law, &x.apply_univariate(&ps), &y.apply_univariate(&ps)), &fxy.apply_univariate(&ps));
        Ok(AxiomReport { degree: tot, unital, commutative, associative, endomorphism })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "ring": self.ring.spec(),
            "d_f": self.df,
            "law": self.law.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub degree: usize,
    pub unital: bool,
    pub commutative: bool,
    pub associative: bool,
    pub endomorphism: bool,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.unital && self.commutative && self.associative && self.endomorphism
    }
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "degree": self.degree,
            "unital": self.unital,
            "commutative": self.commutative,
            "associative": self.associative,
            "endomorphism": self.endomorphism,
            "pass": self.pass(),
        })
    }
}

/// Kill `p` and `u_1, …, u_{h-1}` in an `E`-flavor element.
pub fn reduce_mod_mh(c: &RingElem, h: usize) -> RingElem {
    if h == 0 {
        return c.clone();
    }
    let ctx = c.ctx();
    let p = ctx.p() as i64;
    let terms: Vec<(Vec<i32>, i64)> = c
        .terms()
        .into_iter()
        .filter(|(e, _)| e[..h - 1].iter().all(|&x| x == 0))
        .map(|(e, v)| (e, v as i64 % p))
        .collect();
    ctx.from_terms(&terms).expect("terms inside box")
}

#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub h: usize,
    pub k: u32,
    pub exponent: u64,
    pub leading_degree: usize,
    pub leading_coefficient: String,
    pub expected_coefficient: String,
    pub only_powers_of_x_pkh: bool,
    pub pass: bool,
    /// `[p^k]_h(y)`: the reduced series as a series in `y = x^{p^{kh}}`.
    pub extracted: Series1,
}

impl CongruenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "h": self.h,
            "k": self.k,
            "exponent": self.exponent,
            "leading_degree": self.leading_degree,
            "leading_coefficient": self.leading_coefficient,
            "expected_coefficient": self.expected_coefficient,
            "only_powers_of_x_pkh": self.only_powers_of_x_pkh,
            "pass": self.pass,
            "extracted": self.extracted.to_json(),
        })
    }
}

/// `Σ c_ij a^i b^j` given the power tables of `a` and `b` in one algebra.
pub fn eval_on_powers(g: &BiSeries, pa: &[AlgElem], pb: &[AlgElem]) -> Result<AlgElem> {
    let alg = pa[0].algebra().clone();
    let (bx, by, _) = g.bounds();
    if pa.len() > bx + 1 || pb.len() > by + 1 {
        return Err(Error::NonNilpotent(bx.max(by)));
    }
    let mut acc = alg.zero();
    for (j, bj) in pb.iter().enumerate() {
        let mut inner = alg.zero();
        for (i, ai) in pa.iter().enumerate() {
            let c = g.get(i, j);
            if !c.is_exact_zero() {
                inner = inner.add(&ai.scale(&c.convert(alg.ctx())?));
            }
        }
        if !inner.is_exact_zero() {
            acc = acc.add(&inner.mul(bj));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicative_law_at_height_one() {
        let f = Fgl::new(2, 1, 8, 0, 10).unwrap();
        let law = f.law();
        for (i, j, c) in law.terms() {
            assert!((i, j) == (1, 0) || (i, j) == (0, 1) || (i, j) == (1, 1), "{i},{j}: {c}");
            assert!(c.is_one());
        }
        let two = f.int_series(2, 6).unwrap();
        assert_eq!(two, Series1::new(f.ring(), vec![f.ring().zero(), f.ring().from_int(2), f.ring().one()], 6));
    }

    #[test]
    fn law_is_congruent_to_additive_in_low_degree() {
        let f = Fgl::new(2, 2, 6, 6, 6).unwrap();
        assert!(f.law().get(1, 0).is_one());
        assert!(f.law().get(0, 1).is_one());
        assert!(f.law().get(2, 0).is_zero());
    }

    #[test]
    fn p_series_low_terms() {
        let f = Fgl::new(2, 2, 6, 6, 4).unwrap();
        let s = f.int_series(2, 4).unwrap();
        let r = f.ring();
        assert_eq!(s.coeff(1), r.from_int(2));
        assert_eq!(s.coeff(2), r.var(1).neg());
        assert_eq!(s.coeff(3), r.var(1).pow(2).scale(2));
        // -8u^3 - 7
        assert_eq!(s.coeff(4), r.var(1).pow(3).scale(-8).add(&r.from_int(-7)));
    }

    #[test]
    fn p3_series_low_terms() {
        let f = Fgl::new(3, 2, 5, 6, 4).unwrap();
        let s = f.int_series(3, 9).unwrap();
        let r = f.ring();
        let u = r.var(1);
        assert_eq!(s.coeff(1), r.from_int(3));
        assert_eq!(s.coeff(3), u.scale(-8));
        assert_eq!(s.coeff(5), u.pow(2).scale(72));
        assert_eq!(s.coeff(7), u.pow(3).scale(-840));
        assert_eq!(s.coeff(9), u.pow(4).scale(9000).add(&r.from_int(-6560)));
    }

    #[test]
    fn axioms_hold() {
        for f in [Fgl::new(2, 1, 8, 0, 8).unwrap(), Fgl::new(2, 2, 6, 8, 6).unwrap(), Fgl::new(3, 2, 4, 6, 6).unwrap()] {
            let r = f.axiom_check().unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }

    #[test]
    fn perturbed_law_fails_axioms() {
        let f = Fgl::new(2, 2, 6, 8, 6).unwrap();
        let mut law = f.law().to_json();
        law["terms"].as_array_mut().unwrap().push(serde_json::json!([[2, 2], {"terms": [[[0], 1]]}]));
        let g = Fgl::from_parts(f.spec().clone(), 6, 8, 6, &law).unwrap();
        let r = g.axiom_check().unwrap();
        assert!(r.unital && r.commutative);
        assert!(!r.associative);
    }

    #[test]
    fn congruences_flagship() {
        let f = Fgl::new(2, 2, 8, 16, 4).unwrap();
        for k in 1..=2 {
            for h in 0..2 {
                let rep = f.congruence_check(h, k).unwrap();
                assert!(rep.pass);
            }
        }
        let rep = f.congruence_check(1, 2).unwrap();
        assert_eq!(rep.exponent, 3);
        assert_eq!(rep.extracted.coeff(1), f.ring().var(1).pow(3));
    }
}
