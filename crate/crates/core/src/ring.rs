//! Truncated coefficient rings.
//!
//! Two flavors share one dense representation:
//!
//! * `E`: `Z/p^a [u_1, …, u_{n-1}]` modulo all monomials with some exponent
//!   above `d`. The discarded set is an ideal, so arithmetic is exact in the
//!   quotient ring.
//! * `Lt(t)`: the same with `u_t` allowed negative exponents down to `-e`.
//!   This is a box rather than an ideal quotient, so every element carries a
//!   precision profile `N_0 >= N_1 >= … >= N_{a-1}`: the unknown part lies in
//!   `Σ_l p^l u_t^{N_l}·R⁺`, i.e. the coefficient of `u_t^m` is known modulo
//!   `p^λ` where `λ` is the number of levels with `N_l > m`. Unknown digits
//!   are stored as zero. Products that would need exponents below `-e` set a
//!   sticky `lossy` flag instead of silently wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Precision value meaning "known exactly".
pub const EXACT: i32 = i32::MAX;

const MAX_A: usize = 31;

/// Per-digit precision profile (see the module docs); only the first `a`
/// entries are meaningful and they are non-increasing.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Prec([i32; MAX_A]);

impl Prec {
    const EXACT: Prec = Prec([EXACT; MAX_A]);

    fn uniform(n: i32) -> Prec {
        Prec([n; MAX_A])
    }

    fn min(&self, o: &Prec) -> Prec {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(&o.0) {
            *a = (*a).min(*b);
        }
        r
    }

    fn normalize(&mut self) {
        for l in 1..MAX_A {
            self.0[l] = self.0[l].min(self.0[l - 1]);
        }
    }

    /// Number of `p`-adic digits known at `u_t`-exponent `m`.
    fn digits_at(&self, m: i32, a: usize) -> usize {
        self.0[..a].iter().take_while(|&&n| n > m).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    E,
    Lt(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub n: usize,
    pub a: u32,
    pub flavor: Flavor,
    pub d: i32,
    pub e: i32,
}

impl RingSpec {
    pub fn e_flavor(p: u64, n: usize, a: u32, d: i32) -> Self {
        RingSpec { p, n, a, flavor: Flavor::E, d, e: 0 }
    }

    pub fn lt_flavor(p: u64, n: usize, a: u32, t: usize, d: i32, e: i32) -> Self {
        RingSpec { p, n, a, flavor: Flavor::Lt(t), d, e }
    }

    pub fn variables(&self) -> Vec<String> {
        (1..self.n).map(|i| format!("u{i}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.p < 2 || !is_prime(self.p) {
            return bad("p must be a prime");
        }
        if self.n < 1 || self.a < 1 || self.d < 0 {
            return bad("need n >= 1, a >= 1, d >= 0");
        }
        match self.p.checked_pow(self.a) {
            Some(q) if q < (1 << 31) => {}
            _ => return bad("p^a must be below 2^31"),
        }
        match self.flavor {
            Flavor::E if self.e != 0 => bad("laurent depth must be 0 for E flavor"),
            Flavor::Lt(t) if t < 1 || t >= self.n => bad("need 1 <= t < n"),
            Flavor::Lt(_) if self.e < 0 => bad("laurent depth must be nonnegative"),
            _ => Ok(()),
        }
    }

    /// Same box, different flavor.
    pub fn to_lt(&self, t: usize, e: i32) -> RingSpec {
        RingSpec { flavor: Flavor::Lt(t), e, ..self.clone() }
    }

    pub fn with_a(&self, a: u32) -> RingSpec {
        RingSpec { a, ..self.clone() }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| p % i != 0)
}

/// Precomputed layout of a [`RingSpec`]; shared by all elements.
#[derive(Debug)]
pub struct RingCtx {
    spec: RingSpec,
    q: u64,
    lo: Vec<i32>,
    len: Vec<usize>,
    stride: Vec<usize>,
    size: usize,
    tvar: Option<usize>,
    offs: Vec<Vec<i32>>,
    ppow: Vec<u64>,
}

impl RingCtx {
    pub fn new(spec: RingSpec) -> Result<Arc<RingCtx>> {
        spec.validate()?;
        let nv = spec.n - 1;
        let tvar = match spec.flavor {
            Flavor::E => None,
            Flavor::Lt(t) => Some(t - 1),
        };
        let lo: Vec<i32> = (0..nv).map(|i| if Some(i) == tvar { -spec.e } else { 0 }).collect();
        let len: Vec<usize> = lo.iter().map(|&l| (spec.d - l + 1) as usize).collect();
        let mut stride = vec![1usize; nv];
        for i in (0..nv.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * len[i + 1];
        }
        let size: usize = len.iter().product();
        let offs = (0..size)
            .map(|mut idx| {
                (0..nv)
                    .map(|v| {
                        let o = idx / stride[v];
                        idx %= stride[v];
                        o as i32
                    })
                    .collect()
            })
            .collect();
        let q = spec.p.pow(spec.a);
        let ppow = (0..=spec.a).map(|i| spec.p.pow(i)).collect();
        Ok(Arc::new(RingCtx { spec, q, lo, len, stride, size, tvar, offs, ppow }))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    pub fn modulus(&self) -> u64 {
        self.q
    }
    pub fn nvars(&self) -> usize {
        self.spec.n - 1
    }
    pub fn t_var(&self) -> Option<usize> {
        self.tvar
    }
    pub fn is_lt(&self) -> bool {
        self.tvar.is_some()
    }

    fn index_of(&self, exps: &[i32]) -> Option<usize> {
        if exps.len() != self.nvars() {
            return None;
        }
        let mut idx = 0;
        for v in 0..exps.len() {
            let o = exps[v] - self.lo[v];
            if o < 0 || o as usize >= self.len[v] {
                return None;
            }
            idx += o as usize * self.stride[v];
        }
        Some(idx)
    }

    fn exps_of(&self, idx: usize) -> Vec<i32> {
        self.offs[idx].iter().zip(&self.lo).map(|(o, l)| o + l).collect()
    }

    fn t_exp(&self, idx: usize) -> i32 {
        match self.tvar {
            Some(v) => self.offs[idx][v] + self.lo[v],
            None => 0,
        }
    }

    fn reduce_int(&self, c: i64) -> u64 {
        c.rem_euclid(self.q as i64) as u64
    }

    pub fn zero(self: &Arc<Self>) -> RingElem {
        RingElem { ctx: self.clone(), c: vec![0; self.size], prec: Prec::EXACT, lossy: false }
    }

    pub fn one(self: &Arc<Self>) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, c: i64) -> RingElem {
        let mut z = self.zero();
        let idx = self.index_of(&vec![0; self.nvars()]).expect("origin in box");
        z.c[idx] = self.reduce_int(c);
        z
    }

    /// The variable `u_i` (1-based, as in the literature).
    pub fn var(self: &Arc<Self>, i: usize) -> RingElem {
        let mut e = vec![0; self.nvars()];
        e[i - 1] = 1;
        self.monomial(&e, 1).expect("u_i in box")
    }

    pub fn monomial(self: &Arc<Self>, exps: &[i32], c: i64) -> Result<RingElem> {
        let idx = self
            .index_of(exps)
            .ok_or_else(|| Error::PrecisionExceeded(format!("exponent {exps:?} outside box")))?;
        let mut z = self.zero();
        z.c[idx] = self.reduce_int(c);
        Ok(z)
    }

    pub fn from_terms(self: &Arc<Self>, terms: &[(Vec<i32>, i64)]) -> Result<RingElem> {
        let mut z = self.zero();
        for (e, c) in terms {
            let idx = self
                .index_of(e)
                .ok_or_else(|| Error::PrecisionExceeded(format!("exponent {e:?} outside box")))?;
            z.c[idx] = (z.c[idx] + self.reduce_int(*c)) % self.q;
        }
        Ok(z)
    }
}

/// Element of a [`RingCtx`].
#[derive(Clone)]
pub struct RingElem {
    ctx: Arc<RingCtx>,
    c: Vec<u64>,
    prec: Prec,
    lossy: bool,
}

/// Outcome of unit detection.
#[derive(Clone, Debug)]
pub enum UnitResult {
    Unit(RingElem),
    NotUnit,
    PrecisionExceeded,
}

impl UnitResult {
    pub fn inverse(self) -> Result<RingElem> {
        match self {
            UnitResult::Unit(i) => Ok(i),
            UnitResult::NotUnit => Err(Error::NotUnit),
            UnitResult::PrecisionExceeded => {
                Err(Error::PrecisionExceeded("unit inverse leaves the box".into()))
            }
        }
    }
}

/// `m_t`-adic order of an element; `None` encodes the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtWeight(pub Option<u32>);

fn vp(mut c: u64, p: u64) -> u32 {
    let mut v = 0;
    while c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qq = r0 / r1;
        (r0, r1) = (r1, r0 - qq * r1);
        (s0, s1) = (s1, s0 - qq * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

impl RingElem {
    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }
    pub fn spec(&self) -> &RingSpec {
        &self.ctx.spec
    }

    /// Least `u_t`-exponent from which coefficients are entirely unknown;
    /// [`EXACT`] when nothing is unknown there.
    pub fn precision(&self) -> i32 {
        self.prec.0[0]
    }

    /// The full profile `N_0 >= … >= N_{a-1}`.
    pub fn precision_profile(&self) -> Vec<i32> {
        self.prec.0[..self.ctx.spec.a as usize].to_vec()
    }

    /// Whether every coefficient is known exactly.
    pub fn is_exact(&self) -> bool {
        self.prec.0[self.ctx.spec.a as usize - 1] == EXACT
    }

    /// Whether some intermediate fell below the Laurent depth.
    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    /// Zero at the known precision.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }

    /// Zero with nothing unknown: safe to drop from a sum or product.
    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.is_exact()
    }

    pub fn is_one(&self) -> bool {
        *self == self.ctx.one()
    }

    fn same_ctx(&self, o: &RingElem) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) || self.ctx.spec == o.ctx.spec
    }

    fn check(&self, o: &RingElem) {
        assert!(self.same_ctx(o), "ring spec mismatch: {:?} vs {:?}", self.ctx.spec, o.ctx.spec);
    }

    pub fn try_add(&self, o: &RingElem) -> Result<RingElem> {
        if !self.same_ctx(o) {
            return Err(Error::SpecMismatch(format!("{:?} vs {:?}", self.ctx.spec, o.ctx.spec)));
        }
        Ok(self.add(o))
    }

    pub fn try_mul(&self, o: &RingElem) -> Result<RingElem> {
        if !self.same_ctx(o) {
            return Err(Error::SpecMismatch(format!("{:?} vs {:?}", self.ctx.spec, o.ctx.spec)));
        }
        Ok(self.mul(o))
    }

    pub fn add(&self, o: &RingElem) -> RingElem {
        self.check(o);
        let q = self.ctx.q;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| (a + b) % q).collect();
        self.with(c, self.prec.min(&o.prec), self.lossy || o.lossy)
    }

    pub fn sub(&self, o: &RingElem) -> RingElem {
        self.check(o);
        let q = self.ctx.q;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| (a + q - b) % q).collect();
        self.with(c, self.prec.min(&o.prec), self.lossy || o.lossy)
    }

    pub fn neg(&self) -> RingElem {
        let q = self.ctx.q;
        let c = self.c.iter().map(|a| (q - a) % q).collect();
        self.with(c, self.prec, self.lossy)
    }

    pub fn scale(&self, k: i64) -> RingElem {
        let q = self.ctx.q;
        let kr = self.ctx.reduce_int(k);
        let c = self.c.iter().map(|&a| (a as u128 * kr as u128 % q as u128) as u64).collect();
        // multiplying by p^j·unit moves unknown level l to l + j
        let a = self.ctx.spec.a as usize;
        let j = if kr == 0 { a } else { vp(kr, self.ctx.spec.p) as usize };
        let mut prec = Prec::EXACT;
        for l in 0..a.saturating_sub(j) {
            prec.0[l + j] = self.prec.0[l];
        }
        prec.normalize();
        self.with(c, prec, self.lossy)
    }

    fn with(&self, c: Vec<u64>, prec: Prec, lossy: bool) -> RingElem {
        let mut r = RingElem { ctx: self.ctx.clone(), c, prec, lossy };
        r.truncate_unknown();
        r
    }

    /// Zero the unknown digits of every coefficient.
    fn truncate_unknown(&mut self) {
        let a = self.ctx.spec.a as usize;
        if self.ctx.tvar.is_none() || self.prec.0[a - 1] == EXACT {
            return;
        }
        for i in 0..self.c.len() {
            if self.c[i] != 0 {
                let k = self.prec.digits_at(self.ctx.t_exp(i), a);
                if k < a {
                    self.c[i] %= self.ctx.ppow[k];
                }
            }
        }
    }

    /// For each exact `p`-adic valuation `j < a`, the least `u_t`-exponent of
    /// a known term with that valuation.
    fn min_exp_by_valuation(&self) -> [Option<i32>; MAX_A] {
        let mut out = [None; MAX_A];
        let p = self.ctx.spec.p;
        for (i, &c) in self.c.iter().enumerate() {
            if c != 0 {
                let j = vp(c, p) as usize;
                let m = self.ctx.t_exp(i);
                if out[j].map_or(true, |b| m < b) {
                    out[j] = Some(m);
                }
            }
        }
        out
    }

    /// Precision of a product: the unknown part of `x·y` lies in
    /// `U_x·y + x·U_y + U_x·U_y`.
    fn product_precision(&self, o: &RingElem, over_t: bool) -> Prec {
        let a = self.ctx.spec.a as usize;
        let mut g = Prec::EXACT;
        let ex = |x: &RingElem| x.prec.0[a - 1] == EXACT;
        if !(ex(self) && ex(o)) {
            let (mx, my) = (self.min_exp_by_valuation(), o.min_exp_by_valuation());
            for (ux, other, uo) in [(self, &my, o), (o, &mx, self)] {
                for l in 0..a {
                    let nl = ux.prec.0[l];
                    if nl == EXACT {
                        continue;
                    }
                    for j in 0..a - l {
                        if let Some(m) = other[j] {
                            g.0[l + j] = g.0[l + j].min(nl.saturating_add(m));
                        }
                        let nj = uo.prec.0[j];
                        if nj != EXACT {
                            g.0[l + j] = g.0[l + j].min(nl.saturating_add(nj));
                        }
                    }
                }
            }
        }
        if over_t {
            g.0[0] = g.0[0].min(self.ctx.spec.d + 1);
        }
        g.normalize();
        g
    }

    /// `acc += self · o` on raw coefficients; only for exact (`E`-flavor)
    /// rings, where no precision bookkeeping is needed.
    pub(crate) fn mul_acc_exact(&self, o: &RingElem, acc: &mut [u128]) {
        let ctx = &self.ctx;
        debug_assert!(ctx.tvar.is_none());
        let nv = ctx.nvars();
        if nv == 1 {
            let len = ctx.len[0];
            for (i, &a) in self.c.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let a = a as u128;
                for (j, &b) in o.c[..len - i].iter().enumerate() {
                    acc[i + j] += a * b as u128;
                }
            }
            return;
        }
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let oi = &ctx.offs[i];
            'inner: for (j, &b) in o.c.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let oj = &ctx.offs[j];
                let mut idx = 0usize;
                for v in 0..nv {
                    let t = (oi[v] + oj[v]) as usize;
                    if t >= ctx.len[v] {
                        continue 'inner;
                    }
                    idx += t * ctx.stride[v];
                }
                acc[idx] += a as u128 * b as u128;
            }
        }
    }

    pub(crate) fn coeff_len(&self) -> usize {
        self.c.len()
    }

    /// Reduce an accumulator filled by [`RingElem::mul_acc_exact`].
    pub(crate) fn from_acc(ctx: &Arc<RingCtx>, acc: &[u128]) -> RingElem {
        let q = ctx.q as u128;
        RingElem { ctx: ctx.clone(), c: acc.iter().map(|&s| (s % q) as u64).collect(), prec: Prec::EXACT, lossy: false }
    }

    pub fn mul(&self, o: &RingElem) -> RingElem {
        self.check(o);
        let ctx = &self.ctx;
        let q = ctx.q as u128;
        let mut acc = vec![0u128; ctx.size];
        let mut over_t = false;
        let mut lossy = self.lossy || o.lossy;
        let xs: Vec<usize> = (0..self.c.len()).filter(|&i| self.c[i] != 0).collect();
        let ys: Vec<usize> = (0..o.c.len()).filter(|&i| o.c[i] != 0).collect();
        let nv = ctx.nvars();
        if nv == 1 {
            let lo = ctx.lo[0];
            let len = ctx.len[0] as i32;
            for &i in &xs {
                let a = self.c[i] as u128;
                for &j in &ys {
                    let t = i as i32 + j as i32 + lo;
                    if t < 0 {
                        lossy = true;
                    } else if t >= len {
                        over_t |= ctx.tvar.is_some();
                    } else {
                        acc[t as usize] += a * o.c[j] as u128;
                    }
                }
            }
        } else {
            for &i in &xs {
                let a = self.c[i] as u128;
                let oi = &ctx.offs[i];
                for &j in &ys {
                    let oj = &ctx.offs[j];
                    let mut idx = 0usize;
                    let mut skip = false;
                    for v in 0..nv {
                        let t = oi[v] + oj[v] + ctx.lo[v];
                        if t < 0 {
                            lossy = true;
                            skip = true;
                            break;
                        }
                        if t as usize >= ctx.len[v] {
                            if Some(v) == ctx.tvar {
                                over_t = true;
                            }
                            skip = true;
                            break;
                        }
                        idx += t as usize * ctx.stride[v];
                    }
                    if !skip {
                        acc[idx] += a * o.c[j] as u128;
                    }
                }
            }
        }
        let prec = if ctx.tvar.is_some() { self.product_precision(o, over_t) } else { Prec::EXACT };
        let c = acc.into_iter().map(|s| (s % q) as u64).collect();
        self.with(c, prec, lossy)
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut base = self.clone();
        let mut r = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Terms sorted by exponent vector.
    pub fn terms(&self) -> Vec<(Vec<i32>, u64)> {
        (0..self.c.len())
            .filter(|&i| self.c[i] != 0)
            .map(|i| (self.ctx.exps_of(i), self.c[i]))
            .collect()
    }

    pub fn coeff(&self, exps: &[i32]) -> u64 {
        self.ctx.index_of(exps).map(|i| self.c[i]).unwrap_or(0)
    }

    /// Coefficient of the constant monomial.
    pub fn constant(&self) -> u64 {
        self.coeff(&vec![0; self.ctx.nvars()])
    }

    pub fn mt_weight(&self) -> MtWeight {
        let ctx = &self.ctx;
        let upto = match ctx.spec.flavor {
            Flavor::E => ctx.nvars(),
            Flavor::Lt(t) => t - 1,
        };
        MtWeight(
            (0..self.c.len())
                .filter(|&i| self.c[i] != 0)
                .map(|i| {
                    let ex = ctx.exps_of(i);
                    vp(self.c[i], ctx.spec.p) + ex[..upto].iter().sum::<i32>() as u32
                })
                .min(),
        )
    }

    /// Minimum `p`-adic valuation of the coefficients (`None` for zero).
    pub fn p_valuation(&self) -> Option<u32> {
        self.c.iter().filter(|&&c| c != 0).map(|&c| vp(c, self.ctx.spec.p)).min()
    }

    /// Exact division by `p^v`; the free top digits are chosen to be zero.
    pub fn div_p_pow(&self, v: u32) -> Result<RingElem> {
        let pv = self.ctx.spec.p.pow(v);
        if self.c.iter().any(|c| c % pv != 0) {
            return Err(Error::NonDivisible(format!("element not divisible by p^{v}")));
        }
        let c = self.c.iter().map(|c| c / pv).collect();
        let a = self.ctx.spec.a as usize;
        let mut prec = Prec::EXACT;
        for l in 0..a {
            // level l of the quotient is level l + v of the dividend
            prec.0[l] = if l + (v as usize) < a { self.prec.0[l + v as usize] } else { EXACT };
        }
        prec.normalize();
        Ok(self.with(c, prec, self.lossy))
    }

    /// Kill every term of positive `m_t`-weight and reduce coefficients mod `p`.
    pub fn reduce_mod_mt(&self) -> RingElem {
        let ctx = &self.ctx;
        let p = ctx.spec.p;
        let upto = match ctx.spec.flavor {
            Flavor::E => ctx.nvars(),
            Flavor::Lt(t) => t - 1,
        };
        let c = (0..self.c.len())
            .map(|i| {
                let ex = &ctx.offs[i];
                let w: i32 = (0..upto).map(|v| ex[v] + ctx.lo[v]).sum();
                if w == 0 {
                    self.c[i] % p
                } else {
                    0
                }
            })
            .collect();
        self.with(c, Prec::uniform(self.prec.0[0]), self.lossy)
    }

    /// Reduce coefficients modulo `p^b` in place of `p^a` (keeps the spec).
    pub fn reduce_mod_p_pow(&self, b: u32) -> RingElem {
        let pb = self.ctx.spec.p.pow(b.min(self.ctx.spec.a));
        let c = self.c.iter().map(|c| c % pb).collect();
        let mut prec = self.prec;
        for l in b as usize..MAX_A {
            prec.0[l] = EXACT;
        }
        prec.normalize();
        self.with(c, prec, self.lossy)
    }

    /// Move into another box with the same `p` and `n`. Terms leaving the box
    /// through an ideal direction are dropped; leaving through `u_t` above
    /// `d` caps the precision; leaving below `-e` marks the result lossy.
    pub fn convert(&self, to: &Arc<RingCtx>) -> Result<RingElem> {
        let (s, t) = (&self.ctx.spec, &to.spec);
        if s.p != t.p || s.n != t.n {
            return Err(Error::SpecMismatch(format!("{s:?} -> {t:?}")));
        }
        let mut out = to.zero();
        let mut prec = match (self.ctx.tvar, to.tvar) {
            (None, Some(_)) => Prec::uniform(s.d + 1),
            (Some(a), Some(b)) if a == b => {
                let mut p = self.prec;
                for l in s.a as usize..MAX_A {
                    p.0[l] = EXACT;
                }
                p.normalize();
                p
            }
            (None, None) => Prec::EXACT,
            _ => return Err(Error::SpecMismatch(format!("{s:?} -> {t:?}"))),
        };
        let mut lossy = self.lossy;
        for (i, &c) in self.c.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let ex = self.ctx.exps_of(i);
            match to.index_of(&ex) {
                Some(j) => out.c[j] = c % to.q,
                None => {
                    for v in 0..ex.len() {
                        if Some(v) == to.tvar {
                            if ex[v] < to.lo[v] {
                                lossy = true;
                            } else if ex[v] > t.d {
                                prec.0[0] = prec.0[0].min(t.d + 1);
                            }
                        }
                    }
                }
            }
        }
        if to.tvar.is_some() && s.d > t.d {
            prec.0[0] = prec.0[0].min(t.d + 1);
        }
        prec.normalize();
        out.prec = prec;
        out.lossy = lossy;
        out.truncate_unknown();
        Ok(out)
    }

    /// Localization `E → L_t`.
    pub fn base_change_to_lt(&self, to: &Arc<RingCtx>) -> Result<RingElem> {
        if self.ctx.is_lt() || !to.is_lt() {
            return Err(Error::SpecMismatch("base change needs E -> Lt".into()));
        }
        self.convert(to)
    }

    /// Unit detection and inversion.
    pub fn is_unit_with_inverse(&self) -> UnitResult {
        let ctx = &self.ctx;
        let p = ctx.spec.p;
        let lead = match ctx.tvar {
            None => {
                let c0 = self.constant();
                if c0 % p == 0 {
                    return UnitResult::NotUnit;
                }
                ctx.from_int(inv_mod(c0, ctx.q).unwrap() as i64)
            }
            Some(tv) => {
                let mut best: Option<(i32, u64)> = None;
                for (ex, c) in self.terms() {
                    if c % p == 0 || ex.iter().enumerate().any(|(v, &e)| v != tv && e != 0) {
                        continue;
                    }
                    if best.map_or(true, |(b, _)| ex[tv] < b) {
                        best = Some((ex[tv], c));
                    }
                }
                let Some((v, c)) = best else {
                    return UnitResult::NotUnit;
                };
                let mut ex = vec![0; ctx.nvars()];
                ex[tv] = -v;
                match ctx.monomial(&ex, inv_mod(c, ctx.q).unwrap() as i64) {
                    Ok(m) => m,
                    Err(_) => return UnitResult::PrecisionExceeded,
                }
            }
        };
        let one = ctx.one();
        let mut y = lead;
        for _ in 0..64 {
            let err = one.sub(&self.mul(&y));
            if err.lossy || y.lossy {
                return UnitResult::PrecisionExceeded;
            }
            if err.is_zero() {
                return if err.precision() >= 1 { UnitResult::Unit(y) } else { UnitResult::PrecisionExceeded };
            }
            y = y.add(&y.mul(&err));
        }
        UnitResult::PrecisionExceeded
    }

    /// Whether the residue (mod `m_t`, or mod the maximal ideal for `E`) is
    /// invertible, ignoring whether the inverse fits in the box.
    pub fn residue_is_unit(&self) -> bool {
        let ctx = &self.ctx;
        let p = ctx.spec.p;
        match ctx.tvar {
            None => self.constant() % p != 0,
            Some(tv) => self.terms().iter().any(|(ex, c)| {
                c % p != 0 && ex.iter().enumerate().all(|(v, &e)| v == tv || e == 0)
            }),
        }
    }

    /// Equality of the parts known in both operands.
    pub fn eq_at_precision(&self, o: &RingElem) -> bool {
        if !self.same_ctx(o) {
            return false;
        }
        let prec = self.prec.min(&o.prec);
        let a = self.ctx.spec.a as usize;
        let q = self.ctx.q;
        (0..self.c.len()).all(|i| {
            if self.c[i] == o.c[i] {
                return true;
            }
            let k = prec.digits_at(self.ctx.t_exp(i), a);
            (self.c[i] + q - o.c[i]) % self.ctx.ppow[k] == 0
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.terms().into_iter().map(|(e, c)| serde_json::json!([e, c])).collect();
        let mut m = serde_json::Map::new();
        m.insert("terms".into(), terms.into());
        let prof = self.precision_profile();
        if prof.iter().any(|&n| n != EXACT) {
            if prof.iter().all(|&n| n == prof[0]) {
                m.insert("precision".into(), prof[0].into());
            } else {
                m.insert("precision".into(), prof.into());
            }
        }
        if self.lossy {
            m.insert("lossy".into(), true.into());
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(ctx: &Arc<RingCtx>, v: &serde_json::Value) -> Result<RingElem> {
        let bad = || Error::InvalidParams("malformed ring element JSON".into());
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(bad)?;
        let mut tv = Vec::with_capacity(terms.len());
        for t in terms {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let ex: Vec<i32> = serde_json::from_value(pair[0].clone()).map_err(|_| bad())?;
            let c = pair[1].as_i64().ok_or_else(bad)?;
            tv.push((ex, c));
        }
        let mut r = ctx.from_terms(&tv)?;
        match v.get("precision") {
            Some(serde_json::Value::Number(n)) => {
                r.prec = Prec::uniform(n.as_i64().ok_or_else(bad)? as i32);
            }
            Some(serde_json::Value::Array(a)) => {
                let mut p = Prec::EXACT;
                for (l, n) in a.iter().enumerate().take(MAX_A) {
                    p.0[l] = n.as_i64().ok_or_else(bad)? as i32;
                }
                let last = p.0[a.len().saturating_sub(1).min(MAX_A - 1)];
                for l in a.len()..MAX_A {
                    p.0[l] = last;
                }
                p.normalize();
                r.prec = p;
            }
            Some(_) => return Err(bad()),
            None => {}
        }
        r.truncate_unknown();
        r.lossy = v.get("lossy").and_then(|l| l.as_bool()).unwrap_or(false);
        Ok(r)
    }
}

impl PartialEq for RingElem {
    fn eq(&self, o: &RingElem) -> bool {
        self.eq_at_precision(o)
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        let prof = self.precision_profile();
        for (l, &n) in prof.iter().enumerate() {
            if n != EXACT && (l == 0 || n < prof[l - 1]) {
                if l == 0 {
                    write!(f, " + O(u_t^{n})")?;
                } else {
                    write!(f, " + O(p^{l}·u_t^{n})")?;
                }
            }
        }
        if self.lossy {
            write!(f, " [lossy]")?;
        }
        Ok(())
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let q = self.ctx.q as i64;
        for (k, (ex, c)) in terms.iter().enumerate() {
            // symmetric residue reads better for small negatives
            let c = if *c as i64 > q / 2 { *c as i64 - q } else { *c as i64 };
            let mono: Vec<String> = ex
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(v, &e)| if e == 1 { format!("u{}", v + 1) } else { format!("u{}^{}", v + 1, e) })
                .collect();
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let ac = c.abs();
            match (ac, mono.is_empty()) {
                (_, true) => write!(f, "{ac}")?,
                (1, false) => write!(f, "{}", mono.join("*"))?,
                _ => write!(f, "{ac}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

impl PartialOrd for MtWeight {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for MtWeight {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self.0, o.0) {
            (None, None) => Ordering::Equal,
            (None, _) => Ordering::Greater,
            (_, None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(&b),
        }
    }
}
