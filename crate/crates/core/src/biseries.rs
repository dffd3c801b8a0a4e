//! Bivariate series on a degree box, and sparse multivariate series used for
//! checking identities to a fixed total degree.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Result;
use crate::ring::{RingCtx, RingElem};
use crate::series::{Series1, POLY};

/// `Σ c_ij x^i y^j` over `i <= bx`, `j <= by`, `i + j <= tot`. The
/// discarded monomials form an ideal, so arithmetic is exact in the quotient.
#[derive(Clone)]
pub struct BiSeries {
    ctx: Arc<RingCtx>,
    bx: usize,
    by: usize,
    tot: usize,
    c: Vec<RingElem>,
}

impl BiSeries {
    pub fn zero(ctx: &Arc<RingCtx>, bx: usize, by: usize, tot: usize) -> BiSeries {
        let tot = tot.min(bx + by);
        BiSeries { ctx: ctx.clone(), bx, by, tot, c: vec![ctx.zero(); (bx + 1) * (by + 1)] }
    }

    pub fn like(&self) -> BiSeries {
        BiSeries::zero(&self.ctx, self.bx, self.by, self.tot)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.by + 1) + j
    }

    fn inside(&self, i: usize, j: usize) -> bool {
        i <= self.bx && j <= self.by && i + j <= self.tot
    }

    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }
    pub fn bounds(&self) -> (usize, usize, usize) {
        (self.bx, self.by, self.tot)
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        if i <= self.bx && j <= self.by {
            self.c[self.idx(i, j)].clone()
        } else {
            self.ctx.zero()
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        if self.inside(i, j) {
            let k = self.idx(i, j);
            self.c[k] = v;
        }
    }

    pub fn x(ctx: &Arc<RingCtx>, bx: usize, by: usize, tot: usize) -> BiSeries {
        let mut s = BiSeries::zero(ctx, bx, by, tot);
        s.set(1, 0, ctx.one());
        s
    }

    pub fn y(ctx: &Arc<RingCtx>, bx: usize, by: usize, tot: usize) -> BiSeries {
        let mut s = BiSeries::zero(ctx, bx, by, tot);
        s.set(0, 1, ctx.one());
        s
    }

    pub fn constant(&self, r: &RingElem) -> BiSeries {
        let mut s = self.like();
        s.set(0, 0, r.clone());
        s
    }

    fn zip(&self, o: &BiSeries, f: impl Fn(&RingElem, &RingElem) -> RingElem) -> BiSeries {
        assert_eq!((self.bx, self.by), (o.bx, o.by), "box mismatch");
        let tot = self.tot.min(o.tot);
        let mut s = BiSeries::zero(&self.ctx, self.bx, self.by, tot);
        for i in 0..=self.bx {
            for j in 0..=self.by.min(tot.saturating_sub(i)) {
                if i + j <= tot {
                    let k = self.idx(i, j);
                    s.c[k] = f(&self.c[k], &o.c[k]);
                }
            }
        }
        s
    }

    pub fn add(&self, o: &BiSeries) -> BiSeries {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &BiSeries) -> BiSeries {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn map(&self, f: impl Fn(&RingElem) -> RingElem) -> BiSeries {
        BiSeries { c: self.c.iter().map(f).collect(), ..self.clone() }
    }

    pub fn scale(&self, r: &RingElem) -> BiSeries {
        self.map(|c| c.mul(r))
    }

    pub fn neg(&self) -> BiSeries {
        self.map(|c| c.neg())
    }

    pub fn truncate(&self, tot: usize) -> BiSeries {
        let mut s = BiSeries::zero(&self.ctx, self.bx, self.by, tot.min(self.tot));
        for i in 0..=self.bx {
            for j in 0..=self.by {
                if s.inside(i, j) {
                    let k = self.idx(i, j);
                    s.c[k] = self.c[k].clone();
                }
            }
        }
        s
    }

    pub fn mul(&self, o: &BiSeries) -> BiSeries {
        assert_eq!((self.bx, self.by), (o.bx, o.by), "box mismatch");
        let tot = self.tot.min(o.tot);
        let mut s = BiSeries::zero(&self.ctx, self.bx, self.by, tot);
        let nz = |b: &BiSeries| -> Vec<(usize, usize)> {
            (0..=b.bx)
                .flat_map(|i| (0..=b.by).map(move |j| (i, j)))
                .filter(|&(i, j)| i + j <= tot && !b.c[b.idx(i, j)].is_exact_zero())
                .collect()
        };
        let (na, nb) = (nz(self), nz(o));
        if !self.ctx.is_lt() {
            // accumulate each output cell once, reducing at the end
            let size = self.ctx.zero().coeff_len();
            let mut acc = vec![vec![0u128; size]; s.c.len()];
            for &(i, j) in &na {
                let a = &self.c[self.idx(i, j)];
                for &(k, l) in &nb {
                    if s.inside(i + k, j + l) {
                        a.mul_acc_exact(&o.c[o.idx(k, l)], &mut acc[s.idx(i + k, j + l)]);
                    }
                }
            }
            for (t, a) in acc.iter().enumerate() {
                if a.iter().any(|&v| v != 0) {
                    s.c[t] = RingElem::from_acc(&self.ctx, a);
                }
            }
            return s;
        }
        for &(i, j) in &na {
            let a = &self.c[self.idx(i, j)];
            for &(k, l) in &nb {
                if s.inside(i + k, j + l) {
                    let t = s.idx(i + k, j + l);
                    s.c[t] = s.c[t].add(&a.mul(&o.c[o.idx(k, l)]));
                }
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    pub fn div_p_pow(&self, v: u32) -> Result<BiSeries> {
        let c = self.c.iter().map(|c| c.div_p_pow(v)).collect::<Result<Vec<_>>>()?;
        Ok(BiSeries { c, ..self.clone() })
    }

    pub fn convert(&self, ctx: &Arc<RingCtx>) -> Result<BiSeries> {
        let c = self.c.iter().map(|c| c.convert(ctx)).collect::<Result<Vec<_>>>()?;
        Ok(BiSeries { ctx: ctx.clone(), c, ..self.clone() })
    }

    /// Restrict to a smaller box.
    pub fn restrict(&self, bx: usize, by: usize) -> BiSeries {
        let mut s = BiSeries::zero(&self.ctx, bx, by, self.tot.min(bx + by));
        for i in 0..=bx.min(self.bx) {
            for j in 0..=by.min(self.by) {
                s.set(i, j, self.get(i, j));
            }
        }
        s
    }

    /// `F(y, x)`.
    pub fn swap(&self) -> BiSeries {
        let mut s = BiSeries::zero(&self.ctx, self.by, self.bx, self.tot);
        for i in 0..=self.bx {
            for j in 0..=self.by {
                s.set(j, i, self.get(i, j));
            }
        }
        s
    }

    /// The univariate series `Σ_i c_{i,j} x^i` for fixed `j`.
    pub fn column(&self, j: usize) -> Series1 {
        let c = (0..=self.bx).map(|i| self.get(i, j)).collect();
        Series1::new(&self.ctx, c, self.bx.min(self.tot - j.min(self.tot)))
    }

    /// Nonzero terms as `(i, j, coefficient)`.
    pub fn terms(&self) -> Vec<(usize, usize, RingElem)> {
        let mut v = vec![];
        for i in 0..=self.bx {
            for j in 0..=self.by {
                let c = &self.c[self.idx(i, j)];
                if !c.is_zero() {
                    v.push((i, j, c.clone()));
                }
            }
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "box": [self.bx, self.by],
            "total_degree": self.tot,
            "terms": self.terms().into_iter()
                .map(|(i, j, c)| serde_json::json!([[i, j], c.to_json()]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(ctx: &Arc<RingCtx>, v: &serde_json::Value) -> Option<BiSeries> {
        let b = v.get("box")?.as_array()?;
        let (bx, by) = (b.first()?.as_u64()? as usize, b.get(1)?.as_u64()? as usize);
        let tot = v.get("total_degree")?.as_u64()? as usize;
        let mut s = BiSeries::zero(ctx, bx, by, tot);
        for t in v.get("terms")?.as_array()? {
            let ij = t.get(0)?.as_array()?;
            let (i, j) = (ij.first()?.as_u64()? as usize, ij.get(1)?.as_u64()? as usize);
            s.set(i, j, RingElem::from_json(ctx, t.get(1)?).ok()?);
        }
        Some(s)
    }
}

/// Sparse series in several variables truncated at a total degree.
#[derive(Clone, Debug)]
pub struct MSeries {
    ctx: Arc<RingCtx>,
    nv: usize,
    tot: usize,
    t: BTreeMap<Vec<u32>, RingElem>,
}

impl MSeries {
    pub fn zero(ctx: &Arc<RingCtx>, nv: usize, tot: usize) -> MSeries {
        MSeries { ctx: ctx.clone(), nv, tot, t: BTreeMap::new() }
    }

    pub fn var(ctx: &Arc<RingCtx>, nv: usize, tot: usize, i: usize) -> MSeries {
        let mut s = MSeries::zero(ctx, nv, tot);
        let mut e = vec![0; nv];
        e[i] = 1;
        s.insert(e, ctx.one());
        s
    }

    pub fn constant(ctx: &Arc<RingCtx>, nv: usize, tot: usize, r: &RingElem) -> MSeries {
        let mut s = MSeries::zero(ctx, nv, tot);
        s.insert(vec![0; nv], r.clone());
        s
    }

    fn insert(&mut self, e: Vec<u32>, v: RingElem) {
        if e.iter().sum::<u32>() as usize > self.tot {
            return;
        }
        let acc = match self.t.remove(&e) {
            Some(old) => old.add(&v),
            None => v,
        };
        if !acc.is_zero() {
            self.t.insert(e, acc);
        }
    }

    pub fn add(&self, o: &MSeries) -> MSeries {
        let mut s = MSeries { tot: self.tot.min(o.tot), ..self.clone() };
        s.t.retain(|e, _| e.iter().sum::<u32>() as usize <= s.tot);
        for (e, v) in &o.t {
            s.insert(e.clone(), v.clone());
        }
        s
    }

    pub fn sub(&self, o: &MSeries) -> MSeries {
        self.add(&o.scale(&self.ctx.from_int(-1)))
    }

    pub fn scale(&self, r: &RingElem) -> MSeries {
        let mut s = MSeries::zero(&self.ctx, self.nv, self.tot);
        for (e, v) in &self.t {
            s.insert(e.clone(), v.mul(r));
        }
        s
    }

    pub fn mul(&self, o: &MSeries) -> MSeries {
        let mut s = MSeries::zero(&self.ctx, self.nv, self.tot.min(o.tot));
        for (e1, v1) in &self.t {
            for (e2, v2) in &o.t {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                s.insert(e, v1.mul(v2));
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> RingElem {
        self.t.get(e).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &RingElem)> {
        self.t.iter()
    }

    /// Evaluate a univariate polynomial at this series.
    pub fn apply_univariate(&self, f: &Series1) -> MSeries {
        let mut acc = MSeries::zero(&self.ctx, self.nv, self.tot);
        let top = if f.x_precision() == POLY { f.coeffs().len() } else { f.x_precision() + 1 };
        for c in f.coeffs()[..top.min(f.coeffs().len())].iter().rev() {
            acc = acc.mul(self).add(&MSeries::constant(&self.ctx, self.nv, self.tot, c));
        }
        acc
    }

    /// Evaluate a bivariate series at `(a, b)`; both must have zero constant term.
    pub fn apply_bivariate(g: &BiSeries, a: &MSeries, b: &MSeries) -> MSeries {
        let (nv, tot) = (a.nv, a.tot.min(b.tot));
        let ctx = &a.ctx;
        let (bx, by, _) = g.bounds();
        let mut bp = vec![MSeries::constant(ctx, nv, tot, &ctx.one())];
        for _ in 0..by.min(tot) {
            bp.push(bp.last().unwrap().mul(b));
        }
        let mut acc = MSeries::zero(ctx, nv, tot);
        let mut ap = MSeries::constant(ctx, nv, tot, &ctx.one());
        for i in 0..=bx.min(tot) {
            let mut inner = MSeries::zero(ctx, nv, tot);
            for (j, bpj) in bp.iter().enumerate() {
                let c = g.get(i, j);
                if !c.is_zero() {
                    inner = inner.add(&bpj.scale(&c));
                }
            }
            acc = acc.add(&ap.mul(&inner));
            ap = ap.mul(a);
        }
        acc
    }

    /// View a two-variable series as a [`BiSeries`].
    pub fn to_biseries(&self) -> BiSeries {
        assert_eq!(self.nv, 2);
        let mut s = BiSeries::zero(&self.ctx, self.tot, self.tot, self.tot);
        for (e, v) in &self.t {
            s.set(e[0] as usize, e[1] as usize, v.clone());
        }
        s
    }

    pub fn from_biseries(g: &BiSeries) -> MSeries {
        let (_, _, tot) = g.bounds();
        let mut s = MSeries::zero(g.ctx(), 2, tot);
        for (i, j, c) in g.terms() {
            s.insert(vec![i as u32, j as u32], c);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    #[test]
    fn box_product_respects_bounds() {
        let r = RingCtx::new(RingSpec::e_flavor(2, 2, 4, 4)).unwrap();
        let x = BiSeries::x(&r, 3, 2, 4);
        let y = BiSeries::y(&r, 3, 2, 4);
        let s = x.add(&y);
        let s2 = s.mul(&s);
        assert_eq!(s2.get(1, 1), r.from_int(2));
        let s4 = s2.mul(&s2);
        // (x+y)^4 on the box: x^4 and y^4, x y^3 vanish
        assert!(s4.get(4, 0).is_zero());
        assert_eq!(s4.get(2, 2), r.from_int(6));
        assert!(s4.get(1, 3).is_zero());
        assert_eq!(s4.get(3, 1), r.from_int(4));
    }

    #[test]
    fn multivariate_substitution() {
        let r = RingCtx::new(RingSpec::e_flavor(3, 1, 3, 0)).unwrap();
        let x = MSeries::var(&r, 2, 4, 0);
        let y = MSeries::var(&r, 2, 4, 1);
        // g(x,y) = x + y + xy evaluated at (x, y) is itself
        let mut g = BiSeries::zero(&r, 4, 4, 4);
        g.set(1, 0, r.one());
        g.set(0, 1, r.one());
        g.set(1, 1, r.one());
        let v = MSeries::apply_bivariate(&g, &x, &y);
        assert_eq!(v.to_biseries().terms().len(), 3);
        let sq = Series1::from_ints(&r, &[0, 0, 1]);
        let w = x.add(&y).apply_univariate(&sq);
        assert_eq!(w.coeff(&[1, 1]), r.from_int(2));
    }
}
