//! One-variable truncated power series and polynomials over a truncated ring.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{RingCtx, RingElem};

/// x-precision of an exact polynomial.
pub const POLY: usize = usize::MAX;

/// `Σ c_i x^i` with coefficients known for `i <= prec`. Polynomials use
/// `prec == POLY`.
#[derive(Clone)]
pub struct Series1 {
    ctx: Arc<RingCtx>,
    c: Vec<RingElem>,
    prec: usize,
}

impl Series1 {
    pub fn new(ctx: &Arc<RingCtx>, mut c: Vec<RingElem>, prec: usize) -> Series1 {
        if prec != POLY {
            c.truncate(prec + 1);
        }
        let mut s = Series1 { ctx: ctx.clone(), c, prec };
        s.trim();
        s
    }

    pub fn poly(ctx: &Arc<RingCtx>, c: Vec<RingElem>) -> Series1 {
        Series1::new(ctx, c, POLY)
    }

    pub fn zero(ctx: &Arc<RingCtx>, prec: usize) -> Series1 {
        Series1::new(ctx, vec![], prec)
    }

    /// `c · x^i` as an exact polynomial.
    pub fn monomial(ctx: &Arc<RingCtx>, i: usize, c: RingElem) -> Series1 {
        let mut v = vec![ctx.zero(); i + 1];
        v[i] = c;
        Series1::poly(ctx, v)
    }

    pub fn x(ctx: &Arc<RingCtx>) -> Series1 {
        Series1::monomial(ctx, 1, ctx.one())
    }

    /// Polynomial with small integer coefficients.
    pub fn from_ints(ctx: &Arc<RingCtx>, c: &[i64]) -> Series1 {
        Series1::poly(ctx, c.iter().map(|&v| ctx.from_int(v)).collect())
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|c| c.is_exact_zero()) {
            self.c.pop();
        }
    }

    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }

    /// x-precision `D`; [`POLY`] for exact polynomials.
    pub fn x_precision(&self) -> usize {
        self.prec
    }

    pub fn is_poly(&self) -> bool {
        self.prec == POLY
    }

    pub fn as_poly(&self) -> Series1 {
        Series1 { prec: POLY, ..self.clone() }
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> RingElem {
        self.c.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// Degree of the last coefficient that is nonzero at its precision
    /// (`None` for zero). Imprecise zeros above it are still stored.
    pub fn degree(&self) -> Option<usize> {
        self.c.iter().rposition(|c| !c.is_zero())
    }

    /// Index of the first nonzero coefficient (the precision for zero).
    pub fn valuation(&self) -> usize {
        self.c.iter().position(|c| !c.is_zero()).unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    pub fn is_monic(&self) -> bool {
        self.degree().is_some_and(|d| self.c[d].is_one())
    }

    pub fn truncate(&self, d: usize) -> Series1 {
        Series1::new(&self.ctx, self.c.clone(), d.min(self.prec))
    }

    pub fn add(&self, o: &Series1) -> Series1 {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect();
        Series1::new(&self.ctx, c, self.prec.min(o.prec))
    }

    pub fn sub(&self, o: &Series1) -> Series1 {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect();
        Series1::new(&self.ctx, c, self.prec.min(o.prec))
    }

    pub fn neg(&self) -> Series1 {
        Series1::new(&self.ctx, self.c.iter().map(|c| c.neg()).collect(), self.prec)
    }

    pub fn scale(&self, r: &RingElem) -> Series1 {
        Series1::new(&self.ctx, self.c.iter().map(|c| c.mul(r)).collect(), self.prec)
    }

    pub fn mul(&self, o: &Series1) -> Series1 {
        let prec = self.prec.saturating_add(o.valuation()).min(o.prec.saturating_add(self.valuation()));
        if self.c.is_empty() || o.c.is_empty() {
            return Series1::zero(&self.ctx, prec);
        }
        let top = (self.c.len() + o.c.len() - 2).min(prec);
        let mut c = vec![self.ctx.zero(); top + 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_exact_zero() || i > top {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j > top {
                    break;
                }
                if !b.is_exact_zero() {
                    c[i + j] = c[i + j].add(&a.mul(b));
                }
            }
        }
        Series1::new(&self.ctx, c, prec)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Series1 {
        let mut c = vec![self.ctx.zero(); k];
        c.extend(self.c.iter().cloned());
        Series1::new(&self.ctx, c, self.prec.saturating_add(k))
    }

    pub fn derivative(&self) -> Series1 {
        let c = self.c.iter().enumerate().skip(1).map(|(i, a)| a.scale(i as i64)).collect();
        Series1::new(&self.ctx, c, self.prec.saturating_sub(1))
    }

    /// `self(inner)` for `inner` with zero constant term.
    pub fn compose(&self, inner: &Series1) -> Result<Series1> {
        let v = inner.valuation();
        if v == 0 {
            return Err(Error::NonNilpotent(0));
        }
        let mut prec = inner.prec;
        if self.prec != POLY {
            prec = prec.min((self.prec + 1).saturating_mul(v) - 1);
        }
        let mut acc = Series1::zero(&self.ctx, POLY);
        for a in self.c.iter().rev() {
            acc = acc.mul(inner).truncate(prec);
            acc = acc.add(&Series1::poly(&self.ctx, vec![a.clone()]));
        }
        Ok(acc.truncate(prec))
    }

    /// Top-down division by a monic polynomial: `self = q·g + r`, `deg r < deg g`.
    /// For a truncated dividend only the known coefficients are divided.
    pub fn div_rem(&self, g: &Series1) -> Result<(Series1, Series1)> {
        if !g.is_poly() || !g.is_monic() {
            return Err(Error::InvalidParams("divisor must be a monic polynomial".into()));
        }
        let m = g.degree().unwrap();
        let mut r = self.c.clone();
        if r.len() <= m {
            return Ok((Series1::zero(&self.ctx, POLY), self.as_poly()));
        }
        let mut q = vec![self.ctx.zero(); r.len() - m];
        for k in (m..r.len()).rev() {
            let c = r[k].clone();
            if c.is_exact_zero() {
                continue;
            }
            for j in 0..m {
                if !g.c[j].is_exact_zero() {
                    r[k - m + j] = r[k - m + j].sub(&c.mul(&g.c[j]));
                }
            }
            r[k] = self.ctx.zero();
            q[k - m] = c;
        }
        r.truncate(m);
        let qprec = if self.prec == POLY { POLY } else { self.prec - m.min(self.prec) };
        Ok((Series1::new(&self.ctx, q, qprec), Series1::poly(&self.ctx, r)))
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem(&self, g: &Series1) -> Result<Series1> {
        Ok(self.div_rem(g)?.1)
    }

    /// Apply a coefficient map (base change, reduction, ...).
    pub fn map_coeffs(
        &self,
        ctx: &Arc<RingCtx>,
        f: impl Fn(&RingElem) -> Result<RingElem>,
    ) -> Result<Series1> {
        let c = self.c.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Series1::new(ctx, c, self.prec))
    }

    pub fn convert(&self, ctx: &Arc<RingCtx>) -> Result<Series1> {
        self.map_coeffs(ctx, |c| c.convert(ctx))
    }

    pub fn reduce_mod_mt(&self) -> Series1 {
        Series1::new(&self.ctx, self.c.iter().map(|c| c.reduce_mod_mt()).collect(), self.prec)
    }

    pub fn reduce_mod_p_pow(&self, b: u32) -> Series1 {
        Series1::new(&self.ctx, self.c.iter().map(|c| c.reduce_mod_p_pow(b)).collect(), self.prec)
    }

    pub fn is_lossy(&self) -> bool {
        self.c.iter().any(|c| c.is_lossy())
    }

    /// Least `u_t`-precision among the coefficients.
    pub fn coeff_precision(&self) -> i32 {
        self.c.iter().map(|c| c.precision()).min().unwrap_or(crate::ring::EXACT)
    }

    /// Equality of coefficients up to the common x-precision.
    pub fn eq_at_precision(&self, o: &Series1) -> bool {
        let d = self.prec.min(o.prec);
        let n = self.c.len().max(o.c.len());
        (0..n).take_while(|&i| i <= d).all(|i| self.coeff(i) == o.coeff(i))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| serde_json::json!([i, c.to_json()]))
            .collect();
        let mut m = serde_json::Map::new();
        m.insert("terms".into(), terms.into());
        if self.prec != POLY {
            m.insert("x_precision".into(), self.prec.into());
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(ctx: &Arc<RingCtx>, v: &serde_json::Value) -> Result<Series1> {
        let bad = || Error::InvalidParams("malformed series JSON".into());
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(bad)?;
        let prec = v.get("x_precision").and_then(|p| p.as_u64()).map_or(POLY, |p| p as usize);
        let mut c: Vec<RingElem> = vec![];
        for t in terms {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let i = pair[0].as_u64().ok_or_else(bad)? as usize;
            if c.len() <= i {
                c.resize(i + 1, ctx.zero());
            }
            c[i] = RingElem::from_json(ctx, &pair[1])?;
        }
        Ok(Series1::new(ctx, c, prec))
    }
}

impl PartialEq for Series1 {
    fn eq(&self, o: &Series1) -> bool {
        self.eq_at_precision(o)
    }
}

impl fmt::Debug for Series1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c:?})")?,
                1 => write!(f, "({c:?})*x")?,
                _ => write!(f, "({c:?})*x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.prec != POLY {
            write!(f, " + O(x^{})", self.prec + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn ctx() -> Arc<RingCtx> {
        RingCtx::new(RingSpec::e_flavor(2, 2, 4, 6)).unwrap()
    }

    #[test]
    fn product_precision() {
        let r = ctx();
        let a = Series1::new(&r, vec![r.zero(), r.one(), r.one()], 5);
        let b = Series1::new(&r, vec![r.zero(), r.zero(), r.one()], 3);
        let c = a.mul(&b);
        assert_eq!(c.x_precision(), 4);
        assert_eq!(c.coeffs().len(), 5);
    }

    #[test]
    fn division_by_monic() {
        let r = ctx();
        let x4 = Series1::from_ints(&r, &[0, 0, 0, 0, 1]);
        let x2 = Series1::from_ints(&r, &[0, 0, 1]);
        let (q, rem) = x4.div_rem(&x2).unwrap();
        assert_eq!(q, x2);
        assert!(rem.is_zero());
        let x = Series1::x(&r);
        let (q, rem) = x.div_rem(&x2).unwrap();
        assert!(q.is_zero());
        assert_eq!(rem, x);
    }

    #[test]
    fn division_identity_general() {
        let r = ctx();
        let u = r.var(1);
        let f = Series1::poly(&r, vec![r.from_int(3), u.clone(), r.from_int(5), u.scale(3), r.one(), r.from_int(7)]);
        let g = Series1::poly(&r, vec![u.clone(), r.from_int(2), r.one()]);
        let (q, rem) = f.div_rem(&g).unwrap();
        assert_eq!(q.mul(&g).add(&rem), f);
        assert!(rem.degree().unwrap() < 2);
    }

    #[test]
    fn composition() {
        let r = ctx();
        // (x + x^2) ∘ (x + x^2) = x + 2x^2 + 2x^3 + x^4
        let s = Series1::from_ints(&r, &[0, 1, 1]);
        let c = s.compose(&s).unwrap();
        assert_eq!(c, Series1::from_ints(&r, &[0, 1, 2, 2, 1]));
    }

    #[test]
    fn json_round_trip() {
        let r = ctx();
        let s = Series1::new(&r, vec![r.zero(), r.from_int(2), r.var(1)], 5);
        let v = s.to_json();
        assert_eq!(Series1::from_json(&r, &v).unwrap(), s);
        assert_eq!(v["x_precision"], 5);
    }
}
