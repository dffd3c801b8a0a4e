//! Weierstrass division and preparation over `E` and `L_t`.

use serde_json::json;

use crate::algebra::{QuotientAlgebra, QuotientAlgebraExt};
use crate::error::{Error, Result};
use crate::series::Series1;

const MAX_STEPS: usize = 100;

/// `s = monic · unit` with `monic` distinguished of degree `w_degree`.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub monic: Series1,
    pub unit: Series1,
    pub w_degree: usize,
}

impl Prepared {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "monic": self.monic.to_json(),
            "unit": self.unit.to_json(),
            "w_degree": self.w_degree,
        })
    }
}

/// Least x-degree whose coefficient is a unit of the base ring.
pub fn weierstrass_degree(s: &Series1) -> Result<usize> {
    s.coeffs()
        .iter()
        .position(|c| c.residue_is_unit())
        .ok_or_else(|| Error::NoUnitCoefficient(s.x_precision().min(s.coeffs().len())))
}

/// `f = q·g + r` with `deg r < deg g`, for `g` monic distinguished.
pub fn weierstrass_divide(f: &Series1, g: &Series1) -> Result<(Series1, Series1)> {
    if !g.is_monic() {
        return Err(Error::InvalidParams("divisor must be monic".into()));
    }
    let m = g.degree().unwrap();
    if g.coeffs()[..m].iter().any(|c| c.mt_weight().0 == Some(0)) {
        return Err(Error::InvalidParams("divisor must be distinguished".into()));
    }
    f.div_rem(&g.as_poly())
}

/// Newton–Hensel preparation: starting from `P = x^N` and `w` the part of
/// `s` above degree `N`, repeatedly correct `P` by `(e · w⁻¹ mod P)` and `w`
/// by the exact quotient, where `e = s − P·w`.
pub fn weierstrass_prepare(s: &Series1) -> Result<Prepared> {
    let ctx = s.ctx();
    let n = weierstrass_degree(s)?;
    for c in &s.coeffs()[..n] {
        if c.mt_weight().0 == Some(0) {
            return Err(Error::InvalidParams("series not distinguished below its degree".into()));
        }
    }
    if n == 0 {
        return Ok(Prepared { monic: Series1::from_ints(ctx, &[1]), unit: s.clone(), w_degree: 0 });
    }
    let d = s.x_precision();
    let hi: Vec<_> = s.coeffs().iter().skip(n).cloned().collect();
    let mut w = Series1::new(ctx, hi, d.saturating_sub(n));
    let mut p = Series1::monomial(ctx, n, ctx.one());
    for _ in 0..MAX_STEPS {
        let e = s.sub(&p.mul(&w));
        if e.is_lossy() || w.is_lossy() {
            return Err(Error::PrecisionExceeded("Weierstrass preparation underflow".into()));
        }
        if e.is_zero() {
            return Ok(Prepared { monic: p, unit: w, w_degree: n });
        }
        let alg = QuotientAlgebra::univariate(&p)?;
        let wbar = alg.from_poly(0, &w.as_poly())?;
        let winv = wbar.inverse_local()?;
        let ebar = alg.from_poly(0, &e.as_poly())?;
        let dp = ebar.mul(&winv).to_poly();
        let (dw, _) = e.sub(&dp.mul(&w)).div_rem(&p)?;
        p = p.add(&dp);
        w = w.add(&dw);
    }
    Err(Error::NonConvergence(MAX_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingCtx, RingSpec};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn e_ctx() -> Arc<RingCtx> {
        RingCtx::new(RingSpec::e_flavor(2, 2, 6, 8)).unwrap()
    }

    #[test]
    fn degree_of_simple_series() {
        let r = e_ctx();
        let f = Series1::poly(&r, vec![r.zero(), r.from_int(2), r.var(1), r.zero(), r.one()]);
        assert_eq!(weierstrass_degree(&f).unwrap(), 4);
        assert_eq!(weierstrass_degree(&Series1::x(&r)).unwrap(), 1);
        let l = RingCtx::new(RingSpec::lt_flavor(2, 2, 6, 1, 8, 8)).unwrap();
        assert_eq!(weierstrass_degree(&f.convert(&l).unwrap()).unwrap(), 2);
    }

    #[test]
    fn unit_series_prepares_trivially() {
        let r = e_ctx();
        let s = Series1::new(&r, vec![r.from_int(3), r.var(1)], 6);
        let pr = weierstrass_prepare(&s).unwrap();
        assert_eq!(pr.w_degree, 0);
        assert_eq!(pr.monic, Series1::from_ints(&r, &[1]));
    }

    #[test]
    fn prepare_mod_two_is_identity_on_distinguished_polynomials() {
        let r = RingCtx::new(RingSpec::e_flavor(2, 2, 1, 8)).unwrap();
        let f = Series1::new(&r, vec![r.zero(), r.zero(), r.var(1), r.zero(), r.one()], 12);
        let pr = weierstrass_prepare(&f).unwrap();
        assert_eq!(pr.monic, f.as_poly());
        assert_eq!(pr.unit, Series1::from_ints(&r, &[1]));
    }

    #[test]
    fn prepare_over_lt_multiplies_back() {
        let l = RingCtx::new(RingSpec::lt_flavor(2, 2, 4, 1, 12, 12)).unwrap();
        let f = Series1::new(&l, vec![l.zero(), l.from_int(2), l.var(1), l.zero(), l.one()], 20);
        let pr = weierstrass_prepare(&f).unwrap();
        assert_eq!(pr.w_degree, 2);
        assert_eq!(pr.monic.mul(&pr.unit), f);
        let red = pr.monic.reduce_mod_mt();
        assert_eq!(red, Series1::from_ints(&l, &[0, 0, 1]));
        let (q, rem) = weierstrass_divide(&f.as_poly(), &pr.monic).unwrap();
        assert!(rem.is_zero() || rem.coeffs().iter().all(|c| c.is_zero()));
        assert!(q.coeff(0).residue_is_unit());
    }

    #[test]
    fn divide_examples() {
        let r = e_ctx();
        let x4 = Series1::from_ints(&r, &[0, 0, 0, 0, 1]);
        let x2 = Series1::from_ints(&r, &[0, 0, 1]);
        let (q, rem) = weierstrass_divide(&x4, &x2).unwrap();
        assert_eq!((q, rem.is_zero()), (x2.clone(), true));
        let (q, rem) = weierstrass_divide(&Series1::x(&r), &x2).unwrap();
        assert!(q.is_zero());
        assert_eq!(rem, Series1::x(&r));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn prepare_then_multiply_back(
            low in proptest::collection::vec((0i64..4, 0i32..4), 3),
            high in proptest::collection::vec((0i64..64, 0i32..4), 4),
            lead in 0i64..32,
        ) {
            let r = e_ctx();
            let u = r.var(1);
            // distinguished part: coefficients in the maximal ideal (2, u)
            let mut c: Vec<_> = low.iter()
                .map(|&(k, e)| r.from_int(2 * k).add(&u.pow(e as u64 + 1)))
                .collect();
            c.push(r.from_int(2 * lead + 1));
            for &(k, e) in &high {
                c.push(r.from_int(k).mul(&u.pow(e as u64)));
            }
            let s = Series1::poly(&r, c);
            let pr = weierstrass_prepare(&s).unwrap();
            prop_assert_eq!(pr.w_degree, 3);
            prop_assert!(pr.monic.is_monic());
            prop_assert_eq!(pr.monic.mul(&pr.unit), s.clone());
            // uniqueness: a unit multiple has the same distinguished factor
            let v = Series1::poly(&r, vec![r.from_int(1 + 2 * lead), u.clone(), r.from_int(lead)]);
            let pv = weierstrass_prepare(&s.mul(&v)).unwrap();
            prop_assert_eq!(pv.monic, pr.monic);
        }
    }
}
