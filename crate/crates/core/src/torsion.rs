//! Torsion algebras `R[x]/(f_k)`, their connected–étale splitting over
//! `L_t`, the norm coordinate `Y` of the étale quotient, and its minimal
//! polynomial `j_k`.

use std::sync::Arc;

use serde_json::json;

use crate::algebra::{eval_series, unit_certificate, AlgElem, QuotientAlgebra, QuotientAlgebraExt};
use crate::error::{Error, Result};
use crate::fgl::{eval_on_powers, reduce_mod_mh, Fgl};
use crate::linalg::{self, EchelonSolver, Matrix};
use crate::ring::{RingCtx, RingElem};
use crate::series::Series1;
use crate::weierstrass::weierstrass_prepare;

const NIL_LIMIT: usize = 4096;

/// `R[x]/(m)` for the Weierstrass factor `m` of a `p^k`-series.
#[derive(Clone, Debug)]
pub struct TorsionAlgebra {
    pub level: u32,
    pub modulus: Series1,
    pub algebra: Arc<QuotientAlgebra>,
    /// x-degree to which the `p^k`-series was expanded (E flavor only).
    pub series_degree: Option<usize>,
    /// Least `ν` with `x^ν = 0`, when `x` is nilpotent.
    pub nilpotency: Option<usize>,
}

impl TorsionAlgebra {
    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }
    pub fn x(&self) -> AlgElem {
        self.algebra.gen(0)
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "level": self.level,
            "rank": self.rank(),
            "modulus": self.modulus.to_json(),
            "series_degree": self.series_degree,
            "nilpotency": self.nilpotency,
        })
    }
}

fn nilpotency(alg: &Arc<QuotientAlgebra>) -> Option<usize> {
    alg.gen(0).powers_until_zero(NIL_LIMIT).ok().map(|v| v.len())
}

/// `E[x]/(f_k)`: prepares `[p^k](x)` at growing x-degree until the truncation
/// is invisible in the quotient (`x^{D+1} = 0`), and the factor is stable.
pub fn torsion_algebra_e(f: &Fgl, k: u32) -> Result<TorsionAlgebra> {
    let p = f.p() as usize;
    let rank = p.pow(k * f.n() as u32);
    let mut dmax = 2 * rank;
    let mut prev: Option<Series1> = None;
    loop {
        let s = f.p_power_series(k, dmax)?;
        let pr = weierstrass_prepare(&s)?;
        if pr.w_degree != rank {
            return Err(Error::Mismatch(format!("Weierstrass degree {} != {rank}", pr.w_degree)));
        }
        let alg = QuotientAlgebra::univariate(&pr.monic)?;
        let nu = nilpotency(&alg).ok_or(Error::NonNilpotent(NIL_LIMIT))?;
        let stable = prev.as_ref() == Some(&pr.monic);
        if nu <= dmax + 1 && stable {
            return Ok(TorsionAlgebra { level: k, modulus: pr.monic, algebra: alg, series_degree: Some(dmax), nilpotency: Some(nu) });
        }
        prev = Some(pr.monic);
        dmax = dmax.max(nu) + rank;
    }
}

/// Torsion algebra over the requested base: `E` gives `f_k`; an `L_t` ring
/// gives the connected factor `g_k`, prepared from the base change of `f_k`.
pub fn torsion_algebra(f: &Fgl, ctx: &Arc<RingCtx>, k: u32) -> Result<TorsionAlgebra> {
    let te = torsion_algebra_e(f, k)?;
    if !ctx.is_lt() {
        return Ok(te);
    }
    let fl = te.modulus.convert(ctx)?;
    let g = weierstrass_prepare(&fl)?.monic;
    let alg = QuotientAlgebra::univariate(&g)?;
    let nu = nilpotency(&alg);
    Ok(TorsionAlgebra { level: k, modulus: g, algebra: alg, series_degree: None, nilpotency: nu })
}

/// `f_k = g_k · h_k` over `L_t` with a Bézout certificate `A·g + B·h = 1`.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub f: Series1,
    pub g: Series1,
    pub h: Series1,
    pub bezout_a: Series1,
    pub bezout_b: Series1,
    /// `B·h` in `L_t[x]/(f_k)`: 1 on the connected factor, 0 on the étale one.
    pub idempotent: AlgElem,
    pub idempotent_mod_mt: bool,
}

impl SplitData {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "f": self.f.to_json(),
            "g": self.g.to_json(),
            "h": self.h.to_json(),
            "bezout": {"a": self.bezout_a.to_json(), "b": self.bezout_b.to_json()},
            "idempotent": self.idempotent.to_json(),
            "idempotent_squares_to_itself_mod_mt": self.idempotent_mod_mt,
        })
    }
}

fn poly_coeffs(s: &Series1, len: usize) -> Vec<RingElem> {
    (0..len).map(|i| s.coeff(i)).collect()
}

/// Split the base change of `f_k` to `L_t` into connected and étale factors.
pub fn split_connected_etale(te: &TorsionAlgebra, lt: &Arc<RingCtx>) -> Result<SplitData> {
    if !lt.is_lt() {
        return Err(Error::InvalidParams("splitting needs an L_t base".into()));
    }
    let f = te.modulus.convert(lt)?;
    let pr = weierstrass_prepare(&f)?;
    let (g, h) = (pr.monic, pr.unit.as_poly());
    if !h.is_monic() || g.mul(&h) != f {
        return Err(Error::FactorizationMismatch("f_k != g_k·h_k".into()));
    }
    let (dg, dh) = (g.degree().unwrap(), h.degree().unwrap());
    // Sylvester system: A (deg < dh), B (deg < dg), A·g + B·h = 1
    let n = dg + dh;
    let mut m: Matrix<RingElem> = vec![vec![lt.zero(); n]; n];
    let gc = poly_coeffs(&g, dg + 1);
    let hc = poly_coeffs(&h, dh + 1);
    for j in 0..dh {
        for (i, c) in gc.iter().enumerate() {
            m[i + j][j] = c.clone();
        }
    }
    for j in 0..dg {
        for (i, c) in hc.iter().enumerate() {
            m[i + j][dh + j] = c.clone();
        }
    }
    let mut rhs = vec![lt.zero(); n];
    rhs[0] = lt.one();
    let sol = linalg::linear_solve(&m, &rhs)
        .map_err(|e| Error::FactorizationMismatch(format!("factors not coprime: {e}")))?;
    let a = Series1::poly(lt, sol[..dh].to_vec());
    let b = Series1::poly(lt, sol[dh..].to_vec());
    if a.mul(&g).add(&b.mul(&h)) != Series1::from_ints(lt, &[1]) {
        return Err(Error::FactorizationMismatch("Bézout identity".into()));
    }
    let alg = QuotientAlgebra::univariate(&f)?;
    let e = alg.from_poly(0, &b.mul(&h))?;
    let sq = e.mul(&e).sub(&e);
    let idempotent_mod_mt = sq.reduce_mod_mt().is_zero();
    if !idempotent_mod_mt {
        return Err(Error::FactorizationMismatch("idempotent".into()));
    }
    Ok(SplitData { f, g, h, bezout_a: a, bezout_b: b, idempotent: e, idempotent_mod_mt })
}

/// `F(a, z)` where `a` lives in an `E`-algebra (nilpotent there) and `z` in
/// an `L_t`-algebra `T` (nilpotent there); `embed` maps the base change of
/// the `a`-algebra into `T`.
pub fn mixed_law(
    f: &Fgl,
    a: &AlgElem,
    z: &AlgElem,
    embed: impl Fn(&AlgElem) -> Result<AlgElem>,
) -> Result<AlgElem> {
    let pa = a.nilpotent_powers()?;
    let pz = z.nilpotent_powers()?;
    let g = f.law_box(pa.len() - 1, pz.len() - 1)?;
    let t = z.algebra();
    let mut acc = t.zero();
    for (j, zj) in pz.iter().enumerate() {
        let col = g.column(j);
        let mut fj = a.algebra().zero();
        for (i, ai) in pa.iter().enumerate() {
            let c = col.coeff(i);
            if !c.is_zero() {
                fj = fj.add(&ai.scale(&c));
            }
        }
        if !fj.is_zero() {
            acc = acc.add(&embed(&fj)?.mul(zj));
        }
    }
    Ok(acc)
}

/// Coefficients of an element of `B ⊗ R[z]/(g)` along `1, z, …` (with `z`
/// the last generator), as elements of `B`.
pub fn split_last(e: &AlgElem, b: &Arc<QuotientAlgebra>) -> Vec<AlgElem> {
    let t = e.algebra();
    let m = *t.dims().last().unwrap();
    let mut out: Vec<Vec<RingElem>> = vec![vec![b.ctx().zero(); b.rank()]; m];
    for (i, c) in e.coords().iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let ex = t.basis_exponents(i);
        let (zpow, rest) = ex.split_last().unwrap();
        out[*zpow][b.basis_index(rest)] = c.clone();
    }
    out.into_iter().map(|c| b.from_coords(c)).collect()
}

/// Norm of `w ∈ B ⊗ R[z]/(g)` down to `B` (determinant of multiplication on
/// the `z`-basis).
pub fn relative_norm(w: &AlgElem, b: &Arc<QuotientAlgebra>) -> Result<AlgElem> {
    let t = w.algebra();
    let m = *t.dims().last().unwrap();
    let zg = t.gen(t.ngens() - 1);
    let mut col = w.clone();
    let mut cols = vec![];
    for _ in 0..m {
        cols.push(split_last(&col, b));
        col = col.mul(&zg);
    }
    let mat: Matrix<AlgElem> = (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect();
    Ok(linalg::det(&mat))
}

/// The étale coordinate and its minimal polynomial, with certificates.
#[derive(Clone, Debug)]
pub struct EtaleData {
    /// `Y(x)` as a polynomial of degree `< p^{kn}`.
    pub y_poly: Series1,
    pub y: AlgElem,
    pub j: Series1,
    pub y_congruence: bool,
    pub divisible_by_g: bool,
    pub j_of_y_zero: bool,
}

impl EtaleData {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "Y": self.y_poly.to_json(),
            "j": self.j.to_json(),
            "certificates": {
                "y_congruent_to_x_power_mod_mt": self.y_congruence,
                "divisible_by_g": self.divisible_by_g,
                "j_of_y_zero": self.j_of_y_zero,
            },
        })
    }
}

/// `Y = N(x +_F z)` over `L_t[x]/(f_k)`, from `L_t[x]/(f_k) ⊗ L_t[z]/(g_k)`.
pub fn etale_coordinate(f: &Fgl, te: &TorsionAlgebra, split: &SplitData) -> Result<(Series1, AlgElem)> {
    if !split.f.ctx().is_lt() {
        return Err(Error::InvalidParams("needs an L_t base".into()));
    }
    let ax = QuotientAlgebra::univariate(&split.f)?;
    let az = QuotientAlgebra::univariate(&split.g)?;
    let t = QuotientAlgebra::tensor(&ax, &az)?;
    let z = t.gen(1);
    let w = mixed_law(f, &te.x(), &z, |e| {
        let l = e.convert(&ax)?;
        t.include(&l, 0)
    })?;
    let y = relative_norm(&w, &ax)?;
    if y.is_lossy() {
        return Err(Error::PrecisionExceeded("étale coordinate".into()));
    }
    Ok((y.to_poly(), y))
}

/// `j_k`: the monic relation of degree `p^{k(n−t)}` among powers of `Y`.
pub fn etale_minimal_polynomial(y: &AlgElem, degree: usize) -> Result<Series1> {
    let alg = y.algebra();
    let ctx = alg.ctx();
    let pw = {
        let mut v = vec![alg.one()];
        for _ in 0..degree {
            v.push(v.last().unwrap().mul(y));
        }
        v
    };
    let m: Matrix<RingElem> =
        (0..alg.rank()).map(|i| (0..degree).map(|j| pw[j].coords()[i].clone()).collect()).collect();
    let rhs: Vec<RingElem> = pw[degree].coords().iter().map(|c| c.neg()).collect();
    let solver = EchelonSolver::new(&m, &[rhs]);
    if solver.rank() < degree {
        return Err(Error::DependenceTooEarly(solver.rank()));
    }
    let sol = solver.solution(0)?.ok_or(Error::DependenceTooEarly(degree))?;
    let mut c = sol;
    c.push(ctx.one());
    let j = Series1::poly(ctx, c);
    if !eval_series(&j, y)?.is_zero() {
        return Err(Error::Mismatch("j(Y) != 0".into()));
    }
    Ok(j)
}

/// Full étale analysis at level `k` for the split torsion data.
pub fn etale_data(f: &Fgl, te: &TorsionAlgebra, split: &SplitData, t: usize) -> Result<EtaleData> {
    let lt = split.f.ctx();
    let (y_poly, y) = etale_coordinate(f, te, split)?;
    let p = f.p() as usize;
    let k = te.level;
    let step = p.pow(k * t as u32);
    let y_congruence = y.reduce_mod_mt() == QuotientAlgebra::univariate(&split.f)?.from_poly(0, &Series1::monomial(lt, step, lt.one()))?.reduce_mod_mt();
    let divisible_by_g = y_poly.rem(&split.g)?.is_zero();
    let deg = p.pow(k * (f.n() - t) as u32);
    let j = etale_minimal_polynomial(&y, deg)?;
    Ok(EtaleData { y_poly, y, j, y_congruence, divisible_by_g, j_of_y_zero: true })
}

/// Certificate that `j_k'(Y)` is a unit: explicit inverses in
/// `L_t[x]/(f_k)` and in `L_t[y]/(j_k)`, plus the norm of `j_k'(y)` over
/// `L_t` (with its inverse when that fits in the box).
#[derive(Clone, Debug)]
pub struct SmoothnessCertificate {
    pub derivative: Series1,
    pub inverse_at_y: AlgElem,
    pub inverse_mod_j: AlgElem,
    pub norm: RingElem,
    pub norm_inverse: Option<RingElem>,
}

impl SmoothnessCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "derivative": self.derivative.to_json(),
            "inverse_at_Y": self.inverse_at_y.to_json(),
            "inverse_mod_j": self.inverse_mod_j.to_json(),
            "norm": self.norm.to_json(),
            "norm_inverse": self.norm_inverse.as_ref().map(|n| n.to_json()),
        })
    }
}

pub fn etale_smoothness_check(j: &Series1, y: &AlgElem) -> Result<SmoothnessCertificate> {
    let dj = j.derivative();
    let at_y = eval_series(&dj, y)?;
    let (inverse_at_y, _) = unit_certificate(&at_y).map_err(|e| Error::NotEtale(format!("j'(Y): {e}")))?;
    let aj = QuotientAlgebra::univariate(j)?;
    let dy = aj.from_poly(0, &dj)?;
    let (inverse_mod_j, norm) =
        unit_certificate(&dy).map_err(|e| Error::NotEtale(format!("j'(y) mod j: {e}")))?;
    let norm_inverse = norm.is_unit_with_inverse().inverse().ok();
    Ok(SmoothnessCertificate { derivative: dj, inverse_at_y, inverse_mod_j, norm, norm_inverse })
}

/// `x −_F y = (x − y)·u` in `R[x]/(m) ⊗ R[y]/(m)` with `u` a certified unit.
#[derive(Clone, Debug)]
pub struct SubtractionUnit {
    pub difference: AlgElem,
    pub unit: AlgElem,
    pub unit_inverse: AlgElem,
    pub norm: RingElem,
}

impl SubtractionUnit {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "difference": self.difference.to_json(),
            "unit": self.unit.to_json(),
            "unit_inverse": self.unit_inverse.to_json(),
            "norm": self.norm.to_json(),
        })
    }
}

/// Exact division by `x_0 − x_1` in a two-generator algebra with equal
/// moduli, followed by a unit certificate for the quotient.
pub fn divide_by_difference(s: &AlgElem) -> Result<SubtractionUnit> {
    let t = s.algebra();
    if t.ngens() != 2 || t.moduli()[0] != t.moduli()[1] {
        return Err(Error::InvalidParams("need R[x]/(m) ⊗ R[y]/(m)".into()));
    }
    let ay = QuotientAlgebra::univariate(&t.moduli()[1])?;
    let nx = t.dims()[0];
    // s = Σ_i s_i(y) x^i; synthetic division by (x − y)
    let mut si: Vec<AlgElem> = vec![ay.zero(); nx];
    for (idx, c) in s.coords().iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let ex = t.basis_exponents(idx);
        si[ex[0]] = si[ex[0]].add(&ay.basis(ex[1]).scale(c));
    }
    let yv = ay.gen(0);
    let mut q = vec![ay.zero(); nx.max(1) - 1];
    let mut carry = ay.zero();
    for i in (1..nx).rev() {
        carry = si[i].add(&carry.mul(&yv));
        q[i - 1] = carry.clone();
    }
    let rem = si[0].add(&carry.mul(&yv));
    if !rem.is_zero() {
        return Err(Error::NonDivisible(format!("remainder {rem:?}")));
    }
    let mut u = t.zero();
    for (i, qi) in q.iter().enumerate() {
        let xi = t.gen(0).pow(i as u64);
        u = u.add(&xi.mul(&t.include(qi, 1)?));
    }
    let xy = t.gen(0).sub(&t.gen(1));
    if xy.mul(&u) != *s {
        return Err(Error::NonDivisible("multiply-back".into()));
    }
    let (unit_inverse, norm) = unit_certificate(&u)?;
    Ok(SubtractionUnit { difference: s.clone(), unit: u, unit_inverse, norm })
}

/// Subtraction lemma for the formal group on `R[x]/(m)` (`x` nilpotent).
pub fn subtraction_unit(f: &Fgl, ta: &TorsionAlgebra) -> Result<SubtractionUnit> {
    if !ta.modulus.coeff(0).is_zero() {
        return Err(Error::InvalidParams("modulus must vanish at 0".into()));
    }
    let alg = &ta.algebra;
    let t = QuotientAlgebra::tensor(alg, alg)?;
    let s = f.fgl_difference(&t.gen(0), &t.gen(1))?;
    divide_by_difference(&s)
}

/// Subtraction lemma for the étale quotient in the `y` coordinate: the image
/// of `Y(x_1 −_F x_2)` in `L_t[y_1]/(j) ⊗ L_t[y_2]/(j)`.
pub fn etale_subtraction_unit(f: &Fgl, te: &TorsionAlgebra, split: &SplitData, et: &EtaleData) -> Result<SubtractionUnit> {
    let lt = split.f.ctx();
    let ee = QuotientAlgebra::tensor(&te.algebra, &te.algebra)?;
    let s = f.fgl_difference(&ee.gen(0), &ee.gen(1))?;
    let al = ee.convert(lt)?;
    let s = s.convert(&al)?;
    let ys = eval_series(&et.y_poly, &s)?;
    let y1 = eval_series(&et.y_poly, &al.gen(0))?;
    let y2 = eval_series(&et.y_poly, &al.gen(1))?;
    let m = et.j.degree().unwrap();
    let p1: Vec<AlgElem> = (0..m).map(|i| y1.pow(i as u64)).collect();
    let p2: Vec<AlgElem> = (0..m).map(|i| y2.pow(i as u64)).collect();
    let cols: Vec<AlgElem> = (0..m * m).map(|ij| p1[ij / m].mul(&p2[ij % m])).collect();
    let mat: Matrix<RingElem> =
        (0..al.rank()).map(|r| cols.iter().map(|c| c.coords()[r].clone()).collect()).collect();
    let coords = linalg::solve_in_span(&mat, ys.coords())?
        .ok_or_else(|| Error::Mismatch("Y(x1 − x2) outside the span of Y-monomials".into()))?;
    let aj = QuotientAlgebra::univariate(&et.j)?;
    let tj = QuotientAlgebra::tensor(&aj, &aj)?;
    let sy = tj.from_coords(coords);
    divide_by_difference(&sy)
}

/// `[p^k]_t(y)`: the `p^k`-series mod `m_t` as a series in `y = x^{p^{kt}}`,
/// over `E/m_t`, prepared there and compared with `j_k` mod `m_t`.
pub fn quotient_series_check(f: &Fgl, k: u32, t: usize, j: &Series1) -> Result<(Series1, bool)> {
    let p = f.p() as usize;
    let step = p.pow(k * t as u32);
    let e1 = RingCtx::new(f.ring().spec().with_a(1))?;
    let lt = j.ctx();
    let lt1 = RingCtx::new(lt.spec().with_a(1))?;
    let jr = j.convert(&lt1)?.reduce_mod_mt();
    let mut ydeg = 2 * j.degree().unwrap() + 2;
    loop {
        let s = f.p_power_series(k, ydeg * step)?;
        let c: Vec<RingElem> = (0..=ydeg)
            .map(|i| reduce_mod_mh(&s.coeff(i * step), t).convert(&e1))
            .collect::<Result<_>>()?;
        let qs = Series1::new(&e1, c, ydeg);
        let pr = weierstrass_prepare(&qs)?;
        let alg = QuotientAlgebra::univariate(&pr.monic)?;
        let nu = nilpotency(&alg).ok_or(Error::NonNilpotent(NIL_LIMIT))?;
        if nu <= ydeg + 1 {
            let m = pr.monic.convert(&lt1)?.reduce_mod_mt();
            return Ok((pr.monic, m == jr));
        }
        ydeg = nu + 1;
    }
}

/// `F(x, z)` on powers, for callers that have both tables in one algebra.
pub fn law_on_powers(f: &Fgl, pa: &[AlgElem], pb: &[AlgElem]) -> Result<AlgElem> {
    eval_on_powers(&f.law_box(pa.len() - 1, pb.len() - 1)?, pa, pb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn lt(p: u64, a: u32, d: i32) -> Arc<RingCtx> {
        RingCtx::new(RingSpec::lt_flavor(p, 2, a, 1, d, d)).unwrap()
    }

    #[test]
    fn multiplicative_subtraction_unit_is_inverse_of_one_plus_y() {
        // x −_F y = (x − y)/(1 + y) for F = x + y + xy
        let f = Fgl::new(2, 1, 4, 0, 8).unwrap();
        let ta = torsion_algebra_e(&f, 2).unwrap();
        assert_eq!(ta.rank(), 4);
        let su = subtraction_unit(&f, &ta).unwrap();
        let t = su.unit.algebra();
        let one_plus_y = t.one().add(&t.gen(1));
        assert_eq!(su.unit.mul(&one_plus_y), t.one());
        assert!(su.norm.residue_is_unit());
    }

    #[test]
    fn flagship_pipeline() {
        let f = Fgl::new(2, 2, 2, 12, 4).unwrap();
        let te = torsion_algebra_e(&f, 1).unwrap();
        assert_eq!(te.rank(), 4);
        let nu = te.nilpotency.unwrap();
        assert!(nu <= te.series_degree.unwrap() + 1);
        let l = lt(2, 2, 12);
        let sp = split_connected_etale(&te, &l).unwrap();
        assert_eq!(sp.g.degree(), Some(2));
        assert_eq!(sp.h.degree(), Some(2));
        assert_eq!(sp.g.mul(&sp.h), sp.f);
        let et = etale_data(&f, &te, &sp, 1).unwrap();
        assert!(et.y_congruence && et.divisible_by_g && et.j_of_y_zero);
        assert_eq!(et.j.degree(), Some(2));
        let (_, same) = quotient_series_check(&f, 1, 1, &et.j).unwrap();
        assert!(same);
        let sm = etale_smoothness_check(&et.j, &et.y).unwrap();
        assert_eq!(sm.inverse_mod_j.mul(&sm.inverse_mod_j.algebra().from_poly(0, &sm.derivative).unwrap()),
            sm.inverse_mod_j.algebra().one());
        let ta = torsion_algebra(&f, &l, 1).unwrap();
        let su = subtraction_unit(&f, &ta).unwrap();
        assert!(su.norm.residue_is_unit());
        let es = etale_subtraction_unit(&f, &te, &sp, &et).unwrap();
        assert!(es.norm.residue_is_unit());
        assert_eq!(es.unit.mul(&es.unit_inverse), es.unit.algebra().one());
    }

    #[test]
    fn odd_prime_etale_quotient_has_rank_p() {
        let f = Fgl::new(3, 2, 2, 8, 4).unwrap();
        let te = torsion_algebra_e(&f, 1).unwrap();
        assert_eq!(te.rank(), 9);
        let sp = split_connected_etale(&te, &lt(3, 2, 8)).unwrap();
        assert_eq!(sp.g.degree(), Some(3));
        let et = etale_data(&f, &te, &sp, 1).unwrap();
        assert_eq!(et.j.degree(), Some(3));
        assert!(et.y_congruence && et.divisible_by_g && et.j_of_y_zero);
        etale_smoothness_check(&et.j, &et.y).unwrap();
    }

    #[test]
    fn lt_modulus_is_distinguished_factor() {
        let f = Fgl::new(2, 2, 2, 8, 4).unwrap();
        let l = lt(2, 2, 8);
        let ta = torsion_algebra(&f, &l, 1).unwrap();
        assert_eq!(ta.rank(), 2);
        assert!(ta.modulus.is_monic());
        assert!(torsion_algebra(&f, &RingCtx::new(RingSpec::e_flavor(2, 2, 2, 8)).unwrap(), 1).unwrap().rank() == 4);
    }
}
