//! The level-structure algebras `A_k = L_t ⊗ E⁰(BΛ_k)`, the maps `ψ_x` and
//! `φ_y`, localization certificates, and the character map for abelian
//! `p`-groups at `X = *`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::json;

use crate::algebra::{eval_series, AlgElem, QuotientAlgebra, QuotientAlgebraExt};
use crate::error::{Error, Result};
use crate::fgl::Fgl;
use crate::linalg::{self, EchelonSolver, Matrix};
use crate::ring::{Flavor, RingCtx};
use crate::series::Series1;
use crate::torsion::{
    etale_data, etale_subtraction_unit, mixed_law, split_connected_etale, split_last, torsion_algebra,
    torsion_algebra_e, EtaleData, SplitData, SubtractionUnit, TorsionAlgebra,
};

/// An element `c₁β₁ + … + c_rβ_r` of `Λ_k^*`, `0 ≤ cᵢ < p^k`.
pub type Dual = Vec<u64>;

/// `A_k` with its `E`-side model, the étale data of level `k`, and caches.
pub struct LambdaAlgebra {
    pub level: u32,
    pub r: usize,
    pub fgl: Arc<Fgl>,
    pub torsion: TorsionAlgebra,
    /// `E[x₁,…,x_r]/(f_k(xᵢ))`, where `x` is nilpotent.
    pub e_algebra: Arc<QuotientAlgebra>,
    /// Its base change to `L_t`.
    pub algebra: Arc<QuotientAlgebra>,
    pub split: SplitData,
    pub etale: EtaleData,
    subtraction: OnceLock<std::result::Result<SubtractionUnit, Error>>,
    multiples: Mutex<HashMap<u64, Series1>>,
}

impl std::fmt::Debug for LambdaAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LambdaAlgebra").field("level", &self.level).field("r", &self.r).finish()
    }
}

impl LambdaAlgebra {
    /// `lambda_algebra(k)` over the `L_t` box `lt`, with `r = n − t`.
    pub fn new(fgl: Arc<Fgl>, lt: &Arc<RingCtx>, k: u32, r: usize) -> Result<LambdaAlgebra> {
        let n = fgl.n();
        let Flavor::Lt(t) = lt.spec().flavor else {
            return Err(Error::InvalidParams("need an L_t box".into()));
        };
        if k == 0 || r == 0 || t + r != n {
            return Err(Error::InvalidParams(format!("need k >= 1 and r = n - t >= 1 (k={k}, r={r}, t={t})")));
        }
        let torsion = torsion_algebra_e(&fgl, k)?;
        let mut e_algebra = torsion.algebra.clone();
        for _ in 1..r {
            e_algebra = QuotientAlgebra::tensor(&e_algebra, &torsion.algebra)?;
        }
        let algebra = e_algebra.convert(lt)?;
        let split = split_connected_etale(&torsion, lt)?;
        let etale = etale_data(&fgl, &torsion, &split, t)?;
        Ok(LambdaAlgebra {
            level: k,
            r,
            fgl,
            torsion,
            e_algebra,
            algebra,
            split,
            etale,
            subtraction: OnceLock::new(),
            multiples: Mutex::new(HashMap::new()),
        })
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }
    pub fn p(&self) -> u64 {
        self.fgl.p()
    }
    pub fn lt(&self) -> &Arc<RingCtx> {
        self.algebra.ctx()
    }
    /// `|Λ_k^*| = p^{kr}`.
    pub fn dual_order(&self) -> usize {
        (self.p().pow(self.level) as usize).pow(self.r as u32)
    }

    /// All of `Λ_k^*`, zero first, first coordinate slowest.
    pub fn duals(&self) -> Vec<Dual> {
        duals(self.p().pow(self.level), self.r)
    }

    pub fn dual_sub(&self, a: &Dual, b: &Dual) -> Dual {
        let m = self.p().pow(self.level);
        a.iter().zip(b).map(|(x, y)| (x + m - y) % m).collect()
    }

    /// `[c](x)` as a series, long enough for the nilpotent `x` of `A_k`.
    fn multiple(&self, c: u64) -> Result<Series1> {
        if let Some(s) = self.multiples.lock().unwrap().get(&c) {
            return Ok(s.clone());
        }
        let nu = self.torsion.nilpotency.ok_or(Error::NonNilpotent(0))?;
        let s = self.fgl.int_series(c as i64, nu.max(2) - 1)?;
        self.multiples.lock().unwrap().insert(c, s.clone());
        Ok(s)
    }

    /// `[c₁](x₁) +_F … +_F [c_r](x_r)` on the `E` side.
    pub fn psi_x_e(&self, l: &[u64]) -> Result<AlgElem> {
        if l.len() != self.r {
            return Err(Error::InvalidParams("dual element has wrong length".into()));
        }
        let mut acc: Option<AlgElem> = None;
        for (i, &c) in l.iter().enumerate() {
            let term = eval_series(&self.multiple(c)?, &self.e_algebra.gen(i))?;
            acc = Some(match acc {
                None => term,
                Some(a) => self.fgl.fgl_sum(&a, &term)?,
            });
        }
        Ok(acc.unwrap_or_else(|| self.e_algebra.zero()))
    }

    /// `ψ_x(l)` in `A_k`.
    pub fn psi_x(&self, l: &[u64]) -> Result<AlgElem> {
        self.psi_x_e(l)?.convert(&self.algebra)
    }

    /// `φ_y(α) = Y(ψ_x(α))` in `A_k`.
    pub fn phi_y(&self, alpha: &[u64]) -> Result<AlgElem> {
        eval_series(&self.etale.y_poly, &self.psi_x(alpha)?)
    }

    /// The subtraction unit of the `j_k`-torsion algebra (computed once).
    pub fn etale_subtraction(&self) -> Result<&SubtractionUnit> {
        self.subtraction
            .get_or_init(|| etale_subtraction_unit(&self.fgl, &self.torsion, &self.split, &self.etale))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// The ring map `A_k → A_{k+1}`, `xᵢ ↦ [p](xᵢ)`.
    pub fn transition(&self, next: &LambdaAlgebra) -> Result<Transition> {
        if next.level != self.level + 1 || next.r != self.r || !Arc::ptr_eq(&next.fgl, &self.fgl) {
            return Err(Error::InvalidParams("transition needs consecutive levels of one formal group".into()));
        }
        let px: Vec<AlgElem> =
            (0..self.r).map(|i| eval_series(&next.multiple(self.p())?, &next.e_algebra.gen(i))).collect::<Result<_>>()?;
        let images_e: Vec<AlgElem> = (0..self.rank())
            .map(|idx| {
                self.e_algebra
                    .basis_exponents(idx)
                    .iter()
                    .zip(&px)
                    .fold(next.e_algebra.one(), |acc, (&e, x)| acc.mul(&x.pow(e as u64)))
            })
            .collect();
        let images_lt = images_e.iter().map(|e| e.convert(&next.algebra)).collect::<Result<_>>()?;
        Ok(Transition { from: self.e_algebra.clone(), images_e, images_lt, px })
    }
}

fn duals(m: u64, r: usize) -> Vec<Dual> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v: Dual| (0..m).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Images of the monomial basis under `xᵢ ↦ [p](xᵢ)`.
pub struct Transition {
    from: Arc<QuotientAlgebra>,
    pub images_e: Vec<AlgElem>,
    pub images_lt: Vec<AlgElem>,
    px: Vec<AlgElem>,
}

impl Transition {
    pub fn apply_e(&self, e: &AlgElem) -> AlgElem {
        apply_linear(e, &self.images_e)
    }
    pub fn apply(&self, e: &AlgElem) -> AlgElem {
        apply_linear(e, &self.images_lt)
    }

    /// `f_k([p](x)) = 0` at level `k+1`, and the basis images reduce to the
    /// distinct monomials `x^{p^n·m}` modulo the maximal ideal, so the map is
    /// injective.
    pub fn check(&self, f_k: &Series1) -> Result<bool> {
        let well_defined = self.px.iter().map(|x| eval_series(f_k, x).map(|v| v.is_zero())).collect::<Result<Vec<_>>>()?;
        let next = self.images_e[0].algebra();
        let mut seen = std::collections::BTreeSet::new();
        for img in &self.images_e {
            let red = img.reduce_mod_mt();
            let nz: Vec<usize> = (0..next.rank()).filter(|&i| !red.coords()[i].is_zero()).collect();
            if nz.len() != 1 || !red.coords()[nz[0]].is_one() || !seen.insert(nz[0]) {
                return Ok(false);
            }
        }
        Ok(well_defined.into_iter().all(|b| b) && seen.len() == self.from.rank())
    }
}

fn apply_linear(e: &AlgElem, images: &[AlgElem]) -> AlgElem {
    let target = images[0].algebra();
    let mut acc = target.zero();
    for (c, img) in e.coords().iter().zip(images) {
        if !c.is_exact_zero() {
            acc = acc.add(&img.scale(&c.convert(target.ctx()).expect("same box family")));
        }
    }
    acc
}

/// Evaluate an element of `R[y₁]/(j) ⊗ R[y₂]/(j)` at `(a, b)` in `A_k`.
fn specialize2(e: &AlgElem, a: &AlgElem, b: &AlgElem) -> AlgElem {
    let t = e.algebra();
    let d = t.dims().to_vec();
    let pa: Vec<AlgElem> = (0..d[0]).map(|i| a.pow(i as u64)).collect();
    let pb: Vec<AlgElem> = (0..d[1]).map(|i| b.pow(i as u64)).collect();
    let mut acc = a.algebra().zero();
    for (idx, c) in e.coords().iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let ex = t.basis_exponents(idx);
        acc = acc.add(&pa[ex[0]].mul(&pb[ex[1]]).scale(c));
    }
    acc
}

/// `φ_y(αᵢ) − φ_y(αⱼ) = u·φ_y(αᵢ − αⱼ)` with `u·u⁻¹ = 1` in `A_k`.
#[derive(Clone, Debug)]
pub struct PairwiseCertificate {
    pub alpha_i: Dual,
    pub alpha_j: Dual,
    pub difference: Dual,
    pub unit: AlgElem,
    pub unit_inverse: AlgElem,
}

impl PairwiseCertificate {
    pub fn verify(&self, phi: impl Fn(&Dual) -> Result<AlgElem>) -> Result<bool> {
        let lhs = phi(&self.alpha_i)?.sub(&phi(&self.alpha_j)?);
        let rhs = self.unit.mul(&phi(&self.difference)?);
        let one = self.unit.mul(&self.unit_inverse);
        Ok(lhs == rhs && one.is_one() && one.precision() >= 1)
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "alpha_i": self.alpha_i,
            "alpha_j": self.alpha_j,
            "difference": self.difference,
            "unit": self.unit.to_json(),
            "unit_inverse": self.unit_inverse.to_json(),
        })
    }
}

fn pairwise_from_values(
    a: &LambdaAlgebra,
    phis: &HashMap<Dual, AlgElem>,
    ai: &Dual,
    aj: &Dual,
) -> Result<PairwiseCertificate> {
    if ai == aj {
        return Err(Error::InvalidParams("pairwise certificate needs distinct elements".into()));
    }
    let su = a.etale_subtraction()?;
    let (pi, pj) = (&phis[ai], &phis[aj]);
    let difference = a.dual_sub(ai, aj);
    // Y(x₁ −_F x₂) = (y₁ − y₂)·w(y₁, y₂), so φ_y(αᵢ) − φ_y(αⱼ) = w⁻¹·φ_y(αᵢ − αⱼ)
    let w = specialize2(&su.unit, pi, pj);
    let w_inv = specialize2(&su.unit_inverse, pi, pj);
    let one = w.mul(&w_inv);
    if !one.is_one() || one.precision() < 1 {
        return Err(Error::NotUnit);
    }
    let lhs = pi.sub(pj);
    let rhs = w_inv.mul(&phis[&difference]);
    if lhs != rhs {
        return Err(Error::Mismatch(format!("pairwise identity fails for {ai:?}, {aj:?}")));
    }
    Ok(PairwiseCertificate { alpha_i: ai.clone(), alpha_j: aj.clone(), difference, unit: w_inv, unit_inverse: w })
}

fn all_phis(a: &LambdaAlgebra) -> Result<HashMap<Dual, AlgElem>> {
    a.duals().into_iter().map(|d| Ok((d.clone(), a.phi_y(&d)?))).collect()
}

pub fn pairwise_unit_certificate(a: &LambdaAlgebra, ai: &Dual, aj: &Dual) -> Result<PairwiseCertificate> {
    let mut phis = HashMap::new();
    for d in [ai.clone(), aj.clone(), a.dual_sub(ai, aj)] {
        let v = a.phi_y(&d)?;
        phis.insert(d, v);
    }
    pairwise_from_values(a, &phis, ai, aj)
}

/// `Δ = det(φ_y(α_a)^b) = unit · Π_{α≠0} φ_y(α)^{e_α}`.
#[derive(Clone, Debug)]
pub struct VandermondeCertificate {
    pub duals: Vec<Dual>,
    pub delta: AlgElem,
    pub unit: AlgElem,
    pub unit_inverse: AlgElem,
    /// `(α, e_α)` for `α ≠ 0`.
    pub exponents: Vec<(Dual, u32)>,
    pub pairs: Vec<PairwiseCertificate>,
}

impl VandermondeCertificate {
    /// Re-checks the witness identity and the unit against fresh `φ_y` values.
    pub fn verify(&self, a: &LambdaAlgebra) -> Result<bool> {
        let mut rhs = self.unit.clone();
        for (d, e) in &self.exponents {
            rhs = rhs.mul(&a.phi_y(d)?.pow(*e as u64));
        }
        let one = self.unit.mul(&self.unit_inverse);
        let pairs_ok = self.pairs.iter().map(|c| c.verify(|d| a.phi_y(d))).collect::<Result<Vec<_>>>()?;
        Ok(rhs == self.delta && one.is_one() && pairs_ok.into_iter().all(|b| b))
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "duals": self.duals,
            "delta": self.delta.to_json(),
            "unit": self.unit.to_json(),
            "unit_inverse": self.unit_inverse.to_json(),
            "exponents": self.exponents.iter().map(|(d, e)| json!({"alpha": d, "e": e})).collect::<Vec<_>>(),
            "pairs": self.pairs.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}

pub fn vandermonde_certificate(a: &LambdaAlgebra) -> Result<VandermondeCertificate> {
    vandermonde_certificate_with(a, &all_phis(a)?)
}

/// As [`vandermonde_certificate`], from supplied values of `φ_y`.
pub fn vandermonde_certificate_with(a: &LambdaAlgebra, phis: &HashMap<Dual, AlgElem>) -> Result<VandermondeCertificate> {
    let ds = a.duals();
    let n = ds.len();
    let v: Matrix<AlgElem> = ds.iter().map(|d| (0..n).map(|b| phis[d].pow(b as u64)).collect()).collect();
    let delta = linalg::det(&v);
    let mut unit = a.algebra.one();
    let mut unit_inverse = a.algebra.one();
    let mut exps: HashMap<Dual, u32> = HashMap::new();
    let mut pairs = vec![];
    for lo in 0..n {
        for hi in lo + 1..n {
            let c = pairwise_from_values(a, phis, &ds[hi], &ds[lo])?;
            unit = unit.mul(&c.unit);
            unit_inverse = unit_inverse.mul(&c.unit_inverse);
            *exps.entry(c.difference.clone()).or_default() += 1;
            pairs.push(c);
        }
    }
    let exponents: Vec<(Dual, u32)> =
        ds.iter().skip(1).map(|d| (d.clone(), exps.get(d).copied().unwrap_or(0))).collect();
    let mut rhs = unit.clone();
    for (d, e) in &exponents {
        rhs = rhs.mul(&phis[d].pow(*e as u64));
    }
    if rhs != delta {
        return Err(Error::Mismatch("Vandermonde determinant differs from the assembled product".into()));
    }
    Ok(VandermondeCertificate { duals: ds, delta, unit, unit_inverse, exponents, pairs })
}

/// Matrix of the character map on monomial bases, entries in `A_k`.
#[derive(Clone, Debug)]
pub struct CharacterMatrix {
    /// `G = Π Z/p^{kᵢ}`.
    pub factors: Vec<u32>,
    /// Codomain factors: one `l = (l₁,…,l_s)`, `lᵢ ∈ Λ_{kᵢ}^*`, per class.
    pub classes: Vec<Vec<Dual>>,
    pub domain_rank: usize,
    /// Rank of each codomain factor `A_k[x]/(g)` over `A_k`.
    pub factor_rank: usize,
    /// Rows `(class, codomain basis)`, columns domain basis.
    pub matrix: Matrix<AlgElem>,
    /// `[p^{kᵢ}]` kills the image of every generator.
    pub ring_map: bool,
    /// The `l = 0` block is the base change of `x ↦ x`.
    pub zero_class_inclusion: bool,
}

impl CharacterMatrix {
    pub fn size(&self) -> usize {
        self.matrix.len()
    }
    pub fn rank_identity(&self) -> bool {
        self.domain_rank == self.classes.len() * self.factor_rank && self.domain_rank == self.size()
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "group": self.factors,
            "classes": self.classes,
            "domain_rank": self.domain_rank,
            "factor_rank": self.factor_rank,
            "matrix": self.matrix.iter().map(|r| r.iter().map(|e| e.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "ring_map": self.ring_map,
            "zero_class_inclusion": self.zero_class_inclusion,
            "rank_identity": self.rank_identity(),
        })
    }
}

/// `R[x]/(f_{k'}) → Π_{l ∈ Λ_{k'}^*} A_k[x]/(g_{k'})`, `x ↦ x +_F ψ_x(l)`.
pub fn character_map_cyclic(kp: u32, a: &LambdaAlgebra) -> Result<CharacterMatrix> {
    if kp == 0 {
        return character_map_abelian(&[], a);
    }
    if kp > a.level {
        return Err(Error::InvalidParams(format!("group level {kp} exceeds k = {}", a.level)));
    }
    let p = a.p();
    let f = &a.fgl;
    let lt = a.lt();
    let dom = torsion_algebra_e(f, kp)?;
    let g = torsion_algebra(f, lt, kp)?.modulus;
    let t = QuotientAlgebra::tensor(&a.algebra, &*QuotientAlgebra::univariate(&g)?)?;
    let m = dom.rank();
    let fr = t.dims()[t.ngens() - 1];
    let scale = p.pow(a.level - kp);
    let classes: Vec<Dual> = duals(p.pow(kp), a.r);
    let z = t.gen(t.ngens() - 1);
    let te = QuotientAlgebra::tensor(&a.e_algebra, &dom.algebra)?;
    let xe = te.gen(te.ngens() - 1);
    let mut rows: Vec<Vec<AlgElem>> = vec![];
    let mut ring_map = true;
    let mut zero_class_inclusion = true;
    for l in &classes {
        let lk: Dual = l.iter().map(|c| c * scale).collect();
        let psi = a.psi_x_e(&lk)?;
        let img = mixed_law(f, &psi, &z, |e| t.include(e, 0))?;
        // Ring-map check, done exactly over E: [p^{k'}](x +_F ψ) = 0 in
        // A_k ⊗ E[x]/(f_{k'}), and its reduction mod g is `img`.
        let img_e = f.fgl_sum(&te.include(&psi, 0)?, &xe)?;
        let nu = img_e.nilpotent_powers()?.len();
        let series = f.p_power_series(kp, nu.max(2) - 1)?;
        ring_map &= eval_series(&series, &img_e)?.is_exact_zero();
        let mut reduced = t.zero();
        let mut zi = t.one();
        for c in split_last(&img_e, &a.e_algebra) {
            reduced = reduced.add(&t.include(&c.convert(&a.algebra)?, 0)?.mul(&zi));
            zi = zi.mul(&z);
        }
        ring_map &= reduced == img;
        let mut cols: Vec<Vec<AlgElem>> = Vec::with_capacity(m);
        let mut cur = t.one();
        for _ in 0..m {
            cols.push(split_last(&cur, &a.algebra));
            cur = cur.mul(&img);
        }
        if l.iter().all(|&c| c == 0) {
            zero_class_inclusion = img == z;
        }
        for j in 0..fr {
            rows.push((0..m).map(|c| cols[c][j].clone()).collect());
        }
    }
    Ok(CharacterMatrix {
        factors: vec![kp],
        classes: classes.into_iter().map(|l| vec![l]).collect(),
        domain_rank: m,
        factor_rank: fr,
        matrix: rows,
        ring_map,
        zero_class_inclusion,
    })
}

/// Künneth assembly over a cyclic decomposition `G = Π Z/p^{kᵢ}`.
pub fn character_map_abelian(factors: &[u32], a: &LambdaAlgebra) -> Result<CharacterMatrix> {
    let mut acc = CharacterMatrix {
        factors: vec![],
        classes: vec![vec![]],
        domain_rank: 1,
        factor_rank: 1,
        matrix: vec![vec![a.algebra.one()]],
        ring_map: true,
        zero_class_inclusion: true,
    };
    for &k in factors {
        let c = character_map_cyclic(k, a)?;
        acc = kronecker(&acc, &c);
    }
    Ok(acc)
}

fn kronecker(a: &CharacterMatrix, b: &CharacterMatrix) -> CharacterMatrix {
    let (fa, fb) = (a.factor_rank, b.factor_rank);
    let (ma, mb) = (a.domain_rank, b.domain_rank);
    let mut rows = vec![];
    let mut classes = vec![];
    for (ca, la) in a.classes.iter().enumerate() {
        for (cb, lb) in b.classes.iter().enumerate() {
            classes.push([la.clone(), lb.clone()].concat());
            for ja in 0..fa {
                for jb in 0..fb {
                    let ra = &a.matrix[ca * fa + ja];
                    let rb = &b.matrix[cb * fb + jb];
                    rows.push((0..ma * mb).map(|c| ra[c / mb].mul(&rb[c % mb])).collect());
                }
            }
        }
    }
    CharacterMatrix {
        factors: [a.factors.clone(), b.factors.clone()].concat(),
        classes,
        domain_rank: ma * mb,
        factor_rank: fa * fb,
        matrix: rows,
        ring_map: a.ring_map && b.ring_map,
        zero_class_inclusion: a.zero_class_inclusion && b.zero_class_inclusion,
    }
}

/// `claim · cofactor = Π_{α≠0} φ_y(α)^{e_α}` in `A_k`.
#[derive(Clone, Debug)]
pub struct LocalizationCertificate {
    pub claim: AlgElem,
    pub generators: Vec<Dual>,
    pub exponents: Vec<u32>,
    pub cofactor: AlgElem,
    /// Exponent vectors tried before the witness.
    pub tried: usize,
    pub budget: u32,
}

impl LocalizationCertificate {
    pub fn verify(&self, a: &LambdaAlgebra) -> Result<bool> {
        let mut target = a.algebra.one();
        for (d, &e) in self.generators.iter().zip(&self.exponents) {
            target = target.mul(&a.phi_y(d)?.pow(e as u64));
        }
        let lhs = self.claim.mul(&self.cofactor);
        Ok(!target.is_zero() && lhs == target && lhs.precision() >= 1)
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "claim": self.claim.to_json(),
            "generators": self.generators,
            "exponents": self.exponents,
            "cofactor": self.cofactor.to_json(),
            "tried": self.tried,
            "budget": self.budget,
        })
    }
}

/// Default exponent budget `|Λ_k^*| + 2`.
pub fn default_budget(a: &LambdaAlgebra) -> u32 {
    a.dual_order() as u32 + 2
}

/// Searches exponent vectors with entries `≤ budget`, by increasing total,
/// for `det(M)·c = Π φ_y(α)^{e_α}`. Targets that vanish at the working
/// precision are skipped: they would make any witness vacuous.
pub fn iso_certificate(m: &CharacterMatrix, a: &LambdaAlgebra, budget: u32) -> Result<LocalizationCertificate> {
    if m.matrix.iter().any(|r| r.len() != m.size()) {
        return Err(Error::InvalidParams("character matrix is not square".into()));
    }
    let det = linalg::det(&m.matrix);
    localization_witness(&det, a, budget)
}

/// Iso certificate for `Π Z/p^{kᵢ}`: one exact certificate per cyclic
/// factor. With `N = Π sizeᵢ`, `det(⊗ Mᵢ) = Π det(Mᵢ)^{N/sizeᵢ}`, so the
/// product is invertible after inverting `Π Tᵢ^{N/sizeᵢ}`; `exponents` records
/// that assembled vector. The full determinant is not recomputed: its powers
/// of `φ_y` leave the `u`-box and would compare vacuously.
#[derive(Clone, Debug)]
pub struct KunnethCertificate {
    pub factors: Vec<u32>,
    pub sizes: Vec<usize>,
    pub parts: Vec<LocalizationCertificate>,
    pub exponents: Vec<u32>,
}

impl KunnethCertificate {
    pub fn verify(&self, a: &LambdaAlgebra) -> Result<bool> {
        let mut ok = self.parts.len() == self.factors.len();
        for (k, c) in self.factors.iter().zip(&self.parts) {
            let m = character_map_cyclic(*k, a)?;
            ok &= c.claim == linalg::det(&m.matrix) && c.verify(a)?;
        }
        Ok(ok)
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "factors": self.factors,
            "sizes": self.sizes,
            "parts": self.parts.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "exponents": self.exponents,
        })
    }
}

pub fn iso_certificate_abelian(factors: &[u32], a: &LambdaAlgebra, budget: u32) -> Result<KunnethCertificate> {
    let mut sizes = vec![];
    let mut parts = vec![];
    for &k in factors {
        let m = character_map_cyclic(k, a)?;
        sizes.push(m.size());
        parts.push(iso_certificate(&m, a, budget)?);
    }
    let n: usize = sizes.iter().product();
    let mut exponents = vec![0u32; a.dual_order() - 1];
    for (size, c) in sizes.iter().zip(&parts) {
        for (e, ce) in exponents.iter_mut().zip(&c.exponents) {
            *e += (n / size) as u32 * ce;
        }
    }
    Ok(KunnethCertificate { factors: factors.to_vec(), sizes, parts, exponents })
}

pub fn localization_witness(claim: &AlgElem, a: &LambdaAlgebra, budget: u32) -> Result<LocalizationCertificate> {
    let generators: Vec<Dual> = a.duals().into_iter().skip(1).collect();
    let phis: Vec<AlgElem> = generators.iter().map(|d| a.phi_y(d)).collect::<Result<_>>()?;
    let mut vectors: Vec<Vec<u32>> = vec![vec![]];
    for _ in &generators {
        vectors = vectors.into_iter().flat_map(|v| (0..=budget).map(move |e| [v.clone(), vec![e]].concat())).collect();
    }
    vectors.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
    let mm = claim.mult_matrix();
    let mut tried = 0;
    // solve in batches so one factorization serves many targets
    for chunk in vectors.chunks(64) {
        let targets: Vec<AlgElem> = chunk
            .iter()
            .map(|v| phis.iter().zip(v).fold(a.algebra.one(), |acc, (p, &e)| acc.mul(&p.pow(e as u64))))
            .collect();
        let rhs: Vec<Vec<_>> = targets.iter().map(|t| t.coords().to_vec()).collect();
        let solver = EchelonSolver::new(&mm, &rhs);
        for (i, v) in chunk.iter().enumerate() {
            tried += 1;
            if targets[i].is_zero() {
                continue;
            }
            let Ok(Some(c)) = solver.solution(i) else { continue };
            let cofactor = a.algebra.from_coords(c);
            let cert = LocalizationCertificate {
                claim: claim.clone(),
                generators: generators.clone(),
                exponents: v.clone(),
                cofactor,
                tried,
                budget,
            };
            if cert.verify(a)? {
                return Ok(cert);
            }
        }
    }
    Err(Error::WitnessNotFound(budget))
}

/// Level compatibility of `ψ_x` and of the character matrices.
#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub transition_ok: bool,
    pub psi_ok: bool,
    pub matrices_ok: bool,
    pub entries_compared: usize,
}

impl IndependenceReport {
    pub fn pass(&self) -> bool {
        self.transition_ok && self.psi_ok && self.matrices_ok
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "transition_ok": self.transition_ok,
            "psi_ok": self.psi_ok,
            "matrices_ok": self.matrices_ok,
            "entries_compared": self.entries_compared,
            "pass": self.pass(),
        })
    }
}

pub fn k_independence_check(a: &LambdaAlgebra, b: &LambdaAlgebra, factors: &[u32]) -> Result<IndependenceReport> {
    let tr = a.transition(b)?;
    let transition_ok = tr.check(&a.torsion.modulus)?;
    let p = a.p();
    let mut psi_ok = true;
    for l in a.duals() {
        let lifted: Dual = l.iter().map(|c| c * p).collect();
        psi_ok &= b.psi_x_e(&lifted)? == tr.apply_e(&a.psi_x_e(&l)?);
    }
    let ma = character_map_abelian(factors, a)?;
    let mb = character_map_abelian(factors, b)?;
    let mut matrices_ok = ma.classes == mb.classes && ma.size() == mb.size();
    let mut entries_compared = 0;
    if matrices_ok {
        for (ra, rb) in ma.matrix.iter().zip(&mb.matrix) {
            for (x, y) in ra.iter().zip(rb) {
                entries_compared += 1;
                if tr.apply(x) != *y {
                    matrices_ok = false;
                }
            }
        }
    }
    Ok(IndependenceReport { transition_ok, psi_ok, matrices_ok, entries_compared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn build(p: u64, a: u32, d: i32, k: u32) -> LambdaAlgebra {
        let f = Arc::new(Fgl::new(p, 2, a, d, 4).unwrap());
        let lt = RingCtx::new(RingSpec::lt_flavor(p, 2, a, 1, d, d)).unwrap();
        LambdaAlgebra::new(f, &lt, k, 1).unwrap()
    }

    fn flagship() -> &'static LambdaAlgebra {
        static A: OnceLock<LambdaAlgebra> = OnceLock::new();
        A.get_or_init(|| build(2, 4, 12, 1))
    }

    fn flagship3() -> &'static LambdaAlgebra {
        static A: OnceLock<LambdaAlgebra> = OnceLock::new();
        A.get_or_init(|| build(3, 2, 8, 1))
    }

    #[test]
    fn ranks_and_duals() {
        assert_eq!(flagship().rank(), 4);
        assert_eq!(flagship3().rank(), 9);
        assert_eq!(flagship3().duals(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(flagship3().dual_sub(&vec![1], &vec![2]), vec![2]);
    }

    #[test]
    fn rejects_bad_shapes() {
        let f = Arc::new(Fgl::new(2, 2, 2, 6, 4).unwrap());
        let e = RingCtx::new(RingSpec::e_flavor(2, 2, 2, 6)).unwrap();
        assert!(LambdaAlgebra::new(f.clone(), &e, 1, 1).is_err());
        let lt = RingCtx::new(RingSpec::lt_flavor(2, 2, 2, 1, 6, 6)).unwrap();
        assert!(LambdaAlgebra::new(f.clone(), &lt, 1, 2).is_err());
        assert!(LambdaAlgebra::new(f, &lt, 0, 1).is_err());
    }

    #[test]
    fn psi_on_generators() {
        let a = flagship();
        assert!(a.psi_x_e(&[0]).unwrap().is_zero());
        assert_eq!(a.psi_x_e(&[1]).unwrap(), a.e_algebra.gen(0));
        let b = flagship3();
        let x = b.e_algebra.gen(0);
        assert_eq!(b.psi_x_e(&[2]).unwrap(), b.fgl.fgl_sum(&x, &x).unwrap());
        assert!(b.psi_x_e(&[1, 1]).is_err());
    }

    #[test]
    fn phi_is_a_square_mod_mt() {
        let a = flagship();
        assert!(a.phi_y(&vec![0]).unwrap().is_zero());
        let x = a.algebra.gen(0);
        assert_eq!(a.phi_y(&vec![1]).unwrap().reduce_mod_mt(), x.mul(&x).reduce_mod_mt());
    }

    #[test]
    fn pairwise_and_vandermonde() {
        for a in [flagship(), flagship3()] {
            let ds = a.duals();
            let c = pairwise_unit_certificate(a, &ds[1], &ds[0]).unwrap();
            assert!(c.verify(|d| a.phi_y(d)).unwrap());
            let v = vandermonde_certificate(a).unwrap();
            assert!(v.verify(a).unwrap());
            assert_eq!(v.pairs.len(), ds.len() * (ds.len() - 1) / 2);
        }
        // p = 3: pairs (1,0), (2,0) and (2,1) give differences 1, 2, 1
        let v = vandermonde_certificate(flagship3()).unwrap();
        assert_eq!(v.exponents, vec![(vec![1], 2), (vec![2], 1)]);
        assert!(pairwise_unit_certificate(flagship(), &vec![1], &vec![1]).is_err());
    }

    #[test]
    fn tampered_phi_is_rejected() {
        let a = flagship3();
        let mut phis = all_phis(a).unwrap();
        let bumped = phis[&vec![2]].add(&a.algebra.gen(0));
        phis.insert(vec![2], bumped);
        assert!(vandermonde_certificate_with(a, &phis).is_err());
    }

    #[test]
    fn cyclic_character_map() {
        let a = flagship();
        let m = character_map_cyclic(1, a).unwrap();
        assert_eq!(m.size(), 4);
        assert_eq!((m.domain_rank, m.factor_rank, m.classes.len()), (4, 2, 2));
        assert!(m.ring_map && m.zero_class_inclusion && m.rank_identity());
        let c = iso_certificate(&m, a, 4).unwrap();
        assert!(c.verify(a).unwrap());
        assert!(c.exponents.iter().all(|&e| e <= 4));
        assert!(character_map_cyclic(2, a).is_err());
    }

    #[test]
    fn odd_prime_character_map() {
        let a = flagship3();
        let m = character_map_cyclic(1, a).unwrap();
        assert_eq!((m.size(), m.factor_rank, m.classes.len()), (9, 3, 3));
        assert!(m.ring_map && m.zero_class_inclusion && m.rank_identity());
        let c = iso_certificate(&m, a, default_budget(a)).unwrap();
        assert!(c.verify(a).unwrap());
    }

    #[test]
    fn trivial_group_and_products() {
        let a = flagship();
        let t = character_map_abelian(&[], a).unwrap();
        assert_eq!(t.size(), 1);
        assert!(t.matrix[0][0].is_one());
        let m = character_map_abelian(&[1, 1], a).unwrap();
        assert_eq!((m.size(), m.classes.len(), m.factor_rank), (16, 4, 4));
        assert!(m.rank_identity() && m.ring_map);
        let c = iso_certificate_abelian(&[1, 1], a, 4).unwrap();
        assert!(c.verify(a).unwrap());
        assert_eq!(c.exponents, c.parts[0].exponents.iter().map(|e| 8 * e).collect::<Vec<_>>());
    }

    #[test]
    fn level_transition_is_compatible() {
        let f = Arc::new(Fgl::new(2, 2, 2, 8, 4).unwrap());
        let lt = RingCtx::new(RingSpec::lt_flavor(2, 2, 2, 1, 8, 8)).unwrap();
        let a = LambdaAlgebra::new(f.clone(), &lt, 1, 1).unwrap();
        let b = LambdaAlgebra::new(f, &lt, 2, 1).unwrap();
        assert!(a.transition(&build(2, 2, 8, 2)).is_err());
        let tr = a.transition(&b).unwrap();
        assert!(tr.check(&a.torsion.modulus).unwrap());
        let r = k_independence_check(&a, &b, &[1]).unwrap();
        assert!(r.pass());
        assert_eq!(r.entries_compared, 16);
        assert!(b.transition(&a).is_err());
    }
}
