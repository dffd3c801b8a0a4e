//! The law against an independent computation over `Q[u]`: build the
//! logarithm `ℓ(x) = Σ l_i x^{p^i}` with `p·l_i = Σ_{j<i} l_j v_{i−j}^{p^j}`
//! (`v_1 = u`, `v_2 = 1`), solve `ℓ(F) = ℓ(x) + ℓ(y)` by fixed-point
//! iteration, then reduce mod `p^a` and `u^{d+1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use tcm_core::fgl::Fgl;

type Poly = BTreeMap<u32, BigRational>;
type Bi = BTreeMap<(usize, usize), Poly>;

fn padd(a: &mut Poly, b: &Poly, s: &BigRational) {
    for (e, c) in b {
        let v = a.entry(*e).or_insert_with(BigRational::zero);
        *v += c * s;
        if v.is_zero() {
            a.remove(e);
        }
    }
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            let v = out.entry(e1 + e2).or_insert_with(BigRational::zero);
            *v += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn bmul(a: &Bi, b: &Bi, tot: usize) -> Bi {
    let mut out = Bi::new();
    for ((i1, j1), c1) in a {
        for ((i2, j2), c2) in b {
            if i1 + i2 + j1 + j2 <= tot {
                padd(out.entry((i1 + i2, j1 + j2)).or_default(), &pmul(c1, c2), &BigRational::one());
            }
        }
    }
    out.retain(|_, c| !c.is_empty());
    out
}

fn badd(a: &mut Bi, b: &Bi, s: &Poly) {
    for (k, c) in b {
        padd(a.entry(*k).or_default(), &pmul(c, s), &BigRational::one());
    }
    a.retain(|_, c| !c.is_empty());
}

fn bpow(a: &Bi, e: u64, tot: usize) -> Bi {
    let mut r: Bi = [((0, 0), [(0, BigRational::one())].into())].into();
    for _ in 0..e {
        r = bmul(&r, a, tot);
    }
    r
}

fn oracle_law(p: u64, tot: usize) -> Bi {
    let mut k = 0;
    while p.pow(k + 1) as usize <= tot {
        k += 1;
    }
    let v = |m: usize| -> Poly {
        match m {
            1 => [(1, BigRational::one())].into(),
            2 => [(0, BigRational::one())].into(),
            _ => Poly::new(),
        }
    };
    let mut l: Vec<Poly> = vec![[(0, BigRational::one())].into()];
    for i in 1..=k as usize {
        let mut acc = Poly::new();
        for (j, lj) in l.iter().enumerate() {
            let mut vp: Poly = [(0, BigRational::one())].into();
            for _ in 0..p.pow(j as u32) {
                vp = pmul(&vp, &v(i - j));
            }
            padd(&mut acc, &pmul(lj, &vp), &BigRational::new(BigInt::one(), BigInt::from(p)));
        }
        l.push(acc);
    }
    let one: Poly = [(0, BigRational::one())].into();
    let x: Bi = [((1, 0), one.clone())].into();
    let y: Bi = [((0, 1), one.clone())].into();
    let mut s = Bi::new();
    for (i, li) in l.iter().enumerate() {
        let e = p.pow(i as u32);
        badd(&mut s, &bpow(&x, e, tot), li);
        badd(&mut s, &bpow(&y, e, tot), li);
    }
    let mut f = s.clone();
    for _ in 0..tot {
        let mut next = s.clone();
        for (i, li) in l.iter().enumerate().skip(1) {
            let neg: Poly = li.iter().map(|(e, c)| (*e, -c)).collect();
            badd(&mut next, &bpow(&f, p.pow(i as u32), tot), &neg);
        }
        f = next;
    }
    f
}

fn reduce(c: &BigRational, q: &BigInt, phi: &BigInt) -> u64 {
    let (n, d) = (c.numer(), c.denom());
    let dinv = d.modpow(&(phi - 1), q);
    let mut r = (n * dinv) % q;
    if r.is_negative() {
        r += q;
    }
    r.try_into().unwrap()
}

fn compare(p: u64, a: u32, d: i32, tot: usize) {
    let f = Fgl::new(p, 2, a, d, tot).unwrap();
    let oracle = oracle_law(p, tot);
    let q = BigInt::from(p).pow(a);
    let phi = BigInt::from(p).pow(a - 1) * BigInt::from(p - 1);
    for i in 0..=tot {
        for j in 0..=tot - i {
            let lib = f.law().get(i, j);
            let want = oracle.get(&(i, j)).cloned().unwrap_or_default();
            for e in 0..=d {
                let w = want.get(&(e as u32)).map(|c| reduce(c, &q, &phi)).unwrap_or(0);
                assert_eq!(lib.coeff(&[e]), w, "p={p}: coefficient of u^{e} x^{i} y^{j}");
            }
        }
    }
}

#[test]
fn law_matches_rational_logarithm_p2() {
    compare(2, 8, 16, 12);
}

#[test]
fn law_matches_rational_logarithm_p3() {
    compare(3, 4, 8, 10);
}
