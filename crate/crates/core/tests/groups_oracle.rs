//! Commuting-tuple classes against a direct enumeration that shares no code
//! with the library.

use proptest::prelude::*;
use tcm_core::groups::{self, corpus, FiniteGroup};

/// A group given by explicit elements and a multiplication closure.
struct Naive<T> {
    elems: Vec<T>,
    mul: fn(&T, &T) -> T,
    one: T,
}

impl<T: Clone + PartialEq> Naive<T> {
    fn order_of(&self, a: &T) -> usize {
        let mut x = a.clone();
        let mut k = 1;
        while x != self.one {
            x = (self.mul)(&x, a);
            k += 1;
        }
        k
    }
    fn inv(&self, a: &T) -> T {
        self.elems.iter().find(|b| (self.mul)(a, b) == self.one).unwrap().clone()
    }
    fn commute(&self, a: &T, b: &T) -> bool {
        (self.mul)(a, b) == (self.mul)(b, a)
    }
    /// `(count of commuting pairs, sorted centralizer orders per class)`.
    fn pair_classes(&self, p: usize) -> (usize, Vec<usize>) {
        let is_p = |a: &T| {
            let mut m = self.order_of(a);
            while m % p == 0 {
                m /= p;
            }
            m == 1
        };
        let pel: Vec<T> = self.elems.iter().filter(|a| is_p(a)).cloned().collect();
        let mut pairs = vec![];
        for a in &pel {
            for b in &pel {
                if self.commute(a, b) {
                    pairs.push((a.clone(), b.clone()));
                }
            }
        }
        let mut seen: Vec<bool> = vec![false; pairs.len()];
        let mut cents = vec![];
        for i in 0..pairs.len() {
            if seen[i] {
                continue;
            }
            let (a, b) = &pairs[i];
            for g in &self.elems {
                let gi = self.inv(g);
                let c = |x: &T| (self.mul)(&(self.mul)(g, x), &gi);
                let q = (c(a), c(b));
                let j = pairs.iter().position(|t| *t == q).unwrap();
                seen[j] = true;
            }
            cents.push(self.elems.iter().filter(|g| self.commute(g, a) && self.commute(g, b)).count());
        }
        cents.sort();
        (pairs.len(), cents)
    }
}

fn s3() -> Naive<[usize; 3]> {
    let mut elems = vec![];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    elems.push([a, b, c]);
                }
            }
        }
    }
    Naive { elems, mul: |x, y| [x[y[0]], x[y[1]], x[y[2]]], one: [0, 1, 2] }
}

/// Quaternion units as `(sign, index)` with index `0 = 1, 1 = i, 2 = j, 3 = k`.
fn q8() -> Naive<(i8, usize)> {
    fn mul(x: &(i8, usize), y: &(i8, usize)) -> (i8, usize) {
        const T: [[(i8, usize); 4]; 4] = [
            [(1, 0), (1, 1), (1, 2), (1, 3)],
            [(1, 1), (-1, 0), (1, 3), (-1, 2)],
            [(1, 2), (-1, 3), (-1, 0), (1, 1)],
            [(1, 3), (1, 2), (-1, 1), (-1, 0)],
        ];
        let (s, u) = T[x.1][y.1];
        (s * x.0 * y.0, u)
    }
    let elems = [1i8, -1].iter().flat_map(|&s| (0..4).map(move |u| (s, u))).collect();
    Naive { elems, mul, one: (1, 0) }
}

fn library_pair_classes(g: &FiniteGroup, p: usize) -> (usize, Vec<usize>) {
    let mut cents: Vec<usize> = groups::tuple_classes(g, p, 2).iter().map(|c| c.centralizer.len()).collect();
    cents.sort();
    (groups::commuting_p_tuples(g, p, 2).len(), cents)
}

#[test]
fn symmetric_group_pairs_match_enumeration() {
    let lib = library_pair_classes(&corpus::symmetric3(), 2);
    assert_eq!(lib, s3().pair_classes(2));
    assert_eq!(lib, (10, vec![2, 2, 2, 6]));
}

#[test]
fn quaternion_single_elements_match_enumeration() {
    let g = corpus::quaternion();
    let mut cents: Vec<usize> = groups::tuple_classes(&g, 2, 1).iter().map(|c| c.centralizer.len()).collect();
    cents.sort();
    assert_eq!(cents, vec![4, 4, 4, 8, 8]);
    assert_eq!(library_pair_classes(&g, 2), q8().pair_classes(2));
}

#[test]
fn abelian_rank_identity() {
    for g in [corpus::cyclic(2), corpus::cyclic(4), corpus::cyclic_product(2, 2)] {
        let rep = groups::class_function_report(&g, 2, 1, 1);
        assert_eq!(rep.total_rank, Some((g.order() as u64).pow(2)), "{}", g.name());
    }
}

#[test]
fn bundled_induction_pairs() {
    for (g, h, p) in corpus::induction_pairs() {
        let rep = groups::induction_check(&g, &h, p, 1).unwrap();
        assert!(rep.matches, "{} ⊇ |H| = {}", g.name(), h.len());
    }
}

proptest! {
    // For an abelian p-group every tuple is its own class with centralizer G.
    #[test]
    fn abelian_p_groups(m in 0u32..3, n in 0u32..3, r in 1usize..3) {
        let g = corpus::cyclic_product(2usize.pow(m), 2usize.pow(n));
        let classes = groups::tuple_classes(&g, 2, r);
        prop_assert_eq!(classes.len(), g.order().pow(r as u32));
        prop_assert!(classes.iter().all(|c| c.orbit_size == 1 && c.centralizer.len() == g.order()));
    }
}
