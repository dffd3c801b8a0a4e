//! Finite groups as multiplication tables: commuting `p`-power tuples,
//! their conjugacy classes and centralizers, fixed points of coset spaces,
//! and the orbit/stabilizer comparison behind induction.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

pub const DEFAULT_CLOSURE_BOUND: usize = 1024;

/// A finite group on `0..order`, with `0` the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    inv: Vec<usize>,
    /// Permutation realizing each element, when built from generators.
    perms: Option<Vec<Vec<usize>>>,
}

/// Group input as accepted on the command line.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupInput {
    Permutations { name: String, degree: usize, generators: Vec<Vec<usize>> },
    Table { name: String, table: Vec<Vec<usize>> },
}

impl GroupInput {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupInput::Permutations { name, degree, generators } => {
                group_from_permutations(name, generators, *degree, DEFAULT_CLOSURE_BOUND)
            }
            GroupInput::Table { name, table } => FiniteGroup::from_table(name, table.clone()),
        }
    }
}

fn check_perm(p: &[usize], degree: usize) -> Result<()> {
    let mut seen = vec![false; degree];
    if p.len() != degree {
        return Err(Error::InvalidGroup(format!("permutation of length {} on {degree} points", p.len())));
    }
    for &i in p {
        if i >= degree || seen[i] {
            return Err(Error::InvalidGroup(format!("{p:?} is not a permutation")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Closure of `gens` under composition; `(a·b)(i) = a(b(i))`.
pub fn group_from_permutations(name: &str, gens: &[Vec<usize>], degree: usize, bound: usize) -> Result<FiniteGroup> {
    for g in gens {
        check_perm(g, degree)?;
    }
    let id: Vec<usize> = (0..degree).collect();
    let mut elems = vec![id.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let prod: Vec<usize> = elems[i].iter().map(|&j| g[j]).collect();
            if !index.contains_key(&prod) {
                if elems.len() == bound {
                    return Err(Error::ClosureTooLarge(bound));
                }
                index.insert(prod.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(prod);
            }
        }
    }
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[&b.iter().map(|&j| a[j]).collect::<Vec<_>>()]).collect())
        .collect();
    let mut g = FiniteGroup::from_table(name, table)?;
    g.perms = Some(elems);
    Ok(g)
}

impl FiniteGroup {
    /// Validates closure, identity `0`, inverses and associativity.
    pub fn from_table(name: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > DEFAULT_CLOSURE_BOUND {
            return Err(Error::InvalidGroup(format!("order {n} out of range")));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidGroup("table is not square over 0..n".into()));
            }
        }
        if (0..n).any(|a| table[0][a] != a || table[a][0] != a) {
            return Err(Error::InvalidGroup("0 is not the identity".into()));
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            let b = (0..n).find(|&b| table[a][b] == 0).ok_or_else(|| Error::InvalidGroup(format!("{a} has no inverse")))?;
            if table[b][a] != 0 {
                return Err(Error::InvalidGroup(format!("left and right inverse of {a} differ")));
            }
            inv[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(Self { name: name.to_string(), table, inv, perms: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn order(&self) -> usize {
        self.table.len()
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
    /// `g a g⁻¹`.
    pub fn conj(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv[g])
    }
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }
    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
    pub fn perm(&self, a: usize) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[a].as_slice())
    }
    pub fn find_perm(&self, perm: &[usize]) -> Option<usize> {
        self.perms.as_ref()?.iter().position(|q| q == perm)
    }
    pub fn is_abelian(&self) -> bool {
        is_abelian(self, &(0..self.order()).collect::<Vec<_>>())
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    pub fn center(&self) -> Vec<usize> {
        self.centralizer(&(0..self.order()).collect::<Vec<_>>())
    }

    /// Simultaneous centralizer of `xs`.
    pub fn centralizer(&self, xs: &[usize]) -> Vec<usize> {
        (0..self.order()).filter(|&g| xs.iter().all(|&x| self.commute(g, x))).collect()
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let mut mem = vec![false; self.order()];
        for &x in h {
            if x >= self.order() {
                return false;
            }
            mem[x] = true;
        }
        mem[0] && h.iter().all(|&a| h.iter().all(|&b| mem[self.mul(a, self.inv(b))]))
    }

    /// The subgroup `h` as a group in its own right (`0` stays the identity).
    pub fn restrict(&self, name: &str, h: &[usize]) -> Result<FiniteGroup> {
        if !self.is_subgroup(h) {
            return Err(Error::InvalidGroup("not a subgroup".into()));
        }
        let mut h: Vec<usize> = h.to_vec();
        h.sort_unstable();
        let pos: HashMap<usize, usize> = h.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table = h.iter().map(|&a| h.iter().map(|&b| pos[&self.mul(a, b)]).collect()).collect();
        let mut g = FiniteGroup::from_table(name, table)?;
        g.perms = self.perms.as_ref().map(|ps| h.iter().map(|&x| ps[x].clone()).collect());
        Ok(g)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "name": self.name, "order": self.order(), "abelian": self.is_abelian() })
    }
}

fn is_abelian(g: &FiniteGroup, xs: &[usize]) -> bool {
    xs.iter().all(|&a| xs.iter().all(|&b| g.commute(a, b)))
}

fn is_p_power(mut m: usize, p: usize) -> bool {
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

/// `(g₁,…,g_r)`, pairwise commuting, each of `p`-power order.
pub type CommutingTuple = Vec<usize>;

/// All ordered commuting `r`-tuples of `p`-power-order elements, in
/// lexicographic order.
pub fn commuting_p_tuples(g: &FiniteGroup, p: usize, r: usize) -> Vec<CommutingTuple> {
    let pel: Vec<usize> = (0..g.order()).filter(|&a| is_p_power(g.element_order(a), p)).collect();
    let mut out = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for t in &out {
            for &a in &pel {
                if t.iter().all(|&b| g.commute(a, b)) {
                    let mut s = t.clone();
                    s.push(a);
                    next.push(s);
                }
            }
        }
        out = next;
    }
    out
}

/// A conjugation orbit of commuting tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleClass {
    /// Lexicographically least member of the orbit.
    pub representative: CommutingTuple,
    pub orbit_size: usize,
    pub centralizer: Vec<usize>,
}

impl TupleClass {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "representative": self.representative,
            "orbit_size": self.orbit_size,
            "centralizer": self.centralizer,
            "centralizer_order": self.centralizer.len(),
        })
    }
}

fn conj_tuple(g: &FiniteGroup, h: usize, t: &[usize]) -> CommutingTuple {
    t.iter().map(|&a| g.conj(h, a)).collect()
}

/// Orbits of simultaneous conjugation on `commuting_p_tuples(g, p, r)`.
pub fn tuple_classes(g: &FiniteGroup, p: usize, r: usize) -> Vec<TupleClass> {
    let tuples = commuting_p_tuples(g, p, r);
    let mut done: BTreeMap<CommutingTuple, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for t in &tuples {
        if done.contains_key(t) {
            continue;
        }
        let mut orbit: Vec<CommutingTuple> = (0..g.order()).map(|h| conj_tuple(g, h, t)).collect();
        orbit.sort();
        orbit.dedup();
        for o in &orbit {
            done.insert(o.clone(), ());
        }
        out.push(TupleClass { representative: t.clone(), orbit_size: orbit.len(), centralizer: g.centralizer(t) });
    }
    out
}

/// `Fix(G/H) = ∐_α (G/H)^{im α}` as a `G`-set of pairs `(α, coset)`.
#[derive(Clone, Debug)]
pub struct FixSpace {
    /// Left cosets `gH`, each sorted; indexed by position.
    pub cosets: Vec<Vec<usize>>,
    /// Per tuple `α`, the cosets it fixes.
    pub components: Vec<(CommutingTuple, Vec<usize>)>,
}

impl FixSpace {
    pub fn objects(&self) -> Vec<(usize, usize)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, (_, cs))| cs.iter().map(move |&c| (i, c)))
            .collect()
    }
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "cosets": self.cosets,
            "components": self.components.iter().map(|(t, cs)| json!({"tuple": t, "fixed_cosets": cs})).collect::<Vec<_>>(),
            "objects": self.objects().len(),
        })
    }
}

fn left_cosets(g: &FiniteGroup, h: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut which = vec![usize::MAX; g.order()];
    let mut cosets = Vec::new();
    for x in 0..g.order() {
        if which[x] != usize::MAX {
            continue;
        }
        let mut c: Vec<usize> = h.iter().map(|&y| g.mul(x, y)).collect();
        c.sort_unstable();
        for &y in &c {
            which[y] = cosets.len();
        }
        cosets.push(c);
    }
    (cosets, which)
}

pub fn fix_coset_space(g: &FiniteGroup, h: &[usize], p: usize, r: usize) -> Result<FixSpace> {
    if !g.is_subgroup(h) {
        return Err(Error::InvalidGroup("H is not a subgroup".into()));
    }
    let (cosets, _) = left_cosets(g, h);
    let mut in_h = vec![false; g.order()];
    for &x in h {
        in_h[x] = true;
    }
    let components = commuting_p_tuples(g, p, r)
        .into_iter()
        .map(|t| {
            // a·xH = xH  ⇔  x⁻¹ a x ∈ H
            let fixed: Vec<usize> = cosets
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    let x = c[0];
                    t.iter().all(|&a| in_h[g.conj(g.inv(x), a)])
                })
                .map(|(i, _)| i)
                .collect();
            (t, fixed)
        })
        .collect();
    Ok(FixSpace { cosets, components })
}

/// Orbit data of a `G`-set: stabilizer order per orbit, sorted.
fn orbit_stabilizers(order: usize, n: usize, act: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut size = 0;
        let mut stab = 0;
        let mut orbit = vec![false; n];
        for g in 0..order {
            let y = act(g, x);
            if y == x {
                stab += 1;
            }
            if !orbit[y] {
                orbit[y] = true;
                size += 1;
            }
        }
        debug_assert_eq!(size * stab, order);
        for (y, &o) in orbit.iter().enumerate() {
            if o {
                seen[y] = true;
            }
        }
        out.push(stab);
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionReport {
    pub matches: bool,
    /// Stabilizer orders of the `G`-orbits on `Fix^G(G/H)`.
    pub orbits_g: Vec<usize>,
    /// Stabilizer orders of the `H`-orbits on `Fix^H(*)`.
    pub orbits_h: Vec<usize>,
}

impl InductionReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "match": self.matches, "orbits_G": self.orbits_g, "orbits_H": self.orbits_h })
    }
}

/// Compares the action groupoids of `G` on `Fix^G(G/H)` and of `H` on
/// `Fix^H(*)` through their orbit/stabilizer-order multisets.
pub fn induction_check(g: &FiniteGroup, h: &[usize], p: usize, r: usize) -> Result<InductionReport> {
    if !is_abelian(g, h) {
        return Err(Error::InvalidGroup("H must be abelian".into()));
    }
    let fix = fix_coset_space(g, h, p, r)?;
    let (_, which) = left_cosets(g, h);
    let objs = fix.objects();
    let pos: HashMap<(CommutingTuple, usize), usize> =
        objs.iter().enumerate().map(|(i, &(a, c))| ((fix.components[a].0.clone(), c), i)).collect();
    let orbits_g = orbit_stabilizers(g.order(), objs.len(), |x, i| {
        let (a, c) = objs[i];
        let t = conj_tuple(g, x, &fix.components[a].0);
        let c2 = which[g.mul(x, fix.cosets[c][0])];
        pos[&(t, c2)]
    });
    let hg = g.restrict("H", h)?;
    let ht = commuting_p_tuples(&hg, p, r);
    let hpos: HashMap<CommutingTuple, usize> = ht.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let orbits_h = orbit_stabilizers(hg.order(), ht.len(), |x, i| hpos[&conj_tuple(&hg, x, &ht[i])]);
    Ok(InductionReport { matches: orbits_g == orbits_h, orbits_g, orbits_h })
}

/// One class of the decomposition, with the rank of the height-`t`
/// level-structure ring of its centralizer when that centralizer is abelian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRank {
    pub class: TupleClass,
    pub abelian: bool,
    pub rank: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunctionReport {
    pub classes: Vec<ClassRank>,
    /// Sum of ranks when every centralizer is abelian.
    pub total_rank: Option<u64>,
}

impl ClassFunctionReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "classes": self.classes.iter().map(|c| {
                let mut v = c.class.to_json();
                v["abelian"] = json!(c.abelian);
                v["rank"] = json!(c.rank);
                v
            }).collect::<Vec<_>>(),
            "total_rank": self.total_rank,
        })
    }
}

pub fn class_function_report(g: &FiniteGroup, p: usize, r: usize, t: u32) -> ClassFunctionReport {
    let classes: Vec<ClassRank> = tuple_classes(g, p, r)
        .into_iter()
        .map(|class| {
            let c = &class.centralizer;
            let abelian = is_abelian(g, c);
            let rank = abelian.then(|| {
                let sylow = c.iter().filter(|&&x| is_p_power(g.element_order(x), p)).count() as u64;
                sylow.pow(t)
            });
            ClassRank { class, abelian, rank }
        })
        .collect();
    let total_rank = classes.iter().map(|c| c.rank).sum();
    ClassFunctionReport { classes, total_rank }
}

/// Small groups used by tests, presets and the CLI.
pub mod corpus {
    use super::*;

    fn perm(name: &str, degree: usize, gens: &[&[usize]]) -> FiniteGroup {
        let gens: Vec<Vec<usize>> = gens.iter().map(|g| g.to_vec()).collect();
        group_from_permutations(name, &gens, degree, DEFAULT_CLOSURE_BOUND).expect("corpus group")
    }

    pub fn trivial() -> FiniteGroup {
        perm("1", 1, &[])
    }
    pub fn cyclic(n: usize) -> FiniteGroup {
        let g: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        perm(&format!("Z/{n}"), n, &[&g])
    }
    /// `Z/m × Z/n` acting on `m + n` points.
    pub fn cyclic_product(m: usize, n: usize) -> FiniteGroup {
        let a: Vec<usize> = (0..m + n).map(|i| if i < m { (i + 1) % m } else { i }).collect();
        let b: Vec<usize> = (0..m + n).map(|i| if i < m { i } else { m + (i - m + 1) % n }).collect();
        perm(&format!("Z/{m}xZ/{n}"), m + n, &[&a, &b])
    }
    pub fn symmetric3() -> FiniteGroup {
        perm("S3", 3, &[&[1, 0, 2], &[1, 2, 0]])
    }
    /// `D₄` on the vertices of a square: rotation `r`, reflection `s`.
    pub fn dihedral4() -> FiniteGroup {
        perm("D4", 4, &[&[1, 2, 3, 0], &[0, 3, 2, 1]])
    }
    /// `Q₈` by its left-regular action on `1, i, j, k, −1, −i, −j, −k`.
    pub fn quaternion() -> FiniteGroup {
        perm("Q8", 8, &[&[1, 4, 3, 6, 5, 0, 7, 2], &[2, 7, 4, 1, 6, 3, 0, 5]])
    }

    /// The bundled `(G, H ⊆ G abelian, p)` induction pairs.
    pub fn induction_pairs() -> Vec<(FiniteGroup, Vec<usize>, usize)> {
        let z4 = cyclic(4);
        let z2_in_z4 = z4.subgroup(&[z4.find_perm(&[2, 3, 0, 1]).unwrap()]);
        let s3 = symmetric3();
        let a3 = s3.subgroup(&[s3.find_perm(&[1, 2, 0]).unwrap()]);
        let d4 = dihedral4();
        let rot = d4.subgroup(&[d4.find_perm(&[1, 2, 3, 0]).unwrap()]);
        let klein = d4.subgroup(&[d4.find_perm(&[2, 3, 0, 1]).unwrap(), d4.find_perm(&[0, 3, 2, 1]).unwrap()]);
        let q8 = quaternion();
        let z = q8.center();
        vec![(z4, z2_in_z4, 2), (d4.clone(), rot, 2), (s3, a3, 3), (d4, klein, 2), (q8, z, 2)]
    }
}

#[cfg(test)]
mod tests {
    use super::corpus::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closure_orders() {
        assert_eq!(cyclic(2).order(), 2);
        assert_eq!(symmetric3().order(), 6);
        assert_eq!(quaternion().order(), 8);
        assert_eq!(dihedral4().order(), 8);
        assert!(!quaternion().is_abelian());
        assert_eq!(quaternion().center().len(), 2);
        let big: Vec<Vec<usize>> = vec![(1..8).chain([0]).collect(), [1, 0].into_iter().chain(2..8).collect()];
        assert_eq!(group_from_permutations("S8", &big, 8, 1024), Err(Error::ClosureTooLarge(1024)));
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table("Z/2", vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroup::from_table("bad", vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(group_from_permutations("x", &[vec![0, 0]], 2, 8).is_err());
        let json = r#"{"name":"Z/3","table":[[0,1,2],[1,2,0],[2,0,1]]}"#;
        let g: GroupInput = serde_json::from_str(json).unwrap();
        assert_eq!(g.build().unwrap().order(), 3);
        let json = r#"{"name":"S3","degree":3,"generators":[[1,0,2],[1,2,0]]}"#;
        let g: GroupInput = serde_json::from_str(json).unwrap();
        assert_eq!(g.build().unwrap().order(), 6);
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(commuting_p_tuples(&cyclic(2), 2, 1).len(), 2);
        assert_eq!(commuting_p_tuples(&symmetric3(), 2, 2).len(), 10);
        assert_eq!(commuting_p_tuples(&symmetric3(), 5, 1), vec![vec![0]]);
    }

    #[test]
    fn symmetric3_classes() {
        let g = symmetric3();
        let cl = tuple_classes(&g, 2, 2);
        let mut shape: Vec<(Vec<bool>, usize)> = cl
            .iter()
            .map(|c| (c.representative.iter().map(|&x| x != 0).collect(), c.centralizer.len()))
            .collect();
        shape.sort();
        assert_eq!(
            shape,
            vec![(vec![false, false], 6), (vec![false, true], 2), (vec![true, false], 2), (vec![true, true], 2)]
        );
    }

    #[test]
    fn coset_fixed_points() {
        let g = symmetric3();
        let a3 = g.subgroup(&[g.find_perm(&[1, 2, 0]).unwrap()]);
        assert_eq!(fix_coset_space(&g, &a3, 3, 1).unwrap().objects().len(), 6);
        let all: Vec<usize> = (0..6).collect();
        let fx = fix_coset_space(&g, &all, 2, 1).unwrap();
        assert_eq!(fx.objects().len(), fx.components.len());
        // a transposition fixes no coset of A₃
        let fx = fix_coset_space(&g, &a3, 2, 1).unwrap();
        assert!(fx.components.iter().all(|(t, cs)| t[0] == 0 || cs.is_empty()));
    }

    #[test]
    fn induction_pairs_match() {
        let g = symmetric3();
        let a3 = g.subgroup(&[g.find_perm(&[1, 2, 0]).unwrap()]);
        let rep = induction_check(&g, &a3, 3, 1).unwrap();
        assert_eq!(rep.orbits_g, vec![3, 3, 3]);
        assert!(rep.matches);
        for (g, h, p) in induction_pairs() {
            for r in 1..=2 {
                assert!(induction_check(&g, &h, p, r).unwrap().matches, "{} r={r}", g.name());
            }
        }
        let z4 = cyclic(4);
        assert!(induction_check(&z4, &(0..4).collect::<Vec<_>>(), 2, 1).unwrap().matches);
        assert!(induction_check(&g, &(0..6).collect::<Vec<_>>(), 2, 1).is_err());
    }

    #[test]
    fn class_function_ranks() {
        let rep = class_function_report(&symmetric3(), 2, 1, 1);
        assert_eq!(rep.classes.len(), 2);
        assert_eq!(rep.classes[0].rank, None);
        assert_eq!(rep.classes[1].rank, Some(2));
        assert_eq!(rep.total_rank, None);
        for g in [cyclic(2), cyclic(4), cyclic_product(2, 2)] {
            let n = g.order() as u64;
            assert_eq!(class_function_report(&g, 2, 1, 1).total_rank, Some(n * n));
            assert_eq!(class_function_report(&g, 2, 1, 0).total_rank, Some(n));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn orbit_sizes_and_projection(which in 0usize..6, p in prop::sample::select(vec![2usize, 3]), r in 1usize..3) {
            let g = [cyclic(4), symmetric3(), dihedral4(), quaternion(), cyclic_product(2, 2), cyclic(6)][which].clone();
            let tuples = commuting_p_tuples(&g, p, r);
            let classes = tuple_classes(&g, p, r);
            prop_assert_eq!(classes.iter().map(|c| c.orbit_size).sum::<usize>(), tuples.len());
            for c in &classes {
                prop_assert_eq!(c.orbit_size * c.centralizer.len(), g.order());
            }
            let longer = commuting_p_tuples(&g, p, r + 1);
            let mut proj: Vec<_> = longer.iter().map(|t| t[..r].to_vec()).collect();
            proj.dedup();
            prop_assert_eq!(proj, tuples.clone());
            if g.is_abelian() {
                let pp = (0..g.order()).filter(|&a| is_p_power(g.element_order(a), p)).count();
                prop_assert_eq!(tuples.len(), pp.pow(r as u32));
                prop_assert_eq!(classes.len(), tuples.len());
            }
        }
    }
}
