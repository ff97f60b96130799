//! Finite groupoids as explicit object/morphism/composition tables.
//!
//! Identifiers are opaque strings; all equality is identifier equality.
//! Derived constructions generate their own identifiers, so equivalence
//! (not isomorphism) is the semantic comparison between groupoids.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type ObjId = u32;
pub type MorId = u32;

#[derive(Clone, PartialEq, Eq)]
pub struct Groupoid {
    pub(crate) obj_names: Vec<String>,
    pub(crate) mor_names: Vec<String>,
    pub(crate) src: Vec<ObjId>,
    pub(crate) tgt: Vec<ObjId>,
    /// identity morphism per object
    pub(crate) identity: Vec<MorId>,
    /// comp[(g, f)] = g ∘ f, defined exactly when tgt(f) = src(g)
    pub(crate) comp: HashMap<(MorId, MorId), MorId>,
    pub(crate) inv: Vec<MorId>,
    /// morphisms grouped by source object, in id order
    pub(crate) out: Vec<Vec<MorId>>,
}

impl fmt::Debug for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Groupoid({} objects, {} morphisms)",
            self.obj_names.len(),
            self.mor_names.len()
        )
    }
}

impl Groupoid {
    /// Assembles a groupoid from raw tables without checking the axioms.
    /// Internal constructions are correct by construction; user input goes
    /// through [`Groupoid::validate`].
    pub fn from_tables_unchecked(
        obj_names: Vec<String>,
        mor_names: Vec<String>,
        src: Vec<ObjId>,
        tgt: Vec<ObjId>,
        identity: Vec<MorId>,
        comp: HashMap<(MorId, MorId), MorId>,
        inv: Vec<MorId>,
    ) -> Groupoid {
        let mut out = vec![Vec::new(); obj_names.len()];
        for (m, &s) in src.iter().enumerate() {
            out[s as usize].push(m as MorId);
        }
        Groupoid {
            obj_names,
            mor_names,
            src,
            tgt,
            identity,
            comp,
            inv,
            out,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.obj_names.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.mor_names.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.obj_names.len() as ObjId
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        0..self.mor_names.len() as MorId
    }

    pub fn obj_name(&self, o: ObjId) -> &str {
        &self.obj_names[o as usize]
    }

    pub fn mor_name(&self, m: MorId) -> &str {
        &self.mor_names[m as usize]
    }

    pub fn obj_by_name(&self, name: &str) -> Option<ObjId> {
        self.obj_names.iter().position(|n| n == name).map(|i| i as ObjId)
    }

    pub fn mor_by_name(&self, name: &str) -> Option<MorId> {
        self.mor_names.iter().position(|n| n == name).map(|i| i as MorId)
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.src[m as usize]
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        self.tgt[m as usize]
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identity[o as usize]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.src(m) as usize] == m
    }

    /// g ∘ f, when tgt(f) = src(g).
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.comp.get(&(g, f)).copied()
    }

    pub fn inverse(&self, m: MorId) -> MorId {
        self.inv[m as usize]
    }

    pub fn morphisms_from(&self, o: ObjId) -> &[MorId] {
        &self.out[o as usize]
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> Vec<MorId> {
        self.out[a as usize]
            .iter()
            .copied()
            .filter(|&m| self.tgt(m) == b)
            .collect()
    }

    /// Connected components (= isomorphism classes of objects), as a
    /// component index per object.
    pub fn components(&self) -> Vec<usize> {
        let n = self.n_objects();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            let mut stack = vec![start as ObjId];
            while let Some(o) = stack.pop() {
                for &m in self.morphisms_from(o) {
                    let t = self.tgt(m) as usize;
                    if comp[t] == usize::MAX {
                        comp[t] = next;
                        stack.push(t as ObjId);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Checks every groupoid axiom by finite enumeration; the report lists
    /// each violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n_obj = self.n_objects() as ObjId;
        let n_mor = self.n_morphisms() as MorId;
        // well-formed indices
        for m in self.morphisms() {
            if self.src(m) >= n_obj || self.tgt(m) >= n_obj {
                report.push(format!("morphism {} has out-of-range endpoints", self.mor_name(m)));
            }
        }
        for o in self.objects() {
            let e = self.identity(o);
            if e >= n_mor {
                report.push(format!("identity of {} out of range", self.obj_name(o)));
                continue;
            }
            if self.src(e) != o || self.tgt(e) != o {
                report.push(format!(
                    "identity {} of {} is not an endomorphism",
                    self.mor_name(e),
                    self.obj_name(o)
                ));
            }
        }
        // composition defined exactly on composable pairs, with correct endpoints
        for g in self.morphisms() {
            for f in self.morphisms() {
                let composable = self.tgt(f) == self.src(g);
                match self.compose(g, f) {
                    Some(h) => {
                        if !composable {
                            report.push(format!(
                                "compose({}, {}) defined on a non-composable pair",
                                self.mor_name(g),
                                self.mor_name(f)
                            ));
                        } else if self.src(h) != self.src(f) || self.tgt(h) != self.tgt(g) {
                            report.push(format!(
                                "compose({}, {}) = {} has wrong endpoints",
                                self.mor_name(g),
                                self.mor_name(f),
                                self.mor_name(h)
                            ));
                        }
                    }
                    None => {
                        if composable {
                            report.push(format!(
                                "compose({}, {}) undefined on a composable pair",
                                self.mor_name(g),
                                self.mor_name(f)
                            ));
                        }
                    }
                }
            }
        }
        if !report.is_empty() {
            // endpoint errors make the remaining law checks meaningless
            return report;
        }
        // identity laws
        for m in self.morphisms() {
            let es = self.identity(self.src(m));
            let et = self.identity(self.tgt(m));
            if self.compose(m, es) != Some(m) {
                report.push(format!("identity law fails: {} ∘ id", self.mor_name(m)));
            }
            if self.compose(et, m) != Some(m) {
                report.push(format!("identity law fails: id ∘ {}", self.mor_name(m)));
            }
        }
        // associativity on all composable triples
        for f in self.morphisms() {
            for &g in self.morphisms_from(self.tgt(f)) {
                let gf = self.compose(g, f).unwrap();
                for &h in self.morphisms_from(self.tgt(g)) {
                    let hg = self.compose(h, g).unwrap();
                    if self.compose(h, gf) != self.compose(hg, f) {
                        report.push(format!(
                            "associativity fails on triple ({}, {}, {})",
                            self.mor_name(h),
                            self.mor_name(g),
                            self.mor_name(f)
                        ));
                    }
                }
            }
        }
        // inverse laws
        for m in self.morphisms() {
            let i = self.inverse(m);
            if self.src(i) != self.tgt(m) || self.tgt(i) != self.src(m) {
                report.push(format!("inverse of {} has wrong endpoints", self.mor_name(m)));
                continue;
            }
            if self.compose(i, m) != Some(self.identity(self.src(m)))
                || self.compose(m, i) != Some(self.identity(self.tgt(m)))
            {
                report.push(format!("inverse law fails for {}", self.mor_name(m)));
            }
        }
        report
    }

    /// Checks whether `obj_map`/`mor_map` define an isomorphism of groupoids
    /// onto `other` (bijective functor).
    pub fn isomorphic_via(&self, other: &Groupoid, obj_map: &[ObjId], mor_map: &[MorId]) -> bool {
        if self.n_objects() != other.n_objects() || self.n_morphisms() != other.n_morphisms() {
            return false;
        }
        let mut seen_o = vec![false; other.n_objects()];
        for &o in obj_map {
            if o as usize >= seen_o.len() || seen_o[o as usize] {
                return false;
            }
            seen_o[o as usize] = true;
        }
        let mut seen_m = vec![false; other.n_morphisms()];
        for &m in mor_map {
            if m as usize >= seen_m.len() || seen_m[m as usize] {
                return false;
            }
            seen_m[m as usize] = true;
        }
        for m in self.morphisms() {
            let im = mor_map[m as usize];
            if other.src(im) != obj_map[self.src(m) as usize]
                || other.tgt(im) != obj_map[self.tgt(m) as usize]
            {
                return false;
            }
        }
        for o in self.objects() {
            if mor_map[self.identity(o) as usize] != other.identity(obj_map[o as usize]) {
                return false;
            }
        }
        for f in self.morphisms() {
            for &g in self.morphisms_from(self.tgt(f)) {
                let gf = self.compose(g, f).unwrap();
                let igf = other.compose(mor_map[g as usize], mor_map[f as usize]);
                if igf != Some(mor_map[gf as usize]) {
                    return false;
                }
            }
        }
        true
    }

    /// Brute-force isomorphism search; only sensible for small groupoids.
    pub fn find_isomorphism(&self, other: &Groupoid) -> Option<(Vec<ObjId>, Vec<MorId>)> {
        if self.n_objects() != other.n_objects() || self.n_morphisms() != other.n_morphisms() {
            return None;
        }
        let n = self.n_objects();
        let mut obj_map: Vec<Option<ObjId>> = vec![None; n];
        let mut used = vec![false; n];
        fn assign(
            a: &Groupoid,
            b: &Groupoid,
            i: usize,
            obj_map: &mut Vec<Option<ObjId>>,
            used: &mut Vec<bool>,
        ) -> Option<(Vec<ObjId>, Vec<MorId>)> {
            if i == a.n_objects() {
                let om: Vec<ObjId> = obj_map.iter().map(|o| o.unwrap()).collect();
                return extend_to_morphisms(a, b, &om);
            }
            for cand in b.objects() {
                if used[cand as usize] {
                    continue;
                }
                if a.hom(i as ObjId, i as ObjId).len() != b.hom(cand, cand).len() {
                    continue;
                }
                obj_map[i] = Some(cand);
                used[cand as usize] = true;
                if let Some(found) = assign(a, b, i + 1, obj_map, used) {
                    return Some(found);
                }
                obj_map[i] = None;
                used[cand as usize] = false;
            }
            None
        }
        fn extend_to_morphisms(
            a: &Groupoid,
            b: &Groupoid,
            om: &[ObjId],
        ) -> Option<(Vec<ObjId>, Vec<MorId>)> {
            // backtrack over morphism assignments
            let mut mm: Vec<Option<MorId>> = vec![None; a.n_morphisms()];
            let mut used = vec![false; b.n_morphisms()];
            for o in a.objects() {
                let e = a.identity(o);
                let ie = b.identity(om[o as usize]);
                mm[e as usize] = Some(ie);
                if used[ie as usize] {
                    return None;
                }
                used[ie as usize] = true;
            }
            fn rec(
                a: &Groupoid,
                b: &Groupoid,
                om: &[ObjId],
                m: usize,
                mm: &mut Vec<Option<MorId>>,
                used: &mut Vec<bool>,
            ) -> bool {
                if m == a.n_morphisms() {
                    return true;
                }
                if mm[m].is_some() {
                    return rec(a, b, om, m + 1, mm, used);
                }
                let s = om[a.src(m as MorId) as usize];
                let t = om[a.tgt(m as MorId) as usize];
                for cand in b.hom(s, t) {
                    if used[cand as usize] {
                        continue;
                    }
                    // consistency with already-assigned composites
                    let mut ok = true;
                    'check: for f in 0..a.n_morphisms() {
                        let (fa, fb) = match mm[f] {
                            Some(x) => (f as MorId, x),
                            None => continue,
                        };
                        for (g, h) in [(m as MorId, fa), (fa, m as MorId)] {
                            let (gb, hb) = if g == m as MorId { (cand, fb) } else { (fb, cand) };
                            if let Some(c) = a.compose(g, h) {
                                if let Some(cb) = mm[c as usize] {
                                    if b.compose(gb, hb) != Some(cb) {
                                        ok = false;
                                        break 'check;
                                    }
                                } else if b.compose(gb, hb).is_none() {
                                    ok = false;
                                    break 'check;
                                }
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    mm[m] = Some(cand);
                    used[cand as usize] = true;
                    if rec(a, b, om, m + 1, mm, used) {
                        return true;
                    }
                    mm[m] = None;
                    used[cand as usize] = false;
                }
                false
            }
            if rec(a, b, om, 0, &mut mm, &mut used) {
                let mmv: Vec<MorId> = mm.iter().map(|m| m.unwrap()).collect();
                if a.isomorphic_via(b, om, &mmv) {
                    return Some((om.to_vec(), mmv));
                }
            }
            None
        }
        assign(self, other, 0, &mut obj_map, &mut used)
    }
}

/// List of violated axioms; empty means the groupoid is valid.
#[derive(Debug, Default, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn push(&mut self, v: String) {
        self.violations.push(v);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGroupoid(self.violations.join("; ")))
        }
    }
}

/// Incremental construction helper used by the standard builders, the DSL
/// and the derived-groupoid constructions.
#[derive(Default)]
pub struct GroupoidBuilder {
    obj_names: Vec<String>,
    obj_index: HashMap<String, ObjId>,
    mor_names: Vec<String>,
    mor_index: HashMap<String, MorId>,
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    identity: HashMap<ObjId, MorId>,
    comp: HashMap<(MorId, MorId), MorId>,
}

impl GroupoidBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> ObjId {
        let name = name.into();
        if let Some(&o) = self.obj_index.get(&name) {
            return o;
        }
        let o = self.obj_names.len() as ObjId;
        self.obj_index.insert(name.clone(), o);
        self.obj_names.push(name);
        o
    }

    pub fn add_morphism(&mut self, name: impl Into<String>, src: ObjId, tgt: ObjId) -> MorId {
        let name = name.into();
        if let Some(&m) = self.mor_index.get(&name) {
            return m;
        }
        let m = self.mor_names.len() as MorId;
        self.mor_index.insert(name.clone(), m);
        self.mor_names.push(name);
        self.src.push(src);
        self.tgt.push(tgt);
        m
    }

    pub fn set_identity(&mut self, o: ObjId, m: MorId) {
        self.identity.insert(o, m);
    }

    pub fn set_comp(&mut self, g: MorId, f: MorId, gf: MorId) {
        self.comp.insert((g, f), gf);
    }

    pub fn obj(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn mor(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    pub fn n_objects(&self) -> usize {
        self.obj_names.len()
    }

    /// Completes the tables (inferring inverses from the composition table)
    /// and validates the result.
    pub fn finish(self) -> Result<Groupoid> {
        let n_mor = self.mor_names.len();
        let mut identity = Vec::with_capacity(self.obj_names.len());
        for o in 0..self.obj_names.len() as ObjId {
            match self.identity.get(&o) {
                Some(&m) => identity.push(m),
                None => {
                    return Err(Error::InvalidGroupoid(format!(
                        "no identity declared for object {}",
                        self.obj_names[o as usize]
                    )))
                }
            }
        }
        // infer inverses: m⁻¹ is the unique f with f∘m = id_src and m∘f = id_tgt
        let mut inv = Vec::with_capacity(n_mor);
        for m in 0..n_mor as MorId {
            let s = self.src[m as usize];
            let t = self.tgt[m as usize];
            let found = (0..n_mor as MorId).find(|&f| {
                self.src[f as usize] == t
                    && self.tgt[f as usize] == s
                    && self.comp.get(&(f, m)) == Some(&identity[s as usize])
                    && self.comp.get(&(m, f)) == Some(&identity[t as usize])
            });
            match found {
                Some(f) => inv.push(f),
                None => {
                    return Err(Error::InvalidGroupoid(format!(
                        "morphism {} has no two-sided inverse",
                        self.mor_names[m as usize]
                    )))
                }
            }
        }
        let g = Groupoid::from_tables_unchecked(
            self.obj_names,
            self.mor_names,
            self.src,
            self.tgt,
            identity,
            self.comp,
            inv,
        );
        g.validate().into_result()?;
        Ok(g)
    }

    /// Like [`GroupoidBuilder::finish`] but skips validation; for derived
    /// constructions that are correct by construction.
    pub fn finish_unchecked(self) -> Groupoid {
        let mut identity = Vec::with_capacity(self.obj_names.len());
        for o in 0..self.obj_names.len() as ObjId {
            identity.push(self.identity[&o]);
        }
        let n_mor = self.mor_names.len();
        // bucket by (src, tgt) so the inverse search is local to a hom set
        let mut by_ends: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for m in 0..n_mor as MorId {
            by_ends
                .entry((self.src[m as usize], self.tgt[m as usize]))
                .or_default()
                .push(m);
        }
        let mut inv = vec![u32::MAX; n_mor];
        for m in 0..n_mor as MorId {
            let s = self.src[m as usize];
            let t = self.tgt[m as usize];
            if let Some(cands) = by_ends.get(&(t, s)) {
                for &f in cands {
                    if self.comp.get(&(f, m)) == Some(&identity[s as usize])
                        && self.comp.get(&(m, f)) == Some(&identity[t as usize])
                    {
                        inv[m as usize] = f;
                        break;
                    }
                }
            }
            debug_assert!(inv[m as usize] != u32::MAX, "morphism without inverse");
        }
        Groupoid::from_tables_unchecked(
            self.obj_names,
            self.mor_names,
            self.src,
            self.tgt,
            identity,
            self.comp,
            inv,
        )
    }

    /// Like [`GroupoidBuilder::finish_unchecked`] with the inverse table
    /// supplied by the caller.
    pub fn finish_unchecked_with_inverses(self, inv: Vec<MorId>) -> Groupoid {
        let mut identity = Vec::with_capacity(self.obj_names.len());
        for o in 0..self.obj_names.len() as ObjId {
            identity.push(self.identity[&o]);
        }
        Groupoid::from_tables_unchecked(
            self.obj_names,
            self.mor_names,
            self.src,
            self.tgt,
            identity,
            self.comp,
            inv,
        )
    }
}

// ---------------------------------------------------------------------------
// standard builders

/// Groupoid with n objects and only identity morphisms.
pub fn discrete(n: usize) -> Groupoid {
    let mut b = GroupoidBuilder::new();
    for i in 0..n {
        let o = b.add_object(format!("x{i}"));
        let e = b.add_morphism(format!("id_x{i}"), o, o);
        b.set_identity(o, e);
        b.set_comp(e, e, e);
    }
    b.finish_unchecked()
}

/// Chaotic groupoid: n objects, exactly one morphism between any ordered pair.
pub fn codiscrete(n: usize) -> Groupoid {
    let mut b = GroupoidBuilder::new();
    let objs: Vec<ObjId> = (0..n).map(|i| b.add_object(format!("x{i}"))).collect();
    let mut mor = vec![vec![0 as MorId; n]; n];
    for (i, &oi) in objs.iter().enumerate() {
        for (j, &oj) in objs.iter().enumerate() {
            mor[i][j] = b.add_morphism(format!("m{i}_{j}"), oi, oj);
        }
    }
    for (i, &oi) in objs.iter().enumerate() {
        b.set_identity(oi, mor[i][i]);
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // mor[j][k] ∘ mor[i][j] = mor[i][k]
                b.set_comp(mor[j][k], mor[i][j], mor[i][k]);
            }
        }
    }
    b.finish_unchecked()
}

pub fn terminal() -> Groupoid {
    discrete(1)
}

/// Multiplication table of a finite group; `table[i][j] = i * j`,
/// index 0 is the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub name: String,
    pub elem_names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn trivial() -> GroupTable {
        GroupTable {
            name: "Z1".into(),
            elem_names: vec!["e".into()],
            mul: vec![vec![0]],
        }
    }

    pub fn cyclic(n: usize) -> GroupTable {
        let elem_names = (0..n)
            .map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") })
            .collect();
        let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        GroupTable {
            name: format!("Z{n}"),
            elem_names,
            mul,
        }
    }

    /// Symmetric group on 3 letters, as permutation composition.
    pub fn s3() -> GroupTable {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
        ];
        let names = vec!["e", "r1", "r2", "s01", "s12", "s02"];
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p ∘ q)(x) = p(q(x))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let mul = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        let c = compose(p, q);
                        perms.iter().position(|r| *r == c).unwrap()
                    })
                    .collect()
            })
            .collect();
        GroupTable {
            name: "S3".into(),
            elem_names: names.into_iter().map(String::from).collect(),
            mul,
        }
    }
}

/// One-object groupoid with the given automorphism group.
pub fn delooping(g: &GroupTable) -> Groupoid {
    let mut b = GroupoidBuilder::new();
    let o = b.add_object(format!("b{}", g.name));
    let n = g.elem_names.len();
    let ms: Vec<MorId> = (0..n)
        .map(|i| b.add_morphism(g.elem_names[i].clone(), o, o))
        .collect();
    b.set_identity(o, ms[0]);
    for i in 0..n {
        for j in 0..n {
            // morphism composition g∘f where f applied first: table order mul[g][f]
            b.set_comp(ms[i], ms[j], ms[g.mul[i][j]]);
        }
    }
    b.finish_unchecked()
}

/// Disjoint union of groupoids; identifiers are prefixed per summand.
pub fn disjoint_union(parts: &[Arc<Groupoid>]) -> Groupoid {
    let mut b = GroupoidBuilder::new();
    for (k, g) in parts.iter().enumerate() {
        let obj_off: Vec<ObjId> = g
            .objects()
            .map(|o| b.add_object(format!("c{k}.{}", g.obj_name(o))))
            .collect();
        let mor_off: Vec<MorId> = g
            .morphisms()
            .map(|m| {
                b.add_morphism(
                    format!("c{k}.{}", g.mor_name(m)),
                    obj_off[g.src(m) as usize],
                    obj_off[g.tgt(m) as usize],
                )
            })
            .collect();
        for o in g.objects() {
            b.set_identity(obj_off[o as usize], mor_off[g.identity(o) as usize]);
        }
        for (&(x, y), &z) in &g.comp {
            b.set_comp(mor_off[x as usize], mor_off[y as usize], mor_off[z as usize]);
        }
    }
    b.finish_unchecked()
}

// ---------------------------------------------------------------------------
// JSON (stable field names: objects, morphisms, src, tgt, id, comp, inv)

impl Serialize for Groupoid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            objects: &'a [String],
            morphisms: &'a [String],
            src: std::collections::BTreeMap<&'a str, &'a str>,
            tgt: std::collections::BTreeMap<&'a str, &'a str>,
            id: std::collections::BTreeMap<&'a str, &'a str>,
            comp: Vec<[&'a str; 3]>,
            inv: std::collections::BTreeMap<&'a str, &'a str>,
        }
        let src = self
            .morphisms()
            .map(|m| (self.mor_name(m), self.obj_name(self.src(m))))
            .collect();
        let tgt = self
            .morphisms()
            .map(|m| (self.mor_name(m), self.obj_name(self.tgt(m))))
            .collect();
        let id = self
            .objects()
            .map(|o| (self.obj_name(o), self.mor_name(self.identity(o))))
            .collect();
        let mut comp: Vec<[&str; 3]> = self
            .comp
            .iter()
            .map(|(&(g, f), &h)| [self.mor_name(g), self.mor_name(f), self.mor_name(h)])
            .collect();
        comp.sort();
        let inv = self
            .morphisms()
            .map(|m| (self.mor_name(m), self.mor_name(self.inverse(m))))
            .collect();
        Repr {
            objects: &self.obj_names,
            morphisms: &self.mor_names,
            src,
            tgt,
            id,
            comp,
            inv,
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
struct GroupoidRepr {
    objects: Vec<String>,
    morphisms: Vec<String>,
    src: HashMap<String, String>,
    tgt: HashMap<String, String>,
    id: HashMap<String, String>,
    comp: Vec<[String; 3]>,
    inv: HashMap<String, String>,
}

impl<'de> Deserialize<'de> for Groupoid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let r = GroupoidRepr::deserialize(d)?;
        let oi: HashMap<&str, ObjId> = r
            .objects
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as ObjId))
            .collect();
        let mi: HashMap<&str, MorId> = r
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as MorId))
            .collect();
        let look_o = |n: &str| oi.get(n).copied().ok_or_else(|| D::Error::custom(format!("unknown object {n}")));
        let look_m = |n: &str| mi.get(n).copied().ok_or_else(|| D::Error::custom(format!("unknown morphism {n}")));
        let mut src = vec![0; r.morphisms.len()];
        let mut tgt = vec![0; r.morphisms.len()];
        for (m, n) in &r.src {
            src[look_m(m)? as usize] = look_o(n)?;
        }
        for (m, n) in &r.tgt {
            tgt[look_m(m)? as usize] = look_o(n)?;
        }
        let mut identity = vec![0; r.objects.len()];
        for (o, m) in &r.id {
            identity[look_o(o)? as usize] = look_m(m)?;
        }
        let mut comp = HashMap::new();
        for [g, f, h] in &r.comp {
            comp.insert((look_m(g)?, look_m(f)?), look_m(h)?);
        }
        let mut inv = vec![0; r.morphisms.len()];
        for (m, n) in &r.inv {
            inv[look_m(m)? as usize] = look_m(n)?;
        }
        let g = Groupoid::from_tables_unchecked(r.objects, r.morphisms, src, tgt, identity, comp, inv);
        g.validate()
            .into_result()
            .map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bz2_is_valid() {
        let g = delooping(&GroupTable::cyclic(2));
        assert!(g.validate().is_empty());
        assert_eq!(g.n_objects(), 1);
        assert_eq!(g.n_morphisms(), 2);
    }

    #[test]
    fn broken_bz2_reports_failure() {
        // t∘t = t breaks the inverse (and identity-cancellation) laws
        let mut b = GroupoidBuilder::new();
        let o = b.add_object("x");
        let e = b.add_morphism("id", o, o);
        let t = b.add_morphism("t", o, o);
        b.set_identity(o, e);
        b.set_comp(e, e, e);
        b.set_comp(e, t, t);
        b.set_comp(t, e, t);
        b.set_comp(t, t, t);
        assert!(b.finish().is_err());
    }

    #[test]
    fn codiscrete_is_valid() {
        let g = codiscrete(3);
        assert!(g.validate().is_empty());
        assert_eq!(g.n_morphisms(), 9);
    }

    #[test]
    fn s3_delooping_valid() {
        let g = delooping(&GroupTable::s3());
        assert!(g.validate().is_empty());
        assert_eq!(g.n_morphisms(), 6);
    }

    #[test]
    fn json_round_trip() {
        let g = delooping(&GroupTable::cyclic(3));
        let j = serde_json::to_string(&g).unwrap();
        let g2: Groupoid = serde_json::from_str(&j).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn iso_search_finds_relabeling() {
        let a = codiscrete(2);
        let mut b = GroupoidBuilder::new();
        let o1 = b.add_object("p");
        let o0 = b.add_object("q");
        let m = [[0; 2]; 2];
        let _ = m;
        let e1 = b.add_morphism("e1", o1, o1);
        let e0 = b.add_morphism("e0", o0, o0);
        let u = b.add_morphism("u", o0, o1);
        let v = b.add_morphism("v", o1, o0);
        b.set_identity(o1, e1);
        b.set_identity(o0, e0);
        for (g, f, h) in [
            (e1, e1, e1),
            (e0, e0, e0),
            (u, e0, u),
            (e1, u, u),
            (v, e1, v),
            (e0, v, v),
            (v, u, e0),
            (u, v, e1),
        ] {
            b.set_comp(g, f, h);
        }
        let c = b.finish().unwrap();
        assert!(a.find_isomorphism(&c).is_some());
    }
}
