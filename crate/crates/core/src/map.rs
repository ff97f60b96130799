//! Functors between finite groupoids, natural isomorphisms, and the
//! property classifier (faithful, full, essentially surjective,
//! isofibration, equivalence, trivial fibration).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, MorId, ObjId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidMap {
    pub dom: Arc<Groupoid>,
    pub cod: Arc<Groupoid>,
    pub on_obj: Vec<ObjId>,
    pub on_mor: Vec<MorId>,
}

impl GroupoidMap {
    /// Builds a functor from tables without checking functoriality.
    pub fn new_unchecked(
        dom: Arc<Groupoid>,
        cod: Arc<Groupoid>,
        on_obj: Vec<ObjId>,
        on_mor: Vec<MorId>,
    ) -> GroupoidMap {
        GroupoidMap {
            dom,
            cod,
            on_obj,
            on_mor,
        }
    }

    pub fn new(
        dom: Arc<Groupoid>,
        cod: Arc<Groupoid>,
        on_obj: Vec<ObjId>,
        on_mor: Vec<MorId>,
    ) -> Result<GroupoidMap> {
        let f = GroupoidMap::new_unchecked(dom, cod, on_obj, on_mor);
        f.validate()?;
        Ok(f)
    }

    pub fn identity(g: Arc<Groupoid>) -> GroupoidMap {
        let on_obj = g.objects().collect();
        let on_mor = g.morphisms().collect();
        GroupoidMap::new_unchecked(g.clone(), g, on_obj, on_mor)
    }

    /// Unique functor to the terminal groupoid.
    pub fn to_terminal(g: Arc<Groupoid>, term: Arc<Groupoid>) -> GroupoidMap {
        let on_obj = vec![0; g.n_objects()];
        let on_mor = vec![term.identity(0); g.n_morphisms()];
        GroupoidMap::new_unchecked(g, term, on_obj, on_mor)
    }

    /// Constant functor at an object of the codomain.
    pub fn constant(dom: Arc<Groupoid>, cod: Arc<Groupoid>, at: ObjId) -> GroupoidMap {
        let on_obj = vec![at; dom.n_objects()];
        let on_mor = vec![cod.identity(at); dom.n_morphisms()];
        GroupoidMap::new_unchecked(dom, cod, on_obj, on_mor)
    }

    pub fn ob(&self, o: ObjId) -> ObjId {
        self.on_obj[o as usize]
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.on_mor[m as usize]
    }

    /// Checks functoriality (endpoints, identities, composition).
    pub fn validate(&self) -> Result<()> {
        if self.on_obj.len() != self.dom.n_objects() || self.on_mor.len() != self.dom.n_morphisms()
        {
            return Err(Error::InvalidFunctor("table length mismatch".into()));
        }
        for &o in &self.on_obj {
            if o as usize >= self.cod.n_objects() {
                return Err(Error::InvalidFunctor("object image out of range".into()));
            }
        }
        for m in self.dom.morphisms() {
            let im = self.mor(m);
            if im as usize >= self.cod.n_morphisms() {
                return Err(Error::InvalidFunctor("morphism image out of range".into()));
            }
            if self.cod.src(im) != self.ob(self.dom.src(m))
                || self.cod.tgt(im) != self.ob(self.dom.tgt(m))
            {
                return Err(Error::InvalidFunctor(format!(
                    "image of {} has wrong endpoints",
                    self.dom.mor_name(m)
                )));
            }
        }
        for o in self.dom.objects() {
            if self.mor(self.dom.identity(o)) != self.cod.identity(self.ob(o)) {
                return Err(Error::InvalidFunctor(format!(
                    "identity of {} not preserved",
                    self.dom.obj_name(o)
                )));
            }
        }
        for f in self.dom.morphisms() {
            for &g in self.dom.morphisms_from(self.dom.tgt(f)) {
                let gf = self.dom.compose(g, f).unwrap();
                if self.cod.compose(self.mor(g), self.mor(f)) != Some(self.mor(gf)) {
                    return Err(Error::InvalidFunctor(format!(
                        "composition not preserved on ({}, {})",
                        self.dom.mor_name(g),
                        self.dom.mor_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    /// self ∘ other; requires other.cod == self.dom.
    pub fn compose(&self, other: &GroupoidMap) -> GroupoidMap {
        debug_assert_eq!(
            other.cod.as_ref(),
            self.dom.as_ref(),
            "composition of non-composable functors"
        );
        let on_obj = other.on_obj.iter().map(|&o| self.ob(o)).collect();
        let on_mor = other.on_mor.iter().map(|&m| self.mor(m)).collect();
        GroupoidMap::new_unchecked(other.dom.clone(), self.cod.clone(), on_obj, on_mor)
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.cod.n_objects()];
        for &o in &self.on_obj {
            if seen[o as usize] {
                return false;
            }
            seen[o as usize] = true;
        }
        true
    }

    /// Inverse of an isomorphism of groupoids; fails if not bijective.
    pub fn invert_iso(&self) -> Result<GroupoidMap> {
        if self.dom.n_objects() != self.cod.n_objects()
            || self.dom.n_morphisms() != self.cod.n_morphisms()
        {
            return Err(Error::Precondition("functor is not an isomorphism".into()));
        }
        let mut on_obj = vec![u32::MAX; self.cod.n_objects()];
        for o in self.dom.objects() {
            let im = self.ob(o) as usize;
            if on_obj[im] != u32::MAX {
                return Err(Error::Precondition("functor is not an isomorphism".into()));
            }
            on_obj[im] = o;
        }
        let mut on_mor = vec![u32::MAX; self.cod.n_morphisms()];
        for m in self.dom.morphisms() {
            let im = self.mor(m) as usize;
            if on_mor[im] != u32::MAX {
                return Err(Error::Precondition("functor is not an isomorphism".into()));
            }
            on_mor[im] = m;
        }
        Ok(GroupoidMap::new_unchecked(
            self.cod.clone(),
            self.dom.clone(),
            on_obj,
            on_mor,
        ))
    }
}

impl Serialize for GroupoidMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dom: &'a Groupoid,
            cod: &'a Groupoid,
            on_objects: std::collections::BTreeMap<&'a str, &'a str>,
            on_morphisms: std::collections::BTreeMap<&'a str, &'a str>,
        }
        Repr {
            dom: &self.dom,
            cod: &self.cod,
            on_objects: self
                .dom
                .objects()
                .map(|o| (self.dom.obj_name(o), self.cod.obj_name(self.ob(o))))
                .collect(),
            on_morphisms: self
                .dom
                .morphisms()
                .map(|m| (self.dom.mor_name(m), self.cod.mor_name(self.mor(m))))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupoidMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        #[derive(Deserialize)]
        struct Repr {
            dom: Groupoid,
            cod: Groupoid,
            on_objects: HashMap<String, String>,
            on_morphisms: HashMap<String, String>,
        }
        let r = Repr::deserialize(d)?;
        let dom = Arc::new(r.dom);
        let cod = Arc::new(r.cod);
        let mut on_obj = vec![0; dom.n_objects()];
        for (k, v) in &r.on_objects {
            let o = dom
                .obj_by_name(k)
                .ok_or_else(|| D::Error::custom(format!("unknown object {k}")))?;
            on_obj[o as usize] = cod
                .obj_by_name(v)
                .ok_or_else(|| D::Error::custom(format!("unknown object {v}")))?;
        }
        let mut on_mor = vec![0; dom.n_morphisms()];
        for (k, v) in &r.on_morphisms {
            let m = dom
                .mor_by_name(k)
                .ok_or_else(|| D::Error::custom(format!("unknown morphism {k}")))?;
            on_mor[m as usize] = cod
                .mor_by_name(v)
                .ok_or_else(|| D::Error::custom(format!("unknown morphism {v}")))?;
        }
        GroupoidMap::new(dom, cod, on_obj, on_mor).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Full subgroupoid on the selected objects, with its inclusion.
pub fn full_subgroupoid(g: &Arc<Groupoid>, objs: &[ObjId]) -> (Arc<Groupoid>, GroupoidMap) {
    use crate::groupoid::GroupoidBuilder;
    let mut b = GroupoidBuilder::new();
    for &x in objs {
        b.add_object(g.obj_name(x).to_string());
    }
    let obj_of: HashMap<ObjId, ObjId> = objs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i as ObjId))
        .collect();
    let mut mors: Vec<MorId> = Vec::new();
    for &x in objs {
        for &m in g.morphisms_from(x) {
            if obj_of.contains_key(&g.tgt(m)) {
                b.add_morphism(g.mor_name(m).to_string(), obj_of[&x], obj_of[&g.tgt(m)]);
                mors.push(m);
            }
        }
    }
    let mor_of: HashMap<MorId, MorId> = mors
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i as MorId))
        .collect();
    for (i, &x) in objs.iter().enumerate() {
        b.set_identity(i as ObjId, mor_of[&g.identity(x)]);
    }
    for (i, &m1) in mors.iter().enumerate() {
        for &m2 in g.morphisms_from(g.tgt(m1)) {
            if let Some(&j) = mor_of.get(&m2) {
                b.set_comp(j, i as MorId, mor_of[&g.compose(m2, m1).unwrap()]);
            }
        }
    }
    let sub = Arc::new(b.finish_unchecked());
    let incl = GroupoidMap::new_unchecked(sub.clone(), g.clone(), objs.to_vec(), mors);
    (sub, incl)
}

/// Natural isomorphism between parallel functors; in a groupoid codomain
/// every natural transformation is invertible, so this is the only kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatIso {
    pub src: GroupoidMap,
    pub tgt: GroupoidMap,
    /// component[o] : src(o) → tgt(o) in the codomain
    pub component: Vec<MorId>,
}

impl NatIso {
    pub fn new(src: GroupoidMap, tgt: GroupoidMap, component: Vec<MorId>) -> Result<NatIso> {
        let eta = NatIso {
            src,
            tgt,
            component,
        };
        eta.validate()?;
        Ok(eta)
    }

    pub fn new_unchecked(src: GroupoidMap, tgt: GroupoidMap, component: Vec<MorId>) -> NatIso {
        NatIso {
            src,
            tgt,
            component,
        }
    }

    pub fn identity(f: GroupoidMap) -> NatIso {
        let component = f
            .dom
            .objects()
            .map(|o| f.cod.identity(f.ob(o)))
            .collect();
        NatIso {
            src: f.clone(),
            tgt: f,
            component,
        }
    }

    pub fn at(&self, o: ObjId) -> MorId {
        self.component[o as usize]
    }

    pub fn validate(&self) -> Result<()> {
        if self.src.dom.as_ref() != self.tgt.dom.as_ref()
            || self.src.cod.as_ref() != self.tgt.cod.as_ref()
        {
            return Err(Error::NotParallel("functors do not share domain and codomain".into()));
        }
        let d = &self.src.dom;
        let c = &self.src.cod;
        if self.component.len() != d.n_objects() {
            return Err(Error::InvalidNatIso("component count mismatch".into()));
        }
        for o in d.objects() {
            let eta = self.at(o);
            if c.src(eta) != self.src.ob(o) || c.tgt(eta) != self.tgt.ob(o) {
                return Err(Error::InvalidNatIso(format!(
                    "component at {} has wrong endpoints",
                    d.obj_name(o)
                )));
            }
        }
        for m in d.morphisms() {
            let (a, b) = (d.src(m), d.tgt(m));
            let lhs = c.compose(self.at(b), self.src.mor(m)).unwrap();
            let rhs = c.compose(self.tgt.mor(m), self.at(a)).unwrap();
            if lhs != rhs {
                return Err(Error::InvalidNatIso(format!(
                    "naturality fails at {}",
                    d.mor_name(m)
                )));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> NatIso {
        let c = &self.src.cod;
        let component = self.component.iter().map(|&m| c.inverse(m)).collect();
        NatIso {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            component,
        }
    }

    /// Vertical composite self • other (other first).
    pub fn vcompose(&self, other: &NatIso) -> NatIso {
        debug_assert_eq!(other.tgt, self.src);
        let c = &self.src.cod;
        let component = self
            .component
            .iter()
            .zip(&other.component)
            .map(|(&b, &a)| c.compose(b, a).unwrap())
            .collect();
        NatIso {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            component,
        }
    }

    /// Whisker on the left with h: cod → c' (h ⋆ self).
    pub fn whisker_left(&self, h: &GroupoidMap) -> NatIso {
        let component = self.component.iter().map(|&m| h.mor(m)).collect();
        NatIso {
            src: h.compose(&self.src),
            tgt: h.compose(&self.tgt),
            component,
        }
    }

    /// Whisker on the right with h: d' → dom (self ⋆ h).
    pub fn whisker_right(&self, h: &GroupoidMap) -> NatIso {
        let component = h.on_obj.iter().map(|&o| self.at(o)).collect();
        NatIso {
            src: self.src.compose(h),
            tgt: self.tgt.compose(h),
            component,
        }
    }
}

/// Property profile of a functor between finite groupoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorProfile {
    pub faithful: bool,
    pub full: bool,
    pub essentially_surjective: bool,
    pub isofibration: bool,
    pub injective_on_objects: bool,
}

impl FunctorProfile {
    pub fn fully_faithful(&self) -> bool {
        self.faithful && self.full
    }

    pub fn is_equivalence(&self) -> bool {
        self.fully_faithful() && self.essentially_surjective
    }

    /// Surjective-on-objects fully faithful functor; equivalently an
    /// isofibration that is an equivalence.
    pub fn is_trivial_fibration(&self) -> bool {
        self.is_equivalence() && self.isofibration
    }
}

/// Computes the full property profile of a functor by enumeration.
pub fn functor_classify(f: &GroupoidMap) -> FunctorProfile {
    let d = &f.dom;
    let c = &f.cod;
    // faithful and full, hom-set by hom-set
    let mut faithful = true;
    let mut full = true;
    'pairs: for a in d.objects() {
        for b in d.objects() {
            let hom = d.hom(a, b);
            let mut images: HashMap<MorId, usize> = HashMap::new();
            for &m in &hom {
                *images.entry(f.mor(m)).or_insert(0) += 1;
            }
            if images.values().any(|&k| k > 1) {
                faithful = false;
            }
            let target = c.hom(f.ob(a), f.ob(b));
            if target.iter().any(|m| !images.contains_key(m)) {
                full = false;
            }
            if !faithful && !full {
                break 'pairs;
            }
        }
    }
    // essential surjectivity: image must meet every component of the codomain
    let comps = c.components();
    let n_comps = comps.iter().copied().max().map_or(0, |m| m + 1);
    let mut hit = vec![false; n_comps];
    for &o in &f.on_obj {
        hit[comps[o as usize]] = true;
    }
    let essentially_surjective = hit.iter().all(|&h| h);
    // isofibration: every morphism of the codomain starting at an image
    // object lifts to a morphism starting at the given preimage
    let mut isofibration = true;
    'fib: for e in d.objects() {
        let lifted_targets: std::collections::HashSet<MorId> = d
            .morphisms_from(e)
            .iter()
            .map(|&m| f.mor(m))
            .collect();
        for &u in c.morphisms_from(f.ob(e)) {
            if !lifted_targets.contains(&u) {
                isofibration = false;
                break 'fib;
            }
        }
    }
    FunctorProfile {
        faithful,
        full,
        essentially_surjective,
        isofibration,
        injective_on_objects: f.is_injective_on_objects(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{codiscrete, delooping, discrete, terminal, GroupTable};

    #[test]
    fn identity_is_trivial_fibration() {
        let g = Arc::new(codiscrete(3));
        let id = GroupoidMap::identity(g);
        id.validate().unwrap();
        let p = functor_classify(&id);
        assert!(p.is_trivial_fibration());
        assert!(p.injective_on_objects);
    }

    #[test]
    fn codiscrete_to_terminal_is_trivial_fibration_not_injective() {
        let g = Arc::new(codiscrete(2));
        let t = Arc::new(terminal());
        let f = GroupoidMap::to_terminal(g, t);
        f.validate().unwrap();
        let p = functor_classify(&f);
        assert!(p.is_trivial_fibration());
        assert!(!p.injective_on_objects);
    }

    #[test]
    fn discrete_two_to_terminal_eso_not_ff() {
        let g = Arc::new(discrete(2));
        let t = Arc::new(terminal());
        let f = GroupoidMap::to_terminal(g, t);
        let p = functor_classify(&f);
        assert!(p.faithful);
        assert!(!p.full);
        assert!(p.essentially_surjective);
        assert!(p.isofibration);
    }

    #[test]
    fn bz2_to_terminal_full_not_faithful() {
        let g = Arc::new(delooping(&GroupTable::cyclic(2)));
        let t = Arc::new(terminal());
        let f = GroupoidMap::to_terminal(g, t);
        let p = functor_classify(&f);
        assert!(!p.faithful);
        assert!(p.full);
        assert!(p.essentially_surjective);
        assert!(p.isofibration);
        assert!(!p.is_equivalence());
    }

    #[test]
    fn point_into_codiscrete_equivalence_not_isofibration() {
        let t = Arc::new(terminal());
        let c = Arc::new(codiscrete(2));
        let f = GroupoidMap::constant(t, c.clone(), 0);
        f.validate().unwrap();
        let p = functor_classify(&f);
        assert!(p.is_equivalence());
        assert!(!p.isofibration);
        assert!(!p.is_trivial_fibration());
    }

    #[test]
    fn point_into_discrete_two_not_eso() {
        let t = Arc::new(terminal());
        let d = Arc::new(discrete(2));
        let f = GroupoidMap::constant(t, d, 0);
        let p = functor_classify(&f);
        assert!(p.fully_faithful());
        assert!(!p.essentially_surjective);
    }

    #[test]
    fn nat_iso_validation() {
        // two constant functors 1 → codiscrete(2) are naturally isomorphic
        let t = Arc::new(terminal());
        let c = Arc::new(codiscrete(2));
        let f = GroupoidMap::constant(t.clone(), c.clone(), 0);
        let g = GroupoidMap::constant(t, c.clone(), 1);
        let m01 = c.hom(0, 1)[0];
        let eta = NatIso::new(f.clone(), g.clone(), vec![m01]).unwrap();
        let back = eta.inverse();
        back.validate().unwrap();
        let round = back.vcompose(&eta);
        assert_eq!(round.component, vec![c.identity(0)]);
        let _ = g;
        let _ = f;
    }
}
