//! Strict finite limits of groupoids: products, pullbacks, equalizers.
//! All constructions are on-the-nose (object and morphism tuples), not
//! up-to-equivalence replacements.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, GroupoidBuilder, MorId, ObjId};
use crate::map::GroupoidMap;

pub struct Span {
    pub apex: Arc<Groupoid>,
    pub left: GroupoidMap,
    pub right: GroupoidMap,
    /// apex object i is the pair obj_pairs[i] of (left, right) images
    pub obj_pairs: Vec<(ObjId, ObjId)>,
    pub mor_pairs: Vec<(MorId, MorId)>,
}

impl Span {
    pub fn obj_of(&self, l: ObjId, r: ObjId) -> Option<ObjId> {
        self.obj_pairs
            .iter()
            .position(|&p| p == (l, r))
            .map(|i| i as ObjId)
    }

    pub fn mor_of(&self, l: MorId, r: MorId) -> Option<MorId> {
        self.mor_pairs
            .iter()
            .position(|&p| p == (l, r))
            .map(|i| i as MorId)
    }

    /// The functor X → apex induced by a cone (f, g) with matching legs.
    pub fn induced(&self, f: &GroupoidMap, g: &GroupoidMap) -> Result<GroupoidMap> {
        if f.dom.as_ref() != g.dom.as_ref() {
            return Err(Error::NotParallel("cone legs have different domains".into()));
        }
        let mut on_obj = Vec::with_capacity(f.dom.n_objects());
        for o in f.dom.objects() {
            on_obj.push(self.obj_of(f.ob(o), g.ob(o)).ok_or_else(|| {
                Error::Precondition("cone legs do not agree over the cospan".into())
            })?);
        }
        let mut on_mor = Vec::with_capacity(f.dom.n_morphisms());
        for m in f.dom.morphisms() {
            on_mor.push(self.mor_of(f.mor(m), g.mor(m)).ok_or_else(|| {
                Error::Precondition("cone legs do not agree over the cospan".into())
            })?);
        }
        Ok(GroupoidMap::new_unchecked(
            f.dom.clone(),
            self.apex.clone(),
            on_obj,
            on_mor,
        ))
    }
}

/// Strict pullback A ×_C B of F: A → C and G: B → C.
/// Objects are pairs (a, b) with F(a) = G(b); similarly for morphisms.
pub fn pullback(f: &GroupoidMap, g: &GroupoidMap) -> Result<Span> {
    if f.cod.as_ref() != g.cod.as_ref() {
        return Err(Error::CodomainMismatch("pullback legs have different codomains".into()));
    }
    let a = &f.dom;
    let bg = &g.dom;
    let mut b = GroupoidBuilder::new();
    let mut obj_pairs: Vec<(ObjId, ObjId)> = Vec::new();
    for x in a.objects() {
        for y in bg.objects() {
            if f.ob(x) == g.ob(y) {
                let name = format!("({},{})", a.obj_name(x), bg.obj_name(y));
                b.add_object(name);
                obj_pairs.push((x, y));
            }
        }
    }
    let obj_idx: std::collections::HashMap<(ObjId, ObjId), ObjId> = obj_pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as ObjId))
        .collect();
    let obj_of = |x: ObjId, y: ObjId| -> ObjId { obj_idx[&(x, y)] };
    let mut mor_pairs: Vec<(MorId, MorId)> = Vec::new();
    for m in a.morphisms() {
        for n in bg.morphisms() {
            if f.mor(m) == g.mor(n) {
                let name = format!("({},{})", a.mor_name(m), bg.mor_name(n));
                let s = obj_of(a.src(m), bg.src(n));
                let t = obj_of(a.tgt(m), bg.tgt(n));
                b.add_morphism(name, s, t);
                mor_pairs.push((m, n));
            }
        }
    }
    let mor_idx: std::collections::HashMap<(MorId, MorId), MorId> = mor_pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as MorId))
        .collect();
    let mor_of = |m: MorId, n: MorId| -> MorId { mor_idx[&(m, n)] };
    for (i, &(x, y)) in obj_pairs.iter().enumerate() {
        b.set_identity(i as ObjId, mor_of(a.identity(x), bg.identity(y)));
    }
    // bucket morphisms by their source object in the apex so the
    // composition loop touches only composable pairs
    let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); obj_pairs.len()];
    for (i, &(m, n)) in mor_pairs.iter().enumerate() {
        by_src[obj_of(a.src(m), bg.src(n)) as usize].push(i);
    }
    for (j, &(m2, n2)) in mor_pairs.iter().enumerate() {
        let t = obj_of(a.tgt(m2), bg.tgt(n2));
        for &i in &by_src[t as usize] {
            let (m1, n1) = mor_pairs[i];
            let cm = a.compose(m1, m2).unwrap();
            let cn = bg.compose(n1, n2).unwrap();
            b.set_comp(i as MorId, j as MorId, mor_of(cm, cn));
        }
    }
    let apex = Arc::new(b.finish_unchecked());
    let left = GroupoidMap::new_unchecked(
        apex.clone(),
        f.dom.clone(),
        obj_pairs.iter().map(|&(x, _)| x).collect(),
        mor_pairs.iter().map(|&(m, _)| m).collect(),
    );
    let right = GroupoidMap::new_unchecked(
        apex.clone(),
        g.dom.clone(),
        obj_pairs.iter().map(|&(_, y)| y).collect(),
        mor_pairs.iter().map(|&(_, n)| n).collect(),
    );
    Ok(Span {
        apex,
        left,
        right,
        obj_pairs,
        mor_pairs,
    })
}

/// Binary product with its projections.
pub fn product(a: Arc<Groupoid>, c: Arc<Groupoid>) -> Span {
    let term = Arc::new(crate::groupoid::terminal());
    let f = GroupoidMap::to_terminal(a, term.clone());
    let g = GroupoidMap::to_terminal(c, term);
    pullback(&f, &g).expect("product via pullback over the point")
}

/// Strict equalizer of parallel functors: the full subgroupoid of objects
/// and morphisms on which F and G agree.
pub fn equalizer(f: &GroupoidMap, g: &GroupoidMap) -> Result<(Arc<Groupoid>, GroupoidMap)> {
    if f.dom.as_ref() != g.dom.as_ref() || f.cod.as_ref() != g.cod.as_ref() {
        return Err(Error::NotParallel("functors do not share domain and codomain".into()));
    }
    let d = &f.dom;
    let mut b = GroupoidBuilder::new();
    let mut objs: Vec<ObjId> = Vec::new();
    for x in d.objects() {
        if f.ob(x) == g.ob(x) {
            b.add_object(d.obj_name(x).to_string());
            objs.push(x);
        }
    }
    let obj_of = |x: ObjId| objs.iter().position(|&p| p == x).map(|i| i as ObjId);
    let mut mors: Vec<MorId> = Vec::new();
    for m in d.morphisms() {
        if f.mor(m) == g.mor(m) {
            let (Some(s), Some(t)) = (obj_of(d.src(m)), obj_of(d.tgt(m))) else {
                continue;
            };
            b.add_morphism(d.mor_name(m).to_string(), s, t);
            mors.push(m);
        }
    }
    let mor_of = |m: MorId| mors.iter().position(|&p| p == m).map(|i| i as MorId);
    for (i, &x) in objs.iter().enumerate() {
        let e = mor_of(d.identity(x)).ok_or_else(|| {
            Error::InvalidGroupoid("equalizer does not contain an identity".into())
        })?;
        b.set_identity(i as ObjId, e);
    }
    for (i, &m1) in mors.iter().enumerate() {
        for (j, &m2) in mors.iter().enumerate() {
            if d.tgt(m2) == d.src(m1) {
                // composites of agreeing morphisms agree
                let c = mor_of(d.compose(m1, m2).unwrap()).unwrap();
                b.set_comp(i as MorId, j as MorId, c);
            }
        }
    }
    let eq = Arc::new(b.finish_unchecked());
    let incl = GroupoidMap::new_unchecked(eq.clone(), f.dom.clone(), objs, mors);
    Ok((eq, incl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{codiscrete, delooping, discrete, GroupTable};
    use crate::map::functor_classify;

    #[test]
    fn product_sizes() {
        let a = Arc::new(codiscrete(2));
        let b = Arc::new(delooping(&GroupTable::cyclic(2)));
        let p = product(a, b);
        assert_eq!(p.apex.n_objects(), 2);
        assert_eq!(p.apex.n_morphisms(), 8);
        assert!(p.apex.validate().is_empty());
        p.left.validate().unwrap();
        p.right.validate().unwrap();
    }

    #[test]
    fn pullback_of_points() {
        // two distinct points of discrete(2) pull back to the empty groupoid
        let t = Arc::new(discrete(1));
        let d = Arc::new(discrete(2));
        let f = GroupoidMap::constant(t.clone(), d.clone(), 0);
        let g = GroupoidMap::constant(t, d, 1);
        let p = pullback(&f, &g).unwrap();
        assert_eq!(p.apex.n_objects(), 0);
    }

    #[test]
    fn pullback_projection_of_isofibration_is_isofibration() {
        // pull back BZ2 → 1 along discrete(2) → 1; projection stays a fibration
        let t = Arc::new(discrete(1));
        let bz2 = Arc::new(delooping(&GroupTable::cyclic(2)));
        let d = Arc::new(discrete(2));
        let f = GroupoidMap::to_terminal(d, t.clone());
        let g = GroupoidMap::to_terminal(bz2, t);
        let p = pullback(&f, &g).unwrap();
        assert_eq!(p.apex.n_objects(), 2);
        assert_eq!(p.apex.n_morphisms(), 4);
        assert!(functor_classify(&p.left).isofibration);
    }

    #[test]
    fn equalizer_of_identity_and_swap() {
        let d = Arc::new(discrete(2));
        let id = GroupoidMap::identity(d.clone());
        let swap = GroupoidMap::new(
            d.clone(),
            d.clone(),
            vec![1, 0],
            vec![d.identity(1), d.identity(0)],
        )
        .unwrap();
        let (eq, incl) = equalizer(&id, &swap).unwrap();
        assert_eq!(eq.n_objects(), 0);
        let (eq2, _) = equalizer(&id, &id).unwrap();
        assert_eq!(eq2.n_objects(), 2);
        incl.validate().ok();
    }
}
