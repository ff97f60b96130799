//! Path objects and factorizations.
//!
//! The path groupoid of B has the morphisms of B as objects and commuting
//! squares as morphisms; it gives both the path-object factorization of the
//! diagonal and, via the mapping path groupoid (iso-comma), the
//! (equivalence injective on objects, isofibration) factorization of an
//! arbitrary functor.

use std::sync::Arc;

use crate::groupoid::{Groupoid, GroupoidBuilder, MorId, ObjId};
use crate::map::{functor_classify, GroupoidMap};

pub struct PathObject {
    pub path: Arc<Groupoid>,
    /// reflexivity B → PB, x ↦ id_x
    pub refl: GroupoidMap,
    /// evaluation at the source end
    pub eval0: GroupoidMap,
    /// evaluation at the target end
    pub eval1: GroupoidMap,
}

/// Path groupoid of B. Objects are morphisms ψ of B; a morphism
/// (ψ → ψ') is a square, recorded by its bottom edge u since the top edge
/// ψ'∘u∘ψ⁻¹ is determined.
pub fn path_object(g: Arc<Groupoid>) -> PathObject {
    let mut b = GroupoidBuilder::new();
    for m in g.morphisms() {
        b.add_object(format!("p[{}]", g.mor_name(m)));
    }
    // morphisms of PB: triples (ψ, u, ψ') with src(u) = src(ψ), tgt u = src ψ'
    let mut triple: Vec<(MorId, MorId, MorId)> = Vec::new();
    for psi in g.morphisms() {
        for &u in g.morphisms_from(g.src(psi)) {
            for psi2 in g.morphisms() {
                if g.src(psi2) == g.tgt(u) {
                    let name = format!(
                        "sq[{};{};{}]",
                        g.mor_name(psi),
                        g.mor_name(u),
                        g.mor_name(psi2)
                    );
                    b.add_morphism(name, psi, psi2);
                    triple.push((psi, u, psi2));
                }
            }
        }
    }
    let idx = |psi: MorId, u: MorId, psi2: MorId| -> MorId {
        triple
            .iter()
            .position(|&t| t == (psi, u, psi2))
            .unwrap() as MorId
    };
    for psi in g.morphisms() {
        b.set_identity(psi, idx(psi, g.identity(g.src(psi)), psi));
    }
    for (i, &(p1, u1, q1)) in triple.iter().enumerate() {
        for (j, &(p2, u2, q2)) in triple.iter().enumerate() {
            if q2 == p1 {
                let u = g.compose(u1, u2).unwrap();
                b.set_comp(i as MorId, j as MorId, idx(p2, u, q1));
            }
        }
    }
    let path = Arc::new(b.finish_unchecked());
    let refl = GroupoidMap::new_unchecked(
        g.clone(),
        path.clone(),
        g.objects().map(|o| g.identity(o)).collect(),
        g.morphisms()
            .map(|m| idx(g.identity(g.src(m)), m, g.identity(g.tgt(m))))
            .collect(),
    );
    let eval0 = GroupoidMap::new_unchecked(
        path.clone(),
        g.clone(),
        g.morphisms().map(|m| g.src(m)).collect(),
        triple.iter().map(|&(_, u, _)| u).collect(),
    );
    // top edge of the square (ψ, u, ψ') is ψ'∘u∘ψ⁻¹
    let eval1 = GroupoidMap::new_unchecked(
        path.clone(),
        g.clone(),
        g.morphisms().map(|m| g.tgt(m)).collect(),
        triple
            .iter()
            .map(|&(p, u, q)| {
                let up = g.compose(u, g.inverse(p)).unwrap();
                g.compose(q, up).unwrap()
            })
            .collect(),
    );
    PathObject {
        path,
        refl,
        eval0,
        eval1,
    }
}

/// Fiberwise path object of q: E → B. Objects are morphisms of E lying
/// over identities; morphisms are squares whose two vertical edges have the
/// same image under q. Comes with the projection to B and the two
/// evaluations into E.
pub struct FiberwisePathObject {
    pub path: Arc<Groupoid>,
    pub refl: GroupoidMap,
    pub eval0: GroupoidMap,
    pub eval1: GroupoidMap,
    pub over: GroupoidMap,
}

pub fn fiberwise_path_object(q: &GroupoidMap) -> FiberwisePathObject {
    let e = &q.dom;
    let base = &q.cod;
    let vertical: Vec<MorId> = e
        .morphisms()
        .filter(|&m| e.is_vertical(q, m))
        .collect();
    let obj_of = |psi: MorId| vertical.iter().position(|&v| v == psi).unwrap() as ObjId;
    let mut b = GroupoidBuilder::new();
    for &m in &vertical {
        b.add_object(format!("p[{}]", e.mor_name(m)));
    }
    let mut triple: Vec<(MorId, MorId, MorId)> = Vec::new();
    for &psi in &vertical {
        for &u in e.morphisms_from(e.src(psi)) {
            for &psi2 in &vertical {
                // top edge ψ'∘u∘ψ⁻¹ lies over q(u) automatically
                if e.src(psi2) == e.tgt(u) {
                    let name = format!(
                        "sq[{};{};{}]",
                        e.mor_name(psi),
                        e.mor_name(u),
                        e.mor_name(psi2)
                    );
                    b.add_morphism(name, obj_of(psi), obj_of(psi2));
                    triple.push((psi, u, psi2));
                }
            }
        }
    }
    let idx = |psi: MorId, u: MorId, psi2: MorId| -> MorId {
        triple
            .iter()
            .position(|&t| t == (psi, u, psi2))
            .unwrap() as MorId
    };
    for (k, &psi) in vertical.iter().enumerate() {
        b.set_identity(k as ObjId, idx(psi, e.identity(e.src(psi)), psi));
    }
    for (i, &(p1, u1, q1)) in triple.iter().enumerate() {
        for (j, &(p2, u2, q2)) in triple.iter().enumerate() {
            if q2 == p1 {
                let u = e.compose(u1, u2).unwrap();
                b.set_comp(i as MorId, j as MorId, idx(p2, u, q1));
            }
        }
    }
    let path = Arc::new(b.finish_unchecked());
    let refl = GroupoidMap::new_unchecked(
        e.clone(),
        path.clone(),
        e.objects().map(|o| obj_of(e.identity(o))).collect(),
        e.morphisms()
            .map(|m| idx(e.identity(e.src(m)), m, e.identity(e.tgt(m))))
            .collect(),
    );
    let eval0 = GroupoidMap::new_unchecked(
        path.clone(),
        e.clone(),
        vertical.iter().map(|&m| e.src(m)).collect(),
        triple.iter().map(|&(_, u, _)| u).collect(),
    );
    let eval1 = GroupoidMap::new_unchecked(
        path.clone(),
        e.clone(),
        vertical.iter().map(|&m| e.tgt(m)).collect(),
        triple
            .iter()
            .map(|&(p, u, qm)| {
                let up = e.compose(u, e.inverse(p)).unwrap();
                e.compose(qm, up).unwrap()
            })
            .collect(),
    );
    let over = GroupoidMap::new_unchecked(
        path.clone(),
        base.clone(),
        vertical.iter().map(|&m| q.ob(e.src(m))).collect(),
        triple.iter().map(|&(_, u, _)| q.mor(u)).collect(),
    );
    FiberwisePathObject {
        path,
        refl,
        eval0,
        eval1,
        over,
    }
}

impl Groupoid {
    /// True when q maps m to an identity.
    pub fn is_vertical(&self, q: &GroupoidMap, m: MorId) -> bool {
        q.cod.is_identity(q.mor(m))
    }
}

pub struct Factorization {
    pub mid: Arc<Groupoid>,
    pub first: GroupoidMap,
    pub second: GroupoidMap,
}

/// Factors f: A → B as (equivalence injective on objects) followed by an
/// isofibration, through the mapping path groupoid
/// {(a, ψ: f(a) ≅ b)}.
pub fn factorize(f: &GroupoidMap) -> Factorization {
    let a = &f.dom;
    let c = &f.cod;
    let mut b = GroupoidBuilder::new();
    // objects (a, ψ) with ψ: f(a) → b in B
    let mut objs: Vec<(ObjId, MorId)> = Vec::new();
    for x in a.objects() {
        for &psi in c.morphisms_from(f.ob(x)) {
            b.add_object(format!("({},{})", a.obj_name(x), c.mor_name(psi)));
            objs.push((x, psi));
        }
    }
    let obj_of = |x: ObjId, psi: MorId| {
        objs.iter().position(|&o| o == (x, psi)).unwrap() as ObjId
    };
    // a morphism (x,ψ) → (x',ψ') is α: x → x'; the B-edge ψ'∘f(α)∘ψ⁻¹ is
    // determined
    let mut mors: Vec<(usize, MorId, usize)> = Vec::new();
    for (i, &(x, _)) in objs.iter().enumerate() {
        for &alpha in a.morphisms_from(x) {
            for (j, &(x2, _)) in objs.iter().enumerate() {
                if x2 == a.tgt(alpha) {
                    b.add_morphism(format!("m{i}_{}_{j}", a.mor_name(alpha)), i as ObjId, j as ObjId);
                    mors.push((i, alpha, j));
                }
            }
        }
    }
    let mor_of = |i: usize, alpha: MorId, j: usize| {
        mors.iter().position(|&m| m == (i, alpha, j)).unwrap() as MorId
    };
    for (i, &(x, _)) in objs.iter().enumerate() {
        b.set_identity(i as ObjId, mor_of(i, a.identity(x), i));
    }
    for (k, &(i1, a1, j1)) in mors.iter().enumerate() {
        for (l, &(i2, a2, j2)) in mors.iter().enumerate() {
            if j2 == i1 {
                b.set_comp(k as MorId, l as MorId, mor_of(i2, a.compose(a1, a2).unwrap(), j1));
            }
        }
    }
    let mid = Arc::new(b.finish_unchecked());
    let first = GroupoidMap::new_unchecked(
        a.clone(),
        mid.clone(),
        a.objects()
            .map(|x| obj_of(x, c.identity(f.ob(x))))
            .collect(),
        a.morphisms()
            .map(|m| {
                let i = obj_of(a.src(m), c.identity(f.ob(a.src(m)))) as usize;
                let j = obj_of(a.tgt(m), c.identity(f.ob(a.tgt(m)))) as usize;
                mor_of(i, m, j)
            })
            .collect(),
    );
    let second = GroupoidMap::new_unchecked(
        mid.clone(),
        c.clone(),
        objs.iter().map(|&(_, psi)| c.tgt(psi)).collect(),
        mors.iter()
            .map(|&(i, alpha, j)| {
                let (_, psi1) = objs[i];
                let (_, psi2) = objs[j];
                let t = c.compose(f.mor(alpha), c.inverse(psi1)).unwrap();
                c.compose(psi2, t).unwrap()
            })
            .collect(),
    );
    Factorization { mid, first, second }
}

/// Factors f: A → B as an essentially surjective functor followed by a
/// fully faithful one, through the category with the objects of A and the
/// hom-sets of B: morphisms x → y are the B-morphisms f(x) → f(y).
pub fn eso_ff_factorize(f: &GroupoidMap) -> Factorization {
    let a = &f.dom;
    let c = &f.cod;
    let mut b = GroupoidBuilder::new();
    for x in a.objects() {
        b.add_object(a.obj_name(x).to_string());
    }
    // (source object, B-morphism) pairs
    let mut mors: Vec<(ObjId, MorId, ObjId)> = Vec::new();
    let mut mor_index: std::collections::HashMap<(ObjId, MorId, ObjId), MorId> =
        std::collections::HashMap::new();
    for x in a.objects() {
        for y in a.objects() {
            for &m in c.morphisms_from(f.ob(x)) {
                if c.tgt(m) == f.ob(y) {
                    mor_index.insert((x, m, y), mors.len() as MorId);
                    b.add_morphism(format!("m{}", mors.len()), x, y);
                    mors.push((x, m, y));
                }
            }
        }
    }
    for x in a.objects() {
        b.set_identity(x, mor_index[&(x, c.identity(f.ob(x)), x)]);
    }
    for (i, &(x1, m1, y1)) in mors.iter().enumerate() {
        for (j, &(x2, m2, y2)) in mors.iter().enumerate() {
            if x2 == y1 {
                let comp = mor_index[&(x1, c.compose(m2, m1).unwrap(), y2)];
                b.set_comp(j as MorId, i as MorId, comp);
            }
        }
    }
    let inv: Vec<MorId> = mors
        .iter()
        .map(|&(x, m, y)| mor_index[&(y, c.inverse(m), x)])
        .collect();
    let mid = Arc::new(b.finish_unchecked_with_inverses(inv));
    let first = GroupoidMap::new_unchecked(
        f.dom.clone(),
        mid.clone(),
        a.objects().collect(),
        a.morphisms()
            .map(|u| mor_index[&(a.src(u), f.mor(u), a.tgt(u))])
            .collect(),
    );
    let second = GroupoidMap::new_unchecked(
        mid.clone(),
        c.clone(),
        a.objects().map(|x| f.ob(x)).collect(),
        mors.iter().map(|&(_, m, _)| m).collect(),
    );
    Factorization { mid, first, second }
}

impl Factorization {
    /// Checks second ∘ first agrees with f on the nose.
    pub fn recomposes_to(&self, f: &GroupoidMap) -> bool {
        let g = self.second.compose(&self.first);
        g.on_obj == f.on_obj && g.on_mor == f.on_mor
    }
}

/// Convenience profiles of both legs of a factorization.
pub fn factorization_profiles(fac: &Factorization) -> (crate::map::FunctorProfile, crate::map::FunctorProfile) {
    (functor_classify(&fac.first), functor_classify(&fac.second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{codiscrete, delooping, discrete, terminal, GroupTable};

    #[test]
    fn path_object_of_bz2() {
        let g = Arc::new(delooping(&GroupTable::cyclic(2)));
        let p = path_object(g.clone());
        // objects = morphisms of BZ2
        assert_eq!(p.path.n_objects(), 2);
        assert!(p.path.validate().is_empty());
        p.refl.validate().unwrap();
        p.eval0.validate().unwrap();
        p.eval1.validate().unwrap();
        // r is an equivalence, (eval0, eval1) jointly an isofibration
        assert!(functor_classify(&p.refl).is_equivalence());
        assert!(functor_classify(&p.eval0).isofibration);
        assert!(functor_classify(&p.eval1).isofibration);
    }

    #[test]
    fn fiberwise_path_object_over_base() {
        let t = Arc::new(terminal());
        let e = Arc::new(delooping(&GroupTable::cyclic(2)));
        let q = GroupoidMap::to_terminal(e, t);
        let fp = fiberwise_path_object(&q);
        assert!(fp.path.validate().is_empty());
        fp.refl.validate().unwrap();
        fp.eval0.validate().unwrap();
        fp.eval1.validate().unwrap();
        fp.over.validate().unwrap();
    }

    #[test]
    fn factorize_point_into_codiscrete() {
        let t = Arc::new(terminal());
        let c = Arc::new(codiscrete(2));
        let f = GroupoidMap::constant(t, c, 0);
        let fac = factorize(&f);
        assert!(fac.recomposes_to(&f));
        fac.first.validate().unwrap();
        fac.second.validate().unwrap();
        let (p1, p2) = factorization_profiles(&fac);
        assert!(p1.is_equivalence());
        assert!(p1.injective_on_objects);
        assert!(p2.isofibration);
    }

    #[test]
    fn eso_ff_factorize_point_into_discrete_two() {
        let t = Arc::new(terminal());
        let d = Arc::new(discrete(2));
        let f = GroupoidMap::constant(t, d, 0);
        let fac = eso_ff_factorize(&f);
        assert!(fac.recomposes_to(&f));
        assert_eq!(fac.mid.n_objects(), 1);
        let (p1, p2) = factorization_profiles(&fac);
        assert!(p1.essentially_surjective);
        assert!(p2.fully_faithful());
        assert!(p2.isofibration);
    }

    #[test]
    fn eso_ff_factorize_ff_functor_has_equivalence_first_leg() {
        // point into codiscrete(2) is fully faithful; first leg must be an
        // equivalence
        let t = Arc::new(terminal());
        let c = Arc::new(codiscrete(2));
        let f = GroupoidMap::constant(t, c, 0);
        let fac = eso_ff_factorize(&f);
        assert!(fac.recomposes_to(&f));
        let (p1, p2) = factorization_profiles(&fac);
        assert!(p1.is_equivalence());
        assert!(p2.fully_faithful());
    }
}
