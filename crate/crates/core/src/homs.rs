//! Exhaustive enumeration of functors and natural isomorphisms, and the
//! hom groupoid Hom(A, B) whose objects are functors and whose morphisms
//! are natural isomorphisms under vertical composition.
//!
//! Enumeration is backtracking with forced identities and inverses and
//! eager composition checks; intended for the small groupoids that appear
//! as fibers.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Budget, Error, Result};
use crate::groupoid::{Groupoid, GroupoidBuilder, MorId, ObjId};
use crate::map::{GroupoidMap, NatIso};

/// All functors A → B.
pub fn enumerate_functors(
    a: &Arc<Groupoid>,
    b: &Arc<Groupoid>,
    budget: &Budget,
) -> Result<Vec<GroupoidMap>> {
    let mut result = Vec::new();
    let n_obj = a.n_objects();
    if n_obj == 0 {
        return Ok(vec![GroupoidMap::new_unchecked(
            a.clone(),
            b.clone(),
            vec![],
            vec![],
        )]);
    }
    if b.n_objects() == 0 {
        return Ok(vec![]);
    }
    let mut on_obj: Vec<ObjId> = vec![0; n_obj];
    let mut stack = vec![0 as ObjId];
    // enumerate object images in lexicographic order, then extend each to
    // morphism tables
    loop {
        if stack.len() == n_obj {
            on_obj.copy_from_slice(&stack);
            extend_functors(a, b, &on_obj, &mut result, budget)?;
            // advance
            while let Some(top) = stack.pop() {
                if (top as usize) + 1 < b.n_objects() {
                    stack.push(top + 1);
                    break;
                }
            }
            if stack.is_empty() {
                break;
            }
        } else {
            stack.push(0);
        }
    }
    Ok(result)
}

fn extend_functors(
    a: &Arc<Groupoid>,
    b: &Arc<Groupoid>,
    on_obj: &[ObjId],
    out: &mut Vec<GroupoidMap>,
    budget: &Budget,
) -> Result<()> {
    let n = a.n_morphisms();
    let mut on_mor: Vec<Option<MorId>> = vec![None; n];
    for o in a.objects() {
        on_mor[a.identity(o) as usize] = Some(b.identity(on_obj[o as usize]));
    }
    // candidate lists per unassigned morphism
    fn rec(
        a: &Arc<Groupoid>,
        b: &Arc<Groupoid>,
        on_obj: &[ObjId],
        m: usize,
        on_mor: &mut Vec<Option<MorId>>,
        out: &mut Vec<GroupoidMap>,
        budget: &Budget,
    ) -> Result<()> {
        let n = a.n_morphisms();
        if m == n {
            out.push(GroupoidMap::new_unchecked(
                a.clone(),
                b.clone(),
                on_obj.to_vec(),
                on_mor.iter().map(|x| x.unwrap()).collect(),
            ));
            if out.len() > budget.max_objects {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} functors",
                    budget.max_objects
                )));
            }
            return Ok(());
        }
        if on_mor[m].is_some() {
            return rec(a, b, on_obj, m + 1, on_mor, out, budget);
        }
        let s = on_obj[a.src(m as MorId) as usize];
        let t = on_obj[a.tgt(m as MorId) as usize];
        'cand: for cand in b.hom(s, t) {
            // composition consistency with all assigned morphisms
            for f in 0..n {
                let fb = match on_mor[f] {
                    Some(x) => x,
                    None => continue,
                };
                let fa = f as MorId;
                let ma = m as MorId;
                for (g, h, gb, hb) in [(ma, fa, cand, fb), (fa, ma, fb, cand)] {
                    if let Some(c) = a.compose(g, h) {
                        let cb = b.compose(gb, hb).unwrap();
                        if let Some(assigned) = on_mor[c as usize] {
                            if assigned != cb {
                                continue 'cand;
                            }
                        }
                    }
                }
            }
            // self-composition (endo case)
            if let Some(c) = a.compose(m as MorId, m as MorId) {
                let cb = b.compose(cand, cand).unwrap();
                if let Some(assigned) = on_mor[c as usize] {
                    if assigned != cb {
                        continue 'cand;
                    }
                }
            }
            on_mor[m] = Some(cand);
            // force the inverse
            let inv = a.inverse(m as MorId) as usize;
            let forced_inv = on_mor[inv].is_none();
            if forced_inv {
                on_mor[inv] = Some(b.inverse(cand));
            } else if on_mor[inv] != Some(b.inverse(cand)) {
                on_mor[m] = None;
                continue 'cand;
            }
            rec(a, b, on_obj, m + 1, on_mor, out, budget)?;
            on_mor[m] = None;
            if forced_inv {
                on_mor[inv] = None;
            }
        }
        Ok(())
    }
    let before = out.len();
    rec(a, b, on_obj, 0, &mut on_mor, out, budget)?;
    // leaf-level composition check: pairwise pruning plus the final
    // validation keeps only true functors
    out.drain(before..)
        .filter(|f| f.validate().is_ok())
        .collect::<Vec<_>>()
        .into_iter()
        .for_each(|f| out.push(f));
    Ok(())
}

/// All natural isomorphisms F ⇒ G between parallel functors.
pub fn enumerate_nat_isos(f: &GroupoidMap, g: &GroupoidMap) -> Result<Vec<NatIso>> {
    if f.dom.as_ref() != g.dom.as_ref() || f.cod.as_ref() != g.cod.as_ref() {
        return Err(Error::NotParallel("functors do not share domain and codomain".into()));
    }
    let d = &f.dom;
    let c = &f.cod;
    let n = d.n_objects();
    let mut comp: Vec<Option<MorId>> = vec![None; n];
    let mut result = Vec::new();
    fn rec(
        d: &Arc<Groupoid>,
        c: &Arc<Groupoid>,
        f: &GroupoidMap,
        g: &GroupoidMap,
        o: usize,
        comp: &mut Vec<Option<MorId>>,
        out: &mut Vec<NatIso>,
    ) {
        if o == d.n_objects() {
            out.push(NatIso::new_unchecked(
                f.clone(),
                g.clone(),
                comp.iter().map(|x| x.unwrap()).collect(),
            ));
            return;
        }
        'cand: for cand in c.hom(f.ob(o as ObjId), g.ob(o as ObjId)) {
            // naturality against morphisms with both endpoints assigned
            for m in d.morphisms() {
                let (s, t) = (d.src(m) as usize, d.tgt(m) as usize);
                let es = if s == o { Some(cand) } else { comp[s] };
                let et = if t == o { Some(cand) } else { comp[t] };
                if let (Some(es), Some(et)) = (es, et) {
                    let lhs = c.compose(et, f.mor(m)).unwrap();
                    let rhs = c.compose(g.mor(m), es).unwrap();
                    if lhs != rhs {
                        continue 'cand;
                    }
                }
            }
            comp[o] = Some(cand);
            rec(d, c, f, g, o + 1, comp, out);
            comp[o] = None;
        }
    }
    rec(d, c, f, g, 0, &mut comp, &mut result);
    Ok(result)
}

/// The hom groupoid of functors A → B and natural isomorphisms, together
/// with the enumerated data indexed in parallel with the groupoid tables.
pub struct HomGroupoid {
    pub groupoid: Arc<Groupoid>,
    pub functors: Vec<GroupoidMap>,
    pub isos: Vec<NatIso>,
    iso_index: HashMap<(ObjId, ObjId, Vec<MorId>), MorId>,
}

impl HomGroupoid {
    pub fn functor_index(&self, f: &GroupoidMap) -> Option<ObjId> {
        self.functors
            .iter()
            .position(|g| g.on_obj == f.on_obj && g.on_mor == f.on_mor)
            .map(|i| i as ObjId)
    }

    pub fn iso_morphism(&self, eta: &NatIso) -> Option<MorId> {
        let s = self.functor_index(&eta.src)?;
        let t = self.functor_index(&eta.tgt)?;
        self.iso_index
            .get(&(s, t, eta.component.clone()))
            .copied()
    }
}

pub fn hom_groupoid(a: &Arc<Groupoid>, bg: &Arc<Groupoid>, budget: &Budget) -> Result<HomGroupoid> {
    let functors = enumerate_functors(a, bg, budget)?;
    let mut b = GroupoidBuilder::new();
    for (i, _) in functors.iter().enumerate() {
        b.add_object(format!("F{i}"));
    }
    let mut isos: Vec<NatIso> = Vec::new();
    let mut iso_index: HashMap<(ObjId, ObjId, Vec<MorId>), MorId> = HashMap::new();
    for (i, f) in functors.iter().enumerate() {
        for (j, g) in functors.iter().enumerate() {
            for eta in enumerate_nat_isos(f, g)? {
                let m = b.add_morphism(
                    format!("n{}", isos.len()),
                    i as ObjId,
                    j as ObjId,
                );
                iso_index.insert((i as ObjId, j as ObjId, eta.component.clone()), m);
                isos.push(eta);
                if isos.len() > budget.max_morphisms {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {} natural isomorphisms",
                        budget.max_morphisms
                    )));
                }
            }
        }
    }
    // identities and vertical composition
    let functor_idx: HashMap<(Vec<ObjId>, Vec<MorId>), ObjId> = functors
        .iter()
        .enumerate()
        .map(|(i, f)| ((f.on_obj.clone(), f.on_mor.clone()), i as ObjId))
        .collect();
    let idx_of = |eta: &NatIso| -> MorId {
        let s = functor_idx[&(eta.src.on_obj.clone(), eta.src.on_mor.clone())];
        let t = functor_idx[&(eta.tgt.on_obj.clone(), eta.tgt.on_mor.clone())];
        iso_index[&(s, t, eta.component.clone())]
    };
    for (i, f) in functors.iter().enumerate() {
        b.set_identity(i as ObjId, idx_of(&NatIso::identity(f.clone())));
    }
    for (i, e1) in isos.iter().enumerate() {
        for (j, e2) in isos.iter().enumerate() {
            if e2.tgt == e1.src {
                b.set_comp(i as MorId, j as MorId, idx_of(&e1.vcompose(e2)));
            }
        }
    }
    let groupoid = Arc::new(b.finish_unchecked());
    if !budget.admits(groupoid.n_objects(), groupoid.n_morphisms()) {
        return Err(Error::BudgetExceeded("hom groupoid exceeds budget".into()));
    }
    Ok(HomGroupoid {
        groupoid,
        functors,
        isos,
        iso_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{codiscrete, delooping, discrete, terminal, GroupTable};

    fn wide() -> Budget {
        Budget::wide()
    }

    #[test]
    fn functors_point_to_bz2() {
        let t = Arc::new(terminal());
        let b = Arc::new(delooping(&GroupTable::cyclic(2)));
        let fs = enumerate_functors(&t, &b, &wide()).unwrap();
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn endofunctors_of_bz2() {
        // group homomorphisms Z2 → Z2: identity and trivial
        let b = Arc::new(delooping(&GroupTable::cyclic(2)));
        let fs = enumerate_functors(&b, &b, &wide()).unwrap();
        assert_eq!(fs.len(), 2);
        for f in &fs {
            f.validate().unwrap();
        }
    }

    #[test]
    fn endofunctors_of_bz3() {
        // group homomorphisms Z3 → Z3: three of them
        let b = Arc::new(delooping(&GroupTable::cyclic(3)));
        let fs = enumerate_functors(&b, &b, &wide()).unwrap();
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn nat_autos_of_identity_on_bz2() {
        // the center of Z2 has two elements
        let b = Arc::new(delooping(&GroupTable::cyclic(2)));
        let id = GroupoidMap::identity(b);
        let isos = enumerate_nat_isos(&id, &id).unwrap();
        assert_eq!(isos.len(), 2);
        for eta in &isos {
            eta.validate().unwrap();
        }
    }

    #[test]
    fn hom_groupoid_discrete_to_discrete() {
        let a = Arc::new(discrete(2));
        let c = Arc::new(discrete(2));
        let h = hom_groupoid(&a, &c, &wide()).unwrap();
        assert_eq!(h.groupoid.n_objects(), 4);
        assert_eq!(h.groupoid.n_morphisms(), 4);
        assert!(h.groupoid.validate().is_empty());
    }

    #[test]
    fn hom_groupoid_point_to_codiscrete() {
        let t = Arc::new(terminal());
        let c = Arc::new(codiscrete(2));
        let h = hom_groupoid(&t, &c, &wide()).unwrap();
        // two functors, every pair connected by a unique iso
        assert_eq!(h.groupoid.n_objects(), 2);
        assert_eq!(h.groupoid.n_morphisms(), 4);
        assert!(h.groupoid.validate().is_empty());
    }

    #[test]
    fn budget_exceeded_reported() {
        let a = Arc::new(discrete(3));
        let c = Arc::new(codiscrete(3));
        let tight = Budget {
            max_objects: 4,
            max_morphisms: 8,
        };
        assert!(matches!(
            hom_groupoid(&a, &c, &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
