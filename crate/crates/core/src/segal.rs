//! Truncated simplicial groupoids: nerves of fibrations, Segal and Reedy
//! structure, weighted limits over finite weights, the equivalence bundle,
//! univalence, completeness, DK-classification, and completion of
//! nerve-type Segal objects.

use std::collections::HashMap;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::fib::{
    fun_of, verify_homotopy_cartesian, Fibration, FibrationSquare, InternalCategory,
    UniverseData,
};
use crate::groupoid::{Groupoid, GroupoidBuilder, MorId, ObjId};
use crate::limits::{product, pullback, Span};
use crate::map::{functor_classify, GroupoidMap, NatIso};
use crate::paths::fiberwise_path_object;
use crate::simpset::{k_interval, shape, FiniteSimplicialSet, Shape, SimplicialMap};

// ---------------------------------------------------------------------------
// truncated simplicial groupoids

/// Simplicial groupoid truncated at level `m`, with explicit face and
/// degeneracy functors. `faces[n][i]`: X_n → X_{n-1} (n ≥ 1, i ≤ n);
/// `degens[n][i]`: X_n → X_{n+1} (n < m, i ≤ n).
#[derive(Clone, Debug)]
pub struct TruncatedSimplicialGroupoid {
    pub m: usize,
    pub levels: Vec<Arc<Groupoid>>,
    pub faces: Vec<Vec<GroupoidMap>>,
    pub degens: Vec<Vec<GroupoidMap>>,
}

fn maps_equal(f: &GroupoidMap, g: &GroupoidMap) -> bool {
    f.on_obj == g.on_obj && f.on_mor == g.on_mor
}

impl TruncatedSimplicialGroupoid {
    pub fn level(&self, n: usize) -> &Arc<Groupoid> {
        &self.levels[n]
    }

    pub fn face(&self, n: usize, i: usize) -> &GroupoidMap {
        &self.faces[n][i]
    }

    pub fn degen(&self, n: usize, i: usize) -> &GroupoidMap {
        &self.degens[n][i]
    }

    /// All simplicial identities that are expressible below the truncation.
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if self.levels.len() != m + 1 || self.faces.len() != m + 1 || self.degens.len() != m + 1
        {
            return Err(Error::Precondition("level table shape mismatch".into()));
        }
        let fail =
            |msg: String| -> Result<()> { Err(Error::InvalidFunctor(msg)) };
        for n in 0..=m {
            let nf = if n == 0 { 0 } else { n + 1 };
            let nd = if n == m { 0 } else { n + 1 };
            if self.faces[n].len() != nf || self.degens[n].len() != nd {
                return fail(format!("operator count wrong at level {n}"));
            }
            for f in self.faces[n].iter().chain(self.degens[n].iter()) {
                f.validate()?;
            }
        }
        // d_i d_j = d_{j-1} d_i for i < j
        for n in 2..=m {
            for j in 1..=n {
                for i in 0..j {
                    let lhs = self.faces[n - 1][i].compose(&self.faces[n][j]);
                    let rhs = self.faces[n - 1][j - 1].compose(&self.faces[n][i]);
                    if !maps_equal(&lhs, &rhs) {
                        return fail(format!("face identity fails at level {n} ({i},{j})"));
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i ≤ j
        if m >= 2 {
            for n in 0..=m - 2 {
                for j in 0..=n {
                    for i in 0..=j {
                        let lhs = self.degens[n + 1][i].compose(&self.degens[n][j]);
                        let rhs = self.degens[n + 1][j + 1].compose(&self.degens[n][i]);
                        if !maps_equal(&lhs, &rhs) {
                            return fail(format!(
                                "degeneracy identity fails at level {n} ({i},{j})"
                            ));
                        }
                    }
                }
            }
        }
        // mixed identities
        for n in 0..m {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = self.faces[n + 1][i].compose(&self.degens[n][j]);
                    let ok = if i == j || i == j + 1 {
                        let id = GroupoidMap::identity(self.levels[n].clone());
                        maps_equal(&lhs, &id)
                    } else if i < j {
                        maps_equal(
                            &lhs,
                            &self.degens[n - 1][j - 1].compose(&self.faces[n][i]),
                        )
                    } else {
                        maps_equal(&lhs, &self.degens[n - 1][j].compose(&self.faces[n][i - 1]))
                    };
                    if !ok {
                        return fail(format!("mixed identity fails at level {n} ({i},{j})"));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for TruncatedSimplicialGroupoid {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TruncatedSimplicialGroupoid", 4)?;
        st.serialize_field("m", &self.m)?;
        let levels: Vec<&Groupoid> = self.levels.iter().map(|l| l.as_ref()).collect();
        st.serialize_field("levels", &levels)?;
        st.serialize_field("faces", &self.faces)?;
        st.serialize_field("degens", &self.degens)?;
        st.end()
    }
}

/// The constant simplicial groupoid at G: all levels G, all operators
/// identities.
pub fn constant_simplicial(g: &Arc<Groupoid>, m: usize) -> TruncatedSimplicialGroupoid {
    let id = || GroupoidMap::identity(g.clone());
    TruncatedSimplicialGroupoid {
        m,
        levels: vec![g.clone(); m + 1],
        faces: (0..=m)
            .map(|n| if n == 0 { vec![] } else { (0..=n).map(|_| id()).collect() })
            .collect(),
        degens: (0..=m)
            .map(|n| if n == m { vec![] } else { (0..=n).map(|_| id()).collect() })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// nerve of a fibration

/// The nerve of a fibration together with the internal category it is built
/// from and the level-3 fiber-product span when m = 3.
pub struct NerveData {
    pub x: TruncatedSimplicialGroupoid,
    pub cat: InternalCategory,
    pub c3: Option<Span>,
}

/// N(p): level 0 the base, level 1 the internal category of fiber functors,
/// higher levels strict fiber products of composable strings.
pub fn nerve(p: &Fibration, m: usize, budget: &Budget) -> Result<NerveData> {
    if !(2..=3).contains(&m) {
        return Err(Error::LevelOutOfRange(format!(
            "nerve truncation {m} outside the supported range 2..=3"
        )));
    }
    let cat = fun_of(p, budget)?;
    let c2 = &cat.composable;
    let id1 = GroupoidMap::identity(cat.arrows.clone());
    let mut levels = vec![cat.base.clone(), cat.arrows.clone(), c2.apex.clone()];
    let mut faces = vec![
        vec![],
        vec![cat.t.clone(), cat.s.clone()],
        vec![c2.right.clone(), cat.mu.clone(), c2.left.clone()],
    ];
    let s10 = c2.induced(&cat.r.compose(&cat.s), &id1)?;
    let s11 = c2.induced(&id1, &cat.r.compose(&cat.t))?;
    let mut degens = vec![vec![cat.r.clone()], vec![s10.clone(), s11.clone()]];
    let mut c3_out = None;
    if m == 3 {
        let c3 = pullback(&cat.t.compose(&c2.right), &cat.s)?;
        let d0 = c2.induced(&c2.right.compose(&c3.left), &c3.right)?;
        let d1 = c2.induced(&cat.mu.compose(&c3.left), &c3.right)?;
        let d2 = c2.induced(&c2.left.compose(&c3.left), &cat.mu.compose(&d0))?;
        let d3 = c3.left.clone();
        levels.push(c3.apex.clone());
        let id2 = GroupoidMap::identity(c2.apex.clone());
        degens.push(vec![
            c3.induced(&s10.compose(&c2.left), &c2.right)?,
            c3.induced(&s11.compose(&c2.left), &c2.right)?,
            c3.induced(&id2, &cat.r.compose(&cat.t).compose(&c2.right))?,
        ]);
        faces.push(vec![d0, d1, d2, d3]);
        degens.push(vec![]);
        faces.insert(0, vec![]);
        faces.remove(0);
        c3_out = Some(c3);
    } else {
        degens.push(vec![]);
    }
    let x = TruncatedSimplicialGroupoid {
        m,
        levels,
        faces,
        degens,
    };
    Ok(NerveData { x, cat, c3: c3_out })
}

// ---------------------------------------------------------------------------
// weighted limits

/// The limit of X weighted by a finite simplicial set A, presented as the
/// subgroupoid of the product over the nondegenerate simplices of A cut out
/// by the operator-compatibility constraints.
pub struct WeightedLimit {
    pub weight: Arc<FiniteSimplicialSet>,
    pub apex: Arc<Groupoid>,
    /// (level, simplex index) per component, descending by level
    pub comps: Vec<(usize, usize)>,
    pub legs: Vec<GroupoidMap>,
    pub obj_tuples: Vec<Vec<ObjId>>,
    pub obj_index: HashMap<Vec<ObjId>, ObjId>,
    pub mor_tuples: Vec<Vec<MorId>>,
    pub mor_index: HashMap<Vec<MorId>, MorId>,
}

impl Serialize for WeightedLimit {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("WeightedLimit", 4)?;
        st.serialize_field("weight", self.weight.as_ref())?;
        st.serialize_field("apex", self.apex.as_ref())?;
        st.serialize_field("components", &self.comps)?;
        st.serialize_field("legs", &self.legs)?;
        st.end()
    }
}

struct WlEdge {
    src_pos: usize,
    src_level: usize,
    face_i: usize,
    tgt_pos: usize,
    tgt_level: usize,
    ops: Vec<usize>,
}

/// Backtracking enumeration of consistent component tuples. Components are
/// processed in an order that puts each cell's iterated faces right after
/// it, so face values are derived instead of enumerated and later top cells
/// are pruned by their already-fixed boundary.
fn wl_tuples(
    comps: &[(usize, usize)],
    edges: &[WlEdge],
    count: &dyn Fn(usize) -> u32,
    face: &dyn Fn(usize, usize, u32) -> u32,
    degen: &dyn Fn(usize, usize, u32) -> u32,
    cap: usize,
) -> Result<Vec<Vec<u32>>> {
    let n = comps.len();
    // target position -> incoming edges, source position -> outgoing edges
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        incoming[e.tgt_pos].push(k);
        outgoing[e.src_pos].push(k);
    }
    // assignment order: each component followed by its face closure
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    fn place(
        pos: usize,
        outgoing: &[Vec<usize>],
        edges: &[WlEdge],
        placed: &mut [bool],
        order: &mut Vec<usize>,
    ) {
        if placed[pos] {
            return;
        }
        placed[pos] = true;
        order.push(pos);
        for &k in &outgoing[pos] {
            place(edges[k].tgt_pos, outgoing, edges, placed, order);
        }
    }
    for pos in 0..n {
        place(pos, &outgoing, edges, &mut placed, &mut order);
    }
    let mut rank = vec![0usize; n];
    for (i, &p) in order.iter().enumerate() {
        rank[p] = i;
    }
    // value of the nondegenerate base of a face, with the round-trip check
    let derive = |e: &WlEdge, src_val: u32| -> Option<u32> {
        let fv = face(e.src_level, e.face_i, src_val);
        let mut cur = fv;
        let mut lvl = e.src_level - 1;
        for &op in &e.ops {
            cur = face(lvl, op, cur);
            lvl -= 1;
        }
        let mut expand = cur;
        let mut l2 = e.tgt_level;
        for &op in e.ops.iter().rev() {
            expand = degen(l2, op, expand);
            l2 += 1;
        }
        if expand == fv {
            Some(cur)
        } else {
            None
        }
    };
    let mut vals: Vec<u32> = vec![0; n];
    let mut out: Vec<Vec<u32>> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        comps: &[(usize, usize)],
        edges: &[WlEdge],
        incoming: &[Vec<usize>],
        outgoing: &[Vec<usize>],
        order: &[usize],
        rank: &[usize],
        count: &dyn Fn(usize) -> u32,
        derive: &dyn Fn(&WlEdge, u32) -> Option<u32>,
        step: usize,
        vals: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
        nodes: &mut usize,
    ) -> Result<()> {
        if step == comps.len() {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded(format!(
                    "weighted limit exceeds {cap} elements"
                )));
            }
            out.push(vals.clone());
            return Ok(());
        }
        let pos = order[step];
        let mut implied: Option<u32> = None;
        for &k in &incoming[pos] {
            let e = &edges[k];
            if rank[e.src_pos] >= step {
                continue;
            }
            let Some(cur) = derive(e, vals[e.src_pos]) else {
                return Ok(());
            };
            match implied {
                None => implied = Some(cur),
                Some(v) if v != cur => return Ok(()),
                _ => {}
            }
        }
        let (lvl, _) = comps[pos];
        let candidates: Vec<u32> = match implied {
            Some(v) => vec![v],
            None => (0..count(lvl)).collect(),
        };
        'cand: for c in candidates {
            // bound total search work, not just emitted tuples: heavily
            // pruned branches must not grind unboundedly
            *nodes += 1;
            if *nodes > cap.saturating_mul(4) {
                return Err(Error::BudgetExceeded(format!(
                    "weighted limit search exceeds {} nodes",
                    cap.saturating_mul(4)
                )));
            }
            // prune by faces that are already fixed
            for &k in &outgoing[pos] {
                let e = &edges[k];
                if rank[e.tgt_pos] < step {
                    match derive(e, c) {
                        Some(v) if v == vals[e.tgt_pos] => {}
                        _ => continue 'cand,
                    }
                }
            }
            vals[pos] = c;
            rec(
                comps, edges, incoming, outgoing, order, rank, count, derive, step + 1,
                vals, out, cap, nodes,
            )?;
        }
        Ok(())
    }
    let mut nodes = 0usize;
    rec(
        &comps.iter().copied().collect::<Vec<_>>(),
        edges,
        &incoming,
        &outgoing,
        &order,
        &rank,
        count,
        &derive,
        0,
        &mut vals,
        &mut out,
        cap,
        &mut nodes,
    )?;
    Ok(out)
}

pub fn weighted_limit(
    a: &Arc<FiniteSimplicialSet>,
    x: &TruncatedSimplicialGroupoid,
    budget: &Budget,
) -> Result<WeightedLimit> {
    if a.dim > x.m {
        return Err(Error::LevelOutOfRange(format!(
            "weight dimension {} above truncation level {}",
            a.dim, x.m
        )));
    }
    let mut comps: Vec<(usize, usize)> = Vec::new();
    for lvl in (0..=a.dim).rev() {
        for idx in a.nondegenerate(lvl) {
            comps.push((lvl, idx));
        }
    }
    let comp_pos: HashMap<(usize, usize), usize> = comps
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut edges: Vec<WlEdge> = Vec::new();
    for (pos, &(lvl, idx)) in comps.iter().enumerate() {
        if lvl == 0 {
            continue;
        }
        for i in 0..=lvl {
            let fcell = a.face(lvl, i, idx);
            let (tl, tb, ops) = a.ez(lvl - 1, fcell);
            let tgt_pos = comp_pos[&(tl, tb)];
            edges.push(WlEdge {
                src_pos: pos,
                src_level: lvl,
                face_i: i,
                tgt_pos,
                tgt_level: tl,
                ops,
            });
        }
    }
    let obj_tuples = wl_tuples(
        &comps,
        &edges,
        &|lvl| x.levels[lvl].n_objects() as u32,
        &|lvl, i, v| x.faces[lvl][i].ob(v),
        &|lvl, i, v| x.degens[lvl][i].ob(v),
        budget.max_morphisms,
    )?;
    let mor_tuples = wl_tuples(
        &comps,
        &edges,
        &|lvl| x.levels[lvl].n_morphisms() as u32,
        &|lvl, i, v| x.faces[lvl][i].mor(v),
        &|lvl, i, v| x.degens[lvl][i].mor(v),
        budget.max_morphisms,
    )?;
    if !budget.admits(obj_tuples.len(), mor_tuples.len()) {
        return Err(Error::BudgetExceeded(format!(
            "weighted limit of size {}/{} exceeds the budget",
            obj_tuples.len(),
            mor_tuples.len()
        )));
    }
    let obj_index: HashMap<Vec<ObjId>, ObjId> = obj_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as ObjId))
        .collect();
    let mor_index: HashMap<Vec<MorId>, MorId> = mor_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as MorId))
        .collect();
    let mut b = GroupoidBuilder::new();
    for i in 0..obj_tuples.len() {
        b.add_object(format!("w{i}"));
    }
    let src_tuple = |t: &[MorId]| -> Vec<ObjId> {
        t.iter()
            .enumerate()
            .map(|(j, &m)| x.levels[comps[j].0].src(m))
            .collect()
    };
    let tgt_tuple = |t: &[MorId]| -> Vec<ObjId> {
        t.iter()
            .enumerate()
            .map(|(j, &m)| x.levels[comps[j].0].tgt(m))
            .collect()
    };
    let mut srcs: Vec<ObjId> = Vec::with_capacity(mor_tuples.len());
    let mut tgts: Vec<ObjId> = Vec::with_capacity(mor_tuples.len());
    for (k, t) in mor_tuples.iter().enumerate() {
        let s = obj_index[&src_tuple(t)];
        let tt = obj_index[&tgt_tuple(t)];
        b.add_morphism(format!("wm{k}"), s, tt);
        srcs.push(s);
        tgts.push(tt);
    }
    for (i, t) in obj_tuples.iter().enumerate() {
        let idt: Vec<MorId> = t
            .iter()
            .enumerate()
            .map(|(j, &o)| x.levels[comps[j].0].identity(o))
            .collect();
        b.set_identity(i as ObjId, mor_index[&idt]);
    }
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); obj_tuples.len()];
    for (k, &s) in srcs.iter().enumerate() {
        out_of[s as usize].push(k);
    }
    for (k1, t1) in mor_tuples.iter().enumerate() {
        for &k2 in &out_of[tgts[k1] as usize] {
            let t2 = &mor_tuples[k2];
            let comp: Vec<MorId> = t1
                .iter()
                .zip(t2.iter())
                .enumerate()
                .map(|(j, (&m1, &m2))| {
                    x.levels[comps[j].0]
                        .compose(m2, m1)
                        .expect("componentwise composite")
                })
                .collect();
            b.set_comp(k2 as MorId, k1 as MorId, mor_index[&comp]);
        }
    }
    let inv: Vec<MorId> = mor_tuples
        .iter()
        .map(|t| {
            let it: Vec<MorId> = t
                .iter()
                .enumerate()
                .map(|(j, &m)| x.levels[comps[j].0].inverse(m))
                .collect();
            mor_index[&it]
        })
        .collect();
    let apex = Arc::new(b.finish_unchecked_with_inverses(inv));
    let legs: Vec<GroupoidMap> = (0..comps.len())
        .map(|j| {
            GroupoidMap::new_unchecked(
                apex.clone(),
                x.levels[comps[j].0].clone(),
                obj_tuples.iter().map(|t| t[j]).collect(),
                mor_tuples.iter().map(|t| t[j]).collect(),
            )
        })
        .collect();
    Ok(WeightedLimit {
        weight: a.clone(),
        apex,
        comps,
        legs,
        obj_tuples,
        obj_index,
        mor_tuples,
        mor_index,
    })
}

fn digits_of(name: &str) -> Vec<usize> {
    name.chars().map(|c| c.to_digit(10).unwrap() as usize).collect()
}

/// The canonical map X_n → A∖X for a weight A that is a vertex-labelled
/// subcomplex of Δⁿ, with components given by face words; `taus`, when
/// present, translates each component into a replaced level.
pub fn simplex_cone(
    x: &TruncatedSimplicialGroupoid,
    wl: &WeightedLimit,
    n: usize,
    taus: Option<&[GroupoidMap]>,
) -> GroupoidMap {
    let word_apply = |comp: usize, v0: u32, on_mor: bool| -> u32 {
        let (lvl, idx) = wl.comps[comp];
        let verts = digits_of(&wl.weight.names[lvl][idx]);
        let mut v = v0;
        let mut cur = n;
        for miss in (0..=n).rev() {
            if !verts.contains(&miss) {
                v = if on_mor {
                    x.faces[cur][miss].mor(v)
                } else {
                    x.faces[cur][miss].ob(v)
                };
                cur -= 1;
            }
        }
        if let Some(ts) = taus {
            v = if on_mor { ts[lvl].mor(v) } else { ts[lvl].ob(v) };
        }
        v
    };
    let xn = &x.levels[n];
    let cod = wl.apex.clone();
    let on_obj: Vec<ObjId> = xn
        .objects()
        .map(|o| {
            let t: Vec<ObjId> = (0..wl.comps.len()).map(|j| word_apply(j, o, false)).collect();
            *wl.obj_index.get(&t).expect("cone tuple present in the weighted limit")
        })
        .collect();
    let on_mor: Vec<MorId> = xn
        .morphisms()
        .map(|m| {
            let t: Vec<MorId> = (0..wl.comps.len()).map(|j| word_apply(j, m, true)).collect();
            *wl.mor_index.get(&t).expect("cone tuple present in the weighted limit")
        })
        .collect();
    GroupoidMap::new_unchecked(xn.clone(), cod, on_obj, on_mor)
}

/// Contravariant functoriality: a simplicial map g: A → A′ induces
/// A′∖X → A∖X. Returns the induced functor and the limit weighted by A.
pub fn weighted_limit_map(
    g: &SimplicialMap,
    x: &TruncatedSimplicialGroupoid,
    wl_src: &WeightedLimit,
    budget: &Budget,
) -> Result<(GroupoidMap, WeightedLimit)> {
    if wl_src.weight.as_ref() != g.cod.as_ref() {
        return Err(Error::Precondition(
            "weighted limit does not match the codomain of the weight map".into(),
        ));
    }
    let wl_dom = weighted_limit(&g.dom, x, budget)?;
    let src_pos: HashMap<(usize, usize), usize> = wl_src
        .comps
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let component = |t: &[u32], comp: usize, on_mor: bool| -> u32 {
        let (lvl, idx) = wl_dom.comps[comp];
        let cell = g.at(lvl, idx);
        let (tl, tb, ops) = g.cod.ez(lvl, cell);
        let j = src_pos[&(tl, tb)];
        let mut v = t[j];
        let mut l = tl;
        for &op in ops.iter().rev() {
            v = if on_mor {
                x.degens[l][op].mor(v)
            } else {
                x.degens[l][op].ob(v)
            };
            l += 1;
        }
        v
    };
    let on_obj: Vec<ObjId> = wl_src
        .obj_tuples
        .iter()
        .map(|t| {
            let tt: Vec<ObjId> = (0..wl_dom.comps.len())
                .map(|j| component(t, j, false))
                .collect();
            *wl_dom
                .obj_index
                .get(&tt)
                .expect("restricted tuple present in the weighted limit")
        })
        .collect();
    let on_mor: Vec<MorId> = wl_src
        .mor_tuples
        .iter()
        .map(|t| {
            let tt: Vec<MorId> = (0..wl_dom.comps.len())
                .map(|j| component(t, j, true))
                .collect();
            *wl_dom
                .mor_index
                .get(&tt)
                .expect("restricted tuple present in the weighted limit")
        })
        .collect();
    let map = GroupoidMap::new_unchecked(
        wl_src.apex.clone(),
        wl_dom.apex.clone(),
        on_obj,
        on_mor,
    );
    Ok((map, wl_dom))
}

// ---------------------------------------------------------------------------
// Segal and Reedy structure

/// The n-th Segal map ξ_n: X_n → X_1 ×_{X_0} … ×_{X_0} X_1 presented as the
/// cone into the spine-weighted limit.
pub fn segal_map(
    x: &TruncatedSimplicialGroupoid,
    n: usize,
    budget: &Budget,
) -> Result<(GroupoidMap, WeightedLimit)> {
    if !(2..=x.m).contains(&n) {
        return Err(Error::LevelOutOfRange(format!(
            "Segal map level {n} out of range 2..={}",
            x.m
        )));
    }
    let spine = Arc::new(shape(&Shape::Spine(n), n)?);
    let wl = weighted_limit(&spine, x, budget)?;
    let map = simplex_cone(x, &wl, n, None);
    Ok((map, wl))
}

pub fn is_segal(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<bool> {
    for n in 2..=x.m {
        let (xi, _) = segal_map(x, n, budget)?;
        if !functor_classify(&xi).is_equivalence() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// (d_1, d_0): X_1 → X_0 × X_0 and the 2-Segal map are isofibrations.
pub fn sufficient_fibrancy(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<bool> {
    let prod = product(x.levels[0].clone(), x.levels[0].clone());
    let st = prod.induced(&x.faces[1][1], &x.faces[1][0])?;
    if !functor_classify(&st).isofibration {
        return Ok(false);
    }
    let (xi2, _) = segal_map(x, 2, budget)?;
    Ok(functor_classify(&xi2).isofibration)
}

/// The n-th matching map X_n → ∂Δⁿ∖X.
pub fn matching_map(
    x: &TruncatedSimplicialGroupoid,
    n: usize,
    budget: &Budget,
) -> Result<(GroupoidMap, WeightedLimit)> {
    if n == 0 || n > x.m {
        return Err(Error::LevelOutOfRange(format!(
            "matching level {n} out of range 1..={}",
            x.m
        )));
    }
    let boundary = Arc::new(shape(&Shape::Boundary(n), n)?);
    let wl = weighted_limit(&boundary, x, budget)?;
    let map = simplex_cone(x, &wl, n, None);
    Ok((map, wl))
}

pub fn is_reedy_fibrant(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<bool> {
    for n in 1..=x.m {
        let (mu, _) = matching_map(x, n, budget)?;
        if !functor_classify(&mu).isofibration {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// iso-comma factorization (structured, with index access)

/// The iso-comma factorization of f: D → C: objects (d, ψ: f(d) → c),
/// morphisms the triples (u: d → d′, ψ, ψ′). `first` is an equivalence
/// injective on objects, `second` an isofibration.
pub struct IsoComma {
    pub groupoid: Arc<Groupoid>,
    pub first: GroupoidMap,
    pub second: GroupoidMap,
    pub obj_data: Vec<(ObjId, MorId)>,
    pub obj_index: HashMap<(ObjId, MorId), ObjId>,
    pub mor_data: Vec<(MorId, ObjId, ObjId)>,
    pub mor_index: HashMap<(ObjId, ObjId, MorId), MorId>,
}

/// The degenerate iso-comma of a map that is already an isofibration: the
/// domain itself, with identity witnesses.
fn trivial_iso_comma(f: &GroupoidMap) -> IsoComma {
    let d = &f.dom;
    let c = &f.cod;
    let obj_data: Vec<(ObjId, MorId)> =
        d.objects().map(|a| (a, c.identity(f.ob(a)))).collect();
    let obj_index = obj_data
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as ObjId))
        .collect();
    let mor_data: Vec<(MorId, ObjId, ObjId)> =
        d.morphisms().map(|u| (u, d.src(u), d.tgt(u))).collect();
    let mor_index = mor_data
        .iter()
        .enumerate()
        .map(|(i, &(u, s, t))| ((s, t, u), i as MorId))
        .collect();
    IsoComma {
        groupoid: d.clone(),
        first: GroupoidMap::identity(d.clone()),
        second: f.clone(),
        obj_data,
        obj_index,
        mor_data,
        mor_index,
    }
}

pub fn iso_comma(f: &GroupoidMap, budget: &Budget) -> Result<IsoComma> {
    let d = &f.dom;
    let c = &f.cod;
    let mut obj_data: Vec<(ObjId, MorId)> = Vec::new();
    for a in d.objects() {
        for &psi in c.morphisms_from(f.ob(a)) {
            obj_data.push((a, psi));
        }
    }
    let obj_index: HashMap<(ObjId, MorId), ObjId> = obj_data
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as ObjId))
        .collect();
    let mut mor_data: Vec<(MorId, ObjId, ObjId)> = Vec::new();
    for u in d.morphisms() {
        for &psi in c.morphisms_from(f.ob(d.src(u))) {
            for &psi2 in c.morphisms_from(f.ob(d.tgt(u))) {
                mor_data.push((u, obj_index[&(d.src(u), psi)], obj_index[&(d.tgt(u), psi2)]));
            }
        }
    }
    if !budget.admits(obj_data.len(), mor_data.len()) {
        return Err(Error::BudgetExceeded(format!(
            "iso-comma of size {}/{} exceeds the budget",
            obj_data.len(),
            mor_data.len()
        )));
    }
    let mor_index: HashMap<(ObjId, ObjId, MorId), MorId> = mor_data
        .iter()
        .enumerate()
        .map(|(i, &(u, s, t))| ((s, t, u), i as MorId))
        .collect();
    let mut b = GroupoidBuilder::new();
    for (i, &(a, psi)) in obj_data.iter().enumerate() {
        let _ = (a, psi);
        b.add_object(format!("c{i}"));
    }
    for (k, &(u, s, t)) in mor_data.iter().enumerate() {
        let _ = u;
        b.add_morphism(format!("cm{k}"), s, t);
    }
    for (i, &(a, _)) in obj_data.iter().enumerate() {
        b.set_identity(
            i as ObjId,
            mor_index[&(i as ObjId, i as ObjId, d.identity(a))],
        );
    }
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); obj_data.len()];
    for (k, &(_, s, _)) in mor_data.iter().enumerate() {
        out_of[s as usize].push(k);
    }
    for (k1, &(u1, s1, t1)) in mor_data.iter().enumerate() {
        let _ = s1;
        for &k2 in &out_of[t1 as usize] {
            let (u2, _, t2) = mor_data[k2];
            let comp = mor_index[&(mor_data[k1].1, t2, d.compose(u2, u1).unwrap())];
            b.set_comp(k2 as MorId, k1 as MorId, comp);
        }
    }
    let inv: Vec<MorId> = mor_data
        .iter()
        .map(|&(u, s, t)| mor_index[&(t, s, d.inverse(u))])
        .collect();
    let g = Arc::new(b.finish_unchecked_with_inverses(inv));
    let first = GroupoidMap::new_unchecked(
        d.clone(),
        g.clone(),
        d.objects().map(|a| obj_index[&(a, c.identity(f.ob(a)))]).collect(),
        d.morphisms()
            .map(|u| {
                let s = obj_index[&(d.src(u), c.identity(f.ob(d.src(u))))];
                let t = obj_index[&(d.tgt(u), c.identity(f.ob(d.tgt(u))))];
                mor_index[&(s, t, u)]
            })
            .collect(),
    );
    let second = GroupoidMap::new_unchecked(
        g.clone(),
        c.clone(),
        obj_data.iter().map(|&(_, psi)| c.tgt(psi)).collect(),
        mor_data
            .iter()
            .map(|&(u, s, t)| {
                let psi = obj_data[s as usize].1;
                let psi2 = obj_data[t as usize].1;
                c.compose(psi2, c.compose(f.mor(u), c.inverse(psi)).unwrap())
                    .unwrap()
            })
            .collect(),
    );
    Ok(IsoComma {
        groupoid: g,
        first,
        second,
        obj_data,
        obj_index,
        mor_data,
        mor_index,
    })
}

// ---------------------------------------------------------------------------
// Reedy replacement

pub struct ReedyReplacement {
    pub replaced: TruncatedSimplicialGroupoid,
    /// levelwise equivalences τ_n: X_n → X̃_n (identities at levels 0, 1)
    pub tau: Vec<GroupoidMap>,
    /// with the special level-2 factorization: the fibration
    /// X̃_2 ↠ M_2X ×_{X_0} Δ*X_1 and the projection π_1 to M_2X
    pub level2_pair: Option<(GroupoidMap, GroupoidMap)>,
}

/// Position of the boundary component with the given vertex set.
fn boundary_comp(wl: &WeightedLimit, verts: &[usize]) -> usize {
    let name: String = verts.iter().map(|v| v.to_string()).collect();
    wl.comps
        .iter()
        .position(|&(lvl, idx)| wl.weight.names[lvl][idx] == name)
        .expect("boundary component present")
}

/// Reedy fibrant replacement of a sufficiently fibrant X at m ∈ {2, 3}:
/// levels 0 and 1 are kept, level 2 (and 3) are replaced through iso-comma
/// factorizations of the (translated) matching cones, with degeneracies
/// given by explicit formulas.
pub fn reedy_replace(
    x: &TruncatedSimplicialGroupoid,
    special_level2: bool,
    budget: &Budget,
) -> Result<ReedyReplacement> {
    if !(2..=3).contains(&x.m) {
        return Err(Error::LevelOutOfRange(format!(
            "replacement supports truncation 2..=3, got {}",
            x.m
        )));
    }
    let id0 = GroupoidMap::identity(x.levels[0].clone());
    let id1 = GroupoidMap::identity(x.levels[1].clone());
    // level 2
    let m2 = {
        let boundary = Arc::new(shape(&Shape::Boundary(2), 2)?);
        weighted_limit(&boundary, x, budget)?
    };
    let cone2 = simplex_cone(x, &m2, 2, None);
    // edge legs of the matching object: face j ↦ the edge missing vertex j
    let edge_pos: Vec<usize> = (0..3)
        .map(|j| {
            let verts: Vec<usize> = (0..=2).filter(|&v| v != j).collect();
            boundary_comp(&m2, &verts)
        })
        .collect();
    // q2: X_2 → C2 with edge extraction maps C2 → X_1
    let (q2, c2_edge_legs, level2_pair): (GroupoidMap, Vec<GroupoidMap>, Option<_>) =
        if special_level2 {
            // Δ*X_1: loops over X_0
            let prod = product(x.levels[0].clone(), x.levels[0].clone());
            let st = prod.induced(&x.faces[1][1], &x.faces[1][0])?;
            let diag = prod.induced(&id0, &id0)?;
            let loops = pullback(&st, &diag)?;
            // vertex-0 leg of the matching object
            let v0 = boundary_comp(&m2, &[0]);
            let w = pullback(&m2.legs[v0].clone(), &loops.right)?;
            let d11 = x.faces[1][1].compose(&x.faces[2][1]);
            let to_loops = loops.induced(&x.degens[0][0].compose(&d11), &d11)?;
            let q2 = w.induced(&cone2, &to_loops)?;
            let legs = edge_pos
                .iter()
                .map(|&pos| m2.legs[pos].compose(&w.left))
                .collect();
            (q2, legs, Some(w))
        } else {
            let legs = edge_pos.iter().map(|&pos| m2.legs[pos].clone()).collect();
            (cone2, legs, None)
        };
    // levels whose matching cone is already an isofibration are kept as they
    // are: the factorization is (identity, cone)
    let ic2 = if functor_classify(&q2).isofibration {
        trivial_iso_comma(&q2)
    } else {
        iso_comma(&q2, budget)?
    };
    let tau2 = ic2.first.clone();
    let d2_new: Vec<GroupoidMap> = (0..3)
        .map(|j| c2_edge_legs[j].compose(&ic2.second))
        .collect();
    let s2_new: Vec<GroupoidMap> = (0..2).map(|i| tau2.compose(&x.degens[1][i])).collect();
    let level2_pair_out = level2_pair.as_ref().map(|w| {
        (
            ic2.second.clone(),
            w.left.clone(),
        )
    });
    if x.m == 2 {
        let replaced = TruncatedSimplicialGroupoid {
            m: 2,
            levels: vec![x.levels[0].clone(), x.levels[1].clone(), ic2.groupoid.clone()],
            faces: vec![vec![], x.faces[1].clone(), d2_new],
            degens: vec![x.degens[0].clone(), s2_new, vec![]],
        };
        return Ok(ReedyReplacement {
            replaced,
            tau: vec![id0, id1, tau2],
            level2_pair: level2_pair_out,
        });
    }
    // partial replaced object up to level 2
    let partial = TruncatedSimplicialGroupoid {
        m: 2,
        levels: vec![
            x.levels[0].clone(),
            x.levels[1].clone(),
            ic2.groupoid.clone(),
        ],
        faces: vec![vec![], x.faces[1].clone(), d2_new.clone()],
        degens: vec![x.degens[0].clone(), s2_new.clone(), vec![]],
    };
    // level 3: matching object of the partial replacement
    let m3 = {
        let boundary = Arc::new(shape(&Shape::Boundary(3), 3)?);
        weighted_limit(&boundary, &partial, budget)?
    };
    let taus = [id0.clone(), id1.clone(), tau2.clone()];
    let q3 = simplex_cone(x, &m3, 3, Some(&taus));
    let ic3 = if functor_classify(&q3).isofibration {
        trivial_iso_comma(&q3)
    } else {
        iso_comma(&q3, budget)?
    };
    let tau3 = ic3.first.clone();
    let facet_pos: Vec<usize> = (0..4)
        .map(|j| {
            let verts: Vec<usize> = (0..=3).filter(|&v| v != j).collect();
            boundary_comp(&m3, &verts)
        })
        .collect();
    let d3_new: Vec<GroupoidMap> = (0..4)
        .map(|j| m3.legs[facet_pos[j]].compose(&ic3.second))
        .collect();
    // derivation paths for the lower components of ∂Δ³: each edge from a
    // containing facet, each vertex from a containing edge
    let wb = &m3.weight;
    let mut derive: Vec<Option<(usize, usize, usize)>> = vec![None; m3.comps.len()];
    // (container position, container level, face index)
    for (pos, &(lvl, idx)) in m3.comps.iter().enumerate() {
        if lvl == 2 {
            continue;
        }
        'found: for (cpos, &(clvl, cidx)) in m3.comps.iter().enumerate() {
            if clvl != lvl + 1 {
                continue;
            }
            for fi in 0..=clvl {
                if wb.face(clvl, fi, cidx) == idx {
                    derive[pos] = Some((cpos, clvl, fi));
                    break 'found;
                }
            }
        }
    }
    // face maps of the partial replacement per level
    let pface = |lvl: usize, i: usize| -> &GroupoidMap { &partial.faces[lvl][i] };
    // degeneracy s̃_i: X̃_2 → X̃_3 via the explicit lifting formula
    let mut s3_new: Vec<GroupoidMap> = Vec::with_capacity(3);
    let x1 = &x.levels[1];
    let _ = x1;
    let c2g = &ic2.groupoid;
    for i in 0..3 {
        let si2 = &x.degens[2][i]; // X_2 → X_3
        let s_lvl1 = |ii: usize| &x.degens[1][ii]; // X_1 → X_2
        // object images
        let mut on_obj: Vec<ObjId> = Vec::with_capacity(c2g.n_objects());
        for ob in c2g.objects() {
            let (a, psi) = ic2.obj_data[ob as usize];
            let c = si2.ob(a);
            // triangle components of the connecting morphism φ in M3
            let mut phi: Vec<MorId> = vec![0; m3.comps.len()];
            for j in 0..4 {
                let comp_mor: MorId = if j == i || j == i + 1 {
                    // (a, id) → (a, ψ) through id_a
                    let src = ic2.obj_index[&(a, q2.cod.identity(q2.ob(a)))];
                    ic2.mor_index[&(src, ob, x.levels[2].identity(a))]
                } else {
                    let (ip, jp) = if j < i { (i - 1, j) } else { (i, j - 1) };
                    let psi_j = c2_edge_legs[jp].mor(psi); // d_{jp} a → e′ in X_1
                    let u = s_lvl1(ip).mor(psi_j); // in X_2
                    let sa = s_lvl1(ip).ob(x.faces[2][jp].ob(a));
                    let se = s_lvl1(ip).ob(x.levels[1].tgt(psi_j));
                    let src = ic2.obj_index[&(sa, q2.cod.identity(q2.ob(sa)))];
                    let tgt = ic2.obj_index[&(se, q2.cod.identity(q2.ob(se)))];
                    ic2.mor_index[&(src, tgt, u)]
                };
                phi[facet_pos[j]] = comp_mor;
            }
            // lower components by propagation through the replaced faces
            for pos in 0..m3.comps.len() {
                if let Some((cpos, clvl, fi)) = derive[pos] {
                    phi[pos] = pface(clvl, fi).mor(phi[cpos]);
                }
            }
            let mid = *m3
                .mor_index
                .get(&phi)
                .expect("degeneracy connecting morphism present in the matching object");
            on_obj.push(ic3.obj_index[&(c, mid)]);
        }
        let on_mor: Vec<MorId> = c2g
            .morphisms()
            .map(|mm| {
                let (u, s, t) = ic2.mor_data[mm as usize];
                ic3.mor_index[&(on_obj[s as usize], on_obj[t as usize], si2.mor(u))]
            })
            .collect();
        s3_new.push(GroupoidMap::new_unchecked(
            c2g.clone(),
            ic3.groupoid.clone(),
            on_obj,
            on_mor,
        ));
    }
    let replaced = TruncatedSimplicialGroupoid {
        m: 3,
        levels: vec![
            x.levels[0].clone(),
            x.levels[1].clone(),
            ic2.groupoid.clone(),
            ic3.groupoid.clone(),
        ],
        faces: vec![vec![], x.faces[1].clone(), d2_new, d3_new],
        degens: vec![x.degens[0].clone(), s2_new, s3_new, vec![]],
    };
    Ok(ReedyReplacement {
        replaced,
        tau: vec![id0, id1, tau2, tau3],
        level2_pair: level2_pair_out,
    })
}

// ---------------------------------------------------------------------------
// the equivalence bundle

/// Inv(X), the left/right-inverse fibrations over X_1, the object of
/// equivalences, and the canonical unit X_0 → Equiv(X).
pub struct EquivBundle {
    pub inv: Arc<Groupoid>,
    pub linv: GroupoidMap,
    pub rinv: GroupoidMap,
    pub equiv: Arc<Groupoid>,
    pub to_x1: GroupoidMap,
    pub unit: GroupoidMap,
    /// Δ*X_2 together with the pair (Δ*d_1, Δ*s), for the strict-equalizer
    /// comparison
    pub delta_x2: Arc<Groupoid>,
    pub delta_d1: GroupoidMap,
    pub delta_s: GroupoidMap,
}

pub fn inv_object(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<EquivBundle> {
    if !sufficient_fibrancy(x, budget)? {
        return Err(Error::Precondition(
            "equivalence bundle requires sufficient fibrancy".into(),
        ));
    }
    let id0 = GroupoidMap::identity(x.levels[0].clone());
    let prod = product(x.levels[0].clone(), x.levels[0].clone());
    let st = prod.induced(&x.faces[1][1], &x.faces[1][0])?;
    let diag = prod.induced(&id0, &id0)?;
    // Δ*X_1: loops, fibered over X_0 by the right leg
    let loops = pullback(&st, &diag)?;
    // Δ*X_2: triangles with endo 1-boundary
    let dx2 = pullback(&x.faces[2][1], &loops.left)?;
    let delta_d1 = dx2.right.clone();
    let d11 = x.faces[1][1].compose(&x.faces[2][1]);
    let to_x2 = dx2.left.clone();
    let delta_s = loops.induced(
        &x.degens[0][0].compose(&d11).compose(&to_x2),
        &d11.compose(&to_x2),
    )?;
    // fiberwise path object of Δ*X_1 ↠ X_0
    let pw = fiberwise_path_object(&loops.right);
    let ll = pullback(&loops.right, &loops.right)?;
    let evals = ll.induced(&pw.eval0, &pw.eval1)?;
    let pairmap = ll.induced(&delta_d1, &delta_s)?;
    let inv_span = pullback(&evals, &pairmap)?;
    let inv = inv_span.apex.clone();
    let linv = x.faces[2][2].compose(&to_x2).compose(&inv_span.right);
    let rinv = x.faces[2][0].compose(&to_x2).compose(&inv_span.right);
    let eq_span = pullback(&linv, &rinv)?;
    let equiv = eq_span.apex.clone();
    let to_x1 = linv.compose(&eq_span.left);
    // canonical unit: the identity edge with the doubly degenerate triangle
    // witness and identity paths
    let s0 = &x.degens[0][0];
    let s00 = x.degens[1][0].compose(s0);
    let jloop = loops.induced(s0, &id0)?;
    let jdx2 = dx2.induced(&s00, &jloop)?;
    let jpath = pw.refl.compose(&jloop);
    let jinv = inv_span.induced(&jpath, &jdx2)?;
    let unit = eq_span.induced(&jinv, &jinv)?;
    Ok(EquivBundle {
        inv,
        linv,
        rinv,
        equiv,
        to_x1,
        unit,
        delta_x2: dx2.apex.clone(),
        delta_d1,
        delta_s,
    })
}

/// The strict equalizer of (Δ*d_1, Δ*s), exposed for the J²-weighted
/// comparison.
pub fn strict_inv_equalizer(bundle: &EquivBundle) -> Result<(Arc<Groupoid>, GroupoidMap)> {
    crate::limits::equalizer(&bundle.delta_d1, &bundle.delta_s)
}

/// X is univalent when the canonical unit X_0 → Equiv(X) is an equivalence
/// of groupoids.
pub fn is_univalent_segal(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<bool> {
    let b = inv_object(x, budget)?;
    Ok(functor_classify(&b.unit).is_equivalence())
}

/// When X fails univalence because the unit misses part of Equiv(X), this
/// names one Equiv object outside the unit's essential image; None when
/// the unit is essentially surjective (failure, if any, is then on homs).
pub fn univalence_witness(
    x: &TruncatedSimplicialGroupoid,
    budget: &Budget,
) -> Result<Option<String>> {
    let b = inv_object(x, budget)?;
    let eq = &b.equiv;
    let mut hit = vec![false; eq.n_objects()];
    for o in x.levels[0].objects() {
        let img = b.unit.ob(o);
        hit[img as usize] = true;
        for &m in eq.morphisms_from(img) {
            hit[eq.tgt(m) as usize] = true;
        }
    }
    Ok(eq
        .objects()
        .find(|&e| !hit[e as usize])
        .map(|e| eq.obj_name(e).to_string()))
}

/// X is complete when the map K∖X → X_0 induced by the second endpoint of
/// the walking biinvertible edge is a trivial fibration. Requires Reedy
/// fibrancy (replace first otherwise).
pub fn is_complete(x: &TruncatedSimplicialGroupoid, budget: &Budget) -> Result<bool> {
    if x.m < 3 {
        return Err(Error::LevelOutOfRange(
            "completeness needs truncation level at least 3".into(),
        ));
    }
    if !is_reedy_fibrant(x, budget)? {
        return Err(Error::Precondition(
            "completeness queried on a non-Reedy-fibrant object".into(),
        ));
    }
    let (profile, _) = completeness_profile(x, budget)?;
    Ok(profile.is_trivial_fibration())
}

/// The classification profile of the endpoint-evaluation map K∖X → X_0
/// together with the (objects, morphisms) census of the K-weighted apex;
/// completeness is exactly `profile.is_trivial_fibration()`. Assumes the
/// caller has checked Reedy fibrancy.
pub fn completeness_profile(
    x: &TruncatedSimplicialGroupoid,
    budget: &Budget,
) -> Result<(crate::map::FunctorProfile, (usize, usize))> {
    let (k, _, _) = k_interval(3);
    let k = Arc::new(k);
    let wl = weighted_limit(&k, x, budget)?;
    let v1 = k
        .names[0]
        .iter()
        .position(|n| n == "L.1")
        .expect("vertex 1 of the interval");
    let vm = SimplicialMap::from_vertex(k.clone(), v1);
    let (restrict, wl_pt) = weighted_limit_map(&vm, x, &wl, budget)?;
    let to_x0 = wl_pt.legs[0].compose(&restrict);
    let census = (wl.apex.n_objects(), wl.apex.n_morphisms());
    Ok((functor_classify(&to_x0), census))
}

// ---------------------------------------------------------------------------
// maps of simplicial groupoids, DK-classification

#[derive(Clone, Debug)]
pub struct SimplicialGroupoidMap {
    pub dom: TruncatedSimplicialGroupoid,
    pub cod: TruncatedSimplicialGroupoid,
    pub levels: Vec<GroupoidMap>,
}

impl SimplicialGroupoidMap {
    pub fn validate(&self) -> Result<()> {
        let m = self.dom.m.min(self.cod.m);
        if self.levels.len() != m + 1 {
            return Err(Error::InvalidFunctor("level count mismatch".into()));
        }
        for l in &self.levels {
            l.validate()?;
        }
        for n in 1..=m {
            for i in 0..=n {
                let lhs = self.levels[n - 1].compose(&self.dom.faces[n][i]);
                let rhs = self.cod.faces[n][i].compose(&self.levels[n]);
                if !maps_equal(&lhs, &rhs) {
                    return Err(Error::InvalidFunctor(format!(
                        "face commutation fails at level {n}, d_{i}"
                    )));
                }
            }
        }
        for n in 0..m {
            for i in 0..=n {
                let lhs = self.levels[n + 1].compose(&self.dom.degens[n][i]);
                let rhs = self.cod.degens[n][i].compose(&self.levels[n]);
                if !maps_equal(&lhs, &rhs) {
                    return Err(Error::InvalidFunctor(format!(
                        "degeneracy commutation fails at level {n}, s_{i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The stacked pullbacks over a map of Segal objects: Mf over f↓Y over
/// X_0 × Y_0, with all legs.
pub struct MObject {
    pub mf: Arc<Groupoid>,
    pub to_equiv: GroupoidMap,
    pub f_down_y: Arc<Groupoid>,
    pub to_x0y0: GroupoidMap,
    pub to_y0: GroupoidMap,
}

pub fn m_object(f: &SimplicialGroupoidMap, budget: &Budget) -> Result<MObject> {
    let y = &f.cod;
    let bundle = inv_object(y, budget)?;
    let prod_y = product(y.levels[0].clone(), y.levels[0].clone());
    let st = prod_y.induced(&y.faces[1][1], &y.faces[1][0])?;
    let prod_xy = product(f.dom.levels[0].clone(), y.levels[0].clone());
    let f0x1 = prod_y.induced(
        &f.levels[0].compose(&prod_xy.left),
        &prod_xy.right,
    )?;
    let fy = pullback(&st, &f0x1)?;
    let mf = pullback(&bundle.to_x1, &fy.left)?;
    let to_y0 = prod_xy
        .right
        .compose(&fy.right)
        .compose(&mf.right);
    Ok(MObject {
        mf: mf.apex.clone(),
        to_equiv: mf.left.clone(),
        f_down_y: fy.apex.clone(),
        to_x0y0: fy.right.compose(&mf.right),
        to_y0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DkReport {
    pub fully_faithful: bool,
    pub essentially_surjective: bool,
    pub dk: bool,
}

pub fn dk_classify(f: &SimplicialGroupoidMap, budget: &Budget) -> Result<DkReport> {
    let x = &f.dom;
    let y = &f.cod;
    let prod_y = product(y.levels[0].clone(), y.levels[0].clone());
    let st_y = prod_y.induced(&y.faces[1][1], &y.faces[1][0])?;
    let prod_x = product(x.levels[0].clone(), x.levels[0].clone());
    let st_x = prod_x.induced(&x.faces[1][1], &x.faces[1][0])?;
    let f0f0 = prod_y.induced(
        &f.levels[0].compose(&prod_x.left),
        &f.levels[0].compose(&prod_x.right),
    )?;
    let pb = pullback(&st_y, &f0f0)?;
    let comparison = pb.induced(&f.levels[1], &st_x)?;
    let fully_faithful = functor_classify(&comparison).is_equivalence();
    let mobj = m_object(f, budget)?;
    let essentially_surjective = functor_classify(&mobj.to_y0).essentially_surjective;
    Ok(DkReport {
        fully_faithful,
        essentially_surjective,
        dk: fully_faithful && essentially_surjective,
    })
}

// ---------------------------------------------------------------------------
// functoriality of the nerve

/// The levelwise map of nerves induced by a homotopy-cartesian square whose
/// top functor restricts to isomorphisms on fibers.
pub fn induced_nerve_map(
    sq: &FibrationSquare,
    m: usize,
    budget: &Budget,
) -> Result<(SimplicialGroupoidMap, NerveData, NerveData)> {
    if !verify_homotopy_cartesian(sq)? {
        return Err(Error::Precondition(
            "induced nerve map requires a homotopy-cartesian square".into(),
        ));
    }
    let nd = nerve(&sq.p, m, budget)?;
    let nd2 = nerve(&sq.p_prime, m, budget)?;
    let base = sq.p.base();
    let bottom = &sq.bottom;
    let nm = base.n_morphisms() as MorId;
    let n2 = sq.p_prime.base().n_objects() as ObjId;
    let nm2 = sq.p_prime.base().n_morphisms() as MorId;
    // strict fiber isomorphisms induced by the top functor
    let mut fiber_iso: Vec<GroupoidMap> = Vec::new();
    let mut fiber_iso_inv: Vec<GroupoidMap> = Vec::new();
    for a in base.objects() {
        let fa = sq.p.fiber(a);
        let fa2 = sq.p_prime.fiber(bottom.ob(a));
        let map = GroupoidMap::new_unchecked(
            fa.groupoid.clone(),
            fa2.groupoid.clone(),
            fa.obj_total
                .iter()
                .map(|&t| fa2.obj_from_total(sq.top.ob(t)))
                .collect(),
            fa.mor_total
                .iter()
                .map(|&t| fa2.mor_from_total(sq.top.mor(t)))
                .collect(),
        );
        let inv = map.invert_iso().map_err(|_| {
            Error::Precondition(
                "induced nerve map requires strict fiber isomorphisms".into(),
            )
        })?;
        fiber_iso.push(map);
        fiber_iso_inv.push(inv);
    }
    let translate = |a: ObjId, c: ObjId, g: &GroupoidMap| -> (ObjId, ObjId, GroupoidMap) {
        let fa = bottom.ob(a);
        let fc = bottom.ob(c);
        let g2 = fiber_iso[c as usize]
            .compose(g)
            .compose(&fiber_iso_inv[a as usize]);
        (fa, fc, g2)
    };
    let on_obj: Vec<ObjId> = nd
        .cat
        .object_functors
        .iter()
        .map(|(a, c, g)| {
            let (fa, fc, g2) = translate(*a, *c, g);
            let gi = nd2.cat.homs[fa as usize][fc as usize]
                .functor_index(&g2)
                .expect("translated functor enumerated");
            nd2.cat.data.obj_index[&(fa * n2 + fc, gi)]
        })
        .collect();
    let on_mor: Vec<MorId> = (0..nd.cat.arrows.n_morphisms())
        .map(|k| {
            let (o, uv, miso) = nd.cat.data.mor_triples[k];
            let (u1, v1) = (uv / nm, uv % nm);
            let (a2, c2) = (base.tgt(u1), base.tgt(v1));
            let theta = &nd.cat.homs[a2 as usize][c2 as usize].isos[miso as usize];
            let (fa2, fc2, src2) = translate(a2, c2, &theta.src);
            let (_, _, tgt2) = translate(a2, c2, &theta.tgt);
            let comps: Vec<MorId> = sq
                .p_prime
                .fiber(fa2)
                .groupoid
                .objects()
                .map(|y2| {
                    fiber_iso[c2 as usize].mor(theta.at(fiber_iso_inv[a2 as usize].ob(y2)))
                })
                .collect();
            let theta2 = NatIso::new_unchecked(src2, tgt2, comps);
            let mi = nd2.cat.homs[fa2 as usize][fc2 as usize]
                .iso_morphism(&theta2)
                .expect("translated 2-cell enumerated");
            let uv2 = bottom.mor(u1) * nm2 + bottom.mor(v1);
            nd2.cat.data.mor_index[&(on_obj[o as usize], uv2, mi)]
        })
        .collect();
    let l1 = GroupoidMap::new_unchecked(
        nd.cat.arrows.clone(),
        nd2.cat.arrows.clone(),
        on_obj,
        on_mor,
    );
    let mut levels = vec![bottom.clone(), l1.clone()];
    let l2 = nd2.cat.composable.induced(
        &l1.compose(&nd.cat.composable.left),
        &l1.compose(&nd.cat.composable.right),
    )?;
    levels.push(l2.clone());
    if m == 3 {
        let c3 = nd.c3.as_ref().expect("level-3 span");
        let c32 = nd2.c3.as_ref().expect("level-3 span");
        let l3 = c32.induced(&l2.compose(&c3.left), &l1.compose(&c3.right))?;
        levels.push(l3);
    }
    let map = SimplicialGroupoidMap {
        dom: nd.x.clone(),
        cod: nd2.x.clone(),
        levels,
    };
    Ok((map, nd, nd2))
}

/// Completion of a nerve: runs the univalent completion of p, Reedy-replaces
/// the nerve of the completed fibration, and returns the induced map.
pub struct RezkCompletion {
    pub complete: TruncatedSimplicialGroupoid,
    pub map: SimplicialGroupoidMap,
    pub completed_fibration: Fibration,
    pub square: FibrationSquare,
}

pub fn rezk_complete_nerve(
    p: &Fibration,
    u: &UniverseData,
    b: &GroupoidMap,
    m: usize,
    budget: &Budget,
) -> Result<RezkCompletion> {
    let (up, sq) = crate::fib::univalent_complete(p, u, b, budget)?;
    let (nmap, _, nd2) = induced_nerve_map(&sq, m, budget)?;
    let rr = reedy_replace(&nd2.x, false, budget)?;
    let levels: Vec<GroupoidMap> = nmap
        .levels
        .iter()
        .enumerate()
        .map(|(n, l)| rr.tau[n].compose(l))
        .collect();
    let map = SimplicialGroupoidMap {
        dom: nmap.dom,
        cod: rr.replaced.clone(),
        levels,
    };
    Ok(RezkCompletion {
        complete: rr.replaced,
        map,
        completed_fibration: up,
        square: sq,
    })
}

// ---------------------------------------------------------------------------
// bounded search for functors over a common base

/// Finds a functor F: A → B with q_B ∘ F = q_A, optionally required to be an
/// equivalence, skipping one known solution. Deterministic backtracking with
/// identity/inverse forcing and incremental composition checks; the node
/// budget is `budget.max_morphisms`.
pub fn find_functor_over(
    a: &Arc<Groupoid>,
    b: &Arc<Groupoid>,
    qa: &GroupoidMap,
    qb: &GroupoidMap,
    want_equivalence: bool,
    skip: Option<&GroupoidMap>,
    budget: &Budget,
) -> Result<Option<GroupoidMap>> {
    let mut obj_img: Vec<Option<ObjId>> = vec![None; a.n_objects()];
    let mut mor_img: Vec<Option<MorId>> = vec![None; a.n_morphisms()];
    let mut nodes: usize = 0;
    fn mor_search(
        a: &Arc<Groupoid>,
        b: &Arc<Groupoid>,
        qa: &GroupoidMap,
        qb: &GroupoidMap,
        want_equivalence: bool,
        skip: Option<&GroupoidMap>,
        obj_img: &[ObjId],
        mor_img: &mut Vec<Option<MorId>>,
        k: MorId,
        nodes: &mut usize,
        cap: usize,
    ) -> Result<Option<GroupoidMap>> {
        let n = a.n_morphisms() as MorId;
        if k == n {
            let f = GroupoidMap::new_unchecked(
                a.clone(),
                b.clone(),
                obj_img.to_vec(),
                mor_img.iter().map(|m| m.unwrap()).collect(),
            );
            if f.validate().is_err() {
                return Ok(None);
            }
            if let Some(s) = skip {
                if maps_equal(&f, s) {
                    return Ok(None);
                }
            }
            if want_equivalence && !functor_classify(&f).is_equivalence() {
                return Ok(None);
            }
            return Ok(Some(f));
        }
        if mor_img[k as usize].is_some() {
            return mor_search(
                a, b, qa, qb, want_equivalence, skip, obj_img, mor_img, k + 1, nodes, cap,
            );
        }
        let (s, t) = (a.src(k), a.tgt(k));
        let (bs, bt) = (obj_img[s as usize], obj_img[t as usize]);
        let cands: Vec<MorId> = b
            .morphisms_from(bs)
            .iter()
            .copied()
            .filter(|&mm| b.tgt(mm) == bt && qb.mor(mm) == qa.mor(k))
            .collect();
        'cand: for mm in cands {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::BudgetExceeded("functor search budget".into()));
            }
            // incremental composition checks against assigned morphisms
            for j in 0..k {
                let Some(mj) = mor_img[j as usize] else { continue };
                if a.tgt(j) == s {
                    if let Some(c) = a.compose(k, j) {
                        if c < k || c == k {
                            let ci = if c == k { mm } else { mor_img[c as usize].unwrap_or(u32::MAX) };
                            if ci != u32::MAX && b.compose(mm, mj) != Some(ci) {
                                continue 'cand;
                            }
                        }
                    }
                }
                if a.src(j) == t {
                    if let Some(c) = a.compose(j, k) {
                        if c <= k {
                            let ci = if c == k { mm } else { mor_img[c as usize].unwrap_or(u32::MAX) };
                            if ci != u32::MAX && b.compose(mj, mm) != Some(ci) {
                                continue 'cand;
                            }
                        }
                    }
                }
            }
            let inv = a.inverse(k);
            let prev_inv = mor_img[inv as usize];
            mor_img[k as usize] = Some(mm);
            if inv != k {
                match prev_inv {
                    Some(pi) if pi != b.inverse(mm) => {
                        mor_img[k as usize] = None;
                        continue 'cand;
                    }
                    None => mor_img[inv as usize] = Some(b.inverse(mm)),
                    _ => {}
                }
            }
            let r = mor_search(
                a, b, qa, qb, want_equivalence, skip, obj_img, mor_img, k + 1, nodes, cap,
            )?;
            if r.is_some() {
                return Ok(r);
            }
            mor_img[k as usize] = None;
            if inv != k && prev_inv.is_none() {
                mor_img[inv as usize] = None;
            }
        }
        Ok(None)
    }
    fn obj_search(
        a: &Arc<Groupoid>,
        b: &Arc<Groupoid>,
        qa: &GroupoidMap,
        qb: &GroupoidMap,
        want_equivalence: bool,
        skip: Option<&GroupoidMap>,
        obj_img: &mut Vec<Option<ObjId>>,
        mor_img: &mut Vec<Option<MorId>>,
        k: ObjId,
        nodes: &mut usize,
        cap: usize,
    ) -> Result<Option<GroupoidMap>> {
        if k == a.n_objects() as ObjId {
            let objs: Vec<ObjId> = obj_img.iter().map(|o| o.unwrap()).collect();
            // force identities
            for x in a.objects() {
                mor_img[a.identity(x) as usize] = Some(b.identity(objs[x as usize]));
            }
            let r = mor_search(
                a, b, qa, qb, want_equivalence, skip, &objs, mor_img, 0, nodes, cap,
            );
            for m in mor_img.iter_mut() {
                *m = None;
            }
            return r;
        }
        for cand in b.objects() {
            if qb.ob(cand) != qa.ob(k) {
                continue;
            }
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::BudgetExceeded("functor search budget".into()));
            }
            obj_img[k as usize] = Some(cand);
            let r = obj_search(
                a, b, qa, qb, want_equivalence, skip, obj_img, mor_img, k + 1, nodes, cap,
            )?;
            if r.is_some() {
                return Ok(r);
            }
            obj_img[k as usize] = None;
        }
        Ok(None)
    }
    obj_search(
        a,
        b,
        qa,
        qb,
        want_equivalence,
        skip,
        &mut obj_img,
        &mut mor_img,
        0,
        &mut nodes,
        budget.max_morphisms,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fib::{set_universe, Fibration};
    use crate::groupoid::{delooping, discrete, terminal, GroupTable};
    use crate::map::FunctorProfile;

    fn wide() -> Budget {
        Budget::wide()
    }

    fn bz2_over_point() -> Fibration {
        let t = Arc::new(terminal());
        let e = Arc::new(delooping(&GroupTable::cyclic(2)));
        Fibration::new(GroupoidMap::to_terminal(e, t)).unwrap()
    }

    fn id_fibration(g: Arc<Groupoid>) -> Fibration {
        Fibration::new(GroupoidMap::identity(g)).unwrap()
    }

    #[test]
    fn nerve_validates_and_is_segal() {
        let p = bz2_over_point();
        let nd = nerve(&p, 3, &wide()).unwrap();
        nd.x.validate().unwrap();
        assert!(sufficient_fibrancy(&nd.x, &wide()).unwrap());
        assert!(is_segal(&nd.x, &wide()).unwrap());
        // the 2-Segal map of a nerve is an isomorphism
        let (xi2, _) = segal_map(&nd.x, 2, &wide()).unwrap();
        assert!(xi2.invert_iso().is_ok());
    }

    #[test]
    fn nerve_of_identity_on_terminal_is_trivial() {
        let t = Arc::new(terminal());
        let p = id_fibration(t);
        let nd = nerve(&p, 3, &wide()).unwrap();
        nd.x.validate().unwrap();
        for l in &nd.x.levels {
            assert_eq!(l.n_objects(), 1);
        }
    }

    #[test]
    fn simplex_weight_recovers_level() {
        let p = bz2_over_point();
        let nd = nerve(&p, 3, &wide()).unwrap();
        for n in [1usize, 2] {
            let w = Arc::new(shape(&Shape::Simplex(n), n).unwrap());
            let wl = weighted_limit(&w, &nd.x, &wide()).unwrap();
            let cone = simplex_cone(&nd.x, &wl, n, None);
            assert!(cone.invert_iso().is_ok(), "Δ^{n}-weighted limit is X_{n}");
        }
    }

    #[test]
    fn boundary_one_weight_is_square_of_x0() {
        let g = Arc::new(discrete(2));
        let p = id_fibration(g);
        let nd = nerve(&p, 2, &wide()).unwrap();
        let w = Arc::new(shape(&Shape::Boundary(1), 1).unwrap());
        let wl = weighted_limit(&w, &nd.x, &wide()).unwrap();
        assert_eq!(wl.apex.n_objects(), 4);
    }

    #[test]
    fn constant_simplicial_at_discrete_is_segal_and_univalent() {
        let g = Arc::new(discrete(2));
        let x = constant_simplicial(&g, 3);
        x.validate().unwrap();
        assert!(sufficient_fibrancy(&x, &wide()).unwrap());
        assert!(is_segal(&x, &wide()).unwrap());
        let b = inv_object(&x, &wide()).unwrap();
        // everything is degenerate: Equiv(X) has the size of X_1
        assert_eq!(b.equiv.n_objects(), g.n_objects());
        assert!(is_univalent_segal(&x, &wide()).unwrap());
    }

    #[test]
    fn hand_built_non_segal_object_detected() {
        // levels 0 and 1 terminal, level 2 discrete(2): ξ_2 is not full
        let t = Arc::new(terminal());
        let d2 = Arc::new(discrete(2));
        let cst = GroupoidMap::constant(d2.clone(), t.clone(), 0);
        let pick = GroupoidMap::constant(t.clone(), d2.clone(), 0);
        let idt = GroupoidMap::identity(t.clone());
        let x = TruncatedSimplicialGroupoid {
            m: 2,
            levels: vec![t.clone(), t.clone(), d2.clone()],
            faces: vec![vec![], vec![idt.clone(), idt.clone()], vec![cst.clone(), cst.clone(), cst.clone()]],
            degens: vec![vec![idt.clone()], vec![pick.clone(), pick.clone()], vec![]],
        };
        x.validate().unwrap();
        assert!(!is_segal(&x, &wide()).unwrap());
    }

    #[test]
    fn unit_over_x1_is_the_degeneracy() {
        let p = bz2_over_point();
        let nd = nerve(&p, 3, &wide()).unwrap();
        let b = inv_object(&nd.x, &wide()).unwrap();
        let composite = b.to_x1.compose(&b.unit);
        assert!(maps_equal(&composite, &nd.x.degens[0][0]));
        // the named legs are isofibrations
        for leg in [&b.linv, &b.rinv, &b.to_x1] {
            assert!(functor_classify(leg).isofibration);
        }
    }

    #[test]
    fn univalence_verdicts_match_the_fibration_oracle() {
        let wideb = wide();
        let u1 = set_universe(1);
        let n_pi = nerve(&u1.pi, 3, &wideb).unwrap();
        assert!(is_univalent_segal(&n_pi.x, &wideb).unwrap());
        let d2 = Arc::new(discrete(2));
        let n_id = nerve(&id_fibration(d2), 3, &wideb).unwrap();
        assert!(!is_univalent_segal(&n_id.x, &wideb).unwrap());
        let n_bz2 = nerve(&bz2_over_point(), 3, &wideb).unwrap();
        assert!(!is_univalent_segal(&n_bz2.x, &wideb).unwrap());
    }

    #[test]
    fn reedy_replacement_is_reedy_fibrant_with_natural_tau() {
        let wideb = wide();
        let d2 = Arc::new(discrete(2));
        // the first nerve is already Reedy fibrant (replacement is the
        // identity); the second genuinely replaces level 2
        let nerves = [
            nerve(&id_fibration(d2), 3, &wideb).unwrap(),
            nerve(&bz2_over_point(), 2, &wideb).unwrap(),
        ];
        for (nd, special) in nerves
            .iter()
            .flat_map(|nd| [(nd, false), (nd, true)])
        {
            let rr = reedy_replace(&nd.x, special, &wideb).unwrap();
            rr.replaced.validate().unwrap();
            assert!(is_reedy_fibrant(&rr.replaced, &wideb).unwrap());
            for t in &rr.tau {
                assert!(functor_classify(t).is_equivalence());
            }
            // τ commutes with the operators
            let tmap = SimplicialGroupoidMap {
                dom: nd.x.clone(),
                cod: rr.replaced.clone(),
                levels: rr.tau.clone(),
            };
            tmap.validate().unwrap();
        }
    }

    #[test]
    fn special_level2_factors_the_matching_map() {
        let wideb = wide();
        let nd = nerve(&bz2_over_point(), 2, &wideb).unwrap();
        let rr = reedy_replace(&nd.x, true, &wideb).unwrap();
        let (fib, pi1) = rr.level2_pair.as_ref().unwrap();
        assert!(functor_classify(fib).isofibration);
        // π_1 ∘ fibration ∘ τ_2 equals the level-2 matching cone
        let (m2, _) = matching_map(&nd.x, 2, &wideb).unwrap();
        let composite = pi1.compose(fib).compose(&rr.tau[2]);
        assert!(maps_equal(&composite, &m2));
    }

    #[test]
    fn completeness_matches_univalence_through_replacement() {
        let wideb = wide();
        let u1 = set_universe(1);
        let n_pi = nerve(&u1.pi, 3, &wideb).unwrap();
        let rr = reedy_replace(&n_pi.x, false, &wideb).unwrap();
        assert!(is_complete(&rr.replaced, &wideb).unwrap());
        let d2 = Arc::new(discrete(2));
        let n_id = nerve(&id_fibration(d2), 3, &wideb).unwrap();
        let rr2 = reedy_replace(&n_id.x, false, &wideb).unwrap();
        assert!(!is_complete(&rr2.replaced, &wideb).unwrap());
    }

    #[test]
    fn complete_constant_at_terminal() {
        let t = Arc::new(terminal());
        let x = constant_simplicial(&t, 3);
        assert!(is_complete(&x, &wide()).unwrap());
    }

    #[test]
    fn dk_identity_map() {
        let wideb = wide();
        let u1 = set_universe(1);
        let nd = nerve(&u1.pi, 3, &wideb).unwrap();
        let idm = SimplicialGroupoidMap {
            dom: nd.x.clone(),
            cod: nd.x.clone(),
            levels: nd.x.levels.iter().map(|l| GroupoidMap::identity(l.clone())).collect(),
        };
        idm.validate().unwrap();
        let r = dk_classify(&idm, &wideb).unwrap();
        assert!(r.dk);
        // Mf along the identity is the object of equivalences
        let b = inv_object(&nd.x, &wideb).unwrap();
        let mo = m_object(&idm, &wideb).unwrap();
        assert_eq!(mo.mf.n_objects(), b.equiv.n_objects());
        assert_eq!(mo.mf.n_morphisms(), b.equiv.n_morphisms());
    }

    #[test]
    fn induced_nerve_map_of_identity_square() {
        let wideb = wide();
        let p = bz2_over_point();
        let sq = FibrationSquare {
            p: p.clone(),
            p_prime: p.clone(),
            top: GroupoidMap::identity(p.total().clone()),
            bottom: GroupoidMap::identity(p.base().clone()),
        };
        let (map, _, _) = induced_nerve_map(&sq, 3, &wideb).unwrap();
        map.validate().unwrap();
        for l in &map.levels {
            assert!(l.invert_iso().is_ok());
        }
    }

    #[test]
    fn rezk_completion_of_the_discrete_example() {
        let wideb = wide();
        let u1 = set_universe(1);
        let d2 = Arc::new(discrete(2));
        let p = id_fibration(d2.clone());
        // classify every fiber as the singleton
        let one = u1
            .pi
            .base()
            .obj_by_name("set1")
            .expect("singleton object");
        let b = GroupoidMap::constant(d2, u1.pi.base().clone(), one);
        let rc = rezk_complete_nerve(&p, &u1, &b, 3, &wideb).unwrap();
        rc.map.validate().unwrap();
        // the two points are classified by the same set: the completed base
        // is codiscrete on them
        assert_eq!(rc.complete.levels[0].n_objects(), 2);
        assert_eq!(rc.complete.levels[0].n_morphisms(), 4);
        assert!(is_complete(&rc.complete, &wideb).unwrap());
        let r = dk_classify(&rc.map, &wideb).unwrap();
        assert!(r.dk);
    }

    #[test]
    fn alternative_unit_lift_gives_the_same_verdict() {
        let wideb = wide();
        let u1 = set_universe(1);
        let nd = nerve(&u1.pi, 3, &wideb).unwrap();
        let b = inv_object(&nd.x, &wideb).unwrap();
        let verdict = functor_classify(&b.unit).is_equivalence();
        let s0 = nd.x.degens[0][0].clone();
        if let Some(alt) = find_functor_over(
            &nd.x.levels[0],
            &b.equiv,
            &s0,
            &b.to_x1,
            false,
            Some(&b.unit),
            &wideb,
        )
        .unwrap()
        {
            assert_eq!(functor_classify(&alt).is_equivalence(), verdict);
        }
    }

    #[test]
    fn equiv_agrees_with_k_weighted_limit_of_replacement() {
        let wideb = wide();
        let d2 = Arc::new(discrete(2));
        let nd = nerve(&id_fibration(d2), 3, &wideb).unwrap();
        let b = inv_object(&nd.x, &wideb).unwrap();
        let rr = reedy_replace(&nd.x, true, &wideb).unwrap();
        let (k, _, _) = k_interval(3);
        let k = Arc::new(k);
        let kwl = weighted_limit(&k, &rr.replaced, &wideb).unwrap();
        // the shared biinvertible edge of the interval
        let fpos = kwl
            .comps
            .iter()
            .position(|&(lvl, idx)| lvl == 1 && kwl.weight.names[lvl][idx] == "L.10")
            .expect("shared edge of K");
        let qb = kwl.legs[fpos].clone();
        let found = find_functor_over(&b.equiv, &kwl.apex, &b.to_x1, &qb, true, None, &wideb)
            .unwrap();
        assert!(found.is_some(), "Equiv(X) ≃ K∖X̃ over X_1");
    }

    #[test]
    fn profile_shortcut() {
        let p = FunctorProfile {
            faithful: true,
            full: true,
            essentially_surjective: true,
            isofibration: true,
            injective_on_objects: false,
        };
        assert!(p.is_equivalence() && p.is_trivial_fibration());
    }
}
