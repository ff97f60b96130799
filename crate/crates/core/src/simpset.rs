//! Finite truncated simplicial sets with explicit degeneracies: the weight
//! shapes of the completeness criterion, pushouts, map enumeration, and
//! right-lifting-property deciders.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::groupoid::{Groupoid, MorId, ObjId};
use crate::map::GroupoidMap;

/// Simplicial set truncated at level `trunc`, with every simplex (including
/// degenerate ones) stored explicitly. `faces[n][i]` is d_i on level n
/// (n ≥ 1) and `degens[n][i]` is s_i from level n to n+1 (n < trunc).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSimplicialSet {
    pub trunc: usize,
    pub dim: usize,
    pub names: Vec<Vec<String>>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub degens: Vec<Vec<Vec<usize>>>,
}

impl FiniteSimplicialSet {
    pub fn card(&self, n: usize) -> usize {
        self.names[n].len()
    }

    pub fn face(&self, n: usize, i: usize, x: usize) -> usize {
        self.faces[n][i][x]
    }

    pub fn degen(&self, n: usize, i: usize, x: usize) -> usize {
        self.degens[n][i][x]
    }

    /// True when x at level n is not a degeneracy: for no i does
    /// s_i(d_{i+1} x) return x.
    pub fn is_nondegenerate(&self, n: usize, x: usize) -> bool {
        if n == 0 {
            return true;
        }
        (0..n).all(|i| self.degen(n - 1, i, self.face(n, i + 1, x)) != x)
    }

    pub fn nondegenerate(&self, n: usize) -> Vec<usize> {
        (0..self.card(n))
            .filter(|&x| self.is_nondegenerate(n, x))
            .collect()
    }

    /// Eilenberg-Zilber decomposition: returns (level k, base, ops) with
    /// base nondegenerate at level k and
    /// x = s_{ops[0]}(s_{ops[1]}(… s_{ops.last()}(base) …)).
    pub fn ez(&self, n: usize, x: usize) -> (usize, usize, Vec<usize>) {
        let mut level = n;
        let mut cur = x;
        let mut ops = Vec::new();
        'outer: while level > 0 {
            for i in 0..level {
                let y = self.face(level, i + 1, cur);
                if self.degen(level - 1, i, y) == cur {
                    ops.push(i);
                    cur = y;
                    level -= 1;
                    continue 'outer;
                }
            }
            break;
        }
        (level, cur, ops)
    }

    /// Checks all simplicial identities among the stored operators plus the
    /// Eilenberg-Zilber property (degeneracy operators are injective).
    pub fn validate(&self) -> Result<()> {
        let nn = self.trunc;
        if self.names.len() != nn + 1
            || self.faces.len() != nn + 1
            || self.degens.len() != nn + 1
        {
            return Err(Error::InvalidSimplicialSet("level table shape mismatch".into()));
        }
        if self.dim > nn {
            return Err(Error::InvalidSimplicialSet(
                "declared dimension above the truncation level".into(),
            ));
        }
        for n in 0..=nn {
            let expect_faces = if n == 0 { 0 } else { n + 1 };
            let expect_degens = if n == nn { 0 } else { n + 1 };
            if self.faces[n].len() != expect_faces || self.degens[n].len() != expect_degens {
                return Err(Error::InvalidSimplicialSet(format!(
                    "operator count wrong at level {n}"
                )));
            }
            for op in self.faces[n].iter().chain(self.degens[n].iter()) {
                if op.len() != self.card(n) {
                    return Err(Error::InvalidSimplicialSet(format!(
                        "operator length wrong at level {n}"
                    )));
                }
            }
        }
        let fail = |msg: String| Err(Error::InvalidSimplicialSet(msg));
        // d_i d_j = d_{j-1} d_i for i < j
        for n in 2..=nn {
            for j in 1..=n {
                for i in 0..j {
                    for x in 0..self.card(n) {
                        if self.face(n - 1, i, self.face(n, j, x))
                            != self.face(n - 1, j - 1, self.face(n, i, x))
                        {
                            return fail(format!("face identity fails at level {n} (i={i}, j={j})"));
                        }
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i ≤ j
        for n in 0..nn.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    for x in 0..self.card(n) {
                        if self.degen(n + 1, i, self.degen(n, j, x))
                            != self.degen(n + 1, j + 1, self.degen(n, i, x))
                        {
                            return fail(format!(
                                "degeneracy identity fails at level {n} (i={i}, j={j})"
                            ));
                        }
                    }
                }
            }
        }
        // mixed identities
        for n in 1..nn + 1 {
            // d_i s_j at level n-1: s_j: n-1 → n, d_i: n → n-1
            if n > nn {
                continue;
            }
            let lo = n - 1;
            if lo >= nn {
                continue;
            }
            for j in 0..=lo {
                for i in 0..=n {
                    for x in 0..self.card(lo) {
                        let sx = self.degen(lo, j, x);
                        let got = self.face(n, i, sx);
                        let want = if i == j || i == j + 1 {
                            x
                        } else if i < j {
                            // d_i s_j = s_{j-1} d_i
                            if lo == 0 {
                                continue;
                            }
                            self.degen(lo - 1, j - 1, self.face(lo, i, x))
                        } else {
                            // i > j+1: d_i s_j = s_j d_{i-1}
                            if lo == 0 {
                                continue;
                            }
                            self.degen(lo - 1, j, self.face(lo, i - 1, x))
                        };
                        if got != want {
                            return fail(format!(
                                "mixed identity fails at level {lo} (i={i}, j={j})"
                            ));
                        }
                    }
                }
            }
        }
        // degeneracies are injective (Eilenberg-Zilber normal forms exist)
        for n in 0..nn {
            for i in 0..=n {
                let mut seen = vec![false; self.card(n + 1)];
                for x in 0..self.card(n) {
                    let y = self.degen(n, i, x);
                    if seen[y] {
                        return fail(format!("s_{i} not injective at level {n}"));
                    }
                    seen[y] = true;
                }
            }
        }
        // every simplex above the declared dimension is degenerate
        for n in self.dim + 1..=nn {
            for x in 0..self.card(n) {
                if self.is_nondegenerate(n, x) {
                    return fail(format!(
                        "nondegenerate simplex above declared dimension at level {n}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Levelwise map of truncated simplicial sets, defined up to the common
/// truncation level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub dom: Arc<FiniteSimplicialSet>,
    pub cod: Arc<FiniteSimplicialSet>,
    pub levels: Vec<Vec<usize>>,
}

impl Serialize for SimplicialMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("SimplicialMap", 3)?;
        st.serialize_field("dom", self.dom.as_ref())?;
        st.serialize_field("cod", self.cod.as_ref())?;
        st.serialize_field("levels", &self.levels)?;
        st.end()
    }
}

impl SimplicialMap {
    pub fn new_unchecked(
        dom: Arc<FiniteSimplicialSet>,
        cod: Arc<FiniteSimplicialSet>,
        levels: Vec<Vec<usize>>,
    ) -> SimplicialMap {
        SimplicialMap { dom, cod, levels }
    }

    pub fn new(
        dom: Arc<FiniteSimplicialSet>,
        cod: Arc<FiniteSimplicialSet>,
        levels: Vec<Vec<usize>>,
    ) -> Result<SimplicialMap> {
        let f = SimplicialMap::new_unchecked(dom, cod, levels);
        f.validate()?;
        Ok(f)
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn at(&self, n: usize, x: usize) -> usize {
        self.levels[n][x]
    }

    pub fn identity(x: Arc<FiniteSimplicialSet>) -> SimplicialMap {
        let levels = (0..=x.trunc).map(|n| (0..x.card(n)).collect()).collect();
        SimplicialMap::new_unchecked(x.clone(), x, levels)
    }

    pub fn compose(&self, other: &SimplicialMap) -> SimplicialMap {
        let top = self.max_level().min(other.max_level());
        let levels = (0..=top)
            .map(|n| other.levels[n].iter().map(|&x| self.at(n, x)).collect())
            .collect();
        SimplicialMap::new_unchecked(other.dom.clone(), self.cod.clone(), levels)
    }

    /// Commutation with every face and degeneracy operator within range.
    pub fn validate(&self) -> Result<()> {
        let top = self.dom.trunc.min(self.cod.trunc);
        if self.levels.len() != top + 1 {
            return Err(Error::InvalidSimplicialMap(format!(
                "expected {} levels, found {}",
                top + 1,
                self.levels.len()
            )));
        }
        for n in 0..=top {
            if self.levels[n].len() != self.dom.card(n) {
                return Err(Error::InvalidSimplicialMap(format!(
                    "level {n} length mismatch"
                )));
            }
            for &y in &self.levels[n] {
                if y >= self.cod.card(n) {
                    return Err(Error::InvalidSimplicialMap(format!(
                        "image out of range at level {n}"
                    )));
                }
            }
        }
        for n in 1..=top {
            for i in 0..=n {
                for x in 0..self.dom.card(n) {
                    if self.at(n - 1, self.dom.face(n, i, x))
                        != self.cod.face(n, i, self.at(n, x))
                    {
                        return Err(Error::InvalidSimplicialMap(format!(
                            "face commutation fails at level {n}, d_{i}"
                        )));
                    }
                }
            }
        }
        for n in 0..top {
            for i in 0..=n {
                for x in 0..self.dom.card(n) {
                    if self.at(n + 1, self.dom.degen(n, i, x))
                        != self.cod.degen(n, i, self.at(n, x))
                    {
                        return Err(Error::InvalidSimplicialMap(format!(
                            "degeneracy commutation fails at level {n}, s_{i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The map Δ⁰ → X picking a vertex (iterated degeneracy above level 0).
    pub fn from_vertex(x: Arc<FiniteSimplicialSet>, v: usize) -> SimplicialMap {
        let point = Arc::new(shape(&Shape::Simplex(0), x.trunc).expect("point shape"));
        let mut levels = vec![vec![v]];
        let mut cur = v;
        for n in 0..x.trunc {
            cur = x.degen(n, 0, cur);
            levels.push(vec![cur]);
        }
        SimplicialMap::new_unchecked(point, x, levels)
    }
}

// ---------------------------------------------------------------------------
// shapes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Simplex(usize),
    Boundary(usize),
    Horn(usize, usize),
    Spine(usize),
    J2,
    K,
}

impl Shape {
    pub fn declared_dim(&self) -> usize {
        match *self {
            Shape::Simplex(n) => n,
            Shape::Boundary(n) => n.saturating_sub(1),
            Shape::Horn(n, _) => n.saturating_sub(1),
            Shape::Spine(_) => 1,
            Shape::J2 | Shape::K => 2,
        }
    }
}

fn monotone_seqs(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for s in out {
            let lo = s.last().copied().unwrap_or(0);
            for v in lo..=max {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn seq_name(s: &[usize]) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
}

fn core(s: &[usize]) -> Vec<usize> {
    let mut c: Vec<usize> = Vec::new();
    for &v in s {
        if c.last() != Some(&v) {
            c.push(v);
        }
    }
    c
}

/// Builds the subcomplex of Δ^max (or of the nerve of the chaotic relation
/// for J2) whose simplices are the monotone sequences passing `keep`.
fn sequence_complex(
    max: usize,
    trunc: usize,
    dim: usize,
    monotone: bool,
    keep: &dyn Fn(&[usize]) -> bool,
) -> FiniteSimplicialSet {
    let mut names: Vec<Vec<String>> = Vec::new();
    let mut seqs: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..=trunc {
        let all: Vec<Vec<usize>> = if monotone {
            monotone_seqs(n + 1, max)
        } else {
            // all sequences over 0..=max
            let mut out: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..=n {
                let mut next = Vec::new();
                for s in out {
                    for v in 0..=max {
                        let mut t = s.clone();
                        t.push(v);
                        next.push(t);
                    }
                }
                out = next;
            }
            out
        };
        let lvl: Vec<Vec<usize>> = all.into_iter().filter(|s| keep(s)).collect();
        names.push(lvl.iter().map(|s| seq_name(s)).collect());
        seqs.push(lvl);
    }
    let index: Vec<HashMap<Vec<usize>, usize>> = seqs
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect();
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    let mut degens: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    for n in 0..=trunc {
        if n >= 1 {
            for i in 0..=n {
                let op: Vec<usize> = seqs[n]
                    .iter()
                    .map(|s| {
                        let mut t = s.clone();
                        t.remove(i);
                        index[n - 1][&t]
                    })
                    .collect();
                faces[n].push(op);
            }
        }
        if n < trunc {
            for i in 0..=n {
                let op: Vec<usize> = seqs[n]
                    .iter()
                    .map(|s| {
                        let mut t = s.clone();
                        t.insert(i, s[i]);
                        index[n + 1][&t]
                    })
                    .collect();
                degens[n].push(op);
            }
        }
    }
    FiniteSimplicialSet {
        trunc,
        dim,
        names,
        faces,
        degens,
    }
}

/// The walking left-inverse shape with vertices 0, 1, edges g: 0→1 and
/// f: 1→0, and one nondegenerate triangle (g, f) with composite s_0(0).
fn j2(trunc: usize) -> FiniteSimplicialSet {
    sequence_complex(1, trunc, 2, false, &|s| {
        let c = core(s);
        c.len() <= 2 || c == vec![0, 1, 0]
    })
}

/// The walking biinvertible edge: two copies of J2 glued along the edge f,
/// yielding vertices 0, 1, edges f: 1→0, g, h: 0→1, and two triangles.
pub fn k_interval(trunc: usize) -> (FiniteSimplicialSet, SimplicialMap, SimplicialMap) {
    let left = Arc::new(j2(trunc));
    // the second copy swaps the roles of the vertices
    let right = Arc::new(sequence_complex(1, trunc, 2, false, &|s| {
        let c = core(s);
        c.len() <= 2 || c == vec![1, 0, 1]
    }));
    let edge = Arc::new(shape(&Shape::Simplex(1), trunc).expect("edge shape"));
    // f in the left copy is the sequence (1,0); in the right copy it is the
    // d_2-edge of the triangle (1,0,1), also the sequence (1,0)
    let to_left = seq_relabel(&edge, &left, &|s| s.iter().map(|&v| 1 - v).collect());
    let to_right = seq_relabel(&edge, &right, &|s| s.iter().map(|&v| 1 - v).collect());
    let (k, inl, inr) = pushout_sset(&to_left, &to_right).expect("K pushout");
    (k, inl, inr)
}

/// Map between sequence complexes induced by relabeling vertices.
fn seq_relabel(
    dom: &Arc<FiniteSimplicialSet>,
    cod: &Arc<FiniteSimplicialSet>,
    f: &dyn Fn(&[usize]) -> Vec<usize>,
) -> SimplicialMap {
    let top = dom.trunc.min(cod.trunc);
    let cod_index: Vec<HashMap<&str, usize>> = cod
        .names
        .iter()
        .map(|lvl| lvl.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect())
        .collect();
    let levels = (0..=top)
        .map(|n| {
            dom.names[n]
                .iter()
                .map(|name| {
                    let s: Vec<usize> = name
                        .chars()
                        .map(|c| c.to_digit(10).unwrap() as usize)
                        .collect();
                    cod_index[n][seq_name(&f(&s)).as_str()]
                })
                .collect()
        })
        .collect();
    SimplicialMap::new_unchecked(dom.clone(), cod.clone(), levels)
}

pub fn shape(kind: &Shape, trunc: usize) -> Result<FiniteSimplicialSet> {
    let dim = kind.declared_dim();
    if trunc < dim {
        return Err(Error::LevelOutOfRange(format!(
            "truncation {trunc} below shape dimension {dim}"
        )));
    }
    let s = match *kind {
        Shape::Simplex(m) => sequence_complex(m, trunc, m, true, &|_| true),
        Shape::Boundary(m) => sequence_complex(m, trunc, m.saturating_sub(1), true, &|s| {
            (0..=m).any(|v| !s.contains(&v))
        }),
        Shape::Horn(m, k) => {
            if k > m {
                return Err(Error::LevelOutOfRange(format!(
                    "horn index {k} out of range for dimension {m}"
                )));
            }
            sequence_complex(m, trunc, m.saturating_sub(1), true, &|s| {
                (0..=m).any(|v| v != k && !s.contains(&v))
            })
        }
        Shape::Spine(m) => sequence_complex(m, trunc, if m == 0 { 0 } else { 1 }, true, &|s| {
            let c = core(s);
            c.len() <= 1 || (c.len() == 2 && c[1] == c[0] + 1)
        }),
        Shape::J2 => j2(trunc),
        Shape::K => k_interval(trunc).0,
    };
    Ok(s)
}

/// Default truncation: one level above the declared dimension.
pub fn shape_default(kind: &Shape) -> FiniteSimplicialSet {
    shape(kind, kind.declared_dim() + 1).expect("default truncation is valid")
}

/// Inclusion of one monotone-sequence complex into another with the same
/// vertex labels (boundary ↪ simplex, horn ↪ simplex, spine ↪ simplex).
pub fn sequence_inclusion(
    sub: &Arc<FiniteSimplicialSet>,
    sup: &Arc<FiniteSimplicialSet>,
) -> SimplicialMap {
    seq_relabel(sub, sup, &|s| s.to_vec())
}

// ---------------------------------------------------------------------------
// pushout

/// Levelwise pushout of f: A → X and g: A → Y along their common domain,
/// with the two induced legs from X and Y. The result is revalidated.
pub fn pushout_sset(
    f: &SimplicialMap,
    g: &SimplicialMap,
) -> Result<(FiniteSimplicialSet, SimplicialMap, SimplicialMap)> {
    if f.dom.as_ref() != g.dom.as_ref() {
        return Err(Error::NotParallel("pushout legs need a common domain".into()));
    }
    let x = &f.cod;
    let y = &g.cod;
    let trunc = x.trunc.min(y.trunc).min(f.dom.trunc);
    let dim = x.dim.max(y.dim);
    // union-find per level over X ⊔ Y
    let mut names: Vec<Vec<String>> = Vec::new();
    let mut x_cls: Vec<Vec<usize>> = Vec::new();
    let mut y_cls: Vec<Vec<usize>> = Vec::new();
    for n in 0..=trunc {
        let nx = x.card(n);
        let ny = y.card(n);
        let mut parent: Vec<usize> = (0..nx + ny).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for a in 0..f.dom.card(n) {
            let i = find(&mut parent, f.at(n, a));
            let j = find(&mut parent, nx + g.at(n, a));
            parent[i] = j;
        }
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        let mut level_names: Vec<String> = Vec::new();
        let mut xc = vec![0; nx];
        let mut yc = vec![0; ny];
        for i in 0..nx + ny {
            let root = find(&mut parent, i);
            let next = class_of.len();
            let cls = *class_of.entry(root).or_insert(next);
            if cls == level_names.len() {
                let name = if i < nx {
                    format!("L.{}", x.names[n][i])
                } else {
                    format!("R.{}", y.names[n][i - nx])
                };
                level_names.push(name);
            }
            if i < nx {
                xc[i] = cls;
            } else {
                yc[i - nx] = cls;
            }
        }
        names.push(level_names);
        x_cls.push(xc);
        y_cls.push(yc);
    }
    // induced operators: well defined because f and g commute with them
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    let mut degens: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    for n in 0..=trunc {
        if n >= 1 {
            for i in 0..=n {
                let mut op = vec![usize::MAX; names[n].len()];
                for xx in 0..x.card(n) {
                    op[x_cls[n][xx]] = x_cls[n - 1][x.face(n, i, xx)];
                }
                for yy in 0..y.card(n) {
                    op[y_cls[n][yy]] = y_cls[n - 1][y.face(n, i, yy)];
                }
                faces[n].push(op);
            }
        }
        if n < trunc {
            for i in 0..=n {
                let mut op = vec![usize::MAX; names[n].len()];
                for xx in 0..x.card(n) {
                    op[x_cls[n][xx]] = x_cls[n + 1][x.degen(n, i, xx)];
                }
                for yy in 0..y.card(n) {
                    op[y_cls[n][yy]] = y_cls[n + 1][y.degen(n, i, yy)];
                }
                degens[n].push(op);
            }
        }
    }
    let p = FiniteSimplicialSet {
        trunc,
        dim,
        names,
        faces,
        degens,
    };
    p.validate()?;
    let p = p;
    let arc = Arc::new(p.clone());
    let inl = SimplicialMap::new_unchecked(x.clone(), arc.clone(), x_cls);
    let inr = SimplicialMap::new_unchecked(y.clone(), arc, y_cls);
    Ok((p, inl, inr))
}

// ---------------------------------------------------------------------------
// nerve of a groupoid as a simplicial set

/// Nerve truncated at `trunc`: level-n simplices are composable strings of
/// n morphisms; inner faces compose, outer faces drop, degeneracies insert
/// identities. Returns the strings backing each index.
pub fn nerve_sset(g: &Arc<Groupoid>, trunc: usize) -> (FiniteSimplicialSet, Vec<Vec<Vec<MorId>>>) {
    let mut strings: Vec<Vec<Vec<MorId>>> = Vec::new();
    strings.push(g.objects().map(|_| Vec::new()).collect());
    for n in 1..=trunc {
        let mut level: Vec<Vec<MorId>> = Vec::new();
        if n == 1 {
            for m in g.morphisms() {
                level.push(vec![m]);
            }
        } else {
            for s in &strings[n - 1] {
                let last_tgt = g.tgt(*s.last().unwrap());
                for &m in g.morphisms_from(last_tgt) {
                    let mut t = s.clone();
                    t.push(m);
                    level.push(t);
                }
            }
        }
        strings.push(level);
    }
    let index: Vec<HashMap<Vec<MorId>, usize>> = strings
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect();
    let obj_index = |o: ObjId| o as usize;
    // vertex sequence of a string
    let verts = |s: &[MorId], start: ObjId| -> Vec<ObjId> {
        let mut v = vec![start];
        for &m in s {
            v.push(g.tgt(m));
        }
        v
    };
    let start_of = |n: usize, i: usize| -> ObjId {
        if n == 0 {
            i as ObjId
        } else {
            g.src(strings[n][i][0])
        }
    };
    let mut names: Vec<Vec<String>> = Vec::new();
    for (n, lvl) in strings.iter().enumerate() {
        names.push(
            lvl.iter()
                .enumerate()
                .map(|(i, s)| {
                    if n == 0 {
                        g.obj_name(i as ObjId).to_string()
                    } else {
                        s.iter()
                            .map(|&m| g.mor_name(m).to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    }
                })
                .collect(),
        );
    }
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    let mut degens: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    for n in 0..=trunc {
        if n >= 1 {
            for i in 0..=n {
                let op: Vec<usize> = (0..strings[n].len())
                    .map(|xi| {
                        let s = &strings[n][xi];
                        if n == 1 {
                            let m = s[0];
                            // d_0 drops vertex 0 (target remains), d_1 keeps source
                            if i == 0 {
                                obj_index(g.tgt(m))
                            } else {
                                obj_index(g.src(m))
                            }
                        } else {
                            let t: Vec<MorId> = if i == 0 {
                                s[1..].to_vec()
                            } else if i == n {
                                s[..n - 1].to_vec()
                            } else {
                                let mut t = s[..i - 1].to_vec();
                                t.push(g.compose(s[i], s[i - 1]).unwrap());
                                t.extend_from_slice(&s[i + 1..]);
                                t
                            };
                            index[n - 1][&t]
                        }
                    })
                    .collect();
                faces[n].push(op);
            }
        }
        if n < trunc {
            for i in 0..=n {
                let op: Vec<usize> = (0..strings[n].len())
                    .map(|xi| {
                        let s = &strings[n][xi];
                        let vs = verts(s, start_of(n, xi));
                        let mut t = s[..i].to_vec();
                        t.push(g.identity(vs[i]));
                        t.extend_from_slice(&s[i..]);
                        index[n + 1][&t]
                    })
                    .collect();
                degens[n].push(op);
            }
        }
    }
    (
        FiniteSimplicialSet {
            trunc,
            dim: trunc,
            names,
            faces,
            degens,
        },
        strings,
    )
}

/// The simplicial map of nerves induced by a functor.
pub fn nerve_sset_map(
    f: &GroupoidMap,
    trunc: usize,
) -> (SimplicialMap, Arc<FiniteSimplicialSet>, Arc<FiniteSimplicialSet>) {
    let (nd, sd) = nerve_sset(&f.dom, trunc);
    let (nc, sc) = nerve_sset(&f.cod, trunc);
    let index: Vec<HashMap<Vec<MorId>, usize>> = sc
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect();
    let nd = Arc::new(nd);
    let nc = Arc::new(nc);
    let levels: Vec<Vec<usize>> = sd
        .iter()
        .enumerate()
        .map(|(n, lvl)| {
            lvl.iter()
                .enumerate()
                .map(|(xi, s)| {
                    if n == 0 {
                        f.ob(xi as ObjId) as usize
                    } else {
                        let t: Vec<MorId> = s.iter().map(|&m| f.mor(m)).collect();
                        index[n][&t]
                    }
                })
                .collect()
        })
        .collect();
    (
        SimplicialMap::new_unchecked(nd.clone(), nc.clone(), levels),
        nd,
        nc,
    )
}

// ---------------------------------------------------------------------------
// map enumeration and lifting

/// Enumerates simplicial maps A → X (up to the common truncation level),
/// with optional forced cell images and an optional per-cell candidate
/// filter. Deterministic lexicographic order.
fn enumerate_maps_inner(
    a: &Arc<FiniteSimplicialSet>,
    x: &Arc<FiniteSimplicialSet>,
    forced: &[HashMap<usize, usize>],
    filter: &dyn Fn(usize, usize, usize) -> bool,
    budget: &Budget,
    first_only: bool,
) -> Result<Vec<SimplicialMap>> {
    let top = a.trunc.min(x.trunc);
    let mut out: Vec<SimplicialMap> = Vec::new();
    let mut levels: Vec<Vec<usize>> = (0..=top).map(|n| vec![usize::MAX; a.card(n)]).collect();
    // recursion over levels; at each level first fill degenerate images,
    // then enumerate assignments for the nondegenerate cells
    fn fill_level(
        a: &Arc<FiniteSimplicialSet>,
        x: &Arc<FiniteSimplicialSet>,
        n: usize,
        top: usize,
        forced: &[HashMap<usize, usize>],
        filter: &dyn Fn(usize, usize, usize) -> bool,
        levels: &mut Vec<Vec<usize>>,
        out: &mut Vec<SimplicialMap>,
        budget: &Budget,
        first_only: bool,
    ) -> Result<()> {
        if n > top {
            out.push(SimplicialMap::new_unchecked(
                a.clone(),
                x.clone(),
                levels.clone(),
            ));
            if out.len() > budget.max_objects {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} simplicial maps",
                    budget.max_objects
                )));
            }
            return Ok(());
        }
        // degenerate cells are determined by the level below
        for xx in 0..a.card(n) {
            if n > 0 && !a.is_nondegenerate(n, xx) {
                let (_, _, ops) = a.ez(n, xx);
                let i = ops[0];
                let y = a.face(n, i + 1, xx);
                levels[n][xx] = x.degen(n - 1, i, levels[n - 1][y]);
            } else {
                levels[n][xx] = usize::MAX;
            }
        }
        // forced images must agree with determined degenerates
        for (&cell, &img) in &forced[n] {
            if levels[n][cell] != usize::MAX && levels[n][cell] != img {
                return Ok(());
            }
        }
        let todo: Vec<usize> = (0..a.card(n))
            .filter(|&xx| levels[n][xx] == usize::MAX)
            .collect();
        fn assign(
            a: &Arc<FiniteSimplicialSet>,
            x: &Arc<FiniteSimplicialSet>,
            n: usize,
            top: usize,
            forced: &[HashMap<usize, usize>],
            filter: &dyn Fn(usize, usize, usize) -> bool,
            todo: &[usize],
            k: usize,
            levels: &mut Vec<Vec<usize>>,
            out: &mut Vec<SimplicialMap>,
            budget: &Budget,
            first_only: bool,
        ) -> Result<()> {
            if first_only && !out.is_empty() {
                return Ok(());
            }
            if k == todo.len() {
                return fill_level(
                    a, x, n + 1, top, forced, filter, levels, out, budget, first_only,
                );
            }
            let cell = todo[k];
            let cands: Vec<usize> = match forced[n].get(&cell) {
                Some(&img) => vec![img],
                None => (0..x.card(n)).collect(),
            };
            'cand: for cand in cands {
                if !filter(n, cell, cand) {
                    continue;
                }
                if n > 0 {
                    for i in 0..=n {
                        if x.face(n, i, cand) != levels[n - 1][a.face(n, i, cell)] {
                            continue 'cand;
                        }
                    }
                }
                levels[n][cell] = cand;
                assign(
                    a, x, n, top, forced, filter, todo, k + 1, levels, out, budget, first_only,
                )?;
                levels[n][cell] = usize::MAX;
            }
            Ok(())
        }
        assign(
            a, x, n, top, forced, filter, &todo, 0, levels, out, budget, first_only,
        )
    }
    fill_level(
        a, x, 0, top, forced, filter, &mut levels, &mut out, budget, first_only,
    )?;
    Ok(out)
}

pub fn enumerate_maps(
    a: &Arc<FiniteSimplicialSet>,
    x: &Arc<FiniteSimplicialSet>,
    budget: &Budget,
) -> Result<Vec<SimplicialMap>> {
    let top = a.trunc.min(x.trunc);
    let forced: Vec<HashMap<usize, usize>> = vec![HashMap::new(); top + 1];
    enumerate_maps_inner(a, x, &forced, &|_, _, _| true, budget, false)
}

/// Outcome of a lifting-property check; on failure the witness is the
/// unliftable square (a, b).
#[derive(Clone, Debug)]
pub struct RlpResult {
    pub holds: bool,
    pub counterexample: Option<(SimplicialMap, SimplicialMap)>,
}

/// Right lifting property of f: X → Y against i: A ↪ B (levelwise
/// injective): every square b∘i = f∘a admits a diagonal B → X.
pub fn has_rlp(f: &SimplicialMap, i: &SimplicialMap, budget: &Budget) -> Result<RlpResult> {
    let a_set = &i.dom;
    let b_set = &i.cod;
    let x_set = &f.dom;
    let y_set = &f.cod;
    let top_b = b_set.trunc.min(x_set.trunc).min(y_set.trunc).min(i.max_level());
    for n in 0..=top_b.min(i.max_level()) {
        let mut seen = vec![false; b_set.card(n)];
        for &img in &i.levels[n] {
            if seen[img] {
                return Err(Error::Precondition(
                    "lifting against a non-injective map".into(),
                ));
            }
            seen[img] = true;
        }
    }
    let bottom_top = b_set.trunc.min(y_set.trunc);
    let lift_top = b_set.trunc.min(x_set.trunc);
    let squares_a = enumerate_maps(a_set, x_set, budget)?;
    for a_map in squares_a {
        // bottom maps extending f ∘ a along i
        let mut forced: Vec<HashMap<usize, usize>> = vec![HashMap::new(); bottom_top + 1];
        for n in 0..=top_b.min(bottom_top).min(a_map.max_level()).min(f.max_level()) {
            for cell in 0..a_set.card(n) {
                forced[n].insert(i.at(n, cell), f.at(n, a_map.at(n, cell)));
            }
        }
        let b_maps = enumerate_maps_inner(b_set, y_set, &forced, &|_, _, _| true, budget, false)?;
        for b_map in b_maps {
            // lift: B → X over b with prescribed restriction a
            let mut lift_forced: Vec<HashMap<usize, usize>> = vec![HashMap::new(); lift_top + 1];
            for n in 0..=top_b.min(lift_top).min(a_map.max_level()) {
                for cell in 0..a_set.card(n) {
                    lift_forced[n].insert(i.at(n, cell), a_map.at(n, cell));
                }
            }
            let proj_filter = {
                let f = f.clone();
                let b_map = b_map.clone();
                move |n: usize, cell: usize, cand: usize| -> bool {
                    n > f.max_level()
                        || n > b_map.max_level()
                        || f.at(n, cand) == b_map.at(n, cell)
                }
            };
            let lifts = enumerate_maps_inner(
                b_set,
                x_set,
                &lift_forced,
                &proj_filter,
                budget,
                true,
            )?;
            if lifts.is_empty() {
                return Ok(RlpResult {
                    holds: false,
                    counterexample: Some((a_map, b_map)),
                });
            }
        }
    }
    Ok(RlpResult {
        holds: true,
        counterexample: None,
    })
}

/// Verdict of the fibration classifiers for a simplicial map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SsetMapClass {
    pub mid_fibration: bool,
    pub quasi_fibration: bool,
}

/// mid_fibration: lifts against inner horns up to dim_bound.
/// quasi_fibration: additionally lifts against the endpoint Δ⁰ → K
/// (requires quasi-category domain and codomain, which is checked).
pub fn classify_sset_map(
    f: &SimplicialMap,
    dim_bound: usize,
    budget: &Budget,
) -> Result<SsetMapClass> {
    let mut mid = true;
    'outer: for n in 2..=dim_bound {
        for k in 1..n {
            let horn = Arc::new(shape(&Shape::Horn(n, k), n)?);
            let simplex = Arc::new(shape(&Shape::Simplex(n), n)?);
            let incl = sequence_inclusion(&horn, &simplex);
            if !has_rlp(f, &incl, budget)?.holds {
                mid = false;
                break 'outer;
            }
        }
    }
    if !mid {
        return Ok(SsetMapClass {
            mid_fibration: false,
            quasi_fibration: false,
        });
    }
    // precondition for the K-criterion: both ends are quasi-categories
    let point = Arc::new(shape(&Shape::Simplex(0), 0)?);
    for end in [&f.dom, &f.cod] {
        let to_point = SimplicialMap::new_unchecked(
            end.clone(),
            point.clone(),
            vec![vec![0; end.card(0)]],
        );
        for n in 2..=dim_bound {
            for k in 1..n {
                let horn = Arc::new(shape(&Shape::Horn(n, k), n)?);
                let simplex = Arc::new(shape(&Shape::Simplex(n), n)?);
                let incl = sequence_inclusion(&horn, &simplex);
                if !has_rlp(&to_point, &incl, budget)?.holds {
                    return Err(Error::Precondition(
                        "quasi-fibration queried on a non-quasi-category".into(),
                    ));
                }
            }
        }
    }
    let (k, _, _) = k_interval(3);
    let k = Arc::new(k);
    // vertex 1 of the left copy: named L.1 after the pushout
    let v1 = k.names[0].iter().position(|n| n == "L.1").expect("vertex 1 of K");
    let endpoint = SimplicialMap::from_vertex(k, v1);
    let quasi = has_rlp(f, &endpoint, budget)?.holds;
    Ok(SsetMapClass {
        mid_fibration: true,
        quasi_fibration: quasi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{codiscrete, delooping, discrete, terminal, GroupTable};

    fn census(x: &FiniteSimplicialSet) -> Vec<usize> {
        (0..=x.trunc).map(|n| x.nondegenerate(n).len()).collect()
    }

    #[test]
    fn simplex_shapes_valid() {
        for n in 0..=3 {
            let s = shape_default(&Shape::Simplex(n));
            s.validate().unwrap();
        }
        let d2 = shape_default(&Shape::Simplex(2));
        assert_eq!(census(&d2), vec![3, 3, 1, 0]);
    }

    #[test]
    fn boundary_and_horn() {
        let b = shape_default(&Shape::Boundary(2));
        b.validate().unwrap();
        assert_eq!(census(&b), vec![3, 3, 0]);
        let h = shape_default(&Shape::Horn(2, 0));
        h.validate().unwrap();
        assert_eq!(census(&h), vec![3, 2, 0]);
        assert!(shape(&Shape::Horn(2, 5), 2).is_err());
    }

    #[test]
    fn spine_census() {
        let s = shape_default(&Shape::Spine(3));
        s.validate().unwrap();
        assert_eq!(census(&s), vec![4, 3, 0]);
    }

    #[test]
    fn j2_census() {
        let j = shape_default(&Shape::J2);
        j.validate().unwrap();
        assert_eq!(census(&j), vec![2, 2, 1, 0]);
    }

    #[test]
    fn k_census() {
        let k = shape_default(&Shape::K);
        k.validate().unwrap();
        assert_eq!(census(&k), vec![2, 3, 2, 0]);
    }

    #[test]
    fn pushout_reproduces_j2() {
        // glue Δ² and Δ¹ along Λ²₀: the 01 edge goes to the edge, the 02
        // edge collapses to the degenerate edge at 0
        let horn = Arc::new(shape(&Shape::Horn(2, 0), 3).unwrap());
        let d2 = Arc::new(shape(&Shape::Simplex(2), 3).unwrap());
        let d1 = Arc::new(shape(&Shape::Simplex(1), 3).unwrap());
        let f = sequence_inclusion(&horn, &d2);
        let g = seq_relabel(&horn, &d1, &|s| {
            s.iter().map(|&v| if v == 2 { 0 } else { v }).collect()
        });
        g.validate().unwrap();
        let (p, _, _) = pushout_sset(&f, &g).unwrap();
        assert_eq!(census(&p), census(&shape(&Shape::J2, 3).unwrap()));
    }

    #[test]
    fn pushout_two_edges_at_both_ends() {
        // gluing two copies of Δ¹ at both endpoints: 2 vertices, 2 edges
        let two_points = Arc::new(shape(&Shape::Boundary(1), 2).unwrap());
        let d1 = Arc::new(shape(&Shape::Simplex(1), 2).unwrap());
        let inc = sequence_inclusion(&two_points, &d1);
        let (p, _, _) = pushout_sset(&inc, &inc).unwrap();
        assert_eq!(census(&p), vec![2, 2, 0]);
    }

    #[test]
    fn nerve_sset_valid() {
        let g = Arc::new(delooping(&GroupTable::cyclic(2)));
        let (n, _) = nerve_sset(&g, 3);
        n.validate().unwrap();
        assert_eq!(n.card(0), 1);
        assert_eq!(n.card(1), 2);
        assert_eq!(n.card(2), 4);
    }

    #[test]
    fn enumerate_maps_counts() {
        let wide = Budget::wide();
        let point = Arc::new(shape(&Shape::Simplex(0), 3).unwrap());
        let k = Arc::new(shape(&Shape::K, 3).unwrap());
        assert_eq!(enumerate_maps(&point, &k, &wide).unwrap().len(), 2);
        // maps Δ¹ → K = edges of K at level 1: 3 nondegenerate + 2 degenerate
        let d1 = Arc::new(shape(&Shape::Simplex(1), 3).unwrap());
        assert_eq!(enumerate_maps(&d1, &k, &wide).unwrap().len(), 5);
        // terminal target
        assert_eq!(enumerate_maps(&k, &point, &wide).unwrap().len(), 1);
    }

    #[test]
    fn groupoid_nerve_fills_horns() {
        let wide = Budget::wide();
        let g = Arc::new(codiscrete(2));
        let (n, _) = nerve_sset(&g, 3);
        let n = Arc::new(n);
        let point = Arc::new(shape(&Shape::Simplex(0), 0).unwrap());
        let to_point =
            SimplicialMap::new_unchecked(n.clone(), point, vec![vec![0; n.card(0)]]);
        for h in 0..=2 {
            let horn = Arc::new(shape(&Shape::Horn(2, h), 2).unwrap());
            let d2 = Arc::new(shape(&Shape::Simplex(2), 2).unwrap());
            let incl = sequence_inclusion(&horn, &d2);
            assert!(has_rlp(&to_point, &incl, &wide).unwrap().holds);
        }
    }

    #[test]
    fn spine_inclusion_bijection_on_nerve() {
        // maps Δⁿ → N(G) and Sp_n → N(G) biject for a groupoid nerve
        let wide = Budget::wide();
        let g = Arc::new(delooping(&GroupTable::cyclic(3)));
        let (n, _) = nerve_sset(&g, 3);
        let n = Arc::new(n);
        for dim in 2..=3 {
            let spine = Arc::new(shape(&Shape::Spine(dim), dim).unwrap());
            let simplex = Arc::new(shape(&Shape::Simplex(dim), dim).unwrap());
            let from_simplex = enumerate_maps(&simplex, &n, &wide).unwrap().len();
            let from_spine = enumerate_maps(&spine, &n, &wide).unwrap().len();
            assert_eq!(from_simplex, from_spine);
        }
    }

    #[test]
    fn classify_nerve_of_isofibration() {
        let wide = Budget::wide();
        // projection discrete(2) × BZ2 → discrete(2)... use BZ2 → 1
        let t = Arc::new(terminal());
        let e = Arc::new(delooping(&GroupTable::cyclic(2)));
        let p = GroupoidMap::to_terminal(e, t);
        let (f, _, _) = nerve_sset_map(&p, 3);
        let c = classify_sset_map(&f, 3, &wide).unwrap();
        assert!(c.mid_fibration);
        assert!(c.quasi_fibration);
    }

    #[test]
    fn classify_nerve_of_equivalence_that_is_not_isofibration() {
        let wide = Budget::wide();
        let t = Arc::new(terminal());
        let c2 = Arc::new(codiscrete(2));
        let p = GroupoidMap::constant(t, c2, 0);
        let (f, _, _) = nerve_sset_map(&p, 3);
        let c = classify_sset_map(&f, 3, &wide).unwrap();
        assert!(c.mid_fibration);
        assert!(!c.quasi_fibration);
    }

    #[test]
    fn identity_map_classifies_as_both() {
        let wide = Budget::wide();
        let g = Arc::new(discrete(2));
        let (n, _) = nerve_sset(&g, 3);
        let id = SimplicialMap::identity(Arc::new(n));
        let c = classify_sset_map(&id, 3, &wide).unwrap();
        assert!(c.mid_fibration && c.quasi_fibration);
    }

    #[test]
    fn rlp_counterexample_reported() {
        let wide = Budget::wide();
        // the nerve of 1 → codiscrete(2) against the K endpoint: the missing
        // lift is reported as a square
        let t = Arc::new(terminal());
        let c2 = Arc::new(codiscrete(2));
        let p = GroupoidMap::constant(t, c2, 0);
        let (f, _, _) = nerve_sset_map(&p, 3);
        let (k, _, _) = k_interval(3);
        let k = Arc::new(k);
        let v1 = k.names[0].iter().position(|n| n == "L.1").unwrap();
        let endpoint = SimplicialMap::from_vertex(k, v1);
        let r = has_rlp(&f, &endpoint, &wide).unwrap();
        assert!(!r.holds);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn json_round_trip() {
        let j = shape_default(&Shape::J2);
        let s = serde_json::to_string(&j).unwrap();
        let j2: FiniteSimplicialSet = serde_json::from_str(&s).unwrap();
        assert_eq!(j, j2);
    }
}
