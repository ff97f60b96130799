//! Text format for models: groupoids (explicit tables or builtins),
//! functors, fibrations, squares, and universes. The parser attaches
//! line:column locations to every diagnostic; structural laws that are
//! data (associativity, inverses, preservation) are deferred to
//! [`ModelFile::validate`] so a broken table parses and is then reported
//! with its offending triple.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fib::{set_universe, Fibration, FibrationSquare, UniverseData};
use crate::groupoid::{
    codiscrete, delooping, discrete, Groupoid, GroupTable, MorId, ObjId,
};
use crate::map::{functor_classify, GroupoidMap};

// ---------------------------------------------------------------------------
// lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Dot,
    Eq,
    Arrow,  // ->
    MapsTo, // |->
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, co) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c2) = chars.peek() {
                if c2 == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c == '/' {
            bump(&mut chars);
            if chars.peek() == Some(&'/') {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            return Err(Error::Parse {
                line: l,
                col: co,
                msg: "unexpected '/'".into(),
            });
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                col: co,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut n = 0usize;
            while let Some(&c2) = chars.peek() {
                if let Some(d) = c2.to_digit(10) {
                    n = n * 10 + d as usize;
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Int(n),
                line: l,
                col: co,
            });
            continue;
        }
        let simple = |t: Tok, out: &mut Vec<Token>| {
            out.push(Token {
                tok: t,
                line: l,
                col: co,
            })
        };
        match c {
            '{' => {
                bump(&mut chars);
                simple(Tok::LBrace, &mut out)
            }
            '}' => {
                bump(&mut chars);
                simple(Tok::RBrace, &mut out)
            }
            '(' => {
                bump(&mut chars);
                simple(Tok::LParen, &mut out)
            }
            ')' => {
                bump(&mut chars);
                simple(Tok::RParen, &mut out)
            }
            ':' => {
                bump(&mut chars);
                simple(Tok::Colon, &mut out)
            }
            ';' => {
                bump(&mut chars);
                simple(Tok::Semi, &mut out)
            }
            ',' => {
                bump(&mut chars);
                simple(Tok::Comma, &mut out)
            }
            '.' => {
                bump(&mut chars);
                simple(Tok::Dot, &mut out)
            }
            '=' => {
                bump(&mut chars);
                simple(Tok::Eq, &mut out)
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    simple(Tok::Arrow, &mut out);
                } else {
                    return Err(Error::Parse {
                        line: l,
                        col: co,
                        msg: "expected '->'".into(),
                    });
                }
            }
            '|' => {
                bump(&mut chars);
                if chars.peek() == Some(&'-') {
                    bump(&mut chars);
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        simple(Tok::MapsTo, &mut out);
                        continue;
                    }
                }
                return Err(Error::Parse {
                    line: l,
                    col: co,
                    msg: "expected '|->'".into(),
                });
            }
            other => {
                return Err(Error::Parse {
                    line: l,
                    col: co,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// model

#[derive(Clone, Debug)]
pub enum UniverseSource {
    /// `universe U = set(n);` — the universe of sets of size at most n
    Sets(usize),
    /// `universe U = p;` — wrap a declared fibration
    Fibration(String),
}

#[derive(Clone, Debug)]
pub struct SquareDecl {
    pub top: String,
    pub bottom: String,
    pub left: String,
    pub right: String,
}

/// A parsed model: named groupoids, functors between them, fibration and
/// universe markers, and squares. Structural validation is separate so
/// broken tables can be reported rather than rejected mid-parse.
#[derive(Clone, Debug, Default)]
pub struct ModelFile {
    pub groupoids: Vec<(String, Arc<Groupoid>)>,
    pub functors: Vec<(String, GroupoidMap)>,
    pub fibrations: Vec<(String, String)>,
    pub squares: Vec<(String, SquareDecl)>,
    pub universes: Vec<(String, UniverseSource)>,
    /// compositions referenced in blocks but involving unknown pairs are
    /// parse errors; pairs never given stay absent and are reported by
    /// validate()
    missing_comps: Vec<(String, String, String)>,
}

impl ModelFile {
    pub fn groupoid(&self, name: &str) -> Result<&Arc<Groupoid>> {
        self.groupoids
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| Error::Unresolved(format!("groupoid '{name}'")))
    }

    pub fn functor(&self, name: &str) -> Result<&GroupoidMap> {
        self.functors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Unresolved(format!("functor '{name}'")))
    }

    /// Resolves a fibration declaration, re-verifying isofibrancy.
    pub fn fibration(&self, name: &str) -> Result<Fibration> {
        let fname = self
            .fibrations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Unresolved(format!("fibration '{name}'")))?;
        Fibration::new(self.functor(fname)?.clone())
    }

    pub fn square(&self, name: &str) -> Result<FibrationSquare> {
        let d = self
            .squares
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
            .ok_or_else(|| Error::Unresolved(format!("square '{name}'")))?;
        let sq = FibrationSquare {
            p: self.fibration(&d.left)?,
            p_prime: self.fibration(&d.right)?,
            top: self.functor(&d.top)?.clone(),
            bottom: self.functor(&d.bottom)?.clone(),
        };
        sq.validate()?;
        Ok(sq)
    }

    pub fn universe(&self, name: &str) -> Result<UniverseData> {
        let src = self
            .universes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::Unresolved(format!("universe '{name}'")))?;
        match src {
            UniverseSource::Sets(n) => Ok(set_universe(*n)),
            UniverseSource::Fibration(p) => Ok(UniverseData {
                pi: self.fibration(p)?,
            }),
        }
    }

    /// Structural diagnostics: groupoid laws (associativity, identities,
    /// inverses, missing compositions), functor preservation, and
    /// isofibrancy of declared fibrations. Empty means the model is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        for (g, f, names) in self.missing_comps.iter().map(|t| (&t.0, &t.1, &t.2)) {
            diags.push(format!("groupoid '{g}': missing composition {names}.{f}"));
        }
        for (name, g) in &self.groupoids {
            for d in g.validate().violations {
                diags.push(format!("groupoid '{name}': {d}"));
            }
        }
        for (name, f) in &self.functors {
            if let Err(e) = f.validate() {
                diags.push(format!("functor '{name}': {e}"));
            }
        }
        for (name, fname) in &self.fibrations {
            match self.functor(fname) {
                Ok(f) => {
                    if !functor_classify(f).isofibration {
                        diags.push(format!(
                            "fibration '{name}': functor '{fname}' is not an isofibration"
                        ));
                    }
                }
                Err(e) => diags.push(format!("fibration '{name}': {e}")),
            }
        }
        for (name, d) in &self.squares {
            if let Err(e) = self.square(name) {
                let _ = d;
                diags.push(format!("square '{name}': {e}"));
            }
        }
        for (name, _) in &self.universes {
            if let Err(e) = self.universe(name) {
                diags.push(format!("universe '{name}': {e}"));
            }
        }
        diags
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.eof("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eof(&self, msg: &str) -> Error {
        let (line, col) = self
            .toks
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn err(&self, t: &Token, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        let t = self.next()?;
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.err(&t, format!("expected {what}, found {:?}", t.tok)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token)> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Err(self.err(&t, format!("expected {what}, found {:?}", t.tok))),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(n) => Ok(n),
            _ => Err(self.err(&t, format!("expected {what}, found {:?}", t.tok))),
        }
    }
}

struct RawGroupoid {
    objects: Vec<(String, Token)>,
    mors: Vec<(String, String, String, Token)>, // name, src, tgt
    comps: Vec<(String, String, String, Token)>, // g, f, result (g.f = result)
}

/// Builds the groupoid tables: identities `id_<obj>` are synthesized,
/// identity compositions and inverses are inferred, and composition rows
/// never contradict the block (unknown names are located errors; missing
/// rows are deferred to validate()).
fn build_groupoid(
    name: &str,
    raw: RawGroupoid,
    missing: &mut Vec<(String, String, String)>,
) -> Result<Arc<Groupoid>> {
    let perr = |t: &Token, msg: String| Error::Parse {
        line: t.line,
        col: t.col,
        msg,
    };
    let mut obj_names: Vec<String> = Vec::new();
    let mut obj_of: HashMap<String, ObjId> = HashMap::new();
    for (o, t) in &raw.objects {
        if obj_of.contains_key(o) {
            return Err(perr(t, format!("duplicate object '{o}'")));
        }
        obj_of.insert(o.clone(), obj_names.len() as ObjId);
        obj_names.push(o.clone());
    }
    let mut mor_names: Vec<String> = Vec::new();
    let mut mor_of: HashMap<String, MorId> = HashMap::new();
    let mut src: Vec<ObjId> = Vec::new();
    let mut tgt: Vec<ObjId> = Vec::new();
    let mut identity: Vec<MorId> = Vec::new();
    for (i, o) in obj_names.iter().enumerate() {
        let n = format!("id_{o}");
        mor_of.insert(n.clone(), mor_names.len() as MorId);
        identity.push(mor_names.len() as MorId);
        mor_names.push(n);
        src.push(i as ObjId);
        tgt.push(i as ObjId);
    }
    for (m, s, t, tok) in &raw.mors {
        if mor_of.contains_key(m) {
            return Err(perr(tok, format!("duplicate morphism '{m}'")));
        }
        let so = *obj_of
            .get(s)
            .ok_or_else(|| perr(tok, format!("unknown object '{s}'")))?;
        let to = *obj_of
            .get(t)
            .ok_or_else(|| perr(tok, format!("unknown object '{t}'")))?;
        mor_of.insert(m.clone(), mor_names.len() as MorId);
        mor_names.push(m.clone());
        src.push(so);
        tgt.push(to);
    }
    let mut comp: HashMap<(MorId, MorId), MorId> = HashMap::new();
    for (g, f, r, tok) in &raw.comps {
        let gi = *mor_of
            .get(g)
            .ok_or_else(|| perr(tok, format!("unknown morphism '{g}'")))?;
        let fi = *mor_of
            .get(f)
            .ok_or_else(|| perr(tok, format!("unknown morphism '{f}'")))?;
        let ri = *mor_of
            .get(r)
            .ok_or_else(|| perr(tok, format!("unknown morphism '{r}'")))?;
        if tgt[fi as usize] != src[gi as usize] {
            return Err(perr(tok, format!("'{g}.{f}' is not composable")));
        }
        if let Some(&prev) = comp.get(&(gi, fi)) {
            if prev != ri {
                return Err(perr(tok, format!("conflicting row for '{g}.{f}'")));
            }
        }
        comp.insert((gi, fi), ri);
    }
    // identity compositions are inferred unless contradicted by a row
    for m in 0..mor_names.len() as MorId {
        comp.entry((m, identity[src[m as usize] as usize]))
            .or_insert(m);
        comp.entry((identity[tgt[m as usize] as usize], m))
            .or_insert(m);
    }
    // record composable pairs with no row for validate()
    for f in 0..mor_names.len() as MorId {
        for g in 0..mor_names.len() as MorId {
            if src[g as usize] == tgt[f as usize] && !comp.contains_key(&(g, f)) {
                missing.push((
                    name.to_string(),
                    mor_names[f as usize].clone(),
                    mor_names[g as usize].clone(),
                ));
            }
        }
    }
    // inverses inferred where the table provides them; self as a stand-in
    // otherwise so validation reports the law violation
    let inv: Vec<MorId> = (0..mor_names.len() as MorId)
        .map(|m| {
            (0..mor_names.len() as MorId)
                .find(|&f| {
                    comp.get(&(f, m)) == Some(&identity[src[m as usize] as usize])
                        && comp.get(&(m, f)) == Some(&identity[tgt[m as usize] as usize])
                })
                .unwrap_or(m)
        })
        .collect();
    Ok(Arc::new(Groupoid::from_tables_unchecked(
        obj_names, mor_names, src, tgt, identity, comp, inv,
    )))
}

pub fn parse(text: &str) -> Result<ModelFile> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut model = ModelFile::default();
    while p.peek().is_some() {
        let (kw, kw_tok) = p.ident("a declaration keyword")?;
        match kw.as_str() {
            "groupoid" => {
                let (name, _) = p.ident("a groupoid name")?;
                let t = p.next()?;
                let g = match t.tok {
                    Tok::Eq => {
                        let g = parse_builtin(&mut p)?;
                        p.expect(Tok::Semi, "';'")?;
                        Arc::new(g)
                    }
                    Tok::LBrace => {
                        let raw = parse_groupoid_block(&mut p)?;
                        build_groupoid(&name, raw, &mut model.missing_comps)?
                    }
                    _ => return Err(p.err(&t, "expected '=' or '{'")),
                };
                model.groupoids.push((name, g));
            }
            "functor" => {
                let (name, _) = p.ident("a functor name")?;
                p.expect(Tok::Colon, "':'")?;
                let (a, at) = p.ident("the domain groupoid")?;
                p.expect(Tok::Arrow, "'->'")?;
                let (b, bt) = p.ident("the codomain groupoid")?;
                let dom = model
                    .groupoid(&a)
                    .map_err(|_| p.err(&at, format!("unknown groupoid '{a}'")))?
                    .clone();
                let cod = model
                    .groupoid(&b)
                    .map_err(|_| p.err(&bt, format!("unknown groupoid '{b}'")))?
                    .clone();
                p.expect(Tok::LBrace, "'{'")?;
                let f = parse_functor_block(&mut p, dom, cod)?;
                model.functors.push((name, f));
            }
            "fibration" => {
                let (name, _) = p.ident("a fibration name")?;
                p.expect(Tok::Eq, "'='")?;
                let (f, ft) = p.ident("a functor name")?;
                p.expect(Tok::Semi, "';'")?;
                model
                    .functor(&f)
                    .map_err(|_| p.err(&ft, format!("unknown functor '{f}'")))?;
                model.fibrations.push((name, f));
            }
            "square" => {
                let (name, _) = p.ident("a square name")?;
                p.expect(Tok::LBrace, "'{'")?;
                let mut sides: HashMap<String, String> = HashMap::new();
                loop {
                    let t = p.next()?;
                    match &t.tok {
                        Tok::RBrace => break,
                        Tok::Ident(side)
                            if matches!(side.as_str(), "top" | "bottom" | "left" | "right") =>
                        {
                            p.expect(Tok::Colon, "':'")?;
                            let (v, _) = p.ident("a name")?;
                            p.expect(Tok::Semi, "';'")?;
                            sides.insert(side.clone(), v);
                        }
                        _ => return Err(p.err(&t, "expected top/bottom/left/right or '}'")),
                    }
                }
                let side = |k: &str| -> Result<String> {
                    sides
                        .get(k)
                        .cloned()
                        .ok_or_else(|| p.err(&kw_tok, format!("square '{name}' missing '{k}'")))
                };
                model.squares.push((
                    name.clone(),
                    SquareDecl {
                        top: side("top")?,
                        bottom: side("bottom")?,
                        left: side("left")?,
                        right: side("right")?,
                    },
                ));
            }
            "universe" => {
                let (name, _) = p.ident("a universe name")?;
                p.expect(Tok::Eq, "'='")?;
                let (v, vt) = p.ident("a fibration name or set(n)")?;
                let src = if v == "set" {
                    p.expect(Tok::LParen, "'('")?;
                    let n = p.int("a size")?;
                    p.expect(Tok::RParen, "')'")?;
                    UniverseSource::Sets(n)
                } else {
                    if !model.fibrations.iter().any(|(n, _)| n == &v) {
                        return Err(p.err(&vt, format!("unknown fibration '{v}'")));
                    }
                    UniverseSource::Fibration(v)
                };
                p.expect(Tok::Semi, "';'")?;
                model.universes.push((name, src));
            }
            other => {
                return Err(p.err(
                    &kw_tok,
                    format!(
                        "unknown declaration '{other}' (expected groupoid, functor, \
                         fibration, square, or universe)"
                    ),
                ))
            }
        }
    }
    Ok(model)
}

fn parse_builtin(p: &mut Parser) -> Result<Groupoid> {
    let (kind, kt) = p.ident("a builtin (discrete, codiscrete, group, terminal)")?;
    match kind.as_str() {
        "discrete" | "codiscrete" => {
            p.expect(Tok::LParen, "'('")?;
            let n = p.int("a size")?;
            p.expect(Tok::RParen, "')'")?;
            Ok(if kind == "discrete" {
                discrete(n)
            } else {
                codiscrete(n)
            })
        }
        "terminal" => Ok(discrete(1)),
        "group" => {
            let (g, gt) = p.ident("a group name (Z1, Z2, Z3, S3)")?;
            let table = match g.as_str() {
                "Z1" => GroupTable::trivial(),
                "Z2" => GroupTable::cyclic(2),
                "Z3" => GroupTable::cyclic(3),
                "S3" => GroupTable::s3(),
                other => {
                    return Err(p.err(&gt, format!("unknown group '{other}'")))
                }
            };
            Ok(delooping(&table))
        }
        other => Err(p.err(&kt, format!("unknown builtin '{other}'"))),
    }
}

fn parse_groupoid_block(p: &mut Parser) -> Result<RawGroupoid> {
    let mut raw = RawGroupoid {
        objects: Vec::new(),
        mors: Vec::new(),
        comps: Vec::new(),
    };
    loop {
        let t = p.next()?;
        match &t.tok {
            Tok::RBrace => break,
            Tok::Ident(kw) if kw == "objects" => {
                p.expect(Tok::Colon, "':'")?;
                loop {
                    let (o, ot) = p.ident("an object name")?;
                    raw.objects.push((o, ot));
                    let t2 = p.next()?;
                    match t2.tok {
                        Tok::Comma => continue,
                        Tok::Semi => break,
                        _ => return Err(p.err(&t2, "expected ',' or ';'")),
                    }
                }
            }
            Tok::Ident(kw) if kw == "mor" => {
                let (m, mt) = p.ident("a morphism name")?;
                p.expect(Tok::Colon, "':'")?;
                let (s, _) = p.ident("the source object")?;
                p.expect(Tok::Arrow, "'->'")?;
                let (tg, _) = p.ident("the target object")?;
                p.expect(Tok::Semi, "';'")?;
                raw.mors.push((m, s, tg, mt));
            }
            Tok::Ident(kw) if kw == "comp" => {
                let (g, gt) = p.ident("a morphism name")?;
                p.expect(Tok::Dot, "'.'")?;
                let (f, _) = p.ident("a morphism name")?;
                p.expect(Tok::Eq, "'='")?;
                let (r, _) = p.ident("a morphism name")?;
                p.expect(Tok::Semi, "';'")?;
                raw.comps.push((g, f, r, gt));
            }
            _ => return Err(p.err(&t, "expected objects/mor/comp or '}'")),
        }
    }
    Ok(raw)
}

fn parse_functor_block(
    p: &mut Parser,
    dom: Arc<Groupoid>,
    cod: Arc<Groupoid>,
) -> Result<GroupoidMap> {
    let mut on_obj: Vec<Option<ObjId>> = vec![None; dom.n_objects()];
    let mut on_mor: Vec<Option<MorId>> = vec![None; dom.n_morphisms()];
    let close_tok;
    loop {
        let t = p.next()?;
        match &t.tok {
            Tok::RBrace => {
                close_tok = Some(t);
                break;
            }
            Tok::Ident(name) => {
                p.expect(Tok::MapsTo, "'|->'")?;
                let (img, it) = p.ident("an image name")?;
                p.expect(Tok::Semi, "';'")?;
                if let Some(o) = dom.obj_by_name(name) {
                    let oi = cod
                        .obj_by_name(&img)
                        .ok_or_else(|| p.err(&it, format!("unknown object '{img}'")))?;
                    on_obj[o as usize] = Some(oi);
                } else if let Some(m) = dom.mor_by_name(name) {
                    let mi = cod
                        .mor_by_name(&img)
                        .ok_or_else(|| p.err(&it, format!("unknown morphism '{img}'")))?;
                    on_mor[m as usize] = Some(mi);
                } else {
                    return Err(p.err(&t, format!("'{name}' is not in the domain")));
                }
            }
            _ => return Err(p.err(&t, "expected a mapping or '}'")),
        }
    }
    let close = close_tok.unwrap();
    let on_obj: Vec<ObjId> = on_obj
        .iter()
        .enumerate()
        .map(|(o, v)| {
            v.ok_or_else(|| {
                p.err(
                    &close,
                    format!("object '{}' has no image", dom.obj_name(o as ObjId)),
                )
            })
        })
        .collect::<Result<_>>()?;
    // identities inferred from the object images unless given
    let on_mor: Vec<MorId> = on_mor
        .iter()
        .enumerate()
        .map(|(m, v)| match v {
            Some(mi) => Ok(*mi),
            None if dom.is_identity(m as MorId) => {
                Ok(cod.identity(on_obj[dom.src(m as MorId) as usize]))
            }
            None => Err(p.err(
                &close,
                format!("morphism '{}' has no image", dom.mor_name(m as MorId)),
            )),
        })
        .collect::<Result<_>>()?;
    Ok(GroupoidMap::new_unchecked(dom, cod, on_obj, on_mor))
}

// ---------------------------------------------------------------------------
// emitting

/// Renders a model back to text in the normalized explicit form: every
/// groupoid as a full block (identities and identity rows omitted, they are
/// re-inferred), every functor with its object and non-identity morphism
/// mappings.
pub fn emit(model: &ModelFile) -> String {
    let mut s = String::new();
    for (name, g) in &model.groupoids {
        let _ = writeln!(s, "groupoid {name} {{");
        let objs: Vec<&str> = g.objects().map(|o| g.obj_name(o)).collect();
        let _ = writeln!(s, "  objects: {};", objs.join(", "));
        for m in g.morphisms().filter(|&m| !g.is_identity(m)) {
            let _ = writeln!(
                s,
                "  mor {}: {} -> {};",
                g.mor_name(m),
                g.obj_name(g.src(m)),
                g.obj_name(g.tgt(m))
            );
        }
        for f in g.morphisms().filter(|&m| !g.is_identity(m)) {
            for gm in g.morphisms().filter(|&m| !g.is_identity(m)) {
                if g.src(gm) == g.tgt(f) {
                    if let Some(r) = g.compose(gm, f) {
                        let _ = writeln!(
                            s,
                            "  comp {}.{} = {};",
                            g.mor_name(gm),
                            g.mor_name(f),
                            g.mor_name(r)
                        );
                    }
                }
            }
        }
        let _ = writeln!(s, "}}");
    }
    for (name, f) in &model.functors {
        let dom_name = model
            .groupoids
            .iter()
            .find(|(_, g)| Arc::ptr_eq(g, &f.dom) || g.as_ref() == f.dom.as_ref())
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| "_".into());
        let cod_name = model
            .groupoids
            .iter()
            .find(|(_, g)| Arc::ptr_eq(g, &f.cod) || g.as_ref() == f.cod.as_ref())
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| "_".into());
        let _ = writeln!(s, "functor {name}: {dom_name} -> {cod_name} {{");
        for o in f.dom.objects() {
            let _ = writeln!(
                s,
                "  {} |-> {};",
                f.dom.obj_name(o),
                f.cod.obj_name(f.ob(o))
            );
        }
        for m in f.dom.morphisms().filter(|&m| !f.dom.is_identity(m)) {
            let _ = writeln!(
                s,
                "  {} |-> {};",
                f.dom.mor_name(m),
                f.cod.mor_name(f.mor(m))
            );
        }
        let _ = writeln!(s, "}}");
    }
    for (name, fname) in &model.fibrations {
        let _ = writeln!(s, "fibration {name} = {fname};");
    }
    for (name, d) in &model.squares {
        let _ = writeln!(
            s,
            "square {name} {{ top: {}; bottom: {}; left: {}; right: {}; }}",
            d.top, d.bottom, d.left, d.right
        );
    }
    for (name, src) in &model.universes {
        match src {
            UniverseSource::Sets(n) => {
                let _ = writeln!(s, "universe {name} = set({n});");
            }
            UniverseSource::Fibration(p) => {
                let _ = writeln!(s, "universe {name} = {p};");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
# BZ2 over the point, as explicit tables
groupoid Pt = terminal;
groupoid E {
  objects: x;
  mor s: x -> x;
  comp s.s = id_x;
}
functor P: E -> Pt {
  x |-> x0;
  s |-> id_x0;
}
fibration p = P;
universe U = set(1);
"#;

    #[test]
    fn parses_sample_and_validates() {
        let m = parse(SAMPLE).unwrap();
        assert!(m.validate().is_empty(), "{:?}", m.validate());
        let e = m.groupoid("E").unwrap();
        assert_eq!(e.n_objects(), 1);
        assert_eq!(e.n_morphisms(), 2);
        let p = m.fibration("p").unwrap();
        assert_eq!(p.total().n_morphisms(), 2);
        m.universe("U").unwrap();
    }

    #[test]
    fn builtin_discrete() {
        let m = parse("groupoid B = discrete(2);").unwrap();
        let b = m.groupoid("B").unwrap();
        assert_eq!(b.n_objects(), 2);
        assert_eq!(b.n_morphisms(), 2);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn broken_associativity_parses_and_reports() {
        // Z3 with the composition of g.g deliberately wrong
        let text = r#"
groupoid G {
  objects: x;
  mor g: x -> x;
  mor h: x -> x;
  comp g.g = h;
  comp h.g = id_x;
  comp g.h = id_x;
  comp h.h = h;
}
"#;
        let m = parse(text).unwrap();
        let diags = m.validate();
        assert!(!diags.is_empty());
        assert!(diags.iter().any(|d| d.contains("associa") || d.contains("h")));
    }

    #[test]
    fn located_errors() {
        let err = parse("groupoid B = discrete(2)").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected a parse error, got {other}"),
        }
        let err = parse("groupoid B {\n  objects: a;\n  mor f: a -> b;\n}").unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 3);
                assert!(msg.contains("unknown object 'b'"));
            }
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn missing_composition_reported() {
        let text = r#"
groupoid G {
  objects: x;
  mor g: x -> x;
  mor h: x -> x;
  comp g.g = h;
}
"#;
        let m = parse(text).unwrap();
        let diags = m.validate();
        assert!(diags.iter().any(|d| d.contains("missing composition")));
    }

    #[test]
    fn round_trip_is_identity_up_to_normalization() {
        let m = parse(SAMPLE).unwrap();
        let text = emit(&m);
        let m2 = parse(&text).unwrap();
        assert_eq!(m.groupoids.len(), m2.groupoids.len());
        for ((n1, g1), (n2, g2)) in m.groupoids.iter().zip(m2.groupoids.iter()) {
            assert_eq!(n1, n2);
            assert_eq!(
                serde_json::to_string(g1.as_ref()).unwrap(),
                serde_json::to_string(g2.as_ref()).unwrap()
            );
        }
        for ((n1, f1), (n2, f2)) in m.functors.iter().zip(m2.functors.iter()) {
            assert_eq!(n1, n2);
            assert_eq!(f1.on_obj, f2.on_obj);
            assert_eq!(f1.on_mor, f2.on_mor);
        }
        assert_eq!(m.fibrations, m2.fibrations);
        // and a second round trip is literally stable
        assert_eq!(text, emit(&m2));
    }

    #[test]
    fn square_block_resolves() {
        let text = r#"
groupoid B = discrete(1);
groupoid E = discrete(1);
functor F: E -> B { x0 |-> x0; }
functor T: E -> E { x0 |-> x0; }
functor G: B -> B { x0 |-> x0; }
fibration p = F;
square S { top: T; bottom: G; left: p; right: p; }
"#;
        let m = parse(text).unwrap();
        assert!(m.validate().is_empty(), "{:?}", m.validate());
        m.square("S").unwrap();
    }
}
