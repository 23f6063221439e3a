//! Line-oriented text format for algebras, modules, bimodules and tilt
//! problems, with a canonical serializer.
//!
//! ```text
//! [algebra A]
//! field Q
//! basis e:0 t:0
//! unit 1 e
//! mul t*e = 1 t
//! diff x = 1 y
//! ```
//!
//! Modules add `over A` (left) or `rightover A` (right) and `act a*m = ...`
//! or `ract m*a = ...`; bimodules take both. Problems name their parts with
//! `R = NAME` or `R = file:PATH[#NAME]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{check_dga, DGAlgebra};
use crate::complexes::Complex;
use crate::linalg::{GradedMap, GradedSpace, SparseVec};
use crate::module::{check_bimodule, check_module, DGBimodule, DGModule, Side};
use crate::report::Report;
use crate::resolution::Caps;
use crate::scalar::{Field, Scalar};
use crate::tilt::TiltProblem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{file}:{line}:{col}: ParseError: {msg}")]
    Parse { file: String, line: usize, col: usize, msg: String },
    #[error("{file}: SemanticError in [{section}]: {witness}")]
    Semantic { file: String, section: String, witness: String },
    #[error("{file}:{line}:{col}: UnresolvedReference: {name}")]
    Unresolved { file: String, line: usize, col: usize, name: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Algebra,
    Bimodule,
    Module,
    Problem,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Algebra => "algebra",
            Kind::Bimodule => "bimodule",
            Kind::Module => "module",
            Kind::Problem => "problem",
        }
    }
}

/// A section name in this file, or one in another file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reference {
    Local(String),
    File { path: String, name: Option<String> },
}

impl Reference {
    fn parse(s: &str) -> Reference {
        match s.strip_prefix("file:") {
            Some(rest) => match rest.split_once('#') {
                Some((p, n)) => Reference::File { path: p.into(), name: Some(n.into()) },
                None => Reference::File { path: rest.into(), name: None },
            },
            None => Reference::Local(s.into()),
        }
    }
}

impl std::fmt::Display for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reference::Local(n) => f.write_str(n),
            Reference::File { path, name: None } => write!(f, "file:{path}"),
            Reference::File { path, name: Some(n) } => write!(f, "file:{path}#{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleEntry {
    pub over: Reference,
    pub module: DGModule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleEntry {
    pub over: Reference,
    pub rightover: Reference,
    pub bimodule: DGBimodule,
}

/// Label-level images `label ↦ Σ c·label'`.
pub type LabelMap = BTreeMap<String, Vec<(String, Scalar)>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub r: Reference,
    pub s: Reference,
    pub m: Reference,
    pub x: Option<Reference>,
    pub u: Option<(Reference, LabelMap)>,
    pub v: Option<(Reference, LabelMap)>,
    pub caps: Caps,
}

#[derive(Debug, Clone)]
pub struct ProblemEntry {
    pub spec: ProblemSpec,
    pub problem: TiltProblem,
}

impl PartialEq for ProblemEntry {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub algebras: BTreeMap<String, Arc<DGAlgebra>>,
    pub bimodules: BTreeMap<String, BimoduleEntry>,
    pub modules: BTreeMap<String, ModuleEntry>,
    pub problems: BTreeMap<String, ProblemEntry>,
}

impl Document {
    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty() && self.bimodules.is_empty() && self.modules.is_empty() && self.problems.is_empty()
    }

    fn names(&self, kind: Kind) -> Vec<String> {
        match kind {
            Kind::Algebra => self.algebras.keys().cloned().collect(),
            Kind::Bimodule => self.bimodules.keys().cloned().collect(),
            Kind::Module => self.modules.keys().cloned().collect(),
            Kind::Problem => self.problems.keys().cloned().collect(),
        }
    }

    /// Name of an algebra in this document equal to `a`, if any.
    pub fn algebra_name(&self, a: &DGAlgebra) -> Option<&str> {
        self.algebras.iter().find(|(_, b)| ***b == *a).map(|(n, _)| n.as_str())
    }
}

struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = vec![];
    let mut start = None;
    let mut col = 0;
    let mut start_col = 0;
    for (i, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { col: start_col, text: &line[s..i] });
            }
        } else if start.is_none() {
            start = Some(i);
            start_col = col;
        }
    }
    if let Some(s) = start {
        out.push(Token { col: start_col, text: &line[s..] });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, ch) in line.char_indices() {
        if ch == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = ch.is_whitespace();
    }
    line
}

struct Directive<'a> {
    line: usize,
    toks: Vec<Token<'a>>,
}

struct RawSection<'a> {
    kind: Kind,
    name: String,
    line: usize,
    directives: Vec<Directive<'a>>,
}

struct Ctx<'a> {
    file: String,
    base: Option<PathBuf>,
    cache: &'a mut BTreeMap<PathBuf, Document>,
    stack: &'a mut Vec<PathBuf>,
}

impl Ctx<'_> {
    fn parse_err(&self, line: usize, col: usize, msg: impl Into<String>) -> FormatError {
        FormatError::Parse { file: self.file.clone(), line, col, msg: msg.into() }
    }

    fn unresolved(&self, line: usize, col: usize, name: impl Into<String>) -> FormatError {
        FormatError::Unresolved { file: self.file.clone(), line, col, name: name.into() }
    }

    fn semantic(&self, section: &str, witness: impl Into<String>) -> FormatError {
        FormatError::Semantic { file: self.file.clone(), section: section.into(), witness: witness.into() }
    }
}

fn split_sections<'a>(ctx: &Ctx, text: &'a str) -> Result<Vec<RawSection<'a>>, FormatError> {
    let mut out: Vec<RawSection> = vec![];
    let mut seen = BTreeSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            let col = body.find('[').unwrap() + 1;
            let inner = trimmed
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| ctx.parse_err(line, col, "section header must be `[kind NAME]`"))?;
            let parts: Vec<&str> = inner.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(ctx.parse_err(line, col, "section header must be `[kind NAME]`"));
            }
            let kind = match parts[0] {
                "algebra" => Kind::Algebra,
                "module" => Kind::Module,
                "bimodule" => Kind::Bimodule,
                "problem" => Kind::Problem,
                k => return Err(ctx.parse_err(line, col + 1, format!("unknown section kind `{k}`"))),
            };
            if !seen.insert(parts[1].to_string()) {
                return Err(ctx.parse_err(line, col, format!("duplicate section name `{}`", parts[1])));
            }
            out.push(RawSection { kind, name: parts[1].into(), line, directives: vec![] });
            continue;
        }
        let toks = tokens(body);
        match out.last_mut() {
            Some(s) => s.directives.push(Directive { line, toks }),
            None => return Err(ctx.parse_err(line, toks[0].col, "directive outside of a section")),
        }
    }
    Ok(out)
}

fn parse_field(ctx: &Ctx, d: &Directive) -> Result<Field, FormatError> {
    match d.toks.get(1).map(|t| t.text) {
        Some("Q") if d.toks.len() == 2 => Ok(Field::Rationals),
        Some("Fp") if d.toks.len() == 3 => {
            let t = &d.toks[2];
            let p: u64 = t.text.parse().map_err(|_| ctx.parse_err(d.line, t.col, "expected a prime"))?;
            Field::prime(p).map_err(|e| ctx.parse_err(d.line, t.col, e.to_string()))
        }
        _ => Err(ctx.parse_err(d.line, d.toks[0].col, "expected `field Q` or `field Fp P`")),
    }
}

/// Labels and degrees from the `basis` lines, in order.
fn parse_basis(ctx: &Ctx, sec: &RawSection) -> Result<Vec<(String, i32)>, FormatError> {
    let mut basis = vec![];
    let mut seen = BTreeSet::new();
    for d in sec.directives.iter().filter(|d| d.toks[0].text == "basis") {
        for t in &d.toks[1..] {
            let (l, deg) = t
                .text
                .rsplit_once(':')
                .ok_or_else(|| ctx.parse_err(d.line, t.col, "basis entries are `LABEL:DEGREE`"))?;
            let deg: i32 = deg.parse().map_err(|_| ctx.parse_err(d.line, t.col + l.len() + 1, "degree must be an integer"))?;
            if l.is_empty() || l.contains(['*', '=', '+']) {
                return Err(ctx.parse_err(d.line, t.col, format!("invalid label `{l}`")));
            }
            if !seen.insert(l.to_string()) {
                return Err(ctx.parse_err(d.line, t.col, format!("duplicate basis label `{l}`")));
            }
            basis.push((l.to_string(), deg));
        }
    }
    Ok(basis)
}

/// `COEFF LABEL [+ COEFF LABEL ...]` or `0`.
fn parse_terms(ctx: &Ctx, line: usize, toks: &[Token], field: Field, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<SparseVec, FormatError> {
    if toks.len() == 1 && toks[0].text == "0" {
        return Ok(vec![]);
    }
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut i = 0;
    loop {
        let (Some(c), Some(l)) = (toks.get(i), toks.get(i + 1)) else {
            let col = toks.get(i).map_or(toks.last().map_or(1, |t| t.col), |t| t.col);
            return Err(ctx.parse_err(line, col, "expected `COEFF LABEL`"));
        };
        let x = Scalar::parse(c.text, field).map_err(|e| ctx.parse_err(line, c.col, e.to_string()))?;
        let k = lookup(l.text).ok_or_else(|| ctx.unresolved(line, l.col, format!("basis label `{}`", l.text)))?;
        let e = acc.entry(k).or_insert_with(|| field.zero());
        *e += &x;
        i += 2;
        match toks.get(i) {
            None => break,
            Some(t) if t.text == "+" => i += 1,
            Some(t) => return Err(ctx.parse_err(line, t.col, "expected `+`")),
        }
    }
    Ok(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}

/// `KEY A*B = terms`: returns the two labels and the term tokens.
fn split_product<'t, 'a>(ctx: &Ctx, d: &'t Directive<'a>) -> Result<(&'t Token<'a>, &'a str, &'a str, &'t [Token<'a>]), FormatError> {
    let key = &d.toks[0];
    let Some(lhs) = d.toks.get(1) else { return Err(ctx.parse_err(d.line, key.col, format!("`{}` needs `A*B = ...`", key.text))) };
    let (a, b) = lhs.text.split_once('*').ok_or_else(|| ctx.parse_err(d.line, lhs.col, "expected `A*B`"))?;
    match d.toks.get(2) {
        Some(t) if t.text == "=" => Ok((lhs, a, b, &d.toks[3..])),
        Some(t) => Err(ctx.parse_err(d.line, t.col, "expected `=`")),
        None => Err(ctx.parse_err(d.line, lhs.col + lhs.text.len(), "expected `=`")),
    }
}

fn split_assign<'t, 'a>(ctx: &Ctx, d: &'t Directive<'a>) -> Result<(&'t Token<'a>, &'t [Token<'a>]), FormatError> {
    let key = &d.toks[0];
    let Some(lhs) = d.toks.get(1) else { return Err(ctx.parse_err(d.line, key.col, format!("`{}` needs `LABEL = ...`", key.text))) };
    match d.toks.get(2) {
        Some(t) if t.text == "=" => Ok((lhs, &d.toks[3..])),
        Some(t) => Err(ctx.parse_err(d.line, t.col, "expected `=`")),
        None => Err(ctx.parse_err(d.line, lhs.col + lhs.text.len(), "expected `=`")),
    }
}

fn section_field(ctx: &Ctx, sec: &RawSection, file_field: &mut Option<(Field, usize)>) -> Result<Field, FormatError> {
    let mut field = None;
    for d in sec.directives.iter().filter(|d| d.toks[0].text == "field") {
        if field.is_some() {
            return Err(ctx.parse_err(d.line, d.toks[0].col, "repeated `field`"));
        }
        let f = parse_field(ctx, d)?;
        if let Some((g, l)) = file_field {
            if *g != f {
                return Err(ctx.semantic(&sec.name, format!("field {f} differs from field {g} declared on line {l}")));
            }
        } else {
            *file_field = Some((f, d.line));
        }
        field = Some(f);
    }
    field.ok_or_else(|| ctx.parse_err(sec.line, 1, format!("section `{}` has no `field`", sec.name)))
}

fn check_keys(ctx: &Ctx, sec: &RawSection, allowed: &[&str]) -> Result<(), FormatError> {
    for d in &sec.directives {
        if !allowed.contains(&d.toks[0].text) {
            return Err(ctx.parse_err(d.line, d.toks[0].col, format!("unknown directive `{}` in {} section", d.toks[0].text, sec.kind.name())));
        }
    }
    Ok(())
}

fn first_failure(r: &Report) -> Option<String> {
    r.failures().next().map(|c| format!("{} \u{2014} {}", c.name, c.witness))
}

fn build_space(ctx: &Ctx, sec: &RawSection, field: Field) -> Result<Arc<GradedSpace>, FormatError> {
    let basis = parse_basis(ctx, sec)?;
    Ok(Arc::new(GradedSpace::new(field, basis).map_err(|e| ctx.semantic(&sec.name, e.to_string()))?))
}

fn build_differential(ctx: &Ctx, sec: &RawSection, space: &Arc<GradedSpace>) -> Result<GradedMap, FormatError> {
    let field = space.field();
    let lookup = |l: &str| space.index_of(l);
    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for d in sec.directives.iter().filter(|d| d.toks[0].text == "diff") {
        let (lhs, rest) = split_assign(ctx, d)?;
        let i = lookup(lhs.text).ok_or_else(|| ctx.unresolved(d.line, lhs.col, format!("basis label `{}`", lhs.text)))?;
        if rows.contains_key(&i) {
            return Err(ctx.parse_err(d.line, lhs.col, format!("repeated `diff {}`", lhs.text)));
        }
        rows.insert(i, parse_terms(ctx, d.line, rest, field, &lookup)?);
    }
    GradedMap::from_images(space.clone(), space.clone(), 1, |i| rows.get(&i).cloned().unwrap_or_default())
        .map_err(|e| ctx.semantic(&sec.name, format!("differential: {e}")))
}

fn build_algebra(ctx: &Ctx, sec: &RawSection, ff: &mut Option<(Field, usize)>) -> Result<Arc<DGAlgebra>, FormatError> {
    check_keys(ctx, sec, &["field", "basis", "unit", "mul", "diff"])?;
    let field = section_field(ctx, sec, ff)?;
    let space = build_space(ctx, sec, field)?;
    let lookup = |l: &str| space.index_of(l);
    let mut unit = None;
    let mut table: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for d in &sec.directives {
        match d.toks[0].text {
            "unit" => {
                if unit.is_some() {
                    return Err(ctx.parse_err(d.line, d.toks[0].col, "repeated `unit`"));
                }
                unit = Some(parse_terms(ctx, d.line, &d.toks[1..], field, &lookup)?);
            }
            "mul" => {
                let (lhs, a, b, rest) = split_product(ctx, d)?;
                let ia = lookup(a).ok_or_else(|| ctx.unresolved(d.line, lhs.col, format!("basis label `{a}`")))?;
                let ib = lookup(b).ok_or_else(|| ctx.unresolved(d.line, lhs.col + a.len() + 1, format!("basis label `{b}`")))?;
                if table.contains_key(&(ia, ib)) {
                    return Err(ctx.parse_err(d.line, lhs.col, format!("repeated `mul {}`", lhs.text)));
                }
                table.insert((ia, ib), parse_terms(ctx, d.line, rest, field, &lookup)?);
            }
            _ => {}
        }
    }
    let unit = unit.ok_or_else(|| ctx.parse_err(sec.line, 1, format!("algebra `{}` has no `unit`", sec.name)))?;
    let d = build_differential(ctx, sec, &space)?;
    let mut u = space.zero_vec();
    for (i, x) in unit {
        u[i] = x;
    }
    let a = DGAlgebra::from_table(Complex::new_unchecked(d), u, |a, b| table.get(&(a, b)).cloned().unwrap_or_default())
        .map_err(|e| ctx.semantic(&sec.name, e.to_string()))?;
    if let Some(w) = first_failure(&check_dga(&a)) {
        return Err(ctx.semantic(&sec.name, w));
    }
    Ok(Arc::new(a))
}

fn find_directive<'t, 'a>(sec: &'t RawSection<'a>, key: &str) -> Option<&'t Directive<'a>> {
    sec.directives.iter().find(|d| d.toks[0].text == key)
}

fn reference_of(ctx: &Ctx, d: &Directive) -> Result<(Reference, usize), FormatError> {
    let key = &d.toks[0];
    let t = match d.toks.len() {
        2 => &d.toks[1],
        4 if d.toks[2].text == "=" || d.toks[1].text == "=" => &d.toks[3],
        3 if d.toks[1].text == "=" => &d.toks[2],
        _ => return Err(ctx.parse_err(d.line, key.col, format!("`{}` needs a single reference", key.text))),
    };
    Ok((Reference::parse(t.text), t.col))
}

/// Action maps from `act`/`ract` lines; `left` selects `a*m` versus `m*a`.
fn build_actions(
    ctx: &Ctx,
    sec: &RawSection,
    key: &str,
    alg: &DGAlgebra,
    space: &Arc<GradedSpace>,
    left: bool,
) -> Result<Vec<GradedMap>, FormatError> {
    let field = space.field();
    let lookup = |l: &str| space.index_of(l);
    let mut table: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for d in sec.directives.iter().filter(|d| d.toks[0].text == key) {
        let (lhs, x, y, rest) = split_product(ctx, d)?;
        let (al, ml, acol, mcol) = if left { (x, y, lhs.col, lhs.col + x.len() + 1) } else { (y, x, lhs.col + x.len() + 1, lhs.col) };
        let ia = alg.space().index_of(al).ok_or_else(|| ctx.unresolved(d.line, acol, format!("algebra basis label `{al}`")))?;
        let im = lookup(ml).ok_or_else(|| ctx.unresolved(d.line, mcol, format!("basis label `{ml}`")))?;
        if table.contains_key(&(ia, im)) {
            return Err(ctx.parse_err(d.line, lhs.col, format!("repeated `{key} {}`", lhs.text)));
        }
        table.insert((ia, im), parse_terms(ctx, d.line, rest, field, &lookup)?);
    }
    (0..alg.dim())
        .map(|a| {
            GradedMap::from_images(space.clone(), space.clone(), alg.degree(a), |m| table.get(&(a, m)).cloned().unwrap_or_default())
                .map_err(|e| ctx.semantic(&sec.name, format!("action of `{}`: {e}", alg.label(a))))
        })
        .collect()
}

impl Ctx<'_> {
    fn load_external(&mut self, line: usize, col: usize, path: &str) -> Result<Document, FormatError> {
        let full = match &self.base {
            Some(b) => b.join(path),
            None => PathBuf::from(path),
        };
        let key = full.canonicalize().map_err(|e| self.unresolved(line, col, format!("file:{path} ({e})")))?;
        if let Some(d) = self.cache.get(&key) {
            return Ok(d.clone());
        }
        if self.stack.contains(&key) {
            return Err(self.unresolved(line, col, format!("file:{path} (cyclic reference)")));
        }
        let text = std::fs::read_to_string(&key).map_err(|e| self.unresolved(line, col, format!("file:{path} ({e})")))?;
        self.stack.push(key.clone());
        let doc = parse_inner(&text, &key.display().to_string(), key.parent().map(Path::to_path_buf), self.cache, self.stack);
        self.stack.pop();
        let doc = doc?;
        self.cache.insert(key, doc.clone());
        Ok(doc)
    }

    /// Resolves a reference of `kind` against `local` or an external file,
    /// returning the name it has in the document it lives in.
    fn resolve_name(&mut self, r: &Reference, kind: Kind, local: &Document, line: usize, col: usize) -> Result<(Document, String), FormatError> {
        match r {
            Reference::Local(n) => {
                if local.names(kind).contains(n) {
                    Ok((local.clone(), n.clone()))
                } else {
                    Err(self.unresolved(line, col, format!("{} `{n}`", kind.name())))
                }
            }
            Reference::File { path, name } => {
                let doc = self.load_external(line, col, path)?;
                let names = doc.names(kind);
                let n = match name {
                    Some(n) if names.contains(n) => n.clone(),
                    Some(n) => return Err(self.unresolved(line, col, format!("{} `{n}` in file:{path}", kind.name()))),
                    None if names.len() == 1 => names[0].clone(),
                    None => return Err(self.unresolved(line, col, format!("file:{path} has {} {} sections; name one with #NAME", names.len(), kind.name()))),
                };
                Ok((doc, n))
            }
        }
    }

    fn algebra(&mut self, r: &Reference, local: &Document, line: usize, col: usize) -> Result<Arc<DGAlgebra>, FormatError> {
        let (doc, n) = self.resolve_name(r, Kind::Algebra, local, line, col)?;
        Ok(doc.algebras[&n].clone())
    }
}

fn build_module(ctx: &mut Ctx, sec: &RawSection, doc: &Document, ff: &mut Option<(Field, usize)>) -> Result<ModuleEntry, FormatError> {
    check_keys(ctx, sec, &["field", "basis", "over", "rightover", "act", "ract", "diff"])?;
    let field = section_field(ctx, sec, ff)?;
    let (side, d) = match (find_directive(sec, "over"), find_directive(sec, "rightover")) {
        (Some(d), None) => (Side::Left, d),
        (None, Some(d)) => (Side::Right, d),
        _ => return Err(ctx.parse_err(sec.line, 1, format!("module `{}` needs exactly one of `over` / `rightover`", sec.name))),
    };
    let (over, col) = reference_of(ctx, d)?;
    let alg = ctx.algebra(&over, doc, d.line, col)?;
    if alg.field() != field {
        return Err(ctx.semantic(&sec.name, format!("algebra field {} differs from {field}", alg.field())));
    }
    let space = build_space(ctx, sec, field)?;
    let diff = build_differential(ctx, sec, &space)?;
    let (key, wrong) = if side == Side::Left { ("act", "ract") } else { ("ract", "act") };
    if let Some(d) = find_directive(sec, wrong) {
        return Err(ctx.parse_err(d.line, d.toks[0].col, format!("`{wrong}` in a {} module", if side == Side::Left { "left" } else { "right" })));
    }
    let actions = build_actions(ctx, sec, key, &alg, &space, side == Side::Left)?;
    let module = DGModule::from_actions(alg, side, Complex::new_unchecked(diff), actions).map_err(|e| ctx.semantic(&sec.name, e.to_string()))?;
    if let Some(w) = first_failure(&check_module(&module)) {
        return Err(ctx.semantic(&sec.name, w));
    }
    Ok(ModuleEntry { over, module })
}

fn build_bimodule(ctx: &mut Ctx, sec: &RawSection, doc: &Document, ff: &mut Option<(Field, usize)>) -> Result<BimoduleEntry, FormatError> {
    check_keys(ctx, sec, &["field", "basis", "over", "rightover", "act", "ract", "diff"])?;
    let field = section_field(ctx, sec, ff)?;
    let (Some(dl), Some(dr)) = (find_directive(sec, "over"), find_directive(sec, "rightover")) else {
        return Err(ctx.parse_err(sec.line, 1, format!("bimodule `{}` needs `over` and `rightover`", sec.name)));
    };
    let (over, cl) = reference_of(ctx, dl)?;
    let (rightover, cr) = reference_of(ctx, dr)?;
    let l = ctx.algebra(&over, doc, dl.line, cl)?;
    let r = ctx.algebra(&rightover, doc, dr.line, cr)?;
    for a in [&l, &r] {
        if a.field() != field {
            return Err(ctx.semantic(&sec.name, format!("algebra field {} differs from {field}", a.field())));
        }
    }
    let space = build_space(ctx, sec, field)?;
    let diff = build_differential(ctx, sec, &space)?;
    let la = build_actions(ctx, sec, "act", &l, &space, true)?;
    let ra = build_actions(ctx, sec, "ract", &r, &space, false)?;
    let bimodule = DGBimodule::from_actions(l, r, Complex::new_unchecked(diff), la, ra).map_err(|e| ctx.semantic(&sec.name, e.to_string()))?;
    if let Some(w) = first_failure(&check_bimodule(&bimodule)) {
        return Err(ctx.semantic(&sec.name, w));
    }
    Ok(BimoduleEntry { over, rightover, bimodule })
}

fn build_problem(ctx: &mut Ctx, sec: &RawSection, doc: &Document) -> Result<ProblemEntry, FormatError> {
    check_keys(ctx, sec, &["R", "S", "M", "X", "U", "V", "augment", "max_generators", "degree_window"])?;
    let get = |k: &str| find_directive(sec, k);
    let need = |ctx: &Ctx, k: &str| get(k).ok_or_else(|| ctx.parse_err(sec.line, 1, format!("problem `{}` needs `{k} = ...`", sec.name)));
    let dr = need(ctx, "R")?;
    let ds = need(ctx, "S")?;
    let dm = need(ctx, "M")?;
    let (rr, rc) = reference_of(ctx, dr)?;
    let (sr, sc) = reference_of(ctx, ds)?;
    let (mr, mc) = reference_of(ctx, dm)?;
    let r = ctx.algebra(&rr, doc, dr.line, rc)?;
    let s = ctx.algebra(&sr, doc, ds.line, sc)?;
    let (mdoc, mn) = ctx.resolve_name(&mr, Kind::Bimodule, doc, dm.line, mc)?;
    let m = mdoc.bimodules[&mn].bimodule.clone();
    if **m.left_algebra() != *r || **m.right_algebra() != *s {
        return Err(ctx.semantic(&sec.name, "M is not an (R, S)-bimodule"));
    }
    let mut caps = Caps::default();
    if let Some(d) = get("max_generators") {
        let t = d.toks.get(1).ok_or_else(|| ctx.parse_err(d.line, d.toks[0].col, "expected a count"))?;
        caps.max_generators = t.text.parse().map_err(|_| ctx.parse_err(d.line, t.col, "expected a count"))?;
    }
    if let Some(d) = get("degree_window") {
        let t = d.toks.get(1).ok_or_else(|| ctx.parse_err(d.line, d.toks[0].col, "expected `LO:HI`"))?;
        caps.degree_window = parse_window(t.text).ok_or_else(|| ctx.parse_err(d.line, t.col, "expected `LO:HI`"))?;
    }
    let mut x = None;
    let mut xm = None;
    if let Some(d) = get("X") {
        let (xr, xc) = reference_of(ctx, d)?;
        let (xdoc, xn) = ctx.resolve_name(&xr, Kind::Module, doc, d.line, xc)?;
        let module = xdoc.modules[&xn].module.clone();
        if module.side() != Side::Left || **module.algebra() != *r {
            return Err(ctx.semantic(&sec.name, "X is not a left R-module"));
        }
        x = Some(xr);
        xm = Some(module);
    }
    let target_x = xm.clone().unwrap_or_else(|| DGModule::left_regular(r.clone()));
    let mut augs: BTreeMap<String, (LabelMap, Vec<(usize, usize, String)>)> = BTreeMap::new();
    for d in sec.directives.iter().filter(|d| d.toks[0].text == "augment") {
        let Some(which) = d.toks.get(1).filter(|t| t.text == "U" || t.text == "V") else {
            return Err(ctx.parse_err(d.line, d.toks[0].col, "expected `augment U|V LABEL = ...`"));
        };
        let rest = Directive { line: d.line, toks: d.toks[1..].iter().map(|t| Token { col: t.col, text: t.text }).collect() };
        let (lhs, terms) = split_assign(ctx, &rest)?;
        let field = r.field();
        let mut images = vec![];
        let mut i = 0;
        if !(terms.len() == 1 && terms[0].text == "0") {
            loop {
                let (Some(c), Some(l)) = (terms.get(i), terms.get(i + 1)) else {
                    return Err(ctx.parse_err(d.line, lhs.col, "expected `COEFF LABEL`"));
                };
                let x = Scalar::parse(c.text, field).map_err(|e| ctx.parse_err(d.line, c.col, e.to_string()))?;
                images.push((l.text.to_string(), x, l.col));
                i += 2;
                match terms.get(i) {
                    None => break,
                    Some(t) if t.text == "+" => i += 1,
                    Some(t) => return Err(ctx.parse_err(d.line, t.col, "expected `+`")),
                }
            }
        }
        let entry = augs.entry(which.text.to_string()).or_default();
        if entry.0.contains_key(lhs.text) {
            return Err(ctx.parse_err(d.line, lhs.col, format!("repeated `augment {} {}`", which.text, lhs.text)));
        }
        entry.0.insert(lhs.text.to_string(), images.iter().map(|(l, x, _)| (l.clone(), x.clone())).collect());
        entry.1.push((d.line, lhs.col, lhs.text.to_string()));
        for (l, _, col) in images {
            entry.1.push((d.line, col, format!("={l}")));
        }
    }
    let label_map = |ctx: &Ctx, lm: &LabelMap, pos: &[(usize, usize, String)], src: &Arc<GradedSpace>, tgt: &Arc<GradedSpace>| -> Result<GradedMap, FormatError> {
        for (line, col, l) in pos {
            let ok = match l.strip_prefix('=') {
                Some(t) => tgt.index_of(t).is_some(),
                None => src.index_of(l).is_some(),
            };
            if !ok {
                return Err(ctx.unresolved(*line, *col, format!("basis label `{}`", l.trim_start_matches('='))));
            }
        }
        GradedMap::from_images(src.clone(), tgt.clone(), 0, |i| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (l, x) in lm.get(src.label(i)).into_iter().flatten() {
                let e = acc.entry(tgt.index_of(l).unwrap()).or_insert_with(|| src.field().zero());
                *e += x;
            }
            acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
        })
        .map_err(|e| ctx.semantic(&sec.name, format!("augmentation: {e}")))
    };
    let mut u = None;
    let mut u_spec = None;
    if let Some(d) = get("U") {
        let (ur, uc) = reference_of(ctx, d)?;
        let (udoc, un) = ctx.resolve_name(&ur, Kind::Module, doc, d.line, uc)?;
        let module = udoc.modules[&un].module.clone();
        if module.side() != Side::Left || **module.algebra() != *r {
            return Err(ctx.semantic(&sec.name, "U is not a left R-module"));
        }
        let (lm, pos) = augs.remove("U").unwrap_or_default();
        let g = label_map(ctx, &lm, &pos, module.space(), target_x.space())?;
        u = Some((module, g));
        u_spec = Some((ur, lm));
    }
    let mut v = None;
    let mut v_spec = None;
    if let Some(d) = get("V") {
        let (vr, vc) = reference_of(ctx, d)?;
        let (vdoc, vn) = ctx.resolve_name(&vr, Kind::Bimodule, doc, d.line, vc)?;
        let bm = vdoc.bimodules[&vn].bimodule.clone();
        if **bm.left_algebra() != *r || **bm.right_algebra() != *s {
            return Err(ctx.semantic(&sec.name, "V is not an (R, S)-bimodule"));
        }
        let (lm, pos) = augs.remove("V").unwrap_or_default();
        let f = label_map(ctx, &lm, &pos, bm.space(), m.space())?;
        v = Some((bm, f));
        v_spec = Some((vr, lm));
    }
    if let Some((k, _)) = augs.into_iter().next() {
        return Err(ctx.semantic(&sec.name, format!("`augment {k}` without `{k} = ...`")));
    }
    let spec = ProblemSpec { r: rr, s: sr, m: mr, x, u: u_spec, v: v_spec, caps };
    let problem = TiltProblem { r, s, m, x: xm, u, v, caps };
    Ok(ProblemEntry { spec, problem })
}

pub fn parse_window(s: &str) -> Option<(i32, i32)> {
    let (a, b) = s.split_once(':')?;
    let (a, b) = (a.parse().ok()?, b.parse().ok()?);
    (a <= b).then_some((a, b))
}

fn parse_inner(
    text: &str,
    file: &str,
    base: Option<PathBuf>,
    cache: &mut BTreeMap<PathBuf, Document>,
    stack: &mut Vec<PathBuf>,
) -> Result<Document, FormatError> {
    let mut ctx = Ctx { file: file.to_string(), base, cache, stack };
    let sections = split_sections(&ctx, text)?;
    let mut doc = Document::default();
    let mut ff = None;
    for kind in [Kind::Algebra, Kind::Bimodule, Kind::Module, Kind::Problem] {
        for sec in sections.iter().filter(|s| s.kind == kind) {
            match kind {
                Kind::Algebra => {
                    let a = build_algebra(&ctx, sec, &mut ff)?;
                    doc.algebras.insert(sec.name.clone(), a);
                }
                Kind::Bimodule => {
                    let b = build_bimodule(&mut ctx, sec, &doc, &mut ff)?;
                    doc.bimodules.insert(sec.name.clone(), b);
                }
                Kind::Module => {
                    let m = build_module(&mut ctx, sec, &doc, &mut ff)?;
                    doc.modules.insert(sec.name.clone(), m);
                }
                Kind::Problem => {
                    let p = build_problem(&mut ctx, sec, &doc)?;
                    doc.problems.insert(sec.name.clone(), p);
                }
            }
        }
    }
    Ok(doc)
}

/// Parses `text`; `file:` references resolve relative to `base`.
pub fn parse_str(text: &str, file: &str, base: Option<&Path>) -> Result<Document, FormatError> {
    let mut cache = BTreeMap::new();
    let mut stack = vec![];
    parse_inner(text, file, base.map(Path::to_path_buf), &mut cache, &mut stack)
}

pub fn load_file(path: &Path) -> Result<Document, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io(format!("{}: {e}", path.display())))?;
    let mut cache = BTreeMap::new();
    let mut stack = vec![path.canonicalize().unwrap_or_else(|_| path.to_path_buf())];
    parse_inner(&text, &path.display().to_string(), path.parent().map(Path::to_path_buf), &mut cache, &mut stack)
}

fn write_terms(out: &mut String, v: &SparseVec, space: &GradedSpace) {
    let mut terms: Vec<(&str, &Scalar)> = v.iter().map(|(i, x)| (space.label(*i), x)).collect();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    write_label_terms(out, &terms);
}

fn write_label_terms(out: &mut String, terms: &[(&str, &Scalar)]) {
    if terms.is_empty() {
        out.push('0');
    }
    for (k, (l, x)) in terms.iter().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        write!(out, "{x} {l}").unwrap();
    }
}

fn write_field(out: &mut String, f: Field) {
    match f {
        Field::Rationals => out.push_str("field Q\n"),
        f => writeln!(out, "field Fp {}", f.characteristic()).unwrap(),
    }
}

fn write_basis(out: &mut String, space: &GradedSpace) {
    out.push_str("basis");
    for i in 0..space.dim() {
        write!(out, " {}:{}", space.label(i), space.degree(i)).unwrap();
    }
    out.push('\n');
}

fn write_diff(out: &mut String, d: &GradedMap) {
    let space = d.source();
    let mut lines: Vec<(&str, String)> = vec![];
    for i in 0..space.dim() {
        let img = d.image(i);
        if !img.is_empty() {
            let mut s = String::new();
            write_terms(&mut s, &img, d.target());
            lines.push((space.label(i), s));
        }
    }
    lines.sort();
    for (l, s) in lines {
        writeln!(out, "diff {l} = {s}").unwrap();
    }
}

/// `key a*m = ...` lines, sorted by the written left-hand side.
fn write_actions(out: &mut String, key: &str, alg: &DGAlgebra, maps: &[GradedMap], left: bool) {
    let mut lines: Vec<(String, String)> = vec![];
    for (a, op) in maps.iter().enumerate() {
        let space = op.source();
        for m in 0..space.dim() {
            let img = op.image(m);
            if img.is_empty() {
                continue;
            }
            let lhs = if left { format!("{}*{}", alg.label(a), space.label(m)) } else { format!("{}*{}", space.label(m), alg.label(a)) };
            let mut s = String::new();
            write_terms(&mut s, &img, op.target());
            lines.push((lhs, s));
        }
    }
    lines.sort();
    for (l, s) in lines {
        writeln!(out, "{key} {l} = {s}").unwrap();
    }
}

pub fn write_algebra(out: &mut String, name: &str, a: &DGAlgebra) {
    writeln!(out, "[algebra {name}]").unwrap();
    write_field(out, a.field());
    write_basis(out, a.space());
    out.push_str("unit ");
    write_terms(out, &crate::linalg::to_sparse(a.unit()), a.space());
    out.push('\n');
    write_actions(out, "mul", a, a.lmuls(), true);
    write_diff(out, a.differential());
}

fn write_module(out: &mut String, name: &str, e: &ModuleEntry) {
    let m = &e.module;
    writeln!(out, "[module {name}]").unwrap();
    write_field(out, m.field());
    match m.side() {
        Side::Left => writeln!(out, "over {}", e.over).unwrap(),
        Side::Right => writeln!(out, "rightover {}", e.over).unwrap(),
    }
    write_basis(out, m.space());
    match m.side() {
        Side::Left => write_actions(out, "act", m.algebra(), m.actions(), true),
        Side::Right => write_actions(out, "ract", m.algebra(), m.actions(), false),
    }
    write_diff(out, m.differential());
}

fn write_bimodule(out: &mut String, name: &str, e: &BimoduleEntry) {
    let m = &e.bimodule;
    writeln!(out, "[bimodule {name}]").unwrap();
    write_field(out, m.space().field());
    writeln!(out, "over {}", e.over).unwrap();
    writeln!(out, "rightover {}", e.rightover).unwrap();
    write_basis(out, m.space());
    write_actions(out, "act", m.left_algebra(), m.lact(), true);
    write_actions(out, "ract", m.right_algebra(), m.ract(), false);
    write_diff(out, m.complex().differential());
}

fn write_problem(out: &mut String, name: &str, p: &ProblemSpec) {
    writeln!(out, "[problem {name}]").unwrap();
    writeln!(out, "R = {}", p.r).unwrap();
    writeln!(out, "S = {}", p.s).unwrap();
    writeln!(out, "M = {}", p.m).unwrap();
    if let Some(x) = &p.x {
        writeln!(out, "X = {x}").unwrap();
    }
    for (key, part) in [("U", &p.u), ("V", &p.v)] {
        if let Some((r, lm)) = part {
            writeln!(out, "{key} = {r}").unwrap();
            for (l, terms) in lm {
                let mut t: Vec<(&str, &Scalar)> = terms.iter().map(|(l, x)| (l.as_str(), x)).collect();
                t.sort_by(|a, b| a.0.cmp(b.0));
                write!(out, "augment {key} {l} = ").unwrap();
                write_label_terms(out, &t);
                out.push('\n');
            }
        }
    }
    writeln!(out, "max_generators {}", p.caps.max_generators).unwrap();
    writeln!(out, "degree_window {}:{}", p.caps.degree_window.0, p.caps.degree_window.1).unwrap();
}

/// Canonical text: sections by kind then name.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    let sep = |out: &mut String| {
        if !out.is_empty() {
            out.push('\n');
        }
    };
    for (n, a) in &doc.algebras {
        sep(&mut out);
        write_algebra(&mut out, n, a);
    }
    for (n, b) in &doc.bimodules {
        sep(&mut out);
        write_bimodule(&mut out, n, b);
    }
    for (n, m) in &doc.modules {
        sep(&mut out);
        write_module(&mut out, n, m);
    }
    for (n, p) in &doc.problems {
        sep(&mut out);
        write_problem(&mut out, n, &p.spec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const E2: &str = "\
# exterior algebra on one odd generator
[algebra E2]
field Q
basis 1:0 x:1
unit 1 1
mul 1*1 = 1 1
mul 1*x = 1 x
mul x*1 = 1 x
";

    fn parse(text: &str) -> Result<Document, FormatError> {
        parse_str(text, "test", None)
    }

    #[test]
    fn parses_and_round_trips() {
        let doc = parse(E2).unwrap();
        assert_eq!(doc.algebras["E2"].dim(), 2);
        let text = serialize(&doc);
        let again = parse(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn degree_mismatch_is_semantic() {
        let bad = E2.replace("mul x*1 = 1 x", "mul x*1 = 1 1");
        assert!(matches!(parse(&bad), Err(FormatError::Semantic { .. })), "{:?}", parse(&bad));
    }

    #[test]
    fn duplicate_label_has_position() {
        let bad = E2.replace("basis 1:0 x:1", "basis 1:0 x:1 x:2");
        assert_eq!(parse(&bad), Err(FormatError::Parse { file: "test".into(), line: 4, col: 15, msg: "duplicate basis label `x`".into() }));
    }

    #[test]
    fn unknown_label_unresolved() {
        let bad = E2.replace("mul 1*x = 1 x", "mul 1*x = 1 y");
        assert!(matches!(parse(&bad), Err(FormatError::Unresolved { line: 7, col: 13, .. })));
    }

    #[test]
    fn unit_failure_has_witness() {
        let bad = E2.replace("mul x*1 = 1 x", "mul x*1 = 2 x");
        match parse(&bad) {
            Err(FormatError::Semantic { witness, .. }) => assert!(witness.contains("unit"), "{witness}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_primes_rejected() {
        let text = "[algebra A]\nfield Fp 2\nbasis 1:0\nunit 1 1\nmul 1*1 = 1 1\n\n[algebra B]\nfield Fp 3\nbasis 1:0\nunit 1 1\nmul 1*1 = 1 1\n";
        assert!(matches!(parse(text), Err(FormatError::Semantic { .. })));
    }

    #[test]
    fn problem_references() {
        let text = format!(
            "{E2}\n[bimodule M]\nfield Q\nover E2\nrightover E2\nbasis 1:0 x:1\nact 1*1 = 1 1\nact 1*x = 1 x\nact x*1 = 1 x\nract 1*1 = 1 1\nract x*1 = 1 x\nract 1*x = 1 x\n\n[problem P]\nR = E2\nS = E2\nM = M\nmax_generators 3\n"
        );
        let doc = parse(&text).unwrap();
        let p = &doc.problems["P"];
        assert_eq!(p.problem.caps.max_generators, 3);
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
        let bad = text.replace("M = M", "M = N");
        assert!(matches!(parse(&bad), Err(FormatError::Unresolved { .. })));
    }
}
