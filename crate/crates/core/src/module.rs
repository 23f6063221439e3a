//! DG-modules and bimodules, Hom complexes, endomorphism DGAs, tensor
//! products over an algebra, and linear duality.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{combine, AlgebraError, DGAlgebra};
use crate::complexes::{cone, direct_sum_complexes, shift, shift_map, ChainMap, Complex, ComplexError};
use crate::linalg::{
    quotient, to_dense, to_sparse, GradedMap, GradedSpace, LinalgError, Matrix, Quotient, SparseEchelon, SparseVec,
    Subspace,
};
use crate::report::{Level, Report};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("modules act from different sides")]
    SideMismatch,
    #[error("modules are over different algebras")]
    AlgebraMismatch,
    #[error("action of `{a}` on `{m}` has a term `{term}` of the wrong degree")]
    ActionDegree { a: String, m: String, term: String },
    #[error("action table has the wrong shape")]
    ActionShape,
    #[error("map is not an element of the Hom complex")]
    NotInHom,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// One-sided DG-module. `action[a]` is `m ↦ a·m` (left) or `m ↦ m·a` (right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGModule {
    algebra: Arc<DGAlgebra>,
    side: Side,
    complex: Complex,
    action: Vec<GradedMap>,
}

fn action_maps(
    algebra: &DGAlgebra,
    space: &Arc<GradedSpace>,
    mut act: impl FnMut(usize, usize) -> SparseVec,
) -> Result<Vec<GradedMap>, ModuleError> {
    (0..algebra.dim())
        .map(|a| {
            GradedMap::from_images(space.clone(), space.clone(), algebra.degree(a), |m| act(a, m)).map_err(|e| match e {
                LinalgError::DegreeMismatch { from, to, .. } => {
                    ModuleError::ActionDegree { a: algebra.label(a).to_string(), m: from, term: to }
                }
                e => e.into(),
            })
        })
        .collect()
}

fn check_action_shapes(algebra: &DGAlgebra, complex: &Complex, action: &[GradedMap]) -> Result<(), ModuleError> {
    if action.len() != algebra.dim() || algebra.field() != complex.field() {
        return Err(ModuleError::ActionShape);
    }
    for (a, m) in action.iter().enumerate() {
        if m.source() != complex.space() || m.target() != complex.space() || m.degree() != algebra.degree(a) {
            return Err(ModuleError::ActionShape);
        }
    }
    Ok(())
}

impl DGModule {
    pub fn from_table(
        algebra: Arc<DGAlgebra>,
        side: Side,
        complex: Complex,
        act: impl FnMut(usize, usize) -> SparseVec,
    ) -> Result<DGModule, ModuleError> {
        let action = action_maps(&algebra, complex.space(), act)?;
        DGModule::from_actions(algebra, side, complex, action)
    }

    pub fn from_actions(
        algebra: Arc<DGAlgebra>,
        side: Side,
        complex: Complex,
        action: Vec<GradedMap>,
    ) -> Result<DGModule, ModuleError> {
        check_action_shapes(&algebra, &complex, &action)?;
        Ok(DGModule { algebra, side, complex, action })
    }

    /// `A` acting on itself by left multiplication.
    pub fn left_regular(a: Arc<DGAlgebra>) -> DGModule {
        let action = a.lmuls().to_vec();
        DGModule { complex: a.complex().clone(), side: Side::Left, action, algebra: a }
    }

    /// `A` acting on itself by right multiplication.
    pub fn right_regular(a: Arc<DGAlgebra>) -> DGModule {
        let action = a.rmuls();
        DGModule { complex: a.complex().clone(), side: Side::Right, action, algebra: a }
    }

    pub fn algebra(&self) -> &Arc<DGAlgebra> {
        &self.algebra
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.complex.space()
    }

    pub fn differential(&self) -> &GradedMap {
        self.complex.differential()
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    pub fn action(&self, a: usize) -> &GradedMap {
        &self.action[a]
    }

    pub fn actions(&self) -> &[GradedMap] {
        &self.action
    }

    /// Action of an arbitrary homogeneous algebra element of degree `deg`.
    pub fn action_vec(&self, x: &[Scalar], deg: i32) -> GradedMap {
        combine(&GradedMap::zero(self.space().clone(), self.space().clone(), deg), &self.action, &to_sparse(x))
    }

    /// Same module with a new underlying complex/action, e.g. after relabelling.
    pub fn with_space(&self, space: Arc<GradedSpace>) -> DGModule {
        let re = |m: &GradedMap| m.reindex(space.clone(), 0, space.clone(), m.degree());
        DGModule {
            algebra: self.algebra.clone(),
            side: self.side,
            complex: Complex::new_unchecked(re(self.differential())),
            action: self.action.iter().map(re).collect(),
        }
    }
}

/// Two-sided DG-module: left `R`-action and right `S`-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGBimodule {
    left: Arc<DGAlgebra>,
    right: Arc<DGAlgebra>,
    complex: Complex,
    lact: Vec<GradedMap>,
    ract: Vec<GradedMap>,
}

impl DGBimodule {
    pub fn from_tables(
        left: Arc<DGAlgebra>,
        right: Arc<DGAlgebra>,
        complex: Complex,
        lact: impl FnMut(usize, usize) -> SparseVec,
        ract: impl FnMut(usize, usize) -> SparseVec,
    ) -> Result<DGBimodule, ModuleError> {
        let l = action_maps(&left, complex.space(), lact)?;
        let r = action_maps(&right, complex.space(), ract)?;
        DGBimodule::from_actions(left, right, complex, l, r)
    }

    pub fn from_actions(
        left: Arc<DGAlgebra>,
        right: Arc<DGAlgebra>,
        complex: Complex,
        lact: Vec<GradedMap>,
        ract: Vec<GradedMap>,
    ) -> Result<DGBimodule, ModuleError> {
        check_action_shapes(&left, &complex, &lact)?;
        check_action_shapes(&right, &complex, &ract)?;
        Ok(DGBimodule { left, right, complex, lact, ract })
    }

    pub fn from_modules(l: &DGModule, r: &DGModule) -> Result<DGBimodule, ModuleError> {
        if l.side != Side::Left || r.side != Side::Right {
            return Err(ModuleError::SideMismatch);
        }
        if l.complex != r.complex {
            return Err(LinalgError::ShapeMismatch("bimodule halves differ as complexes".into()).into());
        }
        DGBimodule::from_actions(l.algebra.clone(), r.algebra.clone(), l.complex.clone(), l.action.clone(), r.action.clone())
    }

    /// `A` as an `(A, A)`-bimodule.
    pub fn regular(a: Arc<DGAlgebra>) -> DGBimodule {
        DGBimodule {
            left: a.clone(),
            right: a.clone(),
            complex: a.complex().clone(),
            lact: a.lmuls().to_vec(),
            ract: a.rmuls(),
        }
    }

    pub fn left_algebra(&self) -> &Arc<DGAlgebra> {
        &self.left
    }

    pub fn right_algebra(&self) -> &Arc<DGAlgebra> {
        &self.right
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.complex.space()
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn lact(&self) -> &[GradedMap] {
        &self.lact
    }

    pub fn ract(&self) -> &[GradedMap] {
        &self.ract
    }

    pub fn as_left(&self) -> DGModule {
        DGModule { algebra: self.left.clone(), side: Side::Left, complex: self.complex.clone(), action: self.lact.clone() }
    }

    pub fn as_right(&self) -> DGModule {
        DGModule { algebra: self.right.clone(), side: Side::Right, complex: self.complex.clone(), action: self.ract.clone() }
    }
}

fn first_difference(f: &GradedMap, g: &GradedMap) -> Option<usize> {
    let diff = f.sub(g).ok()?;
    (0..f.source().dim()).find(|&i| !diff.image(i).is_empty())
}

fn check_one_side(m: &DGModule, r: &mut Report, tag: &str) {
    let a = &m.algebra;
    let space = m.space();
    let lbl = |i: usize| space.label(i).to_string();
    let albl = |i: usize| a.label(i).to_string();
    let field = m.field();

    let dd = GradedMap::compose(m.differential(), m.differential()).unwrap();
    match (0..m.dim()).find(|&i| !dd.image(i).is_empty()) {
        None => r.pass(Level::Axiom, format!("{tag}d^2=0"), "all basis elements"),
        Some(i) => r.fail(Level::Axiom, format!("{tag}d^2=0"), format!("d(d({})) != 0", lbl(i))),
    }

    let unit = m.action_vec(a.unit(), 0);
    match first_difference(&unit, &GradedMap::identity(space.clone())) {
        None => r.pass(Level::Axiom, format!("{tag}unit action"), "1 acts as the identity"),
        Some(i) => r.fail(Level::Axiom, format!("{tag}unit action"), format!("1 does not fix {}", lbl(i))),
    }

    let mut assoc = None;
    'outer: for x in 0..a.dim() {
        for y in 0..a.dim() {
            let xy = combine(
                &GradedMap::zero(space.clone(), space.clone(), a.degree(x) + a.degree(y)),
                &m.action,
                &a.mul_basis(x, y),
            );
            let composite = match m.side {
                Side::Left => GradedMap::compose(&m.action[x], &m.action[y]).unwrap(),
                Side::Right => GradedMap::compose(&m.action[y], &m.action[x]).unwrap(),
            };
            if let Some(i) = first_difference(&xy, &composite) {
                assoc = Some(match m.side {
                    Side::Left => format!("({}*{})*{} != {}*({}*{})", albl(x), albl(y), lbl(i), albl(x), albl(y), lbl(i)),
                    Side::Right => format!("{}*({}*{}) != ({}*{})*{}", lbl(i), albl(x), albl(y), lbl(i), albl(x), albl(y)),
                });
                break 'outer;
            }
        }
    }
    match assoc {
        None => r.pass(Level::Axiom, format!("{tag}action associativity"), "all basis triples"),
        Some(w) => r.fail(Level::Axiom, format!("{tag}action associativity"), w),
    }

    let mut leib = None;
    for x in 0..a.dim() {
        let dx = a.differential().image(x);
        let act_dx =
            combine(&GradedMap::zero(space.clone(), space.clone(), a.degree(x) + 1), &m.action, &dx);
        let lhs = GradedMap::compose(m.differential(), &m.action[x]).unwrap();
        let after = GradedMap::compose(&m.action[x], m.differential()).unwrap();
        let rhs = match m.side {
            // ∂(a m) = ∂a m + (−1)^{|a|} a ∂m
            Side::Left => act_dx.add(&after.scale(&field.sign(a.degree(x) as i64))).unwrap(),
            // ∂(m s) = ∂m s + (−1)^{|m|} m ∂s
            Side::Right => after.add(&act_dx.scale_by_degree(|n| field.sign(n as i64))).unwrap(),
        };
        if let Some(i) = first_difference(&lhs, &rhs) {
            leib = Some(format!("Leibniz fails for {} on {}", albl(x), lbl(i)));
            break;
        }
    }
    match leib {
        None => r.pass(Level::Axiom, format!("{tag}module leibniz"), "all basis pairs"),
        Some(w) => r.fail(Level::Axiom, format!("{tag}module leibniz"), w),
    }
}

pub fn check_module(m: &DGModule) -> Report {
    let mut r = Report::new();
    check_one_side(m, &mut r, "");
    r
}

pub fn check_bimodule(m: &DGBimodule) -> Report {
    let mut r = Report::new();
    check_one_side(&m.as_left(), &mut r, "left ");
    check_one_side(&m.as_right(), &mut r, "right ");
    let mut bad = None;
    'outer: for x in 0..m.left.dim() {
        for y in 0..m.right.dim() {
            let a = GradedMap::compose(&m.ract[y], &m.lact[x]).unwrap();
            let b = GradedMap::compose(&m.lact[x], &m.ract[y]).unwrap();
            if let Some(i) = first_difference(&a, &b) {
                bad = Some(format!(
                    "({}*{})*{} != {}*({}*{})",
                    m.left.label(x),
                    m.space().label(i),
                    m.right.label(y),
                    m.left.label(x),
                    m.space().label(i),
                    m.right.label(y)
                ));
                break 'outer;
            }
        }
    }
    match bad {
        None => r.pass(Level::Axiom, "bimodule compatibility", "(rm)s = r(ms) on all basis triples"),
        Some(w) => r.fail(Level::Axiom, "bimodule compatibility", w),
    }
    r
}

/// Basis elements generating `A` as an algebra, chosen greedily in basis order.
pub fn algebra_generators(a: &DGAlgebra) -> Vec<usize> {
    let mut gens = vec![];
    let mut span = subalgebra(a, &gens);
    for b in 0..a.dim() {
        let mut probe = span.clone();
        probe.push(vec![(b, a.field().one())]);
        if probe.rank() > span.rank() {
            gens.push(b);
            span = subalgebra(a, &gens);
        }
    }
    gens
}

/// Span of all words in `gens` (including the unit).
fn subalgebra(a: &DGAlgebra, gens: &[usize]) -> SparseEchelon {
    let mut span = SparseEchelon::new(a.field(), a.dim());
    let mut vectors = vec![a.unit().to_vec()];
    span.push(to_sparse(a.unit()));
    let mut i = 0;
    while i < vectors.len() {
        for &g in gens {
            let w = a.lmul(g).apply(&vectors[i]);
            let before = span.rank();
            span.push(to_sparse(&w));
            if span.rank() > before {
                vectors.push(w);
            }
        }
        i += 1;
    }
    span
}

/// Position of a map's entries inside the flattened unknown vector of one
/// Hom degree.
#[derive(Clone, Debug)]
struct Layout {
    /// (source degree, offset) for each nonempty block.
    blocks: Vec<(i32, usize)>,
    len: usize,
}

impl Layout {
    fn new(src: &GradedSpace, tgt: &GradedSpace, d: i32) -> Layout {
        let mut blocks = vec![];
        let mut len = 0;
        for k in src.support() {
            let rows = tgt.dim_in(k + d);
            if rows > 0 {
                blocks.push((k, len));
                len += rows * src.dim_in(k);
            }
        }
        Layout { blocks, len }
    }

    fn var(&self, src: &GradedSpace, tgt: &GradedSpace, d: i32, s: usize, t: usize) -> Option<usize> {
        let k = src.degree(s);
        let off = self.blocks.iter().find(|(kk, _)| *kk == k)?.1;
        let cols = src.dim_in(k);
        let row = t - tgt.range(k + d).start;
        Some(off + row * cols + (s - src.range(k).start))
    }
}

/// The Hom complex between two modules, with an explicit basis of maps.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub complex: Complex,
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    maps: Vec<GradedMap>,
    layouts: BTreeMap<i32, Layout>,
    free: BTreeMap<i32, Vec<usize>>,
}

impl HomComplex {
    pub fn space(&self) -> &Arc<GradedSpace> {
        self.complex.space()
    }

    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    /// The basis map with index `i`.
    pub fn map(&self, i: usize) -> &GradedMap {
        &self.maps[i]
    }

    pub fn maps(&self) -> &[GradedMap] {
        &self.maps
    }

    pub fn module_source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn module_target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    /// Map represented by a homogeneous coordinate vector of degree `d`.
    pub fn element(&self, d: i32, coords: &[Scalar]) -> GradedMap {
        let template = GradedMap::zero(self.source.clone(), self.target.clone(), d);
        combine(&template, &self.maps, &to_sparse(coords))
    }

    /// Coordinates (over the full Hom basis) of a homogeneous map, or `None`
    /// if it is not in the Hom complex.
    pub fn coordinates(&self, f: &GradedMap) -> Option<Vec<Scalar>> {
        let d = f.degree();
        let field = self.source.field();
        let mut out = self.space().zero_vec();
        if f.is_zero() {
            return Some(out);
        }
        let layout = self.layouts.get(&d)?;
        let mut flat = vec![field.zero(); layout.len];
        for s in 0..self.source.dim() {
            for (t, x) in f.image(s) {
                flat[layout.var(&self.source, &self.target, d, s, t)?] = x;
            }
        }
        let start = self.space().range(d).start;
        for (k, &p) in self.free.get(&d)?.iter().enumerate() {
            out[start + k] = flat[p].clone();
        }
        if self.element(d, &out) != *f {
            return None;
        }
        Some(out)
    }

    /// Operator on Hom complexes induced by `op` on basis maps.
    pub fn induced(
        &self,
        target: &HomComplex,
        degree: i32,
        mut op: impl FnMut(&GradedMap) -> GradedMap,
    ) -> Result<GradedMap, ModuleError> {
        let mut images = Vec::with_capacity(self.dim());
        for f in &self.maps {
            let g = op(f);
            images.push(to_sparse(&target.coordinates(&g).ok_or(ModuleError::NotInHom)?));
        }
        Ok(GradedMap::from_images(self.space().clone(), target.space().clone(), degree, |i| images[i].clone())?)
    }
}

/// Solves for the space of maps `m → n` of each degree that commute with the
/// action up to the Koszul sign: `f(a·x) = (−1)^{|f||a|} a·f(x)` on the left,
/// `f(x·a) = f(x)·a` on the right.
pub fn hom_complex(m: &DGModule, n: &DGModule, prefix: &str) -> Result<HomComplex, ModuleError> {
    if m.side != n.side {
        return Err(ModuleError::SideMismatch);
    }
    if m.algebra != n.algebra {
        return Err(ModuleError::AlgebraMismatch);
    }
    let field = m.field();
    let (src, tgt) = (m.space().clone(), n.space().clone());
    let a = &m.algebra;
    let gens = algebra_generators(a);
    let mut degrees: Vec<i32> = vec![];
    for k in src.support() {
        for l in tgt.support() {
            degrees.push(l - k);
        }
    }
    degrees.sort();
    degrees.dedup();

    let mut basis_labels = vec![];
    let mut maps = vec![];
    let mut layouts = BTreeMap::new();
    let mut free_map = BTreeMap::new();
    for &d in &degrees {
        let layout = Layout::new(&src, &tgt, d);
        let mut ech = SparseEchelon::new(field, layout.len);
        for &g in &gens {
            let sigma = match m.side {
                Side::Left => field.sign((d * a.degree(g)) as i64),
                Side::Right => field.one(),
            };
            let am = m.action(g);
            let an = n.action(g);
            for x in 0..src.dim() {
                // f(g·x) − σ g·f(x), coordinate u in n
                let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
                for (j, c) in am.image(x) {
                    for u in tgt.range(src.degree(j) + d) {
                        if let Some(v) = layout.var(&src, &tgt, d, j, u) {
                            rows.entry(u).or_default().push((v, c.clone()));
                        }
                    }
                }
                for t in tgt.range(src.degree(x) + d) {
                    let Some(v) = layout.var(&src, &tgt, d, x, t) else { continue };
                    for (u, c) in an.image(t) {
                        rows.entry(u).or_default().push((v, -(&sigma * &c)));
                    }
                }
                for (_, row) in rows {
                    ech.push(row);
                }
            }
        }
        let (kernel, free) = ech.kernel();
        for (k, col) in kernel.columns().into_iter().enumerate() {
            let mut f = GradedMap::zero(src.clone(), tgt.clone(), d);
            let mut images: Vec<SparseVec> = vec![vec![]; src.dim()];
            for s in 0..src.dim() {
                for t in tgt.range(src.degree(s) + d) {
                    if let Some(v) = layout.var(&src, &tgt, d, s, t) {
                        if !col[v].is_zero() {
                            images[s].push((t, col[v].clone()));
                        }
                    }
                }
            }
            f = f.add(&GradedMap::from_images(src.clone(), tgt.clone(), d, |s| images[s].clone())?)?;
            maps.push(f);
            basis_labels.push((format!("{prefix}{d}_{k}"), d));
        }
        layouts.insert(d, layout);
        free_map.insert(d, free);
    }
    let space = Arc::new(GradedSpace::new(field, basis_labels)?);
    // maps were generated in ascending degree, matching the sorted basis
    let mut hc = HomComplex {
        complex: Complex::zero_differential(space.clone()),
        source: src.clone(),
        target: tgt.clone(),
        maps,
        layouts,
        free: free_map,
    };
    let dm = m.differential().clone();
    let dn = n.differential().clone();
    let d = hc.induced(&hc, 1, |f| hom_differential(f, &dm, &dn))?;
    hc.complex = Complex::new(d)?;
    Ok(hc)
}

/// `∂f = ∂_N ∘ f − (−1)^{|f|} f ∘ ∂_M`.
pub fn hom_differential(f: &GradedMap, dm: &GradedMap, dn: &GradedMap) -> GradedMap {
    let a = GradedMap::compose(dn, f).unwrap();
    let b = GradedMap::compose(f, dm).unwrap();
    a.sub(&b.scale(&f.field().sign(f.degree() as i64))).unwrap()
}

/// Whether a homogeneous map satisfies the module-map condition.
pub fn is_module_map(f: &GradedMap, m: &DGModule, n: &DGModule) -> bool {
    if m.side != n.side || f.source() != m.space() || f.target() != n.space() {
        return false;
    }
    let field = f.field();
    (0..m.algebra.dim()).all(|a| {
        let sigma = match m.side {
            Side::Left => field.sign((f.degree() * m.algebra.degree(a)) as i64),
            Side::Right => field.one(),
        };
        let lhs = GradedMap::compose(f, m.action(a)).unwrap();
        let rhs = GradedMap::compose(n.action(a), f).unwrap().scale(&sigma);
        lhs == rhs
    })
}

/// Degree-0 module map commuting with differentials.
pub fn is_chain_module_map(f: &GradedMap, m: &DGModule, n: &DGModule) -> bool {
    f.degree() == 0
        && is_module_map(f, m, n)
        && GradedMap::compose(f, m.differential()).unwrap() == GradedMap::compose(n.differential(), f).unwrap()
}

/// Bimodule chain map check: both sides.
pub fn is_chain_bimodule_map(f: &GradedMap, m: &DGBimodule, n: &DGBimodule) -> bool {
    is_chain_module_map(f, &m.as_left(), &n.as_left()) && is_module_map(f, &m.as_right(), &n.as_right())
}

/// `End_A(m)` with composition and the identity as unit.
pub fn end_dga(m: &DGModule, prefix: &str) -> Result<(DGAlgebra, HomComplex), ModuleError> {
    let hc = hom_complex(m, m, prefix)?;
    let unit = hc.coordinates(&GradedMap::identity(m.space().clone())).ok_or(ModuleError::NotInHom)?;
    let mut table: Vec<Vec<SparseVec>> = vec![];
    for f in hc.maps() {
        let mut row = vec![];
        for g in hc.maps() {
            let fg = GradedMap::compose(f, g).unwrap();
            row.push(to_sparse(&hc.coordinates(&fg).ok_or(ModuleError::NotInHom)?));
        }
        table.push(row);
    }
    let alg = DGAlgebra::from_table(hc.complex.clone(), unit, |a, b| table[a][b].clone())?;
    Ok((alg, hc))
}

/// `A` as a direct sum of shifted copies with basis `g{i}.{a}` in degree
/// `|a| + d_i`, acting by left multiplication.
pub fn free_module(a: Arc<DGAlgebra>, degrees: &[i32]) -> DGModule {
    let field = a.field();
    let mut basis = vec![];
    for (i, &d) in degrees.iter().enumerate() {
        for b in 0..a.dim() {
            basis.push((format!("g{i}.{}", a.label(b)), a.degree(b) + d));
        }
    }
    let space = Arc::new(GradedSpace::new(field, basis).expect("distinct labels"));
    let idx = |i: usize, b: usize| space.index_of(&format!("g{i}.{}", a.label(b))).unwrap();
    let mut origin = vec![(0, 0); space.dim()];
    for i in 0..degrees.len() {
        for b in 0..a.dim() {
            origin[idx(i, b)] = (i, b);
        }
    }
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, |j| {
        let (i, b) = origin[j];
        a.differential().image(b).into_iter().map(|(c, x)| (idx(i, c), x)).collect()
    })
    .unwrap();
    DGModule::from_table(a.clone(), Side::Left, Complex::new_unchecked(d), |x, j| {
        let (i, b) = origin[j];
        a.mul_basis(x, b).into_iter().map(|(c, s)| (idx(i, c), s)).collect()
    })
    .expect("free module actions have the right degrees")
}

/// A right `A`-module as a left `A^op`-module: `a·m = (−1)^{|a||m|} m a`.
pub fn right_to_left_opposite(m: &DGModule, opposite: Arc<DGAlgebra>) -> Result<DGModule, ModuleError> {
    if m.side != Side::Right {
        return Err(ModuleError::SideMismatch);
    }
    let field = m.field();
    let action = (0..m.algebra.dim())
        .map(|a| {
            let da = m.algebra.degree(a) as i64;
            m.action(a).scale_by_degree(|n| field.sign(da * n as i64))
        })
        .collect();
    DGModule::from_actions(opposite, Side::Left, m.complex.clone(), action)
}

/// The enveloping algebra `R ⊗ S^op` on basis `r|s`.
#[derive(Clone, Debug)]
pub struct Enveloping {
    pub algebra: Arc<DGAlgebra>,
    pub left: Arc<DGAlgebra>,
    pub right: Arc<DGAlgebra>,
    /// `index[r][s]` is the basis index of `r|s`.
    pub index: Vec<Vec<usize>>,
}

pub fn enveloping(r: Arc<DGAlgebra>, s: Arc<DGAlgebra>) -> Result<Enveloping, ModuleError> {
    if r.field() != s.field() {
        return Err(LinalgError::FieldMismatch.into());
    }
    let field = r.field();
    let mut basis = vec![];
    for i in 0..r.dim() {
        for j in 0..s.dim() {
            basis.push((format!("{}|{}", r.label(i), s.label(j)), r.degree(i) + s.degree(j)));
        }
    }
    let space = Arc::new(GradedSpace::new(field, basis)?);
    let index: Vec<Vec<usize>> = (0..r.dim())
        .map(|i| (0..s.dim()).map(|j| space.index_of(&format!("{}|{}", r.label(i), s.label(j))).unwrap()).collect())
        .collect();
    let mut origin = vec![(0, 0); space.dim()];
    for i in 0..r.dim() {
        for j in 0..s.dim() {
            origin[index[i][j]] = (i, j);
        }
    }
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, |k| {
        let (i, j) = origin[k];
        let mut out: SparseVec = r.differential().image(i).into_iter().map(|(a, x)| (index[a][j], x)).collect();
        let sg = field.sign(r.degree(i) as i64);
        out.extend(s.differential().image(j).into_iter().map(|(b, x)| (index[i][b], &sg * &x)));
        out
    })?;
    let mut unit = space.zero_vec();
    for (i, x) in to_sparse(r.unit()) {
        for (j, y) in to_sparse(s.unit()) {
            unit[index[i][j]] = &x * &y;
        }
    }
    let alg = DGAlgebra::from_table(Complex::new_unchecked(d), unit, |k, l| {
        let (r1, s1) = origin[k];
        let (r2, s2) = origin[l];
        // (r⊗s)(r'⊗s') = (−1)^{|s||r'|} rr' ⊗ (s ·op s'),  s ·op s' = (−1)^{|s||s'|} s' s
        let sign = field.sign((s.degree(s1) * r.degree(r2) + s.degree(s1) * s.degree(s2)) as i64);
        let rr = r.mul_basis(r1, r2);
        let ss = s.mul_basis(s2, s1);
        let mut out = vec![];
        for (a, x) in &rr {
            for (b, y) in &ss {
                out.push((index[*a][*b], &sign * &(x * y)));
            }
        }
        out
    })?;
    Ok(Enveloping { algebra: Arc::new(alg), left: r, right: s, index })
}

impl Enveloping {
    /// Bimodule as a left module: `(r⊗s)·m = (−1)^{|s||m|} r(m s)`.
    pub fn to_left(&self, m: &DGBimodule) -> Result<DGModule, ModuleError> {
        if m.left != self.left || m.right != self.right {
            return Err(ModuleError::AlgebraMismatch);
        }
        let field = m.field();
        let mut action = vec![GradedMap::zero(m.space().clone(), m.space().clone(), 0); self.algebra.dim()];
        for i in 0..self.left.dim() {
            for j in 0..self.right.dim() {
                let ds = self.right.degree(j) as i64;
                let op = GradedMap::compose(&m.lact[i], &m.ract[j])
                    .unwrap()
                    .scale_by_degree(|n| field.sign(ds * n as i64));
                action[self.index[i][j]] = op;
            }
        }
        DGModule::from_actions(self.algebra.clone(), Side::Left, m.complex.clone(), action)
    }

    /// Inverse of [`Enveloping::to_left`].
    pub fn to_bimodule(&self, m: &DGModule) -> Result<DGBimodule, ModuleError> {
        if m.algebra != self.algebra || m.side != Side::Left {
            return Err(ModuleError::AlgebraMismatch);
        }
        let field = m.field();
        let lact = (0..self.left.dim())
            .map(|i| {
                let v: SparseVec =
                    to_sparse(self.right.unit()).into_iter().map(|(j, c)| (self.index[i][j], c)).collect();
                combine(&GradedMap::zero(m.space().clone(), m.space().clone(), self.left.degree(i)), &m.action, &v)
            })
            .collect();
        let ract = (0..self.right.dim())
            .map(|j| {
                let v: SparseVec =
                    to_sparse(self.left.unit()).into_iter().map(|(i, c)| (self.index[i][j], c)).collect();
                let ds = self.right.degree(j) as i64;
                combine(&GradedMap::zero(m.space().clone(), m.space().clone(), self.right.degree(j)), &m.action, &v)
                    .scale_by_degree(|n| field.sign(ds * n as i64))
            })
            .collect();
        DGBimodule::from_actions(self.left.clone(), self.right.clone(), m.complex.clone(), lact, ract)
    }
}

/// Tensor product `m ⊗_A n` of a right and a left module.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub complex: Complex,
    /// The tensor product over the ground field, basis `x|y`.
    pub full: Arc<GradedSpace>,
    pub quotient: Quotient,
    /// `index[x][y]` is the index of `x|y` in `full`.
    pub index: Vec<Vec<usize>>,
}

impl Tensor {
    pub fn space(&self) -> &Arc<GradedSpace> {
        self.complex.space()
    }

    /// Operator on the quotient induced by `op(x, y)` on pure tensors.
    fn induced(&self, degree: i32, mut op: impl FnMut(usize, usize) -> SparseVec) -> GradedMap {
        let mut origin = vec![(0, 0); self.full.dim()];
        for (x, row) in self.index.iter().enumerate() {
            for (y, &k) in row.iter().enumerate() {
                origin[k] = (x, y);
            }
        }
        let on_full = GradedMap::from_images(self.full.clone(), self.full.clone(), degree, |k| {
            let (x, y) = origin[k];
            op(x, y)
        })
        .expect("operator respects degrees");
        let q = &self.quotient;
        GradedMap::compose(&q.projection, &GradedMap::compose(&on_full, &q.section).unwrap()).unwrap()
    }
}

pub fn tensor_over_algebra(m: &DGModule, n: &DGModule) -> Result<Tensor, ModuleError> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(ModuleError::SideMismatch);
    }
    if m.algebra != n.algebra {
        return Err(ModuleError::AlgebraMismatch);
    }
    let field = m.field();
    let (ms, ns) = (m.space(), n.space());
    let mut basis = vec![];
    for x in 0..ms.dim() {
        for y in 0..ns.dim() {
            basis.push((format!("{}|{}", ms.label(x), ns.label(y)), ms.degree(x) + ns.degree(y)));
        }
    }
    let full = Arc::new(GradedSpace::new(field, basis)?);
    let index: Vec<Vec<usize>> = (0..ms.dim())
        .map(|x| (0..ns.dim()).map(|y| full.index_of(&format!("{}|{}", ms.label(x), ns.label(y))).unwrap()).collect())
        .collect();
    let mut rels = vec![];
    for a in 0..m.algebra.dim() {
        for x in 0..ms.dim() {
            for y in 0..ns.dim() {
                let mut v = full.zero_vec();
                for (x2, c) in m.action(a).image(x) {
                    v[index[x2][y]] += &c;
                }
                for (y2, c) in n.action(a).image(y) {
                    v[index[x][y2]] -= &c;
                }
                if v.iter().any(|c| !c.is_zero()) {
                    rels.push(v);
                }
            }
        }
    }
    let sub = Subspace::span_vectors(full.clone(), &rels)?;
    let q = quotient(&full, &sub)?;
    let mut t = Tensor { complex: Complex::zero_differential(q.space.clone()), full, quotient: q, index };
    let d = t.induced(1, |x, y| {
        let mut out: SparseVec = m.differential().image(x).into_iter().map(|(x2, c)| (t_index(&t, x2, y), c)).collect();
        let sg = field.sign(ms.degree(x) as i64);
        out.extend(n.differential().image(y).into_iter().map(|(y2, c)| (t_index(&t, x, y2), &sg * &c)));
        out
    });
    t.complex = Complex::new(d)?;
    Ok(t)
}

fn t_index(t: &Tensor, x: usize, y: usize) -> usize {
    t.index[x][y]
}

/// Left action on `m ⊗_A n` from a left action on `m`: `r(x⊗y) = (rx)⊗y`.
pub fn tensor_left_action(t: &Tensor, r: Arc<DGAlgebra>, lact: &[GradedMap]) -> Result<DGModule, ModuleError> {
    let action = lact
        .iter()
        .map(|op| t.induced(op.degree(), |x, y| op.image(x).into_iter().map(|(x2, c)| (t.index[x2][y], c)).collect()))
        .collect();
    DGModule::from_actions(r, Side::Left, t.complex.clone(), action)
}

/// Right action on `m ⊗_A n` from a right action on `n`: `(x⊗y)s = x⊗(ys)`.
pub fn tensor_right_action(t: &Tensor, s: Arc<DGAlgebra>, ract: &[GradedMap]) -> Result<DGModule, ModuleError> {
    let action = ract
        .iter()
        .map(|op| t.induced(op.degree(), |x, y| op.image(y).into_iter().map(|(y2, c)| (t.index[x][y2], c)).collect()))
        .collect();
    DGModule::from_actions(s, Side::Right, t.complex.clone(), action)
}

/// Dual space: `d(x)` in degree `−|x|`; returns the index of `d(x)` for each `x`.
fn dual_space(space: &GradedSpace) -> (Arc<GradedSpace>, Vec<usize>) {
    let ds = Arc::new(
        GradedSpace::new(space.field(), (0..space.dim()).map(|i| (format!("d({})", space.label(i)), -space.degree(i))))
            .expect("wrapped labels stay distinct"),
    );
    let idx = (0..space.dim()).map(|i| ds.index_of(&format!("d({})", space.label(i))).unwrap()).collect();
    (ds, idx)
}

/// Transpose of an operator, as an operator on the dual basis, times `sign(φ degree)`.
fn dual_operator(
    op: &GradedMap,
    ds: &Arc<GradedSpace>,
    idx: &[usize],
    sign: impl Fn(i32) -> Scalar,
) -> GradedMap {
    // (φ_x ∘ op) = Σ_y [x-coefficient of op(y)] φ_y
    let mut images: Vec<SparseVec> = vec![vec![]; ds.dim()];
    for y in 0..op.source().dim() {
        for (x, c) in op.image(y) {
            images[idx[x]].push((idx[y], &sign(ds.degree(idx[x])) * &c));
        }
    }
    GradedMap::from_images(ds.clone(), ds.clone(), op.degree(), |i| images[i].clone()).expect("transpose keeps degrees")
}

fn dual_complex(c: &Complex) -> (Complex, Vec<usize>) {
    let (ds, idx) = dual_space(c.space());
    let field = c.field();
    // ∂φ = −(−1)^{|φ|} φ∘∂
    let d = dual_operator(c.differential(), &ds, &idx, |n| -field.sign(n as i64));
    (Complex::new_unchecked(d), idx)
}

/// `D(m) = Hom_k(m, k)`; a left module becomes a right module with
/// `(φ·r)(x) = φ(r x)`, a right module becomes a left module with
/// `(r·φ)(x) = (−1)^{|r|(|φ|+|x|)} φ(x r)`.
pub fn dualize(m: &DGModule) -> DGModule {
    let (c, idx) = dual_complex(&m.complex);
    let field = m.field();
    let ds = c.space().clone();
    let action = (0..m.algebra.dim())
        .map(|a| {
            let da = m.algebra.degree(a) as i64;
            match m.side {
                Side::Left => dual_operator(m.action(a), &ds, &idx, |_| field.one()),
                Side::Right => dual_operator(m.action(a), &ds, &idx, |_| field.sign(da)),
            }
        })
        .collect();
    let side = match m.side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    };
    DGModule::from_actions(m.algebra.clone(), side, c, action).expect("dual actions have the right shape")
}

/// Dual of an `(R, S)`-bimodule as an `(S, R)`-bimodule.
pub fn dualize_bimodule(m: &DGBimodule) -> DGBimodule {
    let l = dualize(&m.as_right());
    let r = dualize(&m.as_left());
    DGBimodule::from_modules(&l, &r).expect("both duals share the complex")
}

/// The evaluation isomorphism `m → D(D(m))`, `x ↦ (φ ↦ (−1)^{|x||φ|} φ(x))`,
/// i.e. `x ↦ (−1)^{|x|} d(d(x))`.
pub fn double_dual_map(m: &GradedSpace, ddm: &Arc<GradedSpace>) -> GradedMap {
    let field = m.field();
    GradedMap::from_images(Arc::new(m.clone()), ddm.clone(), 0, |i| {
        vec![(ddm.index_of(&format!("d(d({}))", m.label(i))).unwrap(), field.sign(m.degree(i) as i64))]
    })
    .expect("degrees agree")
}

/// `Σⁿ m`: left actions pick up `(−1)^{|a|n}`, right actions do not.
pub fn shift_module(m: &DGModule, n: i32) -> DGModule {
    let complex = shift(&m.complex, n);
    let action = m
        .action
        .iter()
        .map(|op| match m.side {
            Side::Left => shift_map(op, n),
            Side::Right => shift_map(op, n).scale(&m.field().sign((op.degree() * n) as i64)),
        })
        .collect();
    DGModule { algebra: m.algebra.clone(), side: m.side, complex, action }
}

pub fn shift_bimodule(m: &DGBimodule, n: i32) -> DGBimodule {
    let l = shift_module(&m.as_left(), n);
    let r = shift_module(&m.as_right(), n);
    DGBimodule::from_modules(&l, &r).unwrap()
}

/// Cone of a chain module map `f: x → y` on `y ⊕ Σx`. Left actions on the
/// `Σx` summand carry `(−1)^{|a|}`, right actions carry no sign.
#[derive(Clone, Debug)]
pub struct ModuleCone {
    pub cone: crate::complexes::Cone,
    pub module: DGModule,
}

fn cone_actions(
    c: &crate::complexes::Cone,
    ax: &[GradedMap],
    ay: &[GradedMap],
    side: Side,
) -> Vec<GradedMap> {
    let space = c.complex.space().clone();
    let field = space.field();
    let mut origin = vec![(0usize, 0usize); space.dim()];
    for (i, &j) in c.target_index.iter().enumerate() {
        origin[j] = (0, i);
    }
    for (i, &j) in c.source_index.iter().enumerate() {
        origin[j] = (1, i);
    }
    ax.iter()
        .zip(ay)
        .map(|(opx, opy)| {
            let sign = match side {
                Side::Left => field.sign(opx.degree() as i64),
                Side::Right => field.one(),
            };
            GradedMap::from_images(space.clone(), space.clone(), opx.degree(), |j| {
                let (part, i) = origin[j];
                if part == 0 {
                    opy.image(i).into_iter().map(|(t, x)| (c.target_index[t], x)).collect()
                } else {
                    opx.image(i).into_iter().map(|(t, x)| (c.source_index[t], &sign * &x)).collect()
                }
            })
            .unwrap()
        })
        .collect()
}

pub fn module_cone(f: &GradedMap, x: &DGModule, y: &DGModule) -> Result<ModuleCone, ModuleError> {
    if x.side != y.side {
        return Err(ModuleError::SideMismatch);
    }
    let cm = ChainMap::new(x.complex.clone(), y.complex.clone(), f.clone())?;
    let c = cone(&cm);
    let action = cone_actions(&c, &x.action, &y.action, x.side);
    let module = DGModule::from_actions(x.algebra.clone(), x.side, c.complex.clone(), action)?;
    Ok(ModuleCone { cone: c, module })
}

pub fn bimodule_cone(f: &GradedMap, x: &DGBimodule, y: &DGBimodule) -> Result<(crate::complexes::Cone, DGBimodule), ModuleError> {
    let cm = ChainMap::new(x.complex.clone(), y.complex.clone(), f.clone())?;
    let c = cone(&cm);
    let l = cone_actions(&c, &x.lact, &y.lact, Side::Left);
    let r = cone_actions(&c, &x.ract, &y.ract, Side::Right);
    let b = DGBimodule::from_actions(x.left.clone(), x.right.clone(), c.complex.clone(), l, r)?;
    Ok((c, b))
}

/// Direct sum of modules with the given labelling.
pub fn direct_sum_modules(
    parts: &[DGModule],
    label: impl Fn(usize, &str) -> String,
) -> Result<(DGModule, crate::linalg::DirectSum), ModuleError> {
    let first = parts.first().ok_or(ModuleError::ActionShape)?;
    if parts.iter().any(|p| p.side != first.side) {
        return Err(ModuleError::SideMismatch);
    }
    if parts.iter().any(|p| p.algebra != first.algebra) {
        return Err(ModuleError::AlgebraMismatch);
    }
    let complexes: Vec<Complex> = parts.iter().map(|p| p.complex.clone()).collect();
    let (c, sum) = direct_sum_complexes(&complexes, label)?;
    let action = (0..first.algebra.dim())
        .map(|a| {
            let mut op = GradedMap::zero(sum.space.clone(), sum.space.clone(), first.algebra.degree(a));
            for (k, p) in parts.iter().enumerate() {
                let piece = GradedMap::compose(&sum.inclusions[k], &GradedMap::compose(p.action(a), &sum.projections[k]).unwrap())
                    .unwrap();
                op = op.add(&piece).unwrap();
            }
            op
        })
        .collect();
    let m = DGModule::from_actions(first.algebra.clone(), first.side, c, action)?;
    Ok((m, sum))
}

/// Submodule spanned by a set of basis vectors closed under the action and
/// differential (checked), with labels kept.
pub fn basis_submodule(m: &DGModule, keep: &[usize]) -> Result<(DGModule, GradedMap), ModuleError> {
    let space = m.space();
    let field = m.field();
    let sub = Arc::new(GradedSpace::new(field, keep.iter().map(|&i| (space.label(i).to_string(), space.degree(i))))?);
    let pos: BTreeMap<usize, usize> = keep.iter().map(|&i| (i, sub.index_of(space.label(i)).unwrap())).collect();
    let restrict = |op: &GradedMap| -> Result<GradedMap, ModuleError> {
        let mut images = vec![];
        for j in 0..sub.dim() {
            let i = space.index_of(sub.label(j)).unwrap();
            let mut img = vec![];
            for (t, c) in op.image(i) {
                img.push((*pos.get(&t).ok_or(LinalgError::NotASubspace(format!("{} leaves the span", space.label(i))))?, c));
            }
            images.push(img);
        }
        Ok(GradedMap::from_images(sub.clone(), sub.clone(), op.degree(), |j| images[j].clone())?)
    };
    let d = restrict(m.differential())?;
    let action = m.action.iter().map(restrict).collect::<Result<Vec<_>, _>>()?;
    let inc = GradedMap::from_images(sub.clone(), space.clone(), 0, |j| vec![(space.index_of(sub.label(j)).unwrap(), field.one())])?;
    Ok((DGModule::from_actions(m.algebra.clone(), m.side, Complex::new(d)?, action)?, inc))
}

/// Quotient module by the submodule spanned by `vectors` (must be closed).
pub fn quotient_module(m: &DGModule, vectors: &[Vec<Scalar>]) -> Result<(DGModule, GradedMap), ModuleError> {
    let sub = Subspace::span_vectors(m.space().clone(), vectors)?;
    let q = quotient(m.space(), &sub)?;
    let push = |op: &GradedMap| GradedMap::compose(&q.projection, &GradedMap::compose(op, &q.section).unwrap()).unwrap();
    let d = push(m.differential());
    let action: Vec<GradedMap> = m.action.iter().map(push).collect();
    let module = DGModule::from_actions(m.algebra.clone(), m.side, Complex::new(d)?, action)?;
    // closure check: projection must be a chain module map
    if !is_chain_module_map(&q.projection, m, &module) {
        return Err(LinalgError::NotASubspace("span is not a submodule".into()).into());
    }
    Ok((module, q.projection))
}

/// Matrix of a map in dense form (rows = target), for display and tests.
pub fn dense(f: &GradedMap) -> Matrix {
    f.to_dense()
}

/// Vector of a single basis element, by label.
pub fn basis_by_label(space: &GradedSpace, label: &str) -> Option<Vec<Scalar>> {
    space.index_of(label).map(|i| space.basis_vec(i))
}

pub fn sparse_to_dense(space: &GradedSpace, v: &SparseVec) -> Vec<Scalar> {
    to_dense(space.field(), space.dim(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{algebra, dn, e2};
    use crate::complexes::homology;

    fn q() -> Field {
        Field::Rationals
    }

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    #[test]
    fn regular_modules_pass() {
        for a in [e2(q()), dn(q()), e2(f2())] {
            let a = Arc::new(a);
            assert!(check_module(&DGModule::left_regular(a.clone())).passed());
            assert!(check_module(&DGModule::right_regular(a.clone())).passed());
            assert!(check_bimodule(&DGBimodule::regular(a)).passed());
        }
    }

    fn k_over_dn(field: Field) -> DGBimodule {
        let k = Arc::new(DGAlgebra::ground(field));
        let d = Arc::new(dn(field));
        let space = k.space().clone();
        DGBimodule::from_tables(k, d.clone(), Complex::zero_differential(space), |_, m| vec![(m, field.one())], |a, m| {
            if d.label(a) == "e" { vec![(m, field.one())] } else { vec![] }
        })
        .unwrap()
    }

    #[test]
    fn k_as_k_dn_bimodule() {
        assert!(check_bimodule(&k_over_dn(q())).passed());
        let mut bad = k_over_dn(q());
        bad.ract[1] = bad.ract[0].clone(); // t acts as 1: t*t = 0 but 1*1 = 1
        let r = check_bimodule(&bad);
        assert!(!r.passed());
    }

    #[test]
    fn corrupted_compatibility_is_reported() {
        let a = Arc::new(algebra(q(), &[("1", 0), ("t", 0), ("u", 0)], "1", &[("t", "t", "u")], &[]));
        let mut m = DGBimodule::regular(a.clone());
        let (t, u) = (a.space().index_of("t").unwrap(), a.space().index_of("u").unwrap());
        let one = a.space().index_of("1").unwrap();
        // right action of t cycles u back to 1
        m.ract[t] = GradedMap::from_images(a.space().clone(), a.space().clone(), 0, |i| {
            if i == one { vec![(t, q().one())] } else if i == t { vec![(u, q().one())] } else { vec![(one, q().one())] }
        })
        .unwrap();
        let r = check_bimodule(&m);
        assert!(r.failures().any(|c| c.name == "bimodule compatibility" && c.witness.contains('t')), "{r}");
    }

    #[test]
    fn free_module_dims() {
        let k = Arc::new(DGAlgebra::ground(q()));
        assert_eq!(free_module(k, &[0]).space().dims(), BTreeMap::from([(0, 1)]));
        let e = Arc::new(e2(q()));
        assert_eq!(free_module(e.clone(), &[0]).space().dims(), BTreeMap::from([(0, 1), (1, 1)]));
        let f = free_module(e, &[0, -1]);
        assert_eq!(f.space().dims(), BTreeMap::from([(-1, 1), (0, 2), (1, 1)]));
        assert!(check_module(&f).passed());
    }

    #[test]
    fn hom_examples() {
        let k = Arc::new(DGAlgebra::ground(q()));
        let kk = DGModule::left_regular(k);
        let h = hom_complex(&kk, &kk, "f").unwrap();
        assert_eq!(h.space().dims(), BTreeMap::from([(0, 1)]));
        for field in [q(), f2()] {
            let e = Arc::new(e2(field));
            let m = DGModule::left_regular(e.clone());
            let h = hom_complex(&m, &m, "f").unwrap();
            assert_eq!(h.space().dims(), BTreeMap::from([(0, 1), (1, 1)]));
            // degree-0 cycles are chain module maps
            for (i, f) in h.maps().iter().enumerate() {
                let is_cycle = h.complex.differential().image(i).is_empty();
                if f.degree() == 0 && is_cycle {
                    assert!(is_chain_module_map(f, &m, &m));
                }
            }
        }
    }

    #[test]
    fn hom_from_regular_is_module() {
        let a = Arc::new(algebra(q(), &[("e", 0), ("x", 0), ("y", 1)], "e", &[], &[("x", "y")]));
        let m = DGModule::left_regular(a.clone());
        let h = hom_complex(&m, &m, "f").unwrap();
        assert_eq!(h.space().dims(), m.space().dims());
        assert_eq!(homology(&h.complex).dims(), homology(m.complex()).dims());
    }

    #[test]
    fn end_dga_is_opposite() {
        for field in [q(), f2()] {
            let e = Arc::new(e2(field));
            let (end, _) = end_dga(&DGModule::left_regular(e.clone()), "f").unwrap();
            assert!(crate::algebra::check_dga(&end).passed());
            assert_eq!(end.dim(), 2);
        }
        let k = Arc::new(DGAlgebra::ground(q()));
        let (end, _) = end_dga(&DGModule::left_regular(k), "f").unwrap();
        assert_eq!(end.dim(), 1);
    }

    #[test]
    fn enveloping_round_trip() {
        let e = Arc::new(e2(q()));
        let d = Arc::new(dn(q()));
        let env = enveloping(e.clone(), d.clone()).unwrap();
        assert!(crate::algebra::check_dga(&env.algebra).passed());
        let env2 = enveloping(e.clone(), e.clone()).unwrap();
        assert!(crate::algebra::check_dga(&env2.algebra).passed());
        let m = DGBimodule::regular(e.clone());
        let l = env2.to_left(&m).unwrap();
        assert!(check_module(&l).passed());
        assert_eq!(env2.to_bimodule(&l).unwrap(), m);
    }

    #[test]
    fn right_to_left_opposite_is_module() {
        let e = Arc::new(e2(q()));
        let op = Arc::new(crate::algebra::opposite(&e));
        let m = right_to_left_opposite(&DGModule::right_regular(e), op).unwrap();
        assert!(check_module(&m).passed());
    }

    #[test]
    fn tensor_examples() {
        let e = Arc::new(e2(q()));
        let t = tensor_over_algebra(&DGModule::right_regular(e.clone()), &DGModule::left_regular(e.clone())).unwrap();
        assert_eq!(t.space().dims(), e.space().dims());
        let lm = tensor_left_action(&t, e.clone(), &e.lmuls().to_vec()).unwrap();
        assert!(check_module(&lm).passed());

        let kb = k_over_dn(q());
        let d = kb.right_algebra().clone();
        let right = kb.as_right();
        let kd = DGModule::from_table(d.clone(), Side::Left, kb.complex().clone(), |a, m| {
            if d.label(a) == "e" { vec![(m, q().one())] } else { vec![] }
        })
        .unwrap();
        let t = tensor_over_algebra(&right, &kd).unwrap();
        assert_eq!(t.space().dims(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn dual_examples() {
        for field in [q(), f2()] {
            for a in [e2(field), dn(field)] {
                let a = Arc::new(a);
                let l = DGModule::left_regular(a.clone());
                let dl = dualize(&l);
                assert_eq!(dl.side(), Side::Right);
                assert!(check_module(&dl).passed(), "{}", check_module(&dl));
                let r = DGModule::right_regular(a.clone());
                let dr = dualize(&r);
                assert!(check_module(&dr).passed(), "{}", check_module(&dr));
                let b = DGBimodule::regular(a.clone());
                let db = dualize_bimodule(&b);
                assert!(check_bimodule(&db).passed(), "{}", check_bimodule(&db));
                for (n, d) in a.space().dims() {
                    assert_eq!(db.space().dim_in(-n), d);
                }
                let ddb = dualize_bimodule(&db);
                assert!(check_bimodule(&ddb).passed());
                let iso = double_dual_map(b.space(), ddb.space());
                assert!(is_chain_bimodule_map(&iso, &b, &ddb));
            }
        }
    }

    #[test]
    fn dual_with_differential() {
        let a = Arc::new(algebra(q(), &[("e", 0), ("x", 0), ("y", 1)], "e", &[], &[("x", "y")]));
        let b = DGBimodule::regular(a);
        let db = dualize_bimodule(&b);
        assert!(check_bimodule(&db).passed(), "{}", check_bimodule(&db));
        let ddb = dualize_bimodule(&db);
        assert!(is_chain_bimodule_map(&double_dual_map(b.space(), ddb.space()), &b, &ddb));
    }

    #[test]
    fn cone_and_shift_modules() {
        let e = Arc::new(e2(q()));
        let m = DGModule::left_regular(e.clone());
        let c = module_cone(&GradedMap::identity(m.space().clone()), &m, &m).unwrap();
        assert!(check_module(&c.module).passed());
        assert!(homology(c.module.complex()).is_zero());
        let s = shift_module(&m, 1);
        assert!(check_module(&s).passed());
        let b = DGBimodule::regular(e);
        let sb = shift_bimodule(&b, 1);
        assert!(check_bimodule(&sb).passed());
        let (_, cb) = bimodule_cone(&GradedMap::identity(b.space().clone()), &b, &b).unwrap();
        assert!(check_bimodule(&cb).passed());
    }
}
