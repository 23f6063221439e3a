use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use super::matrix::Matrix;
use super::LinalgError;
use crate::scalar::{Field, Scalar};

/// Sparse vector: `(basis index, coefficient)` pairs, indices ascending and
/// coefficients nonzero.
pub type SparseVec = Vec<(usize, Scalar)>;

/// A finite-dimensional graded vector space with a labelled basis.
///
/// The basis is kept sorted by degree (stable with respect to the order
/// given at construction), so each homogeneous component is a contiguous
/// index range.
#[derive(Clone)]
pub struct GradedSpace {
    field: Field,
    labels: Vec<String>,
    degrees: Vec<i32>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.labels == other.labels && self.degrees == other.degrees
    }
}

impl Eq for GradedSpace {}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> =
            self.labels.iter().zip(&self.degrees).map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "GradedSpace[{}]({})", self.field, items.join(" "))
    }
}

impl GradedSpace {
    pub fn new<S: Into<String>>(field: Field, basis: impl IntoIterator<Item = (S, i32)>) -> Result<Self, LinalgError> {
        let mut items: Vec<(String, i32)> = basis.into_iter().map(|(l, d)| (l.into(), d)).collect();
        items.sort_by_key(|(_, d)| *d);
        let mut index = HashMap::with_capacity(items.len());
        for (i, (l, _)) in items.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(LinalgError::DuplicateLabel(l.clone()));
            }
        }
        let (labels, degrees) = items.into_iter().unzip();
        Ok(GradedSpace { field, labels, degrees, index })
    }

    pub fn zero(field: Field) -> Self {
        GradedSpace { field, labels: vec![], degrees: vec![], index: HashMap::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Index range of the degree-`n` component.
    pub fn range(&self, n: i32) -> Range<usize> {
        let start = self.degrees.partition_point(|&d| d < n);
        let end = self.degrees.partition_point(|&d| d <= n);
        start..end
    }

    pub fn dim_in(&self, n: i32) -> usize {
        self.range(n).len()
    }

    /// Degrees with a nonzero component, ascending.
    pub fn support(&self) -> Vec<i32> {
        let mut s = self.degrees.clone();
        s.dedup();
        s
    }

    /// Per-degree dimensions.
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    pub fn zero_vec(&self) -> Vec<Scalar> {
        vec![self.field.zero(); self.dim()]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero_vec();
        v[i] = self.field.one();
        v
    }

    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<GradedSpace, LinalgError> {
        GradedSpace::new(self.field, self.labels.iter().zip(&self.degrees).map(|(l, &d)| (f(l), d)))
    }

    /// Same labels with every degree moved by `delta`.
    pub fn regrade(&self, delta: i32, f: impl Fn(&str) -> String) -> GradedSpace {
        GradedSpace::new(self.field, self.labels.iter().zip(&self.degrees).map(|(l, &d)| (f(l), d + delta)))
            .expect("relabelling preserves uniqueness")
    }
}

pub fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn to_dense(field: Field, dim: usize, v: &[(usize, Scalar)]) -> Vec<Scalar> {
    let mut out = vec![field.zero(); dim];
    for (i, x) in v {
        out[*i] += x;
    }
    out
}

/// Homogeneous linear map of degree `degree`, stored as one block per
/// source degree `n` (a `dim target_{n+d} × dim source_n` matrix).
#[derive(Clone, PartialEq, Eq)]
pub struct GradedMap {
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    degree: i32,
    blocks: BTreeMap<i32, Matrix>,
}

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedMap(deg {}, {:?})", self.degree, self.blocks)
    }
}

impl GradedMap {
    pub fn zero(source: Arc<GradedSpace>, target: Arc<GradedSpace>, degree: i32) -> GradedMap {
        GradedMap { source, target, degree, blocks: BTreeMap::new() }
    }

    pub fn identity(space: Arc<GradedSpace>) -> GradedMap {
        let field = space.field();
        let blocks = space.support().into_iter().map(|n| (n, Matrix::identity(field, space.dim_in(n)))).collect();
        GradedMap { source: space.clone(), target: space, degree: 0, blocks }
    }

    /// Builds a map from the images of source basis vectors. Image terms must
    /// lie in degree `deg(source basis) + degree`.
    pub fn from_images(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        mut image: impl FnMut(usize) -> SparseVec,
    ) -> Result<GradedMap, LinalgError> {
        let mut map = GradedMap::zero(source.clone(), target.clone(), degree);
        for i in 0..source.dim() {
            let n = source.degree(i);
            let col = i - source.range(n).start;
            for (t, x) in image(i) {
                if x.is_zero() {
                    continue;
                }
                if target.degree(t) != n + degree {
                    return Err(LinalgError::DegreeMismatch {
                        from: source.label(i).to_string(),
                        to: target.label(t).to_string(),
                        expected: n + degree,
                    });
                }
                let row = t - target.range(n + degree).start;
                map.block_entry(n).add_at(row, col, &x);
            }
        }
        map.prune();
        Ok(map)
    }

    /// Builds a map from a dense matrix over the full bases (rows = target).
    pub fn from_dense(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        m: &Matrix,
    ) -> Result<GradedMap, LinalgError> {
        GradedMap::from_images(source, target, degree, |i| to_sparse(&m.column(i)))
    }

    fn block_entry(&mut self, n: i32) -> &mut Matrix {
        let rows = self.target.dim_in(n + self.degree);
        let cols = self.source.dim_in(n);
        let field = self.source.field();
        self.blocks.entry(n).or_insert_with(|| Matrix::zeros(field, rows, cols))
    }

    fn prune(&mut self) {
        self.blocks.retain(|_, m| !m.is_zero());
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    /// The block from source degree `n`; zero if absent.
    pub fn block(&self, n: i32) -> Matrix {
        self.blocks.get(&n).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.field(), self.target.dim_in(n + self.degree), self.source.dim_in(n))
        })
    }

    pub fn nonzero_blocks(&self) -> &BTreeMap<i32, Matrix> {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.source.dim());
        let mut out = self.target.zero_vec();
        for (&n, m) in &self.blocks {
            let r = self.source.range(n);
            let t = self.target.range(n + self.degree);
            let img = m.apply(&v[r]);
            for (k, x) in img.into_iter().enumerate() {
                out[t.start + k] = x;
            }
        }
        out
    }

    /// Image of the `i`-th source basis vector.
    pub fn image(&self, i: usize) -> SparseVec {
        let n = self.source.degree(i);
        let Some(m) = self.blocks.get(&n) else { return vec![] };
        let col = i - self.source.range(n).start;
        let start = self.target.range(n + self.degree).start;
        (0..m.rows()).filter(|&r| !m.get(r, col).is_zero()).map(|r| (start + r, m.get(r, col).clone())).collect()
    }

    /// Entry at (target index, source index).
    pub fn entry(&self, t: usize, s: usize) -> Scalar {
        let n = self.source.degree(s);
        if self.target.degree(t) != n + self.degree {
            return self.field().zero();
        }
        match self.blocks.get(&n) {
            Some(m) => m.get(t - self.target.range(n + self.degree).start, s - self.source.range(n).start).clone(),
            None => self.field().zero(),
        }
    }

    /// Dense matrix over the full bases.
    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.target.dim(), self.source.dim());
        for s in 0..self.source.dim() {
            for (t, x) in self.image(s) {
                m.set(t, s, x);
            }
        }
        m
    }

    pub fn compose(g: &GradedMap, f: &GradedMap) -> Result<GradedMap, LinalgError> {
        if f.target != g.source {
            return Err(LinalgError::ShapeMismatch("compose: f.target != g.source".into()));
        }
        let mut out = GradedMap::zero(f.source.clone(), g.target.clone(), f.degree + g.degree);
        for (&n, fm) in &f.blocks {
            if let Some(gm) = g.blocks.get(&(n + f.degree)) {
                out.blocks.insert(n, gm.mul(fm));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn then(&self, g: &GradedMap) -> GradedMap {
        GradedMap::compose(g, self).expect("composable maps")
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap, LinalgError> {
        if self.source != other.source || self.target != other.target || self.degree != other.degree {
            return Err(LinalgError::ShapeMismatch("add: incompatible maps".into()));
        }
        let mut out = self.clone();
        for (&n, m) in &other.blocks {
            let e = out.block_entry(n);
            *e = e.add(m);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap, LinalgError> {
        self.add(&other.scale(&-self.field().one()))
    }

    pub fn scale(&self, s: &Scalar) -> GradedMap {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m = m.scale(s);
        }
        out.prune();
        out
    }

    /// Multiplies the block at source degree `n` by `sign(n)`.
    pub fn scale_by_degree(&self, sign: impl Fn(i32) -> Scalar) -> GradedMap {
        let mut out = self.clone();
        for (n, m) in out.blocks.iter_mut() {
            *m = m.scale(&sign(*n));
        }
        out
    }

    /// Same matrices, reinterpreted between other spaces with identical
    /// per-degree dimensions after the given regradings.
    pub fn reindex(
        &self,
        source: Arc<GradedSpace>,
        source_shift: i32,
        target: Arc<GradedSpace>,
        degree: i32,
    ) -> GradedMap {
        let blocks = self.blocks.iter().map(|(n, m)| (n + source_shift, m.clone())).collect();
        let out = GradedMap { source, target, degree, blocks };
        debug_assert!(out.blocks.iter().all(|(n, m)| m.cols() == out.source.dim_in(*n)
            && m.rows() == out.target.dim_in(n + out.degree)));
        out
    }

    pub fn rank_in(&self, n: i32) -> usize {
        self.blocks.get(&n).map_or(0, Matrix::rank)
    }

    /// Whether the map is a bijection in every degree.
    pub fn is_bijective(&self) -> bool {
        let degrees: std::collections::BTreeSet<i32> = self
            .source
            .support()
            .into_iter()
            .chain(self.target.support().into_iter().map(|n| n - self.degree))
            .collect();
        degrees.into_iter().all(|n| {
            let s = self.source.dim_in(n);
            s == self.target.dim_in(n + self.degree) && self.rank_in(n) == s
        })
    }

    /// Inverse of a bijective degree-`d` map (degree `-d`).
    pub fn inverse(&self) -> Option<GradedMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut out = GradedMap::zero(self.target.clone(), self.source.clone(), -self.degree);
        for (&n, m) in &self.blocks {
            out.blocks.insert(n + self.degree, m.inverse()?);
        }
        Some(out)
    }
}

/// Per-degree subspace of an ambient graded space, stored as canonical
/// (reduced) generator columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: Arc<GradedSpace>,
    generators: BTreeMap<i32, Matrix>,
}

impl Subspace {
    /// Span of the given per-degree column generators (need not be independent).
    pub fn span(ambient: Arc<GradedSpace>, generators: BTreeMap<i32, Matrix>) -> Result<Subspace, LinalgError> {
        let mut gens = BTreeMap::new();
        for (n, m) in generators {
            if m.rows() != ambient.dim_in(n) {
                return Err(LinalgError::NotASubspace(format!(
                    "generator block in degree {n} has {} rows, ambient has dimension {}",
                    m.rows(),
                    ambient.dim_in(n)
                )));
            }
            if m.field() != ambient.field() {
                return Err(LinalgError::FieldMismatch);
            }
            let basis = m.column_space();
            if basis.cols() > 0 {
                gens.insert(n, basis);
            }
        }
        Ok(Subspace { ambient, generators: gens })
    }

    /// Span of homogeneous vectors given over the full basis.
    pub fn span_vectors(ambient: Arc<GradedSpace>, vectors: &[Vec<Scalar>]) -> Result<Subspace, LinalgError> {
        let mut per: BTreeMap<i32, Vec<Vec<Scalar>>> = BTreeMap::new();
        for v in vectors {
            if v.len() != ambient.dim() {
                return Err(LinalgError::NotASubspace("vector length differs from ambient dimension".into()));
            }
            for n in ambient.support() {
                let r = ambient.range(n);
                if v[r.clone()].iter().any(|x| !x.is_zero()) {
                    per.entry(n).or_default().push(v[r].to_vec());
                }
            }
        }
        let field = ambient.field();
        let gens = per.into_iter().map(|(n, cols)| (n, Matrix::from_columns(field, ambient.dim_in(n), &cols))).collect();
        Subspace::span(ambient, gens)
    }

    pub fn zero(ambient: Arc<GradedSpace>) -> Subspace {
        Subspace { ambient, generators: BTreeMap::new() }
    }

    pub fn full(ambient: Arc<GradedSpace>) -> Subspace {
        let field = ambient.field();
        let generators =
            ambient.support().into_iter().map(|n| (n, Matrix::identity(field, ambient.dim_in(n)))).collect();
        Subspace { ambient, generators }
    }

    pub fn ambient(&self) -> &Arc<GradedSpace> {
        &self.ambient
    }

    pub fn generators(&self, n: i32) -> Matrix {
        self.generators
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.ambient.field(), self.ambient.dim_in(n), 0))
    }

    pub fn dim_in(&self, n: i32) -> usize {
        self.generators.get(&n).map_or(0, Matrix::cols)
    }

    pub fn dim(&self) -> usize {
        self.generators.values().map(Matrix::cols).sum()
    }

    /// Whether a degree-`n` coordinate vector lies in the subspace.
    pub fn contains_in(&self, n: i32, v: &[Scalar]) -> bool {
        if v.iter().all(Scalar::is_zero) {
            return true;
        }
        self.generators.get(&n).is_some_and(|g| g.solve(v).is_some())
    }

    /// All generators as vectors over the full ambient basis.
    pub fn vectors(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![];
        for (&n, m) in &self.generators {
            let r = self.ambient.range(n);
            for c in m.columns() {
                let mut v = self.ambient.zero_vec();
                v[r.clone()].clone_from_slice(&c);
                out.push(v);
            }
        }
        out
    }
}

/// Per-degree kernel in the source and image in the target.
pub fn kernel_image(f: &GradedMap) -> (Subspace, Subspace) {
    let field = f.field();
    let mut ker = BTreeMap::new();
    let mut img = BTreeMap::new();
    for n in f.source().support() {
        let b = f.block(n);
        ker.insert(n, b.kernel());
        if b.rows() > 0 {
            img.insert(n + f.degree(), b.column_space());
        }
    }
    let _ = field;
    (
        Subspace::span(f.source().clone(), ker).expect("kernel blocks have source shape"),
        Subspace::span(f.target().clone(), img).expect("image blocks have target shape"),
    )
}

/// Some preimage of `v` under `f`, or `None` when `v` is not in the image.
pub fn solve(f: &GradedMap, v: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(v.len(), f.target().dim());
    let mut x = f.source().zero_vec();
    for n in f.target().support() {
        let r = f.target().range(n);
        let part = &v[r];
        if part.iter().all(Scalar::is_zero) {
            continue;
        }
        let src = n - f.degree();
        let sr = f.source().range(src);
        if sr.is_empty() {
            return None;
        }
        let sol = f.block(src).solve(part)?;
        x[sr].clone_from_slice(&sol);
    }
    Some(x)
}

/// A quotient space together with its projection and a chosen section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: Arc<GradedSpace>,
    /// Degree-0 projection `ambient → space`.
    pub projection: GradedMap,
    /// Degree-0 section `space → ambient` sending each quotient basis vector
    /// to the ambient basis vector with the same label.
    pub section: GradedMap,
}

/// Quotient by a subspace. The quotient basis is the set of ambient basis
/// vectors at non-pivot positions of the reduced generators, labels kept.
pub fn quotient(ambient: &Arc<GradedSpace>, sub: &Subspace) -> Result<Quotient, LinalgError> {
    if **sub.ambient() != **ambient {
        return Err(LinalgError::NotASubspace("subspace lives in a different ambient space".into()));
    }
    let field = ambient.field();
    let mut keep = vec![];
    let mut reductions: BTreeMap<i32, (Matrix, Vec<usize>)> = BTreeMap::new();
    for n in ambient.support() {
        let r = ambient.range(n);
        let g = sub.generators(n);
        let rr = g.transpose().rref();
        for (k, i) in r.clone().enumerate() {
            if !rr.pivots.contains(&k) {
                keep.push(i);
            }
        }
        reductions.insert(n, (rr.reduced, rr.pivots));
    }
    let space = Arc::new(GradedSpace::new(field, keep.iter().map(|&i| (ambient.label(i).to_string(), ambient.degree(i))))?);
    let projection = GradedMap::from_images(ambient.clone(), space.clone(), 0, |i| {
        let n = ambient.degree(i);
        let r = ambient.range(n);
        let (red, pivots) = &reductions[&n];
        let mut v = vec![field.zero(); r.len()];
        v[i - r.start] = field.one();
        for (row, &p) in pivots.iter().enumerate() {
            let c = v[p].clone();
            if !c.is_zero() {
                for (k, x) in red.row(row).iter().enumerate() {
                    v[k] -= &(&c * x);
                }
            }
        }
        v.into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (space.index_of(ambient.label(r.start + k)).expect("non-pivot kept"), x))
            .collect()
    })?;
    let section = GradedMap::from_images(space.clone(), ambient.clone(), 0, |j| {
        vec![(ambient.index_of(space.label(j)).expect("label kept"), field.one())]
    })?;
    Ok(Quotient { space, projection, section })
}

/// Direct sum with summand inclusions and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub space: Arc<GradedSpace>,
    pub inclusions: Vec<GradedMap>,
    pub projections: Vec<GradedMap>,
    /// For each summand, the index in the sum of each summand basis vector.
    pub offsets: Vec<Vec<usize>>,
}

/// Direct sum of spaces. Labels are kept when globally unique; otherwise
/// every label is prefixed with its summand position (`0.x`, `1.x`, ...).
pub fn direct_sum(parts: &[Arc<GradedSpace>]) -> Result<DirectSum, LinalgError> {
    let field = parts.first().map_or(Field::Rationals, |p| p.field());
    if parts.iter().any(|p| p.field() != field) {
        return Err(LinalgError::FieldMismatch);
    }
    let plain = GradedSpace::new(field, parts.iter().flat_map(|p| p.labels().iter().cloned().zip(p.degrees().iter().copied())));
    let prefixed = plain.is_err();
    direct_sum_labeled(parts, |k, l| if prefixed { format!("{k}.{l}") } else { l.to_string() })
}

/// Direct sum with an explicit labelling `(summand index, label) → label`.
pub fn direct_sum_labeled(
    parts: &[Arc<GradedSpace>],
    label: impl Fn(usize, &str) -> String,
) -> Result<DirectSum, LinalgError> {
    let field = parts.first().map_or(Field::Rationals, |p| p.field());
    if parts.iter().any(|p| p.field() != field) {
        return Err(LinalgError::FieldMismatch);
    }
    let mut basis = vec![];
    for (k, p) in parts.iter().enumerate() {
        for i in 0..p.dim() {
            basis.push((label(k, p.label(i)), p.degree(i)));
        }
    }
    let space = Arc::new(GradedSpace::new(field, basis)?);
    let mut inclusions = vec![];
    let mut projections = vec![];
    let mut offsets = vec![];
    for (k, p) in parts.iter().enumerate() {
        let idx: Vec<usize> = (0..p.dim()).map(|i| space.index_of(&label(k, p.label(i))).unwrap()).collect();
        inclusions.push(GradedMap::from_images(p.clone(), space.clone(), 0, |i| vec![(idx[i], field.one())])?);
        let back: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        projections.push(GradedMap::from_images(space.clone(), p.clone(), 0, |j| {
            back.get(&j).map(|&i| vec![(i, field.one())]).unwrap_or_default()
        })?);
        offsets.push(idx);
    }
    Ok(DirectSum { space, inclusions, projections, offsets })
}

/// Block-diagonal sum of maps between the given direct sums.
pub fn direct_sum_maps(maps: &[GradedMap], source: &DirectSum, target: &DirectSum) -> Result<GradedMap, LinalgError> {
    let degree = maps.first().map_or(0, GradedMap::degree);
    if maps.iter().any(|m| m.degree() != degree) {
        return Err(LinalgError::ShapeMismatch("summed maps must share a degree".into()));
    }
    if maps.len() != source.offsets.len() || maps.len() != target.offsets.len() {
        return Err(LinalgError::ShapeMismatch("summand count mismatch".into()));
    }
    let mut out = GradedMap::zero(source.space.clone(), target.space.clone(), degree);
    for (k, m) in maps.iter().enumerate() {
        let piece = GradedMap::compose(&target.inclusions[k], &GradedMap::compose(m, &source.projections[k])?)?;
        out = out.add(&piece)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn space(basis: &[(&str, i32)]) -> Arc<GradedSpace> {
        Arc::new(GradedSpace::new(q(), basis.iter().map(|(l, d)| (*l, *d))).unwrap())
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(GradedSpace::new(q(), [("a", 0), ("a", 1)]), Err(LinalgError::DuplicateLabel(_))));
    }

    #[test]
    fn compose_identity_and_zero() {
        let v = space(&[("a", 0), ("b", 0), ("c", 1)]);
        let f = GradedMap::from_images(v.clone(), v.clone(), 1, |i| if i == 0 { vec![(2, q().from_i64(3))] } else { vec![] })
            .unwrap();
        assert_eq!(GradedMap::compose(&GradedMap::identity(v.clone()), &f).unwrap(), f);
        let z = GradedMap::zero(v.clone(), v.clone(), 0);
        assert!(GradedMap::compose(&f, &z).unwrap().is_zero());
    }

    #[test]
    fn compose_scalar_blocks() {
        let v = space(&[("a", 0)]);
        let two_thirds = Scalar::parse("2/3", q()).unwrap();
        let three_quarters = Scalar::parse("3/4", q()).unwrap();
        let f = GradedMap::from_images(v.clone(), v.clone(), 0, |_| vec![(0, two_thirds.clone())]).unwrap();
        let g = GradedMap::from_images(v.clone(), v.clone(), 0, |_| vec![(0, three_quarters.clone())]).unwrap();
        let h = GradedMap::compose(&g, &f).unwrap();
        assert_eq!(h.entry(0, 0), Scalar::parse("1/2", q()).unwrap());
    }

    #[test]
    fn compose_shape_mismatch() {
        let v = space(&[("a", 0)]);
        let w = space(&[("b", 0)]);
        let f = GradedMap::identity(v);
        let g = GradedMap::identity(w);
        assert!(matches!(GradedMap::compose(&g, &f), Err(LinalgError::ShapeMismatch(_))));
    }

    #[test]
    fn kernel_image_examples() {
        let v = space(&[("a", 0), ("b", 0), ("c", 0)]);
        let (k, i) = kernel_image(&GradedMap::zero(v.clone(), v.clone(), 0));
        assert_eq!((k.dim(), i.dim()), (3, 0));
        let (k, i) = kernel_image(&GradedMap::identity(v.clone()));
        assert_eq!((k.dim(), i.dim()), (0, 3));
    }

    #[test]
    fn quotient_examples() {
        let v = space(&[("a", 0), ("b", 0)]);
        let q0 = quotient(&v, &Subspace::zero(v.clone())).unwrap();
        assert_eq!(*q0.space, *v);
        assert_eq!(q0.projection, GradedMap::identity(v.clone()));
        let qf = quotient(&v, &Subspace::full(v.clone())).unwrap();
        assert_eq!(qf.space.dim(), 0);

        let one = q().one();
        let sub = Subspace::span_vectors(v.clone(), &[vec![one.clone(), one.clone()]]).unwrap();
        let qd = quotient(&v, &sub).unwrap();
        assert_eq!(qd.space.dim(), 1);
        let (k, _) = kernel_image(&qd.projection);
        assert_eq!(k, sub);
        let other = space(&[("z", 0), ("b", 0)]);
        assert!(matches!(quotient(&other, &sub), Err(LinalgError::NotASubspace(_))));
    }

    #[test]
    fn direct_sum_examples() {
        let a = space(&[("a", 0), ("b", 1), ("c", 1)]);
        let b = space(&[("x", 0), ("y", 0), ("z", 0)]);
        let s = direct_sum(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.space.dim_in(0), 4);
        assert_eq!(s.space.dim_in(1), 2);
        for i in 0..2 {
            for j in 0..2 {
                let pi = GradedMap::compose(&s.projections[j], &s.inclusions[i]).unwrap();
                if i == j {
                    assert_eq!(pi, GradedMap::identity([a.clone(), b.clone()][i].clone()));
                } else {
                    assert!(pi.is_zero());
                }
            }
        }
        let z = Arc::new(GradedSpace::zero(q()));
        let s = direct_sum(&[a.clone(), z]).unwrap();
        assert_eq!(*s.space, *a);
        let clash = direct_sum(&[a.clone(), a.clone()]).unwrap();
        assert!(clash.space.index_of("1.b").is_some());
    }

    #[test]
    fn solve_examples() {
        let v = space(&[("a", 0), ("b", 0)]);
        let w = GradedMap::identity(v.clone());
        let target = vec![q().from_i64(2), q().from_i64(-1)];
        assert_eq!(solve(&w, &target).unwrap(), target);
        assert!(solve(&GradedMap::zero(v.clone(), v.clone(), 0), &target).is_none());
    }
}
