//! Cochain complexes (differential of degree +1), homology, shifts and cones.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{direct_sum_labeled, GradedMap, GradedSpace, LinalgError, Matrix, SparseVec};
use crate::report::{Level, Report};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("differential has degree {0}, expected 1")]
    WrongDegree(i32),
    #[error("differential does not square to zero in degree {0}")]
    NotAComplex(i32),
    #[error("map does not commute with the differentials in degree {0}")]
    NotAChainMap(i32),
    #[error("chain map must have degree 0, found {0}")]
    NonzeroDegree(i32),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    space: Arc<GradedSpace>,
    d: GradedMap,
}

impl Complex {
    pub fn new(d: GradedMap) -> Result<Complex, ComplexError> {
        if d.source() != d.target() {
            return Err(LinalgError::ShapeMismatch("differential must be an endomorphism".into()).into());
        }
        if d.degree() != 1 {
            return Err(ComplexError::WrongDegree(d.degree()));
        }
        let c = Complex { space: d.source().clone(), d };
        if let Some(n) = c.square_failure() {
            return Err(ComplexError::NotAComplex(n));
        }
        Ok(c)
    }

    /// Builds without checking `∂² = 0` (for corrupted-input tests and reports).
    pub fn new_unchecked(d: GradedMap) -> Complex {
        Complex { space: d.source().clone(), d }
    }

    pub fn zero_differential(space: Arc<GradedSpace>) -> Complex {
        Complex { d: GradedMap::zero(space.clone(), space.clone(), 1), space }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    fn square_failure(&self) -> Option<i32> {
        let dd = GradedMap::compose(&self.d, &self.d).expect("endomorphism");
        dd.nonzero_blocks().keys().next().copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.space.dims().iter().map(|(&n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

pub fn check_complex(c: &Complex) -> Report {
    let mut r = Report::new();
    let dd = GradedMap::compose(&c.d, &c.d).expect("endomorphism");
    if dd.is_zero() {
        r.pass(Level::Axiom, "d^2=0", "all degrees");
    } else {
        for (&n, m) in dd.nonzero_blocks() {
            let col = (0..m.cols()).find(|&j| m.column(j).iter().any(|x| !x.is_zero())).unwrap();
            let lbl = c.space.label(c.space.range(n).start + col);
            r.fail(Level::Axiom, "d^2=0", format!("degree {n}: d(d({lbl})) != 0"));
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    map: GradedMap,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, map: GradedMap) -> Result<ChainMap, ComplexError> {
        let f = ChainMap::new_unchecked(source, target, map)?;
        if let Some(n) = f.commutation_failure() {
            return Err(ComplexError::NotAChainMap(n));
        }
        Ok(f)
    }

    pub fn new_unchecked(source: Complex, target: Complex, map: GradedMap) -> Result<ChainMap, ComplexError> {
        if map.degree() != 0 {
            return Err(ComplexError::NonzeroDegree(map.degree()));
        }
        if map.source() != source.space() || map.target() != target.space() {
            return Err(LinalgError::ShapeMismatch("chain map spaces differ from complexes".into()).into());
        }
        Ok(ChainMap { source, target, map })
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap { source: c.clone(), target: c.clone(), map: GradedMap::identity(c.space.clone()) }
    }

    pub fn zero(source: &Complex, target: &Complex) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            map: GradedMap::zero(source.space.clone(), target.space.clone(), 0),
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn map(&self) -> &GradedMap {
        &self.map
    }

    /// First source degree where `f∂ ≠ ∂f`.
    pub fn commutation_failure(&self) -> Option<i32> {
        let a = GradedMap::compose(&self.map, &self.source.d).unwrap();
        let b = GradedMap::compose(&self.target.d, &self.map).unwrap();
        a.sub(&b).unwrap().nonzero_blocks().keys().next().copied()
    }

    pub fn compose(g: &ChainMap, f: &ChainMap) -> Result<ChainMap, ComplexError> {
        let map = GradedMap::compose(&g.map, &f.map)?;
        Ok(ChainMap { source: f.source.clone(), target: g.target.clone(), map })
    }
}

/// Homology with chosen representative cycles.
#[derive(Clone, Debug)]
pub struct HomologyData {
    pub homology: Arc<GradedSpace>,
    /// Per degree: columns are representative cycles (degree-`n` coordinates).
    pub representatives: BTreeMap<i32, Matrix>,
    /// Degree-0 map from the complex to its homology; on cycles it returns
    /// the class, elsewhere it is meaningless.
    pub projection: GradedMap,
}

impl HomologyData {
    pub fn dim_in(&self, n: i32) -> usize {
        self.homology.dim_in(n)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.homology.dims()
    }

    pub fn is_zero(&self) -> bool {
        self.homology.dim() == 0
    }

    /// Representative of the `i`-th homology basis vector, over the full basis.
    pub fn representative(&self, ambient: &GradedSpace, i: usize) -> Vec<Scalar> {
        let n = self.homology.degree(i);
        let col = i - self.homology.range(n).start;
        let mut v = ambient.zero_vec();
        let r = ambient.range(n);
        v[r].clone_from_slice(&self.representatives[&n].column(col));
        v
    }

    /// Class of a cycle.
    pub fn class_of(&self, cycle: &[Scalar]) -> Vec<Scalar> {
        self.projection.apply(cycle)
    }
}

/// Left inverse of a full-column-rank matrix.
fn left_inverse(m: &Matrix) -> Matrix {
    let field = m.field();
    let rr = m.transpose().rref();
    assert_eq!(rr.pivots.len(), m.cols(), "left_inverse needs full column rank");
    let rows: Vec<Vec<Scalar>> = rr.pivots.iter().map(|&i| m.row(i).to_vec()).collect();
    let sq = Matrix::from_rows(field, rows, m.cols());
    let inv = sq.inverse().expect("pivot rows are independent");
    let mut out = Matrix::zeros(field, m.cols(), m.rows());
    for (k, &i) in rr.pivots.iter().enumerate() {
        for r in 0..m.cols() {
            out.set(r, i, inv.get(r, k).clone());
        }
    }
    out
}

pub fn homology(c: &Complex) -> HomologyData {
    let field = c.field();
    let space = &c.space;
    let mut basis = vec![];
    let mut reps = BTreeMap::new();
    let mut proj_blocks: BTreeMap<i32, Matrix> = BTreeMap::new();
    for n in space.support() {
        let dn = c.d.block(n);
        let rr = dn.rref();
        let free: Vec<usize> = (0..dn.cols()).filter(|j| !rr.pivots.contains(j)).collect();
        let z = dn.kernel();
        let b = c.d.block(n - 1).column_space();
        let bz = b.hstack(&z);
        let pivots = bz.rref().pivots;
        let chosen: Vec<usize> = pivots.iter().filter(|&&p| p >= b.cols()).map(|p| p - b.cols()).collect();
        if chosen.is_empty() {
            continue;
        }
        let start = space.range(n).start;
        for &k in &chosen {
            basis.push((format!("[{}]", space.label(start + free[k])), n));
        }
        let rep = Matrix::from_columns(field, dn.cols(), &chosen.iter().map(|&k| z.column(k)).collect::<Vec<_>>());
        let full = b.hstack(&rep);
        let li = left_inverse(&full);
        let mut p = Matrix::zeros(field, rep.cols(), dn.cols());
        for i in 0..rep.cols() {
            for j in 0..dn.cols() {
                p.set(i, j, li.get(b.cols() + i, j).clone());
            }
        }
        reps.insert(n, rep);
        proj_blocks.insert(n, p);
    }
    let homology = Arc::new(GradedSpace::new(field, basis).expect("free-variable labels are distinct"));
    let mut projection = GradedMap::zero(space.clone(), homology.clone(), 0);
    for (n, p) in proj_blocks {
        let piece = GradedMap::from_images(space.clone(), homology.clone(), 0, |i| {
            if space.degree(i) != n {
                return vec![];
            }
            let col = i - space.range(n).start;
            let off = homology.range(n).start;
            (0..p.rows()).filter(|&r| !p.get(r, col).is_zero()).map(|r| (off + r, p.get(r, col).clone())).collect()
        })
        .expect("degree preserved");
        projection = projection.add(&piece).unwrap();
    }
    HomologyData { homology, representatives: reps, projection }
}

pub fn is_exact(c: &Complex) -> bool {
    c.space.support().into_iter().all(|n| {
        let dn = c.d.block(n);
        let z = dn.cols() - dn.rank();
        z == c.d.block(n - 1).rank()
    })
}

fn shift_label(label: &str, n: i32) -> String {
    let mut l = label.to_string();
    for _ in 0..n.unsigned_abs() {
        let (grow, shrink) = if n > 0 { ("s(", "u(") } else { ("u(", "s(") };
        l = if l.starts_with(shrink) && l.ends_with(')') && balanced(&l[2..l.len() - 1]) {
            l[2..l.len() - 1].to_string()
        } else {
            format!("{grow}{l})")
        };
    }
    l
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// `Σⁿ` of a space: degrees lowered by `n`, labels wrapped in `s(…)`.
pub fn shift_space(space: &GradedSpace, n: i32) -> GradedSpace {
    space.regrade(-n, |l| shift_label(l, n))
}

/// `Σⁿ c`: `(Σⁿc)^m = c^{m+n}`, differential multiplied by `(−1)^n`.
pub fn shift(c: &Complex, n: i32) -> Complex {
    let space = Arc::new(shift_space(&c.space, n));
    let d = c.d.reindex(space.clone(), -n, space.clone(), 1).scale(&c.field().sign(n as i64));
    Complex { space, d }
}

/// `Σⁿ f = (−1)^{|f|·n} f` between the shifted spaces.
pub fn shift_map(f: &GradedMap, n: i32) -> GradedMap {
    let src = Arc::new(shift_space(f.source(), n));
    let tgt = Arc::new(shift_space(f.target(), n));
    f.reindex(src, -n, tgt, f.degree()).scale(&f.field().sign((f.degree() as i64) * (n as i64)))
}

pub fn shift_chain_map(f: &ChainMap, n: i32) -> ChainMap {
    ChainMap { source: shift(&f.source, n), target: shift(&f.target, n), map: shift_map(&f.map, n) }
}

/// Mapping cone of `f: X → Y` on `Y ⊕ ΣX`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Complex,
    pub inclusion: ChainMap,
    /// Degree-0 projection onto the `ΣX` summand.
    pub projection: GradedMap,
    /// Index in the cone of each `Y` basis vector and each `ΣX` basis vector.
    pub target_index: Vec<usize>,
    pub source_index: Vec<usize>,
}

pub fn cone(f: &ChainMap) -> Cone {
    let field = f.source.field();
    let y = f.target.space.clone();
    let sx = Arc::new(shift_space(&f.source.space, 1));
    let parts = [y.clone(), sx.clone()];
    let sum = direct_sum_labeled(&parts, |_, l| l.to_string())
        .or_else(|_| direct_sum_labeled(&parts, |k, l| format!("{k}.{l}")))
        .expect("prefixed labels are distinct");
    let space = sum.space.clone();
    let yi = sum.offsets[0].clone();
    let xi = sum.offsets[1].clone();
    let mut origin = vec![(0usize, 0usize); space.dim()];
    for (i, &j) in yi.iter().enumerate() {
        origin[j] = (0, i);
    }
    for (i, &j) in xi.iter().enumerate() {
        origin[j] = (1, i);
    }
    let dy = f.target.d.clone();
    let dx = f.source.d.clone();
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, |j| {
        let (part, i) = origin[j];
        let mut img: SparseVec = vec![];
        if part == 0 {
            img.extend(dy.image(i).into_iter().map(|(t, c)| (yi[t], c)));
        } else {
            img.extend(f.map.image(i).into_iter().map(|(t, c)| (yi[t], c)));
            img.extend(dx.image(i).into_iter().map(|(t, c)| (xi[t], -c)));
        }
        img
    })
    .expect("cone differential has degree 1");
    let complex = Complex { space: space.clone(), d };
    let inclusion = ChainMap { source: f.target.clone(), target: complex.clone(), map: sum.inclusions[0].clone() };
    let _ = field;
    Cone { complex, inclusion, projection: sum.projections[1].clone(), target_index: yi, source_index: xi }
}

/// Induced map on homology `H(X) → H(Y)`.
pub fn induced_homology_map(f: &ChainMap) -> GradedMap {
    let hx = homology(&f.source);
    let hy = homology(&f.target);
    induced_with(f, &hx, &hy)
}

pub fn induced_with(f: &ChainMap, hx: &HomologyData, hy: &HomologyData) -> GradedMap {
    GradedMap::from_images(hx.homology.clone(), hy.homology.clone(), 0, |i| {
        let rep = hx.representative(&f.source.space, i);
        crate::linalg::to_sparse(&hy.class_of(&f.map.apply(&rep)))
    })
    .expect("degree 0")
}

/// Quasi-isomorphism via the induced map, confirmed by cone exactness.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    let by_induced = induced_homology_map(f).is_bijective();
    let by_cone = is_exact(&cone(f).complex);
    assert_eq!(by_induced, by_cone, "quasi-isomorphism routes disagree");
    by_induced
}

/// Direct sum of complexes with the given labelling.
pub fn direct_sum_complexes(
    parts: &[Complex],
    label: impl Fn(usize, &str) -> String,
) -> Result<(Complex, crate::linalg::DirectSum), ComplexError> {
    let spaces: Vec<Arc<GradedSpace>> = parts.iter().map(|c| c.space.clone()).collect();
    let sum = direct_sum_labeled(&spaces, label)?;
    let mut d = GradedMap::zero(sum.space.clone(), sum.space.clone(), 1);
    for (k, c) in parts.iter().enumerate() {
        let piece = GradedMap::compose(&sum.inclusions[k], &GradedMap::compose(&c.d, &sum.projections[k])?)?;
        d = d.add(&piece)?;
    }
    Ok((Complex { space: sum.space.clone(), d }, sum))
}
