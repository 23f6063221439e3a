//! Finite-dimensional differential graded algebras given by structure constants.

use std::sync::Arc;

use thiserror::Error;

use crate::complexes::{homology, is_quasi_iso, ChainMap, Complex, ComplexError, HomologyData};
use crate::linalg::{to_sparse, GradedMap, GradedSpace, LinalgError, SparseVec};
use crate::report::{Level, Report};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("product {a}*{b} has a term `{term}` of the wrong degree")]
    ProductDegree { a: String, b: String, term: String },
    #[error("unit is not concentrated in degree 0")]
    UnitDegree,
    #[error("unit vector has the wrong length")]
    UnitShape,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A DGA stored as its underlying complex, a unit vector, and the left
/// multiplication operator of every basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    complex: Complex,
    unit: Vec<Scalar>,
    lmul: Vec<GradedMap>,
}

/// Linear combination `Σ c_i maps[i]` of maps sharing source, target and degree.
pub fn combine(template: &GradedMap, maps: &[GradedMap], coeffs: &[(usize, Scalar)]) -> GradedMap {
    let mut out = GradedMap::zero(template.source().clone(), template.target().clone(), template.degree());
    for (i, c) in coeffs {
        out = out.add(&maps[*i].scale(c)).expect("same shape");
    }
    out
}

impl DGAlgebra {
    /// Builds from the basis products `product(a, b)`. Only shapes and degrees
    /// are checked here; axioms are the business of [`check_dga`].
    pub fn from_table(
        complex: Complex,
        unit: Vec<Scalar>,
        mut product: impl FnMut(usize, usize) -> SparseVec,
    ) -> Result<DGAlgebra, AlgebraError> {
        let space = complex.space().clone();
        if unit.len() != space.dim() {
            return Err(AlgebraError::UnitShape);
        }
        if unit.iter().enumerate().any(|(i, x)| !x.is_zero() && space.degree(i) != 0) {
            return Err(AlgebraError::UnitDegree);
        }
        let mut lmul = Vec::with_capacity(space.dim());
        for a in 0..space.dim() {
            let m = GradedMap::from_images(space.clone(), space.clone(), space.degree(a), |b| product(a, b)).map_err(
                |e| match e {
                    LinalgError::DegreeMismatch { from, to, .. } => AlgebraError::ProductDegree {
                        a: space.label(a).to_string(),
                        b: from,
                        term: to,
                    },
                    e => e.into(),
                },
            )?;
            lmul.push(m);
        }
        Ok(DGAlgebra { complex, unit, lmul })
    }

    /// The ground field as a one-dimensional DGA with basis `1`.
    pub fn ground(field: Field) -> DGAlgebra {
        let space = Arc::new(GradedSpace::new(field, [("1", 0)]).unwrap());
        DGAlgebra::from_table(Complex::zero_differential(space), vec![field.one()], |_, _| vec![(0, field.one())])
            .unwrap()
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

    pub fn degree(&self, i: usize) -> i32 {
        self.space().degree(i)
    }

    pub fn label(&self, i: usize) -> &str {
        self.space().label(i)
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    /// Left multiplication by the `a`-th basis element.
    pub fn lmul(&self, a: usize) -> &GradedMap {
        &self.lmul[a]
    }

    pub fn lmuls(&self) -> &[GradedMap] {
        &self.lmul
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> SparseVec {
        let img = self.lmul[a].image(b);
        img
    }

    /// Product of two arbitrary vectors.
    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.space().zero_vec();
        for (a, c) in to_sparse(x) {
            let v = self.lmul[a].apply(y);
            for (o, t) in out.iter_mut().zip(v) {
                *o += &(&c * &t);
            }
        }
        out
    }

    /// Right multiplication operators `x ↦ x·a`, one per basis element.
    pub fn rmuls(&self) -> Vec<GradedMap> {
        let space = self.space().clone();
        (0..self.dim())
            .map(|a| {
                GradedMap::from_images(space.clone(), space.clone(), space.degree(a), |b| self.mul_basis(b, a))
                    .expect("degrees already checked")
            })
            .collect()
    }

    /// Left multiplication by a homogeneous vector of degree `deg`.
    pub fn lmul_vec(&self, x: &[Scalar], deg: i32) -> GradedMap {
        let template = GradedMap::zero(self.space().clone(), self.space().clone(), deg);
        combine(&template, &self.lmul, &to_sparse(x))
    }

    pub fn unit_index(&self) -> Option<usize> {
        let s = to_sparse(&self.unit);
        (s.len() == 1 && s[0].1.is_one()).then(|| s[0].0)
    }

    /// Basis indices of orthogonal idempotents summing to the unit, provided
    /// every basis element `b` satisfies `b·e ∈ {b, 0}` for each of them.
    pub fn idempotent_decomposition(&self) -> Option<Vec<usize>> {
        let s = to_sparse(&self.unit);
        if s.iter().any(|(_, c)| !c.is_one()) {
            return None;
        }
        let idem: Vec<usize> = s.iter().map(|(i, _)| *i).collect();
        for &e in &idem {
            for &f in &idem {
                let p = self.mul_basis(e, f);
                let want: SparseVec = if e == f { vec![(e, self.field().one())] } else { vec![] };
                if p != want {
                    return None;
                }
            }
        }
        for b in 0..self.dim() {
            for &e in &idem {
                let p = self.mul_basis(b, e);
                if !(p.is_empty() || p == vec![(b, self.field().one())]) {
                    return None;
                }
            }
        }
        Some(idem)
    }
}

fn first_difference(f: &GradedMap, g: &GradedMap) -> Option<usize> {
    let diff = f.sub(g).ok()?;
    (0..f.source().dim()).find(|&i| !diff.image(i).is_empty())
}

/// Checks unit, associativity, Leibniz, `∂² = 0` and `∂1 = 0`.
pub fn check_dga(a: &DGAlgebra) -> Report {
    let mut r = Report::new();
    let space = a.space();
    let n = a.dim();
    let lbl = |i: usize| space.label(i).to_string();
    let id = GradedMap::identity(space.clone());

    let dd = GradedMap::compose(a.differential(), a.differential()).unwrap();
    match (0..n).find(|&i| !dd.image(i).is_empty()) {
        None => r.pass(Level::Axiom, "d^2=0", "all basis elements"),
        Some(i) => r.fail(Level::Axiom, "d^2=0", format!("d(d({})) != 0", lbl(i))),
    }

    let d1 = a.differential().apply(a.unit());
    r.check(d1.iter().all(Scalar::is_zero), Level::Axiom, "d(1)=0", if d1.iter().all(Scalar::is_zero) {
        "unit is a cycle".to_string()
    } else {
        "d(1) != 0".to_string()
    });

    let left_unit = a.lmul_vec(a.unit(), 0);
    let mut unit_fail = first_difference(&left_unit, &id).map(|b| format!("1*{} != {}", lbl(b), lbl(b)));
    if unit_fail.is_none() {
        for b in 0..n {
            if to_sparse(&a.lmul(b).apply(a.unit())) != vec![(b, a.field().one())] {
                unit_fail = Some(format!("{}*1 != {}", lbl(b), lbl(b)));
                break;
            }
        }
    }
    match unit_fail {
        None => r.pass(Level::Axiom, "unit", "1*b = b*1 = b for all basis b"),
        Some(w) => r.fail(Level::Axiom, "unit", w),
    }

    let mut assoc = None;
    'outer: for x in 0..n {
        for y in 0..n {
            let lhs = combine(
                &GradedMap::zero(space.clone(), space.clone(), a.degree(x) + a.degree(y)),
                a.lmuls(),
                &a.mul_basis(x, y),
            );
            let rhs = GradedMap::compose(a.lmul(x), a.lmul(y)).unwrap();
            if let Some(z) = first_difference(&lhs, &rhs) {
                assoc = Some(format!("({}*{})*{} != {}*({}*{})", lbl(x), lbl(y), lbl(z), lbl(x), lbl(y), lbl(z)));
                break 'outer;
            }
        }
    }
    match assoc {
        None => r.pass(Level::Axiom, "associativity", format!("all {} basis triples", n * n * n)),
        Some(w) => r.fail(Level::Axiom, "associativity", w),
    }

    let mut leib = None;
    for x in 0..n {
        // ∂∘L_x = L_{∂x} + (−1)^{|x|} L_x∘∂
        let lhs = GradedMap::compose(a.differential(), a.lmul(x)).unwrap();
        let dx = a.differential().image(x);
        let ldx = combine(&GradedMap::zero(space.clone(), space.clone(), a.degree(x) + 1), a.lmuls(), &dx);
        let rhs = ldx
            .add(&GradedMap::compose(a.lmul(x), a.differential()).unwrap().scale(&a.field().sign(a.degree(x) as i64)))
            .unwrap();
        if let Some(y) = first_difference(&lhs, &rhs) {
            leib = Some(format!("d({}*{}) != d({})*{} + (-1)^|{}| {}*d({})", lbl(x), lbl(y), lbl(x), lbl(y), lbl(x), lbl(x), lbl(y)));
            break;
        }
    }
    match leib {
        None => r.pass(Level::Axiom, "leibniz", format!("all {} basis pairs", n * n)),
        Some(w) => r.fail(Level::Axiom, "leibniz", w),
    }
    r
}

/// `a·_op b = (−1)^{|a||b|} b a` on the same complex and unit.
pub fn opposite(a: &DGAlgebra) -> DGAlgebra {
    let field = a.field();
    DGAlgebra::from_table(a.complex().clone(), a.unit().to_vec(), |x, y| {
        let s = field.sign((a.degree(x) * a.degree(y)) as i64);
        a.mul_basis(y, x).into_iter().map(|(i, c)| (i, &s * &c)).collect()
    })
    .expect("same degrees as the original")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAMorphism {
    pub source: Arc<DGAlgebra>,
    pub target: Arc<DGAlgebra>,
    pub map: GradedMap,
}

impl DGAMorphism {
    pub fn new(source: Arc<DGAlgebra>, target: Arc<DGAlgebra>, map: GradedMap) -> Result<DGAMorphism, AlgebraError> {
        if map.degree() != 0 || map.source() != source.space() || map.target() != target.space() {
            return Err(LinalgError::ShapeMismatch("morphism must be degree 0 between the algebras".into()).into());
        }
        Ok(DGAMorphism { source, target, map })
    }

    pub fn identity(a: Arc<DGAlgebra>) -> DGAMorphism {
        let map = GradedMap::identity(a.space().clone());
        DGAMorphism { source: a.clone(), target: a, map }
    }

    pub fn chain_map(&self) -> ChainMap {
        ChainMap::new_unchecked(self.source.complex().clone(), self.target.complex().clone(), self.map.clone())
            .expect("degree 0 between the underlying spaces")
    }
}

pub fn check_dga_morphism(f: &DGAMorphism) -> Report {
    let mut r = Report::new();
    let src = &f.source;
    let tgt = &f.target;
    let lbl = |i: usize| src.label(i).to_string();

    let u = f.map.apply(src.unit());
    r.check(u == tgt.unit(), Level::Axiom, "morphism unit", if u == tgt.unit() {
        "f(1) = 1".to_string()
    } else {
        "f(1) != 1".to_string()
    });

    let fd = GradedMap::compose(&f.map, src.differential()).unwrap();
    let df = GradedMap::compose(tgt.differential(), &f.map).unwrap();
    match first_difference(&fd, &df) {
        None => r.pass(Level::Axiom, "morphism chain", "f d = d f"),
        Some(i) => r.fail(Level::Axiom, "morphism chain", format!("f(d({0})) != d(f({0}))", lbl(i))),
    }

    let images: Vec<Vec<Scalar>> = (0..src.dim()).map(|i| f.map.apply(&src.space().basis_vec(i))).collect();
    let mut bad = None;
    'outer: for x in 0..src.dim() {
        for y in 0..src.dim() {
            let lhs = f.map.apply(&crate::linalg::to_dense(src.field(), src.dim(), &src.mul_basis(x, y)));
            let rhs = tgt.mul(&images[x], &images[y]);
            if lhs != rhs {
                bad = Some(format!("f({0}*{1}) != f({0})*f({1})", lbl(x), lbl(y)));
                break 'outer;
            }
        }
    }
    match bad {
        None => r.pass(Level::Axiom, "morphism multiplicative", format!("all {} basis pairs", src.dim() * src.dim())),
        Some(w) => r.fail(Level::Axiom, "morphism multiplicative", w),
    }
    r
}

pub fn is_dga_quasi_iso(f: &DGAMorphism) -> bool {
    is_quasi_iso(&f.chain_map())
}

/// Homology of a DGA with the induced graded algebra structure.
#[derive(Clone, Debug)]
pub struct HomologyAlgebra {
    pub data: HomologyData,
    pub algebra: DGAlgebra,
}

/// Multiplies representatives and projects. Independence of the choice of
/// representative is asserted: products of cycles with boundaries must vanish
/// in homology.
pub fn homology_algebra(a: &DGAlgebra) -> HomologyAlgebra {
    let data = homology(a.complex());
    let h = data.homology.clone();
    let reps: Vec<Vec<Scalar>> = (0..h.dim()).map(|i| data.representative(a.space(), i)).collect();
    let boundaries: Vec<Vec<Scalar>> =
        (0..a.dim()).map(|i| a.differential().apply(&a.space().basis_vec(i))).filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    for z in &reps {
        for b in &boundaries {
            assert!(data.class_of(&a.mul(z, b)).iter().all(Scalar::is_zero), "homology product not well defined");
            assert!(data.class_of(&a.mul(b, z)).iter().all(Scalar::is_zero), "homology product not well defined");
        }
    }
    let complex = Complex::zero_differential(h.clone());
    let unit = data.class_of(a.unit());
    let algebra = DGAlgebra::from_table(complex, unit, |i, j| to_sparse(&data.class_of(&a.mul(&reps[i], &reps[j]))))
        .expect("homology products respect degrees");
    HomologyAlgebra { data, algebra }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn algebra(field: Field, basis: &[(&str, i32)], unit: &str, products: &[(&str, &str, &str)], diff: &[(&str, &str)]) -> DGAlgebra {
        let space = Arc::new(GradedSpace::new(field, basis.iter().map(|(l, d)| (*l, *d))).unwrap());
        let idx = |l: &str| space.index_of(l).unwrap();
        let d = GradedMap::from_images(space.clone(), space.clone(), 1, |i| {
            diff.iter().filter(|(s, _)| *s == space.label(i)).map(|(_, t)| (idx(t), field.one())).collect()
        })
        .unwrap();
        let mut u = space.zero_vec();
        u[idx(unit)] = field.one();
        DGAlgebra::from_table(Complex::new_unchecked(d), u, |a, b| {
            let (la, lb) = (space.label(a), space.label(b));
            if la == unit {
                return vec![(b, field.one())];
            }
            if lb == unit {
                return vec![(a, field.one())];
            }
            products.iter().filter(|(x, y, _)| *x == la && *y == lb).map(|(_, _, z)| (idx(z), field.one())).collect()
        })
        .unwrap()
    }

    pub fn e2(field: Field) -> DGAlgebra {
        algebra(field, &[("1", 0), ("x", 1)], "1", &[], &[])
    }

    pub fn dn(field: Field) -> DGAlgebra {
        algebra(field, &[("e", 0), ("t", 0)], "e", &[], &[])
    }

    pub fn ct(field: Field) -> DGAlgebra {
        algebra(field, &[("e", 0), ("x", 0), ("y", 1)], "e", &[], &[("x", "y")])
    }

    #[test]
    fn check_dga_examples() {
        let q = Field::Rationals;
        assert!(check_dga(&DGAlgebra::ground(q)).passed());
        assert!(check_dga(&e2(q)).passed());
        assert!(check_dga(&dn(Field::prime(2).unwrap())).passed());
        assert!(check_dga(&ct(q)).passed());
    }

    #[test]
    fn corrupted_products_fail() {
        let q = Field::Rationals;
        // x idempotent with ∂x = y: ∂(x x) = y but ∂x x + x ∂x = 0
        let bad = algebra(q, &[("e", 0), ("x", 0), ("y", 1)], "e", &[("x", "x", "x")], &[("x", "y")]);
        let r = check_dga(&bad);
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name == "leibniz"));

        let space = e2(q).space().clone();
        let err = DGAlgebra::from_table(Complex::zero_differential(space.clone()), space.basis_vec(0), |a, b| {
            if a == 1 && b == 1 { vec![(1, q.one())] } else { vec![] }
        });
        assert!(matches!(err, Err(AlgebraError::ProductDegree { .. })));
    }

    #[test]
    fn opposite_examples() {
        let q = Field::Rationals;
        for a in [DGAlgebra::ground(q), e2(q), dn(q), ct(q)] {
            assert_eq!(opposite(&opposite(&a)), a);
            assert!(check_dga(&opposite(&a)).passed());
        }
        assert_eq!(opposite(&dn(q)), dn(q));
        assert_eq!(opposite(&e2(q)), e2(q));
    }

    #[test]
    fn morphism_examples() {
        let q = Field::Rationals;
        let k = Arc::new(DGAlgebra::ground(q));
        let e = Arc::new(e2(q));
        let id = DGAMorphism::identity(e.clone());
        assert!(check_dga_morphism(&id).passed());
        assert!(is_dga_quasi_iso(&id));
        let inc = GradedMap::from_images(k.space().clone(), e.space().clone(), 0, |_| vec![(0, q.one())]).unwrap();
        let f = DGAMorphism::new(k.clone(), e.clone(), inc).unwrap();
        assert!(check_dga_morphism(&f).passed());
        assert!(!is_dga_quasi_iso(&f));
        let c = Arc::new(ct(q));
        let inc = GradedMap::from_images(k.space().clone(), c.space().clone(), 0, |_| vec![(0, q.one())]).unwrap();
        let f = DGAMorphism::new(k, c, inc).unwrap();
        assert!(check_dga_morphism(&f).passed());
        assert!(is_dga_quasi_iso(&f));
    }

    #[test]
    fn homology_algebra_of_ct_is_k() {
        let h = homology_algebra(&ct(Field::Rationals));
        assert_eq!(h.algebra.dim(), 1);
        assert!(check_dga(&h.algebra).passed());
    }

    #[test]
    fn idempotents() {
        let q = Field::Rationals;
        assert_eq!(dn(q).idempotent_decomposition(), Some(vec![0]));
    }
}
