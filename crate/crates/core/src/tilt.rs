//! Tilting `Λ = [R M; 0 S]` to `Λ̃ = [S Hom_R(V,U); 0 End_R(U)^op]`.
//!
//! `W` is the cone of `[V;0] → C`, `P = Σ[U;0] ⊕ W` and `ℰ = End_Λ(P)`;
//! the comparison `Φ: Λ̃^op → ℰ` is assembled blockwise and checked
//! exhaustively.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{check_dga, check_dga_morphism, homology_algebra, is_dga_quasi_iso, opposite, DGAMorphism, DGAlgebra};
use crate::complexes::{homology, is_exact, is_quasi_iso, ChainMap, Cone, HomologyData};
use crate::linalg::{to_sparse, DirectSum, GradedMap, GradedSpace, SparseVec};
use crate::module::{
    bimodule_cone, check_bimodule, check_module, direct_sum_modules, dualize_bimodule, end_dga, enveloping,
    hom_complex, is_chain_bimodule_map, is_chain_module_map, shift_module, DGBimodule, DGModule, HomComplex,
    ModuleError, Side,
};
use crate::report::{Level, Report};
use crate::resolution::{bimodule_replacement, semifree_resolution, verify_supplied, Caps, ResolutionError};
use crate::scalar::Scalar;
use crate::triangular::{
    build_triangular, build_triangular_labeled, hom_source_left_action, verify_section3, Part, Triangular,
    TriangularError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TiltError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Triangular(#[from] TriangularError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("supplied {0} does not verify")]
    SuppliedInvalid(String),
    #[error("PhiCheckFailed: {0}")]
    PhiCheckFailed(String),
    #[error("RigidityFailed: Ext^{degree}(X,X) is nonzero")]
    RigidityFailed { degree: i32 },
    #[error("ExtNotConcentrated: Ext^{degree}(M,X) is nonzero")]
    ExtNotConcentrated { degree: i32 },
    #[error("not a ring case: {0}")]
    NotRingCase(String),
    #[error("NotSelfDual: {0}")]
    NotSelfDual(String),
}

#[derive(Clone, Debug)]
pub struct TiltProblem {
    pub r: Arc<DGAlgebra>,
    pub s: Arc<DGAlgebra>,
    pub m: DGBimodule,
    /// Defaults to `R`.
    pub x: Option<DGModule>,
    /// A resolution `U → X`.
    pub u: Option<(DGModule, GradedMap)>,
    /// A replacement `V → M`.
    pub v: Option<(DGBimodule, GradedMap)>,
    pub caps: Caps,
}

impl TiltProblem {
    pub fn new(r: Arc<DGAlgebra>, s: Arc<DGAlgebra>, m: DGBimodule) -> TiltProblem {
        TiltProblem { r, s, m, x: None, u: None, v: None, caps: Caps::default() }
    }

    pub fn x(&self) -> DGModule {
        self.x.clone().unwrap_or_else(|| DGModule::left_regular(self.r.clone()))
    }
}

/// Sign conventions that are selectable so the rejected alternatives can be
/// exhibited failing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SAction {
    /// `(s·h)(v) = (−1)^{|s|(|h|+|v|)} h(vs)`
    Koszul,
    /// `(s·h)(v) = (−1)^{|s||h|} h(vs)`
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSigns {
    /// `θ ↦ Ψ(θ)`
    Psi,
    /// `θ ↦ (−1)^{|θ|} Ψ(θ)`
    SignedPsi,
}

#[derive(Clone, Debug)]
pub struct Inputs {
    pub x: DGModule,
    pub u: DGModule,
    pub g: GradedMap,
    pub v: DGBimodule,
    pub f: GradedMap,
    pub certified: bool,
}

fn degree_zero_cycles(h: &HomComplex) -> Vec<GradedMap> {
    let z = h.complex.differential().block(0).kernel();
    let start = h.space().range(0).start;
    z.columns()
        .into_iter()
        .map(|c| {
            let mut v = h.space().zero_vec();
            for (k, x) in c.into_iter().enumerate() {
                v[start + k] = x;
            }
            h.element(0, &v)
        })
        .collect()
}

/// Whether `R` is visibly a direct summand of `X`: some pair of degree-0
/// cycles `R → X → R` composes to an automorphism. Basis pairs are tried
/// first, then seeded random combinations.
pub fn r_is_summand(r: &Arc<DGAlgebra>, x: &DGModule) -> bool {
    let rl = DGModule::left_regular(r.clone());
    if *x == rl {
        return true;
    }
    let (Ok(hi), Ok(hp)) = (hom_complex(&rl, x, "i"), hom_complex(x, &rl, "p")) else { return false };
    let is = degree_zero_cycles(&hi);
    let ps = degree_zero_cycles(&hp);
    if is.iter().any(|i| ps.iter().any(|p| GradedMap::compose(p, i).unwrap().is_bijective())) {
        return true;
    }
    if is.is_empty() || ps.is_empty() {
        return false;
    }
    let field = r.field();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut random = |maps: &[GradedMap]| {
        maps.iter().skip(1).fold(maps[0].scale(&field.from_i64(rng.gen_range(-3..=3))), |acc, m| {
            acc.add(&m.scale(&field.from_i64(rng.gen_range(-3..=3)))).unwrap()
        })
    };
    (0..32).any(|_| {
        let (i, p) = (random(&is), random(&ps));
        GradedMap::compose(&p, &i).unwrap().is_bijective()
    })
}

/// Finds or verifies `U → X` and `V → M`.
pub fn resolve_inputs(p: &TiltProblem, report: &mut Report) -> Result<Inputs, TiltError> {
    let x = p.x();
    let (u, g) = match &p.u {
        Some((u, g)) => {
            let rep = verify_supplied(u, &x, g);
            let ok = rep.passed() && check_module(u).passed();
            report.extend_prefixed("U ", rep);
            if !ok {
                return Err(TiltError::SuppliedInvalid("U".into()));
            }
            (u.clone(), g.clone())
        }
        None => {
            let res = semifree_resolution(&x, p.caps)?;
            report.pass(
                Level::QuasiIso,
                "U -> X",
                format!("semifree resolution, {} generators, stages {:?}", res.resolution.generators.len(), res.stats),
            );
            (res.resolution.module.clone(), res.augmentation.map().clone())
        }
    };
    let (v, f) = match &p.v {
        Some((v, f)) => {
            let ok = check_bimodule(v).passed() && is_chain_bimodule_map(f, v, &p.m) && {
                let cm = ChainMap::new_unchecked(v.complex().clone(), p.m.complex().clone(), f.clone()).unwrap();
                is_quasi_iso(&cm)
            };
            report.check(ok, Level::QuasiIso, "V -> M", "supplied replacement: bimodule chain map, quasi-iso");
            if !ok {
                return Err(TiltError::SuppliedInvalid("V".into()));
            }
            (v.clone(), f.clone())
        }
        None => {
            let ml = p.m.as_left();
            let res = semifree_resolution(&ml, p.caps)?;
            if res.resolution.module == ml {
                report.pass(Level::QuasiIso, "V -> M", "M is semifree over R; V = M");
                (p.m.clone(), GradedMap::identity(p.m.space().clone()))
            } else {
                let (v, f, res) = bimodule_replacement(&p.m, p.caps)?;
                report.pass(
                    Level::QuasiIso,
                    "V -> M",
                    format!("bimodule replacement, {} generators", res.resolution.generators.len()),
                );
                (v, f)
            }
        }
    };
    let certified = r_is_summand(&p.r, &x);
    Ok(Inputs { x, u, g, v, f, certified })
}

#[derive(Clone, Debug)]
pub struct WData {
    pub bimodule: DGBimodule,
    pub module: DGModule,
    pub cone: Cone,
    pub c: DGBimodule,
    pub v_emb: DGBimodule,
    /// `[f; 0]: [V;0] → C`.
    pub f_lambda: GradedMap,
    pub quotient: DGModule,
    pub theta: GradedMap,
}

impl WData {
    /// For each basis vector of `W`: `Ok(i)` for the `C` part, `Err(j)` for
    /// `Σ[V;0]`.
    pub fn origin(&self) -> Vec<Result<usize, usize>> {
        let mut o = vec![Ok(0); self.module.dim()];
        for (i, &k) in self.cone.target_index.iter().enumerate() {
            o[k] = Ok(i);
        }
        for (j, &k) in self.cone.source_index.iter().enumerate() {
            o[k] = Err(j);
        }
        o
    }
}

pub fn build_w(t: &Triangular, v: &DGBimodule, f: &GradedMap) -> Result<WData, TiltError> {
    let v_emb = t.embed_left_bimodule(v, "V")?;
    let c = t.c_bimodule();
    let pm = &t.prefixes[1];
    let mlabels = t.m.space().clone();
    let f_lambda = GradedMap::from_images(v_emb.space().clone(), c.space().clone(), 0, |i| {
        f.image(i)
            .into_iter()
            .map(|(k, x)| (c.space().index_of(&format!("{pm}.{}", mlabels.label(k))).unwrap(), x))
            .collect()
    })
    .map_err(ModuleError::from)?;
    let (cone, bimodule) = bimodule_cone(&f_lambda, &v_emb, &c)?;
    let module = bimodule.as_left();
    let (quotient, proj) = t.quotient_c();
    let mut w = WData { bimodule, module, cone, c, v_emb, f_lambda, quotient, theta: GradedMap::zero(proj.source().clone(), proj.target().clone(), 0) };
    let origin = w.origin();
    w.theta = GradedMap::from_images(w.module.space().clone(), w.quotient.space().clone(), 0, |k| match origin[k] {
        Ok(i) => proj.image(i),
        Err(_) => vec![],
    })
    .map_err(ModuleError::from)?;
    Ok(w)
}

fn first_mismatch(a: &GradedMap, b: &GradedMap) -> Option<usize> {
    (0..a.source().dim()).find(|&i| a.image(i) != b.image(i))
}

/// Block form of `∂^W`, `W ≅ [Z; S]`, exactness of `Z`, and `θ`.
pub fn verify_w_normal_form(t: &Triangular, w: &WData, v: &DGBimodule, f: &GradedMap, m: &DGBimodule) -> Report {
    let mut r = Report::new();
    let field = t.field();
    let space = w.module.space().clone();
    let origin = w.origin();
    let (ti, si) = (&w.cone.target_index, &w.cone.source_index);
    let expected = GradedMap::from_images(space.clone(), space.clone(), 1, |k| match origin[k] {
        Ok(i) => w.c.complex().differential().image(i).into_iter().map(|(t, x)| (ti[t], x)).collect(),
        Err(j) => {
            let mut out: SparseVec = w.f_lambda.image(j).into_iter().map(|(t, x)| (ti[t], x)).collect();
            out.extend(w.v_emb.complex().differential().image(j).into_iter().map(|(t, x)| (si[t], -x)));
            out
        }
    })
    .unwrap();
    match first_mismatch(&expected, w.module.differential()) {
        None => r.pass(Level::Axiom, "d^W block form", format!("[[d^C, f], [0, -d^V]] entrywise on {} basis vectors", space.dim())),
        Some(k) => r.fail(Level::Axiom, "d^W block form", format!("column {} differs", space.label(k))),
    }

    // Z = cone(f) over R and the module [Z; S]
    let z = match crate::module::module_cone(f, &v.as_left(), &m.as_left()) {
        Ok(z) => z,
        Err(e) => {
            r.fail(Level::ModuleIso, "W = [Z;S]", e.to_string());
            return r;
        }
    };
    let zs = z_over_s(t, &z.module, &z.cone.target_index);
    r.extend_prefixed("[Z;S] ", check_module(&zs));
    let pm = format!("{}.", t.prefixes[1]);
    let reshuffle = GradedMap::from_images(space.clone(), zs.space().clone(), 0, |k| {
        let target = match origin[k] {
            Ok(i) => {
                let l = w.c.space().label(i);
                match l.strip_prefix(&pm) {
                    Some(ml) => format!("Z.{}", z.module.space().label(z.cone.target_index[t.m.space().index_of(ml).unwrap()])),
                    None => l.to_string(),
                }
            }
            Err(j) => format!("Z.{}", z.module.space().label(z.cone.source_index[j])),
        };
        vec![(zs.space().index_of(&target).unwrap(), field.one())]
    })
    .unwrap();
    let ok = is_chain_module_map(&reshuffle, &w.module, &zs) && reshuffle.is_bijective();
    r.check(ok, Level::ModuleIso, "W = [Z;S]", "coordinate reshuffle is a chain module isomorphism");
    let zex = is_exact(z.module.complex());
    r.check(zex, Level::Exactness, "Z exact", format!("cone of V -> M, homology dims {:?}", homology(z.module.complex()).dims()));

    let th_ok = is_chain_module_map(&w.theta, &w.module, &w.quotient);
    let qi = th_ok && is_quasi_iso(&ChainMap::new_unchecked(w.module.complex().clone(), w.quotient.complex().clone(), w.theta.clone()).unwrap());
    r.check(th_ok, Level::Axiom, "theta chain module map", "W -> C/[M;0], (m,s,v) -> [0;s]");
    r.check(qi, Level::QuasiIso, "theta quasi-iso", "induced map and cone agree");
    r
}

/// `[Z; S]` with `[r m; 0 s']·[z; s] = [rz + h(ms); s's]`, `h: M → Z`.
fn z_over_s(t: &Triangular, z: &DGModule, h: &[usize]) -> DGModule {
    let field = t.field();
    let mut basis: Vec<(String, i32)> = (0..z.dim()).map(|i| (format!("Z.{}", z.space().label(i)), z.space().degree(i))).collect();
    let ps = &t.prefixes[2];
    basis.extend((0..t.s.dim()).map(|i| (format!("{ps}.{}", t.s.label(i)), t.s.degree(i))));
    let space = Arc::new(GradedSpace::new(field, basis).unwrap());
    let zi: Vec<usize> = (0..z.dim()).map(|i| space.index_of(&format!("Z.{}", z.space().label(i))).unwrap()).collect();
    let sidx: Vec<usize> = (0..t.s.dim()).map(|i| space.index_of(&format!("{ps}.{}", t.s.label(i))).unwrap()).collect();
    let mut origin = vec![Ok(0); space.dim()];
    for (i, &k) in zi.iter().enumerate() {
        origin[k] = Ok(i);
    }
    for (i, &k) in sidx.iter().enumerate() {
        origin[k] = Err(i);
    }
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, |k| match origin[k] {
        Ok(i) => z.differential().image(i).into_iter().map(|(t, x)| (zi[t], x)).collect(),
        Err(i) => t.s.differential().image(i).into_iter().map(|(t, x)| (sidx[t], x)).collect(),
    })
    .unwrap();
    DGModule::from_table(t.lambda.clone(), Side::Left, crate::complexes::Complex::new_unchecked(d), |a, k| {
        match (t.origin[a], origin[k]) {
            ((Part::R, r), Ok(i)) => z.action(r).image(i).into_iter().map(|(t, x)| (zi[t], x)).collect(),
            ((Part::M, mi), Err(si)) => t.m.ract()[si].image(mi).into_iter().map(|(t, x)| (zi[h[t]], x)).collect(),
            ((Part::S, s), Err(i)) => t.s.mul_basis(s, i).into_iter().map(|(t, x)| (sidx[t], x)).collect(),
            _ => vec![],
        }
    })
    .unwrap()
}

/// `P = Σ[U;0] ⊕ W`, returned with `Σ[U;0]` and the sum data.
pub fn build_p(t: &Triangular, u: &DGModule, w: &WData) -> Result<(DGModule, DirectSum, DGModule), TiltError> {
    let us = shift_module(&t.embed_left(u, "U")?, 1);
    let (p, sum) = direct_sum_modules(&[us.clone(), w.module.clone()], |_, l| l.to_string())?;
    Ok((p, sum, us))
}

/// `Hom_R(V, U)` as an `(S, End_R(U)^op)`-bimodule.
pub fn hom_bimodule(
    v: &DGBimodule,
    h: &HomComplex,
    end_op: &Arc<DGAlgebra>,
    end_hom: &HomComplex,
    convention: SAction,
) -> Result<DGBimodule, TiltError> {
    let s = v.right_algebra().clone();
    let field = s.field();
    let lact = (0..s.dim())
        .map(|i| {
            let ds = s.degree(i) as i64;
            h.induced(h, s.degree(i), |f| match convention {
                SAction::Koszul => hom_source_left_action(f, &v.ract()[i]),
                SAction::Plain => GradedMap::compose(f, &v.ract()[i]).unwrap().scale(&field.sign(ds * f.degree() as i64)),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ract = (0..end_op.dim())
        .map(|e| {
            let em = end_hom.map(e);
            let de = em.degree() as i64;
            h.induced(h, em.degree(), |f| GradedMap::compose(em, f).unwrap().scale(&field.sign(de * f.degree() as i64)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DGBimodule::from_actions(s, end_op.clone(), h.complex.clone(), lact, ract)?)
}

pub fn build_tilde(s: &Arc<DGAlgebra>, hb: DGBimodule, end_op: &Arc<DGAlgebra>) -> Result<Triangular, TiltError> {
    Ok(build_triangular_labeled(s.clone(), end_op.clone(), hb, ["S", "H", "E"])?)
}

/// `α(s̃)(w) = (−1)^{|s̃||w|} w·s̃` on `W`.
pub fn alpha_maps(w: &WData) -> Vec<GradedMap> {
    let field = w.module.field();
    w.bimodule
        .ract()
        .iter()
        .map(|op| {
            let d = op.degree() as i64;
            op.scale_by_degree(|n| field.sign(d * n as i64))
        })
        .collect()
}

/// `Ψ(θ)(c, σv) = (−1)^{|θ|} σθ(v)`.
pub fn psi(theta: &GradedMap, w: &WData, us: &DGModule) -> GradedMap {
    let field = theta.field();
    let sign = field.sign(theta.degree() as i64);
    let origin = w.origin();
    GradedMap::from_images(w.module.space().clone(), us.space().clone(), theta.degree(), |k| match origin[k] {
        Ok(_) => vec![],
        Err(j) => theta.image(j).into_iter().map(|(t, x)| (t, &sign * &x)).collect(),
    })
    .expect("Ψ(θ) has the degree of θ")
}

/// Maps a homomorphism of algebras given on basis elements by `image` into
/// coordinates of `target` and checks it.
fn morphism_from(
    source: Arc<DGAlgebra>,
    target: Arc<DGAlgebra>,
    hc: &HomComplex,
    mut image: impl FnMut(usize) -> GradedMap,
) -> Result<DGAMorphism, String> {
    let mut cols = vec![];
    for i in 0..source.dim() {
        match hc.coordinates(&image(i)) {
            Some(c) => cols.push(to_sparse(&c)),
            None => return Err(format!("image of {} is not a module map", source.label(i))),
        }
    }
    let map = GradedMap::from_images(source.space().clone(), target.space().clone(), 0, |i| cols[i].clone())
        .map_err(|e| e.to_string())?;
    DGAMorphism::new(source, target, map).map_err(|e| e.to_string())
}

fn morphism_report(r: &mut Report, name: &str, m: &Result<DGAMorphism, String>, want_bijective: bool) -> bool {
    match m {
        Err(e) => {
            r.fail(Level::Axiom, format!("{name} morphism"), e.clone());
            false
        }
        Ok(m) => {
            let rep = check_dga_morphism(m);
            let ok = rep.passed();
            r.extend_prefixed(&format!("{name} "), rep);
            let qi = is_dga_quasi_iso(m);
            r.check(qi, Level::QuasiIso, format!("{name} quasi-iso"), "induced map and cone agree");
            if want_bijective {
                r.check(m.map.is_bijective(), Level::ModuleIso, format!("{name} bijective"), "isomorphism of DGAs");
            }
            ok && qi
        }
    }
}

/// Everything the pipeline builds.
#[derive(Clone, Debug)]
pub struct TiltResult {
    pub lambda: Triangular,
    pub inputs: Inputs,
    pub w: WData,
    pub p: DGModule,
    pub p_sum: DirectSum,
    pub u_shift: DGModule,
    pub e: Arc<DGAlgebra>,
    pub e_hom: HomComplex,
    /// `Hom_R(V, U)`.
    pub h: HomComplex,
    pub end_u: Arc<DGAlgebra>,
    pub end_u_hom: HomComplex,
    pub tilde: Triangular,
    pub phi: Option<DGAMorphism>,
    pub report: Report,
}

#[derive(Clone, Copy, Debug)]
pub struct Conventions {
    pub s_action: SAction,
    pub phi: PhiSigns,
}

impl Default for Conventions {
    fn default() -> Conventions {
        Conventions { s_action: SAction::Koszul, phi: PhiSigns::Psi }
    }
}

pub fn run_tilt(p: &TiltProblem) -> Result<TiltResult, TiltError> {
    run_tilt_with(p, Conventions::default())
}

pub fn run_tilt_with(p: &TiltProblem, conv: Conventions) -> Result<TiltResult, TiltError> {
    let mut report = Report::new();
    let lambda = build_triangular(p.r.clone(), p.s.clone(), p.m.clone())?;
    let inputs = resolve_inputs(p, &mut report)?;
    if !inputs.certified {
        report.warn(
            Level::Axiom,
            "HypothesisNotCertified",
            "R is not visibly a direct summand of X; <X> = D(R) not certified, Phi verified regardless",
        );
    } else {
        report.pass(Level::Axiom, "generator hypothesis", "R is a direct summand of X");
    }
    let (u, v, f) = (&inputs.u, &inputs.v, &inputs.f);

    let w = build_w(&lambda, v, f)?;
    report.extend(verify_w_normal_form(&lambda, &w, v, f, &lambda.m));
    let (pm, p_sum, us) = build_p(&lambda, u, &w)?;
    report.extend_prefixed("P ", check_module(&pm));

    // ℰ and its blocks
    let (e_alg, e_hom) = end_dga(&pm, "p")?;
    let e = Arc::new(e_alg);
    let blocks = [
        hom_complex(&us, &us, "a")?,
        hom_complex(&w.module, &us, "b")?,
        hom_complex(&us, &w.module, "c")?,
        hom_complex(&w.module, &w.module, "w")?,
    ];
    let mut sum: BTreeMap<i32, usize> = BTreeMap::new();
    for b in &blocks {
        for (n, d) in b.space().dims() {
            *sum.entry(n).or_default() += d;
        }
    }
    let ok = sum == e.space().dims();
    report.check(ok, Level::Axiom, "E block dims", format!("dim E by degree {:?}", e.space().dims()));
    let ll = homology(&blocks[2].complex);
    report.check(
        ll.is_zero(),
        Level::Exactness,
        "Hom(S[U;0], W) exact",
        format!("dim {}, homology dims {:?}", blocks[2].dim(), ll.dims()),
    );

    // corner: End_R(U) ≅ End_Λ(Σ[U;0])
    let (end_u_alg, end_u_hom) = end_dga(u, "e")?;
    let end_u = Arc::new(end_u_alg);
    let (corner_alg, corner_hom) = end_dga(&us, "a")?;
    let corner_alg = Arc::new(corner_alg);
    let u_emb_space = t_embed_space(&lambda, u)?;
    let sigma = |e: &GradedMap| crate::complexes::shift_map(&e.reindex(u_emb_space.clone(), 0, u_emb_space.clone(), e.degree()), 1);
    let corner = morphism_from(end_u.clone(), corner_alg, &corner_hom, |i| sigma(end_u_hom.map(i)));
    morphism_report(&mut report, "corner End(U) -> End(S[U;0])", &corner, true);

    // α
    let alphas = alpha_maps(&w);
    let s_op = Arc::new(opposite(&p.s));
    let (end_w, end_w_hom) = end_dga(&w.module, "w")?;
    let alpha = morphism_from(s_op.clone(), Arc::new(end_w), &end_w_hom, |i| alphas[i].clone());
    morphism_report(&mut report, "alpha", &alpha, false);
    report.extend(beta_check(&w, &alphas, &p.s));

    // Ψ
    let h = hom_complex(&v.as_left(), u, "h")?;
    let psi_ok = match h.induced(&blocks[1], 0, |t| psi(t, &w, &us)) {
        Ok(map) => {
            let cm = ChainMap::new(h.complex.clone(), blocks[1].complex.clone(), map);
            match cm {
                Ok(cm) => {
                    let qi = is_quasi_iso(&cm);
                    report.check(qi, Level::QuasiIso, "Psi quasi-iso", "Hom_R(V,U) -> Hom(W, S[U;0])");
                    qi
                }
                Err(e) => {
                    report.fail(Level::Axiom, "Psi chain map", e.to_string());
                    false
                }
            }
        }
        Err(e) => {
            report.fail(Level::Axiom, "Psi well defined", e.to_string());
            false
        }
    };
    let _ = psi_ok;

    // Λ̃
    let end_op = Arc::new(opposite(&end_u));
    let hb = hom_bimodule(v, &h, &end_op, &end_u_hom, conv.s_action)?;
    report.extend_prefixed("Hom_R(V,U) ", check_bimodule(&hb));
    let tilde = build_tilde(&p.s, hb, &end_op)?;
    report.extend_prefixed("tilde ", check_dga(&tilde.lambda));

    // Φ
    let phi = phi_map(&tilde, &e, &e_hom, &p_sum, &w, &us, &h, &end_u_hom, &alphas, conv.phi);
    let phi = match phi {
        Ok(phi) => {
            let qi = is_dga_quasi_iso(&phi);
            report.pass(Level::Axiom, "Phi morphism", format!("unital, chain, multiplicative on all {} basis pairs", phi.source.dim().pow(2)));
            report.check(qi, Level::QuasiIso, "Phi quasi-iso", "Phi: tilde^op -> E verified as a DGA quasi-isomorphism");
            Some(phi)
        }
        Err(e) => {
            report.fail(Level::Axiom, "Phi morphism", e.to_string());
            None
        }
    };
    Ok(TiltResult {
        lambda,
        inputs,
        w,
        p: pm,
        p_sum,
        u_shift: us,
        e,
        e_hom,
        h,
        end_u,
        end_u_hom,
        tilde,
        phi,
        report,
    })
}

fn t_embed_space(t: &Triangular, u: &DGModule) -> Result<Arc<GradedSpace>, TiltError> {
    Ok(t.embed_left(u, "U")?.space().clone())
}

/// `β = Hom(W, θ) ∘ α` is a bijection `S → Hom_Λ(W, C/[M;0])`.
pub fn beta_check(w: &WData, alphas: &[GradedMap], s: &DGAlgebra) -> Report {
    let mut r = Report::new();
    let hq = match hom_complex(&w.module, &w.quotient, "q") {
        Ok(h) => h,
        Err(e) => {
            r.fail(Level::ModuleIso, "beta bijective", e.to_string());
            return r;
        }
    };
    let mut cols = vec![];
    for a in alphas {
        match hq.coordinates(&GradedMap::compose(&w.theta, a).unwrap()) {
            Some(c) => cols.push(to_sparse(&c)),
            None => {
                r.fail(Level::ModuleIso, "beta bijective", "theta alpha(s) is not a module map");
                return r;
            }
        }
    }
    let map = GradedMap::from_images(s.space().clone(), hq.space().clone(), 0, |i| cols[i].clone()).unwrap();
    let chain = GradedMap::compose(&map, s.differential()).unwrap() == GradedMap::compose(hq.complex.differential(), &map).unwrap();
    r.check(chain && map.is_bijective(), Level::ModuleIso, "beta bijective", "S^op -> Hom(W, C/[M;0]) isomorphism of complexes");
    r
}

#[allow(clippy::too_many_arguments)]
pub fn phi_map(
    tilde: &Triangular,
    e: &Arc<DGAlgebra>,
    e_hom: &HomComplex,
    p_sum: &DirectSum,
    w: &WData,
    us: &DGModule,
    h: &HomComplex,
    end_u_hom: &HomComplex,
    alphas: &[GradedMap],
    signs: PhiSigns,
) -> Result<DGAMorphism, TiltError> {
    let field = e.field();
    let (iu, iw) = (&p_sum.inclusions[0], &p_sum.inclusions[1]);
    let (pu, pw) = (&p_sum.projections[0], &p_sum.projections[1]);
    let place = |i: &GradedMap, f: &GradedMap, p: &GradedMap| GradedMap::compose(i, &GradedMap::compose(f, p).unwrap()).unwrap();
    let op = Arc::new(opposite(&tilde.lambda));
    let corner_space = us.space().clone();
    let m = morphism_from(op, e.clone(), e_hom, |k| match tilde.origin[k] {
        (Part::R, i) => place(iw, &alphas[i], pw),
        (Part::M, i) => {
            let th = h.map(i);
            let mut q = psi(th, w, us);
            if signs == PhiSigns::SignedPsi {
                q = q.scale(&field.sign(th.degree() as i64));
            }
            place(iu, &q, pw)
        }
        (Part::S, i) => {
            let em = end_u_hom.map(i);
            let emb = em.reindex(unshift(&corner_space), 0, unshift(&corner_space), em.degree());
            place(iu, &crate::complexes::shift_map(&emb, 1), pu)
        }
    })
    .map_err(TiltError::PhiCheckFailed)?;
    let rep = check_dga_morphism(&m);
    if let Some(c) = rep.failures().next() {
        return Err(TiltError::PhiCheckFailed(format!("{}: {}", c.name, c.witness)));
    }
    Ok(m)
}

/// The space whose `Σ` is `space` (labels `s(x)` unwrapped).
fn unshift(space: &Arc<GradedSpace>) -> Arc<GradedSpace> {
    Arc::new(space.regrade(1, |l| l.strip_prefix("s(").and_then(|x| x.strip_suffix(')')).unwrap_or(l).to_string()))
}

/// Full verification report for a problem: the triangular suite on `Λ` and
/// the tilt pipeline.
pub fn verify_problem(p: &TiltProblem) -> Result<(Report, TiltResult), TiltError> {
    let mut r = Report::new();
    let t = build_triangular(p.r.clone(), p.s.clone(), p.m.clone())?;
    let x = p.x();
    let emb = t.embed_left(&x, "X")?;
    r.extend(verify_section3(&t, &[emb]));
    let res = run_tilt(p)?;
    r.extend(res.report.clone());
    Ok((r, res))
}

fn concentrated_in_zero(h: &HomologyData) -> Option<i32> {
    h.dims().into_iter().find(|&(n, d)| n != 0 && d > 0).map(|(n, _)| n)
}

fn is_ring(a: &DGAlgebra) -> bool {
    a.space().support().iter().all(|&n| n == 0) && a.differential().is_zero()
}

/// `θ ↦ (y ↦ g θ(v))` with `f(v) = y`, turning a degree-0 map `V → U` into
/// `M → X` in the ring case.
fn descend(theta: &GradedMap, f: &GradedMap, g: &GradedMap) -> GradedMap {
    let fd = f.to_dense();
    GradedMap::from_images(f.target().clone(), g.target().clone(), 0, |j| {
        let e = f.target().basis_vec(j);
        let v = fd.solve(&e).expect("V -> M is onto in degree 0");
        to_sparse(&g.apply(&theta.apply(&v)))
    })
    .unwrap()
}

/// Ring-case collapse: `H(Λ̃)` is concentrated in degree 0 and `H^0(Λ̃)` is
/// the matrix ring `[S Hom_R(M,X); 0 End_R(X)^op]`.
pub fn ladkani_specialize(p: &TiltProblem, res: &TiltResult) -> Result<Report, TiltError> {
    let mut r = Report::new();
    let x = &res.inputs.x;
    for (name, ok) in [
        ("R", is_ring(&p.r)),
        ("S", is_ring(&p.s)),
        ("M", p.m.space().support().iter().all(|&n| n == 0) && p.m.complex().differential().is_zero()),
        ("X", x.space().support().iter().all(|&n| n == 0) && x.differential().is_zero()),
    ] {
        if !ok {
            return Err(TiltError::NotRingCase(format!("{name} is not concentrated in degree 0 with zero differential")));
        }
    }
    if let Some(n) = concentrated_in_zero(&homology(res.end_u.complex())) {
        return Err(TiltError::RigidityFailed { degree: n });
    }
    r.pass(Level::Exactness, "X rigid", "H Hom_R(U,U) concentrated in degree 0");
    if let Some(n) = concentrated_in_zero(&homology(&res.h.complex)) {
        return Err(TiltError::ExtNotConcentrated { degree: n });
    }
    r.pass(Level::Exactness, "Ext(M,X) concentrated", "H Hom_R(V,U) concentrated in degree 0");

    let ha = homology_algebra(&res.tilde.lambda);
    let bad = concentrated_in_zero(&ha.data);
    r.check(bad.is_none(), Level::QuasiIso, "H(tilde) in degree 0", format!("homology dims {:?}", ha.data.dims()));

    // the matrix ring built directly
    let hmx = hom_complex(&p.m.as_left(), x, "h")?;
    let (endx, endx_hom) = end_dga(x, "e")?;
    let endx_op = Arc::new(opposite(&endx));
    let hb = hom_bimodule(&p.m, &hmx, &endx_op, &endx_hom, SAction::Koszul)?;
    let direct = build_tilde(&p.s, hb, &endx_op)?;
    r.extend_prefixed("direct ring ", check_dga(&direct.lambda));

    let (f, g) = (&res.inputs.f, &res.inputs.g);
    let t = &res.tilde;
    let h0 = Arc::new(ha.algebra.clone());
    let mut cols = vec![];
    for i in 0..h0.dim() {
        let rep = ha.data.representative(t.lambda.space(), i);
        let mut out = direct.lambda.space().zero_vec();
        let mut hcoords = res.h.space().zero_vec();
        let mut ecoords = res.end_u_hom.space().zero_vec();
        for (k, x) in to_sparse(&rep) {
            match t.origin[k] {
                (Part::R, j) => out[direct.r_index[j]] += &x,
                (Part::M, j) => hcoords[j] += &x,
                (Part::S, j) => ecoords[j] += &x,
            }
        }
        let th = descend(&res.h.element(0, &hcoords), f, g);
        let hc = hmx.coordinates(&th).ok_or(ModuleError::NotInHom)?;
        for (j, x) in to_sparse(&hc) {
            out[direct.m_index[j]] += &x;
        }
        let ex = descend(&res.end_u_hom.element(0, &ecoords), g, g);
        let ec = endx_hom.coordinates(&ex).ok_or(ModuleError::NotInHom)?;
        for (j, x) in to_sparse(&ec) {
            out[direct.s_index[j]] += &x;
        }
        cols.push(to_sparse(&out));
    }
    let map = GradedMap::from_images(h0.space().clone(), direct.lambda.space().clone(), 0, |i| cols[i].clone())
        .map_err(ModuleError::from)?;
    let m = DGAMorphism::new(h0, direct.lambda.clone(), map).map_err(|e| TiltError::NotRingCase(e.to_string()))?;
    let rep = check_dga_morphism(&m);
    let ok = rep.passed() && m.map.is_bijective();
    r.extend_prefixed("H0(tilde) -> ring ", rep);
    r.check(ok, Level::ModuleIso, "H0(tilde) = [S Hom(M,X); 0 End(X)^op]", format!("explicit ring isomorphism, dim {}", m.source.dim()));
    Ok(r)
}

/// A bimodule isomorphism `R → DR`, searched among degree-0 cycles of
/// `Hom_{R⊗R^op}(R, DR)`: basis vectors first, then seeded random
/// combinations.
pub fn find_self_duality(r: &Arc<DGAlgebra>) -> Result<(GradedMap, DGBimodule), TiltError> {
    let reg = DGBimodule::regular(r.clone());
    let dr = dualize_bimodule(&reg);
    if reg.space().dims() != dr.space().dims() {
        let n = reg
            .space()
            .support()
            .into_iter()
            .chain(dr.space().support())
            .find(|&n| reg.space().dim_in(n) != dr.space().dim_in(n))
            .unwrap();
        return Err(TiltError::NotSelfDual(format!("dim R and dim DR differ in degree {n}")));
    }
    let env = enveloping(r.clone(), r.clone())?;
    let hc = hom_complex(&env.to_left(&reg)?, &env.to_left(&dr)?, "i")?;
    let cycles = degree_zero_cycles(&hc);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let field = r.field();
    let mut candidates = cycles.clone();
    for _ in 0..16 {
        if cycles.is_empty() {
            break;
        }
        let mut acc = GradedMap::zero(reg.space().clone(), dr.space().clone(), 0);
        for c in &cycles {
            acc = acc.add(&c.scale(&field.from_i64(rng.gen_range(-3..=3)))).unwrap();
        }
        candidates.push(acc);
    }
    candidates
        .into_iter()
        .find(|c| c.is_bijective())
        .map(|c| (c, dr))
        .ok_or_else(|| TiltError::NotSelfDual("no bimodule isomorphism R -> DR among degree-0 cycles".into()))
}

/// `d(f): DM → DV`, `φ ↦ φ ∘ f`.
fn dual_map(f: &GradedMap, dm: &GradedSpace, dv: &Arc<GradedSpace>) -> GradedMap {
    let (v, m) = (f.source(), f.target());
    GradedMap::from_images(Arc::new(dm.clone()), dv.clone(), 0, |k| {
        let mi = m.index_of(&dm.label(k)[2..dm.label(k).len() - 1]).unwrap();
        (0..v.dim())
            .filter_map(|x| {
                let c = f.entry(mi, x);
                (!c.is_zero()).then(|| (dv.index_of(&format!("d({})", v.label(x))).unwrap(), c))
            })
            .collect()
    })
    .unwrap()
}

/// `Hom_R(V,R) ≅ Hom_R(V,DR) ≅ DV`, `[S DM; 0 R] → [S DV; 0 R]`, and
/// `Λ̃ ≅ [S DV; 0 R]`.
pub fn self_dual_corollary(p: &TiltProblem) -> Result<Report, TiltError> {
    let mut r = Report::new();
    if p.x.is_some() {
        return Err(TiltError::NotSelfDual("the corollary needs X = R".into()));
    }
    let (iota, dr) = find_self_duality(&p.r)?;
    let reg = DGBimodule::regular(p.r.clone());
    r.check(is_chain_bimodule_map(&iota, &reg, &dr), Level::ModuleIso, "R = DR", "bimodule isomorphism among degree-0 cycles");
    let res = run_tilt(p)?;
    r.extend_prefixed("tilt ", res.report.clone());
    let v = &res.inputs.v;
    let field = p.r.field();

    // Hom_R(V,R) → Hom_R(V,DR)
    let vl = v.as_left();
    let h2 = hom_complex(&vl, &dr.as_left(), "k")?;
    let c1 = res.h.induced(&h2, 0, |f| GradedMap::compose(&iota, f).unwrap())?;
    let ok1 = ChainMap::new(res.h.complex.clone(), h2.complex.clone(), c1.clone()).is_ok() && c1.is_bijective();
    r.check(ok1, Level::ModuleIso, "Hom(V,R) = Hom(V,DR)", "post-composition with R -> DR");

    // Hom_R(V,DR) → DV, φ ↦ (x ↦ φ(x)(1))
    let dv = dualize_bimodule(v);
    let unit = to_sparse(p.r.unit());
    let dspace = dr.space().clone();
    let c2 = GradedMap::from_images(h2.space().clone(), dv.space().clone(), 0, |k| {
        let phi = h2.map(k);
        let mut out: SparseVec = vec![];
        for x in 0..v.space().dim() {
            let mut val = field.zero();
            for (t, c) in phi.image(x) {
                let lbl = dspace.label(t);
                let rl = &lbl[2..lbl.len() - 1];
                let ri = p.r.space().index_of(rl).unwrap();
                for (ui, uc) in &unit {
                    if *ui == ri {
                        val += &(&c * uc);
                    }
                }
            }
            if !val.is_zero() {
                out.push((dv.space().index_of(&format!("d({})", v.space().label(x))).unwrap(), val));
            }
        }
        out
    })
    .map_err(ModuleError::from)?;
    let ok2 = ChainMap::new(h2.complex.clone(), dv.complex().clone(), c2.clone()).is_ok() && c2.is_bijective();
    r.check(ok2, Level::ModuleIso, "Hom(V,DR) = DV", "evaluation at the unit");

    // Λ̃ → [S DV; 0 R]
    let t2 = build_triangular_labeled(p.s.clone(), p.r.clone(), dv.clone(), ["S", "H", "E"])?;
    let comp = GradedMap::compose(&c2, &c1).unwrap();
    let t = &res.tilde;
    let u_unit = res.inputs.u.space().clone();
    let g = &res.inputs.g;
    let map = GradedMap::from_images(t.lambda.space().clone(), t2.lambda.space().clone(), 0, |k| match t.origin[k] {
        (Part::R, j) => vec![(t2.r_index[j], field.one())],
        (Part::M, j) => comp.image(j).into_iter().map(|(i, x)| (t2.m_index[i], x)).collect(),
        (Part::S, j) => {
            // e ↦ g(e(g⁻¹(1)))
            let e = res.end_u_hom.map(j);
            let gd = g.to_dense();
            let one = gd.solve(p.r.unit()).expect("U -> R onto");
            let _ = &u_unit;
            to_sparse(&g.apply(&e.apply(&one))).into_iter().map(|(i, x)| (t2.s_index[i], x)).collect()
        }
    })
    .map_err(ModuleError::from)?;
    let m = DGAMorphism::new(t.lambda.clone(), t2.lambda.clone(), map).map_err(|e| TiltError::NotSelfDual(e.to_string()))?;
    let rep = check_dga_morphism(&m);
    let ok = rep.passed() && m.map.is_bijective();
    r.extend_prefixed("tilde -> [S DV; 0 R] ", rep);
    r.check(ok, Level::ModuleIso, "tilde = [S DV; 0 R]", "isomorphism of DGAs");

    // [S DM; 0 R] → [S DV; 0 R]
    let dm = dualize_bimodule(&p.m);
    let t1 = build_triangular_labeled(p.s.clone(), p.r.clone(), dm.clone(), ["S", "H", "E"])?;
    let df = dual_map(&res.inputs.f, dm.space(), dv.space());
    let ok_df = is_chain_bimodule_map(&df, &dm, &dv);
    r.check(ok_df, Level::Axiom, "D(f) bimodule map", "DM -> DV");
    let map = GradedMap::from_images(t1.lambda.space().clone(), t2.lambda.space().clone(), 0, |k| match t1.origin[k] {
        (Part::R, j) => vec![(t2.r_index[j], field.one())],
        (Part::M, j) => df.image(j).into_iter().map(|(i, x)| (t2.m_index[i], x)).collect(),
        (Part::S, j) => vec![(t2.s_index[j], field.one())],
    })
    .map_err(ModuleError::from)?;
    let m = DGAMorphism::new(t1.lambda.clone(), t2.lambda.clone(), map).map_err(|e| TiltError::NotSelfDual(e.to_string()))?;
    let rep = check_dga_morphism(&m);
    r.extend_prefixed("[S DM; 0 R] -> [S DV; 0 R] ", rep);
    r.check(is_dga_quasi_iso(&m), Level::QuasiIso, "[S DM; 0 R] ~ tilde", "quasi-isomorphism of triangular DGAs");
    Ok(r)
}

/// Structure constants of `Λ̃` keyed by labels, for determinism checks.
pub fn structure_constants(a: &DGAlgebra) -> Vec<(String, String, Vec<(String, Scalar)>)> {
    let mut out = vec![];
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let p = a.mul_basis(i, j);
            if !p.is_empty() {
                out.push((a.label(i).to_string(), a.label(j).to_string(), p.into_iter().map(|(k, x)| (a.label(k).to_string(), x)).collect()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{algebra, dn, e2};
    use crate::scalar::Field;

    fn k_problem(field: Field) -> TiltProblem {
        let k = Arc::new(DGAlgebra::ground(field));
        TiltProblem::new(k.clone(), k.clone(), DGBimodule::regular(k))
    }

    fn assert_green(r: &Report) {
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn a2_end_to_end() {
        for field in [Field::Rationals, Field::prime(2).unwrap()] {
            let p = k_problem(field);
            let res = run_tilt(&p).unwrap();
            assert_green(&res.report);
            assert_eq!(res.w.module.dim(), 3);
            assert_eq!(homology(res.w.module.complex()).homology.dim(), 1);
            assert_eq!(res.p.dim(), 4);
            assert_eq!(res.e.space().dim_in(0), 5);
            assert_eq!(res.tilde.lambda.dim(), 3);
            assert!(res.phi.is_some());
            let lad = ladkani_specialize(&p, &res).unwrap();
            assert_green(&lad);
        }
    }

    fn odd_problem(field: Field) -> TiltProblem {
        // R = k, S = E2, M = Σ E2 as a (k, E2)-bimodule
        let k = Arc::new(DGAlgebra::ground(field));
        let e = Arc::new(e2(field));
        let reg = DGBimodule::regular(e.clone());
        let m = DGBimodule::from_actions(k.clone(), e.clone(), reg.complex().clone(), vec![GradedMap::identity(reg.space().clone())], reg.ract().to_vec()).unwrap();
        let m = crate::module::shift_bimodule(&m, 1);
        TiltProblem::new(k, e, m)
    }

    #[test]
    fn odd_fixture_all_signs() {
        let p = odd_problem(Field::Rationals);
        let res = run_tilt(&p).unwrap();
        assert_green(&res.report);
    }

    #[test]
    fn rejected_conventions_fail() {
        // S = k[x]/x^3 with |x| = 1, so x*x != 0 exposes the S-action sign
        let q = Field::Rationals;
        let k = Arc::new(DGAlgebra::ground(q));
        let s = Arc::new(algebra(q, &[("1", 0), ("x", 1), ("xx", 2)], "1", &[("x", "x", "xx")], &[]));
        let reg = DGBimodule::regular(s.clone());
        let m = DGBimodule::from_actions(k.clone(), s.clone(), reg.complex().clone(), vec![GradedMap::identity(reg.space().clone())], reg.ract().to_vec()).unwrap();
        let p = TiltProblem::new(k, s, m);
        let good = run_tilt(&p).unwrap();
        assert_green(&good.report);
        let plain = run_tilt_with(&p, Conventions { s_action: SAction::Plain, phi: PhiSigns::Psi });
        assert!(plain.map(|r| !r.report.passed()).unwrap_or(true));
        let signed = run_tilt_with(&p, Conventions { s_action: SAction::Koszul, phi: PhiSigns::SignedPsi }).unwrap();
        assert!(!signed.report.passed());
        assert!(signed.phi.is_none());
    }

    #[test]
    fn dn_free_bimodule() {
        let q = Field::Rationals;
        let d = Arc::new(dn(q));
        let k = Arc::new(DGAlgebra::ground(q));
        let reg = DGBimodule::regular(d.clone());
        let m = DGBimodule::from_actions(d.clone(), k.clone(), reg.complex().clone(), reg.lact().to_vec(), vec![GradedMap::identity(reg.space().clone())]).unwrap();
        let p = TiltProblem::new(d, k, m);
        let res = run_tilt(&p).unwrap();
        assert_green(&res.report);
        assert_eq!(res.inputs.v.space().dim(), 2);
        let sd = self_dual_corollary(&p).unwrap();
        assert_green(&sd);
    }

    #[test]
    fn e2_not_self_dual() {
        let q = Field::Rationals;
        let e = Arc::new(e2(q));
        let p = TiltProblem::new(e.clone(), e.clone(), DGBimodule::regular(e));
        assert!(matches!(self_dual_corollary(&p), Err(TiltError::NotSelfDual(_))));
    }

    #[test]
    fn exact_m() {
        // M = cone(id_k), exact
        let q = Field::Rationals;
        let k = Arc::new(DGAlgebra::ground(q));
        let kk = DGBimodule::regular(k.clone());
        let (_, m) = crate::module::bimodule_cone(&GradedMap::identity(kk.space().clone()), &kk, &kk).unwrap();
        let p = TiltProblem::new(k.clone(), k, m);
        let res = run_tilt(&p).unwrap();
        assert_green(&res.report);
        assert!(homology(&res.h.complex).is_zero());
    }

    #[test]
    fn non_quasi_iso_replacement_detected() {
        let p = k_problem(Field::Rationals);
        let t = build_triangular(p.r.clone(), p.s.clone(), p.m.clone()).unwrap();
        let zero = GradedMap::zero(p.m.space().clone(), p.m.space().clone(), 0);
        let w = build_w(&t, &p.m, &zero).unwrap();
        let r = verify_w_normal_form(&t, &w, &p.m, &zero, &p.m);
        let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["Z exact", "theta quasi-iso"]);
        let (_, _, us) = build_p(&t, &p.x(), &w).unwrap();
        let ll = hom_complex(&us, &w.module, "c").unwrap();
        assert!(!homology(&ll.complex).is_zero());
    }

    #[test]
    fn x_is_r_plus_r() {
        let q = Field::Rationals;
        let mut p = k_problem(q);
        let k = p.r.clone();
        let x = direct_sum_modules(&[DGModule::left_regular(k.clone()), DGModule::left_regular(k)], |i, l| format!("{i}.{l}")).unwrap().0;
        p.x = Some(x);
        let res = run_tilt(&p).unwrap();
        assert_green(&res.report);
        assert!(res.report.warnings().next().is_none());
        assert_eq!(res.end_u.dim(), 4);
        assert_green(&ladkani_specialize(&p, &res).unwrap());
    }

    #[test]
    fn a2_path_algebra_as_r() {
        let q = Field::Rationals;
        let lam = crate::triangular::tests::a2(q).lambda;
        let k = Arc::new(DGAlgebra::ground(q));
        let reg = DGBimodule::regular(lam.clone());
        let m = DGBimodule::from_actions(lam.clone(), k.clone(), reg.complex().clone(), reg.lact().to_vec(), vec![GradedMap::identity(reg.space().clone())]).unwrap();
        let mut p = TiltProblem::new(lam.clone(), k, m);
        let res = run_tilt(&p).unwrap();
        assert_green(&res.report);
        // X = projective Λe_R: not a generator
        let t = crate::triangular::tests::a2(q);
        p.x = Some(t.build_b());
        let res = run_tilt(&p).unwrap();
        assert!(res.report.passed());
        assert_eq!(res.report.warnings().count(), 1);
    }

    #[test]
    fn rigidity_failure_detected() {
        // X = P_R ⊕ S_S over A2 has Ext^1(S_S, P_R) = k
        let q = Field::Rationals;
        let t = crate::triangular::tests::a2(q);
        let lam = t.lambda.clone();
        let k = Arc::new(DGAlgebra::ground(q));
        let reg = DGBimodule::regular(lam.clone());
        let m = DGBimodule::from_actions(lam.clone(), k.clone(), reg.complex().clone(), reg.lact().to_vec(), vec![GradedMap::identity(reg.space().clone())]).unwrap();
        let mut p = TiltProblem::new(lam, k, m);
        let x = direct_sum_modules(&[t.build_b(), t.quotient_c().0], |i, l| format!("{i}.{l}")).unwrap().0;
        p.x = Some(x);
        let res = run_tilt(&p).unwrap();
        assert!(res.report.passed(), "{}", res.report);
        assert_eq!(ladkani_specialize(&p, &res), Err(TiltError::RigidityFailed { degree: 1 }));
    }
}
