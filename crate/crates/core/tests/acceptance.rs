//! The eight acceptance criteria, one PASS/FAIL line each.

mod common;

use std::path::Path;
use std::time::Instant;

use common::{fixture, fixtures_with};
use dgtilt::algebra::check_dga;
use dgtilt::format::{load_file, parse_str, serialize, Document, FormatError};
use dgtilt::module::{check_module, Side};
use dgtilt::report::Report;
use dgtilt::resolution::{semifree_resolution, verify_supplied, Caps, ResolutionError};
use dgtilt::tilt::{ladkani_specialize, run_tilt, self_dual_corollary, TiltError, TiltProblem};
use dgtilt::triangular::{build_triangular, verify_section3};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn first_failure(r: &Report) -> String {
    r.failures().next().map(|c| c.to_string()).unwrap_or_default()
}

fn load(p: &Path) -> Result<Document, String> {
    load_file(p).map_err(|e| e.to_string())
}

fn problem(name: &str) -> Result<TiltProblem, String> {
    let doc = load(&fixture(name))?;
    let entry = doc.problems.values().next().ok_or(format!("{name}: no problem"))?;
    Ok(entry.problem.clone())
}

fn problems() -> Vec<(String, TiltProblem)> {
    fixtures_with("problem")
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().to_string();
            let prob = problem(&name).unwrap();
            (name, prob)
        })
        .collect()
}

fn clean_dga() -> Vec<std::path::PathBuf> {
    fixtures_with("dga").into_iter().filter(|p| !p.to_string_lossy().contains("corrupt")).collect()
}

fn axiom_suite() -> Outcome {
    let files = clean_dga();
    let mut algebras = 0;
    let mut modules = 0;
    for p in &files {
        let doc = load(p)?;
        for (n, a) in &doc.algebras {
            ensure(check_dga(a).passed(), format!("{n} fails check_dga"))?;
            algebras += 1;
        }
        for (n, m) in &doc.modules {
            ensure(check_module(&m.module).passed(), format!("{n} fails check_module"))?;
            modules += 1;
        }
    }
    for base in ["k", "e2", "dn", "ct", "a2", "m2"] {
        for suffix in ["", "-f2"] {
            ensure(files.contains(&fixture(&format!("{base}{suffix}.dga"))), format!("missing fixture {base}{suffix}"))?;
        }
    }
    ensure(algebras >= 8, format!("only {algebras} algebra fixtures"))?;
    let expected = [
        ("ct-corrupt.dga", "leibniz"),
        ("dn-corrupt.dga", "associativity"),
        ("e2-corrupt.dga", "unit"),
        ("a2-corrupt-module.dga", "unit action"),
    ];
    for (f, witness) in expected {
        match load_file(&fixture(f)) {
            Err(FormatError::Semantic { witness: w, .. }) if w.starts_with(witness) => {}
            other => return Err(format!("{f}: expected a `{witness}` witness, got {other:?}")),
        }
    }
    Ok(format!("{algebras} algebras and {modules} modules pass; 4 corrupted variants fail with the right witness"))
}

fn recollement_suite() -> Outcome {
    let mut n = 0;
    for (name, p) in problems() {
        let t = build_triangular(p.r.clone(), p.s.clone(), p.m.clone()).map_err(|e| e.to_string())?;
        let x = t.embed_left(&p.x(), "X").map_err(|e| e.to_string())?;
        let r = verify_section3(&t, &[x]);
        ensure(r.passed(), format!("{name}: {}", first_failure(&r)))?;
        n += 1;
    }
    Ok(format!("{n} triangular fixtures"))
}

const TILT_CHECKS: [&str; 11] = [
    "d^W block form",
    "W = [Z;S]",
    "Z exact",
    "theta quasi-iso",
    "Hom(S[U;0], W) exact",
    "alpha quasi-iso",
    "beta bijective",
    "Psi quasi-iso",
    "E block dims",
    "Phi morphism",
    "Phi quasi-iso",
];

fn tilt_suite() -> Outcome {
    let mut n = 0;
    let mut odd = 0;
    for (name, p) in problems() {
        if name == "e2-nonperfect.problem" {
            continue;
        }
        let res = run_tilt(&p).map_err(|e| format!("{name}: {e}"))?;
        ensure(res.report.passed(), format!("{name}: {}", first_failure(&res.report)))?;
        for check in TILT_CHECKS {
            ensure(
                res.report.checks.iter().any(|c| c.name == check && c.status == dgtilt::report::Status::Pass),
                format!("{name}: no passing `{check}`"),
            )?;
        }
        ensure(res.phi.is_some(), format!("{name}: no Phi"))?;
        if res.tilde.lambda.space().degrees().iter().any(|d| d % 2 != 0) {
            odd += 1;
        }
        n += 1;
    }
    ensure(odd >= 2, "fewer than two fixtures with odd-degree elements in the tilt")?;
    Ok(format!("{n} tilt fixtures, {odd} with odd-degree basis pairs"))
}

fn ring_case() -> Outcome {
    for name in ["a2.problem", "a2-f2.problem", "rr.problem", "a2e1.problem", "supplied.problem"] {
        let p = problem(name)?;
        let res = run_tilt(&p).map_err(|e| format!("{name}: {e}"))?;
        let r = ladkani_specialize(&p, &res).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.passed(), format!("{name}: {}", first_failure(&r)))?;
    }
    let flagged = run_tilt(&problem("a2e1.problem")?).map_err(|e| e.to_string())?;
    ensure(flagged.report.warnings().any(|c| c.name == "HypothesisNotCertified"), "a2e1 not flagged")?;
    let unflagged = run_tilt(&problem("rr.problem")?).map_err(|e| e.to_string())?;
    ensure(unflagged.report.warnings().next().is_none(), "R + R wrongly flagged")?;
    for (name, want) in [
        ("rigid-fail.problem", TiltError::RigidityFailed { degree: 1 }),
        ("ext-fail.problem", TiltError::ExtNotConcentrated { degree: 1 }),
    ] {
        let p = problem(name)?;
        let res = run_tilt(&p).map_err(|e| e.to_string())?;
        let got = ladkani_specialize(&p, &res);
        ensure(got.as_ref().err() == Some(&want), format!("{name}: expected {want}, got {got:?}"))?;
    }
    let p = problem("odd.problem")?;
    let res = run_tilt(&p).map_err(|e| e.to_string())?;
    ensure(matches!(ladkani_specialize(&p, &res), Err(TiltError::NotRingCase(_))), "odd fixture accepted as a ring case")?;
    Ok("5 ring-case fixtures collapse; RigidityFailed, ExtNotConcentrated, NotRingCase diagnosed".into())
}

fn self_dual() -> Outcome {
    let r = self_dual_corollary(&problem("dn.problem")?).map_err(|e| e.to_string())?;
    ensure(r.passed(), format!("dn: {}", first_failure(&r)))?;
    for check in ["R = DR", "Hom(V,R) = Hom(V,DR)", "Hom(V,DR) = DV", "tilde = [S DV; 0 R]", "[S DM; 0 R] ~ tilde"] {
        ensure(r.checks.iter().any(|c| c.name == check), format!("dn: missing `{check}`"))?;
    }
    match self_dual_corollary(&problem("e2.problem")?) {
        Err(TiltError::NotSelfDual(_)) => {}
        other => return Err(format!("e2: expected NotSelfDual, got {other:?}")),
    }
    Ok("DN passes the full chain; E2 reports NotSelfDual".into())
}

fn resolution_oracle() -> Outcome {
    let a2 = load(&fixture("a2.dga"))?;
    let s2 = &a2.modules["S2"].module;
    let res = semifree_resolution(s2, Caps::default()).map_err(|e| e.to_string())?;
    let degrees: Vec<i32> = res.resolution.generators.iter().map(|g| g.degree).collect();
    ensure(degrees == vec![0, -1], format!("A2 simple S2: generator degrees {degrees:?}"))?;
    let p1 = &a2.modules["P1"].module;
    let res = semifree_resolution(p1, Caps::default()).map_err(|e| e.to_string())?;
    ensure(res.resolution.generators.len() == 1, "P1 is projective but needed more than one generator")?;
    let e2 = load(&fixture("e2.dga"))?;
    match semifree_resolution(&e2.modules["kE"].module, Caps::default()) {
        Err(ResolutionError::BudgetExceeded { .. }) => {}
        other => return Err(format!("k over E2: expected budget exceeded, got {:?}", other.map(|r| r.stats))),
    }
    let mut verified = 0;
    let mut candidates = vec![];
    for p in clean_dga() {
        candidates.extend(load(&p)?.modules.into_values().map(|m| m.module));
    }
    for (_, p) in problems() {
        candidates.push(p.m.as_left());
        candidates.push(p.x());
    }
    for m in candidates.iter().filter(|m| m.side() == Side::Left) {
        if let Ok(res) = semifree_resolution(m, Caps::default()) {
            let r = verify_supplied(&res.resolution.module, m, res.augmentation.map());
            ensure(r.passed() && check_module(&res.resolution.module).passed(), "an augmentation does not re-verify")?;
            verified += 1;
        }
    }
    Ok(format!("S2 resolved by generators in degrees [0, -1]; k over E2 over budget; {verified} augmentations re-verified"))
}

fn brute_force() -> Outcome {
    let mut rng = common::rng(20_261_018);
    let mut nontrivial = 0;
    let total = 250;
    for k in 0..total {
        let b = common::random_bit_complex(&mut rng);
        let c = common::to_complex(&b);
        let lib = common::library_dims(&c, b.dims.len());
        let oracle = common::brute_force(&b);
        ensure(lib == oracle, format!("complex {k}: library {lib:?} vs enumeration {oracle:?}"))?;
        if b.d.iter().flatten().flatten().any(|&x| x == 1) {
            nontrivial += 1;
        }
    }
    ensure(nontrivial >= 100, format!("only {nontrivial} complexes with nonzero differential"))?;
    Ok(format!("{total} random complexes over F2 ({nontrivial} with nonzero differential) agree with enumeration"))
}

fn determinism() -> Outcome {
    let mut files = 0;
    for p in clean_dga().into_iter().chain(fixtures_with("problem")) {
        let doc = load(&p)?;
        let text = serialize(&doc);
        let back = parse_str(&text, "round-trip", p.parent()).map_err(|e| format!("{}: {e}", p.display()))?;
        ensure(back == doc, format!("{}: parse(serialize(x)) != x", p.display()))?;
        ensure(serialize(&back) == text, format!("{}: serialization not stable", p.display()))?;
        files += 1;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (name, _) in problems() {
        if name == "e2-nonperfect.problem" {
            continue;
        }
        let mut outputs = vec![];
        for k in 0..2 {
            let out = dir.path().join(format!("{name}.{k}.dga"));
            let rep = dir.path().join(format!("{name}.{k}.report"));
            let argv = ["dgtilt", "tilt", &fixture(&name).display().to_string(), "--out", out.to_str().unwrap(), "--report", rep.to_str().unwrap()];
            let code = dgtilt::cli::run(argv, &mut std::io::sink(), &mut std::io::sink());
            ensure(code == 0, format!("{name}: tilt exit {code}"))?;
            outputs.push((std::fs::read(&out).unwrap(), std::fs::read(&rep).unwrap()));
            let code = dgtilt::cli::run(["dgtilt", "check", out.to_str().unwrap()], &mut std::io::sink(), &mut std::io::sink());
            ensure(code == 0, format!("{name}: tilt output does not re-validate"))?;
        }
        ensure(outputs[0] == outputs[1], format!("{name}: outputs differ between runs"))?;
        runs += 1;
    }
    Ok(format!("{files} fixture files round-trip; {runs} tilts byte-identical across runs and re-ingest"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 axiom suite", axiom_suite),
        ("2 recollement suite", recollement_suite),
        ("3 tilt suite", tilt_suite),
        ("4 ring-case collapse", ring_case),
        ("5 self-dual corollary", self_dual),
        ("6 resolution oracle", resolution_oracle),
        ("7 brute-force oracle", brute_force),
        ("8 determinism and round-trip", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("PASS  criterion {name} \u{2014} {detail} ({:.1}s)", t.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} \u{2014} {why}");
            }
        }
    }
    println!("{} of 8 criteria pass in {:.1}s", 8 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
