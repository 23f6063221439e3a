//! Command-line driver. Exit codes: 0 all checks pass, 1 a verification
//! failed, 2 the input did not parse or validate, 3 a hypothesis or budget
//! failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{check_dga, DGAlgebra};
use crate::complexes::{homology, Complex};
use crate::format::{load_file, serialize, BimoduleEntry, Document, FormatError, ModuleEntry, ProblemEntry, Reference};
use crate::module::{check_bimodule, check_module, dualize, dualize_bimodule, Side};
use crate::report::{Level, Report};
use crate::resolution::Caps;
use crate::tilt::{ladkani_specialize, run_tilt, self_dual_corollary, TiltError, TiltProblem};
use crate::triangular::{build_triangular, verify_section3};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dgtilt", version, about = "Exact computations with upper triangular DGAs and their tilts")]
struct Cli {
    /// Generator cap for semifree resolutions.
    #[arg(long, global = true)]
    max_generators: Option<usize>,
    /// Degree window `LO:HI` for resolution generators.
    #[arg(long, global = true, value_parser = parse_window_arg, allow_hyphen_values = true)]
    degree_window: Option<(i32, i32)>,
    #[command(subcommand)]
    command: Command,
}

fn parse_window_arg(s: &str) -> Result<(i32, i32), String> {
    crate::format::parse_window(s).ok_or_else(|| format!("expected LO:HI, got `{s}`"))
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the axioms of every object in the files.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Per-degree homology dimensions and representatives.
    Homology {
        path: PathBuf,
        #[arg(long)]
        of: Option<String>,
    },
    /// Build the tilted algebra of a problem.
    Tilt {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a verification suite on a problem.
    Verify {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Write the k-linear duals of the modules and bimodules in a file.
    Dualize {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Recollement,
    Tilt,
    Ladkani,
    Selfdual,
}

fn exit_of(e: &TiltError) -> i32 {
    match e {
        TiltError::Resolution(_)
        | TiltError::RigidityFailed { .. }
        | TiltError::ExtNotConcentrated { .. }
        | TiltError::NotRingCase(_)
        | TiltError::NotSelfDual(_) => EXIT_HYPOTHESIS,
        TiltError::SuppliedInvalid(_) => EXIT_INPUT,
        TiltError::Triangular(_) | TiltError::Module(_) | TiltError::PhiCheckFailed(_) => EXIT_FAIL,
    }
}

fn report_code(r: &Report) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    let caps = |c: Caps| Caps {
        max_generators: cli.max_generators.unwrap_or(c.max_generators),
        degree_window: cli.degree_window.unwrap_or(c.degree_window),
    };
    let result = match &cli.command {
        Command::Check { paths } => check(&mut io, paths),
        Command::Homology { path, of } => homology_cmd(&mut io, path, of.as_deref()),
        Command::Tilt { problem, out, report } => tilt_cmd(&mut io, problem, out.as_deref(), report.as_deref(), &caps),
        Command::Verify { problem, suite } => verify_cmd(&mut io, problem, *suite, &caps),
        Command::Dualize { path, out } => dualize_cmd(&mut io, path, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            EXIT_INPUT
        }
    }
}

fn load(path: &Path) -> Result<Document, FormatError> {
    load_file(path)
}

fn check(io: &mut Io, paths: &[PathBuf]) -> Result<i32, FormatError> {
    let mut code = EXIT_OK;
    for p in paths {
        let doc = match load(p) {
            Ok(d) => d,
            Err(e) => {
                let _ = writeln!(io.err, "{e}");
                code = code.max(EXIT_INPUT);
                continue;
            }
        };
        let mut r = Report::new();
        for (n, a) in &doc.algebras {
            r.extend_prefixed(&format!("{n}: "), check_dga(a));
        }
        for (n, b) in &doc.bimodules {
            r.extend_prefixed(&format!("{n}: "), check_bimodule(&b.bimodule));
        }
        for (n, m) in &doc.modules {
            r.extend_prefixed(&format!("{n}: "), check_module(&m.module));
        }
        for n in doc.problems.keys() {
            r.pass(Level::Axiom, format!("{n}: problem"), "references resolve, parts are compatible");
        }
        let _ = writeln!(io.out, "# {}", p.display());
        let _ = write!(io.out, "{r}");
        if !r.passed() {
            code = code.max(EXIT_FAIL);
        }
    }
    Ok(code)
}

fn write_homology(io: &mut Io, name: &str, c: &Complex) {
    let h = homology(c);
    let space = c.space();
    let _ = writeln!(io.out, "{name}");
    for n in space.support() {
        let d = h.homology.dim_in(n);
        let _ = write!(io.out, "  H^{n} = {d}");
        let reps: Vec<String> = h
            .homology
            .range(n)
            .map(|i| {
                let v = h.representative(space, i);
                let mut s = String::new();
                for (k, (j, x)) in crate::linalg::to_sparse(&v).into_iter().enumerate() {
                    if k > 0 {
                        s.push_str(" + ");
                    }
                    s.push_str(&format!("{x} {}", space.label(j)));
                }
                s
            })
            .collect();
        if !reps.is_empty() {
            let _ = write!(io.out, ": [{}]", reps.join("], ["));
        }
        let _ = writeln!(io.out);
    }
}

fn homology_cmd(io: &mut Io, path: &Path, of: Option<&str>) -> Result<i32, FormatError> {
    let doc = load(path)?;
    let mut found = false;
    let want = |n: &str| of.is_none_or(|o| o == n);
    for (n, a) in doc.algebras.iter().filter(|(n, _)| want(n)) {
        write_homology(io, n, a.complex());
        found = true;
    }
    for (n, b) in doc.bimodules.iter().filter(|(n, _)| want(n)) {
        write_homology(io, n, b.bimodule.complex());
        found = true;
    }
    for (n, m) in doc.modules.iter().filter(|(n, _)| want(n)) {
        write_homology(io, n, m.module.complex());
        found = true;
    }
    if !found {
        let _ = writeln!(io.err, "no algebra or module named `{}` in {}", of.unwrap_or(""), path.display());
        return Ok(EXIT_INPUT);
    }
    Ok(EXIT_OK)
}

fn single_problem(doc: &Document, path: &Path) -> Result<(String, ProblemEntry), FormatError> {
    let mut it = doc.problems.iter();
    match (it.next(), it.next()) {
        (Some((n, p)), None) => Ok((n.clone(), p.clone())),
        _ => Err(FormatError::Io(format!("{}: expected exactly one [problem] section, found {}", path.display(), doc.problems.len()))),
    }
}

fn tilt_cmd(io: &mut Io, path: &Path, out: Option<&Path>, report: Option<&Path>, caps: &dyn Fn(Caps) -> Caps) -> Result<i32, FormatError> {
    let doc = load(path)?;
    let (name, entry) = single_problem(&doc, path)?;
    let mut p = entry.problem.clone();
    p.caps = caps(p.caps);
    let res = match run_tilt(&p) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return Ok(exit_of(&e));
        }
    };
    let text = res.report.to_string();
    let mut tdoc = Document::default();
    tdoc.algebras.insert(format!("{name}_tilde"), res.tilde.lambda.clone());
    tdoc.algebras.insert(format!("{name}_E"), res.e.clone());
    let alg_text = serialize(&tdoc);
    match out {
        Some(o) => std::fs::write(o, &alg_text).map_err(|e| FormatError::Io(format!("{}: {e}", o.display())))?,
        None => {
            let _ = write!(io.out, "{alg_text}");
        }
    }
    match report {
        Some(r) => std::fs::write(r, &text).map_err(|e| FormatError::Io(format!("{}: {e}", r.display())))?,
        None => {
            let _ = write!(io.out, "{text}");
        }
    }
    Ok(report_code(&res.report))
}

fn is_ring_case(p: &TiltProblem) -> bool {
    let flat = |c: &Complex| c.space().support().iter().all(|&n| n == 0) && c.differential().is_zero();
    flat(p.r.complex()) && flat(p.s.complex()) && flat(p.m.complex()) && flat(p.x().complex())
}

fn verify_cmd(io: &mut Io, path: &Path, suite: Suite, caps: &dyn Fn(Caps) -> Caps) -> Result<i32, FormatError> {
    let doc = load(path)?;
    let (_, entry) = single_problem(&doc, path)?;
    let mut p = entry.problem.clone();
    p.caps = caps(p.caps);
    let mut r = Report::new();
    let mut code = EXIT_OK;
    let fail_with = |r: &mut Report, e: &TiltError, code: &mut i32| {
        let level = match e {
            TiltError::RigidityFailed { .. } | TiltError::ExtNotConcentrated { .. } => Level::Exactness,
            _ => Level::Axiom,
        };
        let name = match e {
            TiltError::RigidityFailed { .. } => "RigidityFailed",
            TiltError::ExtNotConcentrated { .. } => "ExtNotConcentrated",
            TiltError::NotSelfDual(_) => "NotSelfDual",
            TiltError::NotRingCase(_) => "NotRingCase",
            TiltError::Resolution(_) => "ResolutionBudgetExceeded",
            _ => "error",
        };
        r.fail(level, name, e.to_string());
        *code = (*code).max(exit_of(e));
    };
    if matches!(suite, Suite::All | Suite::Recollement) {
        match build_triangular(p.r.clone(), p.s.clone(), p.m.clone()) {
            Ok(t) => {
                let x = p.x();
                let mut tests = vec![];
                match t.embed_left(&x, "X") {
                    Ok(e) => tests.push(e),
                    Err(e) => r.fail(Level::Axiom, "embed X", e.to_string()),
                }
                r.extend(verify_section3(&t, &tests));
            }
            Err(e) => r.fail(Level::Axiom, "triangular", e.to_string()),
        }
    }
    let needs_tilt = matches!(suite, Suite::All | Suite::Tilt | Suite::Ladkani);
    let tilt = if needs_tilt { Some(run_tilt(&p)) } else { None };
    if let Some(t) = &tilt {
        match t {
            Ok(res) if suite != Suite::Ladkani => r.extend(res.report.clone()),
            Ok(_) => {}
            Err(e) => fail_with(&mut r, e, &mut code),
        }
    }
    let ladkani = suite == Suite::Ladkani || (suite == Suite::All && is_ring_case(&p));
    if ladkani {
        if let Some(Ok(res)) = &tilt {
            match ladkani_specialize(&p, res) {
                Ok(l) => r.extend(l),
                Err(e) => fail_with(&mut r, &e, &mut code),
            }
        }
    }
    if suite == Suite::Selfdual {
        match self_dual_corollary(&p) {
            Ok(s) => r.extend(s),
            Err(e) => fail_with(&mut r, &e, &mut code),
        }
    }
    let _ = write!(io.out, "{r}");
    if code == EXIT_OK {
        code = report_code(&r);
    }
    Ok(code)
}

fn dualize_cmd(io: &mut Io, path: &Path, out: &Path) -> Result<i32, FormatError> {
    let doc = load(path)?;
    let mut names: BTreeMap<String, Arc<DGAlgebra>> = doc.algebras.clone();
    let mut name_of = |a: &Arc<DGAlgebra>, hint: &Reference| -> String {
        if let Some((n, _)) = names.iter().find(|(_, b)| **b == *a) {
            return n.clone();
        }
        let base = match hint {
            Reference::Local(n) => n.clone(),
            Reference::File { name: Some(n), .. } => n.clone(),
            Reference::File { path, name: None } => {
                Path::new(path).file_stem().map(|s| s.to_string_lossy().replace(['.', ' '], "_")).unwrap_or_else(|| "A".into())
            }
        };
        let mut n = base.clone();
        let mut k = 1;
        while names.contains_key(&n) {
            n = format!("{base}_{k}");
            k += 1;
        }
        names.insert(n.clone(), a.clone());
        n
    };
    let mut outdoc = Document::default();
    for (n, m) in &doc.modules {
        let d = dualize(&m.module);
        let an = name_of(m.module.algebra(), &m.over);
        outdoc.modules.insert(format!("D{n}"), ModuleEntry { over: Reference::Local(an), module: d });
    }
    for (n, b) in &doc.bimodules {
        let d = dualize_bimodule(&b.bimodule);
        let l = name_of(d.left_algebra(), &b.rightover);
        let r = name_of(d.right_algebra(), &b.over);
        outdoc.bimodules.insert(format!("D{n}"), BimoduleEntry { over: Reference::Local(l), rightover: Reference::Local(r), bimodule: d });
    }
    let used: Vec<String> = outdoc
        .modules
        .values()
        .map(|m| m.over.to_string())
        .chain(outdoc.bimodules.values().flat_map(|b| [b.over.to_string(), b.rightover.to_string()]))
        .collect();
    outdoc.algebras = names.into_iter().filter(|(n, _)| used.contains(n)).collect();
    let text = serialize(&outdoc);
    std::fs::write(out, &text).map_err(|e| FormatError::Io(format!("{}: {e}", out.display())))?;
    let mut r = Report::new();
    for (n, m) in &outdoc.modules {
        let side = if m.module.side() == Side::Left { "left" } else { "right" };
        r.extend_prefixed(&format!("{n} ({side}): "), check_module(&m.module));
    }
    for (n, b) in &outdoc.bimodules {
        r.extend_prefixed(&format!("{n}: "), check_bimodule(&b.bimodule));
    }
    let _ = write!(io.out, "{r}");
    Ok(report_code(&r))
}
