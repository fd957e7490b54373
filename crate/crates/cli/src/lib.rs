//! Command-line front end: builds instances, tests divisibility and lattice
//! membership, solves and verifies decompositions.
//!
//! Exit codes: 0 affirmative, 1 negative, 2 budget exhausted, 3 bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use designlat::applications::{
    build_latin, build_nonpartite, build_rainbow, build_sudoku, build_tryst, build_twisted_octahedron,
    complete_resolution_divisible, design_divisible, large_set_divisible, measure_typicality, octahedron_invariant,
    rainbow_divisible, reduce_complete_resolution, reduce_large_set, reduce_resolvable, resolvable_divisible, Decoder,
    Divisibility, Multigraph, ProblemInstance, RainbowMode,
};
use designlat::io::{CertificateFile, ProblemFile};
use designlat::lattice::{lattice_member_l, lattice_member_lminus, lattice_member_oracle, Method as LatticeMethod};
use designlat::solver::{nibble_greedy, solve_exact, solve_integral, verify, Outcome, Policy, SearchConfig, Unsat, VerifyMode};
use designlat::vsys::Selection;
use designlat::Error;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "designlat", version, about = "Decompositions over labelled complexes")]
pub struct Cli {
    /// Node budget for searches and enumeration limit for oracles.
    #[arg(long, global = true, env = "DESIGNLAT_BUDGET")]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; every computation currently runs on one thread.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    /// Where to write the produced problem or certificate file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Method::Sharp)]
    method: Method,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sharp,
    Shadow,
    Oracle,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// A named instance; see `designlat build --help`.
    #[arg(long)]
    builtin: Option<String>,
    /// A problem file written by `build` or `reduce`.
    #[arg(long)]
    problem: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Write a problem file. Builtins: fano, twisted-octahedron, tryst-N,
    /// sudoku-N, latin-N, kts-N, design-N-Q-R-L, rainbow-fixed-qQnN,
    /// rainbow-all-qQnN (rainbow names take an optional rR before n).
    Build(Source),
    /// Closed-form divisibility, or for an instance the local atom test
    /// together with the degree conditions of the decomposition lattice.
    CheckDivisible(CheckArgs),
    LatticeMember(Source),
    Solve(Source),
    SolveIntegral(Source),
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        certificate: PathBuf,
        /// Accept any integer coefficients instead of a 0/1 selection.
        #[arg(long)]
        integral: bool,
    },
    /// Random greedy packing with leave statistics.
    Nibble(Source),
    #[command(subcommand)]
    Reduce(ReduceKind),
    /// Worst typicality deviation of a graph.
    Typicality {
        /// A JSON multigraph `{n, r, edges: [[vertices, multiplicity], ...]}`.
        #[arg(long, conflicts_with = "complete")]
        graph: Option<PathBuf>,
        /// The complete graph `K^r_n`, as `n r`.
        #[arg(long, num_args = 2, value_names = ["N", "R"])]
        complete: Option<Vec<u32>>,
        #[arg(long, default_value_t = 2)]
        s: usize,
    },
    /// Lattice membership by brute-force enumeration of molecules.
    Oracle(Source),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, num_args = 4, value_names = ["N", "Q", "R", "L"])]
    design: Option<Vec<u64>>,
    #[arg(long, num_args = 4, value_names = ["N", "Q", "R", "L"])]
    resolvable: Option<Vec<u64>>,
    #[arg(long, num_args = 4, value_names = ["N", "Q", "R", "L"])]
    large_set: Option<Vec<u64>>,
    #[arg(long, num_args = 2, value_names = ["N", "Q"])]
    complete_resolution: Option<Vec<u64>>,
    /// `q r n all|fixed`.
    #[arg(long, num_args = 4, value_names = ["Q", "R", "N", "MODE"])]
    rainbow: Option<Vec<String>>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    problem: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ReduceKind {
    /// Resolvable `K^r_q`-designs of `λK^r_n`.
    Resolvable {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        lambda: i64,
    },
    /// Large sets of `(n, q, r, λ)`-designs.
    LargeSet {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
    },
    /// Nested chains of Steiner systems.
    CompleteResolution {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: usize,
    },
}

struct Loaded {
    instance: ProblemInstance,
    decoder: Option<Decoder>,
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

impl Report {
    fn new(code: i32, json: Value, text: impl Into<String>) -> Self {
        Report { code, json, text: text.into() }
    }
}

fn input(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_numbers(s: &str, sep: char) -> Option<Vec<u32>> {
    s.split(sep).map(|x| x.parse().ok()).collect()
}

fn rainbow_builtin(rest: &str, mode: RainbowMode) -> designlat::Result<ProblemInstance> {
    let bad = || input(format!("cannot read rainbow parameters from {rest:?}"));
    let rest = rest.strip_prefix('q').ok_or_else(bad)?;
    let (head, n) = rest.split_once('n').ok_or_else(bad)?;
    let (q, r) = head.split_once('r').unwrap_or((head, "2"));
    let q: usize = q.parse().map_err(|_| bad())?;
    let r: usize = r.parse().map_err(|_| bad())?;
    let n: u32 = n.parse().map_err(|_| bad())?;
    build_rainbow(q, r, n, mode)
}

/// Resolves a builtin name to an instance.
pub fn builtin(name: &str, seed: u64) -> designlat::Result<(ProblemInstance, Option<Decoder>)> {
    let num = |prefix: &str| -> Option<u32> { name.strip_prefix(prefix)?.parse().ok() };
    if name == "fano" {
        let mut inst = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(7, 2, 1))?;
        inst.provenance = "fano".into();
        return Ok((inst, None));
    }
    if name == "twisted-octahedron" {
        return Ok((build_twisted_octahedron()?.instance, None));
    }
    if let Some(n) = num("tryst-") {
        return Ok((build_tryst(n)?, None));
    }
    if let Some(n) = num("sudoku-") {
        return Ok((build_sudoku(n)?, None));
    }
    if let Some(n) = num("latin-") {
        return Ok((build_latin(n)?, None));
    }
    if let Some(n) = num("kts-") {
        let red = reduce_resolvable(&Multigraph::complete(3, 2, 1), &Multigraph::complete(n, 2, 1), seed)?;
        return Ok((red.instance, Some(red.decoder)));
    }
    if let Some(rest) = name.strip_prefix("design-") {
        let p = parse_numbers(rest, '-').filter(|p| p.len() == 4).ok_or_else(|| input(format!("expected design-N-Q-R-L, got {name}")))?;
        let inst = build_nonpartite(&Multigraph::complete(p[1], p[2] as usize, 1), &Multigraph::complete(p[0], p[2] as usize, i64::from(p[3])))?;
        return Ok((inst, None));
    }
    if let Some(rest) = name.strip_prefix("rainbow-fixed-") {
        return Ok((rainbow_builtin(rest, RainbowMode::Fixed)?, None));
    }
    if let Some(rest) = name.strip_prefix("rainbow-all-") {
        return Ok((rainbow_builtin(rest, RainbowMode::All)?, None));
    }
    Err(input(format!("unknown builtin {name:?}")))
}

fn load(source: &Source, seed: u64) -> designlat::Result<Loaded> {
    if let Some(name) = &source.builtin {
        let (instance, decoder) = builtin(name, seed)?;
        return Ok(Loaded { instance, decoder });
    }
    let path = source.problem.as_ref().ok_or_else(|| input("give --builtin or --problem"))?;
    let file = ProblemFile::from_json(&std::fs::read_to_string(path)?)?;
    Ok(Loaded { instance: file.to_instance()?, decoder: file.decoder })
}

fn divisibility_report(d: Divisibility) -> Report {
    let text = if d.divisible { "DIVISIBLE".to_string() } else { format!("NOT DIVISIBLE: {:?}", d.failing) };
    Report::new(if d.divisible { EXIT_YES } else { EXIT_NO }, serde_json::to_value(&d).unwrap_or(Value::Null), text)
}

fn four(v: &[u64]) -> (u64, u64, u64, u64) {
    (v[0], v[1], v[2], v[3])
}

fn membership_report(inst: &ProblemInstance, member: bool, failing: Option<String>, method: &str) -> Report {
    let mut json = json!({ "member": member, "method": method, "failing": failing });
    let mut text = if member { format!("MEMBER ({method})") } else { format!("NOT A MEMBER ({method})") };
    if let Some(f) = &failing {
        text.push_str(&format!("\nfirst failing orbit: {f}"));
    }
    if inst.provenance == "twisted_octahedron" {
        let inv: Vec<String> = octahedron_invariant(&inst.target).iter().map(ToString::to_string).collect();
        text.push_str(&format!("\ninvariant: ({})", inv.join(", ")));
        json["invariant"] = json!(inv);
    }
    Report::new(if member { EXIT_YES } else { EXIT_NO }, json, text)
}

fn selection_text(inst: &ProblemInstance, sel: &Selection) -> String {
    let copies = inst.vs.copies();
    sel.iter()
        .map(|((c, m), k)| {
            let coef = if *k == 1.into() { String::new() } else { format!("{k} × ") };
            format!("{coef}{} {m}", copies[*c].name)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn unsat_text(u: &Unsat) -> String {
    match u {
        Unsat::NotInLattice(Some((i, m))) => format!("outside the lattice at level {i}, orbit {m}"),
        Unsat::NotInLattice(None) => "outside the lattice".into(),
        Unsat::NotInSpan(m) => format!("no integer atom expression at {m}"),
        Unsat::Negative(m) => format!("negative atom coefficient at {m}"),
        Unsat::Exhausted => "search space exhausted".into(),
    }
}

fn write_artifact<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> designlat::Result<()> {
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn search_config(cli: &Cli) -> SearchConfig {
    SearchConfig { node_budget: cli.budget.unwrap_or(DEFAULT_BUDGET), seed: cli.seed, ..SearchConfig::default() }
}

fn outcome_report(cli: &Cli, loaded: &Loaded, outcome: &Outcome<Selection>, integral: bool) -> designlat::Result<Report> {
    let inst = &loaded.instance;
    Ok(match outcome {
        Outcome::Found(sel) => {
            let decoded = match (&loaded.decoder, integral) {
                (Some(d), false) => Some(d.decode(sel)?),
                _ => None,
            };
            let cert = CertificateFile::new(&inst.provenance, sel, loaded.decoder.clone(), decoded)?;
            write_artifact(&cli.out, &cert)?;
            let mut text = format!("FOUND {} molecules\n{}", sel.len(), selection_text(inst, sel));
            if let Some(d) = &cert.decoded {
                text.push_str(&format!("\ndecoded: {}", serde_json::to_string(d)?));
            }
            Report::new(EXIT_YES, json!({ "status": "found", "molecules": sel.len(), "certificate": cert }), text)
        }
        Outcome::Unsat(u) => Report::new(EXIT_NO, json!({ "status": "unsat", "reason": unsat_text(u) }), format!("UNSAT: {}", unsat_text(u))),
        Outcome::Budget => Report::new(EXIT_BUDGET, json!({ "status": "budget" }), "BUDGET exhausted"),
    })
}

fn execute(cli: &Cli) -> designlat::Result<Report> {
    match &cli.verb {
        Verb::Build(src) => {
            let loaded = load(src, cli.seed)?;
            let file = ProblemFile::from_instance(&loaded.instance, loaded.decoder)?;
            let text = serde_json::to_string_pretty(&file)?;
            if cli.out.is_some() {
                write_artifact(&cli.out, &file)?;
                let summary = format!("wrote {} with {} target entries", file.provenance, file.target.len());
                Ok(Report::new(EXIT_YES, json!({ "provenance": file.provenance, "target_entries": file.target.len() }), summary))
            } else {
                Ok(Report::new(EXIT_YES, serde_json::to_value(&file)?, text))
            }
        }
        Verb::CheckDivisible(a) => {
            if let Some(v) = &a.design {
                let (n, q, r, l) = four(v);
                return Ok(divisibility_report(design_divisible(n, q, r, l)));
            }
            if let Some(v) = &a.resolvable {
                let (n, q, r, l) = four(v);
                return Ok(divisibility_report(resolvable_divisible(n, q, r, l)));
            }
            if let Some(v) = &a.large_set {
                let (n, q, r, l) = four(v);
                return Ok(divisibility_report(large_set_divisible(n, q, r, l)));
            }
            if let Some(v) = &a.complete_resolution {
                return Ok(divisibility_report(complete_resolution_divisible(v[0], v[1])));
            }
            if let Some(v) = &a.rainbow {
                let nums: Vec<u64> = v[..3].iter().map(|x| x.parse().map_err(|_| input(format!("not a number: {x}")))).collect::<designlat::Result<_>>()?;
                let mode = match v[3].as_str() {
                    "all" => RainbowMode::All,
                    "fixed" => RainbowMode::Fixed,
                    m => return Err(input(format!("rainbow mode must be all or fixed, got {m}"))),
                };
                return Ok(divisibility_report(rainbow_divisible(nums[0], nums[1], nums[2], mode)));
            }
            let src = Source { builtin: a.builtin.clone(), problem: a.problem.clone() };
            let loaded = load(&src, cli.seed)?;
            let inst = &loaded.instance;
            let local = lattice_member_lminus(&inst.phi, &inst.vs, &inst.target)?;
            let full = lattice_member_l(&inst.phi, &inst.vs, &inst.target, LatticeMethod::Sharp)?;
            let failing = local.failing.or(full.failing).map(|(i, o)| format!("level {i}, orbit {o}"));
            let divisible = local.member && full.member;
            let text = match &failing {
                None => "DIVISIBLE".to_string(),
                Some(f) => format!("NOT DIVISIBLE (local atoms: {}, degree conditions: {}): {f}", local.member, full.member),
            };
            let json = json!({ "divisible": divisible, "local": local.member, "degrees": full.member, "failing": failing });
            Ok(Report::new(if divisible { EXIT_YES } else { EXIT_NO }, json, text))
        }
        Verb::LatticeMember(src) => {
            let loaded = load(src, cli.seed)?;
            let inst = &loaded.instance;
            match cli.method {
                Method::Oracle => {
                    let member = lattice_member_oracle(&inst.phi, &inst.vs, &inst.target, cli.budget.unwrap_or(DEFAULT_BUDGET))?;
                    Ok(membership_report(inst, member, None, "oracle"))
                }
                m => {
                    let (lm, name) = if m == Method::Sharp { (LatticeMethod::Sharp, "sharp") } else { (LatticeMethod::Shadow, "shadow") };
                    let r = lattice_member_l(&inst.phi, &inst.vs, &inst.target, lm)?;
                    Ok(membership_report(inst, r.member, r.failing.map(|(i, o)| format!("level {i}, orbit {o}")), name))
                }
            }
        }
        Verb::Oracle(src) => {
            let loaded = load(src, cli.seed)?;
            let inst = &loaded.instance;
            let member = lattice_member_oracle(&inst.phi, &inst.vs, &inst.target, cli.budget.unwrap_or(DEFAULT_BUDGET))?;
            Ok(membership_report(inst, member, None, "oracle"))
        }
        Verb::Solve(src) => {
            let loaded = load(src, cli.seed)?;
            let inst = &loaded.instance;
            let solve = solve_exact(&inst.phi, &inst.vs, &inst.target, &search_config(cli))?;
            outcome_report(cli, &loaded, &solve.outcome, false)
        }
        Verb::SolveIntegral(src) => {
            let loaded = load(src, cli.seed)?;
            let inst = &loaded.instance;
            let outcome = solve_integral(&inst.phi, &inst.vs, &inst.target, &search_config(cli))?;
            outcome_report(cli, &loaded, &outcome, true)
        }
        Verb::Verify { source, certificate, integral } => {
            let loaded = load(source, cli.seed)?;
            let inst = &loaded.instance;
            let cert = CertificateFile::from_json(&std::fs::read_to_string(certificate)?)?;
            let sel = cert.selection()?;
            let mode = if *integral { VerifyMode::Integral } else { VerifyMode::Set };
            let rep = verify(&inst.phi, &inst.vs, &sel, &inst.target, mode);
            let text = if rep.ok {
                format!("VALID: {} molecules", sel.len())
            } else {
                format!("INVALID: {} mismatching coordinates, {} bad embeddings", rep.mismatches, rep.bad_keys.len())
            };
            let json = json!({ "ok": rep.ok, "mismatches": rep.mismatches, "bad_embeddings": rep.bad_keys.len(), "mode_violation": rep.mode_violation });
            Ok(Report::new(if rep.ok { EXIT_YES } else { EXIT_NO }, json, text))
        }
        Verb::Nibble(src) => {
            let loaded = load(src, cli.seed)?;
            let inst = &loaded.instance;
            let t = nibble_greedy(&inst.phi, &inst.vs, &inst.target, cli.seed, &Policy::Uniform)?;
            let json = json!({
                "steps": t.steps(),
                "leave_total": t.leave.total().to_string(),
                "leave_fraction": t.leave_fraction(),
                "max_use": t.max_use.to_string(),
                "boundedness": t.boundedness.to_string(),
                "fixpoint": t.fixpoint,
                "nonnegative": t.nonnegative,
            });
            let text = format!(
                "steps: {}\nleave: {} of {} ({:.4})\nmax use: {} (ratio {})",
                t.steps(),
                t.leave.total(),
                t.target_total,
                t.leave_fraction(),
                t.max_use,
                t.boundedness
            );
            Ok(Report::new(EXIT_YES, json, text))
        }
        Verb::Reduce(kind) => {
            let red = match kind {
                ReduceKind::Resolvable { n, q, r, lambda } => {
                    reduce_resolvable(&Multigraph::complete(*q, *r, 1), &Multigraph::complete(*n, *r, *lambda), cli.seed)?
                }
                ReduceKind::LargeSet { n, q, r, lambda } => reduce_large_set(*q, *r, *lambda, &Multigraph::complete(*n, *r, 1), cli.seed)?,
                ReduceKind::CompleteResolution { n, q } => reduce_complete_resolution(*q, *n)?,
            };
            let file = ProblemFile::from_instance(&red.instance, Some(red.decoder))?;
            write_artifact(&cli.out, &file)?;
            let text = format!(
                "{}: {} labels, {} vertices, {} target entries",
                file.provenance,
                red.instance.phi.q(),
                red.instance.phi.universe(),
                file.target.len()
            );
            let json = if cli.out.is_some() { json!({ "provenance": file.provenance }) } else { serde_json::to_value(&file)? };
            Ok(Report::new(EXIT_YES, json, text))
        }
        Verb::Typicality { graph, complete, s } => {
            let g = match (graph, complete) {
                (Some(path), _) => {
                    let raw: Multigraph = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    let mut g = Multigraph::new(raw.n(), raw.r());
                    for (e, m) in raw.edges() {
                        g.add(e, m)?;
                    }
                    g
                }
                (None, Some(v)) => Multigraph::complete(v[0], v[1] as usize, 1),
                (None, None) => return Err(input("give --graph or --complete")),
            };
            let t = measure_typicality(&g, *s)?;
            let text = format!("c = {} (witness {:?})", t.c, t.witness);
            Ok(Report::new(EXIT_YES, serde_json::to_value(&t)?, text))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

/// Runs the command line `argv` (program name first), writing the report to `out`.
pub fn run<S: Into<std::ffi::OsString> + Clone>(argv: impl IntoIterator<Item = S>, out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_YES };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    let (code, body) = match execute(&cli) {
        Ok(rep) => {
            let body = match cli.format {
                Format::Json => {
                    let mut j = rep.json;
                    if let Value::Object(m) = &mut j {
                        m.insert("exit_code".into(), json!(rep.code));
                    }
                    serde_json::to_string_pretty(&j).unwrap_or_default()
                }
                Format::Text => rep.text,
            };
            (rep.code, body)
        }
        Err(e) => {
            let code = exit_code(&e);
            let body = match cli.format {
                Format::Json => json!({ "error": e.to_string(), "exit_code": code }).to_string(),
                Format::Text => format!("error: {e}"),
            };
            (code, body)
        }
    };
    let _ = writeln!(out, "{body}");
    code
}
