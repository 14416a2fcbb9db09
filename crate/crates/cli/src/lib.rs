//! Command-line front end: argument parsing, file loading and report assembly.

pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use quadeq::freewords::Word;
use quadeq::hypreduce::{build_schema, compute_l, CTripleChoice, Representatives, SchemaParams, Target};
use quadeq::makanin::entire::{entire_transform, replay};
use quadeq::makanin::geneq::{guided_geneq, initial_geneq};
use quadeq::makanin::{solve_quadratic, SolveOptions, Verdict};
use quadeq::npreduce::{
    build_equation, desk_instances, equivalence_sweep, BinPackInstance, EquationForm, EquivalenceBound, ReductionParams,
};
use quadeq::oracle::{enumerate_solutions, find_solution, SearchBound};
use quadeq::quadratic::{triangulate, Assignment, EquationSystem};
use quadeq::standard::{standardize, tuple_genus, SurfaceKind};
use quadeq::surfaces::{glue, to_dot, QuadraticSet, SetKind};
use quadeq::symbols::Alphabet;

pub use report::{Outcome, RunReport};

#[derive(Debug, Parser)]
#[command(name = "quadeq", version, about = "Quadratic equations over free groups")]
struct Cli {
    /// Emit the report as one JSON document.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Orientable,
    NonOrientable,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a quadratic system and print a verified witness.
    Solve {
        file: PathBuf,
        /// Per-variable length bound recorded in the report.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 400_000)]
        max_states: usize,
    },
    /// Brute-force search with every variable of length at most the bound.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Count every solution within the bound.
        #[arg(long)]
        all: bool,
    },
    /// Rewrite every relator as a chain of triangles.
    Triangulate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bring a single quadratic equation to standard form.
    Standardize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least genus of a coefficient tuple (`gens:` line, then one word per line).
    Genus {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "orientable")]
        kind: Kind,
        #[arg(long, default_value_t = 400_000)]
        max_states: usize,
    },
    /// Glue a quadratic set of cyclic words into a surface.
    Surface {
        file: PathBuf,
        /// Write the embedded graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Free-group schema of a system for one choice of tripod centres.
    Schema {
        file: PathBuf,
        /// Centre file: `<polygon>: <word> ; <word> ; <word>` per line.
        #[arg(long)]
        centres: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        l_param: usize,
        /// `free`, `product:<gens>/<gens>/...` or `declared:<lambda>,<mu>`.
        #[arg(long, default_value = "free")]
        target: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the equation of a bin packing instance.
    ReduceBinpack {
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<u64>,
        #[arg(long)]
        bins: u64,
        #[arg(long)]
        cap: u64,
        /// Two-letter form over `a1`, `b1`.
        #[arg(long)]
        free_form: bool,
        #[arg(long, default_value_t = 3)]
        i: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        t: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare packing feasibility with solvability over a grid of instances.
    CheckEquivalence {
        #[arg(long, default_value_t = 4)]
        max_items: usize,
        #[arg(long, default_value_t = 3)]
        max_cap: u64,
        #[arg(long, default_value_t = 3)]
        max_bins: u64,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = 20_000)]
        solver_states: usize,
    },
    /// Run the entire transformation guided by a solution, or replay a trace.
    GeneqTrace {
        file: PathBuf,
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Where to write the trace.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// The length constant `L = q * 2^(5050 (delta+1)^6 (2|A|)^(2 delta))`.
    #[command(name = "compute-L", alias = "compute-l")]
    ComputeL {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        alphabet: u64,
        /// Also print L in decimal when it has at most this many bits.
        #[arg(long)]
        expand_bits: Option<u64>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            _ => 2,
        }
    }
}

fn input_error(path: &Path, e: impl ToString) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_system(path: &Path) -> Result<(String, EquationSystem), CliError> {
    let text = read(path)?;
    let sys = EquationSystem::parse(&text).map_err(|e| input_error(path, e))?;
    Ok((text, sys))
}

/// Re-checks a witness by substitution and reduction before it is printed.
fn attach_witness(report: &mut RunReport, sys: &EquationSystem, asg: &Assignment) -> Result<(), CliError> {
    if !sys.is_solution(asg) {
        return Err(CliError::Internal("witness failed verification".into()));
    }
    report.witness = sys.show_assignment(asg);
    report.field("witness_verified", "yes");
    Ok(())
}

fn outcome(v: Verdict) -> Outcome {
    match v {
        Verdict::Sat => Outcome::Sat,
        Verdict::Unsat => Outcome::Unsat,
        Verdict::Inconclusive => Outcome::Inconclusive,
    }
}

fn parse_target(spec: &str, al: &Alphabet) -> Result<Target, CliError> {
    let bad = |m: String| CliError::Usage(format!("--target: {m}"));
    if spec == "free" {
        return Ok(Target::Free);
    }
    if let Some(rest) = spec.strip_prefix("product:") {
        let factors = rest
            .split('/')
            .map(|f| {
                f.split_whitespace()
                    .map(|n| match al.lookup(n) {
                        Some(id) if !al.is_variable(id) => Ok(id),
                        _ => Err(bad(format!("unknown constant '{n}'"))),
                    })
                    .collect::<Result<Vec<u16>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Target::FreeProduct(factors));
    }
    if let Some(rest) = spec.strip_prefix("declared:") {
        let (l, m) = rest.split_once(',').ok_or_else(|| bad("expected declared:<lambda>,<mu>".into()))?;
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(format!("bad number '{s}'")));
        return Ok(Target::Declared {
            lambda: num(l)?,
            mu: num(m)?,
        });
    }
    Err(bad(format!("unknown target '{spec}'")))
}

fn parse_tuple(path: &Path, text: &str) -> Result<(Alphabet, Vec<Word>), CliError> {
    let mut al = Alphabet::new();
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("gens:") {
            for n in rest.split_whitespace() {
                al.add_constant(n).map_err(|e| input_error(path, format!("line {line}: {e}")))?;
            }
            continue;
        }
        let w = al
            .parse_word(content)
            .map_err(|e| input_error(path, format!("line {line}, {e}")))?;
        words.push(w);
    }
    if words.is_empty() {
        return Err(input_error(path, "no coefficient words"));
    }
    Ok((al, words))
}

fn kind_name(k: SetKind) -> &'static str {
    match k {
        SetKind::Orientable => "orientable",
        SetKind::NonOrientable => "non-orientable",
    }
}

fn execute(command: Command) -> Result<RunReport, CliError> {
    Ok(match command {
        Command::Solve { file, bound, max_states } => {
            let (text, sys) = load_system(&file)?;
            let r = solve_quadratic(&sys, &SolveOptions { bound, max_states }).map_err(|e| input_error(&file, e))?;
            let mut rep = RunReport::new("solve", text.as_bytes(), outcome(r.verdict));
            rep.bound = Some(r.bound_used);
            if let Some(w) = &r.witness {
                attach_witness(&mut rep, &sys, w)?;
            }
            rep.field("states", r.states)
                .field("orientable", r.orientable)
                .field("coefficient_length", r.coefficient_length)
                .field("theoretical_bound", r.theoretical_bound);
            rep
        }
        Command::Oracle { file, bound, all } => {
            let (text, sys) = load_system(&file)?;
            let b = SearchBound::new(bound);
            let (hit, count) = if all {
                let sols = enumerate_solutions(&sys, b);
                (sols.first().cloned(), Some(sols.len()))
            } else {
                (find_solution(&sys, b), None)
            };
            let verdict = if hit.is_some() { Outcome::Sat } else { Outcome::Inconclusive };
            let mut rep = RunReport::new("oracle", text.as_bytes(), verdict);
            rep.bound = Some(bound as u64);
            if let Some(w) = &hit {
                attach_witness(&mut rep, &sys, w)?;
            }
            if let Some(n) = count {
                rep.field("solutions", n);
            }
            rep
        }
        Command::Triangulate { file, out } => {
            let (text, sys) = load_system(&file)?;
            let t = triangulate(&sys);
            let mut rep = RunReport::new("triangulate", text.as_bytes(), Outcome::Done);
            rep.field("size_before", sys.size())
                .field("size_after", t.system.size())
                .field("fresh_variables", t.fresh.len());
            emit_system(&mut rep, &t.system, out.as_deref())?;
            rep
        }
        Command::Standardize { file, out } => {
            let (text, sys) = load_system(&file)?;
            let (form, _) = standardize(&sys).map_err(|e| input_error(&file, e))?;
            let mut rep = RunReport::new("standardize", text.as_bytes(), Outcome::Done);
            let kind = match form.kind {
                SurfaceKind::Orientable => "orientable",
                SurfaceKind::NonOrientable => "non-orientable",
            };
            rep.field("kind", kind)
                .field("genus", form.genus)
                .field("coefficients", form.coefficients.len() + 1);
            emit_system(&mut rep, &form.system(), out.as_deref())?;
            rep
        }
        Command::Genus { file, kind, max_states } => {
            let text = read(&file)?;
            let (al, words) = parse_tuple(&file, &text)?;
            let sk = match kind {
                Kind::Orientable => SurfaceKind::Orientable,
                Kind::NonOrientable => SurfaceKind::NonOrientable,
            };
            let opts = SolveOptions { bound: None, max_states };
            match tuple_genus(sk, &words, &al, &opts) {
                Ok(Some((g, check))) => {
                    let mut rep = RunReport::new("genus", text.as_bytes(), Outcome::Sat);
                    rep.field("genus", g);
                    if let Some(w) = &check.witness {
                        attach_witness(&mut rep, &check.form.system(), w)?;
                    }
                    rep
                }
                Ok(None) => RunReport::new("genus", text.as_bytes(), Outcome::Unsat),
                Err(_) => RunReport::new("genus", text.as_bytes(), Outcome::Inconclusive),
            }
        }
        Command::Surface { file, dot } => {
            let text = read(&file)?;
            let q = QuadraticSet::parse(&text).map_err(|e| input_error(&file, e))?;
            let g = glue(&q);
            let mut rep = RunReport::new("surface", text.as_bytes(), Outcome::Done);
            let summary: Vec<String> = g
                .components
                .iter()
                .map(|c| {
                    format!(
                        "{}, genus {}, χ={}",
                        if c.orientable { "orientable" } else { "non-orientable" },
                        c.genus,
                        c.euler
                    )
                })
                .collect();
            rep.field("surface", summary.join("\n"))
                .field("classification", kind_name(q.kind))
                .field("components", g.components.len())
                .field("vertices", g.vertex_count)
                .field("edges", g.edge_count)
                .field("faces", g.face_count)
                .field("euler", g.euler())
                .field("genus", g.genus);
            if let Some(path) = dot {
                write(&path, &to_dot(&q))?;
                rep.field("dot", path.display());
            }
            rep
        }
        Command::Schema {
            file,
            centres,
            l_param,
            target,
            out,
        } => {
            let (mut text, sys) = load_system(&file)?;
            let t = triangulate(&sys);
            let choice = match &centres {
                Some(p) => {
                    let c = read(p)?;
                    text.push_str(&c);
                    CTripleChoice::parse(&c, &t.system).map_err(|e| input_error(p, e))?
                }
                None => CTripleChoice::trivial(&t.system),
            };
            let target = parse_target(&target, &t.system.alphabet)?;
            let reps = Representatives::geodesic(&t.system.alphabet);
            let s = build_schema(&t.system, &choice, &reps, &target, SchemaParams { l_param })
                .map_err(|e| input_error(&file, e))?;
            let mut rep = RunReport::new("schema", text.as_bytes(), Outcome::Done);
            rep.field("input_size", t.system.size())
                .field("size", s.system.size())
                .field("size_bound", s.size_bound)
                .field("matching_equations", s.matching_equations)
                .field("constant_equations", s.constant_equations)
                .field("quadratic", s.system.is_quadratic());
            emit_system(&mut rep, &s.system, out.as_deref())?;
            rep
        }
        Command::ReduceBinpack {
            items,
            bins,
            cap,
            free_form,
            i,
            d,
            t,
            out,
        } => {
            let usage = |e: quadeq::npreduce::ReductionError| CliError::Usage(e.to_string());
            let inst = BinPackInstance::new(items, bins, cap).map_err(usage)?;
            let params = ReductionParams {
                i,
                d,
                spacers: t,
                ..Default::default()
            };
            let form = if free_form { EquationForm::Free } else { EquationForm::Full };
            let eq = build_equation(&inst, &params, form).map_err(usage)?;
            let key = format!("{inst} i={i} D={d} t={:?} free={free_form}", params.spacers);
            let mut rep = RunReport::new("reduce-binpack", key.as_bytes(), Outcome::Done);
            rep.field("instance", &inst)
                .field("sum_matches", inst.sum_matches())
                .field("quadratic", eq.system.is_quadratic());
            emit_system(&mut rep, &eq.system, out.as_deref())?;
            rep
        }
        Command::CheckEquivalence {
            max_items,
            max_cap,
            max_bins,
            bound,
            solver_states,
        } => {
            let instances = desk_instances(max_items, max_cap, max_bins);
            let b = EquivalenceBound {
                oracle: bound,
                solver_states,
            };
            let reports = equivalence_sweep(&instances, &ReductionParams::default(), b).map_err(|e| CliError::Usage(e.to_string()))?;
            let key = format!("s<={max_items} B<={max_cap} N<={max_bins} bound={bound} states={solver_states}");
            let mut rep = RunReport::new("check-equivalence", key.as_bytes(), Outcome::Done);
            rep.bound = Some(bound as u64);
            let rows: Vec<String> = reports
                .iter()
                .map(|r| {
                    format!(
                        "{} | packing {} | equation {:?} | {}",
                        r.instance,
                        if r.packing.is_some() { "yes" } else { "no" },
                        r.verdict,
                        if r.agrees() { "agree" } else { "DISAGREE" }
                    )
                })
                .collect();
            let disagree = reports.iter().filter(|r| !r.agrees()).count();
            rep.field("instances", reports.len())
                .field("feasible", reports.iter().filter(|r| r.packing.is_some()).count())
                .field("disagreements", disagree)
                .field("table", rows.join("\n"));
            rep
        }
        Command::GeneqTrace {
            file,
            replay: replay_path,
            out,
            budget,
        } => {
            let (text, sys) = load_system(&file)?;
            let start = initial_geneq(&sys).map_err(|e| input_error(&file, e))?;
            if let Some(p) = replay_path {
                let trace = read(&p)?;
                let end = replay(&start, &trace).map_err(|e| input_error(&p, e))?;
                let mut rep = RunReport::new("geneq-trace", format!("{text}{trace}").as_bytes(), Outcome::Done);
                rep.trace_path = Some(p.display().to_string());
                rep.field("steps", trace.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).count())
                    .field("terminal", end.to_string().trim_end());
                return Ok(rep);
            }
            let r = solve_quadratic(&sys, &SolveOptions::default()).map_err(|e| input_error(&file, e))?;
            let mut rep = RunReport::new("geneq-trace", text.as_bytes(), outcome(r.verdict));
            let Some(w) = r.witness else { return Ok(rep) };
            attach_witness(&mut rep, &sys, &w)?;
            let lead = guided_geneq(&sys, &w).map_err(|e| CliError::Internal(e.to_string()))?;
            let run = entire_transform(&lead.geneq, &lead.solution, budget);
            let run = match run {
                Ok(run) => run,
                Err(e) => {
                    rep.verdict = Outcome::Inconclusive;
                    rep.witness.clear();
                    rep.fields.clear();
                    rep.field("error", e);
                    return Ok(rep);
                }
            };
            let trace = run.trace();
            rep.field("initial", start.to_string().trim_end())
                .field("steps", run.steps.len())
                .field("rounds", run.rounds.len())
                .field("max_bases", run.max_bases());
            match out {
                Some(p) => {
                    write(&p, &trace)?;
                    rep.trace_path = Some(p.display().to_string());
                }
                None => {
                    rep.field("step", trace.trim_end());
                }
            }
            rep
        }
        Command::ComputeL {
            q,
            delta,
            alphabet,
            expand_bits,
        } => {
            let l = compute_l(q, delta, alphabet).map_err(|e| CliError::Usage(e.to_string()))?;
            let key = format!("q={q} delta={delta} alphabet={alphabet}");
            let mut rep = RunReport::new("compute-L", key.as_bytes(), Outcome::Done);
            rep.field("exponent", &l.exponent);
            match l.log2_exact() {
                Some(v) => rep.field("log2_L", v),
                None => rep.field("log2_L", "not an integer"),
            };
            match &l.digits {
                Some(v) => rep.field("decimal_digits", v),
                None => rep.field("decimal_digits", "unknown"),
            };
            if let Some(bits) = expand_bits {
                match l.expand(bits) {
                    Ok(v) => rep.field("L", v),
                    Err(e) => rep.field("L", e),
                };
            }
            rep
        }
    })
}

/// Adds the system as a multi-line field, or writes it to `out`.
fn emit_system(rep: &mut RunReport, sys: &EquationSystem, out: Option<&Path>) -> Result<(), CliError> {
    let text = sys.to_string();
    match out {
        Some(p) => {
            write(p, &text)?;
            rep.field("output", p.display());
        }
        None => {
            rep.field("system", text.trim_end());
        }
    }
    Ok(())
}

/// Runs the command line, writing the report to `stdout` and diagnostics to
/// `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Some(n) = cli.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let started = Instant::now();
    match execute(cli.command) {
        Ok(mut rep) => {
            rep.time_ms = started.elapsed().as_millis() as u64;
            if let Err(e) = rep.validate() {
                let _ = writeln!(stderr, "internal error: {e}");
                return 1;
            }
            let text = if cli.json { rep.to_json() + "\n" } else { rep.to_string() };
            let _ = stdout.write_all(text.as_bytes());
            match rep.verdict {
                Outcome::Inconclusive => 3,
                _ => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
