//! Command-line front end: argument parsing, subcommand dispatch and
//! exit-code mapping. [`run`] is the whole program minus process exit.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use delaystab::analysis::{analyze, AnalysisError, AnalysisOptions, CrossCheck, StabilityReport, Verdict};
use delaystab::ddesim::{find_equilibrium, scan_characteristic_roots, simulate_dde, History, Rect, ScanOptions};
use delaystab::dsr::{build_dsr, cycle_report, enumerate_cycles_with_budget, export_dot, DotOptions, DEFAULT_CYCLE_BUDGET};
use delaystab::modnet::{build_modified_network, ModifiedNetwork};
use delaystab::netcore::{check_structural_conditions, ConditionCheck, N1Prime, NetworkError, ReactionNetwork, Witness};
use delaystab::parser::{parse_network, serialize_network};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_DECIDED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "delaystab", version, about = "Delay stability of mass-action reaction networks")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a network file and report the structural conditions N1-N4.
    Validate { file: PathBuf },
    /// Run the delay-stability decision procedure.
    Analyze(AnalyzeArgs),
    /// Export the DSR graph as DOT.
    Dsr(DsrArgs),
    /// Write the modified network and its rate formulas.
    Modified(ModifiedArgs),
    /// Integrate the delay system and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Count characteristic roots in a rectangle of the complex plane.
    Roots(RootsArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Samples for P0 checks of -J and -J~ (0 disables them).
    #[arg(long, default_value_t = 0)]
    numeric_samples: usize,
    /// Number of DDE convergence runs at random parameters.
    #[arg(long, default_value_t = 0)]
    simulate: usize,
    /// Also scan characteristic roots for each simulated parameter draw.
    #[arg(long)]
    root_scans: bool,
    #[arg(long, default_value_t = DEFAULT_CYCLE_BUDGET)]
    cycle_budget: usize,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DsrArgs {
    file: PathBuf,
    /// Use the modified network instead of the original one.
    #[arg(long)]
    modified: bool,
    /// DOT output path; standard output when omitted.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Cycle report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModifiedArgs {
    file: PathBuf,
    /// Network output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rate-formula sidecar as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Rate constants: a comma-separated list in reaction order, or `name=value` pairs.
    #[arg(long)]
    kappa: Option<String>,
    /// Delays, in the same two forms as `--kappa`.
    #[arg(long)]
    tau: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    file: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Initial data: `const:v` or `const:v1,v2,...`.
    #[arg(long, default_value = "const:1")]
    history: String,
    #[arg(long, default_value_t = 10.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RootsArgs {
    file: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Equilibrium to linearize at; found by Newton iteration when omitted.
    #[arg(long)]
    x_star: Option<String>,
    /// `re_min,re_max,im_max` or `re_min,re_max,im_min,im_max`.
    #[arg(long, default_value = "-0.1,50,200", allow_hyphen_values = true)]
    rect: String,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Runs the program on `args` (including the program name) and returns the exit code.
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
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Validate { file } => cmd_validate(file, out),
        Command::Analyze(a) => cmd_analyze(a, cli.seed, out),
        Command::Dsr(a) => cmd_dsr(a, out),
        Command::Modified(a) => cmd_modified(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Roots(a) => cmd_roots(a, out),
    }
}

fn load(path: &Path) -> CliResult<ReactionNetwork> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse_network(&text).map_err(|e| CliError::Input(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.kind)))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        _ => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn mark(holds: bool) -> &'static str {
    if holds { "✓" } else { "✗" }
}

fn witness_text(net: &ReactionNetwork, c: &ConditionCheck) -> String {
    match &c.witness {
        Some(Witness::Species(s)) => format!(" (species {})", net.species_names()[*s]),
        Some(Witness::Reaction(r)) => format!(" (reaction {})", net.describe_reaction(*r)),
        None => String::new(),
    }
}

fn condition_lines(net: &ReactionNetwork) -> String {
    let c = check_structural_conditions(net);
    let mut s = String::new();
    for (name, check) in [("N1", &c.n1), ("N2", &c.n2), ("N3", &c.n3), ("N4", &c.n4)] {
        s.push_str(&format!("{name} {}{}\n", mark(check.holds), witness_text(net, check)));
    }
    let n1p = match &c.n1_prime {
        N1Prime::Satisfied { subset, .. } => format!("N1' ✓ (reactions {subset:?})"),
        N1Prime::Unsatisfied { .. } => "N1' ✗".into(),
        N1Prime::Undecided { budget } => format!("N1' ? (subset budget {budget} exhausted)"),
    };
    s.push_str(&n1p);
    s.push('\n');
    s
}

fn cmd_validate(file: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let net = load(file)?;
    let mut s = format!("{} species, {} reactions\n", net.n_species(), net.n_reactions());
    s.push_str(&condition_lines(&net));
    let free = net.free_parameters();
    if !free.is_empty() {
        s.push_str(&format!("free parameters: {}\n", free.join(", ")));
    }
    emit(None, &s, out)?;
    Ok(EXIT_OK)
}

fn summary(r: &StabilityReport) -> String {
    let mut s = format!("{} species, {} reactions, rank {}\n", r.species.len(), r.reactions.len(), r.rank);
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    let c = &r.conditions;
    for (name, check) in [("N1", &c.n1), ("N2", &c.n2), ("N3", &c.n3), ("N4", &c.n4)] {
        s.push_str(&format!("{name} {}\n", mark(check.holds)));
    }
    if !c.n1.holds {
        s.push_str(&format!("N1' {}\n", mark(c.n1_prime.is_satisfied())));
    }
    if let Some(g) = &r.graph {
        s.push_str(&format!(
            "DSR graph: {} S-nodes, {} R-nodes, {} edges, {} oriented cycles\n",
            g.n_snodes(),
            g.n_rnodes(),
            g.edges().len(),
            r.cycles.len()
        ));
    }
    if let Some(d) = &r.delay_conditions {
        s.push_str(&format!(
            "(a) no bispecies production edge on a cycle {}\n(b) all cycles are s-cycles {}\n(c) no S-to-R intersection {}\n",
            mark(d.no_bpe_cycle),
            mark(d.all_s_cycles),
            mark(d.no_s_to_r)
        ));
    }
    match &r.cross_check {
        CrossCheck::Agree { holds, modified_cycles } => s.push_str(&format!(
            "modified-graph cross-check: agrees ({} over {modified_cycles} oriented cycles)\n",
            mark(*holds)
        )),
        CrossCheck::Skipped(why) => s.push_str(&format!("modified-graph cross-check: skipped ({why})\n")),
    }
    let n = &r.numeric;
    for (name, p) in [("-J", &n.p0_jacobian), ("-J~", &n.p0_modified)] {
        if let Some(p) = p {
            s.push_str(&format!("P0 sampling of {name}: {:?} over {} samples\n", p.verdict, p.options.samples));
        }
    }
    if !n.simulations.is_empty() {
        let ok = n.simulations.iter().filter(|s| s.converged).count();
        s.push_str(&format!("simulations: {ok}/{} converged\n", n.simulations.len()));
    }
    for note in &n.notes {
        s.push_str(&format!("note: {note}\n"));
    }
    s.push_str(&format!("verdict: {}\n", r.verdict.label()));
    s
}

fn cmd_analyze(a: &AnalyzeArgs, seed: u64, out: &mut dyn Write) -> CliResult<i32> {
    let net = load(&a.file)?;
    let opts = AnalysisOptions {
        numeric_samples: a.numeric_samples,
        simulations: a.simulate,
        root_scans: a.root_scans,
        seed,
        cycle_budget: a.cycle_budget,
        ..AnalysisOptions::default()
    };
    let report = analyze(&net, &opts).map_err(|e| match e {
        AnalysisError::Sampling(s) => CliError::Input(s.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;
    let json_to_stdout = a.json.as_deref() == Some(Path::new("-"));
    if !json_to_stdout {
        emit(None, &summary(&report), out)?;
    }
    if let Some(p) = &a.json {
        emit(Some(p), &pretty(&report.to_json()), out)?;
    }
    Ok(match report.verdict {
        Verdict::DelayStable => EXIT_OK,
        _ => EXIT_NOT_DECIDED,
    })
}

fn cmd_dsr(a: &DsrArgs, out: &mut dyn Write) -> CliResult<i32> {
    let original = load(&a.file)?;
    let net = if a.modified { build_modified_network(&original).network } else { original };
    let g = build_dsr(&net).map_err(|e| CliError::Input(e.to_string()))?;
    let title = if a.modified { "modified network" } else { "network" };
    let dot = export_dot(&g, &DotOptions { title: Some(title.into()), highlight: Vec::new() });
    emit(a.dot.as_deref(), &dot, out)?;
    if let Some(p) = &a.json {
        let cycles = enumerate_cycles_with_budget(&g, DEFAULT_CYCLE_BUDGET).map_err(|e| CliError::Input(e.to_string()))?;
        emit(Some(p), &pretty(&cycle_report(&g, &cycles)), out)?;
    }
    Ok(EXIT_OK)
}

fn modified_sidecar(original: &ReactionNetwork, m: &ModifiedNetwork) -> Value {
    let reactions: Vec<Value> = (0..m.network.n_reactions())
        .map(|k| {
            let f = &m.rate_formulas[k];
            json!({
                "index": k,
                "reaction": m.network.describe_reaction(k),
                "parent": f.parent(),
                "parent_reaction": original.describe_reaction(f.parent()),
                "pivot": f.pivot().map(|s| original.species_names()[s].clone()),
                "rate": m.formula_text(original, k),
            })
        })
        .collect();
    json!({
        "schema_version": 1,
        "species": original.species_names(),
        "reactions": reactions,
        "duplicates": m.duplicates,
    })
}

fn cmd_modified(a: &ModifiedArgs, out: &mut dyn Write) -> CliResult<i32> {
    let original = load(&a.file)?;
    let m = build_modified_network(&original);
    emit(a.out.as_deref(), &serialize_network(&m.network), out)?;
    if let Some(p) = &a.json {
        emit(Some(p), &pretty(&modified_sidecar(&original, &m)), out)?;
    }
    Ok(EXIT_OK)
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("{what}: `{}` is not a number", t.trim())))
        })
        .collect()
}

type Resolver = fn(&ReactionNetwork, &HashMap<String, f64>) -> Result<Vec<f64>, NetworkError>;

/// Resolves `--kappa`/`--tau` against the values carried by the file.
fn resolve(
    net: &ReactionNetwork,
    arg: Option<&str>,
    what: &str,
    pick: Resolver,
) -> CliResult<Vec<f64>> {
    let mut overrides = HashMap::new();
    if let Some(arg) = arg {
        if !arg.contains('=') {
            let v = parse_list(arg, what)?;
            if v.len() != net.n_reactions() {
                return Err(CliError::Input(format!(
                    "{what}: {} values given for {} reactions",
                    v.len(),
                    net.n_reactions()
                )));
            }
            return Ok(v);
        }
        for pair in arg.split(',') {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("{what}: expected name=value, got `{pair}`")))?;
            let value = parse_list(value, what)?[0];
            overrides.insert(name.trim().to_string(), value);
        }
    }
    pick(net, &overrides).map_err(|e| {
        let free = net.free_parameters();
        CliError::Input(format!("{what}: {e}; unbound parameters: {}", free.join(", ")))
    })
}

fn parameters(net: &ReactionNetwork, p: &ParamArgs) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let kappa = resolve(net, p.kappa.as_deref(), "--kappa", |n, o| n.resolve_rates(o))?;
    let tau = resolve(net, p.tau.as_deref(), "--tau", |n, o| n.resolve_delays(o))?;
    if let Some(v) = kappa.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::Input(format!("--kappa: rate constants must be positive, got {v}")));
    }
    if let Some(v) = tau.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(CliError::Input(format!("--tau: delays must be nonnegative, got {v}")));
    }
    Ok((kappa, tau))
}

fn parse_history(arg: &str, n: usize) -> CliResult<Vec<f64>> {
    let body = arg
        .strip_prefix("const:")
        .ok_or_else(|| CliError::Input(format!("--history: expected `const:...`, got `{arg}`")))?;
    let v = parse_list(body, "--history")?;
    let v = match v.len() {
        1 => vec![v[0]; n],
        len if len == n => v,
        len => return Err(CliError::Input(format!("--history: {len} values given for {n} species"))),
    };
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(CliError::Input("--history: values must be positive".into()));
    }
    Ok(v)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<i32> {
    let net = load(&a.file)?;
    let (kappa, tau) = parameters(&net, &a.params)?;
    let x0 = parse_history(&a.history, net.n_species())?;
    let traj = simulate_dde(&net, &kappa, &tau, History::Constant(x0), a.t_end, a.dt)
        .map_err(|e| CliError::Input(format!("simulation failed: {e}")))?;
    emit(a.csv.as_deref(), &traj.to_csv(net.species_names()), out)?;
    Ok(EXIT_OK)
}

fn parse_rect(arg: &str) -> CliResult<Rect> {
    let v = parse_list(arg, "--rect")?;
    let rect = match v[..] {
        [a, b, c] => Rect::new(a, b, 0.0, c),
        [a, b, c, d] => Rect::new(a, b, c, d),
        _ => return Err(CliError::Input("--rect: expected 3 or 4 numbers".into())),
    };
    rect.map_err(|e| CliError::Input(format!("--rect: {e}")))
}

fn cmd_roots(a: &RootsArgs, out: &mut dyn Write) -> CliResult<i32> {
    let net = load(&a.file)?;
    let (kappa, tau) = parameters(&net, &a.params)?;
    let rect = parse_rect(&a.rect)?;
    let x_star = match &a.x_star {
        Some(s) => {
            let v = parse_list(s, "--x-star")?;
            if v.len() != net.n_species() || v.iter().any(|x| x.is_nan() || *x <= 0.0) {
                return Err(CliError::Input(format!("--x-star: expected {} positive values", net.n_species())));
            }
            v
        }
        None => find_equilibrium(&net, &kappa, &vec![1.0; net.n_species()])
            .map_err(|e| CliError::Input(format!("no positive equilibrium found: {e}")))?,
    };
    let scan = scan_characteristic_roots(&net, &x_star, &kappa, &tau, rect, &ScanOptions::default())
        .map_err(|e| CliError::Input(format!("root scan failed: {e}")))?;
    let mut s = format!(
        "equilibrium: {}\nscanned re [{}, {}], im [{}, {}]\nwinding number: {}\nroots with nonnegative real part: {}\n",
        x_star.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(", "),
        scan.scanned.re_min,
        scan.scanned.re_max,
        scan.scanned.im_min,
        scan.scanned.im_max,
        scan.winding,
        scan.nonnegative_real_count()
    );
    for r in &scan.roots {
        s.push_str(&format!(
            "  root {:.10} {:+.10}i  (multiplicity {}, |f| = {:.2e})\n",
            r.value.re, r.value.im, r.multiplicity, r.residual
        ));
    }
    let json_to_stdout = a.json.as_deref() == Some(Path::new("-"));
    if !json_to_stdout {
        emit(None, &s, out)?;
    }
    if let Some(p) = &a.json {
        let mut v = scan.to_json();
        v["equilibrium"] = json!(x_star);
        v["nonnegative_real_roots"] = json!(scan.nonnegative_real_count());
        emit(Some(p), &pretty(&v), out)?;
    }
    Ok(EXIT_OK)
}
