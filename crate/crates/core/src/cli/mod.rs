//! Command-line front end. Exit codes: 0 success, 1 a checked property
//! failed on the instance, 2 usage, parse or I/O error. Diagnostics go to
//! the error stream; reports embed the invocation and seed.

pub mod formats;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::curves::{tangency_graph, validate_family, CurveFamily, TangencyType};
use crate::exact_geom::{format_rational, int, parse_rational, to_f64, Rational};
use crate::extremal_graph::{
    avg_degree, bad_4tuple_scan, check_f_sparse, count_k21, count_k22, h_plus, intersection_reverse_check,
    near_regularize, prune_min_degree, K22Method, ScanOptions, Scope, Side, SlackMode, SparsenessBudget, Verdict,
};
use crate::generators::{
    gen_doubling, gen_grounded_family, gen_incidence_grid, gen_random_bipartite, gen_random_wiring, gen_vee_fan,
    GenError, RandomWiring,
};
use crate::xmono::{cell_stats, cutting_search, lower_envelope, trapezoidal_partition, vertical_visibility_pairs, CuttingParams};

pub use formats::{
    format_family, format_graph, load_family, load_family_str, load_graph, parse_family, parse_graph, save_family,
    save_graph, FormatError,
};

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "tangencies",
    version,
    about = "Build, check and measure families of 1-intersecting curves and related bipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a curve family or a graph
    #[command(subcommand)]
    Generate(Generate),
    /// Full pairwise scan of a family file (JSON); fails on violated flags
    Validate(Input),
    /// Tangency count: the total, then one line per type
    Count(Input),
    /// Lower envelope pieces (CSV)
    Envelope(Input),
    /// Vertically visible pairs (CSV)
    Visibility(Input),
    /// Trapezoidal partition cells with long/short counts (CSV)
    Partition(PartitionArgs),
    /// Bipartite graph tools
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Tangency counts against n^{4/3} and n^{3/2} over a parameter sweep
    ScalingReport(ScalingArgs),
}

#[derive(Args, Debug)]
struct Input {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Generate {
    /// Base line plus n-1 vees touching it
    VeeFan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 2^k wires with k·2^(k-1) tangencies
    Doubling {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 8k³ grounded chains realising the incidence grid
    Grounded {
        #[arg(long)]
        k: u64,
        #[arg(long, value_parser = rational_arg)]
        eps: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point-line grid summary (JSON)
    IncidenceGrid {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random n×n bipartite graph with p = n^{-(2-c)/(3-c)}
    RandomGraph {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_arg)]
        c: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random wiring diagram; every pair meets unless --rounds is given
    Wiring {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Search for a cutting instead of partitioning by the whole family
    #[arg(long)]
    cutting: bool,
    #[arg(long, default_value_t = 2)]
    r: u64,
    #[arg(long, default_value_t = 64)]
    cmax: u64,
    #[arg(long, default_value_t = 100)]
    tries: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScopeArg {
    All,
    Adjacent,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Largest smaller-side neighbourhood searched exhaustively
    #[arg(long, default_value_t = 16)]
    limit: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the cheap edge-count bound and always search or sample
    #[arg(long)]
    no_bound: bool,
}

impl ScanArgs {
    fn options(&self) -> ScanOptions {
        ScanOptions {
            limit: self.limit,
            samples: self.samples,
            seed: self.seed,
            use_bound: !self.no_bound,
        }
    }
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Split high-degree vertices into copies of degree at most d
    Regularize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to the rounded-up average degree
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delete vertices of degree below t until none remain
    Prune {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        t: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K2,2 count by both methods, with K2,1 counts per side (JSON)
    K22 {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check f-sparse sub-bineighborhoods for f(x) = q·x^e (JSON)
    SparseCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        f_q: Rational,
        #[arg(long, value_parser = rational_arg)]
        f_e: Rational,
        #[arg(long, value_enum, default_value = "all")]
        scope: ScopeArg,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Search for bad 4-tuples with budget q·x^c (JSON)
    Bad4 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        q: Rational,
        #[arg(long, value_parser = rational_arg)]
        c: Rational,
        #[arg(long)]
        max_pairs: Option<usize>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Add an adjacent pair joined to everything on the other side
    Hplus {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that no two lists share three symbols in the same order (JSON)
    ReverseCheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SweepFamily {
    VeeFan,
    Doubling,
    Grounded,
    Wiring,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, value_enum)]
    family: SweepFamily,
    /// First parameter of the sweep (n for vee-fan and wiring, k otherwise)
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
}

/// Why a command did not succeed.
enum Failure {
    Usage(String),
    Property(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::FlagMismatch(_) => Failure::Property(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        match e {
            GenError::SelfCheck(_) => Failure::Property(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Ctx<'a> {
    invocation: String,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.out.write_all(text.as_bytes()).map_err(usage)
    }

    /// Writes `text` to `path` when given, else to the output stream.
    fn emit(&mut self, path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
            None => self.print(text),
        }
    }

    fn csv_preamble(&self, seed: Option<u64>) -> String {
        format!(
            "# invocation: {}\n# seed: {}\n",
            self.invocation,
            seed.map_or("none".to_string(), |s| s.to_string())
        )
    }

    fn json(&mut self, seed: Option<u64>, mut body: Value) -> Result<(), Failure> {
        body["invocation"] = json!(self.invocation);
        body["seed"] = json!(seed);
        let text = serde_json::to_string_pretty(&body).map_err(usage)?;
        self.print(&format!("{text}\n"))
    }
}

/// Runs the command line `args` (program name first).
pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = stream.write_all(text.as_bytes());
            return e.exit_code();
        }
    };
    let invocation = std::iter::once("tangencies")
        .chain(args.iter().skip(1).map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ");
    let mut ctx = Ctx { invocation, out };
    match dispatch(cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Property(msg)) => {
            let _ = writeln!(err, "property failed: {msg}");
            1
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn dispatch(cmd: Command, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    match cmd {
        Command::Generate(g) => generate(g, ctx),
        Command::Validate(i) => validate(&i.input, ctx),
        Command::Count(i) => count(&i.input, ctx),
        Command::Envelope(i) => envelope(&i.input, ctx),
        Command::Visibility(i) => visibility(&i.input, ctx),
        Command::Partition(p) => partition(&p, ctx),
        Command::Graph(g) => graph(g, ctx),
        Command::ScalingReport(s) => scaling(&s, ctx),
    }
}

fn generate(g: Generate, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let (family, out) = match g {
        Generate::VeeFan { n, out } => (gen_vee_fan(n, None)?, out),
        Generate::Doubling { k, out } => (gen_doubling(k)?, out),
        Generate::Grounded { k, eps, out } => (gen_grounded_family(k, eps)?, out),
        Generate::Wiring { n, seed, rounds, out } => {
            let params = match rounds {
                Some(r) => RandomWiring::partial(n, seed, r),
                None => RandomWiring::precise(n, seed),
            };
            (gen_random_wiring(&params)?, out)
        }
        Generate::IncidenceGrid { k, out } => {
            let grid = gen_incidence_grid(k)?;
            let per_line: Vec<usize> = grid
                .lines
                .iter()
                .map(|&(m, c)| grid.points.iter().filter(|&&(a, b)| m * a + c == b).count())
                .collect();
            let body = json!({
                "invocation": ctx.invocation,
                "seed": Value::Null,
                "k": k,
                "points": grid.points.len(),
                "lines": grid.lines.len(),
                "incidences": grid.incidences(),
                "min_points_per_line": per_line.iter().min(),
                "max_points_per_line": per_line.iter().max(),
            });
            let text = serde_json::to_string_pretty(&body).map_err(usage)? + "\n";
            return ctx.emit(&out, &text);
        }
        Generate::RandomGraph { n, c, seed, out } => {
            let g = gen_random_bipartite(n, &c, seed)?;
            return ctx.emit(&out, &format_graph(&g));
        }
    };
    ctx.emit(&out, &format_family(&family))
}

fn validate(path: &Path, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let f = parse_family(&text)?;
    let r = validate_family(&f);
    let violated = r.violated_flags(&f.flags);
    let triples: Vec<Value> = r
        .triple_points
        .iter()
        .map(|(p, ids)| json!({"point": p.to_string(), "curves": ids}))
        .collect();
    ctx.json(
        f.seed,
        json!({
            "curves": r.curves,
            "is_1_intersecting": r.is_1_intersecting,
            "is_precisely_1": r.is_precisely_1,
            "all_x_monotone": r.all_x_monotone,
            "grounded_ok": r.grounded_ok,
            "window_ok": r.window_ok,
            "tangencies": r.tangent_pairs,
            "crossings": r.crossing_pairs,
            "disjoint_pairs": r.disjoint_pairs,
            "multi_pairs": r.multi_pairs,
            "degenerate_pairs": r.degenerate_pairs.len(),
            "non_simple": r.non_simple,
            "endpoint_contacts": r.endpoint_contacts.len(),
            "triple_points": triples,
            "violated_flags": violated,
        }),
    )?;
    if violated.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("declared flag does not hold: {}", violated.join(", "))))
    }
}

fn count(path: &Path, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let f = load_family(path)?;
    let g = tangency_graph(&f).map_err(|e| Failure::Property(e.to_string()))?;
    let by_type = g.count_by_type();
    let mut text = format!("{}\n", g.edge_count());
    for t in TangencyType::ALL {
        text += &format!("{} {}\n", t.name(), by_type.get(&t).copied().unwrap_or(0));
    }
    ctx.print(&text)
}

fn envelope(path: &Path, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let f = load_family(path)?;
    let pieces = lower_envelope(&f).map_err(usage)?;
    let mut text = ctx.csv_preamble(f.seed) + "lo,hi,id\n";
    for p in pieces {
        text += &format!("{},{},{}\n", format_rational(&p.lo), format_rational(&p.hi), p.id);
    }
    ctx.print(&text)
}

fn visibility(path: &Path, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let f = load_family(path)?;
    let pairs = vertical_visibility_pairs(&f).map_err(usage)?;
    let mut text = ctx.csv_preamble(f.seed) + "a,b\n";
    for (a, b) in pairs {
        text += &format!("{a},{b}\n");
    }
    ctx.print(&text)
}

fn partition(args: &PartitionArgs, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    let f = load_family(&args.input)?;
    let (part, stats, extra, seed) = if args.cutting {
        let params = CuttingParams::new(args.r, args.cmax, args.seed, args.tries);
        let c = cutting_search(&f, &params).map_err(|e| match e {
            crate::xmono::XmonoError::Exhausted { .. } => Failure::Property(e.to_string()),
            other => usage(other),
        })?;
        let subset: Vec<String> = c.subset.iter().map(u64::to_string).collect();
        let extra = format!(
            "# subset: {}\n# attempt: {}\n# max_load: {}\n",
            subset.join(" "),
            c.attempt,
            c.max_load
        );
        (c.partition, c.stats, extra, Some(args.seed))
    } else {
        let p = trapezoidal_partition(&f).map_err(usage)?;
        let s = cell_stats(&p, &f).map_err(usage)?;
        (p, s, String::new(), f.seed)
    };
    let mut text = ctx.csv_preamble(seed) + &extra + "cell,left,right,bottom,top,long,short\n";
    let id = |v: Option<u64>| v.map_or("none".to_string(), |i| i.to_string());
    for (i, cell) in part.cells.iter().enumerate() {
        let st = stats.iter().find(|s| s.cell == i);
        text += &format!(
            "{i},{},{},{},{},{},{}\n",
            cell.left.as_ref().map_or("-inf".to_string(), |w| format_rational(&w.x)),
            cell.right.as_ref().map_or("inf".to_string(), |w| format_rational(&w.x)),
            id(cell.bottom),
            id(cell.top),
            st.map_or(0, |s| s.long.len()),
            st.map_or(0, |s| s.short.len()),
        );
    }
    ctx.print(&text)
}

fn slack_json(s: &crate::extremal_graph::PairSlack) -> Value {
    json!({
        "u": s.u.to_string(),
        "v": s.v.to_string(),
        "mode": s.mode.name(),
        "edges": s.worst.as_ref().map(|w| w.edges),
        "size": s.worst.as_ref().map(|w| w.size),
        "slack": s.worst.as_ref().map(|w| w.value),
        "exact_slack": s.worst.as_ref().and_then(|w| w.exact.as_ref().map(format_rational)),
    })
}

fn graph(cmd: GraphCommand, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    match cmd {
        GraphCommand::Regularize { input, d, out } => {
            let g = load_graph(&input)?;
            let d = match d {
                Some(d) => d,
                None => {
                    let avg = avg_degree(&g).map_err(usage)?;
                    avg.ceil().to_integer().try_into().map_err(usage)?
                }
            };
            let r = near_regularize(&g, d).map_err(usage)?;
            ctx.emit(&out, &format_graph(&r.graph))
        }
        GraphCommand::Prune { input, t, out } => {
            let g = load_graph(&input)?;
            let p = prune_min_degree(&g, &t).map_err(usage)?;
            ctx.emit(&out, &format_graph(&p.graph))
        }
        GraphCommand::K22 { input } => {
            let g = load_graph(&input)?;
            let pairs = count_k22(&g, K22Method::Pairs);
            let edges = count_k22(&g, K22Method::Edges);
            let k21_a = count_k21(&g, Side::A).map_err(|e| Failure::Property(e.to_string()))?;
            let k21_b = count_k21(&g, Side::B).map_err(|e| Failure::Property(e.to_string()))?;
            ctx.json(
                None,
                json!({"pairs": pairs, "edges": edges, "agree": pairs == edges, "k21_pairs_in_a": k21_a, "k21_pairs_in_b": k21_b}),
            )?;
            if pairs != edges {
                return Err(Failure::Property(format!("K2,2 counts differ: {pairs} vs {edges}")));
            }
            Ok(())
        }
        GraphCommand::SparseCheck {
            input,
            f_q,
            f_e,
            scope,
            scan,
        } => {
            let g = load_graph(&input)?;
            let f = SparsenessBudget::new(f_q, f_e).map_err(usage)?;
            let scope = match scope {
                ScopeArg::All => Scope::AllPairs,
                ScopeArg::Adjacent => Scope::Adjacent,
            };
            let r = check_f_sparse(&g, &f, scope, &scan.options()).map_err(usage)?;
            let by_mode = |m: SlackMode| r.pairs.iter().filter(|p| p.mode == m).count();
            ctx.json(
                Some(scan.seed),
                json!({
                    "verdict": r.verdict.name(),
                    "scope": if scope == Scope::AllPairs { "all" } else { "adjacent" },
                    "pairs": r.pairs.len(),
                    "exhaustive": by_mode(SlackMode::Exhaustive),
                    "bounded": by_mode(SlackMode::Bounded),
                    "sampled": by_mode(SlackMode::Sampled),
                    "worst": r.worst().map(slack_json),
                }),
            )?;
            if r.verdict == Verdict::Fails {
                return Err(Failure::Property("some sub-bineighborhood exceeds the budget".into()));
            }
            Ok(())
        }
        GraphCommand::Bad4 {
            input,
            q,
            c,
            max_pairs,
            scan,
        } => {
            let g = load_graph(&input)?;
            let r = bad_4tuple_scan(&g, &q, &c, &scan.options(), max_pairs).map_err(usage)?;
            ctx.json(
                Some(scan.seed),
                json!({
                    "bad_pairs": r.bad.len(),
                    "first_bad": r.bad.first().map(|&(a, b)| json!([a, b])),
                    "scanned": r.scanned,
                    "exhaustive": r.exhaustive,
                    "bounded": r.bounded,
                    "sampled": r.sampled,
                    "truncated": r.truncated,
                }),
            )?;
            if !r.bad.is_empty() {
                return Err(Failure::Property(format!("{} pairs admit a bad 4-tuple", r.bad.len())));
            }
            Ok(())
        }
        GraphCommand::Hplus { input, out } => {
            let g = load_graph(&input)?;
            let h = h_plus(&g).map_err(usage)?;
            ctx.emit(&out, &format_graph(&h))
        }
        GraphCommand::ReverseCheck { input } => {
            let lists = formats::load_lists(&input)?;
            let r = intersection_reverse_check(&lists);
            let witness = r.as_ref().err().map(|w| json!({"i": w.i, "j": w.j, "triple": w.triple}));
            ctx.json(None, json!({"ok": r.is_ok(), "lists": lists.len(), "witness": witness}))?;
            match r {
                Ok(()) => Ok(()),
                Err(w) => Err(Failure::Property(format!(
                    "lists {} and {} share {:?} in the same order",
                    w.i, w.j, w.triple
                ))),
            }
        }
    }
}

/// One scaling-report row: `(param, n, t)`.
fn sweep_point(family: SweepFamily, param: u64, seed: u64) -> Result<(u64, u64, u64), Failure> {
    let f: CurveFamily = match family {
        SweepFamily::VeeFan => gen_vee_fan(param as usize, None)?,
        SweepFamily::Doubling => gen_doubling(u32::try_from(param).map_err(usage)?)?,
        SweepFamily::Grounded => gen_grounded_family(param, None)?,
        SweepFamily::Wiring => gen_random_wiring(&RandomWiring::precise(param as usize, seed))?,
    };
    let r = validate_family(&f);
    if !r.is_1_intersecting {
        return Err(Failure::Property(format!("family at parameter {param} is not 1-intersecting")));
    }
    Ok((param, f.len() as u64, r.tangency_count() as u64))
}

fn scaling(args: &ScalingArgs, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    if args.from > args.to {
        return Err(usage("--from must not exceed --to"));
    }
    let name = args.family.to_possible_value().expect("named").get_name().to_string();
    let mut rows = Vec::new();
    for param in args.from..=args.to {
        let (param, n, t) = sweep_point(args.family, param, args.seed)?;
        let ratio = |num: i64, den: i64| to_f64(&int(t as i64)) / (n as f64).powf(num as f64 / den as f64);
        rows.push((param, n, t, ratio(4, 3), ratio(3, 2)));
    }
    match args.format {
        ReportFormat::Csv => {
            let mut text = ctx.csv_preamble(Some(args.seed)) + "family,param,n,t,t_over_n_4_3,t_over_n_3_2\n";
            for (p, n, t, a, b) in &rows {
                text += &format!("{name},{p},{n},{t},{a:.6},{b:.6}\n");
            }
            ctx.print(&text)
        }
        ReportFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(p, n, t, a, b)| json!({"family": name, "param": p, "n": n, "t": t, "t_over_n_4_3": a, "t_over_n_3_2": b}))
                .collect();
            ctx.json(Some(args.seed), json!({ "rows": rows }))
        }
    }
}
