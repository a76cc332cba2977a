use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use burning::approx::{approx3, burn_guess, GuessOutcome, SearchMode, VertexOrder};
use burning::bincover::{fptas_driver, CoverMode};
use burning::exact::{exact_burning_number, path_dp, Caps, ExactResult};
use burning::graph::{
    classify, expand_forest, format_graph, gen_instance, parse_graph, parse_path_forest, GenSpec, Graph,
    PathForest, ShapeKind,
};
use burning::ptas::ptas_driver;
use burning::schedule::{
    check_range, parse_schedule, simulate, validate_strict, verify_certificate, BurningSchedule,
};
use burning::tree::approx2;
use burning::{ApproxResult, Counters, LowerBound};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

#[derive(Parser)]
#[command(name = "burn", version, about = "Burning schedules, lower bounds and certificates for graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a burning schedule.
    Solve(SolveArgs),
    /// Simulate a schedule and report burn times.
    Verify(VerifyArgs),
    /// Largest verified distance certificate found by the guess sweep.
    Bound {
        /// Graph file, or '-' for standard input.
        input: PathBuf,
    },
    /// Generate an instance.
    Gen(GenArgs),
    /// Time an algorithm over generated instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Exact,
    Greedy3,
    Tree2,
    PathDp,
    Fptas,
    Ptas,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Auto => "auto",
            Algo::Exact => "exact",
            Algo::Greedy3 => "greedy3",
            Algo::Tree2 => "tree2",
            Algo::PathDp => "path-dp",
            Algo::Fptas => "fptas",
            Algo::Ptas => "ptas",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Search {
    Linear,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cover {
    Exact,
    Greedy,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    /// Accuracy for the path-forest schemes, decimal or fraction.
    #[arg(long, value_parser = parse_ratio, default_value = "1/2")]
    eps: Ratio<u64>,
    /// Short-path threshold for ptas, as a multiple of the guess.
    #[arg(long, value_parser = parse_ratio, default_value = "3")]
    alpha: Ratio<u64>,
    /// Vertex order for greedy3: 'asc' or 'random:SEED'.
    #[arg(long, value_parser = parse_order, default_value = "asc")]
    order: VertexOrder,
    /// Root for tree2 (default 0).
    #[arg(long)]
    root: Option<usize>,
    #[arg(long, value_enum, default_value = "binary")]
    search: Search,
    /// Covering solver used by fptas.
    #[arg(long, value_enum, default_value = "exact")]
    cover: Cover,
    /// Write the schedule here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report wall time (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// Edge list or 'paths' file, or '-' for standard input.
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    schedule: PathBuf,
    /// Also require distinct activators that are not burning when lit.
    #[arg(long)]
    strict: bool,
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenType {
    Gnp,
    Tree,
    Paths,
    Gadget,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "type", value_enum)]
    kind: GenType,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    /// Number of paths.
    #[arg(long, default_value_t = 3)]
    b: usize,
    #[arg(long, default_value_t = 1)]
    min_len: usize,
    #[arg(long, default_value_t = 10)]
    max_len: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// greedy3 runs on G(n, p), tree2 on random trees.
    #[arg(long, value_enum, default_value = "greedy3")]
    algo: Algo,
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    sizes: Vec<usize>,
    /// Expected average degree of the G(n, p) instances.
    #[arg(long, default_value_t = 8.0)]
    degree: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    /// Bad input: exit 1.
    Input(String),
    /// Well-formed input the command cannot satisfy: exit 2.
    Semantic(String),
}

type CmdResult = Result<String, Failure>;

fn input_err(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn semantic_err(e: impl ToString) -> Failure {
    Failure::Semantic(e.to_string())
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let bad = || format!("expected a positive decimal or fraction, got {s:?}");
    let r = if let Some((a, b)) = s.split_once('/') {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Ratio::new(int * scale + frac, scale)
    } else {
        Ratio::from_integer(s.parse().map_err(|_| bad())?)
    };
    if r == Ratio::from_integer(0) {
        return Err(bad());
    }
    Ok(r)
}

fn parse_order(s: &str) -> Result<VertexOrder, String> {
    match s {
        "asc" => Ok(VertexOrder::Ascending),
        _ => s
            .strip_prefix("random:")
            .and_then(|seed| seed.parse().ok())
            .map(VertexOrder::Random)
            .ok_or_else(|| format!("expected 'asc' or 'random:SEED', got {s:?}")),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
    }
}

/// A graph plus, for path forests, the map from the sorted forest layout
/// back to the input's vertex ids.
struct Instance {
    graph: Graph,
    forest: Option<(PathForest, Vec<usize>)>,
}

impl Instance {
    fn load(path: &Path) -> Result<Self, Failure> {
        let text = read_input(path)?;
        let is_paths = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .is_some_and(|l| l.split_whitespace().next() == Some("paths"));
        if is_paths {
            let forest = parse_path_forest(&text).map_err(input_err)?;
            let graph = expand_forest(&forest);
            let layout = (0..graph.n()).collect();
            return Ok(Instance { graph, forest: Some((forest, layout)) });
        }
        let graph = parse_graph(&text).map_err(input_err)?;
        let forest = match (graph.n() > 0).then(|| graph.path_components()).flatten() {
            Some(mut comps) => {
                comps.sort_by_key(Vec::len);
                let forest = PathForest::new(comps.iter().map(Vec::len).collect()).map_err(input_err)?;
                Some((forest, comps.concat()))
            }
            None => None,
        };
        Ok(Instance { graph, forest })
    }

    fn require_forest(&self) -> Result<&(PathForest, Vec<usize>), Failure> {
        self.forest.as_ref().ok_or_else(|| input_err("input is not a path forest"))
    }
}

fn caps() -> Caps {
    Caps::default()
}

struct Solved {
    algo: Algo,
    result: ApproxResult,
    /// Whether the schedule uses forest layout ids.
    on_layout: bool,
    extra: Vec<(String, String)>,
}

fn dispatch(inst: &Instance, args: &SolveArgs) -> Result<Solved, Failure> {
    let algo = match args.algo {
        Algo::Auto => auto_algo(inst),
        a => a,
    };
    let search = match args.search {
        Search::Linear => SearchMode::Linear,
        Search::Binary => SearchMode::Binary,
    };
    let mut extra = Vec::new();
    let (result, on_layout) = match algo {
        Algo::Auto => unreachable!(),
        Algo::Exact => {
            let r = exact_burning_number(&inst.graph, &caps()).map_err(semantic_err)?;
            (exact_result(r, &inst.graph, false), false)
        }
        Algo::Greedy3 => (approx3(&inst.graph, &args.order, search), false),
        Algo::Tree2 => (approx2(&inst.graph, args.root, search).map_err(input_err)?, false),
        Algo::PathDp => {
            let (forest, _) = inst.require_forest()?;
            let r = path_dp(forest, &caps()).map_err(semantic_err)?;
            (exact_result(r, &expand_forest(forest), true), true)
        }
        Algo::Fptas => {
            let (forest, _) = inst.require_forest()?;
            let mode = match args.cover {
                Cover::Exact => CoverMode::Exact,
                Cover::Greedy => CoverMode::Greedy,
            };
            let rep = fptas_driver(forest, args.eps, mode).map_err(semantic_err)?;
            extra.push(("canonical_constant".into(), rep.canonical_constant.to_string()));
            extra.push(("eps0".into(), format!("{:.6}", rep.eps0)));
            for w in rep.warnings {
                extra.push(("warning".into(), w));
            }
            (rep.result, true)
        }
        Algo::Ptas => {
            let (forest, _) = inst.require_forest()?;
            let k = args.eps.denom().div_ceil(*args.eps.numer()) + 1;
            extra.push(("k".into(), k.to_string()));
            (ptas_driver(forest, args.eps, args.alpha, &caps()), true)
        }
    };
    Ok(Solved { algo, result, on_layout, extra })
}

/// Path forests go to the exact DP when it fits, else to the covering
/// scheme for near-regular lengths or the grouping scheme; trees to tree2.
fn auto_algo(inst: &Instance) -> Algo {
    if let Some((forest, _)) = &inst.forest {
        let states = forest
            .lengths()
            .iter()
            .fold(forest.path_count() as u128, |acc, &l| acc.saturating_mul(l as u128 + 1));
        let l = forest.lengths();
        return if states <= caps().dp_states {
            Algo::PathDp
        } else if l.len() >= 2 && l[l.len() - 1] <= 2 * l[0] {
            Algo::Fptas
        } else {
            Algo::Ptas
        };
    }
    match classify(&inst.graph).kind {
        ShapeKind::SingleTree => Algo::Tree2,
        _ => Algo::Greedy3,
    }
}

fn exact_result(r: ExactResult, g: &Graph, dp: bool) -> ApproxResult {
    let mut counters = Counters::default();
    if dp {
        counters.dp_states = r.explored;
    } else {
        counters.covering_nodes = r.explored;
    }
    ApproxResult {
        rounds: simulate(g, &r.schedule).completion_round,
        schedule: r.schedule,
        opt_lower_bound: LowerBound::Certified(r.burning_number),
        ratio_bound: Ratio::from_integer(1),
        guess: r.burning_number,
        certificate: None,
        counters,
    }
}

fn run_solve(args: &SolveArgs) -> CmdResult {
    let inst = Instance::load(&args.input)?;
    let start = Instant::now();
    let solved = dispatch(&inst, args)?;
    let micros = start.elapsed().as_micros();
    let r = &solved.result;
    let schedule = if solved.on_layout {
        let (_, layout) = inst.require_forest()?;
        BurningSchedule::new(r.schedule.activators.iter().map(|&v| layout[v]).collect())
    } else {
        r.schedule.clone()
    };
    let outcome = simulate(&inst.graph, &schedule);
    if !outcome.complete || outcome.completion_round != r.rounds {
        return Err(semantic_err(format!(
            "internal check failed: schedule re-simulates to {} rounds (complete = {}), solver reported {}",
            outcome.completion_round, outcome.complete, r.rounds
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "algorithm {}", solved.algo.name());
    let _ = writeln!(out, "n {}", inst.graph.n());
    let _ = writeln!(out, "m {}", inst.graph.m());
    let _ = writeln!(out, "rounds {}", r.rounds);
    let _ = writeln!(out, "lower_bound {}", r.opt_lower_bound);
    let _ = writeln!(out, "ratio_bound {}", r.ratio_bound);
    let _ = writeln!(out, "guess {}", r.guess);
    if let Some(c) = &r.certificate {
        let ws: Vec<String> = c.witnesses.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "certificate {} {}", c.r, ws.join(" "));
    }
    for (k, v) in &solved.extra {
        let _ = writeln!(out, "{k} {v}");
    }
    let c = r.counters;
    let _ = writeln!(out, "edge_traversals {}", c.edge_traversals);
    let _ = writeln!(out, "guess_calls {}", c.guess_calls);
    let _ = writeln!(out, "dp_states {}", c.dp_states);
    let _ = writeln!(out, "covering_nodes {}", c.covering_nodes);
    if args.timing {
        let _ = writeln!(out, "micros {micros}");
    }
    let lines: String = schedule.activators.iter().enumerate().map(|(i, v)| format!("{} {v}\n", i + 1)).collect();
    match &args.out {
        Some(path) => {
            fs::write(path, format!("{lines}rounds {}\n", r.rounds))
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        }
        None => out.push_str(&lines),
    }
    Ok(out)
}

fn run_verify(args: &VerifyArgs) -> CmdResult {
    let inst = Instance::load(&args.input)?;
    let s = parse_schedule(&read_input(&args.schedule)?).map_err(input_err)?;
    check_range(&s, inst.graph.n()).map_err(input_err)?;
    let outcome = simulate(&inst.graph, &s);
    let mut out = String::new();
    let _ = writeln!(out, "complete {}", outcome.complete);
    let _ = writeln!(out, "rounds {}", outcome.completion_round);
    let strict_ok = validate_strict(&inst.graph, &s);
    if args.strict {
        let _ = writeln!(out, "strict {strict_ok}");
    }
    for (v, t) in outcome.burn_time.iter().enumerate() {
        match t {
            Some(t) => {
                let _ = writeln!(out, "burn_time {v} {t}");
            }
            None => {
                let _ = writeln!(out, "burn_time {v} never");
            }
        }
    }
    if !outcome.complete {
        print!("{out}");
        return Err(semantic_err("schedule does not burn every vertex"));
    }
    if args.strict && !strict_ok {
        print!("{out}");
        return Err(semantic_err("schedule is not strict-valid"));
    }
    Ok(out)
}

fn run_bound(input: &Path) -> CmdResult {
    let inst = Instance::load(input)?;
    let g = &inst.graph;
    let order: Vec<usize> = (0..g.n()).collect();
    let mut best = None;
    for guess in 1..=g.n() + 1 {
        match burn_guess(g, guess, &order).outcome {
            GuessOutcome::BadGuess(c) if verify_certificate(g, &c) => best = Some(c),
            GuessOutcome::BadGuess(_) => {}
            GuessOutcome::Schedule(_) => break,
        }
    }
    Ok(match best {
        Some(c) => {
            let ws: Vec<String> = c.witnesses.iter().map(ToString::to_string).collect();
            format!("certificate {}\nlower_bound {}\nwitnesses {}\n", c.r, c.r, ws.join(" "))
        }
        None => "certificate none\nlower_bound 0\n".to_string(),
    })
}

fn run_gen(args: &GenArgs) -> CmdResult {
    let spec = match args.kind {
        GenType::Gnp => GenSpec::Gnp { n: args.n, p: args.p },
        GenType::Tree => GenSpec::RandomTree { n: args.n },
        GenType::Paths => GenSpec::Paths { b: args.b, min_len: args.min_len, max_len: args.max_len },
        GenType::Gadget => GenSpec::Gadget { k: args.k },
    };
    let g = gen_instance(&spec, args.seed).map_err(input_err)?;
    Ok(format_graph(&g))
}

fn run_bench(args: &BenchArgs) -> CmdResult {
    if !matches!(args.algo, Algo::Greedy3 | Algo::Tree2) {
        return Err(input_err("bench supports --algo greedy3 or tree2"));
    }
    let mut out = String::from("# n m rounds lower_bound micros traversals\n");
    for (i, &n) in args.sizes.iter().enumerate() {
        let seed = args.seed.wrapping_add(i as u64);
        let spec = match args.algo {
            Algo::Tree2 => GenSpec::RandomTree { n },
            _ => GenSpec::Gnp { n, p: if n > 1 { (args.degree / (n - 1) as f64).min(1.0) } else { 0.0 } },
        };
        let g = gen_instance(&spec, seed).map_err(input_err)?;
        let start = Instant::now();
        let r = match args.algo {
            Algo::Tree2 => approx2(&g, None, SearchMode::Binary).map_err(input_err)?,
            _ => approx3(&g, &VertexOrder::Ascending, SearchMode::Binary),
        };
        let micros = start.elapsed().as_micros();
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            g.n(),
            g.m(),
            r.rounds,
            r.opt_lower_bound,
            micros,
            r.counters.edge_traversals
        );
    }
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on bad arguments; those are input errors here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    let res = match &cli.cmd {
        Cmd::Solve(a) => run_solve(a),
        Cmd::Verify(a) => run_verify(a),
        Cmd::Bound { input } => run_bound(input),
        Cmd::Gen(a) => run_gen(a),
        Cmd::Bench(a) => run_bench(a),
    };
    match res {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(parse_ratio(".5").unwrap(), Ratio::new(1, 2));
        for bad in ["0", "1/0", "x", "-1", "0.0"] {
            assert!(parse_ratio(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(parse_order("asc").unwrap(), VertexOrder::Ascending);
        assert_eq!(parse_order("random:7").unwrap(), VertexOrder::Random(7));
        assert!(parse_order("random:").is_err());
        assert!(parse_order("desc").is_err());
    }
}
