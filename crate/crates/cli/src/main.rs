use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rho1::diagram::UprightDiagram;
use rho1::grules;
use rho1::invariant::{invariant_pair_with, InvariantPair};
use rho1::table::{compute_table, diagram_from_dt, diagram_from_pd, read_table, separation, KnotRecord};
use rho1::verify::{oracle_sweep, random_move_trials, scrambled_corpus};
use rho1::Exec;

/// Knot tables shipped with the repository, used by `verify` as its diagram corpus.
const BUNDLED: &str = include_str!("../../../data/knots_le12.csv");

#[derive(Parser)]
#[command(name = "rho1", version, about = "Alexander polynomial and the rho_1 invariant of knots")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute (Delta, rho_1) of one diagram.
    Compute {
        #[arg(long, conflicts_with_all = ["dt", "json"])]
        pd: Option<String>,
        #[arg(long, conflicts_with = "json")]
        dt: Option<String>,
        /// Upright diagram as JSON; `-` reads standard input.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also print both polynomials with content and (T-1)^2 split off.
        #[arg(long)]
        factored: bool,
    },
    /// Compute every row of a `name,dt` table.
    Table {
        file: PathBuf,
        /// Worker threads; 1 runs sequentially, 0 uses every core.
        #[arg(long, default_value_t = 0)]
        parallel: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        /// Leave out the timing column so output is byte-for-byte reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Count distinct (Delta, rho_1) values over a table.
    Separation {
        file: PathBuf,
        /// Identify each value with its mirror image.
        #[arg(long)]
        unoriented: bool,
        #[arg(long, default_value_t = 0)]
        parallel: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Randomized invariance trials, traffic-oracle comparisons and g-rules replay.
    Verify {
        #[arg(long)]
        moves: Option<usize>,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        grules: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Replay the symbolic move identities.
    GrulesCheck,
}

/// Exit statuses: 0 ok, 1 verification failure, 2 input error.
enum Failure {
    Verify,
    Input(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Compute { pd, dt, json, format, factored } => compute(pd, dt, json, format, factored),
        Cmd::Table { file, parallel, out, format, no_timing } => table(&file, parallel, out, format, no_timing),
        Cmd::Separation { file, unoriented, parallel, format } => separation_cmd(&file, unoriented, parallel, format),
        Cmd::Verify { moves, oracle, grules, seed } => verify(moves, oracle, grules, seed),
        Cmd::GrulesCheck => grules_check(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn input_diagram(pd: Option<String>, dt: Option<String>, json: Option<PathBuf>) -> Result<UprightDiagram, Failure> {
    let bad = |e: &dyn std::fmt::Display| Failure::Input(e.to_string());
    match (pd, dt, json) {
        (Some(pd), _, _) => diagram_from_pd(&pd).map_err(|e| bad(&e)),
        (_, Some(dt), _) => diagram_from_dt(&dt).map_err(|e| bad(&e)),
        (_, _, Some(path)) => {
            let text = if path.as_os_str() == "-" {
                io::read_to_string(io::stdin())?
            } else {
                std::fs::read_to_string(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
            };
            UprightDiagram::from_json_str(&text).map_err(|e| bad(&e))
        }
        _ => Err(Failure::Input("one of --pd, --dt or --json is required".into())),
    }
}

fn record_json(name: &str, p: &InvariantPair, seconds: Option<f64>) -> serde_json::Value {
    let mut v = json!({
        "name": name,
        "delta": p.delta.to_json(),
        "rho1": p.rho1.to_json(),
        "w": p.writhe,
        "phi": p.total_rotation,
    });
    if let Some(s) = seconds {
        v["seconds"] = json!(s);
    }
    v
}

fn compute(pd: Option<String>, dt: Option<String>, json: Option<PathBuf>, format: Format, factored: bool) -> Result<(), Failure> {
    let d = input_diagram(pd, dt, json)?;
    let start = Instant::now();
    let p = invariant_pair_with(&d, Exec::default()).map_err(|e| Failure::Input(e.to_string()))?;
    let seconds = start.elapsed().as_secs_f64();
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            let mut v = record_json("input", &p, Some(seconds));
            v["delta_text"] = json!(p.delta.to_text());
            v["rho1_text"] = json!(p.rho1.to_text());
            if factored {
                v["delta_factored"] = json!(p.delta.factored_text());
                v["rho1_factored"] = json!(p.rho1.factored_text());
            }
            writeln!(out, "{v}")?;
        }
        Format::Text => {
            writeln!(out, "delta: {}", p.delta.to_text())?;
            writeln!(out, "rho1: {}", p.rho1.to_text())?;
            if factored {
                writeln!(out, "delta factored: {}", p.delta.factored_text())?;
                writeln!(out, "rho1 factored: {}", p.rho1.factored_text())?;
            }
            writeln!(out, "crossings: {}, writhe: {}, rotation: {}", p.crossing_count, p.writhe, p.total_rotation)?;
        }
    }
    for w in rho1::invariant::structure_warnings(&p) {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn load(file: &PathBuf, parallel: usize) -> Result<Vec<KnotRecord>, Failure> {
    let recs = read_table(file).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    let exec = if parallel == 1 { Exec::Sequential } else { Exec::Parallel };
    let out = Exec::with_threads(parallel, || compute_table(&recs, exec));
    let failed: Vec<&KnotRecord> = out.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        eprintln!("skipped {}: {}", r.name, r.error.as_deref().unwrap_or(""));
    }
    if !failed.is_empty() {
        eprintln!("{} of {} rows skipped", failed.len(), out.len());
    }
    Ok(out)
}

fn table(file: &PathBuf, parallel: usize, out: Option<PathBuf>, format: TableFormat, no_timing: bool) -> Result<(), Failure> {
    let recs = load(file, parallel)?;
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    if format == TableFormat::Csv && !recs.is_empty() {
        writeln!(w, "name,delta,rho1{}", if no_timing { "" } else { ",seconds" })?;
    }
    for r in &recs {
        let Some(p) = &r.computed else { continue };
        let secs = (!no_timing).then_some(r.wall_time);
        match format {
            TableFormat::Json => writeln!(w, "{}", record_json(&r.name, p, secs))?,
            TableFormat::Csv => {
                write!(w, "{},{},{}", r.name, p.delta.to_text(), p.rho1.to_text())?;
                match secs {
                    Some(s) => writeln!(w, ",{s:.6}")?,
                    None => writeln!(w)?,
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn separation_cmd(file: &PathBuf, unoriented: bool, parallel: usize, format: Format) -> Result<(), Failure> {
    let recs = load(file, parallel)?;
    let rep = separation(&recs, unoriented);
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rep).expect("report serializes"))?,
        Format::Text => {
            writeln!(out, "total: {}", rep.total_knots)?;
            writeln!(out, "distinct: {}", rep.distinct_values)?;
            writeln!(out, "deficit: {}", rep.deficit)?;
            for class in &rep.collision_classes {
                writeln!(out, "collision: {}", class.join(" "))?;
            }
        }
    }
    Ok(())
}

/// Table knots up to `max` crossings, every `stride`-th one beyond `dense` crossings.
fn corpus(max: usize, dense: usize, stride: usize) -> Vec<UprightDiagram> {
    let recs = rho1::table::read_table_from(BUNDLED.as_bytes()).expect("bundled table parses");
    let mut out = vec![UprightDiagram::unknot()];
    let mut sparse = 0;
    for r in recs {
        let n = r.dt.split_whitespace().count();
        if n > max {
            continue;
        }
        if n > dense {
            sparse += 1;
            if sparse % stride != 0 {
                continue;
            }
        }
        out.push(diagram_from_dt(&r.dt).expect("bundled codes convert"));
    }
    out
}

fn verify(moves: Option<usize>, oracle: bool, grules_flag: bool, seed: u64) -> Result<(), Failure> {
    let all = moves.is_none() && !oracle && !grules_flag;
    let mut ok = true;
    let mut out = io::stdout().lock();
    if let Some(n) = moves.or(all.then_some(200)) {
        let base = corpus(12, 7, 60);
        let mut diagrams = base.clone();
        diagrams.extend(scrambled_corpus(&base[..base.len().min(40)], 4, 12, seed));
        let rep = random_move_trials(&diagrams, n, seed);
        let status = if rep.passed() { "pass" } else { "FAIL" };
        writeln!(out, "moves: {} trials ({} forward, {} backward), seed {seed}: {status}", rep.trials, rep.forward, rep.backward)?;
        for f in &rep.failures {
            writeln!(out, "counterexample: {}", serde_json::to_string(f).expect("serializes"))?;
        }
        ok &= rep.passed();
    }
    if oracle || all {
        let mut small: Vec<UprightDiagram> = corpus(5, 5, 1);
        small.extend([rho1::diagram::samples::d2(), rho1::diagram::samples::d3()]);
        let rep = oracle_sweep(&small, &[0.8, 0.9, 1.1], 2000, 1e-6, Exec::default());
        let status = if rep.passed() { "pass" } else { "FAIL" };
        writeln!(
            out,
            "oracle: {} comparisons on {} diagrams, max error {:.3e}: {status}",
            rep.comparisons,
            small.len(),
            rep.max_error
        )?;
        for f in rep.failures.iter().take(20) {
            writeln!(out, "  {f}")?;
        }
        ok &= rep.passed();
    }
    if grules_flag || all {
        ok &= print_grules(&mut out)?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn print_grules(out: &mut impl Write) -> Result<bool, Failure> {
    let reports = grules::check_all().map_err(|e| Failure::Input(e.to_string()))?;
    let mut ok = true;
    for r in reports {
        if r.holds {
            writeln!(out, "{}: holds", r.kind)?;
        } else {
            ok = false;
            writeln!(out, "{}: fails, difference {}", r.kind, r.reduced_difference)?;
        }
    }
    Ok(ok)
}

fn grules_check() -> Result<(), Failure> {
    if print_grules(&mut io::stdout().lock())? {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
