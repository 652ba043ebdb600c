mod property;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use polyparam::model::{parse_model, Pta};
use polyparam::oracle::{grid_check, Check, GridReport};
use polyparam::poly::PolyhedralSet;
use polyparam::synthesis::{synthesize, Algorithm, Property, Status, SynthesisRequest, SynthesisResult};

use property::{parse_property, resolve_locations, resolve_valuation, PropertySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OracleMode {
    Off,
    /// Integer points plus this many rational samples.
    Grid(usize),
}

fn parse_oracle_mode(s: &str) -> Result<OracleMode, String> {
    match s {
        "off" => Ok(OracleMode::Off),
        "grid" | "integer-grid" => Ok(OracleMode::Grid(0)),
        _ => s
            .strip_prefix("grid+rational:")
            .and_then(|n| n.parse().ok())
            .map(OracleMode::Grid)
            .ok_or_else(|| format!("expected off, grid or grid+rational:N, got `{s}`")),
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(&s.to_ascii_lowercase()).ok_or_else(|| {
        let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!("unknown algorithm `{s}`; expected one of {}", names.join(", "))
    })
}

/// Parameter synthesis for bounded parametric timed automata.
#[derive(Debug, Parser)]
#[command(name = "polyparam", version)]
struct Cli {
    /// Model file.
    model: PathBuf,
    /// `EF {l1}`, `AF {l1, l2}` or `TP at p=1, q=2`.
    #[arg(long, conflicts_with = "prop_file", required_unless_present = "prop_file")]
    prop: Option<String>,
    /// File holding the property.
    #[arg(long)]
    prop_file: Option<PathBuf>,
    /// rief, riaf, ritp, ef, af, tp, ief or iaf; defaults to the terminating one for the property.
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    /// State budget for ef, af and tp.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    output: Output,
    /// Write the explored symbolic tree as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// off, grid or grid+rational:N
    #[arg(long, value_parser = parse_oracle_mode, default_value = "off")]
    oracle_check: OracleMode,
}

struct Run {
    pta: Pta,
    prop_text: String,
    algorithm: Algorithm,
    result: SynthesisResult,
    report: Option<GridReport>,
}

fn default_algorithm(spec: &PropertySpec) -> Algorithm {
    match spec {
        PropertySpec::Reach(_) => Algorithm::Rief,
        PropertySpec::Unavoid(_) => Algorithm::Riaf,
        PropertySpec::Trace(_) => Algorithm::Ritp,
    }
}

fn execute(cli: &Cli) -> Result<Run, String> {
    let model_text = fs::read_to_string(&cli.model).map_err(|e| format!("{}: {e}", cli.model.display()))?;
    let pta = parse_model(&model_text).map_err(|e| format!("{}: {e}", cli.model.display()))?;
    let prop_text = match (&cli.prop, &cli.prop_file) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, None) => return Err("no property given".into()),
    };
    let prop_text = prop_text.trim().to_string();
    let spec = parse_property(&prop_text)?;
    let algorithm = cli.algorithm.unwrap_or_else(|| default_algorithm(&spec));
    if algorithm.property_kind() != spec.kind() {
        return Err(format!(
            "algorithm {} checks {} properties, not {}",
            algorithm.name(),
            algorithm.property_kind(),
            spec.kind()
        ));
    }
    if cli.budget.is_some() && !matches!(algorithm, Algorithm::Ef | Algorithm::Af | Algorithm::Tp) {
        return Err("--budget applies to ef, af and tp only".into());
    }
    let (property, check) = match &spec {
        PropertySpec::Reach(names) => {
            let g = resolve_locations(&pta, names)?;
            (Property::Reach(g.clone()), Check::Reach(g))
        }
        PropertySpec::Unavoid(names) => {
            let g = resolve_locations(&pta, names)?;
            (Property::Unavoid(g.clone()), Check::Unavoid(g))
        }
        PropertySpec::Trace(values) => {
            let v = resolve_valuation(&pta, values)?;
            (Property::TracePreserve(v.clone()), Check::Trace(v))
        }
    };
    let mut req = SynthesisRequest::new(&pta, property, algorithm.variant());
    if let Some(b) = cli.budget {
        req = req.with_budget(b);
    }
    if cli.dot.is_some() {
        req = req.with_trace();
    }
    let result = synthesize(&req).map_err(|e| e.to_string())?;
    let report = match cli.oracle_check {
        OracleMode::Off => None,
        OracleMode::Grid(n) => Some(grid_check(&pta, &check, &result.valuations, n).map_err(|e| e.to_string())?),
    };
    if let (Some(path), Some(trace)) = (&cli.dot, &result.trace) {
        fs::write(path, trace.to_dot()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(Run {
        pta,
        prop_text,
        algorithm,
        result,
        report,
    })
}

/// Disjuncts as arrays of canonical constraints; `[]` is the universe.
fn constraint_arrays(set: &PolyhedralSet) -> Vec<Vec<String>> {
    set.disjuncts()
        .iter()
        .map(|d| match d.to_text().as_str() {
            "true" => Vec::new(),
            t => t.split(" & ").map(String::from).collect(),
        })
        .collect()
}

fn to_json(run: &Run) -> Value {
    let s = &run.result.stats;
    let mut v = json!({
        "algorithm": run.algorithm.name(),
        "property": run.prop_text,
        "params": run.pta.params,
        "status": run.result.status.as_str(),
        "result": constraint_arrays(&run.result.valuations),
        "text": run.result.valuations.to_text(),
        "stats": {
            "states_explored": s.states_explored,
            "cache_hits": s.cache_hits,
            "passed_hits": s.passed_hits,
            "max_keys_per_location": s.max_keys_per_location,
            "max_constant": s.max_constant,
        },
    });
    if let Some(r) = &run.report {
        v["oracle"] = r.to_json();
    }
    v
}

fn print_run(run: &Run, output: Output) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match output {
        Output::Text => {
            writeln!(out, "{}", run.result.valuations.to_text())?;
            writeln!(out, "status: {}", run.result.status.as_str())?;
            if let Some(r) = &run.report {
                write!(out, "{}", r.to_table())?;
            }
        }
        Output::Json => writeln!(out, "{}", serde_json::to_string_pretty(&to_json(run))?)?,
    }
    out.flush()
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for budget exhaustion.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = print_run(&run, cli.output) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
        return ExitCode::from(1);
    }
    let s = &run.result.stats;
    eprintln!(
        "{}: {} states, {} cache hits, {} passed hits, M = {}, {:.3?}",
        run.algorithm.name(),
        s.states_explored,
        s.cache_hits,
        s.passed_hits,
        s.max_constant,
        s.wall_time
    );
    match run.result.status {
        Status::Complete => ExitCode::SUCCESS,
        Status::BudgetExhausted => ExitCode::from(2),
    }
}
