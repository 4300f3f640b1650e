//! Command-line front end: omega computations, explicit constructions,
//! theorem verification, seeded searches and DIMACS export.
//!
//! Exit codes: 0 ok, 1 refuted verdicts among asserted claims, 2 usage,
//! 3 resource limits.

use clap::{Parser, Subcommand, ValueEnum};
use noncomm_core::clique::{
    build_graph, max_clique, read_dimacs, reduce_by_classes, write_dimacs, CliqueResult, NcGraph,
};
use noncomm_core::gf::Field;
use noncomm_core::lines::{build_config_set, construct_3line_plus_point, construct_4line,
    search_m_lines};
use noncomm_core::structures::{
    abelian_decomposition_m, cc, construct_2q_set_m, construct_q_plus_1_in_centralizer,
    enumerate_structure, is_pairwise_noncommuting, partition_uu4, Point3, StructureKind,
};
use noncomm_core::unitriangular::{enumerate_group, UtMatrix};
use noncomm_core::verify::{run_suite, tsv_summary, Suite};
use serde_json::json;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "noncomm", about = "Non-commuting sets in unipotent groups over F_q")]
struct Cli {
    /// Field descriptor p^r[:modulus-hex], e.g. 3, 2^2:7. Repeatable for verify.
    #[arg(long, global = true)]
    field: Vec<String>,

    /// Seed for randomized searches; all randomness flows from here.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Time cap in seconds for clique searches.
    #[arg(long, global = true)]
    time_cap: Option<f64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
    Dimacs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Target {
    M,
    Q,
    N,
    Uu,
    S0,
    T1,
    N0,
    N1,
    N1anti,
    N2,
    N3,
    N3anti,
    C,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximum non-commuting set size of a structure or group part.
    Omega {
        #[arg(value_enum)]
        target: Option<Target>,
        /// Matrix dimension for UU / S0 targets.
        #[arg(long, default_value_t = 4)]
        n: u8,
        /// Canonical index of m for the centralizer target C(m,1,0).
        #[arg(long, default_value_t = 0)]
        m: u64,
        /// Pre-reduce by centralizer classes before solving.
        #[arg(long)]
        reduce: bool,
        /// Solve a DIMACS file instead of a built structure.
        #[arg(long)]
        from_dimacs: Option<PathBuf>,
    },
    /// Run theorem-level verification suites.
    Verify {
        suite: String,
        /// Cross-check formulas against exhaustive search where feasible.
        #[arg(long)]
        direct: bool,
    },
    /// Emit an explicit construction as a file or to stdout.
    Construct {
        what: String,
        /// Coefficient triple b1,b2,b3 for the four-line construction.
        #[arg(long)]
        b: Option<String>,
        /// Canonical index of m for centralizer constructions.
        #[arg(long, default_value_t = 0)]
        m: u64,
    },
    /// Seeded search for an m-line configuration.
    Search {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Export a structure's non-commuting graph.
    Export {
        #[arg(value_enum)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        n: u8,
        #[arg(long, default_value_t = 0)]
        m: u64,
    },
    /// Print field parameters and the resolved modulus.
    FieldInfo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
struct CliError {
    msg: String,
    code: u8,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            msg: msg.into(),
            code: EXIT_USAGE,
        }
    }

    fn resource(msg: impl Into<String>) -> CliError {
        CliError {
            msg: msg.into(),
            code: EXIT_RESOURCE,
        }
    }

    fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

fn parse_fields(cli: &Cli) -> Result<Vec<Field>, CliError> {
    if cli.field.is_empty() {
        return Err(CliError::usage("at least one --field descriptor is required"));
    }
    cli.field
        .iter()
        .map(|s| Field::parse_descriptor(s).map_err(|e| CliError::usage(e.to_string())))
        .collect()
}

fn single_field(cli: &Cli) -> Result<Field, CliError> {
    let mut fields = parse_fields(cli)?;
    if fields.len() != 1 {
        return Err(CliError::usage("this command takes exactly one --field"));
    }
    Ok(fields.remove(0))
}

fn time_cap(cli: &Cli) -> Option<Duration> {
    cli.time_cap.map(Duration::from_secs_f64)
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::resource(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn banner(cli: &Cli, cmd: &str, field: &str) {
    eprintln!(
        "# noncomm {cmd} field={field} seed={} threads={} time-cap={} format={}",
        cli.seed,
        cli.threads.map_or("auto".into(), |t| t.to_string()),
        cli.time_cap.map_or("none".into(), |t| t.to_string()),
        match cli.format {
            Format::Text => "text",
            Format::Json => "json",
            Format::Tsv => "tsv",
            Format::Dimacs => "dimacs",
        }
    );
}

/// Items of a target plus their text labels, for graphs and witnesses.
enum Built {
    Points(Vec<Point3>),
    Matrices(Vec<UtMatrix>),
}

impl Built {
    fn len(&self) -> usize {
        match self {
            Built::Points(v) => v.len(),
            Built::Matrices(v) => v.len(),
        }
    }

    fn label(&self, f: &Field, i: usize) -> String {
        match self {
            Built::Points(v) => v[i].to_text(),
            Built::Matrices(v) => v[i].to_text(f),
        }
    }
}

fn build_target(target: Target, f: &Field, n: u8, m: u64) -> Result<Built, CliError> {
    let kind = match target {
        Target::M => Some(StructureKind::M),
        Target::Q => Some(StructureKind::Q),
        Target::N => Some(StructureKind::N),
        _ => None,
    };
    if let Some(kind) = kind {
        return Ok(Built::Points(enumerate_structure(kind, f).points));
    }
    if target == Target::C {
        if m >= f.q() {
            return Err(CliError::usage(format!("--m {m} out of range for q = {}", f.q())));
        }
        let ms = enumerate_structure(StructureKind::M, f);
        let p = Point3::new_m(f.elt(m), f.one(), f.zero());
        let cent: Vec<Point3> = ms.points.into_iter().filter(|&r| cc(f, p, r)).collect();
        return Ok(Built::Points(cent));
    }
    let group = match target {
        Target::Uu | Target::S0 => enumerate_group(n, f),
        _ => enumerate_group(4, f),
    }
    .map_err(|e| CliError::resource(e.to_string()))?;
    let mats = match target {
        Target::Uu => group,
        Target::S0 => group
            .into_iter()
            .filter(|a| a.has_nonzero_superdiagonal())
            .collect(),
        Target::T1 => group
            .into_iter()
            .filter(|a| a.get(3, 4).is_zero())
            .collect(),
        other => {
            let p = partition_uu4(f).map_err(|e| CliError::resource(e.to_string()))?;
            match other {
                Target::N0 => p.n0,
                Target::N1 => p.n1,
                Target::N1anti => p.n1_anti,
                Target::N2 => p.n2,
                Target::N3 => p.n3,
                Target::N3anti => p.n3_anti,
                _ => unreachable!(),
            }
        }
    };
    Ok(Built::Matrices(mats))
}

fn target_graph(f: &Field, built: &Built, reduce: bool) -> (NcGraph, Vec<usize>) {
    match built {
        Built::Points(pts) => {
            if reduce {
                let red = reduce_by_classes(pts, pts, |&a, &b| cc(f, a, b));
                let reps: Vec<Point3> = red.representatives.iter().map(|&i| pts[i]).collect();
                (
                    build_graph(&reps, |&a, &b| cc(f, a, b)),
                    red.representatives,
                )
            } else {
                let idx: Vec<usize> = (0..pts.len()).collect();
                (build_graph(pts, |&a, &b| cc(f, a, b)), idx)
            }
        }
        Built::Matrices(mats) => {
            if reduce {
                let red = reduce_by_classes(mats, mats, |a, b| a.commutes(b, f));
                let reps: Vec<UtMatrix> =
                    red.representatives.iter().map(|&i| mats[i].clone()).collect();
                (
                    build_graph(&reps, |a, b| a.commutes(b, f)),
                    red.representatives,
                )
            } else {
                let idx: Vec<usize> = (0..mats.len()).collect();
                (build_graph(mats, |a, b| a.commutes(b, f)), idx)
            }
        }
    }
}

fn cmd_omega(
    cli: &Cli,
    target: Option<Target>,
    n: u8,
    m: u64,
    reduce: bool,
    from_dimacs: &Option<PathBuf>,
) -> Result<u8, CliError> {
    if let Some(path) = from_dimacs {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
        let g = read_dimacs(&mut std::io::BufReader::new(file))
            .map_err(|e| CliError::usage(e.to_string()))?;
        let res = max_clique(&g, time_cap(cli));
        let payload = json!({
            "source": path.display().to_string(),
            "vertices": g.n(),
            "omega": res.omega,
            "witness": res.witness,
            "exact": res.exact,
            "nodes": res.nodes_explored,
        });
        return finish_omega(cli, payload, &res);
    }
    let target = target.ok_or_else(|| CliError::usage("omega needs a target or --from-dimacs"))?;
    let f = single_field(cli)?;
    banner(cli, "omega", &f.descriptor());
    let built = build_target(target, &f, n, m)?;
    let (g, back) = target_graph(&f, &built, reduce);
    let res = max_clique(&g, time_cap(cli));
    let witness_items: Vec<String> = res
        .witness
        .iter()
        .map(|&v| built.label(&f, back[v]))
        .collect();
    let payload = json!({
        "field": f.descriptor(),
        "target": format!("{:?}", target_name(target, n, m)),
        "size": built.len(),
        "vertices": g.n(),
        "reduced": reduce,
        "omega": res.omega,
        "witness": witness_items,
        "exact": res.exact,
        "nodes": res.nodes_explored,
    });
    finish_omega(cli, payload, &res)
}

fn finish_omega(cli: &Cli, payload: serde_json::Value, res: &CliqueResult) -> Result<u8, CliError> {
    let content = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&payload).unwrap()),
        _ => {
            let mut s = format!(
                "omega = {}{}\n",
                res.omega,
                if res.exact { "" } else { " (lower bound, time cap hit)" }
            );
            if let Some(witness) = payload["witness"].as_array() {
                s.push_str("witness:\n");
                for w in witness {
                    s.push_str(&format!("  {}\n", w.as_str().map(str::to_string).unwrap_or_else(|| w.to_string())));
                }
            }
            s
        }
    };
    emit(cli, &content)?;
    Ok(if res.exact { EXIT_OK } else { EXIT_RESOURCE })
}

fn target_name(target: Target, n: u8, m: u64) -> String {
    match target {
        Target::M => "M".into(),
        Target::Q => "Q".into(),
        Target::N => "N".into(),
        Target::Uu => format!("UU_{n}"),
        Target::S0 => format!("S0(n={n})"),
        Target::T1 => "T1".into(),
        Target::N0 => "N0".into(),
        Target::N1 => "N1".into(),
        Target::N1anti => "N1-anti".into(),
        Target::N2 => "N2".into(),
        Target::N3 => "N3".into(),
        Target::N3anti => "N3-anti".into(),
        Target::C => format!("C(m={m},1,0)"),
    }
}

fn cmd_verify(cli: &Cli, suite: &str, direct: bool) -> Result<u8, CliError> {
    let suite: Suite = suite.parse().map_err(CliError::usage)?;
    let fields = parse_fields(cli)?;
    banner(
        cli,
        "verify",
        &fields
            .iter()
            .map(|f| f.descriptor())
            .collect::<Vec<_>>()
            .join(","),
    );
    let reports = run_suite(suite, &fields, direct, time_cap(cli));
    let content = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&reports).unwrap()),
        _ => tsv_summary(&reports),
    };
    emit(cli, &content)?;
    let refuted = reports.iter().any(|r| r.fails_suite());
    Ok(if refuted { EXIT_REFUTED } else { EXIT_OK })
}

fn points_file(f: &Field, kind: &str, pts: &[Point3]) -> String {
    let modhex = f
        .descriptor()
        .split_once(':')
        .map(|(_, h)| h.to_string())
        .unwrap_or_else(|| format!("{:x}", f.p()));
    let mut out = format!("{kind} {} {}\n", f.q(), modhex);
    for p in pts {
        out.push_str(&p.to_text());
        out.push('\n');
    }
    out
}

fn cmd_construct(cli: &Cli, what: &str, b: &Option<String>, m: u64) -> Result<u8, CliError> {
    let f = single_field(cli)?;
    banner(cli, "construct", &f.descriptor());
    let require_noncommuting = |pts: &[Point3]| -> Result<(), CliError> {
        if is_pairwise_noncommuting(&f, pts) {
            Ok(())
        } else {
            Err(CliError::resource(
                "internal check failed: emitted set is not pairwise non-commuting",
            ))
        }
    };
    let content = match what {
        "2q" => {
            let set = construct_2q_set_m(&f).map_err(|e| CliError::usage(e.to_string()))?;
            require_noncommuting(&set)?;
            points_file(&f, "M", &set)
        }
        "qplus1" => {
            if m >= f.q() {
                return Err(CliError::usage(format!("--m {m} out of range")));
            }
            let set = construct_q_plus_1_in_centralizer(&f, f.elt(m))
                .map_err(|e| CliError::usage(e.to_string()))?;
            require_noncommuting(&set)?;
            points_file(&f, "M", &set)
        }
        "3line" => {
            let set = construct_3line_plus_point(&f).map_err(|e| CliError::usage(e.to_string()))?;
            require_noncommuting(&set)?;
            points_file(&f, "Q", &set)
        }
        "4line" => {
            let triple = match b {
                None => None,
                Some(spec) => {
                    let parts: Vec<u64> = spec
                        .split(',')
                        .map(|t| t.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::usage("--b expects three comma-separated indices"))?;
                    if parts.len() != 3 || parts.iter().any(|&v| v >= f.q()) {
                        return Err(CliError::usage("--b expects three indices below q"));
                    }
                    Some((f.elt(parts[0]), f.elt(parts[1]), f.elt(parts[2])))
                }
            };
            let fl = construct_4line(&f, triple).map_err(|e| CliError::usage(e.to_string()))?;
            let set = build_config_set(&f, &fl.config)
                .map_err(|e| CliError::resource(e.to_string()))?;
            require_noncommuting(&set)?;
            let mut out = fl.config.to_text(&f);
            out.push_str(&format!(
                "# b4 = {}, z4 = {}, x4 = {}, built size = {}\n",
                fl.b[3].idx(),
                fl.z[3].idx(),
                fl.x[3].idx(),
                set.len()
            ));
            out
        }
        "abelian" => {
            let parts = abelian_decomposition_m(&f);
            let mut out = String::new();
            for (i, part) in parts.iter().enumerate() {
                out.push_str(&format!("# part {i}\n"));
                out.push_str(&points_file(&f, "M", part));
            }
            out
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown construction `{other}`; use 2q, qplus1, 3line, 4line or abelian"
            )))
        }
    };
    emit(cli, &content)?;
    Ok(EXIT_OK)
}

fn cmd_search(cli: &Cli, m: usize, budget: u64) -> Result<u8, CliError> {
    let f = single_field(cli)?;
    banner(cli, "search", &f.descriptor());
    if m < 2 {
        return Err(CliError::usage("--m must be at least 2"));
    }
    match search_m_lines(&f, m, budget, cli.seed) {
        Some(cfg) => {
            let set = build_config_set(&f, &cfg).map_err(|e| CliError::resource(e.to_string()))?;
            if !is_pairwise_noncommuting(&f, &set) {
                return Err(CliError::resource("found config failed re-validation"));
            }
            let mut out = cfg.to_text(&f);
            out.push_str(&format!("# found: built size {}\n", set.len()));
            emit(cli, &out)?;
            Ok(EXIT_OK)
        }
        None => {
            emit(
                cli,
                &format!("# not found: m={m} budget={budget} seed={}\n", cli.seed),
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_export(cli: &Cli, target: Target, n: u8, m: u64) -> Result<u8, CliError> {
    let f = single_field(cli)?;
    banner(cli, "export", &f.descriptor());
    let built = build_target(target, &f, n, m)?;
    let (g, _) = target_graph(&f, &built, false);
    let mut buf = Vec::new();
    write_dimacs(&g, &mut buf).map_err(|e| CliError::resource(e.to_string()))?;
    emit(cli, &String::from_utf8(buf).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_field_info(cli: &Cli) -> Result<u8, CliError> {
    let f = single_field(cli)?;
    let payload = json!({
        "descriptor": f.descriptor(),
        "p": f.p(),
        "r": f.r(),
        "q": f.q(),
        "modulus_coefficients": f.modulus(),
        "minus_three_is_square": f.minus_three_is_square(),
    });
    let content = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&payload).unwrap()),
        _ => format!(
            "field {}\n  p = {}\n  r = {}\n  q = {}\n  modulus (constant first) = {:?}\n  -3 square: {}\n",
            f.descriptor(),
            f.p(),
            f.r(),
            f.q(),
            f.modulus(),
            f.minus_three_is_square()
        ),
    };
    emit(cli, &content)?;
    Ok(EXIT_OK)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.cmd {
        Cmd::Omega {
            target,
            n,
            m,
            reduce,
            from_dimacs,
        } => cmd_omega(cli, *target, *n, *m, *reduce, from_dimacs),
        Cmd::Verify { suite, direct } => cmd_verify(cli, suite, *direct),
        Cmd::Construct { what, b, m } => cmd_construct(cli, what, b, *m),
        Cmd::Search { m, budget } => cmd_search(cli, *m, *budget),
        Cmd::Export { target, n, m } => cmd_export(cli, *target, *n, *m),
        Cmd::FieldInfo => cmd_field_info(cli),
    }
}
