use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use kasteleyn::format::parse;
use kasteleyn::graph::{validate, EdgeWeights, GraphWithBoundary, Mode};
use kasteleyn::identities::{
    check_kuo_bipartite, check_kuo_general, check_pfaffian_consistency, check_plucker_three_term,
    quadruples, IdentityError, IdentityReport,
};
use kasteleyn::immersion::Configuration;
use kasteleyn::json;
use kasteleyn::measure::{
    kasteleyn_matrix, skew_kasteleyn_matrix, GrassmannPoint, KasteleynMatrix, MeasureError,
    MeasurementTable, PfaffianPoint, SkewKasteleynMatrix,
};
use kasteleyn::oracle::{
    enumerate_matchings, oracle_table, signed_sum, OracleError, DEFAULT_VERTEX_CAP,
};
use kasteleyn::transport::{TransportError, DEFAULT_MAX_RETRIES};

#[derive(Parser)]
#[command(
    name = "kasteleyn",
    version,
    about = "Exact Kasteleyn matrices and boundary measurements for planar graphs"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the deformation path.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Perturbed retries after a degenerate path.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_RETRIES)]
    max_retries: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number (or weighted sum) of matchings: det K or Pf X, summed over
    /// boundary subsets when there is a boundary.
    Count {
        file: PathBuf,
        /// Use the edge weights from the file.
        #[arg(long)]
        weights: bool,
    },
    /// The signed Kasteleyn matrix.
    Matrix {
        file: PathBuf,
        /// 1: closed bipartite, 2: bipartite with boundary, 4: closed
        /// general, 5: general with boundary. Defaults to the file's kind.
        #[arg(long, value_parser = ["1", "2", "4", "5"])]
        theorem: Option<String>,
        /// Include the full event log.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        weights: bool,
    },
    /// Boundary measurements D(G, I) from minors.
    Measure {
        file: PathBuf,
        /// Comma-separated boundary labels.
        #[arg(long, conflicts_with = "all")]
        subset: Option<String>,
        /// Every subset (the default).
        #[arg(long)]
        all: bool,
        #[arg(long)]
        weights: bool,
    },
    /// The k x n matrix L and its Plucker coordinates (bipartite).
    Grassmann {
        file: PathBuf,
        #[arg(long)]
        weights: bool,
    },
    /// The skew matrix Y with D(G, I) = Pf(Y_I) D(G, empty) (general).
    PfaffianPoint {
        file: PathBuf,
        #[arg(long)]
        weights: bool,
    },
    /// Brute-force values by enumerating matchings.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        subset: Option<String>,
        /// Signed sum over matchings, crossings counted in the file's drawing.
        #[arg(long)]
        signed: bool,
        #[arg(long)]
        weights: bool,
    },
    /// Check quadratic identities; exit status 5 if any fails.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Identity::All)]
        identity: Identity,
        #[arg(long)]
        weights: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    KuoBipartite,
    KuoGeneral,
    Plucker,
    Pfaffian,
    All,
}

enum CliError {
    Io(String),
    Parse(String),
    Validation(String),
    Degeneracy(String),
    IdentityFailed(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Internal(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Degeneracy(_) => 4,
            CliError::IdentityFailed(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m)
            | CliError::Parse(m)
            | CliError::Validation(m)
            | CliError::Degeneracy(m)
            | CliError::IdentityFailed(m)
            | CliError::Internal(m) => m,
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match &e {
            MeasureError::Transport(
                TransportError::Degenerate(_)
                | TransportError::RetriesExhausted { .. }
                | TransportError::PinnedVertexEvent { .. },
            ) => CliError::Degeneracy(e.to_string()),
            MeasureError::Linalg(_) => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<IdentityError> for CliError {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::Measure(m) => m.into(),
            IdentityError::Linalg(_) => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

struct Input {
    g: GraphWithBoundary,
    c: Configuration,
    mode: Mode,
    weights: Option<EdgeWeights>,
}

fn load(path: &Path, use_weights: bool) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (g, c) = parse(&text).map_err(|e| CliError::Parse(format!("{}:{e}", path.display())))?;
    let mode = g.natural_mode().ok_or_else(|| {
        CliError::Validation("vertices mix plain and colored declarations".into())
    })?;
    let report = validate(&g, mode);
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(CliError::Validation(list.join("; ")));
    }
    let weights = use_weights.then(|| {
        g.weights()
            .cloned()
            .unwrap_or_else(|| EdgeWeights::uniform(g.edge_count()))
    });
    Ok(Input {
        g,
        c,
        mode,
        weights,
    })
}

struct Opts {
    json: bool,
    seed: u64,
    max_retries: usize,
}

fn bipartite(inp: &Input, o: &Opts) -> Result<KasteleynMatrix, CliError> {
    Ok(kasteleyn_matrix(
        &inp.g,
        &inp.c,
        inp.weights.as_ref(),
        o.seed,
        o.max_retries,
    )?)
}

fn general(inp: &Input, o: &Opts) -> Result<SkewKasteleynMatrix, CliError> {
    Ok(skew_kasteleyn_matrix(
        &inp.g,
        &inp.c,
        inp.weights.as_ref(),
        o.seed,
        o.max_retries,
    )?)
}

fn table(inp: &Input, o: &Opts) -> Result<MeasurementTable, CliError> {
    Ok(match inp.mode {
        Mode::Bipartite => MeasurementTable::from_kasteleyn(&bipartite(inp, o)?)?,
        Mode::General => MeasurementTable::from_skew(&general(inp, o)?)?,
    })
}

/// Boundary positions named by a comma-separated label list.
fn subset_positions(g: &GraphWithBoundary, list: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let pos = g
            .vertex_by_label(name)
            .and_then(|v| g.boundary_position(v))
            .ok_or_else(|| CliError::Validation(format!("{name:?} is not a boundary vertex")))?;
        if out.contains(&pos) {
            return Err(CliError::Validation(format!("{name:?} listed twice")));
        }
        out.push(pos);
    }
    out.sort_unstable();
    Ok(out)
}

fn braces(labels: &[&str]) -> String {
    format!("{{{}}}", labels.join(","))
}

fn print_table_text(labels: &[String], values: &[BigRational]) {
    for (m, v) in values.iter().enumerate() {
        println!("{} {v}", braces(&json::subset_labels(labels, m)));
    }
}

fn emit(o: &Opts, v: Value, text: impl FnOnce()) {
    if o.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("JSON values serialize")
        );
    } else {
        text();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let o = Opts {
        json: cli.json,
        seed: cli.seed,
        max_retries: cli.max_retries,
    };
    match cli.command {
        Command::Count { file, weights } => {
            let inp = load(&file, weights)?;
            let t = table(&inp, &o)?;
            let total: BigRational = t.values.iter().sum();
            emit(
                &o,
                json!({ "count": json::rational(&total), "weighted": weights }),
                || println!("{total}"),
            );
        }
        Command::Matrix {
            file,
            theorem,
            trace,
            weights,
        } => {
            let inp = load(&file, weights)?;
            let closed = inp.g.boundary().is_empty();
            let expected = match (inp.mode, closed) {
                (Mode::Bipartite, true) => "1",
                (Mode::Bipartite, false) => "2",
                (Mode::General, true) => "4",
                (Mode::General, false) => "5",
            };
            // Settings 2 and 5 include the closed case as n = 0.
            let accepted = match theorem.as_deref() {
                None => true,
                Some(t) => {
                    t == expected
                        || (closed && ((t, expected) == ("2", "1") || (t, expected) == ("5", "4")))
                }
            };
            if !accepted {
                return Err(CliError::Validation(format!(
                    "setting {} does not apply to this graph (expected {expected})",
                    theorem.unwrap_or_default()
                )));
            }
            match inp.mode {
                Mode::Bipartite => {
                    let k = bipartite(&inp, &o)?;
                    emit(&o, json::kasteleyn(&inp.g, &k, trace), || {
                        print!("{}", k.matrix);
                        print_signs(&inp.g, &k.signs, trace);
                    });
                }
                Mode::General => {
                    let x = general(&inp, &o)?;
                    emit(&o, json::skew_kasteleyn(&inp.g, &x, trace), || {
                        print!("{}", x.matrix.matrix());
                        print_signs(&inp.g, &x.signs, trace);
                    });
                }
            }
        }
        Command::Measure {
            file,
            subset,
            all: _,
            weights,
        } => {
            let inp = load(&file, weights)?;
            match subset {
                Some(list) => {
                    let s = subset_positions(&inp.g, &list)?;
                    let v = match inp.mode {
                        Mode::Bipartite => bipartite(&inp, &o)?.measure(&s)?,
                        Mode::General => general(&inp, &o)?.measure(&s)?,
                    };
                    let names: Vec<&str> = s
                        .iter()
                        .map(|&p| inp.g.label(inp.g.boundary()[p]))
                        .collect();
                    emit(
                        &o,
                        json!({ "subset": names, "value": json::rational(&v) }),
                        || println!("{v}"),
                    );
                }
                None => {
                    let t = table(&inp, &o)?;
                    emit(&o, json::table(&t), || {
                        print_table_text(&t.boundary_labels, &t.values)
                    });
                }
            }
        }
        Command::Grassmann { file, weights } => {
            let inp = load(&file, weights)?;
            if inp.mode != Mode::Bipartite {
                return Err(CliError::Validation(
                    "grassmann needs a bipartite graph".into(),
                ));
            }
            let k = bipartite(&inp, &o)?;
            let p = GrassmannPoint::from_matrix(&k)?;
            emit(&o, json::grassmann(&p, &k.boundary_labels), || {
                print!("L =\n{}", p.l);
                for (s, v) in p.subsets().iter().zip(&p.plucker) {
                    let names: Vec<&str> =
                        s.iter().map(|&i| k.boundary_labels[i].as_str()).collect();
                    println!("{} {v}", braces(&names));
                }
            });
        }
        Command::PfaffianPoint { file, weights } => {
            let inp = load(&file, weights)?;
            if inp.mode != Mode::General {
                return Err(CliError::Validation(
                    "pfaffian-point needs a general (plain) graph".into(),
                ));
            }
            let x = general(&inp, &o)?;
            let p = PfaffianPoint::from_matrix(&x)?;
            emit(&o, json::pfaffian_point(&p), || {
                println!("D(empty) = {}", p.base);
                print!("Y =\n{}", p.y.matrix());
            });
        }
        Command::Oracle {
            file,
            subset,
            signed,
            weights,
        } => {
            let inp = load(&file, weights)?;
            let w = inp.weights.as_ref();
            let labels: Vec<String> = inp
                .g
                .boundary()
                .iter()
                .map(|&v| inp.g.label(v).to_string())
                .collect();
            let positions: Vec<Vec<usize>> = match &subset {
                Some(list) => vec![subset_positions(&inp.g, list)?],
                None => (0..1usize << labels.len())
                    .map(|m| (0..labels.len()).filter(|p| m >> p & 1 == 1).collect())
                    .collect(),
            };
            let values: Vec<BigRational> = if signed {
                positions
                    .iter()
                    .map(|s| {
                        let vs: Vec<usize> = s.iter().map(|&p| inp.g.boundary()[p]).collect();
                        signed_sum(&inp.g, &inp.c, &vs, w)
                    })
                    .collect::<Result<_, _>>()?
            } else if subset.is_some() {
                let vs: Vec<usize> = positions[0].iter().map(|&p| inp.g.boundary()[p]).collect();
                let total = enumerate_matchings(&inp.g, Some(&vs), DEFAULT_VERTEX_CAP)?
                    .iter()
                    .map(|m| {
                        w.map_or_else(
                            || BigRational::from_integer(1.into()),
                            |w| w.matching_weight(m),
                        )
                    })
                    .sum();
                vec![total]
            } else {
                oracle_table(&inp.g, w, DEFAULT_VERTEX_CAP)?
            };
            let rows: Vec<Value> = positions
                .iter()
                .zip(&values)
                .map(|(s, v)| {
                    let names: Vec<&str> = s.iter().map(|&p| labels[p].as_str()).collect();
                    json!({ "subset": names, "value": json::rational(v) })
                })
                .collect();
            emit(&o, json!({ "signed": signed, "values": rows }), || {
                for (s, v) in positions.iter().zip(&values) {
                    let names: Vec<&str> = s.iter().map(|&p| labels[p].as_str()).collect();
                    println!("{} {v}", braces(&names));
                }
            });
        }
        Command::Check {
            file,
            identity,
            weights,
        } => {
            let inp = load(&file, weights)?;
            check(&inp, &o, identity)?;
        }
    }
    Ok(())
}

fn print_signs(g: &GraphWithBoundary, s: &kasteleyn::transport::SignAssignment, trace: bool) {
    println!(
        "events: {} (attempts {}, digest {})",
        s.events.len(),
        s.attempts,
        s.digest()
    );
    if trace {
        for ev in &s.events {
            let e = g.edge(ev.edge);
            println!(
                "  segment {} t = {} : {} through {}-{}",
                ev.segment,
                ev.time,
                g.label(ev.vertex),
                g.label(e.0),
                g.label(e.1)
            );
        }
    }
}

fn check(inp: &Input, o: &Opts, which: Identity) -> Result<(), CliError> {
    let want = |i: Identity| which == i || which == Identity::All;
    let explicit = which != Identity::All;
    let mut reports: Vec<IdentityReport> = Vec::new();
    let mut sections: Vec<Value> = Vec::new();
    let mut trailer: Vec<String> = Vec::new();
    let mut failed = 0usize;

    let inapplicable = |name: &str, why: &str| -> Result<(), CliError> {
        if explicit {
            Err(CliError::Validation(format!("{name}: {why}")))
        } else {
            Ok(())
        }
    };

    match inp.mode {
        Mode::Bipartite => {
            for i in [Identity::KuoGeneral, Identity::Pfaffian] {
                if which == i {
                    inapplicable("identity", "needs a general (plain) graph")?;
                }
            }
            let k = bipartite(inp, o)?;
            let t = MeasurementTable::from_kasteleyn(&k)?;
            if want(Identity::KuoBipartite) || want(Identity::Plucker) {
                if k.excess != 2 {
                    inapplicable(
                        "identity",
                        &format!("needs k = 2, graph has k = {}", k.excess),
                    )?;
                } else {
                    let p = GrassmannPoint::from_matrix(&k)?;
                    for q in quadruples(t.boundary_size()) {
                        if want(Identity::KuoBipartite) {
                            reports.push(check_kuo_bipartite(&t, q)?);
                        }
                        if want(Identity::Plucker) {
                            let mut r = check_plucker_three_term(&p, q)?;
                            r.labels = q.iter().map(|&c| k.boundary_labels[c].clone()).collect();
                            reports.push(r);
                        }
                    }
                }
            }
        }
        Mode::General => {
            for i in [Identity::KuoBipartite, Identity::Plucker] {
                if which == i {
                    inapplicable("identity", "needs a bipartite graph")?;
                }
            }
            let x = general(inp, o)?;
            let t = MeasurementTable::from_skew(&x)?;
            if want(Identity::KuoGeneral) {
                if t.internal % 2 == 1 {
                    inapplicable("kuo-general", "needs an even number of internal vertices")?;
                } else {
                    for q in quadruples(t.boundary_size()) {
                        reports.push(check_kuo_general(&t, q)?);
                    }
                }
            }
            if want(Identity::Pfaffian) {
                if t.get(0) == &BigRational::from_integer(0.into()) {
                    inapplicable("pfaffian", "D(G, empty) = 0")?;
                } else {
                    let y = PfaffianPoint::from_matrix(&x)?;
                    let r = check_pfaffian_consistency(&x, &y, o.seed)?;
                    if !r.holds() {
                        failed += 1;
                    }
                    trailer.push(format!(
                        "pfaffian: {} subsets checked{}, {}",
                        r.checked,
                        if r.exhaustive { "" } else { " (sampled)" },
                        if r.holds() { "holds" } else { "FAILS" }
                    ));
                    sections.push(json::consistency(&r, &x.boundary_labels));
                }
            }
        }
    }

    failed += reports.iter().filter(|r| !r.holds).count();
    if o.json {
        let mut all: Vec<Value> = reports.iter().map(json::identity).collect();
        all.extend(sections);
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "reports": all, "all_hold": failed == 0 }))
                .expect("JSON values serialize")
        );
    } else {
        for r in &reports {
            println!(
                "{} {}: {} = {} {}",
                r.identity,
                braces(&r.labels.iter().map(String::as_str).collect::<Vec<_>>()),
                r.lhs,
                r.rhs,
                if r.holds { "holds" } else { "FAILS" }
            );
        }
        for line in &trailer {
            println!("{line}");
        }
        println!(
            "{}",
            if failed == 0 {
                "all identities hold"
            } else {
                "some identities fail"
            }
        );
    }
    if failed > 0 {
        return Err(CliError::IdentityFailed(format!(
            "{failed} identity checks failed"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
