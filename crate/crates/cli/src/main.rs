use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use melon::enumerate::{self, Checkpoint, EnumerateError, SearchLimits};
use melon::homology::{certify_tables, delta2, homology_table, s_profile, tables_orbit_equivalent};
use melon::io::{watermelon_from_json, watermelon_to_json, WatermelonJson};
use melon::render::render_svg;
use melon::watermelon::{
    alt_watermelon, enumerate_insertions, equivalence_code, p_reduce, short_arcs, standard_watermelon,
    validate_watermelon, Watermelon,
};

#[derive(Parser)]
#[command(name = "melon", version, about = "Build, check and compare watermelons on punctured disks")]
struct Cli {
    /// Write machine output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a maximal watermelon as JSON.
    Build {
        kind: Kind,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=62))]
        n: u32,
    },
    /// Check the watermelon rules; exit 1 if any fails.
    Validate { file: PathBuf },
    /// Homology table of a watermelon.
    Table {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Short arcs, S-profile and δ₂ matrix.
    Invariants {
        file: PathBuf,
        /// Keep arc labels in the reported class code.
        #[arg(long)]
        labeled: bool,
        /// Identify mirror images in the reported class code.
        #[arg(long)]
        allow_reflection: bool,
    },
    /// Forget a puncture and tighten what is left.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        puncture: u32,
    },
    /// Every way of adding one arc, one per class.
    Insertions { file: PathBuf },
    /// Orbit search between two homology tables, or a certificate that none exists.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Permit the exhaustive search for n ≥ 8.
        #[arg(long)]
        allow_large: bool,
    },
    /// Enumerate maximal watermelons up to equivalence.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: Budget,
        /// Write the search state here after each level and on exhaustion.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Uniqueness report: enumeration for n ≤ 5, certificate for n ≥ 6.
    Report {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Draw a watermelon.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderFormat::Svg)]
        format: RenderFormat,
    },
}

#[derive(clap::Args)]
struct Budget {
    #[arg(long)]
    allow_n5: bool,
    #[arg(long, default_value_t = 100_000_000)]
    node_budget: u64,
    /// Seconds.
    #[arg(long, default_value_t = 7200)]
    time_budget: u64,
}

impl Budget {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            allow_n5: self.allow_n5,
            node_budget: self.node_budget,
            time_budget: Duration::from_secs(self.time_budget),
            ..SearchLimits::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    Alt,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Svg,
}

#[derive(Debug, Error)]
enum Failure {
    /// Bad input content or a system breaking the rules.
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

/// Machine output plus whether the command counts as a failure.
struct Output {
    text: String,
    failed: Option<Failure>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, failed: None }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Watermelon, Failure> {
    watermelon_from_json(&read(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write_checkpoint(path: &Path, c: &Checkpoint) -> Result<(), Failure> {
    fs::write(path, pretty(c)).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(command: Command) -> Result<Output, Failure> {
    Ok(match command {
        Command::Build { kind, n } => {
            let w = match kind {
                Kind::Standard => standard_watermelon(n as usize),
                Kind::Alt => alt_watermelon(n as usize),
            }
            .map_err(|e| Failure::Usage(e.to_string()))?;
            let mut text = watermelon_to_json(&w);
            text.push('\n');
            text.into()
        }
        Command::Validate { file } => {
            let w = load(&file)?;
            let report = validate_watermelon(&w);
            let text = pretty(&json!({ "valid": report.is_valid(), "violations": report.violations }));
            let failed = (!report.is_valid()).then(|| {
                let rules: Vec<String> = report.violations.iter().map(|v| v.rule.to_string()).collect();
                Failure::Domain(format!("invalid watermelon: {}", rules.join(", ")))
            });
            Output { text, failed }
        }
        Command::Table { file, format } => {
            let t = homology_table(&load(&file)?);
            match format {
                TableFormat::Json => pretty(&t),
                TableFormat::Csv => t.to_csv(),
            }
            .into()
        }
        Command::Invariants { file, labeled, allow_reflection } => {
            let w = load(&file)?;
            let t = homology_table(&w);
            let vectors: Vec<_> = t.vectors().collect();
            let matrix: Vec<Vec<usize>> =
                vectors.iter().map(|u| vectors.iter().map(|v| delta2(u, v).expect("one table")).collect()).collect();
            let short: BTreeMap<String, u32> =
                short_arcs(&w).into_iter().map(|(id, p)| (w.arc(id).expect("listed arc").label.clone(), p)).collect();
            pretty(&json!({
                "n": w.n(),
                "arc_count": w.len(),
                "short_arc_count": short.len(),
                "short_arcs": short,
                "s_profile": s_profile(&t),
                "code": equivalence_code(&w, labeled, allow_reflection),
                "delta2": {
                    "columns": t.columns().iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
                    "matrix": matrix,
                },
            }))
            .into()
        }
        Command::Reduce { file, puncture } => {
            let w = load(&file)?;
            if puncture == 0 || puncture as usize > w.n() {
                return Err(Failure::Usage(format!("puncture {puncture} is not in 1..={}", w.n())));
            }
            let mut text = watermelon_to_json(&p_reduce(&w, puncture).map_err(domain)?);
            text.push('\n');
            text.into()
        }
        Command::Insertions { file } => {
            let w = load(&file)?;
            let children: Vec<Value> = enumerate_insertions(&w)
                .iter()
                .map(|c| {
                    json!({
                        "code": equivalence_code(c, false, false),
                        "watermelon": WatermelonJson::from(c),
                    })
                })
                .collect();
            pretty(&json!({ "count": children.len(), "insertions": children })).into()
        }
        Command::Compare { first, second, allow_large } => {
            let (a, b) = (load(&first)?, load(&second)?);
            if a.n() != b.n() {
                return Err(Failure::Domain(format!("puncture counts differ: {} vs {}", a.n(), b.n())));
            }
            let (ta, tb) = (homology_table(&a), homology_table(&b));
            let certificate = certify_tables(&ta, &tb, allow_large).map_err(|e| Failure::Usage(e.to_string()))?;
            let value = match certificate {
                Some(cert) => json!({ "equivalent": false, "certificate": cert }),
                None => {
                    let search = tables_orbit_equivalent(&ta, &tb, allow_large).map_err(domain)?;
                    let witness = search.witness.expect("no certificate means a witness exists");
                    let ops: Vec<String> = witness.row_ops().iter().map(ToString::to_string).collect();
                    json!({
                        "equivalent": true,
                        "witness": witness,
                        "row_ops": ops,
                        "transforms_tried": search.transforms_tried,
                    })
                }
            };
            pretty(&value).into()
        }
        Command::Enumerate { n, budget, checkpoint, resume } => {
            let limits = budget.limits();
            let start = match resume {
                Some(path) => serde_json::from_str::<Checkpoint>(&read(&path)?).map_err(domain)?,
                None => Checkpoint::start(n).map_err(|e| Failure::Usage(e.to_string()))?,
            };
            if start.n != n {
                return Err(Failure::Usage(format!("checkpoint is for n = {}, not {n}", start.n)));
            }
            let mut save_error = None;
            let result = enumerate::resume(start, &limits, &mut |c| {
                if let Some(path) = &checkpoint {
                    if let Err(e) = write_checkpoint(path, c) {
                        save_error.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = save_error {
                return Err(e);
            }
            match result {
                Ok(e) => pretty(&json!({
                    "n": e.n,
                    "class_count": e.classes.len(),
                    "level_sizes": e.level_sizes,
                    "nodes": e.nodes,
                    "classes": e.classes.iter().map(|c| c.summary()).collect::<Vec<_>>(),
                    "saturated_non_maximal": e.saturated_non_maximal.iter().map(|c| c.summary()).collect::<Vec<_>>(),
                }))
                .into(),
                Err(EnumerateError::BudgetExhausted { reason, checkpoint: state }) => {
                    if let Some(path) = &checkpoint {
                        write_checkpoint(path, &state)?;
                    }
                    return Err(Failure::Budget(format!(
                        "{reason} budget exhausted at level {} after {} nodes",
                        state.level, state.nodes
                    )));
                }
                Err(e) => return Err(Failure::Usage(e.to_string())),
            }
        }
        Command::Report { n, budget } => match enumerate::uniqueness_report(n, &budget.limits()) {
            Ok(r) => {
                let failed = (!r.pass).then(|| Failure::Domain(format!("uniqueness report for n = {n} failed")));
                Output { text: pretty(&r), failed }
            }
            Err(EnumerateError::BudgetExhausted { reason, .. }) => {
                return Err(Failure::Budget(format!("{reason} budget exhausted")))
            }
            Err(e) => return Err(Failure::Usage(e.to_string())),
        },
        Command::Render { file, format: RenderFormat::Svg } => render_svg(&load(&file)?).into(),
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("MELON_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("MELON_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli.command));
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("melon: {e}");
            return ExitCode::from(e.code());
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &output.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("melon: {e}");
        return ExitCode::from(2);
    }
    match output.failed {
        Some(e) => {
            eprintln!("melon: {e}");
            ExitCode::from(e.code())
        }
        None => ExitCode::SUCCESS,
    }
}
