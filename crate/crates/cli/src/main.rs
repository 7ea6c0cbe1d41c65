use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use powmon_core::census::{self, CensusRecord, CensusSummary, EnumerationOptions, Filter};
use powmon_core::classify::{self, Budget, ClassificationReport, Verdict};
use powmon_core::io::{self, IoError};
use powmon_core::{fixtures, FiniteMonoid, MonoidError, PSet, PowerMonoid};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_DISAGREEMENT: u8 = 4;

/// Arithmetic of reduced power monoids over finite monoids.
#[derive(Debug, Parser)]
#[command(name = "powmon", version)]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a table file describes a monoid.
    Validate { path: PathBuf },
    /// Run every decider on a monoid.
    Classify {
        path: PathBuf,
        /// Largest order for which brute-force deciders run.
        #[arg(long, default_value_t = Budget::default().max_brute_size)]
        max_brute: usize,
    },
    /// All factorizations of a set into irreducibles, up to a length.
    Factorize {
        path: PathBuf,
        /// Comma-separated element labels; the identity is added if missing.
        set: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Minimal factorizations of a set.
    Minfactor { path: PathBuf, set: String },
    /// Irreducibles of the power monoid, or those dividing a set.
    Irreducibles { path: PathBuf, set: Option<String> },
    /// Classify every monoid of order n and write census files.
    Census {
        n: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Only idempotent monoids.
        #[arg(long)]
        idempotent: bool,
        #[arg(long, default_value_t = Budget::default().max_brute_size)]
        max_brute: usize,
    },
    /// Census records of order at most n matching `key=value,...`.
    Find {
        filter: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        idempotent: bool,
        #[arg(long, default_value_t = Budget::default().max_brute_size)]
        max_brute: usize,
    },
    /// Write the bundled fixture tables.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::BadSubset(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<census::CensusError> for Failure {
    fn from(e: census::CensusError) -> Self {
        let code = match e {
            census::CensusError::Io(_) => EXIT_INVALID,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(f) = configure_workers() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(v) = std::env::var("POWMON_WORKERS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        Failure::new(
            EXIT_USAGE,
            format!("POWMON_WORKERS must be a number, got `{v}`"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

/// Writes to stdout; a closed pipe is not an error.
fn write_out(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit(v: &Value) {
    write_out(&format!(
        "{}\n",
        serde_json::to_string_pretty(v).expect("json serializes")
    ));
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Validate { path } => validate(path, cli.pretty),
        Command::Classify { path, max_brute } => {
            let h = io::load_monoid(path)?;
            let (report, code) = match classify::classify(
                &h,
                Budget {
                    max_brute_size: *max_brute,
                },
            ) {
                Ok(r) => {
                    let code = if r.agreement { 0 } else { EXIT_DISAGREEMENT };
                    (r, code)
                }
                Err(e) => {
                    eprintln!("warning: {e}");
                    (*e.partial, EXIT_BUDGET)
                }
            };
            if cli.pretty {
                print_report(&h, &report);
            } else {
                emit(&serde_json::to_value(&report).expect("report serializes"));
            }
            Ok(code)
        }
        Command::Factorize { path, set, max_len } => {
            let h = io::load_monoid(path)?;
            let x = subset(&h, set)?;
            let pm = PowerMonoid::new(&h);
            let words = pm.factorizations(x, *max_len);
            if cli.pretty {
                for w in &words {
                    println!("{}", show_word(&h, w.letters()));
                }
            } else {
                let words: Vec<_> = words.iter().map(|w| io::word_labels(&h, w)).collect();
                emit(
                    &json!({ "set": io::set_labels(&h, x), "max_len": max_len, "factorizations": words }),
                );
            }
            Ok(0)
        }
        Command::Minfactor { path, set } => {
            let h = io::load_monoid(path)?;
            let x = subset(&h, set)?;
            let pm = PowerMonoid::new(&h);
            let mins = pm.minimal_factorizations(x);
            if cli.pretty {
                println!(
                    "{} minimal factorization(s) of {}",
                    mins.len(),
                    show_set(&h, x)
                );
                for m in &mins {
                    println!("  {}", show_word(&h, m.word.letters()));
                }
            } else {
                let mins: Vec<_> = mins
                    .iter()
                    .map(|m| {
                        json!({
                            "length": m.multiset.len(),
                            "multiset": io::multiset_labels(&h, &m.multiset),
                            "word": io::word_labels(&h, &m.word),
                        })
                    })
                    .collect();
                emit(&json!({ "set": io::set_labels(&h, x), "minimal": mins }));
            }
            Ok(0)
        }
        Command::Irreducibles { path, set } => {
            let h = io::load_monoid(path)?;
            let pm = PowerMonoid::new(&h);
            let within = match set {
                Some(s) => subset(&h, s)?,
                None => pm.full(),
            };
            let irr = pm.irreducibles_within(within);
            if cli.pretty {
                for &a in &irr {
                    let kind = if pm.is_atom(a) {
                        "atom"
                    } else {
                        "irreducible, not an atom"
                    };
                    println!("{}  {kind}", show_set(&h, a));
                }
            } else {
                let irr: Vec<_> = irr
                    .iter()
                    .map(|&a| json!({ "set": io::set_labels(&h, a), "atom": pm.is_atom(a), "quark": pm.is_quark(a) }))
                    .collect();
                emit(&json!({ "within": io::set_labels(&h, within), "irreducibles": irr }));
            }
            Ok(0)
        }
        Command::Census {
            n,
            out,
            idempotent,
            max_brute,
        } => {
            let opts = EnumerationOptions {
                idempotent_only: *idempotent,
                ..Default::default()
            };
            let (records, summary) = census::run_census(
                *n,
                opts,
                Budget {
                    max_brute_size: *max_brute,
                },
            )?;
            let (rec_path, sum_path) = census::write_census(out, &records, &summary)?;
            if cli.pretty {
                print_summary(&summary);
                println!("wrote {} and {}", rec_path.display(), sum_path.display());
            } else {
                emit(&serde_json::to_value(&summary).expect("summary serializes"));
            }
            Ok(census_code(&records))
        }
        Command::Find {
            filter,
            order,
            idempotent,
            max_brute,
        } => {
            let filter = Filter::parse(filter)?;
            let opts = EnumerationOptions {
                idempotent_only: *idempotent,
                ..Default::default()
            };
            let mut hits = Vec::new();
            for n in 1..=*order {
                hits.extend(census::find_instances(
                    n,
                    opts,
                    Budget {
                        max_brute_size: *max_brute,
                    },
                    &filter,
                )?);
            }
            if cli.pretty {
                println!("{} match(es)", hits.len());
                for r in &hits {
                    println!(
                        "{}  order {}  umf_theorem={}",
                        r.canonical_form,
                        r.order,
                        r.flags.umf_theorem.as_str()
                    );
                }
            } else {
                write_out(&census::records_to_jsonl(&hits));
            }
            Ok(census_code(&hits))
        }
        Command::Fixtures { out } => {
            std::fs::create_dir_all(out)
                .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", out.display())))?;
            for (name, text) in fixtures::FILES {
                let path = out.join(format!("{name}.json"));
                std::fs::write(&path, text)
                    .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
                if cli.pretty {
                    println!("wrote {}", path.display());
                }
            }
            if !cli.pretty {
                let names: Vec<_> = fixtures::FILES
                    .iter()
                    .map(|(n, _)| format!("{n}.json"))
                    .collect();
                emit(&json!({ "out": out, "files": names }));
            }
            Ok(0)
        }
    }
}

fn census_code(records: &[CensusRecord]) -> u8 {
    if records.iter().any(|r| !r.flags.agreement) {
        EXIT_DISAGREEMENT
    } else if records.iter().any(|r| r.flags.umf_brute.is_none()) {
        EXIT_BUDGET
    } else {
        0
    }
}

fn validate(path: &Path, pretty: bool) -> Result<u8, Failure> {
    match io::load_monoid(path) {
        Ok(h) => {
            if pretty {
                println!("valid monoid of order {}", h.size());
            } else {
                emit(&json!({ "valid": true, "size": h.size(), "structure": h.structure_flags() }));
            }
            Ok(0)
        }
        Err(IoError::Invalid(e)) => {
            let witness = match e {
                MonoidError::NotAssociative { a, b, c } => json!([a, b, c]),
                MonoidError::WrongIdentity { identity, element } => json!([identity, element]),
                MonoidError::OutOfRange { row, col, .. } => json!([row, col]),
                _ => Value::Null,
            };
            if pretty {
                println!("invalid: {e}");
            } else {
                emit(&json!({ "valid": false, "error": e.to_string(), "witness": witness }));
            }
            Ok(EXIT_INVALID)
        }
        Err(e) => Err(e.into()),
    }
}

fn subset(h: &FiniteMonoid, spec: &str) -> Result<PSet, Failure> {
    let (x, added) = io::parse_subset(h, spec)?;
    if added {
        eprintln!(
            "warning: identity {} added to the set",
            h.label(h.identity())
        );
    }
    Ok(x)
}

fn show_set(h: &FiniteMonoid, x: PSet) -> String {
    format!("{{{}}}", io::set_labels(h, x).join(","))
}

fn show_word(h: &FiniteMonoid, letters: &[PSet]) -> String {
    if letters.is_empty() {
        return "(empty word)".to_string();
    }
    letters
        .iter()
        .map(|&a| show_set(h, a))
        .collect::<Vec<_>>()
        .join(" * ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_report(h: &FiniteMonoid, r: &ClassificationReport) {
    let labels = |xs: &[powmon_core::ElementId]| io::element_labels(h, xs).join(" ");
    println!("order             {}", r.order);
    println!("commutative       {}", yes_no(r.structure.commutative));
    println!("idempotent        {}", yes_no(r.structure.idempotent));
    println!("almost-breakable  {}", yes_no(r.almost_breakable));
    println!("breakable         {}", yes_no(r.breakable));
    match &r.twisted {
        Some(w) => println!("twisted           yes ({})", labels(w)),
        None => println!("twisted           no"),
    }
    match &r.bridged {
        Some(w) => println!("bridged           yes ({})", labels(w)),
        None => println!("bridged           no"),
    }
    println!("atomic            {}", yes_no(r.pm_atomic));
    println!(
        "BF / FF           {} / {}",
        yes_no(r.pm_bf),
        yes_no(r.pm_ff)
    );
    if let Some(w) = &r.pm_bf_witness {
        println!(
            "  {} = {} = {}",
            show_set(h, w.set),
            show_word(h, &w.short.0),
            show_word(h, &w.long.0)
        );
    }
    match &r.pm_hmf_brute {
        Some(b) => {
            println!("HmF (brute)       {}", yes_no(b.holds));
            if let Some(w) = &b.witness {
                println!(
                    "  {} has minimal lengths {:?}",
                    show_set(h, w.set),
                    w.lengths
                );
            }
        }
        None => println!("HmF (brute)       skipped"),
    }
    match &r.pm_umf_brute {
        Some(b) => {
            println!("UmF (brute)       {}", yes_no(b.holds));
            if let Some(w) = &b.witness {
                println!(
                    "  {} has {} minimal factorizations",
                    show_set(h, w.set),
                    w.factorizations.len()
                );
                for m in &w.factorizations {
                    println!("    {}", show_word(h, m.word.letters()));
                }
            }
        }
        None => println!("UmF (brute)       skipped"),
    }
    let t = &r.pm_umf_theorem;
    println!("UmF (theorem)     {}", t.value.as_str());
    for e in &t.trace {
        println!("  {}: {} [{}]", e.rule, e.anchor, labels(&e.witness));
    }
    if t.value != Verdict::Unknown || r.pm_umf_brute.is_some() {
        println!("agreement         {}", yes_no(r.agreement));
    }
}

fn print_summary(s: &CensusSummary) {
    println!(
        "order {}{}: {} monoids",
        s.order,
        if s.idempotent_only {
            " (idempotent)"
        } else {
            ""
        },
        s.total
    );
    println!(
        "UmF brute: {} yes, {} no",
        s.umf_brute_true, s.umf_brute_false
    );
    println!(
        "UmF theorem: {} yes, {} no, {} unknown",
        s.theorem_yes, s.theorem_no, s.theorem_unknown
    );
    println!("disagreements: {}", s.disagreements.len());
    for (k, v) in &s.combinations {
        println!("  {v:>6}  {k}");
    }
}
