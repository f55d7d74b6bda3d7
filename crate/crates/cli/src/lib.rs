//! The `mds-atlas` command line.

pub mod config;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::error;

use mds_atlas::bounds::{bounds_ledger, class_table_tsv, classified_counts, latin_square_counts, render_class_table};
use mds_atlas::format::{read_code_file, write_code, write_code_file};
use mds_atlas::linear::rs_code;
use mds_atlas::pipeline::{
    bootstrap, latin::MAX_LATIN_ORDER, render_tables, run_chain, run_step, tables, tables_tsv, verify_root, Registry,
};
use mds_atlas::symmetry::{canonical_form, cert_hex, isometry_between};
use mds_atlas::{Error, Result};

use config::{BootstrapMode, RunConfig};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mds-atlas", version, about = "Classify q-ary MDS codes up to equivalence")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Registry root directory.
    #[arg(long, global = true, env = "MDS_ATLAS_ROOT")]
    root: Option<PathBuf>,
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for partition search (0: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Recompute steps that are already stored.
    #[arg(long, global = true)]
    force: bool,
    /// More log output on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Store the first registry of the k=2 chain.
    Bootstrap {
        #[arg(long)]
        q: Option<usize>,
        /// Classify Latin squares of order q, giving (3,2)_q.
        #[arg(long, conflicts_with = "trivial")]
        latin: bool,
        /// Start from the full space of length 2.
        #[arg(long)]
        trivial: bool,
    },
    /// Extend the stored (n,k)_q classes by one coordinate.
    Extend {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Run every chain for q until no codes remain.
    Chain {
        #[arg(long)]
        q: Option<usize>,
        /// Directory of `.mds` seed codes.
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// Never start a chain from a Reed-Solomon code.
        #[arg(long)]
        no_rs: bool,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, value_parser = ["latin", "trivial"])]
        bootstrap: Option<String>,
    },
    /// Print the canonical form of a code.
    Canon { file: PathBuf },
    /// Decide whether two codes are equivalent.
    Iso { first: PathBuf, second: PathBuf },
    /// Re-check every registry under a root.
    Verify { root: Option<PathBuf> },
    /// Class counts and lower bounds for (n,n-1)_q codes.
    Bounds {
        /// Alphabet sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long)]
        tsv: bool,
    },
    /// Write a Reed-Solomon code as a seed file.
    RsSeed {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Class and extendability tables for q.
    Report {
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        tsv: bool,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verify(_) | Error::Consistency { .. } | Error::Incomplete(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn merged_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if g.root.is_some() {
        cfg.root = g.root.clone();
    }
    if g.workers.is_some() {
        cfg.workers = g.workers;
    }
    if g.force {
        cfg.force = Some(true);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn root_of(cfg: &RunConfig) -> PathBuf {
    cfg.root.clone().unwrap_or_else(|| PathBuf::from("atlas"))
}

fn need_q(flag: Option<usize>, cfg: &RunConfig) -> Result<usize> {
    let q = flag.or(cfg.q).ok_or_else(|| Error::Param("--q is required (or set `q` in the config)".into()))?;
    RunConfig { q: Some(q), ..RunConfig::default() }.validate()?;
    Ok(q)
}

fn print(text: &str) -> Result<i32> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<i32> {
    let mut cfg = merged_config(&cli.global)?;
    match cli.command {
        Command::Bootstrap { q, latin, trivial } => {
            let q = need_q(q, &cfg)?;
            if latin {
                cfg.bootstrap = Some(BootstrapMode::Latin);
            } else if trivial {
                cfg.bootstrap = Some(BootstrapMode::Trivial);
            }
            let root = root_of(&cfg);
            let chain = cfg.chain_config(q, &root);
            let reg = bootstrap(q, chain.k2_bootstrap, &root, chain.force)?;
            print(&format!("{}: {} classes ({})\n", reg.label(), reg.records.len(), reg.source))
        }
        Command::Extend { q, n, k } => {
            let q = need_q(q, &cfg)?;
            let root = root_of(&cfg);
            let force = cfg.force.unwrap_or(false);
            let reg = Registry::load(&root, q, n, k)?.ok_or_else(|| {
                Error::Dependency(format!("registry ({n},{k})_{q} is missing under {}", root.display()))
            })?;
            if !force && reg.is_extended() {
                if let Some(next) = Registry::load(&root, q, n + 1, k)? {
                    return print(&format!("{}: {} classes (stored)\n", next.label(), next.records.len()));
                }
            }
            let next = run_step(q, n, k, &root, &cfg.step_options())?;
            print(&format!("{}: {} classes\n", next.label(), next.records.len()))
        }
        Command::Chain { q, seeds, no_rs, max_k, max_n, bootstrap } => {
            let q = need_q(q, &cfg)?;
            if seeds.is_some() {
                cfg.seeds = seeds;
            }
            if no_rs {
                cfg.rs_seeds = Some(false);
            }
            if max_k.is_some() {
                cfg.max_k = max_k;
            }
            if max_n.is_some() {
                cfg.max_n = max_n;
            }
            if let Some(b) = bootstrap {
                cfg.bootstrap = Some(if b == "latin" { BootstrapMode::Latin } else { BootstrapMode::Trivial });
            }
            cfg.q = Some(q);
            cfg.validate()?;
            let root = root_of(&cfg);
            let summary = run_chain(q, &cfg.chain_config(q, &root))?;
            let mut out = String::new();
            for s in &summary.steps {
                out.push_str(&format!(
                    "({},{})_{q} -> ({},{})_{q}: {} classes{}\n",
                    s.from.0,
                    s.from.1,
                    s.from.0 + 1,
                    s.from.1,
                    s.classes,
                    if s.reused { " (stored)" } else { "" }
                ));
            }
            for note in &summary.notes {
                out.push_str(&format!("note: {note}\n"));
            }
            print(&out)
        }
        Command::Canon { file } => {
            let code = read_code_file(&file)?;
            let f = canonical_form(&code);
            let comments = vec![format!("cert: {}", cert_hex(&f.cert)), format!("automorphisms: {}", f.aut_order)];
            print(&write_code(&f.canon, &comments))
        }
        Command::Iso { first, second } => {
            let (a, b) = (read_code_file(&first)?, read_code_file(&second)?);
            if (a.q(), a.n(), a.len()) != (b.q(), b.n(), b.len()) {
                return print("inequivalent\n");
            }
            match isometry_between(&canonical_form(&a), &canonical_form(&b)) {
                Some(g) => print(&format!("equivalent\n{g}\n")),
                None => print("inequivalent\n"),
            }
        }
        Command::Verify { root } => {
            let root = root.unwrap_or_else(|| root_of(&cfg));
            let checked = verify_root(&root)?;
            let mut out: String = checked.iter().map(|l| format!("ok {l}\n")).collect();
            out.push_str(&format!("{} registries verified\n", checked.len()));
            print(&out)
        }
        Command::Bounds { q, max_n, tsv } => {
            let root = root_of(&cfg);
            let mut ledgers = Vec::new();
            for q in q {
                need_q(Some(q), &cfg)?;
                let mut exact = if root.is_dir() { classified_counts(&root, q, max_n)? } else { Default::default() };
                if !exact.contains_key(&3) && q <= MAX_LATIN_ORDER {
                    exact.insert(3, latin_square_counts(q)?);
                }
                ledgers.push(bounds_ledger(q, max_n, &exact)?);
            }
            print(&if tsv { class_table_tsv(&ledgers) } else { render_class_table(&ledgers) })
        }
        Command::RsSeed { q, n, k, out } => {
            let code = rs_code(q, n, k)?;
            let comments = vec![format!("provenance: rs {q} {n} {k}")];
            match out {
                Some(path) => {
                    write_code_file(&path, &code, &comments)?;
                    Ok(EXIT_OK)
                }
                None => print(&write_code(&code, &comments)),
            }
        }
        Command::Report { q, tsv } => {
            let q = need_q(q, &cfg)?;
            let t = tables(&root_of(&cfg), q)?;
            print(&if tsv { tables_tsv(&t) } else { render_tables(&t) })
        }
    }
}

/// Runs the binary's `main`.
pub fn main_exit() -> ! {
    std::process::exit(run_cli(std::env::args_os()))
}
