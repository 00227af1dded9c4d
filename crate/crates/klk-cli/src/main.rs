//! `klk` — classification runs, verdict queries, character dumps, cell
//! tables, KL queries, cache management and self-verification on top of
//! the klk-core engine.
//!
//! Exit codes: 0 success, 2 invalid input, 3 corrupt or incompatible
//! cache, 4 capacity exceeded, 1 internal failure.

use clap::{Parser, Subcommand, ValueEnum};
use klk_core::hecke::KLTable;
use klk_core::kostant::{self, Verdict};
use klk_core::perm::{parse_shape, shape_string, Permutation, DEFAULT_RANK_CAP};
use klk_core::{Engine, Error};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CACHE: u8 = 3;
const EXIT_CAPACITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "klk",
    version,
    about = "Kazhdan-Lusztig combinatorics and the Kostant-problem classifier for S_n"
)]
struct Cli {
    /// Directory for KL table caches (default: $KLK_CACHE_DIR, then the
    /// platform cache directory)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Config file with `key=value` lines; any long flag can be given there
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Rank cap for n! enumeration (default 8)
    #[arg(long, global = true)]
    max_rank: Option<u8>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every simple highest-weight module of one rank
    Classify {
        #[arg(long)]
        n: Option<u8>,
        /// List all n! elements, not only the involutions
        #[arg(long)]
        per_element: bool,
    },
    /// Verdict for a single element
    Verdict {
        #[arg(long)]
        n: Option<u8>,
        /// One-line form ("2143" or "2,1,4,3"), or "w:" plus a word
        #[arg(long)]
        perm: Option<String>,
        /// Reduced word, comma-separated generator indices ("2,1,4,3")
        #[arg(long)]
        word: Option<String>,
    },
    /// Graded character of theta_W applied to the simple module L(X)
    Character {
        #[arg(long)]
        n: Option<u8>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        simple: Option<String>,
        /// Restrict the output to one degree
        #[arg(long)]
        layer: Option<i32>,
    },
    /// Grids of two-sided cells, one row per insertion tableau
    Cells {
        #[arg(long)]
        n: Option<u8>,
        /// One partition ("2,2,1"); all shapes when absent
        #[arg(long)]
        shape: Option<String>,
        /// Mark the columns (left cells) with a negative verdict
        #[arg(long)]
        mark_negative: bool,
    },
    /// One Kazhdan-Lusztig polynomial, classical and v-normalized
    Kl {
        #[arg(long)]
        n: Option<u8>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        w: Option<String>,
    },
    /// KL table cache management
    Table {
        #[arg(long)]
        n: Option<u8>,
        /// Build and save, replacing any cached table
        #[arg(long)]
        build: bool,
        /// Load and validate the cached table
        #[arg(long)]
        check: bool,
    },
    /// Brute-force oracle suites
    Verify {
        #[arg(long)]
        n: Option<u8>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

struct Fail {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Fail>;

fn fail(code: u8, message: impl Into<String>) -> Fail {
    Fail {
        code,
        message: message.into(),
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::RankMismatch(..)
            | Error::InvalidPermutation(_)
            | Error::InvalidGenerator { .. }
            | Error::NotAnInvolution(_)
            | Error::UnknownShape(_) => EXIT_INVALID,
            Error::CorruptCache(_) | Error::IncompatibleCache(_) => EXIT_CACHE,
            Error::CapacityExceeded { .. } => EXIT_CAPACITY,
            Error::NotAModuleCharacter { .. } | Error::ConsistencyFailure(_) | Error::Io(_) => {
                EXIT_INTERNAL
            }
        };
        fail(code, e.to_string())
    }
}

/// Resolved global options: CLI flag, then config file, then environment,
/// then the platform default.
struct Ctx {
    cfg: BTreeMap<String, String>,
    cache_dir: PathBuf,
    cap: u8,
    format: Format,
}

impl Ctx {
    fn new(cli: &Cli) -> CliResult<Self> {
        let mut cfg = BTreeMap::new();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| fail(EXIT_INVALID, format!("config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(fail(
                        EXIT_INVALID,
                        format!("config {}:{}: expected key=value", path.display(), lineno + 1),
                    ));
                };
                cfg.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        let cache_dir = cli
            .cache_dir
            .clone()
            .or_else(|| cfg.get("cache-dir").map(PathBuf::from))
            .or_else(|| std::env::var_os("KLK_CACHE_DIR").map(PathBuf::from))
            .unwrap_or_else(default_cache_dir);
        let cap = match (cli.max_rank, cfg.get("max-rank")) {
            (Some(v), _) => v,
            (None, Some(v)) => v
                .parse()
                .map_err(|_| fail(EXIT_INVALID, format!("config max-rank: bad value {v:?}")))?,
            (None, None) => DEFAULT_RANK_CAP,
        };
        let format = match (cli.format, cfg.get("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => match v.as_str() {
                "text" => Format::Text,
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => {
                    return Err(fail(
                        EXIT_INVALID,
                        format!("config format: bad value {other:?}"),
                    ))
                }
            },
            (None, None) => Format::Text,
        };
        Ok(Ctx {
            cfg,
            cache_dir,
            cap,
            format,
        })
    }

    fn rank(&self, n: Option<u8>) -> CliResult<u8> {
        match n {
            Some(v) => Ok(v),
            None => match self.cfg.get("n") {
                Some(v) => v
                    .parse()
                    .map_err(|_| fail(EXIT_INVALID, format!("config n: bad value {v:?}"))),
                None => Err(fail(EXIT_INVALID, "missing required option --n")),
            },
        }
    }

    fn string_opt(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.cfg.get(key).cloned())
    }

    fn required(&self, flag: Option<String>, key: &str) -> CliResult<String> {
        self.string_opt(flag, key)
            .ok_or_else(|| fail(EXIT_INVALID, format!("missing required option --{key}")))
    }

    fn flag(&self, set: bool, key: &str) -> bool {
        set || self.cfg.get(key).is_some_and(|v| v == "true" || v == "1")
    }

    fn table_path(&self, n: u8) -> PathBuf {
        self.cache_dir.join(format!("kltable-n{n}.klt"))
    }

    /// Loads the cached table when present (a corrupt or wrong-rank file
    /// is an error, never a silent recompute), builds and caches it
    /// otherwise.
    fn load_or_build(&self, n: u8) -> CliResult<Arc<KLTable>> {
        let bin = self.table_path(n);
        let jsonl = bin.with_extension("jsonl");
        let existing = [&bin, &jsonl].into_iter().find(|p| p.exists());
        let table = match existing {
            Some(path) => KLTable::load_expecting(path, n, self.cap)?,
            None => {
                let table = KLTable::build_capped(n, self.cap, Default::default())?;
                table.save(&bin)?;
                table
            }
        };
        Ok(Arc::new(table))
    }

    fn engine(&self, n: u8) -> CliResult<Engine> {
        Ok(Engine::from_table(self.load_or_build(n)?)?)
    }

    fn parse_perm(&self, text: &str, n: u8) -> CliResult<Permutation> {
        Ok(Permutation::parse(text, n)?)
    }
}

fn default_cache_dir() -> PathBuf {
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME") {
        return Path::new(&xdg).join("klk");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return Path::new(&home).join(".cache").join("klk");
    }
    PathBuf::from(".klk-cache")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let ctx = Ctx::new(&cli)?;
    match cli.command {
        Command::Classify { n, per_element } => {
            let n = ctx.rank(n)?;
            let per_element = ctx.flag(per_element, "per-element");
            cmd_classify(&ctx, n, per_element)
        }
        Command::Verdict { n, perm, word } => {
            let n = ctx.rank(n)?;
            cmd_verdict(&ctx, n, perm, word)
        }
        Command::Character {
            n,
            theta,
            simple,
            layer,
        } => {
            let n = ctx.rank(n)?;
            cmd_character(&ctx, n, theta, simple, layer)
        }
        Command::Cells {
            n,
            shape,
            mark_negative,
        } => {
            let n = ctx.rank(n)?;
            let mark = ctx.flag(mark_negative, "mark-negative");
            cmd_cells(&ctx, n, shape, mark)
        }
        Command::Kl { n, x, w } => {
            let n = ctx.rank(n)?;
            cmd_kl(&ctx, n, x, w)
        }
        Command::Table { n, build, check } => {
            let n = ctx.rank(n)?;
            let build = ctx.flag(build, "build");
            let check = ctx.flag(check, "check");
            cmd_table(&ctx, n, build, check)
        }
        Command::Verify { n } => {
            let n = ctx.rank(n)?;
            cmd_verify(&ctx, n)
        }
    }
}

fn verdict_rule(v: &Verdict) -> String {
    match v {
        Verdict::Positive(rule) => rule.to_string(),
        Verdict::Negative(_) => "GradedWitness".to_string(),
        Verdict::Unknown => String::new(),
    }
}

fn verdict_json(w: &Permutation, iota: &Permutation, v: &Verdict) -> serde_json::Value {
    let witness = match v {
        Verdict::Negative(wit) => json!({
            "x": wit.x.one_line_string(),
            "word": wit.x.word_string(),
            "degree": wit.degree,
            "lhs": wit.lhs,
            "rhs": wit.rhs,
        }),
        _ => serde_json::Value::Null,
    };
    json!({
        "perm": w.one_line_string(),
        "word": w.word_string(),
        "left_cell_involution": iota.one_line_string(),
        "status": v.status(),
        "rule": match v { Verdict::Positive(r) => json!(r.to_string()), _ => serde_json::Value::Null },
        "witness": witness,
    })
}

fn verdict_csv_row(w: &Permutation, iota: &Permutation, v: &Verdict) -> String {
    let (wx, wd, lhs, rhs) = match v {
        Verdict::Negative(wit) => (
            wit.x.one_line_string(),
            wit.degree.to_string(),
            wit.lhs.to_string(),
            wit.rhs.to_string(),
        ),
        _ => Default::default(),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        w.word_string(),
        w.one_line_string(),
        iota.one_line_string(),
        v.status(),
        verdict_rule(v),
        wx,
        wd,
        format_args!("{lhs},{rhs}")
    )
}

const VERDICT_CSV_HEADER: &str =
    "word,one_line,left_cell_involution,status,rule,witness_x,witness_degree,lhs,rhs";

fn verdict_detail(v: &Verdict) -> String {
    match v {
        Verdict::Positive(rule) => format!("rule {rule}"),
        Verdict::Negative(wit) => format!(
            "witness x = {} (word {}), degree {}: {} > {}",
            wit.x.one_line_string(),
            wit.x.word_string(),
            wit.degree,
            wit.lhs,
            wit.rhs
        ),
        Verdict::Unknown => String::new(),
    }
}

fn cmd_classify(ctx: &Ctx, n: u8, per_element: bool) -> CliResult<u8> {
    let engine = ctx.engine(n)?;
    let summary = kostant::classify_all(&engine)?;
    let (pos, neg, unk) = summary.counts();
    let negatives: Vec<String> = summary
        .negative_involutions()
        .iter()
        .map(|w| w.one_line_string())
        .collect();
    let unknowns: Vec<String> = summary
        .unknown_involutions()
        .iter()
        .map(|w| w.one_line_string())
        .collect();
    match ctx.format {
        Format::Text => {
            println!("Kostant classification for S_{n}");
            println!(
                "involutions: {} ({pos} positive, {neg} negative, {unk} unknown)",
                summary.involution_verdicts.len()
            );
            println!();
            for (w, v) in &summary.involution_verdicts {
                println!(
                    "{:<14} {:<10} {:<9} {}",
                    w.word_string(),
                    w.one_line_string(),
                    v.status(),
                    verdict_detail(v)
                );
            }
            if per_element {
                println!();
                println!("per-element verdicts");
                for (w, iota, v) in summary.per_element(engine.cells()) {
                    println!(
                        "{:<14} {:<10} involution {:<10} {}",
                        w.word_string(),
                        w.one_line_string(),
                        iota.one_line_string(),
                        v.status()
                    );
                }
            }
            if !negatives.is_empty() {
                println!();
                println!("negative involutions: {}", negatives.join(" "));
            }
            if !unknowns.is_empty() {
                println!("unknown involutions: {}", unknowns.join(" "));
            }
        }
        Format::Csv => {
            println!("{VERDICT_CSV_HEADER}");
            if per_element {
                for (w, iota, v) in summary.per_element(engine.cells()) {
                    println!("{}", verdict_csv_row(&w, &iota, &v));
                }
            } else {
                for (w, v) in &summary.involution_verdicts {
                    println!("{}", verdict_csv_row(w, w, v));
                }
            }
        }
        Format::Json => {
            let mut doc = json!({
                "n": n,
                "counts": {"positive": pos, "negative": neg, "unknown": unk},
                "negative_involutions": negatives,
                "unknown_involutions": unknowns,
                "involutions": summary
                    .involution_verdicts
                    .iter()
                    .map(|(w, v)| verdict_json(w, w, v))
                    .collect::<Vec<_>>(),
            });
            if per_element {
                doc["elements"] = summary
                    .per_element(engine.cells())
                    .iter()
                    .map(|(w, iota, v)| verdict_json(w, iota, v))
                    .collect::<Vec<_>>()
                    .into();
            }
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(0)
}

fn cmd_verdict(ctx: &Ctx, n: u8, perm: Option<String>, word: Option<String>) -> CliResult<u8> {
    let perm = ctx.string_opt(perm, "perm");
    let word = ctx.string_opt(word, "word");
    let w = match (perm, word) {
        (Some(p), None) => ctx.parse_perm(&p, n)?,
        (None, Some(ws)) => ctx.parse_perm(&format!("w:{ws}"), n)?,
        _ => {
            return Err(fail(
                EXIT_INVALID,
                "exactly one of --perm and --word is required",
            ))
        }
    };
    let engine = ctx.engine(n)?;
    let (iota, v) = kostant::verdict(&engine, &w)?;
    match ctx.format {
        Format::Text => {
            println!("element {} (word {})", w.one_line_string(), w.word_string());
            println!(
                "left-cell involution {} (word {})",
                iota.one_line_string(),
                iota.word_string()
            );
            println!("status {}", v.status());
            let detail = verdict_detail(&v);
            if !detail.is_empty() {
                println!("{detail}");
            }
        }
        Format::Csv => {
            println!("{VERDICT_CSV_HEADER}");
            println!("{}", verdict_csv_row(&w, &iota, &v));
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&verdict_json(&w, &iota, &v)).unwrap()
            );
        }
    }
    Ok(0)
}

fn cmd_character(
    ctx: &Ctx,
    n: u8,
    theta: Option<String>,
    simple: Option<String>,
    layer: Option<i32>,
) -> CliResult<u8> {
    let theta = ctx.required(theta, "theta")?;
    let simple = ctx.required(simple, "simple")?;
    let layer = match (layer, ctx.cfg.get("layer")) {
        (Some(d), _) => Some(d),
        (None, Some(v)) => Some(
            v.parse()
                .map_err(|_| fail(EXIT_INVALID, format!("config layer: bad value {v:?}")))?,
        ),
        (None, None) => None,
    };
    let w = ctx.parse_perm(&theta, n)?;
    let x = ctx.parse_perm(&simple, n)?;
    let engine = ctx.engine(n)?;
    let ch = engine.chars().theta_on_simple(&w, &x)?;
    let degrees: Vec<i32> = match (layer, ch.degree_range()) {
        (Some(d), _) => vec![d],
        (None, Some((lo, hi))) => (lo..=hi).collect(),
        (None, None) => Vec::new(),
    };
    match ctx.format {
        Format::Text => {
            println!(
                "theta_{} L({}) graded character",
                w.word_string(),
                x.word_string()
            );
            if degrees.is_empty() {
                println!("0");
            }
            for d in &degrees {
                let layer = ch.graded_layer(*d);
                let entries: Vec<String> = layer
                    .iter()
                    .map(|(p, m)| {
                        if *m == 1 {
                            format!("L({})", p.word_string())
                        } else {
                            format!("L({})*{m}", p.word_string())
                        }
                    })
                    .collect();
                println!("d={d}: {}", entries.join(" "));
            }
        }
        Format::Csv => {
            println!("x,word,d,mult");
            for d in &degrees {
                for (p, m) in ch.graded_layer(*d) {
                    println!("{},{},{d},{m}", p.one_line_string(), p.word_string());
                }
            }
        }
        Format::Json => {
            let entries: Vec<_> = degrees
                .iter()
                .flat_map(|&d| {
                    ch.graded_layer(d)
                        .into_iter()
                        .map(move |(p, m)| {
                            json!({
                                "x": p.one_line_string(),
                                "word": p.word_string(),
                                "d": d,
                                "mult": m,
                            })
                        })
                })
                .collect();
            let doc = json!({
                "theta": w.one_line_string(),
                "simple": x.one_line_string(),
                "entries": entries,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(0)
}

fn cmd_cells(ctx: &Ctx, n: u8, shape: Option<String>, mark_negative: bool) -> CliResult<u8> {
    let engine = ctx.engine(n)?;
    let cells = engine.cells().clone();
    let shapes: Vec<Vec<u8>> = match ctx.string_opt(shape, "shape") {
        Some(text) => vec![parse_shape(&text, n)?],
        None => (0..cells.num_two_sided_cells() as u32)
            .map(|tid| cells.shape_of_two_sided(tid).to_vec())
            .collect(),
    };
    let summary = if mark_negative {
        Some(kostant::classify_all(&engine)?)
    } else {
        None
    };

    let mut docs = Vec::new();
    for shape in &shapes {
        let table = cells.cell_table(shape)?;
        // a column is negative iff the involution of its left cell is
        let negative_cols: Vec<bool> = match &summary {
            Some(s) => table
                .col_tableaux
                .iter()
                .enumerate()
                .map(|(c, _)| {
                    let any = &table.grid[0][c];
                    let iota = cells
                        .involution_of_left_cell(any)
                        .expect("left cell has an involution");
                    s.verdict_of_involution(&iota)
                        .is_some_and(|v| v.is_negative())
                })
                .collect(),
            None => vec![false; table.size()],
        };
        match ctx.format {
            Format::Text => {
                let a = klk_core::cells::a_value_of_shape(shape);
                println!(
                    "shape {} (a = {a}, {}x{} grid)",
                    shape_string(shape),
                    table.size(),
                    table.size()
                );
                let row_label_width = table
                    .row_tableaux
                    .iter()
                    .map(|t| t.compact().len())
                    .max()
                    .unwrap_or(0);
                let col_widths: Vec<usize> = (0..table.size())
                    .map(|c| {
                        table
                            .grid
                            .iter()
                            .map(|row| row[c].word_string().len())
                            .chain([table.col_tableaux[c].compact().len()])
                            .max()
                            .unwrap()
                    })
                    .collect();
                let mut header = format!("{:>row_label_width$}", "");
                for (tab, width) in table.col_tableaux.iter().zip(&col_widths) {
                    header.push_str(&format!("  {:<w$}", tab.compact(), w = width));
                }
                println!("{}", header.trim_end());
                for (r, tab) in table.row_tableaux.iter().enumerate() {
                    let mut line = format!("{:>row_label_width$}", tab.compact());
                    for (entry, width) in table.grid[r].iter().zip(&col_widths) {
                        line.push_str(&format!("  {:<w$}", entry.word_string(), w = width));
                    }
                    println!("{}", line.trim_end());
                }
                if negative_cols.iter().any(|&b| b) {
                    let mut line = format!("{:>row_label_width$}", "");
                    for (&neg, width) in negative_cols.iter().zip(&col_widths) {
                        let mark = if neg { "^" } else { "" };
                        line.push_str(&format!("  {:<w$}", mark, w = width));
                    }
                    println!("{}", line.trim_end());
                }
                println!();
            }
            Format::Csv => {
                for (r, row_tab) in table.row_tableaux.iter().enumerate() {
                    for (c, col_tab) in table.col_tableaux.iter().enumerate() {
                        let w = &table.grid[r][c];
                        println!(
                            "{},{},{},{},{},{}",
                            shape_string(shape),
                            row_tab.compact(),
                            col_tab.compact(),
                            w.word_string(),
                            w.one_line_string(),
                            negative_cols[c]
                        );
                    }
                }
            }
            Format::Json => {
                docs.push(json!({
                    "shape": shape_string(shape),
                    "a": klk_core::cells::a_value_of_shape(shape),
                    "rows": table.row_tableaux.iter().map(|t| t.compact()).collect::<Vec<_>>(),
                    "cols": table.col_tableaux.iter().map(|t| t.compact()).collect::<Vec<_>>(),
                    "grid": table.grid.iter().map(|row| {
                        row.iter().map(|w| json!({
                            "word": w.word_string(),
                            "one_line": w.one_line_string(),
                        })).collect::<Vec<_>>()
                    }).collect::<Vec<_>>(),
                    "negative_columns": table
                        .col_tableaux
                        .iter()
                        .zip(&negative_cols)
                        .filter(|(_, &neg)| neg)
                        .map(|(t, _)| t.compact())
                        .collect::<Vec<_>>(),
                }));
            }
        }
    }
    if ctx.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&docs).unwrap());
    }
    Ok(0)
}

fn cmd_kl(ctx: &Ctx, n: u8, x: Option<String>, w: Option<String>) -> CliResult<u8> {
    let x = ctx.required(x, "x")?;
    let w = ctx.required(w, "w")?;
    let x = ctx.parse_perm(&x, n)?;
    let w = ctx.parse_perm(&w, n)?;
    let table = ctx.load_or_build(n)?;
    let p = table.kl_poly(&x, &w)?;
    let h = table.h_by_perm(&x, &w)?.clone();
    let mu = table.mu_by_perm(&x, &w)?;
    match ctx.format {
        Format::Text => {
            println!(
                "P_{{{},{}}}(q) = {p}",
                x.one_line_string(),
                w.one_line_string()
            );
            println!(
                "h_{{{},{}}}(v) = {h}",
                x.one_line_string(),
                w.one_line_string()
            );
            println!("mu = {mu}");
        }
        Format::Csv => {
            println!("x,w,p_q,h_v,mu");
            println!(
                "{},{},{p},{h},{mu}",
                x.one_line_string(),
                w.one_line_string()
            );
        }
        Format::Json => {
            let doc = json!({
                "x": x.one_line_string(),
                "w": w.one_line_string(),
                "p_q": p.to_string(),
                "p_coeffs": p.coeffs,
                "h_v": h.to_string(),
                "h_terms": h.terms(),
                "mu": mu,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(0)
}

fn cmd_table(ctx: &Ctx, n: u8, build: bool, check: bool) -> CliResult<u8> {
    if build == check {
        return Err(fail(
            EXIT_INVALID,
            "exactly one of --build and --check is required",
        ));
    }
    if build {
        let table = KLTable::build_capped(n, ctx.cap, Default::default())?;
        let (bin, jsonl) = table.save(&ctx.table_path(n))?;
        match ctx.format {
            Format::Json => {
                let doc = json!({
                    "n": n,
                    "elements": table.group().order(),
                    "records": table.record_count(),
                    "binary": bin.display().to_string(),
                    "portable": jsonl.display().to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            _ => {
                println!(
                    "built KL table for S_{n}: {} elements, {} records",
                    table.group().order(),
                    table.record_count()
                );
                println!("saved {}", bin.display());
                println!("saved {}", jsonl.display());
            }
        }
    } else {
        let bin = ctx.table_path(n);
        let jsonl = bin.with_extension("jsonl");
        let path = [&bin, &jsonl]
            .into_iter()
            .find(|p| p.exists())
            .ok_or_else(|| {
                fail(
                    EXIT_CACHE,
                    format!("no cached table for rank {n} under {}", ctx.cache_dir.display()),
                )
            })?;
        let table = KLTable::load_expecting(path, n, ctx.cap)?;
        match ctx.format {
            Format::Json => {
                let doc = json!({
                    "n": n,
                    "path": path.display().to_string(),
                    "records": table.record_count(),
                    "ok": true,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            _ => {
                println!(
                    "cache ok: {} (rank {n}, {} records)",
                    path.display(),
                    table.record_count()
                );
            }
        }
    }
    Ok(0)
}

fn cmd_verify(ctx: &Ctx, n: u8) -> CliResult<u8> {
    let reports = klk_core::oracle::verify_all(n, ctx.cap)?;
    let all_pass = reports.iter().all(|r| r.pass);
    match ctx.format {
        Format::Json => {
            let doc = json!({
                "n": n,
                "pass": all_pass,
                "suites": reports,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        _ => {
            for r in &reports {
                let status = if r.pass { "PASS" } else { "FAIL" };
                println!("{status} {} (n={}): {}", r.name, r.n, r.detail);
            }
        }
    }
    Ok(if all_pass { 0 } else { EXIT_INTERNAL })
}
