//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::counting::{count_nonoverlapping, count_overlapping, eval, homogenize_eval};
use crate::error::{Error, Result};
use crate::expr::QmExpr;
use crate::independence::{grigorchuk_enumerate, is_independent_set, LetterOrder};
use crate::nielsen::{apply_word, pullback_expr, NielsenWord};
use crate::quasimaps::{compose, surjection_preimage, QuasiMap};
use crate::verify::{list_checks, run_check, CheckParams};
use crate::word::Word;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "qmfree", version, about = "Counting quasimorphisms and quasi-endomorphisms of free groups")]
struct Cli {
    /// Emit a JSON envelope instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Rank of the free group; inferred from the inputs (at least 2) if absent.
    #[arg(long, global = true)]
    rank: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Freely reduce a word.
    Reduce { word: String },
    /// Count occurrences of a pattern.
    Count {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        non_overlapping: bool,
        text: String,
    },
    /// Evaluate an expression such as "C[ab] - 2/3*N[aB]" on a word.
    Eval {
        #[arg(long)]
        expr: String,
        word: String,
    },
    /// Homogenized value of an expression on a word.
    Homogenize {
        #[arg(long)]
        expr: String,
        word: String,
    },
    /// Nielsen moves.
    Nielsen {
        #[command(subcommand)]
        action: NielsenAction,
    },
    /// Grigorchuk family.
    Grig {
        #[command(subcommand)]
        action: GrigAction,
    },
    /// Whether the given words form an independent set.
    Indep {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Quasi-endomorphisms given as map-spec JSON files.
    Map {
        #[command(subcommand)]
        action: MapAction,
    },
    /// Preimage of a word under the surjection from rank n-1 to rank n.
    Preimage {
        #[arg(long)]
        n: usize,
        word: String,
    },
    /// Run a registered check.
    Verify {
        lemma_id: String,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List registered checks.
    ListChecks,
}

#[derive(Debug, Subcommand)]
enum NielsenAction {
    /// Image of a word under a comma-separated move word, applied left to right.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        moves: String,
        word: String,
    },
    /// Rewrite of an expression composed with the move word.
    Pullback {
        #[arg(long, allow_hyphen_values = true)]
        moves: String,
        expr: String,
    },
}

#[derive(Debug, Subcommand)]
enum GrigAction {
    /// Enumerate family members up to a length.
    Enum {
        #[arg(long)]
        max_len: usize,
        /// Letter order, e.g. "aAbB" (default: a < A < b < B < ...).
        #[arg(long)]
        order: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum MapAction {
    /// Apply a map to a word.
    Apply {
        #[arg(long)]
        spec: PathBuf,
        word: String,
    },
    /// Compose maps (first spec applied first); prints the chain spec.
    Compose {
        #[arg(long, required = true, num_args = 1)]
        spec: Vec<PathBuf>,
    },
}

/// Result of a command: plain-text rendering and JSON value.
struct Output {
    text: String,
    json: Value,
}

impl Output {
    fn same(text: String) -> Output {
        Output { json: json!(text), text }
    }
}

/// Process exit code with the text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            let stdout = if cli.json {
                envelope(json!({"version": SCHEMA_VERSION, "result": out.json}))
            } else {
                format!("{}\n", out.text)
            };
            Outcome { code: 0, stdout, stderr: String::new() }
        }
        Err(e) if cli.json => {
            let err = json!({"kind": e.kind(), "message": e.to_string()});
            Outcome { code: 1, stdout: envelope(json!({"version": SCHEMA_VERSION, "error": err})), stderr: String::new() }
        }
        Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn envelope(v: Value) -> String {
    format!("{}\n", serde_json::to_string(&v).expect("serializable"))
}

fn rank_for(cli: &Cli, words: &[&str]) -> usize {
    cli.rank.unwrap_or_else(|| words.iter().map(|w| Word::infer_rank(w, 2)).max().unwrap_or(2))
}

fn rank_for_expr(cli: &Cli, expr: &str, words: &[&str]) -> usize {
    cli.rank.unwrap_or_else(|| QmExpr::infer_rank(expr, rank_for(cli, words)))
}

fn read_spec(path: &PathBuf) -> Result<QuasiMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
    QuasiMap::from_json(&text)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Reduce { word } => {
            let w = Word::parse(rank_for(cli, &[word]), word)?;
            Ok(Output::same(w.to_string()))
        }
        Command::Count { pattern, non_overlapping, text } => {
            let rank = rank_for(cli, &[pattern, text]);
            let (p, t) = (Word::parse(rank, pattern)?, Word::parse(rank, text)?);
            let n = if *non_overlapping { count_nonoverlapping(&p, &t)? } else { count_overlapping(&p, &t)? };
            Ok(Output { text: n.to_string(), json: json!(n) })
        }
        Command::Eval { expr, word } => {
            let rank = rank_for_expr(cli, expr, &[word]);
            let v = eval(&QmExpr::parse(rank, expr)?, &Word::parse(rank, word)?)?;
            Ok(Output::same(v.to_string()))
        }
        Command::Homogenize { expr, word } => {
            let rank = rank_for_expr(cli, expr, &[word]);
            let v = homogenize_eval(&QmExpr::parse(rank, expr)?, &Word::parse(rank, word)?)?;
            Ok(Output::same(v.to_string()))
        }
        Command::Nielsen { action: NielsenAction::Apply { moves, word } } => {
            let rank = rank_for(cli, &[word]);
            let img = apply_word(&NielsenWord::parse(rank, moves)?, &Word::parse(rank, word)?)?;
            Ok(Output::same(img.to_string()))
        }
        Command::Nielsen { action: NielsenAction::Pullback { moves, expr } } => {
            let rank = rank_for_expr(cli, expr, &[]);
            let r = pullback_expr(&NielsenWord::parse(rank, moves)?, &QmExpr::parse(rank, expr)?)?;
            Ok(Output {
                text: format!("{}\nerror_bound {}", r.expr, r.error_bound),
                json: json!({"expr": r.expr.to_string(), "error_bound": r.error_bound.to_string()}),
            })
        }
        Command::Grig { action: GrigAction::Enum { max_len, order } } => {
            let rank = cli.rank.unwrap_or_else(|| order.as_deref().map_or(2, |o| Word::infer_rank(o, 2)));
            let order = match order {
                Some(o) => LetterOrder::parse(rank, o)?,
                None => LetterOrder::default_for(rank),
            };
            let fam = grigorchuk_enumerate(rank, &order, *max_len)?;
            Ok(Output {
                text: fam.members.join("\n"),
                json: serde_json::to_value(&fam).expect("serializable"),
            })
        }
        Command::Indep { words } => {
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            let rank = rank_for(cli, &refs);
            let ws: Vec<Word> = words.iter().map(|w| Word::parse(rank, w)).collect::<Result<_>>()?;
            let v = is_independent_set(&ws);
            Ok(Output { text: v.to_string(), json: json!(v) })
        }
        Command::Map { action: MapAction::Apply { spec, word } } => {
            let q = read_spec(spec)?;
            let img = q.apply(&Word::parse(q.dom_rank, word)?)?;
            Ok(Output::same(img.to_string()))
        }
        Command::Map { action: MapAction::Compose { spec } } => {
            let mut maps = spec.iter().map(read_spec);
            let mut acc = maps.next().expect("clap requires one spec")?;
            for q in maps {
                acc = compose(&acc, &q?)?;
            }
            let v = serde_json::to_value(acc.to_spec()).expect("serializable");
            Ok(Output { text: serde_json::to_string(&v).expect("serializable"), json: v })
        }
        Command::Preimage { n, word } => {
            let pre = surjection_preimage(*n, &Word::parse(*n, word)?)?;
            Ok(Output::same(pre.to_string()))
        }
        Command::Verify { lemma_id, max_len, seed } => {
            let r = run_check(lemma_id, CheckParams { rank: cli.rank, max_len: *max_len, seed: *seed })?;
            let j = r.to_json();
            let text = format!(
                "{} {}: claimed {} observed {} witness [{}] space {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.lemma,
                j["claimed"].to_string().trim_matches('"'),
                r.observed,
                r.witness.join(", "),
                r.space
            );
            Ok(Output { text, json: j })
        }
        Command::ListChecks => {
            let checks = list_checks();
            let text = checks.iter().map(|c| format!("{}\t{}", c.id, c.summary)).collect::<Vec<_>>().join("\n");
            let json = checks
                .iter()
                .map(|c| {
                    json!({"id": c.id, "summary": c.summary, "default_rank": c.default_rank, "default_max_len": c.default_max_len})
                })
                .collect();
            Ok(Output { text, json: Value::Array(json) })
        }
    }
}
