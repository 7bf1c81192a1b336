//! `peterson`: compute, tabulate and verify the integral cohomology of the
//! type-A Peterson variety.
//!
//! Exit codes: 0 when everything passes, 1 when a verification fails, 2 on
//! usage errors (bad flags, malformed subsets, out-of-range `n`).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use peterson::cache::{CacheDir, CACHE_ENV, DEFAULT_CACHE_DIR};
use peterson::oracle::Oracle;
use peterson::petring::{basis_product, pi_to_polynomial};
use peterson::verify;
use peterson::{Error, SubsetJ};

#[derive(Parser, Debug)]
#[command(
    name = "peterson",
    version,
    about = "Integral cohomology of Peterson varieties"
)]
struct Cli {
    /// Directory for cached Smith normal forms and tables.
    #[arg(long, global = true, env = CACHE_ENV, default_value = DEFAULT_CACHE_DIR)]
    cache_dir: PathBuf,
    /// Disable the on-disk cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the basis classes pi_J with components, m_J and polynomial form.
    Basis {
        #[arg(long)]
        n: usize,
    },
    /// Expand pi_J * pi_K in the pi-basis. Subsets are written `{1,2,4}` or `{1,2}|{4}`.
    Mult {
        #[arg(long)]
        n: usize,
        j: String,
        k: String,
    },
    /// Run a verification suite.
    Verify {
        suite: Suite,
        #[arg(long)]
        n: usize,
        /// Highest degree to check (defaults to n-1 for `presentation`, 4 for `identities`).
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit the full pi-basis multiplication table as JSON.
    Table {
        #[arg(long)]
        n: usize,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also compare every entry with the brute-force quotient.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Presentation,
    TheoremA,
    Identities,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Presentation => "presentation",
            Suite::TheoremA => "theorem-a",
            Suite::Identities => "identities",
        }
    }
}

/// Envelope for every JSON result.
#[derive(Serialize)]
struct RunReport {
    command: String,
    parameters: Value,
    pass: bool,
    payload: Value,
}

struct Outcome {
    report: RunReport,
    text: String,
}

fn usage(err: &Error) -> bool {
    matches!(
        err,
        Error::InvalidArgument(_) | Error::SubsetParse { .. } | Error::AmbientMismatch { .. }
    )
}

fn check_n(n: usize) -> peterson::Result<()> {
    if !(2..=peterson::combinat::MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 2..={}",
            peterson::combinat::MAX_N
        )));
    }
    Ok(())
}

fn factored_form(j: &SubsetJ) -> String {
    let parts: Vec<String> = j
        .components()
        .iter()
        .map(|c| {
            let (k, m) = (c.len(), c.b);
            match m {
                1 => "y1".to_string(),
                2 => format!("e{k}(y1,y2)"),
                _ => format!("e{k}(y1..y{m})"),
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn cmd_basis(n: usize) -> peterson::Result<Outcome> {
    check_n(n)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for j in SubsetJ::all(n)? {
        let components: Vec<[usize; 2]> = j.components().iter().map(|c| [c.a, c.b]).collect();
        let poly = pi_to_polynomial(&j);
        let factored = factored_form(&j);
        text.push_str(&format!("{j}\tm={}\t{factored}\t= {poly}\n", j.m_factor()));
        rows.push(json!({
            "subset": j.members(),
            "display": j.to_string(),
            "degree": j.len(),
            "components": components,
            "m_j": j.m_factor().to_string(),
            "factored": factored,
            "polynomial": poly.to_json_terms(),
        }));
    }
    Ok(Outcome {
        report: RunReport {
            command: "basis".into(),
            parameters: json!({ "n": n }),
            pass: true,
            payload: json!({ "n": n, "basis": rows }),
        },
        text,
    })
}

fn cmd_mult(n: usize, j: &str, k: &str) -> peterson::Result<Outcome> {
    check_n(n)?;
    let (sj, sk) = (SubsetJ::parse(n, j)?, SubsetJ::parse(n, k)?);
    let product = basis_product(&sj, &sk)?;
    Ok(Outcome {
        text: format!("{product}\n"),
        report: RunReport {
            command: "mult".into(),
            parameters: json!({ "n": n, "j": sj.members(), "k": sk.members() }),
            pass: true,
            payload: json!({ "product": product.to_json_terms(), "display": product.to_string() }),
        },
    })
}

fn ranks_line(ranks: impl Iterator<Item = usize>) -> String {
    let v: Vec<String> = ranks.map(|r| r.to_string()).collect();
    format!("({})", v.join(","))
}

fn cmd_verify(
    suite: Suite,
    n: usize,
    max_degree: Option<u32>,
    trials: usize,
    seed: u64,
    cache: &CacheDir,
) -> peterson::Result<Outcome> {
    check_n(n)?;
    let oracle = Oracle::new(cache.clone());
    let (pass, payload, text, parameters) = match suite {
        Suite::Presentation => {
            let d = max_degree.unwrap_or(n as u32 - 1);
            let r = verify::presentation(n, d, &oracle)?;
            let mut text = String::new();
            for p in &r.degrees {
                let torsion: Vec<String> = p
                    .invariant_factors
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                text.push_str(&format!(
                    "d={}: rank {} (expected {}), torsion [{}], pi-basis {}{}\n",
                    p.d,
                    p.rank,
                    p.expected_rank,
                    torsion.join(","),
                    match p.pi_basis {
                        Some(true) => "ok",
                        Some(false) => "FAILED",
                        None => "n/a",
                    },
                    if p.pass { "" } else { "  <-- FAIL" }
                ));
            }
            text.push_str(&format!(
                "ranks {} total {} (expected {})\n",
                ranks_line(r.degrees.iter().map(|p| p.rank)),
                r.total_rank,
                r.expected_total
            ));
            (
                r.pass,
                serde_json::to_value(&r)?,
                text,
                json!({ "n": n, "max_degree": d }),
            )
        }
        Suite::TheoremA => {
            let r = verify::theorem_a(n, cache)?;
            let mut text = String::new();
            for p in &r.degrees {
                text.push_str(&format!(
                    "d={}: betti {} (eulerian {}), invariant rank {} (binomial {}){}\n",
                    p.degree,
                    p.betti,
                    p.eulerian_expected,
                    p.invariant_rank,
                    p.binom_expected,
                    if p.pass { "" } else { "  <-- FAIL" }
                ));
            }
            text.push_str(&format!(
                "invariant ranks {} vs Peterson ranks {}; betti total {}, invariant total {} (expected {})\n",
                ranks_line(r.degrees.iter().map(|p| p.invariant_rank)),
                ranks_line(r.peterson_ranks.iter().copied()),
                r.betti_total,
                r.invariant_total,
                r.expected_invariant_total
            ));
            (r.pass, serde_json::to_value(&r)?, text, json!({ "n": n }))
        }
        Suite::Identities => {
            let d = max_degree.unwrap_or(4);
            let r = verify::identities(n, d, trials, seed, &oracle)?;
            let mut text = String::new();
            for c in &r.checks {
                text.push_str(&format!(
                    "{}: {} instances, {} failures\n",
                    c.name,
                    c.instances,
                    c.failures.len()
                ));
                for f in &c.failures {
                    text.push_str(&format!("  FAIL {f}\n"));
                }
            }
            let params =
                json!({ "n": n, "max_degree": d, "trials": trials, "seed": seed.to_string() });
            (r.pass, serde_json::to_value(&r)?, text, params)
        }
    };
    let text = format!("{text}{}\n", if pass { "PASS" } else { "FAIL" });
    Ok(Outcome {
        report: RunReport {
            command: format!("verify {}", suite.name()),
            parameters,
            pass,
            payload,
        },
        text,
    })
}

fn cmd_table(
    n: usize,
    out: Option<&PathBuf>,
    check: bool,
    cache: &CacheDir,
) -> peterson::Result<Outcome> {
    let table = verify::multiplication_table(n, cache)?;
    let mut pass = true;
    let mut payload = serde_json::to_value(&table)?;
    let mut text = format!("{} entries\n", table.entries.len());
    if check {
        if n > 5 {
            return Err(Error::InvalidArgument(format!(
                "--check supports n <= 5, got {n}"
            )));
        }
        let c = verify::check_table_against_oracle(n, &Oracle::new(cache.clone()))?;
        pass = c.pass;
        text.push_str(&format!(
            "oracle check: {} entries, {} mismatches\n",
            c.entries,
            c.mismatches.len()
        ));
        payload["check"] = serde_json::to_value(&c)?;
    }
    let report = RunReport {
        command: "table".into(),
        parameters: json!({ "n": n, "check": check }),
        pass,
        payload,
    };
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
        text.push_str(&format!("written to {}\n", path.display()));
    }
    Ok(Outcome { report, text })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let cache = if cli.no_cache {
        CacheDir::disabled()
    } else {
        CacheDir::at(&cli.cache_dir)
    };
    let start = Instant::now();
    let (result, table_out) = match &cli.command {
        Command::Basis { n } => (cmd_basis(*n), false),
        Command::Mult { n, j, k } => (cmd_mult(*n, j, k), false),
        Command::Verify {
            suite,
            n,
            max_degree,
            trials,
            seed,
        } => (
            cmd_verify(*suite, *n, *max_degree, *trials, *seed, &cache),
            false,
        ),
        Command::Table { n, out, check } => {
            (cmd_table(*n, out.as_ref(), *check, &cache), out.is_some())
        }
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if usage(&e) { 2 } else { 1 });
        }
    };
    // timing goes to stderr so stdout stays byte-identical across runs
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    let mut stdout = std::io::stdout().lock();
    let written = if cli.json || (matches!(cli.command, Command::Table { .. }) && !table_out) {
        serde_json::to_string_pretty(&outcome.report)
            .map_err(std::io::Error::other)
            .and_then(|s| writeln!(stdout, "{s}"))
    } else {
        write!(stdout, "{}", outcome.text)
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
