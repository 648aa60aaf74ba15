use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use obrauer_client::{Client, ClientError};
use obrauer_core::api::{
    BasisRequest, CategorySpec, ComposeRequest, Mode, NormalizeRequest, RankRequest, StructRequest, VerifyRequest,
};
use obrauer_core::diagrams::Word;
use obrauer_core::json::{diagram_from_json, morphism_from_json, scalar_from_json, to_canonical};
use serde_json::Value;

const EXPR_HELP: &str = "\
Expressions:
  generators   c c' d d' s s' t t' x x'
  identity     1[word]      words use ^ and v, 0 is the empty word
  scalars      3  -1/2  D2  (scalars are endomorphisms of 0)
  f . g        f after g    binds tighter than *
  f * g        tensor product, f on the left
  + - ( )      sums and grouping; . and * are left associative
Example: obrauer normalize --mode aob \"s . (x * 1[^])\"";

/// Exact computations in oriented Brauer categories and their affine,
/// graded and cyclotomic variants.
#[derive(Parser)]
#[command(version, after_help = EXPR_HELP)]
struct Cli {
    /// Server URL; without it a private server runs in this process.
    #[arg(long, global = true, env = "OBRAUER_SERVER")]
    server: Option<String>,
    /// Print the canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CategoryArgs {
    /// Category: ob, aob, gob or obf.
    #[arg(long, default_value = "ob")]
    mode: Mode,
    /// Monic polynomial in u defining the cyclotomic quotient (obf).
    #[arg(long)]
    f: Option<String>,
    /// Bubble values, comma separated: the loop value in ob and gob,
    /// D1,D2,... in aob and obf. Symbolic when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta: Vec<String>,
    /// Truncation x^level = 0 in gob.
    #[arg(long)]
    level: Option<u32>,
}

impl From<CategoryArgs> for CategorySpec {
    fn from(a: CategoryArgs) -> CategorySpec {
        CategorySpec { mode: a.mode, f: a.f, delta: a.delta, level: a.level }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of an expression, or of a morphism given as JSON.
    #[command(after_help = EXPR_HELP)]
    Normalize {
        expr: String,
        #[command(flatten)]
        cat: CategoryArgs,
    },
    /// Normal form of LEFT . RIGHT.
    #[command(after_help = EXPR_HELP)]
    Compose {
        left: String,
        right: String,
        #[command(flatten)]
        cat: CategoryArgs,
    },
    /// Normally ordered basis of Hom(SRC, TGT).
    Basis {
        src: String,
        tgt: String,
        #[command(flatten)]
        cat: CategoryArgs,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Dimension of Hom(SRC, TGT).
    Dims {
        src: String,
        tgt: String,
        #[command(flatten)]
        cat: CategoryArgs,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Structure constants of the walled Brauer algebra on R up and S down strands.
    Structconst {
        r: usize,
        s: usize,
        #[command(flatten)]
        cat: CategoryArgs,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        /// all, or any of: relations, basis, affine, parameters, cyclotomic,
        /// level-one, fuzz, walled-brauer.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        /// Pyramid for the relation suite.
        #[arg(long, value_delimiter = ',', default_value = "2,3,2,1,1")]
        lambda: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank of the basis of Hom(SRC, TGT) in the cyclotomic quotient of
    /// level len(lambda), through the pyramid representation; exits 1 if
    /// the rank is short of the basis count.
    Rank {
        src: String,
        tgt: String,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<u32>,
        /// One value per column; symbolic m1, m2, ... when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct Bounds {
    /// Dots per strand (aob, and gob without --level).
    #[arg(long)]
    max_dots: Option<u32>,
    /// Total dots (aob, and gob without --level).
    #[arg(long)]
    max_degree: Option<u32>,
}

enum Outcome {
    Done(Value),
    Checked(Value, bool),
}

async fn run(client: &Client, cmd: Command) -> Result<Outcome, ClientError> {
    let basis_req = |src: String, tgt: String, cat: CategoryArgs, b: Bounds| BasisRequest {
        category: cat.into(),
        src,
        tgt,
        max_dots: b.max_dots,
        max_degree: b.max_degree,
    };
    Ok(match cmd {
        Command::Normalize { expr, cat } => {
            Outcome::Done(client.normalize(&NormalizeRequest { category: cat.into(), expr }).await?)
        }
        Command::Compose { left, right, cat } => {
            Outcome::Done(client.compose(&ComposeRequest { category: cat.into(), left, right }).await?)
        }
        Command::Basis { src, tgt, cat, bounds } => Outcome::Done(client.basis(&basis_req(src, tgt, cat, bounds)).await?),
        Command::Dims { src, tgt, cat, bounds } => Outcome::Done(client.dims(&basis_req(src, tgt, cat, bounds)).await?),
        Command::Structconst { r, s, cat } => {
            Outcome::Done(client.structconst(&StructRequest { category: cat.into(), r, s }).await?)
        }
        Command::Verify { suite, lambda, seed } => {
            let v = client.verify(&VerifyRequest { suites: suite, lambda, seed }).await?;
            let ok = v["passed"] == true;
            Outcome::Checked(v, ok)
        }
        Command::Rank { src, tgt, lambda, m, seed } => {
            let v = client.rank(&RankRequest { lambda, m, src, tgt, seed }).await?;
            let ok = v["passed"] == true;
            Outcome::Checked(v, ok)
        }
    })
}

fn text(v: &Value) -> String {
    if v.get("terms").is_some() {
        return match morphism_from_json(v) {
            Ok(m) => m.to_string(),
            Err(e) => e.to_string(),
        };
    }
    if let Some(reports) = v.get("reports").and_then(Value::as_array) {
        return reports
            .iter()
            .map(|r| {
                let pass = r["status"] == "pass";
                let mut line = format!("{} {} ({} ms)", if pass { "PASS" } else { "FAIL" }, r["name"].as_str().unwrap_or(""), r["ms"]);
                if let Some(w) = r["witness"].as_str().filter(|_| !pass) {
                    line.push_str(&format!(": {w}"));
                }
                line
            })
            .collect::<Vec<_>>()
            .join("\n");
    }
    if let Some(count) = v.get("count") {
        return format!("count {count} rank {}", v["rank"]);
    }
    let words = |k: &str| Word::parse(v[k].as_str().unwrap_or("")).unwrap_or_default();
    if let Some(basis) = v.get("basis").and_then(Value::as_array) {
        let (src, tgt) = match v.get("word") {
            Some(_) => (words("word"), words("word")),
            None => (words("src"), words("tgt")),
        };
        let mut lines = Vec::new();
        for (i, b) in basis.iter().enumerate() {
            let d = diagram_from_json(b, &src, &tgt).map(|d| d.to_string()).unwrap_or_default();
            let bubbles = b.get("coeff").and_then(|c| scalar_from_json(c).ok()).filter(|c| !c.is_one());
            match bubbles {
                Some(c) => lines.push(format!("b{i} = ({c}) {d}")),
                None => lines.push(format!("b{i} = {d}")),
            }
        }
        if let Some(rows) = v.get("products").and_then(Value::as_array) {
            for (i, row) in rows.iter().enumerate() {
                for (j, cell) in row.as_array().into_iter().flatten().enumerate() {
                    let terms: Vec<String> = cell
                        .as_array()
                        .into_iter()
                        .flatten()
                        .map(|t| {
                            let c = scalar_from_json(&t[1]).map(|c| c.to_string()).unwrap_or_default();
                            format!("({c}) b{}", t[0])
                        })
                        .collect();
                    let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                    lines.push(format!("b{i} . b{j} = {rhs}"));
                }
            }
        }
        return lines.join("\n");
    }
    if let Some(dim) = v.get("dim") {
        return dim.to_string();
    }
    to_canonical(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = rt.block_on(async {
        let client = match &cli.server {
            Some(url) => Client::new(url.clone()),
            None => {
                let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
                    .await
                    .map_err(|e| ClientError::Server { status: 0, message: e.to_string() })?;
                let addr = listener.local_addr().map_err(|e| ClientError::Server { status: 0, message: e.to_string() })?;
                tokio::spawn(obrauer_service::serve(listener));
                Client::new(format!("http://{addr}"))
            }
        };
        run(&client, cli.command).await
    });
    match result {
        Ok(outcome) => {
            let (v, ok) = match outcome {
                Outcome::Done(v) => (v, true),
                Outcome::Checked(v, ok) => (v, ok),
            };
            println!("{}", if cli.json { to_canonical(&v) } else { text(&v) });
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(ClientError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        super::Cli::command().debug_assert();
    }
}
