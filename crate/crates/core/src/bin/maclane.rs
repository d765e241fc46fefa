//! Command-line interface: inductive valuations, ramified approximation,
//! diskoids, semistable elliptic models, and minimal resultants of rational
//! maps, over exactly represented discretely valued fields.

use std::io::{BufRead, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use maclane::errors::MclError;
use maclane::maclane::IndVal;
use maclane::request::{self, base_from_spec, chain_dot, error_json, run_request};

#[derive(Parser)]
#[command(name = "maclane", version, about = "Inductive valuations, ramified approximation, and semistable reduction")]
struct Cli {
    /// Process a JSONL batch file: one request object per line, one response
    /// per line, order preserved.
    #[arg(long, global = true)]
    batch: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Approximant chain of a monic locally irreducible polynomial.
    Approximants {
        #[arg(long)]
        base: String,
        /// Polynomial in z, e.g. "z^4+20*z^2+292" or "[292,0,20,0,1]".
        poly: String,
        /// Emit JSON (default is readable text).
        #[arg(long)]
        json: bool,
        /// Emit a DOT graph of the chain.
        #[arg(long)]
        dot: bool,
    },
    /// Weakly totally wildly ramified approximation inside the minimal disk.
    RamifiedApprox {
        #[arg(long)]
        base: String,
        poly: String,
        #[arg(long)]
        json: bool,
    },
    /// Minimal single disk containing all roots, as a diskoid.
    MinDisk {
        #[arg(long)]
        base: String,
        poly: String,
        #[arg(long)]
        json: bool,
    },
    /// Infimum valuation of a polynomial on a diskoid D(phi, s).
    DiskoidVal {
        #[arg(long)]
        base: String,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        s: String,
        poly: String,
        #[arg(long)]
        json: bool,
    },
    /// Semistable model of an elliptic curve over a weakly totally ramified extension.
    EcSemistable {
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "0")]
        a1: String,
        #[arg(long, default_value = "0")]
        a2: String,
        #[arg(long, default_value = "0")]
        a3: String,
        #[arg(long, default_value = "0")]
        a4: String,
        #[arg(long, default_value = "0")]
        a6: String,
        #[arg(long)]
        json: bool,
    },
    /// Valuation of the resultant of a rational map.
    DynOrdres {
        #[arg(long)]
        base: String,
        #[arg(long)]
        deg: u64,
        /// Comma-separated coefficients of the numerator form (low X-power first).
        #[arg(long)]
        f0: String,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        json: bool,
    },
    /// Minimal-resultant search for a rational map.
    DynSemistable {
        #[arg(long)]
        base: String,
        #[arg(long)]
        deg: u64,
        #[arg(long)]
        f0: String,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        json: bool,
    },
    /// Degree bounds A(p, d) and B(p, d).
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(path) = cli.batch {
        return run_batch(&path);
    }
    let Some(cmd) = cli.command else {
        eprintln!("a subcommand or --batch is required; see --help");
        return ExitCode::from(1);
    };
    let (req, json_out, dot_out) = match build_request(cmd) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", e);
            return ExitCode::from(1);
        }
    };
    match run_request(&req) {
        Ok(result) => {
            if dot_out {
                if let (Some(base), Some(input)) = (req["base"].as_str(), req["input"].as_str()) {
                    match base_from_spec(base)
                        .and_then(|k| request::parse_poly(&k, input).map(|p| (k.clone(), p)))
                        .and_then(|(k, p)| {
                            let m = p.monic(&k);
                            IndVal::approximants(&k, &m)
                        }) {
                        Ok(chain) => print!("{}", chain_dot(&chain)),
                        Err(e) => return domain_error(&e),
                    }
                }
                return ExitCode::SUCCESS;
            }
            if json_out {
                println!("{}", serde_json::to_string_pretty(&result).unwrap());
            } else {
                print_text(&req, &result);
            }
            ExitCode::SUCCESS
        }
        Err(MclError::Usage(m)) => {
            eprintln!("usage error: {}", m);
            ExitCode::from(1)
        }
        Err(e) => domain_error(&e),
    }
}

fn domain_error(e: &MclError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&error_json(e)).unwrap());
    ExitCode::from(2)
}

fn build_request(cmd: Command) -> Result<(Value, bool, bool), String> {
    Ok(match cmd {
        Command::Approximants { base, poly, json, dot } => {
            (json!({"cmd": "approximants", "base": base, "input": poly}), json, dot)
        }
        Command::RamifiedApprox { base, poly, json } => {
            (json!({"cmd": "ramified-approx", "base": base, "input": poly}), json, false)
        }
        Command::MinDisk { base, poly, json } => {
            (json!({"cmd": "min-disk", "base": base, "input": poly}), json, false)
        }
        Command::DiskoidVal { base, phi, s, poly, json } => (
            json!({"cmd": "diskoid-val", "base": base, "phi": phi, "s": s, "input": poly}),
            json,
            false,
        ),
        Command::EcSemistable { base, a1, a2, a3, a4, a6, json } => (
            json!({"cmd": "ec-semistable", "base": base,
                   "a1": a1, "a2": a2, "a3": a3, "a4": a4, "a6": a6}),
            json,
            false,
        ),
        Command::DynOrdres { base, deg, f0, f1, json } => (
            json!({"cmd": "dyn-ordres", "base": base, "deg": deg, "f0": f0, "f1": f1}),
            json,
            false,
        ),
        Command::DynSemistable { base, deg, f0, f1, json } => (
            json!({"cmd": "dyn-semistable", "base": base, "deg": deg, "f0": f0, "f1": f1}),
            json,
            false,
        ),
        Command::Bounds { p, d, json } => (json!({"cmd": "bounds", "p": p, "d": d}), json, false),
    })
}

fn print_text(req: &Value, result: &Value) {
    match req["cmd"].as_str().unwrap_or("") {
        "approximants" => {
            if let Some(stages) = result["chain"].as_array() {
                for (i, st) in stages.iter().enumerate() {
                    println!(
                        "V{}: phi = {}, mu = {}, tau = {}, f_rel = {}",
                        i + 1,
                        st["phi_pretty"].as_str().unwrap_or("?"),
                        st["mu"].as_str().unwrap_or("?"),
                        st["tau"],
                        st["f_rel"]
                    );
                }
            }
            println!("e = {}, f = {}", result["e"], result["f"]);
        }
        "ramified-approx" => {
            println!(
                "phi = {} (stage {}), e = {}, f = {}",
                result["phi_pretty"].as_str().unwrap_or("?"),
                result["j"],
                result["e"],
                result["f"]
            );
            if let Some(d) = result.get("disk").filter(|d| !d.is_null()) {
                println!(
                    "minimal disk: D({}, {}) with per-disk radius {}",
                    d["phi_pretty"].as_str().unwrap_or("?"),
                    d["s"].as_str().unwrap_or("?"),
                    d["r"].as_str().unwrap_or("?")
                );
            }
        }
        "min-disk" => {
            println!(
                "D({}, {}): radius {}, {} disk(s)",
                result["phi_pretty"].as_str().unwrap_or("?"),
                result["s"].as_str().unwrap_or("?"),
                result["r"].as_str().unwrap_or("?"),
                result["disks"]
            );
        }
        "diskoid-val" => {
            println!("value = {}", result["value"].as_str().unwrap_or("?"));
        }
        "ec-semistable" => {
            println!(
                "L: degree {} (e = {}, f = {}), reduction: {}",
                result["degree"],
                result["L"]["e"],
                result["L"]["f"],
                result["reduction"].as_str().unwrap_or("?")
            );
            if let Some(model) = result["model"].as_array() {
                let strs: Vec<&str> = model.iter().map(|m| m.as_str().unwrap_or("?")).collect();
                println!(
                    "model: y^2 + ({}) xy + ({}) y = x^3 + ({}) x^2 + ({}) x + ({})",
                    strs[0], strs[2], strs[1], strs[3], strs[4]
                );
            }
        }
        "dyn-ordres" => {
            println!("ordres = {}", result["ordres"].as_str().unwrap_or("?"));
        }
        "dyn-semistable" => {
            println!(
                "center = {} (field degree {}), t = {}",
                result["center"].as_str().unwrap_or("?"),
                result["center_field_degree"],
                result["t"].as_str().unwrap_or("?")
            );
            println!(
                "ordres: {} -> {}; L degree {} (A = {}, B = {})",
                result["ordres_before"].as_str().unwrap_or("?"),
                result["ordres_after"].as_str().unwrap_or("?"),
                result["L"]["degree"],
                result["bounds"]["A"],
                result["bounds"]["B"]
            );
        }
        "bounds" => {
            println!("A = {}, B = {}", result["A"], result["B"]);
        }
        _ => {
            println!("{}", serde_json::to_string_pretty(result).unwrap());
        }
    }
}

fn run_batch(path: &str) -> ExitCode {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot open {}: {}", path, e);
            return ExitCode::from(1);
        }
    };
    let reader = std::io::BufReader::new(file);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in reader.lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("read error: {}", e);
                return ExitCode::from(1);
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let response = match serde_json::from_str::<Value>(&line) {
            Ok(req) => match run_request(&req) {
                Ok(res) => json!({"ok": true, "result": res}),
                Err(e) => json!({"ok": false, "error": error_json(&e)}),
            },
            Err(e) => json!({"ok": false, "error": {"error": "parse", "certificate": format!("{}", e)}}),
        };
        writeln!(out, "{}", serde_json::to_string(&response).unwrap()).ok();
    }
    ExitCode::SUCCESS
}
