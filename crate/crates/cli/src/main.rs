use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use pdakit::bench::{compare_table, render_compare_csv, tradeoff_table};
use pdakit::sim::{run_roundtrip, DemandVector};
use pdakit::{
    cartesian_power, cwzw_pda, downgrade_regular, find_certificate, flatten, mn_pda,
    near_square_pda, read_pda, replicate_users, search_certificate, write_pda, ytcc_pda, Pda,
    StarRowCertificate,
};

/// Build, check and benchmark placement delivery arrays.
#[derive(Parser)]
#[command(name = "pdakit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a PDA from one of the base families.
    Construct {
        /// mn, near-square, ytcc, cwzw or group
        family: String,
        /// Integer parameters of the family.
        params: Vec<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the family's star-row certificate as JSON.
        #[arg(long)]
        certificate_out: Option<PathBuf>,
    },
    /// Check C1-C3 and report the parameters.
    Verify {
        /// PDA file, or `-` for stdin.
        file: String,
        /// Also search for a star-row certificate with this lambda.
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Cartesian power of a PDA, flattened to integer codes.
    Power {
        file: String,
        #[arg(long)]
        m: usize,
        /// Certificate JSON; searched for when omitted.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Print the vector-valued array instead of the flattened one.
        #[arg(long)]
        vectors: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a g-regular PDA into a (g-1)-regular one with a certificate.
    Downgrade {
        file: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        certificate_out: Option<PathBuf>,
    },
    /// Run placement, delivery and decoding over a random library.
    Simulate {
        file: String,
        #[arg(long)]
        files: usize,
        #[arg(long)]
        seed: u64,
        /// Comma-separated 1-based file ids, one per user.
        #[arg(long, value_delimiter = ',')]
        demand: Option<Vec<usize>>,
        #[arg(long, default_value_t = 64)]
        packet_len: usize,
    },
    /// Reproduce a scheme comparison table as CSV.
    Compare {
        #[arg(long)]
        table: u32,
        /// Fold values to evaluate at.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        m: Vec<u64>,
    },
    /// Load and subpacketization against memory ratio as CSV.
    Tradeoff {
        #[arg(long)]
        users: u64,
        /// Comma-separated ratios such as `1/23,2/11`.
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<String>,
    },
}

enum Failure {
    /// Input parsed but failed a check.
    Check(String),
    /// Bad arguments or I/O.
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Usage(m) => m,
        }
    }
}

type CliResult = Result<(), Failure>;

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn check(msg: impl ToString) -> Failure {
    Failure::Check(msg.to_string())
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    }
}

fn load_pda(path: &str) -> Result<Pda, Failure> {
    let text = read_input(path)?;
    read_pda(&text).map_err(|e| check(format!("{path}: {e}")))
}

fn emit(output: Option<&PathBuf>, text: &str) -> CliResult {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn write_certificate(path: Option<&PathBuf>, cert: Option<&StarRowCertificate>) -> CliResult {
    match (path, cert) {
        (None, _) => Ok(()),
        (Some(p), Some(c)) => {
            fs::write(p, c.to_json() + "\n").map_err(|e| usage(format!("{}: {e}", p.display())))
        }
        (Some(_), None) => Err(check("no star-row certificate exists for these parameters")),
    }
}

fn construct(family: &str, params: &[u64]) -> Result<(Pda, Option<StarRowCertificate>), Failure> {
    let want = |n: usize| -> Result<Vec<usize>, Failure> {
        if params.len() != n {
            return Err(usage(format!(
                "{family} takes {n} parameters, got {}",
                params.len()
            )));
        }
        Ok(params.iter().map(|&v| v as usize).collect())
    };
    let built = match family {
        "mn" => {
            let p = want(2)?;
            mn_pda(p[0], p[1]).map(|pda| (pda, None))
        }
        "near-square" => {
            let p = want(1)?;
            near_square_pda(p[0]).map(|(pda, c)| (pda, Some(c)))
        }
        "ytcc" => {
            let p = want(4)?;
            ytcc_pda(p[0], p[1], p[2], p[3])
        }
        "cwzw" => {
            let p = want(3)?;
            cwzw_pda(p[0], p[1], p[2])
        }
        "group" => {
            let p = want(3)?;
            mn_pda(p[0], p[1])
                .and_then(|base| replicate_users(&base, p[2]))
                .map(|pda| (pda, None))
        }
        other => {
            return Err(usage(format!(
                "unknown family {other}; expected mn, near-square, ytcc, cwzw or group"
            )))
        }
    };
    built.map_err(usage)
}

fn parse_ratio(s: &str) -> Result<BigRational, Failure> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad ratio {s}")))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad ratio {s}")))?;
    if d == BigInt::from(0) {
        return Err(usage(format!("bad ratio {s}")));
    }
    Ok(BigRational::new(n, d))
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Construct {
            family,
            params,
            output,
            certificate_out,
        } => {
            let (pda, cert) = construct(&family, &params)?;
            write_certificate(certificate_out.as_ref(), cert.as_ref())?;
            emit(output.as_ref(), &write_pda(&pda))
        }
        Command::Verify { file, lambda, json } => {
            let pda = load_pda(&file)?;
            let report = pda.verify();
            let params = pda.params().ok();
            let cert = lambda.map(|l| find_certificate(&pda, l));
            if json {
                let value = serde_json::json!({
                    "report": report,
                    "params": params,
                    "certificate": cert.as_ref().map(|c| match c {
                        Ok(c) => serde_json::to_value(c).expect("certificate serializes"),
                        Err(e) => serde_json::json!({ "error": e.to_string() }),
                    }),
                });
                println!("{value}");
            } else {
                for v in &report.violations {
                    println!("{:?}: {}", v.rule, v.msg);
                }
                match &params {
                    Some(p) => println!("{p}"),
                    None => println!("parameters undefined"),
                }
                match &cert {
                    Some(Ok(c)) => println!("certificate lambda {} found", c.lambda),
                    Some(Err(e)) => println!("certificate: {e}"),
                    None => {}
                }
                println!("{}", if report.ok { "ok" } else { "invalid" });
            }
            if !report.ok {
                return Err(check(format!("{} violation(s)", report.violations.len())));
            }
            if let Some(Err(e)) = cert {
                return Err(check(e));
            }
            Ok(())
        }
        Command::Power {
            file,
            m,
            certificate,
            vectors,
            output,
        } => {
            let pda = load_pda(&file)?;
            let cert = match certificate {
                Some(p) => {
                    let text = fs::read_to_string(&p)
                        .map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    StarRowCertificate::from_json(&text)
                        .map_err(|e| usage(format!("{}: {e}", p.display())))?
                }
                None => search_certificate(&pda).map_err(check)?,
            };
            let v = cartesian_power(&pda, &cert, m).map_err(check)?;
            if vectors {
                emit(output.as_ref(), &v.to_string())
            } else {
                let flat = flatten(&v).map_err(check)?;
                emit(output.as_ref(), &write_pda(&flat))
            }
        }
        Command::Downgrade {
            file,
            output,
            certificate_out,
        } => {
            let pda = load_pda(&file)?;
            let (down, cert) = downgrade_regular(&pda).map_err(check)?;
            write_certificate(certificate_out.as_ref(), Some(&cert))?;
            emit(output.as_ref(), &write_pda(&down))
        }
        Command::Simulate {
            file,
            files,
            seed,
            demand,
            packet_len,
        } => {
            let pda = load_pda(&file)?;
            let d = match demand {
                Some(d) => DemandVector(d),
                None => DemandVector((0..pda.cols()).map(|k| k % files.max(1) + 1).collect()),
            };
            let report = run_roundtrip(&pda, files, packet_len, &d, seed).map_err(check)?;
            println!("{}", report.to_json());
            if report.decode_ok {
                Ok(())
            } else {
                Err(check("decoded files differ from the library"))
            }
        }
        Command::Compare { table, m } => {
            let mut rows = Vec::new();
            for &mm in &m {
                for row in compare_table(table, mm).map_err(usage)? {
                    rows.push((mm, row));
                }
            }
            emit(None, &render_compare_csv(&rows))
        }
        Command::Tradeoff { users, ratios } => {
            let ratios = ratios
                .iter()
                .map(|r| parse_ratio(r))
                .collect::<Result<Vec<_>, _>>()?;
            let table = tradeoff_table(users, &ratios).map_err(usage)?;
            for s in &table.skipped {
                eprintln!("skipped {} at {}: {}", s.scheme, s.ratio, s.reason);
            }
            emit(None, &table.to_csv())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pdakit: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
