use clap::{Parser, Subcommand};
use singleclass::arith::is_prime;
use singleclass::aut::aut_group_order;
use singleclass::classify::{classify, group_families, summary_statistics, Catalogue};
use singleclass::construct::construct_lattice;
use singleclass::genus::{parse_symbol, symbol_from_lattice};
use singleclass::mass::{bounds, mass};
use singleclass::tables::{format_product, verify};
use singleclass::watson::watson_map;
use singleclass::{Error, GramLattice};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "singleclass", version, about = "Single-class genera of positive definite integral lattices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify all single-class genera of one dimension and write the catalogue.
    Classify {
        #[arg(long)]
        dim: u32,
        /// Stop after the square-free genera.
        #[arg(long)]
        squarefree_only: bool,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the catalogue here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify and compare against the published tables.
    Verify {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact mass of a genus symbol.
    Mass {
        #[arg(long)]
        symbol: String,
    },
    /// Genus symbol of a Gram matrix.
    Symbol {
        #[arg(long)]
        gram: PathBuf,
    },
    /// A lattice in the given genus, as a Gram file.
    Construct {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Watson's map Wat_p(L).
    Watson {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Order of the automorphism group.
    Aut {
        #[arg(long)]
        gram: PathBuf,
    },
    /// The mass bounds t(n), B(n) and maxprime(n).
    Bounds {
        #[arg(long)]
        dim: u32,
    },
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::Parse { .. } | Error::InvalidSymbol(_) | Error::Io(_) | Error::Json(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Mismatch(e.to_string()),
        }
    }
}

fn read_gram(path: &Path) -> Result<GramLattice, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(GramLattice::parse_text(&text)?)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = jobs {
        if k == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        b = b.num_threads(k);
    }
    let pool = b.build().map_err(|e| Failure::Mismatch(e.to_string()))?;
    Ok(pool.install(f))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Classify { dim, squarefree_only, jobs, out, seed } => {
            let results = with_jobs(jobs, || classify(dim, squarefree_only, seed))??;
            let json = Catalogue::new(dim, &results)?.to_json()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, json + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    let s = summary_statistics(dim, &results);
                    eprintln!(
                        "dim {dim}: {} lattices, {} maximal, {} qf-maximal, max det {}",
                        s.total,
                        s.maximal,
                        s.qf_maximal,
                        format_product(s.max_det)
                    );
                }
                None => println!("{json}"),
            }
        }
        Cmd::Verify { dim, jobs, seed } => {
            let mut results = with_jobs(jobs, || classify(dim, false, seed))??;
            let families = group_families(&mut results)?;
            let summary = summary_statistics(dim, &results);
            let report = verify(dim, &results, &families, &summary)?;
            println!("{}/{} genera matched", report.matched, report.expected_total);
            for m in &report.mismatches {
                println!("mismatch: {m}");
            }
            if !report.is_ok() {
                return Err(Failure::Mismatch(format!("{} mismatches in dimension {dim}", report.mismatches.len())));
            }
        }
        Cmd::Mass { symbol } => {
            let m = mass(&parse_symbol(&symbol)?)?;
            println!("{}/{}", m.numer(), m.denom());
        }
        Cmd::Symbol { gram } => {
            println!("{}", symbol_from_lattice(&read_gram(&gram)?).display_form());
        }
        Cmd::Construct { symbol, seed } => {
            let l = construct_lattice(&parse_symbol(&symbol)?, seed)?;
            print!("{}", l.to_text());
        }
        Cmd::Watson { gram, p } => {
            if !is_prime(p) {
                return Err(Failure::Usage(format!("{p} is not prime")));
            }
            let l = read_gram(&gram)?;
            let w = watson_map(&l, p);
            println!("# L: {}", symbol_from_lattice(&l).display_form());
            println!("# Wat_{p}(L): {}", symbol_from_lattice(&w).display_form());
            print!("{}", w.to_text());
        }
        Cmd::Aut { gram } => {
            println!("{}", aut_group_order(&read_gram(&gram)?)?);
        }
        Cmd::Bounds { dim } => {
            let b = bounds(dim)?;
            let t = b.t_min.to_rational().ok_or_else(|| Failure::Mismatch("t(n) is not rational".into()))?;
            let set: Vec<String> = b.b_set.iter().map(|p| p.to_string()).collect();
            println!("t={t} B={{{}}} maxprime={}", set.join(","), b.maxprime);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
