use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use stein::certify::{self, DeficiencyCertificate};
use stein::construct::{self, Construction, ConstructError};
use stein::grid::{Grid, PartialTransversal};
use stein::layout::{
    self, BMode, ConstructionParams, FillMode, LayoutDoc, LayoutError, SlackMode, Variant,
};
use stein::ratio::Ratio;
use stein::seq;
use stein::solve::{self, NibbleConfig, SolveReport};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_TIME_LIMIT: u8 = 4;
const EXIT_CERT_FAIL: u8 = 5;

#[derive(Parser)]
#[command(name = "stein", about = "Equi-n-square generator, transversal solvers, and deficiency certificates", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SlackArg {
    Paper,
    Tight,
}

#[derive(Clone, Copy, ValueEnum)]
enum FillArg {
    Balanced,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Symmetric,
    BipartiteDeleted,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Brute,
    Greedy,
    Nibble,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a grid with its layout and structural certificate.
    Gen {
        #[arg(long)]
        n: u32,
        /// Block-size constant as a fraction p/q.
        #[arg(long, default_value = "1/3")]
        cx: Ratio,
        #[arg(long, value_enum, default_value_t = SlackArg::Paper)]
        slack: SlackArg,
        /// Scarce-class size: "auto" or an explicit count.
        #[arg(long, default_value = "auto")]
        b: String,
        /// Auto scarce-class constant: |B| = floor(cb * ln n).
        #[arg(long, default_value = "1/20")]
        cb: Ratio,
        #[arg(long, value_enum, default_value_t = FillArg::Balanced)]
        fill: FillArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        /// Additionally write a grid padded to order n + k.
        #[arg(long)]
        pad: Option<u32>,
        /// Output basename; writes <basename>.grid/.layout.json/.cert.json.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search a grid file for a maximum partial transversal.
    Solve {
        grid: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Time limit in seconds (exact method only).
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restarts for the greedy method.
        #[arg(long, default_value_t = 10)]
        restarts: u32,
        /// Residual fraction at which the nibble stops sampling.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Worker threads for the exact method (STEIN_THREADS as fallback).
        #[arg(long)]
        threads: Option<usize>,
        /// Write the result as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a grid against a layout and emit a certificate.
    Certify {
        grid: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        /// Audit a transversal witness (solve-report JSON) against the
        /// counting argument.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report the sequence inequalities and feasibility headroom for n.
    CheckLemma {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1/3")]
        cx: Ratio,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen {
            n,
            cx,
            slack,
            b,
            cb,
            fill,
            seed,
            variant,
            pad,
            output,
        } => cmd_gen(n, cx, slack, &b, cb, fill, seed, variant, pad, &output),
        Command::Solve {
            grid,
            method,
            time_limit,
            seed,
            restarts,
            epsilon,
            threads,
            output,
        } => cmd_solve(&grid, method, time_limit, seed, restarts, epsilon, threads, output.as_deref()),
        Command::Certify {
            grid,
            layout,
            audit,
            output,
        } => cmd_certify(&grid, &layout, audit.as_deref(), output.as_deref()),
        Command::CheckLemma { n, cx } => cmd_check_lemma(n, cx),
    }
}

fn io_fail(what: &str, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {what}: {err}");
    ExitCode::from(EXIT_IO)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    n: u32,
    cx: Ratio,
    slack: SlackArg,
    b: &str,
    cb: Ratio,
    fill: FillArg,
    seed: u64,
    variant: VariantArg,
    pad: Option<u32>,
    output: &Path,
) -> ExitCode {
    let b_mode = match b {
        "auto" => BMode::Auto,
        other => match other.parse::<u32>() {
            Ok(k) => BMode::Explicit(k),
            Err(e) => return io_fail("invalid --b (expected \"auto\" or an integer)", e),
        },
    };
    let params = ConstructionParams {
        n,
        cx,
        slack_mode: match slack {
            SlackArg::Paper => SlackMode::Paper,
            SlackArg::Tight => SlackMode::Tight,
        },
        b_mode,
        cb,
        fill: match fill {
            FillArg::Balanced => FillMode::Balanced,
            FillArg::Random => FillMode::SeededArbitrary(seed),
        },
        variant: match variant {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Symmetric => Variant::Symmetric,
            VariantArg::BipartiteDeleted => Variant::BipartiteDeleted,
        },
    };

    let built = match variant {
        VariantArg::Plain => construct::build(&params),
        VariantArg::Symmetric => construct::build_symmetric(&params),
        VariantArg::BipartiteDeleted => construct::build_bipartite_deleted(&params),
    };
    let Construction {
        grid,
        layout,
        partition,
    } = match built {
        Ok(c) => c,
        Err(ConstructError::Layout(LayoutError::Infeasible {
            condition,
            lhs,
            rhs,
            detail,
        })) => {
            eprintln!("infeasible: condition={condition} {detail}: {lhs} vs {rhs}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
        Err(ConstructError::SymmetricInfeasible(msg)) => {
            eprintln!("infeasible: SymmetricInfeasible: {msg}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
    };

    let cert = match certify::verify_structure(&grid, &layout, &partition) {
        Ok(c) => c,
        Err(e) => return io_fail("certification", e),
    };

    let base = output.to_path_buf();
    let write = |ext: &str, data: &str| -> std::io::Result<()> {
        fs::write(with_ext(&base, ext), data)
    };
    let cert_json = match serde_json::to_string_pretty(&cert) {
        Ok(j) => j,
        Err(e) => return io_fail("serializing certificate", e),
    };
    let layout_json = LayoutDoc::from_parts(&layout, &partition, params.slack_mode).to_json();
    if let Err(e) = write_grid_file(&with_ext(&base, "grid"), &grid)
        .and_then(|_| write("layout.json", &layout_json))
        .and_then(|_| write("cert.json", &cert_json))
    {
        return io_fail("writing output files", e);
    }
    if let Some(k) = pad {
        let padded = construct::pad(&grid, k, seed);
        if let Err(e) = write_grid_file(&with_ext(&base, "padded.grid"), &padded) {
            return io_fail("writing padded grid", e);
        }
    }

    let plan = &layout.plan;
    let p1 = seq::check_p1(plan);
    let squares = seq::check_squares(plan);
    let f3_margin = squares.sum_sq as i128 - n as i128 * cert.b_size as i128;
    let class_budget: u64 = plan.xs.iter().map(|&x| 2 * x - 1).sum();
    let f4_margin = cert.m as i128 - cert.b_size as i128 - class_budget as i128;
    println!("n={n}");
    println!("m={}", cert.m);
    println!("n0={}", plan.xs.len());
    println!("b_size={}", cert.b_size);
    println!("bound={}", cert.bound);
    println!("structure_ok={}", cert.structure_ok);
    println!("p1_worst_product={}", p1.worst_value);
    println!("p1_margin={}", n as i128 - 4 * p1.worst_value as i128);
    println!("f3_margin={f3_margin}");
    println!("f4_margin={f4_margin}");
    ExitCode::SUCCESS
}

/// Stream the grid text to disk; large grids never materialize in memory.
fn write_grid_file(path: &Path, g: &Grid) -> std::io::Result<()> {
    struct Adapter<W: std::io::Write> {
        inner: W,
        err: Option<std::io::Error>,
    }
    impl<W: std::io::Write> std::fmt::Write for Adapter<W> {
        fn write_str(&mut self, s: &str) -> std::fmt::Result {
            self.inner.write_all(s.as_bytes()).map_err(|e| {
                self.err = Some(e);
                std::fmt::Error
            })
        }
    }
    let file = fs::File::create(path)?;
    let mut adapter = Adapter {
        inner: std::io::BufWriter::new(file),
        err: None,
    };
    match g.write_text(&mut adapter) {
        Ok(()) => {
            use std::io::Write;
            adapter.inner.flush()
        }
        Err(_) => Err(adapter
            .err
            .unwrap_or_else(|| std::io::Error::other("formatting failure"))),
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("STEIN_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    grid_path: &Path,
    method: MethodArg,
    time_limit: Option<f64>,
    seed: u64,
    restarts: u32,
    epsilon: f64,
    threads: Option<usize>,
    output: Option<&Path>,
) -> ExitCode {
    let g = match read_grid(grid_path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let limit = time_limit.map(Duration::from_secs_f64);
    let (report, timed_out) = match method {
        MethodArg::Exact => {
            let threads = resolve_threads(threads) as u32;
            match solve::solve_exact_with_opts(&g, limit, solve::DEFAULT_HARD_CAP, threads) {
                Ok(res) => {
                    let timed_out = !res.optimal && limit.is_some();
                    (res.report("exact"), timed_out)
                }
                Err(e) => return io_fail("exact solve", e),
            }
        }
        MethodArg::Brute => match solve::solve_brute(&g) {
            Ok(res) => (res.report("brute"), false),
            Err(e) => return io_fail("brute solve", e),
        },
        MethodArg::Greedy => (solve::solve_greedy(&g, restarts, seed).report("greedy"), false),
        MethodArg::Nibble => {
            let cfg = NibbleConfig {
                epsilon,
                seed,
                ..NibbleConfig::default()
            };
            (solve::solve_nibble(&g, &cfg).report("nibble"), false)
        }
    };

    println!("method={}", report.method);
    println!("size={}", report.size);
    println!("optimal={}", report.optimal);
    println!("nodes_explored={}", report.nodes_explored);
    println!("elapsed_ms={}", report.elapsed_ms);
    if let Some(path) = output {
        let json = match serde_json::to_string_pretty(&report) {
            Ok(j) => j,
            Err(e) => return io_fail("serializing report", e),
        };
        if let Err(e) = fs::write(path, json) {
            return io_fail("writing report", e);
        }
    }
    if timed_out {
        ExitCode::from(EXIT_TIME_LIMIT)
    } else {
        ExitCode::SUCCESS
    }
}

fn read_grid(path: &Path) -> Result<Grid, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| io_fail("reading grid", e))?;
    Grid::from_text(&text).map_err(|e| io_fail("parsing grid", e))
}

fn cmd_certify(
    grid_path: &Path,
    layout_path: &Path,
    audit: Option<&Path>,
    output: Option<&Path>,
) -> ExitCode {
    let g = match read_grid(grid_path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let doc_text = match fs::read_to_string(layout_path) {
        Ok(t) => t,
        Err(e) => return io_fail("reading layout", e),
    };
    let doc = match LayoutDoc::from_json(&doc_text) {
        Ok(d) => d,
        Err(e) => return io_fail("parsing layout", e),
    };
    let (layout, partition) = match doc.into_parts() {
        Ok(p) => p,
        Err(e) => return io_fail("interpreting layout", e),
    };
    let cert = match certify::verify_structure(&g, &layout, &partition) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("certification failed: {e}");
            return ExitCode::from(EXIT_CERT_FAIL);
        }
    };
    print_cert(&cert);
    if let Some(path) = output {
        let json = match serde_json::to_string_pretty(&cert) {
            Ok(j) => j,
            Err(e) => return io_fail("serializing certificate", e),
        };
        if let Err(e) = fs::write(path, json) {
            return io_fail("writing certificate", e);
        }
    }
    if !cert.structure_ok {
        for c in cert.checked_conditions.iter().filter(|c| !c.ok) {
            eprintln!("failed {}: {}", c.name, c.detail);
        }
        return ExitCode::from(EXIT_CERT_FAIL);
    }
    if let Some(path) = audit {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return io_fail("reading witness", e),
        };
        let witness = match parse_witness(&text) {
            Ok(w) => w,
            Err(e) => return io_fail("parsing witness", e),
        };
        match certify::audit_transversal(&g, &layout, &partition, &cert, &witness) {
            Ok(a) => {
                println!("audit_used_b={}", a.used_b);
                println!("audit_sum_z={}", a.z.iter().sum::<u64>());
                println!("audit_predicted_missed={}", a.predicted_missed_lower_bound);
                println!("audit_actual_missed={}", a.actual_missed);
                println!("audit_chain_ok={}", a.chain_ok);
                if !a.chain_ok {
                    eprintln!("audit failed: counting chain violated on a verified structure; this indicates a defect");
                    return ExitCode::from(EXIT_CERT_FAIL);
                }
            }
            Err(e) => {
                eprintln!("audit failed: {e}");
                return ExitCode::from(EXIT_CERT_FAIL);
            }
        }
    }
    ExitCode::SUCCESS
}

fn parse_witness(text: &str) -> Result<PartialTransversal, serde_json::Error> {
    match serde_json::from_str::<SolveReport>(text) {
        Ok(report) => Ok(report.witness),
        Err(_) => serde_json::from_str::<PartialTransversal>(text),
    }
}

fn print_cert(cert: &DeficiencyCertificate) {
    println!("n={}", cert.n);
    println!("m={}", cert.m);
    println!("b_size={}", cert.b_size);
    println!("structure_ok={}", cert.structure_ok);
    println!("bound={}", cert.bound);
    println!("is_equi={}", cert.is_equi);
    println!("grid_digest={}", cert.grid_digest);
    println!("layout_digest={}", cert.layout_digest);
}

fn cmd_check_lemma(n: u64, cx: Ratio) -> ExitCode {
    let plan = match seq::build_sequence_plan(n, cx) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("infeasible: {e}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
    };
    let p1 = seq::check_p1(&plan);
    let squares = seq::check_squares(&plan);
    println!("n={n}");
    println!("cx={cx}");
    println!("n0={}", plan.xs.len());
    println!("p1_holds={}", p1.holds);
    println!("p1_worst_t={}", p1.worst_t);
    println!("p1_worst_product={}", p1.worst_value);
    println!("sum_sq={}", squares.sum_sq);
    println!("intermediate_holds={}", squares.intermediate_holds);
    println!("asymptotic_holds={}", squares.asymptotic_holds);
    // Headroom for the scarce class given the symbol budget m = n.
    let max_b = layout::max_feasible_b(&plan, n.min(u32::MAX as u64) as u32);
    println!("max_feasible_b={max_b}");
    ExitCode::SUCCESS
}
