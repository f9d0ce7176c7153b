//! Command-line front end: residue-table generation, encode/decode,
//! simulations, rates and the quadratic model fit.
//!
//! Tables are precomputed artifacts; encode/decode never build one
//! implicitly. `LOCO_THREADS` caps the worker pool.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ecdloco::ec_codec::{assemble_strand, decode_strand, DecodeStatus};
use ecdloco::index_errors::{default_superset, window_diffs, IndexErrorSet};
use ecdloco::params::CodeParams;
use ecdloco::redundancy::{
    build_table, find_r_relaxed, find_r_strict, fit_quadratic, ResidueTable,
};
use ecdloco::simlab::{
    rates_csv, rates_table, run_double_experiment, run_single_exhaustive, run_single_sampled,
};
use ecdloco::symbol::Symbol;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "ecdloco", version, about = "EC D-LOCO constrained codes over {A,T,G,C}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    /// Pairwise-distinct residues over the closed-form superset.
    Strict,
    /// Location-aware feasibility over the closed-form superset.
    Relaxed,
    /// Location-aware feasibility over the exact window-enumerated set.
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Search the redundancy metric and write the residue table.
    Tables(TablesArgs),
    /// Encode binary messages into a DNA strand.
    Encode(EncodeArgs),
    /// Decode a DNA strand back into messages plus a status report.
    Decode(DecodeArgs),
    /// Run substitution-channel experiments.
    Simulate(SimulateArgs),
    /// Redundancy metrics and finite-length rates for a list of lengths.
    Rates(RatesArgs),
    /// Fit the quadratic R(m) model to a rates CSV.
    Fit(FitArgs),
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long, value_enum, default_value = "relaxed")]
    mode: SearchMode,
    /// Output path for the serialized table.
    #[arg(long)]
    out: PathBuf,
    /// Also dump the index-error set (one `e=.. locs=..` line per entry).
    #[arg(long)]
    dump_errors: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    table: PathBuf,
    /// Message input; raw bytes, or hex text with --hex.
    #[arg(long)]
    input: PathBuf,
    /// DNA text output.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    table: PathBuf,
    /// DNA text input.
    #[arg(long)]
    input: PathBuf,
    /// Message output; raw bytes, or hex text with --hex.
    #[arg(long)]
    output: PathBuf,
    /// Per-segment status CSV.
    #[arg(long)]
    status: PathBuf,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long)]
    hex: bool,
    /// Exit 0 even when some segment fails to decode.
    #[arg(long)]
    allow_failures: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    ell: usize,
    /// Substitutions per segment: 1 or 2.
    #[arg(long)]
    errors: usize,
    /// Trial count; optional for --errors 1 at m <= 13 (exhaustive sweep).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value = "1")]
    seed: u64,
    #[arg(long, value_enum, default_value = "relaxed")]
    mode: SearchMode,
    /// Report CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    ell: usize,
    /// Comma-separated list of lengths, e.g. 17,27,33.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Use the strict search instead of the relaxed one.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with `m` and `R` columns (as produced by `rates`).
    #[arg(long)]
    input: PathBuf,
}

fn main() -> Result<()> {
    if let Ok(threads) = std::env::var("LOCO_THREADS") {
        let n: usize = threads
            .parse()
            .context("LOCO_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("failed to size the worker pool")?;
    }
    match Cli::parse().command {
        Command::Tables(args) => cmd_tables(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Fit(args) => cmd_fit(args),
    }
}

fn error_set(params: &CodeParams, mode: SearchMode) -> Result<IndexErrorSet> {
    let set = match mode {
        SearchMode::Exact => window_diffs(params)?,
        _ => default_superset(params)?,
    };
    Ok(set)
}

fn search(params: &CodeParams, mode: SearchMode) -> Result<ResidueTable> {
    let errors = error_set(params, mode)?;
    let table = match mode {
        SearchMode::Strict => {
            let r = find_r_strict(&errors, params);
            build_table(&errors, params, &r)?
        }
        SearchMode::Relaxed | SearchMode::Exact => find_r_relaxed(&errors, params).1,
    };
    Ok(table)
}

fn cmd_tables(args: TablesArgs) -> Result<()> {
    let params = CodeParams::new(args.m, args.ell)?;
    if let Some(path) = &args.dump_errors {
        let errors = error_set(&params, args.mode)?;
        let mut buf = Vec::new();
        errors.dump(&mut buf)?;
        fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    let table = search(&params, args.mode)?;
    fs::write(&args.out, table.serialize())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "m={} ell={} R={} msg_bits={} entries={} -> {}",
        args.m,
        args.ell,
        table.r(),
        table.msg_bits(),
        table.entries().len(),
        args.out.display()
    );
    Ok(())
}

fn load_table(path: &Path) -> Result<(CodeParams, ResidueTable)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table = ResidueTable::deserialize(&text)?;
    let params = CodeParams::new(table.m(), table.ell())?;
    Ok((params, table))
}

fn read_message_bits(path: &Path, hex: bool) -> Result<Vec<bool>> {
    let bytes = if hex {
        let text = fs::read_to_string(path)?;
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if !cleaned.len().is_multiple_of(2) {
            bail!("hex input must have an even number of digits");
        }
        (0..cleaned.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&cleaned[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .context("invalid hex digit")?
    } else {
        fs::read(path)?
    };
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for b in bytes {
        for k in (0..8).rev() {
            bits.push((b >> k) & 1 == 1);
        }
    }
    Ok(bits)
}

fn write_message_bits(path: &Path, bits: &[bool], hex: bool) -> Result<()> {
    let mut bytes = Vec::with_capacity(bits.len() / 8 + 1);
    for chunk in bits.chunks(8) {
        let mut b = 0u8;
        for (k, &bit) in chunk.iter().enumerate() {
            if bit {
                b |= 1 << (7 - k);
            }
        }
        bytes.push(b);
    }
    if hex {
        let text: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        fs::write(path, text + "\n")?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<()> {
    let (params, table) = load_table(&args.table)?;
    let bits = read_message_bits(&args.input, args.hex)?;
    let width = table.msg_bits();
    if bits.is_empty() || bits.len() % width != 0 {
        bail!(
            "input holds {} bits, not a positive multiple of msg_bits = {width}",
            bits.len()
        );
    }
    let messages: Vec<Vec<bool>> = bits.chunks(width).map(|c| c.to_vec()).collect();
    let strand = assemble_strand(&messages, &params, &table)?;
    let text: String = strand.iter().map(|s| s.to_char()).collect();
    fs::write(&args.output, text + "\n")?;
    println!(
        "encoded {} messages into {} symbols -> {}",
        messages.len(),
        strand.len(),
        args.output.display()
    );
    Ok(())
}

fn status_name(status: DecodeStatus) -> &'static str {
    match status {
        DecodeStatus::ErrorFree => "ErrorFree",
        DecodeStatus::ErrorFreeComplemented => "ErrorFreeComplemented",
        DecodeStatus::SingleCorrectedCodeword => "SingleCorrectedCodeword",
        DecodeStatus::SingleCorrectedNonCodeword => "SingleCorrectedNonCodeword",
        DecodeStatus::DoubleListDecoded(_) => "DoubleListDecoded",
        DecodeStatus::Failure => "Failure",
    }
}

fn cmd_decode(args: DecodeArgs) -> Result<()> {
    let (params, table) = load_table(&args.table)?;
    let text = fs::read_to_string(&args.input)?;
    let symbols: Vec<Symbol> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(Symbol::from_char)
        .collect::<ecdloco::Result<_>>()?;
    println!("effective seed: {}", args.seed);
    let results = decode_strand(&symbols, &params, &table, args.seed)?;

    let mut status_csv = String::from("segment,status,list_size,index\n");
    let mut bits: Vec<bool> = Vec::new();
    let mut failures = 0usize;
    for (i, res) in results.iter().enumerate() {
        let list_size = match res.status {
            DecodeStatus::DoubleListDecoded(k) => k.to_string(),
            _ => String::new(),
        };
        let index = res
            .index
            .as_ref()
            .map(|x| x.to_string())
            .unwrap_or_default();
        status_csv.push_str(&format!(
            "{i},{},{list_size},{index}\n",
            status_name(res.status)
        ));
        match &res.message {
            Some(msg) => bits.extend_from_slice(msg),
            None => {
                failures += 1;
                bits.extend(std::iter::repeat_n(false, table.msg_bits()));
            }
        }
    }
    fs::write(&args.status, status_csv)?;
    write_message_bits(&args.output, &bits, args.hex)?;
    println!(
        "decoded {} segments ({failures} failures) -> {}",
        results.len(),
        args.output.display()
    );
    if failures > 0 && !args.allow_failures {
        bail!("{failures} segment(s) failed to decode (use --allow-failures to tolerate)");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let params = CodeParams::new(args.m, args.ell)?;
    let table = search(&params, args.mode)?;
    println!("effective seed: {}", args.seed);
    let report = match args.errors {
        1 => match args.trials {
            None => run_single_exhaustive(&params, &table, args.seed)?,
            Some(t) => run_single_sampled(&params, &table, t, args.seed)?,
        },
        2 => {
            let trials = args
                .trials
                .context("--trials is required for --errors 2")?;
            run_double_experiment(&params, &table, trials, args.seed)?
        }
        other => bail!("--errors must be 1 or 2, got {other}"),
    };
    let csv = report.to_csv();
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs) -> Result<()> {
    if args.m.is_empty() {
        bail!("--m needs at least one length");
    }
    let rows = rates_table(args.ell, &args.m, args.strict)?;
    let csv = rates_csv(args.ell, &rows);
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)?;
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV")?;
    let cols: Vec<&str> = header.split(',').collect();
    let m_col = cols
        .iter()
        .position(|c| *c == "m")
        .context("no `m` column")?;
    let r_col = cols
        .iter()
        .position(|c| *c == "R")
        .context("no `R` column")?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() <= m_col.max(r_col) {
            bail!("line {}: expected at least {} fields", i + 2, cols.len());
        }
        let m: f64 = fields[m_col]
            .parse()
            .with_context(|| format!("line {}: bad m value", i + 2))?;
        let r: f64 = fields[r_col]
            .parse()
            .with_context(|| format!("line {}: bad R value", i + 2))?;
        points.push((m, r));
    }
    let fit = fit_quadratic(&points)?;
    println!(
        "R(m) ~ {:.2} m^2 + {:.2} m + {:.2}   (nrmse {:.4}, {} points)",
        fit.a2,
        fit.a1,
        fit.a0,
        fit.nrmse,
        points.len()
    );
    Ok(())
}
