use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use uea_lab::manifest::{render, Manifest};
use uea_lab::workbench::{digest, run, run_manifest, RunOptions, Subcommand};
use uea_lab::{builtin_family, FamilyParams};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Validate,
    Homology,
    Uea,
    Primitives,
    CheckFhul,
    CheckEmbed,
    Bockstein,
    GammaCheck,
    All,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

/// Checks enveloping algebras of differential graded Lie algebras over Z_(p).
#[derive(Debug, Parser)]
#[command(name = "uea-lab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Manifest file describing the presentation.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    manifest: Option<PathBuf>,
    /// Built-in family instead of a manifest: example_z3, abelian, bott_samelson_shadow, random_nilpotent.
    #[arg(long)]
    family: Option<String>,
    /// Generator degrees for the abelian family, comma separated.
    #[arg(long, value_delimiter = ',')]
    family_degrees: Vec<u32>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Degree range `a..b` for the divided-power checks.
    #[arg(long, value_parser = parse_range)]
    degrees: Option<(usize, usize)>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the generated manifest instead of running checks (with --family).
    #[arg(long)]
    emit_manifest: bool,
    /// Include wall-clock timings; reports are then no longer reproducible.
    #[arg(long)]
    timings: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("'{x}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn subcommand(c: Command) -> Subcommand {
    match c {
        Command::Validate => Subcommand::Validate,
        Command::Homology => Subcommand::Homology,
        Command::Uea => Subcommand::Uea,
        Command::Primitives => Subcommand::Primitives,
        Command::CheckFhul => Subcommand::CheckFhul,
        Command::CheckEmbed => Subcommand::CheckEmbed,
        Command::Bockstein => Subcommand::Bockstein,
        Command::GammaCheck => Subcommand::GammaCheck,
        Command::All => Subcommand::All,
    }
}

fn thread_pool() -> Result<(), String> {
    let Ok(value) = std::env::var("UEA_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("UEA_LAB_THREADS must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let options = RunOptions {
        cutoff: cli.cutoff,
        prime: cli.prime,
        degrees: cli.degrees,
        seed: cli.seed,
        timings: cli.timings,
    };
    let sub = subcommand(cli.command);
    let result = if let Some(name) = &cli.family {
        let params = FamilyParams {
            prime: cli.prime,
            degrees: cli.family_degrees.clone(),
            seed: cli.seed.unwrap_or(0),
            cutoff: cli.cutoff,
            ..FamilyParams::default()
        };
        let l = match builtin_family(name, &params) {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let m = Manifest::from_presentation(&l, cli.cutoff, cli.seed);
        let text = render(&m);
        if cli.emit_manifest {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        run_manifest(sub, &m, &digest(&text), &options)
    } else {
        let path = cli.manifest.expect("clap requires --manifest without --family");
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        run(sub, &text, &options)
    };
    match result {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
