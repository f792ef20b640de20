//! Command-line front end: enumerate and count the configuration spaces,
//! solve or simulate the chains, decompose configurations into walks, and
//! run the self-check suite.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num::{BigRational, BigUint, Zero};

use tasep_lab::chain::{
    simulate, stationary_exact, stationary_float, transition_matrix, ChainSpec, Distribution,
    Model, Probabilities, Sector, SimulateOptions, DEFAULT_SPACE_CAP,
};
use tasep_lab::config::{Boundary, CompleteConfig};
use tasep_lab::enumerate::{
    catalan, count_delta, count_gamma, count_gamma_bar, count_omega, count_omega_hat_sector,
    count_omega_level, count_omega_level_sector, delta_words, gamma_bar_pairs, gamma_pairs,
    narayana, omega, omega0, omega0_sector, omega_hat_sector, omega_level, omega_level_sector,
};
use tasep_lab::excursion::{split, walks};
use tasep_lab::verify::{all_passed, render_json, render_text, run_all, Profile};
use tasep_lab::weight::{parse_rational, RateParams};

// --- argument surface ---

#[derive(Parser)]
#[command(
    name = "tasep-lab",
    version,
    about = "A laboratory for exclusion chains on rows and balanced pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the members of a configuration space.
    Enumerate(SpaceArgs),
    /// Count a configuration space through its closed form.
    Count(SpaceArgs),
    /// Solve the stationary distribution of a chain.
    Stationary(StationaryArgs),
    /// Run a chain and report the empirical distribution.
    Simulate(SimulateArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
    /// Decompose a configuration into its walks.
    Excursion(ExcursionArgs),
    /// Report the black-cell density of a chain's law.
    Density(DensityArgs),
}

#[derive(Args)]
struct FormatArgs {
    /// Output format: text, json, or csv.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    /// Bulk rate, a rational in (0, 1].
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Entering rate, a rational in (0, 1].
    #[arg(long, default_value = "1")]
    beta: String,
    /// Leaving rate, a rational in (0, 1].
    #[arg(long, default_value = "1")]
    gamma: String,
    /// Neutral split, a rational in [0, 1]; only the three-species chains
    /// read it.
    #[arg(long, default_value = "0")]
    epsilon: String,
}

#[derive(Args)]
struct SectorArgs {
    /// Black top cells, for the circular chains and sector filters.
    #[arg(long)]
    k: Option<usize>,
    /// Neutral columns, for the circular chains and level filters.
    #[arg(long)]
    l: Option<usize>,
    /// White top cells, for the circular chains and word counts.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Which space: omega0, omega, omega-hat, gamma, gamma-bar, or delta.
    #[arg(long)]
    space: String,
    /// Size of the configurations.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    sector: SectorArgs,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct StationaryArgs {
    /// Which chain: s0, x0, s, x, shat, or xhat.
    #[arg(long, default_value = "x0")]
    model: String,
    /// Size of the chain.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    rates: RateArgs,
    #[command(flatten)]
    sector: SectorArgs,
    /// Solve exactly in rationals (the default).
    #[arg(long)]
    exact: bool,
    /// Solve in floating point.
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Which chain: s0, x0, s, x, shat, or xhat.
    #[arg(long, default_value = "x0")]
    model: String,
    /// Size of the chain.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    rates: RateArgs,
    #[command(flatten)]
    sector: SectorArgs,
    /// Number of steps to run.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    /// Seed for the generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream index, for independent runs under one seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Steps discarded before recording; defaults to steps / 100.
    #[arg(long)]
    burn_in: Option<u64>,
    /// Serialized starting state.
    #[arg(long)]
    initial: Option<String>,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which profile: quick or full.
    #[arg(long, default_value = "quick")]
    profile: String,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct ExcursionArgs {
    /// The configuration to decompose, as TOP/BOTTOM.
    #[arg(long)]
    config: String,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct DensityArgs {
    /// Which chain: s0, x0, s, x, shat, or xhat.
    #[arg(long, default_value = "x0")]
    model: String,
    /// Size of the chain.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    rates: RateArgs,
    #[command(flatten)]
    sector: SectorArgs,
    /// Estimate from a run of this many steps instead of solving exactly.
    #[arg(long)]
    steps: Option<u64>,
    /// Seed for the estimating run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steps discarded before recording; defaults to steps / 100.
    #[arg(long)]
    burn_in: Option<u64>,
    #[command(flatten)]
    format: FormatArgs,
}

// --- errors and output ---

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(msg: impl std::fmt::Display) -> CliError {
    CliError::Domain(msg.to_string())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    match s {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(usage(format!(
            "unknown format {other:?} (expected text, json, or csv)"
        ))),
    }
}

fn emit(format: &FormatArgs, rendered: String) -> Result<(), CliError> {
    match &format.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| domain(format_args!("writing {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

// --- shared parsing ---

fn parse_model(s: &str) -> Result<Model, CliError> {
    s.parse().map_err(usage)
}

fn parse_rates(args: &RateArgs) -> Result<RateParams, CliError> {
    let alpha = parse_rational(&args.alpha).map_err(|e| usage(format!("--alpha: {e}")))?;
    let beta = parse_rational(&args.beta).map_err(|e| usage(format!("--beta: {e}")))?;
    let gamma = parse_rational(&args.gamma).map_err(|e| usage(format!("--gamma: {e}")))?;
    let epsilon = parse_rational(&args.epsilon).map_err(|e| usage(format!("--epsilon: {e}")))?;
    RateParams::with_epsilon(alpha, beta, gamma, epsilon).map_err(|e| usage(e.to_string()))
}

fn chain_spec(
    model: &str,
    n: usize,
    rates: &RateArgs,
    sector: &SectorArgs,
) -> Result<ChainSpec, CliError> {
    let model = parse_model(model)?;
    let params = parse_rates(rates)?;
    let sector = if model.is_circular() {
        match (sector.k, sector.l, sector.m) {
            (Some(k), Some(l), Some(m)) => Some(Sector { k, l, m }),
            _ => return Err(usage(format!("model {model} needs --k, --l, and --m"))),
        }
    } else {
        if sector.k.is_some() || sector.l.is_some() || sector.m.is_some() {
            return Err(usage(format!(
                "model {model} does not take --k, --l, or --m"
            )));
        }
        None
    };
    let spec = ChainSpec {
        model,
        n,
        params,
        sector,
    };
    spec.validate().map_err(|e| domain(e))?;
    Ok(spec)
}

// --- distribution rendering ---

fn prob_strings(dist: &Distribution) -> Vec<String> {
    match &dist.probs {
        Probabilities::Exact(v) => v.iter().map(|p| p.to_string()).collect(),
        Probabilities::Float(v) => v.iter().map(|p| p.to_string()).collect(),
    }
}

fn render_distribution(
    dist: &Distribution,
    format: Format,
    extra: &[(&str, serde_json::Value)],
) -> String {
    let probs = prob_strings(dist);
    match format {
        Format::Text => {
            let mut out = String::new();
            for (label, p) in dist.support.iter().zip(&probs) {
                out.push_str(&format!("{label} {p}\n"));
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("state,probability\n");
            for (label, p) in dist.support.iter().zip(&probs) {
                out.push_str(&format!("{label},{p}\n"));
            }
            out
        }
        Format::Json => {
            let mut doc = serde_json::Map::new();
            for (key, value) in extra {
                doc.insert((*key).to_string(), value.clone());
            }
            doc.insert("support".to_string(), serde_json::json!(dist.support));
            let values: Vec<serde_json::Value> = match &dist.probs {
                Probabilities::Exact(_) => probs.iter().map(|p| serde_json::json!(p)).collect(),
                Probabilities::Float(v) => v.iter().map(|p| serde_json::json!(p)).collect(),
            };
            doc.insert(
                "probabilities".to_string(),
                serde_json::Value::Array(values),
            );
            let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
                .expect("distribution serializes");
            text.push('\n');
            text
        }
    }
}

// --- spaces ---

enum SpaceKind {
    Omega0,
    Omega,
    OmegaHat,
    Gamma,
    GammaBar,
    Delta,
}

fn parse_space(s: &str) -> Result<SpaceKind, CliError> {
    match s {
        "omega0" => Ok(SpaceKind::Omega0),
        "omega" => Ok(SpaceKind::Omega),
        "omega-hat" => Ok(SpaceKind::OmegaHat),
        "gamma" => Ok(SpaceKind::Gamma),
        "gamma-bar" => Ok(SpaceKind::GammaBar),
        "delta" => Ok(SpaceKind::Delta),
        other => Err(usage(format!(
            "unknown space {other:?} (expected omega0, omega, omega-hat, gamma, gamma-bar, or delta)"
        ))),
    }
}

fn space_count(args: &SpaceArgs) -> Result<BigUint, CliError> {
    let n = args.n as u64;
    let s = &args.sector;
    let forbid = |names: &str| -> Result<(), CliError> {
        Err(usage(format!("space {} does not take {names}", args.space)))
    };
    match parse_space(&args.space)? {
        SpaceKind::Omega0 => {
            if s.l.is_some() || s.m.is_some() {
                forbid("--l or --m")?;
            }
            Ok(match s.k {
                Some(k) => narayana(n, k as u64),
                None => catalan(n + 1),
            })
        }
        SpaceKind::Omega => {
            if s.m.is_some() {
                forbid("--m")?;
            }
            Ok(match (s.l, s.k) {
                (Some(l), Some(k)) => count_omega_level_sector(n, l as u64, k as u64),
                (Some(l), None) => count_omega_level(n, l as u64),
                (None, None) => count_omega(n),
                (None, Some(_)) => return Err(usage("--k on space omega also needs --l")),
            })
        }
        SpaceKind::OmegaHat => match (s.k, s.l, s.m) {
            (Some(k), Some(l), Some(m)) => {
                if k + l + m != args.n {
                    return Err(domain(format_args!(
                        "sector ({k}, {l}, {m}) does not fit size {}",
                        args.n
                    )));
                }
                Ok(count_omega_hat_sector(n, l as u64, k as u64))
            }
            _ => Err(usage("space omega-hat needs --k, --l, and --m")),
        },
        SpaceKind::Gamma => {
            if s.k.is_some() || s.l.is_some() || s.m.is_some() {
                forbid("--k, --l, or --m")?;
            }
            Ok(count_gamma(n))
        }
        SpaceKind::GammaBar => {
            if s.k.is_some() || s.l.is_some() || s.m.is_some() {
                forbid("--k, --l, or --m")?;
            }
            Ok(count_gamma_bar(n))
        }
        SpaceKind::Delta => match (s.k, s.m) {
            (Some(k), Some(m)) => {
                if s.l.is_some() {
                    forbid("--l")?;
                }
                Ok(count_delta(n, k as u64, m as u64))
            }
            _ => Err(usage("space delta needs --k and --m")),
        },
    }
}

fn space_members(args: &SpaceArgs) -> Result<Vec<String>, CliError> {
    let count = space_count(args)?;
    if count > BigUint::from(DEFAULT_SPACE_CAP) {
        return Err(domain(format_args!(
            "space holds {count} members, over the cap {DEFAULT_SPACE_CAP}; use count instead"
        )));
    }
    let n = args.n;
    let s = &args.sector;
    let labels = match parse_space(&args.space)? {
        SpaceKind::Omega0 => match s.k {
            Some(k) => omega0_sector(n, k),
            None => omega0(n),
        }
        .iter()
        .map(|c| c.serialize())
        .collect(),
        SpaceKind::Omega => match (s.l, s.k) {
            (Some(l), Some(k)) => omega_level_sector(n, l, k),
            (Some(l), None) => omega_level(n, l),
            _ => omega(n),
        }
        .iter()
        .map(|c| c.serialize())
        .collect(),
        SpaceKind::OmegaHat => {
            let (k, l, m) = (
                s.k.expect("checked by the count"),
                s.l.expect("checked by the count"),
                s.m.expect("checked by the count"),
            );
            omega_hat_sector(n, k, l, m)
                .map_err(|e| domain(e))?
                .iter()
                .map(|c| c.serialize())
                .collect()
        }
        SpaceKind::Gamma => gamma_pairs(n).iter().map(|p| p.serialize()).collect(),
        SpaceKind::GammaBar => gamma_bar_pairs(n).iter().map(|p| p.serialize()).collect(),
        SpaceKind::Delta => {
            let (k, m) = (
                s.k.expect("checked by the count"),
                s.m.expect("checked by the count"),
            );
            delta_words(n, k, m).iter().map(|p| p.serialize()).collect()
        }
    };
    Ok(labels)
}

fn render_lines(lines: &[String], format: Format, header: &str, key: &str) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for line in lines {
                out.push_str(line);
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = format!("{header}\n");
            for line in lines {
                out.push_str(line);
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let doc = serde_json::json!({ key: lines });
            let mut text = serde_json::to_string_pretty(&doc).expect("lines serialize");
            text.push('\n');
            text
        }
    }
}

// --- commands ---

fn cmd_enumerate(args: &SpaceArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format.format)?;
    let labels = space_members(args)?;
    emit(
        &args.format,
        render_lines(&labels, format, "state", "states"),
    )
}

fn cmd_count(args: &SpaceArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format.format)?;
    let count = space_count(args)?;
    let rendered = match format {
        Format::Text => format!("{count}\n"),
        Format::Csv => format!("count\n{count}\n"),
        Format::Json => {
            let doc = serde_json::json!({
                "space": args.space,
                "n": args.n,
                "count": count.to_string(),
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("count serializes");
            text.push('\n');
            text
        }
    };
    emit(&args.format, rendered)
}

fn cmd_stationary(args: &StationaryArgs) -> Result<(), CliError> {
    if args.exact && args.float {
        return Err(usage("--exact and --float exclude each other"));
    }
    let format = parse_format(&args.format.format)?;
    let spec = chain_spec(&args.model, args.n, &args.rates, &args.sector)?;
    let matrix = transition_matrix(&spec).map_err(|e| domain(e))?;
    let dist = if args.float {
        stationary_float(&matrix).map_err(|e| domain(e))?
    } else {
        stationary_exact(&matrix).map_err(|e| domain(e))?
    };
    let extra = [
        ("model", serde_json::json!(spec.model.as_str())),
        ("n", serde_json::json!(spec.n)),
    ];
    emit(&args.format, render_distribution(&dist, format, &extra))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format.format)?;
    let spec = chain_spec(&args.model, args.n, &args.rates, &args.sector)?;
    let options = SimulateOptions {
        steps: args.steps,
        burn_in: args.burn_in,
        seed: args.seed,
        stream: args.stream,
        initial: args.initial.clone(),
    };
    let summary = simulate(&spec, &options).map_err(|e| domain(e))?;
    let extra = [
        ("model", serde_json::json!(spec.model.as_str())),
        ("n", serde_json::json!(spec.n)),
        ("steps", serde_json::json!(summary.steps)),
        ("burn_in", serde_json::json!(summary.burn_in)),
        ("samples", serde_json::json!(summary.samples)),
        ("final_state", serde_json::json!(summary.final_state)),
        ("seed", serde_json::json!(args.seed)),
        ("stream", serde_json::json!(args.stream)),
    ];
    emit(
        &args.format,
        render_distribution(&summary.distribution, format, &extra),
    )
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let profile: Profile = args.profile.parse().map_err(usage)?;
    let format = parse_format(&args.format.format)?;
    if format == Format::Csv {
        return Err(usage("verify renders text or json, not csv"));
    }
    let reports = run_all(profile);
    let rendered = match format {
        Format::Text => render_text(&reports),
        _ => render_json(&reports) + "\n",
    };
    emit(&args.format, rendered)?;
    if all_passed(&reports) {
        Ok(())
    } else {
        Err(domain("some checks failed"))
    }
}

fn cmd_excursion(args: &ExcursionArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format.format)?;
    let cfg: CompleteConfig = args.config.parse().map_err(|e| domain(e))?;
    if cfg.boundary() != Boundary::Open2 {
        return Err(domain("the walk decomposition needs a two-species pair"));
    }
    let pair = walks(&cfg);
    let pieces = split(&cfg);
    let join_i64 = |v: &[i64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let rendered = match format {
        Format::Text => format!(
            "e {}\nb {}\ncolumns {}\ne' {}\nb' {}\n",
            join_i64(&pair.e),
            join_i64(&pair.b),
            pieces
                .i_e
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            join_i64(&pieces.e_prime),
            join_i64(&pieces.b_prime),
        ),
        Format::Csv => {
            let mut out = String::from("wall,e,b\n");
            for i in 0..pair.e.len() {
                out.push_str(&format!("{i},{},{}\n", pair.e[i], pair.b[i]));
            }
            out
        }
        Format::Json => {
            let doc = serde_json::json!({
                "config": cfg.serialize(),
                "e": pair.e,
                "b": pair.b,
                "columns": pieces.i_e,
                "e_prime": pieces.e_prime,
                "b_prime": pieces.b_prime,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("walks serialize");
            text.push('\n');
            text
        }
    };
    emit(&args.format, rendered)
}

fn top_part(label: &str) -> &str {
    match label.split_once('/') {
        Some((top, _)) => top,
        None => label,
    }
}

fn cmd_density(args: &DensityArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format.format)?;
    let spec = chain_spec(&args.model, args.n, &args.rates, &args.sector)?;
    let exact_mode = args.steps.is_none();
    let (cells, values): (Vec<usize>, Vec<String>) = if exact_mode {
        let matrix = transition_matrix(&spec).map_err(|e| domain(e))?;
        let dist = stationary_exact(&matrix).map_err(|e| domain(e))?;
        let probs = dist.exact_probs().expect("exact solve");
        let mut density = vec![BigRational::zero(); spec.n];
        for (label, p) in dist.support.iter().zip(probs) {
            for (i, ch) in top_part(label).chars().enumerate() {
                if ch == 'B' {
                    density[i] += p;
                }
            }
        }
        (
            (1..=spec.n).collect(),
            density.iter().map(|d| d.to_string()).collect(),
        )
    } else {
        let options = SimulateOptions {
            steps: args.steps.unwrap_or(0),
            burn_in: args.burn_in,
            seed: args.seed,
            stream: 0,
            initial: None,
        };
        let summary = simulate(&spec, &options).map_err(|e| domain(e))?;
        let probs = summary.distribution.float_probs();
        let mut density = vec![0.0f64; spec.n];
        for (label, p) in summary.distribution.support.iter().zip(probs) {
            for (i, ch) in top_part(label).chars().enumerate() {
                if ch == 'B' {
                    density[i] += p;
                }
            }
        }
        (
            (1..=spec.n).collect(),
            density.iter().map(|d| d.to_string()).collect(),
        )
    };
    let rendered = match format {
        Format::Text => {
            let mut out = String::new();
            for (c, v) in cells.iter().zip(&values) {
                out.push_str(&format!("{c} {v}\n"));
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("cell,density\n");
            for (c, v) in cells.iter().zip(&values) {
                out.push_str(&format!("{c},{v}\n"));
            }
            out
        }
        Format::Json => {
            let doc = serde_json::json!({
                "model": spec.model.as_str(),
                "n": spec.n,
                "exact": exact_mode,
                "cells": cells,
                "density": values,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("density serializes");
            text.push('\n');
            text
        }
    };
    emit(&args.format, rendered)
}

// --- entry ---

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Count(args) => cmd_count(args),
        Command::Stationary(args) => cmd_stationary(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Excursion(args) => cmd_excursion(args),
        Command::Density(args) => cmd_density(args),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("{message}");
            std::process::exit(2);
        }
        Err(CliError::Domain(message)) => {
            eprintln!("{message}");
            std::process::exit(1);
        }
    }
}
