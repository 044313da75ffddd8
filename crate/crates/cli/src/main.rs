use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spartan_core::corpus::parse_corpus;
use spartan_core::crack::{
    crack_with, expansion_factor, tradeoff_csv, tradeoff_curve, AttackStrategy, CrackConfig,
    CrackProgress, StrategyKind,
};
use spartan_core::credential::{parse_store, CredentialRecord, CredentialStore};
use spartan_core::entropy::{
    curve_csv, entropy_curve, fmt_bits, fmt_sci, linear_space_bits, random_entropy, round_half_up,
    spartan_space_bits, user_linear_entropy, user_spartan_entropy, AttackModel, CurveConfig,
};
use spartan_core::grid::{Coord, Dims, Direction, EntrySession, GridSpec};
use spartan_core::kdf::KdfParams;
use spartan_core::shape::{classify, corpus_stats_with};
use spartan_core::{Execution, Executor, Placement};
use spartan_service::ServiceConfig;

#[derive(Parser)]
#[command(
    name = "spartan",
    version,
    about = "Two-dimensional grid password toolkit"
)]
struct Cli {
    /// Report errors on stderr as JSON objects.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Password-space size of random linear and grid passwords.
    Space(SpaceArgs),
    /// Entropy estimates for one length, or the full curve as CSV.
    Entropy(EntropyArgs),
    /// Shape class of each placement, one JSON object per line.
    Classify(ClassifyArgs),
    /// Corpus statistics as JSON, or the occupancy heatmap as CSV.
    Stats(StatsArgs),
    /// Dictionary attack against a credential store.
    Crack(CrackArgs),
    /// Dictionary size against recovery fraction on a plaintext corpus.
    Tradeoff(TradeoffArgs),
    /// Run the registration and login service.
    Serve(ServeArgs),
    /// Convert a password between encodings, optionally producing a
    /// credential record.
    Encode(EncodeArgs),
    /// Check a password against a credential store.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, default_value_t = 36)]
    alphabet: u64,
    #[arg(long, default_value_t = 8)]
    length: u64,
    #[arg(long, default_value = "12x12")]
    grid: Dims,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyKind {
    UserLinear,
    UserSpartan,
    RandomLinear,
    RandomSpartan,
    /// log2 of dictionary size over twice the hit likelihood.
    Attack,
}

#[derive(Args)]
struct EntropyArgs {
    /// Emit every length from 1 to --max-length as CSV.
    #[arg(long, conflicts_with_all = ["length", "kind"])]
    curve: bool,
    #[arg(long, default_value_t = 30)]
    max_length: u64,
    #[arg(long, required_unless_present_any = ["curve", "space"])]
    length: Option<u64>,
    #[arg(long, value_enum, required_unless_present = "curve")]
    kind: Option<EntropyKind>,
    /// Alphabet size for the random series.
    #[arg(long, default_value_t = 95)]
    alphabet: u64,
    /// Cell count for the random grid series.
    #[arg(long, default_value_t = 144)]
    cells: u64,
    /// Dictionary size for `--kind attack`.
    #[arg(long)]
    space: Option<f64>,
    /// Probability the password is in the dictionary, for `--kind attack`.
    #[arg(long)]
    likelihood: Option<f64>,
}

#[derive(Args)]
struct PlacementSource {
    /// JSON-lines corpus file.
    #[arg(long, conflicts_with = "tagged")]
    corpus: Option<PathBuf>,
    /// A single password in tagged form (needs --grid).
    #[arg(long)]
    tagged: Option<String>,
    #[arg(long, default_value = "12x12")]
    grid: Dims,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: PlacementSource,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    source: PlacementSource,
    /// Print the heatmap as a CSV matrix instead of the JSON summary.
    #[arg(long)]
    heatmap: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct CrackArgs {
    /// Credential store to attack.
    #[arg(long, env = "SPARTAN_STORE")]
    store: PathBuf,
    /// Newline-delimited base dictionary.
    #[arg(long)]
    dict: PathBuf,
    /// Comma-separated strategies: fixed-top-left, horizontal-lr,
    /// horizontal-both, straight-any, snake-K.
    #[arg(long, value_delimiter = ',', default_value = "horizontal-lr")]
    strategy: Vec<StrategyKind>,
    /// Hashing threads; 1 runs sequentially.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Progress file, resumed from when present.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = spartan_core::crack::DEFAULT_SNAKE_BUDGET)]
    snake_budget: u64,
}

#[derive(Args)]
struct TradeoffArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    dict: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "fixed-top-left,horizontal-lr,horizontal-both,straight-any,points"
    )]
    strategy: Vec<StrategyKind>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    #[arg(long, env = "SPARTAN_STORE")]
    store: PathBuf,
    #[arg(long, default_value = "12x12")]
    grid: Dims,
    #[arg(long, default_value_t = 6)]
    palette: u8,
    /// test, interactive or moderate.
    #[arg(long, env = "SPARTAN_KDF_PROFILE", default_value = "interactive")]
    kdf_profile: String,
    #[arg(long, default_value_t = 10)]
    attempts_per_minute: usize,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, default_value = "12x12")]
    grid: Dims,
    #[arg(long, group = "input")]
    tagged: Option<String>,
    #[arg(long, group = "input")]
    canonical: Option<String>,
    /// Text typed from --start in --direction, as on the entry grid.
    #[arg(long = "type", group = "input")]
    typed: Option<String>,
    /// Zero-based `row,col` of the first typed character.
    #[arg(long, default_value = "0,0")]
    start: String,
    #[arg(long, default_value = "E")]
    direction: Direction,
    /// Also hash the password into a credential line for this user.
    #[arg(long)]
    username: Option<String>,
    /// Append the credential line to this store (needs --username).
    #[arg(long, requires = "username")]
    store: Option<PathBuf>,
    #[arg(long, env = "SPARTAN_KDF_PROFILE", default_value = "interactive")]
    kdf_profile: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "SPARTAN_STORE")]
    store: PathBuf,
    #[arg(long)]
    username: String,
    #[arg(long)]
    tagged: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json") {
                let rendered = e.render().to_string();
                let first = rendered.lines().next().unwrap_or_default();
                report(true, "usage", first.trim_start_matches("error: "));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    let filter = if matches!(cli.command, Command::Serve(_)) {
        "info"
    } else {
        "warn"
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| filter.into()),
        )
        .init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(cli.json, "operational", &format!("{e:#}"));
            ExitCode::from(1)
        }
    }
}

fn report(json: bool, kind: &str, message: &str) {
    if json {
        eprintln!("{}", serde_json::json!({ "error": message, "kind": kind }));
    } else {
        eprintln!("error: {message}");
    }
}

fn run(command: Command) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match command {
        Command::Space(a) => space(a, &mut out),
        Command::Entropy(a) => entropy(a, &mut out),
        Command::Classify(a) => {
            for p in load_placements(&a.source)? {
                writeln!(out, "{}", serde_json::to_string(&classify(&p)?)?)?;
            }
            Ok(())
        }
        Command::Stats(a) => {
            let corpus = load_placements(&a.source)?;
            let stats = corpus_stats_with(&corpus, &executor(a.workers)?)?;
            if a.heatmap {
                write!(out, "{}", stats.heatmap_csv())?;
            } else {
                writeln!(out, "{}", serde_json::to_string(&stats)?)?;
            }
            Ok(())
        }
        Command::Crack(a) => crack_cmd(a, &mut out),
        Command::Tradeoff(a) => {
            let corpus = parse_corpus(&read(&a.corpus)?)?;
            let words = read_dictionary(&a.dict)?;
            let points = tradeoff_curve(&corpus, &words, &a.strategy, &executor(a.workers)?)?;
            write!(out, "{}", tradeoff_csv(&points))?;
            Ok(())
        }
        Command::Serve(a) => serve(a),
        Command::Encode(a) => encode(a, &mut out),
        Command::Verify(a) => {
            let records = parse_store(&read(&a.store)?)?;
            let rec = records
                .iter()
                .find(|r| r.username == a.username)
                .with_context(|| format!("no record for {}", a.username))?;
            let p = Placement::from_tagged(&rec.grid.grid(), &a.tagged)?;
            let verified = rec.verify(&p);
            writeln!(
                out,
                "{}",
                serde_json::json!({ "username": a.username, "verified": verified })
            )?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_dictionary(path: &Path) -> Result<Vec<String>> {
    let words: Vec<String> = read(path)?
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if words.is_empty() {
        bail!("dictionary {} is empty", path.display());
    }
    Ok(words)
}

fn executor(workers: usize) -> Result<Executor> {
    Ok(Executor::new(Execution::with_workers(workers))?)
}

fn load_placements(src: &PlacementSource) -> Result<Vec<Placement>> {
    match (&src.corpus, &src.tagged) {
        (Some(path), _) => Ok(parse_corpus(&read(path)?)?),
        (None, Some(t)) => Ok(vec![Placement::from_tagged(
            &GridSpec::with_dims(src.grid, 0),
            t,
        )?]),
        (None, None) => bail!("give --corpus or --tagged"),
    }
}

fn space(a: SpaceArgs, out: &mut impl Write) -> Result<()> {
    let linear = linear_space_bits(a.alphabet, a.length)?;
    let grid = spartan_space_bits(a.alphabet, a.length, a.grid.cells() as u64)?;
    let points = expansion_factor(
        &AttackStrategy::new(StrategyKind::PointsCountOnly, a.grid),
        a.length as usize,
    )?;
    writeln!(out, "type,bits,rounded,placements")?;
    writeln!(
        out,
        "linear,{},{},1",
        fmt_bits(linear),
        round_half_up(linear)
    )?;
    writeln!(
        out,
        "spartan-{},{},{},{}",
        a.grid,
        fmt_bits(grid),
        round_half_up(grid),
        fmt_sci(&points, 3)
    )?;
    Ok(())
}

#[derive(Serialize)]
struct EntropyLine<'a> {
    kind: &'a str,
    length: Option<u64>,
    bits: f64,
    rounded: i64,
}

fn entropy(a: EntropyArgs, out: &mut impl Write) -> Result<()> {
    if a.curve {
        let cfg = CurveConfig {
            random_alphabet: a.alphabet,
            cells: a.cells,
        };
        write!(out, "{}", curve_csv(&entropy_curve(a.max_length, cfg)?))?;
        return Ok(());
    }
    let kind = a.kind.expect("required unless --curve");
    let bits = match (kind, a.length) {
        (EntropyKind::Attack, _) => {
            let space = a.space.context("--kind attack needs --space")?;
            let likelihood = a.likelihood.context("--kind attack needs --likelihood")?;
            AttackModel::new(space, likelihood)?.entropy()
        }
        (_, None) => bail!("--length is required"),
        (EntropyKind::UserLinear, Some(n)) => user_linear_entropy(n),
        (EntropyKind::UserSpartan, Some(n)) => user_spartan_entropy(n),
        (EntropyKind::RandomLinear, Some(n)) => random_entropy(a.alphabet, n, None)?,
        (EntropyKind::RandomSpartan, Some(n)) => random_entropy(a.alphabet, n, Some(a.cells))?,
    };
    let name = kind.to_possible_value().expect("no skipped variants");
    let line = EntropyLine {
        kind: name.get_name(),
        length: a.length,
        bits,
        rounded: round_half_up(bits),
    };
    writeln!(out, "{}", serde_json::to_string(&line)?)?;
    Ok(())
}

fn crack_cmd(a: CrackArgs, out: &mut impl Write) -> Result<()> {
    let records = parse_store(&read(&a.store)?)?;
    let words = read_dictionary(&a.dict)?;
    let mut config =
        CrackConfig::new(a.strategy).with_execution(Execution::with_workers(a.workers));
    config.snake_budget = a.snake_budget;
    let resume = match &a.checkpoint {
        Some(path) if path.exists() => Some(
            serde_json::from_str::<CrackProgress>(&read(path)?)
                .with_context(|| format!("parsing checkpoint {}", path.display()))?,
        ),
        _ => None,
    };
    let mut save_error = None;
    let mut report = crack_with(&records, &words, &config, resume, |p| {
        if let (Some(path), None) = (&a.checkpoint, &save_error) {
            if let Err(e) = save_checkpoint(path, p) {
                save_error = Some(e);
            }
        }
    })?;
    if let Some(e) = save_error {
        return Err(e);
    }
    if !a.timing {
        report.elapsed_secs = None;
    }
    writeln!(out, "{}", serde_json::to_string(&report)?)?;
    Ok(())
}

fn save_checkpoint(path: &Path, p: &CrackProgress) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(p)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let mut config = ServiceConfig::new(a.store);
    config.listen = a.listen;
    config.dims = a.grid;
    config.palette_size = a.palette;
    config.kdf = KdfParams::profile(&a.kdf_profile)?;
    config.attempts_per_minute = a.attempts_per_minute;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(spartan_service::serve(config, async {
        let _ = tokio::signal::ctrl_c().await;
    }))
    .map_err(|e| anyhow::anyhow!(e))
}

#[derive(Serialize)]
struct Encoded {
    grid: String,
    characters: usize,
    tagged: String,
    canonical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    credential: Option<String>,
}

fn parse_start(s: &str) -> Result<Coord> {
    let (r, c) = s.split_once(',').context("--start must be row,col")?;
    Ok(Coord::new(r.trim().parse()?, c.trim().parse()?))
}

fn encode(a: EncodeArgs, out: &mut impl Write) -> Result<()> {
    let grid = GridSpec::with_dims(a.grid, 0);
    let p = if let Some(t) = &a.tagged {
        Placement::from_tagged(&grid, t)?
    } else if let Some(c) = &a.canonical {
        Placement::from_canonical(&grid, c)?
    } else if let Some(text) = &a.typed {
        let mut s = EntrySession::new(grid.clone());
        s.set_cursor(parse_start(&a.start)?)?;
        s.set_direction(a.direction);
        s.type_str(text)?;
        s.placement()?
    } else {
        bail!("give one of --tagged, --canonical or --type");
    };
    let credential = match &a.username {
        Some(user) => {
            let user_grid = GridSpec::for_user(user, a.grid, 6)?;
            let rec = CredentialRecord::register(
                user,
                &p,
                &user_grid,
                KdfParams::profile(&a.kdf_profile)?,
            )?;
            let line = rec.to_line();
            if let Some(path) = &a.store {
                CredentialStore::open(path)?.append(rec)?;
            }
            Some(line)
        }
        None => None,
    };
    let enc = Encoded {
        grid: a.grid.to_string(),
        characters: p.len(),
        tagged: p.to_tagged().into_string(),
        canonical: p.to_canonical().into_string(),
        credential,
    };
    writeln!(out, "{}", serde_json::to_string(&enc)?)?;
    Ok(())
}
