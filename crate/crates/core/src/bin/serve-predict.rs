use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use serve_predict::kv::KeyValues;
use serve_predict::mcp_data::group_points;
use serve_predict::pipeline::{
    self, parse_models, parse_player_list, parse_tour, read_accuracy_csv, ExperimentConfig,
};
use serve_predict::score::{format_trace, replay, Side};
use serve_predict::synth;

#[derive(Parser)]
#[command(name = "serve-predict", version, about = "First-serve direction prediction from charted tennis matches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and clean the charting files, then print the cleaning log.
    Clean {
        #[command(flatten)]
        common: Common,
        /// Print the point-by-point replay of one match.
        #[arg(long, value_name = "MATCH_ID")]
        trace: Option<String>,
    },
    /// Write the per-point feature matrix as CSV.
    Features {
        #[command(flatten)]
        common: Common,
    },
    /// Run the full experiment and write all reports.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Re-render the accuracy tables from an earlier run's accuracy.csv.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write a synthetic corpus in the charting CSV layout.
    Synth {
        #[arg(long, default_value = "synthetic")]
        out: PathBuf,
        #[arg(long, default_value_t = 6)]
        players: usize,
        #[arg(long, default_value_t = 60)]
        matches: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Key-value config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    matches: Option<PathBuf>,
    #[arg(long)]
    points: Option<PathBuf>,
    /// M, W or all.
    #[arg(long)]
    tour: Option<String>,
    #[arg(long)]
    min_matches: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Training fraction.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    window_games: Option<u32>,
    /// Comma-separated subset of LR,RF,DT,SVM,NN.
    #[arg(long)]
    models: Option<String>,
    #[arg(long)]
    players_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    split_by_match: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let kv = KeyValues::from_file(path)?;
            for key in cfg.apply_kv(&kv)? {
                log::warn!("{}: unknown key {key}", path.display());
            }
        }
        if let Some(v) = &self.matches {
            cfg.matches_path = v.clone();
        }
        if let Some(v) = &self.points {
            cfg.points_path = v.clone();
        }
        if let Some(v) = &self.tour {
            cfg.tour = parse_tour(v)?;
        }
        if let Some(v) = self.min_matches {
            cfg.min_matches = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.split {
            cfg.split_fraction = v;
        }
        if let Some(v) = self.window_games {
            cfg.window_games = Some(v);
        }
        if let Some(v) = &self.models {
            cfg.models = parse_models(v)?;
        }
        if let Some(path) = &self.players_file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.players = Some(parse_player_list(&text));
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if self.split_by_match {
            cfg.split_by_match = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn clean(cfg: &ExperimentConfig, trace: Option<&str>) -> Result<()> {
    let (matches, points, log, rejected) = pipeline::load_and_clean(cfg)?;
    print!("{log}");
    println!("  rejected point rows    {rejected}");
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("cleaning_log.txt"), log.to_string())?;
    if let Some(id) = trace {
        let Some(m) = matches.iter().find(|m| m.match_id == id) else {
            bail!("match {id} not found after cleaning");
        };
        let pts = group_points(&points).into_iter().find(|g| g[0].match_id == id).unwrap_or(&[]);
        match replay(pts, m.scoring(), 1.0) {
            Ok(steps) => print!("{}", format_trace(&steps)),
            Err(e) => bail!("replay failed: {e}"),
        }
    }
    Ok(())
}

fn features(cfg: &ExperimentConfig) -> Result<()> {
    let prepared = pipeline::prepare(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("features.csv");
    let players = cfg.players.clone().unwrap_or_default();
    let n = pipeline::write_features_csv(&prepared, &players, cfg.feature_config(), &path)?;
    println!("{n} rows written to {}", path.display());
    Ok(())
}

fn run(cfg: &ExperimentConfig) -> Result<()> {
    let report = pipeline::run_experiment(cfg)?;
    for side in [Side::Deuce, Side::Ad] {
        println!("{} side", side.name());
        print!("{}", report.accuracy.render_table(side));
        println!();
    }
    println!("reports written to {}", cfg.out_dir.display());
    Ok(())
}

fn report(out: &Path) -> Result<()> {
    let acc = read_accuracy_csv(&out.join(pipeline::report::ACCURACY_CSV))?;
    for side in [Side::Deuce, Side::Ad] {
        let text = acc.render_table(side);
        pipeline::report::write_text(&out.join(pipeline::report::table_file(side)), &text)?;
        println!("{} side", side.name());
        print!("{text}");
        println!();
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Clean { common, trace } => common.resolve().and_then(|c| clean(&c, trace.as_deref())),
        Command::Features { common } => common.resolve().and_then(|c| features(&c)),
        Command::Run { common } => common.resolve().and_then(|c| run(&c)),
        Command::Report { out } => report(out),
        Command::Synth { out, players, matches, seed } => {
            let c = synth::corpus(*seed, (*players).max(2), *matches, &synth::MatchSpec::default());
            synth::write_mcp_csv(&c.matches, &c.points, &out.join("matches.csv"), &out.join("points.csv"))
                .map(|_| println!("{} matches, {} points written to {}", c.matches.len(), c.points.len(), out.display()))
                .map_err(Into::into)
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
