//! End-to-end experiment: load, clean, replay, per-player datasets, split,
//! train, evaluate, report.

mod config;
pub mod report;

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::features::{match_rows, FeatureConfig, FeatureRow, ReplayedMatch, FEATURE_NAMES};
use crate::mcp_data::{clean_dataset, group_points, load_matches, load_points, CleaningLog, LoadError, MatchRecord, PointRecord};
use crate::models::{accuracy, derive_seed, train, Dataset, Matrix, ModelKind};
use crate::score::Side;

pub use config::{parse_models, parse_player_list, parse_tour, ConfigError, ExperimentConfig};
pub use report::{
    emit_reports, read_accuracy_csv, top_feature_union, write_accuracy_csv, AccuracyReport, AccuracyRow, DistributionRow, ExperimentReport,
    ImportanceRow, ReportError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// Cleaned, replayed input data.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub matches: Vec<ReplayedMatch>,
    pub cleaning: CleaningLog,
    /// Matches dropped because replay disagreed with the charted servers.
    pub divergent: Vec<(String, String)>,
    pub rejected_rows: usize,
}

pub fn load_and_clean(cfg: &ExperimentConfig) -> Result<(Vec<MatchRecord>, Vec<PointRecord>, CleaningLog, usize), LoadError> {
    let matches = load_matches(&cfg.matches_path, &cfg.columns)?;
    let load = load_points(&cfg.points_path, &cfg.columns)?;
    for r in &load.rejected {
        log::warn!("points line {}: {}", r.line, r.reason);
    }
    let (matches, points, log) = clean_dataset(matches, load.records);
    Ok((matches, points, log, load.rejected.len()))
}

/// Replays every match of the configured tour; divergent matches are dropped.
pub fn replay_all(matches: &[MatchRecord], points: &[PointRecord], tour_filter: Option<crate::mcp_data::Tour>, tolerance: f64) -> (Vec<ReplayedMatch>, Vec<(String, String)>) {
    let by_id: HashMap<&str, &[PointRecord]> = group_points(points).into_iter().map(|g| (g[0].match_id.as_str(), g)).collect();
    let results: Vec<Result<ReplayedMatch, (String, String)>> = matches
        .par_iter()
        .filter(|m| tour_filter.is_none_or(|t| m.sex == Some(t)))
        .filter_map(|m| by_id.get(m.match_id.as_str()).map(|pts| (m, *pts)))
        .map(|(m, pts)| ReplayedMatch::new(m, pts, tolerance).map_err(|e| (m.match_id.clone(), e.to_string())))
        .collect();
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for r in results {
        match r {
            Ok(m) => ok.push(m),
            Err(e) => bad.push(e),
        }
    }
    (ok, bad)
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, PipelineError> {
    cfg.validate()?;
    let (matches, points, cleaning, rejected_rows) = load_and_clean(cfg)?;
    let (matches, divergent) = replay_all(&matches, &points, cfg.tour, cfg.replay_tolerance);
    Ok(Prepared { matches, cleaning, divergent, rejected_rows })
}

/// Players with at least `min_matches` matches, most matches first, then by name.
pub fn select_players<'a, I>(matches: I, min_matches: usize) -> Vec<(String, usize)>
where
    I: IntoIterator<Item = &'a MatchRecord>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for m in matches {
        *counts.entry(m.player1.as_str()).or_insert(0) += 1;
        *counts.entry(m.player2.as_str()).or_insert(0) += 1;
    }
    let mut out: Vec<(String, usize)> =
        counts.into_iter().filter(|&(_, c)| c >= min_matches).map(|(p, c)| (p.to_string(), c)).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// One player's labeled serve points from one side.
#[derive(Debug, Clone)]
pub struct PlayerDataset {
    pub player: String,
    pub side: Side,
    pub data: Dataset,
    /// Index of the source match for each row.
    pub groups: Vec<usize>,
    pub rows: Vec<FeatureRow>,
}

pub fn build_player_dataset(player: &str, side: Side, matches: &[ReplayedMatch], cfg: FeatureConfig) -> PlayerDataset {
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    for (mi, m) in matches.iter().enumerate() {
        let Some(who) = m.record.player_ref(player) else { continue };
        for r in match_rows(m, cfg, Some(who)).into_iter().filter(|r| r.side == side) {
            groups.push(mi);
            rows.push(r);
        }
    }
    let encoded: Vec<[f64; FEATURE_NAMES.len()]> = rows.iter().map(|r| r.features.encode()).collect();
    let y = rows
        .iter()
        .map(|r| r.features.label.class_index().expect("unlabeled rows are skipped"))
        .collect();
    let names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let data = Dataset::new(Matrix::from_rows(&encoded, FEATURE_NAMES.len()), y, 3, names);
    PlayerDataset { player: player.to_string(), side, data, groups, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("{rows} rows, need at least {min}")]
    TooFew { rows: usize, min: usize },
}

/// Shuffled row split: the first `floor(n * fraction)` go to training.
/// Both halves come back sorted.
pub fn split(n: usize, fraction: f64, seed: u64, min_rows: usize) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if n < min_rows.max(1) {
        return Err(SplitError::TooFew { rows: n, min: min_rows });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (n as f64 * fraction).floor() as usize;
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

/// Keeps every match's rows on one side of the split.
pub fn split_by_group(groups: &[usize], fraction: f64, seed: u64, min_rows: usize) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if groups.len() < min_rows.max(1) {
        return Err(SplitError::TooFew { rows: groups.len(), min: min_rows });
    }
    let mut ids: Vec<usize> = groups.to_vec();
    ids.sort_unstable();
    ids.dedup();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ids.len() as f64 * fraction).floor() as usize;
    let train_ids: std::collections::HashSet<usize> = ids[..n_train].iter().copied().collect();
    let (train, test) = (0..groups.len()).partition(|&i| train_ids.contains(&groups[i]));
    Ok((train, test))
}

/// FNV-1a, so seeds depend on the player's name and not on list position.
fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

pub fn unit_seed(master: u64, player: &str, side: Side) -> u64 {
    derive_seed(derive_seed(master, name_hash(player)), side as u64)
}

/// Result of one (player, side) experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitResult {
    pub player: String,
    pub side: Side,
    pub n_rows: usize,
    pub class_counts: Vec<usize>,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: Vec<(ModelKind, f64)>,
    pub importance: Vec<(ModelKind, Vec<(String, f64)>)>,
    pub log: Vec<String>,
}

pub fn run_unit(cfg: &ExperimentConfig, ds: &PlayerDataset) -> UnitResult {
    let seed = unit_seed(cfg.seed, &ds.player, ds.side);
    let mut res = UnitResult {
        player: ds.player.clone(),
        side: ds.side,
        n_rows: ds.data.len(),
        class_counts: ds.data.class_counts(),
        n_train: 0,
        n_test: 0,
        accuracy: Vec::new(),
        importance: Vec::new(),
        log: Vec::new(),
    };
    let tag = format!("{} / {}", ds.player, ds.side.name());
    let split = if cfg.split_by_match {
        split_by_group(&ds.groups, cfg.split_fraction, seed, cfg.min_rows)
    } else {
        split(ds.data.len(), cfg.split_fraction, seed, cfg.min_rows)
    };
    let (train_idx, test_idx) = match split {
        Ok(s) => s,
        Err(e) => {
            res.log.push(format!("{tag}: skipped, {e}"));
            return res;
        }
    };
    if train_idx.is_empty() || test_idx.is_empty() {
        res.log.push(format!("{tag}: skipped, empty train or test half"));
        return res;
    }
    let train_set = ds.data.subset(&train_idx);
    let test_set = ds.data.subset(&test_idx);
    res.n_train = train_set.len();
    res.n_test = test_set.len();
    for (i, &kind) in cfg.models.iter().enumerate() {
        let model_seed = derive_seed(seed, i as u64 + 1);
        let fitted = train(kind, &train_set, &cfg.hyperparameters, model_seed)
            .and_then(|m| m.predict(&test_set.x).map(|p| (m, p)));
        match fitted {
            Ok((m, pred)) => {
                let acc = accuracy(&pred, &test_set.y).expect("test half is nonempty");
                res.accuracy.push((kind, acc));
                if let Ok(imp) = m.feature_importance() {
                    res.importance.push((kind, imp));
                }
            }
            Err(e) => res.log.push(format!("{tag}: {kind} failed: {e}")),
        }
    }
    res.log.push(format!(
        "{tag}: {} rows ({} train, {} test), accuracy {}",
        res.n_rows,
        res.n_train,
        res.n_test,
        res.accuracy.iter().map(|(k, a)| format!("{k}={a:.4}")).collect::<Vec<_>>().join(" ")
    ));
    res
}

/// Players to evaluate: the configured list, or everyone over the match threshold.
pub fn experiment_players(cfg: &ExperimentConfig, matches: &[ReplayedMatch], log: &mut Vec<String>) -> Vec<String> {
    let counts = select_players(matches.iter().map(|m| &m.record), 1);
    match &cfg.players {
        Some(list) => list
            .iter()
            .filter(|p| {
                let n = counts.iter().find(|(q, _)| q == *p).map_or(0, |c| c.1);
                if n == 0 {
                    log.push(format!("{p}: no charted matches, skipped"));
                } else if n < cfg.min_matches {
                    log.push(format!("{p}: only {n} matches (threshold {}), kept because listed", cfg.min_matches));
                }
                n > 0
            })
            .cloned()
            .collect(),
        None => counts.into_iter().filter(|(_, c)| *c >= cfg.min_matches).map(|(p, _)| p).collect(),
    }
}

pub fn run_prepared(cfg: &ExperimentConfig, prepared: &Prepared) -> ExperimentReport {
    let mut log = Vec::new();
    log.push(format!(
        "{} matches replayed, {} dropped for server divergence, {} point rows rejected",
        prepared.matches.len(),
        prepared.divergent.len(),
        prepared.rejected_rows
    ));
    for (id, why) in &prepared.divergent {
        log.push(format!("dropped {id}: {why}"));
    }
    let players = experiment_players(cfg, &prepared.matches, &mut log);
    log.push(format!("{} players selected", players.len()));
    let units: Vec<(String, Side)> =
        players.iter().flat_map(|p| [Side::Deuce, Side::Ad].map(|s| (p.clone(), s))).collect();
    let fcfg = cfg.feature_config();
    let results: Vec<UnitResult> = units
        .par_iter()
        .map(|(p, s)| run_unit(cfg, &build_player_dataset(p, *s, &prepared.matches, fcfg)))
        .collect();
    assemble(cfg, players, results, log)
}

fn assemble(cfg: &ExperimentConfig, players: Vec<String>, results: Vec<UnitResult>, mut log: Vec<String>) -> ExperimentReport {
    let mut report = ExperimentReport::default();
    report.accuracy.models = cfg.models.clone();
    report.accuracy.players = players;
    for r in results {
        log.extend(r.log.iter().cloned());
        if r.n_rows > 0 {
            let n = r.n_rows as f64;
            let c = &r.class_counts;
            report.distribution.push(DistributionRow {
                player: r.player.clone(),
                side: r.side,
                n: r.n_rows,
                shares: [c[0] as f64 / n, c[1] as f64 / n, c[2] as f64 / n],
            });
        }
        for &(model, acc) in &r.accuracy {
            report.accuracy.rows.push(AccuracyRow {
                player: r.player.clone(),
                side: r.side,
                model,
                accuracy: acc,
                n_train: r.n_train,
                n_test: r.n_test,
            });
        }
        for (model, ranked) in &r.importance {
            for (rank, (feature, importance)) in ranked.iter().enumerate() {
                report.importance.push(ImportanceRow {
                    player: r.player.clone(),
                    side: r.side,
                    model: *model,
                    rank: rank + 1,
                    feature: feature.clone(),
                    importance: *importance,
                });
            }
        }
    }
    for side in [Side::Deuce, Side::Ad] {
        if let Some(m) = report.accuracy.grand_mean(side) {
            log.push(format!("{} grand mean accuracy {m:.4}", side.name()));
        }
    }
    report.log = log;
    report
}

/// Loads, runs and writes every report into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, PipelineError> {
    let prepared = prepare(cfg)?;
    let report = run_prepared(cfg, &prepared);
    emit_reports(&report, &cfg.out_dir)?;
    report::write_text(&cfg.out_dir.join("cleaning_log.txt"), &prepared.cleaning.to_string())?;
    Ok(report)
}

pub fn write_features_csv(prepared: &Prepared, players: &[String], cfg: FeatureConfig, out: &Path) -> std::io::Result<usize> {
    let mut rows = Vec::new();
    for m in &prepared.matches {
        for r in match_rows(m, cfg, None) {
            let name = m.record.player(r.server).to_string();
            if players.is_empty() || players.contains(&name) {
                rows.push((name, r));
            }
        }
    }
    let file = std::fs::File::create(out)?;
    crate::features::write_feature_csv(file, &rows).map_err(std::io::Error::other)?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_rounding() {
        let (tr, te) = split(10, 0.7, 3, 10).unwrap();
        assert_eq!((tr.len(), te.len()), (7, 3));
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(split(10, 0.7, 3, 10).unwrap(), (tr, te));
        assert_eq!(split(9, 0.7, 3, 10), Err(SplitError::TooFew { rows: 9, min: 10 }));
    }

    #[test]
    fn group_split_keeps_matches_whole() {
        let groups = [0, 0, 1, 1, 1, 2, 3, 3, 4, 4, 5];
        let (tr, te) = split_by_group(&groups, 0.5, 1, 10).unwrap();
        for &a in &tr {
            assert!(te.iter().all(|&b| groups[a] != groups[b]));
        }
        assert_eq!(tr.len() + te.len(), groups.len());
    }

    #[test]
    fn unit_seed_depends_on_name_and_side() {
        assert_ne!(unit_seed(1, "A B", Side::Deuce), unit_seed(1, "A B", Side::Ad));
        assert_ne!(unit_seed(1, "A B", Side::Deuce), unit_seed(1, "A C", Side::Deuce));
        assert_eq!(unit_seed(1, "A B", Side::Ad), unit_seed(1, "A B", Side::Ad));
    }
}
