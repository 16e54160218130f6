use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::features::{CountScope, FeatureConfig};
use crate::kv::KeyValues;
use crate::mcp_data::{ColumnMap, Tour};
use crate::models::{Hyperparameters, ModelKind};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("split fraction must lie strictly between 0 and 1, got {0}")]
    SplitFraction(f64),
    #[error("min_matches must be at least 1")]
    MinMatches,
    #[error("no models selected")]
    NoModels,
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub matches_path: PathBuf,
    pub points_path: PathBuf,
    pub tour: Option<Tour>,
    pub min_matches: usize,
    pub split_fraction: f64,
    pub seed: u64,
    pub window_games: Option<u32>,
    pub count_scope: CountScope,
    pub models: Vec<ModelKind>,
    /// Explicit player list; overrides match-count ranking when set.
    pub players: Option<Vec<String>>,
    pub out_dir: PathBuf,
    pub split_by_match: bool,
    /// Share of points whose charted server may disagree with the replay.
    pub replay_tolerance: f64,
    /// Player/side datasets smaller than this are skipped.
    pub min_rows: usize,
    pub columns: ColumnMap,
    pub hyperparameters: Hyperparameters,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            matches_path: PathBuf::from("charting-m-matches.csv"),
            points_path: PathBuf::from("charting-m-points.csv"),
            tour: None,
            min_matches: 30,
            split_fraction: 0.7,
            seed: 2019,
            window_games: None,
            count_scope: CountScope::SameSide,
            models: ModelKind::ALL.to_vec(),
            players: None,
            out_dir: PathBuf::from("out"),
            split_by_match: false,
            replay_tolerance: 0.0,
            min_rows: 10,
            columns: ColumnMap::default(),
            hyperparameters: Hyperparameters::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: value.into() })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
    }
}

pub fn parse_models(list: &str) -> Result<Vec<ModelKind>, ConfigError> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = part
            .parse::<ModelKind>()
            .map_err(|_| ConfigError::BadValue { key: "models".into(), value: part.into() })?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    out.sort();
    Ok(out)
}

pub fn parse_tour(value: &str) -> Result<Option<Tour>, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" | "all" | "any" => Ok(None),
        other => Tour::parse(other)
            .map(Some)
            .ok_or_else(|| ConfigError::BadValue { key: "tour".into(), value: value.into() }),
    }
}

/// One name per line; blank lines and `#` comments skipped.
pub fn parse_player_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

impl ExperimentConfig {
    /// Applies every recognized key; unknown keys are reported back.
    pub fn apply_kv(&mut self, kv: &KeyValues) -> Result<Vec<String>, ConfigError> {
        let mut unknown = Vec::new();
        for (key, value) in kv.iter() {
            match key {
                "matches" => self.matches_path = value.into(),
                "points" => self.points_path = value.into(),
                "tour" => self.tour = parse_tour(value)?,
                "min_matches" => self.min_matches = parse(key, value)?,
                "split" => self.split_fraction = parse(key, value)?,
                "seed" => self.seed = parse(key, value)?,
                "window_games" => {
                    self.window_games = match value.trim() {
                        "" | "none" | "all" => None,
                        v => Some(parse(key, v)?),
                    }
                }
                "count_scope" => {
                    self.count_scope = match value.trim() {
                        "same_side" | "same-side" => CountScope::SameSide,
                        "all_sides" | "all-sides" => CountScope::AllSides,
                        _ => return Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
                    }
                }
                "models" => self.models = parse_models(value)?,
                "players" => self.players = Some(value.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
                "players_file" => {
                    let text = std::fs::read_to_string(value.trim())
                        .map_err(|_| ConfigError::BadValue { key: key.into(), value: value.into() })?;
                    self.players = Some(parse_player_list(&text));
                }
                "out" => self.out_dir = value.into(),
                "split_by_match" => self.split_by_match = parse_bool(key, value)?,
                "replay_tolerance" => self.replay_tolerance = parse(key, value)?,
                "min_rows" => self.min_rows = parse(key, value)?,
                "forest.trees" => self.hyperparameters.forest.n_trees = parse(key, value)?,
                "forest.max_depth" => self.hyperparameters.forest.tree.max_depth = parse(key, value)?,
                "tree.max_depth" => self.hyperparameters.tree.max_depth = parse(key, value)?,
                "mlp.max_epochs" => self.hyperparameters.mlp.max_epochs = parse(key, value)?,
                "mlp.hidden" => {
                    self.hyperparameters.mlp.hidden = value
                        .split(',')
                        .map(|v| parse(key, v))
                        .collect::<Result<_, _>>()?;
                }
                k if k.starts_with("columns.") => {}
                other => unknown.push(other.to_string()),
            }
        }
        self.columns = ColumnMap::from_config(kv);
        Ok(unknown)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(ConfigError::SplitFraction(self.split_fraction));
        }
        if self.min_matches < 1 {
            return Err(ConfigError::MinMatches);
        }
        if self.models.is_empty() {
            return Err(ConfigError::NoModels);
        }
        Ok(())
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig { window_games: self.window_games, count_scope: self.count_scope }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_overrides() {
        let kv = KeyValues::parse("tour = W\nmin-matches = 5\nsplit = 0.8\nmodels = nn, lr\nwindow_games = 3\nbogus = 1\n").unwrap();
        let mut cfg = ExperimentConfig::default();
        let unknown = cfg.apply_kv(&kv).unwrap();
        assert_eq!(unknown, vec!["bogus".to_string()]);
        assert_eq!(cfg.tour, Some(Tour::W));
        assert_eq!(cfg.min_matches, 5);
        assert_eq!(cfg.split_fraction, 0.8);
        assert_eq!(cfg.models, vec![ModelKind::LR, ModelKind::NN]);
        assert_eq!(cfg.window_games, Some(3));
        cfg.validate().unwrap();
    }

    #[test]
    fn validation() {
        let cfg = ExperimentConfig { split_fraction: 1.0, ..ExperimentConfig::default() };
        assert_eq!(cfg.validate(), Err(ConfigError::SplitFraction(1.0)));
        let cfg = ExperimentConfig { min_matches: 0, ..ExperimentConfig::default() };
        assert_eq!(cfg.validate(), Err(ConfigError::MinMatches));
    }
}
