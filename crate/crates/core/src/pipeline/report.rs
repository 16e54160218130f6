use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::models::ModelKind;
use crate::score::Side;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: bad row: {reason}")]
    Parse { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub player: String,
    pub side: Side,
    pub model: ModelKind,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyReport {
    pub models: Vec<ModelKind>,
    /// Players in report order.
    pub players: Vec<String>,
    pub rows: Vec<AccuracyRow>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl AccuracyReport {
    pub fn cell(&self, player: &str, side: Side, model: ModelKind) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.player == player && r.side == side && r.model == model)
            .map(|r| r.accuracy)
    }

    pub fn players_on(&self, side: Side) -> Vec<&str> {
        self.players
            .iter()
            .filter(|p| self.rows.iter().any(|r| &r.player == *p && r.side == side))
            .map(String::as_str)
            .collect()
    }

    /// Mean over the player's models on one side.
    pub fn player_mean(&self, player: &str, side: Side) -> Option<f64> {
        let v: Vec<f64> = self.models.iter().filter_map(|&m| self.cell(player, side, m)).collect();
        mean(&v)
    }

    /// Mean over players for one model on one side.
    pub fn model_mean(&self, model: ModelKind, side: Side) -> Option<f64> {
        let v: Vec<f64> = self.players_on(side).iter().filter_map(|p| self.cell(p, side, model)).collect();
        mean(&v)
    }

    /// Mean of the per-player means.
    pub fn grand_mean(&self, side: Side) -> Option<f64> {
        let v: Vec<f64> = self.players_on(side).iter().filter_map(|p| self.player_mean(p, side)).collect();
        mean(&v)
    }

    /// Aligned table: first name, last name, one column per model, MEAN.
    pub fn render_table(&self, side: Side) -> String {
        let mut header = vec!["First name".to_string(), "Last name".to_string()];
        header.extend(self.models.iter().map(|m| m.name().to_string()));
        header.push("MEAN".into());
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
        let mut lines = vec![header];
        for p in self.players_on(side) {
            let (first, last) = p.split_once(' ').unwrap_or((p, ""));
            let mut row = vec![first.to_string(), last.to_string()];
            row.extend(self.models.iter().map(|&m| fmt(self.cell(p, side, m))));
            row.push(fmt(self.player_mean(p, side)));
            lines.push(row);
        }
        if lines.len() > 1 {
            let mut row = vec!["MEAN".to_string(), String::new()];
            row.extend(self.models.iter().map(|&m| fmt(self.model_mean(m, side))));
            row.push(fmt(self.grand_mean(side)));
            lines.push(row);
        }
        let cols = lines[0].len();
        let widths: Vec<usize> = (0..cols).map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for l in &lines {
            let cells: Vec<String> = l
                .iter()
                .enumerate()
                .map(|(c, s)| if c < 2 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceRow {
    pub player: String,
    pub side: Side,
    pub model: ModelKind,
    pub rank: usize,
    pub feature: String,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub player: String,
    pub side: Side,
    pub n: usize,
    /// Wide, Body, T shares.
    pub shares: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub accuracy: AccuracyReport,
    pub importance: Vec<ImportanceRow>,
    pub distribution: Vec<DistributionRow>,
    pub log: Vec<String>,
}

fn side_from_name(s: &str) -> Option<Side> {
    match s.to_ascii_lowercase().as_str() {
        "deuce" => Some(Side::Deuce),
        "ad" => Some(Side::Ad),
        _ => None,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Csv { path: path.to_path_buf(), source }
}

pub fn write_accuracy_csv(report: &AccuracyReport, path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["player", "side", "model", "accuracy", "n_train", "n_test"]).map_err(csv_err(path))?;
    for r in &report.rows {
        w.write_record([
            r.player.as_str(),
            r.side.name(),
            r.model.name(),
            &r.accuracy.to_string(),
            &r.n_train.to_string(),
            &r.n_test.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

/// Reads `accuracy.csv` back; model and player order follow first appearance.
pub fn read_accuracy_csv(path: &Path) -> Result<AccuracyReport, ReportError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut report = AccuracyReport::default();
    let bad = |reason: String| ReportError::Parse { path: path.to_path_buf(), reason };
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        if rec.len() != 6 {
            return Err(bad(format!("{} fields", rec.len())));
        }
        let side = side_from_name(&rec[1]).ok_or_else(|| bad(format!("side {:?}", &rec[1])))?;
        let model: ModelKind = rec[2].parse().map_err(|_| bad(format!("model {:?}", &rec[2])))?;
        let num = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(format!("count {:?}", &rec[i])));
        let accuracy = rec[3].parse::<f64>().map_err(|_| bad(format!("accuracy {:?}", &rec[3])))?;
        let player = rec[0].to_string();
        if !report.players.contains(&player) {
            report.players.push(player.clone());
        }
        if !report.models.contains(&model) {
            report.models.push(model);
        }
        report.rows.push(AccuracyRow { player, side, model, accuracy, n_train: num(4)?, n_test: num(5)? });
    }
    report.models.sort();
    Ok(report)
}

fn write_importance_csv(rows: &[ImportanceRow], path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["player", "side", "model", "rank", "feature", "importance"]).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.player.as_str(),
            r.side.name(),
            r.model.name(),
            &r.rank.to_string(),
            &r.feature,
            &r.importance.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

fn write_distribution_csv(rows: &[DistributionRow], path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["player", "side", "n", "wide", "body", "t"]).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.player.as_str(),
            r.side.name(),
            &r.n.to_string(),
            &r.shares[0].to_string(),
            &r.shares[1].to_string(),
            &r.shares[2].to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

/// Top features per model across players: feature -> number of players
/// whose top `k` contains it.
pub fn top_feature_union(rows: &[ImportanceRow], model: ModelKind, side: Side, k: usize) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in rows.iter().filter(|r| r.model == model && r.side == side && r.rank <= k && r.importance > 0.0) {
        *out.entry(r.feature.clone()).or_insert(0) += 1;
    }
    out
}

pub const ACCURACY_CSV: &str = "accuracy.csv";
pub const IMPORTANCE_CSV: &str = "importance.csv";
pub const DISTRIBUTION_CSV: &str = "distribution.csv";
pub const RUN_LOG: &str = "run_log.txt";

pub fn table_file(side: Side) -> String {
    format!("accuracy_{}.txt", side.name().to_ascii_lowercase())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ReportError> {
    fs::write(path, text).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

/// Writes every report file into `dir`, creating it if needed.
pub fn emit_reports(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    let p = dir.join(ACCURACY_CSV);
    write_accuracy_csv(&report.accuracy, &p)?;
    written.push(p);
    for side in [Side::Deuce, Side::Ad] {
        let p = dir.join(table_file(side));
        write_text(&p, &report.accuracy.render_table(side))?;
        written.push(p);
    }
    let p = dir.join(IMPORTANCE_CSV);
    write_importance_csv(&report.importance, &p)?;
    written.push(p);
    let p = dir.join(DISTRIBUTION_CSV);
    write_distribution_csv(&report.distribution, &p)?;
    written.push(p);
    let p = dir.join(RUN_LOG);
    let mut log = report.log.join("\n");
    if !log.is_empty() {
        log.push('\n');
    }
    write_text(&p, &log)?;
    written.push(p);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AccuracyReport {
        let mut rows = Vec::new();
        for (p, base) in [("Roger Federer", 0.5), ("Rafael Nadal", 0.4)] {
            for (i, m) in ModelKind::ALL.into_iter().enumerate() {
                rows.push(AccuracyRow {
                    player: p.into(),
                    side: Side::Deuce,
                    model: m,
                    accuracy: base + 0.01 * i as f64,
                    n_train: 70,
                    n_test: 30,
                });
            }
        }
        AccuracyReport { models: ModelKind::ALL.to_vec(), players: vec!["Roger Federer".into(), "Rafael Nadal".into()], rows }
    }

    #[test]
    fn means_are_arithmetic() {
        let r = sample();
        let fed = r.player_mean("Roger Federer", Side::Deuce).unwrap();
        assert!((fed - 0.52).abs() < 1e-9);
        let lr = r.model_mean(ModelKind::LR, Side::Deuce).unwrap();
        assert!((lr - 0.45).abs() < 1e-9);
        assert!((r.grand_mean(Side::Deuce).unwrap() - 0.47).abs() < 1e-9);
        assert_eq!(r.grand_mean(Side::Ad), None);
    }

    #[test]
    fn table_has_eight_columns() {
        let t = sample().render_table(Side::Deuce);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["First", "name", "Last", "name", "LR", "RF", "DT", "SVM", "NN", "MEAN"]);
        assert_eq!(lines[1].split_whitespace().count(), 8);
        assert!(lines[3].starts_with("MEAN"));
    }

    #[test]
    fn csv_round_trip_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample();
        let p = dir.path().join("a.csv");
        write_accuracy_csv(&r, &p).unwrap();
        assert_eq!(read_accuracy_csv(&p).unwrap(), r);

        let files = emit_reports(&ExperimentReport::default(), dir.path()).unwrap();
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "player,side,model,accuracy,n_train,n_test\n");
        assert_eq!(fs::read_to_string(dir.path().join("accuracy_ad.txt")).unwrap(), "First name  Last name  MEAN\n");
    }
}
