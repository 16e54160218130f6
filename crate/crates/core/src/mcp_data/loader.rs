use std::collections::{HashMap, HashSet};
use std::path::Path;

use chrono::NaiveDate;
use csv::{ByteRecord, ReaderBuilder};
use thiserror::Error;

use super::notation::split_serve_column;
use super::{Handedness, MatchRecord, PointRecord, Surface, Tour};
use crate::kv::KeyValues;
use crate::score::{FinalSetRules, PlayerRef};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot open {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed CSV: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: missing mandatory column {column:?}")]
    MissingColumn { path: String, column: String },
    #[error("{path}: line {line}: empty mandatory cell in column {column:?}")]
    MissingValue { path: String, line: u64, column: String },
}

/// Header names for every column the loaders read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub match_id: String,
    pub player1: String,
    pub player2: String,
    pub hand1: String,
    pub hand2: String,
    pub sex: String,
    pub date: String,
    pub tournament: String,
    pub surface: String,
    pub best_of: String,
    pub final_tiebreak: String,
    pub point_match_id: String,
    pub point_index: String,
    pub server: String,
    pub first: String,
    pub second: String,
    pub point_winner: String,
    pub tiebreak_flag: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            match_id: "match_id".into(),
            player1: "Player 1".into(),
            player2: "Player 2".into(),
            hand1: "Pl 1 hand".into(),
            hand2: "Pl 2 hand".into(),
            sex: "Gender".into(),
            date: "Date".into(),
            tournament: "Tournament".into(),
            surface: "Surface".into(),
            best_of: "Best of".into(),
            final_tiebreak: "Final TB?".into(),
            point_match_id: "match_id".into(),
            point_index: "Pt".into(),
            server: "Svr".into(),
            first: "1st".into(),
            second: "2nd".into(),
            point_winner: "PtWinner".into(),
            tiebreak_flag: "TB?".into(),
        }
    }
}

impl ColumnMap {
    /// Overrides defaults from `columns.<field> = <header>` entries.
    pub fn from_config(kv: &KeyValues) -> ColumnMap {
        let mut map = ColumnMap::default();
        for (key, value) in kv.iter() {
            let Some(field) = key.strip_prefix("columns.") else { continue };
            let slot = match field {
                "match_id" => &mut map.match_id,
                "player1" => &mut map.player1,
                "player2" => &mut map.player2,
                "hand1" => &mut map.hand1,
                "hand2" => &mut map.hand2,
                "sex" => &mut map.sex,
                "date" => &mut map.date,
                "tournament" => &mut map.tournament,
                "surface" => &mut map.surface,
                "best_of" => &mut map.best_of,
                "final_tiebreak" => &mut map.final_tiebreak,
                "point_match_id" => &mut map.point_match_id,
                "point_index" => &mut map.point_index,
                "server" => &mut map.server,
                "first" => &mut map.first,
                "second" => &mut map.second,
                "point_winner" => &mut map.point_winner,
                "tiebreak_flag" => &mut map.tiebreak_flag,
                other => {
                    log::warn!("ignoring unknown column key {other:?}");
                    continue;
                }
            };
            *slot = value.to_string();
        }
        map
    }
}

struct Table {
    path: String,
    index: HashMap<String, usize>,
    rows: Vec<ByteRecord>,
}

impl Table {
    fn read(path: &Path) -> Result<Table, LoadError> {
        let p = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| LoadError::Io { path: p.clone(), source })?;
        let mut rdr = ReaderBuilder::new().flexible(true).from_reader(file);
        let headers = rdr
            .byte_headers()
            .map_err(|source| LoadError::Csv { path: p.clone(), source })?
            .clone();
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (String::from_utf8_lossy(h).trim().trim_start_matches('\u{feff}').to_string(), i))
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.byte_records() {
            rows.push(rec.map_err(|source| LoadError::Csv { path: p.clone(), source })?);
        }
        Ok(Table { path: p, index, rows })
    }

    fn require(&self, column: &str) -> Result<usize, LoadError> {
        self.index
            .get(column)
            .copied()
            .ok_or_else(|| LoadError::MissingColumn { path: self.path.clone(), column: column.to_string() })
    }

    fn optional(&self, column: &str) -> Option<usize> {
        self.index.get(column).copied()
    }
}

fn cell(row: &ByteRecord, idx: Option<usize>) -> String {
    idx.and_then(|i| row.get(i))
        .map(|b| String::from_utf8_lossy(b).trim().to_string())
        .unwrap_or_default()
}

fn parse_date(cell: &str, match_id: &str) -> Option<NaiveDate> {
    let from = |s: &str| {
        NaiveDate::parse_from_str(s, "%Y%m%d")
            .or_else(|_| NaiveDate::parse_from_str(s, "%Y-%m-%d"))
            .ok()
    };
    from(cell).or_else(|| match_id.get(..8).and_then(from))
}

/// Final-set format codes: `1` standard tiebreak, `0` advantage, `A` ten-point
/// tiebreak at 6-all, `W` tiebreak at 12-all. Blank means standard tiebreak.
fn parse_final_set(cell: &str) -> (FinalSetRules, u16, u16) {
    match cell.trim().to_ascii_uppercase().as_str() {
        "0" | "N" | "NO" => (FinalSetRules::Advantage, 6, 7),
        "A" => (FinalSetRules::Tiebreak, 6, 10),
        "W" => (FinalSetRules::Tiebreak, 12, 7),
        _ => (FinalSetRules::Tiebreak, 6, 7),
    }
}

fn sex_from_id(match_id: &str) -> Option<Tour> {
    match_id.split('-').nth(1).and_then(Tour::parse)
}

pub fn load_matches(path: &Path, columns: &ColumnMap) -> Result<Vec<MatchRecord>, LoadError> {
    let table = Table::read(path)?;
    let id_col = table.require(&columns.match_id)?;
    let p1_col = table.require(&columns.player1)?;
    let p2_col = table.require(&columns.player2)?;
    let opt = |c: &str| table.optional(c);
    let (h1, h2, sex, date, tour, surf, bo, ftb) = (
        opt(&columns.hand1),
        opt(&columns.hand2),
        opt(&columns.sex),
        opt(&columns.date),
        opt(&columns.tournament),
        opt(&columns.surface),
        opt(&columns.best_of),
        opt(&columns.final_tiebreak),
    );
    let mut out = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let line = i as u64 + 2;
        let mandatory = |idx: usize, name: &str| {
            let v = cell(row, Some(idx));
            if v.is_empty() {
                Err(LoadError::MissingValue { path: table.path.clone(), line, column: name.to_string() })
            } else {
                Ok(v)
            }
        };
        let match_id = mandatory(id_col, &columns.match_id)?;
        let player1 = mandatory(p1_col, &columns.player1)?;
        let player2 = mandatory(p2_col, &columns.player2)?;
        let (final_set_rules, final_tiebreak_games, final_tiebreak_points) = parse_final_set(&cell(row, ftb));
        out.push(MatchRecord {
            date: parse_date(&cell(row, date), &match_id),
            tournament: cell(row, tour),
            surface: Surface::parse(&cell(row, surf)),
            handedness1: Handedness::parse(&cell(row, h1)),
            handedness2: Handedness::parse(&cell(row, h2)),
            sex: Tour::parse(&cell(row, sex)).or_else(|| sex_from_id(&match_id)),
            best_of: if cell(row, bo) == "5" { 5 } else { 3 },
            final_set_rules,
            final_tiebreak_games,
            final_tiebreak_points,
            player1,
            player2,
            match_id,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub match_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct PointsLoad {
    /// Grouped by match id (first-appearance order), sorted by point index.
    pub records: Vec<PointRecord>,
    pub rejected: Vec<Rejection>,
    /// Raw data rows read, before any rejection.
    pub raw_rows: usize,
}

fn player_code(cell: &str) -> Option<PlayerRef> {
    match cell.trim() {
        "1" => Some(PlayerRef::One),
        "2" => Some(PlayerRef::Two),
        _ => None,
    }
}

fn split_or_raw(raw: &str) -> (String, String) {
    match split_serve_column(raw) {
        Ok((serve, rally)) => (serve, rally.to_string()),
        Err(_) => (raw.trim().to_string(), String::new()),
    }
}

pub fn load_points(path: &Path, columns: &ColumnMap) -> Result<PointsLoad, LoadError> {
    let table = Table::read(path)?;
    let id_col = table.require(&columns.point_match_id)?;
    let pt_col = table.require(&columns.point_index)?;
    let svr_col = table.require(&columns.server)?;
    let first_col = table.require(&columns.first)?;
    let win_col = table.require(&columns.point_winner)?;
    let second_col = table.optional(&columns.second);
    let tb_col = table.optional(&columns.tiebreak_flag);

    let mut load = PointsLoad { raw_rows: table.rows.len(), ..PointsLoad::default() };
    let mut groups: Vec<Vec<(u64, PointRecord)>> = Vec::new();
    let mut group_of: HashMap<String, usize> = HashMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let line = i as u64 + 2;
        let match_id = cell(row, Some(id_col));
        let reject = |reason: String| {
            log::warn!("{}: line {line}: {reason}", table.path);
            Rejection { line, match_id: match_id.clone(), reason }
        };
        let raw_pt = cell(row, Some(pt_col));
        let Ok(point_index) = raw_pt.parse::<u32>() else {
            load.rejected.push(reject(format!("non-numeric point index {raw_pt:?}")));
            continue;
        };
        let Some(server) = player_code(&cell(row, Some(svr_col))) else {
            load.rejected.push(reject("server is not 1 or 2".into()));
            continue;
        };
        let Some(point_winner) = player_code(&cell(row, Some(win_col))) else {
            load.rejected.push(reject("point winner is not 1 or 2".into()));
            continue;
        };
        if match_id.is_empty() {
            load.rejected.push(reject("empty match id".into()));
            continue;
        }
        let (first_serve_code, first_rally) = split_or_raw(&cell(row, Some(first_col)));
        let second_raw = cell(row, second_col);
        let (second_serve_code, rally_code) = if second_raw.is_empty() {
            (None, first_rally)
        } else {
            let (s, r) = split_or_raw(&second_raw);
            (Some(s), r)
        };
        let tb = cell(row, tb_col);
        let record = PointRecord {
            match_id: match_id.clone(),
            point_index,
            server,
            first_serve_code,
            second_serve_code,
            rally_code,
            point_winner,
            is_tiebreak_point: matches!(tb.as_str(), "1" | "TRUE" | "True" | "true" | "Y"),
        };
        let g = *group_of.entry(match_id).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push((line, record));
    }
    for mut group in groups {
        group.sort_by_key(|(_, r)| r.point_index);
        let mut seen = HashSet::new();
        for (line, rec) in group {
            if !seen.insert(rec.point_index) {
                log::warn!("{}: line {line}: duplicate point {} in {}", table.path, rec.point_index, rec.match_id);
                load.rejected.push(Rejection {
                    line,
                    match_id: rec.match_id.clone(),
                    reason: format!("duplicate point index {}", rec.point_index),
                });
                continue;
            }
            load.records.push(rec);
        }
    }
    Ok(load)
}
