//! Per-point predictors for a server's first-serve direction.
//!
//! Every feature of point `k` is computed from points `0..k` of the same
//! match plus the pre-point score; nothing from point `k` itself leaks in
//! except its label.

mod anxiety;
mod context;
mod counts;
pub mod run_index;

pub use anxiety::{anxiety, anxiety_from_scores, overall_anxiety, AnxietyComponents};
pub use context::{ReplayedMatch, ReplayedPoint};
pub use counts::{direction_counts, serve_percentages, win_counts, DirectionCounts, PriorServe};
pub use run_index::{cumulative_run_index, run_index_point, CourtPosition, PointRun};

use std::io::Write;

use thiserror::Error;

use crate::mcp_data::{Handedness, ServeDirection, Surface};
use crate::score::{Level, PlayerRef, Side};

pub const FEATURE_NAMES: [&str; 24] = [
    "count_wide",
    "count_body",
    "count_t",
    "won_wide",
    "won_body",
    "won_t",
    "pct_wide",
    "pct_body",
    "pct_t",
    "prev_winner_server",
    "prev_winner_returner",
    "run_index_server",
    "run_index_returner",
    "anxiety_game",
    "anxiety_set",
    "anxiety_match",
    "anxiety_overall",
    "surface_hard",
    "surface_clay",
    "surface_grass",
    "surface_carpet",
    "surface_unknown",
    "opponent_lefty",
    "opponent_hand_unknown",
];

pub const N_FEATURES: usize = FEATURE_NAMES.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrevWinner {
    Server,
    Returner,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountScope {
    /// Only earlier serves from the same court side as the current point.
    #[default]
    SameSide,
    AllSides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureConfig {
    /// Restrict counts to the current and this many previous service games.
    pub window_games: Option<u32>,
    pub count_scope: CountScope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub counts_by_dir: DirectionCounts,
    pub wins_by_dir: DirectionCounts,
    pub serve_pct_by_dir: [f64; 3],
    pub prev_point_winner: PrevWinner,
    pub run_index_server: f64,
    pub run_index_returner: f64,
    pub anxiety_game: f64,
    pub anxiety_set: f64,
    pub anxiety_match: f64,
    pub anxiety_overall: f64,
    pub surface: Surface,
    pub opponent_hand: Handedness,
    pub label: ServeDirection,
}

impl FeatureVector {
    /// Numeric encoding in [`FEATURE_NAMES`] order; categories are one-hot.
    pub fn encode(&self) -> [f64; N_FEATURES] {
        let mut row = [0.0; N_FEATURES];
        for (i, v) in self.counts_by_dir.as_array().into_iter().enumerate() {
            row[i] = f64::from(v);
        }
        for (i, v) in self.wins_by_dir.as_array().into_iter().enumerate() {
            row[3 + i] = f64::from(v);
        }
        row[6..9].copy_from_slice(&self.serve_pct_by_dir);
        row[9] = f64::from(u8::from(self.prev_point_winner == PrevWinner::Server));
        row[10] = f64::from(u8::from(self.prev_point_winner == PrevWinner::Returner));
        row[11] = self.run_index_server;
        row[12] = self.run_index_returner;
        row[13] = self.anxiety_game;
        row[14] = self.anxiety_set;
        row[15] = self.anxiety_match;
        row[16] = self.anxiety_overall;
        let s = Surface::ALL.iter().position(|&s| s == self.surface).unwrap_or(4);
        row[17 + s] = 1.0;
        row[22] = f64::from(u8::from(self.opponent_hand == Handedness::Left));
        row[23] = f64::from(u8::from(self.opponent_hand == Handedness::Unknown));
        row
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SkipPoint {
    #[error("first-serve direction is unknown")]
    UnknownLabel,
    #[error("point {0} is not in the match")]
    OutOfRange(usize),
}

/// A labeled row ready for export or training.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub match_id: String,
    pub point_index: u32,
    pub server: PlayerRef,
    pub side: Side,
    pub features: FeatureVector,
}

fn prior_serve(p: &ReplayedPoint) -> PriorServe {
    let first = p.first_serve;
    PriorServe {
        direction: first.map_or(ServeDirection::Unknown, |s| s.direction),
        landed_in: first.is_some_and(|s| s.fault.is_in()),
        server_won: p.record.point_winner == p.record.server,
    }
}

struct Scan<'a> {
    m: &'a ReplayedMatch,
    cfg: FeatureConfig,
    /// Per player: (game number, side, serve) for each earlier service point.
    history: [Vec<(u32, Side, PriorServe)>; 2],
    run: [f64; 2],
}

impl<'a> Scan<'a> {
    fn new(m: &'a ReplayedMatch, cfg: FeatureConfig) -> Self {
        Scan { m, cfg, history: [Vec::new(), Vec::new()], run: [0.0, 0.0] }
    }

    fn visible(&self, server: PlayerRef, side: Side, game: u32) -> Vec<PriorServe> {
        let hist = &self.history[server.index()];
        let min_game = self.cfg.window_games.map(|n| {
            // earlier service games of this server in ascending order
            let mut games: Vec<u32> = hist.iter().map(|h| h.0).filter(|&g| g < game).collect();
            games.dedup();
            let keep = n as usize;
            if keep == 0 {
                game
            } else if games.len() > keep {
                games[games.len() - keep]
            } else {
                0
            }
        });
        hist.iter()
            .filter(|(g, s, _)| min_game.is_none_or(|m| *g >= m) && (self.cfg.count_scope == CountScope::AllSides || *s == side))
            .map(|h| h.2)
            .collect()
    }

    fn features_at(&self, k: usize) -> Result<FeatureVector, SkipPoint> {
        let p = &self.m.points[k];
        let label = p.first_serve.map_or(ServeDirection::Unknown, |s| s.direction);
        if label == ServeDirection::Unknown {
            return Err(SkipPoint::UnknownLabel);
        }
        let server = p.record.server;
        let prior = self.visible(server, p.side, p.game_number);
        let prev_point_winner = match k.checked_sub(1).map(|j| self.m.points[j].record.point_winner) {
            None => PrevWinner::None,
            Some(w) if w == server => PrevWinner::Server,
            Some(_) => PrevWinner::Returner,
        };
        let [g, s, m] = Level::ALL.map(|level| anxiety(&p.state, server, level));
        Ok(FeatureVector {
            counts_by_dir: direction_counts(&prior),
            wins_by_dir: win_counts(&prior),
            serve_pct_by_dir: serve_percentages(&prior),
            prev_point_winner,
            run_index_server: self.run[server.index()],
            run_index_returner: self.run[server.other().index()],
            anxiety_game: g.anxiety,
            anxiety_set: s.anxiety,
            anxiety_match: m.anxiety,
            anxiety_overall: overall_anxiety(&g, &s, &m),
            surface: self.m.record.surface,
            opponent_hand: self.m.record.handedness(server.other()),
            label,
        })
    }

    fn absorb(&mut self, k: usize) {
        let p = &self.m.points[k];
        let server = p.record.server;
        self.history[server.index()].push((p.game_number, p.side, prior_serve(p)));
        let run = run_index_point(&p.rally, p.serve_in_play.map(|s| s.direction), p.side);
        self.run[server.index()] += run.server;
        self.run[server.other().index()] += run.returner;
    }
}

/// Features for every point of the match, in order; unlabeled points are `Err`.
pub fn extract_match(m: &ReplayedMatch, cfg: FeatureConfig) -> Vec<Result<FeatureVector, SkipPoint>> {
    let mut scan = Scan::new(m, cfg);
    let mut out = Vec::with_capacity(m.points.len());
    for k in 0..m.points.len() {
        out.push(scan.features_at(k));
        scan.absorb(k);
    }
    out
}

/// Features for point `k` alone, using only points before it.
pub fn build_feature_vector(m: &ReplayedMatch, k: usize, cfg: FeatureConfig) -> Result<FeatureVector, SkipPoint> {
    if k >= m.points.len() {
        return Err(SkipPoint::OutOfRange(k));
    }
    let mut scan = Scan::new(m, cfg);
    for j in 0..k {
        scan.absorb(j);
    }
    scan.features_at(k)
}

/// Labeled rows of a match, optionally restricted to one server.
pub fn match_rows(m: &ReplayedMatch, cfg: FeatureConfig, server: Option<PlayerRef>) -> Vec<FeatureRow> {
    extract_match(m, cfg)
        .into_iter()
        .zip(&m.points)
        .filter(|(_, p)| server.is_none_or(|s| p.record.server == s))
        .filter_map(|(f, p)| {
            f.ok().map(|features| FeatureRow {
                match_id: p.record.match_id.clone(),
                point_index: p.record.point_index,
                server: p.record.server,
                side: p.side,
                features,
            })
        })
        .collect()
}

/// Writes rows as CSV: features, label, match id, point index, server, side.
pub fn write_feature_csv<W: Write>(out: W, rows: &[(String, FeatureRow)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = FEATURE_NAMES.to_vec();
    header.extend(["label", "match_id", "point_index", "server", "side"]);
    w.write_record(&header)?;
    for (server_name, row) in rows {
        let mut rec: Vec<String> = row.features.encode().iter().map(|v| v.to_string()).collect();
        rec.push(row.features.label.name().to_string());
        rec.push(row.match_id.clone());
        rec.push(row.point_index.to_string());
        rec.push(server_name.clone());
        rec.push(row.side.name().to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcp_data::{MatchRecord, PointRecord};
    use crate::score::FinalSetRules;

    fn record() -> MatchRecord {
        MatchRecord {
            match_id: "m".into(),
            date: None,
            tournament: String::new(),
            surface: Surface::Clay,
            player1: "A".into(),
            player2: "B".into(),
            handedness1: Handedness::Right,
            handedness2: Handedness::Left,
            sex: None,
            best_of: 3,
            final_set_rules: FinalSetRules::Tiebreak,
            final_tiebreak_games: 6,
            final_tiebreak_points: 7,
        }
    }

    fn pt(i: u32, first: &str, second: Option<&str>, rally: &str, winner: PlayerRef) -> PointRecord {
        PointRecord {
            match_id: "m".into(),
            point_index: i,
            server: PlayerRef::One,
            first_serve_code: first.into(),
            second_serve_code: second.map(Into::into),
            rally_code: rally.into(),
            point_winner: winner,
            is_tiebreak_point: false,
        }
    }

    fn three_points() -> ReplayedMatch {
        let pts = vec![
            pt(1, "4", None, "f1b2*", PlayerRef::Two),
            pt(2, "6n", Some("5"), "", PlayerRef::One),
            pt(3, "4*", None, "", PlayerRef::One),
        ];
        ReplayedMatch::new(&record(), &pts, 0.0).unwrap()
    }

    #[test]
    fn first_point_is_blank() {
        let m = three_points();
        let f = build_feature_vector(&m, 0, FeatureConfig::default()).unwrap();
        assert_eq!(f.counts_by_dir, DirectionCounts::default());
        assert_eq!(f.prev_point_winner, PrevWinner::None);
        assert_eq!(f.run_index_server, 0.0);
        assert_eq!(f.label, ServeDirection::Wide);
        assert_eq!(f.surface, Surface::Clay);
        assert_eq!(f.opponent_hand, Handedness::Left);
    }

    #[test]
    fn third_point_counts_same_side() {
        let m = three_points();
        // point 3 is on the deuce side again, like point 1
        let f = build_feature_vector(&m, 2, FeatureConfig::default()).unwrap();
        assert_eq!(f.counts_by_dir, DirectionCounts { wide: 1, body: 0, t: 0 });
        assert_eq!(f.wins_by_dir, DirectionCounts::default());
        assert_eq!(f.prev_point_winner, PrevWinner::Server);
        let all = FeatureConfig { count_scope: CountScope::AllSides, ..FeatureConfig::default() };
        let f = build_feature_vector(&m, 2, all).unwrap();
        assert_eq!(f.counts_by_dir, DirectionCounts { wide: 1, body: 0, t: 1 });
        assert_eq!(f.serve_pct_by_dir, [1.0, 0.0, 0.0]);
        assert!(f.run_index_returner > 0.0);
    }

    #[test]
    fn unknown_label_skips() {
        let pts = vec![pt(1, "0", None, "", PlayerRef::One)];
        let m = ReplayedMatch::new(&record(), &pts, 0.0).unwrap();
        assert_eq!(build_feature_vector(&m, 0, FeatureConfig::default()), Err(SkipPoint::UnknownLabel));
        assert_eq!(build_feature_vector(&m, 5, FeatureConfig::default()), Err(SkipPoint::OutOfRange(5)));
    }

    #[test]
    fn encoding_layout() {
        let m = three_points();
        let row = build_feature_vector(&m, 2, FeatureConfig::default()).unwrap().encode();
        assert_eq!(row[0], 1.0);
        assert_eq!(row[9], 1.0);
        assert_eq!(row[18], 1.0);
        assert_eq!(row[17] + row[19] + row[20] + row[21], 0.0);
        assert_eq!(row[22], 1.0);
        assert_eq!(row[16], row[13] + row[14] + row[15]);
    }

    #[test]
    fn window_limits_history() {
        // server 1 holds to love repeatedly; server 2 loses to love
        let mut pts = Vec::new();
        let mut i = 1;
        for game in 0..5 {
            let server = if game % 2 == 0 { PlayerRef::One } else { PlayerRef::Two };
            for _ in 0..4 {
                let mut p = pt(i, "4", None, "", PlayerRef::One);
                p.server = server;
                pts.push(p);
                i += 1;
            }
        }
        let m = ReplayedMatch::new(&record(), &pts, 0.0).unwrap();
        let cfg = FeatureConfig { window_games: Some(1), count_scope: CountScope::AllSides };
        // first point of player 1's third service game (game 4)
        let f = build_feature_vector(&m, 16, cfg).unwrap();
        assert_eq!(f.counts_by_dir.wide, 4);
        let f = build_feature_vector(&m, 16, FeatureConfig { window_games: None, ..cfg }).unwrap();
        assert_eq!(f.counts_by_dir.wide, 8);
    }
}
