//! Singles scoring state machine.
//!
//! Game points are kept as a plain integer ladder (0, 1, 2, 3, ...); the
//! 0/15/30/40/AD labels only exist in [`fmt::Display`]. Every transition
//! returns a fresh [`ScoreState`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcp_data::PointRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlayerRef {
    One,
    Two,
}

impl PlayerRef {
    pub fn other(self) -> PlayerRef {
        match self {
            PlayerRef::One => PlayerRef::Two,
            PlayerRef::Two => PlayerRef::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            PlayerRef::One => 0,
            PlayerRef::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Deuce,
    Ad,
}

impl Side {
    pub fn from_parity(points_played: u32) -> Side {
        if points_played % 2 == 0 {
            Side::Deuce
        } else {
            Side::Ad
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Deuce => "Deuce",
            Side::Ad => "Ad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinalSetRules {
    Tiebreak,
    Advantage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub best_of: u8,
    pub final_set_rules: FinalSetRules,
    /// Points needed to win a regular-set tiebreak.
    pub tiebreak_points: u16,
    /// Games-all score at which the final-set tiebreak starts.
    pub final_tiebreak_games: u16,
    pub final_tiebreak_points: u16,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            best_of: 3,
            final_set_rules: FinalSetRules::Tiebreak,
            tiebreak_points: 7,
            final_tiebreak_games: 6,
            final_tiebreak_points: 7,
        }
    }
}

impl ScoringConfig {
    pub fn best_of(best_of: u8) -> Self {
        ScoringConfig { best_of, ..Self::default() }
    }

    pub fn sets_to_win(&self) -> u8 {
        self.best_of.div_ceil(2)
    }

    /// Games-all score that starts a tiebreak in the given set, if any.
    fn tiebreak_at(&self, final_set: bool) -> Option<u16> {
        match (final_set, self.final_set_rules) {
            (false, _) => Some(6),
            (true, FinalSetRules::Tiebreak) => Some(self.final_tiebreak_games),
            (true, FinalSetRules::Advantage) => None,
        }
    }

    fn tiebreak_target(&self, final_set: bool) -> u16 {
        if final_set {
            self.final_tiebreak_points
        } else {
            self.tiebreak_points
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Game,
    Set,
    Match,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Game, Level::Set, Level::Match];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelDistances {
    pub level: Level,
    pub own_score: u32,
    pub opp_score: u32,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("match already finished")]
    MatchFinished,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreState {
    pub points: [u16; 2],
    pub games: [u16; 2],
    pub sets: [u8; 2],
    pub server: PlayerRef,
    pub serving_side: Side,
    pub in_tiebreak: bool,
    pub tiebreak_points: [u16; 2],
    /// Player who served the first point of the current tiebreak.
    pub tiebreak_starter: Option<PlayerRef>,
    pub finished: bool,
    pub winner: Option<PlayerRef>,
    pub config: ScoringConfig,
}

pub fn new_match(server_first: PlayerRef, config: ScoringConfig) -> ScoreState {
    ScoreState {
        points: [0, 0],
        games: [0, 0],
        sets: [0, 0],
        server: server_first,
        serving_side: Side::Deuce,
        in_tiebreak: false,
        tiebreak_points: [0, 0],
        tiebreak_starter: None,
        finished: false,
        winner: None,
        config,
    }
}

fn tiebreak_server(starter: PlayerRef, played: u32) -> PlayerRef {
    if ((played + 1) / 2) % 2 == 0 {
        starter
    } else {
        starter.other()
    }
}

impl ScoreState {
    pub fn is_final_set(&self) -> bool {
        u32::from(self.sets[0]) + u32::from(self.sets[1]) == u32::from(self.config.best_of) - 1
    }

    pub fn tiebreak_played(&self) -> u32 {
        u32::from(self.tiebreak_points[0]) + u32::from(self.tiebreak_points[1])
    }

    pub fn game_points_played(&self) -> u32 {
        u32::from(self.points[0]) + u32::from(self.points[1])
    }

    /// Total games completed in the match so far (tiebreaks count as games).
    pub fn set_games(&self) -> u32 {
        u32::from(self.games[0]) + u32::from(self.games[1])
    }

    pub fn apply_point(&self, point_winner: PlayerRef) -> Result<ScoreState, StateError> {
        if self.finished {
            return Err(StateError::MatchFinished);
        }
        let mut next = self.clone();
        let w = point_winner.index();
        let o = point_winner.other().index();
        if next.in_tiebreak {
            next.tiebreak_points[w] += 1;
            let target = next.config.tiebreak_target(next.is_final_set());
            if next.tiebreak_points[w] >= target && next.tiebreak_points[w].saturating_sub(next.tiebreak_points[o]) >= 2 {
                let starter = next.tiebreak_starter.unwrap_or(next.server);
                next.games[w] += 1;
                next.server = starter.other();
                next.win_set(point_winner);
            } else {
                let played = next.tiebreak_played();
                let starter = next.tiebreak_starter.unwrap_or(next.server);
                next.server = tiebreak_server(starter, played);
                next.serving_side = Side::from_parity(played);
            }
        } else {
            next.points[w] += 1;
            if next.points[w] >= 4 && next.points[w].saturating_sub(next.points[o]) >= 2 {
                next.win_game(point_winner);
            } else {
                next.serving_side = Side::from_parity(next.game_points_played());
            }
        }
        Ok(next)
    }

    fn win_game(&mut self, winner: PlayerRef) {
        let w = winner.index();
        let o = winner.other().index();
        self.games[w] += 1;
        self.points = [0, 0];
        self.server = self.server.other();
        self.serving_side = Side::Deuce;
        if self.games[w] >= 6 && self.games[w].saturating_sub(self.games[o]) >= 2 {
            self.win_set(winner);
            return;
        }
        if let Some(at) = self.config.tiebreak_at(self.is_final_set()) {
            if self.games == [at, at] {
                self.in_tiebreak = true;
                self.tiebreak_points = [0, 0];
                self.tiebreak_starter = Some(self.server);
            }
        }
    }

    fn win_set(&mut self, winner: PlayerRef) {
        self.sets[winner.index()] += 1;
        self.games = [0, 0];
        self.points = [0, 0];
        self.in_tiebreak = false;
        self.tiebreak_points = [0, 0];
        self.tiebreak_starter = None;
        self.serving_side = Side::Deuce;
        if self.sets[winner.index()] >= self.config.sets_to_win() {
            self.finished = true;
            self.winner = Some(winner);
        }
    }

    pub fn serving_side(&self) -> Side {
        if self.in_tiebreak {
            Side::from_parity(self.tiebreak_played())
        } else {
            Side::from_parity(self.game_points_played())
        }
    }

    /// Scores at one level from `player`'s view plus the score that would win it.
    ///
    /// The target is the winning score assuming the trailing player scores no
    /// more: `max(base, trailing + 2)`, with the set target capped one game
    /// above the tiebreak trigger when the set has one.
    pub fn distances(&self, player: PlayerRef, level: Level) -> LevelDistances {
        let p = player.index();
        let q = player.other().index();
        let (own, opp, target) = match level {
            Level::Game => {
                let (own, opp, base) = if self.in_tiebreak {
                    let base = self.config.tiebreak_target(self.is_final_set());
                    (self.tiebreak_points[p], self.tiebreak_points[q], base)
                } else {
                    (self.points[p], self.points[q], 4)
                };
                let (own, opp, base) = (u32::from(own), u32::from(opp), u32::from(base));
                (own, opp, base.max(own.min(opp) + 2))
            }
            Level::Set => {
                let (own, opp) = (u32::from(self.games[p]), u32::from(self.games[q]));
                let mut target = 6u32.max(own.min(opp) + 2);
                if let Some(at) = self.config.tiebreak_at(self.is_final_set()) {
                    target = target.min(u32::from(at) + 1);
                }
                (own, opp, target)
            }
            Level::Match => (
                u32::from(self.sets[p]),
                u32::from(self.sets[q]),
                u32::from(self.config.sets_to_win()),
            ),
        };
        LevelDistances { level, own_score: own, opp_score: opp, target }
    }
}

fn point_label(own: u16, opp: u16) -> String {
    match own {
        0 => "0".into(),
        1 => "15".into(),
        2 => "30".into(),
        _ if own >= 3 && own > opp && opp >= 3 => "AD".into(),
        _ => "40".into(),
    }
}

impl fmt::Display for ScoreState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts = if self.in_tiebreak {
            format!("TB {}-{}", self.tiebreak_points[0], self.tiebreak_points[1])
        } else {
            format!(
                "{}-{}",
                point_label(self.points[0], self.points[1]),
                point_label(self.points[1], self.points[0])
            )
        };
        write!(
            f,
            "sets {}-{} games {}-{} points {} server P{} ({})",
            self.sets[0],
            self.sets[1],
            self.games[0],
            self.games[1],
            pts,
            self.server.index() + 1,
            self.serving_side.name()
        )?;
        if let Some(w) = self.winner {
            write!(f, " won by P{}", w.index() + 1)?;
        }
        Ok(())
    }
}

/// Structural violations in a single state. Empty means the state is legal.
pub fn check_state(s: &ScoreState) -> Vec<String> {
    let mut v = Vec::new();
    let need = s.config.sets_to_win();
    if s.sets.iter().any(|&x| x > need) {
        v.push(format!("sets {:?} exceed {}", s.sets, need));
    }
    let reached = s.sets.contains(&need);
    if s.finished != reached {
        v.push(format!("finished={} but sets {:?}", s.finished, s.sets));
    }
    if s.finished != s.winner.is_some() {
        v.push("winner set without finish".into());
    }
    if s.serving_side != s.serving_side() {
        v.push(format!("side {:?} breaks parity", s.serving_side));
    }
    if !s.in_tiebreak {
        let (a, b) = (s.points[0], s.points[1]);
        if (a >= 4 || b >= 4) && a.abs_diff(b) >= 2 {
            v.push(format!("points {a}-{b} should have closed the game"));
        }
        if s.serving_side != Side::from_parity(u32::from(a) + u32::from(b)) {
            v.push("non-tiebreak side breaks parity".into());
        }
    }
    if s.finished {
        return v;
    }
    let (g0, g1) = (s.games[0], s.games[1]);
    if (g0 >= 6 || g1 >= 6) && g0.abs_diff(g1) >= 2 {
        v.push(format!("games {g0}-{g1} should have closed the set"));
    }
    let tb_at = s.config.tiebreak_at(s.is_final_set());
    let expect_tb = tb_at.is_some_and(|at| s.games == [at, at]);
    if expect_tb != s.in_tiebreak {
        v.push(format!("in_tiebreak={} at games {g0}-{g1}", s.in_tiebreak));
    }
    if let Some(at) = tb_at {
        if g0.max(g1) > at {
            v.push(format!("games {g0}-{g1} beyond tiebreak cap"));
        }
    }
    v
}

/// Violations in one transition `before -> after`.
pub fn check_transition(before: &ScoreState, after: &ScoreState) -> Vec<String> {
    let mut v = Vec::new();
    for i in 0..2 {
        if after.sets[i] < before.sets[i] {
            v.push("sets decreased".into());
        }
    }
    let set_changed = after.sets != before.sets;
    if !set_changed && (after.games[0] < before.games[0] || after.games[1] < before.games[1]) {
        v.push("games decreased within a set".into());
    }
    let game_boundary = set_changed || after.games != before.games;
    if game_boundary {
        let expected = if before.in_tiebreak {
            before.tiebreak_starter.map(PlayerRef::other)
        } else {
            Some(before.server.other())
        };
        if Some(after.server) != expected {
            v.push("server did not rotate at game boundary".into());
        }
        if after.serving_side != Side::Deuce {
            v.push("new game not started from deuce".into());
        }
    } else {
        if !before.in_tiebreak && after.server != before.server {
            v.push("server changed inside a game".into());
        }
        if after.serving_side == before.serving_side {
            v.push("side did not alternate".into());
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayDivergence {
    #[error("charted server disagrees with derived server on {mismatches} of {total} points (first at point {first_point})")]
    ServerMismatch { mismatches: usize, total: usize, first_point: u32 },
    #[error("point {point} charted after the match was already decided")]
    PointAfterFinish { point: u32 },
}

/// Pre-point states for every point of one match, in order.
pub fn replay<'a>(
    points: &'a [PointRecord],
    config: ScoringConfig,
    tolerance: f64,
) -> Result<Vec<(ScoreState, &'a PointRecord)>, ReplayDivergence> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let mut state = new_match(first.server, config);
    let mut out = Vec::with_capacity(points.len());
    let mut mismatches = 0;
    let mut first_mismatch = None;
    for p in points {
        if state.finished {
            return Err(ReplayDivergence::PointAfterFinish { point: p.point_index });
        }
        if state.server != p.server {
            mismatches += 1;
            first_mismatch.get_or_insert(p.point_index);
        }
        let next = state.apply_point(p.point_winner).expect("unfinished state accepts points");
        out.push((std::mem::replace(&mut state, next), p));
    }
    if mismatches as f64 > tolerance * points.len() as f64 {
        log::warn!(
            "match {}: server mismatch on {} of {} points",
            first.match_id,
            mismatches,
            points.len()
        );
        return Err(ReplayDivergence::ServerMismatch {
            mismatches,
            total: points.len(),
            first_point: first_mismatch.unwrap_or_default(),
        });
    }
    Ok(out)
}

/// Human-readable dump of a replay, one line per point.
pub fn format_trace(steps: &[(ScoreState, &PointRecord)]) -> String {
    let mut s = String::new();
    for (state, p) in steps {
        s.push_str(&format!(
            "{:>4}  {}  charted server P{}  winner P{}  [{}]\n",
            p.point_index,
            state,
            p.server.index() + 1,
            p.point_winner.index() + 1,
            p.first_serve_code
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use PlayerRef::{One, Two};

    fn play(state: &ScoreState, winners: &[PlayerRef]) -> ScoreState {
        winners.iter().fold(state.clone(), |s, &w| s.apply_point(w).unwrap())
    }

    #[test]
    fn fresh_match() {
        let s = new_match(One, ScoringConfig::default());
        assert_eq!((s.points, s.games, s.sets), ([0, 0], [0, 0], [0, 0]));
        assert_eq!(s.serving_side, Side::Deuce);
        assert!(!s.finished);
    }

    #[test]
    fn love_game_switches_server() {
        let s = play(&new_match(One, ScoringConfig::default()), &[One; 4]);
        assert_eq!(s.games, [1, 0]);
        assert_eq!(s.points, [0, 0]);
        assert_eq!(s.server, Two);
    }

    #[test]
    fn deuce_then_two_points_wins() {
        let s = play(&new_match(One, ScoringConfig::default()), &[One, Two, One, Two, One, Two]);
        assert_eq!(s.points, [3, 3]);
        let s = play(&s, &[Two, Two]);
        assert_eq!(s.games, [0, 1]);
        assert_eq!(s.points, [0, 0]);
    }

    #[test]
    fn tiebreak_at_six_all() {
        let mut s = new_match(One, ScoringConfig::default());
        // alternate holds up to 6-6
        for g in 0..12 {
            let w = if g % 2 == 0 { One } else { Two };
            s = play(&s, &[w; 4]);
        }
        assert_eq!(s.games, [6, 6]);
        assert!(s.in_tiebreak);
        assert_eq!(s.tiebreak_starter, Some(One));
        // one point, then pairs
        let after1 = s.apply_point(One).unwrap();
        assert_eq!(after1.server, Two);
        assert_eq!(after1.serving_side, Side::Ad);
        let after2 = after1.apply_point(One).unwrap();
        assert_eq!(after2.server, Two);
        assert_eq!(after2.serving_side, Side::Deuce);
        let after3 = after2.apply_point(Two).unwrap();
        assert_eq!(after3.server, One);
        assert_eq!(after3.serving_side(), Side::Ad);
        let done = play(&s, &[One; 7]);
        assert_eq!(done.sets, [1, 0]);
        assert_eq!(done.server, Two);
    }

    #[test]
    fn advantage_final_set_has_no_tiebreak() {
        let cfg = ScoringConfig { final_set_rules: FinalSetRules::Advantage, ..ScoringConfig::default() };
        let mut s = new_match(One, cfg);
        s.sets = [1, 1];
        for g in 0..14 {
            let w = if g % 2 == 0 { One } else { Two };
            s = play(&s, &[w; 4]);
        }
        assert_eq!(s.games, [7, 7]);
        assert!(!s.in_tiebreak);
        assert!(check_state(&s).is_empty(), "{:?}", check_state(&s));
    }

    #[test]
    fn distance_targets() {
        let s = new_match(One, ScoringConfig::default());
        assert_eq!(
            s.distances(One, Level::Game),
            LevelDistances { level: Level::Game, own_score: 0, opp_score: 0, target: 4 }
        );
        let mut s5 = s.clone();
        s5.points = [5, 5];
        assert_eq!(s5.distances(One, Level::Game).target, 7);
        assert_eq!(new_match(One, ScoringConfig::best_of(5)).distances(Two, Level::Match).target, 3);
        let mut tb = s.clone();
        tb.games = [6, 6];
        tb.in_tiebreak = true;
        tb.tiebreak_points = [6, 6];
        assert_eq!(tb.distances(One, Level::Game).target, 8);
        assert_eq!(tb.distances(One, Level::Set).target, 7);
    }

    #[test]
    fn side_parity() {
        let s = new_match(One, ScoringConfig::default());
        assert_eq!(s.serving_side(), Side::Deuce);
        assert_eq!(s.apply_point(Two).unwrap().serving_side(), Side::Ad);
    }

    #[test]
    fn finished_rejects_points() {
        let s = play(&new_match(One, ScoringConfig::best_of(3)), &[One; 48]);
        assert!(s.finished);
        assert_eq!(s.winner, Some(One));
        assert_eq!(s.apply_point(One), Err(StateError::MatchFinished));
    }

    #[test]
    fn display_uses_tennis_labels() {
        let s = play(&new_match(One, ScoringConfig::default()), &[One, One, One, Two, Two, Two, One]);
        assert!(s.to_string().contains("AD-40"), "{s}");
    }
}
