//! Match Charting Project match and point files.

mod clean;
mod loader;
pub mod notation;

pub use clean::{clean_dataset, CleaningLog};
pub use loader::{load_matches, load_points, ColumnMap, LoadError, PointsLoad, Rejection};
pub use notation::{
    parse_rally, parse_rally_detailed, parse_serve, split_serve_column, ParseError, RallyParse, ServeDirection,
    ServeFault, ServePlacement, Shot, ShotDepth, ShotDirection, ShotKind, Terminal,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::score::{FinalSetRules, PlayerRef, ScoringConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Surface {
    Hard,
    Clay,
    Grass,
    Carpet,
    Unknown,
}

impl Surface {
    pub const ALL: [Surface; 5] = [Surface::Hard, Surface::Clay, Surface::Grass, Surface::Carpet, Surface::Unknown];

    pub fn parse(cell: &str) -> Surface {
        let c = cell.trim().to_ascii_lowercase();
        if c.contains("hard") {
            Surface::Hard
        } else if c.contains("clay") {
            Surface::Clay
        } else if c.contains("grass") {
            Surface::Grass
        } else if c.contains("carpet") {
            Surface::Carpet
        } else {
            Surface::Unknown
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handedness {
    Right,
    Left,
    Unknown,
}

impl Handedness {
    pub fn parse(cell: &str) -> Handedness {
        match cell.trim().chars().next().map(|c| c.to_ascii_uppercase()) {
            Some('R') => Handedness::Right,
            Some('L') => Handedness::Left,
            _ => Handedness::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tour {
    M,
    W,
}

impl Tour {
    pub fn parse(cell: &str) -> Option<Tour> {
        match cell.trim().to_ascii_uppercase().as_str() {
            "M" | "MEN" | "ATP" => Some(Tour::M),
            "W" | "F" | "WOMEN" | "WTA" => Some(Tour::W),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: String,
    pub date: Option<NaiveDate>,
    pub tournament: String,
    pub surface: Surface,
    pub player1: String,
    pub player2: String,
    pub handedness1: Handedness,
    pub handedness2: Handedness,
    pub sex: Option<Tour>,
    pub best_of: u8,
    pub final_set_rules: FinalSetRules,
    /// Extended final-set tiebreak knobs (games-all trigger, points to win).
    pub final_tiebreak_games: u16,
    pub final_tiebreak_points: u16,
}

impl MatchRecord {
    pub fn scoring(&self) -> ScoringConfig {
        ScoringConfig {
            best_of: self.best_of,
            final_set_rules: self.final_set_rules,
            final_tiebreak_games: self.final_tiebreak_games,
            final_tiebreak_points: self.final_tiebreak_points,
            ..ScoringConfig::default()
        }
    }

    pub fn player(&self, who: PlayerRef) -> &str {
        match who {
            PlayerRef::One => &self.player1,
            PlayerRef::Two => &self.player2,
        }
    }

    pub fn handedness(&self, who: PlayerRef) -> Handedness {
        match who {
            PlayerRef::One => self.handedness1,
            PlayerRef::Two => self.handedness2,
        }
    }

    /// Which side of the match `name` played, if any.
    pub fn player_ref(&self, name: &str) -> Option<PlayerRef> {
        if self.player1 == name {
            Some(PlayerRef::One)
        } else if self.player2 == name {
            Some(PlayerRef::Two)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub match_id: String,
    pub point_index: u32,
    pub server: PlayerRef,
    /// Serve token of the first serve, e.g. `4` or `6n`.
    pub first_serve_code: String,
    pub second_serve_code: Option<String>,
    /// Rally after whichever serve went in; empty for aces and double faults.
    pub rally_code: String,
    pub point_winner: PlayerRef,
    pub is_tiebreak_point: bool,
}

impl PointRecord {
    pub fn first_serve(&self) -> Option<ServePlacement> {
        parse_serve(&self.first_serve_code).ok()
    }

    /// Serve that started the rally: the first if it was in, else the second.
    pub fn serve_in_play(&self) -> Option<ServePlacement> {
        let first = self.first_serve()?;
        if first.fault.is_in() {
            return Some(first);
        }
        let second = parse_serve(self.second_serve_code.as_deref()?).ok()?;
        second.fault.is_in().then_some(second)
    }
}

/// Contiguous runs of points sharing a match id, in input order.
pub fn group_points(points: &[PointRecord]) -> Vec<&[PointRecord]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=points.len() {
        if i == points.len() || points[i].match_id != points[start].match_id {
            if i > start {
                out.push(&points[start..i]);
            }
            start = i;
        }
    }
    out
}
