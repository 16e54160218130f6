use crate::mcp_data::{parse_rally_detailed, MatchRecord, PointRecord, ServePlacement, Shot};
use crate::score::{replay, ReplayDivergence, ScoreState, Side};

/// One point after replay, with its notation parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayedPoint {
    pub state: ScoreState,
    pub record: PointRecord,
    pub side: Side,
    pub first_serve: Option<ServePlacement>,
    pub serve_in_play: Option<ServePlacement>,
    pub rally: Vec<Shot>,
    pub unparsed_chars: usize,
    /// Zero-based count of games (tiebreaks included) completed before this point.
    pub game_number: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayedMatch {
    pub record: MatchRecord,
    pub points: Vec<ReplayedPoint>,
}

impl ReplayedMatch {
    /// Replays `points` (all of one match, in order) and parses each point's notation.
    pub fn new(record: &MatchRecord, points: &[PointRecord], tolerance: f64) -> Result<Self, ReplayDivergence> {
        let steps = replay(points, record.scoring(), tolerance)?;
        let mut out = Vec::with_capacity(steps.len());
        let mut game_number = 0;
        let mut last_key = None;
        for (state, p) in steps {
            let key = (state.sets, state.games);
            if let Some(prev) = last_key {
                if prev != key {
                    game_number += 1;
                }
            }
            last_key = Some(key);
            let parsed = parse_rally_detailed(&p.rally_code);
            out.push(ReplayedPoint {
                side: state.serving_side(),
                first_serve: p.first_serve(),
                serve_in_play: p.serve_in_play(),
                rally: parsed.shots,
                unparsed_chars: parsed.unrecognized,
                record: p.clone(),
                state,
                game_number,
            });
        }
        Ok(ReplayedMatch { record: record.clone(), points: out })
    }

    /// The same match cut after `len` points.
    pub fn truncated(&self, len: usize) -> ReplayedMatch {
        ReplayedMatch { record: self.record.clone(), points: self.points[..len.min(self.points.len())].to_vec() }
    }
}
