use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{MatchRecord, PointRecord};

/// Counts of every record dropped by [`clean_dataset`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleaningLog {
    pub matches_in: usize,
    pub points_in: usize,
    pub duplicates: usize,
    pub same_player_matches: usize,
    pub orphan_points: usize,
    /// Matches whose point indexes skip a value; their points go with them.
    pub gapped_matches: usize,
    pub gapped_points: usize,
    pub empty_matches: usize,
    pub matches_out: usize,
    pub points_out: usize,
}

impl CleaningLog {
    pub fn is_clean(&self) -> bool {
        self.duplicates == 0
            && self.same_player_matches == 0
            && self.orphan_points == 0
            && self.gapped_matches == 0
            && self.empty_matches == 0
    }
}

impl fmt::Display for CleaningLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cleaning report")?;
        writeln!(f, "  matches read           {}", self.matches_in)?;
        writeln!(f, "  points read            {}", self.points_in)?;
        writeln!(f, "  duplicate match ids    {}", self.duplicates)?;
        writeln!(f, "  same-player matches    {}", self.same_player_matches)?;
        writeln!(f, "  orphan points          {}", self.orphan_points)?;
        writeln!(f, "  gapped matches         {} ({} points)", self.gapped_matches, self.gapped_points)?;
        writeln!(f, "  matches without points {}", self.empty_matches)?;
        writeln!(f, "  matches kept           {}", self.matches_out)?;
        writeln!(f, "  points kept            {}", self.points_out)
    }
}

fn is_dense(points: &[&PointRecord]) -> bool {
    points.windows(2).all(|w| w[1].point_index == w[0].point_index + 1)
}

/// Drops duplicate match ids (first wins), matches with identical players,
/// orphan points, matches with gaps in their point indexes, and matches left
/// without points. Input order is preserved.
pub fn clean_dataset(
    matches: Vec<MatchRecord>,
    points: Vec<PointRecord>,
) -> (Vec<MatchRecord>, Vec<PointRecord>, CleaningLog) {
    let mut log = CleaningLog { matches_in: matches.len(), points_in: points.len(), ..CleaningLog::default() };

    let mut seen = HashSet::new();
    let mut kept = Vec::with_capacity(matches.len());
    for m in matches {
        if !seen.insert(m.match_id.clone()) {
            log.duplicates += 1;
            continue;
        }
        if m.player1 == m.player2 {
            log.same_player_matches += 1;
            continue;
        }
        kept.push(m);
    }
    let known: HashSet<&str> = kept.iter().map(|m| m.match_id.as_str()).collect();

    let mut by_match: HashMap<&str, Vec<&PointRecord>> = HashMap::new();
    for p in &points {
        if known.contains(p.match_id.as_str()) {
            by_match.entry(p.match_id.as_str()).or_default().push(p);
        } else {
            log.orphan_points += 1;
        }
    }
    let mut gapped = HashSet::new();
    for (id, pts) in &by_match {
        if !is_dense(pts) {
            log.gapped_matches += 1;
            log.gapped_points += pts.len();
            gapped.insert(id.to_string());
        }
    }
    let with_points: HashSet<String> = by_match
        .keys()
        .filter(|id| !gapped.contains(**id))
        .map(|id| id.to_string())
        .collect();
    drop(by_match);

    let matches_out: Vec<MatchRecord> = kept
        .into_iter()
        .filter(|m| {
            if gapped.contains(&m.match_id) {
                return false;
            }
            let keep = with_points.contains(&m.match_id);
            if !keep {
                log.empty_matches += 1;
            }
            keep
        })
        .collect();
    let points_out: Vec<PointRecord> = points.into_iter().filter(|p| with_points.contains(&p.match_id)).collect();
    log.matches_out = matches_out.len();
    log.points_out = points_out.len();
    (matches_out, points_out, log)
}
