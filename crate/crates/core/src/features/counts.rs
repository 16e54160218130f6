use serde::{Deserialize, Serialize};

use crate::mcp_data::ServeDirection;

/// Outcome of one earlier first serve, as seen by the features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorServe {
    pub direction: ServeDirection,
    pub landed_in: bool,
    pub server_won: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionCounts {
    pub wide: u32,
    pub body: u32,
    pub t: u32,
}

impl DirectionCounts {
    pub fn get(&self, dir: ServeDirection) -> u32 {
        match dir {
            ServeDirection::Wide => self.wide,
            ServeDirection::Body => self.body,
            ServeDirection::T => self.t,
            ServeDirection::Unknown => 0,
        }
    }

    pub fn bump(&mut self, dir: ServeDirection) {
        match dir {
            ServeDirection::Wide => self.wide += 1,
            ServeDirection::Body => self.body += 1,
            ServeDirection::T => self.t += 1,
            ServeDirection::Unknown => {}
        }
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.wide, self.body, self.t]
    }
}

/// Attempted first serves per direction; faults count as attempts.
pub fn direction_counts(prior: &[PriorServe]) -> DirectionCounts {
    let mut c = DirectionCounts::default();
    for s in prior {
        c.bump(s.direction);
    }
    c
}

/// First serves that landed in and whose point the server won.
pub fn win_counts(prior: &[PriorServe]) -> DirectionCounts {
    let mut c = DirectionCounts::default();
    for s in prior.iter().filter(|s| s.landed_in && s.server_won) {
        c.bump(s.direction);
    }
    c
}

/// In-serves over attempts per direction, Wide/Body/T order; 0 when nothing was attempted.
pub fn serve_percentages(prior: &[PriorServe]) -> [f64; 3] {
    let attempts = direction_counts(prior);
    let mut landed = DirectionCounts::default();
    for s in prior.iter().filter(|s| s.landed_in) {
        landed.bump(s.direction);
    }
    let mut out = [0.0; 3];
    for (i, dir) in ServeDirection::KNOWN.into_iter().enumerate() {
        let n = attempts.get(dir);
        if n > 0 {
            out[i] = f64::from(landed.get(dir)) / f64::from(n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ServeDirection::*;

    fn s(direction: ServeDirection, landed_in: bool, server_won: bool) -> PriorServe {
        PriorServe { direction, landed_in, server_won }
    }

    #[test]
    fn empty_prefix() {
        assert_eq!(direction_counts(&[]), DirectionCounts::default());
        assert_eq!(win_counts(&[]), DirectionCounts::default());
        assert_eq!(serve_percentages(&[]), [0.0; 3]);
    }

    #[test]
    fn counts_include_faults() {
        let prior = [s(Wide, true, true), s(Wide, false, false), s(T, true, false)];
        assert_eq!(direction_counts(&prior), DirectionCounts { wide: 2, body: 0, t: 1 });
        assert_eq!(win_counts(&prior), DirectionCounts { wide: 1, body: 0, t: 0 });
    }

    #[test]
    fn percentages() {
        let prior = [s(T, true, false), s(T, false, true), s(T, true, true)];
        let pct = serve_percentages(&prior);
        assert_eq!(pct[0], 0.0);
        assert_eq!(pct[2], 2.0 / 3.0);
        let all_in = [s(Wide, true, false), s(Body, true, true)];
        assert_eq!(serve_percentages(&all_in), [1.0, 1.0, 0.0]);
    }

    #[test]
    fn fault_then_won_point_is_not_a_win() {
        // server may still win the point on the second serve
        assert_eq!(win_counts(&[s(Body, false, true)]), DirectionCounts::default());
    }
}
