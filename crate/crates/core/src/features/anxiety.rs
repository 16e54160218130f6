use crate::score::{Level, PlayerRef, ScoreState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnxietyComponents {
    pub level: Level,
    pub uncertainty: f64,
    pub hope: f64,
    pub fear: f64,
    pub anxiety: f64,
}

/// Uncertainty falls linearly with the score gap; hope and fear are the
/// player's and opponent's scores as fractions of the winning score.
pub fn anxiety(state: &ScoreState, player: PlayerRef, level: Level) -> AnxietyComponents {
    let d = state.distances(player, level);
    anxiety_from_scores(level, d.own_score, d.opp_score, d.target)
}

pub fn anxiety_from_scores(level: Level, own: u32, opp: u32, target: u32) -> AnxietyComponents {
    let target = f64::from(target.max(1));
    let own = f64::from(own);
    let opp = f64::from(opp);
    let uncertainty = (1.0 - (own - opp).abs() / target).clamp(0.0, 1.0);
    let hope = (own / target).clamp(0.0, 1.0);
    let fear = (opp / target).clamp(0.0, 1.0);
    AnxietyComponents { level, uncertainty, hope, fear, anxiety: uncertainty * (hope + fear) }
}

pub fn overall_anxiety(game: &AnxietyComponents, set: &AnxietyComponents, r#match: &AnxietyComponents) -> f64 {
    game.anxiety + set.anxiety + r#match.anxiety
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{new_match, ScoringConfig};

    #[test]
    fn fresh_match_is_calm() {
        let s = new_match(PlayerRef::One, ScoringConfig::default());
        for level in Level::ALL {
            let a = anxiety(&s, PlayerRef::One, level);
            assert_eq!((a.uncertainty, a.hope, a.fear, a.anxiety), (1.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn forty_love() {
        let mut s = new_match(PlayerRef::One, ScoringConfig::default());
        s.points = [3, 0];
        let a = anxiety(&s, PlayerRef::One, Level::Game);
        assert_eq!((a.uncertainty, a.hope, a.fear, a.anxiety), (0.25, 0.75, 0.0, 0.1875));
    }

    #[test]
    fn tied_tiebreak() {
        let mut s = new_match(PlayerRef::One, ScoringConfig::default());
        s.games = [6, 6];
        s.in_tiebreak = true;
        s.tiebreak_points = [6, 6];
        let a = anxiety(&s, PlayerRef::Two, Level::Game);
        assert_eq!((a.uncertainty, a.hope, a.fear, a.anxiety), (1.0, 0.75, 0.75, 1.5));
    }

    #[test]
    fn overall_sums() {
        let c = |anxiety| AnxietyComponents { level: Level::Game, uncertainty: 0.0, hope: 0.0, fear: 0.0, anxiety };
        assert_eq!(overall_anxiety(&c(0.0), &c(0.0), &c(0.0)), 0.0);
        assert_eq!(overall_anxiety(&c(0.1875), &c(0.2), &c(0.3)), 0.6875);
        assert_eq!(overall_anxiety(&c(0.3), &c(0.1875), &c(0.2)), overall_anxiety(&c(0.2), &c(0.3), &c(0.1875)));
    }
}
