//! Synthetic charted matches and label generators for tests and demos.

use std::fs;
use std::io;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{extract_match, FeatureConfig, ReplayedMatch, FEATURE_NAMES};
use crate::mcp_data::{Handedness, MatchRecord, PointRecord, Surface, Tour};
use crate::models::{Dataset, Matrix, Standardizer};
use crate::score::{new_match, FinalSetRules, PlayerRef, ScoringConfig, Side};

/// Serving habits of one synthetic player.
#[derive(Debug, Clone, PartialEq)]
pub struct ServerStyle {
    pub name: String,
    pub hand: Handedness,
    /// Direction logits per side (deuce, ad) in Wide, Body, T order.
    pub preference: [[f64; 3]; 2],
    /// Weight on the share of earlier same-side serves in each direction.
    /// Negative values make the player mix directions up.
    pub habit: f64,
}

impl ServerStyle {
    pub fn random<R: Rng>(name: &str, rng: &mut R) -> ServerStyle {
        let mut side = || [rng.gen_range(-1.0..1.0), rng.gen_range(-1.5..0.5), rng.gen_range(-1.0..1.0)];
        let preference = [side(), side()];
        ServerStyle {
            name: name.to_string(),
            hand: if rng.gen_bool(0.15) { Handedness::Left } else { Handedness::Right },
            preference,
            habit: rng.gen_range(-2.0..1.0),
        }
    }

    fn choose<R: Rng>(&self, side: Side, seen: &[u32; 3], rng: &mut R) -> usize {
        let total = seen.iter().sum::<u32>().max(1) as f64;
        let s = match side {
            Side::Deuce => 0,
            Side::Ad => 1,
        };
        let w: Vec<f64> = (0..3).map(|k| (self.preference[s][k] + self.habit * seen[k] as f64 / total).exp()).collect();
        let u = rng.gen::<f64>() * w.iter().sum::<f64>();
        let mut acc = 0.0;
        for (k, v) in w.iter().enumerate() {
            acc += v;
            if u < acc {
                return k;
            }
        }
        2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchSpec {
    pub best_of: u8,
    pub final_set_rules: FinalSetRules,
    pub p_serve_point: f64,
    pub p_first_in: f64,
    pub p_second_in: f64,
    /// Share of first serves charted without a direction.
    pub p_unknown_direction: f64,
    pub max_rally: usize,
}

impl Default for MatchSpec {
    fn default() -> Self {
        MatchSpec {
            best_of: 3,
            final_set_rules: FinalSetRules::Tiebreak,
            p_serve_point: 0.62,
            p_first_in: 0.62,
            p_second_in: 0.9,
            p_unknown_direction: 0.02,
            max_rally: 9,
        }
    }
}

const SHOT_LETTERS: &[u8] = b"fbrsvzoplmhijk";
const FAULT_LETTERS: &[u8] = b"nwdx";

fn serve_digit(dir: usize) -> char {
    ['4', '5', '6'][dir]
}

fn random_rally<R: Rng>(rng: &mut R, len: usize, winner_hit_last: bool) -> String {
    let mut s = String::new();
    for _ in 0..len {
        s.push(*SHOT_LETTERS.choose(rng).expect("letters") as char);
        if rng.gen_bool(0.9) {
            s.push(char::from(b'1' + rng.gen_range(0..3)));
        }
        if rng.gen_bool(0.4) {
            s.push(if rng.gen_bool(0.5) { '7' } else { '8' });
        }
    }
    if len > 0 {
        let end = if winner_hit_last {
            '*'
        } else {
            *b"@#nwd".choose(rng).expect("ends") as char
        };
        s.push(end);
    }
    s
}

/// Simulates one match point by point through the scoring engine.
pub fn simulate_match<R: Rng>(
    rng: &mut R,
    match_id: &str,
    players: [&ServerStyle; 2],
    surface: Surface,
    spec: &MatchSpec,
) -> (MatchRecord, Vec<PointRecord>) {
    let (final_tiebreak_games, final_tiebreak_points) = (6, 7);
    let record = MatchRecord {
        match_id: match_id.to_string(),
        date: NaiveDate::from_ymd_opt(2024, 1, 1),
        tournament: "Synthetic Open".into(),
        surface,
        player1: players[0].name.clone(),
        player2: players[1].name.clone(),
        handedness1: players[0].hand,
        handedness2: players[1].hand,
        sex: Some(Tour::M),
        best_of: spec.best_of,
        final_set_rules: spec.final_set_rules,
        final_tiebreak_games,
        final_tiebreak_points,
    };
    let config = ScoringConfig { best_of: spec.best_of, final_set_rules: spec.final_set_rules, ..ScoringConfig::default() };
    let mut state = new_match(PlayerRef::One, config);
    let mut seen = [[[0u32; 3]; 2]; 2];
    let mut points = Vec::new();
    let mut idx = 1;
    while !state.finished {
        let server = state.server;
        let side = state.serving_side();
        let style = players[server.index()];
        let side_idx = match side {
            Side::Deuce => 0,
            Side::Ad => 1,
        };
        let dir = style.choose(side, &seen[server.index()][side_idx], rng);
        seen[server.index()][side_idx][dir] += 1;
        let mut first = if rng.gen_bool(spec.p_unknown_direction) { '0' } else { serve_digit(dir) }.to_string();
        let first_in = rng.gen_bool(spec.p_first_in);
        let mut second = None;
        let serve_in = if first_in {
            true
        } else {
            first.push(*FAULT_LETTERS.choose(rng).expect("faults") as char);
            let mut s = serve_digit(rng.gen_range(0..3)).to_string();
            let ok = rng.gen_bool(spec.p_second_in);
            if !ok {
                s.push(*FAULT_LETTERS.choose(rng).expect("faults") as char);
            }
            second = Some(s);
            ok
        };
        let (winner, rally) = if !serve_in {
            (server.other(), String::new())
        } else {
            let len = rng.gen_range(0..=spec.max_rally);
            if len == 0 {
                match &mut second {
                    Some(s) => s.push('*'),
                    None => first.push('*'),
                }
                (server, String::new())
            } else {
                let w = if rng.gen_bool(spec.p_serve_point) { server } else { server.other() };
                // returner hits odd-numbered rally shots (1-based)
                let last_hitter = if len % 2 == 1 { server.other() } else { server };
                let winner_hit_last = w == last_hitter;
                (w, random_rally(rng, len, winner_hit_last))
            }
        };
        points.push(PointRecord {
            match_id: match_id.to_string(),
            point_index: idx,
            server,
            first_serve_code: first,
            second_serve_code: second,
            rally_code: rally,
            point_winner: winner,
            is_tiebreak_point: state.in_tiebreak,
        });
        idx += 1;
        state = state.apply_point(winner).expect("loop stops at match end");
    }
    (record, points)
}

/// Synthetic players and matches between randomly drawn pairs of them.
pub struct Corpus {
    pub styles: Vec<ServerStyle>,
    pub matches: Vec<MatchRecord>,
    pub points: Vec<PointRecord>,
}

pub fn corpus(seed: u64, n_players: usize, n_matches: usize, spec: &MatchSpec) -> Corpus {
    assert!(n_players >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let styles: Vec<ServerStyle> = (0..n_players)
        .map(|i| ServerStyle::random(&format!("Player{i:02} Synth{i:02}"), &mut rng))
        .collect();
    let mut matches = Vec::with_capacity(n_matches);
    let mut points = Vec::new();
    for m in 0..n_matches {
        let a = rng.gen_range(0..n_players);
        let mut b = rng.gen_range(0..n_players - 1);
        if b >= a {
            b += 1;
        }
        let surface = *[Surface::Hard, Surface::Clay, Surface::Grass].choose(&mut rng).expect("surfaces");
        let id = format!("20240101-M-Synthetic-R{m:04}-{}-{}", styles[a].name.replace(' ', "_"), styles[b].name.replace(' ', "_"));
        let (rec, pts) = simulate_match(&mut rng, &id, [&styles[a], &styles[b]], surface, spec);
        matches.push(rec);
        points.extend(pts);
    }
    Corpus { styles, matches, points }
}

fn final_tb_code(rec: &MatchRecord) -> &'static str {
    match rec.final_set_rules {
        FinalSetRules::Advantage => "0",
        FinalSetRules::Tiebreak => "1",
    }
}

fn hand_code(h: Handedness) -> &'static str {
    match h {
        Handedness::Right => "R",
        Handedness::Left => "L",
        Handedness::Unknown => "",
    }
}

/// Writes the corpus in the charting project's two-file CSV layout.
pub fn write_mcp_csv(matches: &[MatchRecord], points: &[PointRecord], matches_path: &Path, points_path: &Path) -> io::Result<()> {
    if let Some(dir) = matches_path.parent() {
        fs::create_dir_all(dir)?;
    }
    if let Some(dir) = points_path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(matches_path)?;
    w.write_record(["match_id", "Player 1", "Player 2", "Pl 1 hand", "Pl 2 hand", "Gender", "Date", "Tournament", "Surface", "Best of", "Final TB?"])?;
    for m in matches {
        let date = m.date.map(|d| d.format("%Y%m%d").to_string()).unwrap_or_default();
        let surface = format!("{:?}", m.surface);
        let best_of = m.best_of.to_string();
        w.write_record([
            m.match_id.as_str(),
            &m.player1,
            &m.player2,
            hand_code(m.handedness1),
            hand_code(m.handedness2),
            match m.sex {
                Some(Tour::W) => "W",
                _ => "M",
            },
            &date,
            &m.tournament,
            &surface,
            &best_of,
            final_tb_code(m),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(points_path)?;
    w.write_record(["match_id", "Pt", "Svr", "1st", "2nd", "PtWinner", "TB?"])?;
    for p in points {
        let (first, second) = match &p.second_serve_code {
            None => (format!("{}{}", p.first_serve_code, p.rally_code), String::new()),
            Some(s) => (p.first_serve_code.clone(), format!("{s}{}", p.rally_code)),
        };
        w.write_record([
            p.match_id.as_str(),
            &p.point_index.to_string(),
            &(p.server.index() + 1).to_string(),
            &first,
            &second,
            &(p.point_winner.index() + 1).to_string(),
            if p.is_tiebreak_point { "1" } else { "0" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Feature rows of simulated matches, all servers, first `n` labeled points.
pub fn feature_matrix(seed: u64, n: usize) -> Matrix {
    let spec = MatchSpec::default();
    let mut rows: Vec<[f64; FEATURE_NAMES.len()]> = Vec::with_capacity(n);
    let mut round = 0u64;
    while rows.len() < n {
        let c = corpus(seed.wrapping_add(round), 8, 10, &spec);
        round += 1;
        for (rec, pts) in c.matches.iter().zip(crate::mcp_data::group_points(&c.points)) {
            let m = ReplayedMatch::new(rec, pts, 0.0).expect("simulated matches replay");
            for f in extract_match(&m, FeatureConfig::default()).into_iter().flatten() {
                if rows.len() < n {
                    rows.push(f.encode());
                }
            }
        }
    }
    Matrix::from_rows(&rows, FEATURE_NAMES.len())
}

/// Multinomial-logistic label generator over standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticTruth {
    pub scaler: Standardizer,
    /// Three rows of `d + 1` coefficients, intercept last.
    pub weights: Matrix,
}

impl LogisticTruth {
    pub fn random<R: Rng>(rng: &mut R, x: &Matrix, scale: f64) -> LogisticTruth {
        let d = x.cols();
        let data = (0..3 * (d + 1)).map(|_| rng.gen_range(-scale..scale)).collect();
        LogisticTruth { scaler: Standardizer::fit(x), weights: Matrix::from_vec(3, d + 1, data) }
    }

    pub fn probabilities(&self, row: &[f64]) -> [f64; 3] {
        let d = row.len();
        let mut z = [0.0; 3];
        for (k, zk) in z.iter_mut().enumerate() {
            let w = self.weights.row(k);
            *zk = w[d]
                + row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| w[j] * (v - self.scaler.mean[j]) / self.scaler.std[j])
                    .sum::<f64>();
        }
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e = z.map(|v| (v - max).exp());
        let s: f64 = e.iter().sum();
        e.map(|v| v / s)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, x: &Matrix) -> Vec<usize> {
        x.iter_rows()
            .map(|r| {
                let p = self.probabilities(r);
                let u: f64 = rng.gen();
                if u < p[0] {
                    0
                } else if u < p[0] + p[1] {
                    1
                } else {
                    2
                }
            })
            .collect()
    }

    /// Expected accuracy of the argmax rule on these rows.
    pub fn bayes_accuracy(&self, x: &Matrix) -> f64 {
        let n = x.rows().max(1) as f64;
        x.iter_rows().map(|r| self.probabilities(r).iter().copied().fold(0.0, f64::max)).sum::<f64>() / n
    }
}

/// Feature rows from simulated matches, relabeled by a random logistic truth.
pub fn recoverability_dataset(seed: u64, n: usize, scale: f64) -> (Dataset, LogisticTruth) {
    let x = feature_matrix(seed, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let truth = LogisticTruth::random(&mut rng, &x, scale);
    let y = truth.sample(&mut rng, &x);
    let names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    (Dataset::new(x, y, 3, names), truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::replay;

    #[test]
    fn simulated_match_replays_cleanly() {
        let c = corpus(4, 4, 3, &MatchSpec { best_of: 5, ..MatchSpec::default() });
        for (rec, pts) in c.matches.iter().zip(crate::mcp_data::group_points(&c.points)) {
            let steps = replay(pts, rec.scoring(), 0.0).unwrap();
            assert_eq!(steps.len(), pts.len());
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let x = feature_matrix(1, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = LogisticTruth::random(&mut rng, &x, 1.0);
        for r in x.iter_rows() {
            assert!((t.probabilities(r).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let b = t.bayes_accuracy(&x);
        assert!((1.0 / 3.0..=1.0).contains(&b));
    }
}
