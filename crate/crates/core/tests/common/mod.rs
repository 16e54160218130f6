#![allow(dead_code)]

use serve_predict::features::{run_index_point, FeatureVector, ReplayedMatch};
use serve_predict::mcp_data::{
    group_points, parse_rally_detailed, parse_serve, split_serve_column, ServeDirection, ServePlacement, Shot,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serve_predict::models::{Dataset, Matrix, Mlp};
use serve_predict::synth::{self, MatchSpec};

pub const GOLDEN: &str = include_str!("../data/notation_golden.tsv");

pub struct GoldenCase {
    pub kind: String,
    pub input: String,
    pub expected: String,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let mut parts = l.splitn(3, '\t');
            let kind = parts.next().unwrap().to_string();
            let input = parts.next().unwrap_or_default().to_string();
            let expected = parts.next().unwrap_or_default().to_string();
            GoldenCase { kind, input, expected }
        })
        .collect()
}

pub fn render_serve(s: &ServePlacement) -> String {
    format!("{:?} {:?} {}", s.direction, s.fault, if s.is_ace { "ace" } else { "-" })
}

pub fn render_shot(s: &Shot) -> String {
    format!("{:?}/{:?}/{:?}/{:?}", s.kind, s.direction, s.depth, s.terminal)
}

pub fn render(case: &GoldenCase) -> String {
    match case.kind.as_str() {
        "serve" => parse_serve(&case.input).map_or("ERR".into(), |s| render_serve(&s)),
        "rally" => {
            let p = parse_rally_detailed(&case.input);
            let mut out = if p.shots.is_empty() {
                "-".to_string()
            } else {
                p.shots.iter().map(render_shot).collect::<Vec<_>>().join(" ")
            };
            if p.unrecognized > 0 {
                out.push_str(&format!(" !{}", p.unrecognized));
            }
            out
        }
        "column" => split_serve_column(&case.input).map_or("ERR".into(), |(s, r)| format!("{s}|{r}")),
        other => panic!("unknown golden kind {other}"),
    }
}

/// Replayed synthetic matches.
pub fn replayed_corpus(seed: u64, n_players: usize, n_matches: usize, spec: &MatchSpec) -> Vec<ReplayedMatch> {
    let c = synth::corpus(seed, n_players, n_matches, spec);
    c.matches
        .iter()
        .zip(group_points(&c.points))
        .map(|(rec, pts)| ReplayedMatch::new(rec, pts, 0.0).expect("synthetic match replays"))
        .collect()
}

/// Cumulative fields recomputed by rescanning the raw point strings of the prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveCumulative {
    pub counts: [u32; 3],
    pub wins: [u32; 3],
    pub pct: [f64; 3],
    pub run_server: f64,
    pub run_returner: f64,
}

fn raw_direction(code: &str) -> Option<usize> {
    match code.chars().next()? {
        '4' => Some(0),
        '5' => Some(1),
        '6' => Some(2),
        _ => None,
    }
}

fn raw_in(code: &str) -> bool {
    !matches!(code.chars().nth(1), Some('n' | 'w' | 'd' | 'x' | 'g' | 'e'))
}

pub fn naive_cumulative(m: &ReplayedMatch, k: usize, scope_all_sides: bool) -> NaiveCumulative {
    let target = &m.points[k];
    let server = target.record.server;
    let mut counts = [0u32; 3];
    let mut landed = [0u32; 3];
    let mut wins = [0u32; 3];
    let mut run_server = 0.0;
    let mut run_returner = 0.0;
    for j in 0..k {
        let p = &m.points[j];
        // run indexes accumulate over every earlier point, whoever served
        let served = p.serve_in_play.map(|s| s.direction);
        let run = run_index_point(&p.rally, served, p.side);
        if p.record.server == server {
            run_server += run.server;
            run_returner += run.returner;
        } else {
            run_server += run.returner;
            run_returner += run.server;
        }
        if p.record.server != server || (!scope_all_sides && p.side != target.side) {
            continue;
        }
        let code = &p.record.first_serve_code;
        let Some(d) = raw_direction(code) else { continue };
        counts[d] += 1;
        if raw_in(code) {
            landed[d] += 1;
            if p.record.point_winner == server {
                wins[d] += 1;
            }
        }
    }
    let mut pct = [0.0; 3];
    for d in 0..3 {
        if counts[d] > 0 {
            pct[d] = f64::from(landed[d]) / f64::from(counts[d]);
        }
    }
    NaiveCumulative { counts, wins, pct, run_server, run_returner }
}

pub fn cumulative_of(f: &FeatureVector) -> NaiveCumulative {
    NaiveCumulative {
        counts: f.counts_by_dir.as_array(),
        wins: f.wins_by_dir.as_array(),
        pct: f.serve_pct_by_dir,
        run_server: f.run_index_server,
        run_returner: f.run_index_returner,
    }
}

pub fn label_of(m: &ReplayedMatch, k: usize) -> ServeDirection {
    m.points[k].first_serve.map_or(ServeDirection::Unknown, |s| s.direction)
}

/// Three noisy clusters; feature `j` is shifted up for class `j % 3`.
pub fn blobs(seed: u64, n: usize, d: usize, spread: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % 3;
        for j in 0..d {
            let centre = if j % 3 == c { 2.0 } else { 0.0 };
            x.push(centre + spread * (rng.gen::<f64>() - 0.5));
        }
        y.push(c);
    }
    let names = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::from_vec(n, d, x), y, 3, names)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

/// Worst relative error between analytic and central-difference gradients over `coords`.
pub fn grad_check(net: &Mlp, data: &Dataset, rows: &[usize], coords: &[usize]) -> f64 {
    let l2 = 1e-3;
    let (_, analytic) = net.loss_and_grad(data, rows, l2);
    let base = net.params_flat();
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    for &i in coords {
        let mut p = base.clone();
        p[i] += eps;
        probe.set_params_flat(&p);
        let up = probe.loss_and_grad(data, rows, l2).0;
        p[i] -= 2.0 * eps;
        probe.set_params_flat(&p);
        let down = probe.loss_and_grad(data, rows, l2).0;
        worst = worst.max(rel_err(analytic[i], (up - down) / (2.0 * eps)));
    }
    worst
}
