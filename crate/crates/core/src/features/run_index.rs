//! Running-distance estimate from charted shot directions and depths.
//!
//! Each half court is split into a 3×3 grid. Coordinates are meters in the
//! player's own half: `x` is the lateral offset from the center line
//! (negative toward that player's deuce side), `y` the distance from the net.
//! A hitter's contact point is the zone the opponent's previous shot was sent
//! to; unknown direction or depth leaves that coordinate where it was.

use crate::mcp_data::{ServeDirection, Shot, ShotDepth, ShotDirection, ShotKind};
use crate::score::Side;

pub const COURT_WIDTH: f64 = 10.97;
pub const HALF_COURT_LENGTH: f64 = 11.89;

const ZONE_WIDTH: f64 = COURT_WIDTH / 3.0;
const ZONE_DEPTH: f64 = HALF_COURT_LENGTH / 3.0;
/// Server stands this far from the center mark.
const SERVE_OFFSET: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lateral {
    DeuceWide,
    Center,
    AdWide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Baseline,
    Midcourt,
    NetZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CourtPosition {
    pub lateral: Lateral,
    pub depth: Depth,
}

impl CourtPosition {
    pub const HOME: CourtPosition = CourtPosition { lateral: Lateral::Center, depth: Depth::Baseline };

    pub fn coordinates(self) -> (f64, f64) {
        (lateral_x(self.lateral), depth_y(self.depth))
    }
}

fn lateral_x(l: Lateral) -> f64 {
    match l {
        Lateral::DeuceWide => -ZONE_WIDTH,
        Lateral::Center => 0.0,
        Lateral::AdWide => ZONE_WIDTH,
    }
}

fn depth_y(d: Depth) -> f64 {
    match d {
        Depth::NetZone => 0.5 * ZONE_DEPTH,
        Depth::Midcourt => 1.5 * ZONE_DEPTH,
        Depth::Baseline => 2.5 * ZONE_DEPTH,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    x: f64,
    y: f64,
}

impl Point {
    fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn side_sign(side: Side) -> f64 {
    match side {
        Side::Deuce => -1.0,
        Side::Ad => 1.0,
    }
}

fn serve_contact(side: Side) -> Point {
    Point { x: side_sign(side) * SERVE_OFFSET, y: HALF_COURT_LENGTH }
}

/// Where the returner waits: midway between the wide and center zones of the served box.
fn reception(side: Side) -> Point {
    Point { x: side_sign(side) * 0.5 * ZONE_WIDTH, y: depth_y(Depth::Baseline) }
}

fn return_contact(side: Side, serve: ServeDirection) -> Point {
    let wait = reception(side);
    let x = match serve {
        ServeDirection::Wide => side_sign(side) * ZONE_WIDTH,
        ServeDirection::T => 0.0,
        ServeDirection::Body | ServeDirection::Unknown => wait.x,
    };
    Point { x, y: wait.y }
}

fn contact_after(prev: Point, incoming: &Shot, own: &Shot) -> Point {
    let x = match incoming.direction {
        ShotDirection::ToDeuceSide => lateral_x(Lateral::DeuceWide),
        ShotDirection::ToMiddle => lateral_x(Lateral::Center),
        ShotDirection::ToAdSide => lateral_x(Lateral::AdWide),
        ShotDirection::Unknown => prev.x,
    };
    let y = match own.kind {
        ShotKind::Volley | ShotKind::Overhead => depth_y(Depth::NetZone),
        ShotKind::HalfVolley => depth_y(Depth::Midcourt),
        _ => match incoming.depth {
            ShotDepth::Shallow => depth_y(Depth::Midcourt),
            ShotDepth::Deep => depth_y(Depth::Baseline),
            ShotDepth::Unknown => prev.y,
        },
    };
    Point { x, y }
}

/// Meters run by server and returner during one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointRun {
    pub server: f64,
    pub returner: f64,
}

#[derive(Default)]
struct Track {
    at: Option<Point>,
    run: f64,
    contacts: usize,
}

impl Track {
    fn move_to(&mut self, p: Point) {
        if let Some(prev) = self.at {
            self.run += prev.dist(p);
        }
        self.at = Some(p);
    }

    /// Adds half the way back to the home zone after the last contact.
    fn finish(self) -> f64 {
        let home = CourtPosition::HOME.coordinates();
        match (self.contacts, self.at) {
            (0, _) | (_, None) => 0.0,
            (_, Some(p)) => self.run + 0.5 * p.dist(Point { x: home.0, y: home.1 }),
        }
    }
}

/// `rally` holds the shots after the serve; the returner hits the even ones.
/// `serve` is the serve that went in, when one did.
pub fn run_index_point(rally: &[Shot], serve: Option<ServeDirection>, side: Side) -> PointRun {
    let Some(serve) = serve else {
        return PointRun::default();
    };
    if rally.is_empty() {
        return PointRun::default();
    }
    let mut server = Track { at: Some(serve_contact(side)), ..Track::default() };
    let mut returner = Track { at: Some(reception(side)), ..Track::default() };
    for (i, shot) in rally.iter().enumerate() {
        let hitter = if i % 2 == 0 { &mut returner } else { &mut server };
        let target = if i == 0 {
            return_contact(side, serve)
        } else {
            contact_after(hitter.at.expect("tracks start placed"), &rally[i - 1], shot)
        };
        hitter.move_to(target);
        hitter.contacts += 1;
    }
    PointRun { server: server.finish(), returner: returner.finish() }
}

/// Sum of a player's per-point runs over `runs`.
pub fn cumulative_run_index<'a>(runs: impl IntoIterator<Item = &'a f64>) -> f64 {
    runs.into_iter().fold(0.0, |acc, r| acc + r)
}
