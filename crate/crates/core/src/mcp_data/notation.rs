//! Tokenizer for the shot-by-shot charting notation.
//!
//! A charted serve column looks like `4f1b3*` or `c6n`: optional let markers
//! (`c`), a placement digit, an optional fault letter, an optional terminal,
//! and then the rally. Rally shots are a shot letter followed by an optional
//! direction digit and an optional depth digit; the last shot may carry an
//! error location and an outcome symbol.
//!
//! Direction digits describe the receiving half of the court: `1` is the
//! receiver's deuce side, `2` the middle, `3` the receiver's ad side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty serve token")]
    Empty,
    #[error("illegal serve token {token:?}: {reason}")]
    IllegalServe { token: String, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ServeDirection {
    Wide,
    Body,
    T,
    Unknown,
}

impl ServeDirection {
    pub const KNOWN: [ServeDirection; 3] = [ServeDirection::Wide, ServeDirection::Body, ServeDirection::T];

    /// Class index in label encoding order (Wide < Body < T).
    pub fn class_index(self) -> Option<usize> {
        match self {
            ServeDirection::Wide => Some(0),
            ServeDirection::Body => Some(1),
            ServeDirection::T => Some(2),
            ServeDirection::Unknown => None,
        }
    }

    pub fn from_class_index(idx: usize) -> ServeDirection {
        match idx {
            0 => ServeDirection::Wide,
            1 => ServeDirection::Body,
            2 => ServeDirection::T,
            _ => ServeDirection::Unknown,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ServeDirection::Wide => "Wide",
            ServeDirection::Body => "Body",
            ServeDirection::T => "T",
            ServeDirection::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ServeFault {
    In,
    Net,
    Wide,
    Deep,
    WideAndDeep,
    FootFault,
    Unknown,
}

impl ServeFault {
    pub fn is_in(self) -> bool {
        self == ServeFault::In
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ServePlacement {
    pub direction: ServeDirection,
    pub fault: ServeFault,
    pub is_ace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShotKind {
    Forehand,
    Backhand,
    ForehandSlice,
    BackhandSlice,
    Volley,
    Overhead,
    DropShot,
    Lob,
    HalfVolley,
    Trick,
    Unknown,
}

impl ShotKind {
    fn from_letter(c: char) -> Option<ShotKind> {
        Some(match c {
            'f' => ShotKind::Forehand,
            'b' => ShotKind::Backhand,
            'r' => ShotKind::ForehandSlice,
            's' => ShotKind::BackhandSlice,
            // plain and swinging volleys on both wings
            'v' | 'z' | 'j' | 'k' => ShotKind::Volley,
            'o' | 'p' => ShotKind::Overhead,
            'u' | 'y' => ShotKind::DropShot,
            'l' | 'm' => ShotKind::Lob,
            'h' | 'i' => ShotKind::HalfVolley,
            't' => ShotKind::Trick,
            'q' => ShotKind::Unknown,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShotDirection {
    ToDeuceSide,
    ToMiddle,
    ToAdSide,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShotDepth {
    Shallow,
    Deep,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    None,
    Winner,
    ForcedErrorInduced,
    UnforcedError,
    NetError,
    WideError,
    DeepError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shot {
    pub kind: ShotKind,
    pub direction: ShotDirection,
    pub depth: ShotDepth,
    pub terminal: Terminal,
}

impl Shot {
    pub const UNKNOWN: Shot = Shot {
        kind: ShotKind::Unknown,
        direction: ShotDirection::Unknown,
        depth: ShotDepth::Unknown,
        terminal: Terminal::None,
    };

    fn of_kind(kind: ShotKind) -> Shot {
        Shot { kind, ..Shot::UNKNOWN }
    }
}

/// Shots of one rally plus a count of characters the grammar did not cover.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RallyParse {
    pub shots: Vec<Shot>,
    pub unrecognized: usize,
}

fn placement(c: char) -> Option<ServeDirection> {
    match c {
        '4' => Some(ServeDirection::Wide),
        '5' => Some(ServeDirection::Body),
        '6' => Some(ServeDirection::T),
        '0' => Some(ServeDirection::Unknown),
        _ => None,
    }
}

fn fault_letter(c: char) -> Option<ServeFault> {
    match c {
        'n' => Some(ServeFault::Net),
        'w' => Some(ServeFault::Wide),
        'd' => Some(ServeFault::Deep),
        'x' => Some(ServeFault::WideAndDeep),
        'g' => Some(ServeFault::FootFault),
        'e' => Some(ServeFault::Unknown),
        _ => None,
    }
}

/// Parses a bare serve token: placement digit, optional fault, optional `*`/`#`.
pub fn parse_serve(token: &str) -> Result<ServePlacement, ParseError> {
    let illegal = |reason| ParseError::IllegalServe { token: token.to_string(), reason };
    let mut chars = token.chars();
    let first = chars.next().ok_or(ParseError::Empty)?;
    let direction = placement(first).ok_or_else(|| illegal("leading character is not a placement digit"))?;
    let mut fault = ServeFault::In;
    let mut is_ace = false;
    let mut rest = chars.peekable();
    if let Some(f) = rest.peek().copied().and_then(fault_letter) {
        fault = f;
        rest.next();
    }
    match rest.next() {
        None => {}
        Some('*') => is_ace = fault.is_in(),
        Some('#') => {}
        Some(_) => return Err(illegal("unexpected character after placement")),
    }
    if rest.next().is_some() {
        return Err(illegal("trailing characters"));
    }
    Ok(ServePlacement { direction, fault, is_ace })
}

/// Splits a charted serve column into its serve token and the rally that follows.
///
/// Leading let markers and a serve-and-volley `+` are dropped.
pub fn split_serve_column(raw: &str) -> Result<(String, &str), ParseError> {
    let trimmed = raw.trim().trim_start_matches('c');
    if trimmed.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut serve = String::with_capacity(3);
    let mut end = 0;
    for (i, c) in trimmed.char_indices() {
        let accept = match serve.len() {
            0 => placement(c).is_some(),
            _ if c == '+' => {
                end = i + 1;
                continue;
            }
            1 => fault_letter(c).is_some() || c == '*' || c == '#',
            2 => (c == '*' || c == '#') && !serve.ends_with(['*', '#']),
            _ => false,
        };
        if !accept {
            if serve.is_empty() {
                return Err(ParseError::IllegalServe {
                    token: raw.to_string(),
                    reason: "leading character is not a placement digit",
                });
            }
            break;
        }
        serve.push(c);
        end = i + c.len_utf8();
    }
    Ok((serve, &trimmed[end..]))
}

/// Position and annotation marks that carry no shot information here.
fn ignorable(c: char) -> bool {
    matches!(c, '+' | '-' | '=' | ';' | '^' | '!' | '0' | 'c' | 'C') || c.is_whitespace()
}

pub fn parse_rally(token: &str) -> Vec<Shot> {
    parse_rally_detailed(token).shots
}

/// Parses the rally that follows a serve; unknown characters become all-Unknown shots.
pub fn parse_rally_detailed(token: &str) -> RallyParse {
    let mut out = RallyParse::default();
    for c in token.chars() {
        if let Some(kind) = ShotKind::from_letter(c) {
            if let Some(prev) = out.shots.last_mut() {
                if prev.terminal != Terminal::None {
                    // a terminal mark followed by more play is charting noise
                    prev.terminal = Terminal::None;
                    out.unrecognized += 1;
                }
            }
            out.shots.push(Shot::of_kind(kind));
            continue;
        }
        if ignorable(c) {
            continue;
        }
        let Some(shot) = out.shots.last_mut() else {
            out.unrecognized += 1;
            out.shots.push(Shot::UNKNOWN);
            continue;
        };
        let handled = match c {
            '1' | '2' | '3' if shot.direction == ShotDirection::Unknown && shot.depth == ShotDepth::Unknown => {
                shot.direction = match c {
                    '1' => ShotDirection::ToDeuceSide,
                    '2' => ShotDirection::ToMiddle,
                    _ => ShotDirection::ToAdSide,
                };
                true
            }
            '7' => set_depth(shot, ShotDepth::Shallow),
            '8' => set_depth(shot, ShotDepth::Deep),
            '9' => set_depth(shot, ShotDepth::Unknown),
            'n' => set_location(shot, Terminal::NetError),
            'w' => set_location(shot, Terminal::WideError),
            'd' | 'x' => set_location(shot, Terminal::DeepError),
            '*' => set_outcome(shot, Terminal::Winner),
            '#' => set_outcome(shot, Terminal::ForcedErrorInduced),
            '@' => set_outcome(shot, Terminal::UnforcedError),
            _ => false,
        };
        if !handled {
            out.unrecognized += 1;
            out.shots.push(Shot::UNKNOWN);
        }
    }
    out
}

fn set_depth(shot: &mut Shot, depth: ShotDepth) -> bool {
    if shot.terminal != Terminal::None {
        return false;
    }
    shot.depth = depth;
    true
}

fn set_location(shot: &mut Shot, location: Terminal) -> bool {
    if shot.terminal != Terminal::None {
        return false;
    }
    shot.terminal = location;
    true
}

fn set_outcome(shot: &mut Shot, outcome: Terminal) -> bool {
    match shot.terminal {
        Terminal::None | Terminal::NetError | Terminal::WideError | Terminal::DeepError => {
            shot.terminal = outcome;
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serve_examples() {
        assert_eq!(
            parse_serve("4").unwrap(),
            ServePlacement { direction: ServeDirection::Wide, fault: ServeFault::In, is_ace: false }
        );
        assert_eq!(
            parse_serve("6n").unwrap(),
            ServePlacement { direction: ServeDirection::T, fault: ServeFault::Net, is_ace: false }
        );
        assert_eq!(
            parse_serve("5w").unwrap(),
            ServePlacement { direction: ServeDirection::Body, fault: ServeFault::Wide, is_ace: false }
        );
        assert!(parse_serve("4*").unwrap().is_ace);
        assert!(!parse_serve("4n*").unwrap().is_ace);
    }

    #[test]
    fn serve_errors_carry_token() {
        assert_eq!(parse_serve(""), Err(ParseError::Empty));
        match parse_serve("f1") {
            Err(ParseError::IllegalServe { token, .. }) => assert_eq!(token, "f1"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_serve("4nn").is_err());
        assert!(parse_serve("4**").is_err());
    }

    #[test]
    fn split_column() {
        assert_eq!(split_serve_column("4f1b3*").unwrap(), ("4".to_string(), "f1b3*"));
        assert_eq!(split_serve_column("c6n").unwrap(), ("6n".to_string(), ""));
        assert_eq!(split_serve_column("5*").unwrap(), ("5*".to_string(), ""));
        assert_eq!(split_serve_column("4+v1*").unwrap(), ("4".to_string(), "v1*"));
        assert!(split_serve_column("").is_err());
        assert!(split_serve_column("f1").is_err());
    }

    #[test]
    fn rally_examples() {
        assert!(parse_rally("").is_empty());
        let shots = parse_rally("f1");
        assert_eq!(shots.len(), 1);
        assert_eq!(shots[0].kind, ShotKind::Forehand);
        assert_eq!(shots[0].direction, ShotDirection::ToDeuceSide);
        assert_eq!(shots[0].depth, ShotDepth::Unknown);
        assert_eq!(shots[0].terminal, Terminal::None);
        let shots = parse_rally("f3*");
        assert_eq!(shots.len(), 1);
        assert_eq!(shots[0].terminal, Terminal::Winner);
    }

    #[test]
    fn error_location_then_outcome() {
        let shots = parse_rally("f18b2n@");
        assert_eq!(shots.len(), 2);
        assert_eq!(shots[0].depth, ShotDepth::Deep);
        assert_eq!(shots[1].terminal, Terminal::UnforcedError);
        let shots = parse_rally("b3w");
        assert_eq!(shots[0].terminal, Terminal::WideError);
    }

    #[test]
    fn garbage_degrades_to_unknown() {
        let parsed = parse_rally_detailed("f1Zb2");
        assert_eq!(parsed.shots.len(), 3);
        assert_eq!(parsed.shots[1], Shot::UNKNOWN);
        assert_eq!(parsed.unrecognized, 1);
    }

    #[test]
    fn mid_rally_terminal_is_cleared() {
        let parsed = parse_rally_detailed("f1*b2");
        assert_eq!(parsed.shots[0].terminal, Terminal::None);
        assert_eq!(parsed.unrecognized, 1);
    }
}
