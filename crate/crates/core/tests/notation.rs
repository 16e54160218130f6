mod common;

use serve_predict::mcp_data::{parse_rally_detailed, parse_serve, ServeDirection, ServeFault};

const ALPHABET: &[char] = &['0', '4', '5', '6', 'n', 'w', 'd', 'x', 'g', 'e', '*', '#', '1', 'f', '+', 'c'];

/// Independent statement of the serve grammar: `[0456][nwdxge]?[*#]?`.
fn accepted(token: &[char]) -> bool {
    let mut i = 0;
    if !matches!(token.first(), Some('0' | '4' | '5' | '6')) {
        return false;
    }
    i += 1;
    if matches!(token.get(i), Some('n' | 'w' | 'd' | 'x' | 'g' | 'e')) {
        i += 1;
    }
    if matches!(token.get(i), Some('*' | '#')) {
        i += 1;
    }
    i == token.len()
}

fn enumerate(max_len: usize, mut f: impl FnMut(&[char])) {
    let mut buf = Vec::with_capacity(max_len);
    fn go(buf: &mut Vec<char>, left: usize, f: &mut dyn FnMut(&[char])) {
        f(buf);
        if left == 0 {
            return;
        }
        for &c in ALPHABET {
            buf.push(c);
            go(buf, left - 1, f);
            buf.pop();
        }
    }
    go(&mut buf, max_len, &mut f);
}

#[test]
fn golden_corpus_matches() {
    let cases = common::golden_cases();
    assert!(cases.len() >= 50, "only {} golden cases", cases.len());
    let mut failures = Vec::new();
    for c in &cases {
        let got = common::render(c);
        if got != c.expected {
            failures.push(format!("{} {:?}: expected {:?}, got {:?}", c.kind, c.input, c.expected, got));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn serve_parser_is_total_and_exact() {
    let mut n = 0;
    enumerate(4, |tok| {
        n += 1;
        let s: String = tok.iter().collect();
        let got = parse_serve(&s);
        assert_eq!(got.is_ok(), accepted(tok), "{s:?}");
        if let Ok(p) = got {
            let dir = match tok[0] {
                '4' => ServeDirection::Wide,
                '5' => ServeDirection::Body,
                '6' => ServeDirection::T,
                _ => ServeDirection::Unknown,
            };
            assert_eq!(p.direction, dir);
            let faulted = tok.get(1).is_some_and(|c| "nwdxge".contains(*c));
            assert_eq!(p.fault != ServeFault::In, faulted, "{s:?}");
            assert_eq!(p.is_ace, !faulted && tok.last() == Some(&'*'), "{s:?}");
        }
    });
    assert_eq!(n, (0..=4).map(|k| ALPHABET.len().pow(k)).sum::<usize>());
}

#[test]
fn rally_parser_never_drops_characters_silently() {
    // every shot letter yields a shot; anything else is either absorbed or counted
    enumerate(3, |tok| {
        let s: String = tok.iter().collect();
        let p = parse_rally_detailed(&s);
        let letters = tok.iter().filter(|c| **c == 'f').count();
        assert!(p.shots.len() >= letters, "{s:?}");
        assert!(p.shots.len() <= tok.len());
    });
}
