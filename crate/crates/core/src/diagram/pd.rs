//! Planar-diagram codes: `X[a,b,c,d]` lists arcs counterclockwise from the incoming under-strand.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arc {label} appears {count} times (expected 2)")]
    Multiplicity { label: u64, count: usize },
    #[error("diagram is not a single closed strand ({visited} of {total} crossing passes reached)")]
    Disconnected { visited: usize, total: usize },
    #[error("inconsistent orientation at crossing {0}")]
    Orientation(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PdCode {
    pub crossings: Vec<[u64; 4]>,
}

/// One pass through a crossing along the knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Visit {
    pub crossing: usize,
    /// Position (0..4) at which the strand enters.
    pub enter: usize,
}

impl Visit {
    pub fn exit(&self) -> usize {
        (self.enter + 2) % 4
    }
}

impl PdCode {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    fn ends(&self) -> HashMap<u64, Vec<(usize, usize)>> {
        let mut ends: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
        for (c, x) in self.crossings.iter().enumerate() {
            for (p, &a) in x.iter().enumerate() {
                ends.entry(a).or_default().push((c, p));
            }
        }
        ends
    }

    pub fn validate(&self) -> Result<(), PdError> {
        self.traverse(None).map(|_| ())
    }

    /// Walks the knot once. The walk starts on the pass entering through `start_arc`
    /// (or the smallest arc label) and follows the orientation of the under-strands.
    pub(crate) fn traverse(&self, start_arc: Option<u64>) -> Result<Vec<Visit>, PdError> {
        let n = self.crossings.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        let ends = self.ends();
        let mut labels: Vec<u64> = ends.keys().copied().collect();
        labels.sort_unstable();
        for &l in &labels {
            let count = ends[&l].len();
            if count != 2 {
                return Err(PdError::Multiplicity { label: l, count });
            }
        }
        let other_end = |arc: u64, here: (usize, usize)| -> (usize, usize) {
            let e = &ends[&arc];
            if e[0] == here {
                e[1]
            } else {
                e[0]
            }
        };
        // Orient from crossing 0's incoming under arc.
        let mut walk = Vec::with_capacity(2 * n);
        let mut cur = Visit { crossing: 0, enter: 0 };
        loop {
            if cur.enter == 2 {
                return Err(PdError::Orientation(cur.crossing));
            }
            walk.push(cur);
            if walk.len() > 2 * n {
                return Err(PdError::Disconnected {
                    visited: walk.len(),
                    total: 2 * n,
                });
            }
            let out_pos = cur.exit();
            let arc = self.crossings[cur.crossing][out_pos];
            let (c, p) = other_end(arc, (cur.crossing, out_pos));
            cur = Visit { crossing: c, enter: p };
            if cur == walk[0] {
                break;
            }
        }
        if walk.len() != 2 * n {
            return Err(PdError::Disconnected {
                visited: walk.len(),
                total: 2 * n,
            });
        }
        // Each crossing must be passed once as under (enter 0) and once as over (enter 1 or 3).
        let mut under = vec![0; n];
        let mut over = vec![0; n];
        for v in &walk {
            if v.enter == 0 {
                under[v.crossing] += 1;
            } else {
                over[v.crossing] += 1;
            }
        }
        if let Some(c) = (0..n).find(|&c| under[c] != 1 || over[c] != 1) {
            return Err(PdError::Orientation(c));
        }
        let start = start_arc.unwrap_or(labels[0]);
        let k = walk
            .iter()
            .position(|v| self.crossings[v.crossing][v.enter] == start)
            .unwrap_or(0);
        walk.rotate_left(k);
        Ok(walk)
    }

    /// Sign of each crossing, read from the direction of the over-strand.
    pub fn signs(&self) -> Result<Vec<i32>, PdError> {
        let walk = self.traverse(None)?;
        let mut s = vec![0; self.len()];
        for v in walk {
            match v.enter {
                3 => s[v.crossing] = 1,
                1 => s[v.crossing] = -1,
                _ => {}
            }
        }
        Ok(s)
    }

    /// Number of faces of the planar map given by the cyclic arc orders; `n + 2` iff planar.
    pub(crate) fn face_count(&self) -> usize {
        let ends = self.ends();
        let n = self.len();
        let mut seen = vec![[false; 4]; n];
        let mut faces = 0;
        for c0 in 0..n {
            for p0 in 0..4 {
                if seen[c0][p0] {
                    continue;
                }
                faces += 1;
                let (mut c, mut p) = (c0, p0);
                while !seen[c][p] {
                    seen[c][p] = true;
                    let e = &ends[&self.crossings[c][p]];
                    let (c2, p2) = if e[0] == (c, p) { e[1] } else { e[0] };
                    (c, p) = (c2, (p2 + 1) % 4);
                }
            }
        }
        faces
    }

    /// Mirror image, by reflecting the plane (under-strands stay under).
    pub fn mirror(&self) -> PdCode {
        PdCode {
            crossings: self.crossings.iter().map(|x| [x[0], x[3], x[2], x[1]]).collect(),
        }
    }
}

impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

struct Scanner<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self, commas: bool) {
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_whitespace() || (commas && self.s[self.pos] == b',')) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> PdError {
        PdError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, tok: &[u8]) -> bool {
        if self.s[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &[u8]) -> Result<(), PdError> {
        self.skip_ws(false);
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", String::from_utf8_lossy(tok))))
        }
    }

    fn number(&mut self) -> Result<u64, PdError> {
        self.skip_ws(false);
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a positive integer"));
        }
        let v: u64 = std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer too large"))?;
        if v == 0 {
            return Err(PdError::Syntax {
                pos: start,
                msg: "arc labels are positive".into(),
            });
        }
        Ok(v)
    }
}

/// Parses `X[a,b,c,d] ...` or `PD[X[...], ...]` and validates the result.
pub fn parse_pd(text: &str) -> Result<PdCode, PdError> {
    let mut sc = Scanner { s: text.as_bytes(), pos: 0 };
    sc.skip_ws(false);
    let wrapped = sc.eat(b"PD[");
    let mut crossings = Vec::new();
    loop {
        sc.skip_ws(true);
        if sc.pos >= sc.s.len() {
            if wrapped {
                return Err(sc.err("missing closing ']'"));
            }
            break;
        }
        if wrapped && sc.eat(b"]") {
            sc.skip_ws(false);
            if sc.pos < sc.s.len() {
                return Err(sc.err("trailing input after PD[...]"));
            }
            break;
        }
        if !sc.eat(b"X[") {
            return Err(sc.err("expected 'X['"));
        }
        let mut x = [0u64; 4];
        for (k, slot) in x.iter_mut().enumerate() {
            *slot = sc.number()?;
            if k < 3 {
                sc.expect(b",")?;
            }
        }
        sc.expect(b"]")?;
        crossings.push(x);
    }
    let pd = PdCode { crossings };
    pd.validate()?;
    Ok(pd)
}
