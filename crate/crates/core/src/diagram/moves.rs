//! Upright Reidemeister moves.
//!
//! Forward removes crossings (R1, R2), rewrites the left R3 pattern into the right one, or swirls a
//! crossing once; backward is the inverse. Patterns in edge labels, with `x+` the successor:
//!
//! | move | left (forward input)                                    | right |
//! |------|---------------------------------------------------------|-------|
//! | R1l  | `(+1, i+, i)`, `phi(i+) = 1`                            | one edge |
//! | R1r  | `(+1, i, i+)`, `phi(i+) = -1`                           | one edge |
//! | R2b  | `(s, i, j)`, `(-s, i+, j+)`, `phi(i+) = phi(j+) = 0`    | two edges |
//! | R2c  | `(-1, i, j+)`, `(+1, i+, j)`, `phi(i+) = 0, phi(j+) = 1` | two edges |
//! | R3   | `(+1, j, k)`, `(+1, i, k+)`, `(+1, i+, j+)`             | `(+1, i, j)`, `(+1, i+, k)`, `(+1, j+, k+)` |
//! | Sw   | crossing `(s, i, j)`                                    | same, `phi` of `i, j` up by one and of `i+, j+` down by one |
//!
//! Removed edges merge into the edge before them, summing rotation numbers (the kink loop's own
//! rotation is dropped). Inserted edges get fresh labels between existing ones.
//! Every move also has to be local: the edges inside the pattern must bound a single face, and the
//! result must still be drawable.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::embedding::{faces, is_realizable};
use super::{Crossing, DiagramError, UprightDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1l,
    R1r,
    R2b,
    R2c,
    R3,
    SwPlus,
    SwMinus,
}

impl MoveKind {
    pub const ALL: [MoveKind; 7] = [
        MoveKind::R1l,
        MoveKind::R1r,
        MoveKind::R2b,
        MoveKind::R2c,
        MoveKind::R3,
        MoveKind::SwPlus,
        MoveKind::SwMinus,
    ];
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::R1l => "R1l",
            MoveKind::R1r => "R1r",
            MoveKind::R2b => "R2b",
            MoveKind::R2c => "R2c",
            MoveKind::R3 => "R3",
            MoveKind::SwPlus => "Sw+",
            MoveKind::SwMinus => "Sw-",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// A move at a site. For R2b, `sign` is the sign of the first crossing; it is ignored elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSpec {
    pub kind: MoveKind,
    pub direction: Direction,
    pub site: Vec<i64>,
    pub sign: i32,
}

impl MoveSpec {
    pub fn new(kind: MoveKind, direction: Direction, site: Vec<i64>) -> Self {
        Self {
            kind,
            direction,
            site,
            sign: 1,
        }
    }

    pub fn with_sign(mut self, sign: i32) -> Self {
        self.sign = sign;
        self
    }
}

impl fmt::Display for MoveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        };
        write!(f, "{} {dir} at {:?}", self.kind, self.site)?;
        if self.kind == MoveKind::R2b {
            write!(f, " sign {}", self.sign)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{spec} does not apply: {reason}")]
    Inapplicable { spec: String, reason: String },
    #[error("move produced an invalid diagram: {0}")]
    Invalid(#[from] DiagramError),
}

fn fail<T>(m: &MoveSpec, reason: impl Into<String>) -> Result<T, MoveError> {
    Err(MoveError::Inapplicable {
        spec: m.to_string(),
        reason: reason.into(),
    })
}

/// Mutable working copy with label bookkeeping.
struct Work {
    edges: Vec<i64>,
    crossings: Vec<Crossing>,
    rotations: BTreeMap<i64, i64>,
}

impl Work {
    fn from(d: &UprightDiagram) -> Self {
        Self {
            edges: d.edges().to_vec(),
            crossings: d.crossings().to_vec(),
            rotations: d.rotations().clone(),
        }
    }

    fn finish(self) -> Result<UprightDiagram, MoveError> {
        Ok(UprightDiagram::new(self.edges, self.crossings, self.rotations)?)
    }

    fn relabel(&mut self, f: impl Fn(usize, i64) -> i64) {
        let map: HashMap<i64, i64> = self.edges.iter().enumerate().map(|(k, &l)| (l, f(k, l))).collect();
        self.edges = self.edges.iter().map(|l| map[l]).collect();
        for c in &mut self.crossings {
            c.i = map[&c.i];
            c.j = map[&c.j];
        }
        self.rotations = self.rotations.iter().map(|(k, v)| (map[k], *v)).collect();
    }

    fn gap_after(&self, label: i64) -> i64 {
        let k = self.edges.binary_search(&label).unwrap();
        self.edges.get(k + 1).map_or(i64::MAX, |n| n - label)
    }

    /// Splits each target edge into three pieces `[a, a1, a2]`. The crossing that `a` entered is
    /// now entered by `a2`; `a` keeps its rotation number and the new pieces start at 0.
    /// Returns the new labels in the order of `targets`, which are given by their current labels.
    fn split(&mut self, targets: &[i64]) -> Vec<[i64; 3]> {
        let mut targets = targets.to_vec();
        if self.edges.last().is_some_and(|&l| l > 1 << 40) {
            let old = self.edges.clone();
            self.relabel(|k, _| k as i64 + 1);
            for t in &mut targets {
                *t = old.binary_search(t).unwrap() as i64 + 1;
            }
        }
        while targets.iter().any(|&t| self.gap_after(t) < 3) {
            self.relabel(|_, l| 2 * l);
            for t in &mut targets {
                *t *= 2;
            }
        }
        let mut out = Vec::with_capacity(targets.len());
        let mut redirect = HashMap::new();
        for &a in &targets {
            let gap = self.gap_after(a);
            let (a1, a2) = if gap == i64::MAX { (a + 1, a + 2) } else { (a + gap / 3, a + 2 * gap / 3) };
            out.push([a, a1, a2]);
            redirect.insert(a, a2);
        }
        for c in &mut self.crossings {
            if let Some(&n) = redirect.get(&c.i) {
                c.i = n;
            }
            if let Some(&n) = redirect.get(&c.j) {
                c.j = n;
            }
        }
        for p in &out {
            self.edges.extend_from_slice(&p[1..]);
        }
        self.edges.sort_unstable();
        out
    }

    /// Removes the given crossings. Each maximal run of edges entering removed crossings merges
    /// with the edge after it under the run's first label, summing rotation numbers.
    fn remove(&mut self, remove: &[usize], drop_rotation: &[i64]) {
        for l in drop_rotation {
            self.rotations.remove(l);
        }
        let mut marked = HashSet::new();
        for &k in remove {
            marked.insert(self.crossings[k].i);
            marked.insert(self.crossings[k].j);
        }
        let mut map = HashMap::new();
        let mut new_edges = Vec::new();
        let mut new_rot = BTreeMap::new();
        let mut group: Option<i64> = None;
        for &e in &self.edges {
            let head = *group.get_or_insert(e);
            if head == e {
                new_edges.push(e);
            }
            map.insert(e, head);
            let r = self.rotations.get(&e).copied().unwrap_or(0);
            *new_rot.entry(head).or_insert(0) += r;
            if !marked.contains(&e) {
                group = None;
            }
        }
        let removed: HashSet<usize> = remove.iter().copied().collect();
        self.crossings = self
            .crossings
            .iter()
            .enumerate()
            .filter(|(k, _)| !removed.contains(k))
            .map(|(_, c)| Crossing::new(c.s, map[&c.i], map[&c.j]))
            .collect();
        new_rot.retain(|_, v| *v != 0);
        self.edges = new_edges;
        self.rotations = new_rot;
    }

    fn find(&self, c: Crossing) -> Option<usize> {
        self.crossings.iter().position(|x| *x == c)
    }
}

fn has_face(d: &UprightDiagram, edges: &[i64]) -> bool {
    let want: HashSet<i64> = edges.iter().copied().collect();
    faces(d).is_ok_and(|fs| {
        fs.iter()
            .any(|f| f.edges.len() == edges.len() && f.edges.iter().copied().collect::<HashSet<_>>() == want)
    })
}

fn succ(d: &UprightDiagram, m: &MoveSpec, l: i64) -> Result<i64, MoveError> {
    match d.succ(l) {
        Some(s) => Ok(s),
        None => fail(m, format!("edge {l} has no successor")),
    }
}

fn site<const N: usize>(m: &MoveSpec) -> Result<[i64; N], MoveError> {
    match <[i64; N]>::try_from(m.site.as_slice()) {
        Ok(s) => Ok(s),
        Err(_) => fail(m, format!("site needs {N} labels")),
    }
}

fn need(m: &MoveSpec, ok: bool, reason: &str) -> Result<(), MoveError> {
    if ok {
        Ok(())
    } else {
        fail(m, reason)
    }
}

/// Applies a move; the result is validated and, for drawable input, checked to be drawable.
pub fn apply_move(d: &UprightDiagram, m: &MoveSpec) -> Result<UprightDiagram, MoveError> {
    let planar = is_realizable(d);
    for &l in &m.site {
        need(m, d.index_of(l).is_some(), "site label is not an edge")?;
    }
    let out = match (m.kind, m.direction) {
        (MoveKind::R1l | MoveKind::R1r, Direction::Forward) => {
            let [i] = site::<1>(m)?;
            let ip = succ(d, m, i)?;
            let (c, phi) = if m.kind == MoveKind::R1l {
                (Crossing::new(1, ip, i), 1)
            } else {
                (Crossing::new(1, i, ip), -1)
            };
            let mut w = Work::from(d);
            let Some(k) = w.find(c) else { return fail(m, "no kink crossing at this edge") };
            need(m, d.rotation(ip) == phi, "loop has the wrong rotation number")?;
            need(m, !planar || has_face(d, &[ip]), "loop does not bound a monogon")?;
            w.remove(&[k], &[ip]);
            w.finish()?
        }
        (MoveKind::R1l | MoveKind::R1r, Direction::Backward) => {
            let [a] = site::<1>(m)?;
            let mut w = Work::from(d);
            let [[a, a1, _]] = <[[i64; 3]; 1]>::try_from(w.split(&[a])).unwrap();
            let (c, phi) = if m.kind == MoveKind::R1l {
                (Crossing::new(1, a1, a), 1)
            } else {
                (Crossing::new(1, a, a1), -1)
            };
            w.crossings.push(c);
            w.rotations.insert(a1, phi);
            let out = w.finish()?;
            need(m, !planar || has_face(&out, &[a1]), "kink would not bound a monogon")?;
            out
        }
        (MoveKind::R2b | MoveKind::R2c, Direction::Forward) => {
            let [i, j] = site::<2>(m)?;
            let (ip, jp) = (succ(d, m, i)?, succ(d, m, j)?);
            let (c1, c2, phi_j) = if m.kind == MoveKind::R2b {
                need(m, m.sign == 1 || m.sign == -1, "sign must be +1 or -1")?;
                (Crossing::new(m.sign, i, j), Crossing::new(-m.sign, ip, jp), 0)
            } else {
                (Crossing::new(-1, i, jp), Crossing::new(1, ip, j), 1)
            };
            let mut w = Work::from(d);
            let (Some(k1), Some(k2)) = (w.find(c1), w.find(c2)) else {
                return fail(m, "crossing pattern not present");
            };
            need(m, d.rotation(ip) == 0 && d.rotation(jp) == phi_j, "inner edges have the wrong rotation numbers")?;
            need(m, !planar || has_face(d, &[ip, jp]), "inner edges do not bound a bigon")?;
            w.remove(&[k1, k2], &[]);
            w.finish()?
        }
        (MoveKind::R2b | MoveKind::R2c, Direction::Backward) => {
            let [a, b] = site::<2>(m)?;
            need(m, a != b, "R2 needs two different edges")?;
            let mut w = Work::from(d);
            let p = w.split(&[a, b]);
            let ([a, a1, _], [b, b1, _]) = (p[0], p[1]);
            if m.kind == MoveKind::R2b {
                need(m, m.sign == 1 || m.sign == -1, "sign must be +1 or -1")?;
                w.crossings.push(Crossing::new(m.sign, a, b));
                w.crossings.push(Crossing::new(-m.sign, a1, b1));
            } else {
                w.crossings.push(Crossing::new(-1, a, b1));
                w.crossings.push(Crossing::new(1, a1, b));
                let pb = w.rotations.get(&b).copied().unwrap_or(0);
                w.rotations.insert(b, pb - 1);
                w.rotations.insert(b1, 1);
                w.rotations.retain(|_, v| *v != 0);
            }
            let out = w.finish()?;
            need(m, !planar || has_face(&out, &[a1, b1]), "new crossings would not bound a bigon")?;
            out
        }
        (MoveKind::R3, dir) => {
            let [i, j, k] = site::<3>(m)?;
            let (ip, jp, kp) = (succ(d, m, i)?, succ(d, m, j)?, succ(d, m, k)?);
            let labels: HashSet<i64> = [i, j, k, ip, jp, kp].into_iter().collect();
            need(m, labels.len() == 6, "R3 needs six distinct edges")?;
            let left = [Crossing::new(1, j, k), Crossing::new(1, i, kp), Crossing::new(1, ip, jp)];
            let right = [Crossing::new(1, i, j), Crossing::new(1, ip, k), Crossing::new(1, jp, kp)];
            let (from, to) = if dir == Direction::Forward { (left, right) } else { (right, left) };
            let mut w = Work::from(d);
            let mut slots = Vec::new();
            for c in from {
                match w.find(c) {
                    Some(s) => slots.push(s),
                    None => return fail(m, "crossing pattern not present"),
                }
            }
            need(m, [ip, jp, kp].iter().all(|&l| d.rotation(l) == 0), "inner edges must have rotation 0")?;
            need(m, !planar || has_face(d, &[ip, jp, kp]), "inner edges do not bound a triangle")?;
            for (s, c) in slots.into_iter().zip(to) {
                w.crossings[s] = c;
            }
            w.finish()?
        }
        (MoveKind::SwPlus | MoveKind::SwMinus, dir) => {
            let [i, j] = site::<2>(m)?;
            let s = if m.kind == MoveKind::SwPlus { 1 } else { -1 };
            let mut w = Work::from(d);
            need(m, w.find(Crossing::new(s, i, j)).is_some(), "no crossing with this sign and strands")?;
            let eps = if dir == Direction::Forward { 1 } else { -1 };
            let (ip, jp) = (succ(d, m, i)?, succ(d, m, j)?);
            for (l, delta) in [(i, eps), (j, eps), (ip, -eps), (jp, -eps)] {
                *w.rotations.entry(l).or_insert(0) += delta;
            }
            w.rotations.retain(|_, v| *v != 0);
            w.finish()?
        }
    };
    if planar && !is_realizable(&out) {
        return fail(m, "result is not drawable with these rotation numbers");
    }
    Ok(out)
}

/// All applicable sites of one kind, in both directions. For drawable diagrams every returned
/// move succeeds; for others only the crossing patterns are matched.
pub fn enumerate_move_sites(d: &UprightDiagram, kind: MoveKind) -> Vec<MoveSpec> {
    let mut cands = Vec::new();
    let edges = d.edges();
    let set: HashSet<Crossing> = d.crossings().iter().copied().collect();
    let s = |l: i64| d.succ(l);
    use Direction::*;
    match kind {
        MoveKind::R1l | MoveKind::R1r => {
            for &e in edges {
                cands.push(MoveSpec::new(kind, Backward, vec![e]));
                if let Some(ep) = s(e) {
                    let c = if kind == MoveKind::R1l { Crossing::new(1, ep, e) } else { Crossing::new(1, e, ep) };
                    if set.contains(&c) {
                        cands.push(MoveSpec::new(kind, Forward, vec![e]));
                    }
                }
            }
        }
        MoveKind::R2b | MoveKind::R2c => {
            for c in d.crossings() {
                let (Some(ip), Some(jp)) = (s(c.i), s(c.j)) else { continue };
                if kind == MoveKind::R2b && set.contains(&Crossing::new(-c.s, ip, jp)) {
                    cands.push(MoveSpec::new(kind, Forward, vec![c.i, c.j]).with_sign(c.s));
                }
                // Here c plays (-1, i, j+).
                if kind == MoveKind::R2c && c.s == -1 {
                    if let Some(j) = d.pred(c.j) {
                        if set.contains(&Crossing::new(1, ip, j)) {
                            cands.push(MoveSpec::new(kind, Forward, vec![c.i, j]));
                        }
                    }
                }
            }
            for &a in edges {
                for &b in edges {
                    if a == b {
                        continue;
                    }
                    if kind == MoveKind::R2b {
                        for sign in [1, -1] {
                            cands.push(MoveSpec::new(kind, Backward, vec![a, b]).with_sign(sign));
                        }
                    } else {
                        cands.push(MoveSpec::new(kind, Backward, vec![a, b]));
                    }
                }
            }
        }
        MoveKind::R3 => {
            let over: HashMap<i64, Crossing> = d.crossings().iter().filter(|c| c.s == 1).map(|c| (c.i, *c)).collect();
            let under: HashMap<i64, Crossing> = d.crossings().iter().filter(|c| c.s == 1).map(|c| (c.j, *c)).collect();
            for c in d.crossings().iter().filter(|c| c.s == 1) {
                // Left pattern with c = (+1, j, k).
                let (j, k) = (c.i, c.j);
                if let (Some(kp), Some(jp)) = (s(k), s(j)) {
                    if let Some(x) = under.get(&kp) {
                        let i = x.i;
                        if s(i).is_some_and(|ip| set.contains(&Crossing::new(1, ip, jp))) {
                            cands.push(MoveSpec::new(kind, Forward, vec![i, j, k]));
                        }
                    }
                }
                // Right pattern with c = (+1, i, j).
                let (i, j) = (c.i, c.j);
                if let (Some(ip), Some(jp)) = (s(i), s(j)) {
                    if let Some(x) = over.get(&ip) {
                        let k = x.j;
                        if s(k).is_some_and(|kp| set.contains(&Crossing::new(1, jp, kp))) {
                            cands.push(MoveSpec::new(kind, Backward, vec![i, j, k]));
                        }
                    }
                }
            }
        }
        MoveKind::SwPlus | MoveKind::SwMinus => {
            let sign = if kind == MoveKind::SwPlus { 1 } else { -1 };
            for c in d.crossings().iter().filter(|c| c.s == sign) {
                for dir in [Forward, Backward] {
                    cands.push(MoveSpec::new(kind, dir, vec![c.i, c.j]));
                }
            }
        }
    }
    cands.sort_by(|a, b| (a.direction, &a.site, a.sign).cmp(&(b.direction, &b.site, b.sign)));
    cands.dedup();
    cands.retain(|m| apply_move(d, m).is_ok());
    cands
}
