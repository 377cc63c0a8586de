//! Randomized property drivers shared by the CLI and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::{apply_move, enumerate_move_sites, Direction, MoveKind, MoveSpec, UprightDiagram};
use crate::exec::Exec;
use crate::invariant::{green, invariant_pair, InvariantPair};
use crate::traffic::{oracle_matrix, TrafficError};

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub diagram: serde_json::Value,
    pub spec: MoveSpec,
    pub before: Option<String>,
    pub after: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MoveReport {
    pub trials: usize,
    pub forward: usize,
    pub backward: usize,
    pub failures: Vec<Counterexample>,
}

impl MoveReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of one move: `None` when the pair is unchanged.
fn check_move(d: &UprightDiagram, m: &MoveSpec) -> Option<(Option<InvariantPair>, Option<InvariantPair>, String)> {
    let before = invariant_pair(d);
    let out = match apply_move(d, m) {
        Ok(o) => o,
        Err(e) => return Some((before.ok(), None, format!("enumerated move failed: {e}"))),
    };
    let after = invariant_pair(&out);
    match (before, after) {
        (Ok(a), Ok(b)) if a.delta == b.delta && a.rho1 == b.rho1 => None,
        (Ok(a), Ok(b)) => Some((Some(a), Some(b), "invariant changed".into())),
        (a, b) => {
            let why = format!("{:?} / {:?}", a.as_ref().err(), b.as_ref().err());
            Some((a.ok(), b.ok(), format!("computation failed: {why}")))
        }
    }
}

/// Greedily removes kinks and bigons away from the failing site while the failure persists.
fn shrink(mut d: UprightDiagram, m: &MoveSpec) -> UprightDiagram {
    'outer: loop {
        for kind in [MoveKind::R1l, MoveKind::R1r, MoveKind::R2b, MoveKind::R2c] {
            for r in enumerate_move_sites(&d, kind) {
                if r.direction != Direction::Forward || r.site.iter().any(|l| m.site.contains(l)) {
                    continue;
                }
                let Ok(smaller) = apply_move(&d, &r) else { continue };
                if m.site.iter().all(|&l| smaller.index_of(l).is_some()) && check_move(&smaller, m).is_some() {
                    d = smaller;
                    continue 'outer;
                }
            }
        }
        return d;
    }
}

/// `trials` random moves, each on a random corpus diagram, with a random kind and site.
pub fn random_move_trials(corpus: &[UprightDiagram], trials: usize, seed: u64) -> MoveReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MoveReport::default();
    if corpus.is_empty() {
        return report;
    }
    while report.trials < trials {
        let d = corpus.choose(&mut rng).unwrap();
        let kind = *MoveKind::ALL.choose(&mut rng).unwrap();
        let sites = enumerate_move_sites(d, kind);
        // Prefer the rarer forward direction half of the time.
        let want = if rng.gen_bool(0.5) { Direction::Forward } else { Direction::Backward };
        let pool: Vec<&MoveSpec> = sites.iter().filter(|m| m.direction == want).collect();
        let Some(m) = pool.choose(&mut rng).copied().or_else(|| sites.choose(&mut rng)) else {
            continue;
        };
        report.trials += 1;
        match m.direction {
            Direction::Forward => report.forward += 1,
            Direction::Backward => report.backward += 1,
        }
        if let Some((before, after, reason)) = check_move(d, m) {
            let small = shrink(d.clone(), m);
            report.failures.push(Counterexample {
                diagram: small.to_json(),
                spec: m.clone(),
                before: before.map(|p| p.key()),
                after: after.map(|p| p.key()),
                reason,
            });
        }
    }
    report
}

/// Random walks of moves, so that trials also start from diagrams that are not table entries.
pub fn scrambled_corpus(base: &[UprightDiagram], steps: usize, max_crossings: usize, seed: u64) -> Vec<UprightDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    base.iter()
        .map(|d| {
            let mut d = d.clone();
            for _ in 0..steps {
                let kind = *MoveKind::ALL.choose(&mut rng).unwrap();
                let sites: Vec<MoveSpec> = enumerate_move_sites(&d, kind)
                    .into_iter()
                    .filter(|m| m.direction == Direction::Forward || d.num_crossings() + 2 <= max_crossings)
                    .collect();
                if let Some(m) = sites.choose(&mut rng) {
                    d = apply_move(&d, m).expect("enumerated move applies").relabeled_consecutive();
                }
            }
            d
        })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub comparisons: usize,
    pub skipped: usize,
    pub max_error: f64,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the traffic path sums with the exact Green function for every index pair.
/// Values of `T0` that fail the contraction test are skipped and counted; a path sum that diverges
/// anyway is a failure.
pub fn oracle_sweep(diagrams: &[UprightDiagram], t0s: &[f64], depth: usize, tol: f64, exec: Exec) -> OracleReport {
    let jobs: Vec<(usize, f64)> = (0..diagrams.len()).flat_map(|k| t0s.iter().map(move |&t| (k, t))).collect();
    let parts = exec.map(&jobs, |&(k, t0)| {
        let d = &diagrams[k];
        let mut r = OracleReport::default();
        let sums = match oracle_matrix(d, t0, depth) {
            Ok(s) => s,
            Err(TrafficError::Divergent(_)) => {
                r.skipped += 1;
                return r;
            }
            Err(e) => {
                r.failures.push(format!("diagram {k}: {e}"));
                return r;
            }
        };
        let g = match green(d) {
            Ok(g) => g,
            Err(e) => {
                r.failures.push(format!("diagram {k}: {e}"));
                return r;
            }
        };
        for (a, row) in sums.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let err = (v - g.eval_f64(a, b, t0)).abs();
                r.comparisons += 1;
                r.max_error = r.max_error.max(err);
                if !(err < tol) {
                    r.failures.push(format!("diagram {k}, T0 = {t0}, g({a},{b}): error {err:e}"));
                }
            }
        }
        r
    });
    parts.into_iter().fold(OracleReport::default(), |mut acc, r| {
        acc.comparisons += r.comparisons;
        acc.skipped += r.skipped;
        acc.max_error = acc.max_error.max(r.max_error);
        acc.failures.extend(r.failures);
        acc
    })
}
