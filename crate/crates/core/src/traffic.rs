//! Car-traffic reading of the Green function, used as a floating-point oracle.
//!
//! A unit of cars is injected on edge `alpha`. At each step all cars advance to the next edge:
//! arriving over a crossing they keep going with weight `T^s` and drop to the lower strand with
//! weight `1 - T^s`; arriving under a crossing they pass through. Cars on the last edge leave.
//! The counter on edge `beta` sums the flux that ever travels along `beta`, so it converges to
//! `g(alpha, beta)` when the weights are small enough for the path sum to converge.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{Role, UprightDiagram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("T0 = {0} is outside the convergence region for this diagram")]
    Divergent(f64),
    #[error("unknown edge {0}")]
    UnknownEdge(i64),
    #[error("depth must be positive")]
    ZeroDepth,
    #[error("path sum at T0 = {0} does not converge (residual flux {1:e})")]
    Diverged(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrafficState {
    /// Flux currently on each edge.
    pub intensity: BTreeMap<i64, f64>,
    /// Accumulated reading of each edge's counter.
    pub counters: BTreeMap<i64, f64>,
}

impl TrafficState {
    /// Total absolute flux still on the road. A value that has not dropped below the injected unit
    /// after many steps means the path sum is not converging, even when `contraction < 1`.
    pub fn residual(&self) -> f64 {
        self.intensity.values().map(|v| v.abs()).sum()
    }
}

/// Convergence ratio `max |1 - T0^s|` over the crossing signs present in `d`.
pub fn contraction(d: &UprightDiagram, t0: f64) -> f64 {
    let mut q: f64 = 0.0;
    for c in d.crossings() {
        let w = if c.s > 0 { t0 } else { 1.0 / t0 };
        q = q.max((1.0 - w).abs());
    }
    q
}

/// The summability test only looks at the crossing signs that actually occur.
fn check(d: &UprightDiagram, t0: f64) -> Result<(), TrafficError> {
    if !(t0.is_finite() && t0 > 0.0) || contraction(d, t0) >= 1.0 {
        return Err(TrafficError::Divergent(t0));
    }
    Ok(())
}

/// One step moves every car once; `depth` steps are taken.
pub fn propagate(d: &UprightDiagram, source: i64, t0: f64, depth: usize) -> Result<TrafficState, TrafficError> {
    check(d, t0)?;
    if depth == 0 {
        return Err(TrafficError::ZeroDepth);
    }
    let m = d.edges().len();
    let src = d.index_of(source).ok_or(TrafficError::UnknownEdge(source))?;
    // Transitions by edge position: (target position, weight).
    let incoming = d.incoming();
    let mut next: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (k, &e) in d.edges().iter().enumerate() {
        let Some(&(ci, role)) = incoming.get(&e) else { continue };
        let c = d.crossings()[ci];
        let ip = d.index_of(c.i).unwrap() + 1;
        let jp = d.index_of(c.j).unwrap() + 1;
        next[k] = match role {
            Role::Over => {
                let ts = if c.s > 0 { t0 } else { 1.0 / t0 };
                vec![(ip, ts), (jp, 1.0 - ts)]
            }
            Role::Under => vec![(jp, 1.0)],
        };
    }
    let mut flux = vec![0.0; m];
    let mut counter = vec![0.0; m];
    flux[src] = 1.0;
    counter[src] = 1.0;
    let mut fresh = vec![0.0; m];
    for _ in 0..depth {
        fresh.iter_mut().for_each(|x| *x = 0.0);
        for (k, f) in flux.iter().enumerate() {
            if *f == 0.0 {
                continue;
            }
            for &(t, w) in &next[k] {
                fresh[t] += w * f;
            }
        }
        std::mem::swap(&mut flux, &mut fresh);
        for (c, f) in counter.iter_mut().zip(&flux) {
            *c += f;
        }
    }
    let label = |k: usize| d.edges()[k];
    Ok(TrafficState {
        intensity: (0..m).map(|k| (label(k), flux[k])).collect(),
        counters: (0..m).map(|k| (label(k), counter[k])).collect(),
    })
}

/// `propagate`, rejecting runs that still carry at least a unit of flux at the end. Mixed signs can
/// make the sum blow up even when every single weight passes the contraction test.
fn settled(d: &UprightDiagram, source: i64, t0: f64, depth: usize) -> Result<TrafficState, TrafficError> {
    let st = propagate(d, source, t0, depth)?;
    if !(st.residual() < 1.0) {
        return Err(TrafficError::Diverged(t0, st.residual()));
    }
    Ok(st)
}

/// Counter reading at `beta` for injection at `alpha`; approximates `g(alpha, beta)`.
pub fn green_oracle(d: &UprightDiagram, alpha: i64, beta: i64, t0: f64, depth: usize) -> Result<f64, TrafficError> {
    if d.index_of(beta).is_none() {
        return Err(TrafficError::UnknownEdge(beta));
    }
    Ok(settled(d, alpha, t0, depth)?.counters[&beta])
}

/// Every counter for every source: row `alpha`, column `beta`, by edge position.
/// Fails with `Diverged` when some source still carries at least a unit of flux at the end.
pub fn oracle_matrix(d: &UprightDiagram, t0: f64, depth: usize) -> Result<Vec<Vec<f64>>, TrafficError> {
    d.edges()
        .iter()
        .map(|&a| Ok(settled(d, a, t0, depth)?.counters.into_values().collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::samples::{d1, d2, d3};
    use crate::diagram::{apply_move, enumerate_move_sites, Direction, MoveKind, MoveSpec};
    use crate::invariant::green;

    #[test]
    fn unknot_reads_one() {
        assert_eq!(green_oracle(&d1(), 1, 1, 0.3, 1).unwrap(), 1.0);
    }

    #[test]
    fn kink_is_a_geometric_series() {
        let v = green_oracle(&d2(), 1, 2, 0.5, 60).unwrap();
        assert_eq!(v, 2.0 - 2f64.powi(-59));
    }

    #[test]
    fn trefoil_entries() {
        let v = green_oracle(&d3(), 2, 4, 0.9, 1000).unwrap();
        assert!((v - 0.9 / 0.91).abs() < 1e-9, "{v}");
        let v = green_oracle(&d3(), 5, 3, 0.9, 1000).unwrap();
        assert!((v - 0.1 / 0.91).abs() < 1e-9, "{v}");
    }

    #[test]
    fn traffic_never_flows_backwards() {
        let d = d3();
        for &b in &d.edges()[..6] {
            assert_eq!(green_oracle(&d, 7, b, 0.8, 50).unwrap(), 0.0);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(propagate(&d3(), 1, 2.5, 10), Err(TrafficError::Divergent(2.5)));
        assert_eq!(propagate(&d3(), 99, 0.5, 10), Err(TrafficError::UnknownEdge(99)));
        assert_eq!(propagate(&d3(), 1, 0.5, 0), Err(TrafficError::ZeroDepth));
        // 1/2 is fine for positive crossings only.
        assert!(propagate(&d3(), 1, 0.5, 5).is_ok());
        assert!(propagate(&d3().mirror(), 1, 0.5, 5).is_err());
    }

    #[test]
    fn divergence_is_detected() {
        // Mirrored five-crossing torus knot: 1 - T0^-1 is small but the walk still blows up.
        // Drawn from the negated code instead, the same knot converges.
        let d = crate::table::diagram_from_dt("6 8 10 2 4").unwrap().mirror();
        assert!(contraction(&d, 0.8) < 1.0);
        assert!(matches!(oracle_matrix(&d, 0.8, 2000), Err(TrafficError::Diverged(..))));
        assert!(matches!(green_oracle(&d, 1, 11, 0.8, 2000), Err(TrafficError::Diverged(..))));
        assert!(oracle_matrix(&crate::table::diagram_from_dt("-6 -8 -10 -2 -4").unwrap(), 0.8, 2000).is_ok());
        assert!(oracle_matrix(&d, 0.9, 2000).is_ok());
        assert!(propagate(&d3(), 1, 0.9, 2000).unwrap().residual() < 1e-12);
    }

    #[test]
    fn truncation_error_shrinks_with_depth() {
        let d = d3();
        let g = green(&d).unwrap();
        for t0 in [0.8, 0.9] {
            let exact = g.eval_f64(0, 3, t0);
            let mut prev = f64::INFINITY;
            for depth in [50, 100, 200, 400, 800] {
                let err = (green_oracle(&d, 1, 4, t0, depth).unwrap() - exact).abs();
                assert!(err <= prev, "{t0} {depth}");
                prev = err;
            }
        }
    }

    /// First diagram reachable from the trefoil by at most two insertions that has an R3 site.
    fn r3_example() -> (UprightDiagram, MoveSpec) {
        let mut frontier = vec![d3()];
        for _ in 0..2 {
            let mut nextf = Vec::new();
            for d in &frontier {
                if let Some(m) = enumerate_move_sites(d, MoveKind::R3).into_iter().next() {
                    return (d.clone(), m);
                }
                for kind in [MoveKind::R2b, MoveKind::R2c, MoveKind::R1l] {
                    for m in enumerate_move_sites(d, kind).into_iter().filter(|m| m.direction == Direction::Backward) {
                        nextf.push(apply_move(d, &m).unwrap());
                    }
                }
            }
            frontier = nextf;
        }
        for d in &frontier {
            if let Some(m) = enumerate_move_sites(d, MoveKind::R3).into_iter().next() {
                return (d.clone(), m);
            }
        }
        panic!("no R3 site found");
    }

    #[test]
    fn r3_tangle_has_the_same_exits() {
        let (before, m) = r3_example();
        let after = apply_move(&before, &m).unwrap();
        // Edges strictly inside the tangle change meaning; everything else is shared.
        let inner: Vec<i64> = m.site.iter().map(|&e| before.succ(e).unwrap()).collect();
        let t0 = 0.9;
        for &a in before.edges().iter().filter(|e| !inner.contains(e)) {
            let x = propagate(&before, a, t0, 4000).unwrap().counters;
            let y = propagate(&after, a, t0, 4000).unwrap().counters;
            for (b, v) in &x {
                if !inner.contains(b) {
                    assert!((v - y[b]).abs() < 1e-9, "{a} {b} {v} {}", y[b]);
                }
            }
        }
    }

    #[test]
    fn oracle_matches_exact_green_after_moves() {
        let (d, _) = r3_example();
        let g = green(&d).unwrap();
        let o = oracle_matrix(&d, 0.9, 4000).unwrap();
        for (r, row) in o.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!((v - g.eval_f64(r, c, 0.9)).abs() < 1e-9);
            }
        }
    }
}
