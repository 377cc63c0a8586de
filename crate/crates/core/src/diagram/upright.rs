//! PD code to upright diagram: orient the crossings, cut one arc open, and solve the face
//! equations for rotation numbers as a flow on the dual graph.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::embedding::{check_embedding, rays_for_sign, PlanarMap, RawFace};
use super::pd::{PdCode, PdError};
use super::{Crossing, DiagramError, UprightDiagram};
use crate::invariant;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UprightError {
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error("PD code is not planar ({faces} faces for {crossings} crossings)")]
    NonPlanar { faces: usize, crossings: usize },
    #[error("arc {0} does not occur in the PD code")]
    UnknownArc(u64),
    #[error("cannot cut at arc {0}: its rotation is forced and cannot be normalized")]
    ForcedCut(u64),
    #[error("face equations are inconsistent: {0}")]
    Inconsistent(String),
    #[error("converted diagram is invalid: {0}")]
    Invalid(#[from] DiagramError),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

/// Converts with the cut at the smallest arc label, falling back to later arcs along the knot
/// when that cut cannot be normalized.
pub fn pd_to_upright(pd: &PdCode) -> Result<UprightDiagram, UprightError> {
    if pd.is_empty() {
        return Ok(UprightDiagram::unknot());
    }
    let walk = pd.traverse(None)?;
    let mut last_err = None;
    for v in &walk {
        let arc = pd.crossings[v.crossing][v.enter];
        match pd_to_upright_with_cut(pd, arc) {
            Ok(d) => return Ok(d),
            Err(e @ UprightError::ForcedCut(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

/// Converts with the long knot cut open at `cut_arc`.
pub fn pd_to_upright_with_cut(pd: &PdCode, cut_arc: u64) -> Result<UprightDiagram, UprightError> {
    let n = pd.len();
    if n == 0 {
        return Ok(UprightDiagram::unknot());
    }
    let walk = pd.traverse(Some(cut_arc))?;
    let first = walk[0];
    if pd.crossings[first.crossing][first.enter] != cut_arc {
        return Err(UprightError::UnknownArc(cut_arc));
    }
    let signs = pd.signs()?;
    // Arc k is the arc entering walk[k]; it becomes edge label k + 1, and arc 0 also the last edge.
    let narcs = 2 * n;
    let ray_of = |c: usize, pos: usize| -> usize {
        // PD positions are counterclockwise from the incoming under-strand.
        let [oi, oo, ui, uo] = rays_for_sign(signs[c]);
        if signs[c] > 0 {
            [ui, oo, uo, oi][pos]
        } else {
            [ui, oi, uo, oo][pos]
        }
    };
    let mut rays = vec![[usize::MAX; 4]; n];
    let mut head = vec![(0, 0); narcs];
    let mut tail = vec![(0, 0); narcs];
    let mut over_in = vec![0usize; n];
    let mut under_in = vec![0usize; n];
    for (k, v) in walk.iter().enumerate() {
        let c = v.crossing;
        let r_in = ray_of(c, v.enter);
        rays[c][r_in] = k;
        head[k] = (c, r_in);
        let out = (k + 1) % narcs;
        let r_out = ray_of(c, v.exit());
        rays[c][r_out] = out;
        tail[out] = (c, r_out);
        if v.enter == 0 {
            under_in[c] = k;
        } else {
            over_in[c] = k;
        }
    }
    let map = PlanarMap { rays, tail, head };
    let faces = map.faces();
    if faces.len() != n + 2 {
        return Err(UprightError::NonPlanar {
            faces: faces.len(),
            crossings: n,
        });
    }
    let phi = solve_rotations(&faces, narcs).map_err(|e| match e {
        FlowError::Forced => UprightError::ForcedCut(cut_arc),
        FlowError::Odd(msg) => UprightError::Inconsistent(msg),
    })?;
    let crossings = (0..n)
        .map(|c| Crossing::new(signs[c], over_in[c] as i64 + 1, under_in[c] as i64 + 1))
        .collect();
    let rotations: Vec<(i64, i64)> = (1..narcs).map(|k| (k as i64 + 1, phi[k])).collect();
    let d = UprightDiagram::with_consecutive_labels(crossings, &rotations)?;
    self_check(&d)?;
    Ok(d)
}

enum FlowError {
    Forced,
    Odd(String),
}

/// Rotation numbers per arc with arc 0 (the cut) fixed to -1, so the first and last edges get 0.
fn solve_rotations(faces: &[RawFace], narcs: usize) -> Result<Vec<i64>, FlowError> {
    let nf = faces.len();
    let mut left = vec![usize::MAX; narcs];
    let mut right = vec![usize::MAX; narcs];
    for (f, face) in faces.iter().enumerate() {
        for &(a, dir) in &face.sides {
            if dir > 0 {
                left[a] = f;
            } else {
                right[a] = f;
            }
        }
    }
    let outer = left[0];
    // Net inflow each face needs: sum over sides of dir * phi = b.
    let mut demand = Vec::with_capacity(nf);
    for (f, face) in faces.iter().enumerate() {
        let target = if f == outer { -2 } else { 2 };
        let rest = target - face.corners;
        if rest % 2 != 0 {
            return Err(FlowError::Odd(format!("face {f} has odd corner count")));
        }
        demand.push(rest / 2);
    }
    let mut phi = vec![0i64; narcs];
    phi[0] = -1;
    demand[left[0]] += 1;
    demand[right[0]] -= 1;
    // Spanning tree of the dual graph without the cut arc.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for a in 1..narcs {
        if left[a] != right[a] {
            adj[left[a]].push((right[a], a));
            adj[right[a]].push((left[a], a));
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nf];
    let mut order = Vec::with_capacity(nf);
    let mut seen = vec![false; nf];
    let mut comp_sum = HashMap::new();
    for root in 0..nf {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        let start = order.len();
        while let Some(f) = q.pop_front() {
            order.push(f);
            for &(g, a) in &adj[f] {
                if !seen[g] {
                    seen[g] = true;
                    parent[g] = Some((f, a));
                    q.push_back(g);
                }
            }
        }
        let total: i64 = order[start..].iter().map(|&f| demand[f]).sum();
        comp_sum.insert(root, total);
    }
    // With the cut arc a dual bridge, its value is forced by one side's total demand.
    if comp_sum.values().any(|&s| s != 0) {
        return Err(FlowError::Forced);
    }
    let mut sub = demand.clone();
    for &f in order.iter().rev() {
        if let Some((p, a)) = parent[f] {
            // Arc a must carry sub[f] into f's subtree.
            phi[a] = if left[a] == f { sub[f] } else { -sub[f] };
            sub[p] += sub[f];
        }
    }
    Ok(phi)
}

/// Internal soundness checks on a freshly converted diagram.
fn self_check(d: &UprightDiagram) -> Result<(), UprightError> {
    d.validate()?;
    check_embedding(d).map_err(|e| UprightError::SelfCheck(e.to_string()))?;
    let delta = invariant::alexander(d).map_err(|e| UprightError::SelfCheck(e.to_string()))?;
    if !delta.eval(&num_rational::BigRational::from_integer(1.into())).is_ok_and(|v| v == num_rational::BigRational::from_integer(1.into())) {
        return Err(UprightError::SelfCheck(format!("Delta(1) != 1 for Delta = {delta}")));
    }
    if !delta.is_palindromic() {
        return Err(UprightError::SelfCheck(format!("Delta = {delta} is not palindromic")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::pd::parse_pd;
    use super::*;

    #[test]
    fn empty_gives_d1() {
        let d = pd_to_upright(&PdCode::default()).unwrap();
        assert_eq!(d, UprightDiagram::unknot());
    }

    #[test]
    fn trefoils() {
        for text in ["X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]", "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"] {
            let d = pd_to_upright(&parse_pd(text).unwrap()).unwrap();
            assert_eq!(d.num_crossings(), 3);
            assert_eq!(d.writhe().abs(), 3);
            assert_eq!((d.total_rotation() + d.writhe()).rem_euclid(2), 0);
            assert_eq!(d.rotation(d.first()), 0);
            assert_eq!(d.rotation(d.last()), 0);
        }
    }

    #[test]
    fn every_cut_gives_a_valid_diagram() {
        let pd = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        for cut in 1..=8 {
            let d = pd_to_upright_with_cut(&pd, cut).unwrap();
            d.validate().unwrap();
        }
        assert_eq!(pd_to_upright_with_cut(&pd, 99), Err(UprightError::UnknownArc(99)));
    }

    #[test]
    fn kinks_convert() {
        for text in ["X[1,2,2,1]", "X[2,2,1,1]", "X[1,1,2,2]", "X[2,1,1,2]"] {
            match parse_pd(text) {
                Ok(pd) => {
                    let d = pd_to_upright(&pd).unwrap();
                    assert_eq!(d.num_crossings(), 1);
                }
                Err(e) => assert!(matches!(e, PdError::Orientation(_)), "{text}: {e:?}"),
            }
        }
    }
}
