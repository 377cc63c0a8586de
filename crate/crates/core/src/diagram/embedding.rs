//! Planar maps of upright diagrams and the face equations relating them to rotation numbers.
//!
//! Every crossing is drawn with both strands pointing up, so its four rays in counterclockwise
//! order are out-right, out-left, in-left, in-right. Walking a face boundary with the face on the
//! left, the total turning is `+2pi` for bounded faces and `-2pi` for the outer face. In units of
//! `pi` this reads `corners + 2 * sum(+-phi) = +-2`, where a corner between the two outgoing rays
//! or between the two incoming rays contributes 1 and the side corners contribute 0.

use thiserror::Error;

use super::UprightDiagram;

pub(crate) const OUT_RIGHT: usize = 0;
pub(crate) const OUT_LEFT: usize = 1;
pub(crate) const IN_LEFT: usize = 2;
pub(crate) const IN_RIGHT: usize = 3;

/// Rays used by (over-in, over-out, under-in, under-out) at a crossing of sign `s`.
pub(crate) fn rays_for_sign(s: i32) -> [usize; 4] {
    if s > 0 {
        [IN_LEFT, OUT_RIGHT, IN_RIGHT, OUT_LEFT]
    } else {
        [IN_RIGHT, OUT_LEFT, IN_LEFT, OUT_RIGHT]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("not planar: {faces} faces, a planar diagram needs {expected}")]
    NonPlanar { faces: usize, expected: usize },
    #[error("rotation numbers disagree with face {face}: turning {got}, expected {expected}")]
    Rotation { face: usize, got: i64, expected: i64 },
    #[error("a crossingless diagram must have rotation 0, found {0}")]
    Unknot(i64),
}

/// Vertices are crossings with four rays; arcs run from an out-ray to an in-ray.
#[derive(Clone, Debug)]
pub(crate) struct PlanarMap {
    pub rays: Vec<[usize; 4]>,
    pub tail: Vec<(usize, usize)>,
    pub head: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub(crate) struct RawFace {
    pub corners: i64,
    /// (arc, +1 when traversed along its orientation).
    pub sides: Vec<(usize, i64)>,
}

impl PlanarMap {
    pub fn faces(&self) -> Vec<RawFace> {
        let nv = self.rays.len();
        let mut seen = vec![[false; 4]; nv];
        let mut out = Vec::new();
        for v0 in 0..nv {
            for r0 in 0..4 {
                if seen[v0][r0] {
                    continue;
                }
                let mut face = RawFace {
                    corners: 0,
                    sides: Vec::new(),
                };
                let (mut v, mut r) = (v0, r0);
                while !seen[v][r] {
                    seen[v][r] = true;
                    let leave = (r + 3) % 4;
                    if leave % 2 == 0 {
                        face.corners += 1;
                    }
                    let a = self.rays[v][leave];
                    let next = if leave == OUT_RIGHT || leave == OUT_LEFT {
                        face.sides.push((a, 1));
                        self.head[a]
                    } else {
                        face.sides.push((a, -1));
                        self.tail[a]
                    };
                    (v, r) = next;
                }
                out.push(face);
            }
        }
        out
    }
}

/// The closed-up map of a diagram with at least one crossing. Arc 0 joins the last edge to the
/// first around the right-hand side; arc `k > 0` is edge `edges[k]`.
pub(crate) fn map_of(d: &UprightDiagram) -> (PlanarMap, Vec<i64>) {
    let n = d.num_crossings();
    let edges = d.edges();
    let narcs = 2 * n;
    let arc_of = |label: i64| -> usize {
        let k = d.index_of(label).unwrap();
        if k == 2 * n {
            0
        } else {
            k
        }
    };
    let mut rays = vec![[usize::MAX; 4]; n];
    let mut tail = vec![(0, 0); narcs];
    let mut head = vec![(0, 0); narcs];
    for (v, c) in d.crossings().iter().enumerate() {
        let [oi, oo, ui, uo] = rays_for_sign(c.s);
        let ip = d.succ(c.i).unwrap();
        let jp = d.succ(c.j).unwrap();
        for (label, ray, incoming) in [(c.i, oi, true), (ip, oo, false), (c.j, ui, true), (jp, uo, false)] {
            let a = arc_of(label);
            rays[v][ray] = a;
            if incoming {
                head[a] = (v, ray);
            } else {
                tail[a] = (v, ray);
            }
        }
    }
    let mut phi = vec![0i64; narcs];
    for (k, &l) in edges.iter().enumerate().take(2 * n).skip(1) {
        phi[k] = d.rotation(l);
    }
    phi[0] = d.rotation(d.first()) + d.rotation(d.last()) - 1;
    (PlanarMap { rays, tail, head }, phi)
}

/// A face of the closed-up diagram. The closing arc is reported under the first edge's label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub edges: Vec<i64>,
    pub outer: bool,
}

/// Faces of a realizable diagram.
pub fn faces(d: &UprightDiagram) -> Result<Vec<Face>, EmbeddingError> {
    check_embedding(d)?;
    if d.num_crossings() == 0 {
        return Ok(vec![]);
    }
    let (map, _) = map_of(d);
    let edges = d.edges();
    Ok(map
        .faces()
        .into_iter()
        .map(|f| Face {
            outer: f.sides.contains(&(0, 1)),
            edges: f.sides.iter().map(|&(a, _)| edges[a]).collect(),
        })
        .collect())
}

/// Checks that the diagram is drawable in the plane with the given rotation numbers.
pub fn check_embedding(d: &UprightDiagram) -> Result<(), EmbeddingError> {
    let n = d.num_crossings();
    if n == 0 {
        let phi = d.rotation(d.first());
        return if phi == 0 { Ok(()) } else { Err(EmbeddingError::Unknot(phi)) };
    }
    let (map, phi) = map_of(d);
    let faces = map.faces();
    if faces.len() != n + 2 {
        return Err(EmbeddingError::NonPlanar {
            faces: faces.len(),
            expected: n + 2,
        });
    }
    for (k, f) in faces.iter().enumerate() {
        let outer = f.sides.contains(&(0, 1));
        let got = f.corners + 2 * f.sides.iter().map(|&(a, dir)| dir * phi[a]).sum::<i64>();
        let expected = if outer { -2 } else { 2 };
        if got != expected {
            return Err(EmbeddingError::Rotation { face: k, got, expected });
        }
    }
    Ok(())
}

pub fn is_realizable(d: &UprightDiagram) -> bool {
    check_embedding(d).is_ok()
}

#[cfg(test)]
mod tests {
    use super::super::samples::{d1, d2, d3};
    use super::super::{Crossing, UprightDiagram};
    use super::*;

    #[test]
    fn worked_examples_are_realizable() {
        for d in [d1(), d2(), d3()] {
            check_embedding(&d).unwrap();
            check_embedding(&d.mirror()).unwrap();
        }
    }

    #[test]
    fn wrong_rotations_are_caught() {
        let bad = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 2, 1)], &[(2, -1)]).unwrap();
        assert!(matches!(check_embedding(&bad), Err(EmbeddingError::Rotation { .. })));
        let bad = UprightDiagram::new(vec![1], vec![], [(1, 1)].into_iter().collect()).unwrap();
        assert_eq!(check_embedding(&bad), Err(EmbeddingError::Unknot(1)));
        let d3_shifted = UprightDiagram::with_consecutive_labels(
            vec![Crossing::new(1, 1, 4), Crossing::new(1, 3, 6), Crossing::new(1, 5, 2)],
            &[(4, 0)],
        )
        .unwrap();
        assert!(!is_realizable(&d3_shifted));
    }

    #[test]
    fn kink_has_a_monogon() {
        let f = faces(&d2()).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.iter().any(|f| f.edges == vec![2]));
        assert_eq!(f.iter().filter(|f| f.outer).count(), 1);
    }

    #[test]
    fn trefoil_faces() {
        let f = faces(&d3()).unwrap();
        assert_eq!(f.len(), 5);
        let mut sizes: Vec<usize> = f.iter().map(|f| f.edges.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2, 2, 3, 3]);
    }
}
