//! Symbolic expressions evaluated on real diagrams agree with the concrete sums.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rho1::diagram::{apply_move, enumerate_move_sites, Direction, MoveKind, UprightDiagram};
use rho1::grules::{GExpr, GIndex, LaurentPolyFraction, LocalSide};
use rho1::invariant::{green, r1_term};
use rho1::table::diagram_from_dt;
use rho1::LaurentPoly;

const CODES: &[&str] = &["4 6 2", "4 6 8 2", "6 8 10 2 4", "4 8 10 2 6", "4 8 12 10 2 6", "4 10 -14 -12 2 -8 -6", "6 10 12 14 2 4 8"];

fn name(l: i64) -> String {
    l.to_string()
}

/// The whole diagram, or a subset of its crossings and rotations, as a named local picture.
fn side(d: &UprightDiagram, crossings: &[usize], rotations: &[i64]) -> LocalSide {
    let names: Vec<String> = d.edges().iter().map(|&l| name(l)).collect();
    let strand: Vec<&str> = names.iter().map(String::as_str).collect();
    let cs: Vec<(i32, String, String)> = crossings.iter().map(|&k| {
        let c = d.crossings()[k];
        (c.s, name(c.i), name(c.j))
    }).collect();
    let cs: Vec<(i32, &str, &str)> = cs.iter().map(|(s, i, j)| (*s, i.as_str(), j.as_str())).collect();
    let rs: Vec<(String, i64)> = rotations.iter().map(|&l| (name(l), d.rotation(l))).collect();
    let rs: Vec<(&str, i64)> = rs.iter().map(|(k, p)| (k.as_str(), *p)).collect();
    LocalSide::build(&[&strand], &cs, &rs)
}

fn evaluate(e: &GExpr, d: &UprightDiagram) -> LaurentPolyFraction {
    let g = green(d).unwrap();
    let pos = |x: &GIndex| d.index_of(x.0.parse().unwrap()).unwrap();
    e.evaluate(|a, b| LaurentPolyFraction::new(g.numerator(pos(a), pos(b)).clone(), g.denominator.clone()))
}

fn concrete(d: &UprightDiagram, crossings: &[usize], rotations: &[i64]) -> LaurentPolyFraction {
    let g = green(d).unwrap();
    let mut acc = LaurentPolyFraction::from(LaurentPoly::zero());
    for &k in crossings {
        let t = r1_term(&d.crossings()[k], &g, d);
        acc = acc.add(&LaurentPolyFraction::new(t.numerator, t.denominator));
    }
    let half = LaurentPolyFraction::new(LaurentPoly::one(), LaurentPoly::from_int(2));
    for &l in rotations {
        let k = d.index_of(l).unwrap();
        let gkk = LaurentPolyFraction::new(g.numerator(k, k).clone(), g.denominator.clone());
        let minus_half = LaurentPolyFraction::new(-half.num.clone(), half.den.clone());
        let phi = LaurentPolyFraction::from(LaurentPoly::from_int(-d.rotation(l)));
        acc = acc.add(&phi.mul(&gkk.add(&minus_half)));
    }
    acc
}

#[test]
fn symbolic_sums_match_concrete_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..24 {
        let d = diagram_from_dt(CODES[trial % CODES.len()]).unwrap();
        let mut cs: Vec<usize> = (0..d.num_crossings()).collect();
        cs.shuffle(&mut rng);
        cs.truncate(rng.gen_range(1..=cs.len()));
        let rots: Vec<i64> = d.rotations().keys().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let s = side(&d, &cs, &rots);
        let lhs = evaluate(&s.contribution(), &d);
        assert!(lhs.same_value(&concrete(&d, &cs, &rots)), "trial {trial}");
    }
}

#[test]
fn r3_local_sums_agree_on_a_real_site() {
    // Build a diagram with an R3 site by inserting bigons, then compare the three-crossing sums.
    let mut frontier = vec![diagram_from_dt("4 6 2").unwrap()];
    let mut found = None;
    'outer: for _ in 0..3 {
        let mut next = Vec::new();
        for d in &frontier {
            if let Some(m) = enumerate_move_sites(d, MoveKind::R3).into_iter().find(|m| m.direction == Direction::Forward) {
                found = Some((d.clone(), m));
                break 'outer;
            }
            for kind in [MoveKind::R2b, MoveKind::R2c, MoveKind::R1l] {
                for m in enumerate_move_sites(d, kind).into_iter().filter(|m| m.direction == Direction::Backward).take(4) {
                    next.push(apply_move(d, &m).unwrap());
                }
            }
        }
        frontier = next;
    }
    let (d, m) = found.expect("an R3 site");
    let e = apply_move(&d, &m).unwrap();
    let local = |x: &UprightDiagram| -> Vec<usize> {
        let inner: Vec<i64> = m.site.iter().map(|&l| d.succ(l).unwrap()).collect();
        (0..x.num_crossings())
            .filter(|&k| {
                let c = x.crossings()[k];
                inner.contains(&c.i) || inner.contains(&c.j) || inner.contains(&(x.succ(c.i).unwrap())) || inner.contains(&(x.succ(c.j).unwrap()))
            })
            .collect()
    };
    let (ld, le) = (local(&d), local(&e));
    assert_eq!((ld.len(), le.len()), (3, 3));
    let a = concrete(&d, &ld, &[]);
    let b = concrete(&e, &le, &[]);
    assert!(a.same_value(&b));
}
