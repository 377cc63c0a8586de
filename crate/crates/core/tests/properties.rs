//! Structural properties over random table knots, random move sequences and random expressions.

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::select;

use rho1::diagram::{apply_move, enumerate_move_sites, MoveKind, UprightDiagram};
use rho1::grules::{Context, GExpr, GIndex};
use rho1::invariant::{build_a, green, invariant_pair};
use rho1::polymat::PolyMatrix;
use rho1::table::{diagram_from_dt, read_table};
use rho1::traffic::{contraction, green_oracle, propagate};
use rho1::LaurentPoly;

/// Bundled codes with at most nine crossings.
fn codes() -> &'static [String] {
    static CODES: OnceLock<Vec<String>> = OnceLock::new();
    CODES.get_or_init(|| {
        let path = format!("{}/../../data/knots_le12.csv", env!("CARGO_MANIFEST_DIR"));
        read_table(path).unwrap().into_iter().map(|r| r.dt).filter(|dt| dt.split_whitespace().count() <= 9).collect()
    })
}

fn diagram() -> impl Strategy<Value = UprightDiagram> {
    (0..codes().len(), any::<bool>()).prop_map(|(k, m)| {
        let d = diagram_from_dt(&codes()[k]).unwrap();
        if m { d.mirror() } else { d }
    })
}

/// A diagram followed by a few moves chosen by the given indices.
fn walked(d: UprightDiagram, picks: &[(usize, usize)]) -> UprightDiagram {
    let mut d = d;
    for &(k, s) in picks {
        let kind = MoveKind::ALL[k % MoveKind::ALL.len()];
        let sites = enumerate_move_sites(&d, kind);
        if sites.is_empty() || d.num_crossings() > 12 {
            continue;
        }
        d = apply_move(&d, &sites[s % sites.len()]).unwrap();
    }
    d
}

fn row_shape_holds(a: &PolyMatrix) -> bool {
    (0..a.size()).all(|r| {
        let nz: Vec<&LaurentPoly> = a.row(r).iter().filter(|p| !p.is_zero()).collect();
        nz.len() <= 3 && nz.iter().all(|p| p.min_exp().unwrap() >= -1 && p.max_exp().unwrap() <= 1)
    })
}

fn atom_name() -> impl Strategy<Value = &'static str> {
    select(vec!["a", "b", "c", "d"])
}

fn gexpr() -> impl Strategy<Value = GExpr> {
    prop::collection::vec((atom_name(), atom_name(), -3i64..=3, -2i64..=2), 0..5).prop_map(|ts| {
        ts.into_iter().fold(GExpr::zero(), |acc, (a, b, c, e)| {
            acc.add(&GExpr::g(a, b).scale(&LaurentPoly::from_int(c).shift(e)))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moves_preserve_validity_and_the_pair(d in diagram(), picks in prop::collection::vec((0usize..8, 0usize..64), 1..4)) {
        let before = invariant_pair(&d).unwrap();
        let e = walked(d, &picks);
        prop_assert!(e.validate().is_ok());
        let after = invariant_pair(&e).unwrap();
        prop_assert_eq!((before.delta, before.rho1), (after.delta, after.rho1));
    }

    #[test]
    fn matrix_rows_have_the_crossing_shape(d in diagram(), picks in prop::collection::vec((0usize..8, 0usize..64), 0..3)) {
        let d = walked(d, &picks);
        let a = build_a(&d);
        prop_assert_eq!(a.size(), d.edges().len());
        prop_assert!(row_shape_holds(&a));
    }

    #[test]
    fn green_matrix_inverts_a(d in diagram()) {
        let g = green(&d).unwrap();
        prop_assert!(!g.denominator.is_zero());
        prop_assert!(g.verify_against(&build_a(&d)));
    }

    #[test]
    fn pair_is_normalized_and_integral(d in diagram()) {
        let p = invariant_pair(&d).unwrap();
        let one = num_rational::BigRational::from_integer(1.into());
        prop_assert_eq!(p.delta.eval(&one).unwrap(), one);
        prop_assert!(p.delta.is_palindromic());
        prop_assert!(p.rho1.has_integer_coeffs());
        prop_assert_eq!(p.writhe, d.writhe());
        prop_assert_eq!(p.total_rotation, d.total_rotation());
    }

    #[test]
    fn mirror_negates_rho1(d in diagram()) {
        let p = invariant_pair(&d).unwrap();
        let m = invariant_pair(&d.mirror()).unwrap();
        prop_assert_eq!(m.rho1, -p.rho1);
        prop_assert_eq!(m.delta, p.delta.invert_variable());
    }

    #[test]
    fn json_round_trip(d in diagram()) {
        let back = UprightDiagram::from_json_str(&d.to_json().to_string()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn traffic_agrees_with_green(k in 0usize..40, a in 0usize..64, b in 0usize..64, t0 in 0.75f64..1.25) {
        let d = diagram_from_dt(&codes()[k]).unwrap();
        prop_assume!(contraction(&d, t0) < 0.9);
        let edges = d.edges();
        let (alpha, beta) = (edges[a % edges.len()], edges[b % edges.len()]);
        // Only runs whose leftover flux is negligible are comparable.
        let st = propagate(&d, alpha, t0, 3000).unwrap();
        prop_assume!(st.residual() < 1e-12);
        let sum = green_oracle(&d, alpha, beta, t0, 3000).unwrap();
        let exact = green(&d).unwrap().eval_f64(a % edges.len(), b % edges.len(), t0);
        prop_assert!((sum - exact).abs() < 1e-6, "{} vs {}", sum, exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gexpr_canonical_form(x in gexpr(), y in gexpr()) {
        prop_assert!(x.terms().all(|(_, c)| !c.is_zero()));
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert!(x.sub(&x).is_zero());
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert!(x.mul(&y).unwrap().degree() <= x.degree() + y.degree());
    }

    #[test]
    fn distinctness_is_symmetric(pairs in prop::collection::vec((atom_name(), atom_name()), 0..6), p in atom_name(), q in atom_name()) {
        let mut ctx = Context::new();
        for (a, b) in pairs {
            // Contradictory declarations are rejected; the rest must stay consistent.
            let _ = ctx.declare_distinct(&GIndex::new(a), &GIndex::new(b));
        }
        let (p, q) = (GIndex::new(p), GIndex::new(q));
        let fwd = ctx.delta(&p, &q).ok();
        let bwd = ctx.delta(&q, &p).ok();
        prop_assert_eq!(fwd, bwd);
        if p == q {
            prop_assert_eq!(fwd, Some(true));
        }
    }
}
