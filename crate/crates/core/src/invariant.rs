//! The matrix `A`, the normalized Alexander polynomial and `rho_1`.
//!
//! With `G = H / d` (`d = det A`), every `R_1` term and rotation term becomes a quadratic form in
//! the entries of `H` and `d` over `d^2`. Since `Delta^2 = T^-(phi+w) d^2`, the denominators cancel
//! symbolically and `rho_1 = T^-(phi+w) S` for an integer polynomial `S`; no rational-function
//! arithmetic is needed.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Crossing, UprightDiagram};
use crate::exec::Exec;
use crate::laurent::LaurentPoly;
use crate::polymat::{det_auto, scaled_inverse_auto, GreenMatrix, PolyMatError, PolyMatrix, ZPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("phi(D) + w(D) = {phi} + {writhe} is odd; Delta would need half-integer powers of T")]
    Parity { phi: i64, writhe: i64 },
    #[error(transparent)]
    Singular(#[from] PolyMatError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("rho_1 has a non-integer coefficient: 2S = {0}")]
    NonInteger(String),
    #[error("Delta = {0} fails Delta(1) = 1 or is not palindromic")]
    Normalization(String),
}

/// `(Delta, rho_1)` with the diagram data it was computed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantPair {
    pub delta: LaurentPoly,
    pub rho1: LaurentPoly,
    pub writhe: i64,
    pub total_rotation: i64,
    pub crossing_count: usize,
}

impl InvariantPair {
    /// Canonical text key used for deduplication.
    pub fn key(&self) -> String {
        format!("{}|{}", self.delta.to_text(), self.rho1.to_text())
    }

    /// The pair of the mirror image: `(Delta(T^-1), -rho_1)`.
    pub fn mirrored(&self) -> Self {
        Self {
            delta: self.delta.invert_variable(),
            rho1: -&self.rho1,
            writhe: -self.writhe,
            total_rotation: -self.total_rotation,
            crossing_count: self.crossing_count,
        }
    }
}

/// `A = I - sum_c (T^s E[i,i+] + (1 - T^s) E[i,j+] + E[j,j+])`, indexed by edge position.
pub fn build_a(d: &UprightDiagram) -> PolyMatrix {
    let m = d.edges().len();
    let mut a = PolyMatrix::identity(m);
    for c in d.crossings() {
        let i = d.index_of(c.i).expect("valid diagram");
        let j = d.index_of(c.j).expect("valid diagram");
        let ts = LaurentPoly::t_pow(c.s as i64);
        let one = LaurentPoly::one();
        *a.get_mut(i, i + 1) -= &ts;
        *a.get_mut(i, j + 1) -= &(&one - &ts);
        *a.get_mut(j, j + 1) -= &one;
    }
    a
}

fn half_exponent(d: &UprightDiagram) -> Result<i64, InvariantError> {
    let phi = d.total_rotation();
    let w = d.writhe();
    if (phi + w) % 2 != 0 {
        return Err(InvariantError::Parity { phi, writhe: w });
    }
    Ok((-phi - w) / 2)
}

/// `Delta = T^((-phi-w)/2) det A`.
pub fn alexander(d: &UprightDiagram) -> Result<LaurentPoly, InvariantError> {
    alexander_with(d, Exec::default())
}

pub fn alexander_with(d: &UprightDiagram, exec: Exec) -> Result<LaurentPoly, InvariantError> {
    let k = half_exponent(d)?;
    Ok(det_auto(&build_a(d), exec).shift(k))
}

/// `A^-1` as numerators over `det A`.
pub fn green(d: &UprightDiagram) -> Result<GreenMatrix, InvariantError> {
    green_with(d, Exec::default())
}

pub fn green_with(d: &UprightDiagram, exec: Exec) -> Result<GreenMatrix, InvariantError> {
    Ok(scaled_inverse_auto(&build_a(d), exec)?)
}

/// `R_1(c)` as `numerator / denominator`, with `denominator = d^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R1Term {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
}

impl R1Term {
    pub fn eval_f64(&self, t0: f64) -> f64 {
        self.numerator.eval_f64(t0).unwrap() / self.denominator.eval_f64(t0).unwrap()
    }
}

/// `R_1(c) = s (g_ji (g_j+j + g_jj+ - g_ij) - g_ii (g_jj+ - 1) - 1/2)`.
pub fn r1_term(c: &Crossing, g: &GreenMatrix, d: &UprightDiagram) -> R1Term {
    let i = d.index_of(c.i).expect("crossing of d");
    let j = d.index_of(c.j).expect("crossing of d");
    let h = |r: usize, s: usize| g.numerator(r, s).clone();
    let den = &g.denominator;
    let half = LaurentPoly::constant(BigRational::new(1.into(), 2.into()));
    let first = h(j, i) * (h(j + 1, j) + h(j, j + 1) - h(i, j));
    let second = h(i, i) * (h(j, j + 1) - den);
    let numerator = (first - second - half * den * den).scale(&BigRational::from_integer(c.s.into()));
    R1Term {
        numerator,
        denominator: den * den,
    }
}

struct ZGreen<'a> {
    g: &'a GreenMatrix,
    det: ZPoly,
}

impl ZGreen<'_> {
    fn h(&self, r: usize, c: usize) -> Result<ZPoly, InvariantError> {
        ZPoly::from_laurent(self.g.numerator(r, c))
            .ok_or_else(|| InvariantError::Internal(format!("adjugate entry ({r},{c}) is not integral")))
    }
}

/// `2 d^2 (sum_c R_1(c) - sum_k phi_k (g_kk - 1/2))` as an integer polynomial.
fn twice_s(d: &UprightDiagram, g: &GreenMatrix) -> Result<ZPoly, InvariantError> {
    let det = ZPoly::from_laurent(&g.denominator)
        .ok_or_else(|| InvariantError::Internal("determinant is not integral".into()))?;
    let z = ZGreen { g, det };
    let d2 = &z.det * &z.det;
    let mut acc = ZPoly::zero();
    for c in d.crossings() {
        let i = d.index_of(c.i).unwrap();
        let j = d.index_of(c.j).unwrap();
        let hji = z.h(j, i)?;
        let hjjp = z.h(j, j + 1)?;
        let inner = &(&z.h(j + 1, j)? + &hjjp) - &z.h(i, j)?;
        let t1 = (&hji * &inner).scale(2);
        let t2 = (&z.h(i, i)? * &(&hjjp - &z.det)).scale(2);
        let term = &(&t1 - &t2) - &d2;
        acc = if c.s > 0 { &acc + &term } else { &acc - &term };
    }
    for (&label, &phi) in d.rotations() {
        let k = d.index_of(label).unwrap();
        let term = &(&z.det * &z.h(k, k)?).scale(2) - &d2;
        acc = &acc - &term.scale(phi);
    }
    Ok(acc)
}

/// `rho_1 = Delta^2 (sum_c R_1(c) - sum_k phi_k (g_kk - 1/2))`.
pub fn rho1(d: &UprightDiagram) -> Result<LaurentPoly, InvariantError> {
    let g = green(d)?;
    rho1_from_green(d, &g)
}

pub fn rho1_from_green(d: &UprightDiagram, g: &GreenMatrix) -> Result<LaurentPoly, InvariantError> {
    let k = half_exponent(d)?;
    let two_s = twice_s(d, g)?;
    let s = two_s
        .div_scalar_exact(2)
        .ok_or_else(|| InvariantError::NonInteger(two_s.to_laurent().to_text()))?;
    Ok(s.to_laurent().shift(2 * k))
}

pub fn invariant_pair(d: &UprightDiagram) -> Result<InvariantPair, InvariantError> {
    invariant_pair_with(d, Exec::default())
}

/// Runs the whole pipeline once: one scaled inverse gives both `Delta` and `rho_1`.
pub fn invariant_pair_with(d: &UprightDiagram, exec: Exec) -> Result<InvariantPair, InvariantError> {
    let k = half_exponent(d)?;
    let g = green_with(d, exec)?;
    let delta = g.denominator.shift(k);
    let one = BigRational::from_integer(1.into());
    if delta.eval(&one).ok() != Some(one) || !delta.is_palindromic() {
        return Err(InvariantError::Normalization(delta.to_text()));
    }
    let rho1 = rho1_from_green(d, &g)?;
    Ok(InvariantPair {
        delta,
        rho1,
        writhe: d.writhe(),
        total_rotation: d.total_rotation(),
        crossing_count: d.num_crossings(),
    })
}

/// The observed but unproven structure of `rho_1`: palindromic and divisible by `(T-1)^2`.
pub fn structure_warnings(p: &InvariantPair) -> Vec<String> {
    let mut out = Vec::new();
    if !p.rho1.is_palindromic() {
        out.push(format!("rho1 = {} is not palindromic", p.rho1));
    }
    let sq = LaurentPoly::from_ints(0, &[1, -2, 1]);
    if p.rho1.div_exact(&sq).is_none() {
        out.push(format!("rho1 = {} is not divisible by (T-1)^2", p.rho1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::samples::{d1, d2, d3};
    use crate::polymat::{det_fraction_free, scaled_inverse};

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn matrices_of_the_small_examples() {
        assert_eq!(build_a(&d1()), PolyMatrix::identity(1));
        let a2 = PolyMatrix::from_str_rows(&[&["1", "-1", "0"], &["0", "T", "-T"], &["0", "0", "1"]]).unwrap();
        assert_eq!(build_a(&d2()), a2);
        let a3 = build_a(&d3());
        assert_eq!(a3.row(0), &[lp("1"), lp("-T"), lp("0"), lp("0"), lp("T-1"), lp("0"), lp("0")]);
    }

    #[test]
    fn alexander_of_the_small_examples() {
        assert_eq!(alexander(&d1()).unwrap(), LaurentPoly::one());
        assert_eq!(alexander(&d2()).unwrap(), LaurentPoly::one());
        assert_eq!(alexander(&d3()).unwrap(), lp("T^-1-1+T"));
    }

    #[test]
    fn rho1_of_the_small_examples() {
        assert_eq!(rho1(&d1()).unwrap(), LaurentPoly::zero());
        assert_eq!(rho1(&d2()).unwrap(), LaurentPoly::zero());
        assert_eq!(rho1(&d3()).unwrap(), lp("-T^2+2*T-2+2*T^-1-T^-2"));
        assert_eq!(rho1(&d3().mirror()).unwrap(), lp("T^2-2*T+2-2*T^-1+T^-2"));
    }

    #[test]
    fn r1_terms_sum_to_rho1() {
        // Independent route: rational functions evaluated at a rational point.
        let d = d3();
        let g = scaled_inverse(&build_a(&d)).unwrap();
        let t0 = 0.7;
        let mut total: f64 = d.crossings().iter().map(|c| r1_term(c, &g, &d).eval_f64(t0)).sum();
        for (&l, &phi) in d.rotations() {
            let k = d.index_of(l).unwrap();
            total -= phi as f64 * (g.eval_f64(k, k, t0) - 0.5);
        }
        let delta = alexander(&d).unwrap().eval_f64(t0).unwrap();
        let want = rho1(&d).unwrap().eval_f64(t0).unwrap();
        assert!((delta * delta * total - want).abs() < 1e-12);
    }

    #[test]
    fn r1_sign_is_a_prefactor() {
        let d = d3();
        let g = green(&d).unwrap();
        let c = d.crossings()[0];
        let flipped = Crossing::new(-c.s, c.i, c.j);
        assert_eq!(r1_term(&flipped, &g, &d).numerator, -r1_term(&c, &g, &d).numerator);
    }

    #[test]
    fn parity_is_enforced() {
        let odd = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 2, 1)], &[]).unwrap();
        assert_eq!(alexander(&odd), Err(InvariantError::Parity { phi: 0, writhe: 1 }));
    }

    #[test]
    fn det_routes_agree() {
        let a = build_a(&d3());
        assert_eq!(det_auto(&a, Exec::Sequential), det_fraction_free(&a));
    }

    #[test]
    fn pair_and_warnings() {
        let p = invariant_pair(&d3()).unwrap();
        assert_eq!(p.writhe, 3);
        assert_eq!(p.total_rotation, -1);
        assert_eq!(p.crossing_count, 3);
        assert!(structure_warnings(&p).is_empty());
        assert_eq!(p.mirrored(), invariant_pair(&d3().mirror()).unwrap());
    }
}
