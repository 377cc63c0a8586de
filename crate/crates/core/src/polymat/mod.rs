//! Square matrices over [`LaurentPoly`] and their exact scaled inverses.

mod bareiss;
mod modular;
mod zpoly;

pub use bareiss::{det_fraction_free, scaled_inverse};
pub use modular::{det_modular, scaled_inverse_modular, ModularError};
pub use zpoly::ZPoly;

use std::fmt;

use thiserror::Error;

use crate::exec::Exec;
use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyMatError {
    #[error("matrix {name} is singular (determinant is the zero polynomial)")]
    Singular { name: String },
    #[error("rows have unequal lengths or the matrix is not square")]
    NotSquare,
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    size: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![LaurentPoly::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for k in 0..size {
            m.set(k, k, LaurentPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self, PolyMatError> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(PolyMatError::NotSquare);
        }
        Ok(Self {
            size,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Parses rows of polynomial strings, mostly for tests.
    pub fn from_str_rows(rows: &[&[&str]]) -> Result<Self, PolyMatError> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.parse::<LaurentPoly>().map_err(|e| PolyMatError::Internal(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.size + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut LaurentPoly {
        &mut self.entries[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LaurentPoly) {
        self.entries[r * self.size + c] = v;
    }

    pub fn row(&self, r: usize) -> &[LaurentPoly] {
        &self.entries[r * self.size..(r + 1) * self.size]
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.has_integer_coeffs())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.size);
        for r in 0..self.size {
            for c in 0..self.size {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        *out.get_mut(r, c) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, p: &LaurentPoly) -> PolyMatrix {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|e| e * p).collect(),
        }
    }

    /// Evaluates every entry at a floating point.
    pub fn eval_f64(&self, t0: f64) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|e| e.eval_f64(t0).expect("nonzero evaluation point"))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.size, self.size)?;
        for r in 0..self.size {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_text()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `A^-1 = H / d` with `d = det(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenMatrix {
    pub numerators: PolyMatrix,
    pub denominator: LaurentPoly,
}

impl GreenMatrix {
    pub fn size(&self) -> usize {
        self.numerators.size()
    }

    pub fn numerator(&self, r: usize, c: usize) -> &LaurentPoly {
        self.numerators.get(r, c)
    }

    /// Entry `(r, c)` of `A^-1` at a floating point.
    pub fn eval_f64(&self, r: usize, c: usize, t0: f64) -> f64 {
        let n = self.numerator(r, c).eval_f64(t0).expect("nonzero point");
        n / self.denominator.eval_f64(t0).expect("nonzero point")
    }

    /// Checks `A H = d I` and `H A = d I` exactly.
    pub fn verify_against(&self, a: &PolyMatrix) -> bool {
        let n = a.size();
        if n != self.size() {
            return false;
        }
        let di = PolyMatrix::identity(n).scale(&self.denominator);
        a.mul(&self.numerators) == di && self.numerators.mul(a) == di
    }
}

/// Determinant, by the multi-modular route for integer matrices and Bareiss otherwise.
pub fn det_auto(m: &PolyMatrix, exec: Exec) -> LaurentPoly {
    if m.is_integral() && m.size() > 1 {
        if let Ok(d) = det_modular(m, exec) {
            return d;
        }
    }
    det_fraction_free(m)
}

/// Chooses the multi-modular route for integer matrices and Bareiss otherwise.
pub fn scaled_inverse_auto(m: &PolyMatrix, exec: Exec) -> Result<GreenMatrix, PolyMatError> {
    if m.is_integral() && m.size() > 1 {
        match scaled_inverse_modular(m, exec) {
            Ok(g) => return Ok(g),
            Err(ModularError::Singular) => {
                return Err(PolyMatError::Singular {
                    name: format!("{0}x{0}", m.size()),
                })
            }
            Err(_) => {}
        }
    }
    scaled_inverse(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_transpose() {
        let i = PolyMatrix::identity(3);
        assert_eq!(i.transpose(), i);
        assert_eq!(i.mul(&i), i);
        let m = PolyMatrix::from_str_rows(&[&["1", "-T"], &["0", "T^-1"]]).unwrap();
        assert_eq!(m.transpose().get(1, 0), &"-T".parse().unwrap());
        assert_eq!(m.mul(&PolyMatrix::identity(2)), m);
    }

    #[test]
    fn from_rows_rejects_ragged() {
        let r = PolyMatrix::from_rows(vec![vec![LaurentPoly::one()], vec![]]);
        assert_eq!(r, Err(PolyMatError::NotSquare));
    }
}
