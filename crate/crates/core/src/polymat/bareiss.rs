//! Fraction-free elimination over the Laurent ring.

use super::{GreenMatrix, PolyMatError, PolyMatrix};
use crate::laurent::LaurentPoly;

struct Eliminated {
    rows: Vec<Vec<LaurentPoly>>,
    det: LaurentPoly,
}

fn pick_pivot(rows: &[Vec<LaurentPoly>], k: usize) -> Option<usize> {
    (k..rows.len())
        .filter(|&r| !rows[r][k].is_zero())
        .min_by_key(|&r| (rows[r][k].span().unwrap(), rows[r][k].num_terms(), r))
}

/// Bareiss elimination on `[M | extra]`. Returns `None` when `M` is singular.
fn eliminate(m: &PolyMatrix, with_identity: bool) -> Option<Eliminated> {
    let n = m.size();
    let width = if with_identity { 2 * n } else { n };
    let mut rows: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|r| {
            let mut row = m.row(r).to_vec();
            if with_identity {
                row.extend((0..n).map(|c| if c == r { LaurentPoly::one() } else { LaurentPoly::zero() }));
            }
            row
        })
        .collect();
    let mut prev = LaurentPoly::one();
    let mut negate = false;
    for k in 0..n {
        let p = pick_pivot(&rows, k)?;
        if p != k {
            rows.swap(p, k);
            negate = !negate;
        }
        let (top, rest) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[k]);
            for j in k + 1..width {
                let mut v = pivot * &row[j];
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v -= &lead * &pivot_row[j];
                }
                row[j] = if prev.is_one() {
                    v
                } else {
                    v.div_exact(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = rows[k][k].clone();
    }
    let det = if negate { -prev } else { prev };
    Some(Eliminated { rows, det })
}

/// Exact determinant by fraction-free elimination with lowest-span pivoting.
pub fn det_fraction_free(m: &PolyMatrix) -> LaurentPoly {
    if m.size() == 0 {
        return LaurentPoly::one();
    }
    eliminate(m, false).map_or_else(LaurentPoly::zero, |e| e.det)
}

/// Returns `(H, d)` with `M H = d I = H M` and `d = det M`.
pub fn scaled_inverse(m: &PolyMatrix) -> Result<GreenMatrix, PolyMatError> {
    let n = m.size();
    if n == 0 {
        return Ok(GreenMatrix {
            numerators: PolyMatrix::zeros(0),
            denominator: LaurentPoly::one(),
        });
    }
    let Eliminated { rows, det } = eliminate(m, true).ok_or_else(|| PolyMatError::Singular {
        name: format!("{n}x{n}"),
    })?;
    // Back substitution on U X = d B, where each X entry is d times an entry of M^-1.
    let mut h = PolyMatrix::zeros(n);
    for c in 0..n {
        for i in (0..n).rev() {
            let mut acc = &det * &rows[i][n + c];
            for k in i + 1..n {
                let u = &rows[i][k];
                if !u.is_zero() {
                    let x = h.get(k, c);
                    if !x.is_zero() {
                        acc -= u * x;
                    }
                }
            }
            let x = acc
                .div_exact(&rows[i][i])
                .ok_or_else(|| PolyMatError::Internal("inexact back substitution".into()))?;
            h.set(i, c, x);
        }
    }
    Ok(GreenMatrix {
        numerators: h,
        denominator: det,
    })
}
