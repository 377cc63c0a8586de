//! Dowker-Thistlethwaite codes. Crossing `k` pairs the odd visit `2k-1` with the even visit
//! `|a_k|`; a negative entry marks the even visit as the over-pass.
//!
//! The planar embedding is recovered from the Gauss sequence: for each crossing we only need to
//! know whether the second pass crosses the first from right to left or left to right. For
//! interlaced crossings those bits are tied together by a parity rule, so one BFS over the
//! interlacement graph fixes them all; the result is confirmed by an Euler-characteristic count.

use std::collections::VecDeque;

use thiserror::Error;

use super::pd::PdCode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DtError {
    #[error("syntax error: {0:?} is not an integer")]
    Syntax(String),
    #[error("DT entries must be even, found {0}")]
    Odd(i64),
    #[error("DT entry {0} repeats an absolute value")]
    Repeated(i64),
    #[error("DT entry {value} is out of range for {n} crossings")]
    Range { value: i64, n: usize },
    #[error("DT code is not realizable in the plane")]
    NonRealizable,
}

/// Parses a DT code and returns a PD code realizing it.
pub fn parse_dt(text: &str) -> Result<PdCode, DtError> {
    let cleaned = text.trim().trim_start_matches('[').trim_end_matches(']');
    let mut code = Vec::new();
    for tok in cleaned.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        code.push(tok.parse::<i64>().map_err(|_| DtError::Syntax(tok.to_string()))?);
    }
    dt_to_pd(&code)
}

pub fn dt_to_pd(code: &[i64]) -> Result<PdCode, DtError> {
    let n = code.len();
    let mut seen = vec![false; 2 * n + 1];
    for &a in code {
        if a % 2 != 0 {
            return Err(DtError::Odd(a));
        }
        let v = a.unsigned_abs() as usize;
        if v < 2 || v > 2 * n {
            return Err(DtError::Range { value: a, n });
        }
        if seen[v] {
            return Err(DtError::Repeated(a));
        }
        seen[v] = true;
    }
    if n == 0 {
        return Ok(PdCode::default());
    }
    // Gauss sequence: position p (0-based) is visit p+1.
    let mut seq = vec![0usize; 2 * n];
    let mut occ = vec![(0usize, 0usize); n];
    for (k, &a) in code.iter().enumerate() {
        let odd = 2 * k;
        let even = a.unsigned_abs() as usize - 1;
        seq[odd] = k;
        seq[even] = k;
        occ[k] = (odd.min(even), odd.max(even));
    }
    let bits = propagate_bits(&seq, &occ).filter(|b| build(code, &occ, b).face_count() == n + 2);
    let bits = match bits {
        Some(b) => b,
        None if n <= 20 => brute_force(code, &occ).ok_or(DtError::NonRealizable)?,
        None => return Err(DtError::NonRealizable),
    };
    Ok(build(code, &occ, &bits))
}

/// Crossings met exactly once strictly between the two visits of each crossing.
fn inside_sets(seq: &[usize], occ: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let n = occ.len();
    occ.iter()
        .map(|&(p, q)| {
            let mut inside = vec![false; n];
            for &c in &seq[p + 1..q] {
                inside[c] = !inside[c];
            }
            inside
        })
        .collect()
}

fn propagate_bits(seq: &[usize], occ: &[(usize, usize)]) -> Option<Vec<i8>> {
    let n = occ.len();
    let inside = inside_sets(seq, occ);
    let mut bits = vec![0i8; n];
    for root in 0..n {
        if bits[root] != 0 {
            continue;
        }
        bits[root] = 1;
        let mut q = VecDeque::from([root]);
        while let Some(c) = q.pop_front() {
            for d in 0..n {
                if !inside[c][d] {
                    continue;
                }
                // Order the pair so that p < r < q < s.
                let (a, b) = if occ[c].0 < occ[d].0 { (c, d) } else { (d, c) };
                let common = (0..n).filter(|&e| inside[a][e] && inside[b][e]).count();
                let gap = occ[b].0 - occ[a].0;
                let product = if (common + gap + 1).is_multiple_of(2) { 1 } else { -1 };
                let want = bits[c] * product;
                if bits[d] == 0 {
                    bits[d] = want;
                    q.push_back(d);
                } else if bits[d] != want {
                    return None;
                }
            }
        }
    }
    Some(bits)
}

fn brute_force(code: &[i64], occ: &[(usize, usize)]) -> Option<Vec<i8>> {
    let n = occ.len();
    (0u64..1 << (n - 1)).find_map(|mask| {
        let bits: Vec<i8> = (0..n).map(|k| if k > 0 && mask >> (k - 1) & 1 == 1 { -1 } else { 1 }).collect();
        (build(code, occ, &bits).face_count() == n + 2).then_some(bits)
    })
}

fn build(code: &[i64], occ: &[(usize, usize)], bits: &[i8]) -> PdCode {
    let n = code.len() as u64;
    let arc_in = |p: usize| if p == 0 { 2 * n } else { p as u64 };
    let arc_out = |p: usize| p as u64 + 1;
    let crossings = code
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let (p, q) = occ[k];
            let even = a.unsigned_abs() as usize - 1;
            let odd = 2 * k;
            let under = if a < 0 { odd } else { even };
            let (pi, po, qi, qo) = (arc_in(p), arc_out(p), arc_in(q), arc_out(q));
            match (bits[k] > 0, under == p) {
                (true, true) => [pi, qi, po, qo],
                (true, false) => [qi, po, qo, pi],
                (false, true) => [pi, qo, po, qi],
                (false, false) => [qi, pi, qo, po],
            }
        })
        .collect();
    PdCode { crossings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_codes_are_planar() {
        for text in ["4 6 2", "4 6 8 2", "6 8 10 2 4", "4 8 10 2 6", "[4, 8, 12, 10, 2, 6]", "4 10 -14 -12 2 -8 -6"] {
            let pd = parse_dt(text).unwrap();
            assert_eq!(pd.face_count(), pd.len() + 2, "{text}");
            pd.validate().unwrap();
        }
    }

    #[test]
    fn errors() {
        assert_eq!(parse_dt("3 5"), Err(DtError::Odd(3)));
        assert_eq!(parse_dt("4 4 2"), Err(DtError::Repeated(4)));
        assert_eq!(parse_dt("4 x"), Err(DtError::Syntax("x".into())));
        assert!(matches!(parse_dt("4 6 10"), Err(DtError::Range { .. })));
        assert!(parse_dt("").unwrap().is_empty());
    }

    #[test]
    fn flipping_a_sign_changes_one_crossing() {
        let a = parse_dt("4 6 2").unwrap().signs().unwrap();
        let b = parse_dt("4 -6 2").unwrap().signs().unwrap();
        assert_eq!(a.iter().zip(&b).filter(|(x, y)| x != y).count(), 1);
    }

    #[test]
    fn all_negative_is_the_mirror() {
        let a = parse_dt("4 6 2").unwrap().signs().unwrap();
        let b = parse_dt("-4 -6 -2").unwrap().signs().unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
    }
}
