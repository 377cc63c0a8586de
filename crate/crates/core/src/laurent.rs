//! Sparse Laurent polynomials in one variable `T` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("evaluation at T = 0")]
    ZeroPoint,
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A Laurent polynomial stored as exponent -> nonzero coefficient.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigRational>,
}

fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(q_int(c))
    }

    pub fn monomial(c: BigRational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `T^k`.
    pub fn t_pow(k: i64) -> Self {
        Self::monomial(BigRational::one(), k)
    }

    /// Builds `sum c_k T^(low + k)` from integer coefficients.
    pub fn from_ints(low: i64, coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (low + k as i64, q_int(c))),
        )
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// A single term: the units of the Laurent ring over a field.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `max_exp - min_exp`, or `None` for zero.
    pub fn span(&self) -> Option<i64> {
        Some(self.max_exp()? - self.min_exp()?)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitutes `T -> T^-1`.
    pub fn invert_variable(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn is_palindromic(&self) -> bool {
        *self == self.invert_variable()
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn eval(&self, t0: &BigRational) -> Result<BigRational, LaurentError> {
        if t0.is_zero() {
            return Err(LaurentError::ZeroPoint);
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * pow_q(t0, *e);
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, t0: f64) -> Result<f64, LaurentError> {
        if t0 == 0.0 {
            return Err(LaurentError::ZeroPoint);
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| q_to_f64(c) * t0.powi(*e as i32))
            .sum())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / d` in the Laurent ring, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Division with remainder after clearing powers of `T` from both sides.
    /// The remainder is normalized to have nonnegative exponents below the divisor's span.
    pub fn div_rem(&self, d: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let dl = d.min_exp().unwrap();
        let dh = d.max_exp().unwrap();
        let lead = d.terms[&dh].clone();
        let al = self.min_exp().unwrap();
        // Work with ordinary polynomials: a = T^al A, d = T^dl D.
        let mut rem: BTreeMap<i64, BigRational> =
            self.terms.iter().map(|(e, c)| (e - al, c.clone())).collect();
        let dspan = dh - dl;
        let mut quot = LaurentPoly::zero();
        while let Some((&top, _)) = rem.iter().next_back() {
            if top < dspan {
                break;
            }
            let c = rem[&top].clone() / &lead;
            let k = top - dspan;
            for (e, dc) in &d.terms {
                let ex = e - dl + k;
                let v = rem.entry(ex).or_insert_with(BigRational::zero);
                *v -= &c * dc;
                if v.is_zero() {
                    rem.remove(&ex);
                }
            }
            quot.add_term(k, c);
        }
        let rem = LaurentPoly { terms: rem };
        (quot.shift(al - dl), rem)
    }

    /// Content: gcd of numerators over lcm of denominators, sign taken from the top coefficient.
    pub fn content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::zero();
        }
        let mut g = BigRational::new(num, den);
        if self.terms.values().next_back().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        g
    }

    /// `content * (T-1)^2 * rest`, with each factor shown only when it splits off exactly.
    pub fn factored_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let c = self.content();
        let mut rest = self.scale(&c.recip());
        let mut parts = Vec::new();
        if !c.is_one() {
            parts.push(c.to_string());
        }
        let sq = LaurentPoly::from_ints(0, &[1, -2, 1]);
        if let Some(q) = rest.div_exact(&sq) {
            parts.push("(T-1)^2".to_string());
            rest = q;
        }
        if !rest.is_one() || parts.is_empty() {
            parts.push(format!("({})", rest.to_text()));
        }
        parts.join(" * ")
    }

    /// Text form with ascending exponents, e.g. `-T^-2+2*T^-1-2+2*T-T^2`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let var = match *e {
                0 => String::new(),
                1 => "T".to_string(),
                k => format!("T^{k}"),
            };
            if var.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&var);
            } else {
                out.push_str(&format!("{a}*{var}"));
            }
        }
        out
    }

    /// JSON object mapping exponent strings to exact coefficient strings.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| (e.to_string(), serde_json::Value::String(c.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LaurentError> {
        let bad = |msg: &str| LaurentError::Parse {
            pos: 0,
            msg: msg.to_string(),
        };
        let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
        let mut p = Self::zero();
        for (k, c) in obj {
            let e: i64 = k.parse().map_err(|_| bad("bad exponent key"))?;
            let s = c.as_str().ok_or_else(|| bad("coefficient must be a string"))?;
            p.add_term(e, parse_rational(s).ok_or_else(|| bad("bad coefficient"))?);
        }
        Ok(p)
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn pow_q(t: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { t.recip() } else { t.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

pub(crate) fn q_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self.to_text())
    }
}

/// Serialized as the JSON object form (exponent string to exact rational string).
impl serde::Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        LaurentPoly::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Accepts sums of terms `c`, `c*T^k`, `T^k`, `T^(k)`; `t` and `x` are accepted for `T`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let src: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let err = |pos: usize, msg: &str| LaurentError::Parse {
            pos,
            msg: msg.to_string(),
        };
        if src.is_empty() {
            return Err(err(0, "empty input"));
        }
        // Split into signed terms at top-level +/- not following '^' or '('.
        let mut pieces: Vec<(usize, bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut cur_pos = src[0].0;
        let mut neg = false;
        let mut prev: Option<char> = None;
        for &(pos, ch) in &src {
            let splits = (ch == '+' || ch == '-') && !matches!(prev, Some('^') | Some('(') | None);
            if splits {
                pieces.push((cur_pos, neg, std::mem::take(&mut cur)));
                neg = ch == '-';
                cur_pos = pos;
            } else if prev.is_none() && (ch == '+' || ch == '-') {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        pieces.push((cur_pos, neg, cur));
        let mut p = LaurentPoly::zero();
        for (pos, neg, body) in pieces {
            if body.is_empty() {
                return Err(err(pos, "empty term"));
            }
            let (coef_str, var_str) = match body.find(['T', 't', 'x']) {
                None => (body.as_str(), None),
                Some(k) => {
                    let c = body[..k].trim_end_matches('*');
                    (c, Some(&body[k + 1..]))
                }
            };
            let mut c = if coef_str.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef_str).ok_or_else(|| err(pos, "bad coefficient"))?
            };
            if neg {
                c = -c;
            }
            let e = match var_str {
                None => 0,
                Some("") => 1,
                Some(rest) => {
                    let rest = rest
                        .strip_prefix('^')
                        .ok_or_else(|| err(pos, "expected '^' after variable"))?;
                    let rest = rest.trim_start_matches('(').trim_end_matches(')');
                    rest.parse::<i64>().map_err(|_| err(pos, "bad exponent"))?
                }
            };
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        *self += &rhs;
    }
}

impl SubAssign<LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: LaurentPoly) {
        *self -= &rhs;
    }
}

/// Free-function forms of the operators.
pub fn lp_add(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a + b
}

pub fn lp_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a * b
}

pub fn lp_eval(p: &LaurentPoly, t0: &BigRational) -> Result<BigRational, LaurentError> {
    p.eval(t0)
}

pub fn lp_invert_variable(p: &LaurentPoly) -> LaurentPoly {
    p.invert_variable()
}

pub fn lp_shift(p: &LaurentPoly, k: i64) -> LaurentPoly {
    p.shift(k)
}
