//! Symbolic replay of the invariance argument.
//!
//! Expressions are polynomials in atoms `g(a, b)` over Laurent coefficients. The two families of
//! g-rules (rows of `AG = I` and columns of `GA = I`) rewrite atoms across a crossing; applying them
//! until no index inside a move's picture remains leaves only atoms on the exit edges, which are
//! shared by both sides. A move identity holds when the two local contributions then agree.
//!
//! Kronecker deltas are resolved only from the context: two names are equal when they are the same
//! symbol or declared equal, unequal when declared distinct, and anything else is an error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::diagram::MoveKind;
use crate::laurent::LaurentPoly;

pub const DEFAULT_DEGREE_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GIndex(pub String);

impl GIndex {
    pub fn new(name: &str) -> Self {
        GIndex(name.to_string())
    }
}

impl fmt::Display for GIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn ix(name: &str) -> GIndex {
    GIndex::new(name)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GRuleError {
    #[error("cannot decide whether {0} and {1} are equal")]
    UnresolvedDelta(GIndex, GIndex),
    #[error("{0} and {1} are declared both equal and distinct")]
    Contradiction(GIndex, GIndex),
    #[error("product of degree {0} exceeds the cap {1}")]
    DegreeCap(usize, usize),
    #[error("rule system for {0} has a non-invertible pivot {1}")]
    Singular(String, LaurentPoly),
    #[error("rewriting did not reach a fixed point after {0} rounds")]
    NoFixedPoint(usize),
}

/// Equality and distinctness declarations among index symbols.
#[derive(Clone, Debug, Default)]
pub struct Context {
    equal: BTreeSet<(GIndex, GIndex)>,
    distinct: BTreeSet<(GIndex, GIndex)>,
}

fn pair(a: &GIndex, b: &GIndex) -> (GIndex, GIndex) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every pair of the given names is declared distinct.
    pub fn all_distinct<'a>(names: impl IntoIterator<Item = &'a GIndex>) -> Self {
        let names: Vec<&GIndex> = names.into_iter().collect();
        let mut ctx = Self::new();
        for (k, a) in names.iter().enumerate() {
            for b in &names[k + 1..] {
                if a != b {
                    ctx.distinct.insert(pair(a, b));
                }
            }
        }
        ctx
    }

    pub fn declare_distinct(&mut self, a: &GIndex, b: &GIndex) -> Result<(), GRuleError> {
        if a == b || self.equal.contains(&pair(a, b)) {
            return Err(GRuleError::Contradiction(a.clone(), b.clone()));
        }
        self.distinct.insert(pair(a, b));
        Ok(())
    }

    pub fn declare_equal(&mut self, a: &GIndex, b: &GIndex) -> Result<(), GRuleError> {
        if self.distinct.contains(&pair(a, b)) {
            return Err(GRuleError::Contradiction(a.clone(), b.clone()));
        }
        if a != b {
            self.equal.insert(pair(a, b));
        }
        Ok(())
    }

    pub fn delta(&self, a: &GIndex, b: &GIndex) -> Result<bool, GRuleError> {
        if a == b || self.equal.contains(&pair(a, b)) {
            Ok(true)
        } else if self.distinct.contains(&pair(a, b)) {
            Ok(false)
        } else {
            Err(GRuleError::UnresolvedDelta(a.clone(), b.clone()))
        }
    }
}

pub type Atom = (GIndex, GIndex);
type Monomial = Vec<Atom>;

/// Canonical polynomial in atoms: monomials are sorted atom lists, zero coefficients dropped.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GExpr {
    terms: BTreeMap<Monomial, LaurentPoly>,
}

impl GExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(p: LaurentPoly) -> Self {
        let mut e = Self::zero();
        e.push(Vec::new(), p);
        e
    }

    pub fn int(c: i64) -> Self {
        Self::scalar(LaurentPoly::from_int(c))
    }

    pub fn half() -> Self {
        Self::scalar(LaurentPoly::constant(BigRational::new(BigInt::one(), BigInt::from(2))))
    }

    pub fn atom(a: &GIndex, b: &GIndex) -> Self {
        let mut e = Self::zero();
        e.push(vec![(a.clone(), b.clone())], LaurentPoly::one());
        e
    }

    pub fn g(a: &str, b: &str) -> Self {
        Self::atom(&ix(a), &ix(b))
    }

    fn push(&mut self, mut m: Monomial, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        m.sort();
        let slot = self.terms.entry(m.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Atom], &LaurentPoly)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms.keys().flatten().cloned().collect()
    }

    pub fn add(&self, other: &GExpr) -> GExpr {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GExpr) -> GExpr {
        self.add(&other.scale(&LaurentPoly::from_int(-1)))
    }

    pub fn scale(&self, p: &LaurentPoly) -> GExpr {
        let mut out = GExpr::zero();
        for (m, c) in &self.terms {
            out.push(m.clone(), c * p);
        }
        out
    }

    pub fn mul(&self, other: &GExpr) -> Result<GExpr, GRuleError> {
        self.mul_capped(other, DEFAULT_DEGREE_CAP)
    }

    pub fn mul_capped(&self, other: &GExpr, cap: usize) -> Result<GExpr, GRuleError> {
        let deg = self.degree() + other.degree();
        if !self.is_zero() && !other.is_zero() && deg > cap {
            return Err(GRuleError::DegreeCap(deg, cap));
        }
        let mut out = GExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                m.extend(mb.iter().cloned());
                out.push(m, ca * cb);
            }
        }
        Ok(out)
    }

    /// Coefficient of a single atom in the linear part.
    fn linear_coeff(&self, a: &Atom) -> LaurentPoly {
        self.terms.get(&vec![a.clone()]).cloned().unwrap_or_default()
    }

    fn without_atom(&self, a: &Atom) -> GExpr {
        let mut out = self.clone();
        out.terms.remove(&vec![a.clone()]);
        out
    }

    /// Replaces atoms by linear expressions, multiplying out each monomial.
    pub fn substitute(&self, subst: &BTreeMap<Atom, GExpr>) -> GExpr {
        let mut out = GExpr::zero();
        for (m, c) in &self.terms {
            let mut acc = GExpr::scalar(c.clone());
            for a in m {
                let f = subst.get(a).cloned().unwrap_or_else(|| GExpr::atom(&a.0, &a.1));
                // Substitutions are linear, so the degree never grows.
                acc = acc.mul_capped(&f, usize::MAX).unwrap();
            }
            out = out.add(&acc);
        }
        out
    }

    /// Evaluates with `g(a, b) = value(a, b)`, exactly.
    pub fn evaluate<F>(&self, mut value: F) -> LaurentPolyFraction
    where
        F: FnMut(&GIndex, &GIndex) -> LaurentPolyFraction,
    {
        let mut out = LaurentPolyFraction::from(LaurentPoly::zero());
        for (m, c) in &self.terms {
            let mut acc = LaurentPolyFraction::from(c.clone());
            for (a, b) in m {
                acc = acc.mul(&value(a, b));
            }
            out = out.add(&acc);
        }
        out
    }
}

impl fmt::Display for GExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (a, b) in m {
                write!(f, "*g[{a},{b}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `num / den` with Laurent polynomials; only used to instantiate expressions on real diagrams.
#[derive(Clone, Debug)]
pub struct LaurentPolyFraction {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl From<LaurentPoly> for LaurentPolyFraction {
    fn from(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }
}

impl LaurentPolyFraction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        Self { num, den }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone());
        }
        Self::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn same_value(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

fn t_pow(k: i64) -> LaurentPoly {
    LaurentPoly::t_pow(k)
}

fn monomial_inverse(p: &LaurentPoly) -> Option<LaurentPoly> {
    if !p.is_monomial() {
        return None;
    }
    let (e, c) = p.terms().next()?;
    Some(LaurentPoly::monomial(c.recip(), -e))
}

/// A crossing of a local picture: sign, incoming over and under edges and their successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCrossing {
    pub s: i32,
    pub i: GIndex,
    pub j: GIndex,
    pub i_plus: GIndex,
    pub j_plus: GIndex,
}

/// One g-rule family member: a crossing, or the end conditions of the long knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Crossing(LocalCrossing),
    /// `g(last, b) = delta(last, b)`.
    Last(GIndex),
    /// `g(a, first) = delta(a, first)`.
    First(GIndex),
}

fn delta_expr(ctx: &Context, a: &GIndex, b: &GIndex) -> Result<GExpr, GRuleError> {
    Ok(if ctx.delta(a, b)? { GExpr::int(1) } else { GExpr::zero() })
}

/// Solves the two linear rules `x_u = rhs_u` (u over i, j) in which the unknowns may reappear.
fn solve_pair(
    unknowns: [Atom; 2],
    mut rhs: [GExpr; 2],
    label: &str,
) -> Result<BTreeMap<Atom, GExpr>, GRuleError> {
    if unknowns[0] == unknowns[1] {
        // Only possible for a degenerate crossing; never built by the checks.
        return Err(GRuleError::Singular(label.to_string(), LaurentPoly::zero()));
    }
    // Eliminate x_0 from the second rule, then solve the second, then back-substitute.
    let (x0, x1) = (&unknowns[0], &unknowns[1]);
    let a00 = rhs[0].linear_coeff(x0);
    let piv0 = LaurentPoly::one() - &a00;
    let inv0 = monomial_inverse(&piv0).ok_or_else(|| GRuleError::Singular(label.to_string(), piv0.clone()))?;
    let r0 = rhs[0].without_atom(x0).scale(&inv0); // x0 = r0 (may still mention x1)
    let mut s = BTreeMap::new();
    s.insert(x0.clone(), r0.clone());
    rhs[1] = rhs[1].substitute(&s);
    let a11 = rhs[1].linear_coeff(x1);
    let piv1 = LaurentPoly::one() - &a11;
    let inv1 = monomial_inverse(&piv1).ok_or_else(|| GRuleError::Singular(label.to_string(), piv1.clone()))?;
    let r1 = rhs[1].without_atom(x1).scale(&inv1);
    let mut s = BTreeMap::new();
    s.insert(x1.clone(), r1.clone());
    let r0 = r0.substitute(&s);
    Ok(BTreeMap::from([(x0.clone(), r0), (x1.clone(), r1)]))
}

/// Rewrites every atom whose first index is an incoming edge of the rule's crossing
/// (or the last edge), using the row relations of `AG = I`.
pub fn apply_car_rule(e: &GExpr, rule: &Rule, ctx: &Context) -> Result<GExpr, GRuleError> {
    let mut subst = BTreeMap::new();
    for (a, b) in e.atoms() {
        match rule {
            Rule::Last(last) if &a == last => {
                subst.insert((a.clone(), b.clone()), delta_expr(ctx, &a, &b)?);
            }
            Rule::Crossing(c) if a == c.i || a == c.j => {
                if subst.contains_key(&(c.i.clone(), b.clone())) {
                    continue;
                }
                let ts = t_pow(c.s as i64);
                let ri = delta_expr(ctx, &c.i, &b)?
                    .add(&GExpr::atom(&c.i_plus, &b).scale(&ts))
                    .add(&GExpr::atom(&c.j_plus, &b).scale(&(LaurentPoly::one() - &ts)));
                let rj = delta_expr(ctx, &c.j, &b)?.add(&GExpr::atom(&c.j_plus, &b));
                let sol = solve_pair([(c.i.clone(), b.clone()), (c.j.clone(), b.clone())], [ri, rj], "car rule")?;
                subst.extend(sol);
            }
            _ => {}
        }
    }
    Ok(e.substitute(&subst))
}

/// Rewrites every atom whose second index is an incoming edge of the rule's crossing
/// (or the first edge), using the column relations of `GA = I`.
pub fn apply_counter_rule(e: &GExpr, rule: &Rule, ctx: &Context) -> Result<GExpr, GRuleError> {
    let mut subst = BTreeMap::new();
    for (a, b) in e.atoms() {
        match rule {
            Rule::First(first) if &b == first => {
                subst.insert((a.clone(), b.clone()), delta_expr(ctx, &a, &b)?);
            }
            Rule::Crossing(c) if b == c.i || b == c.j => {
                if subst.contains_key(&(a.clone(), c.i.clone())) {
                    continue;
                }
                let s = c.s as i64;
                let ri = GExpr::atom(&a, &c.i_plus).sub(&delta_expr(ctx, &a, &c.i_plus)?).scale(&t_pow(-s));
                let rj = GExpr::atom(&a, &c.j_plus)
                    .sub(&GExpr::atom(&a, &c.i).scale(&(LaurentPoly::one() - t_pow(s))))
                    .sub(&delta_expr(ctx, &a, &c.j_plus)?);
                let sol = solve_pair([(a.clone(), c.i.clone()), (a.clone(), c.j.clone())], [ri, rj], "counter rule")?;
                subst.extend(sol);
            }
            _ => {}
        }
    }
    Ok(e.substitute(&subst))
}

/// Applies the rules until no atom mentions an index of `eliminate`. `order` permutes the rules
/// within each round; the fixed point does not depend on it.
pub fn reduce(
    e: &GExpr,
    rules: &[Rule],
    eliminate: &BTreeSet<GIndex>,
    ctx: &Context,
    order: Option<&[usize]>,
) -> Result<GExpr, GRuleError> {
    const MAX_ROUNDS: usize = 64;
    let default: Vec<usize> = (0..rules.len()).collect();
    let order = order.unwrap_or(&default);
    let mut cur = e.clone();
    for _ in 0..MAX_ROUNDS {
        if cur.atoms().iter().all(|(a, b)| !eliminate.contains(a) && !eliminate.contains(b)) {
            return Ok(cur);
        }
        for &k in order {
            cur = apply_car_rule(&cur, &rules[k], ctx)?;
            cur = apply_counter_rule(&cur, &rules[k], ctx)?;
        }
    }
    Err(GRuleError::NoFixedPoint(MAX_ROUNDS))
}

/// `R_1(c)` as an expression.
pub fn r1_expr(c: &LocalCrossing) -> GExpr {
    let (i, j, jp) = (&c.i, &c.j, &c.j_plus);
    let g = GExpr::atom;
    let inner = g(jp, j).add(&g(j, jp)).sub(&g(i, j));
    let first = g(j, i).mul(&inner).unwrap();
    let second = g(i, i).mul(&g(j, jp).sub(&GExpr::int(1))).unwrap();
    first.sub(&second).sub(&GExpr::half()).scale(&LaurentPoly::from_int(c.s as i64))
}

/// `-phi (g(k, k) - 1/2)`.
pub fn rotation_expr(k: &GIndex, phi: i64) -> GExpr {
    GExpr::atom(k, k).sub(&GExpr::half()).scale(&LaurentPoly::from_int(-phi))
}

/// One side of a move: crossings on named edges, rotation numbers, and strand order.
#[derive(Clone, Debug)]
pub struct LocalSide {
    pub crossings: Vec<LocalCrossing>,
    pub rotations: Vec<(GIndex, i64)>,
}

impl LocalSide {
    /// Strands list edge names in travel order; crossings are `(s, over-in, under-in)`.
    pub fn build(strands: &[&[&str]], crossings: &[(i32, &str, &str)], rotations: &[(&str, i64)]) -> Self {
        let mut succ = BTreeMap::new();
        for s in strands {
            for w in s.windows(2) {
                succ.insert(w[0], w[1]);
            }
        }
        let crossings = crossings
            .iter()
            .map(|&(s, i, j)| LocalCrossing {
                s,
                i: ix(i),
                j: ix(j),
                i_plus: ix(succ[i]),
                j_plus: ix(succ[j]),
            })
            .collect();
        Self {
            crossings,
            rotations: rotations.iter().map(|&(k, p)| (ix(k), p)).collect(),
        }
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.crossings.iter().cloned().map(Rule::Crossing).collect()
    }

    /// Indices to push out of the picture: the incoming edges of its crossings.
    pub fn internal(&self) -> BTreeSet<GIndex> {
        self.crossings.iter().flat_map(|c| [c.i.clone(), c.j.clone()]).collect()
    }

    /// Local part of `rho_1 / Delta^2`.
    pub fn contribution(&self) -> GExpr {
        let mut e = GExpr::zero();
        for c in &self.crossings {
            e = e.add(&r1_expr(c));
        }
        for (k, phi) in &self.rotations {
            e = e.add(&rotation_expr(k, *phi));
        }
        e
    }
}

/// The two sides of a move, with all names on them.
#[derive(Clone, Debug)]
pub struct LocalMove {
    pub kind: MoveKind,
    pub left: LocalSide,
    pub right: LocalSide,
    pub names: Vec<GIndex>,
}

/// Built-in pictures, matching the move engine's table. R2b is parametrised by the sign of its
/// first crossing.
pub fn local_move(kind: MoveKind, sign: i32) -> LocalMove {
    let i3: &[&str] = &["i", "i+", "i++"];
    let j3: &[&str] = &["j", "j+", "j++"];
    let k3: &[&str] = &["k", "k+", "k++"];
    let (strands, left, right): (Vec<&[&str]>, LocalSide, LocalSide) = match kind {
        MoveKind::R1l => (
            vec![i3],
            LocalSide::build(&[i3], &[(1, "i+", "i")], &[("i+", 1)]),
            LocalSide::build(&[], &[], &[]),
        ),
        MoveKind::R1r => (
            vec![i3],
            LocalSide::build(&[i3], &[(1, "i", "i+")], &[("i+", -1)]),
            LocalSide::build(&[], &[], &[]),
        ),
        MoveKind::R2b => (
            vec![i3, j3],
            LocalSide::build(&[i3, j3], &[(sign, "i", "j"), (-sign, "i+", "j+")], &[]),
            LocalSide::build(&[], &[], &[]),
        ),
        MoveKind::R2c => (
            vec![i3, j3],
            LocalSide::build(&[i3, j3], &[(-1, "i", "j+"), (1, "i+", "j")], &[("j+", 1)]),
            LocalSide::build(&[], &[], &[("j++", 1)]),
        ),
        MoveKind::R3 => (
            vec![i3, j3, k3],
            LocalSide::build(&[i3, j3, k3], &[(1, "j", "k"), (1, "i", "k+"), (1, "i+", "j+")], &[]),
            LocalSide::build(&[i3, j3, k3], &[(1, "i", "j"), (1, "i+", "k"), (1, "j+", "k+")], &[]),
        ),
        MoveKind::SwPlus | MoveKind::SwMinus => {
            let s = if kind == MoveKind::SwPlus { 1 } else { -1 };
            let i2: &[&str] = &["i", "i+"];
            let j2: &[&str] = &["j", "j+"];
            (
                vec![i2, j2],
                LocalSide::build(&[i2, j2], &[(s, "i", "j")], &[]),
                LocalSide::build(&[i2, j2], &[(s, "i", "j")], &[("i", 1), ("j", 1), ("i+", -1), ("j+", -1)]),
            )
        }
    };
    let names = strands.iter().flat_map(|s| s.iter().map(|n| ix(n))).collect();
    LocalMove { kind, left, right, names }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub kind: MoveKind,
    pub holds: bool,
    pub reduced_difference: GExpr,
}

/// Reduces both sides of a picture to exit atoms and subtracts.
pub fn reduced_difference(m: &LocalMove, order: Option<&[usize]>) -> Result<GExpr, GRuleError> {
    let ctx = Context::all_distinct(&m.names);
    let l = reduce(&m.left.contribution(), &m.left.rules(), &m.left.internal(), &ctx, order)?;
    let r = reduce(&m.right.contribution(), &m.right.rules(), &m.right.internal(), &ctx, order)?;
    Ok(l.sub(&r))
}

/// Checks one of the six moves the invariance argument needs. R2b is checked for both signs.
pub fn check_move_identity(kind: MoveKind) -> Result<IdentityReport, GRuleError> {
    let signs: &[i32] = if kind == MoveKind::R2b { &[1, -1] } else { &[1] };
    let mut diff = GExpr::zero();
    for &s in signs {
        diff = reduced_difference(&local_move(kind, s), None)?;
        if !diff.is_zero() {
            break;
        }
    }
    Ok(IdentityReport {
        kind,
        holds: diff.is_zero(),
        reduced_difference: diff,
    })
}

/// The moves whose identities are replayed, in the order they are reported.
pub const CHECKED_MOVES: [MoveKind; 6] =
    [MoveKind::R3, MoveKind::R2c, MoveKind::R1l, MoveKind::R1r, MoveKind::R2b, MoveKind::SwPlus];

pub fn check_all() -> Result<Vec<IdentityReport>, GRuleError> {
    CHECKED_MOVES.iter().map(|&k| check_move_identity(k)).collect()
}

/// Reduces a picture's contributions under a random rule order, for confluence testing.
pub fn reduced_difference_shuffled(m: &LocalMove, rng: &mut impl Rng) -> Result<GExpr, GRuleError> {
    let n = m.left.crossings.len().max(m.right.crossings.len());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let ctx = Context::all_distinct(&m.names);
    let side = |s: &LocalSide, order: &[usize]| {
        let o: Vec<usize> = order.iter().copied().filter(|&k| k < s.crossings.len()).collect();
        reduce(&s.contribution(), &s.rules(), &s.internal(), &ctx, Some(&o))
    };
    Ok(side(&m.left, &order)?.sub(&side(&m.right, &order)?))
}
