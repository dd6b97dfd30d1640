//! Sparse multivariate polynomials over tagged variables with exact
//! rational coefficients.
//!
//! Two variable families cover the whole crate. `x[l,i,j]` is the 0/1
//! indicator that function `l` maps domain point `i` to range value `j`;
//! `z[l,j]` is the frequency variable counting the preimages of `j`
//! under function `l`. Polynomials are canonical term maps: no zero
//! coefficients, no zero exponents, and a fixed graded-lexicographic
//! term order, so equality is structural and serialization is
//! bit-stable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::rat::{fmt_rat, parse_rat, rat, Rational};

/// A tagged variable.
///
/// The derived order (all `Raw` before all `Freq`, then lexicographic on
/// the index fields) is the fixed variable order used by the monomial
/// order and by every serialization.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VarId {
    /// `x[l,i,j]` — indicator that function `l` maps `i` to `j`.
    Raw { func: u8, dom: u16, range: u16 },
    /// `z[l,j]` — number of preimages of `j` under function `l`.
    Freq { func: u8, range: u16 },
}

impl VarId {
    pub fn raw(func: u8, dom: u16, range: u16) -> Self {
        VarId::Raw { func, dom, range }
    }

    pub fn freq(func: u8, range: u16) -> Self {
        VarId::Freq { func, range }
    }

    pub fn is_raw(&self) -> bool {
        matches!(self, VarId::Raw { .. })
    }

    pub fn is_freq(&self) -> bool {
        matches!(self, VarId::Freq { .. })
    }

    /// Function index `l` of the variable.
    pub fn func(&self) -> u8 {
        match *self {
            VarId::Raw { func, .. } | VarId::Freq { func, .. } => func,
        }
    }

    /// Range index `j` of the variable.
    pub fn range(&self) -> u16 {
        match *self {
            VarId::Raw { range, .. } | VarId::Freq { range, .. } => range,
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarId::Raw { func, dom, range } => write!(f, "x[{func},{dom},{range}]"),
            VarId::Freq { func, range } => write!(f, "z[{func},{range}]"),
        }
    }
}

/// A monomial: finite map from variables to positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: BTreeMap<VarId, u32>,
}

impl Monomial {
    /// The empty monomial (constant 1).
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial::from_pairs([(v, 1)])
    }

    /// Builds a monomial, dropping zero exponents and summing repeats.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut exps: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *exps.entry(v).or_insert(0) += e;
            }
        }
        Monomial { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Total degree: sum of exponents.
    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.exps.get(&v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &u32)> {
        self.exps.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.exps.keys()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, e) in &other.exps {
            *exps.entry(*v).or_insert(0) += e;
        }
        Monomial { exps }
    }

    /// Caps every exponent at 1 (`x^e = x` on 0/1-valued inputs).
    pub fn boolean_reduced(&self) -> Monomial {
        Monomial {
            exps: self.exps.keys().map(|v| (*v, 1)).collect(),
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic order on the fixed `VarId` order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut a = self.exps.iter();
            let mut b = other.exps.iter();
            let (mut na, mut nb) = (a.next(), b.next());
            loop {
                match (na, nb) {
                    (None, None) => return Ordering::Equal,
                    // The side that still has a variable is lex-larger:
                    // it has a positive exponent where the other has 0.
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => {
                                na = a.next();
                                nb = b.next();
                            }
                            ord => return ord,
                        },
                    },
                }
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, e) in &self.exps {
            if *e == 1 {
                write!(f, "*{v}")?;
            } else {
                write!(f, "*{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Total degree of a polynomial; the zero polynomial gets a dedicated
/// sentinel below every finite value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Degree {
    NegInf,
    Finite(u32),
}

impl Degree {
    pub fn finite(&self) -> Option<u32> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(*d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable {0} has no assigned value")]
    UnboundVariable(VarId),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A sparse polynomial in canonical form: a map from monomials to
/// nonzero rational coefficients. Two polynomials are equal iff their
/// term maps are equal.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(rat(1))
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_terms([(Monomial::one(), c)])
    }

    pub fn var(v: VarId) -> Self {
        Poly::from_terms([(Monomial::var(v), rat(1))])
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        Poly::from_terms([(m, c)])
    }

    /// Builds a polynomial from terms, merging repeats and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, keeping canonical form.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The coefficient of a monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value of the polynomial if it is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    /// All variables occurring with nonzero exponent.
    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().copied())
            .collect()
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.degree())
            .max()
            .map_or(Degree::NegInf, Degree::Finite)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Renames variables term by term. The map must be injective on the
    /// variables of `self` (it is in every use here: index transport).
    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_pairs(m.iter().map(|(v, e)| (f(*v), *e))),
                c.clone(),
            )
        }))
    }

    /// Exact evaluation; errs on the first variable missing from the
    /// assignment (in variable order).
    pub fn eval(&self, assignment: &BTreeMap<VarId, Rational>) -> Result<Rational, PolyError> {
        self.eval_fn(|v| assignment.get(&v).cloned())
    }

    pub fn eval_fn(
        &self,
        assignment: impl Fn(VarId) -> Option<Rational>,
    ) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut val = c.clone();
            for (v, e) in m.iter() {
                let x = assignment(*v).ok_or(PolyError::UnboundVariable(*v))?;
                if x.is_zero() {
                    val = Rational::zero();
                    break;
                }
                for _ in 0..*e {
                    val *= &x;
                }
            }
            total += val;
        }
        Ok(total)
    }

    /// Simultaneous substitution: variables in the map are replaced by
    /// the given polynomials, all others are kept.
    pub fn substitute(&self, subst: &BTreeMap<VarId, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (v, e) in m.iter() {
                let base = match subst.get(v) {
                    Some(p) => p.clone(),
                    None => Poly::var(*v),
                };
                term = &term * &base.pow(*e);
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// Canonical text form: terms in descending graded-lexicographic order,
/// each as `p/q` followed by `*var` or `*var^e` factors, joined by
/// ` + `. The zero polynomial prints as `0/1`. Serialize, parse and
/// serialize again is the identity on the text.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0/1");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}{}", fmt_rat(c), m)?;
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Poly::zero();
        let mut pos = 0usize;
        for piece in s.split(" + ") {
            let (m, c) = parse_term(piece, pos)?;
            out.add_term(m, c);
            pos += piece.len() + 3;
        }
        Ok(out)
    }
}

fn parse_term(piece: &str, base: usize) -> Result<(Monomial, Rational), PolyError> {
    let mut factors = piece.split('*');
    let coeff_txt = factors.next().unwrap_or("");
    let coeff = parse_rat(coeff_txt).map_err(|msg| PolyError::Parse { pos: base, msg })?;
    let mut pairs = Vec::new();
    let mut offset = coeff_txt.len() + 1;
    for factor in factors {
        let (var_txt, exp) = match factor.split_once('^') {
            Some((v, e)) => {
                let exp: u32 = e.trim().parse().map_err(|_| PolyError::Parse {
                    pos: base + offset,
                    msg: format!("invalid exponent `{e}`"),
                })?;
                (v, exp)
            }
            None => (factor, 1),
        };
        let var = parse_var(var_txt).map_err(|msg| PolyError::Parse {
            pos: base + offset,
            msg,
        })?;
        pairs.push((var, exp));
        offset += factor.len() + 1;
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

fn parse_var(s: &str) -> Result<VarId, String> {
    let s = s.trim();
    let (kind, rest) = s.split_at(1.min(s.len()));
    let body = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("invalid variable `{s}`"))?;
    let idx: Vec<&str> = body.split(',').collect();
    let parse_u16 = |t: &str| {
        t.trim()
            .parse::<u16>()
            .map_err(|_| format!("invalid index `{t}` in `{s}`"))
    };
    match (kind, idx.as_slice()) {
        ("x", [l, i, j]) => Ok(VarId::raw(
            parse_u16(l)? as u8,
            parse_u16(i)?,
            parse_u16(j)?,
        )),
        ("z", [l, j]) => Ok(VarId::freq(parse_u16(l)? as u8, parse_u16(j)?)),
        _ => Err(format!("invalid variable `{s}`")),
    }
}
