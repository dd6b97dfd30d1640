//! Multisymmetric polynomial algebra.
//!
//! A multisymmetric polynomial in `n` vectors of `m` variables is one
//! invariant under permuting the vectors. Two views of the same machinery
//! appear in this crate:
//!
//! * rows view: the vectors are the domain points of one function and the
//!   components are range values (`x[l,i,*]` rows), used for symmetrizing
//!   indicator polynomials into frequency polynomials;
//! * columns view: the vectors are the range values and the components
//!   are the functions (`(z[1,j],...,z[k,j])` columns), used for moving
//!   frequency polynomials between range sizes.
//!
//! The module provides power sums `P_lambda`, orbit monomials `mon_Omega`,
//! the decomposition of orbit monomials into power-sum products, the
//! permutation-average symmetrization operator, and the range
//! restrict/lift maps built on top of the decomposition.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{Monomial, Poly, VarId};
use crate::rat::{rat, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MultisymError {
    #[error("term of degree {degree} cannot be symmetrized over a domain of size {domain}")]
    TermDegreeExceedsDomain { degree: usize, domain: u16 },
    #[error("expected a variable of function <= {max_func}, found {var}")]
    UnexpectedFunction { var: VarId, max_func: u8 },
    #[error("expected {expected} variables, found {var}")]
    WrongVariableKind { var: VarId, expected: &'static str },
    #[error("variable {var} exceeds the declared bound {bound}")]
    IndexOutOfBounds { var: VarId, bound: u16 },
    #[error("lifted range {m} must exceed the source range {m_prime}")]
    RangeNotLarger { m_prime: u16, m: u16 },
    #[error("source range {m_prime} is below the support bound {support}")]
    RangeBelowSupport { m_prime: u16, support: u16 },
    #[error("matrix parse error: {0}")]
    Parse(String),
}

/// An `n x m` matrix of nonnegative integer exponents indexing an orbit
/// monomial. Canonical form sorts the rows descending lexicographically;
/// canonically equal matrices index the same orbit monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExponentMatrix {
    rows: Vec<Vec<u32>>,
}

impl ExponentMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self, MultisymError> {
        if rows.is_empty() {
            return Err(MultisymError::Parse("matrix needs at least one row".into()));
        }
        let m = rows[0].len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(MultisymError::Parse("ragged rows".into()));
        }
        Ok(ExponentMatrix { rows })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        ExponentMatrix {
            rows: vec![vec![0; m]; n],
        }
    }

    /// Number of vectors (rows).
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Variables per vector (columns).
    pub fn m(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// `|Omega|_1`: the sum of all entries.
    pub fn weight(&self) -> u32 {
        self.rows.iter().flatten().sum()
    }

    pub fn nonzero_row_count(&self) -> usize {
        self.rows.iter().filter(|r| r.iter().any(|&e| e > 0)).count()
    }

    /// Rows sorted descending lexicographically.
    pub fn canonical(&self) -> ExponentMatrix {
        let mut rows = self.rows.clone();
        rows.sort_unstable_by(|a, b| b.cmp(a));
        ExponentMatrix { rows }
    }

    /// Orbit size under row permutations: `n! / prod(multiplicities!)`.
    pub fn orbit_size(&self) -> u64 {
        let mut counts: BTreeMap<&Vec<u32>, u64> = BTreeMap::new();
        for r in &self.rows {
            *counts.entry(r).or_insert(0) += 1;
        }
        let mut size = 1u64;
        for i in 1..=self.n() as u64 {
            size *= i;
        }
        for c in counts.values() {
            for i in 1..=*c {
                size /= i;
            }
        }
        size
    }
}

/// Text form `a,b;c,d`: rows separated by `;`, entries by `,`.
impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl FromStr for ExponentMatrix {
    type Err = MultisymError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = Vec::new();
        for row_txt in s.split(';') {
            let row: Result<Vec<u32>, _> = row_txt
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| MultisymError::Parse(format!("invalid entry `{e}`")))
                })
                .collect();
            rows.push(row?);
        }
        ExponentMatrix::new(rows)
    }
}

/// Exponent row `lambda` indexing the power sum `P_lambda`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct PowerSumIndex(pub Vec<u32>);

impl PowerSumIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for PowerSumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "P({})", parts.join(","))
    }
}

/// A rational linear combination of products of power sums. Each product
/// is a sorted multiset of `PowerSumIndex` values.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PowerSumExpression {
    terms: BTreeMap<Vec<PowerSumIndex>, Rational>,
}

impl PowerSumExpression {
    pub fn zero() -> Self {
        PowerSumExpression::default()
    }

    pub fn term(product: Vec<PowerSumIndex>, coeff: Rational) -> Self {
        let mut e = PowerSumExpression::zero();
        e.add_term(product, coeff);
        e
    }

    pub fn add_term(&mut self, mut product: Vec<PowerSumIndex>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        product.sort_unstable();
        let entry = self.terms.entry(product).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            let key: Vec<Vec<PowerSumIndex>> = self
                .terms
                .iter()
                .filter(|(_, c)| c.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &PowerSumExpression, scale: &Rational) {
        for (product, coeff) in &other.terms {
            self.add_term(product.clone(), coeff * scale);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<PowerSumIndex>, &Rational)> {
        self.terms.iter()
    }

    /// Largest `|Omega'|_1` over the index multisets used.
    pub fn max_weight(&self) -> u32 {
        self.terms
            .keys()
            .map(|p| p.iter().map(PowerSumIndex::degree).sum())
            .max()
            .unwrap_or(0)
    }

    /// Re-expands the expression into an explicit polynomial over `n`
    /// vectors laid out by `layout`.
    pub fn expand(&self, n: u16, layout: &VectorLayout) -> Poly {
        let mut out = Poly::zero();
        for (product, coeff) in &self.terms {
            let mut term = Poly::constant(coeff.clone());
            for lambda in product {
                term = &term * &power_sum(lambda, n, layout);
            }
            out = &out + &term;
        }
        out
    }
}

impl fmt::Display for PowerSumExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0/1");
        }
        for (idx, (product, coeff)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", crate::rat::fmt_rat(coeff))?;
            for lambda in product {
                write!(f, "*{lambda}")?;
            }
        }
        Ok(())
    }
}

/// How vector/component indices map onto concrete variables.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VectorLayout {
    /// Vector `i` is domain point `i` of function `func`; component `c`
    /// is range value `c`. Variables are `x[func,i,c]`.
    RawRows { func: u8 },
    /// Vector `j` is range value `j`; component `c` is function `c`.
    /// Variables are `z[c,j]`.
    FreqColumns,
}

impl VectorLayout {
    pub fn var(&self, vector: u16, component: u16) -> VarId {
        match *self {
            VectorLayout::RawRows { func } => VarId::raw(func, vector, component),
            VectorLayout::FreqColumns => VarId::freq(component as u8, vector),
        }
    }
}

/// The power sum `P_lambda = sum_{i in [n]} X_i^lambda`.
///
/// `P_0 = n` (every `X_i^0` is 1), and `deg P_lambda = |lambda|_1`.
pub fn power_sum(lambda: &PowerSumIndex, n: u16, layout: &VectorLayout) -> Poly {
    if lambda.is_zero() {
        return Poly::constant(rat(n as i64));
    }
    let mut out = Poly::zero();
    for i in 1..=n {
        let mono = Monomial::from_pairs(
            lambda
                .0
                .iter()
                .enumerate()
                .map(|(c, &e)| (layout.var(i, (c + 1) as u16), e)),
        );
        out.add_term(mono, rat(1));
    }
    out
}

/// The orbit monomial `mon_Omega = sum_{Lambda in S_n Omega} X^Lambda`:
/// one term per distinct row arrangement, each with coefficient 1.
pub fn orbit_monomial(omega: &ExponentMatrix, layout: &VectorLayout) -> Poly {
    let mut remaining: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for row in omega.rows() {
        *remaining.entry(row.clone()).or_insert(0) += 1;
    }
    let mut out = Poly::zero();
    let mut arrangement: Vec<Vec<u32>> = Vec::with_capacity(omega.n());
    distinct_arrangements(&mut remaining, omega.n(), &mut arrangement, &mut |rows| {
        let mono = Monomial::from_pairs(rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(c, &e)| (layout.var((i + 1) as u16, (c + 1) as u16), e))
        }));
        out.add_term(mono, rat(1));
    });
    out
}

fn distinct_arrangements(
    remaining: &mut BTreeMap<Vec<u32>, usize>,
    slots: usize,
    prefix: &mut Vec<Vec<u32>>,
    visit: &mut impl FnMut(&[Vec<u32>]),
) {
    if prefix.len() == slots {
        visit(prefix);
        return;
    }
    let choices: Vec<Vec<u32>> = remaining
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(r, _)| r.clone())
        .collect();
    for row in choices {
        *remaining.get_mut(&row).unwrap() -= 1;
        prefix.push(row.clone());
        distinct_arrangements(remaining, slots, prefix, visit);
        prefix.pop();
        *remaining.get_mut(&row).unwrap() += 1;
    }
}

fn decompose_memo() -> &'static Mutex<HashMap<ExponentMatrix, PowerSumExpression>> {
    static MEMO: OnceLock<Mutex<HashMap<ExponentMatrix, PowerSumExpression>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Expresses `mon_Omega` as a rational combination of products
/// `P_{Omega'_1} ... P_{Omega'_n}` with `|Omega'|_1 <= |Omega|_1`.
///
/// The recursion expands the product of the row power sums of `Omega`
/// exactly: assignments placing distinct nonzero rows on distinct vectors
/// reproduce the orbit of `Omega`; assignments merging rows produce orbit
/// monomials with strictly fewer nonzero rows, which recurse. Results are
/// memoized on the canonical matrix.
pub fn decompose_mon(omega: &ExponentMatrix) -> PowerSumExpression {
    let omega = omega.canonical();
    if let Some(hit) = decompose_memo().lock().unwrap().get(&omega) {
        return hit.clone();
    }

    let n = omega.n();
    // Multiplicity of each product monomial X^{Omega'} in the expansion of
    // prod_i P_{Omega_i}, keyed by the full matrix Omega'.
    let mut expansion: BTreeMap<Vec<Vec<u32>>, u128> = BTreeMap::new();
    expansion.insert(vec![vec![0; omega.m()]; n], 1);
    let mut zero_rows = 0u32;
    for row in omega.rows() {
        if row.iter().all(|&e| e == 0) {
            zero_rows += 1;
            continue;
        }
        let mut next: BTreeMap<Vec<Vec<u32>>, u128> = BTreeMap::new();
        for (mat, count) in &expansion {
            for target in 0..n {
                let mut mat2 = mat.clone();
                for (c, &e) in row.iter().enumerate() {
                    mat2[target][c] += e;
                }
                *next.entry(mat2).or_insert(0) += count;
            }
        }
        expansion = next;
    }
    // A P_0 factor contributes a scalar n per zero row.
    let zero_factor = (n as u128).pow(zero_rows);

    // Group by orbit. Every member of an orbit occurs with the same
    // multiplicity, so the per-representative coefficient is exact.
    let mut orbit_coeffs: BTreeMap<ExponentMatrix, u128> = BTreeMap::new();
    for (mat, count) in expansion {
        let key = ExponentMatrix { rows: mat }.canonical();
        *orbit_coeffs.entry(key).or_insert(0) += count * zero_factor;
    }
    let mut per_rep: Vec<(ExponentMatrix, u128)> = Vec::new();
    for (key, total) in orbit_coeffs {
        let orbit = key.orbit_size() as u128;
        debug_assert_eq!(total % orbit, 0);
        per_rep.push((key, total / orbit));
    }

    let self_coeff = per_rep
        .iter()
        .find(|(key, _)| *key == omega)
        .map(|(_, c)| *c)
        .expect("expansion always contains the orbit of Omega itself");
    let inv_self = Rational::new(1.into(), self_coeff.into());

    let mut result = PowerSumExpression::term(
        omega
            .rows()
            .iter()
            .map(|r| PowerSumIndex(r.clone()))
            .collect(),
        inv_self.clone(),
    );
    for (key, coeff) in per_rep {
        if key == omega {
            continue;
        }
        debug_assert!(key.nonzero_row_count() < omega.nonzero_row_count());
        let sub = decompose_mon(&key);
        result.add_scaled(&sub, &(-Rational::from_integer(coeff.into()) * &inv_self));
    }

    decompose_memo()
        .lock()
        .unwrap()
        .insert(omega, result.clone());
    result
}

/// Symmetrizes one multilinear indicator term of a single function over
/// all permutations of its domain: the average
/// `E_pi[x_{pi(i_1) j_1} ... x_{pi(i_m) j_m}]` as a polynomial in the
/// frequency variables of that function, of degree at most `m`.
///
/// Each factor contributes `(z_{j_l} - s_l) / (F - (l - 1))` where `s_l`
/// counts earlier positions carrying the same range value. Terms whose
/// positions repeat a domain point with a different range value vanish
/// identically on function inputs and return zero.
pub fn symmetrize_term(term: &Monomial, func: u8, domain: u16) -> Result<Poly, MultisymError> {
    let reduced = term.boolean_reduced();
    let mut positions: BTreeMap<u16, u16> = BTreeMap::new();
    for (v, _) in reduced.iter() {
        match *v {
            VarId::Raw {
                func: l,
                dom,
                range,
            } if l == func => {
                if let Some(&prev) = positions.get(&dom) {
                    if prev != range {
                        return Ok(Poly::zero());
                    }
                } else {
                    positions.insert(dom, range);
                }
            }
            other => {
                return Err(MultisymError::WrongVariableKind {
                    var: other,
                    expected: "indicator variables of a single function",
                })
            }
        }
    }
    let m = positions.len();
    if m > domain as usize {
        return Err(MultisymError::TermDegreeExceedsDomain { degree: m, domain });
    }
    let mut out = Poly::one();
    let mut seen: BTreeMap<u16, u32> = BTreeMap::new();
    for (step, (_, j)) in positions.iter().enumerate() {
        let s = *seen.get(j).unwrap_or(&0);
        let factor = &Poly::var(VarId::freq(func, *j)) - &Poly::constant(rat(s as i64));
        out = &out * &factor.scale(&Rational::new(
            1.into(),
            (domain as i64 - step as i64).into(),
        ));
        *seen.entry(*j).or_insert(0) += 1;
    }
    Ok(out)
}

/// Symmetrizes an indicator polynomial of `k` functions over the product
/// of the domain permutation groups. The averages factor per function, so
/// each term is the product of its per-function symmetrizations. The
/// result is a frequency polynomial of no larger degree, pointwise equal
/// to the permutation average on every function tuple.
pub fn symmetrize_poly(p: &Poly, domains: &[u16]) -> Result<Poly, MultisymError> {
    let k = domains.len() as u8;
    let mut out = Poly::zero();
    for (mono, coeff) in p.terms() {
        let reduced = mono.boolean_reduced();
        let mut per_func: BTreeMap<u8, Vec<(VarId, u32)>> = BTreeMap::new();
        for (v, e) in reduced.iter() {
            match *v {
                VarId::Raw { func, .. } if (1..=k).contains(&func) => {
                    per_func.entry(func).or_default().push((*v, *e));
                }
                other => {
                    if other.is_raw() {
                        return Err(MultisymError::UnexpectedFunction {
                            var: other,
                            max_func: k,
                        });
                    }
                    return Err(MultisymError::WrongVariableKind {
                        var: other,
                        expected: "indicator variables",
                    });
                }
            }
        }
        let mut term = Poly::constant(coeff.clone());
        for (func, vars) in per_func {
            let sub = Monomial::from_pairs(vars);
            let factor = symmetrize_term(&sub, func, domains[(func - 1) as usize])?;
            term = &term * &factor;
        }
        out = &out + &term;
    }
    Ok(out)
}

/// Replaces every frequency variable by its indicator sum
/// `z[l,j] -> sum_i x[l,i,j]`; value and degree are preserved exactly.
pub fn expand_freq_to_raw(q: &Poly, domains: &[u16]) -> Result<Poly, MultisymError> {
    let k = domains.len() as u8;
    let mut subst: BTreeMap<VarId, Poly> = BTreeMap::new();
    for v in q.vars() {
        match v {
            VarId::Freq { func, range } if (1..=k).contains(&func) => {
                let mut sum = Poly::zero();
                for i in 1..=domains[(func - 1) as usize] {
                    sum = &sum + &Poly::var(VarId::raw(func, i, range));
                }
                subst.insert(v, sum);
            }
            other => {
                return Err(MultisymError::WrongVariableKind {
                    var: other,
                    expected: "frequency variables",
                })
            }
        }
    }
    Ok(q.substitute(&subst))
}

/// Sets every variable with range index above `m_prime` to zero,
/// restricting the polynomial to the smaller range.
pub fn restrict_range(q: &Poly, m_prime: u16) -> Poly {
    let subst: BTreeMap<VarId, Poly> = q
        .vars()
        .into_iter()
        .filter(|v| v.range() > m_prime)
        .map(|v| (v, Poly::zero()))
        .collect();
    q.substitute(&subst)
}

/// Lifts a frequency polynomial over range `[m_prime]` to range `[m]`.
///
/// The input is averaged over all joint permutations of the `m_prime`
/// range columns, decomposed into power sums of the column vectors
/// `(z[1,j],...,z[k,j])`, and each nonzero power sum is re-read over the
/// `m` columns (zero-index power sums fold into the scalar `m_prime`).
/// The output is invariant under joint range permutations, its degree
/// does not grow, and restricting it back to `[m_prime]` recovers the
/// column-permutation average of the input.
///
/// `support` is the largest possible image size of the function tuples
/// under consideration (the sum of the domain sizes, or a declared
/// tighter bound); `m_prime` below it is rejected.
pub fn lift_range(
    q_prime: &Poly,
    k: u8,
    m_prime: u16,
    m: u16,
    support: u16,
) -> Result<Poly, MultisymError> {
    if m <= m_prime {
        return Err(MultisymError::RangeNotLarger { m_prime, m });
    }
    if m_prime < support {
        return Err(MultisymError::RangeBelowSupport { m_prime, support });
    }
    for v in q_prime.vars() {
        match v {
            VarId::Freq { func, range } if (1..=k).contains(&func) => {
                if range > m_prime {
                    return Err(MultisymError::IndexOutOfBounds {
                        var: v,
                        bound: m_prime,
                    });
                }
            }
            other => {
                return Err(MultisymError::WrongVariableKind {
                    var: other,
                    expected: "frequency variables",
                })
            }
        }
    }

    // Column-view average over S_{m_prime}: group monomials by the orbit
    // of their column exponent matrix.
    let mut orbit_sums: BTreeMap<ExponentMatrix, Rational> = BTreeMap::new();
    for (mono, coeff) in q_prime.terms() {
        let mut rows = vec![vec![0u32; k as usize]; m_prime as usize];
        for (v, e) in mono.iter() {
            rows[(v.range() - 1) as usize][(v.func() - 1) as usize] = *e;
        }
        let key = ExponentMatrix { rows }.canonical();
        let entry = orbit_sums.entry(key).or_insert_with(Rational::zero);
        *entry += coeff;
    }

    let mut out = Poly::zero();
    for (omega, coeff_sum) in orbit_sums {
        let avg_coeff = coeff_sum / rat(omega.orbit_size() as i64);
        let expr = decompose_mon(&omega);
        for (product, c) in expr.terms() {
            let mut scalar = &avg_coeff * c;
            let mut prod = Poly::one();
            for lambda in product {
                if lambda.is_zero() {
                    // P'_0 is the constant m_prime, not a substitutable
                    // power sum.
                    scalar *= rat(m_prime as i64);
                } else {
                    prod = &prod * &power_sum(lambda, m, &VectorLayout::FreqColumns);
                }
            }
            out = &out + &prod.scale(&scalar);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Degree;
    use crate::rat::ratio;
    use std::collections::BTreeSet;

    fn em(rows: &[&[u32]]) -> ExponentMatrix {
        ExponentMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn x(func: u8, dom: u16, range: u16) -> Poly {
        Poly::var(VarId::raw(func, dom, range))
    }

    fn z(func: u8, range: u16) -> Poly {
        Poly::var(VarId::freq(func, range))
    }

    /// All permutations of 0..n.
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(n - 1) {
            for pos in 0..n {
                let mut p = rest.clone();
                p.insert(pos, n - 1);
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn power_sum_examples() {
        let layout = VectorLayout::RawRows { func: 1 };
        assert_eq!(
            power_sum(&PowerSumIndex(vec![1, 0]), 2, &layout),
            &x(1, 1, 1) + &x(1, 2, 1)
        );
        assert_eq!(
            power_sum(&PowerSumIndex(vec![0, 0]), 3, &layout),
            Poly::constant(rat(3))
        );
        assert_eq!(
            power_sum(&PowerSumIndex(vec![1, 1]), 2, &layout),
            &(&x(1, 1, 1) * &x(1, 1, 2)) + &(&x(1, 2, 1) * &x(1, 2, 2))
        );
    }

    #[test]
    fn power_sum_freq_columns() {
        // Columns view: P_(1,1) over 2 columns of (z_j, w_j).
        assert_eq!(
            power_sum(&PowerSumIndex(vec![1, 1]), 2, &VectorLayout::FreqColumns),
            &(&z(1, 1) * &z(2, 1)) + &(&z(1, 2) * &z(2, 2))
        );
    }

    #[test]
    fn orbit_monomial_examples() {
        let layout = VectorLayout::RawRows { func: 1 };
        // X^Omega = x12*x21 has orbit {x12*x21, x11*x22} for n = 2.
        let omega = em(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            orbit_monomial(&omega, &layout),
            &(&x(1, 1, 2) * &x(1, 2, 1)) + &(&x(1, 1, 1) * &x(1, 2, 2))
        );
        // All-zero matrix: single term 1.
        assert_eq!(
            orbit_monomial(&ExponentMatrix::zero(3, 2), &layout),
            Poly::one()
        );
        // Equal rows: the orbit is a single matrix.
        let omega = em(&[&[1], &[1]]);
        assert_eq!(
            orbit_monomial(&omega, &layout),
            &x(1, 1, 1) * &x(1, 2, 1)
        );
        assert_eq!(omega.orbit_size(), 1);
    }

    #[test]
    fn decompose_all_zero_matrix() {
        // mon_O = 1 = (1/n^n) * P_0^n for n = 2.
        let expr = decompose_mon(&ExponentMatrix::zero(2, 1));
        let zero = PowerSumIndex(vec![0]);
        let mut expect = PowerSumExpression::zero();
        expect.add_term(vec![zero.clone(), zero], ratio(1, 4));
        assert_eq!(expr, expect);
    }

    #[test]
    fn decompose_single_nonzero_row() {
        // One nonzero row: mon_Omega = (1/n^(n-1)) * prod_i P_{Omega_i}.
        let omega = em(&[&[2, 1], &[0, 0], &[0, 0]]);
        let expr = decompose_mon(&omega);
        let mut expect = PowerSumExpression::zero();
        expect.add_term(
            vec![
                PowerSumIndex(vec![2, 1]),
                PowerSumIndex(vec![0, 0]),
                PowerSumIndex(vec![0, 0]),
            ],
            ratio(1, 9),
        );
        assert_eq!(expr, expect);
    }

    #[test]
    fn decompose_two_equal_rows() {
        // n = 2, m = 1, rows (1),(1): mon = (P_(1)^2 - P_(2))/2 after
        // folding P_0 = n.
        let omega = em(&[&[1], &[1]]);
        let expr = decompose_mon(&omega);
        let layout = VectorLayout::RawRows { func: 1 };
        let p1 = power_sum(&PowerSumIndex(vec![1]), 2, &layout);
        let p2 = power_sum(&PowerSumIndex(vec![2]), 2, &layout);
        let expect = (&p1.pow(2) - &p2).scale(&ratio(1, 2));
        assert_eq!(expr.expand(2, &layout), expect);
        assert_eq!(expr.expand(2, &layout), orbit_monomial(&omega, &layout));
    }

    /// Every canonical matrix with bounded shape and weight.
    fn all_canonical(n: usize, m: usize, max_weight: u32) -> Vec<ExponentMatrix> {
        let mut rows_pool: Vec<Vec<u32>> = Vec::new();
        fn gen_rows(m: usize, max: u32, row: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if row.len() == m {
                out.push(row.clone());
                return;
            }
            let used: u32 = row.iter().sum();
            for e in 0..=(max - used) {
                row.push(e);
                gen_rows(m, max, row, out);
                row.pop();
            }
        }
        gen_rows(m, max_weight, &mut Vec::new(), &mut rows_pool);
        let mut out = BTreeSet::new();
        fn pick(
            pool: &[Vec<u32>],
            n: usize,
            max_weight: u32,
            acc: &mut Vec<Vec<u32>>,
            out: &mut BTreeSet<ExponentMatrix>,
        ) {
            if acc.len() == n {
                let total: u32 = acc.iter().flatten().sum();
                if total <= max_weight {
                    out.insert(
                        ExponentMatrix::new(acc.clone()).unwrap().canonical(),
                    );
                }
                return;
            }
            for row in pool {
                acc.push(row.clone());
                pick(pool, n, max_weight, acc, out);
                acc.pop();
            }
        }
        pick(&rows_pool, n, max_weight, &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    #[test]
    fn decompose_round_trip_small() {
        // A small slice of the full sweep (the acceptance suite runs the
        // whole n <= 3, m <= 3, weight <= 4 family).
        let layout = VectorLayout::RawRows { func: 1 };
        for omega in all_canonical(2, 2, 3) {
            let expr = decompose_mon(&omega);
            assert_eq!(
                expr.expand(omega.n() as u16, &layout),
                orbit_monomial(&omega, &layout),
                "round trip failed for {omega}"
            );
            assert!(expr.max_weight() <= omega.weight());
        }
    }

    /// Brute-force permutation average of an indicator term on a concrete
    /// function, used as the oracle for symmetrization.
    fn brute_force_average(positions: &[(u16, u16)], f: &[u16]) -> Rational {
        let n = f.len();
        let perms = permutations(n);
        let mut hits = 0i64;
        for p in &perms {
            if positions
                .iter()
                .all(|&(i, j)| f[p[(i - 1) as usize]] == j)
            {
                hits += 1;
            }
        }
        ratio(hits, perms.len() as i64)
    }

    fn freq_assignment(func: u8, f: &[u16], m: u16) -> BTreeMap<VarId, Rational> {
        let mut a = BTreeMap::new();
        for j in 1..=m {
            let count = f.iter().filter(|&&v| v == j).count();
            a.insert(VarId::freq(func, j), rat(count as i64));
        }
        a
    }

    #[test]
    fn symmetrize_single_variable() {
        // E_pi[x_{pi(i) j} = 1] = z_j / F
        for domain in 1..=4u16 {
            let term = Monomial::var(VarId::raw(1, 1, 2));
            let got = symmetrize_term(&term, 1, domain).unwrap();
            assert_eq!(got, z(1, 2).scale(&ratio(1, domain as i64)));
        }
    }

    #[test]
    fn symmetrize_same_range_pair() {
        // x_{i1,j} x_{i2,j} -> z_j (z_j - 1) / (F (F - 1))
        let term = Monomial::from_pairs([(VarId::raw(1, 1, 1), 1), (VarId::raw(1, 2, 1), 1)]);
        let got = symmetrize_term(&term, 1, 3).unwrap();
        let zj = z(1, 1);
        let expect = (&zj * &(&zj - &Poly::one())).scale(&ratio(1, 6));
        assert_eq!(got, expect);
    }

    #[test]
    fn symmetrize_cross_checked_against_permutations() {
        // F = 2, x11 * x22 -> z1 z2 / 2; on f = (1,2) both sides are 1/2.
        let term = Monomial::from_pairs([(VarId::raw(1, 1, 1), 1), (VarId::raw(1, 2, 2), 1)]);
        let got = symmetrize_term(&term, 1, 2).unwrap();
        let expect = (&z(1, 1) * &z(1, 2)).scale(&ratio(1, 2));
        assert_eq!(got, expect);
        let f = [1u16, 2];
        let brute = brute_force_average(&[(1, 1), (2, 2)], &f);
        assert_eq!(brute, ratio(1, 2));
        assert_eq!(got.eval(&freq_assignment(1, &f, 2)).unwrap(), brute);
    }

    #[test]
    fn symmetrize_invalid_term_is_zero() {
        // Same domain point, two different range values.
        let term = Monomial::from_pairs([(VarId::raw(1, 1, 1), 1), (VarId::raw(1, 1, 2), 1)]);
        assert_eq!(symmetrize_term(&term, 1, 3).unwrap(), Poly::zero());
    }

    #[test]
    fn symmetrize_rejects_overlong_terms() {
        let term = Monomial::from_pairs([
            (VarId::raw(1, 1, 1), 1),
            (VarId::raw(1, 2, 1), 1),
            (VarId::raw(1, 3, 1), 1),
        ]);
        assert!(matches!(
            symmetrize_term(&term, 1, 2),
            Err(MultisymError::TermDegreeExceedsDomain { .. })
        ));
    }

    #[test]
    fn symmetrize_poly_examples() {
        // x11*y11 with F = G = 1 -> z1*w1
        let p = &x(1, 1, 1) * &x(2, 1, 1);
        assert_eq!(symmetrize_poly(&p, &[1, 1]).unwrap(), &z(1, 1) * &z(2, 1));
        // sum_j x_{1j} y_{1j} with F = G = 1, M = 2 -> z1*w1 + z2*w2
        let p = &(&x(1, 1, 1) * &x(2, 1, 1)) + &(&x(1, 1, 2) * &x(2, 1, 2));
        assert_eq!(
            symmetrize_poly(&p, &[1, 1]).unwrap(),
            &(&z(1, 1) * &z(2, 1)) + &(&z(1, 2) * &z(2, 2))
        );
        // Constants pass through.
        assert_eq!(symmetrize_poly(&Poly::one(), &[2, 2]).unwrap(), Poly::one());
    }

    #[test]
    fn expand_freq_examples() {
        assert_eq!(
            expand_freq_to_raw(&z(1, 1), &[2]).unwrap(),
            &x(1, 1, 1) + &x(1, 2, 1)
        );
        assert_eq!(
            expand_freq_to_raw(&(&z(1, 1) * &z(2, 1)), &[1, 1]).unwrap(),
            &x(1, 1, 1) * &x(2, 1, 1)
        );
        let c = Poly::constant(ratio(5, 3));
        assert_eq!(expand_freq_to_raw(&c, &[2, 2]).unwrap(), c);
        // Degree is preserved exactly.
        let q = &(&z(1, 1) * &z(2, 2)) + &z(1, 2);
        assert_eq!(
            expand_freq_to_raw(&q, &[3, 2]).unwrap().degree(),
            q.degree()
        );
    }

    #[test]
    fn restrict_range_examples() {
        let q = &(&z(1, 1) * &z(1, 3)) + &z(2, 2);
        assert_eq!(restrict_range(&q, 2), z(2, 2));
        let q2 = &z(1, 1) + &z(2, 2);
        assert_eq!(restrict_range(&q2, 2), q2);
        // P_(1,1) over M = 3 restricted to M' = 2.
        let p = power_sum(&PowerSumIndex(vec![1, 1]), 3, &VectorLayout::FreqColumns);
        assert_eq!(
            restrict_range(&p, 2),
            power_sum(&PowerSumIndex(vec![1, 1]), 2, &VectorLayout::FreqColumns)
        );
    }

    #[test]
    fn lift_power_sum_examples() {
        // P'_(1,1) over M' = 2 lifts to P_(1,1) over M = 3.
        let q = power_sum(&PowerSumIndex(vec![1, 1]), 2, &VectorLayout::FreqColumns);
        let lifted = lift_range(&q, 2, 2, 3, 2).unwrap();
        assert_eq!(
            lifted,
            power_sum(&PowerSumIndex(vec![1, 1]), 3, &VectorLayout::FreqColumns)
        );
        // Constants lift to themselves.
        let c = Poly::constant(ratio(7, 2));
        assert_eq!(lift_range(&c, 2, 2, 4, 2).unwrap(), c);
        // P'_(1,0) = z'_1 + z'_2 lifts to z_1 + z_2 + z_3.
        let q = &z(1, 1) + &z(1, 2);
        let lifted = lift_range(&q, 2, 2, 3, 2).unwrap();
        assert_eq!(lifted, &(&z(1, 1) + &z(1, 2)) + &z(1, 3));
    }

    #[test]
    fn lift_rejects_bad_ranges() {
        let q = &z(1, 1) + &z(1, 2);
        assert!(matches!(
            lift_range(&q, 2, 2, 2, 2),
            Err(MultisymError::RangeNotLarger { .. })
        ));
        assert!(matches!(
            lift_range(&q, 2, 2, 4, 3),
            Err(MultisymError::RangeBelowSupport { .. })
        ));
    }

    #[test]
    fn lift_output_is_range_permutation_invariant() {
        // Lift an asymmetric-looking polynomial and check invariance of
        // the output under sampled joint column permutations.
        let q = &(&(&z(1, 1) * &z(2, 1)).scale(&rat(2)) + &z(1, 2)) + &Poly::constant(rat(1));
        let m = 4u16;
        let lifted = lift_range(&q, 2, 2, m, 2).unwrap();
        for perm in permutations(m as usize) {
            let subst: BTreeMap<VarId, Poly> = lifted
                .vars()
                .into_iter()
                .map(|v| {
                    (
                        v,
                        Poly::var(VarId::freq(v.func(), (perm[(v.range() - 1) as usize] + 1) as u16)),
                    )
                })
                .collect();
            assert_eq!(lifted.substitute(&subst), lifted);
        }
        assert!(lifted.degree() <= q.degree());
        assert_eq!(lifted.degree(), Degree::Finite(2));
    }

    #[test]
    fn orbit_and_power_sum_fixed_by_row_permutations() {
        let layout = VectorLayout::RawRows { func: 1 };
        let omega = em(&[&[1, 0], &[0, 2], &[0, 0]]);
        let mon = orbit_monomial(&omega, &layout);
        let ps = power_sum(&PowerSumIndex(vec![1, 1]), 3, &layout);
        for perm in permutations(3) {
            let relabel = |p: &Poly| {
                p.map_vars(|v| match v {
                    VarId::Raw { func, dom, range } => {
                        VarId::raw(func, (perm[(dom - 1) as usize] + 1) as u16, range)
                    }
                    other => other,
                })
            };
            assert_eq!(relabel(&mon), mon);
            assert_eq!(relabel(&ps), ps);
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let omega = em(&[&[1, 0], &[0, 2]]);
        assert_eq!(omega.to_string(), "1,0;0,2");
        assert_eq!("1,0;0,2".parse::<ExponentMatrix>().unwrap(), omega);
    }
}
