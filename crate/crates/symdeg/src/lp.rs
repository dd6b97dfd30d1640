//! Exact rational linear-programming feasibility.
//!
//! Phase-one simplex over arbitrary-precision rationals with Bland's
//! anti-cycling rule: terminates on every input and either returns a
//! point satisfying every constraint exactly or reports infeasibility.
//! There is no objective; degree minimization is an outer search over
//! feasibility problems.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{fmt_rat, parse_rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rel::Le => write!(f, "<="),
            Rel::Ge => write!(f, ">="),
            Rel::Eq => write!(f, "="),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rel: Rel, rhs: Rational) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let lhs: Rational = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(c, x)| c * x)
            .sum();
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Ge => lhs >= self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

/// A feasibility system: variables are free unless bounded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LpInstance {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    /// Optional per-variable bounds; empty means all variables free.
    pub bounds: Vec<(Option<Rational>, Option<Rational>)>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl LpInstance {
    pub fn new(num_vars: usize) -> Self {
        LpInstance {
            num_vars,
            constraints: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, rel: Rel, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint::new(coeffs, rel, rhs));
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::RowLength {
                    row: i,
                    got: c.coeffs.len(),
                    expected: self.num_vars,
                });
            }
        }
        Ok(())
    }

    /// Bounds expressed as extra constraint rows.
    fn bound_rows(&self) -> Vec<Constraint> {
        let mut rows = Vec::new();
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let mut unit = vec![Rational::zero(); self.num_vars];
            unit[j] = Rational::one();
            if let Some(lo) = lo {
                rows.push(Constraint::new(unit.clone(), Rel::Ge, lo.clone()));
            }
            if let Some(hi) = hi {
                rows.push(Constraint::new(unit.clone(), Rel::Le, hi.clone()));
            }
        }
        rows
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Feasible(p) => Some(p),
            LpOutcome::Infeasible => None,
        }
    }
}

/// Checks a candidate point against every constraint and bound, exactly.
pub fn verify_solution(lp: &LpInstance, point: &[Rational]) -> bool {
    if point.len() != lp.num_vars {
        return false;
    }
    lp.constraints
        .iter()
        .chain(lp.bound_rows().iter())
        .all(|c| c.holds_at(point))
}

/// Exact phase-one simplex with Bland's rule.
///
/// Free variables are split as `x = u - v` with `u, v >= 0`; rows are
/// normalized to nonnegative right-hand sides; artificial variables are
/// introduced only where a slack cannot start basic, then minimized.
/// Feasible iff the artificial total reaches zero.
pub fn solve_feasibility(lp: &LpInstance) -> LpOutcome {
    lp.validate().expect("malformed LP instance");
    let n = lp.num_vars;
    let mut rows: Vec<Constraint> = lp.constraints.clone();
    rows.extend(lp.bound_rows());
    let m = rows.len();
    if m == 0 {
        return LpOutcome::Feasible(vec![Rational::zero(); n]);
    }

    // Normalize to nonnegative rhs.
    for c in &mut rows {
        if c.rhs.is_negative() {
            for v in &mut c.coeffs {
                *v = -v.clone();
            }
            c.rhs = -c.rhs.clone();
            c.rel = match c.rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
    }

    let num_slack = rows
        .iter()
        .filter(|c| matches!(c.rel, Rel::Le | Rel::Ge))
        .count();
    let num_art = rows
        .iter()
        .filter(|c| matches!(c.rel, Rel::Ge | Rel::Eq))
        .count();
    let ncols = 2 * n + num_slack + num_art;
    let art_start = 2 * n + num_slack;

    // Tableau rows: coefficients then rhs in the last column.
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_at = 2 * n;
    let mut art_at = art_start;
    for c in &rows {
        let mut row = vec![Rational::zero(); ncols + 1];
        for (j, v) in c.coeffs.iter().enumerate() {
            row[j] = v.clone();
            row[n + j] = -v.clone();
        }
        row[ncols] = c.rhs.clone();
        match c.rel {
            Rel::Le => {
                row[slack_at] = Rational::one();
                basis.push(slack_at);
                slack_at += 1;
            }
            Rel::Ge => {
                row[slack_at] = -Rational::one();
                slack_at += 1;
                row[art_at] = Rational::one();
                basis.push(art_at);
                art_at += 1;
            }
            Rel::Eq => {
                row[art_at] = Rational::one();
                basis.push(art_at);
                art_at += 1;
            }
        }
        tab.push(row);
    }

    // Reduced-cost row for min(sum of artificials):
    // d_j = c_j - sum over artificial-basic rows of a_ij, with the
    // objective value in the last entry (negated by pivoting convention).
    let mut cost = vec![Rational::zero(); ncols + 1];
    for j in art_start..ncols {
        cost[j] = Rational::one();
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= art_start {
            for j in 0..=ncols {
                let v = tab[i][j].clone();
                cost[j] -= v;
            }
        }
    }

    let mut banned = vec![false; ncols];
    loop {
        // Bland: entering column = smallest index with negative reduced cost.
        let entering = (0..ncols).find(|&j| !banned[j] && cost[j].is_negative());
        let Some(j) = entering else { break };

        // Ratio test with Bland tie-break on the smallest basis index.
        let mut pivot: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tab[i][j].is_positive() {
                let ratio = &tab[i][ncols] / &tab[i][j];
                let better = match &pivot {
                    None => true,
                    Some((pi, pr)) => {
                        ratio < *pr || (ratio == *pr && basis[i] < basis[*pi])
                    }
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = pivot else {
            // Phase-one objective is bounded below; no positive entry in
            // an improving column cannot happen on consistent data.
            unreachable!("phase-one simplex column with no positive entry");
        };

        // Pivot on (r, j).
        let piv = tab[r][j].clone();
        for v in tab[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = tab[r].clone();
        let nonzero: Vec<usize> = (0..=ncols)
            .filter(|&c| !pivot_row[c].is_zero())
            .collect();
        for i in 0..m {
            if i == r || tab[i][j].is_zero() {
                continue;
            }
            let factor = tab[i][j].clone();
            for &c in &nonzero {
                let delta = &factor * &pivot_row[c];
                tab[i][c] -= delta;
            }
        }
        if !cost[j].is_zero() {
            let factor = cost[j].clone();
            for &c in &nonzero {
                let delta = &factor * &pivot_row[c];
                cost[c] -= delta;
            }
        }
        // An artificial that leaves the basis never needs to come back.
        if basis[r] >= art_start {
            banned[basis[r]] = true;
        }
        basis[r] = j;
    }

    // cost[ncols] holds the negated objective value.
    if !cost[ncols].is_zero() {
        return LpOutcome::Infeasible;
    }

    let mut split = vec![Rational::zero(); 2 * n];
    for (i, &b) in basis.iter().enumerate() {
        if b < 2 * n {
            split[b] = tab[i][ncols].clone();
        }
    }
    let point: Vec<Rational> = (0..n).map(|j| &split[j] - &split[n + j]).collect();
    debug_assert!(verify_solution(lp, &point));
    LpOutcome::Feasible(point)
}

/// Plain-text form: a `vars n` header, optional `bound j lo hi` lines
/// (`_` for absent), then one constraint per line with all rationals as
/// `p/q`.
impl fmt::Display for LpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let side = |b: &Option<Rational>| b.as_ref().map_or("_".to_string(), fmt_rat);
            writeln!(f, "bound {} {} {}", j + 1, side(lo), side(hi))?;
        }
        for c in &self.constraints {
            let coeffs: Vec<String> = c.coeffs.iter().map(fmt_rat).collect();
            writeln!(f, "{} {} {}", coeffs.join(" "), c.rel, fmt_rat(&c.rhs))?;
        }
        Ok(())
    }
}

impl FromStr for LpInstance {
    type Err = LpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate();
        let err = |line: usize, col: usize, msg: String| LpError::Parse {
            line: line + 1,
            col,
            msg,
        };
        let (first_no, first) = lines
            .next()
            .ok_or_else(|| err(0, 1, "empty input".into()))?;
        let num_vars: usize = first
            .strip_prefix("vars ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(first_no, 1, "expected `vars <n>` header".into()))?;
        let mut lp = LpInstance::new(num_vars);
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("bound ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(no, 1, "expected `bound <j> <lo> <hi>`".into()));
                }
                let j: usize = parts[0]
                    .parse()
                    .map_err(|_| err(no, 7, format!("invalid index `{}`", parts[0])))?;
                if j < 1 || j > num_vars {
                    return Err(err(no, 7, format!("bound index {j} out of range")));
                }
                if lp.bounds.is_empty() {
                    lp.bounds = vec![(None, None); num_vars];
                }
                let side = |txt: &str| -> Result<Option<Rational>, String> {
                    if txt == "_" {
                        Ok(None)
                    } else {
                        parse_rat(txt).map(Some)
                    }
                };
                lp.bounds[j - 1] = (
                    side(parts[1]).map_err(|m| err(no, 1, m))?,
                    side(parts[2]).map_err(|m| err(no, 1, m))?,
                );
                continue;
            }
            let (rel, rel_txt) = if line.contains("<=") {
                (Rel::Le, "<=")
            } else if line.contains(">=") {
                (Rel::Ge, ">=")
            } else if line.contains('=') {
                (Rel::Eq, "=")
            } else {
                return Err(err(no, 1, "constraint needs a relation".into()));
            };
            let (lhs, rhs) = line.split_once(rel_txt).unwrap();
            let col = lhs.len() + rel_txt.len() + 1;
            let coeffs: Result<Vec<Rational>, _> = lhs
                .split_whitespace()
                .map(|t| parse_rat(t).map_err(|m| err(no, 1, m)))
                .collect();
            let coeffs = coeffs?;
            if coeffs.len() != num_vars {
                return Err(err(
                    no,
                    1,
                    format!("expected {num_vars} coefficients, found {}", coeffs.len()),
                ));
            }
            let rhs = parse_rat(rhs.trim()).map_err(|m| err(no, col, m))?;
            lp.push(coeffs, rel, rhs);
        }
        Ok(lp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};
    use proptest::prelude::*;

    fn lp_from_rows(n: usize, rows: &[(&[i64], Rel, (i64, i64))]) -> LpInstance {
        let mut lp = LpInstance::new(n);
        for (coeffs, rel, (num, den)) in rows {
            lp.push(coeffs.iter().map(|&c| rat(c)).collect(), *rel, ratio(*num, *den));
        }
        lp
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        // x >= 0, x <= -1
        let lp = lp_from_rows(1, &[(&[1], Rel::Ge, (0, 1)), (&[1], Rel::Le, (-1, 1))]);
        assert_eq!(solve_feasibility(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn simplex_equality_with_nonnegativity() {
        // x1 + x2 = 1, x >= 0
        let mut lp = lp_from_rows(2, &[(&[1, 1], Rel::Eq, (1, 1))]);
        lp.bounds = vec![(Some(rat(0)), None), (Some(rat(0)), None)];
        let outcome = solve_feasibility(&lp);
        let point = outcome.point().expect("feasible");
        assert!(verify_solution(&lp, point));
    }

    /// The degree-1 feasibility system for approximating OR_2 within 1/3:
    /// p = a + b*t with p(0) in [0,1/3], p(1) and p(2) in [2/3,1].
    fn or2_lp() -> LpInstance {
        lp_from_rows(
            2,
            &[
                (&[1, 0], Rel::Ge, (0, 1)),
                (&[1, 0], Rel::Le, (1, 3)),
                (&[1, 1], Rel::Ge, (2, 3)),
                (&[1, 1], Rel::Le, (1, 1)),
                (&[1, 2], Rel::Ge, (2, 3)),
                (&[1, 2], Rel::Le, (1, 1)),
            ],
        )
    }

    #[test]
    fn or2_degree_one_system_is_feasible() {
        let lp = or2_lp();
        let outcome = solve_feasibility(&lp);
        let point = outcome.point().expect("feasible");
        assert!(verify_solution(&lp, point));
        // (1/3, 1/3) is one valid witness.
        assert!(verify_solution(&lp, &[ratio(1, 3), ratio(1, 3)]));
    }

    #[test]
    fn verify_examples() {
        let lp = or2_lp();
        assert!(verify_solution(&lp, &[ratio(1, 3), ratio(1, 3)]));
        assert!(!verify_solution(&lp, &[rat(0), rat(0)]));
        let empty = LpInstance::new(2);
        assert!(verify_solution(&empty, &[rat(5), rat(-7)]));
    }

    #[test]
    fn deterministic_outcomes() {
        let lp = or2_lp();
        assert_eq!(solve_feasibility(&lp), solve_feasibility(&lp));
    }

    #[test]
    fn negative_rhs_normalization() {
        // -x <= -2 means x >= 2; combined with x <= 1 it is infeasible.
        let lp = lp_from_rows(1, &[(&[-1], Rel::Le, (-2, 1)), (&[1], Rel::Le, (1, 1))]);
        assert_eq!(solve_feasibility(&lp), LpOutcome::Infeasible);
        let lp2 = lp_from_rows(1, &[(&[-1], Rel::Le, (-2, 1)), (&[1], Rel::Le, (3, 1))]);
        let point = solve_feasibility(&lp2).point().unwrap().to_vec();
        assert!(verify_solution(&lp2, &point));
    }

    #[test]
    fn text_round_trip() {
        let mut lp = or2_lp();
        lp.bounds = vec![(Some(rat(0)), Some(rat(1))), (None, Some(ratio(1, 2)))];
        let text = lp.to_string();
        let parsed: LpInstance = text.parse().unwrap();
        assert_eq!(parsed, lp);
        assert_eq!(parsed.to_string(), text);
    }

    #[test]
    fn parse_errors_carry_position() {
        let bad = "vars 2\n1/1 <= 1/1\n";
        match bad.parse::<LpInstance>() {
            Err(LpError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    proptest! {
        /// Soundness: any reported feasible point verifies exactly.
        #[test]
        fn feasible_points_verify(
            rows in proptest::collection::vec(
                (proptest::collection::vec(-3i64..=3, 3), 0usize..3, -4i64..=4),
                1..6,
            )
        ) {
            let mut lp = LpInstance::new(3);
            for (coeffs, rel_idx, rhs) in rows {
                let rel = [Rel::Le, Rel::Ge, Rel::Eq][rel_idx % 3];
                lp.push(coeffs.into_iter().map(rat).collect(), rel, rat(rhs));
            }
            if let LpOutcome::Feasible(point) = solve_feasibility(&lp) {
                prop_assert!(verify_solution(&lp, &point));
            }
        }
    }
}
