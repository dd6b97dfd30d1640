//! Minimum epsilon-approximate degree via exact LP feasibility.
//!
//! A polynomial `p` epsilon-approximates a property `Phi` when
//! `|Phi(u) - p(u)| <= epsilon` and `p(u) in [0,1]` on every tuple `u`
//! of the promise domain. For a fixed degree `d` this is a linear
//! feasibility system in the coefficients of a degree-`<= d` basis; the
//! minimum degree is found by ascending search, which also yields the
//! full per-degree feasibility profile.
//!
//! Two variable spaces are supported: the indicator space (one 0/1
//! variable per function/point/value triple, one constraint per tuple)
//! and the frequency space (symmetric polynomials in the preimage
//! counts, one constraint per orbit). For symmetric properties the two
//! minima agree, which the tests check against each other.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lp::{LpInstance, LpOutcome, Rel};
use crate::multisym::{
    lift_range, ExponentMatrix, MultisymError, PowerSumIndex, VectorLayout,
};
use crate::poly::{Monomial, Poly, PolyError, VarId};
use crate::properties::{
    check_symmetry, enumerate_domain, eval_property, orbit_representatives,
    PropertyError, PropertySpec,
};
use crate::rat::{binomial, rat, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ApproxDegError {
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Multisym(#[from] MultisymError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("epsilon must lie in [0, 1/2), got {0}")]
    InvalidEpsilon(String),
    #[error("the frequency space needs a symmetric property; {property} is not")]
    NotSymmetric { property: String },
    #[error("witness mixes indicator and frequency variables")]
    MixedSpaces,
    #[error("range equality needs the base witness; no degree <= {cap} was feasible")]
    NoBaseWitness { cap: u32 },
}

/// Which variables carry the approximation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarSpace {
    /// Indicator variables `x[l,i,j]`; constraints over every tuple.
    RawXY,
    /// Frequency variables `z[l,j]`; constraints once per orbit.
    FreqZW,
}

/// Basis for the frequency space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FreqBasis {
    /// Orbit monomials `mon_Omega` of the range columns, `|Omega|_1 <= d`.
    OrbitMonomial,
    /// Products of power sums of total degree `<= d`.
    PowerSumProduct,
}

#[derive(Clone, Debug)]
pub struct DegreeQuery {
    pub spec: PropertySpec,
    pub epsilon: Rational,
    pub space: VarSpace,
    pub basis: FreqBasis,
    pub max_degree: u32,
    pub budget: u64,
}

impl DegreeQuery {
    pub fn new(spec: PropertySpec, epsilon: Rational, space: VarSpace) -> Self {
        DegreeQuery {
            spec,
            epsilon,
            space,
            basis: FreqBasis::OrbitMonomial,
            max_degree: 8,
            budget: 1_000_000,
        }
    }
}

/// A built feasibility system together with its basis polynomials.
#[derive(Clone, Debug)]
pub struct LpBuild {
    pub lp: LpInstance,
    pub basis: Vec<Poly>,
    /// Constraint universe size: tuples in RawXY, orbits in FreqZW.
    pub universe: usize,
}

fn check_epsilon(epsilon: &Rational) -> Result<(), ApproxDegError> {
    if epsilon.is_negative() || *epsilon >= Rational::new(1.into(), 2.into()) {
        return Err(ApproxDegError::InvalidEpsilon(crate::rat::fmt_rat(epsilon)));
    }
    Ok(())
}

/// All multilinear indicator monomials of degree `<= d`: choose up to `d`
/// function/point positions and a range value for each.
fn raw_basis(spec: &PropertySpec, d: u32) -> Vec<Poly> {
    let mut positions: Vec<(u8, u16)> = Vec::new();
    for (l, &f) in spec.domains.iter().enumerate() {
        for i in 1..=f {
            positions.push(((l + 1) as u8, i));
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<(u8, u16, u16)> = Vec::new();
    fn recurse(
        positions: &[(u8, u16)],
        start: usize,
        left: u32,
        m: u16,
        chosen: &mut Vec<(u8, u16, u16)>,
        out: &mut Vec<Poly>,
    ) {
        out.push(Poly::monomial(
            Monomial::from_pairs(
                chosen
                    .iter()
                    .map(|&(l, i, j)| (VarId::raw(l, i, j), 1)),
            ),
            rat(1),
        ));
        if left == 0 {
            return;
        }
        for idx in start..positions.len() {
            let (l, i) = positions[idx];
            for j in 1..=m {
                chosen.push((l, i, j));
                recurse(positions, idx + 1, left - 1, m, chosen, out);
                chosen.pop();
            }
        }
    }
    recurse(&positions, 0, d, spec.range, &mut chosen, &mut out);
    out.sort_by_key(|p| p.terms().next().map(|(m, _)| m.clone()));
    out.dedup();
    out
}

/// All multisets of nonzero exponent rows over `k` components with at
/// most `max_rows` rows and total weight `<= d`, in deterministic order.
fn row_multisets(k: usize, max_rows: usize, d: u32) -> Vec<Vec<Vec<u32>>> {
    // Nonzero rows of weight <= d, descending, so multisets can be
    // generated with non-increasing rows.
    let mut rows: Vec<Vec<u32>> = Vec::new();
    fn gen_rows(k: usize, cap: u32, row: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if row.len() == k {
            if row.iter().any(|&e| e > 0) {
                out.push(row.clone());
            }
            return;
        }
        let used: u32 = row.iter().sum();
        for e in 0..=(cap - used) {
            row.push(e);
            gen_rows(k, cap, row, out);
            row.pop();
        }
    }
    gen_rows(k, d, &mut Vec::new(), &mut rows);
    rows.sort_unstable_by(|a, b| b.cmp(a));

    let mut out = vec![Vec::new()];
    let mut acc: Vec<Vec<u32>> = Vec::new();
    fn pick(
        rows: &[Vec<u32>],
        start: usize,
        left_rows: usize,
        left_weight: u32,
        acc: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        for idx in start..rows.len() {
            let w: u32 = rows[idx].iter().sum();
            if w > left_weight || left_rows == 0 {
                continue;
            }
            acc.push(rows[idx].clone());
            out.push(acc.clone());
            pick(rows, idx, left_rows - 1, left_weight - w, acc, out);
            acc.pop();
        }
    }
    pick(&rows, 0, max_rows, d, &mut acc, &mut out);
    out.sort_by_key(|ms| {
        (
            ms.iter().flatten().sum::<u32>(),
            ms.clone(),
        )
    });
    out
}

/// Frequency-space basis polynomials of degree `<= d` for `k` functions
/// over range `m`.
fn freq_basis(k: usize, m: u16, d: u32, basis: FreqBasis) -> Vec<Poly> {
    let multisets = row_multisets(k, m as usize, d);
    multisets
        .into_iter()
        .map(|ms| match basis {
            FreqBasis::OrbitMonomial => {
                let mut rows = ms;
                rows.resize(m as usize, vec![0; k]);
                let omega = ExponentMatrix::new(rows).unwrap();
                crate::multisym::orbit_monomial(&omega, &VectorLayout::FreqColumns)
            }
            FreqBasis::PowerSumProduct => {
                let mut p = Poly::one();
                for row in ms {
                    p = &p * &crate::multisym::power_sum(
                        &PowerSumIndex(row),
                        m,
                        &VectorLayout::FreqColumns,
                    );
                }
                p
            }
        })
        .collect()
}

/// Builds the degree-`d` feasibility system for `spec` at `epsilon`.
///
/// Variables are the coefficients of the basis; each representative
/// tuple `u` contributes `1 - eps <= p(u) <= 1` when the property holds
/// and `0 <= p(u) <= eps` when it does not.
pub fn build_feasibility_lp(
    spec: &PropertySpec,
    epsilon: &Rational,
    degree: u32,
    space: VarSpace,
    basis: FreqBasis,
    budget: u64,
) -> Result<LpBuild, ApproxDegError> {
    check_epsilon(epsilon)?;
    let (basis_polys, points): (Vec<Poly>, Vec<(BTreeMap<VarId, Rational>, bool)>) = match space {
        VarSpace::RawXY => {
            let tuples = enumerate_domain(spec, budget)?;
            let points = tuples
                .iter()
                .map(|t| Ok((t.raw_assignment(), eval_property(spec, t)?)))
                .collect::<Result<Vec<_>, PropertyError>>()?;
            (raw_basis(spec, degree), points)
        }
        VarSpace::FreqZW => {
            let report = check_symmetry(spec, budget)?;
            if !report.symmetric() {
                return Err(ApproxDegError::NotSymmetric {
                    property: spec.name(),
                });
            }
            let reps = orbit_representatives(spec, budget)?;
            let points = reps
                .iter()
                .map(|(t, _)| Ok((t.freq_assignment(), eval_property(spec, t)?)))
                .collect::<Result<Vec<_>, PropertyError>>()?;
            (freq_basis(spec.k(), spec.range, degree, basis), points)
        }
    };

    let universe = points.len();
    let mut lp = LpInstance::new(basis_polys.len());
    for (assignment, value) in &points {
        let row: Vec<Rational> = basis_polys
            .iter()
            .map(|b| b.eval(assignment))
            .collect::<Result<_, _>>()?;
        let (lo, hi) = if *value {
            (&Rational::one() - epsilon, Rational::one())
        } else {
            (Rational::zero(), epsilon.clone())
        };
        lp.push(row.clone(), Rel::Ge, lo);
        lp.push(row, Rel::Le, hi);
    }
    Ok(LpBuild {
        lp,
        basis: basis_polys,
        universe,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DegreeStep {
    pub degree: u32,
    pub feasible: bool,
    pub basis_size: usize,
}

/// Result of the ascending degree search. `d_min` is `None` when no
/// degree up to the cap was feasible; `per_degree` always carries the
/// whole profile that was explored.
#[derive(Clone, Debug)]
pub struct ApproxDegreeResult {
    pub d_min: Option<u32>,
    pub witness: Option<Poly>,
    pub per_degree: Vec<DegreeStep>,
    pub orbit_count: usize,
}

/// The minimum epsilon-approximate degree within the query's cap.
pub fn min_approx_degree(query: &DegreeQuery) -> Result<ApproxDegreeResult, ApproxDegError> {
    check_epsilon(&query.epsilon)?;
    let mut per_degree = Vec::new();
    let mut orbit_count = 0;
    for d in 0..=query.max_degree {
        let build = build_feasibility_lp(
            &query.spec,
            &query.epsilon,
            d,
            query.space,
            query.basis,
            query.budget,
        )?;
        orbit_count = build.universe;
        let outcome = crate::lp::solve_feasibility(&build.lp);
        let feasible = outcome.is_feasible();
        per_degree.push(DegreeStep {
            degree: d,
            feasible,
            basis_size: build.basis.len(),
        });
        if let LpOutcome::Feasible(point) = outcome {
            let mut witness = Poly::zero();
            for (c, b) in point.iter().zip(&build.basis) {
                witness = &witness + &b.scale(c);
            }
            let ok = verify_witness(&witness, &query.spec, &query.epsilon, query.budget)?;
            assert!(ok, "LP witness failed exact verification");
            return Ok(ApproxDegreeResult {
                d_min: Some(d),
                witness: Some(witness),
                per_degree,
                orbit_count,
            });
        }
    }
    Ok(ApproxDegreeResult {
        d_min: None,
        witness: None,
        per_degree,
        orbit_count,
    })
}

/// Checks a witness against the whole promise domain (not just orbit
/// representatives): both constraint families, exactly.
pub fn verify_witness(
    p: &Poly,
    spec: &PropertySpec,
    epsilon: &Rational,
    budget: u64,
) -> Result<bool, ApproxDegError> {
    check_epsilon(epsilon)?;
    let vars = p.vars();
    let any_raw = vars.iter().any(|v| v.is_raw());
    let any_freq = vars.iter().any(|v| v.is_freq());
    if any_raw && any_freq {
        return Err(ApproxDegError::MixedSpaces);
    }
    let one = Rational::one();
    for t in enumerate_domain(spec, budget)? {
        let assignment = if any_raw {
            t.raw_assignment()
        } else {
            t.freq_assignment()
        };
        let v = p.eval(&assignment)?;
        let ok = if eval_property(spec, &t)? {
            v >= &one - epsilon && v <= one
        } else {
            v >= Rational::zero() && v <= *epsilon
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Majority-vote error amplification: the probability of at least
/// `(ell+1)/2` heads in `ell` independent flips of a coin with head
/// probability `p`, as a polynomial of degree `<= ell * deg(p)`.
///
/// For odd `ell` this fixes 0 and 1, is monotone on [0,1], and satisfies
/// `A(1-v) = 1 - A(v)`.
pub fn amplify(p: &Poly, ell: u32) -> Poly {
    assert!(ell >= 1 && ell % 2 == 1, "ell must be odd and positive");
    let complement = &Poly::one() - p;
    let mut out = Poly::zero();
    for t in (ell / 2 + 1)..=ell {
        let term = &p.pow(t) * &complement.pow(ell - t);
        out = &out + &term.scale(&binomial(ell as u64, t as u64));
    }
    out
}

/// One range size in a range-equality report.
#[derive(Clone, Debug)]
pub struct RangeDegreeRow {
    pub m: u16,
    pub d_min: Option<u32>,
    pub per_degree: Vec<DegreeStep>,
    pub orbit_count: usize,
    /// The base witness lifted to this range, and whether it verifies.
    pub lifted_witness: Option<Poly>,
    pub lifted_witness_ok: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct RangeEqualityReport {
    pub m_prime: u16,
    pub base: RangeDegreeRow,
    pub rows: Vec<RangeDegreeRow>,
    /// Every listed range has the same minimum degree as the base range.
    pub equal: bool,
    /// Every lifted witness verified at its range.
    pub all_lifted_ok: bool,
}

impl RangeEqualityReport {
    pub fn passed(&self) -> bool {
        self.equal && self.all_lifted_ok
    }
}

fn with_range(spec: &PropertySpec, m: u16) -> PropertySpec {
    PropertySpec {
        kind: spec.kind.clone(),
        domains: spec.domains.clone(),
        range: m,
        image_bound: spec.image_bound,
    }
}

/// Computes the minimum degree at the base range `m_prime` and at each
/// larger range, asserts equality, and carries the base witness lifted
/// to each larger range together with its exact verification bit.
pub fn range_equality_report(
    spec: &PropertySpec,
    m_prime: u16,
    m_list: &[u16],
    epsilon: &Rational,
    max_degree: u32,
    budget: u64,
) -> Result<RangeEqualityReport, ApproxDegError> {
    let base_spec = with_range(spec, m_prime);
    let base_query = DegreeQuery {
        max_degree,
        budget,
        ..DegreeQuery::new(base_spec, epsilon.clone(), VarSpace::FreqZW)
    };
    let base_res = min_approx_degree(&base_query)?;
    let base_witness = base_res
        .witness
        .clone()
        .ok_or(ApproxDegError::NoBaseWitness { cap: max_degree })?;
    let base = RangeDegreeRow {
        m: m_prime,
        d_min: base_res.d_min,
        per_degree: base_res.per_degree,
        orbit_count: base_res.orbit_count,
        lifted_witness: None,
        lifted_witness_ok: None,
    };

    let support = spec.support_bound();
    let mut rows = Vec::new();
    let mut equal = true;
    let mut all_lifted_ok = true;
    for &m in m_list {
        let spec_m = with_range(spec, m);
        let query = DegreeQuery {
            max_degree,
            budget,
            ..DegreeQuery::new(spec_m.clone(), epsilon.clone(), VarSpace::FreqZW)
        };
        let res = min_approx_degree(&query)?;
        let lifted = lift_range(&base_witness, spec.k() as u8, m_prime, m, support)?;
        let ok = verify_witness(&lifted, &spec_m, epsilon, budget)?;
        equal &= res.d_min == base.d_min;
        all_lifted_ok &= ok;
        rows.push(RangeDegreeRow {
            m,
            d_min: res.d_min,
            per_degree: res.per_degree,
            orbit_count: res.orbit_count,
            lifted_witness: Some(lifted),
            lifted_witness_ok: Some(ok),
        });
    }
    Ok(RangeEqualityReport {
        m_prime,
        base,
        rows,
        equal,
        all_lifted_ok,
    })
}
