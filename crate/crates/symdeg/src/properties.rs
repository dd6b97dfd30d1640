//! Boolean properties of function tuples and their symmetry structure.
//!
//! A [`FunctionTuple`] is a `k`-tuple of functions `f_l: [F_l] -> [M]` in
//! sequence encoding. Properties are invariant under permuting each
//! domain independently and permuting the common range jointly; the
//! frequency matrix `z[l][j] = |f_l^{-1}(j)|` quotients out the domain
//! permutations and its column multiset quotients out the range
//! permutation, giving a complete orbit invariant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poly::VarId;
use crate::rat::{rat, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("tuple {tuple} violates the promise of {property}")]
    PromiseViolation { tuple: String, property: String },
    #[error("tuple {tuple} does not match the declared sizes")]
    SizeMismatch { tuple: String },
    #[error("domain of size {count} exceeds the enumeration budget {budget}")]
    ExceedsBudget { count: u128, budget: u64 },
    #[error("the two-to-one half of the collision promise needs an even domain, got {m}")]
    OddCollisionDomain { m: u16 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A `k`-tuple of functions in sequence encoding: `values[l][i] = f_l(i+1)`,
/// every value in `[1, range]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FunctionTuple {
    range: u16,
    values: Vec<Vec<u16>>,
}

impl FunctionTuple {
    pub fn new(values: Vec<Vec<u16>>, range: u16) -> Result<Self, PropertyError> {
        let t = FunctionTuple { range, values };
        if t.values.iter().flatten().any(|&v| v < 1 || v > range) {
            return Err(PropertyError::SizeMismatch {
                tuple: t.to_string(),
            });
        }
        Ok(t)
    }

    pub fn single(values: Vec<u16>, range: u16) -> Result<Self, PropertyError> {
        FunctionTuple::new(vec![values], range)
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn domains(&self) -> Vec<u16> {
        self.values.iter().map(|f| f.len() as u16).collect()
    }

    pub fn range(&self) -> u16 {
        self.range
    }

    /// `f_l(i)` with 1-based `l` and `i`.
    pub fn value(&self, func: usize, point: u16) -> u16 {
        self.values[func - 1][(point - 1) as usize]
    }

    pub fn function(&self, func: usize) -> &[u16] {
        &self.values[func - 1]
    }

    /// The image of function `l`.
    pub fn image(&self, func: usize) -> BTreeSet<u16> {
        self.values[func - 1].iter().copied().collect()
    }

    pub fn freq_matrix(&self) -> FrequencyMatrix {
        let mut counts = vec![vec![0u32; self.range as usize]; self.k()];
        for (l, f) in self.values.iter().enumerate() {
            for &v in f {
                counts[l][(v - 1) as usize] += 1;
            }
        }
        FrequencyMatrix { counts }
    }

    /// Applies a permutation to the domain of one function:
    /// `f'(i) = f(pi(i))` for `pi` given as 0-based images.
    pub fn permute_domain(&self, func: usize, pi: &[usize]) -> FunctionTuple {
        let mut values = self.values.clone();
        values[func - 1] = pi.iter().map(|&p| self.values[func - 1][p]).collect();
        FunctionTuple {
            range: self.range,
            values,
        }
    }

    /// Applies a permutation to the common range: `f'(i) = sigma(f(i))`
    /// for `sigma` given as 0-based images of `0..range`.
    pub fn permute_range(&self, sigma: &[u16]) -> FunctionTuple {
        let values = self
            .values
            .iter()
            .map(|f| f.iter().map(|&v| sigma[(v - 1) as usize] + 1).collect())
            .collect();
        FunctionTuple {
            range: self.range,
            values,
        }
    }

    /// The full indicator assignment `x[l,i,j] = [f_l(i) = j]` over the
    /// tuple's variable universe.
    pub fn raw_assignment(&self) -> BTreeMap<VarId, Rational> {
        let mut a = BTreeMap::new();
        for (l, f) in self.values.iter().enumerate() {
            for (i, &v) in f.iter().enumerate() {
                for j in 1..=self.range {
                    a.insert(
                        VarId::raw((l + 1) as u8, (i + 1) as u16, j),
                        rat((v == j) as i64),
                    );
                }
            }
        }
        a
    }

    /// The frequency assignment `z[l,j] = |f_l^{-1}(j)|`.
    pub fn freq_assignment(&self) -> BTreeMap<VarId, Rational> {
        let freq = self.freq_matrix();
        let mut a = BTreeMap::new();
        for (l, row) in freq.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                a.insert(
                    VarId::freq((l + 1) as u8, (j + 1) as u16),
                    rat(c as i64),
                );
            }
        }
        a
    }
}

/// Text form `f1=1,1,2; f2=2,1; M=3`.
impl fmt::Display for FunctionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, func) in self.values.iter().enumerate() {
            let vals: Vec<String> = func.iter().map(|v| v.to_string()).collect();
            write!(f, "f{}={}; ", l + 1, vals.join(","))?;
        }
        write!(f, "M={}", self.range)
    }
}

impl FromStr for FunctionTuple {
    type Err = PropertyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut values: Vec<Vec<u16>> = Vec::new();
        let mut range: Option<u16> = None;
        let mut pos = 0usize;
        for piece in s.split(';') {
            let trimmed = piece.trim();
            let here = pos + (piece.len() - piece.trim_start().len());
            let err = |msg: String| PropertyError::Parse { pos: here, msg };
            if let Some(m_txt) = trimmed.strip_prefix("M=") {
                if range.is_some() {
                    return Err(err("duplicate M= entry".into()));
                }
                range = Some(
                    m_txt
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("invalid range `{m_txt}`")))?,
                );
            } else if let Some(rest) = trimmed.strip_prefix('f') {
                let (idx_txt, vals_txt) = rest
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected f<k>=..., found `{trimmed}`")))?;
                let idx: usize = idx_txt
                    .parse()
                    .map_err(|_| err(format!("invalid function index `{idx_txt}`")))?;
                if idx != values.len() + 1 {
                    return Err(err(format!(
                        "functions must appear in order; expected f{}",
                        values.len() + 1
                    )));
                }
                let vals: Result<Vec<u16>, _> = vals_txt
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<u16>()
                            .map_err(|_| err(format!("invalid value `{v}`")))
                    })
                    .collect();
                values.push(vals?);
            } else if !trimmed.is_empty() {
                return Err(err(format!("unexpected entry `{trimmed}`")));
            }
            pos += piece.len() + 1;
        }
        let range = range.ok_or(PropertyError::Parse {
            pos: s.len(),
            msg: "missing M= entry".into(),
        })?;
        if values.is_empty() {
            return Err(PropertyError::Parse {
                pos: s.len(),
                msg: "no functions given".into(),
            });
        }
        FunctionTuple::new(values, range)
    }
}

/// Preimage counts: `counts[l][j-1] = |f_l^{-1}(j)|`. Row `l` sums to the
/// domain size of function `l`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrequencyMatrix {
    counts: Vec<Vec<u32>>,
}

impl FrequencyMatrix {
    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    pub fn row(&self, func: usize) -> &[u32] {
        &self.counts[func - 1]
    }

    /// Column `j` as the vector `(z[1,j], ..., z[k,j])`.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let k = self.counts.len();
        let m = self.counts[0].len();
        (0..m)
            .map(|j| (0..k).map(|l| self.counts[l][j]).collect())
            .collect()
    }
}

/// Complete invariant of the joint action: the frequency-matrix columns
/// sorted descending lexicographically. Two tuples share a key iff they
/// are related by domain permutations and a range permutation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalKey(Vec<Vec<u32>>);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .0
            .iter()
            .map(|c| {
                let parts: Vec<String> = c.iter().map(|e| e.to_string()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        write!(f, "{}", cols.join("|"))
    }
}

/// The canonical orbit key of a tuple.
pub fn orbit_canonical(t: &FunctionTuple) -> CanonicalKey {
    let mut cols = t.freq_matrix().columns();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    CanonicalKey(cols)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PropertyKind {
    /// Two functions share a value: some `(x, y)` with `f(x) = g(y)`.
    Claw,
    /// All `k` functions share a value at some tuple of points.
    KClaw,
    /// Single function promised one-to-one or two-to-one; true on the
    /// two-to-one half.
    CollisionPromise,
    /// Single function hits a fixed target value somewhere. Not
    /// range-symmetric; kept for the OR reduction and as the diagnostic
    /// example of a property the frequency space cannot host.
    OrOnSecond { target: u16 },
    /// Lookup table keyed by the canonical orbit key; symmetric by
    /// construction. Missing keys are outside the promise.
    Custom { table: BTreeMap<CanonicalKey, bool> },
}

/// A property together with its sizes and optional image bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropertySpec {
    pub kind: PropertyKind,
    pub domains: Vec<u16>,
    pub range: u16,
    pub image_bound: Option<u16>,
}

impl PropertySpec {
    pub fn claw(f: u16, g: u16, m: u16) -> Self {
        PropertySpec {
            kind: PropertyKind::Claw,
            domains: vec![f, g],
            range: m,
            image_bound: None,
        }
    }

    pub fn k_claw(domains: &[u16], m: u16) -> Self {
        PropertySpec {
            kind: PropertyKind::KClaw,
            domains: domains.to_vec(),
            range: m,
            image_bound: None,
        }
    }

    pub fn collision(m: u16) -> Self {
        PropertySpec {
            kind: PropertyKind::CollisionPromise,
            domains: vec![m],
            range: m,
            image_bound: None,
        }
    }

    pub fn or_on_second(g: u16, m: u16, target: u16) -> Self {
        PropertySpec {
            kind: PropertyKind::OrOnSecond { target },
            domains: vec![g],
            range: m,
            image_bound: None,
        }
    }

    pub fn custom(domains: &[u16], m: u16, table: BTreeMap<CanonicalKey, bool>) -> Self {
        PropertySpec {
            kind: PropertyKind::Custom { table },
            domains: domains.to_vec(),
            range: m,
            image_bound: None,
        }
    }

    pub fn k(&self) -> usize {
        self.domains.len()
    }

    /// Upper bound on the union image size: the declared bound if any,
    /// else the sum of the domain sizes.
    pub fn support_bound(&self) -> u16 {
        self.image_bound
            .unwrap_or_else(|| self.domains.iter().sum())
    }

    pub fn name(&self) -> String {
        match &self.kind {
            PropertyKind::Claw => "claw".into(),
            PropertyKind::KClaw => "kclaw".into(),
            PropertyKind::CollisionPromise => "collision".into(),
            PropertyKind::OrOnSecond { target } => format!("or(target={target})"),
            PropertyKind::Custom { .. } => "custom".into(),
        }
    }

    fn sizes_match(&self, t: &FunctionTuple) -> bool {
        t.range() == self.range && t.domains() == self.domains
    }

    /// Promise membership without evaluating the property.
    pub fn in_promise(&self, t: &FunctionTuple) -> bool {
        if !self.sizes_match(t) {
            return false;
        }
        match &self.kind {
            PropertyKind::Claw | PropertyKind::KClaw | PropertyKind::OrOnSecond { .. } => true,
            PropertyKind::CollisionPromise => {
                is_one_to_one(t.function(1)) || is_two_to_one(t.function(1))
            }
            PropertyKind::Custom { table } => table.contains_key(&orbit_canonical(t)),
        }
    }
}

fn is_one_to_one(f: &[u16]) -> bool {
    let image: BTreeSet<u16> = f.iter().copied().collect();
    image.len() == f.len()
}

fn is_two_to_one(f: &[u16]) -> bool {
    if f.len() % 2 != 0 {
        return false;
    }
    let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
    for &v in f {
        *counts.entry(v).or_insert(0) += 1;
    }
    counts.values().all(|&c| c == 2)
}

/// Evaluates the property on a tuple inside its promise domain.
pub fn eval_property(spec: &PropertySpec, t: &FunctionTuple) -> Result<bool, PropertyError> {
    if !spec.sizes_match(t) {
        return Err(PropertyError::SizeMismatch {
            tuple: t.to_string(),
        });
    }
    match &spec.kind {
        PropertyKind::Claw | PropertyKind::KClaw => {
            let mut common: Option<BTreeSet<u16>> = None;
            for l in 1..=t.k() {
                let image = t.image(l);
                common = Some(match common {
                    None => image,
                    Some(acc) => acc.intersection(&image).copied().collect(),
                });
            }
            Ok(!common.unwrap_or_default().is_empty())
        }
        PropertyKind::CollisionPromise => {
            let h = t.function(1);
            if is_two_to_one(h) {
                Ok(true)
            } else if is_one_to_one(h) {
                Ok(false)
            } else {
                Err(PropertyError::PromiseViolation {
                    tuple: t.to_string(),
                    property: spec.name(),
                })
            }
        }
        PropertyKind::OrOnSecond { target } => {
            Ok(t.function(1).iter().any(|v| v == target))
        }
        PropertyKind::Custom { table } => {
            table
                .get(&orbit_canonical(t))
                .copied()
                .ok_or_else(|| PropertyError::PromiseViolation {
                    tuple: t.to_string(),
                    property: spec.name(),
                })
        }
    }
}

/// Total number of tuples before the promise filter.
pub fn raw_domain_size(spec: &PropertySpec) -> u128 {
    spec.domains
        .iter()
        .fold(1u128, |acc, &f| acc.saturating_mul((spec.range as u128).pow(f as u32)))
}

/// Enumerates the promise domain in lexicographic order of the flattened
/// value sequences, each tuple exactly once.
pub fn enumerate_domain(
    spec: &PropertySpec,
    budget: u64,
) -> Result<Vec<FunctionTuple>, PropertyError> {
    if matches!(spec.kind, PropertyKind::CollisionPromise) && spec.range % 2 != 0 {
        return Err(PropertyError::OddCollisionDomain { m: spec.range });
    }
    let count = raw_domain_size(spec);
    if count > budget as u128 {
        return Err(PropertyError::ExceedsBudget {
            count,
            budget,
        });
    }
    let total_len: usize = spec.domains.iter().map(|&f| f as usize).sum();
    let mut out = Vec::new();
    let mut flat = vec![1u16; total_len];
    loop {
        let mut values = Vec::with_capacity(spec.k());
        let mut at = 0usize;
        for &f in &spec.domains {
            values.push(flat[at..at + f as usize].to_vec());
            at += f as usize;
        }
        let t = FunctionTuple {
            range: spec.range,
            values,
        };
        if spec.in_promise(&t) {
            out.push(t);
        }
        // Odometer: last position increments fastest.
        let mut pos = total_len;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if flat[pos] < spec.range {
                flat[pos] += 1;
                break;
            }
            flat[pos] = 1;
        }
    }
}

/// One representative per orbit, with the orbit's tuple count, in
/// deterministic (canonical-key) order.
pub fn orbit_representatives(
    spec: &PropertySpec,
    budget: u64,
) -> Result<Vec<(FunctionTuple, u64)>, PropertyError> {
    let mut classes: BTreeMap<CanonicalKey, (FunctionTuple, u64)> = BTreeMap::new();
    for t in enumerate_domain(spec, budget)? {
        let key = orbit_canonical(&t);
        classes
            .entry(key)
            .and_modify(|(_, n)| *n += 1)
            .or_insert((t, 1));
    }
    Ok(classes.into_values().collect())
}

/// Outcome of the exhaustive symmetry check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymmetryReport {
    /// The property value is constant on every canonical-key class.
    pub constant_on_orbits: bool,
    /// The promise domain is closed under all generators.
    pub promise_closed: bool,
    /// Invariant under each domain permutation separately.
    pub domain_invariant: bool,
    /// Invariant under the joint range permutation.
    pub range_invariant: bool,
}

impl SymmetryReport {
    pub fn symmetric(&self) -> bool {
        self.constant_on_orbits && self.promise_closed
    }
}

fn transposition(n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    if n >= 2 {
        p.swap(0, 1);
    }
    p
}

fn rotation(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// Checks, by exhausting the promise domain, that the property is
/// constant on orbits and the promise is closed under the generating
/// permutations (a transposition and a full cycle per domain and for
/// the range).
pub fn check_symmetry(spec: &PropertySpec, budget: u64) -> Result<SymmetryReport, PropertyError> {
    let tuples = enumerate_domain(spec, budget)?;
    let mut by_key: BTreeMap<CanonicalKey, bool> = BTreeMap::new();
    let mut constant_on_orbits = true;
    let mut promise_closed = true;
    let mut domain_invariant = true;
    let mut range_invariant = true;

    for t in &tuples {
        let value = eval_property(spec, t)?;
        match by_key.get(&orbit_canonical(t)) {
            Some(&prev) if prev != value => constant_on_orbits = false,
            Some(_) => {}
            None => {
                by_key.insert(orbit_canonical(t), value);
            }
        }
        for l in 1..=spec.k() {
            let n = spec.domains[l - 1] as usize;
            for pi in [transposition(n), rotation(n)] {
                let t2 = t.permute_domain(l, &pi);
                if !spec.in_promise(&t2) {
                    promise_closed = false;
                } else if eval_property(spec, &t2)? != value {
                    domain_invariant = false;
                }
            }
        }
        let m = spec.range as usize;
        for sigma_usize in [transposition(m), rotation(m)] {
            let sigma: Vec<u16> = sigma_usize.iter().map(|&v| v as u16).collect();
            let t2 = t.permute_range(&sigma);
            if !spec.in_promise(&t2) {
                promise_closed = false;
            } else if eval_property(spec, &t2)? != value {
                range_invariant = false;
            }
        }
    }
    Ok(SymmetryReport {
        constant_on_orbits,
        promise_closed,
        domain_invariant,
        range_invariant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(s: &str) -> FunctionTuple {
        s.parse().unwrap()
    }

    #[test]
    fn claw_eval_examples() {
        let spec = PropertySpec::claw(1, 1, 2);
        assert!(eval_property(&spec, &tuple("f1=1; f2=1; M=2")).unwrap());
        assert!(!eval_property(&spec, &tuple("f1=1; f2=2; M=2")).unwrap());
    }

    #[test]
    fn collision_eval_examples() {
        let spec = PropertySpec::collision(4);
        assert!(eval_property(&spec, &tuple("f1=1,1,2,2; M=4")).unwrap());
        assert!(!eval_property(&spec, &tuple("f1=1,2,3,4; M=4")).unwrap());
        assert!(matches!(
            eval_property(&spec, &tuple("f1=1,1,1,2; M=4")),
            Err(PropertyError::PromiseViolation { .. })
        ));
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(
            enumerate_domain(&PropertySpec::claw(1, 1, 2), 100).unwrap().len(),
            4
        );
        // Collision at M = 2: 2 one-to-one + 2 two-to-one.
        let tuples = enumerate_domain(&PropertySpec::collision(2), 100).unwrap();
        assert_eq!(tuples.len(), 4);
        assert_eq!(
            enumerate_domain(&PropertySpec::k_claw(&[1, 1, 1], 2), 100)
                .unwrap()
                .len(),
            8
        );
    }

    #[test]
    fn enumerate_budget_and_odd_collision() {
        assert!(matches!(
            enumerate_domain(&PropertySpec::claw(2, 2, 4), 10),
            Err(PropertyError::ExceedsBudget { count: 256, .. })
        ));
        assert!(matches!(
            enumerate_domain(&PropertySpec::collision(3), 1000),
            Err(PropertyError::OddCollisionDomain { m: 3 })
        ));
    }

    #[test]
    fn freq_matrix_examples() {
        let t = tuple("f1=1,1,2; M=3");
        assert_eq!(t.freq_matrix().row(1), &[2, 1, 0]);
        let bijection = tuple("f1=2,3,1; M=3");
        assert_eq!(bijection.freq_matrix().row(1), &[1, 1, 1]);
        let t = tuple("f1=2,2; f2=2; M=2");
        assert_eq!(t.freq_matrix().row(1), &[0, 2]);
        assert_eq!(t.freq_matrix().row(2), &[0, 1]);
    }

    #[test]
    fn canonical_key_examples() {
        // (f=(1), g=(2)) and (f=(2), g=(1)) are related by the range swap.
        let a = orbit_canonical(&tuple("f1=1; f2=2; M=2"));
        let b = orbit_canonical(&tuple("f1=2; f2=1; M=2"));
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1,0)|(0,1)");
        // Claw value differs, so the keys must differ.
        let c = orbit_canonical(&tuple("f1=1; f2=1; M=2"));
        assert_ne!(a, c);
    }

    #[test]
    fn canonical_key_invariant_under_action() {
        let t = tuple("f1=1,2,1; f2=3,1; M=3");
        let key = orbit_canonical(&t);
        assert_eq!(key, orbit_canonical(&t.permute_domain(1, &[2, 0, 1])));
        assert_eq!(key, orbit_canonical(&t.permute_domain(2, &[1, 0])));
        assert_eq!(key, orbit_canonical(&t.permute_range(&[1, 2, 0])));
    }

    #[test]
    fn canonical_key_is_complete_small() {
        // Two tuples share a key iff some (pi_1..pi_k, sigma) relates
        // them; checked exhaustively at F = (2,1), M = 3.
        let spec = PropertySpec::claw(2, 1, 3);
        let tuples = enumerate_domain(&spec, 10_000).unwrap();
        for a in &tuples {
            for b in &tuples {
                let same_key = orbit_canonical(a) == orbit_canonical(b);
                let mut related = false;
                for pi1 in perms(2) {
                    for pi2 in perms(1) {
                        for sigma in perms(3) {
                            let sig16: Vec<u16> = sigma.iter().map(|&v| v as u16).collect();
                            let moved = a
                                .permute_domain(1, &pi1)
                                .permute_domain(2, &pi2)
                                .permute_range(&sig16);
                            if &moved == b {
                                related = true;
                            }
                        }
                    }
                }
                assert_eq!(same_key, related, "{a} vs {b}");
            }
        }
    }

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in perms(n - 1) {
            for pos in 0..n {
                let mut p = rest.clone();
                p.insert(pos, n - 1);
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn check_symmetry_examples() {
        let claw = check_symmetry(&PropertySpec::claw(2, 2, 3), 100_000).unwrap();
        assert!(claw.symmetric());
        assert!(claw.domain_invariant && claw.range_invariant);

        let collision = check_symmetry(&PropertySpec::collision(4), 100_000).unwrap();
        assert!(collision.symmetric());

        // The OR property is domain-symmetric but not range-symmetric.
        let or = check_symmetry(&PropertySpec::or_on_second(2, 2, 1), 100_000).unwrap();
        assert!(!or.symmetric());
        assert!(or.domain_invariant);
        assert!(!or.range_invariant);
    }

    #[test]
    fn property_constant_on_orbits_exhaustive() {
        for spec in [
            PropertySpec::claw(3, 2, 4),
            PropertySpec::k_claw(&[1, 2, 1], 3),
            PropertySpec::collision(4),
        ] {
            let mut by_key: BTreeMap<CanonicalKey, bool> = BTreeMap::new();
            let tuples = enumerate_domain(&spec, 10_000_000).unwrap();
            for t in &tuples {
                let v = eval_property(&spec, t).unwrap();
                let prev = by_key.insert(orbit_canonical(t), v);
                assert!(prev.is_none() || prev == Some(v));
            }
            // Orbit sizes partition the promise domain.
            let reps = orbit_representatives(&spec, 10_000_000).unwrap();
            let total: u64 = reps.iter().map(|(_, n)| n).sum();
            assert_eq!(total as usize, tuples.len());
        }
    }

    #[test]
    fn freq_matrix_equivariance() {
        let t = tuple("f1=1,3,3; f2=2,1; M=3");
        // Invariant under domain permutations.
        assert_eq!(
            t.permute_domain(1, &[2, 0, 1]).freq_matrix(),
            t.freq_matrix()
        );
        // Columns permuted under range permutations.
        let sigma: Vec<u16> = vec![2, 0, 1];
        let moved = t.permute_range(&sigma).freq_matrix();
        let orig = t.freq_matrix();
        for l in 1..=2usize {
            for j in 0..3usize {
                assert_eq!(moved.row(l)[sigma[j] as usize], orig.row(l)[j]);
            }
        }
    }

    #[test]
    fn tuple_text_round_trip_and_errors() {
        let t = tuple("f1=1,1,2; f2=2,1; M=3");
        assert_eq!(t.to_string(), "f1=1,1,2; f2=2,1; M=3");
        assert_eq!(tuple(&t.to_string()), t);
        assert!(matches!(
            "f1=1; f3=2; M=2".parse::<FunctionTuple>(),
            Err(PropertyError::Parse { .. })
        ));
        assert!(matches!(
            "f1=1; f2=2".parse::<FunctionTuple>(),
            Err(PropertyError::Parse { .. })
        ));
        assert!(matches!(
            "f1=5; M=2".parse::<FunctionTuple>(),
            Err(PropertyError::SizeMismatch { .. })
        ));
    }
}
