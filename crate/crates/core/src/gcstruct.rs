//! Invariant generalized almost complex structures on a flag, one fiber
//! structure per isotropy summand, and their integrability.
//!
//! On `u_α ⊕ u_α*` we use the ordered basis `{A_α, S_α, −S_α*, A_α*}`. A
//! fiber structure is either of complex type, `±J0`, or of noncomplex type
//! with parameters `(a, x, y)` subject to `a² = xy − 1`.

use crate::flagdecomp::{Flag, Triple};
use crate::numeric::{fmt_q, q, qf, Matrix, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcError {
    #[error("noncomplex parameters violate a² = xy − 1: a={a}, x={x}, y={y}")]
    InvalidNoncomplex { a: String, x: String, y: String },
    #[error("assignment is missing components {0:?}")]
    MissingComponents(Vec<usize>),
    #[error("assignment refers to component {0}, but the flag has only {1}")]
    UnknownComponent(usize, usize),
    #[error("both fibers must be of noncomplex type")]
    NotNoncomplex,
    #[error("x_α + x_β = 0: no noncomplex structure closes the triple")]
    Infeasible,
    #[error("{0} isotropy summands is too many to enumerate patterns (limit {1})")]
    TooManyComponents(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Parameters of a noncomplex fiber; the constructor enforces `a² = xy − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NcParams {
    a: Q,
    x: Q,
    y: Q,
}

impl NcParams {
    pub fn new(a: Q, x: Q, y: Q) -> Result<Self, GcError> {
        if a * a != x * y - Q::one() {
            return Err(GcError::InvalidNoncomplex { a: fmt_q(&a), x: fmt_q(&x), y: fmt_q(&y) });
        }
        Ok(NcParams { a, x, y })
    }

    /// Solves for `y`; `x` must be nonzero.
    pub fn from_ax(a: Q, x: Q) -> Result<Self, GcError> {
        if x.is_zero() {
            return Err(GcError::InvalidNoncomplex { a: fmt_q(&a), x: "0".into(), y: "?".into() });
        }
        Self::new(a, x, (a * a + Q::one()) / x)
    }

    pub fn a(&self) -> Q {
        self.a
    }

    pub fn x(&self) -> Q {
        self.x
    }

    pub fn y(&self) -> Q {
        self.y
    }

    pub fn negated(&self) -> Self {
        NcParams { a: -self.a, x: -self.x, y: -self.y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiberStructure {
    Complex(Sign),
    Noncomplex(NcParams),
}

impl FiberStructure {
    pub const PLUS: FiberStructure = FiberStructure::Complex(Sign::Plus);
    pub const MINUS: FiberStructure = FiberStructure::Complex(Sign::Minus);

    /// Noncomplex structure from integer parameters; panics on invalid input.
    pub fn nc(a: i64, x: i64, y: i64) -> Self {
        FiberStructure::Noncomplex(NcParams::new(q(a), q(x), q(y)).expect("a² = xy − 1"))
    }

    pub fn noncomplex(a: Q, x: Q, y: Q) -> Result<Self, GcError> {
        NcParams::new(a, x, y).map(FiberStructure::Noncomplex)
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, FiberStructure::Complex(_))
    }

    pub fn tag(&self) -> PatternTag {
        match self {
            FiberStructure::Complex(Sign::Plus) => PatternTag::Plus,
            FiberStructure::Complex(Sign::Minus) => PatternTag::Minus,
            FiberStructure::Noncomplex(_) => PatternTag::Nc,
        }
    }

    /// `J ↦ −J`, with `NC(a, x, y) ↦ NC(−a, −x, −y)`.
    pub fn negated(&self) -> Self {
        match self {
            FiberStructure::Complex(s) => FiberStructure::Complex(s.flip()),
            FiberStructure::Noncomplex(p) => FiberStructure::Noncomplex(p.negated()),
        }
    }

    /// The five noncomplex sample points used by the sweeps.
    pub fn sample_points() -> [FiberStructure; 5] {
        [
            FiberStructure::nc(0, 1, 1),
            FiberStructure::nc(1, 2, 1),
            FiberStructure::nc(2, 5, 1),
            FiberStructure::nc(1, 1, 2),
            FiberStructure::Noncomplex(NcParams::new(q(0), qf(1, 2), q(2)).unwrap()),
        ]
    }

    /// Both complex structures followed by the noncomplex sample points.
    pub fn sweep_values() -> Vec<FiberStructure> {
        let mut v = vec![FiberStructure::PLUS, FiberStructure::MINUS];
        v.extend(Self::sample_points());
        v
    }
}

impl fmt::Display for FiberStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberStructure::Complex(s) => write!(f, "C({})", s.symbol()),
            FiberStructure::Noncomplex(p) => {
                write!(f, "NC({},{},{})", fmt_q(&p.a), fmt_q(&p.x), fmt_q(&p.y))
            }
        }
    }
}

/// `J0` in the basis `{A, S, −S*, A*}`.
pub fn j0() -> Matrix<Q> {
    let z = q(0);
    let o = q(1);
    Matrix::from_rows(vec![vec![z, -o, z, z], vec![o, z, z, z], vec![z, z, z, -o], vec![z, z, o, z]])
}

pub fn fiber_matrix(f: &FiberStructure) -> Matrix<Q> {
    match f {
        FiberStructure::Complex(Sign::Plus) => j0(),
        FiberStructure::Complex(Sign::Minus) => -&j0(),
        FiberStructure::Noncomplex(p) => {
            let z = q(0);
            Matrix::from_rows(vec![
                vec![p.a, z, z, -p.x],
                vec![z, p.a, p.x, z],
                vec![z, -p.y, -p.a, z],
                vec![p.y, z, z, -p.a],
            ])
        }
    }
}

/// The split pairing `½(ξ(Y) + η(X))` on the fiber basis: it pairs the
/// first basis vector with the third and the second with the fourth.
pub fn split_pairing() -> Matrix<Q> {
    let z = q(0);
    let h = qf(1, 2);
    Matrix::from_rows(vec![vec![z, z, h, z], vec![z, z, z, h], vec![h, z, z, z], vec![z, h, z, z]])
}

/// Why a triple fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReasonCode {
    /// All complex, `J_α = J_β ≠ J_{α+β}`.
    ComplexSignMismatch,
    /// One of α, β noncomplex and the two complex fibers differ in sign.
    NoncomplexSummandSignMismatch,
    /// Only α+β noncomplex while `J_α = J_β`.
    NoncomplexSumEqualSigns,
    /// Exactly two of the three fibers are noncomplex.
    TwoNoncomplex,
    /// All noncomplex and the polynomial constraints do not vanish.
    ConstraintViolated,
}

impl ReasonCode {
    pub fn code(&self) -> &'static str {
        match self {
            ReasonCode::ComplexSignMismatch => "complex-sign-mismatch",
            ReasonCode::NoncomplexSummandSignMismatch => "noncomplex-summand-sign-mismatch",
            ReasonCode::NoncomplexSumEqualSigns => "noncomplex-sum-equal-signs",
            ReasonCode::TwoNoncomplex => "two-noncomplex",
            ReasonCode::ConstraintViolated => "noncomplex-constraint-violated",
        }
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// The two polynomial constraints on an all-noncomplex triple:
/// `x_α x_β − x_α x_γ − x_β x_γ` and `a_γ x_α x_β − a_β x_α x_γ − a_α x_β x_γ`.
pub fn constraint_residuals(a: &NcParams, b: &NcParams, s: &NcParams) -> (Q, Q) {
    let r1 = a.x * b.x - a.x * s.x - b.x * s.x;
    let r2 = s.a * a.x * b.x - b.a * a.x * s.x - a.a * b.x * s.x;
    (r1, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleOutcome {
    pub reason: Option<ReasonCode>,
    /// Present exactly when all three fibers are noncomplex.
    pub residuals: Option<(Q, Q)>,
}

impl TripleOutcome {
    pub fn ok(&self) -> bool {
        self.reason.is_none()
    }
}

/// Decision table for one triple `(α, β, α+β)`.
pub fn check_triple(fa: &FiberStructure, fb: &FiberStructure, fs: &FiberStructure) -> TripleOutcome {
    use FiberStructure::{Complex as C, Noncomplex as N};
    let fail = |r| TripleOutcome { reason: Some(r), residuals: None };
    let pass = TripleOutcome { reason: None, residuals: None };
    match (fa, fb, fs) {
        (C(a), C(b), C(s)) => {
            if a == b && a != s {
                fail(ReasonCode::ComplexSignMismatch)
            } else {
                pass
            }
        }
        (N(_), C(b), C(s)) | (C(b), N(_), C(s)) => {
            if b == s {
                pass
            } else {
                fail(ReasonCode::NoncomplexSummandSignMismatch)
            }
        }
        (C(a), C(b), N(_)) => {
            if a != b {
                pass
            } else {
                fail(ReasonCode::NoncomplexSumEqualSigns)
            }
        }
        (N(a), N(b), N(s)) => {
            let r = constraint_residuals(a, b, s);
            let reason = (!r.0.is_zero() || !r.1.is_zero()).then_some(ReasonCode::ConstraintViolated);
            TripleOutcome { reason, residuals: Some(r) }
        }
        _ => fail(ReasonCode::TwoNoncomplex),
    }
}

pub fn triple_integrable(fa: &FiberStructure, fb: &FiberStructure, fs: &FiberStructure) -> bool {
    check_triple(fa, fb, fs).ok()
}

/// Closes a noncomplex chain: given `J_α`, `J_β` noncomplex, the unique
/// noncomplex `J_{α+β}` making the triple integrable.
pub fn solve_noncomplex_chain(fa: &FiberStructure, fb: &FiberStructure) -> Result<FiberStructure, GcError> {
    let (FiberStructure::Noncomplex(a), FiberStructure::Noncomplex(b)) = (fa, fb) else {
        return Err(GcError::NotNoncomplex);
    };
    let denom = a.x + b.x;
    if denom.is_zero() {
        return Err(GcError::Infeasible);
    }
    let xg = a.x * b.x / denom;
    let ag = (b.a * a.x * xg + a.a * b.x * xg) / (a.x * b.x);
    NcParams::from_ax(ag, xg).map(FiberStructure::Noncomplex)
}

/// One fiber structure per isotropy component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    fibers: BTreeMap<usize, FiberStructure>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vec(fibers: Vec<FiberStructure>) -> Self {
        Assignment { fibers: fibers.into_iter().enumerate().collect() }
    }

    pub fn uniform(n: usize, f: FiberStructure) -> Self {
        Self::from_vec(vec![f; n])
    }

    pub fn insert(&mut self, component: usize, f: FiberStructure) {
        self.fibers.insert(component, f);
    }

    pub fn get(&self, component: usize) -> Option<&FiberStructure> {
        self.fibers.get(&component)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &FiberStructure)> {
        self.fibers.iter().map(|(&k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn negated(&self) -> Self {
        Assignment { fibers: self.fibers.iter().map(|(&k, v)| (k, v.negated())).collect() }
    }

    pub fn pattern(&self) -> TypePattern {
        TypePattern(self.fibers.values().map(FiberStructure::tag).collect())
    }

    /// Checks that the assignment covers exactly components `0..n`.
    pub fn validate(&self, n: usize) -> Result<(), GcError> {
        if let Some(&k) = self.fibers.keys().find(|&&k| k >= n) {
            return Err(GcError::UnknownComponent(k, n));
        }
        let missing: Vec<usize> = (0..n).filter(|k| !self.fibers.contains_key(k)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(GcError::MissingComponents(missing))
        }
    }

    fn at(&self, k: usize) -> &FiberStructure {
        &self.fibers[&k]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrabilityReport {
    pub verdict: bool,
    pub violations: Vec<(Triple, ReasonCode)>,
    pub noncomplex_residuals: Vec<(Triple, (Q, Q))>,
}

/// Applies the triple rule to every triple of the flag.
pub fn assignment_integrable(flag: &Flag, asg: &Assignment) -> Result<IntegrabilityReport, GcError> {
    asg.validate(flag.num_components())?;
    let mut violations = Vec::new();
    let mut residuals = Vec::new();
    for t in &flag.triples {
        let (i, j, k) = t.comps;
        let out = check_triple(asg.at(i), asg.at(j), asg.at(k));
        if let Some(r) = out.reason {
            violations.push((*t, r));
        }
        if let Some(r) = out.residuals {
            residuals.push((*t, r));
        }
    }
    let verdict = violations.is_empty();
    Ok(IntegrabilityReport { verdict, violations, noncomplex_residuals: residuals })
}

/// Verdict only; stops at the first failing triple class.
pub fn assignment_verdict(flag: &Flag, asg: &Assignment) -> Result<bool, GcError> {
    asg.validate(flag.num_components())?;
    Ok(flag.triple_classes().iter().all(|&(i, j, k)| triple_integrable(asg.at(i), asg.at(j), asg.at(k))))
}

/// Symbolic type of a fiber: `C(+)`, `C(−)` or `NC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTag {
    Plus,
    Minus,
    Nc,
}

impl PatternTag {
    pub fn label(&self) -> &'static str {
        match self {
            PatternTag::Plus => "C(+)",
            PatternTag::Minus => "C(-)",
            PatternTag::Nc => "NC",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            PatternTag::Plus => PatternTag::Minus,
            PatternTag::Minus => PatternTag::Plus,
            PatternTag::Nc => PatternTag::Nc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypePattern(pub Vec<PatternTag>);

impl TypePattern {
    pub fn num_noncomplex(&self) -> usize {
        self.0.iter().filter(|t| **t == PatternTag::Nc).count()
    }

    pub fn flipped(&self) -> Self {
        TypePattern(self.0.iter().map(|t| t.flip()).collect())
    }

    fn sort_key(&self) -> (usize, Vec<PatternTag>) {
        (self.num_noncomplex(), self.0.clone())
    }
}

impl fmt::Display for TypePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.0.iter().map(PatternTag::label).collect();
        write!(f, "({})", labels.join(", "))
    }
}

/// Whether a triple class can be integrable under a pattern. Complex signs
/// are checked exactly; noncomplex entries only by which table row applies.
fn class_ok(a: PatternTag, b: PatternTag, s: PatternTag) -> bool {
    use PatternTag::Nc;
    match (a == Nc, b == Nc, s == Nc) {
        (false, false, false) => !(a == b && a != s),
        (true, false, false) => b == s,
        (false, true, false) => a == s,
        (false, false, true) => a != b,
        (true, true, true) => true,
        _ => false,
    }
}

/// An integrable type pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternClassification {
    pub pattern: TypePattern,
    /// Triple classes whose three components are all noncomplex; the
    /// pattern is integrable only if their polynomial constraints hold.
    pub constraint_classes: Vec<(usize, usize, usize)>,
    /// A concrete integrable assignment realizing the pattern, when the
    /// constraint system has a solution.
    pub witness: Option<Assignment>,
}

impl PatternClassification {
    pub fn is_conditional(&self) -> bool {
        !self.constraint_classes.is_empty()
    }
}

/// Largest number of summands for which patterns are enumerated.
pub const MAX_PATTERN_COMPONENTS: usize = 14;

/// All type patterns compatible with every triple class, sorted by the
/// number of noncomplex summands and then lexicographically.
pub fn enumerate_integrable_patterns(flag: &Flag) -> Result<Vec<PatternClassification>, GcError> {
    let s = flag.num_components();
    if s > MAX_PATTERN_COMPONENTS {
        return Err(GcError::TooManyComponents(s, MAX_PATTERN_COMPONENTS));
    }
    let classes = flag.triple_classes();
    let mut by_last: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); s];
    for &c in &classes {
        by_last[c.0.max(c.1).max(c.2)].push(c);
    }
    let mut found = Vec::new();
    let mut current = Vec::with_capacity(s);
    search(&by_last, &mut current, s, &mut found);
    let mut out: Vec<PatternClassification> = found
        .into_iter()
        .map(|tags| {
            let pattern = TypePattern(tags);
            let constraint_classes: Vec<_> = classes
                .iter()
                .copied()
                .filter(|&(i, j, k)| [i, j, k].iter().all(|&c| pattern.0[c] == PatternTag::Nc))
                .collect();
            let witness = realize(&pattern, &constraint_classes);
            PatternClassification { pattern, constraint_classes, witness }
        })
        .collect();
    out.sort_by_key(|p| p.pattern.sort_key());
    Ok(out)
}

fn search(
    by_last: &[Vec<(usize, usize, usize)>],
    current: &mut Vec<PatternTag>,
    s: usize,
    found: &mut Vec<Vec<PatternTag>>,
) {
    let k = current.len();
    if k == s {
        found.push(current.clone());
        return;
    }
    for tag in [PatternTag::Plus, PatternTag::Minus, PatternTag::Nc] {
        current.push(tag);
        let ok = by_last[k].iter().all(|&(i, j, l)| class_ok(current[i], current[j], current[l]));
        if ok {
            search(by_last, current, s, found);
        }
        current.pop();
    }
}

/// Builds an integrable assignment for a pattern.
///
/// With `w = 1/x` and `u = a/x` both constraints on an all-noncomplex triple
/// become linear: `w_γ = w_α + w_β` and `u_γ = u_α + u_β`. A solution
/// exists iff the kernel of that system leaves every `w` free of the
/// forced value zero.
fn realize(pattern: &TypePattern, classes: &[(usize, usize, usize)]) -> Option<Assignment> {
    let nc: Vec<usize> = (0..pattern.0.len()).filter(|&k| pattern.0[k] == PatternTag::Nc).collect();
    let pos = |c: usize| nc.iter().position(|&k| k == c).unwrap();
    let mut rows = Vec::new();
    for &(i, j, k) in classes {
        let mut row = vec![q(0); nc.len()];
        row[pos(k)] += q(1);
        row[pos(i)] -= q(1);
        row[pos(j)] -= q(1);
        rows.push(row);
    }
    let kernel =
        if rows.is_empty() { Matrix::<Q>::identity(nc.len()).to_rows() } else { Matrix::from_rows(rows).nullspace() };
    if (0..nc.len()).any(|c| kernel.iter().all(|v| v[c].is_zero())) {
        return None;
    }
    let combine = |t: i64| -> Vec<Q> {
        let mut v = vec![q(0); nc.len()];
        let mut coef = q(1);
        for b in &kernel {
            for (acc, x) in v.iter_mut().zip(b) {
                *acc += coef * x;
            }
            coef *= q(t);
        }
        v
    };
    let w = (2..)
        .map(combine)
        .find(|v| v.iter().all(|x| !x.is_zero()))
        .expect("a generic kernel combination avoids finitely many hyperplanes");
    let u = combine(-3);
    let mut asg = Assignment::new();
    for (k, tag) in pattern.0.iter().enumerate() {
        let f = match tag {
            PatternTag::Plus => FiberStructure::PLUS,
            PatternTag::Minus => FiberStructure::MINUS,
            PatternTag::Nc => {
                let c = pos(k);
                let x = w[c].recip();
                FiberStructure::Noncomplex(NcParams::from_ax(u[c] * x, x).ok()?)
            }
        };
        asg.insert(k, f);
    }
    Some(asg)
}

/// One entry of a compressed table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowEntry {
    /// `±J0`: the row's reference sign.
    Pm,
    /// `∓J0`: the opposite sign.
    Mp,
    Nc,
}

impl RowEntry {
    pub fn symbol(&self) -> &'static str {
        match self {
            RowEntry::Pm => "±J0",
            RowEntry::Mp => "∓J0",
            RowEntry::Nc => "noncomplex",
        }
    }
}

/// A table row written up to the global sign flip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternRow(pub Vec<RowEntry>);

impl PatternRow {
    /// The one or two concrete patterns the row stands for.
    pub fn expand(&self) -> Vec<TypePattern> {
        let p = TypePattern(
            self.0
                .iter()
                .map(|e| match e {
                    RowEntry::Pm => PatternTag::Plus,
                    RowEntry::Mp => PatternTag::Minus,
                    RowEntry::Nc => PatternTag::Nc,
                })
                .collect(),
        );
        let f = p.flipped();
        if f == p {
            vec![p]
        } else {
            vec![p, f]
        }
    }

    fn from_pattern(p: &TypePattern) -> Self {
        let reference = p.0.iter().copied().find(|t| *t != PatternTag::Nc);
        PatternRow(
            p.0.iter()
                .map(|&t| match t {
                    PatternTag::Nc => RowEntry::Nc,
                    t if Some(t) == reference => RowEntry::Pm,
                    _ => RowEntry::Mp,
                })
                .collect(),
        )
    }

    /// Parses entries such as `+ - NC` (also `±`, `∓`, `pm`, `mp`).
    pub fn parse(s: &str) -> Option<Self> {
        s.split_whitespace()
            .map(|tok| match tok {
                "+" | "±" | "pm" => Some(RowEntry::Pm),
                "-" | "∓" | "mp" => Some(RowEntry::Mp),
                "NC" | "nc" => Some(RowEntry::Nc),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(PatternRow)
    }
}

/// Groups patterns into rows closed under the global sign flip. Returns
/// `None` if the set is not closed under the flip.
pub fn compress_rows(patterns: &[TypePattern]) -> Option<Vec<PatternRow>> {
    let mut rows: Vec<PatternRow> = patterns.iter().map(PatternRow::from_pattern).collect();
    rows.sort_by_key(|r| (r.0.iter().filter(|e| **e == RowEntry::Nc).count(), r.0.clone()));
    rows.dedup();
    let mut expanded: Vec<TypePattern> = rows.iter().flat_map(PatternRow::expand).collect();
    let mut given = patterns.to_vec();
    expanded.sort();
    given.sort();
    given.dedup();
    (expanded == given).then_some(rows)
}
