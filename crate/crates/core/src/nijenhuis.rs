//! Independent integrability check through the Nijenhuis operator.
//!
//! Elements of the compact real form are written in the basis
//! `A_α = X_α − X_{−α}`, `S_α = i(X_α + X_{−α})` plus Cartan elements
//! `h_i = [X_{α_i}, X_{−α_i}]`. Brackets are evaluated through the
//! Chevalley basis `X_{±α}`. Cotangent vectors are carried as tangent
//! labels: the label `D` stands for the covector `k·⟨H, [D, ·]⟩` with
//! `k_α = 1/α(H)`.
//!
//! For `A, B, C` supported on roots `α, β, γ` the operator is
//!
//! ```text
//! N(A,B,C) = ½ ( k_γ ⟨H, [C₂, [A₁, B₁]]⟩ + k_α ⟨H, [A₂, [B₁, C₁]]⟩
//!              + k_β ⟨H, [B₂, [C₁, A₁]]⟩ )
//! ```
//!
//! where the subscript 1 is the tangent part and 2 the cotangent label.
//! A structure is integrable iff `N` vanishes on its `i`-eigenbundle.

use crate::flagdecomp::{Flag, FlagSpec};
use crate::gcstruct::{assignment_verdict, fiber_matrix, Assignment, FiberStructure, GcError};
use crate::numeric::{q, qf, GaussQ, Matrix, Q};
use crate::rootsys::{RootId, RootSystem, SignedRoot};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("bracket is defined on tangent elements only; got a cotangent component")]
    CotangentInBracket,
    #[error("element is not supported on a single root line")]
    NotSingleRoot,
    #[error("root {0} lies in the span of Θ, where k is undefined")]
    RootInTheta(String),
    #[error("regular element must have one coefficient per root of Σ\\Θ ({expected}), got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("α(H) vanishes on the root {0} outside the span of Θ")]
    NotRegular(String),
    #[error(transparent)]
    Assignment(#[from] GcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisVector {
    A(RootId),
    S(RootId),
    AStar(RootId),
    SStar(RootId),
    /// `h_i`, 0-based simple root index.
    Cartan(usize),
}

impl BasisVector {
    pub fn root(&self) -> Option<RootId> {
        match *self {
            BasisVector::A(r) | BasisVector::S(r) | BasisVector::AStar(r) | BasisVector::SStar(r) => Some(r),
            BasisVector::Cartan(_) => None,
        }
    }

    pub fn is_cotangent(&self) -> bool {
        matches!(self, BasisVector::AStar(_) | BasisVector::SStar(_))
    }
}

/// Finite linear combination of basis vectors with Gaussian rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<BasisVector, GaussQ>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: BasisVector) -> Self {
        Self::term(b, GaussQ::one())
    }

    pub fn term(b: BasisVector, c: GaussQ) -> Self {
        let mut e = Self::zero();
        e.add_term(b, c);
        e
    }

    pub fn add_term(&mut self, b: BasisVector, c: GaussQ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(b).or_insert_with(GaussQ::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn coeff(&self, b: BasisVector) -> GaussQ {
        self.terms.get(&b).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisVector, &GaussQ)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (&b, &c) in &other.terms {
            out.add_term(b, c);
        }
        out
    }

    pub fn scale(&self, k: GaussQ) -> Element {
        let mut out = Element::zero();
        for (&b, &c) in &self.terms {
            out.add_term(b, c * k);
        }
        out
    }

    /// The single root line carrying every term, if any.
    pub fn root_line(&self) -> Result<Option<RootId>, OracleError> {
        let mut line = None;
        for b in self.terms.keys() {
            let r = b.root().ok_or(OracleError::NotSingleRoot)?;
            match line {
                None => line = Some(r),
                Some(l) if l != r => return Err(OracleError::NotSingleRoot),
                _ => {}
            }
        }
        Ok(line)
    }

    /// Splits into the tangent part and the cotangent label.
    fn split(&self) -> (Element, Element) {
        let mut tangent = Element::zero();
        let mut label = Element::zero();
        for (&b, &c) in &self.terms {
            match b {
                BasisVector::AStar(r) => label.add_term(BasisVector::A(r), c),
                BasisVector::SStar(r) => label.add_term(BasisVector::S(r), c),
                other => tangent.add_term(other, c),
            }
        }
        (tangent, label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum XKey {
    Root(SignedRoot),
    H(usize),
}

type XVec = BTreeMap<XKey, GaussQ>;

fn x_add(v: &mut XVec, k: XKey, c: GaussQ) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(k).or_insert_with(GaussQ::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&k);
    }
}

/// Bracket tables for one root system.
#[derive(Debug, Clone)]
pub struct Algebra<'a> {
    rs: &'a RootSystem,
    /// `h_r` in the basis `h_i`, for each positive root `r`.
    coroots: Vec<Vec<Q>>,
}

impl<'a> Algebra<'a> {
    pub fn new(rs: &'a RootSystem) -> Self {
        let coroots = (0..rs.num_positive())
            .map(|r| {
                let nr = rs.norm(r);
                rs.root(r)
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| q(i64::from(n)) * rs.norm(rs.simple_id(i)) / nr)
                    .collect()
            })
            .collect();
        Algebra { rs, coroots }
    }

    pub fn rs(&self) -> &'a RootSystem {
        self.rs
    }

    fn to_x(&self, e: &Element) -> Result<XVec, OracleError> {
        let mut v = XVec::new();
        let i = GaussQ::i();
        for (&b, &c) in e.terms() {
            match b {
                BasisVector::A(r) => {
                    x_add(&mut v, XKey::Root(SignedRoot::pos(r)), c);
                    x_add(&mut v, XKey::Root(SignedRoot::neg(r)), -c);
                }
                BasisVector::S(r) => {
                    x_add(&mut v, XKey::Root(SignedRoot::pos(r)), c * i);
                    x_add(&mut v, XKey::Root(SignedRoot::neg(r)), c * i);
                }
                BasisVector::Cartan(k) => x_add(&mut v, XKey::H(k), c),
                BasisVector::AStar(_) | BasisVector::SStar(_) => return Err(OracleError::CotangentInBracket),
            }
        }
        Ok(v)
    }

    /// `c X_α + d X_{−α} = p A_α + q S_α` with `p = (c−d)/2`, `q = −i(c+d)/2`.
    fn x_to_element(&self, v: &XVec) -> Element {
        let mut e = Element::zero();
        let half = GaussQ::real(qf(1, 2));
        let mut lines: BTreeMap<RootId, (GaussQ, GaussQ)> = BTreeMap::new();
        for (&k, &c) in v {
            match k {
                XKey::H(i) => e.add_term(BasisVector::Cartan(i), c),
                XKey::Root(r) => {
                    let slot = lines.entry(r.id).or_default();
                    if r.negative {
                        slot.1 += c;
                    } else {
                        slot.0 += c;
                    }
                }
            }
        }
        for (r, (c, d)) in lines {
            e.add_term(BasisVector::A(r), (c - d) * half);
            e.add_term(BasisVector::S(r), -GaussQ::i() * (c + d) * half);
        }
        e
    }

    fn x_bracket(&self, a: &XVec, b: &XVec) -> XVec {
        let rs = self.rs;
        let mut out = XVec::new();
        for (&ka, &ca) in a {
            for (&kb, &cb) in b {
                let c = ca * cb;
                match (ka, kb) {
                    (XKey::Root(r), XKey::Root(s)) => {
                        if s == r.opposite() {
                            let sign = if r.negative { -1 } else { 1 };
                            for (i, h) in self.coroots[r.id].iter().enumerate() {
                                x_add(&mut out, XKey::H(i), c.scale(*h * q(sign)));
                            }
                        } else if let Some(t) = rs.sum(r, s) {
                            x_add(&mut out, XKey::Root(t), c.scale(q(rs.chevalley(r, s))));
                        }
                    }
                    (XKey::H(i), XKey::Root(s)) => {
                        x_add(&mut out, XKey::Root(s), c.scale(q(self.root_on_coroot(s, i))));
                    }
                    (XKey::Root(r), XKey::H(i)) => {
                        x_add(&mut out, XKey::Root(r), c.scale(q(-self.root_on_coroot(r, i))));
                    }
                    (XKey::H(_), XKey::H(_)) => {}
                }
            }
        }
        out
    }

    /// `⟨r, α_i^∨⟩` for a signed root.
    fn root_on_coroot(&self, r: SignedRoot, i: usize) -> i64 {
        let cartan = &self.rs.cartan()[i];
        let v: i64 = self.rs.root(r.id).coeffs.iter().zip(cartan).map(|(&n, &c)| i64::from(n) * c).sum();
        if r.negative {
            -v
        } else {
            v
        }
    }

    /// Lie bracket of two tangent elements.
    pub fn bracket(&self, a: &Element, b: &Element) -> Result<Element, OracleError> {
        let xa = self.to_x(a)?;
        let xb = self.to_x(b)?;
        Ok(self.x_to_element(&self.x_bracket(&xa, &xb)))
    }

    /// `⟨H, e⟩` for the invariant form normalized by `⟨X_α, X_{−α}⟩ = 2/(α,α)`;
    /// only the Cartan part contributes.
    pub fn pair_with_h(&self, h: &RegularElement, e: &Element) -> GaussQ {
        let mut acc = GaussQ::zero();
        for (&b, &c) in e.terms() {
            if let BasisVector::Cartan(i) = b {
                let w = q(2) * h.values[i] / self.rs.norm(self.rs.simple_id(i));
                acc += c.scale(w);
            }
        }
        acc
    }
}

/// Convenience wrapper building the bracket tables on the fly.
pub fn bracket(rs: &RootSystem, a: &Element, b: &Element) -> Result<Element, OracleError> {
    Algebra::new(rs).bracket(a, b)
}

/// `H` with `α_j(H) = a_j` for `j ∈ Σ\Θ` and `α_j(H) = 0` for `j ∈ Θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularElement {
    /// `α_i(H)` for every simple root.
    values: Vec<Q>,
}

impl RegularElement {
    /// `coeffs` lists `a_j` for the roots of Σ\Θ in increasing order.
    pub fn new(fs: &FlagSpec, coeffs: &[Q]) -> Result<Self, OracleError> {
        let comp = fs.complement();
        if comp.len() != coeffs.len() {
            return Err(OracleError::CoefficientCount { expected: comp.len(), got: coeffs.len() });
        }
        let mut values = vec![Q::zero(); fs.rs.rank()];
        for (&j, &a) in comp.iter().zip(coeffs) {
            values[j] = a;
        }
        let h = RegularElement { values };
        for id in 0..fs.rs.num_positive() {
            if !fs.in_span(id) && h.root_value(fs.rs, id).is_zero() {
                return Err(OracleError::NotRegular(fs.rs.root(id).to_string()));
            }
        }
        Ok(h)
    }

    /// `a_j` = the j-th odd prime.
    pub fn default_for(fs: &FlagSpec) -> Self {
        const ODD_PRIMES: [i64; 8] = [3, 5, 7, 11, 13, 17, 19, 23];
        let coeffs: Vec<Q> = ODD_PRIMES.iter().take(fs.complement().len()).map(|&p| q(p)).collect();
        Self::new(fs, &coeffs).expect("positive coefficients are regular")
    }

    /// `a_j = 10^j`.
    pub fn powers_of_ten(fs: &FlagSpec) -> Self {
        let coeffs: Vec<Q> = (0..fs.complement().len()).map(|j| q(10i64.pow(j as u32))).collect();
        Self::new(fs, &coeffs).expect("positive coefficients are regular")
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn root_value(&self, rs: &RootSystem, id: RootId) -> Q {
        rs.root(id).coeffs.iter().zip(&self.values).map(|(&n, v)| q(i64::from(n)) * v).sum()
    }

    /// `k_α = 1/α(H)`.
    pub fn k(&self, rs: &RootSystem, id: RootId) -> Result<Q, OracleError> {
        let v = self.root_value(rs, id);
        if v.is_zero() {
            return Err(OracleError::RootInTheta(rs.root(id).to_string()));
        }
        Ok(v.recip())
    }
}

/// Evaluates the Nijenhuis operator on three single-root elements.
pub fn nijenhuis_eval(
    alg: &Algebra,
    h: &RegularElement,
    a: &Element,
    b: &Element,
    c: &Element,
) -> Result<GaussQ, OracleError> {
    let rs = alg.rs();
    let (Some(ra), Some(rb), Some(rc)) = (a.root_line()?, b.root_line()?, c.root_line()?) else {
        return Ok(GaussQ::zero());
    };
    let (ka, kb, kc) = (h.k(rs, ra)?, h.k(rs, rb)?, h.k(rs, rc)?);
    let (a1, a2) = a.split();
    let (b1, b2) = b.split();
    let (c1, c2) = c.split();
    let term = |k: Q, d: &Element, x: &Element, y: &Element| -> Result<GaussQ, OracleError> {
        let inner = alg.bracket(x, y)?;
        let outer = alg.bracket(d, &inner)?;
        Ok(alg.pair_with_h(h, &outer).scale(k))
    };
    let total = term(kc, &c2, &a1, &b1)? + term(ka, &a2, &b1, &c1)? + term(kb, &b2, &c1, &a1)?;
    Ok(total.scale(qf(1, 2)))
}

/// The element with fiber coordinates `c` in the basis `{A, S, −S*, A*}`.
pub fn fiber_element(root: RootId, c: &[GaussQ]) -> Element {
    let mut e = Element::zero();
    e.add_term(BasisVector::A(root), c[0]);
    e.add_term(BasisVector::S(root), c[1]);
    e.add_term(BasisVector::SStar(root), -c[2]);
    e.add_term(BasisVector::AStar(root), c[3]);
    e
}

/// Two independent `i`-eigenvectors of the fiber matrix, in fiber
/// coordinates.
pub fn fiber_eigenvectors(f: &FiberStructure) -> [Vec<GaussQ>; 2] {
    let m = fiber_matrix(f).to_gauss();
    let shifted = &m - &Matrix::<GaussQ>::identity(4).scale(&GaussQ::i());
    let ns = shifted.nullspace();
    assert_eq!(ns.len(), 2, "a generalized complex fiber has a 2-dimensional i-eigenspace");
    [ns[0].clone(), ns[1].clone()]
}

/// Per root of m, a basis of the `i`-eigenspace of its fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenbasisL {
    pub vectors: BTreeMap<RootId, [Element; 2]>,
}

pub fn eigenbasis(flag: &Flag, asg: &Assignment) -> Result<EigenbasisL, OracleError> {
    asg.validate(flag.num_components())?;
    let mut vectors = BTreeMap::new();
    for (k, comp) in flag.decomposition.components.iter().enumerate() {
        let [u, v] = fiber_eigenvectors(asg.get(k).expect("validated"));
        for &r in &comp.roots {
            vectors.insert(r, [fiber_element(r, &u), fiber_element(r, &v)]);
        }
    }
    Ok(EigenbasisL { vectors })
}

/// `N(e_u, e_v, e_w)` for the fiber basis vectors on three roots, flattened
/// as `u*16 + v*4 + w`.
pub fn triple_tensor(
    alg: &Algebra,
    h: &RegularElement,
    roots: (RootId, RootId, RootId),
) -> Result<Vec<GaussQ>, OracleError> {
    let unit = |k: usize| {
        let mut c = vec![GaussQ::zero(); 4];
        c[k] = GaussQ::one();
        c
    };
    let mut out = Vec::with_capacity(64);
    for u in 0..4 {
        let a = fiber_element(roots.0, &unit(u));
        for v in 0..4 {
            let b = fiber_element(roots.1, &unit(v));
            for w in 0..4 {
                let c = fiber_element(roots.2, &unit(w));
                out.push(nijenhuis_eval(alg, h, &a, &b, &c)?);
            }
        }
    }
    Ok(out)
}

fn contract(t: &[GaussQ], a: &[GaussQ], b: &[GaussQ], c: &[GaussQ]) -> GaussQ {
    let mut acc = GaussQ::zero();
    for u in 0..4 {
        if a[u].is_zero() {
            continue;
        }
        let mut inner = GaussQ::zero();
        for v in 0..4 {
            if b[v].is_zero() {
                continue;
            }
            let mut s = GaussQ::zero();
            for w in 0..4 {
                let x = t[u * 16 + v * 4 + w];
                if !x.is_zero() && !c[w].is_zero() {
                    s += x * c[w];
                }
            }
            inner += s * b[v];
        }
        acc += inner * a[u];
    }
    acc
}

#[derive(Debug, Clone)]
struct TripleBlock {
    comps: (usize, usize, usize),
    tensor: Vec<GaussQ>,
}

/// Nijenhuis oracle for one flag and one regular element.
///
/// The operator on `L` splits into blocks `L_α × L_β × L_{α+β}`, one for
/// each triple of the flag; on any other triple of root lines it vanishes
/// identically. The tensors of the blocks are computed once, and verdicts
/// per block and fiber triple are memoized across assignments.
pub struct NijenhuisOracle<'f, 'a> {
    flag: &'f Flag<'a>,
    blocks: Vec<TripleBlock>,
    eigen: HashMap<FiberStructure, [Vec<GaussQ>; 2]>,
    memo: HashMap<(usize, FiberStructure, FiberStructure, FiberStructure), bool>,
}

impl<'f, 'a> NijenhuisOracle<'f, 'a> {
    pub fn new(flag: &'f Flag<'a>, h: &RegularElement) -> Result<Self, OracleError> {
        let alg = Algebra::new(flag.rs());
        let blocks = flag
            .triples
            .iter()
            .map(|t| Ok(TripleBlock { comps: t.comps, tensor: triple_tensor(&alg, h, (t.alpha, t.beta, t.sum))? }))
            .collect::<Result<Vec<_>, OracleError>>()?;
        Ok(NijenhuisOracle { flag, blocks, eigen: HashMap::new(), memo: HashMap::new() })
    }

    fn eigenvectors(&mut self, f: &FiberStructure) -> [Vec<GaussQ>; 2] {
        self.eigen.entry(*f).or_insert_with(|| fiber_eigenvectors(f)).clone()
    }

    fn block_vanishes(&mut self, b: usize, fa: FiberStructure, fb: FiberStructure, fs: FiberStructure) -> bool {
        if let Some(&v) = self.memo.get(&(b, fa, fb, fs)) {
            return v;
        }
        let (la, lb, ls) = (self.eigenvectors(&fa), self.eigenvectors(&fb), self.eigenvectors(&fs));
        let t = &self.blocks[b].tensor;
        let v = la.iter().all(|x| lb.iter().all(|y| ls.iter().all(|z| contract(t, x, y, z).is_zero())));
        self.memo.insert((b, fa, fb, fs), v);
        v
    }

    /// Whether the Nijenhuis operator vanishes on the eigenbundle of `asg`.
    pub fn integrable(&mut self, asg: &Assignment) -> Result<bool, OracleError> {
        asg.validate(self.flag.num_components())?;
        for b in 0..self.blocks.len() {
            let (i, j, k) = self.blocks[b].comps;
            let f = |c: usize| *asg.get(c).expect("validated");
            if !self.block_vanishes(b, f(i), f(j), f(k)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One-shot oracle verdict.
pub fn oracle_integrable(flag: &Flag, asg: &Assignment, h: &RegularElement) -> Result<bool, OracleError> {
    NijenhuisOracle::new(flag, h)?.integrable(asg)
}

/// Outcome of comparing the oracle with the table classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub assignments: usize,
    pub integrable: usize,
    /// Assignments on which the two verdicts differ.
    pub disagreements: Vec<Assignment>,
}

/// Every assignment taking values in [`FiberStructure::sweep_values`]:
/// both complex structures and the five noncomplex sample points per
/// component.
pub fn sweep_assignments(components: usize) -> impl Iterator<Item = Assignment> {
    let values = FiberStructure::sweep_values();
    let n = values.len();
    let total = n.pow(components as u32);
    (0..total).map(move |mut code| {
        let mut fibers = Vec::with_capacity(components);
        for _ in 0..components {
            fibers.push(values[code % n]);
            code /= n;
        }
        Assignment::from_vec(fibers)
    })
}

/// Runs the oracle and the classifier on the full sweep.
pub fn sweep_agreement(flag: &Flag, h: &RegularElement) -> Result<SweepSummary, OracleError> {
    compare_on(flag, h, sweep_assignments(flag.num_components()))
}

/// At most `limit` assignments of the full sweep, spread over it by a
/// fixed stride; the whole sweep when it is no larger than `limit`.
pub fn sampled_assignments(components: usize, limit: usize) -> Vec<Assignment> {
    let values = FiberStructure::sweep_values();
    let n = values.len() as u128;
    let total = n.checked_pow(components as u32).unwrap_or(u128::MAX);
    let decode = |mut code: u128| {
        let fibers = (0..components)
            .map(|_| {
                let f = values[(code % n) as usize];
                code /= n;
                f
            })
            .collect();
        Assignment::from_vec(fibers)
    };
    if total <= limit as u128 {
        return (0..total).map(decode).collect();
    }
    // 1_000_003 is prime and the total is a power of 7, so the stride
    // visits distinct codes.
    const STRIDE: u128 = 1_000_003;
    (0..limit as u128).map(|k| decode(k.wrapping_mul(STRIDE) % total)).collect()
}

/// Compares the oracle with the classifier on the given assignments.
pub fn compare_on(
    flag: &Flag,
    h: &RegularElement,
    assignments: impl IntoIterator<Item = Assignment>,
) -> Result<SweepSummary, OracleError> {
    let mut oracle = NijenhuisOracle::new(flag, h)?;
    let mut summary = SweepSummary { assignments: 0, integrable: 0, disagreements: Vec::new() };
    for asg in assignments {
        let by_oracle = oracle.integrable(&asg)?;
        let by_table = assignment_verdict(flag, &asg)?;
        summary.assignments += 1;
        summary.integrable += usize::from(by_table);
        if by_oracle != by_table {
            summary.disagreements.push(asg);
        }
    }
    Ok(summary)
}
