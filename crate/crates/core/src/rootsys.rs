//! Root systems of the simple Lie algebras.
//!
//! Labeling of the Dynkin diagrams:
//!
//! * `A_l`, `B_l`, `C_l`: the chain α1 – … – αl. In `B_l` the last root is
//!   short, in `C_l` it is long.
//! * `D_l`: the chain α1 – … – α(l−1) with αl attached to α(l−2).
//! * `E6`: the chain α1 – … – α5 with α6 attached to α3.
//! * `E7`: the chain α1 – … – α6 with α7 attached to α4.
//! * `E8`: the chain α1 – … – α7 with α8 attached to α5.
//! * `F4`: α1, α2 long and α3, α4 short.
//! * `G2`: α1 long, α2 short.
//!
//! Short roots have squared length 2. Positive roots are kept in the
//! *canonical order*: by height, and within a height by decreasing
//! lexicographic order of the coefficient vector (so α1 comes before α2).
//!
//! Indices in the API are 0-based; user-facing output uses 1-based labels.

use crate::numeric::{q, Matrix, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSysError {
    #[error("invalid rank {rank} for type {family}: {bound}")]
    InvalidRank { family: Family, rank: usize, bound: &'static str },
    #[error("unknown Lie family {0:?} (expected one of A, B, C, D, E, F, G)")]
    UnknownFamily(String),
    #[error("cannot parse Lie type {0:?} (expected a name such as B3)")]
    InvalidName(String),
    #[error("simple root index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Family {
    type Err = RootSysError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "E" => Family::E,
            "F" => Family::F,
            "G" => Family::G,
            _ => return Err(RootSysError::UnknownFamily(s.to_string())),
        })
    }
}

/// A simple Lie type such as `B3` or `E7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LieType {
    family: Family,
    rank: usize,
}

impl LieType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSysError> {
        let bound = match family {
            Family::A if rank < 1 => Some("A_l requires l >= 1"),
            Family::B if rank < 2 => Some("B_l requires l >= 2"),
            Family::C if rank < 3 => Some("C_l requires l >= 3"),
            Family::D if rank < 4 => Some("D_l requires l >= 4"),
            Family::E if !(6..=8).contains(&rank) => Some("E_l requires l in {6, 7, 8}"),
            Family::F if rank != 4 => Some("F_l requires l = 4"),
            Family::G if rank != 2 => Some("G_l requires l = 2"),
            _ => None,
        };
        match bound {
            Some(bound) => Err(RootSysError::InvalidRank { family, rank, bound }),
            None => Ok(LieType { family, rank }),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of positive roots, from the closed formulas.
    pub fn expected_positive_roots(&self) -> usize {
        let l = self.rank;
        match (self.family, l) {
            (Family::A, _) => l * (l + 1) / 2,
            (Family::B | Family::C, _) => l * l,
            (Family::D, _) => l * (l - 1),
            (Family::E, 6) => 36,
            (Family::E, 7) => 63,
            (Family::E, _) => 120,
            (Family::F, _) => 24,
            (Family::G, _) => 6,
        }
    }

    pub fn coxeter_number(&self) -> usize {
        let l = self.rank;
        match (self.family, l) {
            (Family::A, _) => l + 1,
            (Family::B | Family::C, _) => 2 * l,
            (Family::D, _) => 2 * l - 2,
            (Family::E, 6) => 12,
            (Family::E, 7) => 18,
            (Family::E, _) => 30,
            (Family::F, _) => 12,
            (Family::G, _) => 6,
        }
    }

    /// Every valid type with rank at most `max_rank`.
    pub fn all_up_to(max_rank: usize) -> Vec<LieType> {
        let mut out = Vec::new();
        for rank in 1..=max_rank {
            for family in [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G] {
                if let Ok(t) = LieType::new(family, rank) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Squared lengths of the simple roots and the edges of the diagram,
    /// both 0-based.
    fn diagram(&self) -> (Vec<i64>, Vec<(usize, usize)>) {
        let l = self.rank;
        let chain = |n: usize| (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
        match self.family {
            Family::A => (vec![2; l], chain(l)),
            Family::B => {
                let mut len = vec![4; l];
                len[l - 1] = 2;
                (len, chain(l))
            }
            Family::C => {
                let mut len = vec![2; l];
                len[l - 1] = 4;
                (len, chain(l))
            }
            Family::D => {
                let mut edges = chain(l - 1);
                edges.push((l - 3, l - 1));
                (vec![2; l], edges)
            }
            Family::E => {
                let mut edges = chain(l - 1);
                let branch = match l {
                    6 => 2,
                    7 => 3,
                    _ => 4,
                };
                edges.push((branch, l - 1));
                (vec![2; l], edges)
            }
            Family::F => (vec![4, 4, 2, 2], chain(4)),
            Family::G => (vec![6, 2], chain(2)),
        }
    }
}

impl FromStr for LieType {
    type Err = RootSysError;
    /// Parses names such as `B3` or `e7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s.char_indices().nth(1).map_or(s.len(), |(i, _)| i);
        let family: Family = s[..split].parse()?;
        let rank = s[split..].parse().map_err(|_| RootSysError::InvalidName(s.to_string()))?;
        LieType::new(family, rank)
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// A root written in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root {
    pub coeffs: Vec<i32>,
}

impl Root {
    pub fn new(coeffs: Vec<i32>) -> Self {
        Root { coeffs }
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut coeffs = vec![0; rank];
        coeffs[i] = 1;
        Root { coeffs }
    }

    pub fn height(&self) -> i32 {
        self.coeffs.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0) && self.coeffs.iter().any(|&c| c > 0)
    }

    pub fn neg(&self) -> Root {
        Root { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Root) -> Root {
        Root { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    /// Indices of the simple roots with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i)
    }
}

/// Renders `α1+2α2`, `-α3`, and so on.
impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "α{}", i + 1)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Index into [`RootSystem::positive_roots`].
pub type RootId = usize;

/// A positive root or the negative of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedRoot {
    pub id: RootId,
    pub negative: bool,
}

impl SignedRoot {
    pub fn pos(id: RootId) -> Self {
        SignedRoot { id, negative: false }
    }

    pub fn neg(id: RootId) -> Self {
        SignedRoot { id, negative: true }
    }

    pub fn opposite(self) -> Self {
        SignedRoot { id: self.id, negative: !self.negative }
    }
}

/// How the free signs of the extraspecial structure constants are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// Every extraspecial constant is positive.
    #[default]
    Positive,
    /// Every extraspecial constant is negative.
    Negative,
    /// Extraspecial constants alternate in sign along the canonical order.
    Alternating,
}

/// Immutable root data for one simple type.
#[derive(Debug, Clone)]
pub struct RootSystem {
    lie_type: LieType,
    convention: SignConvention,
    gram: Matrix<Q>,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Root>,
    index: HashMap<Vec<i32>, RootId>,
    highest: RootId,
    /// `sum[a * 2n + b]` over signed indices (`id + n` for negatives).
    sum: Vec<Option<usize>>,
    /// Chevalley constants on the same index scheme; zero where undefined.
    chevalley: Vec<i64>,
}

/// Convenience wrapper for [`RootSystem::new`].
pub fn build_root_system(lie_type: LieType) -> RootSystem {
    RootSystem::new(lie_type)
}

impl RootSystem {
    pub fn new(lie_type: LieType) -> Self {
        Self::with_convention(lie_type, SignConvention::Positive)
    }

    pub fn with_convention(lie_type: LieType, convention: SignConvention) -> Self {
        let l = lie_type.rank;
        let (lengths, edges) = lie_type.diagram();
        let mut gram = Matrix::<Q>::zeros(l, l);
        for (i, &len) in lengths.iter().enumerate() {
            gram[(i, i)] = q(len);
        }
        for &(i, j) in &edges {
            let v = q(-lengths[i].max(lengths[j]) / 2);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        let cartan: Vec<Vec<i64>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        let v = q(2) * gram[(i, j)] / gram[(i, i)];
                        debug_assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();

        let positive = generate_positive_roots(l, &cartan);
        let index: HashMap<Vec<i32>, RootId> =
            positive.iter().enumerate().map(|(i, r)| (r.coeffs.clone(), i)).collect();
        let highest = positive.len() - 1;

        let mut rs = RootSystem {
            lie_type,
            convention,
            gram,
            cartan,
            positive,
            index,
            highest,
            sum: Vec::new(),
            chevalley: Vec::new(),
        };
        rs.build_sum_table();
        rs.build_chevalley();
        rs
    }

    pub fn lie_type(&self) -> LieType {
        self.lie_type
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn rank(&self) -> usize {
        self.lie_type.rank
    }

    pub fn gram(&self) -> &Matrix<Q> {
        &self.gram
    }

    /// `cartan[i][j] = ⟨α_j, α_i^∨⟩ = 2(α_i, α_j)/(α_i, α_i)`.
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn root(&self, id: RootId) -> &Root {
        &self.positive[id]
    }

    pub fn signed_root(&self, r: SignedRoot) -> Root {
        if r.negative {
            self.positive[r.id].neg()
        } else {
            self.positive[r.id].clone()
        }
    }

    pub fn highest_root(&self) -> &Root {
        &self.positive[self.highest]
    }

    /// Id of the simple root `α_{i+1}`; simple roots come first in the
    /// canonical order.
    pub fn simple_id(&self, i: usize) -> RootId {
        i
    }

    /// Coefficient of `α_{i+1}` in the highest root.
    pub fn height(&self, i: usize) -> Result<i32, RootSysError> {
        if i >= self.rank() {
            return Err(RootSysError::IndexOutOfRange { index: i + 1, rank: self.rank() });
        }
        Ok(self.highest_root().coeffs[i])
    }

    pub fn find(&self, coeffs: &[i32]) -> Option<SignedRoot> {
        if let Some(&id) = self.index.get(coeffs) {
            return Some(SignedRoot::pos(id));
        }
        let neg: Vec<i32> = coeffs.iter().map(|c| -c).collect();
        self.index.get(&neg).map(|&id| SignedRoot::neg(id))
    }

    pub fn find_positive(&self, coeffs: &[i32]) -> Option<RootId> {
        self.index.get(coeffs).copied()
    }

    pub fn is_root(&self, coeffs: &[i32]) -> bool {
        self.find(coeffs).is_some()
    }

    fn slot(&self, r: SignedRoot) -> usize {
        r.id + if r.negative { self.positive.len() } else { 0 }
    }

    fn unslot(&self, s: usize) -> SignedRoot {
        let n = self.positive.len();
        if s >= n {
            SignedRoot::neg(s - n)
        } else {
            SignedRoot::pos(s)
        }
    }

    /// `a + b` when it is a root.
    pub fn sum(&self, a: SignedRoot, b: SignedRoot) -> Option<SignedRoot> {
        let n2 = 2 * self.positive.len();
        self.sum[self.slot(a) * n2 + self.slot(b)].map(|s| self.unslot(s))
    }

    /// `a + b` for positive roots when it is a (necessarily positive) root.
    pub fn positive_sum(&self, a: RootId, b: RootId) -> Option<RootId> {
        self.sum(SignedRoot::pos(a), SignedRoot::pos(b)).map(|s| s.id)
    }

    /// Chevalley constant `N_{a,b}` with `[X_a, X_b] = N_{a,b} X_{a+b}`;
    /// zero when `a + b` is not a root.
    pub fn chevalley(&self, a: SignedRoot, b: SignedRoot) -> i64 {
        let n2 = 2 * self.positive.len();
        self.chevalley[self.slot(a) * n2 + self.slot(b)]
    }

    pub fn inner_product(&self, a: &[i32], b: &[i32]) -> Q {
        let mut acc = Q::zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    acc += self.gram[(i, j)] * q(i64::from(x) * i64::from(y));
                }
            }
        }
        acc
    }

    /// Squared length of a positive root.
    pub fn norm(&self, id: RootId) -> Q {
        let c = &self.positive[id].coeffs;
        self.inner_product(c, c)
    }

    /// `⟨β, α^∨⟩ = 2(β, α)/(α, α)`.
    pub fn pairing(&self, beta: &[i32], alpha: &[i32]) -> i64 {
        let v = q(2) * self.inner_product(beta, alpha) / self.inner_product(alpha, alpha);
        debug_assert!(v.is_integer());
        v.to_integer()
    }

    /// Largest `p ≥ 0` with `β − pα` a root.
    pub fn string_p(&self, alpha: &[i32], beta: &[i32]) -> i64 {
        let mut p = 0;
        let mut cur: Vec<i32> = beta.to_vec();
        loop {
            for (c, a) in cur.iter_mut().zip(alpha) {
                *c -= a;
            }
            if !self.is_root(&cur) {
                return p;
            }
            p += 1;
        }
    }

    fn build_sum_table(&mut self) {
        let n = self.positive.len();
        let n2 = 2 * n;
        let mut table = vec![None; n2 * n2];
        for a in 0..n2 {
            let ra = self.signed_root(self.unslot(a));
            for b in 0..n2 {
                let rb = self.signed_root(self.unslot(b));
                if let Some(s) = self.find(&ra.add(&rb).coeffs) {
                    table[a * n2 + b] = Some(self.slot(s));
                }
            }
        }
        self.sum = table;
    }

    /// Structure constants from the extraspecial pairs.
    ///
    /// For each non-simple positive root ξ the extraspecial pair `(α, β)` has
    /// the smallest possible α; its constant is `±(p+1)`. The other special
    /// pairs follow from the Jacobi identity, and mixed-sign pairs from the
    /// relations `N_{r,s}/(t,t) = N_{s,t}/(r,r)` for `r+s+t = 0` and
    /// `N_{-r,-s} = -N_{r,s}`.
    fn build_chevalley(&mut self) {
        let n = self.positive.len();
        let mut pos: Vec<Option<Q>> = vec![None; n * n];
        let mut extraspecial_count = 0usize;

        for xi in 0..n {
            let pairs: Vec<(RootId, RootId)> = (0..n)
                .filter_map(|a| {
                    let d = self.positive[xi].sub(&self.positive[a]);
                    self.find_positive(&d.coeffs).map(|b| (a, b))
                })
                .filter(|&(a, b)| a < b)
                .collect();
            let Some(&(alpha, beta)) = pairs.first() else {
                continue;
            };
            let sign = match self.convention {
                SignConvention::Positive => 1,
                SignConvention::Negative => -1,
                SignConvention::Alternating => {
                    if extraspecial_count.is_multiple_of(2) {
                        1
                    } else {
                        -1
                    }
                }
            };
            extraspecial_count += 1;
            let p = self.string_p(&self.positive[alpha].coeffs, &self.positive[beta].coeffs);
            let n_ab = q(sign * (p + 1));
            pos[alpha * n + beta] = Some(n_ab);
            pos[beta * n + alpha] = Some(-n_ab);

            let xi_norm = self.norm(xi);
            for &(r, s) in &pairs[1..] {
                let mut acc = Q::zero();
                let sa = self.positive[s].sub(&self.positive[alpha]);
                if self.is_root(&sa.coeffs) {
                    let t = self.mixed(&pos, SignedRoot::pos(s), SignedRoot::neg(alpha))
                        * self.mixed(&pos, SignedRoot::pos(r), SignedRoot::neg(beta));
                    acc += t / self.inner_product(&sa.coeffs, &sa.coeffs);
                }
                let ra = self.positive[r].sub(&self.positive[alpha]);
                if self.is_root(&ra.coeffs) {
                    let t = self.mixed(&pos, SignedRoot::neg(alpha), SignedRoot::pos(r))
                        * self.mixed(&pos, SignedRoot::pos(s), SignedRoot::neg(beta));
                    acc += t / self.inner_product(&ra.coeffs, &ra.coeffs);
                }
                let v = xi_norm / n_ab * acc;
                pos[r * n + s] = Some(v);
                pos[s * n + r] = Some(-v);
            }
        }

        let n2 = 2 * n;
        let mut table = vec![0i64; n2 * n2];
        for a in 0..n2 {
            for b in 0..n2 {
                if self.sum[a * n2 + b].is_none() {
                    continue;
                }
                let v = self.mixed(&pos, self.unslot(a), self.unslot(b));
                assert!(v.is_integer(), "non-integral structure constant {v}");
                table[a * n2 + b] = v.to_integer();
            }
        }
        self.chevalley = table;
    }

    /// `N_{r,s}` for arbitrary signs, given the positive-pair table.
    fn mixed(&self, pos: &[Option<Q>], r: SignedRoot, s: SignedRoot) -> Q {
        let n = self.positive.len();
        let Some(d) = self.sum(r, s) else {
            return Q::zero();
        };
        let sq = |x: SignedRoot| self.norm(x.id);
        match (r.negative, s.negative) {
            (false, false) => pos[r.id * n + s.id].expect("constant computed out of order"),
            (true, true) => -pos[r.id * n + s.id].expect("constant computed out of order"),
            (false, true) => {
                if d.negative {
                    sq(d) / sq(s) * self.mixed(pos, d.opposite(), r)
                } else {
                    -(sq(d) / sq(r)) * self.mixed(pos, s.opposite(), d)
                }
            }
            (true, false) => -self.mixed(pos, s, r),
        }
    }

    /// Canonical JSON document.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.lie_type.family.to_string(),
            "rank": self.rank(),
            "cartan": self.cartan,
            "positive_roots": self.positive,
            "highest_root": self.highest_root(),
        })
    }
}

/// Closure of the simple roots under root strings, in canonical order.
fn generate_positive_roots(l: usize, cartan: &[Vec<i64>]) -> Vec<Root> {
    let mut all: Vec<Root> = (0..l).map(|i| Root::simple(l, i)).collect();
    let mut known: HashMap<Vec<i32>, ()> = all.iter().map(|r| (r.coeffs.clone(), ())).collect();
    let mut layer = all.clone();
    while !layer.is_empty() {
        let mut next: Vec<Root> = Vec::new();
        for beta in &layer {
            for i in 0..l {
                let mut p = 0;
                let mut cur = beta.coeffs.clone();
                loop {
                    cur[i] -= 1;
                    if !known.contains_key(&cur) {
                        break;
                    }
                    p += 1;
                }
                let pairing: i64 = (0..l).map(|j| i64::from(beta.coeffs[j]) * cartan[i][j]).sum();
                if p - pairing > 0 {
                    let mut up = beta.coeffs.clone();
                    up[i] += 1;
                    if !known.contains_key(&up) {
                        known.insert(up.clone(), ());
                        next.push(Root::new(up));
                    }
                }
            }
        }
        next.sort_by(|a, b| b.coeffs.cmp(&a.coeffs));
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.lie_type == other.lie_type && self.convention == other.convention
    }
}
