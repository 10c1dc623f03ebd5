//! Isotropy decomposition of a partial flag manifold.
//!
//! A flag is given by a subset Θ of the simple roots. The positive roots
//! outside the span of Θ are grouped by their coefficients on Σ\Θ; each
//! group is one irreducible isotropy summand `m(s1, …, sr)`.

use crate::rootsys::{RootId, RootSystem};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlagError {
    #[error("simple root index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
}

/// A root system together with the subset Θ ⊆ Σ (0-based indices).
#[derive(Debug, Clone, Copy)]
pub struct FlagSpec<'a> {
    pub rs: &'a RootSystem,
    theta: u32,
}

impl<'a> FlagSpec<'a> {
    pub fn new(rs: &'a RootSystem, theta: &[usize]) -> Result<Self, FlagError> {
        let mut mask = 0u32;
        for &i in theta {
            if i >= rs.rank() {
                return Err(FlagError::IndexOutOfRange { index: i + 1, rank: rs.rank() });
            }
            mask |= 1 << i;
        }
        Ok(FlagSpec { rs, theta: mask })
    }

    /// Builds the flag from the complement Σ\Θ.
    pub fn from_complement(rs: &'a RootSystem, complement: &[usize]) -> Result<Self, FlagError> {
        let mut theta: Vec<usize> = (0..rs.rank()).collect();
        for &i in complement {
            if i >= rs.rank() {
                return Err(FlagError::IndexOutOfRange { index: i + 1, rank: rs.rank() });
            }
            theta.retain(|&t| t != i);
        }
        Self::new(rs, &theta)
    }

    pub fn theta(&self) -> Vec<usize> {
        (0..self.rs.rank()).filter(|&i| self.in_theta_index(i)).collect()
    }

    /// Σ\Θ in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.rs.rank()).filter(|&i| !self.in_theta_index(i)).collect()
    }

    pub fn in_theta_index(&self, i: usize) -> bool {
        self.theta & (1 << i) != 0
    }

    /// Whether the root lies in ⟨Θ⟩, i.e. its support is inside Θ.
    pub fn in_span(&self, id: RootId) -> bool {
        self.rs.root(id).support().all(|i| self.in_theta_index(i))
    }

    pub fn is_point(&self) -> bool {
        self.complement().is_empty()
    }

    /// Coefficients of a root on Σ\Θ.
    pub fn restrict(&self, id: RootId) -> Vec<i32> {
        let c = &self.rs.root(id).coeffs;
        self.complement().into_iter().map(|i| c[i]).collect()
    }
}

/// ⟨Θ⟩⁺: positive roots supported on Θ.
pub fn theta_span(fs: &FlagSpec) -> Vec<RootId> {
    (0..fs.rs.num_positive()).filter(|&id| fs.in_span(id)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyComponent {
    /// Coefficients on Σ\Θ shared by every root of the component.
    pub tuple: Vec<i32>,
    /// Root ids in canonical order.
    pub roots: Vec<RootId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyDecomposition {
    /// Sorted lexicographically by tuple.
    pub components: Vec<IsotropyComponent>,
    /// Component index of each positive root, `None` on ⟨Θ⟩⁺.
    component_of: Vec<Option<usize>>,
}

impl IsotropyDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, id: RootId) -> Option<usize> {
        self.component_of[id]
    }

    /// All roots of m in canonical order.
    pub fn roots(&self) -> Vec<RootId> {
        (0..self.component_of.len()).filter(|&id| self.component_of[id].is_some()).collect()
    }

    pub fn find_tuple(&self, tuple: &[i32]) -> Option<usize> {
        self.components.iter().position(|c| c.tuple == tuple)
    }
}

/// Groups Π⁺\⟨Θ⟩⁺ by restricted coefficient tuple. For Θ = Σ the result is
/// empty (the flag is a point).
pub fn decompose_isotropy(fs: &FlagSpec) -> IsotropyDecomposition {
    let mut groups: BTreeMap<Vec<i32>, Vec<RootId>> = BTreeMap::new();
    for id in 0..fs.rs.num_positive() {
        if !fs.in_span(id) {
            groups.entry(fs.restrict(id)).or_default().push(id);
        }
    }
    let components: Vec<IsotropyComponent> =
        groups.into_iter().map(|(tuple, roots)| IsotropyComponent { tuple, roots }).collect();
    let mut component_of = vec![None; fs.rs.num_positive()];
    for (k, c) in components.iter().enumerate() {
        for &id in &c.roots {
            component_of[id] = Some(k);
        }
    }
    IsotropyDecomposition { components, component_of }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TripleKind {
    /// α and β lie in the same component.
    Intra,
    /// α and β lie in different components.
    Cross,
}

/// A triple `(α, β, α+β)` of roots of m, with `α` before `β` in the
/// canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub alpha: RootId,
    pub beta: RootId,
    pub sum: RootId,
    /// Components of α, β and α+β.
    pub comps: (usize, usize, usize),
    pub kind: TripleKind,
}

impl Triple {
    /// Component indices with the first two sorted; triples with the same
    /// class impose the same condition on an assignment.
    pub fn class(&self) -> (usize, usize, usize) {
        let (i, j, k) = self.comps;
        (i.min(j), i.max(j), k)
    }
}

/// Every unordered pair `{α, β}` of roots of m whose sum is a root of m.
pub fn enumerate_triples(fs: &FlagSpec, dec: &IsotropyDecomposition) -> Vec<Triple> {
    let roots = dec.roots();
    let mut out = Vec::new();
    for (x, &a) in roots.iter().enumerate() {
        for &b in &roots[x + 1..] {
            let Some(s) = fs.rs.positive_sum(a, b) else { continue };
            let (i, j) = (dec.component_of(a).unwrap(), dec.component_of(b).unwrap());
            // Tuples add, so a sum of two roots of m never falls into ⟨Θ⟩.
            let k = dec.component_of(s).expect("sum of roots of m lies in ⟨Θ⟩");
            out.push(Triple {
                alpha: a,
                beta: b,
                sum: s,
                comps: (i, j, k),
                kind: if i == j { TripleKind::Intra } else { TripleKind::Cross },
            });
        }
    }
    out
}

/// Checks that Θ = Σ\{α_i} yields as many components as the height of α_i.
pub fn verify_summands_match_height(rs: &RootSystem, i: usize) -> bool {
    let Ok(h) = rs.height(i) else { return false };
    let Ok(fs) = FlagSpec::from_complement(rs, &[i]) else { return false };
    decompose_isotropy(&fs).len() == h as usize
}

/// A flag with its decomposition and triples computed once.
#[derive(Debug, Clone)]
pub struct Flag<'a> {
    pub spec: FlagSpec<'a>,
    pub decomposition: IsotropyDecomposition,
    pub triples: Vec<Triple>,
}

impl<'a> Flag<'a> {
    pub fn new(spec: FlagSpec<'a>) -> Self {
        let decomposition = decompose_isotropy(&spec);
        let triples = enumerate_triples(&spec, &decomposition);
        Flag { spec, decomposition, triples }
    }

    pub fn rs(&self) -> &'a RootSystem {
        self.spec.rs
    }

    pub fn num_components(&self) -> usize {
        self.decomposition.len()
    }

    /// Distinct triple classes in sorted order.
    pub fn triple_classes(&self) -> Vec<(usize, usize, usize)> {
        let mut classes: Vec<_> = self.triples.iter().map(Triple::class).collect();
        classes.sort_unstable();
        classes.dedup();
        classes
    }
}
