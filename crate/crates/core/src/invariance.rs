//! Invariance under the isotropy action forces a fiber structure to be
//! constant on each isotropy summand.
//!
//! For `γ ∈ ⟨Θ⟩⁺` and roots `α, β = α + γ` of m, the operator
//! `(ad ⊕ ad*)(A_γ)` maps the fiber over α to the fiber over β by a 4×4
//! block `M`. An invariant structure must satisfy `J_β M = M J_α`.

use crate::flagdecomp::{theta_span, Flag};
use crate::gcstruct::{fiber_matrix, j0, FiberStructure, NcParams};
use crate::nijenhuis::{Algebra, BasisVector, Element, OracleError, RegularElement};
use crate::numeric::{q, GaussQ, Matrix, Q};
use crate::rootsys::RootId;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvarianceError {
    #[error("γ = {0} is not in the span of Θ")]
    GammaNotInTheta(String),
    #[error("α = {0} is not a root of m")]
    AlphaNotInM(String),
    #[error("{alpha} + {gamma} is not a root")]
    NotARoot { alpha: String, gamma: String },
    #[error("commutation block has a non-real entry")]
    NonRealBlock,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// The action of `A_γ` from the fiber over α to the fiber over `α + γ`,
/// in the bases `{A, S, −S*, A*}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationBlock {
    pub gamma: RootId,
    pub alpha: RootId,
    pub beta: RootId,
    pub m: Matrix<Q>,
}

/// Computes the block of `(ad ⊕ ad*)(A_γ)`; the coadjoint part uses
/// `(ad*(X)ξ)(Y) = −ξ([X, Y])` with covectors given by their KKS labels.
pub fn adjoint_block(
    alg: &Algebra,
    flag: &Flag,
    h: &RegularElement,
    gamma: RootId,
    alpha: RootId,
) -> Result<CommutationBlock, InvarianceError> {
    let rs = alg.rs();
    if !flag.spec.in_span(gamma) {
        return Err(InvarianceError::GammaNotInTheta(rs.root(gamma).to_string()));
    }
    if flag.spec.in_span(alpha) {
        return Err(InvarianceError::AlphaNotInM(rs.root(alpha).to_string()));
    }
    let beta = rs.positive_sum(gamma, alpha).ok_or_else(|| InvarianceError::NotARoot {
        alpha: rs.root(alpha).to_string(),
        gamma: rs.root(gamma).to_string(),
    })?;
    let ka = GaussQ::real(h.k(rs, alpha)?);
    let kb = GaussQ::real(h.k(rs, beta)?);
    let ag = Element::basis(BasisVector::A(gamma));
    let tangent_b = [Element::basis(BasisVector::A(beta)), Element::basis(BasisVector::S(beta))];

    let mut m = Matrix::<GaussQ>::zeros(4, 4);
    // Tangent columns: images of A_α and S_α, read off on A_β and S_β.
    for (col, b) in [BasisVector::A(alpha), BasisVector::S(alpha)].into_iter().enumerate() {
        let img = alg.bracket(&ag, &Element::basis(b))?;
        m[(0, col)] = img.coeff(BasisVector::A(beta));
        m[(1, col)] = img.coeff(BasisVector::S(beta));
    }

    // Covector with label D evaluated on Y: k⟨H, [D, Y]⟩.
    let covector = |k: GaussQ, d: &Element, y: &Element| -> Result<GaussQ, OracleError> {
        Ok(alg.pair_with_h(h, &alg.bracket(d, y)?) * k)
    };
    // Cotangent basis over β: −S_β* and A_β*.
    let targets = [Element::term(BasisVector::S(beta), -GaussQ::one()), Element::basis(BasisVector::A(beta))];
    let mut gram = Matrix::<GaussQ>::zeros(2, 2);
    for (r, y) in tangent_b.iter().enumerate() {
        for (c, d) in targets.iter().enumerate() {
            gram[(r, c)] = covector(kb, d, y)?;
        }
    }
    let gram_inv = gram.inverse().ok_or(InvarianceError::NonRealBlock)?;
    let sources = [Element::term(BasisVector::S(alpha), -GaussQ::one()), Element::basis(BasisVector::A(alpha))];
    for (col, d) in sources.iter().enumerate() {
        let mut rhs = Vec::with_capacity(2);
        for y in &tangent_b {
            let moved = alg.bracket(&ag, y)?;
            rhs.push(-covector(ka, d, &moved)?);
        }
        let coords = gram_inv.apply(&rhs);
        m[(2, col + 2)] = coords[0];
        m[(3, col + 2)] = coords[1];
    }

    let mut real = Matrix::<Q>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let v = m[(i, j)];
            if !v.is_real() {
                return Err(InvarianceError::NonRealBlock);
            }
            real[(i, j)] = v.re;
        }
    }
    Ok(CommutationBlock { gamma, alpha, beta, m: real })
}

/// Fiber structures `J_β` with `J_β M = M J_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationSolutions {
    pub structures: Vec<FiberStructure>,
    /// The noncomplex solutions form a positive-dimensional family, so
    /// `structures` lists only the complex ones.
    pub underdetermined: bool,
}

impl CommutationSolutions {
    pub fn is_exactly(&self, f: &FiberStructure) -> bool {
        !self.underdetermined && self.structures.as_slice() == [*f]
    }
}

/// Recognizes a 4×4 matrix as a fiber structure.
pub fn classify_fiber(m: &Matrix<Q>) -> Option<FiberStructure> {
    if *m == j0() {
        return Some(FiberStructure::PLUS);
    }
    if *m == -&j0() {
        return Some(FiberStructure::MINUS);
    }
    let f = FiberStructure::Noncomplex(NcParams::new(m[(0, 0)], -m[(0, 3)], m[(3, 0)]).ok()?);
    (fiber_matrix(&f) == *m).then_some(f)
}

pub fn solve_commutation(block: &CommutationBlock, j_alpha: &FiberStructure) -> CommutationSolutions {
    let m = &block.m;
    let rhs = m * &fiber_matrix(j_alpha);
    if let Some(inv) = m.inverse() {
        let jb = &rhs * &inv;
        return CommutationSolutions { structures: classify_fiber(&jb).into_iter().collect(), underdetermined: false };
    }
    let mut structures: Vec<FiberStructure> =
        [FiberStructure::PLUS, FiberStructure::MINUS].into_iter().filter(|f| &fiber_matrix(f) * m == rhs).collect();
    // Noncomplex J_β is linear in (a, x, y): a·E_a + x·E_x + y·E_y.
    let unit = |entries: &[(usize, usize, i64)]| {
        let mut e = Matrix::<Q>::zeros(4, 4);
        for &(i, j, v) in entries {
            e[(i, j)] = q(v);
        }
        e
    };
    let gens = [
        unit(&[(0, 0, 1), (1, 1, 1), (2, 2, -1), (3, 3, -1)]),
        unit(&[(0, 3, -1), (1, 2, 1)]),
        unit(&[(2, 1, -1), (3, 0, 1)]),
    ];
    let products: Vec<Matrix<Q>> = gens.iter().map(|g| g * m).collect();
    let mut system = Matrix::<Q>::zeros(16, 3);
    let mut b = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            for (k, p) in products.iter().enumerate() {
                system[(i * 4 + j, k)] = p[(i, j)];
            }
            b.push(rhs[(i, j)]);
        }
    }
    let mut underdetermined = false;
    if let Some((x, kernel)) = system.solve_affine(&b) {
        if kernel.is_empty() {
            if let Ok(p) = NcParams::new(x[0], x[1], x[2]) {
                structures.push(FiberStructure::Noncomplex(p));
            }
        } else {
            underdetermined = true;
        }
    }
    CommutationSolutions { structures, underdetermined }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentConstancy {
    pub tuple: Vec<i32>,
    pub roots: usize,
    /// Pairs `(α, α+γ)` with `γ ∈ ⟨Θ⟩⁺` inside the component.
    pub edges: usize,
    /// The graph of those edges is connected.
    pub connected: bool,
    /// Any two roots of the component differ by a single root of ±⟨Θ⟩⁺.
    pub single_step: bool,
    /// Edges or sample structures where the solve was not `{J_α}`.
    pub failures: Vec<String>,
}

impl ComponentConstancy {
    pub fn ok(&self) -> bool {
        self.connected && self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstancyReport {
    pub components: Vec<ComponentConstancy>,
}

impl ConstancyReport {
    pub fn ok(&self) -> bool {
        self.components.iter().all(ComponentConstancy::ok)
    }
}

/// Checks, component by component, that invariance pins `J_β = J_α` along
/// every `⟨Θ⟩`-edge and that the edges connect the component.
pub fn verify_constancy(flag: &Flag) -> Result<ConstancyReport, InvarianceError> {
    let rs = flag.rs();
    let alg = Algebra::new(rs);
    let h = RegularElement::default_for(&flag.spec);
    let span = theta_span(&flag.spec);
    let samples = FiberStructure::sweep_values();
    let mut components = Vec::new();
    for comp in &flag.decomposition.components {
        let n = comp.roots.len();
        let local = |r: RootId| comp.roots.iter().position(|&x| x == r);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut edges = 0;
        let mut failures = Vec::new();
        for (ia, &alpha) in comp.roots.iter().enumerate() {
            for &gamma in &span {
                let Some(beta) = rs.positive_sum(gamma, alpha) else { continue };
                let ib = local(beta).expect("⟨Θ⟩-translates stay in the component");
                edges += 1;
                let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
                parent[ra] = rb;
                let block = adjoint_block(&alg, flag, &h, gamma, alpha)?;
                for j in &samples {
                    let sol = solve_commutation(&block, j);
                    if !sol.is_exactly(j) {
                        failures.push(format!("γ={}, α={}, J_α={j}: got {:?}", rs.root(gamma), rs.root(alpha), sol));
                    }
                }
            }
        }
        let root0 = find(&mut parent, 0);
        let connected = (0..n).all(|i| find(&mut parent, i) == root0);
        let single_step = comp.roots.iter().all(|&a| {
            comp.roots.iter().all(|&b| {
                a == b || {
                    let d = rs.root(b).sub(rs.root(a));
                    rs.find(&d.coeffs).is_some_and(|s| flag.spec.in_span(s.id))
                }
            })
        });
        components.push(ComponentConstancy {
            tuple: comp.tuple.clone(),
            roots: n,
            edges,
            connected,
            single_step,
            failures,
        });
    }
    Ok(ConstancyReport { components })
}

/// Whether every entry outside the two diagonal 2×2 blocks vanishes.
pub fn is_block_diagonal(m: &Matrix<Q>) -> bool {
    (0..4).all(|i| (0..4).all(|j| (i < 2) == (j < 2) || m[(i, j)].is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagdecomp::FlagSpec;
    use crate::rootsys::{Family, LieType, RootSystem, SignedRoot};

    #[test]
    fn b3_alpha3_block() {
        let rs = RootSystem::new(LieType::new(Family::B, 3).unwrap());
        let flag = Flag::new(FlagSpec::new(&rs, &[2]).unwrap());
        let alg = Algebra::new(&rs);
        let h = RegularElement::default_for(&flag.spec);
        let block = adjoint_block(&alg, &flag, &h, 2, 1).unwrap();
        assert_eq!(rs.root(block.beta).to_string(), "α2+α3");
        let n = rs.chevalley(SignedRoot::pos(2), SignedRoot::pos(1));
        assert_eq!(n.abs(), 1);
        assert_eq!(block.m, Matrix::<Q>::identity(4).scale(&q(n)));
        for j in FiberStructure::sweep_values() {
            assert!(solve_commutation(&block, &j).is_exactly(&j));
        }
        assert!(adjoint_block(&alg, &flag, &h, 1, 0).is_err());
        let report = verify_constancy(&flag).unwrap();
        assert!(report.ok());
        assert_eq!(report.components.len(), 4);
    }

    #[test]
    fn singular_block_leaves_a_family() {
        let block = CommutationBlock { gamma: 0, alpha: 0, beta: 0, m: Matrix::zeros(4, 4) };
        let sol = solve_commutation(&block, &FiberStructure::PLUS);
        assert!(sol.underdetermined);
        assert_eq!(sol.structures, vec![FiberStructure::PLUS, FiberStructure::MINUS]);
    }
}
