//! Serializable reports behind the command-line verbs, with JSON and
//! markdown renderings. Indices in reports are 1-based.

use crate::catalog::{check_rows, CatalogError, CatalogRow, RootSet, RootSetError};
use crate::flagdecomp::{theta_span, Flag, FlagSpec, TripleKind};
use crate::gcstruct::{compress_rows, enumerate_integrable_patterns, Assignment, GcError, RowEntry, TypePattern};
use crate::invariance::{verify_constancy, InvarianceError};
use crate::nijenhuis::{compare_on, sampled_assignments, OracleError, RegularElement};
use crate::numeric::fmt_q;
use crate::rootsys::{Family, LieType, RootSysError, RootSystem};
use serde::Serialize;
use std::fmt::Write;
use thiserror::Error;

/// Largest rank accepted by the oracle verification.
pub const ORACLE_MAX_RANK: usize = 4;
/// Assignments checked by the oracle; larger sweeps are sampled.
pub const ORACLE_SWEEP_LIMIT: usize = 20_000;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    RootSys(#[from] RootSysError),
    #[error(transparent)]
    RootSet(#[from] RootSetError),
    #[error("pass either Σ\\Θ or Θ, not both")]
    ConflictingFlagArgs,
    #[error("the Nijenhuis oracle is limited to rank <= {max}; {lie_type} has rank {}", lie_type.rank())]
    OracleRankBound { lie_type: LieType, max: usize },
    #[error(transparent)]
    Gc(#[from] GcError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Invariance(#[from] InvarianceError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

impl ReportError {
    /// Whether the error comes from bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            ReportError::RootSys(_)
                | ReportError::RootSet(_)
                | ReportError::ConflictingFlagArgs
                | ReportError::OracleRankBound { .. }
                | ReportError::Gc(GcError::TooManyComponents(..))
                | ReportError::Catalog(_)
        )
    }
}

/// Resolves Θ (0-based) from either Σ\Θ or Θ; neither means Θ = ∅.
pub fn resolve_theta(
    lie_type: LieType,
    sigma_minus_theta: Option<&RootSet>,
    theta: Option<&RootSet>,
) -> Result<Vec<usize>, ReportError> {
    match (sigma_minus_theta, theta) {
        (Some(_), Some(_)) => Err(ReportError::ConflictingFlagArgs),
        (Some(c), None) => {
            let c = c.resolve(lie_type)?;
            Ok((0..lie_type.rank()).filter(|i| !c.contains(i)).collect())
        }
        (None, Some(t)) => Ok(t.resolve(lie_type)?),
        (None, None) => Ok(Vec::new()),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn set_label(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|i| format!("α{}", i + 1)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn tuple_label(t: &[i32]) -> String {
    let parts: Vec<String> = t.iter().map(i32::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagHeader {
    #[serde(rename = "type")]
    pub lie_type: String,
    pub rank: usize,
    pub theta: Vec<usize>,
    pub sigma_minus_theta: Vec<usize>,
}

impl FlagHeader {
    fn new(fs: &FlagSpec) -> Self {
        FlagHeader {
            lie_type: fs.rs.lie_type().to_string(),
            rank: fs.rs.rank(),
            theta: one_based(&fs.theta()),
            sigma_minus_theta: one_based(&fs.complement()),
        }
    }

    fn title(&self) -> String {
        let theta: Vec<usize> = self.theta.iter().map(|i| i - 1).collect();
        format!("{}, Θ = {}", self.lie_type, set_label(&theta))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RootEntry {
    pub index: usize,
    pub coeffs: Vec<i32>,
    pub label: String,
    pub height: i32,
    pub norm: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootsReport {
    pub schema: &'static str,
    #[serde(rename = "type")]
    pub lie_type: String,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub count: usize,
    pub expected_count: usize,
    pub positive_roots: Vec<RootEntry>,
    pub highest_root: Vec<i32>,
}

pub fn roots_report(lie_type: LieType) -> RootsReport {
    let rs = RootSystem::new(lie_type);
    let positive_roots = rs
        .positive_roots()
        .iter()
        .enumerate()
        .map(|(id, r)| RootEntry {
            index: id + 1,
            coeffs: r.coeffs.clone(),
            label: r.to_string(),
            height: r.height(),
            norm: fmt_q(&rs.norm(id)),
        })
        .collect();
    RootsReport {
        schema: "gcflag.roots/v1",
        lie_type: lie_type.to_string(),
        rank: rs.rank(),
        cartan: rs.cartan().to_vec(),
        count: rs.num_positive(),
        expected_count: lie_type.expected_positive_roots(),
        positive_roots,
        highest_root: rs.highest_root().coeffs.clone(),
    }
}

impl RootsReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Root system {}\n", self.lie_type);
        let _ = writeln!(s, "Positive roots: {}\n", self.count);
        let _ = writeln!(s, "| # | root | coefficients | height | (α,α) |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for r in &self.positive_roots {
            let _ =
                writeln!(s, "| {} | {} | {} | {} | {} |", r.index, r.label, tuple_label(&r.coeffs), r.height, r.norm);
        }
        let _ = writeln!(s, "\nHighest root: {}", tuple_label(&self.highest_root));
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentEntry {
    pub name: String,
    pub tuple: Vec<i32>,
    pub dim: usize,
    pub roots: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleClassEntry {
    /// Components of α, β and α+β (1-based).
    pub components: [usize; 3],
    pub kind: &'static str,
    pub triples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeReport {
    pub schema: &'static str,
    #[serde(flatten)]
    pub flag: FlagHeader,
    pub theta_span: Vec<String>,
    pub components: Vec<ComponentEntry>,
    pub triple_classes: Vec<TripleClassEntry>,
}

fn component_entries(flag: &Flag) -> Vec<ComponentEntry> {
    let rs = flag.rs();
    flag.decomposition
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| ComponentEntry {
            name: format!("m{}", k + 1),
            tuple: c.tuple.clone(),
            dim: 2 * c.roots.len(),
            roots: c.roots.iter().map(|&r| rs.root(r).to_string()).collect(),
        })
        .collect()
}

pub fn decompose_report(lie_type: LieType, theta: &[usize]) -> Result<DecomposeReport, ReportError> {
    let rs = RootSystem::new(lie_type);
    let fs = FlagSpec::new(&rs, theta).map_err(RootSetError::from)?;
    let flag = Flag::new(fs);
    let mut triple_classes: Vec<TripleClassEntry> = Vec::new();
    for class in flag.triple_classes() {
        let members: Vec<_> = flag.triples.iter().filter(|t| t.class() == class).collect();
        triple_classes.push(TripleClassEntry {
            components: [class.0 + 1, class.1 + 1, class.2 + 1],
            kind: match members[0].kind {
                TripleKind::Intra => "intra",
                TripleKind::Cross => "cross",
            },
            triples: members.len(),
        });
    }
    Ok(DecomposeReport {
        schema: "gcflag.decompose/v1",
        flag: FlagHeader::new(&fs),
        theta_span: theta_span(&fs).iter().map(|&r| rs.root(r).to_string()).collect(),
        components: component_entries(&flag),
        triple_classes,
    })
}

impl DecomposeReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Isotropy decomposition of {}\n", self.flag.title());
        let smt: Vec<usize> = self.flag.sigma_minus_theta.iter().map(|i| i - 1).collect();
        let _ = writeln!(
            s,
            "Σ\\Θ = {}; ⟨Θ⟩⁺ = {{{}}}; s = {}\n",
            set_label(&smt),
            self.theta_span.join(", "),
            self.components.len()
        );
        let _ = writeln!(s, "| summand | dim | roots |");
        let _ = writeln!(s, "|---|---|---|");
        for c in &self.components {
            let _ = writeln!(s, "| {} = m{} | {} | {} |", c.name, tuple_label(&c.tuple), c.dim, c.roots.join(", "));
        }
        if !self.triple_classes.is_empty() {
            let _ = writeln!(s, "\n| α in | β in | α+β in | kind | triples |");
            let _ = writeln!(s, "|---|---|---|---|---|");
            for t in &self.triple_classes {
                let [i, j, k] = t.components;
                let _ = writeln!(s, "| m{i} | m{j} | m{k} | {} | {} |", t.kind, t.triples);
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternEntry {
    pub pattern: Vec<&'static str>,
    /// Triple classes (1-based) whose polynomial constraints must hold.
    pub constraint_classes: Vec<[usize; 3]>,
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub schema: &'static str,
    #[serde(flatten)]
    pub flag: FlagHeader,
    pub components: Vec<ComponentEntry>,
    /// Rows up to the global sign flip, when the pattern set is closed under it.
    pub rows: Option<Vec<Vec<&'static str>>>,
    pub patterns: Vec<PatternEntry>,
}

fn assignment_strings(asg: &Assignment) -> Vec<String> {
    asg.iter().map(|(_, f)| f.to_string()).collect()
}

pub fn classify_report(lie_type: LieType, theta: &[usize]) -> Result<ClassifyReport, ReportError> {
    let rs = RootSystem::new(lie_type);
    let fs = FlagSpec::new(&rs, theta).map_err(RootSetError::from)?;
    let flag = Flag::new(fs);
    let classes = enumerate_integrable_patterns(&flag)?;
    let raw: Vec<TypePattern> = classes.iter().map(|c| c.pattern.clone()).collect();
    let rows =
        compress_rows(&raw).map(|rows| rows.iter().map(|r| r.0.iter().map(RowEntry::symbol).collect()).collect());
    let patterns = classes
        .iter()
        .map(|c| PatternEntry {
            pattern: c.pattern.0.iter().map(|t| t.label()).collect(),
            constraint_classes: c.constraint_classes.iter().map(|&(i, j, k)| [i + 1, j + 1, k + 1]).collect(),
            witness: c.witness.as_ref().map(assignment_strings),
        })
        .collect();
    Ok(ClassifyReport {
        schema: "gcflag.classify/v1",
        flag: FlagHeader::new(&fs),
        components: component_entries(&flag),
        rows,
        patterns,
    })
}

fn row_cell(symbol: &str) -> String {
    match symbol {
        "noncomplex" | "NC" => "noncomplex".to_string(),
        "C(+)" => "complex (+J0)".to_string(),
        "C(-)" => "complex (−J0)".to_string(),
        other => format!("complex ({other})"),
    }
}

impl ClassifyReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Invariant generalized complex structures on {}\n", self.flag.title());
        for c in &self.components {
            let _ = writeln!(s, "- {} = m{}: {}", c.name, tuple_label(&c.tuple), c.roots.join(", "));
        }
        let _ = writeln!(s);
        if self.components.is_empty() {
            let _ = writeln!(s, "The flag is a point.");
            return s;
        }
        let header: Vec<String> = self.components.iter().map(|c| format!("J on {0} ⊕ {0}*", c.name)).collect();
        let _ = writeln!(s, "| {} |", header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
        match &self.rows {
            Some(rows) => {
                for r in rows {
                    let cells: Vec<String> = r.iter().map(|e| row_cell(e)).collect();
                    let _ = writeln!(s, "| {} |", cells.join(" | "));
                }
                let _ = writeln!(s, "\n{} rows, {} type patterns.", rows.len(), self.patterns.len());
            }
            None => {
                for p in &self.patterns {
                    let cells: Vec<String> = p.pattern.iter().map(|e| row_cell(e)).collect();
                    let _ = writeln!(s, "| {} |", cells.join(" | "));
                }
                let _ = writeln!(s, "\n{} type patterns.", self.patterns.len());
            }
        }
        let conditional = self.patterns.iter().filter(|p| !p.constraint_classes.is_empty()).count();
        if conditional > 0 {
            let _ = writeln!(
                s,
                "\n{conditional} pattern(s) with several noncomplex summands also require the noncomplex \
                 parameters to satisfy the polynomial constraints on every all-noncomplex triple; \
                 a witness assignment is listed in the JSON output."
            );
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstancyEntry {
    pub name: String,
    pub tuple: Vec<i32>,
    pub roots: usize,
    pub edges: usize,
    pub connected: bool,
    pub single_step: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleEntry {
    /// `α_i(H)` for every simple root.
    pub h: Vec<String>,
    pub mode: &'static str,
    pub assignments: usize,
    pub integrable: usize,
    pub witnesses_checked: usize,
    pub disagreements: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootCountEntry {
    pub computed: usize,
    pub expected: usize,
    pub dimension: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    #[serde(flatten)]
    pub flag: FlagHeader,
    pub root_count: RootCountEntry,
    pub notes: Vec<String>,
    pub constancy: Vec<ConstancyEntry>,
    pub oracle: Option<OracleEntry>,
    pub ok: bool,
}

/// The note attached to E7 reports.
pub const E7_NOTE: &str = "E7 has 63 positive roots (dim 133 = 7 + 2·63). \
     The figure 64 that appears in some sources is not the positive-root count; this is a note, not a failure.";

pub fn verify_report(lie_type: LieType, theta: &[usize], oracle: bool) -> Result<VerifyReport, ReportError> {
    if oracle && lie_type.rank() > ORACLE_MAX_RANK {
        return Err(ReportError::OracleRankBound { lie_type, max: ORACLE_MAX_RANK });
    }
    let rs = RootSystem::new(lie_type);
    let fs = FlagSpec::new(&rs, theta).map_err(RootSetError::from)?;
    let flag = Flag::new(fs);
    let computed = rs.num_positive();
    let expected = lie_type.expected_positive_roots();
    let mut notes = Vec::new();
    if lie_type.family() == Family::E && lie_type.rank() == 7 {
        notes.push(E7_NOTE.to_string());
    }
    let report = verify_constancy(&flag)?;
    let constancy: Vec<ConstancyEntry> = report
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| ConstancyEntry {
            name: format!("m{}", k + 1),
            tuple: c.tuple.clone(),
            roots: c.roots,
            edges: c.edges,
            connected: c.connected,
            single_step: c.single_step,
            failures: c.failures.clone(),
        })
        .collect();
    let not_single: Vec<&str> = constancy.iter().filter(|c| !c.single_step).map(|c| c.name.as_str()).collect();
    if !not_single.is_empty() {
        notes.push(format!(
            "Summands {} are connected only through chains of ⟨Θ⟩-translations, not by a single one.",
            not_single.join(", ")
        ));
    }
    let mut ok = computed == expected && report.ok();
    let oracle = if oracle {
        let h = RegularElement::default_for(&fs);
        let s = flag.num_components();
        let mut assignments = sampled_assignments(s, ORACLE_SWEEP_LIMIT);
        let full = assignments.len() as u128 == 7u128.saturating_pow(s as u32);
        let witnesses: Vec<Assignment> =
            enumerate_integrable_patterns(&flag)?.into_iter().filter_map(|c| c.witness).collect();
        let witnesses_checked = witnesses.len();
        assignments.extend(witnesses);
        let summary = compare_on(&flag, &h, assignments)?;
        ok &= summary.disagreements.is_empty();
        Some(OracleEntry {
            h: h.values().iter().map(fmt_q).collect(),
            mode: if full { "full" } else { "sampled" },
            assignments: summary.assignments,
            integrable: summary.integrable,
            witnesses_checked,
            disagreements: summary.disagreements.iter().map(assignment_strings).collect(),
        })
    } else {
        None
    };
    Ok(VerifyReport {
        schema: "gcflag.verify/v1",
        flag: FlagHeader::new(&fs),
        root_count: RootCountEntry { computed, expected, dimension: rs.rank() + 2 * computed },
        notes,
        constancy,
        oracle,
        ok,
    })
}

impl VerifyReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Verification of {}\n", self.flag.title());
        let rc = &self.root_count;
        let _ =
            writeln!(s, "Positive roots: {} (closed form {}), dimension {}.\n", rc.computed, rc.expected, rc.dimension);
        for n in &self.notes {
            let _ = writeln!(s, "Note: {n}\n");
        }
        let _ = writeln!(s, "| summand | tuple | roots | edges | connected | single step | failures |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for c in &self.constancy {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                c.name,
                tuple_label(&c.tuple),
                c.roots,
                c.edges,
                c.connected,
                c.single_step,
                c.failures.len()
            );
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(
                s,
                "\nOracle ({} sweep, α(H) = ({})): {} assignments, {} integrable, {} witnesses, {} disagreements.",
                o.mode,
                o.h.join(", "),
                o.assignments,
                o.integrable,
                o.witnesses_checked,
                o.disagreements.len()
            );
            for d in &o.disagreements {
                let _ = writeln!(s, "- disagreement: ({})", d.join(", "));
            }
        }
        let _ = writeln!(s, "\nResult: {}", if self.ok { "ok" } else { "FAILED" });
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub table: u8,
    pub label: String,
    #[serde(rename = "type")]
    pub lie_type: String,
    pub sigma_minus_theta: RootSet,
    pub expected_s: usize,
    pub computed_s: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogReport {
    pub schema: &'static str,
    pub rows: Vec<CatalogEntry>,
    pub passed: usize,
    pub failed: usize,
}

pub fn catalog_report(rows: &[CatalogRow]) -> Result<CatalogReport, ReportError> {
    let checks = check_rows(rows)?;
    let rows: Vec<CatalogEntry> = checks
        .iter()
        .map(|c| CatalogEntry {
            table: c.row.table,
            label: c.row.label.clone(),
            lie_type: c.row.lie_type.to_string(),
            sigma_minus_theta: c.row.sigma_minus_theta.clone(),
            expected_s: c.row.expected_s,
            computed_s: c.computed_s,
            ok: c.ok(),
        })
        .collect();
    let passed = rows.iter().filter(|r| r.ok).count();
    Ok(CatalogReport { schema: "gcflag.catalog/v1", failed: rows.len() - passed, passed, rows })
}

impl CatalogReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Flag manifolds with two, three and four summands\n");
        let _ = writeln!(s, "| table | U/K | type | Σ\\Θ | s expected | s computed | result |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                r.table,
                r.label,
                r.lie_type,
                r.sigma_minus_theta,
                r.expected_s,
                r.computed_s,
                if r.ok { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "\n{} passed, {} failed.", self.passed, self.failed);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_rows;

    fn lt(s: &str) -> LieType {
        s.parse().unwrap()
    }

    #[test]
    fn theta_resolution() {
        let b3 = lt("B3");
        let smt = RootSet::Indices(vec![1, 2]);
        assert_eq!(resolve_theta(b3, Some(&smt), None).unwrap(), vec![2]);
        assert_eq!(resolve_theta(b3, None, Some(&RootSet::Indices(vec![3]))).unwrap(), vec![2]);
        assert_eq!(resolve_theta(b3, None, None).unwrap(), Vec::<usize>::new());
        assert!(matches!(resolve_theta(b3, Some(&smt), Some(&smt)), Err(ReportError::ConflictingFlagArgs)));
        let g2 = lt("G2");
        assert_eq!(resolve_theta(g2, Some(&RootSet::Descriptor("short".into())), None).unwrap(), vec![0]);
    }

    #[test]
    fn decompose_b3_shape() {
        let r = decompose_report(lt("B3"), &[2]).unwrap();
        assert_eq!(r.components.len(), 4);
        assert_eq!(r.components[1].roots, ["α1"]);
        assert_eq!(r.flag.sigma_minus_theta, vec![1, 2]);
        let md = r.to_markdown();
        assert!(md.contains("| m2 = m(1,0) | 2 | α1 |"), "{md}");
    }

    #[test]
    fn classify_a3_rows() {
        let r = classify_report(lt("A3"), &[2]).unwrap();
        assert_eq!(r.rows.as_ref().unwrap().len(), 7);
        assert_eq!(r.patterns.len(), 13);
        assert!(r.patterns.iter().all(|p| p.witness.is_some()));
    }

    #[test]
    fn verify_rejects_large_rank_with_oracle() {
        let err = verify_report(lt("E6"), &[], true).unwrap_err();
        assert!(err.is_usage());
        assert!(err.to_string().contains("rank <= 4"));
    }

    #[test]
    fn verify_e7_note_and_b2_oracle() {
        let r = verify_report(lt("E7"), &[2, 3, 4, 5, 6], false).unwrap();
        assert!(r.ok);
        assert_eq!(r.root_count.computed, 63);
        assert!(r.notes.iter().any(|n| n.contains("63")));
        let b2 = verify_report(lt("B2"), &[0], true).unwrap();
        let o = b2.oracle.unwrap();
        assert_eq!((o.mode, o.assignments), ("full", 49 + o.witnesses_checked));
        assert!(b2.ok);
    }

    #[test]
    fn catalog_all_pass() {
        let r = catalog_report(&builtin_rows()).unwrap();
        assert!(r.ok(), "{}", r.to_markdown());
    }

    #[test]
    fn json_is_deterministic() {
        let a = serde_json::to_string(&classify_report(lt("B3"), &[2]).unwrap()).unwrap();
        let b = serde_json::to_string(&classify_report(lt("B3"), &[2]).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
