//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//! All arithmetic is exact, so every comparison is equality; each criterion
//! also has a wall-clock budget.

use gcflag::catalog::{builtin_rows, check_rows};
use gcflag::flagdecomp::{verify_summands_match_height, Flag, FlagSpec};
use gcflag::gcstruct::{
    assignment_verdict, enumerate_integrable_patterns, fiber_matrix, solve_noncomplex_chain, split_pairing, Assignment,
    FiberStructure, NcParams, PatternRow, TypePattern,
};
use gcflag::invariance::verify_constancy;
use gcflag::nijenhuis::{oracle_integrable, sweep_agreement, RegularElement};
use gcflag::numeric::{q, qf, Matrix, Q};
use gcflag::reports::{decompose_report, verify_report};
use gcflag::rootsys::{LieType, RootSystem, SignConvention};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn lt(s: &str) -> LieType {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Σ\Θ given 1-based → Θ 0-based.
fn theta_from_complement(t: LieType, complement: &[usize]) -> Vec<usize> {
    (0..t.rank()).filter(|i| !complement.contains(&(i + 1))).collect()
}

fn c1_b3_golden() -> Outcome {
    let r = decompose_report(lt("B3"), &[2]).map_err(|e| e.to_string())?;
    let expected: [(&[i32], &[&str]); 4] = [
        (&[1, 0], &["α1"]),
        (&[0, 1], &["α2", "α2+α3", "α2+2α3"]),
        (&[1, 1], &["α1+α2", "α1+α2+α3", "α1+α2+2α3"]),
        (&[1, 2], &["α1+2α2+2α3"]),
    ];
    ensure(r.components.len() == 4, || format!("{} components", r.components.len()))?;
    for (tuple, roots) in expected {
        let c = r.components.iter().find(|c| c.tuple == tuple).ok_or_else(|| format!("no component m{tuple:?}"))?;
        let got: BTreeSet<&str> = c.roots.iter().map(String::as_str).collect();
        let want: BTreeSet<&str> = roots.iter().copied().collect();
        ensure(got == want, || format!("m{tuple:?}: {got:?} != {want:?}"))?;
    }
    Ok("m(1,0), m(0,1), m(1,1), m(1,2) match".into())
}

fn c2_height_counts() -> Outcome {
    let mut checked = 0;
    for t in LieType::all_up_to(8) {
        let rs = RootSystem::new(t);
        for i in 0..t.rank() {
            ensure(verify_summands_match_height(&rs, i), || format!("{t}, α{}", i + 1))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (type, simple root) pairs"))
}

fn c3_catalog() -> Outcome {
    let rows = builtin_rows();
    let checks = check_rows(&rows).map_err(|e| e.to_string())?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.ok())
        .map(|c| format!("{} {} {}: s={}", c.row.label, c.row.lie_type, c.row.sigma_minus_theta, c.computed_s))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{} rows", checks.len()))
}

const ROWS_7: [&str; 7] = ["+ + +", "+ - +", "+ - -", "+ NC +", "NC + +", "+ - NC", "NC NC NC"];
const ROWS_9: [&str; 9] =
    ["+ + + +", "+ - + +", "+ - + -", "+ - - -", "+ - + NC", "+ - NC -", "+ NC + +", "NC + + +", "NC NC NC NC"];

/// Compares the computed patterns with a table whose columns are the
/// components with the given tuples.
fn compare_table(t: LieType, complement: &[usize], columns: &[&[i32]], rows: &[&str]) -> Result<usize, String> {
    let rs = RootSystem::new(t);
    let flag = Flag::new(FlagSpec::new(&rs, &theta_from_complement(t, complement)).unwrap());
    let dec = &flag.decomposition;
    ensure(dec.len() == columns.len(), || format!("{t}: {} components", dec.len()))?;
    let col_of: Vec<usize> = columns
        .iter()
        .map(|tuple| dec.find_tuple(tuple).ok_or_else(|| format!("{t}: no component m{tuple:?}")))
        .collect::<Result<_, _>>()?;
    let mut want = BTreeSet::new();
    for r in rows {
        for p in PatternRow::parse(r).unwrap().expand() {
            let mut tags = p.0.clone();
            for (table_col, &ours) in col_of.iter().enumerate() {
                tags[ours] = p.0[table_col];
            }
            want.insert(TypePattern(tags));
        }
    }
    let got: BTreeSet<TypePattern> =
        enumerate_integrable_patterns(&flag).map_err(|e| e.to_string())?.into_iter().map(|c| c.pattern).collect();
    ensure(got == want, || {
        let extra: Vec<String> = got.difference(&want).map(ToString::to_string).collect();
        let missing: Vec<String> = want.difference(&got).map(ToString::to_string).collect();
        format!("{t} {complement:?}: extra {extra:?}, missing {missing:?}")
    })?;
    Ok(rows.len())
}

fn c4_classification() -> Outcome {
    let three: &[&[i32]] = &[&[1, 0], &[0, 1], &[1, 1]];
    let four: &[&[i32]] = &[&[1, 0], &[0, 1], &[1, 1], &[1, 2]];
    let four_tail: &[&[i32]] = &[&[0, 1], &[1, 0], &[1, 1], &[2, 1]];
    type Case<'a> = (&'a str, &'a [usize], &'a [&'a [i32]], &'a [&'a str]);
    let cases: [Case; 8] = [
        ("A3", &[1, 2], three, &ROWS_7),
        ("D5", &[4, 5], three, &ROWS_7),
        ("B3", &[1, 2], four, &ROWS_9),
        ("C4", &[2, 4], four_tail, &ROWS_9),
        ("D5", &[1, 2], four, &ROWS_9),
        ("E6", &[1, 5], three, &ROWS_7),
        ("E6", &[1, 2], four, &ROWS_9),
        ("E7", &[1, 2], four, &ROWS_9),
    ];
    let mut summary = Vec::new();
    for (name, complement, columns, rows) in cases {
        let n = compare_table(lt(name), complement, columns, rows)?;
        summary.push(format!("{name}{complement:?}:{n}"));
    }
    Ok(summary.join(" "))
}

fn oracle_cases() -> Vec<(&'static str, Vec<usize>)> {
    vec![("A2", vec![]), ("B2", vec![]), ("G2", vec![]), ("B2", vec![0]), ("B3", vec![2]), ("A3", vec![2])]
}

fn c5_oracle_equivalence() -> Outcome {
    let mut total = 0;
    for (name, theta) in oracle_cases() {
        let rs = RootSystem::new(lt(name));
        let flag = Flag::new(FlagSpec::new(&rs, &theta).unwrap());
        let s = sweep_agreement(&flag, &RegularElement::default_for(&flag.spec)).map_err(|e| e.to_string())?;
        ensure(s.disagreements.is_empty(), || {
            format!("{name} Θ={theta:?}: {} disagreements, first {:?}", s.disagreements.len(), s.disagreements[0])
        })?;
        total += s.assignments;
    }
    Ok(format!("{total} assignments agree"))
}

fn c6_chain_solver() -> Outcome {
    let n121 = FiberStructure::nc(1, 2, 1);
    let solved = solve_noncomplex_chain(&n121, &n121).map_err(|e| e.to_string())?;
    ensure(solved == FiberStructure::nc(1, 1, 2), || format!("solver gave {solved}"))?;
    let rs = RootSystem::new(lt("B2"));
    let flag = Flag::new(FlagSpec::new(&rs, &[0]).unwrap());
    let h = RegularElement::default_for(&flag.spec);
    let asg = Assignment::from_vec(vec![n121, solved]);
    ensure(oracle_integrable(&flag, &asg, &h).map_err(|e| e.to_string())?, || "oracle: N|_L != 0".into())?;
    let off = Assignment::from_vec(vec![n121, FiberStructure::nc(0, 1, 1)]);
    ensure(!oracle_integrable(&flag, &off, &h).map_err(|e| e.to_string())?, || "oracle accepts a non-solution".into())?;
    Ok("NC(1,2,1) ∘ NC(1,2,1) → NC(1,1,2); N|_L = 0".into())
}

fn c7_constancy() -> Outcome {
    let mut flags = 0;
    let mut chain_only = 0;
    for t in LieType::all_up_to(6) {
        let rs = RootSystem::new(t);
        for mask in 0u32..(1 << t.rank()) {
            let theta: Vec<usize> = (0..t.rank()).filter(|i| mask & (1 << i) != 0).collect();
            let flag = Flag::new(FlagSpec::new(&rs, &theta).unwrap());
            let report = verify_constancy(&flag).map_err(|e| e.to_string())?;
            ensure(report.ok(), || format!("{t} Θ={theta:?}: {:?}", report.components))?;
            chain_only += report.components.iter().filter(|c| !c.single_step).count();
            flags += 1;
        }
    }
    Ok(format!("{flags} flags; {chain_only} summands connected only through chains"))
}

fn c8_counts() -> Outcome {
    for t in LieType::all_up_to(8) {
        let rs = RootSystem::new(t);
        ensure(rs.num_positive() == t.expected_positive_roots(), || {
            format!("{t}: {} != {}", rs.num_positive(), t.expected_positive_roots())
        })?;
    }
    let e7 = verify_report(lt("E7"), &theta_from_complement(lt("E7"), &[1, 2]), false).map_err(|e| e.to_string())?;
    ensure(e7.root_count.computed == 63 && e7.root_count.dimension == 133, || format!("{:?}", e7.root_count))?;
    ensure(e7.notes.iter().any(|n| n.contains("63") && n.contains("64")), || "missing E7 note".into())?;
    ensure(e7.ok, || "E7 report not ok".into())?;
    Ok("all types rank ≤ 8; E7 = 63 with note".into())
}

fn random_nc(rng: &mut ChaCha8Rng) -> FiberStructure {
    let a = qf(rng.gen_range(-50..=50), rng.gen_range(1..=12));
    let mut xn = 0;
    while xn == 0 {
        xn = rng.gen_range(-50..=50);
    }
    let x = qf(xn, rng.gen_range(1..=12));
    FiberStructure::Noncomplex(NcParams::from_ax(a, x).unwrap())
}

fn c9_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c66);
    let p = split_pairing();
    let minus_id = -&Matrix::<Q>::identity(4);
    for k in 0..1000 {
        let f = random_nc(&mut rng);
        let m = fiber_matrix(&f);
        ensure(&m * &m == minus_id, || format!("sample {k}: M² != −I for {f}"))?;
        ensure(&(&m.transpose() * &p) * &m == p, || format!("sample {k}: pairing not preserved for {f}"))?;
    }

    let flags: Vec<(RootSystem, Vec<usize>)> =
        oracle_cases().into_iter().map(|(n, th)| (RootSystem::new(lt(n)), th)).collect();
    for k in 0..200 {
        let (rs, theta) = &flags[k % flags.len()];
        let flag = Flag::new(FlagSpec::new(rs, theta).unwrap());
        let fibers = (0..flag.num_components())
            .map(|_| match rng.gen_range(0..3) {
                0 => FiberStructure::PLUS,
                1 => FiberStructure::MINUS,
                _ => random_nc(&mut rng),
            })
            .collect();
        let asg = Assignment::from_vec(fibers);
        let v = assignment_verdict(&flag, &asg).unwrap();
        ensure(v == assignment_verdict(&flag, &asg.negated()).unwrap(), || format!("flip changes verdict of {asg:?}"))?;
        let h = RegularElement::default_for(&flag.spec);
        ensure(oracle_integrable(&flag, &asg.negated(), &h).unwrap() == v, || format!("oracle flip {asg:?}"))?;
    }

    let mut sweeps = 0;
    for (name, theta) in oracle_cases() {
        for conv in [SignConvention::Positive, SignConvention::Negative, SignConvention::Alternating] {
            let rs = RootSystem::with_convention(lt(name), conv);
            let flag = Flag::new(FlagSpec::new(&rs, &theta).unwrap());
            let n = flag.spec.complement().len();
            let hs = [
                RegularElement::default_for(&flag.spec),
                RegularElement::powers_of_ten(&flag.spec),
                RegularElement::new(&flag.spec, &vec![qf(2, 7); n]).unwrap(),
                RegularElement::new(&flag.spec, &(1..=n as i64).map(|j| q(-j)).collect::<Vec<_>>()).unwrap(),
            ];
            for h in &hs {
                let s = sweep_agreement(&flag, h).map_err(|e| e.to_string())?;
                ensure(s.disagreements.is_empty(), || format!("{name} {theta:?} {conv:?} H={:?}", h.values()))?;
                sweeps += 1;
            }
        }
    }
    Ok(format!("1000 fibers, 200 sign flips, {sweeps} (H, convention) sweeps"))
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "B3 golden decomposition", budget: Duration::from_secs(1), run: c1_b3_golden },
        Criterion {
            id: 2,
            name: "summands = height, rank ≤ 8",
            budget: Duration::from_secs(10),
            run: c2_height_counts,
        },
        Criterion { id: 3, name: "summand catalog", budget: Duration::from_secs(10), run: c3_catalog },
        Criterion { id: 4, name: "classification tables", budget: Duration::from_secs(30), run: c4_classification },
        Criterion { id: 5, name: "oracle equivalence", budget: Duration::from_secs(300), run: c5_oracle_equivalence },
        Criterion { id: 6, name: "noncomplex chain solver", budget: Duration::from_secs(10), run: c6_chain_solver },
        Criterion { id: 7, name: "constancy, rank ≤ 6", budget: Duration::from_secs(120), run: c7_constancy },
        Criterion { id: 8, name: "positive-root counts", budget: Duration::from_secs(1), run: c8_counts },
        Criterion { id: 9, name: "property suites", budget: Duration::from_secs(300), run: c9_properties },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "[{}] C{} {} ({:.2}s / {}s): {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
