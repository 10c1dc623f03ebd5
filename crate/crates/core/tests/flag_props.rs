use gcflag::catalog::builtin_rows;
use gcflag::flagdecomp::{decompose_isotropy, theta_span, Flag, FlagSpec, TripleKind};
use gcflag::gcstruct::{enumerate_integrable_patterns, PatternTag, TypePattern};
use gcflag::rootsys::{LieType, RootSystem};
use proptest::prelude::*;

fn mask_to_theta(rank: usize, mask: u32) -> Vec<usize> {
    (0..rank).filter(|i| mask & (1 << i) != 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn components_partition_roots_of_m(ti in 0usize..64, mask in any::<u32>()) {
        let all = LieType::all_up_to(6);
        let t = all[ti % all.len()];
        let rs = RootSystem::new(t);
        let theta = mask_to_theta(t.rank(), mask);
        let fs = FlagSpec::new(&rs, &theta).unwrap();
        let dec = decompose_isotropy(&fs);
        let span = theta_span(&fs);
        let mut seen = vec![0usize; rs.num_positive()];
        for c in &dec.components {
            prop_assert!(!c.roots.is_empty());
            prop_assert!(c.tuple.iter().all(|&x| x >= 0) && c.tuple.iter().any(|&x| x > 0));
            for &r in &c.roots {
                seen[r] += 1;
                prop_assert_eq!(&fs.restrict(r), &c.tuple);
            }
        }
        for (id, &count) in seen.iter().enumerate() {
            prop_assert_eq!(count, usize::from(!span.contains(&id)));
        }
        prop_assert_eq!(dec.is_empty(), theta.len() == t.rank());
    }

    #[test]
    fn triple_tuples_add(ti in 0usize..64, mask in any::<u32>()) {
        let all = LieType::all_up_to(6);
        let t = all[ti % all.len()];
        let rs = RootSystem::new(t);
        let flag = Flag::new(FlagSpec::new(&rs, &mask_to_theta(t.rank(), mask)).unwrap());
        let comps = &flag.decomposition.components;
        for tr in &flag.triples {
            let (i, j, k) = tr.comps;
            let sum: Vec<i32> = comps[i].tuple.iter().zip(&comps[j].tuple).map(|(a, b)| a + b).collect();
            prop_assert_eq!(&sum, &comps[k].tuple);
            prop_assert_eq!(tr.kind == TripleKind::Intra, i == j);
            prop_assert!(tr.alpha < tr.beta);
        }
    }
}

#[test]
fn two_summand_flags_force_one_type() {
    for row in builtin_rows().iter().filter(|r| r.expected_s == 2) {
        let rs = RootSystem::new(row.lie_type);
        let complement = row.sigma_minus_theta.resolve(row.lie_type).unwrap();
        let flag = Flag::new(FlagSpec::from_complement(&rs, &complement).unwrap());
        assert!(flag.triples.iter().any(|t| t.kind == TripleKind::Intra), "{}", row.label);
        let patterns: Vec<TypePattern> =
            enumerate_integrable_patterns(&flag).unwrap().into_iter().map(|c| c.pattern).collect();
        for p in &patterns {
            let nc = p.num_noncomplex();
            assert!(nc == 0 || nc == 2, "{} {}: mixed pattern {p}", row.lie_type, row.label);
            if nc == 0 {
                assert_eq!(p.0[0], p.0[1], "{} {p}", row.lie_type);
            }
        }
    }
}

#[test]
fn single_root_flags_are_monotype() {
    for t in LieType::all_up_to(6) {
        let rs = RootSystem::new(t);
        for i in 0..t.rank() {
            let flag = Flag::new(FlagSpec::from_complement(&rs, &[i]).unwrap());
            let h = rs.height(i).unwrap() as usize;
            assert_eq!(flag.num_components(), h);
            let patterns: Vec<TypePattern> =
                enumerate_integrable_patterns(&flag).unwrap().into_iter().map(|c| c.pattern).collect();
            let expected: Vec<TypePattern> = [PatternTag::Plus, PatternTag::Minus, PatternTag::Nc]
                .iter()
                .map(|&tag| TypePattern(vec![tag; h]))
                .collect();
            let mut got = patterns.clone();
            got.sort();
            let mut want = expected.clone();
            want.sort();
            assert_eq!(got, want, "{t} Σ\\Θ = {{α{}}}", i + 1);
        }
    }
}
