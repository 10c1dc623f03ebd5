use gcflag::flagdecomp::{Flag, FlagSpec};
use gcflag::gcstruct::{assignment_verdict, fiber_matrix, split_pairing, Assignment, FiberStructure, NcParams};
use gcflag::nijenhuis::{oracle_integrable, sweep_agreement, triple_tensor, Algebra, RegularElement};
use gcflag::numeric::{q, qf, Matrix, Q};
use gcflag::rootsys::{LieType, RootSystem, SignConvention};
use proptest::prelude::*;

fn nc_strategy() -> impl Strategy<Value = FiberStructure> {
    (-20i64..=20, 1i64..=9, (-20i64..=20).prop_filter("x != 0", |x| *x != 0), 1i64..=9)
        .prop_map(|(an, ad, xn, xd)| FiberStructure::Noncomplex(NcParams::from_ax(qf(an, ad), qf(xn, xd)).unwrap()))
}

fn fiber_strategy() -> impl Strategy<Value = FiberStructure> {
    prop_oneof![Just(FiberStructure::PLUS), Just(FiberStructure::MINUS), nc_strategy()]
}

fn flag_cases() -> Vec<(&'static str, Vec<usize>)> {
    vec![("A2", vec![]), ("B2", vec![]), ("G2", vec![]), ("B2", vec![0]), ("B3", vec![2]), ("A3", vec![2])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn noncomplex_fibers_square_to_minus_one_and_preserve_pairing(f in nc_strategy()) {
        let m = fiber_matrix(&f);
        let minus_id = -&Matrix::<Q>::identity(4);
        prop_assert_eq!(&(&m * &m), &minus_id);
        let p = split_pairing();
        prop_assert_eq!(&(&(&m.transpose() * &p) * &m), &p);
        if let FiberStructure::Noncomplex(nc) = f {
            prop_assert_eq!(nc.a() * nc.a(), nc.x() * nc.y() - q(1));
        }
    }

    #[test]
    fn global_sign_flip_preserves_verdict(
        case in 0usize..6,
        fibers in proptest::collection::vec(fiber_strategy(), 4),
    ) {
        let (name, theta) = &flag_cases()[case];
        let rs = RootSystem::new(name.parse::<LieType>().unwrap());
        let flag = Flag::new(FlagSpec::new(&rs, theta).unwrap());
        let asg = Assignment::from_vec(fibers[..flag.num_components().min(4)].to_vec());
        prop_assume!(asg.len() == flag.num_components());
        let v = assignment_verdict(&flag, &asg).unwrap();
        prop_assert_eq!(v, assignment_verdict(&flag, &asg.negated()).unwrap());
        let h = RegularElement::default_for(&flag.spec);
        prop_assert_eq!(v, oracle_integrable(&flag, &asg, &h).unwrap());
        prop_assert_eq!(v, oracle_integrable(&flag, &asg.negated(), &h).unwrap());
    }
}

#[test]
fn verdicts_independent_of_h_and_sign_convention() {
    for (name, theta) in flag_cases() {
        let t: LieType = name.parse().unwrap();
        for conv in [SignConvention::Positive, SignConvention::Negative, SignConvention::Alternating] {
            let rs = RootSystem::with_convention(t, conv);
            let flag = Flag::new(FlagSpec::new(&rs, &theta).unwrap());
            let hs = [
                RegularElement::default_for(&flag.spec),
                RegularElement::powers_of_ten(&flag.spec),
                RegularElement::new(&flag.spec, &vec![qf(1, 3); flag.spec.complement().len()]).unwrap(),
            ];
            for h in &hs {
                let s = sweep_agreement(&flag, h).unwrap();
                assert!(s.disagreements.is_empty(), "{name} {theta:?} {conv:?} {:?}", h.values());
            }
        }
    }
}

#[test]
fn tensor_vanishes_off_sum_triples() {
    let rs = RootSystem::new("B3".parse().unwrap());
    let flag = Flag::new(FlagSpec::new(&rs, &[2]).unwrap());
    let alg = Algebra::new(&rs);
    let h = RegularElement::default_for(&flag.spec);
    let roots = flag.decomposition.roots();
    let mut checked = 0;
    for &a in &roots {
        for &b in &roots {
            for &c in &roots {
                let (ra, rb, rc) = (rs.root(a), rs.root(b), rs.root(c));
                let is_sum = |x: &gcflag::Root, y: &gcflag::Root, z: &gcflag::Root| x.add(y) == *z;
                if is_sum(ra, rb, rc) || is_sum(ra, rc, rb) || is_sum(rb, rc, ra) {
                    continue;
                }
                let t = triple_tensor(&alg, &h, (a, b, c)).unwrap();
                assert!(t.iter().all(|x| *x == gcflag::GaussQ::default()), "{ra} {rb} {rc}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}
