use gcflag::flagdecomp::{Flag, FlagSpec};
use gcflag::nijenhuis::{sweep_agreement, RegularElement};
use gcflag::rootsys::{Family, LieType, RootSystem};

fn check(family: Family, rank: usize, theta: &[usize]) {
    let rs = RootSystem::new(LieType::new(family, rank).unwrap());
    let flag = Flag::new(FlagSpec::new(&rs, theta).unwrap());
    let h = RegularElement::default_for(&flag.spec);
    let s = sweep_agreement(&flag, &h).unwrap();
    assert!(
        s.disagreements.is_empty(),
        "{family}{rank} {theta:?}: {} of {} disagree, first {:?}",
        s.disagreements.len(),
        s.assignments,
        s.disagreements.first()
    );
}

#[test]
fn a2_full() {
    check(Family::A, 2, &[]);
}

#[test]
fn b2_full() {
    check(Family::B, 2, &[]);
}

#[test]
fn b2_theta_long() {
    check(Family::B, 2, &[0]);
}

#[test]
fn g2_full() {
    check(Family::G, 2, &[]);
}

#[test]
fn b3_theta_alpha3() {
    check(Family::B, 3, &[2]);
}

#[test]
fn a3_sigma_minus_theta_alpha1_alpha2() {
    check(Family::A, 3, &[2]);
}
