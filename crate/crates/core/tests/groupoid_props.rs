mod common;

use std::collections::BTreeSet;

use morpho_core::groupoid::io::{parse_groupoid, parse_subgroupoid, subgroupoid_to_json, groupoid_to_json};
use morpho_core::groupoid::random::GroupoidSampler;
use morpho_core::groupoid::{
    counterexample, is_normal_subgroupoid, normality_witness, normalizoid, normalizoid_failure, FiniteGroup,
    FiniteGroupoid, NormalizoidFailure, Subgroupoid,
};

#[test]
fn orbits_and_isotropy_examples() {
    let pair = FiniteGroupoid::pair(&["a", "b", "c"]);
    assert_eq!(pair.orbits(), vec![vec![0, 1, 2]]);
    assert!(pair.is_transitive());
    assert_eq!(pair.isotropy_group(1).unwrap(), vec![pair.identity(1)]);

    let union = FiniteGroupoid::pair(&["a", "b"]).disjoint_union(&FiniteGroupoid::pair(&["c"])).unwrap();
    assert!(union.validate().is_empty());
    assert_eq!(union.orbits(), vec![vec![0, 1], vec![2]]);
    assert!(pair.isotropy_group(7).is_err());

    let (g, h) = counterexample();
    let sub = h.to_groupoid(&g);
    assert!(sub.validate().is_empty());
    assert_eq!(sub.orbits(), vec![vec![0], vec![1]]);
    assert!(!sub.is_transitive());
    assert_eq!(sub.isotropy_group(1).unwrap().len(), 1);
    assert_eq!(sub.isotropy_group(0).unwrap().len(), 6);
}

#[test]
fn counterexample_is_not_normal() {
    let (g, h) = counterexample();
    assert_eq!(g.arrow_count(), 24);
    assert_eq!(h.len(), 7);
    assert!(!is_normal_subgroupoid(&g, &h));
    let w = normality_witness(&g, &h).unwrap();
    assert_eq!(g.source(w.g), g.source(w.h));
    assert!(h.contains(w.h) && !h.contains(w.conjugate));
    let gh = g.compose(w.g, w.h).unwrap();
    assert_eq!(g.compose(gh, g.inverse(w.g)), Some(w.conjugate));
}

#[test]
fn counterexample_normalizoid() {
    let (g, h) = counterexample();
    let n = normalizoid(&g, &h);
    assert_eq!(n.len(), 12);
    assert_eq!(n.defect(&g), None);
    assert!(!n.to_groupoid(&g).is_transitive());
    // every arrow of N is a loop
    assert!(n.arrows.iter().all(|&a| g.source(a) == g.target(a)));
}

#[test]
fn one_sided_condition_is_not_inverse_closed() {
    let (g, h) = counterexample();
    let one_sided: BTreeSet<usize> = (0..g.arrow_count())
        .filter(|&a| {
            h.isotropy(&g, g.source(a))
                .into_iter()
                .all(|l| h.contains(g.conjugate(a, l).unwrap()))
        })
        .collect();
    assert_eq!(one_sided.len(), 18);
    assert!(one_sided.iter().any(|&a| !one_sided.contains(&g.inverse(a))));
}

#[test]
fn trivial_cases() {
    let g = FiniteGroupoid::trivial(&["p", "q", "r"], &FiniteGroup::dihedral(4));
    let full = g.full_subgroupoid();
    assert_eq!(normalizoid(&g, &full), full);
    let ids = g.closure(0..3, []);
    assert_eq!(ids.len(), 3);
    assert!(is_normal_subgroupoid(&g, &ids));
}

fn check_normalizoid(g: &FiniteGroupoid, group: &FiniteGroup, h: &Subgroupoid) {
    let n = normalizoid(g, h);
    assert_eq!(n.defect(g), None, "normalizoid is a subgroupoid");
    assert!(h.arrows.is_subset(&n.arrows));
    // H is normal inside N
    for &a in &n.arrows {
        for l in h.isotropy(g, g.source(a)) {
            assert!(h.contains(g.conjugate(a, l).unwrap()));
        }
    }
    // every excluded arrow carries a genuine witness
    for a in 0..g.arrow_count() {
        if n.contains(a) {
            continue;
        }
        match normalizoid_failure(g, h, a).expect("excluded arrow has a witness") {
            NormalizoidFailure::OffBase => unreachable!("full base"),
            NormalizoidFailure::Forward(w) | NormalizoidFailure::Backward(w) => {
                assert!(h.contains(w.h) && !h.contains(w.conjugate));
                assert_eq!(g.conjugate(w.g, w.h), Some(w.conjugate));
            }
        }
    }
    // isotropy of N is the normalizer of the isotropy of H
    for x in 0..g.object_count() {
        let hx = common::isotropy_elements(g, h, x);
        assert_eq!(common::isotropy_elements(g, &n, x), common::normalizer(group, &hx));
    }
}

#[test]
fn normalizoid_properties_on_random_pairs() {
    let mut sampler = GroupoidSampler::new(2024, 6);
    for _ in 0..150 {
        let s = sampler.arbitrary();
        check_normalizoid(&s.groupoid, &s.group, &s.sub);
    }
    for _ in 0..150 {
        let s = sampler.transitive();
        check_normalizoid(&s.groupoid, &s.group, &s.sub);
    }
}

#[test]
fn transitive_normality_iff_isotropy_normal() {
    let mut sampler = GroupoidSampler::new(99, 6);
    let (mut normal, mut not_normal) = (0, 0);
    for _ in 0..300 {
        let s = sampler.transitive();
        assert!(s.sub.to_groupoid(&s.groupoid).is_transitive());
        let oracle = (0..s.groupoid.object_count())
            .all(|x| common::is_normal_subgroup(&s.group, &common::isotropy_elements(&s.groupoid, &s.sub, x)));
        assert_eq!(is_normal_subgroupoid(&s.groupoid, &s.sub), oracle);
        if oracle {
            normal += 1;
        } else {
            not_normal += 1;
        }
    }
    assert!(normal > 0 && not_normal >= 5, "{normal} / {not_normal}");
}

#[test]
fn json_round_trip() {
    let (g, h) = counterexample();
    let g2 = parse_groupoid(&groupoid_to_json(&g)).unwrap();
    assert_eq!(g2.arrow_count(), g.arrow_count());
    assert!(g2.validate().is_empty());
    let h2 = parse_subgroupoid(&subgroupoid_to_json(&g, &h), &g2).unwrap();
    assert_eq!(normalizoid(&g2, &h2).len(), 12);
    assert!(!is_normal_subgroupoid(&g2, &h2));
}
