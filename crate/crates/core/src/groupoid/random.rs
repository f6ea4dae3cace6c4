//! Seeded generator of `(groupoid, subgroupoid)` pairs.
//!
//! Groupoids are trivial groupoids `X × X × G` with `G` drawn from the
//! catalogue of groups of order at most 8; subgroupoids are closures of a few
//! random arrow seeds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FiniteGroup, FiniteGroupoid, Subgroupoid};

/// Deterministic stream of random groupoid samples.
pub struct GroupoidSampler {
    rng: ChaCha8Rng,
    catalog: Vec<FiniteGroup>,
    max_objects: usize,
}

/// One sample: the ambient groupoid, the group it was built from and a
/// subgroupoid over the full base.
pub struct GroupoidSample {
    pub groupoid: FiniteGroupoid,
    pub group: FiniteGroup,
    pub sub: Subgroupoid,
}

impl GroupoidSampler {
    pub fn new(seed: u64, max_objects: usize) -> Self {
        assert!(max_objects >= 1);
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            catalog: FiniteGroup::catalog_up_to_order_8(),
            max_objects,
        }
    }

    fn groupoid(&mut self) -> (FiniteGroupoid, FiniteGroup) {
        let group = self.catalog.choose(&mut self.rng).expect("catalog").clone();
        let k = self.rng.gen_range(1..=self.max_objects);
        let names: Vec<String> = (0..k).map(|i| format!("o{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        (FiniteGroupoid::trivial(&refs, &group), group)
    }

    /// Random arrow-seed closure that connects every object to object 0,
    /// hence transitive over the full base.
    pub fn transitive(&mut self) -> GroupoidSample {
        let (groupoid, group) = self.groupoid();
        let k = groupoid.object_count();
        let mut seeds = Vec::new();
        for y in 1..k {
            let candidates: Vec<usize> = (0..groupoid.arrow_count())
                .filter(|&a| groupoid.source(a) == 0 && groupoid.target(a) == y)
                .collect();
            seeds.push(*candidates.choose(&mut self.rng).expect("arrow 0 -> y"));
        }
        let loops = groupoid.isotropy_group(0).expect("object 0");
        let extra = self.rng.gen_range(0..=2);
        for _ in 0..extra {
            seeds.push(*loops.choose(&mut self.rng).expect("identity loop"));
        }
        let sub = groupoid.closure(0..k, seeds);
        GroupoidSample { groupoid, group, sub }
    }

    /// Random arrow-seed closure over the full base, not necessarily transitive.
    pub fn arbitrary(&mut self) -> GroupoidSample {
        let (groupoid, group) = self.groupoid();
        let k = groupoid.object_count();
        let count = self.rng.gen_range(0..=k + 1);
        let seeds: Vec<usize> = (0..count)
            .map(|_| self.rng.gen_range(0..groupoid.arrow_count()))
            .collect();
        let sub = groupoid.closure(0..k, seeds);
        GroupoidSample { groupoid, group, sub }
    }
}
