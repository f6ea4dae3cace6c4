//! Exact algebra of finite groupoids stored as dense composition tables.
//!
//! Conventions: an arrow `g` goes from `source(g)` to `target(g)`, and the
//! product `g·h` is defined exactly when `source(g) = target(h)`, with
//! `source(g·h) = source(h)` and `target(g·h) = target(g)`.
//!
//! Besides the structure maps this module provides orbits, isotropy groups,
//! normality of subgroupoids and the normalizoid, together with the
//! witnesses the CLI reports when a check fails.

mod group;
pub mod io;
pub mod random;

pub use group::FiniteGroup;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub type ObjectId = usize;
pub type ArrowId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("table `{table}` is not index-consistent: {detail}")]
    Inconsistent { table: &'static str, detail: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub source: ObjectId,
    pub target: ObjectId,
}

/// The four axiom families a groupoid table must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// Composition defined exactly on composable pairs, with the right endpoints.
    Composition,
    Associativity,
    Identity,
    Inverse,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Composition => "composition",
            Axiom::Associativity => "associativity",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
        };
        f.write_str(name)
    }
}

/// First failing tuple of one axiom family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub arrows: Vec<ArrowId>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    object_names: Vec<String>,
    arrow_names: Vec<String>,
    arrows: Vec<Arrow>,
    compose: Vec<Option<ArrowId>>,
    identity: Vec<ArrowId>,
    inverse: Vec<ArrowId>,
}

impl FiniteGroupoid {
    /// Assembles a groupoid from raw tables.
    ///
    /// Only index consistency is checked here; the axioms are checked by
    /// [`FiniteGroupoid::validate`].
    pub fn from_tables(
        object_names: Vec<String>,
        arrow_names: Vec<String>,
        arrows: Vec<Arrow>,
        compose: Vec<Option<ArrowId>>,
        identity: Vec<ArrowId>,
        inverse: Vec<ArrowId>,
    ) -> Result<Self, GroupoidError> {
        let n_obj = object_names.len();
        let n = arrows.len();
        let bad = |table, detail: String| Err(GroupoidError::Inconsistent { table, detail });
        if arrow_names.len() != n {
            return bad("arrows", format!("{} names for {n} arrows", arrow_names.len()));
        }
        if let Some(a) = arrows.iter().position(|a| a.source >= n_obj || a.target >= n_obj) {
            return bad("arrows", format!("arrow {a} references a missing object"));
        }
        if compose.len() != n * n {
            return bad("compose", format!("expected {} entries, got {}", n * n, compose.len()));
        }
        if compose.iter().flatten().any(|&c| c >= n) {
            return bad("compose", "entry references a missing arrow".into());
        }
        if identity.len() != n_obj || identity.iter().any(|&e| e >= n) {
            return bad("identity", "one identity arrow per object required".into());
        }
        if inverse.len() != n || inverse.iter().any(|&e| e >= n) {
            return bad("inverse", "one inverse per arrow required".into());
        }
        check_unique(&object_names)?;
        check_unique(&arrow_names)?;
        Ok(Self {
            object_names,
            arrow_names,
            arrows,
            compose,
            identity,
            inverse,
        })
    }

    /// Pair groupoid on `names`: one arrow `(x, y)` from `x` to `y` for every pair.
    pub fn pair(names: &[&str]) -> Self {
        let k = names.len();
        let mut arrow_names = Vec::with_capacity(k * k);
        let mut arrows = Vec::with_capacity(k * k);
        for y in 0..k {
            for x in 0..k {
                arrow_names.push(format!("({},{})", names[x], names[y]));
                arrows.push(Arrow { source: x, target: y });
            }
        }
        let id = |x: usize, y: usize| y * k + x;
        let n = k * k;
        let mut compose = vec![None; n * n];
        for g in 0..n {
            for h in 0..n {
                if arrows[g].source == arrows[h].target {
                    compose[g * n + h] = Some(id(arrows[h].source, arrows[g].target));
                }
            }
        }
        let identity = (0..k).map(|x| id(x, x)).collect();
        let inverse = arrows.iter().map(|a| id(a.target, a.source)).collect();
        Self::from_tables(
            names.iter().map(|s| s.to_string()).collect(),
            arrow_names,
            arrows,
            compose,
            identity,
            inverse,
        )
        .expect("pair groupoid tables are consistent")
    }

    /// Trivial groupoid `X × X × G`: arrows `(y, x, a)` from `x` to `y` with
    /// `(z, y, a)·(y, x, b) = (z, x, a·b)`.
    pub fn trivial(names: &[&str], group: &FiniteGroup) -> Self {
        let k = names.len();
        let m = group.order();
        let id = |x: usize, y: usize, a: usize| (y * k + x) * m + a;
        let n = k * k * m;
        let mut arrow_names = Vec::with_capacity(n);
        let mut arrows = Vec::with_capacity(n);
        for y in 0..k {
            for x in 0..k {
                for a in 0..m {
                    arrow_names.push(format!("{}<-{}:{}", names[y], names[x], a));
                    arrows.push(Arrow { source: x, target: y });
                }
            }
        }
        let elem = |g: usize| g % m;
        let mut compose = vec![None; n * n];
        for g in 0..n {
            for h in 0..n {
                if arrows[g].source == arrows[h].target {
                    let c = id(arrows[h].source, arrows[g].target, group.mul(elem(g), elem(h)));
                    compose[g * n + h] = Some(c);
                }
            }
        }
        let identity = (0..k).map(|x| id(x, x, 0)).collect();
        let inverse = (0..n)
            .map(|g| id(arrows[g].target, arrows[g].source, group.inv(elem(g))))
            .collect();
        Self::from_tables(
            names.iter().map(|s| s.to_string()).collect(),
            arrow_names,
            arrows,
            compose,
            identity,
            inverse,
        )
        .expect("trivial groupoid tables are consistent")
    }

    /// Disjoint union; identifiers of `other` are kept, so they must not clash.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, GroupoidError> {
        let (no, na) = (self.object_count(), self.arrow_count());
        let n = na + other.arrow_count();
        let mut object_names = self.object_names.clone();
        object_names.extend(other.object_names.iter().cloned());
        let mut arrow_names = self.arrow_names.clone();
        arrow_names.extend(other.arrow_names.iter().cloned());
        let mut arrows = self.arrows.clone();
        arrows.extend(other.arrows.iter().map(|a| Arrow {
            source: a.source + no,
            target: a.target + no,
        }));
        let mut compose = vec![None; n * n];
        for g in 0..na {
            for h in 0..na {
                compose[g * n + h] = self.compose(g, h);
            }
        }
        for g in 0..other.arrow_count() {
            for h in 0..other.arrow_count() {
                compose[(g + na) * n + h + na] = other.compose(g, h).map(|c| c + na);
            }
        }
        let mut identity = self.identity.clone();
        identity.extend(other.identity.iter().map(|&e| e + na));
        let mut inverse = self.inverse.clone();
        inverse.extend(other.inverse.iter().map(|&e| e + na));
        Self::from_tables(object_names, arrow_names, arrows, compose, identity, inverse)
    }

    pub fn object_count(&self) -> usize {
        self.object_names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, x: ObjectId) -> &str {
        &self.object_names[x]
    }

    pub fn arrow_name(&self, g: ArrowId) -> &str {
        &self.arrow_names[g]
    }

    pub fn object_names(&self) -> &[String] {
        &self.object_names
    }

    pub fn arrow_names(&self) -> &[String] {
        &self.arrow_names
    }

    pub fn object_id(&self, name: &str) -> Option<ObjectId> {
        self.object_names.iter().position(|n| n == name)
    }

    pub fn arrow_id(&self, name: &str) -> Option<ArrowId> {
        self.arrow_names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn source(&self, g: ArrowId) -> ObjectId {
        self.arrows[g].source
    }

    #[inline]
    pub fn target(&self, g: ArrowId) -> ObjectId {
        self.arrows[g].target
    }

    /// `g·h`, if defined in the table.
    #[inline]
    pub fn compose(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        self.compose[g * self.arrows.len() + h]
    }

    #[inline]
    pub fn identity(&self, x: ObjectId) -> ArrowId {
        self.identity[x]
    }

    #[inline]
    pub fn inverse(&self, g: ArrowId) -> ArrowId {
        self.inverse[g]
    }

    /// `g·h·g⁻¹` for a loop `h` at `source(g)`.
    pub fn conjugate(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        let gh = self.compose(g, h)?;
        self.compose(gh, self.inverse(g))
    }

    /// Checks the groupoid axioms on every applicable tuple and reports the
    /// first violation of each family. An empty list means the table is a
    /// groupoid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.arrow_count();
        let mut out = Vec::new();

        'composition: for g in 0..n {
            for h in 0..n {
                let composable = self.source(g) == self.target(h);
                let detail = match (composable, self.compose(g, h)) {
                    (true, None) => Some("composable pair has no product".to_string()),
                    (false, Some(_)) => Some("product defined on a non-composable pair".to_string()),
                    (true, Some(c)) if self.source(c) != self.source(h) || self.target(c) != self.target(g) => {
                        Some(format!("product `{}` has wrong endpoints", self.arrow_name(c)))
                    }
                    _ => None,
                };
                if let Some(detail) = detail {
                    out.push(Violation {
                        axiom: Axiom::Composition,
                        arrows: vec![g, h],
                        detail,
                    });
                    break 'composition;
                }
            }
        }

        'assoc: for g in 0..n {
            for h in (0..n).filter(|&h| self.source(g) == self.target(h)) {
                for k in (0..n).filter(|&k| self.source(h) == self.target(k)) {
                    let left = self.compose(g, h).and_then(|gh| self.compose(gh, k));
                    let right = self.compose(h, k).and_then(|hk| self.compose(g, hk));
                    if left != right {
                        out.push(Violation {
                            axiom: Axiom::Associativity,
                            arrows: vec![g, h, k],
                            detail: "(g·h)·k differs from g·(h·k)".into(),
                        });
                        break 'assoc;
                    }
                }
            }
        }

        for x in 0..self.object_count() {
            let e = self.identity(x);
            if self.source(e) != x || self.target(e) != x {
                out.push(Violation {
                    axiom: Axiom::Identity,
                    arrows: vec![e],
                    detail: format!("identity of `{}` is not a loop there", self.object_name(x)),
                });
                break;
            }
        }
        if !out.iter().any(|v| v.axiom == Axiom::Identity) {
            for g in 0..n {
                let right = self.compose(g, self.identity(self.source(g)));
                let left = self.compose(self.identity(self.target(g)), g);
                if right != Some(g) || left != Some(g) {
                    out.push(Violation {
                        axiom: Axiom::Identity,
                        arrows: vec![g],
                        detail: "g·ε(source g) = g = ε(target g)·g fails".into(),
                    });
                    break;
                }
            }
        }

        for g in 0..n {
            let inv = self.inverse(g);
            let ok = self.compose(inv, g) == Some(self.identity(self.source(g)))
                && self.compose(g, inv) == Some(self.identity(self.target(g)));
            if !ok {
                out.push(Violation {
                    axiom: Axiom::Inverse,
                    arrows: vec![g, inv],
                    detail: format!("`{}` is not an inverse of `{}`", self.arrow_name(inv), self.arrow_name(g)),
                });
                break;
            }
        }
        out
    }

    /// Partition of the objects into orbits, each block sorted, blocks
    /// ordered by their smallest object.
    pub fn orbits(&self) -> Vec<Vec<ObjectId>> {
        let mut parent: Vec<usize> = (0..self.object_count()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in &self.arrows {
            let (rs, rt) = (find(&mut parent, a.source), find(&mut parent, a.target));
            if rs != rt {
                parent[rs.max(rt)] = rs.min(rt);
            }
        }
        let mut blocks: Vec<Vec<ObjectId>> = Vec::new();
        let mut block_of_root = vec![usize::MAX; self.object_count()];
        for x in 0..self.object_count() {
            let r = find(&mut parent, x);
            if block_of_root[r] == usize::MAX {
                block_of_root[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[block_of_root[r]].push(x);
        }
        blocks
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() <= 1
    }

    /// Arrows with source and target `x`.
    pub fn isotropy_group(&self, x: ObjectId) -> Result<Vec<ArrowId>, GroupoidError> {
        if x >= self.object_count() {
            return Err(GroupoidError::UnknownObject(x.to_string()));
        }
        Ok((0..self.arrow_count())
            .filter(|&g| self.source(g) == x && self.target(g) == x)
            .collect())
    }

    /// The whole groupoid viewed as a subgroupoid of itself.
    pub fn full_subgroupoid(&self) -> Subgroupoid {
        Subgroupoid {
            base: (0..self.object_count()).collect(),
            arrows: (0..self.arrow_count()).collect(),
        }
    }

    /// Smallest subgroupoid over `base` containing `seeds`.
    ///
    /// Endpoints of the seeds are added to the base.
    pub fn closure(&self, base: impl IntoIterator<Item = ObjectId>, seeds: impl IntoIterator<Item = ArrowId>) -> Subgroupoid {
        let mut base: BTreeSet<ObjectId> = base.into_iter().collect();
        let mut arrows: BTreeSet<ArrowId> = BTreeSet::new();
        for g in seeds {
            base.insert(self.source(g));
            base.insert(self.target(g));
            arrows.insert(g);
            arrows.insert(self.inverse(g));
        }
        arrows.extend(base.iter().map(|&x| self.identity(x)));
        loop {
            let current: Vec<ArrowId> = arrows.iter().copied().collect();
            let mut grew = false;
            for &g in &current {
                for &h in &current {
                    if let Some(c) = self.compose(g, h) {
                        grew |= arrows.insert(c);
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Subgroupoid { base, arrows }
    }
}

fn check_unique(names: &[String]) -> Result<(), GroupoidError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(GroupoidError::Duplicate(n.clone()));
        }
    }
    Ok(())
}

/// A subset of objects and arrows of a parent groupoid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subgroupoid {
    pub base: BTreeSet<ObjectId>,
    pub arrows: BTreeSet<ArrowId>,
}

/// Why a candidate subgroupoid fails the subgroupoid conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupoidDefect {
    MissingIdentity(ObjectId),
    EndpointOutsideBase(ArrowId),
    NotInverseClosed(ArrowId),
    NotCompositionClosed(ArrowId, ArrowId),
}

/// A triple `(g, h, g·h·g⁻¹)` with the conjugate outside the subgroupoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjugationWitness {
    pub g: ArrowId,
    pub h: ArrowId,
    pub conjugate: ArrowId,
}

impl Subgroupoid {
    pub fn contains(&self, g: ArrowId) -> bool {
        self.arrows.contains(&g)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// First defect found, or `None` for a bona fide subgroupoid of `parent`.
    pub fn defect(&self, parent: &FiniteGroupoid) -> Option<SubgroupoidDefect> {
        for &x in &self.base {
            if x >= parent.object_count() || !self.contains(parent.identity(x)) {
                return Some(SubgroupoidDefect::MissingIdentity(x));
            }
        }
        for &g in &self.arrows {
            if g >= parent.arrow_count()
                || !self.base.contains(&parent.source(g))
                || !self.base.contains(&parent.target(g))
            {
                return Some(SubgroupoidDefect::EndpointOutsideBase(g));
            }
            if !self.contains(parent.inverse(g)) {
                return Some(SubgroupoidDefect::NotInverseClosed(g));
            }
        }
        for &g in &self.arrows {
            for &h in &self.arrows {
                if let Some(c) = parent.compose(g, h) {
                    if !self.contains(c) {
                        return Some(SubgroupoidDefect::NotCompositionClosed(g, h));
                    }
                }
            }
        }
        None
    }

    /// Loops of the subgroupoid at `x`.
    pub fn isotropy(&self, parent: &FiniteGroupoid, x: ObjectId) -> BTreeSet<ArrowId> {
        self.arrows
            .iter()
            .copied()
            .filter(|&g| parent.source(g) == x && parent.target(g) == x)
            .collect()
    }

    /// Re-materializes the subgroupoid as a standalone groupoid, keeping the
    /// parent's identifiers. The subgroupoid must be valid.
    pub fn to_groupoid(&self, parent: &FiniteGroupoid) -> FiniteGroupoid {
        let objects: Vec<ObjectId> = self.base.iter().copied().collect();
        let arrows: Vec<ArrowId> = self.arrows.iter().copied().collect();
        let obj_index = |x: ObjectId| objects.binary_search(&x).expect("endpoint in base");
        let arr_index = |g: ArrowId| arrows.binary_search(&g).expect("arrow in subgroupoid");
        let n = arrows.len();
        let mut compose = vec![None; n * n];
        for (i, &g) in arrows.iter().enumerate() {
            for (j, &h) in arrows.iter().enumerate() {
                compose[i * n + j] = parent.compose(g, h).map(arr_index);
            }
        }
        FiniteGroupoid::from_tables(
            objects.iter().map(|&x| parent.object_name(x).to_string()).collect(),
            arrows.iter().map(|&g| parent.arrow_name(g).to_string()).collect(),
            arrows
                .iter()
                .map(|&g| Arrow {
                    source: obj_index(parent.source(g)),
                    target: obj_index(parent.target(g)),
                })
                .collect(),
            compose,
            objects.iter().map(|&x| arr_index(parent.identity(x))).collect(),
            arrows.iter().map(|&g| arr_index(parent.inverse(g))).collect(),
        )
        .expect("restriction of a valid subgroupoid is index-consistent")
    }
}

/// First `(g, h, g·h·g⁻¹)` with `h ∈ H` a loop at `source(g)` and the
/// conjugate outside `H`. `None` means `H` is normal in `G`.
pub fn normality_witness(parent: &FiniteGroupoid, sub: &Subgroupoid) -> Option<ConjugationWitness> {
    for g in 0..parent.arrow_count() {
        let x = parent.source(g);
        if !sub.base.contains(&x) {
            continue;
        }
        for h in sub.isotropy(parent, x) {
            let conjugate = parent.conjugate(g, h).expect("loop at source is composable");
            if !sub.contains(conjugate) {
                return Some(ConjugationWitness { g, h, conjugate });
            }
        }
    }
    None
}

/// `H` is normal in `G` when conjugating any loop of `H` by any arrow of `G`
/// leaving its base point lands back in `H`.
pub fn is_normal_subgroupoid(parent: &FiniteGroupoid, sub: &Subgroupoid) -> bool {
    normality_witness(parent, sub).is_none()
}

/// Whether `g` conjugates the isotropy of `H` at its source exactly onto the
/// isotropy of `H` at its target.
pub fn conjugates_isotropy_onto(parent: &FiniteGroupoid, sub: &Subgroupoid, g: ArrowId) -> bool {
    normalizoid_failure(parent, sub, g).is_none()
}

/// Reason an arrow `g` is excluded from the normalizoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizoidFailure {
    /// Source or target of `g` is outside the base of `H`.
    OffBase,
    /// `h ∈ H` at `source(g)` with `g·h·g⁻¹ ∉ H`.
    Forward(ConjugationWitness),
    /// `h ∈ H` at `target(g)` with `g⁻¹·h·g ∉ H`.
    Backward(ConjugationWitness),
}

/// `None` when `g·H(source g)·g⁻¹ = H(target g)`; otherwise a witness loop.
pub fn normalizoid_failure(parent: &FiniteGroupoid, sub: &Subgroupoid, g: ArrowId) -> Option<NormalizoidFailure> {
    let (x, y) = (parent.source(g), parent.target(g));
    if !sub.base.contains(&x) || !sub.base.contains(&y) {
        return Some(NormalizoidFailure::OffBase);
    }
    for h in sub.isotropy(parent, x) {
        let c = parent.conjugate(g, h).expect("composable");
        if !sub.contains(c) {
            return Some(NormalizoidFailure::Forward(ConjugationWitness { g, h, conjugate: c }));
        }
    }
    let g_inv = parent.inverse(g);
    for h in sub.isotropy(parent, y) {
        let c = parent.conjugate(g_inv, h).expect("composable");
        if !sub.contains(c) {
            return Some(NormalizoidFailure::Backward(ConjugationWitness { g: g_inv, h, conjugate: c }));
        }
    }
    None
}

/// Largest subgroupoid of `G` over the base of `H` in which `H` is normal:
/// all arrows `g` with `g·H(source g)·g⁻¹ = H(target g)`.
pub fn normalizoid(parent: &FiniteGroupoid, sub: &Subgroupoid) -> Subgroupoid {
    let arrows = (0..parent.arrow_count())
        .filter(|&g| conjugates_isotropy_onto(parent, sub, g))
        .collect();
    Subgroupoid {
        base: sub.base.clone(),
        arrows,
    }
}

/// The two-object counterexample: `G = {x,y} × {x,y} × S3` and `H` equal to
/// the whole of `S3` at `x`, the identity at `y`, and no arrows between them.
pub fn counterexample() -> (FiniteGroupoid, Subgroupoid) {
    let g = FiniteGroupoid::trivial(&["x", "y"], &FiniteGroup::symmetric3());
    let x_loops = g.isotropy_group(0).expect("object x");
    let h = g.closure([0, 1], x_loops);
    (g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> FiniteGroupoid {
        FiniteGroupoid::pair(&["a", "b", "c"])
    }

    #[test]
    fn pair_groupoid_is_valid() {
        let g = abc();
        assert_eq!(g.arrow_count(), 9);
        assert!(g.validate().is_empty());
        let ca = g.arrow_id("(c,b)").unwrap();
        let ac = g.arrow_id("(a,c)").unwrap();
        assert_eq!(g.arrow_name(g.compose(ca, ac).unwrap()), "(a,b)");
    }

    #[test]
    fn trivial_groupoid_with_s3_is_valid() {
        let g = FiniteGroupoid::trivial(&["x", "y"], &FiniteGroup::symmetric3());
        assert_eq!(g.arrow_count(), 24);
        assert!(g.validate().is_empty());
        assert!(g.is_transitive());
        assert_eq!(g.isotropy_group(1).unwrap().len(), 6);
    }

    #[test]
    fn corrupted_inverse_is_reported() {
        let g = abc();
        let mut inverse = g.inverse.clone();
        let ab = g.arrow_id("(a,b)").unwrap();
        inverse[ab] = g.arrow_id("(a,c)").unwrap();
        let bad = FiniteGroupoid::from_tables(
            g.object_names.clone(),
            g.arrow_names.clone(),
            g.arrows.clone(),
            g.compose.clone(),
            g.identity.clone(),
            inverse,
        )
        .unwrap();
        let violations = bad.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].axiom, Axiom::Inverse);
        assert_eq!(violations[0].arrows[0], ab);
    }

    #[test]
    fn corrupted_product_breaks_composition_or_associativity() {
        let g = abc();
        let mut compose = g.compose.clone();
        let n = g.arrow_count();
        let (ab, ba) = (g.arrow_id("(a,b)").unwrap(), g.arrow_id("(b,a)").unwrap());
        compose[ba * n + ab] = Some(g.arrow_id("(a,c)").unwrap());
        let bad = FiniteGroupoid::from_tables(
            g.object_names.clone(),
            g.arrow_names.clone(),
            g.arrows.clone(),
            compose,
            g.identity.clone(),
            g.inverse.clone(),
        )
        .unwrap();
        let axioms: Vec<Axiom> = bad.validate().into_iter().map(|v| v.axiom).collect();
        assert!(axioms.contains(&Axiom::Composition));
    }

    #[test]
    fn index_inconsistent_tables_are_rejected() {
        let err = FiniteGroupoid::from_tables(
            vec!["x".into()],
            vec!["e".into()],
            vec![Arrow { source: 0, target: 1 }],
            vec![Some(0)],
            vec![0],
            vec![0],
        )
        .unwrap_err();
        assert!(matches!(err, GroupoidError::Inconsistent { table: "arrows", .. }));
    }

    #[test]
    fn orbits_of_unions_and_pairs() {
        assert_eq!(abc().orbits(), vec![vec![0, 1, 2]]);
        let u = FiniteGroupoid::pair(&["a", "b"])
            .disjoint_union(&FiniteGroupoid::pair(&["c"]))
            .unwrap();
        assert!(u.validate().is_empty());
        assert_eq!(u.orbits(), vec![vec![0, 1], vec![2]]);
        assert!(!u.is_transitive());
    }

    #[test]
    fn pair_isotropy_is_identity() {
        let g = abc();
        for x in 0..3 {
            assert_eq!(g.isotropy_group(x).unwrap(), vec![g.identity(x)]);
        }
        assert!(matches!(g.isotropy_group(7), Err(GroupoidError::UnknownObject(_))));
    }

    #[test]
    fn counterexample_structure() {
        let (g, h) = counterexample();
        assert!(h.defect(&g).is_none());
        assert_eq!(h.len(), 7);
        let restricted = h.to_groupoid(&g);
        assert!(restricted.validate().is_empty());
        assert_eq!(restricted.orbits(), vec![vec![0], vec![1]]);
        assert!(!restricted.is_transitive());
        let y_iso = restricted.isotropy_group(1).unwrap();
        assert_eq!(y_iso, vec![restricted.identity(1)]);
    }

    #[test]
    fn counterexample_is_not_normal() {
        let (g, h) = counterexample();
        let w = normality_witness(&g, &h).expect("not normal");
        assert!(h.contains(w.h));
        assert!(!h.contains(w.conjugate));
        assert_eq!(g.conjugate(w.g, w.h), Some(w.conjugate));
        assert!(!is_normal_subgroupoid(&g, &h));
    }

    #[test]
    fn identities_are_normal() {
        let g = FiniteGroupoid::trivial(&["x", "y", "z"], &FiniteGroup::dihedral(4));
        let ids = g.closure(0..3, std::iter::empty());
        assert_eq!(ids.len(), 3);
        assert!(is_normal_subgroupoid(&g, &ids));
    }

    #[test]
    fn counterexample_normalizoid() {
        let (g, h) = counterexample();
        let n = normalizoid(&g, &h);
        assert_eq!(n.len(), 12);
        assert!(n.defect(&g).is_none());
        assert!(!n.to_groupoid(&g).is_transitive());
        // the one-sided containment form keeps the arrows y -> x only
        let one_sided: Vec<ArrowId> = (0..g.arrow_count())
            .filter(|&a| {
                h.isotropy(&g, g.source(a))
                    .into_iter()
                    .all(|l| h.contains(g.conjugate(a, l).unwrap()))
            })
            .collect();
        assert_eq!(one_sided.len(), 18);
        let sub = Subgroupoid {
            base: h.base.clone(),
            arrows: one_sided.into_iter().collect(),
        };
        assert!(matches!(sub.defect(&g), Some(SubgroupoidDefect::NotInverseClosed(_))));
    }

    #[test]
    fn self_normalizing() {
        let g = FiniteGroupoid::trivial(&["x", "y"], &FiniteGroup::quaternion8());
        let full = g.full_subgroupoid();
        assert_eq!(normalizoid(&g, &full), full);
    }

    #[test]
    fn excluded_arrows_have_witnesses() {
        let (g, h) = counterexample();
        let n = normalizoid(&g, &h);
        for a in 0..g.arrow_count() {
            assert_eq!(n.contains(a), normalizoid_failure(&g, &h, a).is_none());
        }
    }
}
