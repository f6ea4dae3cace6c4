//! Small finite groups given by multiplication tables.
//!
//! These are the isotropy groups used to build trivial groupoids `X × X × G`
//! and random test corpora. Elements are indices `0..order`; index 0 is
//! always the identity.

use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<usize>,
    inverse: Vec<usize>,
    order: usize,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table (`table[a * n + b] = a·b`).
    ///
    /// Returns `None` unless index 0 is a two-sided identity, every element
    /// has an inverse and the product is associative.
    pub fn from_table(name: impl Into<String>, order: usize, table: Vec<usize>) -> Option<Self> {
        if order == 0 || table.len() != order * order || table.iter().any(|&c| c >= order) {
            return None;
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            if mul(0, a) != a || mul(a, 0) != a {
                return None;
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return None;
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order).find(|&b| mul(a, b) == 0 && mul(b, a) == 0)?;
            inverse.push(inv);
        }
        Some(Self {
            name: name.into(),
            table,
            inverse,
            order,
        })
    }

    /// Closure of a set of permutations (of `0..degree`) under composition.
    ///
    /// Composition is `(p·q)(i) = p(q(i))`.
    pub fn from_permutations(name: impl Into<String>, degree: usize, generators: &[Vec<usize>]) -> Self {
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for gen in generators {
                let p: Vec<usize> = (0..degree).map(|k| gen[elements[i][k]]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let order = elements.len();
        let mut table = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                let p: Vec<usize> = (0..degree).map(|k| elements[a][elements[b][k]]).collect();
                table[a * order + b] = index[&p];
            }
        }
        Self::from_table(name, order, table).expect("permutation closure is a group")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::from_table(format!("Z{n}"), n, table).expect("cyclic table")
    }

    /// Symmetric group on three letters (order 6).
    pub fn symmetric3() -> Self {
        Self::from_permutations("S3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])
    }

    /// Dihedral group of the regular `n`-gon (order `2n`).
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 3, "dihedral group needs n >= 3");
        let rotation: Vec<usize> = (0..n).map(|k| (k + 1) % n).collect();
        let reflection: Vec<usize> = (0..n).map(|k| (n - k) % n).collect();
        Self::from_permutations(format!("D{n}"), n, &[rotation, reflection])
    }

    /// Quaternion group {±1, ±i, ±j, ±k}.
    pub fn quaternion8() -> Self {
        // units 1, i, j, k as 0..4; product of units -> (sign flip, unit)
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        // element index = unit + 4 * negative
        let mut table = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (flip, unit) = UNIT[a % 4][b % 4];
                let negative = (a >= 4) ^ (b >= 4) ^ flip;
                table[a * 8 + b] = unit + if negative { 4 } else { 0 };
            }
        }
        Self::from_table("Q8", 8, table).expect("quaternion table")
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let order = a.order * b.order;
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let (xa, xb) = (x / b.order, x % b.order);
                let (ya, yb) = (y / b.order, y % b.order);
                table[x * order + y] = a.mul(xa, ya) * b.order + b.mul(xb, yb);
            }
        }
        Self::from_table(format!("{}x{}", a.name, b.name), order, table).expect("product table")
    }

    /// Every group of order at most 8 up to isomorphism.
    pub fn catalog_up_to_order_8() -> Vec<Self> {
        let z2 = Self::cyclic(2);
        vec![
            Self::trivial(),
            Self::cyclic(2),
            Self::cyclic(3),
            Self::cyclic(4),
            Self::direct_product(&z2, &z2),
            Self::cyclic(5),
            Self::cyclic(6),
            Self::symmetric3(),
            Self::cyclic(7),
            Self::cyclic(8),
            Self::direct_product(&Self::cyclic(4), &z2),
            Self::direct_product(&Self::direct_product(&z2, &z2), &z2),
            Self::dihedral(4),
            Self::quaternion8(),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Subgroup generated by `generators`.
    pub fn generated_subgroup(&self, generators: &[usize]) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([0]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &g in generators {
                let p = self.mul(a, g);
                if set.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        set
    }
}
