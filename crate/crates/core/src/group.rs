//! Permutation groups backed by a base and strong generating set.
//!
//! The chain is built by the deterministic incremental Schreier–Sims
//! algorithm: every Schreier generator of every level is sifted, so the
//! resulting chain is complete and `order()` is exact.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{Permutation, Point};

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Level {
    base_point: Point,
    gens: Vec<Permutation>,
    orbit: Vec<Point>,
    /// position of a point in `orbit`, or `ABSENT`
    slot: Vec<u32>,
    /// `reps[k]` maps the base point to `orbit[k]`
    reps: Vec<Permutation>,
    reps_inv: Vec<Permutation>,
}

impl Level {
    fn new(degree: usize, base_point: Point) -> Self {
        let mut slot = vec![ABSENT; degree];
        slot[base_point as usize] = 0;
        Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            slot,
            reps: vec![Permutation::identity(degree)],
            reps_inv: vec![Permutation::identity(degree)],
        }
    }

    #[inline]
    fn slot_of(&self, p: Point) -> Option<usize> {
        match self.slot[p as usize] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    /// Builds the stabiliser chain of `<gens>`. An empty list gives the
    /// trivial group.
    pub fn new(degree: usize, gens: &[Permutation]) -> Result<Self> {
        Self::with_base_prefix(degree, gens, &[])
    }

    /// As [`PermGroup::new`], but the base begins with `prefix` (levels with
    /// trivial basic orbits are kept so the base is exactly an extension).
    pub fn with_base_prefix(degree: usize, gens: &[Permutation], prefix: &[Point]) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        let mut group = PermGroup {
            degree,
            generators: Vec::new(),
            levels: prefix.iter().map(|&b| Level::new(degree, b)).collect(),
        };
        for g in gens {
            group.generators.push(g.clone());
            group.extend(0, g.clone());
        }
        Ok(group)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            levels: Vec::new(),
        }
    }

    fn extend(&mut self, level: usize, g: Permutation) {
        if self.sift_from(level, &g).0.is_identity() {
            return;
        }
        if level == self.levels.len() {
            let b = g.first_moved().expect("non-identity after failed sift");
            self.levels.push(Level::new(self.degree, b));
        }
        self.levels[level].gens.push(g.clone());

        let mut queue = VecDeque::new();
        let existing = self.levels[level].orbit.len();
        for k in 0..existing {
            self.process(level, k, &g, &mut queue);
        }
        while let Some(k) = queue.pop_front() {
            let gens = self.levels[level].gens.clone();
            for s in &gens {
                self.process(level, k, s, &mut queue);
            }
        }
    }

    fn process(&mut self, level: usize, k: usize, s: &Permutation, queue: &mut VecDeque<usize>) {
        let lv = &self.levels[level];
        let p = lv.orbit[k];
        let q = s.apply(p);
        match lv.slot_of(q) {
            Some(j) => {
                let schreier = lv.reps[k].then(s).then(&lv.reps_inv[j]);
                if !schreier.is_identity() {
                    self.extend(level + 1, schreier);
                }
            }
            None => {
                let rep = lv.reps[k].then(s);
                let inv = rep.inverse();
                let lv = &mut self.levels[level];
                lv.slot[q as usize] = lv.orbit.len() as u32;
                lv.orbit.push(q);
                lv.reps.push(rep);
                lv.reps_inv.push(inv);
                queue.push_back(lv.orbit.len() - 1);
            }
        }
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// where sifting stopped (== number of levels when it went through).
    fn sift_from(&self, from: usize, g: &Permutation) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, lv) in self.levels.iter().enumerate().skip(from) {
            let p = h.apply(lv.base_point);
            match lv.slot_of(p) {
                Some(k) => h = h.then(&lv.reps_inv[k]),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn base(&self) -> Vec<Point> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = Vec::new();
        for lv in &self.levels {
            for g in &lv.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn basic_orbits(&self) -> Vec<&[Point]> {
        self.levels.iter().map(|l| l.orbit.as_slice()).collect()
    }

    pub fn basic_orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Transversal element of `level` mapping the base point to `point`.
    pub fn transversal(&self, level: usize, point: Point) -> Option<&Permutation> {
        let lv = &self.levels[level];
        lv.slot_of(point).map(|k| &lv.reps[k])
    }

    pub(crate) fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub(crate) fn level_orbit(&self, level: usize) -> &[Point] {
        &self.levels[level].orbit
    }

    pub(crate) fn level_rep(&self, level: usize, k: usize) -> &Permutation {
        &self.levels[level].reps[k]
    }

    /// Mixed-radix position of `p` in the transversal decomposition, in
    /// `0..order`; `None` if `p` is not in the group.
    pub fn rank(&self, p: &Permutation) -> Option<u64> {
        let mut h = p.clone();
        let mut rank = 0u64;
        let mut radix = 1u64;
        for lv in &self.levels {
            let k = lv.slot_of(h.apply(lv.base_point))?;
            h = h.then(&lv.reps_inv[k]);
            rank += k as u64 * radix;
            radix *= lv.orbit.len() as u64;
        }
        h.is_identity().then_some(rank)
    }

    /// Inverse of [`PermGroup::rank`].
    pub fn unrank(&self, mut rank: u64) -> Permutation {
        let mut digits = Vec::with_capacity(self.levels.len());
        for lv in &self.levels {
            let len = lv.orbit.len() as u64;
            digits.push((rank % len) as usize);
            rank /= len;
        }
        let mut g = self.identity();
        for (lv, &k) in self.levels.iter().zip(&digits).rev() {
            g = g.then(&lv.reps[k]);
        }
        g
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Order as `u64` when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: p.degree(),
            });
        }
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &Permutation) -> bool {
        let (residue, _) = self.sift_from(0, p);
        residue.is_identity()
    }

    /// Uniform random element: a product of uniformly chosen transversal
    /// elements, one per level.
    pub fn random_element_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = self.identity();
        for lv in self.levels.iter().rev() {
            let k = rng.gen_range(0..lv.orbit.len());
            g = g.then(&lv.reps[k]);
        }
        g
    }

    pub fn random_element(&self, seed: u64) -> Permutation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_element_with(&mut rng)
    }

    /// Every element exactly once, as transversal products.
    pub fn elements(&self, cap: u64) -> Result<Elements<'_>> {
        let order = self.order();
        match order.to_u64() {
            Some(o) if o <= cap => Ok(Elements::new(self, o)),
            _ => Err(Error::OrderExceedsCap {
                order: order.to_string(),
                cap,
            }),
        }
    }

    pub fn orbit(&self, point: Point) -> Vec<Point> {
        orbit_under(self.degree, &self.generators, point)
    }

    pub fn orbits(&self) -> Vec<Vec<Point>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if !seen[p] {
                let o = self.orbit(p as Point);
                for &q in &o {
                    seen[q as usize] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// `<gens>` as a subgroup; fails if some generator is not in `self`.
    pub fn subgroup(&self, gens: &[Permutation]) -> Result<PermGroup> {
        for g in gens {
            if !self.contains(g)? {
                return Err(Error::NotASubgroup(format!("{g} is not an element of the group")));
            }
        }
        PermGroup::new(self.degree, gens)
    }

    /// Smallest subgroup containing `gens` and normalised by `self`.
    pub fn normal_closure(&self, gens: &[Permutation]) -> PermGroup {
        let mut closure = PermGroup::new(self.degree, gens).expect("degrees checked by caller");
        let mut pending: Vec<Permutation> = gens.to_vec();
        while let Some(n) = pending.pop() {
            for g in &self.generators {
                let c = n.conjugate_by(g);
                if !closure.contains_unchecked(&c) {
                    closure.generators.push(c.clone());
                    closure.extend(0, c.clone());
                    pending.push(c);
                }
            }
        }
        closure
    }

    /// `[G, G]`, the normal closure of commutators of generators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.inverse().then(&b.inverse()).then(a).then(b);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// Derived series terminates in the trivial group (checked up to 64 steps).
    pub fn is_soluble(&self) -> bool {
        let mut current = self.clone();
        for _ in 0..64 {
            if current.is_trivial() {
                return true;
            }
            let next = current.derived_subgroup();
            if next.order() == current.order() {
                return false;
            }
            current = next;
        }
        current.is_trivial()
    }

    /// Pointwise stabiliser of `point`, from the chain with `point` first.
    pub fn stabilizer(&self, point: Point) -> PermGroup {
        let g = PermGroup::with_base_prefix(self.degree, &self.generators, &[point])
            .expect("degrees already validated");
        let gens: Vec<Permutation> = g.levels.iter().skip(1).flat_map(|l| l.gens.clone()).collect();
        PermGroup::new(self.degree, &gens).expect("degrees already validated")
    }
}

pub(crate) fn orbit_under(degree: usize, gens: &[Permutation], point: Point) -> Vec<Point> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut orbit = vec![point];
    let mut k = 0;
    while k < orbit.len() {
        let p = orbit[k];
        for g in gens {
            let q = g.apply(p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                orbit.push(q);
            }
        }
        k += 1;
    }
    orbit
}

/// Iterator over all elements of a group, see [`PermGroup::elements`].
pub struct Elements<'a> {
    group: &'a PermGroup,
    digits: Vec<usize>,
    /// `partial[i]` = product of the chosen transversal elements of levels `i..`
    partial: Vec<Permutation>,
    remaining: u64,
}

impl<'a> Elements<'a> {
    fn new(group: &'a PermGroup, order: u64) -> Self {
        let m = group.levels.len();
        let mut partial = vec![group.identity(); m + 1];
        for i in (0..m).rev() {
            partial[i] = partial[i + 1].then(&group.levels[i].reps[0]);
        }
        Elements {
            group,
            digits: vec![0; m],
            partial,
            remaining: order,
        }
    }
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.partial[0].clone();
        if self.remaining > 0 {
            let levels = &self.group.levels;
            let mut i = 0;
            while i < levels.len() {
                self.digits[i] += 1;
                if self.digits[i] < levels[i].orbit.len() {
                    break;
                }
                self.digits[i] = 0;
                i += 1;
            }
            for j in (0..=i.min(levels.len() - 1)).rev() {
                self.partial[j] = self.partial[j + 1].then(&levels[j].reps[self.digits[j]]);
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse(n, s).unwrap()
    }

    fn a5() -> PermGroup {
        PermGroup::new(5, &[p(5, "(1,2,3,4,5)"), p(5, "(1,2,3)")]).unwrap()
    }

    fn m11() -> PermGroup {
        PermGroup::new(
            11,
            &[p(11, "(1,2,3,4,5,6,7,8,9,10,11)"), p(11, "(3,7,11,8)(4,10,5,6)")],
        )
        .unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(a5().order(), BigUint::from(60u32));
        assert_eq!(m11().order(), BigUint::from(7920u32));
        assert_eq!(PermGroup::new(5, &[]).unwrap().order(), BigUint::one());
        assert_eq!(PermGroup::new(0, &[]).unwrap().order(), BigUint::one());
        let s7 = PermGroup::new(7, &[p(7, "(1,2,3,4,5,6,7)"), p(7, "(1,2)")]).unwrap();
        assert_eq!(s7.order(), BigUint::from(5040u32));
    }

    #[test]
    fn m11_order_by_closure() {
        // Independent check: naive closure of the generated set.
        let g = m11();
        let gens = g.generators().to_vec();
        let mut seen: HashSet<Permutation> = HashSet::new();
        let id = Permutation::identity(11);
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = x.then(s);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(seen.len(), 7920);
    }

    #[test]
    fn membership() {
        let g = a5();
        assert!(g.contains(&p(5, "(1,2,3)")).unwrap());
        assert!(!g.contains(&p(5, "(1,2)")).unwrap());
        assert!(g.contains(&Permutation::identity(5)).unwrap());
        assert!(g.contains(&Permutation::identity(4)).is_err());
        let m = m11();
        let x = m.generators()[0].then(&m.generators()[1]).then(&m.generators()[1]);
        assert!(m.contains(&x).unwrap());
        for s in m.strong_generators() {
            assert!(m.contains(&s).unwrap());
        }
    }

    #[test]
    fn enumeration() {
        let s4 = PermGroup::new(4, &[p(4, "(1,2,3,4)"), p(4, "(1,2)")]).unwrap();
        let all: HashSet<Permutation> = s4.elements(100).unwrap().collect();
        assert_eq!(all.len(), 24);
        let m = m11();
        let mut count = 0;
        let mut distinct = HashSet::new();
        for x in m.elements(10_000_000).unwrap() {
            assert!(m.contains(&x).unwrap());
            distinct.insert(x);
            count += 1;
        }
        assert_eq!(count, 7920);
        assert_eq!(distinct.len(), 7920);
        let trivial = PermGroup::new(3, &[]).unwrap();
        assert_eq!(trivial.elements(1).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_cap() {
        let m12 = PermGroup::new(
            12,
            &[
                p(12, "(1,2,3,4,5,6,7,8,9,10,11)"),
                p(12, "(3,7,11,8)(4,10,5,6)"),
                p(12, "(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)"),
            ],
        )
        .unwrap();
        assert_eq!(m12.order(), BigUint::from(95040u32));
        assert!(matches!(m12.elements(1000), Err(Error::OrderExceedsCap { .. })));
    }

    #[test]
    fn random_elements() {
        let trivial = PermGroup::new(4, &[]).unwrap();
        assert!(trivial.random_element(9).is_identity());
        let g = m11();
        assert_eq!(g.random_element(42), g.random_element(42));
        assert!(g.contains(&g.random_element(7)).unwrap());
    }

    #[test]
    fn random_sampling_is_uniform_on_s3() {
        let s3 = PermGroup::new(3, &[p(3, "(1,2,3)"), p(3, "(1,2)")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..6000 {
            *counts.entry(s3.random_element_with(&mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        // sigma = sqrt(6000 * 1/6 * 5/6) ~ 28.9
        let sigma = (6000.0f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - 1000.0).abs() < 5.0 * sigma, "count {c}");
        }
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0)
            .sum();
        // 5 degrees of freedom, 99.9th percentile ~ 20.5
        assert!(chi2 < 20.5, "chi-square {chi2}");
    }

    #[test]
    fn base_prefix_respected() {
        let g = PermGroup::with_base_prefix(5, a5().generators(), &[3, 1]).unwrap();
        assert_eq!(&g.base()[..2], &[3, 1]);
        assert_eq!(g.order(), BigUint::from(60u32));
    }

    #[test]
    fn solubility() {
        assert!(!a5().is_soluble());
        let s4 = PermGroup::new(4, &[p(4, "(1,2,3,4)"), p(4, "(1,2)")]).unwrap();
        assert!(s4.is_soluble());
        assert_eq!(s4.derived_subgroup().order(), BigUint::from(12u32));
        assert!(PermGroup::trivial(3).is_soluble());
    }

    #[test]
    fn stabilizer_order() {
        let m = m11();
        let h = m.stabilizer(0);
        assert_eq!(h.order(), BigUint::from(720u32));
        assert!(h.generators().iter().all(|g| g.apply(0) == 0));
    }

    #[test]
    fn lagrange_on_samples() {
        let g = m11();
        let order = g.order();
        for seed in 0..50 {
            let x = g.random_element(seed);
            assert_eq!(&order % BigUint::from(x.order()), BigUint::from(0u32));
        }
    }

    #[test]
    fn rank_is_a_bijection() {
        let g = m11();
        let mut seen = vec![false; 7920];
        for x in g.elements(10_000).unwrap() {
            let r = g.rank(&x).unwrap() as usize;
            assert!(!seen[r]);
            seen[r] = true;
            assert_eq!(g.unrank(r as u64), x);
        }
        assert!(seen.iter().all(|&b| b));
        assert_eq!(a5().rank(&p(5, "(1,2)")), None);
    }
}
