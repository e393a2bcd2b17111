//! Transitive actions: natural, on right cosets, and on k-subsets.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Permutation, Point};

/// Default cap on the number of points of a derived action.
pub const DEFAULT_INDEX_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Natural,
    /// Right cosets of the subgroup generated by `generators`.
    Cosets { generators: Vec<String> },
    Ksubsets { k: usize },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Natural => write!(f, "natural"),
            Provenance::Cosets { generators } => write!(f, "cosets<{}>", generators.join(", ")),
            Provenance::Ksubsets { k } => write!(f, "ksubsets:{k}"),
        }
    }
}

#[derive(Clone, Debug)]
enum Domain {
    Natural,
    Cosets(CosetSpace),
    Ksubsets { subsets: Vec<Vec<Point>> },
}

/// Right cosets `Hg`, each stored as the element of `Hg` whose base image
/// (under the base of `G`) is lexicographically least.
#[derive(Clone, Debug)]
struct CosetSpace {
    subgroup: PermGroup,
    base: Vec<Point>,
    reps: Vec<Permutation>,
    index: HashMap<Vec<Point>, u32>,
}

impl CosetSpace {
    fn canonical(&self, g: &Permutation) -> Permutation {
        let mut c = g.clone();
        for level in 0..self.subgroup.num_levels() {
            let orbit = self.subgroup.level_orbit(level);
            if orbit.len() == 1 {
                continue;
            }
            let best = orbit
                .iter()
                .enumerate()
                .min_by_key(|&(_, &p)| c.apply(p))
                .map(|(k, _)| k)
                .expect("orbits are nonempty");
            if best != 0 {
                c = self.subgroup.level_rep(level, best).then(&c);
            }
        }
        c
    }

    fn key(&self, c: &Permutation) -> Vec<Point> {
        self.base.iter().map(|&b| c.apply(b)).collect()
    }

    fn locate(&self, g: &Permutation) -> Point {
        let key = self.key(&self.canonical(g));
        self.index[&key]
    }
}

#[derive(Clone, Debug)]
pub struct GroupAction {
    group: PermGroup,
    provenance: Provenance,
    domain_size: usize,
    domain: Domain,
    /// images of the generators of `group` on the domain
    generator_images: Vec<Permutation>,
}

impl GroupAction {
    pub fn natural(group: &PermGroup) -> Self {
        GroupAction {
            group: group.clone(),
            provenance: Provenance::Natural,
            domain_size: group.degree(),
            domain: Domain::Natural,
            generator_images: group.generators().to_vec(),
        }
    }

    /// Action of `group` on the right cosets of `<h_gens>`.
    pub fn cosets(group: &PermGroup, h_gens: &[Permutation], index_cap: u64) -> Result<Self> {
        let h_plain = group.subgroup(h_gens)?;
        let index = group.order() / h_plain.order();
        if index > BigUint::from(index_cap) {
            return Err(Error::IndexCapExceeded {
                index: index.to_string(),
                cap: index_cap,
            });
        }
        let index = index.to_usize().expect("bounded by cap");
        let base = group.base();
        let subgroup = PermGroup::with_base_prefix(group.degree(), h_gens, &base)?;
        let mut space = CosetSpace {
            subgroup,
            base,
            reps: Vec::with_capacity(index),
            index: HashMap::with_capacity(index),
        };
        let first = space.canonical(&group.identity());
        space.index.insert(space.key(&first), 0);
        space.reps.push(first);
        let gens = group.generators();
        let mut images: Vec<Vec<Point>> = vec![Vec::with_capacity(index); gens.len()];
        let mut k = 0;
        while k < space.reps.len() {
            for (s, img) in gens.iter().zip(images.iter_mut()) {
                let c = space.canonical(&space.reps[k].then(s));
                let key = space.key(&c);
                let next = space.reps.len() as u32;
                let target = *space.index.entry(key).or_insert(next);
                if target == next {
                    space.reps.push(c);
                }
                img.push(target);
            }
            k += 1;
        }
        debug_assert_eq!(space.reps.len(), index);
        let generator_images = images
            .into_iter()
            .map(|img| Permutation::from_images(img).expect("coset action is a bijection"))
            .collect();
        Ok(GroupAction {
            group: group.clone(),
            provenance: Provenance::Cosets {
                generators: h_gens.iter().map(|g| g.to_string()).collect(),
            },
            domain_size: index,
            domain: Domain::Cosets(space),
            generator_images,
        })
    }

    /// Action on the `k`-subsets of the `n = degree` points, indexed in
    /// colexicographic order.
    pub fn ksubsets(group: &PermGroup, k: usize, cap: u64) -> Result<Self> {
        let n = group.degree();
        if k == 0 || k > n {
            return Err(Error::OutOfRange(format!("k = {k} not in 1..={n}")));
        }
        let count = crate::rational::binomial(n as u64, k as u64);
        if count > cap.into() {
            return Err(Error::IndexCapExceeded {
                index: count.to_string(),
                cap,
            });
        }
        let count = count.to_usize().expect("bounded by cap");
        let subsets: Vec<Vec<Point>> = (0..count).map(|r| colex_unrank(r as u64, k)).collect();
        let generator_images = group
            .generators()
            .iter()
            .map(|g| {
                let img = subsets.iter().map(|s| colex_rank(&image_subset(g, s)) as Point).collect();
                Permutation::from_images(img).expect("subset action is a bijection")
            })
            .collect();
        Ok(GroupAction {
            group: group.clone(),
            provenance: Provenance::Ksubsets { k },
            domain_size: count,
            domain: Domain::Ksubsets { subsets },
            generator_images,
        })
    }

    /// Rebuilds an action from its descriptor.
    pub fn from_provenance(group: &PermGroup, provenance: &Provenance, cap: u64) -> Result<Self> {
        match provenance {
            Provenance::Natural => Ok(Self::natural(group)),
            Provenance::Ksubsets { k } => Self::ksubsets(group, *k, cap),
            Provenance::Cosets { generators } => {
                let gens = generators
                    .iter()
                    .map(|g| Permutation::parse(group.degree(), g))
                    .collect::<Result<Vec<_>>>()?;
                Self::cosets(group, &gens, cap)
            }
        }
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// The image of `point` under `x`.
    pub fn apply(&self, x: &Permutation, point: Point) -> Point {
        match &self.domain {
            Domain::Natural => x.apply(point),
            Domain::Cosets(space) => space.locate(&space.reps[point as usize].then(x)),
            Domain::Ksubsets { subsets, .. } => colex_rank(&image_subset(x, &subsets[point as usize])) as Point,
        }
    }

    /// `x` as a permutation of the domain.
    pub fn image(&self, x: &Permutation) -> Permutation {
        match &self.domain {
            Domain::Natural => x.clone(),
            _ => {
                let img = (0..self.domain_size as Point).map(|w| self.apply(x, w)).collect();
                Permutation::from_images_unchecked(img)
            }
        }
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.generator_images
    }

    /// The permutation group induced on the domain.
    pub fn image_group(&self) -> PermGroup {
        PermGroup::new(self.domain_size, &self.generator_images).expect("consistent degree")
    }

    /// Number of points fixed by `x`, the permutation character at `x`.
    pub fn fixed_point_count(&self, x: &Permutation) -> usize {
        match &self.domain {
            Domain::Natural => x.fixed_points(),
            Domain::Cosets(space) => {
                // Hc·x = Hc  iff  c x c⁻¹ ∈ H
                space
                    .reps
                    .iter()
                    .filter(|c| space.subgroup.contains_unchecked(&c.then(x).then(&c.inverse())))
                    .count()
            }
            Domain::Ksubsets { subsets, .. } => subsets
                .iter()
                .filter(|s| {
                    let mut img = image_subset(x, s);
                    img.sort_unstable();
                    &img == *s
                })
                .count(),
        }
    }

    pub fn is_derangement(&self, x: &Permutation) -> bool {
        match &self.domain {
            Domain::Natural => (0..self.domain_size as Point).all(|p| x.apply(p) != p),
            _ => self.fixed_point_count(x) == 0,
        }
    }

    pub fn is_transitive(&self) -> bool {
        self.domain_size <= 1
            || crate::group::orbit_under(self.domain_size, &self.generator_images, 0).len() == self.domain_size
    }

    /// The finest block system with `0` and `omega` in one block, as a
    /// block label per point (labels are the least point of each block).
    pub fn minimal_block(&self, omega: Point) -> Vec<Point> {
        minimal_block(self.domain_size, &self.generator_images, omega)
    }

    /// Primitivity of a transitive action; `Err(Intransitive)` otherwise.
    pub fn is_primitive(&self) -> Result<bool> {
        if !self.is_transitive() {
            return Err(Error::Intransitive);
        }
        if self.domain_size <= 2 {
            return Ok(true);
        }
        // only points in distinct orbits of the stabiliser of 0 need testing
        let stab = self.image_group().stabilizer(0);
        let mut done = vec![false; self.domain_size];
        for omega in 1..self.domain_size as Point {
            if done[omega as usize] {
                continue;
            }
            for p in stab.orbit(omega) {
                done[p as usize] = true;
            }
            let labels = self.minimal_block(omega);
            if labels.iter().any(|&l| l != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn image_subset(x: &Permutation, s: &[Point]) -> Vec<Point> {
    s.iter().map(|&p| x.apply(p)).collect()
}

/// Colex rank of a set (order of elements irrelevant).
pub fn colex_rank(set: &[Point]) -> u64 {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted
        .iter()
        .enumerate()
        .map(|(i, &c)| small_binomial(c as u64, i as u64 + 1))
        .sum()
}

/// The `k`-subset of colex rank `rank`, in increasing order.
pub fn colex_unrank(mut rank: u64, k: usize) -> Vec<Point> {
    let mut out = vec![0; k];
    for i in (1..=k).rev() {
        let mut c = i as u64 - 1;
        while small_binomial(c + 1, i as u64) <= rank {
            c += 1;
        }
        rank -= small_binomial(c, i as u64);
        out[i - 1] = c as Point;
    }
    out
}

fn small_binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn minimal_block(n: usize, gens: &[Permutation], omega: Point) -> Vec<Point> {
    let mut parent: Vec<Point> = (0..n as Point).collect();
    fn find(parent: &mut [Point], mut x: Point) -> Point {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }
    let mut pending = vec![(0 as Point, omega)];
    while let Some((a, b)) = pending.pop() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
        for g in gens {
            pending.push((g.apply(a), g.apply(b)));
        }
    }
    (0..n as Point).map(|p| find(&mut parent, p)).collect()
}
