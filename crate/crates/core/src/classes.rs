//! Conjugacy classes, centralizers, class fusion and spectra.
//!
//! Groups of order at most [`ClassOptions::exhaustive_limit`] are split into
//! classes by walking every element once: each unvisited element seeds a
//! conjugation orbit under the generators. Larger groups are sampled at
//! random; each new class is sized through its centralizer, counted by a
//! backtrack search, and the table is accepted only once the class sizes
//! add up to the group order.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{CycleType, Permutation, Point};

#[derive(Clone, Copy, Debug)]
pub struct ClassOptions {
    /// Largest order handled by exhaustive bucketing.
    pub exhaustive_limit: u64,
    /// Random elements drawn before giving up on the sampling path.
    pub draws: u64,
    /// Node budget of a single backtrack search.
    pub search_nodes: u64,
    pub seed: u64,
}

impl Default for ClassOptions {
    fn default() -> Self {
        ClassOptions {
            exhaustive_limit: 1_000_000,
            draws: 100_000,
            search_nodes: 50_000_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClass {
    pub name: String,
    pub rep: Permutation,
    pub size: BigUint,
    pub centralizer_order: BigUint,
    pub element_order: u64,
}

#[derive(Clone, Debug)]
pub struct ConjClassTable {
    group: PermGroup,
    order: BigUint,
    classes: Vec<ConjClass>,
    /// class index of every element, by rank (exhaustive path only)
    lookup: Option<Vec<u32>>,
    cycle_types: Vec<CycleType>,
    search_nodes: u64,
}

pub fn conjugacy_classes(group: &PermGroup) -> Result<ConjClassTable> {
    ConjClassTable::compute(group, ClassOptions::default())
}

impl ConjClassTable {
    pub fn compute(group: &PermGroup, options: ClassOptions) -> Result<Self> {
        let order = group.order();
        match order.to_u64() {
            Some(o) if o <= options.exhaustive_limit => Ok(Self::exhaustive(group, o, options)),
            _ => Self::sampled(group, options),
        }
    }

    fn exhaustive(group: &PermGroup, order: u64, options: ClassOptions) -> Self {
        let mut ids = vec![u32::MAX; order as usize];
        let mut found: Vec<(Permutation, u64)> = Vec::new();
        let gens = group.generators();
        for r in 0..order {
            if ids[r as usize] != u32::MAX {
                continue;
            }
            let id = found.len() as u32;
            let seed = group.unrank(r);
            ids[r as usize] = id;
            let mut rep = seed.clone();
            let mut size = 1u64;
            let mut queue = vec![seed];
            while let Some(y) = queue.pop() {
                for s in gens {
                    let z = y.conjugate_by(s);
                    let rz = group.rank(&z).expect("conjugate of a member") as usize;
                    if ids[rz] == u32::MAX {
                        ids[rz] = id;
                        size += 1;
                        if z < rep {
                            rep = z.clone();
                        }
                        queue.push(z);
                    }
                }
            }
            found.push((rep, size));
        }
        let big_order = BigUint::from(order);
        let raw = found
            .into_iter()
            .map(|(rep, size)| (rep, BigUint::from(size)))
            .collect();
        let (classes, perm) = name_classes(raw, &big_order);
        for id in ids.iter_mut() {
            *id = perm[*id as usize];
        }
        Self::assemble(group, classes, Some(ids), options)
    }

    fn sampled(group: &PermGroup, options: ClassOptions) -> Result<Self> {
        let order = group.order();
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut table = Self::assemble(group, Vec::new(), None, options);
        let identity = group.identity();
        table.push_raw(identity, BigUint::from(1u32), &order);
        let mut total = BigUint::from(1u32);
        let mut draws = 0;
        while total < order {
            if draws >= options.draws {
                return Err(Error::BudgetExceeded(format!(
                    "{} random elements found classes covering {total} of {order} elements",
                    options.draws
                )));
            }
            draws += 1;
            let x = group.random_element_with(&mut rng);
            let m = x.order();
            // powers of x reach small classes that random draws rarely hit
            for d in divisors(m) {
                let y = x.pow(m / d);
                if table.find_class(&y)?.is_some() {
                    continue;
                }
                let cent = centralizer_order_with(group, &y, options.search_nodes)?;
                let size = &order / &cent;
                total += &size;
                table.push_raw(y, size, &order);
            }
        }
        let raw = table.classes.into_iter().map(|c| (c.rep, c.size)).collect();
        let (classes, _) = name_classes(raw, &order);
        Ok(Self::assemble(group, classes, None, options))
    }

    fn push_raw(&mut self, rep: Permutation, size: BigUint, order: &BigUint) {
        self.cycle_types.push(rep.cycle_type());
        self.classes.push(ConjClass {
            name: String::new(),
            element_order: rep.order(),
            centralizer_order: order / &size,
            size,
            rep,
        });
    }

    fn assemble(group: &PermGroup, classes: Vec<ConjClass>, lookup: Option<Vec<u32>>, options: ClassOptions) -> Self {
        ConjClassTable {
            order: group.order(),
            cycle_types: classes.iter().map(|c| c.rep.cycle_type()).collect(),
            group: group.clone(),
            classes,
            lookup,
            search_nodes: options.search_nodes,
        }
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn group_order(&self) -> &BigUint {
        &self.order
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, i: usize) -> &ConjClass {
        &self.classes[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    /// Whether every element has a precomputed class index.
    pub fn is_indexed(&self) -> bool {
        self.lookup.is_some()
    }

    fn find_class(&self, x: &Permutation) -> Result<Option<usize>> {
        if let Some(ids) = &self.lookup {
            return Ok(self.group.rank(x).map(|r| ids[r as usize] as usize));
        }
        let ct = x.cycle_type();
        let m = x.order();
        for (i, c) in self.classes.iter().enumerate() {
            if c.element_order == m && self.cycle_types[i] == ct && conjugating_element(&self.group, &c.rep, x, self.search_nodes)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Index of the class containing `x`, an element of the group.
    pub fn class_of(&self, x: &Permutation) -> usize {
        self.try_class_of(x).expect("element of the group within search budget")
    }

    pub fn try_class_of(&self, x: &Permutation) -> Result<usize> {
        self.find_class(x)?
            .ok_or_else(|| Error::NotASubgroup(format!("{x} lies in no class of the group")))
    }

    /// Index of the class `{x⁻¹ : x ∈ C_i}`.
    pub fn inverse_class(&self, i: usize) -> usize {
        self.class_of(&self.classes[i].rep.inverse())
    }

    pub fn are_conjugate(&self, x: &Permutation, y: &Permutation) -> Result<bool> {
        if x.cycle_type() != y.cycle_type() {
            return Ok(false);
        }
        if self.lookup.is_some() {
            return Ok(self.try_class_of(x)? == self.try_class_of(y)?);
        }
        Ok(conjugating_element(&self.group, x, y, self.search_nodes)?.is_some())
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            orders: self.classes.iter().map(|c| c.element_order).collect(),
        }
    }

    /// JSON lines, one class per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.classes {
            let rec = ClassRecord {
                name: c.name.clone(),
                size: c.size.to_string(),
                centralizer_order: c.centralizer_order.to_string(),
                element_order: c.element_order,
                rep: c.rep.to_string(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    /// Reads a table written by [`ConjClassTable::write_jsonl`] for `group`,
    /// checking representatives, orders and the class equation.
    pub fn read_jsonl<R: BufRead>(group: &PermGroup, input: R) -> Result<Self> {
        let order = group.order();
        let mut classes = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line: i + 1, message };
            let rec: ClassRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            let rep = Permutation::parse(group.degree(), &rec.rep).map_err(|e| bad(e.to_string()))?;
            if !group.contains(&rep)? {
                return Err(bad(format!("{rep} is not in the group")));
            }
            let size: BigUint = rec.size.parse().map_err(|_| bad("bad size".into()))?;
            let centralizer_order: BigUint = rec.centralizer_order.parse().map_err(|_| bad("bad centralizer order".into()))?;
            if &size * &centralizer_order != order || rep.order() != rec.element_order {
                return Err(bad(format!("class {} is inconsistent with the group", rec.name)));
            }
            classes.push(ConjClass {
                name: rec.name,
                rep,
                size,
                centralizer_order,
                element_order: rec.element_order,
            });
        }
        let total: BigUint = classes.iter().map(|c| &c.size).sum();
        if total != order {
            return Err(Error::Parse {
                line: classes.len(),
                message: format!("class sizes sum to {total}, not {order}"),
            });
        }
        Ok(Self::assemble(group, classes, None, ClassOptions::default()))
    }
}

#[derive(Serialize, Deserialize)]
struct ClassRecord {
    name: String,
    size: String,
    centralizer_order: String,
    element_order: u64,
    rep: String,
}

/// Sorts raw classes and names them `<order><letter>`: by element order, then
/// by decreasing size, then by representative. Returns the classes and the
/// old-index to new-index map.
fn name_classes(raw: Vec<(Permutation, BigUint)>, order: &BigUint) -> (Vec<ConjClass>, Vec<u32>) {
    let mut keyed: Vec<(usize, u64, Permutation, BigUint)> = raw
        .into_iter()
        .enumerate()
        .map(|(i, (rep, size))| (i, rep.order(), rep, size))
        .collect();
    keyed.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.3.cmp(&a.3)).then_with(|| a.2.cmp(&b.2)));
    let mut perm = vec![0u32; keyed.len()];
    let mut classes = Vec::with_capacity(keyed.len());
    let mut letter = 0;
    for (pos, (old, m, rep, size)) in keyed.into_iter().enumerate() {
        if pos > 0 && classes.last().map(|c: &ConjClass| c.element_order) == Some(m) {
            letter += 1;
        } else {
            letter = 0;
        }
        perm[old] = pos as u32;
        classes.push(ConjClass {
            name: format!("{m}{}", letter_code(letter)),
            centralizer_order: order / &size,
            rep,
            size,
            element_order: m,
        });
    }
    (classes, perm)
}

fn letter_code(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII")
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    pub orders: BTreeSet<u64>,
}

impl Spectrum {
    pub fn contains(&self, m: u64) -> bool {
        self.orders.contains(&m)
    }
}

/// Element orders of `<gens>`.
pub fn spectrum(degree: usize, gens: &[Permutation]) -> Result<Spectrum> {
    let h = PermGroup::new(degree, gens)?;
    Ok(conjugacy_classes(&h)?.spectrum())
}

/// Class fusion of a subgroup: its own class table and, per class, the index
/// of the class of `table`'s group containing it.
#[derive(Clone, Debug)]
pub struct Fusion {
    pub subgroup: ConjClassTable,
    pub map: Vec<usize>,
}

impl Fusion {
    /// `|C ∩ H|` for every class `C` of the ambient group.
    pub fn intersection_sizes(&self, ambient_classes: usize) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); ambient_classes];
        for (hc, &gc) in self.subgroup.classes().iter().zip(&self.map) {
            out[gc] += &hc.size;
        }
        out
    }
}

pub fn class_fusion(table: &ConjClassTable, h_gens: &[Permutation]) -> Result<Fusion> {
    let h = table.group().subgroup(h_gens)?;
    let subgroup = conjugacy_classes(&h)?;
    let map = subgroup
        .classes()
        .iter()
        .map(|c| table.try_class_of(&c.rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fusion { subgroup, map })
}

/// Whether some `g` in `group` has `g⁻¹ x g = y`.
pub fn are_conjugate(group: &PermGroup, x: &Permutation, y: &Permutation) -> Result<bool> {
    if x.cycle_type() != y.cycle_type() {
        return Ok(false);
    }
    Ok(conjugating_element(group, x, y, ClassOptions::default().search_nodes)?.is_some())
}

/// Some `g` in `group` with `g⁻¹ x g = y`, by backtracking over base images.
pub fn conjugating_element(group: &PermGroup, x: &Permutation, y: &Permutation, budget: u64) -> Result<Option<Permutation>> {
    if x.cycle_type() != y.cycle_type() {
        return Ok(None);
    }
    let mut found = None;
    Backtrack::new(group, x, y, budget).run(&mut |g| {
        found = Some(g.clone());
        false
    })?;
    Ok(found)
}

/// `|C_G(x)|`, counted by backtracking.
pub fn centralizer_order(group: &PermGroup, x: &Permutation) -> Result<BigUint> {
    centralizer_order_with(group, x, ClassOptions::default().search_nodes)
}

fn centralizer_order_with(group: &PermGroup, x: &Permutation, budget: u64) -> Result<BigUint> {
    let mut count = 0u64;
    Backtrack::new(group, x, x, budget).run(&mut |_| {
        count += 1;
        true
    })?;
    Ok(BigUint::from(count))
}

/// Search for `g` with `g(x(p)) = y(g(p))` for all `p`, i.e. `x^g = y`.
struct Backtrack<'a> {
    group: &'a PermGroup,
    x: &'a Permutation,
    y: &'a Permutation,
    cycle_len_x: Vec<u32>,
    cycle_len_y: Vec<u32>,
    /// forced image of each point, or NONE
    image: Vec<Point>,
    used: Vec<bool>,
    trail: Vec<Point>,
    nodes: u64,
    budget: u64,
}

const NONE: Point = Point::MAX;

impl<'a> Backtrack<'a> {
    fn new(group: &'a PermGroup, x: &'a Permutation, y: &'a Permutation, budget: u64) -> Self {
        let n = group.degree();
        Backtrack {
            group,
            x,
            y,
            cycle_len_x: cycle_lengths(x),
            cycle_len_y: cycle_lengths(y),
            image: vec![NONE; n],
            used: vec![false; n],
            trail: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn run(mut self, visit: &mut dyn FnMut(&Permutation) -> bool) -> Result<()> {
        let identity = self.group.identity();
        self.descend(0, &identity, visit).map(|_| ())
    }

    /// Forces `g(p) = c` and everything it implies; false on conflict.
    fn assign(&mut self, p: Point, c: Point) -> bool {
        let cur = self.image[p as usize];
        if cur != NONE {
            return cur == c;
        }
        if self.used[c as usize] || self.cycle_len_x[p as usize] != self.cycle_len_y[c as usize] {
            return false;
        }
        let (mut a, mut b) = (p, c);
        for _ in 0..self.cycle_len_x[p as usize] {
            self.image[a as usize] = b;
            self.used[b as usize] = true;
            self.trail.push(a);
            a = self.x.apply(a);
            b = self.y.apply(b);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().expect("trail above mark");
            let b = self.image[a as usize];
            self.used[b as usize] = false;
            self.image[a as usize] = NONE;
        }
    }

    /// `prefix` acts as `g` on the base points of levels `< level`.
    /// Returns false once `visit` asks to stop.
    fn descend(&mut self, level: usize, prefix: &Permutation, visit: &mut dyn FnMut(&Permutation) -> bool) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("backtrack search exceeded {} nodes", self.budget)));
        }
        if level == self.group.num_levels() {
            if self.x.conjugate_by(prefix) == *self.y {
                return Ok(visit(prefix));
            }
            return Ok(true);
        }
        let base_point = self.group.level_orbit(level)[0];
        let forced = self.image[base_point as usize];
        let orbit_len = self.group.level_orbit(level).len();
        for k in 0..orbit_len {
            let o = self.group.level_orbit(level)[k];
            let c = prefix.apply(o);
            if forced != NONE && forced != c {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(base_point, c) {
                let next = self.group.level_rep(level, k).then(prefix);
                if !self.descend(level + 1, &next, visit)? {
                    return Ok(false);
                }
            }
            self.undo(mark);
        }
        Ok(true)
    }
}

fn cycle_lengths(p: &Permutation) -> Vec<u32> {
    let mut out = vec![0; p.degree()];
    for cycle in p.all_cycles() {
        for &q in &cycle {
            out[q as usize] = cycle.len() as u32;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{alt, cyclic, mathieu, psl2, sym, Mathieu};

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse(n, s).unwrap()
    }

    fn sizes(t: &ConjClassTable) -> Vec<u64> {
        let mut v: Vec<u64> = t.classes().iter().map(|c| c.size.to_u64().unwrap()).collect();
        v.sort_unstable();
        v
    }

    /// Class sizes by brute force: group elements into orbits under
    /// conjugation by every element.
    fn naive_sizes(g: &PermGroup) -> Vec<u64> {
        let elems: Vec<Permutation> = g.elements(100_000).unwrap().collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for x in &elems {
            if seen.contains(x) {
                continue;
            }
            let class: std::collections::HashSet<Permutation> = elems.iter().map(|c| x.conjugate_by(c)).collect();
            out.push(class.len() as u64);
            seen.extend(class);
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn a5_classes() {
        let t = conjugacy_classes(&alt(5).unwrap()).unwrap();
        assert_eq!(sizes(&t), vec![1, 12, 12, 15, 20]);
        let names: Vec<&str> = t.classes().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["1A", "2A", "3A", "5A", "5B"]);
        assert_eq!(sizes(&t), naive_sizes(&alt(5).unwrap()));
    }

    #[test]
    fn m11_classes() {
        let g = mathieu(Mathieu::M11);
        let t = conjugacy_classes(&g).unwrap();
        assert_eq!(t.len(), 10);
        let elevens: Vec<&ConjClass> = t.classes().iter().filter(|c| c.element_order == 11).collect();
        assert_eq!(elevens.len(), 2);
        assert!(elevens.iter().all(|c| c.size == BigUint::from(720u32)));
        assert_eq!(sizes(&t), naive_sizes(&g));
        let orders: Vec<u64> = t.spectrum().orders.into_iter().collect();
        assert_eq!(orders, vec![1, 2, 3, 4, 5, 6, 8, 11]);
    }

    #[test]
    fn table_invariants() {
        for g in [alt(6).unwrap(), sym(5), psl2(8).unwrap(), cyclic(6), PermGroup::trivial(3)] {
            let t = conjugacy_classes(&g).unwrap();
            let total: BigUint = t.classes().iter().map(|c| &c.size).sum();
            assert_eq!(total, g.order());
            assert_eq!(t.get(0).size, BigUint::from(1u32));
            assert!(t.get(0).rep.is_identity());
            assert!(t.classes().iter().filter(|c| c.size == BigUint::from(1u32)).count() >= 1);
            for (i, c) in t.classes().iter().enumerate() {
                assert_eq!(&c.size * &c.centralizer_order, g.order());
                assert_eq!(t.class_of(&c.rep), i);
                // centralizer two ways
                assert_eq!(centralizer_order(&g, &c.rep).unwrap(), c.centralizer_order);
                for d in t.classes()[..i].iter() {
                    assert!(!are_conjugate(&g, &c.rep, &d.rep).unwrap());
                }
            }
        }
        assert_eq!(conjugacy_classes(&PermGroup::trivial(3)).unwrap().len(), 1);
    }

    #[test]
    fn sampled_path_agrees() {
        let opts = ClassOptions {
            exhaustive_limit: 0,
            ..ClassOptions::default()
        };
        for g in [mathieu(Mathieu::M11), alt(7).unwrap(), psl2(8).unwrap()] {
            let fast = ConjClassTable::compute(&g, opts).unwrap();
            let slow = conjugacy_classes(&g).unwrap();
            assert!(!fast.is_indexed());
            assert_eq!(sizes(&fast), sizes(&slow));
            for c in slow.classes() {
                let i = fast.class_of(&c.rep);
                assert_eq!(fast.get(i).size, c.size);
            }
        }
    }

    #[test]
    fn conjugacy_in_a5() {
        let g = alt(5).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let five = p(5, "(1,2,3,4,5)");
        assert!(are_conjugate(&g, &p(5, "(1,2,3)"), &p(5, "(2,4,5)")).unwrap());
        assert!(!are_conjugate(&g, &five, &five.pow(2)).unwrap());
        assert!(!t.are_conjugate(&five, &five.pow(2)).unwrap());
        assert!(are_conjugate(&g, &five, &five.pow(4)).unwrap());
        assert!(are_conjugate(&g, &five, &five).unwrap());
        let x = p(5, "(1,3)(2,5)");
        let y = p(5, "(2,3)(4,5)");
        let c = conjugating_element(&g, &x, &y, 1000).unwrap().unwrap();
        assert_eq!(x.conjugate_by(&c), y);
    }

    #[test]
    fn fusion_a4_in_a5() {
        let g = alt(5).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let a4 = g.stabilizer(4);
        let f = class_fusion(&t, a4.generators()).unwrap();
        assert_eq!(f.subgroup.len(), 4);
        let threes: Vec<usize> = f
            .subgroup
            .classes()
            .iter()
            .zip(&f.map)
            .filter(|(c, _)| c.element_order == 3)
            .map(|(_, &m)| m)
            .collect();
        assert_eq!(threes.len(), 2);
        assert_eq!(threes[0], threes[1]);

        let c5 = [p(5, "(1,2,3,4,5)")];
        let f = class_fusion(&t, &c5).unwrap();
        let mut hits = vec![0; t.len()];
        for (c, &m) in f.subgroup.classes().iter().zip(&f.map) {
            if c.element_order == 5 {
                hits[m] += 1;
            }
        }
        assert_eq!(hits.iter().filter(|&&h| h == 2).count(), 2);

        let f = class_fusion(&t, &[]).unwrap();
        assert_eq!(f.map, vec![0]);
    }

    #[test]
    fn fusion_respects_order_and_counts() {
        let g = mathieu(Mathieu::M11);
        let t = conjugacy_classes(&g).unwrap();
        let f = class_fusion(&t, &crate::catalog::m11_l2_11_generators()).unwrap();
        for (c, &m) in f.subgroup.classes().iter().zip(&f.map) {
            assert_eq!(c.element_order, t.get(m).element_order);
            assert_eq!(c.rep.cycle_type(), t.get(m).rep.cycle_type());
        }
        let meet = f.intersection_sizes(t.len());
        let total: BigUint = meet.iter().sum();
        assert_eq!(total, BigUint::from(660u32));
        for (m, c) in meet.iter().zip(t.classes()) {
            assert!(m <= &c.size);
        }
    }

    #[test]
    fn spectra() {
        let a4 = alt(4).unwrap();
        assert_eq!(spectrum(4, a4.generators()).unwrap().orders, BTreeSet::from([1, 2, 3]));
        let c6 = cyclic(6);
        assert_eq!(spectrum(6, c6.generators()).unwrap().orders, BTreeSet::from([1, 2, 3, 6]));
    }

    #[test]
    fn jsonl_roundtrip() {
        let g = psl2(7).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), 6);
        let back = ConjClassTable::read_jsonl(&g, text.as_bytes()).unwrap();
        assert_eq!(back.classes(), t.classes());
        assert_eq!(back.to_jsonl(), text);
        let broken = text.replacen("\"21\"", "\"22\"", 1);
        assert!(ConjClassTable::read_jsonl(&g, broken.as_bytes()).is_err());
    }

    #[test]
    fn letters() {
        assert_eq!(letter_code(0), "A");
        assert_eq!(letter_code(25), "Z");
        assert_eq!(letter_code(26), "AA");
    }
}
