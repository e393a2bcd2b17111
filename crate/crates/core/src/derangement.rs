//! Derangements of a transitive action: the proportion δ, cheap lower
//! bounds, products of normal subsets and the derangement width.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::actions::{GroupAction, Provenance};
use crate::chartab::ProductCounts;
use crate::classes::{ConjClassTable, Spectrum};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rational::{fmt_ratio, ratio, ExactRational};

/// Default largest power of Δ tried by [`width`].
pub const DEFAULT_K_MAX: u32 = 8;

#[derive(Clone, Debug)]
pub struct DerangementReport {
    pub action: Provenance,
    pub degree: usize,
    pub group_order: BigUint,
    /// fixed points of each class representative
    pub permutation_character: Vec<usize>,
    pub derangement_classes: Vec<usize>,
    pub delta: ExactRational,
    pub derangement_count: BigUint,
    pub prime_order_derangement_exists: bool,
}

impl DerangementReport {
    /// No derangement of prime order.
    pub fn is_elusive(&self) -> bool {
        !self.prime_order_derangement_exists
    }

    pub fn derangements(&self) -> NormalSet {
        NormalSet::new(self.derangement_classes.iter().copied())
    }

    /// Whether δ attains `1/|Ω|`, which happens exactly for sharply
    /// 2-transitive actions.
    pub fn meets_cameron_cohen_bound(&self) -> bool {
        self.delta == ratio(1, self.degree as u64)
    }

    pub fn to_json(&self, table: &ConjClassTable) -> serde_json::Value {
        let names: Vec<&str> = self.derangement_classes.iter().map(|&i| table.get(i).name.as_str()).collect();
        json!({
            "schema": 1,
            "action": self.action,
            "degree": self.degree,
            "group_order": self.group_order.to_string(),
            "delta": fmt_ratio(&self.delta),
            "derangement_count": self.derangement_count.to_string(),
            "derangement_classes": names,
            "prime_order_derangement_exists": self.prime_order_derangement_exists,
            "elusive": self.is_elusive(),
        })
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// The classes with no fixed point under `action`, and δ.
pub fn derangement_report(table: &ConjClassTable, action: &GroupAction) -> Result<DerangementReport> {
    if action.group().order() != *table.group_order() || action.group().generators() != table.group().generators() {
        return Err(Error::OutOfRange("action and class table belong to different groups".into()));
    }
    if !action.is_transitive() {
        return Err(Error::Intransitive);
    }
    let chi: Vec<usize> = table
        .classes()
        .par_iter()
        .map(|c| action.fixed_point_count(&c.rep))
        .collect();
    let derangement_classes: Vec<usize> = (0..table.len()).filter(|&i| chi[i] == 0).collect();
    let derangement_count: BigUint = derangement_classes.iter().map(|&i| &table.get(i).size).sum();
    if action.domain_size() >= 2 {
        assert!(!derangement_classes.is_empty(), "a transitive group of degree > 1 has derangements");
    }
    let prime_order_derangement_exists = derangement_classes.iter().any(|&i| is_prime(table.get(i).element_order));
    Ok(DerangementReport {
        action: action.provenance().clone(),
        degree: action.domain_size(),
        group_order: table.group_order().clone(),
        permutation_character: chi,
        delta: ratio(derangement_count.clone(), table.group_order().clone()),
        derangement_classes,
        derangement_count,
        prime_order_derangement_exists,
    })
}

/// Proportion of elements whose order is not an element order of `H`.
pub fn spectrum_lower_bound(table: &ConjClassTable, h_spectrum: &Spectrum) -> ExactRational {
    let count: BigUint = table
        .classes()
        .iter()
        .filter(|c| !h_spectrum.contains(c.element_order))
        .map(|c| &c.size)
        .sum();
    ratio(count, table.group_order().clone())
}

/// Proportion of elements whose order does not divide `|H|`.
pub fn divisibility_lower_bound(table: &ConjClassTable, h_order: &BigUint) -> ExactRational {
    let count: BigUint = table
        .classes()
        .iter()
        .filter(|c| !(h_order % BigUint::from(c.element_order)).is_zero())
        .map(|c| &c.size)
        .sum();
    ratio(count, table.group_order().clone())
}

/// A union of conjugacy classes, by class index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NormalSet {
    pub classes: BTreeSet<usize>,
}

impl NormalSet {
    pub fn new(classes: impl IntoIterator<Item = usize>) -> Self {
        NormalSet {
            classes: classes.into_iter().collect(),
        }
    }

    pub fn identity() -> Self {
        Self::new([0])
    }

    pub fn whole(table: &ConjClassTable) -> Self {
        Self::new(0..table.len())
    }

    pub fn contains(&self, class: usize) -> bool {
        self.classes.contains(&class)
    }

    pub fn union(&self, other: &NormalSet) -> NormalSet {
        NormalSet {
            classes: self.classes.union(&other.classes).copied().collect(),
        }
    }

    pub fn element_count(&self, table: &ConjClassTable) -> BigUint {
        self.classes.iter().map(|&i| &table.get(i).size).sum()
    }

    pub fn is_whole(&self, n_classes: usize) -> bool {
        self.classes.len() == n_classes
    }

    pub fn names(&self, table: &ConjClassTable) -> Vec<String> {
        self.classes.iter().map(|&i| table.get(i).name.clone()).collect()
    }
}

/// `ST`, as the classes it meets.
pub fn normal_set_product(s: &NormalSet, t: &NormalSet, products: &ProductCounts) -> NormalSet {
    let mut out = BTreeSet::new();
    for &i in &s.classes {
        for &j in &t.classes {
            out.extend(products.product(i, j));
            if out.len() == products.num_classes() {
                return NormalSet { classes: out };
            }
        }
    }
    NormalSet { classes: out }
}

/// `ST` by multiplying every pair of elements; `|S||T|` must not exceed `cap`.
pub fn normal_set_product_elementwise(table: &ConjClassTable, s: &NormalSet, t: &NormalSet, cap: u64) -> Result<NormalSet> {
    let pairs = s.element_count(table) * t.element_count(table);
    if pairs > BigUint::from(cap) {
        return Err(Error::BudgetExceeded(format!("{pairs} products exceed the cap {cap}")));
    }
    let members = |set: &NormalSet| -> Result<Vec<Permutation>> {
        let order = table.group_order().to_u64().unwrap_or(u64::MAX);
        Ok(table
            .group()
            .elements(order)?
            .filter(|x| set.contains(table.class_of(x)))
            .collect())
    };
    let (left, right) = (members(s)?, members(t)?);
    let classes = left
        .par_iter()
        .flat_map_iter(|a| right.iter().map(move |b| table.class_of(&a.then(b))))
        .collect::<BTreeSet<usize>>();
    Ok(NormalSet { classes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    Finite(u32),
    /// `Δ^k ≠ G` for every `k ≤` the payload.
    Unbounded(u32),
}

impl std::fmt::Display for Width {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Width::Finite(k) => write!(f, "{k}"),
            Width::Unbounded(k) => write!(f, "Unbounded({k})"),
        }
    }
}

/// Least `k ≤ k_max` with `Δ^k = G`. When `δ > 1/2` the answer is 2 and
/// `products` is not consulted.
pub fn width(report: &DerangementReport, products: Option<&ProductCounts>, k_max: u32) -> Result<Width> {
    if report.delta > ratio(1, 2) && k_max >= 2 {
        return Ok(Width::Finite(2));
    }
    let products = products.ok_or_else(|| Error::BudgetExceeded("width needs class multiplication counts".into()))?;
    Ok(width_by_products(report, products, k_max))
}

/// As [`width`], always by explicit products.
pub fn width_by_products(report: &DerangementReport, products: &ProductCounts, k_max: u32) -> Width {
    let n = products.num_classes();
    let delta = report.derangements();
    let mut power = delta.clone();
    let mut seen = vec![power.clone()];
    for k in 1..=k_max {
        if power.is_whole(n) {
            return Width::Finite(k);
        }
        if k == k_max {
            break;
        }
        power = normal_set_product(&power, &delta, products);
        if seen.contains(&power) {
            // the powers of Δ now cycle without reaching G
            break;
        }
        seen.push(power.clone());
    }
    Width::Unbounded(k_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cover {
    Full,
    MinusIdentity,
}

/// `C² = G`, or `{1} ∪ C² = G`.
pub fn class_square_covers(products: &ProductCounts, class: usize, variant: Cover) -> bool {
    let mut sq = products.product(class, class);
    if variant == Cover::MinusIdentity {
        sq.insert(0);
    }
    sq.len() == products.num_classes()
}

/// The simplest description of `G` as a product of derangement classes:
/// `C2`, `CD`, `1∪C2`, `1∪CD` or `C2∪CD` (tried in this order), else
/// `Δ2` when only the whole of `Δ²` covers `G`, else `None`.
pub fn decomposition_tag(report: &DerangementReport, products: &ProductCounts) -> Option<&'static str> {
    let n = products.num_classes();
    let d = &report.derangement_classes;
    let covers = |s: BTreeSet<usize>| s.len() == n;
    let with_one = |mut s: BTreeSet<usize>| {
        s.insert(0);
        s
    };
    let pairs = || d.iter().flat_map(|&c| d.iter().filter(move |&&e| e != c).map(move |&e| (c, e)));
    if d.iter().any(|&c| covers(products.product(c, c))) {
        return Some("C2");
    }
    if pairs().any(|(c, e)| covers(products.product(c, e))) {
        return Some("CD");
    }
    if d.iter().any(|&c| covers(with_one(products.product(c, c)))) {
        return Some("1∪C2");
    }
    if pairs().any(|(c, e)| covers(with_one(products.product(c, e)))) {
        return Some("1∪CD");
    }
    if pairs().any(|(c, e)| {
        let mut s = products.product(c, c);
        s.extend(products.product(c, e));
        covers(s)
    }) {
        return Some("C2∪CD");
    }
    let delta = report.derangements();
    normal_set_product(&delta, &delta, products).is_whole(n).then_some("Δ2")
}

/// For every `x` in `S_n` some `n`-cycle `y` makes `xy` fixed-point-free.
/// Checked over all of `S_n`.
pub fn sym_ncycle_property(n: usize) -> Result<bool> {
    let g = crate::catalog::sym(n);
    let order = g.order_u64().expect("small n");
    let cycles: Vec<Permutation> = g.elements(order)?.filter(|y| y.cycle_type().parts() == [n as u32]).collect();
    let all: Vec<Permutation> = g.elements(order)?.collect();
    Ok(all.par_iter().all(|x| {
        cycles.iter().any(|y| {
            let xy = x.then(y);
            (0..n as u32).all(|p| xy.apply(p) != p)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::DEFAULT_INDEX_CAP;
    use crate::catalog::{alt, cyclic, l2_7_s4_generators, mathieu, psl2, Mathieu};
    use crate::chartab::brute_force_product_counts;
    use crate::classes::{conjugacy_classes, spectrum};

    fn natural(g: &crate::PermGroup) -> (ConjClassTable, DerangementReport) {
        let t = conjugacy_classes(g).unwrap();
        let r = derangement_report(&t, &GroupAction::natural(g)).unwrap();
        (t, r)
    }

    /// Oracle: count fixed-point-free elements one by one.
    fn brute_delta(g: &crate::PermGroup, a: &GroupAction) -> ExactRational {
        let order = g.order_u64().unwrap();
        let count = g.elements(order).unwrap().filter(|x| a.fixed_point_count(x) == 0).count();
        ratio(count as u64, order)
    }

    #[test]
    fn a5_natural() {
        let g = alt(5).unwrap();
        let (t, r) = natural(&g);
        assert_eq!(r.delta, ratio(2, 5));
        assert_eq!(r.delta, brute_delta(&g, &GroupAction::natural(&g)));
        assert_eq!(r.derangement_count, BigUint::from(24u32));
        assert!(r.prime_order_derangement_exists);
        let js = r.to_json(&t);
        assert_eq!(js["delta"], "2/5");
        assert_eq!(js["schema"], 1);
    }

    #[test]
    fn m11_natural() {
        let g = mathieu(Mathieu::M11);
        let (_, r) = natural(&g);
        assert_eq!(r.delta, ratio(23, 66));
    }

    #[test]
    fn intransitive_action_is_rejected() {
        let g = crate::PermGroup::new(4, &[Permutation::parse(4, "(1,2)").unwrap()]).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        assert!(matches!(derangement_report(&t, &GroupAction::natural(&g)), Err(Error::Intransitive)));
    }

    #[test]
    fn lower_bounds_for_a5() {
        let g = alt(5).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let a4 = g.stabilizer(0);
        let spec = spectrum(5, a4.generators()).unwrap();
        assert_eq!(spectrum_lower_bound(&t, &spec), ratio(2, 5));
        let c5 = spectrum(5, &[Permutation::parse(5, "(1,2,3,4,5)").unwrap()]).unwrap();
        assert_eq!(spectrum_lower_bound(&t, &c5), ratio(7, 12));
        assert_eq!(divisibility_lower_bound(&t, &BigUint::from(12u32)), ratio(2, 5));
        assert_eq!(divisibility_lower_bound(&t, &BigUint::from(60u32)), ratio(0, 1));
        assert_eq!(divisibility_lower_bound(&t, &BigUint::from(4u32)), ratio(11, 15));
        let m = mathieu(Mathieu::M11);
        let tm = conjugacy_classes(&m).unwrap();
        assert_eq!(spectrum_lower_bound(&tm, &tm.spectrum()), ratio(0, 1));
    }

    #[test]
    fn l2_7_on_seven_points() {
        let g = psl2(7).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let a = GroupAction::cosets(&g, &l2_7_s4_generators(), DEFAULT_INDEX_CAP).unwrap();
        let r = derangement_report(&t, &a).unwrap();
        let p = brute_force_product_counts(&t, 100_000).unwrap();
        let sevens: Vec<usize> = (0..t.len()).filter(|&i| t.get(i).element_order == 7).collect();
        assert_eq!(r.derangement_classes, sevens);
        let (c, d) = (NormalSet::new([sevens[0]]), NormalSet::new([sevens[1]]));
        let not_1_4 = NormalSet::new((0..t.len()).filter(|&i| ![1, 4].contains(&t.get(i).element_order)));
        let not_2 = NormalSet::new((0..t.len()).filter(|&i| t.get(i).element_order != 2));
        assert_eq!(normal_set_product(&c, &c, &p), not_1_4);
        assert_eq!(normal_set_product(&d, &d, &p), not_1_4);
        assert_eq!(normal_set_product(&c, &d, &p), not_2);
        for (s, u) in [(&c, &c), (&c, &d), (&d, &d)] {
            assert_eq!(normal_set_product_elementwise(&t, s, u, 10_000).unwrap(), normal_set_product(s, u, &p));
        }
        assert_eq!(width(&r, Some(&p), DEFAULT_K_MAX).unwrap(), Width::Finite(2));
        assert_eq!(decomposition_tag(&r, &p), Some("C2∪CD"));
    }

    #[test]
    fn widths() {
        let g = mathieu(Mathieu::M11);
        let (t, r) = natural(&g);
        let p = brute_force_product_counts(&t, 100_000).unwrap();
        assert_eq!(width_by_products(&r, &p, DEFAULT_K_MAX), Width::Finite(2));

        let c2 = cyclic(2);
        let (t, r) = natural(&c2);
        let p = brute_force_product_counts(&t, 100).unwrap();
        assert_eq!(width(&r, Some(&p), DEFAULT_K_MAX).unwrap(), Width::Unbounded(8));
        assert_eq!(Width::Unbounded(8).to_string(), "Unbounded(8)");

        // C_3 regular: Δ = both generators, Δ² = G
        let c3 = cyclic(3);
        let (t, r) = natural(&c3);
        let p = brute_force_product_counts(&t, 100).unwrap();
        assert_eq!(width(&r, Some(&p), DEFAULT_K_MAX).unwrap(), Width::Finite(2));
    }

    #[test]
    fn class_squares() {
        let g = alt(5).unwrap();
        let t = conjugacy_classes(&g).unwrap();
        let p = brute_force_product_counts(&t, 1000).unwrap();
        let (five_a, five_b) = (t.index_of("5A").unwrap(), t.index_of("5B").unwrap());
        // (5A, 5A; 2A) = 0: squares of a 5-class miss the involutions
        assert!(!class_square_covers(&p, five_a, Cover::Full));
        assert!(!class_square_covers(&p, five_a, Cover::MinusIdentity));
        let mut cd = p.product(five_a, five_b);
        cd.insert(0);
        assert_eq!(cd.len(), t.len());
        assert!(!class_square_covers(&p, 0, Cover::Full));
        assert!(!class_square_covers(&p, 0, Cover::MinusIdentity));
    }

    #[test]
    fn ncycle_property_small() {
        for n in 4..=6 {
            assert!(sym_ncycle_property(n).unwrap(), "n = {n}");
        }
    }
}
