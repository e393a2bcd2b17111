//! Generation by pairs of conjugate derangements, fixed point ratios, the
//! witness sum, and a brute-force α_s over soluble subgroups of small groups.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{GroupAction, Provenance, DEFAULT_INDEX_CAP};
use crate::classes::{class_fusion, conjugacy_classes, ConjClassTable};
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::rational::{ratio, ExactRational};

/// Default number of `(x, g)` trials in [`find_conjugate_derangement_pair`].
pub const DEFAULT_BUDGET: u64 = 10_000;

/// Largest group order accepted by [`alpha_s_bruteforce`].
pub const SUBGROUP_SEARCH_CAP: u64 = 10_000;

/// Whether `elems` generate all of `group`.
pub fn generates(group: &PermGroup, elems: &[Permutation]) -> Result<bool> {
    let h = PermGroup::new(group.degree(), elems)?;
    Ok(h.order() == group.order())
}

/// `fpr(z, G/H) = |z^G ∩ H| / |z^G|` for every class `z^G` of `table`,
/// computed from the class fusion of `H` and checked against fixed points on
/// the cosets of `H`.
pub fn fixed_point_ratios(table: &ConjClassTable, h_gens: &[Permutation]) -> Result<Vec<ExactRational>> {
    let fusion = class_fusion(table, h_gens)?;
    let meets = fusion.intersection_sizes(table.len());
    let action = GroupAction::cosets(table.group(), h_gens, DEFAULT_INDEX_CAP)?;
    let degree = action.domain_size();
    let ratios: Vec<ExactRational> = table
        .classes()
        .iter()
        .zip(&meets)
        .map(|(c, m)| ratio(m.clone(), c.size.clone()))
        .collect();
    for (c, r) in table.classes().iter().zip(&ratios) {
        let fixed = ratio(action.fixed_point_count(&c.rep) as u64, degree as u64);
        assert_eq!(*r, fixed, "fusion and coset counts disagree on class {}", c.name);
    }
    Ok(ratios)
}

pub fn fpr(table: &ConjClassTable, z_class: usize, h_gens: &[Permutation]) -> Result<ExactRational> {
    if z_class >= table.len() {
        return Err(Error::OutOfRange(format!("class {z_class} of {}", table.len())));
    }
    Ok(fixed_point_ratios(table, h_gens)?.swap_remove(z_class))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRow {
    pub class: usize,
    pub name: String,
    pub sum: ExactRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    /// one row per class of prime order elements
    pub rows: Vec<WitnessRow>,
}

impl WitnessReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.sum < ratio(1, 1))
    }
}

/// `Σ_H fpr(z, G/H)` over the given overgroups of `y`, for each prime order
/// class `z^G`; `y` is a witness when every sum is below 1.
pub fn witness_criterion(table: &ConjClassTable, y: &Permutation, overgroups: &[Vec<Permutation>]) -> Result<WitnessReport> {
    let mut sums = vec![ratio(0, 1); table.len()];
    for h_gens in overgroups {
        let h = table.group().subgroup(h_gens)?;
        if !h.contains(y)? {
            return Err(Error::OutOfRange(format!("{y} is not in the overgroup <{}>", join(h_gens))));
        }
        for (s, r) in sums.iter_mut().zip(fixed_point_ratios(table, h_gens)?) {
            *s += r;
        }
    }
    let rows = table
        .classes()
        .iter()
        .enumerate()
        .filter(|(_, c)| is_prime(c.element_order))
        .map(|(i, c)| WitnessRow {
            class: i,
            name: c.name.clone(),
            sum: sums[i].clone(),
        })
        .collect();
    Ok(WitnessReport { rows })
}

fn join(perms: &[Permutation]) -> String {
    perms.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

/// Conjugate derangements `x` and `y = g⁻¹xg` generating `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationCertificate {
    pub group_generators: Vec<Permutation>,
    pub action: Provenance,
    pub x: Permutation,
    pub g: Permutation,
    pub checked_order: BigUint,
    pub seed: u64,
    pub budget: u64,
    /// index of the successful trial
    pub trial: u64,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    schema: u32,
    degree: usize,
    group_generators: Vec<String>,
    action: Provenance,
    x: String,
    g: String,
    y: String,
    checked_order: String,
    seed: u64,
    budget: u64,
    trial: u64,
}

impl GenerationCertificate {
    pub fn y(&self) -> Permutation {
        self.x.conjugate_by(&self.g)
    }

    pub fn degree(&self) -> usize {
        self.x.degree()
    }

    /// Re-checks every claim from the stored data alone: a fresh BSGS for
    /// `G` and for `<x, y>`, and the derangement property on a rebuilt action.
    pub fn verify(&self) -> Result<bool> {
        let group = PermGroup::new(self.degree(), &self.group_generators)?;
        if group.order() != self.checked_order || !group.contains(&self.x)? || !group.contains(&self.g)? {
            return Ok(false);
        }
        let y = self.y();
        let action = GroupAction::from_provenance(&group, &self.action, DEFAULT_INDEX_CAP)?;
        if !action.is_derangement(&self.x) || !action.is_derangement(&y) {
            return Ok(false);
        }
        let pair = PermGroup::new(self.degree(), &[self.x.clone(), y])?;
        Ok(pair.order() == self.checked_order)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = CertificateJson {
            schema: 1,
            degree: self.degree(),
            group_generators: self.group_generators.iter().map(|p| p.to_string()).collect(),
            action: self.action.clone(),
            x: self.x.to_string(),
            g: self.g.to_string(),
            y: self.y().to_string(),
            checked_order: self.checked_order.to_string(),
            seed: self.seed,
            budget: self.budget,
            trial: self.trial,
        };
        serde_json::to_value(c).expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let c: CertificateJson = serde_json::from_value(value.clone())?;
        let parse = |s: &str| Permutation::parse(c.degree, s);
        let checked_order = c
            .checked_order
            .parse()
            .map_err(|_| Error::Parse {
                line: 0,
                message: format!("bad order {:?}", c.checked_order),
            })?;
        let cert = GenerationCertificate {
            group_generators: c.group_generators.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            action: c.action,
            x: parse(&c.x)?,
            g: parse(&c.g)?,
            checked_order,
            seed: c.seed,
            budget: c.budget,
            trial: c.trial,
        };
        if cert.y() != parse(&c.y)? {
            return Err(Error::Parse {
                line: 0,
                message: "y is not x conjugated by g".into(),
            });
        }
        Ok(cert)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSearch {
    Found(Box<GenerationCertificate>),
    NotFound { budget: u64 },
}

impl PairSearch {
    pub fn certificate(&self) -> Option<&GenerationCertificate> {
        match self {
            PairSearch::Found(c) => Some(c),
            PairSearch::NotFound { .. } => None,
        }
    }
}

const TRIAL_CHUNK: u64 = 64;

/// Random search for conjugate derangements generating the group of
/// `action`. Trial `i` draws `x` uniformly from the derangements (by
/// rejection) and `g` uniformly from `G`, from its own ChaCha stream, so the
/// outcome depends only on `seed`, whatever the thread count.
pub fn find_conjugate_derangement_pair(action: &GroupAction, budget: u64, seed: u64) -> Result<PairSearch> {
    if !action.is_transitive() {
        return Err(Error::Intransitive);
    }
    if action.domain_size() < 2 {
        return Ok(PairSearch::NotFound { budget });
    }
    let group = action.group();
    let order = group.order();
    // δ ≥ 1/n, so this many draws miss a derangement with probability < e^-64
    let draws = 64 * action.domain_size() as u64;
    let trial = |i: u64| -> Option<(Permutation, Permutation)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let x = (0..draws)
            .map(|_| group.random_element_with(&mut rng))
            .find(|x| action.is_derangement(x))?;
        let g = group.random_element_with(&mut rng);
        let y = x.conjugate_by(&g);
        let pair = PermGroup::new(group.degree(), &[x.clone(), y]).ok()?;
        (pair.order() == order).then_some((x, g))
    };
    let mut start = 0;
    while start < budget {
        let end = (start + TRIAL_CHUNK).min(budget);
        let hit = (start..end).into_par_iter().find_map_first(|i| trial(i).map(|(x, g)| (i, x, g)));
        if let Some((i, x, g)) = hit {
            let cert = GenerationCertificate {
                group_generators: group.generators().to_vec(),
                action: action.provenance().clone(),
                x,
                g,
                checked_order: order,
                seed,
                budget,
                trial: i,
            };
            assert!(cert.verify()?, "certificate failed re-verification");
            return Ok(PairSearch::Found(Box::new(cert)));
        }
        start = end;
    }
    Ok(PairSearch::NotFound { budget })
}

/// A soluble subgroup attaining `α_s`.
#[derive(Clone, Debug)]
pub struct AlphaS {
    pub value: ExactRational,
    pub generators: Vec<Permutation>,
    pub subgroup_order: u64,
    /// soluble subgroups found, up to conjugacy
    pub soluble_classes: usize,
}

struct Elements<'a> {
    group: &'a PermGroup,
    perms: Vec<Permutation>,
    inverse: Vec<usize>,
    words: usize,
}

impl<'a> Elements<'a> {
    fn new(group: &'a PermGroup, n: u64) -> Self {
        let perms: Vec<Permutation> = (0..n).map(|r| group.unrank(r)).collect();
        let mut e = Elements {
            group,
            perms,
            inverse: Vec::new(),
            words: (n as usize).div_ceil(64),
        };
        e.inverse = (0..e.perms.len()).map(|i| e.index(&e.perms[i].inverse())).collect();
        e
    }

    fn index(&self, p: &Permutation) -> usize {
        self.group.rank(p).expect("closed under products") as usize
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.index(&self.perms[a].then(&self.perms[b]))
    }

    /// `<gens>` as (members, bitset); `None` once it exceeds half the group.
    fn closure(&self, gens: &[usize], identity: usize) -> Option<(Vec<usize>, Vec<u64>)> {
        let half = self.perms.len() / 2;
        let mut bits = vec![0u64; self.words];
        let mut members = vec![identity];
        bits[identity / 64] |= 1 << (identity % 64);
        let mut k = 0;
        while k < members.len() {
            for &s in gens {
                let m = self.mul(members[k], s);
                if bits[m / 64] >> (m % 64) & 1 == 0 {
                    bits[m / 64] |= 1 << (m % 64);
                    members.push(m);
                    if members.len() > half {
                        return None;
                    }
                }
            }
            k += 1;
        }
        Some((members, bits))
    }

    fn conjugate_bits(&self, members: &[usize], c: usize) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for &m in members {
            let x = self.mul(self.mul(self.inverse[c], m), c);
            bits[x / 64] |= 1 << (x % 64);
        }
        bits
    }
}

fn has(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `α_s(G) = min δ(G, H)` over core-free soluble `H < G`, by enumerating
/// the soluble subgroups up to conjugacy: each class representative `H` is
/// extended to `<H, g>` for one `g` per set `H g^k H` (`k` prime to `|g|`),
/// and non-soluble joins are dropped since their overgroups are too.
pub fn alpha_s_bruteforce(group: &PermGroup) -> Result<AlphaS> {
    let n = group.order_u64().filter(|&n| n <= SUBGROUP_SEARCH_CAP).ok_or_else(|| Error::OrderExceedsCap {
        order: group.order().to_string(),
        cap: SUBGROUP_SEARCH_CAP,
    })?;
    let table = conjugacy_classes(group)?;
    let el = Elements::new(group, n);
    let identity = el.index(&group.identity());
    let class_of: Vec<usize> = el.perms.iter().map(|p| table.class_of(p)).collect();
    let sizes: Vec<u64> = table.classes().iter().map(|c| c.size.to_u64().expect("small group")).collect();

    struct Class {
        gens: Vec<usize>,
        members: Vec<usize>,
        bits: Vec<u64>,
    }
    // exact subgroup -> soluble?
    let mut seen: HashMap<Vec<u64>, bool> = HashMap::new();
    let (members, bits) = el.closure(&[], identity).expect("trivial subgroup");
    seen.insert(bits.clone(), true);
    let mut classes = vec![Class {
        gens: Vec::new(),
        members,
        bits,
    }];
    let mut qi = 0;
    while qi < classes.len() {
        let mut covered = classes[qi].bits.clone();
        for g in 0..n as usize {
            if has(&covered, g) {
                continue;
            }
            // mark H g^k H for k prime to |g|: they give the same join
            let ord = el.perms[g].order();
            let mut power = g;
            for k in 1..=ord {
                if gcd(k, ord) == 1 {
                    for &a in &classes[qi].members {
                        let ag = el.mul(a, power);
                        for &b in &classes[qi].members {
                            let x = el.mul(ag, b);
                            covered[x / 64] |= 1 << (x % 64);
                        }
                    }
                }
                power = el.mul(power, g);
            }
            let mut gens = classes[qi].gens.clone();
            gens.push(g);
            let Some((members, bits)) = el.closure(&gens, identity) else {
                continue;
            };
            if members.len() as u64 == n || seen.contains_key(&bits) {
                continue;
            }
            let perms: Vec<Permutation> = gens.iter().map(|&i| el.perms[i].clone()).collect();
            let soluble = PermGroup::new(group.degree(), &perms)?.is_soluble();
            if !soluble {
                seen.insert(bits, false);
                continue;
            }
            for c in 0..n as usize {
                seen.entry(el.conjugate_bits(&members, c)).or_insert(true);
            }
            classes.push(Class { gens, members, bits });
        }
        qi += 1;
    }

    let mut best: Option<(ExactRational, usize)> = None;
    for (id, class) in classes.iter().enumerate() {
        let mut meets = vec![0u64; table.len()];
        for &m in &class.members {
            meets[class_of[m]] += 1;
        }
        let core_free = (0..table.len()).all(|c| c == class_of[identity] || meets[c] < sizes[c]);
        if !core_free {
            continue;
        }
        let deranged: u64 = (0..table.len()).filter(|&c| meets[c] == 0).map(|c| sizes[c]).sum();
        let delta = ratio(deranged, n);
        if best.as_ref().is_none_or(|(b, _)| delta < *b) {
            best = Some((delta, id));
        }
    }
    let (value, id) = best.ok_or_else(|| Error::OutOfRange("no core-free soluble subgroup".into()))?;
    debug_assert!(!value.is_zero());
    Ok(AlphaS {
        value,
        generators: classes[id].gens.iter().map(|&i| el.perms[i].clone()).collect(),
        subgroup_order: classes[id].members.len() as u64,
        soluble_classes: classes.len(),
    })
}
