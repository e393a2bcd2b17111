//! Batch verification suites: each runs a list of named exact checks and
//! records pass or fail with a short detail line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::actions::{GroupAction, DEFAULT_INDEX_CAP};
use crate::alt_comb::{abc_all, cnk, cnk_recurrence_bound, f_n1_closed_form, fnk};
use crate::catalog::{alt, l2_7_s4_generators, m11_l2_11_generators, mathieu, psl2, sym, Mathieu};
use crate::chartab::{brute_force_product_counts, match_classes, shipped_table, CharacterTable, BRUTE_FORCE_CAP, SHIPPED_TABLES};
use crate::classes::{conjugacy_classes, ConjClassTable};
use crate::cyclotomic::Cyclotomic;
use crate::derangement::{decomposition_tag, derangement_report, width, DerangementReport, Width, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::families::{crosscheck_family, Family, FamilyCase};
use crate::genpair::{alpha_s_bruteforce, find_conjugate_derangement_pair, PairSearch, DEFAULT_BUDGET};
use crate::group::PermGroup;
use crate::rational::{fmt_ratio, int, ratio, ExactRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    SporSmall,
    Alt,
    Psl2,
    Frobenius,
    Genpair,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::SporSmall, Suite::Alt, Suite::Psl2, Suite::Frobenius, Suite::Genpair];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SporSmall => "spor-small",
            Suite::Alt => "alt",
            Suite::Psl2 => "psl2",
            Suite::Frobenius => "frobenius",
            Suite::Genpair => "genpair",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ledger {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Ledger {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark}  {:<48} {:>8.2}s  {}", c.name, c.seconds, c.detail)?;
        }
        Ok(())
    }
}

struct Runner {
    checks: Vec<Check>,
}

impl Runner {
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}

fn equal(got: &ExactRational, want: &ExactRational) -> (bool, String) {
    (got == want, format!("got {}, expected {}", fmt_ratio(got), fmt_ratio(want)))
}

pub fn natural_report(group: &PermGroup) -> Result<(ConjClassTable, DerangementReport)> {
    let table = conjugacy_classes(group)?;
    let report = derangement_report(&table, &GroupAction::natural(group))?;
    Ok((table, report))
}

pub fn run_suite(suite: Suite, seed: u64) -> Ledger {
    let mut r = Runner { checks: Vec::new() };
    match suite {
        Suite::SporSmall => spor_small(&mut r),
        Suite::Alt => alt_suite(&mut r),
        Suite::Psl2 => psl2_suite(&mut r),
        Suite::Frobenius => frobenius_suite(&mut r),
        Suite::Genpair => genpair_suite(&mut r, seed),
    }
    Ledger { suite, checks: r.checks }
}

fn spor_small(r: &mut Runner) {
    let m11 = mathieu(Mathieu::M11);
    r.check("M11 degree 11 delta = 23/66", || {
        let (_, rep) = natural_report(&m11)?;
        Ok(equal(&rep.delta, &ratio(23, 66)))
    });
    r.check("M11 degree 11 width = 2", || {
        let (table, rep) = natural_report(&m11)?;
        let products = brute_force_product_counts(&table, BRUTE_FORCE_CAP)?;
        let w = width(&rep, Some(&products), DEFAULT_K_MAX)?;
        Ok((w == Width::Finite(2), format!("width {w}")))
    });
    r.check("M11 degree 12 is elusive", || {
        let table = conjugacy_classes(&m11)?;
        let action = GroupAction::cosets(&m11, &m11_l2_11_generators(), 100)?;
        let rep = derangement_report(&table, &action)?;
        Ok((rep.is_elusive() && rep.degree == 12, format!("delta {}", fmt_ratio(&rep.delta))))
    });
    r.check("M12 degree 12 delta = 107/288", || {
        let (_, rep) = natural_report(&mathieu(Mathieu::M12))?;
        Ok(equal(&rep.delta, &ratio(107, 288)))
    });
}

fn alt_suite(r: &mut Runner) {
    let printed = [
        (7, 2, ratio(38, 63)),
        (8, 2, ratio(7, 12)),
        (9, 2, ratio(3691, 6480)),
        (4, 3, ratio(3, 4)),
        (5, 3, ratio(3, 5)),
        (6, 3, ratio(3, 8)),
        (7, 3, ratio(18, 35)),
        (8, 3, ratio(25, 48)),
    ];
    for (n, k, v) in printed {
        r.check(format!("c({n},{k}) = {}", fmt_ratio(&v)), || Ok(equal(&cnk(n, k), &v)));
    }
    r.check("c(k,k) = 1 and c(n,k) = c(n,n-k), n <= 14", || {
        let ok = (1..=14).all(|n| cnk(n, n) == int(1) && (1..n).all(|k| cnk(n, k) == cnk(n, n - k)));
        Ok((ok, String::new()))
    });
    r.check("f(n,1) closed form, 5 <= n <= 14", || {
        let bad: Vec<u32> = (5..=14).filter(|&n| fnk(n, 1) != f_n1_closed_form(n)).collect();
        Ok((bad.is_empty(), format!("mismatches {bad:?}")))
    });
    r.check("f(n,k) <= f(n,1), 1 <= k < n/2, 5 <= n <= 14", || {
        let mut bad = Vec::new();
        for n in 5..=14u32 {
            let table = abc_all(n);
            for k in 2..=(n - 1) / 2 {
                if table[k as usize].a > table[1].a {
                    bad.push((n, k));
                }
            }
        }
        Ok((bad.is_empty(), format!("violations {bad:?}")))
    });
    r.check("c(n,k) <= recurrence bound (k = 2: 7..20, k = 3: 9..20)", || {
        let ok = (7..=20).all(|n| cnk(n, 2) <= cnk_recurrence_bound(n, 2)) && (9..=20).all(|n| cnk(n, 3) <= cnk_recurrence_bound(n, 3));
        Ok((ok, String::new()))
    });
    r.check("2 + sum c(m,2), m = 2..9, equals 341233/45360", || {
        let head = (2..=9).map(|m| cnk(m, 2)).fold(int(2), |a, c| a + c);
        Ok(equal(&head, &ratio(341233, 45360)))
    });
    r.check("induction bound < 63/100 for 13 <= n <= 30", || {
        let head = ratio(341233, 45360);
        let bound = ratio(63, 100);
        let ok = (13..=30u32).all(|n| (head.clone() + &bound * int(n - 12)) / int(n) < bound);
        Ok((ok, String::new()))
    });
    r.check("abc(n,k) agrees with group brute force, n <= 9", || {
        for n in 3..=9usize {
            let (a_n, s_n) = (alt(n)?, sym(n));
            let (ta, ts) = (conjugacy_classes(&a_n)?, conjugacy_classes(&s_n)?);
            let table = abc_all(n as u32);
            for k in 1..n {
                let fa = int(1) - derangement_report(&ta, &GroupAction::ksubsets(&a_n, k, 1_000_000)?)?.delta;
                let fs = int(1) - derangement_report(&ts, &GroupAction::ksubsets(&s_n, k, 1_000_000)?)?.delta;
                if table[k].a != fa || table[k].b != int(2) * fs - &fa {
                    return Ok((false, format!("mismatch at n = {n}, k = {k}")));
                }
            }
        }
        Ok((true, String::new()))
    });
    for (n, v) in [(5, ratio(1, 3)), (6, ratio(2, 5)), (7, ratio(17, 35))] {
        r.check(format!("alpha_s(A{n}) = {}", fmt_ratio(&v)), || {
            let a = alpha_s_bruteforce(&alt(n)?)?;
            let (ok, detail) = equal(&a.value, &v);
            Ok((ok, format!("{detail}, |H| = {}", a.subgroup_order)))
        });
    }
}

pub const PSL2_Q: [u64; 7] = [4, 5, 7, 8, 9, 11, 13];

fn psl2_suite(r: &mut Runner) {
    for family in [Family::Psl2Borel, Family::Psl2TorusSplit, Family::Psl2TorusNonsplit] {
        r.check(format!("{family} closed form = brute force, q in {PSL2_Q:?}"), || {
            let mut bad = Vec::new();
            for q in PSL2_Q {
                let c = crosscheck_family(&FamilyCase::new(family, q)?);
                if !c.agrees() {
                    bad.push(q);
                }
            }
            Ok((bad.is_empty(), format!("mismatches at q = {bad:?}")))
        });
    }
    r.check("psl2-subfield3 q = 27 closed form = brute force = 81/91", || {
        let c = crosscheck_family(&FamilyCase::new(Family::Psl2Subfield3, 27)?);
        let got = c.brute_force.clone().unwrap_or_else(|| int(0));
        Ok((c.agrees() && got == ratio(81, 91), format!("brute force {}", fmt_ratio(&got))))
    });
    r.check("L2(7) on 7 cosets of S4: width 2, tag C2∪CD", || {
        let g = psl2(7)?;
        let table = conjugacy_classes(&g)?;
        let action = GroupAction::cosets(&g, &l2_7_s4_generators(), 100)?;
        let rep = derangement_report(&table, &action)?;
        let products = brute_force_product_counts(&table, BRUTE_FORCE_CAP)?;
        let w = width(&rep, Some(&products), DEFAULT_K_MAX)?;
        let tag = decomposition_tag(&rep, &products);
        Ok((w == Width::Finite(2) && tag == Some("C2∪CD"), format!("width {w}, tag {tag:?}")))
    });
    r.check("L2(8) Borel action: delta = 4/9, width 2", || {
        let g = psl2(8)?;
        let (table, rep) = natural_report(&g)?;
        let products = brute_force_product_counts(&table, BRUTE_FORCE_CAP)?;
        let w = width(&rep, Some(&products), DEFAULT_K_MAX)?;
        let (ok, detail) = equal(&rep.delta, &ratio(4, 9));
        Ok((ok && w == Width::Finite(2), format!("{detail}, width {w}")))
    });
}

/// The class of `z²` read off the table: its column is the image of the
/// column of `z` under `E(m) ↦ E(m)^k` with `k ≡ 2 (mod |z|)` prime to the
/// conductor `m`.
pub fn square_class(table: &CharacterTable, z: usize) -> Option<usize> {
    let order = table.classes()[z].element_order;
    let m = table.conductor() as u64;
    let k = (0..m).map(|j| 2 + j * order).find(|&k| gcd(k, m) == 1)?;
    let target: Vec<Cyclotomic> = table.irreducibles().iter().map(|row| row[z].galois(k as i64)).collect();
    (0..table.num_classes()).find(|&c| table.irreducibles().iter().zip(&target).all(|(row, t)| (&row[c] - t).is_zero()))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `N(x)` for `C = z^G`, `D = (z²)^G`, `|z| = q+1`, over nontrivial classes `x`.
pub fn rank_one_counts(table: &CharacterTable, q: u64) -> Result<Vec<(String, u64)>> {
    let z = (0..table.num_classes())
        .find(|&c| table.classes()[c].element_order == q + 1)
        .ok_or_else(|| Error::InvalidTable(format!("no class of order {}", q + 1)))?;
    let d = square_class(table, z).ok_or_else(|| Error::InvalidTable("no class of z²".into()))?;
    (1..table.num_classes())
        .map(|x| {
            let n = table.frobenius_count(z, d, x)?;
            Ok((table.classes()[x].name.clone(), u64::try_from(n).unwrap_or(u64::MAX)))
        })
        .collect()
}

/// Character-table structure constants against the brute-force tensor of
/// a permutation model of the same group.
pub fn character_path_matches(chars: &CharacterTable, group: &PermGroup) -> Result<bool> {
    let classes = conjugacy_classes(group)?;
    let brute = brute_force_product_counts(&classes, BRUTE_FORCE_CAP)?;
    let map = match_classes(chars, &classes, &brute)?;
    Ok(chars.structure_constants()? == brute.relabel(&map))
}

type Build = fn() -> Result<PermGroup>;

fn frobenius_suite(r: &mut Runner) {
    for name in SHIPPED_TABLES {
        r.check(format!("{name} table is valid and conserves mass"), || {
            let t = shipped_table(name)?;
            t.validate()?;
            let p = t.structure_constants()?;
            let n = t.num_classes();
            let ok = (0..n).all(|i| (0..n).all(|j| p.mass(i, j) == p.class_size(i) as u128 * p.class_size(j) as u128));
            Ok((ok, format!("{n} classes")))
        });
    }
    for (name, q) in [("L2(4)", 4u64), ("L2(8)", 8)] {
        r.check(format!("{name}: N(x) in {{q, q-1, q+1, 1}} for C = z^G, D = (z^2)^G"), || {
            let counts = rank_one_counts(&shipped_table(name)?, q)?;
            let allowed = [q, q - 1, q + 1, 1];
            let ok = counts.iter().all(|(_, n)| allowed.contains(n));
            let shown: Vec<String> = counts.iter().map(|(c, n)| format!("{c}:{n}")).collect();
            Ok((ok, shown.join(" ")))
        });
    }
    let models: [(&str, Build); 4] = [
        ("S3", || Ok(sym(3))),
        ("S4", || Ok(sym(4))),
        ("A5", || alt(5)),
        ("L2(7)", || psl2(7)),
    ];
    for (name, build) in models {
        r.check(format!("{name}: Frobenius counts = brute-force tensor"), || {
            let ok = character_path_matches(&shipped_table(name)?, &build()?)?;
            Ok((ok, String::new()))
        });
    }
}

/// The groups and actions of the generation suite, by label.
pub fn generation_cases() -> Result<Vec<(String, GroupAction)>> {
    let mut out = Vec::new();
    for n in 5..=12 {
        out.push((format!("A{n} natural"), GroupAction::natural(&alt(n)?)));
    }
    for n in 5..=9 {
        out.push((format!("A{n} on 2-subsets"), GroupAction::ksubsets(&alt(n)?, 2, DEFAULT_INDEX_CAP)?));
    }
    let m11 = mathieu(Mathieu::M11);
    out.push(("M11 degree 11".into(), GroupAction::natural(&m11)));
    out.push(("M11 degree 12".into(), GroupAction::cosets(&m11, &m11_l2_11_generators(), 100)?));
    out.push(("M12 degree 12".into(), GroupAction::natural(&mathieu(Mathieu::M12))));
    for q in PSL2_Q {
        out.push((format!("L2({q}) Borel"), GroupAction::natural(&psl2(q as u32)?)));
    }
    Ok(out)
}

fn genpair_suite(r: &mut Runner, seed: u64) {
    let cases = match generation_cases() {
        Ok(c) => c,
        Err(e) => {
            r.check("build generation cases", || Err(e));
            return;
        }
    };
    for (label, action) in cases {
        r.check(format!("{label}: conjugate derangements generate"), || {
            match find_conjugate_derangement_pair(&action, DEFAULT_BUDGET, seed)? {
                PairSearch::Found(c) => Ok((c.verify()?, format!("|x| = {}, trial {}", c.x.order(), c.trial))),
                PairSearch::NotFound { budget } => Ok((false, format!("none in {budget} trials"))),
            }
        });
    }
}
