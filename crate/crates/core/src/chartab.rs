//! Character tables, the Frobenius class multiplication formula, and the
//! brute-force class multiplication counts it is checked against.
//!
//! Tables are read from `.ctbl` JSON files:
//!
//! ```text
//! {"conductor": m, "group_order": n,
//!  "classes": [{"name": .., "size": .., "element_order": ..}, ..],
//!  "inverse_map": [..], "irreducibles": [["1", "-E(5)^2-E(5)^3", ..], ..]}
//! ```
//!
//! Entries are sums of rational multiples of powers of `E(d)` (`d | m`).
//! Writing a table produces a canonical form, so a canonical file survives
//! a load/save cycle byte for byte.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::ConjClassTable;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const S3_CTBL: &str = include_str!("../data/ctbl/s3.ctbl");
pub const S4_CTBL: &str = include_str!("../data/ctbl/s4.ctbl");
pub const A5_CTBL: &str = include_str!("../data/ctbl/a5.ctbl");
pub const L2_4_CTBL: &str = include_str!("../data/ctbl/l2_4.ctbl");
pub const L2_7_CTBL: &str = include_str!("../data/ctbl/l2_7.ctbl");
pub const L2_8_CTBL: &str = include_str!("../data/ctbl/l2_8.ctbl");

/// Shipped tables by name: `S3`, `S4`, `A5`, `L2(4)`, `L2(7)`, `L2(8)`.
pub fn shipped_table(name: &str) -> Result<CharacterTable> {
    let text = match name {
        "S3" => S3_CTBL,
        "S4" => S4_CTBL,
        "A5" => A5_CTBL,
        "L2(4)" => L2_4_CTBL,
        "L2(7)" => L2_7_CTBL,
        "L2(8)" => L2_8_CTBL,
        _ => return Err(Error::UnknownGroup(name.to_string())),
    };
    CharacterTable::from_json(text)
}

pub const SHIPPED_TABLES: [&str; 6] = ["S3", "S4", "A5", "L2(4)", "L2(7)", "L2(8)"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableClass {
    pub name: String,
    pub size: u64,
    pub element_order: u64,
}

#[derive(Serialize, Deserialize)]
struct CtblFile {
    conductor: u32,
    group_order: u64,
    classes: Vec<TableClass>,
    inverse_map: Vec<usize>,
    irreducibles: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    conductor: u32,
    group_order: u64,
    classes: Vec<TableClass>,
    inverse_map: Vec<usize>,
    irreducibles: Vec<Vec<Cyclotomic>>,
}

impl CharacterTable {
    /// Parses and validates a table.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CtblFile = serde_json::from_str(text)?;
        if file.conductor == 0 {
            return Err(Error::InvalidTable("conductor must be positive".into()));
        }
        let irreducibles = file
            .irreducibles
            .iter()
            .map(|row| row.iter().map(|e| Cyclotomic::parse(file.conductor, e)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let table = CharacterTable {
            conductor: file.conductor,
            group_order: file.group_order,
            classes: file.classes,
            inverse_map: file.inverse_map,
            irreducibles,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical JSON text, newline-terminated.
    pub fn to_json(&self) -> String {
        let file = CtblFile {
            conductor: self.conductor,
            group_order: self.group_order,
            classes: self.classes.clone(),
            inverse_map: self.inverse_map.clone(),
            irreducibles: self
                .irreducibles
                .iter()
                .map(|row| row.iter().map(|v| v.to_canonical_string()).collect())
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("serialisable");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn classes(&self) -> &[TableClass] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inverse_map
    }

    pub fn irreducibles(&self) -> &[Vec<Cyclotomic>] {
        &self.irreducibles
    }

    pub fn value(&self, chi: usize, class: usize) -> &Cyclotomic {
        &self.irreducibles[chi][class]
    }

    pub fn centralizer_order(&self, class: usize) -> u64 {
        self.group_order / self.classes[class].size
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidTable(msg.into())
    }

    /// Checks shape, degrees, the class equation, the inverse map and both
    /// orthogonality relations.
    pub fn validate(&self) -> Result<()> {
        let n = self.classes.len();
        if n == 0 || self.irreducibles.len() != n {
            return Err(Self::invalid(format!("{} characters for {n} classes", self.irreducibles.len())));
        }
        if let Some(i) = self.irreducibles.iter().position(|r| r.len() != n) {
            return Err(Self::invalid(format!("character {i} has {} values, expected {n}", self.irreducibles[i].len())));
        }
        if self.classes[0].size != 1 || self.classes[0].element_order != 1 {
            return Err(Self::invalid("first class must be the identity"));
        }
        if self.classes.iter().any(|c| c.size == 0 || !self.group_order.is_multiple_of(c.size)) {
            return Err(Self::invalid("class sizes must divide the group order"));
        }
        let total: u64 = self.classes.iter().map(|c| c.size).sum();
        if total != self.group_order {
            return Err(Self::invalid(format!("class sizes sum to {total}, not {}", self.group_order)));
        }
        let mut sorted = self.inverse_map.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Self::invalid("inverse_map is not a permutation of the classes"));
        }
        let mut degree_squares = BigInt::zero();
        for (i, row) in self.irreducibles.iter().enumerate() {
            match row[0].to_rational() {
                Some(d) if d.is_integer() && d.is_positive() => degree_squares += d.numer() * d.numer(),
                _ => return Err(Self::invalid(format!("character {i} has degree {}", row[0]))),
            }
            for k in 0..n {
                if row[self.inverse_map[k]] != row[k].conj() {
                    return Err(Self::invalid(format!(
                        "character {i}: value on class {} is not the conjugate of class {}",
                        self.classes[self.inverse_map[k]].name, self.classes[k].name
                    )));
                }
            }
        }
        if degree_squares != BigInt::from(self.group_order) {
            return Err(Self::invalid(format!("squared degrees sum to {degree_squares}, not {}", self.group_order)));
        }
        let m = self.conductor;
        let conj: Vec<Vec<Cyclotomic>> = self.irreducibles.iter().map(|r| r.iter().map(Cyclotomic::conj).collect()).collect();
        // (kind, i, j, expected, got, distance)
        let mut worst: Option<(&'static str, usize, usize, Cyclotomic, Cyclotomic, f64)> = None;
        let mut note = |kind, i, j, expected: Cyclotomic, got: Cyclotomic| {
            if expected != got {
                let dist = (&got - &expected).magnitude();
                if worst.as_ref().is_none_or(|w| dist > w.5) {
                    worst = Some((kind, i, j, expected, got, dist));
                }
            }
        };
        let rows: Vec<(usize, usize, Cyclotomic)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| {
                let mut acc = Cyclotomic::zero(m);
                for k in 0..n {
                    let term = (&self.irreducibles[i][k] * &conj[j][k]).scale(&BigRational::from_integer(self.classes[k].size.into()));
                    acc = &acc + &term;
                }
                (i, j, acc)
            })
            .collect();
        for (i, j, got) in rows {
            let expected = if i == j { self.group_order as i64 } else { 0 };
            note("row", i, j, Cyclotomic::from_integer(m, expected), got);
        }
        let cols: Vec<(usize, usize, Cyclotomic)> = (0..n)
            .flat_map(|k| (k..n).map(move |l| (k, l)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(k, l)| {
                let mut acc = Cyclotomic::zero(m);
                for i in 0..n {
                    acc = &acc + &(&self.irreducibles[i][k] * &conj[i][l]);
                }
                (k, l, acc)
            })
            .collect();
        for (k, l, got) in cols {
            let expected = if k == l { self.centralizer_order(k) as i64 } else { 0 };
            note("column", k, l, Cyclotomic::from_integer(m, expected), got);
        }
        if let Some((kind, row, col, expected, got, _)) = worst {
            return Err(Error::Orthogonality {
                kind,
                row,
                col,
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
        Ok(())
    }

    /// Number of pairs `(y₁, y₂) ∈ C₁ × C₂` with `y₁y₂ = x` for a fixed `x`
    /// in class `x`, from the characters.
    pub fn frobenius_count(&self, c1: usize, c2: usize, x: usize) -> Result<BigUint> {
        let m = self.conductor;
        let mut sum = Cyclotomic::zero(m);
        for row in &self.irreducibles {
            let degree = row[0].to_rational().expect("validated degree");
            let term = (&(&row[c1] * &row[c2]) * &row[x].conj()).scale(&degree.recip());
            sum = &sum + &term;
        }
        let factor = BigRational::new(
            BigInt::from(self.classes[c1].size) * BigInt::from(self.classes[c2].size),
            BigInt::from(self.group_order),
        );
        let value = sum
            .to_rational()
            .map(|r| r * factor)
            .ok_or_else(|| Error::NonIntegralCount(format!("irrational count for classes ({c1}, {c2}, {x})")))?;
        if !value.is_integer() || value.is_negative() {
            return Err(Error::NonIntegralCount(format!(
                "count {value} for classes ({}, {}, {})",
                self.classes[c1].name, self.classes[c2].name, self.classes[x].name
            )));
        }
        Ok(value.to_integer().to_biguint().expect("nonnegative"))
    }

    /// All class multiplication counts, `N[c1][c2][x]`.
    pub fn structure_constants(&self) -> Result<ProductCounts> {
        let n = self.num_classes();
        let counts = (0..n * n * n)
            .into_par_iter()
            .map(|t| {
                let (c1, c2, x) = (t / (n * n), (t / n) % n, t % n);
                self.frobenius_count(c1, c2, x).map(|v| v.to_u64().expect("count below group order"))
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(ProductCounts {
            n,
            sizes: self.classes.iter().map(|c| c.size).collect(),
            counts,
        })
    }

    /// Classes met by `C₁C₂`.
    pub fn class_product_via_characters(&self, c1: usize, c2: usize) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for x in 0..self.num_classes() {
            if !self.frobenius_count(c1, c2, x)?.is_zero() {
                out.insert(x);
            }
        }
        Ok(out)
    }
}

/// Class multiplication counts: `get(i, j, k)` is the number of pairs
/// `(a, b) ∈ C_i × C_j` with `ab` equal to a fixed element of `C_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCounts {
    n: usize,
    sizes: Vec<u64>,
    counts: Vec<u64>,
}

/// Largest group order for brute-force product counts.
pub const BRUTE_FORCE_CAP: u64 = 1_000_000;

impl ProductCounts {
    pub fn num_classes(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.counts[(i * self.n + j) * self.n + k]
    }

    pub fn class_size(&self, i: usize) -> u64 {
        self.sizes[i]
    }

    /// Classes met by `C_i C_j`.
    pub fn product(&self, i: usize, j: usize) -> BTreeSet<usize> {
        (0..self.n).filter(|&k| self.get(i, j, k) > 0).collect()
    }

    /// `Σ_k N(i, j, k) |C_k|`, which must equal `|C_i||C_j|`.
    pub fn mass(&self, i: usize, j: usize) -> u128 {
        (0..self.n).map(|k| self.get(i, j, k) as u128 * self.sizes[k] as u128).sum()
    }

    /// The counts with classes renumbered: entry `(i, j, k)` of the result
    /// is entry `(map[i], map[j], map[k])` of `self`.
    pub fn relabel(&self, map: &[usize]) -> ProductCounts {
        let n = self.n;
        let mut counts = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    counts[(i * n + j) * n + k] = self.get(map[i], map[j], map[k]);
                }
            }
        }
        ProductCounts {
            n,
            sizes: map.iter().map(|&i| self.sizes[i]).collect(),
            counts,
        }
    }
}

/// Counts every factorisation `z = c · (c⁻¹z)` over all `c ∈ G`, one fixed
/// `z` per class. Needs an indexed class table and `|G| ≤ cap`.
pub fn brute_force_product_counts(table: &ConjClassTable, cap: u64) -> Result<ProductCounts> {
    let group = table.group();
    let order = group.order_u64().filter(|&o| o <= cap).ok_or_else(|| Error::OrderExceedsCap {
        order: group.order().to_string(),
        cap,
    })?;
    if !table.is_indexed() {
        return Err(Error::BudgetExceeded("product counts need an exhaustive class table".into()));
    }
    let n = table.len();
    let elements: Vec<(Permutation, usize)> = group
        .elements(order)?
        .map(|c| {
            let class = table.class_of(&c);
            (c.inverse(), class)
        })
        .collect();
    let columns: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let z = &table.get(k).rep;
            let mut col = vec![0u64; n * n];
            for (c_inv, i) in &elements {
                let j = table.class_of(&c_inv.then(z));
                col[i * n + j] += 1;
            }
            col
        })
        .collect();
    let mut counts = vec![0; n * n * n];
    for (k, col) in columns.iter().enumerate() {
        for ij in 0..n * n {
            counts[ij * n + k] = col[ij];
        }
    }
    Ok(ProductCounts {
        n,
        sizes: table.classes().iter().map(|c| c.size.to_u64().expect("bounded by cap")).collect(),
        counts,
    })
}

/// A bijection from the classes of `chars` to those of `classes` that
/// preserves sizes, element orders and all class multiplication counts.
pub fn match_classes(chars: &CharacterTable, classes: &ConjClassTable, products: &ProductCounts) -> Result<Vec<usize>> {
    let n = chars.num_classes();
    if n != classes.len() {
        return Err(Error::InvalidTable(format!("{n} table classes against {} group classes", classes.len())));
    }
    let table_counts = chars.structure_constants()?;
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    let c = classes.get(j);
                    c.element_order == chars.classes()[i].element_order && c.size == BigUint::from(chars.classes()[i].size)
                })
                .collect()
        })
        .collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn consistent(i: usize, map: &[usize], t: &ProductCounts, g: &ProductCounts) -> bool {
        let assigned: Vec<usize> = (0..=i).collect();
        for &a in &assigned {
            for &b in &assigned {
                for &c in &assigned {
                    if a != i && b != i && c != i {
                        continue;
                    }
                    if t.get(a, b, c) != g.get(map[a], map[b], map[c]) {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn search(i: usize, cand: &[Vec<usize>], map: &mut Vec<usize>, used: &mut Vec<bool>, t: &ProductCounts, g: &ProductCounts) -> bool {
        if i == cand.len() {
            return true;
        }
        for &j in &cand[i] {
            if used[j] {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if consistent(i, map, t, g) && search(i + 1, cand, map, used, t, g) {
                return true;
            }
            used[j] = false;
        }
        map[i] = usize::MAX;
        false
    }
    if search(0, &candidates, &mut map, &mut used, &table_counts, products) {
        Ok(map)
    } else {
        Err(Error::InvalidTable("no class correspondence preserves the multiplication counts".into()))
    }
}

/// Integer degrees of the characters, for convenience.
pub fn degrees(table: &CharacterTable) -> Vec<BigInt> {
    table
        .irreducibles()
        .iter()
        .map(|r| r[0].to_rational().expect("validated").to_integer())
        .collect()
}

/// `Σ χ(1)²`, equal to the group order for a valid table.
pub fn degree_square_sum(table: &CharacterTable) -> BigInt {
    degrees(table).iter().map(|d| d * d).fold(BigInt::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{alt, psl2, sym};
    use crate::classes::conjugacy_classes;

    #[test]
    fn shipped_tables_load_and_roundtrip() {
        let texts = [S3_CTBL, S4_CTBL, A5_CTBL, L2_4_CTBL, L2_7_CTBL, L2_8_CTBL];
        for (name, text) in SHIPPED_TABLES.iter().zip(texts) {
            let t = shipped_table(name).unwrap();
            assert_eq!(t.to_json(), text, "{name} is not in canonical form");
            assert_eq!(degree_square_sum(&t), BigInt::from(t.group_order()));
        }
        let s3 = shipped_table("S3").unwrap();
        assert_eq!(degrees(&s3), vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)]);
        assert_eq!(shipped_table("A5").unwrap().conductor(), 30);
    }

    #[test]
    fn corrupted_entry_is_rejected() {
        let bad = A5_CTBL.replacen("\"-1\"", "\"-2\"", 1);
        match CharacterTable::from_json(&bad) {
            Err(Error::Orthogonality { .. }) | Err(Error::InvalidTable(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
        let mut t: serde_json::Value = serde_json::from_str(S3_CTBL).unwrap();
        t["irreducibles"][2][2] = "1".into();
        assert!(matches!(CharacterTable::from_json(&t.to_string()), Err(Error::Orthogonality { .. })));
        let mut t: serde_json::Value = serde_json::from_str(S3_CTBL).unwrap();
        t["group_order"] = 7.into();
        assert!(CharacterTable::from_json(&t.to_string()).is_err());
        assert!(CharacterTable::from_json("{").is_err());
    }

    #[test]
    fn identity_class_products() {
        let t = shipped_table("S4").unwrap();
        for c in 0..t.num_classes() {
            for x in 0..t.num_classes() {
                let expect = if c == x { 1u32 } else { 0 };
                assert_eq!(t.frobenius_count(0, c, x).unwrap(), BigUint::from(expect));
            }
            assert_eq!(t.class_product_via_characters(0, c).unwrap(), BTreeSet::from([c]));
        }
    }

    #[test]
    fn s3_transpositions() {
        let t = shipped_table("S3").unwrap();
        let (two, three) = (t.index_of("2a").unwrap(), t.index_of("3a").unwrap());
        assert_eq!(t.frobenius_count(two, two, three).unwrap(), BigUint::from(3u32));
        // oracle: ordered pairs of transpositions with product (1,2,3)
        let g = sym(3);
        let target = Permutation::parse(3, "(1,2,3)").unwrap();
        let transpositions: Vec<Permutation> = g.elements(6).unwrap().filter(|x| x.order() == 2).collect();
        let pairs = transpositions
            .iter()
            .flat_map(|a| transpositions.iter().map(move |b| a.then(b)))
            .filter(|p| *p == target)
            .count();
        assert_eq!(pairs, 3);
    }

    #[test]
    fn character_path_matches_brute_force() {
        let cases = [("S3", sym(3)), ("S4", sym(4)), ("A5", alt(5).unwrap()), ("L2(7)", psl2(7).unwrap())];
        for (name, g) in cases {
            let table = shipped_table(name).unwrap();
            let classes = conjugacy_classes(&g).unwrap();
            let brute = brute_force_product_counts(&classes, 100_000).unwrap();
            let map = match_classes(&table, &classes, &brute).unwrap();
            assert_eq!(table.structure_constants().unwrap(), brute.relabel(&map), "{name}");
        }
    }

    #[test]
    fn mass_conservation() {
        for name in SHIPPED_TABLES {
            let t = shipped_table(name).unwrap();
            let counts = t.structure_constants().unwrap();
            for i in 0..t.num_classes() {
                for j in 0..t.num_classes() {
                    let expect = t.classes()[i].size as u128 * t.classes()[j].size as u128;
                    assert_eq!(counts.mass(i, j), expect, "{name}");
                }
            }
        }
    }

    #[test]
    fn brute_force_cap() {
        let classes = conjugacy_classes(&alt(5).unwrap()).unwrap();
        assert!(matches!(brute_force_product_counts(&classes, 10), Err(Error::OrderExceedsCap { .. })));
    }

    /// Rewrites the shipped fixtures in canonical form.
    #[test]
    #[ignore]
    fn regenerate_fixtures() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ctbl");
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let table = CharacterTable::load(&path).unwrap();
            table.save(&path).unwrap();
        }
    }
}
