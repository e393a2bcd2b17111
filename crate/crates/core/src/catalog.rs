//! Built-in groups and the `.grp` file format.
//!
//! A `.grp` file is UTF-8 with LF line endings. Lines starting with `#` and
//! blank lines are ignored; the first remaining line is `degree N`, every
//! following line one generator in 1-based cycle notation.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};
use crate::group::PermGroup;
use crate::perm::{parse_cycles, Permutation, Point};

pub const M11_GRP: &str = include_str!("../data/m11.grp");
pub const M12_GRP: &str = include_str!("../data/m12.grp");
/// Generators of L2(11) inside the degree-11 M11.
pub const M11_L2_11_GRP: &str = include_str!("../data/m11_l2_11.grp");
/// Generators of one S4 inside `psl2(7)`.
pub const L2_7_S4_GRP: &str = include_str!("../data/l2_7_s4.grp");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub description: String,
}

impl GroupSpec {
    pub fn build(&self) -> PermGroup {
        PermGroup::new(self.degree, &self.generators).expect("generators validated at parse time")
    }

    /// Serialises back to `.grp` text.
    pub fn to_grp(&self) -> String {
        let mut out = String::new();
        if !self.description.is_empty() {
            out.push_str(&format!("# {}\n", self.description));
        }
        out.push_str(&format!("degree {}\n", self.degree));
        for g in &self.generators {
            out.push_str(&format!("{g}\n"));
        }
        out
    }
}

pub fn parse_group(name: &str, text: &str) -> Result<GroupSpec> {
    let mut degree: Option<usize> = None;
    let mut generators = Vec::new();
    let mut description = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if description.is_empty() {
                description = comment.trim().to_string();
            }
            continue;
        }
        match degree {
            None => {
                let n = line
                    .strip_prefix("degree")
                    .map(str::trim)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("expected `degree N`, found `{line}`"),
                    })?;
                degree = Some(n);
            }
            Some(n) => {
                let g = parse_cycles(n, line).map_err(|message| Error::Parse { line: line_no, message })?;
                generators.push(g);
            }
        }
    }
    let degree = degree.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing `degree N` line".into(),
    })?;
    Ok(GroupSpec {
        name: name.to_string(),
        degree,
        generators,
        description,
    })
}

pub fn load_group(path: impl AsRef<Path>) -> Result<GroupSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_group(&name, &text)
}

fn cycle(n: usize, points: impl IntoIterator<Item = usize>) -> Permutation {
    let pts: Vec<Point> = points.into_iter().map(|p| p as Point).collect();
    Permutation::from_cycles(n, &[&pts]).expect("distinct points")
}

pub fn sym(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(cycle(n, 0..n));
        gens.push(cycle(n, 0..2));
    }
    PermGroup::new(n, &gens).expect("consistent degree")
}

/// `A_n` for `n >= 3`, generated by 3-cycles `(0,1,i)`.
pub fn alt(n: usize) -> Result<PermGroup> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("alt({n}) needs n >= 3")));
    }
    let gens: Vec<Permutation> = (2..n).map(|i| cycle(n, [0, 1, i])).collect();
    PermGroup::new(n, &gens)
}

/// Cyclic group of order `n` acting regularly on `n` points.
pub fn cyclic(n: usize) -> PermGroup {
    let gens = if n >= 2 { vec![cycle(n, 0..n)] } else { vec![] };
    PermGroup::new(n, &gens).expect("consistent degree")
}

/// PSL2(q) on the projective line.
///
/// Point `x < q` is `[x : 1]` with `x` the integer encoding of the field
/// element (see [`GaloisField`]); point `q` is `[1 : 0]`.
#[derive(Clone, Debug)]
pub struct ProjectiveLine {
    field: GaloisField,
}

impl ProjectiveLine {
    pub fn new(q: u32) -> Result<Self> {
        Ok(ProjectiveLine {
            field: GaloisField::new(q)?,
        })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn infinity(&self) -> Point {
        self.field.order()
    }

    pub fn degree(&self) -> usize {
        self.field.order() as usize + 1
    }

    /// The permutation induced by `x ↦ (a x + b) / (c x + d)`; `None` if
    /// the matrix is singular.
    pub fn mobius(&self, a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Option<Permutation> {
        let k = &self.field;
        if k.sub(k.mul(a, d), k.mul(b, c)) == k.zero() {
            return None;
        }
        let inf = self.infinity();
        let images: Vec<Point> = (0..=inf)
            .map(|pt| {
                // homogeneous coordinates (x : y)
                let (x, y) = if pt == inf { (k.one(), k.zero()) } else { (FieldElement(pt), k.one()) };
                let num = k.add(k.mul(a, x), k.mul(b, y));
                let den = k.add(k.mul(c, x), k.mul(d, y));
                match k.inv(den) {
                    None => inf,
                    Some(inv) => k.mul(num, inv).0,
                }
            })
            .collect();
        Some(Permutation::from_images(images).expect("nonsingular Möbius map"))
    }

    /// `x ↦ x + 1`, `x ↦ λ² x` and `x ↦ -1/x`, with `λ` primitive.
    pub fn standard_generators(&self) -> Vec<Permutation> {
        let k = &self.field;
        let (zero, one) = (k.zero(), k.one());
        let lam2 = k.mul(k.primitive_element(), k.primitive_element());
        vec![
            self.mobius(one, one, zero, one).unwrap(),
            self.mobius(lam2, zero, zero, one).unwrap(),
            self.mobius(zero, k.neg(one), one, zero).unwrap(),
        ]
    }

    /// `<x ↦ x + 1, x ↦ -1/x>`: the subfield group PSL2(p).
    pub fn prime_subfield_generators(&self) -> Vec<Permutation> {
        let k = &self.field;
        let (zero, one) = (k.zero(), k.one());
        vec![
            self.mobius(one, one, zero, one).unwrap(),
            self.mobius(zero, k.neg(one), one, zero).unwrap(),
        ]
    }

    pub fn group(&self) -> PermGroup {
        PermGroup::new(self.degree(), &self.standard_generators()).expect("consistent degree")
    }
}

pub fn psl2(q: u32) -> Result<PermGroup> {
    Ok(ProjectiveLine::new(q)?.group())
}

/// `q(q²-1)/(2, q-1)`.
pub fn psl2_order(q: u64) -> u64 {
    let d = if q % 2 == 1 { 2 } else { 1 };
    q * (q * q - 1) / d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mathieu {
    M11,
    M12,
}

impl std::str::FromStr for Mathieu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "M11" => Ok(Mathieu::M11),
            "M12" => Ok(Mathieu::M12),
            _ => Err(Error::UnknownGroup(s.to_string())),
        }
    }
}

pub fn mathieu(which: Mathieu) -> PermGroup {
    let text = match which {
        Mathieu::M11 => M11_GRP,
        Mathieu::M12 => M12_GRP,
    };
    parse_group("mathieu", text).expect("shipped data parses").build()
}

pub fn m11_l2_11_generators() -> Vec<Permutation> {
    parse_group("m11_l2_11", M11_L2_11_GRP)
        .expect("shipped data parses")
        .generators
}

pub fn l2_7_s4_generators() -> Vec<Permutation> {
    parse_group("l2_7_s4", L2_7_S4_GRP).expect("shipped data parses").generators
}

/// Resolves built-in names: `M11`, `M12`, `alt:N` / `AN`, `sym:N` / `SN`,
/// `L2(q)` / `psl2:q`, `C:N` / `CN` (regular cyclic).
pub fn builtin(name: &str) -> Result<GroupSpec> {
    let unknown = || Error::UnknownGroup(name.to_string());
    let trimmed = name.trim();
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| unknown());
    let group = if let Ok(m) = trimmed.parse::<Mathieu>() {
        mathieu(m)
    } else if let Some(rest) = trimmed.strip_prefix("alt:") {
        alt(num(rest)?)?
    } else if let Some(rest) = trimmed.strip_prefix("sym:") {
        sym(num(rest)?)
    } else if let Some(rest) = trimmed.strip_prefix("psl2:") {
        psl2(num(rest)? as u32)?
    } else if let Some(rest) = trimmed.strip_prefix("L2(").and_then(|r| r.strip_suffix(')')) {
        psl2(num(rest)? as u32)?
    } else if let Some(rest) = trimmed.strip_prefix("cyclic:").or_else(|| trimmed.strip_prefix("C:")) {
        cyclic(num(rest)?)
    } else if let Some(rest) = trimmed.strip_prefix('A').filter(|r| !r.is_empty()) {
        alt(num(rest)?)?
    } else if let Some(rest) = trimmed.strip_prefix('S').filter(|r| !r.is_empty()) {
        sym(num(rest)?)
    } else if let Some(rest) = trimmed.strip_prefix('C').filter(|r| !r.is_empty()) {
        cyclic(num(rest)?)
    } else {
        return Err(unknown());
    };
    Ok(GroupSpec {
        name: trimmed.to_string(),
        degree: group.degree(),
        generators: group.generators().to_vec(),
        description: format!("built-in {trimmed}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn order(g: &PermGroup) -> u64 {
        g.order_u64().unwrap()
    }

    /// Number of orbits on ordered k-tuples of distinct points.
    fn tuple_orbits(g: &PermGroup, k: usize) -> usize {
        use std::collections::HashSet;
        let n = g.degree();
        let mut seen: HashSet<Vec<Point>> = HashSet::new();
        let mut orbits = 0;
        let mut tuple = Vec::new();
        fn rec(
            n: usize,
            k: usize,
            tuple: &mut Vec<Point>,
            g: &PermGroup,
            seen: &mut HashSet<Vec<Point>>,
            orbits: &mut usize,
        ) {
            if tuple.len() == k {
                if seen.contains(tuple) {
                    return;
                }
                *orbits += 1;
                let mut stack = vec![tuple.clone()];
                seen.insert(tuple.clone());
                while let Some(t) = stack.pop() {
                    for s in g.generators() {
                        let u: Vec<Point> = t.iter().map(|&p| s.apply(p)).collect();
                        if seen.insert(u.clone()) {
                            stack.push(u);
                        }
                    }
                }
                return;
            }
            for p in 0..n as Point {
                if !tuple.contains(&p) {
                    tuple.push(p);
                    rec(n, k, tuple, g, seen, orbits);
                    tuple.pop();
                }
            }
        }
        rec(n, k, &mut tuple, g, &mut seen, &mut orbits);
        orbits
    }

    #[test]
    fn symmetric_and_alternating() {
        assert_eq!(order(&alt(5).unwrap()), 60);
        assert_eq!(order(&sym(7)), 5040);
        let a4 = alt(4).unwrap();
        assert_eq!(order(&a4), 12);
        assert!(a4.is_transitive());
        assert_eq!(order(&sym(1)), 1);
        assert_eq!(order(&sym(0)), 1);
        assert!(alt(2).is_err());
        for n in 3..=9 {
            assert_eq!(alt(n).unwrap().order(), BigUint::from((1..=n as u64).product::<u64>() / 2));
        }
    }

    #[test]
    fn psl2_orders_match_formula() {
        for &q in &crate::field::SUPPORTED_ORDERS {
            let g = psl2(q).unwrap();
            assert_eq!(order(&g), psl2_order(q as u64), "q = {q}");
            assert_eq!(g.degree(), q as usize + 1);
        }
        assert_eq!(order(&psl2(7).unwrap()), 168);
        assert_eq!(order(&psl2(4).unwrap()), 60);
        assert_eq!(order(&psl2(9).unwrap()), 360);
        assert!(matches!(psl2(6), Err(Error::UnsupportedField(6))));
    }

    #[test]
    fn psl2_is_two_transitive_not_sharply() {
        for &q in &[4u32, 5, 7, 8, 9, 11, 13] {
            let g = psl2(q).unwrap();
            assert_eq!(tuple_orbits(&g, 2), 1, "q = {q}");
            // two-point stabiliser has order (q-1)/d > 1
            let inf = q as Point;
            let two_point = g.stabilizer(inf).stabilizer(0);
            assert!(two_point.order() > BigUint::from(1u32), "q = {q}");
        }
    }

    #[test]
    fn mathieu_groups() {
        let m11 = mathieu(Mathieu::M11);
        assert_eq!(order(&m11), 7920);
        assert_eq!(tuple_orbits(&m11, 4), 1);
        let m12 = mathieu(Mathieu::M12);
        assert_eq!(order(&m12), 95040);
        assert!(m12.is_transitive());
        assert!("M13".parse::<Mathieu>().is_err());
        let h = m11.subgroup(&m11_l2_11_generators()).unwrap();
        assert_eq!(order(&h), 660);
        let l27 = psl2(7).unwrap();
        let s4 = l27.subgroup(&l2_7_s4_generators()).unwrap();
        assert_eq!(order(&s4), 24);
    }

    #[test]
    fn parse_grp() {
        let spec = parse_group("a5", "# A5\ndegree 5\n(1,2,3,4,5)\n(3,4,5)\n").unwrap();
        assert_eq!(spec.degree, 5);
        assert_eq!(order(&spec.build()), 60);
        assert_eq!(spec.description, "A5");
        let reparsed = parse_group("a5", &spec.to_grp()).unwrap();
        assert_eq!(reparsed, spec);

        let empty = parse_group("t", "degree 4\n").unwrap();
        assert_eq!(order(&empty.build()), 1);

        match parse_group("bad", "degree 5\n(1,2,3)\n(1,2,2)\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("repeated"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_group("bad", "(1,2)\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_group("bad", "").is_err());
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a5.grp");
        std::fs::write(&path, "degree 5\n(1,2,3,4,5)\n(3,4,5)\n").unwrap();
        let spec = load_group(&path).unwrap();
        assert_eq!(spec.name, "a5");
        assert_eq!(order(&spec.build()), 60);
    }

    #[test]
    fn builtin_names() {
        assert_eq!(builtin("M11").unwrap().degree, 11);
        assert_eq!(order(&builtin("alt:5").unwrap().build()), 60);
        assert_eq!(order(&builtin("A6").unwrap().build()), 360);
        assert_eq!(order(&builtin("S4").unwrap().build()), 24);
        assert_eq!(order(&builtin("L2(7)").unwrap().build()), 168);
        assert_eq!(order(&builtin("psl2:8").unwrap().build()), 504);
        assert_eq!(order(&builtin("C2").unwrap().build()), 2);
        assert!(builtin("Q8").is_err());
    }

    #[test]
    fn subfield_group_in_psl2_27() {
        let line = ProjectiveLine::new(27).unwrap();
        let g = line.group();
        let h = g.subgroup(&line.prime_subfield_generators()).unwrap();
        assert_eq!(order(&h), 12);
    }
}
