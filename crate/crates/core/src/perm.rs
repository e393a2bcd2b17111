//! Permutations of `{0, .., n-1}`.
//!
//! Composition is left-to-right: `p.compose(&q)` maps `i` to `q(p(i))`, so
//! `p * q` means "apply `p`, then `q`". Conjugation `x^g = g⁻¹ x g` follows
//! the same convention. Externally permutations are written in 1-based
//! disjoint-cycle notation, `(1,2,3)(4,5)`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = u32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<Point>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as Point).collect(),
        }
    }

    pub fn from_images(images: Vec<Point>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::NotBijective { degree: n });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_images_unchecked(images: Vec<Point>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[Point]]) -> Result<Self> {
        let mut images: Vec<Point> = (0..degree as Point).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let a_us = a as usize;
                if a_us >= degree || touched[a_us] {
                    return Err(Error::NotBijective { degree });
                }
                touched[a_us] = true;
                images[a_us] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: Point) -> Point {
        self.images[i as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as Point == j)
    }

    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                got: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    /// Unchecked left-to-right product.
    #[inline]
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as Point;
        }
        Permutation { images: inv }
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        let mut out = vec![0; self.images.len()];
        for (i, &xi) in self.images.iter().enumerate() {
            out[g.images[i] as usize] = g.images[xi as usize];
        }
        Permutation { images: out }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// All cycles, including fixed points, each starting at its least point.
    pub fn all_cycles(&self) -> Vec<Vec<Point>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i as Point);
                i = self.images[i] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycles(&self) -> Vec<Vec<Point>> {
        self.all_cycles().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.all_cycles().iter().map(|c| c.len() as u32).collect())
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i as Point == j)
            .count()
    }

    pub fn is_even(&self) -> bool {
        self.cycle_type().is_even()
    }

    pub fn order_big(&self) -> BigUint {
        self.all_cycles()
            .iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&BigUint::from(c.len())))
    }

    /// Element order; fits `u64` for every group this crate handles.
    pub fn order(&self) -> u64 {
        self.all_cycles()
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// First moved point, if any.
    pub fn first_moved(&self) -> Option<Point> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &j)| *i as Point != j)
            .map(|(i, _)| i as Point)
    }

    /// Parses 1-based cycle notation such as `(1,2,3)(4,5)`; `()` is the identity.
    pub fn parse(degree: usize, text: &str) -> Result<Permutation> {
        parse_cycles(degree, text).map_err(|message| Error::Parse { line: 1, message })
    }
}

pub(crate) fn parse_cycles(degree: usize, text: &str) -> std::result::Result<Permutation, String> {
    let mut images: Vec<Point> = (0..degree as Point).collect();
    let mut touched = vec![false; degree];
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err("empty permutation".into());
    }
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected '(' at `{rest}`"))?;
        let close = body_start
            .find(')')
            .ok_or_else(|| "unterminated cycle".to_string())?;
        let body = body_start[..close].trim();
        rest = body_start[close + 1..].trim_start();
        if body.is_empty() {
            continue;
        }
        let points = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                let v: usize = s.parse().map_err(|_| format!("bad point `{s}`"))?;
                if v == 0 || v > degree {
                    return Err(format!("point {v} outside 1..={degree}"));
                }
                Ok(v - 1)
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        for (k, &a) in points.iter().enumerate() {
            if touched[a] {
                return Err(format!("repeated point {}", a + 1));
            }
            touched[a] = true;
            images[a] = points[(k + 1) % points.len()] as Point;
        }
    }
    Ok(Permutation { images })
}

impl Mul<&Permutation> for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self)
    }
}

/// Multiset of cycle lengths (fixed points count as parts of length 1),
/// stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    parts: Vec<u32>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_even(&self) -> bool {
        (self.degree() as usize - self.parts.len()).is_multiple_of(2)
    }

    /// `(m_1, m_2, ..)`: multiplicity of each part length, indexed by length.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.degree() as usize + 1];
        for &p in &self.parts {
            m[p as usize] += 1;
        }
        m
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", strs.join(","))
    }
}
