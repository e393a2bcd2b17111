//! Small finite fields GF(p^f), enough for the projective-line actions of
//! PSL2(q) at desk scale.
//!
//! An element is stored as the integer `Σ c_i p^i` of its coefficient vector
//! over the power basis of `GF(p)[x]/(m(x))`, with `m` a fixed irreducible
//! polynomial per field order:
//!
//! | q  | m(x)            |
//! |----|-----------------|
//! | 4  | x^2 + x + 1     |
//! | 8  | x^3 + x + 1     |
//! | 9  | x^2 + 1         |
//! | 16 | x^4 + x + 1     |
//! | 25 | x^2 + x + 2     |
//! | 27 | x^3 + 2x + 1    |
//!
//! Prime fields use `m(x) = x`. Multiplication goes through log/antilog
//! tables built from the least primitive element.

use crate::error::{Error, Result};

/// Field orders with a built-in modulus.
pub const SUPPORTED_ORDERS: [u32; 12] = [4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 25, 27];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u32,
    f: u32,
    q: u32,
    /// monic modulus, low-degree coefficients first, length f+1
    modulus: Vec<u32>,
    add_table: Vec<u32>,
    neg_table: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
    primitive: FieldElement,
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut m = q;
    let mut f = 0;
    while m.is_multiple_of(p) {
        m /= p;
        f += 1;
    }
    (m == 1).then_some((p, f))
}

fn builtin_modulus(q: u32) -> Option<Vec<u32>> {
    Some(match q {
        4 => vec![1, 1, 1],
        8 => vec![1, 1, 0, 1],
        9 => vec![1, 0, 1],
        16 => vec![1, 1, 0, 0, 1],
        25 => vec![2, 1, 1],
        27 => vec![1, 2, 0, 1],
        _ => {
            let (_, f) = prime_power(q)?;
            if f != 1 {
                return None;
            }
            vec![0, 1]
        }
    })
}

impl GaloisField {
    pub fn new(q: u32) -> Result<Self> {
        if !SUPPORTED_ORDERS.contains(&q) {
            return Err(Error::UnsupportedField(q));
        }
        let (p, f) = prime_power(q).ok_or(Error::UnsupportedField(q))?;
        let modulus = builtin_modulus(q).ok_or(Error::UnsupportedField(q))?;
        let n = q as usize;
        let mut field = GaloisField {
            p,
            f,
            q,
            modulus,
            add_table: vec![0; n * n],
            neg_table: vec![0; n],
            log: vec![0; n],
            exp: vec![0; n],
            primitive: FieldElement(0),
        };
        for a in 0..q {
            let ca = field.coeffs(FieldElement(a));
            field.neg_table[a as usize] = field.from_coeffs(&ca.iter().map(|&c| (p - c) % p).collect::<Vec<_>>()).0;
            for b in 0..q {
                let cb = field.coeffs(FieldElement(b));
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                field.add_table[(a * q + b) as usize] = field.from_coeffs(&sum).0;
            }
        }
        let primitive = (1..q)
            .find(|&g| field.slow_order(FieldElement(g)) == q - 1)
            .ok_or(Error::UnsupportedField(q))?;
        field.primitive = FieldElement(primitive);
        let mut x = 1u32;
        for k in 0..q - 1 {
            field.exp[k as usize] = x;
            field.log[x as usize] = k;
            x = field.slow_mul(FieldElement(x), FieldElement(primitive)).0;
        }
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn primitive_element(&self) -> FieldElement {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Coefficients over the power basis, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut v = a.0;
        (0..self.f)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElement {
        FieldElement(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add_table[(a.0 * self.q + b.0) as usize])
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_table[a.0 as usize])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let k = (self.log[a.0 as usize] + self.log[b.0 as usize]) % (self.q - 1);
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[a.0 as usize]) % (self.q - 1);
        Some(FieldElement(self.exp[k as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement(1);
        }
        if a.0 == 0 {
            return FieldElement(0);
        }
        let k = (self.log[a.0 as usize] as u64 * e) % (self.q as u64 - 1);
        FieldElement(self.exp[k as usize])
    }

    /// Polynomial multiplication modulo the fixed modulus; used only while
    /// building the tables.
    fn slow_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (p, f) = (self.p, self.f as usize);
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut prod = vec![0u32; 2 * f];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p;
            }
        }
        if f == 1 {
            return self.from_coeffs(&prod[..1]);
        }
        for d in (f..2 * f).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for k in 0..f {
                prod[d - f + k] = (prod[d - f + k] + (p - c) * self.modulus[k]) % p;
            }
        }
        self.from_coeffs(&prod[..f])
    }

    fn slow_order(&self, a: FieldElement) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x.0 != 1 {
            x = self.slow_mul(x, a);
            k += 1;
            if k > self.q {
                return 0;
            }
        }
        k
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        a.0 == 0 || self.p == 2 || self.log[a.0 as usize].is_multiple_of(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moduli_have_no_roots() {
        // Degree <= 3 moduli are irreducible iff rootless. x^4+x+1 over GF(2)
        // also needs no root in GF(4), which rules out the factor x^2+x+1.
        for &q in &SUPPORTED_ORDERS {
            let (p, f) = prime_power(q).unwrap();
            if f == 1 {
                continue;
            }
            let m = builtin_modulus(q).unwrap();
            for x in 0..p {
                let v = m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p);
                assert_ne!(v, 0, "modulus for q={q} has root {x}");
            }
        }
        let gf4 = GaloisField::new(4).unwrap();
        for a in gf4.elements() {
            // a^4 + a + 1 evaluated in GF(4)
            let v = gf4.add(gf4.add(gf4.pow(a, 4), a), gf4.one());
            assert_ne!(v, gf4.zero());
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for &q in &SUPPORTED_ORDERS {
            let k = GaloisField::new(q).unwrap();
            let g = k.primitive_element();
            let mut seen = std::collections::HashSet::new();
            let mut x = k.one();
            for _ in 0..q - 1 {
                seen.insert(x);
                x = k.mul(x, g);
            }
            assert_eq!(x, k.one());
            assert_eq!(seen.len() as u32, q - 1, "q = {q}");
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &q in &SUPPORTED_ORDERS {
            let k = GaloisField::new(q).unwrap();
            for _ in 0..200 {
                let a = FieldElement(rng.gen_range(0..q));
                let b = FieldElement(rng.gen_range(0..q));
                let c = FieldElement(rng.gen_range(0..q));
                assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
                assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
                assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                assert_eq!(k.mul(a, b), k.slow_mul(a, b));
                assert_eq!(k.add(a, k.neg(a)), k.zero());
                let x = FieldElement(rng.gen_range(1..q));
                assert_eq!(k.mul(x, k.inv(x).unwrap()), k.one());
                assert_eq!(k.pow(x, (q - 1) as u64), k.one());
            }
            assert_eq!(k.inv(k.zero()), None);
        }
    }

    #[test]
    fn unsupported() {
        assert!(matches!(GaloisField::new(6), Err(Error::UnsupportedField(6))));
        assert!(GaloisField::new(32).is_err());
    }

    #[test]
    fn coefficient_roundtrip() {
        let k = GaloisField::new(27).unwrap();
        for a in k.elements() {
            assert_eq!(k.from_coeffs(&k.coeffs(a)), a);
        }
        assert_eq!(k.characteristic(), 3);
        assert_eq!(k.degree(), 3);
    }
}
