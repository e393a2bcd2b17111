//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! An element is a rational combination of `1, ζ, …, ζ^(φ(m)-1)` reduced
//! modulo the cyclotomic polynomial `Φ_m`, stored as integer numerators
//! over one positive common denominator in lowest terms.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduction data for one conductor.
#[derive(Debug)]
struct FieldData {
    /// `Φ_m`, monic, lowest coefficient first
    modulus: Vec<BigInt>,
    /// `ζ^k` reduced, for `k` in `0..m`
    powers: Vec<Vec<BigInt>>,
}

impl FieldData {
    fn phi(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, mut poly: Vec<BigInt>) -> Vec<BigInt> {
        let phi = self.phi();
        for t in (phi..poly.len()).rev() {
            let c = std::mem::take(&mut poly[t]);
            if c.is_zero() {
                continue;
            }
            for (i, coef) in self.modulus[..phi].iter().enumerate() {
                if !coef.is_zero() {
                    poly[t - phi + i] -= &c * coef;
                }
            }
        }
        poly.truncate(phi);
        poly.resize(phi, BigInt::zero());
        poly
    }
}

fn field(m: u32) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<FieldData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().expect("cache lock").get(&m) {
        return f.clone();
    }
    let modulus = cyclotomic_polynomial(m);
    let phi = modulus.len() - 1;
    let mut data = FieldData {
        modulus,
        powers: Vec::new(),
    };
    let mut cur = vec![BigInt::zero(); phi.max(1)];
    cur[0] = BigInt::one();
    let cur = data.reduce(cur);
    let mut powers = vec![cur];
    for _ in 1..m {
        let mut shifted = vec![BigInt::zero()];
        shifted.extend(powers.last().expect("nonempty").iter().cloned());
        powers.push(data.reduce(shifted));
    }
    data.powers = powers;
    let data = Arc::new(data);
    cache.lock().expect("cache lock").insert(m, data.clone());
    data
}

/// `Φ_m` as integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1, "conductor must be positive");
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[m as usize] = BigInt::one();
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        poly = exact_divide(&poly, &cyclotomic_polynomial(d));
    }
    poly
}

fn exact_divide(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().expect("nonzero divisor");
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for t in (0..quot.len()).rev() {
        let c = &rem[t + dd] / lead;
        for (i, coef) in den.iter().enumerate() {
            rem[t + i] -= &c * coef;
        }
        quot[t] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    pub fn zero(m: u32) -> Self {
        let phi = field(m).phi();
        Cyclotomic {
            conductor: m,
            num: vec![BigInt::zero(); phi],
            den: BigInt::one(),
        }
    }

    pub fn from_rational(m: u32, r: &BigRational) -> Self {
        let mut z = Self::zero(m);
        z.num[0] = r.numer().clone();
        z.den = r.denom().clone();
        z.normalize();
        z
    }

    pub fn from_integer(m: u32, n: i64) -> Self {
        Self::from_rational(m, &BigRational::from_integer(n.into()))
    }

    /// `E(d)^k`, the `k`-th power of `exp(2πi/d)`; `d` must divide `m`.
    pub fn root_of_unity(m: u32, d: u32, k: i64) -> Result<Self> {
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::InvalidTable(format!("E({d}) does not live at conductor {m}")));
        }
        let f = field(m);
        let e = (k.rem_euclid(d as i64) as u32) * (m / d);
        Ok(Cyclotomic {
            conductor: m,
            num: f.powers[e as usize].clone(),
            den: BigInt::one(),
        })
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Coefficients over the power basis.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    fn normalize(&mut self) {
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num.first().cloned().unwrap_or_default(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Complex conjugate, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// The automorphism `ζ ↦ ζ^k`, `k` coprime to the conductor.
    pub fn galois(&self, k: i64) -> Self {
        let f = field(self.conductor);
        let m = self.conductor as i64;
        let mut out = vec![BigInt::zero(); f.phi()];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (i as i64 * k).rem_euclid(m) as usize;
            for (o, p) in out.iter_mut().zip(&f.powers[e]) {
                if !p.is_zero() {
                    *o += c * p;
                }
            }
        }
        let mut z = Cyclotomic {
            conductor: self.conductor,
            num: out,
            den: self.den.clone(),
        };
        z.normalize();
        z
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut z = Cyclotomic {
            conductor: self.conductor,
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
        };
        if z.den.is_negative() {
            z.den = -z.den;
            for c in &mut z.num {
                *c = -std::mem::take(c);
            }
        }
        z.normalize();
        z
    }

    /// A rough size of the value, for ranking discrepancies.
    pub fn magnitude(&self) -> f64 {
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        self.num.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum::<f64>() / den
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.conductor, other.conductor, "mixed conductors");
    }

    /// Parses an entry such as `-E(5)^2-E(5)^3` or `1/2*E(8)+3`.
    pub fn parse(m: u32, text: &str) -> Result<Self> {
        Parser::new(m, text).parse()
    }

    /// Canonical text: the smallest conductor `d | m` whose field contains
    /// the value, and its power-basis coefficients over `E(d)`.
    pub fn to_canonical_string(&self) -> String {
        let m = self.conductor;
        let target = self.coefficients();
        for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
            let f = field(m);
            let phi_d = euler_phi(d) as usize;
            let columns: Vec<Vec<BigRational>> = (0..phi_d)
                .map(|j| {
                    f.powers[j * (m / d) as usize]
                        .iter()
                        .map(|c| BigRational::from_integer(c.clone()))
                        .collect()
                })
                .collect();
            if let Some(coeffs) = solve(&columns, &target) {
                return format_terms(d, &coeffs);
            }
        }
        unreachable!("the full power basis spans the field")
    }
}

/// Solves `Σ c_j columns[j] = target` exactly, if solvable.
fn solve(columns: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let cols = columns.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in c..=cols {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = a[i][cols].clone();
    }
    Some(out)
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn format_terms(d: u32, coeffs: &[BigRational]) -> String {
    let mut out = String::new();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = if j == 0 {
            format_rational(c)
        } else {
            let atom = if j == 1 { format!("E({d})") } else { format!("E({d})^{j}") };
            if c.is_one() {
                atom
            } else if (-c).is_one() {
                format!("-{atom}")
            } else {
                format!("{}*{atom}", format_rational(c))
            }
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        let _ = write!(out, "{term}");
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl std::fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, other: &Cyclotomic) -> Cyclotomic {
        self.check(other);
        let den = &self.den * &other.den / self.den.gcd(&other.den);
        let (fa, fb) = (&den / &self.den, &den / &other.den);
        let mut z = Cyclotomic {
            conductor: self.conductor,
            num: self.num.iter().zip(&other.num).map(|(a, b)| a * &fa + b * &fb).collect(),
            den,
        };
        z.normalize();
        z
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, other: &Cyclotomic) -> Cyclotomic {
        self + &(-other)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, other: &Cyclotomic) -> Cyclotomic {
        self.check(other);
        let f = field(self.conductor);
        let phi = f.phi();
        let mut prod = vec![BigInt::zero(); (2 * phi).saturating_sub(1).max(1)];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut z = Cyclotomic {
            conductor: self.conductor,
            num: f.reduce(prod),
            den: &self.den * &other.den,
        };
        z.normalize();
        z
    }
}

struct Parser<'a> {
    m: u32,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(m: u32, text: &'a str) -> Self {
        Parser {
            m,
            chars: text.char_indices().peekable(),
            text,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::InvalidTable(format!("entry `{}`: {msg}", self.text))
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.chars.next();
                Ok(())
            }
            _ => Err(self.err(&format!("expected `{want}`"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        digits.parse().map_err(|_| self.err("expected a number"))
    }

    fn parse(mut self) -> Result<Cyclotomic> {
        let mut total = Cyclotomic::zero(self.m);
        let mut first = true;
        loop {
            let negative = match self.peek() {
                None if !first => break,
                Some('+') => {
                    self.chars.next();
                    false
                }
                Some('-') | Some('−') => {
                    self.chars.next();
                    true
                }
                _ if first => false,
                _ => return Err(self.err("expected `+` or `-`")),
            };
            first = false;
            let term = self.term()?;
            total = if negative { &total - &term } else { &total + &term };
        }
        Ok(total)
    }

    fn term(&mut self) -> Result<Cyclotomic> {
        let mut value = self.factor()?;
        while self.peek() == Some('*') {
            self.chars.next();
            value = &value * &self.factor()?;
        }
        Ok(value)
    }

    fn factor(&mut self) -> Result<Cyclotomic> {
        match self.peek() {
            Some('E') => {
                self.chars.next();
                self.expect('(')?;
                let d = self.integer()?.to_u32().ok_or_else(|| self.err("conductor too large"))?;
                self.expect(')')?;
                let k = if self.peek() == Some('^') {
                    self.chars.next();
                    let neg = matches!(self.peek(), Some('-') | Some('−'));
                    if neg {
                        self.chars.next();
                    }
                    let k = self.integer()?.to_i64().ok_or_else(|| self.err("exponent too large"))?;
                    if neg {
                        -k
                    } else {
                        k
                    }
                } else {
                    1
                };
                Cyclotomic::root_of_unity(self.m, d, k).map_err(|_| self.err(&format!("E({d}) needs d to divide {}", self.m)))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut d = BigInt::one();
                if self.peek() == Some('/') {
                    self.chars.next();
                    d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                }
                Ok(Cyclotomic::from_rational(self.m, &BigRational::new(n, d)))
            }
            _ => Err(self.err("expected a number or E(d)")),
        }
    }
}
