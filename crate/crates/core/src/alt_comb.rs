//! Cycle-type combinatorics for `S_n` and `A_n` acting on `k`-subsets.
//!
//! `A(n,k)` and `B(n,k)` are the even and odd permutations of `[n]` that
//! fix some `k`-subset; `a`, `b` are their sizes over `|A_n|` and
//! `c = max(a, b)`. Everything is computed by sweeping the partitions of `n`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::perm::CycleType;
use crate::rational::{factorial, int, nearest_integer, ratio, ExactRational};

/// Every partition of `n` once, as non-increasing part lists, in reverse
/// lexicographic order starting from `[n]`.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    n: u32,
    current: Option<Vec<u32>>,
}

impl PartitionIter {
    pub fn new(n: u32) -> Self {
        let first = if n == 0 { Vec::new() } else { vec![n] };
        PartitionIter { n, current: Some(first) }
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

impl Iterator for PartitionIter {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        let out = self.current.take()?;
        // next partition: strip trailing ones, decrement the last part > 1,
        // then refill greedily with parts no larger than it
        let mut next = out.clone();
        let mut ones = 0u32;
        while next.last() == Some(&1) {
            next.pop();
            ones += 1;
        }
        if let Some(last) = next.pop() {
            let part = last - 1;
            let mut rest = ones + 1 + part;
            while rest > 0 {
                let p = part.min(rest);
                next.push(p);
                rest -= p;
            }
            self.current = Some(next);
        }
        Some(CycleType::new(out))
    }
}

/// Number of permutations of `S_n` with this cycle type,
/// `n! / Π k^{m_k} m_k!`.
pub fn class_size_sn(cycle_type: &CycleType) -> BigUint {
    let n = cycle_type.degree() as u64;
    let mut denom = BigUint::one();
    for (k, &m) in cycle_type.multiplicities().iter().enumerate().skip(1) {
        denom *= BigUint::from(k as u64).pow(m);
        denom *= factorial(m as u64).to_biguint().expect("positive");
    }
    factorial(n).to_biguint().expect("positive") / denom
}

/// Bitset of the sums of sub-multisets of the parts.
fn subset_sums(parts: &[u32]) -> Vec<bool> {
    let n: usize = parts.iter().map(|&p| p as usize).sum();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &p in parts {
        for s in (p as usize..=n).rev() {
            if reach[s - p as usize] {
                reach[s] = true;
            }
        }
    }
    reach
}

/// Whether a permutation of this type fixes some `k`-subset, i.e. some
/// collection of its cycles has total length `k`.
pub fn fixes_ksubset(cycle_type: &CycleType, k: u32) -> bool {
    k <= cycle_type.degree() && subset_sums(cycle_type.parts())[k as usize]
}

/// `|A_n|`, taking `A_0` and `A_1` to be trivial.
fn alt_order(n: u32) -> BigInt {
    if n < 2 {
        BigInt::one()
    } else {
        factorial(n as u64) / 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abc {
    pub a: ExactRational,
    pub b: ExactRational,
    pub c: ExactRational,
}

/// `(a, b, c)(n, k)` for every `0 ≤ k ≤ n`, indexed by `k`.
pub fn abc_all(n: u32) -> Vec<Abc> {
    let partitions: Vec<CycleType> = PartitionIter::new(n).collect();
    let zero = || (vec![BigUint::zero(); n as usize + 1], vec![BigUint::zero(); n as usize + 1]);
    let (even, odd) = partitions
        .par_iter()
        .fold(zero, |(mut even, mut odd), t| {
            let size = class_size_sn(t);
            let side = if t.is_even() { &mut even } else { &mut odd };
            for (k, _) in subset_sums(t.parts()).iter().enumerate().filter(|(_, &r)| r) {
                side[k] += &size;
            }
            (even, odd)
        })
        .reduce(zero, |(mut e1, mut o1), (e2, o2)| {
            for k in 0..=n as usize {
                e1[k] += &e2[k];
                o1[k] += &o2[k];
            }
            (e1, o1)
        });
    let order = alt_order(n);
    (0..=n as usize)
        .map(|k| {
            let a = ratio(BigInt::from(even[k].clone()), order.clone());
            let b = ratio(BigInt::from(odd[k].clone()), order.clone());
            let c = a.clone().max(b.clone());
            Abc { a, b, c }
        })
        .collect()
}

pub fn abc(n: u32, k: u32) -> Abc {
    assert!(n >= 1 && (1..=n).contains(&k), "abc needs 1 ≤ k ≤ n");
    abc_all(n).swap_remove(k as usize)
}

pub fn cnk(n: u32, k: u32) -> ExactRational {
    abc(n, k).c
}

/// Proportion of `A_n` fixing some `k`-subset, `1 - δ` for the action on
/// `k`-subsets.
pub fn fnk(n: u32, k: u32) -> ExactRational {
    assert!(k >= 1 && k < n, "fnk needs 1 ≤ k < n");
    abc(n, k).a
}

/// `(1/n)(k + Σ_{j=k+1}^{n-k} c(n-j, k))`, an upper bound for `c(n, k)`.
pub fn cnk_recurrence_bound(n: u32, k: u32) -> ExactRational {
    assert!(k >= 1 && 2 * k <= n, "the bound needs 2k ≤ n");
    let sum = ((k + 1)..=(n - k))
        .map(|j| cnk(n - j, k))
        .fold(int(k), |acc, c| acc + c);
    sum / int(n)
}

/// `Σ_{j=0}^{n} (-1)^j / j!`, the derangement proportion of `S_n` on `n` points.
pub fn sn_derangement_proportion(n: u32) -> ExactRational {
    let mut term = int(1);
    let mut sum = int(1);
    for j in 1..=n {
        term = -term / int(j);
        sum += &term;
    }
    sum
}

/// `δ(S_n) - (-1)^n (n-1)/n!`, the derangement proportion of `A_n` on `n` points.
pub fn an_derangement_proportion(n: u32) -> ExactRational {
    assert!(n >= 3, "A_n needs n ≥ 3");
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    sn_derangement_proportion(n) - ratio(sign * (n as i64 - 1), factorial(n as u64))
}

/// `[n!/e]`, with `1/e` replaced by a partial sum accurate well past `1/(2 n!)`.
pub fn nearest_n_factorial_over_e(n: u32) -> BigInt {
    let inv_e = sn_derangement_proportion(n + 20);
    nearest_integer(&(inv_e * int(factorial(n as u64))))
}

/// `1 - [n!/e]/n! + (-1)^n (n-1)/n!`.
pub fn f_n1_closed_form(n: u32) -> ExactRational {
    let nf = factorial(n as u64);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    int(1) - ratio(nearest_n_factorial_over_e(n), nf.clone()) + ratio(sign * (n as i64 - 1), nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition_count(n: usize) -> u64 {
        // Euler's recurrence through generalised pentagonal numbers
        let mut p = vec![0u64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut total: i64 = 0;
            for j in 1.. {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                let mut any = false;
                for g in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
                    if g <= m {
                        total += sign * p[m - g] as i64;
                        any = true;
                    }
                }
                if !any {
                    break;
                }
            }
            p[m] = total as u64;
        }
        p[n]
    }

    #[test]
    fn partitions_match_partition_function() {
        for n in 0..=40u32 {
            let mut seen = std::collections::HashSet::new();
            for t in PartitionIter::new(n) {
                assert_eq!(t.degree(), n);
                assert!(seen.insert(t));
            }
            assert_eq!(seen.len() as u64, partition_count(n as usize), "n = {n}");
        }
        assert_eq!(partition_count(40), 37338);
    }

    #[test]
    fn class_sizes() {
        assert_eq!(class_size_sn(&CycleType::new(vec![6])), BigUint::from(120u32));
        assert_eq!(class_size_sn(&CycleType::new(vec![2, 2, 1])), BigUint::from(15u32));
        assert_eq!(class_size_sn(&CycleType::new(vec![1; 7])), BigUint::one());
        for n in 1..=12u32 {
            let total: BigUint = PartitionIter::new(n).map(|t| class_size_sn(&t)).sum();
            assert_eq!(BigInt::from(total), factorial(n as u64));
        }
    }

    #[test]
    fn subset_fixing() {
        assert!(!fixes_ksubset(&CycleType::new(vec![5]), 2));
        assert!(fixes_ksubset(&CycleType::new(vec![3, 2]), 2));
        for t in PartitionIter::new(7) {
            assert!(fixes_ksubset(&t, 0) && fixes_ksubset(&t, 7));
        }
    }

    #[test]
    fn small_c_values() {
        let c2 = [(2, ratio(1, 1)), (3, ratio(1, 1)), (4, ratio(1, 2)), (5, ratio(3, 5)), (6, ratio(2, 3))];
        for (n, v) in c2 {
            assert_eq!(cnk(n, 2), v, "c({n},2)");
        }
        assert_eq!(cnk(7, 2), ratio(38, 63));
        assert_eq!(cnk(8, 2), ratio(7, 12));
        assert_eq!(cnk(9, 2), ratio(3691, 6480));
        assert_eq!(cnk(4, 3), ratio(3, 4));
        assert_eq!(cnk(5, 3), ratio(3, 5));
        assert_eq!(cnk(6, 3), ratio(3, 8));
        assert_eq!(cnk(7, 3), ratio(18, 35));
        assert_eq!(cnk(8, 3), ratio(25, 48));
        for n in 1..=14 {
            assert_eq!(cnk(n, n), int(1));
            for k in 1..n {
                assert_eq!(cnk(n, k), cnk(n, n - k));
            }
        }
    }

    #[test]
    fn counts_are_integral() {
        for n in 1..=16 {
            let order = int(alt_order(n));
            for v in abc_all(n) {
                assert!((&v.a * &order).is_integer() && (&v.b * &order).is_integer());
                assert!(v.a >= int(0) && v.b >= int(0));
            }
        }
    }

    #[test]
    fn derangement_proportions() {
        assert_eq!(sn_derangement_proportion(4), ratio(3, 8));
        assert_eq!(an_derangement_proportion(5), ratio(2, 5));
        for n in 1..=20u32 {
            // |δ(S_n) - 1/e| < 1/(n+1)!, checked against a long partial sum
            let gap = sn_derangement_proportion(n) - sn_derangement_proportion(n + 25);
            assert!(gap.clone() * int(factorial(n as u64 + 1)) < int(1) && -gap * int(factorial(n as u64 + 1)) < int(1));
            assert_eq!(sn_derangement_proportion(n), ratio(nearest_n_factorial_over_e(n), factorial(n as u64)));
        }
    }

    #[test]
    fn f_n1_matches_sweep() {
        for n in 5..=14 {
            assert_eq!(fnk(n, 1), f_n1_closed_form(n), "n = {n}");
            assert_eq!(fnk(n, 1), int(1) - an_derangement_proportion(n));
            let b = abc(n, 1).b;
            assert_eq!(b, int(2) * (int(1) - sn_derangement_proportion(n)) - fnk(n, 1));
            assert!(abc(n, 1).c <= ratio(2, 3));
        }
    }

    #[test]
    fn intransitive_actions_are_dominated_by_the_natural_one() {
        for n in 5..=14u32 {
            let f1 = fnk(n, 1);
            for k in 2..=(n - 1) / 2 {
                assert!(fnk(n, k) <= f1, "f({n},{k})");
            }
        }
    }

    #[test]
    fn natural_action_is_strictly_minimal_among_subset_actions() {
        for n in 9..=12u32 {
            for k in 2..=(n - 1) / 2 {
                assert!(fnk(n, k) < fnk(n, 1), "f({n},{k})");
            }
        }
    }

    #[test]
    fn recurrence_bounds_hold() {
        for n in 7..=20 {
            assert!(cnk(n, 2) <= cnk_recurrence_bound(n, 2), "n = {n}");
        }
        for n in 9..=20 {
            assert!(cnk(n, 3) <= cnk_recurrence_bound(n, 3), "n = {n}");
        }
    }

    #[test]
    fn induction_constants() {
        let head = (2..=9).map(|m| cnk(m, 2)).fold(int(2), |a, c| a + c);
        assert_eq!(head, ratio(341233, 45360));
        let bound = ratio(63, 100);
        for n in 13..=30u32 {
            let rhs = (head.clone() + &bound * int(n - 12)) / int(n);
            assert!(rhs < bound, "n = {n}");
            assert!(cnk(n, 2) <= rhs);
        }
        let head3 = int(3) + int(1) + ratio(3, 4);
        assert_eq!(head3, ratio(19, 4));
        for n in 9..=30u32 {
            let rhs = (head3.clone() + &bound * int(n - 8)) / int(n);
            assert!(rhs < bound && cnk(n, 3) <= rhs, "n = {n}");
        }
        for n in 10..=12 {
            assert!(cnk(n, 2) <= bound);
        }
    }
}
