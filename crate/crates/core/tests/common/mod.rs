//! Brute-force oracles that only use the Cayley table and plain loops.
#![allow(dead_code)]

use std::collections::BTreeSet;

use powmon_core::census::{enumerate_monoids, EnumerationOptions};
use powmon_core::{ElementId, FiniteMonoid, PSet};

pub fn monoids_up_to(n: usize) -> Vec<FiniteMonoid> {
    (1..=n)
        .flat_map(|k| enumerate_monoids(k, EnumerationOptions::default()).unwrap())
        .collect()
}

/// Every set containing index 0, as sorted index vectors.
pub fn all_sets(h: &FiniteMonoid) -> Vec<Vec<usize>> {
    let n = h.size();
    (0u64..1 << (n - 1))
        .map(|rest| {
            let mut v = vec![0];
            v.extend((1..n).filter(|i| rest & (1 << (i - 1)) != 0));
            v
        })
        .collect()
}

pub fn product(h: &FiniteMonoid, x: &[usize], y: &[usize]) -> Vec<usize> {
    let s: BTreeSet<usize> = x
        .iter()
        .flat_map(|&a| y.iter().map(move |&b| h.mul_idx(a, b)))
        .collect();
    s.into_iter().collect()
}

pub fn to_pset(x: &[usize]) -> PSet {
    PSet::with_identity(x.iter().fold(0, |m, &i| m | 1 << i))
}

pub fn from_pset(x: PSet) -> Vec<usize> {
    x.indices()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// `a | x`: some `u, v` with `u a v = x`, searching every set.
pub fn divides(h: &FiniteMonoid, a: &[usize], x: &[usize]) -> bool {
    let sets = all_sets(h);
    sets.iter().any(|u| {
        let ua = product(h, u, a);
        sets.iter().any(|v| product(h, &ua, v) == x)
    })
}

/// Not `{e}` and not a product of two proper divisors.
pub fn is_irreducible(h: &FiniteMonoid, x: &[usize]) -> bool {
    if x.len() == 1 {
        return false;
    }
    let sets = all_sets(h);
    let proper: Vec<_> = sets
        .iter()
        .filter(|y| y.len() > 1 && divides(h, y, x) && !divides(h, x, y))
        .collect();
    !proper
        .iter()
        .any(|y| proper.iter().any(|z| product(h, y, z) == x))
}

/// Not `{e}` and not a product of two sets other than `{e}`.
pub fn is_atom(h: &FiniteMonoid, x: &[usize]) -> bool {
    if x.len() == 1 {
        return false;
    }
    let sets = all_sets(h);
    !sets.iter().filter(|y| y.len() > 1).any(|y| {
        sets.iter()
            .filter(|z| z.len() > 1)
            .any(|z| product(h, y, z) == x)
    })
}

/// Sorted letter multisets of all factorizations of `x` into irreducibles with
/// at most `max_len` letters.
pub fn factorization_multisets(
    h: &FiniteMonoid,
    x: &[usize],
    max_len: usize,
) -> BTreeSet<Vec<Vec<usize>>> {
    let letters: Vec<Vec<usize>> = all_sets(h)
        .into_iter()
        .filter(|a| is_subset(a, x) && is_irreducible(h, a))
        .collect();
    let mut out = BTreeSet::new();
    if x.len() == 1 {
        out.insert(Vec::new());
        return out;
    }
    let mut stack: Vec<(Vec<usize>, Vec<Vec<usize>>)> = vec![(vec![0], Vec::new())];
    while let Some((prod, word)) = stack.pop() {
        if !word.is_empty() && prod == x {
            let mut m = word.clone();
            m.sort();
            out.insert(m);
        }
        if word.len() == max_len {
            continue;
        }
        for a in &letters {
            let p = product(h, &prod, a);
            if is_subset(&p, x) {
                let mut w = word.clone();
                w.push(a.clone());
                stack.push((p, w));
            }
        }
    }
    out
}

fn strict_submultiset(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    if a.len() >= b.len() {
        return false;
    }
    let mut rest = b.to_vec();
    for l in a {
        match rest.iter().position(|r| r == l) {
            Some(i) => {
                rest.remove(i);
            }
            None => return false,
        }
    }
    true
}

/// Minimal multisets among factorizations of length at most `max_len`.
pub fn minimal_multisets(
    h: &FiniteMonoid,
    x: &[usize],
    max_len: usize,
) -> BTreeSet<Vec<Vec<usize>>> {
    let all = factorization_multisets(h, x, max_len);
    all.iter()
        .filter(|m| !all.iter().any(|s| strict_submultiset(s, m)))
        .cloned()
        .collect()
}

pub fn units(h: &FiniteMonoid) -> Vec<usize> {
    let n = h.size();
    (0..n)
        .filter(|&x| (0..n).any(|y| h.mul_idx(x, y) == 0 && h.mul_idx(y, x) == 0))
        .collect()
}

/// Two-sided principal ideal as an index set.
pub fn ideal(h: &FiniteMonoid, x: usize) -> BTreeSet<usize> {
    let n = h.size();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| h.mul_idx(h.mul_idx(a, x), b))
        .collect()
}

pub fn id(x: usize) -> ElementId {
    ElementId(x)
}
