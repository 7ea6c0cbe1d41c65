//! The reduced finitary power monoid of a finite monoid: subsets containing the
//! identity under setwise multiplication.
//!
//! Sets are `u64` bitmasks over element indices. Since the identity sits at
//! index 0, every [`PSet`] has bit 0 set.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{ElementId, FiniteMonoid};

/// Largest ground monoid for which row translates are tabulated.
const TRANSLATE_TABLE_MAX: usize = 12;
/// Largest ground monoid for which irreducibility is tabulated for all sets at once.
const IRREDUCIBLE_TABLE_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PowerError {
    #[error("set does not contain the identity")]
    MissingIdentity,
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    #[error("ground monoid is not almost-breakable")]
    NotAlmostBreakable,
    #[error("antichain candidate must be non-empty")]
    EmptyAntichain,
    #[error("antichain candidate must not contain the identity")]
    AntichainContainsIdentity,
}

/// An element of the reduced power monoid: a subset containing the identity.
///
/// Ordered by size, then lexicographically by sorted element list.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PSet(u64);

impl PSet {
    pub const IDENTITY: PSet = PSet(1);

    pub fn from_bits(bits: u64) -> Option<PSet> {
        (bits & 1 == 1).then_some(PSet(bits))
    }

    /// Adds the identity if missing.
    pub fn with_identity(bits: u64) -> PSet {
        PSet(bits | 1)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Never true; a `PSet` always holds the identity.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn is_identity(self) -> bool {
        self.0 == 1
    }

    pub fn contains(self, x: ElementId) -> bool {
        x.0 < 64 && self.0 & (1 << x.0) != 0
    }

    #[inline]
    pub fn is_subset(self, other: PSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: PSet) -> PSet {
        PSet(self.0 | other.0)
    }

    pub fn insert(self, x: ElementId) -> PSet {
        PSet(self.0 | (1 << x.0))
    }

    /// Removes `x` unless it is the identity.
    pub fn remove(self, x: ElementId) -> PSet {
        if x.0 == 0 {
            self
        } else {
            PSet(self.0 & !(1 << x.0))
        }
    }

    pub fn pair(x: ElementId) -> PSet {
        PSet(1 | (1 << x.0))
    }

    pub fn elements(self) -> impl Iterator<Item = ElementId> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                ElementId(i)
            })
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.elements().map(|x| x.0).collect()
    }

    /// All subsets containing the identity, including `self`.
    pub fn subsets(self) -> impl Iterator<Item = PSet> {
        let rest = self.0 & !1;
        let mut s = Some(rest);
        std::iter::from_fn(move || {
            let cur = s?;
            s = (cur != 0).then(|| (cur - 1) & rest);
            Some(PSet(cur | 1))
        })
    }

    pub fn proper_subsets(self) -> impl Iterator<Item = PSet> {
        self.subsets().filter(move |s| *s != self)
    }
}

impl Ord for PSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let d = self.0 ^ other.0;
            if d == 0 {
                Ordering::Equal
            } else if self.0 & d & d.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for PSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl Serialize for PSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.indices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let idx = Vec::<usize>::deserialize(d)?;
        let mut bits = 0u64;
        for i in idx {
            if i >= 64 {
                return Err(serde::de::Error::custom("element index out of range"));
            }
            bits |= 1 << i;
        }
        PSet::from_bits(bits).ok_or_else(|| serde::de::Error::custom("set lacks the identity"))
    }
}

/// A word over the power monoid. The empty word is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorWord(pub Vec<PSet>);

impl FactorWord {
    pub fn empty() -> Self {
        FactorWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[PSet] {
        &self.0
    }

    pub fn multiset(&self) -> FactorMultiset {
        FactorMultiset::from_letters(self.0.clone())
    }

    /// Letters pairwise distinct.
    pub fn is_square_free(&self) -> bool {
        let m = self.multiset();
        m.0.windows(2).all(|w| w[0] != w[1])
    }
}

/// A word up to permutation, kept as a sorted list of letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorMultiset(Vec<PSet>);

impl FactorMultiset {
    pub fn from_letters(mut letters: Vec<PSet>) -> Self {
        letters.sort();
        FactorMultiset(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[PSet] {
        &self.0
    }

    /// Multiset inclusion `self ⊆ other`.
    pub fn is_submultiset(&self, other: &FactorMultiset) -> bool {
        sorted_contains(&other.0, &self.0)
    }

    pub fn is_square_free(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }
}

fn sorted_contains<T: Ord>(big: &[T], small: &[T]) -> bool {
    let mut it = big.iter();
    'outer: for s in small {
        for b in it.by_ref() {
            match b.cmp(s) {
                Ordering::Less => continue,
                Ordering::Equal => continue 'outer,
                Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Two words are equivalent iff they are permutations of each other.
pub fn equivalent(a: &FactorWord, b: &FactorWord) -> bool {
    a.multiset() == b.multiset()
}

/// One minimal factorization class: the multiset and one ordering of it whose
/// product is the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalFactorization {
    pub multiset: FactorMultiset,
    pub word: FactorWord,
}

/// Whether each letter must strictly enlarge the running product.
///
/// Every ordering of a minimal factorization grows strictly (a letter that
/// leaves the product unchanged could be dropped), so [`Growth::Strict`] loses
/// nothing. [`Growth::Any`] exists to cross-check that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Strict,
    Any,
}

/// Arithmetic of the reduced power monoid over a borrowed ground monoid.
#[derive(Debug)]
pub struct PowerMonoid<'h> {
    h: &'h FiniteMonoid,
    n: usize,
    translates: Option<Vec<u64>>,
    irreducible: OnceLock<Option<Vec<bool>>>,
}

impl<'h> PowerMonoid<'h> {
    pub fn new(h: &'h FiniteMonoid) -> Self {
        let n = h.size();
        let translates = (n <= TRANSLATE_TABLE_MAX).then(|| {
            let stride = 1usize << n;
            let mut t = vec![0u64; n * stride];
            for x in 0..n {
                for ys in 1..stride {
                    let low = ys.trailing_zeros() as usize;
                    let prev = t[x * stride + (ys & (ys - 1))];
                    t[x * stride + ys] = prev | (1u64 << h.mul_idx(x, low));
                }
            }
            t
        });
        PowerMonoid {
            h,
            n,
            translates,
            irreducible: OnceLock::new(),
        }
    }

    pub fn ground(&self) -> &'h FiniteMonoid {
        self.h
    }

    /// The whole ground set as a power-monoid element.
    pub fn full(&self) -> PSet {
        PSet(if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        })
    }

    /// All elements of the power monoid, ordered by size then lexicographically.
    pub fn all_sets(&self) -> Vec<PSet> {
        let mut v: Vec<PSet> = self.full().subsets().collect();
        v.sort();
        v
    }

    pub fn set(&self, elements: &[ElementId]) -> Result<PSet, PowerError> {
        let mut bits = 0u64;
        for &x in elements {
            if x.0 >= self.n {
                return Err(PowerError::ElementOutOfRange(x.0));
            }
            bits |= 1 << x.0;
        }
        PSet::from_bits(bits).ok_or(PowerError::MissingIdentity)
    }

    pub fn set_from_indices(&self, elements: &[usize]) -> Result<PSet, PowerError> {
        let ids: Vec<ElementId> = elements.iter().copied().map(ElementId).collect();
        self.set(&ids)
    }

    #[inline]
    fn mul_bits(&self, xs: u64, ys: u64) -> u64 {
        let mut out = 0u64;
        let mut m = xs;
        match &self.translates {
            Some(t) => {
                let base = ys as usize;
                while m != 0 {
                    let x = m.trailing_zeros() as usize;
                    out |= t[(x << self.n) | base];
                    m &= m - 1;
                }
            }
            None => {
                while m != 0 {
                    let x = m.trailing_zeros() as usize;
                    let mut r = ys;
                    while r != 0 {
                        let y = r.trailing_zeros() as usize;
                        out |= 1u64 << self.h.mul_idx(x, y);
                        r &= r - 1;
                    }
                    m &= m - 1;
                }
            }
        }
        out
    }

    /// Setwise product `XY = {xy : x ∈ X, y ∈ Y}`.
    #[inline]
    pub fn mul(&self, x: PSet, y: PSet) -> PSet {
        PSet(self.mul_bits(x.0, y.0))
    }

    /// Left-to-right product; the empty word gives `{e}`.
    pub fn word_product(&self, w: &FactorWord) -> PSet {
        w.0.iter().fold(PSet::IDENTITY, |acc, &a| self.mul(acc, a))
    }

    /// `A` divides `X` iff `UAV = X` for some `U, V`. Divisors are subsets, so
    /// only `U, V ⊆ X` are searched.
    pub fn divides(&self, a: PSet, x: PSet) -> bool {
        if !a.is_subset(x) {
            return false;
        }
        for u in x.subsets() {
            let ua = self.mul(u, a);
            if !ua.is_subset(x) {
                continue;
            }
            if x.subsets().any(|v| self.mul(ua, v) == x) {
                return true;
            }
        }
        false
    }

    fn irreducible_table(&self) -> Option<&[bool]> {
        self.irreducible
            .get_or_init(|| {
                (self.n <= IRREDUCIBLE_TABLE_MAX).then(|| {
                    let count = 1usize << (self.n - 1);
                    let mut reducible = vec![false; count];
                    reducible[0] = true; // {e}
                    for yi in 0..count {
                        let y = ((yi as u64) << 1) | 1;
                        for zi in 0..count {
                            let z = ((zi as u64) << 1) | 1;
                            let p = self.mul_bits(y, z);
                            if p != y && p != z {
                                reducible[(p >> 1) as usize] = true;
                            }
                        }
                    }
                    reducible.into_iter().map(|r| !r).collect()
                })
            })
            .as_deref()
    }

    fn irreducible_direct(&self, x: PSet) -> bool {
        if x.is_identity() {
            return false;
        }
        for y in x.proper_subsets() {
            for z in x.proper_subsets() {
                if self.mul(y, z) == x {
                    return false;
                }
            }
        }
        true
    }

    /// `X ≠ {e}` and `X` is not a product of two proper subsets containing `e`.
    pub fn is_irreducible(&self, x: PSet) -> bool {
        match self.irreducible_table() {
            Some(t) => t[(x.0 >> 1) as usize],
            None => self.irreducible_direct(x),
        }
    }

    /// `X ≠ {e}` and `X ≠ YZ` for all `Y, Z ≠ {e}`.
    pub fn is_atom(&self, x: PSet) -> bool {
        if x.is_identity() {
            return false;
        }
        let nontrivial: Vec<PSet> = x.subsets().filter(|s| !s.is_identity()).collect();
        !nontrivial
            .iter()
            .any(|&y| nontrivial.iter().any(|&z| self.mul(y, z) == x))
    }

    /// `X ≠ {e}` and no set other than `{e}` properly divides `X`.
    pub fn is_quark(&self, x: PSet) -> bool {
        if x.is_identity() {
            return false;
        }
        !x.proper_subsets()
            .any(|a| !a.is_identity() && self.divides(a, x))
    }

    /// Irreducibles contained in `X`, in canonical order.
    pub fn irreducibles_within(&self, x: PSet) -> Vec<PSet> {
        let mut v: Vec<PSet> = x.subsets().filter(|&a| self.is_irreducible(a)).collect();
        v.sort();
        v
    }

    /// All factorizations of `X` into irreducibles of length at most `max_len`,
    /// sorted by length then letters.
    pub fn factorizations(&self, x: PSet, max_len: usize) -> Vec<FactorWord> {
        let letters = self.irreducibles_within(x);
        let mut out = Vec::new();
        let mut word = Vec::new();
        self.factorizations_dfs(x, &letters, PSet::IDENTITY, max_len, &mut word, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    fn factorizations_dfs(
        &self,
        x: PSet,
        letters: &[PSet],
        product: PSet,
        remaining: usize,
        word: &mut Vec<PSet>,
        out: &mut Vec<FactorWord>,
    ) {
        if product == x {
            out.push(FactorWord(word.clone()));
        }
        if remaining == 0 {
            return;
        }
        for &a in letters {
            let q = self.mul(product, a);
            if q.is_subset(x) {
                word.push(a);
                self.factorizations_dfs(x, letters, q, remaining - 1, word, out);
                word.pop();
            }
        }
    }

    /// Minimal factorizations of `X`, one entry per multiset, sorted by length
    /// then letters.
    pub fn minimal_factorizations(&self, x: PSet) -> Vec<MinimalFactorization> {
        self.minimal_factorizations_capped(x, x.len().saturating_sub(1), Growth::Strict)
    }

    /// Minimal factorizations among words of length at most `cap`.
    ///
    /// Breadth-first over `(running product, letter multiset)` states. A state
    /// whose multiset already contains a factorization of `X` found at a
    /// shorter length is dropped, so every multiset reaching `X` is minimal.
    pub fn minimal_factorizations_capped(
        &self,
        x: PSet,
        cap: usize,
        growth: Growth,
    ) -> Vec<MinimalFactorization> {
        if x.is_identity() {
            return vec![MinimalFactorization {
                multiset: FactorMultiset::default(),
                word: FactorWord::empty(),
            }];
        }
        let letters = self.irreducibles_within(x);
        let mut level: BTreeMap<(u64, Vec<u8>), Vec<u8>> = BTreeMap::new();
        level.insert((1, Vec::new()), Vec::new());
        let mut found: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
        for _ in 0..cap {
            let mut next: BTreeMap<(u64, Vec<u8>), Vec<u8>> = BTreeMap::new();
            let mut hits: BTreeMap<Vec<u8>, Vec<u8>> = BTreeMap::new();
            for ((p, ms), word) in &level {
                for (li, a) in letters.iter().enumerate() {
                    let q = self.mul_bits(*p, a.0);
                    if q & !x.0 != 0 || (growth == Growth::Strict && q == *p) {
                        continue;
                    }
                    let li = li as u8;
                    let mut ms2 = Vec::with_capacity(ms.len() + 1);
                    let at = ms.partition_point(|&m| m <= li);
                    ms2.extend_from_slice(&ms[..at]);
                    ms2.push(li);
                    ms2.extend_from_slice(&ms[at..]);
                    if found.iter().any(|(f, _)| sorted_contains(&ms2, f)) {
                        continue;
                    }
                    let extended = || {
                        let mut w = word.clone();
                        w.push(li);
                        w
                    };
                    if q == x.0 {
                        hits.entry(ms2).or_insert_with(extended);
                    } else {
                        next.entry((q, ms2)).or_insert_with(extended);
                    }
                }
            }
            found.extend(hits);
            if next.is_empty() {
                break;
            }
            level = next;
        }
        let to_sets = |v: &[u8]| v.iter().map(|&i| letters[i as usize]).collect::<Vec<_>>();
        let mut out: Vec<MinimalFactorization> = found
            .iter()
            .map(|(ms, w)| MinimalFactorization {
                multiset: FactorMultiset::from_letters(to_sets(ms)),
                word: FactorWord(to_sets(w)),
            })
            .collect();
        out.sort_by(|a, b| {
            a.multiset
                .len()
                .cmp(&b.multiset.len())
                .then_with(|| a.multiset.cmp(&b.multiset))
        });
        out
    }

    /// A factorization of `X` into distinct 2-element sets, for an
    /// almost-breakable ground monoid.
    ///
    /// Let `x` be a non-identity element of `X` with the smallest principal
    /// ideal, `Y` the elements associated to `x`, `A` the remaining elements
    /// acting trivially on `Y` from the left and `B` the rest. Then either
    /// `X = {e, y1}⋯{e, yk}` (`A = B = {e}`), `X = AY` (`B = {e} ≠ A`), or
    /// `X = {e, y}(A ∪ B ∪ Y ∖ {y})` for some `y ∈ Y` moved by some `b ∈ B`.
    pub fn square_free_factorization(&self, x: PSet) -> Result<FactorWord, PowerError> {
        if !self.h.is_almost_breakable() {
            return Err(PowerError::NotAlmostBreakable);
        }
        let mut letters = Vec::new();
        self.square_free_into(x, &mut letters);
        let before = letters.len();
        let mut seen = 0u64;
        letters.retain(|a: &PSet| {
            let fresh = seen & a.0 & !1 == 0;
            seen |= a.0;
            fresh
        });
        debug_assert_eq!(
            before,
            letters.len(),
            "sub-factorizations must have disjoint supports"
        );
        Ok(FactorWord(letters))
    }

    fn square_free_into(&self, x: PSet, out: &mut Vec<PSet>) {
        if x.len() <= 2 {
            if !x.is_identity() {
                out.push(x);
            }
            return;
        }
        let h = self.h;
        let ideal = |v: ElementId| h.ideal_mask(v.0);
        let pivot = x
            .elements()
            .skip(1)
            .min_by_key(|&v| (ideal(v).count_ones(), v))
            .expect("|X| >= 3");
        let pivot_ideal = ideal(pivot);
        let mut y_set = PSet::IDENTITY;
        for v in x.elements().skip(1) {
            if ideal(v) == pivot_ideal {
                y_set = y_set.insert(v);
            }
        }
        let ys: Vec<ElementId> = y_set.elements().skip(1).collect();
        let mut a_set = PSet::IDENTITY;
        let mut b_set = PSet::IDENTITY;
        for v in x.elements().skip(1).filter(|&v| ideal(v) != pivot_ideal) {
            if ys.iter().all(|&y| h.mul(v, y) == y) {
                a_set = a_set.insert(v);
            } else {
                b_set = b_set.insert(v);
            }
        }
        if b_set.is_identity() {
            if a_set.is_identity() {
                out.extend(ys.iter().map(|&y| PSet::pair(y)));
            } else {
                self.square_free_into(a_set, out);
                self.square_free_into(y_set, out);
            }
        } else {
            let bs: Vec<ElementId> = b_set.elements().skip(1).collect();
            let y = *ys
                .iter()
                .find(|&&y| bs.iter().any(|&b| h.mul(b, y) != y))
                .expect("B ≠ {e} means some b moves some y");
            out.push(PSet::pair(y));
            self.square_free_into(a_set.union(b_set).union(y_set.remove(y)), out);
        }
    }

    /// Whether a non-empty, identity-free set of elements is an antichain for
    /// divisibility in the ground monoid. When it is, `{e} ∪ A` is irreducible.
    pub fn is_divisibility_antichain(&self, a: &[ElementId]) -> Result<bool, PowerError> {
        if a.is_empty() {
            return Err(PowerError::EmptyAntichain);
        }
        for &x in a {
            if x.0 >= self.n {
                return Err(PowerError::ElementOutOfRange(x.0));
            }
            if x.0 == 0 {
                return Err(PowerError::AntichainContainsIdentity);
            }
        }
        Ok(a.iter()
            .all(|&p| a.iter().all(|&q| p == q || !self.h.divides(p, q))))
    }
}
