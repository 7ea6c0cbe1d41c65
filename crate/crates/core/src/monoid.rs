//! Finite monoids and semigroups given by Cayley tables.
//!
//! A [`FiniteMonoid`] is always validated on construction and has its identity
//! at index 0. A [`Magma`] is an arbitrary square table; associativity is
//! checked lazily the first time a semigroup-only operation needs it.

use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported ground set. Subsets are stored as `u64` bitmasks.
pub const MAX_SIZE: usize = 64;

/// Index of an element of a fixed finite monoid or magma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub usize);

impl ElementId {
    /// The identity of every validated [`FiniteMonoid`].
    pub const IDENTITY: ElementId = ElementId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("table is empty")]
    Empty,
    #[error("declared size {declared} does not match the {rows} table rows")]
    SizeMismatch { declared: usize, rows: usize },
    #[error("table is not square: row {row} has {len} entries, expected {size}")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("entry table[{row}][{col}] = {value} is out of range for size {size}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: usize,
        size: usize,
    },
    #[error("size {0} exceeds the supported maximum of {MAX_SIZE} elements")]
    TooLarge(usize),
    #[error("{labels} labels given for {size} elements")]
    LabelMismatch { labels: usize, size: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("claimed identity {identity} is not an identity: fails on element {element}")]
    WrongIdentity { identity: usize, element: usize },
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    #[error("not a permutation fixing the identity")]
    BadPermutation,
}

fn check_square(table: &[Vec<usize>]) -> Result<usize, MonoidError> {
    let size = table.len();
    if size == 0 {
        return Err(MonoidError::Empty);
    }
    if size > MAX_SIZE {
        return Err(MonoidError::TooLarge(size));
    }
    for (row, entries) in table.iter().enumerate() {
        if entries.len() != size {
            return Err(MonoidError::NotSquare {
                row,
                len: entries.len(),
                size,
            });
        }
        for (col, &value) in entries.iter().enumerate() {
            if value >= size {
                return Err(MonoidError::OutOfRange {
                    row,
                    col,
                    value,
                    size,
                });
            }
        }
    }
    Ok(size)
}

/// First triple `(a, b, c)` in index order with `(ab)c != a(bc)`.
fn first_non_associative(
    size: usize,
    mul: impl Fn(usize, usize) -> usize,
) -> Option<(usize, usize, usize)> {
    for a in 0..size {
        for b in 0..size {
            let ab = mul(a, b);
            for c in 0..size {
                if mul(ab, c) != mul(a, mul(b, c)) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// A finite binary operation with no axioms assumed.
#[derive(Debug, Clone)]
pub struct Magma {
    size: usize,
    table: Vec<usize>,
    associativity: OnceLock<Option<(usize, usize, usize)>>,
}

impl PartialEq for Magma {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.table == other.table
    }
}

impl Eq for Magma {}

impl Magma {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, MonoidError> {
        let size = check_square(&table)?;
        Ok(Magma {
            size,
            table: table.into_iter().flatten().collect(),
            associativity: OnceLock::new(),
        })
    }

    /// The empty semigroup (the non-units of a group).
    pub fn empty() -> Self {
        Magma {
            size: 0,
            table: Vec::new(),
            associativity: OnceLock::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size.max(1))
            .take(self.size)
            .map(<[usize]>::to_vec)
            .collect()
    }

    /// Checks associativity once and caches the verdict.
    pub fn check_associative(&self) -> Result<(), MonoidError> {
        let witness = self
            .associativity
            .get_or_init(|| first_non_associative(self.size, |a, b| self.mul(a, b)));
        match *witness {
            None => Ok(()),
            Some((a, b, c)) => Err(MonoidError::NotAssociative { a, b, c }),
        }
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|a| (a + 1..self.size).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_balanced_pair(&self, x: usize, y: usize) -> Result<bool, MonoidError> {
        self.check_associative()?;
        Ok(balanced(|a, b| self.mul(a, b), x, y))
    }

    pub fn is_breakable(&self) -> Result<bool, MonoidError> {
        self.check_associative()?;
        Ok(breakable(self.size, |a, b| self.mul(a, b)))
    }

    pub fn is_almost_breakable(&self) -> Result<bool, MonoidError> {
        self.check_associative()?;
        Ok(almost_breakable(self.size, |a, b| self.mul(a, b)))
    }

    /// Adjoins a fresh identity at index 0; element `i` of the magma becomes `i + 1`.
    pub fn unitize(&self) -> Result<FiniteMonoid, MonoidError> {
        self.check_associative()?;
        let n = self.size + 1;
        let mut rows = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                rows[a][b] = match (a, b) {
                    (0, _) => b,
                    (_, 0) => a,
                    _ => self.mul(a - 1, b - 1) + 1,
                };
            }
        }
        FiniteMonoid::from_table(rows, Some(0))
    }
}

#[inline]
fn balanced(mul: impl Fn(usize, usize) -> usize, x: usize, y: usize) -> bool {
    let p = mul(x, y);
    p == x || p == y
}

fn breakable(size: usize, mul: impl Fn(usize, usize) -> usize + Copy) -> bool {
    (0..size).all(|x| (0..size).all(|y| balanced(mul, x, y)))
}

fn almost_breakable(size: usize, mul: impl Fn(usize, usize) -> usize + Copy) -> bool {
    (0..size).all(|x| (x..size).all(|y| balanced(mul, x, y) || balanced(mul, y, x)))
}

/// Unvalidated input: a table with an optional claimed identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMonoid {
    pub table: Vec<Vec<usize>>,
    pub identity: Option<usize>,
    pub labels: Option<Vec<String>>,
}

/// Structural flags of a finite monoid, each computed by an exhaustive scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub commutative: bool,
    pub group: bool,
    pub idempotent: bool,
    pub dedekind_finite: bool,
    pub acyclic: bool,
    pub unit_cancellative: bool,
    pub reduced: bool,
    pub periodic: bool,
    pub aperiodic: bool,
}

/// A validated finite monoid with identity at index 0.
#[derive(Debug, Clone)]
pub struct FiniteMonoid {
    size: usize,
    table: Vec<u8>,
    labels: Vec<String>,
    ideals: OnceLock<Vec<u64>>,
}

impl PartialEq for FiniteMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.table == other.table && self.labels == other.labels
    }
}

impl Eq for FiniteMonoid {}

#[inline]
fn bit(i: usize) -> u64 {
    1u64 << i
}

fn mask_elements(mask: u64) -> Vec<ElementId> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(ElementId(m.trailing_zeros() as usize));
        m &= m - 1;
    }
    out
}

impl FiniteMonoid {
    /// Validates a raw table and normalizes the identity to index 0.
    ///
    /// With no claimed identity the lowest-index two-sided identity is used.
    /// Errors carry indices of the input as given, before normalization.
    pub fn validate(raw: RawMonoid) -> Result<Self, MonoidError> {
        let size = check_square(&raw.table)?;
        if let Some(labels) = &raw.labels {
            if labels.len() != size {
                return Err(MonoidError::LabelMismatch {
                    labels: labels.len(),
                    size,
                });
            }
        }
        let t = &raw.table;
        let identity = match raw.identity {
            Some(e) => {
                if e >= size {
                    return Err(MonoidError::ElementOutOfRange(e));
                }
                if let Some(a) = (0..size).find(|&a| t[e][a] != a || t[a][e] != a) {
                    return Err(MonoidError::WrongIdentity {
                        identity: e,
                        element: a,
                    });
                }
                e
            }
            None => (0..size)
                .find(|&e| (0..size).all(|a| t[e][a] == a && t[a][e] == a))
                .ok_or(MonoidError::NoIdentity)?,
        };
        if let Some((a, b, c)) = first_non_associative(size, |a, b| t[a][b]) {
            return Err(MonoidError::NotAssociative { a, b, c });
        }
        let labels = raw
            .labels
            .unwrap_or_else(|| (0..size).map(|i| i.to_string()).collect());
        // swap the identity into slot 0
        let swap = |i: usize| {
            if i == identity {
                0
            } else if i == 0 {
                identity
            } else {
                i
            }
        };
        let mut table = vec![0u8; size * size];
        for a in 0..size {
            for b in 0..size {
                table[swap(a) * size + swap(b)] = swap(t[a][b]) as u8;
            }
        }
        let labels = (0..size).map(|i| labels[swap(i)].clone()).collect();
        Ok(FiniteMonoid {
            size,
            table,
            labels,
            ideals: OnceLock::new(),
        })
    }

    pub fn from_table(
        table: Vec<Vec<usize>>,
        identity: Option<usize>,
    ) -> Result<Self, MonoidError> {
        Self::validate(RawMonoid {
            table,
            identity,
            labels: None,
        })
    }

    /// Builds a monoid from a table already known to be valid with identity 0.
    /// Only used by the census enumerator, which checks the axioms itself.
    pub(crate) fn from_trusted(size: usize, table: Vec<u8>) -> Self {
        debug_assert_eq!(table.len(), size * size);
        let labels = (0..size).map(|i| i.to_string()).collect();
        FiniteMonoid {
            size,
            table,
            labels,
            ideals: OnceLock::new(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MonoidError> {
        if labels.len() != self.size {
            return Err(MonoidError::LabelMismatch {
                labels: labels.len(),
                size: self.size,
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn trivial() -> Self {
        Self::from_trusted(1, vec![0])
    }

    /// The additive group of integers modulo `n`.
    pub fn cyclic_group(n: usize) -> Self {
        assert!((1..=MAX_SIZE).contains(&n));
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u8))
            .collect();
        Self::from_trusted(n, table)
    }

    /// The chain semilattice `e > 1 > 2 > ...` with `ij = max(i, j)`.
    pub fn chain(n: usize) -> Self {
        assert!((1..=MAX_SIZE).contains(&n));
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| a.max(b) as u8))
            .collect();
        Self::from_trusted(n, table)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> ElementId {
        ElementId::IDENTITY
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: ElementId) -> &str {
        &self.labels[x.0]
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.size).map(ElementId)
    }

    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.mul_idx(a.0, b.0))
    }

    #[inline]
    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    /// Row-major table bytes.
    pub fn table_bytes(&self) -> &[u8] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn as_magma(&self) -> Magma {
        let table = self.table.iter().map(|&v| v as usize).collect();
        let m = Magma {
            size: self.size,
            table,
            associativity: OnceLock::new(),
        };
        let _ = m.associativity.set(None);
        m
    }

    /// Size of the submonoid `{x^k : k >= 0}`.
    pub fn element_order(&self, x: ElementId) -> usize {
        let mut seen = bit(0);
        let mut p = x.0;
        while seen & bit(p) == 0 {
            seen |= bit(p);
            p = self.mul_idx(p, x.0);
        }
        seen.count_ones() as usize
    }

    pub(crate) fn unit_mask(&self) -> u64 {
        let mut mask = 0;
        for x in 0..self.size {
            if (0..self.size).any(|y| self.mul_idx(x, y) == 0 && self.mul_idx(y, x) == 0) {
                mask |= bit(x);
            }
        }
        mask
    }

    pub fn units(&self) -> Vec<ElementId> {
        mask_elements(self.unit_mask())
    }

    pub fn is_unit(&self, x: ElementId) -> bool {
        self.unit_mask() & bit(x.0) != 0
    }

    fn ideal_masks(&self) -> &[u64] {
        self.ideals.get_or_init(|| {
            (0..self.size)
                .map(|x| {
                    let mut mask = 0;
                    for u in 0..self.size {
                        let ux = self.mul_idx(u, x);
                        for v in 0..self.size {
                            mask |= bit(self.mul_idx(ux, v));
                        }
                    }
                    mask
                })
                .collect()
        })
    }

    #[inline]
    pub(crate) fn ideal_mask(&self, x: usize) -> u64 {
        self.ideal_masks()[x]
    }

    /// The two-sided principal ideal `HxH`.
    pub fn principal_ideal(&self, x: ElementId) -> Vec<ElementId> {
        mask_elements(self.ideal_mask(x.0))
    }

    /// `x` divides `y` iff `y ∈ HxH`.
    pub fn divides(&self, x: ElementId, y: ElementId) -> bool {
        self.ideal_mask(x.0) & bit(y.0) != 0
    }

    pub fn associated(&self, x: ElementId, y: ElementId) -> bool {
        self.ideal_mask(x.0) == self.ideal_mask(y.0)
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.size;
        (0..n).all(|a| (a + 1..n).all(|b| self.mul_idx(a, b) == self.mul_idx(b, a)))
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size).all(|x| self.mul_idx(x, x) == x)
    }

    pub fn is_group(&self) -> bool {
        self.unit_mask().count_ones() as usize == self.size
    }

    pub fn structure_flags(&self) -> StructureFlags {
        let n = self.size;
        let units = self.unit_mask();
        let is_unit = |x: usize| units & bit(x) != 0;
        let dedekind_finite =
            (0..n).all(|x| (0..n).all(|y| self.mul_idx(x, y) != 0 || self.mul_idx(y, x) == 0));
        let acyclic = (0..n).all(|u| {
            (0..n).all(|v| {
                if is_unit(u) && is_unit(v) {
                    return true;
                }
                (0..n).all(|x| self.mul_idx(self.mul_idx(u, x), v) != x)
            })
        });
        let unit_cancellative = (0..n).all(|x| {
            (0..n).all(|y| is_unit(y) || (self.mul_idx(x, y) != x && self.mul_idx(y, x) != x))
        });
        StructureFlags {
            commutative: self.is_commutative(),
            group: units.count_ones() as usize == n,
            idempotent: self.is_idempotent(),
            dedekind_finite,
            acyclic,
            unit_cancellative,
            reduced: units == bit(0),
            periodic: true,
            aperiodic: n == 1,
        }
    }

    pub fn is_balanced_pair(&self, x: ElementId, y: ElementId) -> bool {
        balanced(|a, b| self.mul_idx(a, b), x.0, y.0)
    }

    pub fn is_breakable(&self) -> bool {
        breakable(self.size, |a, b| self.mul_idx(a, b))
    }

    pub fn is_almost_breakable(&self) -> bool {
        almost_breakable(self.size, |a, b| self.mul_idx(a, b))
    }

    /// Lexicographically first `(x, y, z, w)` with `(x, y)` and `(z, w)` unbalanced,
    /// `{x, y}` and `{z, w}` disjoint, `xy ∈ {z, w}` and `zw ∈ {x, y}`.
    pub fn twisted_witness(&self) -> Option<[ElementId; 4]> {
        let n = self.size;
        let unbalanced: Vec<(usize, usize)> = (0..n)
            .cartesian_product(0..n)
            .filter(|&(x, y)| !balanced(|a, b| self.mul_idx(a, b), x, y))
            .collect();
        for &(x, y) in &unbalanced {
            let xy = self.mul_idx(x, y);
            for &(z, w) in &unbalanced {
                if x == z || x == w || y == z || y == w {
                    continue;
                }
                let zw = self.mul_idx(z, w);
                if (xy == z || xy == w) && (zw == x || zw == y) {
                    return Some([ElementId(x), ElementId(y), ElementId(z), ElementId(w)]);
                }
            }
        }
        None
    }

    /// Lexicographically first `(x1, x2, x3)` with `(x1, x2)`, `(x2, x3)`, `(x1, x3)`
    /// unbalanced and `x1x3 ∉ {x1x2, x2x3}`.
    pub fn bridged_witness(&self) -> Option<[ElementId; 3]> {
        let n = self.size;
        let unbalanced = |a: usize, b: usize| !balanced(|p, q| self.mul_idx(p, q), a, b);
        for x1 in 0..n {
            for x2 in 0..n {
                if !unbalanced(x1, x2) {
                    continue;
                }
                for x3 in 0..n {
                    if !unbalanced(x2, x3) || !unbalanced(x1, x3) {
                        continue;
                    }
                    let p13 = self.mul_idx(x1, x3);
                    if p13 != self.mul_idx(x1, x2) && p13 != self.mul_idx(x2, x3) {
                        return Some([ElementId(x1), ElementId(x2), ElementId(x3)]);
                    }
                }
            }
        }
        None
    }

    pub fn is_twisted(&self) -> bool {
        self.twisted_witness().is_some()
    }

    pub fn is_bridged(&self) -> bool {
        self.bridged_witness().is_some()
    }

    /// `H ⊘ K`: elements of `K` follow those of `H`, and every cross product
    /// equals its `K`-side operand.
    pub fn trivial_ideal_extension(&self, k: &Magma) -> Result<FiniteMonoid, MonoidError> {
        k.check_associative()?;
        let h = self.size;
        let n = h + k.size();
        if n > MAX_SIZE {
            return Err(MonoidError::TooLarge(n));
        }
        let mut table = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                let v = match (a < h, b < h) {
                    (true, true) => self.mul_idx(a, b),
                    (true, false) => b,
                    (false, true) => a,
                    (false, false) => k.mul(a - h, b - h) + h,
                };
                table[a * n + b] = v as u8;
            }
        }
        let mut labels = self.labels.clone();
        labels.extend((0..k.size()).map(|i| format!("k{i}")));
        Ok(FiniteMonoid {
            size: n,
            table,
            labels,
            ideals: OnceLock::new(),
        })
    }

    /// Every unit fixes every non-unit on both sides.
    pub fn is_trivial_extension_of_nonunits(&self) -> bool {
        self.trivial_extension_violation().is_none()
    }

    pub(crate) fn trivial_extension_violation(&self) -> Option<(usize, usize)> {
        let units = self.unit_mask();
        for u in (0..self.size).filter(|&u| units & bit(u) != 0) {
            for y in (0..self.size).filter(|&y| units & bit(y) == 0) {
                if self.mul_idx(u, y) != y || self.mul_idx(y, u) != y {
                    return Some((u, y));
                }
            }
        }
        None
    }

    pub(crate) fn nonunit_product_escape(&self) -> Option<(usize, usize)> {
        let units = self.unit_mask();
        let nonunits: Vec<usize> = (0..self.size).filter(|&x| units & bit(x) == 0).collect();
        for &a in &nonunits {
            for &b in &nonunits {
                if units & bit(self.mul_idx(a, b)) != 0 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// The table restricted to the non-units, if they are closed under
    /// multiplication. Element `i` of the result is the `i`-th non-unit in
    /// index order.
    pub fn nonunit_subsemigroup(&self) -> Option<Magma> {
        if self.nonunit_product_escape().is_some() {
            return None;
        }
        let units = self.unit_mask();
        let nonunits: Vec<usize> = (0..self.size).filter(|&x| units & bit(x) == 0).collect();
        if nonunits.is_empty() {
            return Some(Magma::empty());
        }
        let pos = |x: usize| nonunits.iter().position(|&y| y == x).expect("closed");
        let rows = nonunits
            .iter()
            .map(|&a| nonunits.iter().map(|&b| pos(self.mul_idx(a, b))).collect())
            .collect();
        let m = Magma::new(rows).expect("restriction is a valid table");
        let _ = m.associativity.set(None);
        Some(m)
    }

    /// The submonoid `(H ∖ H^×) ∪ {e}`, keeping labels, if the non-units are closed.
    pub fn nonunit_submonoid(&self) -> Option<FiniteMonoid> {
        if self.nonunit_product_escape().is_some() {
            return None;
        }
        let units = self.unit_mask();
        let keep: Vec<usize> = (0..self.size)
            .filter(|&x| x == 0 || units & bit(x) == 0)
            .collect();
        Some(self.restrict(&keep))
    }

    /// Restriction to a submonoid given by sorted element indices starting with 0.
    pub(crate) fn restrict(&self, keep: &[usize]) -> FiniteMonoid {
        debug_assert_eq!(keep.first(), Some(&0));
        let n = keep.len();
        let pos = |x: usize| keep.iter().position(|&y| y == x).expect("closed submonoid");
        let mut table = vec![0u8; n * n];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                table[i * n + j] = pos(self.mul_idx(a, b)) as u8;
            }
        }
        let labels = keep.iter().map(|&x| self.labels[x].clone()).collect();
        FiniteMonoid {
            size: n,
            table,
            labels,
            ideals: OnceLock::new(),
        }
    }

    /// The opposite monoid, `a ∘ b = ba`.
    pub fn opposite(&self) -> FiniteMonoid {
        let n = self.size;
        let mut table = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.table[b * n + a];
            }
        }
        FiniteMonoid {
            size: n,
            table,
            labels: self.labels.clone(),
            ideals: OnceLock::new(),
        }
    }

    /// Relabels element `i` as `perm[i]`. The permutation must fix 0.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteMonoid, MonoidError> {
        let n = self.size;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.first() != Some(&0) {
            return Err(MonoidError::BadPermutation);
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(MonoidError::BadPermutation);
            }
            seen[p] = true;
        }
        let mut table = vec![0u8; n * n];
        let mut labels = vec![String::new(); n];
        for a in 0..n {
            labels[perm[a]] = self.labels[a].clone();
            for b in 0..n {
                table[perm[a] * n + perm[b]] = perm[self.mul_idx(a, b)] as u8;
            }
        }
        Ok(FiniteMonoid {
            size: n,
            table,
            labels,
            ideals: OnceLock::new(),
        })
    }

    /// Minimum row-major encoding over all relabelings fixing the identity.
    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm(canonical_table(self.size, &self.table))
    }
}

/// Row-major table of the lexicographically least relabeling fixing 0.
pub(crate) fn canonical_table(n: usize, table: &[u8]) -> Vec<u8> {
    let mut best = table.to_vec();
    if n <= 2 {
        return best;
    }
    let mut inv = vec![0usize; n];
    for perm in (1..n).permutations(n - 1) {
        // perm maps old index i+1 -> new index perm[i]
        let mut fwd = vec![0u8; n];
        for (i, &p) in perm.iter().enumerate() {
            fwd[i + 1] = p as u8;
            inv[p] = i + 1;
        }
        // compare relabeled table entry by entry against best
        let mut ordering = std::cmp::Ordering::Equal;
        'cmp: for a in 0..n {
            for b in 0..n {
                let v = fwd[table[inv[a] * n + inv[b]] as usize];
                match v.cmp(&best[a * n + b]) {
                    std::cmp::Ordering::Equal => {}
                    o => {
                        ordering = o;
                        break 'cmp;
                    }
                }
            }
        }
        if ordering == std::cmp::Ordering::Less {
            for a in 0..n {
                for b in 0..n {
                    best[a * n + b] = fwd[table[inv[a] * n + inv[b]] as usize];
                }
            }
        }
    }
    best
}

/// Isomorphism-invariant byte encoding of a monoid table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn order(&self) -> usize {
        (self.0.len() as f64).sqrt().round() as usize
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        hex::decode(s).ok().map(CanonicalForm)
    }

    pub fn to_monoid(&self) -> FiniteMonoid {
        FiniteMonoid::from_trusted(self.order(), self.0.clone())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalForm::from_hex(&s).ok_or_else(|| serde::de::Error::custom("invalid hex"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> FiniteMonoid {
        FiniteMonoid::chain(3)
    }

    #[test]
    fn z2_is_valid_group() {
        let z2 = FiniteMonoid::from_table(vec![vec![0, 1], vec![1, 0]], Some(0)).unwrap();
        assert!(z2.is_group());
        assert_eq!(z2.units().len(), 2);
    }

    #[test]
    fn identity_is_normalized_to_zero() {
        // Z2 with the identity stored at index 1
        let m = FiniteMonoid::validate(RawMonoid {
            table: vec![vec![1, 0], vec![0, 1]],
            identity: Some(1),
            labels: Some(vec!["u".into(), "e".into()]),
        })
        .unwrap();
        assert_eq!(m.rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(m.labels(), &["e".to_string(), "u".to_string()]);
    }

    #[test]
    fn identity_is_found_when_not_claimed() {
        let m = FiniteMonoid::from_table(vec![vec![0, 0], vec![0, 1]], None).unwrap();
        assert_eq!(m.label(ElementId(0)), "1");
        assert!(m.is_idempotent());
    }

    #[test]
    fn tweaked_z3_is_not_associative() {
        let mut t = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        t[1][2] = 1;
        let err = FiniteMonoid::from_table(t, Some(0)).unwrap_err();
        assert!(matches!(err, MonoidError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn wrong_and_missing_identity() {
        let err = FiniteMonoid::from_table(vec![vec![0, 1], vec![1, 0]], Some(1)).unwrap_err();
        assert_eq!(
            err,
            MonoidError::WrongIdentity {
                identity: 1,
                element: 0
            }
        );
        let left_zero = vec![vec![0, 0], vec![1, 1]];
        assert_eq!(
            FiniteMonoid::from_table(left_zero, None).unwrap_err(),
            MonoidError::NoIdentity
        );
    }

    #[test]
    fn malformed_tables() {
        assert_eq!(
            FiniteMonoid::from_table(vec![], None).unwrap_err(),
            MonoidError::Empty
        );
        assert!(matches!(
            FiniteMonoid::from_table(vec![vec![0, 1], vec![1]], None).unwrap_err(),
            MonoidError::NotSquare { row: 1, .. }
        ));
        assert!(matches!(
            FiniteMonoid::from_table(vec![vec![0, 2], vec![1, 0]], None).unwrap_err(),
            MonoidError::OutOfRange { value: 2, .. }
        ));
    }

    #[test]
    fn mul_and_order() {
        let z3 = FiniteMonoid::cyclic_group(3);
        assert_eq!(z3.mul(ElementId(1), ElementId(2)), ElementId(0));
        assert_eq!(z3.element_order(ElementId(1)), 3);
        assert_eq!(FiniteMonoid::cyclic_group(5).element_order(ElementId(1)), 5);
        assert_eq!(chain3().element_order(ElementId(1)), 2);
        assert_eq!(chain3().element_order(ElementId(0)), 1);
        for x in z3.elements() {
            assert_eq!(z3.mul(z3.identity(), x), x);
        }
    }

    #[test]
    fn ideals_and_divisibility() {
        let z3 = FiniteMonoid::cyclic_group(3);
        assert_eq!(z3.units().len(), 3);
        assert!(z3.divides(ElementId(1), ElementId(2)));
        let c = chain3();
        assert_eq!(c.principal_ideal(ElementId(2)), vec![ElementId(2)]);
        assert_eq!(
            c.principal_ideal(ElementId(1)),
            vec![ElementId(1), ElementId(2)]
        );
        for y in c.elements() {
            assert!(c.divides(ElementId(0), y));
        }
        assert!(!c.associated(ElementId(1), ElementId(2)));
    }

    #[test]
    fn structure_flags_of_small_monoids() {
        let z2 = FiniteMonoid::cyclic_group(2).structure_flags();
        assert!(z2.group && z2.acyclic && z2.dedekind_finite && !z2.reduced && !z2.aperiodic);
        let c2 = FiniteMonoid::chain(2).structure_flags();
        assert!(c2.idempotent && c2.reduced && c2.dedekind_finite && !c2.acyclic);
        assert!(FiniteMonoid::trivial().structure_flags().aperiodic);
    }

    #[test]
    fn breakability() {
        assert!(chain3().is_breakable());
        assert!(!FiniteMonoid::cyclic_group(3).is_almost_breakable());
        let s = Magma::new(vec![vec![0, 0, 0], vec![0, 1, 0], vec![2, 2, 2]]).unwrap();
        assert_eq!(s.is_almost_breakable(), Ok(true));
        assert_eq!(s.is_breakable(), Ok(false));
        assert_eq!(s.is_balanced_pair(1, 2), Ok(false));
        let bad = Magma::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(matches!(
            bad.is_breakable(),
            Err(MonoidError::NotAssociative { .. })
        ));
    }

    #[test]
    fn z2_is_untwisted_and_unbridged() {
        let z2 = FiniteMonoid::cyclic_group(2);
        assert_eq!(z2.twisted_witness(), None);
        assert_eq!(z2.bridged_witness(), None);
    }

    #[test]
    fn trivial_ideal_extensions() {
        let z2 = FiniteMonoid::cyclic_group(2);
        let point = Magma::new(vec![vec![0]]).unwrap();
        let ext = z2.trivial_ideal_extension(&point).unwrap();
        assert_eq!(ext.size(), 3);
        assert_eq!(ext.mul_idx(1, 2), 2);
        assert_eq!(ext.mul_idx(2, 1), 2);
        assert_eq!(ext.units(), z2.units());
        assert!(ext.is_trivial_extension_of_nonunits());

        let s = Magma::new(vec![vec![0, 0, 0], vec![0, 1, 0], vec![2, 2, 2]]).unwrap();
        let a = FiniteMonoid::trivial().trivial_ideal_extension(&s).unwrap();
        let b = s.unitize().unwrap();
        assert_eq!(a.rows(), b.rows());

        let bad = Magma::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(z2.trivial_ideal_extension(&bad).is_err());
    }

    #[test]
    fn nonunit_parts() {
        let c = chain3();
        let s = c.nonunit_subsemigroup().unwrap();
        assert_eq!(s.rows(), vec![vec![0, 1], vec![1, 1]]);
        assert!(FiniteMonoid::cyclic_group(2)
            .nonunit_subsemigroup()
            .unwrap()
            .is_empty());
        assert!(FiniteMonoid::cyclic_group(4).is_trivial_extension_of_nonunits());
        assert_eq!(c.nonunit_submonoid().unwrap().rows(), c.rows());
    }

    #[test]
    fn canonical_forms() {
        let z2 = FiniteMonoid::cyclic_group(2);
        assert_ne!(z2.canonical_form(), FiniteMonoid::chain(2).canonical_form());
        let c3 = chain3();
        let swapped = c3.relabel(&[0, 2, 1]).unwrap();
        assert_ne!(swapped.rows(), c3.rows());
        assert_eq!(swapped.canonical_form(), c3.canonical_form());
        assert!(c3.relabel(&[1, 0, 2]).is_err());
    }

    #[test]
    fn opposite_swaps_operands() {
        let s = Magma::new(vec![vec![0, 0, 0], vec![0, 1, 0], vec![2, 2, 2]]).unwrap();
        let h = s.unitize().unwrap();
        let op = h.opposite();
        for a in h.elements() {
            for b in h.elements() {
                assert_eq!(op.mul(a, b), h.mul(b, a));
            }
        }
    }
}
