//! Exhaustive census of small monoids up to isomorphism.
//!
//! Tables are filled row by row with the identity fixed at index 0. Each
//! placed entry is checked against every associativity triple it completes,
//! and after each finished row the partial table must be lexicographically
//! minimal among all relabelings whose rows are already determined. A complete
//! table survives only if it equals its own canonical form, so every
//! isomorphism class is produced exactly once.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify, Budget, ClassificationReport, Verdict, SCHEMA_VERSION};
use crate::monoid::{CanonicalForm, FiniteMonoid, StructureFlags};

/// Hard cap on census order.
pub const MAX_ORDER: usize = 7;

const UNSET: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("order {order} exceeds the census cap of {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Force `x² = x` on the diagonal.
    pub idempotent_only: bool,
    pub max_order: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            idempotent_only: false,
            max_order: MAX_ORDER,
        }
    }
}

struct Search<'a, F: FnMut(FiniteMonoid)> {
    n: usize,
    t: Vec<u8>,
    /// (forward, inverse) for every non-identity relabeling fixing 0.
    perms: Vec<(Vec<u8>, Vec<u8>)>,
    idempotent_only: bool,
    visit: &'a mut F,
}

impl<F: FnMut(FiniteMonoid)> Search<'_, F> {
    #[inline]
    fn get(&self, a: usize, b: usize) -> u8 {
        self.t[a * self.n + b]
    }

    /// Checks every triple whose last missing lookup was `(a, b)`.
    fn associative_at(&self, a: usize, b: usize) -> bool {
        let n = self.n;
        let ab = self.get(a, b) as usize;
        let eq = |l: u8, r: u8| l == UNSET || r == UNSET || l == r;
        // (ab)z = a(bz)
        for z in 0..n {
            let bz = self.get(b, z);
            if bz == UNSET {
                continue;
            }
            if !eq(self.get(ab, z), self.get(a, bz as usize)) {
                return false;
            }
        }
        // (xa)b = x(ab)
        for x in 0..n {
            let xa = self.get(x, a);
            if xa == UNSET {
                continue;
            }
            if !eq(self.get(xa as usize, b), self.get(x, ab)) {
                return false;
            }
        }
        // (xy)b = x(yb) with xy = a
        for x in 0..n {
            for y in 0..n {
                if self.get(x, y) as usize != a {
                    continue;
                }
                let yb = self.get(y, b);
                if yb == UNSET {
                    continue;
                }
                if !eq(ab as u8, self.get(x, yb as usize)) {
                    return false;
                }
            }
        }
        // (ay)z = a(yz) with yz = b
        for y in 0..n {
            for z in 0..n {
                if self.get(y, z) as usize != b {
                    continue;
                }
                let ay = self.get(a, y);
                if ay == UNSET {
                    continue;
                }
                if !eq(self.get(ay as usize, z), ab as u8) {
                    return false;
                }
            }
        }
        true
    }

    /// False if some relabeling is already known to give a smaller table.
    /// Rows `0..=done` are complete.
    fn lex_minimal(&self, done: usize) -> bool {
        let n = self.n;
        for (fwd, inv) in &self.perms {
            'rows: for i in 1..=done {
                let src = inv[i] as usize;
                if src > done {
                    break;
                }
                for j in 0..n {
                    let v = fwd[self.get(src, inv[j] as usize) as usize];
                    match v.cmp(&self.get(i, j)) {
                        Ordering::Equal => {}
                        Ordering::Less => return false,
                        Ordering::Greater => break 'rows,
                    }
                }
            }
        }
        true
    }

    fn place(&mut self, cell: usize) {
        let n = self.n;
        let width = n - 1;
        if cell == width * width {
            (self.visit)(FiniteMonoid::from_trusted(n, self.t.clone()));
            return;
        }
        let a = 1 + cell / width;
        let b = 1 + cell % width;
        let row_done = b == n - 1;
        let candidates = if self.idempotent_only && a == b {
            a..a + 1
        } else {
            0..n
        };
        for v in candidates {
            self.t[a * n + b] = v as u8;
            if self.associative_at(a, b) && (!row_done || self.lex_minimal(a)) {
                self.place(cell + 1);
            }
        }
        self.t[a * n + b] = UNSET;
    }
}

/// Calls `visit` once per isomorphism class of monoids of order `n`, with the
/// class's canonical table.
pub fn for_each_monoid(
    n: usize,
    opts: EnumerationOptions,
    mut visit: impl FnMut(FiniteMonoid),
) -> Result<(), CensusError> {
    if n == 0 {
        return Err(CensusError::ZeroOrder);
    }
    let cap = opts.max_order.min(MAX_ORDER);
    if n > cap {
        return Err(CensusError::CapExceeded { order: n, cap });
    }
    let mut t = vec![UNSET; n * n];
    for x in 0..n {
        t[x] = x as u8;
        t[x * n] = x as u8;
    }
    let perms = (1..n)
        .permutations(n - 1)
        .filter(|p| p.iter().enumerate().any(|(i, &v)| v != i + 1))
        .map(|p| {
            let mut fwd = vec![0u8; n];
            let mut inv = vec![0u8; n];
            for (i, &v) in p.iter().enumerate() {
                fwd[i + 1] = v as u8;
                inv[v] = (i + 1) as u8;
            }
            (fwd, inv)
        })
        .collect();
    let mut search = Search {
        n,
        t,
        perms,
        idempotent_only: opts.idempotent_only,
        visit: &mut visit,
    };
    search.place(0);
    Ok(())
}

/// All monoids of order `n` up to isomorphism, in generation order.
pub fn enumerate_monoids(
    n: usize,
    opts: EnumerationOptions,
) -> Result<Vec<FiniteMonoid>, CensusError> {
    let mut out = Vec::new();
    for_each_monoid(n, opts, |m| out.push(m))?;
    Ok(out)
}

/// Headline flags of a record, flat so that filters can address them by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFlags {
    pub order: usize,
    #[serde(flatten)]
    pub structure: StructureFlags,
    pub almost_breakable: bool,
    pub breakable: bool,
    pub twisted: bool,
    pub bridged: bool,
    pub atomic: bool,
    /// `null` when brute force was skipped.
    pub hmf_brute: Option<bool>,
    pub umf_brute: Option<bool>,
    pub umf_theorem: Verdict,
    pub theorem_rule: String,
    pub agreement: bool,
}

impl RecordFlags {
    pub fn of(r: &ClassificationReport) -> Self {
        RecordFlags {
            order: r.order,
            structure: r.structure,
            almost_breakable: r.almost_breakable,
            breakable: r.breakable,
            twisted: r.twisted.is_some(),
            bridged: r.bridged.is_some(),
            atomic: r.pm_atomic,
            hmf_brute: r.pm_hmf_brute.as_ref().map(|b| b.holds),
            umf_brute: r.pm_umf_brute.as_ref().map(|b| b.holds),
            umf_theorem: r.pm_umf_theorem.value,
            theorem_rule: r
                .pm_umf_theorem
                .trace
                .last()
                .map(|t| t.rule.clone())
                .unwrap_or_default(),
            agreement: r.agreement,
        }
    }

    fn combination_key(&self) -> String {
        let opt = |b: Option<bool>| b.map_or("skipped".to_string(), |b| b.to_string());
        format!(
            "almost_breakable={} breakable={} twisted={} bridged={} commutative={} umf_brute={} umf_theorem={}",
            self.almost_breakable,
            self.breakable,
            self.twisted,
            self.bridged,
            self.structure.commutative,
            opt(self.umf_brute),
            self.umf_theorem.as_str()
        )
    }
}

/// One line of a census file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub order: usize,
    pub canonical_form: CanonicalForm,
    pub table: Vec<Vec<usize>>,
    pub flags: RecordFlags,
    pub report: ClassificationReport,
}

impl CensusRecord {
    pub fn new(m: &FiniteMonoid, report: ClassificationReport) -> Self {
        CensusRecord {
            order: m.size(),
            canonical_form: m.canonical_form(),
            table: m.rows(),
            flags: RecordFlags::of(&report),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub schema: u32,
    pub order: usize,
    pub idempotent_only: bool,
    pub total: usize,
    pub umf_brute_true: usize,
    pub umf_brute_false: usize,
    pub theorem_yes: usize,
    pub theorem_no: usize,
    pub theorem_unknown: usize,
    /// Record count per combination of headline flags.
    pub combinations: BTreeMap<String, usize>,
    /// Canonical forms the ladder left undecided.
    pub unknown: Vec<CanonicalForm>,
    /// Canonical forms where the ladder and brute force disagree.
    pub disagreements: Vec<CanonicalForm>,
}

impl CensusSummary {
    pub fn from_records(order: usize, idempotent_only: bool, records: &[CensusRecord]) -> Self {
        let mut s = CensusSummary {
            schema: SCHEMA_VERSION,
            order,
            idempotent_only,
            total: records.len(),
            umf_brute_true: 0,
            umf_brute_false: 0,
            theorem_yes: 0,
            theorem_no: 0,
            theorem_unknown: 0,
            combinations: BTreeMap::new(),
            unknown: Vec::new(),
            disagreements: Vec::new(),
        };
        for r in records {
            match r.flags.umf_brute {
                Some(true) => s.umf_brute_true += 1,
                Some(false) => s.umf_brute_false += 1,
                None => {}
            }
            match r.flags.umf_theorem {
                Verdict::Yes => s.theorem_yes += 1,
                Verdict::No => s.theorem_no += 1,
                Verdict::Unknown => {
                    s.theorem_unknown += 1;
                    s.unknown.push(r.canonical_form.clone());
                }
            }
            if !r.flags.agreement {
                s.disagreements.push(r.canonical_form.clone());
            }
            *s.combinations.entry(r.flags.combination_key()).or_default() += 1;
        }
        s
    }
}

/// Classifies every monoid of order `n` in parallel. Records are sorted by
/// canonical form, so the output does not depend on scheduling.
pub fn run_census(
    n: usize,
    opts: EnumerationOptions,
    budget: Budget,
) -> Result<(Vec<CensusRecord>, CensusSummary), CensusError> {
    let monoids = enumerate_monoids(n, opts)?;
    let mut records: Vec<CensusRecord> = monoids
        .par_iter()
        .map(|m| {
            let report = classify(m, budget).unwrap_or_else(|e| *e.partial);
            CensusRecord::new(m, report)
        })
        .collect();
    records.sort_by(|a, b| a.canonical_form.cmp(&b.canonical_form));
    let summary = CensusSummary::from_records(n, opts.idempotent_only, &records);
    Ok((records, summary))
}

pub fn records_to_jsonl(records: &[CensusRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Writes `census-<n>.jsonl` and `summary-<n>.json` into `dir`.
pub fn write_census(
    dir: &Path,
    records: &[CensusRecord],
    summary: &CensusSummary,
) -> Result<(PathBuf, PathBuf), CensusError> {
    let io = |e: std::io::Error| CensusError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let census = dir.join(format!("census-{}.jsonl", summary.order));
    let summ = dir.join(format!("summary-{}.json", summary.order));
    std::fs::write(&census, records_to_jsonl(records)).map_err(io)?;
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(&summ, text).map_err(io)?;
    Ok((census, summ))
}

/// Conjunction of `key=value` tests on [`RecordFlags`] fields, e.g.
/// `almost_breakable=true,twisted=false,umf_theorem=unknown`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter(Vec<(String, serde_json::Value)>);

impl Filter {
    pub fn parse(spec: &str) -> Result<Self, CensusError> {
        let trivial = classify(&FiniteMonoid::trivial(), Budget::default())
            .expect("trivial monoid is in budget");
        let probe = serde_json::to_value(RecordFlags::of(&trivial)).expect("flags serialize");
        let mut terms = Vec::new();
        for term in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = term
                .split_once('=')
                .ok_or_else(|| CensusError::BadFilter(format!("`{term}` is not key=value")))?;
            let key = key.trim();
            if probe.get(key).is_none() {
                return Err(CensusError::BadFilter(format!("unknown field `{key}`")));
            }
            let value = value.trim();
            let value = serde_json::from_str(value)
                .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
            terms.push((key.to_string(), value));
        }
        Ok(Filter(terms))
    }

    pub fn matches(&self, record: &CensusRecord) -> bool {
        let v = serde_json::to_value(&record.flags).expect("flags serialize");
        self.0.iter().all(|(k, want)| v.get(k) == Some(want))
    }
}

/// Census records of order `n` passing `filter`.
pub fn find_instances(
    n: usize,
    opts: EnumerationOptions,
    budget: Budget,
    filter: &Filter,
) -> Result<Vec<CensusRecord>, CensusError> {
    let (records, _) = run_census(n, opts, budget)?;
    Ok(records.into_iter().filter(|r| filter.matches(r)).collect())
}
