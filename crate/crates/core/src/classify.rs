//! Arithmetic properties of the reduced power monoid of a finite monoid.
//!
//! Two independent evidence paths are provided: complete brute-force deciders
//! that enumerate minimal factorizations of every set, and a structural
//! decision ladder for unique minimal factorization that only inspects the
//! ground monoid's table. [`classify`] runs both and records whether they agree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{ElementId, FiniteMonoid, StructureFlags};
use crate::power::{FactorWord, MinimalFactorization, PSet, PowerMonoid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: String,
    pub anchor: String,
    pub witness: Vec<ElementId>,
}

/// The reduced monoid `(H ∖ H^×) ∪ {e}` attached to undecided cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedMonoid {
    /// Elements of `H` kept, in order; entry `i` is element `i` of `table`.
    pub elements: Vec<ElementId>,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriState {
    pub value: Verdict,
    pub trace: Vec<TraceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedMonoid>,
}

impl TriState {
    fn push(&mut self, rule: &str, anchor: &str, witness: impl IntoIterator<Item = ElementId>) {
        self.trace.push(TraceEntry {
            rule: rule.to_string(),
            anchor: anchor.to_string(),
            witness: witness.into_iter().collect(),
        });
    }

    fn decide(mut self, value: Verdict) -> Self {
        self.value = value;
        self
    }
}

/// `1 ≠ x² ≠ x` for every non-identity `x`.
pub fn pm_is_atomic(h: &FiniteMonoid) -> bool {
    h.elements().skip(1).all(|x| {
        let sq = h.mul(x, x);
        sq != h.identity() && sq != x
    })
}

/// Two factorizations of one set with different lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpingWitness {
    pub set: PSet,
    pub short: FactorWord,
    pub long: FactorWord,
}

/// Bounded and finite factorization of the power monoid.
///
/// A finite ground monoid is aperiodic only when trivial, so both flags equal
/// `|H| = 1`. Otherwise the first idempotent set `X ≠ {e}` is pumped: if `w`
/// factors `X` then so does `w * w`.
pub fn pm_is_bf_ff(h: &FiniteMonoid) -> (bool, bool, Option<PumpingWitness>) {
    if h.size() == 1 {
        return (true, true, None);
    }
    let pm = PowerMonoid::new(h);
    let set = pm
        .all_sets()
        .into_iter()
        .find(|&x| !x.is_identity() && pm.mul(x, x) == x)
        .expect("the submonoid generated by any element is an idempotent set");
    let short = pm.minimal_factorizations(set).swap_remove(0).word;
    let mut long = short.clone();
    long.0.extend_from_slice(short.letters());
    (false, false, Some(PumpingWitness { set, short, long }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HmfWitness {
    pub set: PSet,
    pub lengths: Vec<usize>,
    pub factorizations: Vec<MinimalFactorization>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UmfWitness {
    pub set: PSet,
    pub factorizations: Vec<MinimalFactorization>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteVerdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForce {
    pub hmf: BruteVerdict<HmfWitness>,
    pub umf: BruteVerdict<UmfWitness>,
    /// Every set has at least one minimal factorization.
    pub factorable: bool,
}

/// Enumerates minimal factorizations of every set, in size-then-lex order, so
/// the reported witnesses are the first failures in that order.
pub fn brute_force(h: &FiniteMonoid) -> BruteForce {
    let pm = PowerMonoid::new(h);
    let mut hmf = BruteVerdict {
        holds: true,
        witness: None,
    };
    let mut umf = BruteVerdict {
        holds: true,
        witness: None,
    };
    let mut factorable = true;
    for x in pm.all_sets() {
        let mins = pm.minimal_factorizations(x);
        factorable &= !mins.is_empty();
        if umf.holds && mins.len() > 1 {
            umf = BruteVerdict {
                holds: false,
                witness: Some(UmfWitness {
                    set: x,
                    factorizations: mins.clone(),
                }),
            };
        }
        if hmf.holds {
            let mut lengths: Vec<usize> = mins.iter().map(|m| m.multiset.len()).collect();
            lengths.dedup();
            if lengths.len() > 1 {
                let mut picked = Vec::new();
                for &l in &lengths {
                    picked.push(
                        mins.iter()
                            .find(|m| m.multiset.len() == l)
                            .expect("length occurs")
                            .clone(),
                    );
                }
                hmf = BruteVerdict {
                    holds: false,
                    witness: Some(HmfWitness {
                        set: x,
                        lengths,
                        factorizations: picked,
                    }),
                };
            }
        }
    }
    BruteForce {
        hmf,
        umf,
        factorable,
    }
}

pub fn pm_is_hmf_brute(h: &FiniteMonoid) -> (bool, Option<HmfWitness>) {
    let b = brute_force(h).hmf;
    (b.holds, b.witness)
}

pub fn pm_is_umf_brute(h: &FiniteMonoid) -> (bool, Option<UmfWitness>) {
    let b = brute_force(h).umf;
    (b.holds, b.witness)
}

/// Decides unique minimal factorization from the ground monoid's structure.
///
/// Rules in order, the first that fires decides:
/// 1. an element of order above 2 → no
/// 2. more than two units → no
/// 3. a group → yes iff order at most 2; non-units not a subsemigroup, or not
///    almost-breakable → no
/// 4. a unit moving a non-unit → no
/// 5. otherwise the answer is that of `K = (H ∖ H^×) ∪ {e}`, on which:
///    breakable → yes; commutative and not breakable → no; twisted or
///    bridged → no; anything else is undecided.
pub fn pm_is_umf_theorem(h: &FiniteMonoid) -> TriState {
    let mut st = TriState {
        value: Verdict::Unknown,
        trace: Vec::new(),
        reduced: None,
    };

    if let Some(x) = h.elements().find(|&x| h.element_order(x) > 2) {
        st.push(
            "element-order",
            "every element of a UmF ground monoid has order at most 2",
            [x],
        );
        return st.decide(Verdict::No);
    }
    let units = h.units();
    if units.len() > 2 {
        st.push(
            "unit-group-order",
            "a UmF ground monoid has at most two units",
            units,
        );
        return st.decide(Verdict::No);
    }
    if h.is_group() {
        st.push(
            "group",
            "a group is UmF iff it is trivial or cyclic of order 2",
            [],
        );
        return st.decide(if h.size() <= 2 {
            Verdict::Yes
        } else {
            Verdict::No
        });
    }
    if let Some((a, b)) = h.nonunit_product_escape() {
        st.push(
            "nonunits-not-closed",
            "the non-units of a UmF ground monoid form a subsemigroup",
            [ElementId(a), ElementId(b)],
        );
        return st.decide(Verdict::No);
    }
    let unit_mask = h.unit_mask();
    let nonunits: Vec<usize> = (0..h.size())
        .filter(|&x| unit_mask & (1 << x) == 0)
        .collect();
    for (i, &x) in nonunits.iter().enumerate() {
        for &y in &nonunits[i..] {
            let (xy, yx) = (h.mul_idx(x, y), h.mul_idx(y, x));
            if xy != x && xy != y && yx != x && yx != y {
                st.push(
                    "nonunits-not-almost-breakable",
                    "the non-units of a UmF ground monoid are almost-breakable",
                    [ElementId(x), ElementId(y)],
                );
                return st.decide(Verdict::No);
            }
        }
    }
    if let Some((u, y)) = h.trivial_extension_violation() {
        st.push(
            "not-trivial-extension",
            "in a UmF ground monoid every unit fixes every non-unit on both sides",
            [ElementId(u), ElementId(y)],
        );
        return st.decide(Verdict::No);
    }

    let keep: Vec<usize> = std::iter::once(0).chain(nonunits.iter().copied()).collect();
    let k = h.restrict(&keep);
    let lift = |v: ElementId| ElementId(keep[v.0]);
    st.push(
        "reduce-to-nonunits",
        "H is UmF iff the non-units with the identity form a UmF monoid",
        keep.iter().map(|&i| ElementId(i)),
    );
    if k.is_breakable() {
        st.push("breakable", "a breakable ground monoid is UmF", []);
        return st.decide(Verdict::Yes);
    }
    if k.is_commutative() {
        st.push(
            "commutative-not-breakable",
            "a commutative ground monoid is UmF iff its non-units are breakable",
            [],
        );
        return st.decide(Verdict::No);
    }
    if let Some(w) = k.twisted_witness() {
        st.push(
            "twisted",
            "a twisted almost-breakable ground monoid is not UmF",
            w.map(lift),
        );
        return st.decide(Verdict::No);
    }
    if let Some(w) = k.bridged_witness() {
        st.push(
            "bridged",
            "a bridged almost-breakable ground monoid is not UmF",
            w.map(lift),
        );
        return st.decide(Verdict::No);
    }
    st.push(
        "undecided",
        "almost-breakable, untwisted, unbridged, non-commutative and not breakable",
        [],
    );
    st.reduced = Some(ReducedMonoid {
        elements: keep.iter().map(|&i| ElementId(i)).collect(),
        table: k.rows(),
    });
    st
}

/// Brute-force size limit. Sets number `2^(|H| - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_brute_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_brute_size: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: u32,
    pub order: usize,
    pub structure: StructureFlags,
    pub almost_breakable: bool,
    pub breakable: bool,
    pub twisted: Option<[ElementId; 4]>,
    pub bridged: Option<[ElementId; 3]>,
    pub pm_atomic: bool,
    pub pm_bf: bool,
    pub pm_ff: bool,
    pub pm_bf_witness: Option<PumpingWitness>,
    pub pm_fmf: bool,
    /// `None` when skipped by the budget.
    pub pm_hmf_brute: Option<BruteVerdict<HmfWitness>>,
    pub pm_umf_brute: Option<BruteVerdict<UmfWitness>>,
    pub pm_umf_theorem: TriState,
    /// False only if the ladder decided and the brute force disagrees.
    pub agreement: bool,
}

impl ClassificationReport {
    pub fn brute_skipped(&self) -> bool {
        self.pm_umf_brute.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("order {order} exceeds the brute-force budget of {limit}; brute-force deciders skipped")]
pub struct BudgetExceeded {
    pub order: usize,
    pub limit: usize,
    pub partial: Box<ClassificationReport>,
}

/// Runs every decider. Brute force is skipped beyond the budget, in which case
/// the partial report comes back inside the error.
pub fn classify(h: &FiniteMonoid, budget: Budget) -> Result<ClassificationReport, BudgetExceeded> {
    let theorem = pm_is_umf_theorem(h);
    let within_budget = h.size() <= budget.max_brute_size;
    let brute = within_budget.then(|| brute_force(h));
    let (pm_bf, pm_ff, pm_bf_witness) = if within_budget {
        pm_is_bf_ff(h)
    } else {
        let trivial = h.size() == 1;
        (trivial, trivial, None)
    };
    let agreement = match (&brute, theorem.value) {
        (Some(b), Verdict::Yes) => b.umf.holds,
        (Some(b), Verdict::No) => !b.umf.holds,
        _ => true,
    };
    let (pm_hmf_brute, pm_umf_brute, pm_fmf) = match brute {
        Some(b) => (Some(b.hmf), Some(b.umf), b.factorable),
        None => (None, None, true),
    };
    let report = ClassificationReport {
        schema: SCHEMA_VERSION,
        order: h.size(),
        structure: h.structure_flags(),
        almost_breakable: h.is_almost_breakable(),
        breakable: h.is_breakable(),
        twisted: h.twisted_witness(),
        bridged: h.bridged_witness(),
        pm_atomic: pm_is_atomic(h),
        pm_bf,
        pm_ff,
        pm_bf_witness,
        pm_fmf,
        pm_hmf_brute,
        pm_umf_brute,
        pm_umf_theorem: theorem,
        agreement,
    };
    if within_budget {
        Ok(report)
    } else {
        Err(BudgetExceeded {
            order: h.size(),
            limit: budget.max_brute_size,
            partial: Box::new(report),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn atomicity() {
        assert!(pm_is_atomic(&FiniteMonoid::cyclic_group(5)));
        assert!(!pm_is_atomic(&FiniteMonoid::cyclic_group(2)));
        assert!(!pm_is_atomic(&FiniteMonoid::chain(2)));
        assert!(pm_is_atomic(&FiniteMonoid::trivial()));
    }

    #[test]
    fn bf_ff() {
        assert_eq!(pm_is_bf_ff(&FiniteMonoid::trivial()), (true, true, None));
        let z2 = FiniteMonoid::cyclic_group(2);
        let (bf, ff, w) = pm_is_bf_ff(&z2);
        assert!(!bf && !ff);
        let w = w.unwrap();
        assert_eq!(w.set.indices(), vec![0, 1]);
        assert_eq!(w.short.len(), 1);
        assert_eq!(w.long.len(), 2);
        let c3 = FiniteMonoid::chain(3);
        let (_, _, w) = pm_is_bf_ff(&c3);
        let w = w.unwrap();
        let pm = PowerMonoid::new(&c3);
        assert_eq!(pm.word_product(&w.short), w.set);
        assert_eq!(pm.word_product(&w.long), w.set);
    }

    #[test]
    fn brute_small_cases() {
        assert!(pm_is_umf_brute(&FiniteMonoid::cyclic_group(2)).0);
        assert!(pm_is_hmf_brute(&FiniteMonoid::cyclic_group(2)).0);
        assert!(pm_is_umf_brute(&FiniteMonoid::chain(3)).0);
        assert!(pm_is_hmf_brute(&FiniteMonoid::chain(3)).0);
        let (umf, w) = pm_is_umf_brute(&FiniteMonoid::cyclic_group(3));
        assert!(!umf);
        let w = w.unwrap();
        assert_eq!(w.set.indices(), vec![0, 1, 2]);
        assert_eq!(w.factorizations.len(), 3);
    }

    #[test]
    fn z5_is_not_hmf() {
        let (hmf, w) = pm_is_hmf_brute(&FiniteMonoid::cyclic_group(5));
        assert!(!hmf);
        let w = w.unwrap();
        assert_eq!(w.lengths, vec![2, 3]);
        assert_eq!(w.set.len(), 4);
    }

    #[test]
    fn ladder_examples() {
        let z2 = pm_is_umf_theorem(&FiniteMonoid::cyclic_group(2));
        assert_eq!(z2.value, Verdict::Yes);
        assert_eq!(z2.trace[0].rule, "group");
        let z3 = pm_is_umf_theorem(&FiniteMonoid::cyclic_group(3));
        assert_eq!(z3.value, Verdict::No);
        assert_eq!(z3.trace[0].rule, "element-order");
        let h1 = pm_is_umf_theorem(&fixtures::monoid("h1"));
        assert_eq!(h1.value, Verdict::No);
        assert_eq!(h1.trace.last().unwrap().rule, "twisted");
        let h2 = pm_is_umf_theorem(&fixtures::monoid("h2"));
        assert_eq!(h2.value, Verdict::No);
        assert_eq!(h2.trace.last().unwrap().rule, "bridged");
        let c3 = pm_is_umf_theorem(&FiniteMonoid::chain(3));
        assert_eq!(c3.value, Verdict::Yes);
    }

    #[test]
    fn ladder_reduces_through_units() {
        // Z2 ⊘ {a}: the unit fixes the non-unit, K is CHAIN2
        let point = crate::Magma::new(vec![vec![0]]).unwrap();
        let h = FiniteMonoid::cyclic_group(2)
            .trivial_ideal_extension(&point)
            .unwrap();
        let st = pm_is_umf_theorem(&h);
        assert_eq!(st.value, Verdict::Yes);
        assert_eq!(st.trace[0].witness, vec![ElementId(0), ElementId(2)]);
        assert!(pm_is_umf_brute(&h).0);
    }

    #[test]
    fn unitized_s_decided_by_both_paths() {
        let h = fixtures::s_semigroup().unitize().unwrap();
        let report = classify(&h, Budget::default()).unwrap();
        assert!(report.agreement);
        if report.pm_umf_theorem.value == Verdict::Unknown {
            assert!(report.pm_umf_theorem.reduced.is_some());
        }
    }

    #[test]
    fn classify_reports() {
        let z2 = classify(&FiniteMonoid::cyclic_group(2), Budget::default()).unwrap();
        assert!(z2.pm_umf_brute.as_ref().unwrap().holds);
        assert_eq!(z2.pm_umf_theorem.value, Verdict::Yes);
        assert!(z2.agreement);
        let h2 = classify(&fixtures::monoid("h2"), Budget::default()).unwrap();
        assert!(!h2.pm_umf_brute.as_ref().unwrap().holds);
        assert!(h2.agreement);
    }

    #[test]
    fn budget_skips_brute_force() {
        let err =
            classify(&FiniteMonoid::cyclic_group(3), Budget { max_brute_size: 2 }).unwrap_err();
        assert!(err.partial.brute_skipped());
        assert!(err.partial.agreement);
        assert_eq!(err.partial.pm_umf_theorem.value, Verdict::No);
    }
}
