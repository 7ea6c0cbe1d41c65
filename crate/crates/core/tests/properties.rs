mod common;

use proptest::prelude::*;

use common::*;
use powmon_core::census::{enumerate_monoids, EnumerationOptions};
use powmon_core::{FactorWord, FiniteMonoid, PowerMonoid};

fn census_up_to_five() -> &'static [FiniteMonoid] {
    static ALL: std::sync::OnceLock<Vec<FiniteMonoid>> = std::sync::OnceLock::new();
    ALL.get_or_init(|| {
        (1..=5)
            .flat_map(|n| enumerate_monoids(n, EnumerationOptions::default()).unwrap())
            .collect()
    })
}

fn monoid_and_sets() -> impl Strategy<Value = (usize, u64, u64)> {
    (0..census_up_to_five().len(), any::<u64>(), any::<u64>())
}

proptest! {
    #[test]
    fn product_matches_oracle((i, a, b) in monoid_and_sets()) {
        let h = &census_up_to_five()[i];
        let pm = PowerMonoid::new(h);
        let mask = (1u64 << h.size()) - 1;
        let (x, y) = (to_pset(&bits(a & mask)), to_pset(&bits(b & mask)));
        prop_assert_eq!(from_pset(pm.mul(x, y)), product(h, &from_pset(x), &from_pset(y)));
        prop_assert!(x.is_subset(pm.mul(x, y)) && y.is_subset(pm.mul(x, y)));
    }

    #[test]
    fn minimal_words_multiply_to_the_set((i, a, _) in monoid_and_sets()) {
        let h = &census_up_to_five()[i];
        let pm = PowerMonoid::new(h);
        let x = to_pset(&bits(a & ((1u64 << h.size()) - 1)));
        let mins = pm.minimal_factorizations(x);
        prop_assert!(!mins.is_empty());
        for m in &mins {
            prop_assert_eq!(pm.word_product(&m.word), x);
            prop_assert_eq!(m.word.multiset(), m.multiset.clone());
            prop_assert!(m.word.letters().iter().all(|&l| pm.is_irreducible(l)));
        }
        for (p, q) in mins.iter().zip(mins.iter().skip(1)) {
            prop_assert!(!p.multiset.is_submultiset(&q.multiset));
        }
    }

    #[test]
    fn relabeling_preserves_canonical_form((i, seed, _) in monoid_and_sets()) {
        let h = &census_up_to_five()[i];
        let mut rest: Vec<usize> = (1..h.size()).collect();
        let mut s = seed;
        for k in (1..rest.len()).rev() {
            rest.swap(k, (s % (k as u64 + 1)) as usize);
            s /= k as u64 + 1;
        }
        let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let g = h.relabel(&perm).unwrap();
        prop_assert_eq!(g.canonical_form(), h.canonical_form());
    }

    #[test]
    fn opposite_preserves_umf((i, _, _) in monoid_and_sets()) {
        let h = &census_up_to_five()[i];
        let a = powmon_core::classify::pm_is_umf_brute(h).0;
        let b = powmon_core::classify::pm_is_umf_brute(&h.opposite()).0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn word_equivalence_is_permutation(letters in proptest::collection::vec(1u64..16, 0..5), seed in any::<u64>()) {
        let w = FactorWord(letters.iter().map(|&b| to_pset(&bits(b << 1))).collect());
        let mut shuffled = w.0.clone();
        if !shuffled.is_empty() {
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
        }
        let v = FactorWord(shuffled);
        prop_assert!(powmon_core::equivalent(&w, &v));
        if !letters.is_empty() {
            let mut longer = v.clone();
            longer.0.push(w.0[0]);
            prop_assert!(!powmon_core::equivalent(&w, &longer));
        }
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}
