//! Character trigrams and the Jaccard similarity used for fuzzy surface
//! matching. Text is lowercased and padded with two boundary sentinels on
//! each side so that one- and two-character strings (acronyms) still
//! produce trigrams.

use std::collections::BTreeSet;

/// Boundary sentinel: NUL never occurs in parsed surfaces or mentions.
pub const BOUNDARY: char = '\0';

pub type Trigram = [char; 3];

/// The set of all contiguous 3-character windows over the lowercased,
/// boundary-padded text. Empty input gives the empty set.
pub fn trigram_set(text: &str) -> BTreeSet<Trigram> {
    let mut out = BTreeSet::new();
    if text.is_empty() {
        return out;
    }
    let mut chars: Vec<char> = vec![BOUNDARY, BOUNDARY];
    chars.extend(text.to_lowercase().chars());
    chars.push(BOUNDARY);
    chars.push(BOUNDARY);
    for w in chars.windows(3) {
        out.insert([w[0], w[1], w[2]]);
    }
    out
}

/// Sorted trigram list, the representation the surface store keeps per
/// surface for merge-based intersection counting.
pub fn trigram_list(text: &str) -> Vec<Trigram> {
    trigram_set(text).into_iter().collect()
}

/// Jaccard coefficient over the two trigram sets. Two empty strings are
/// identical (1.0); exactly one empty string shares nothing (0.0).
pub fn trigram_similarity(a: &str, b: &str) -> f64 {
    let ta = trigram_list(a);
    let tb = trigram_list(b);
    jaccard(&ta, &tb)
}

/// Jaccard over pre-sorted trigram lists.
pub fn jaccard(a: &[Trigram], b: &[Trigram]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = intersection_size(a, b);
    inter as f64 / (a.len() + b.len() - inter) as f64
}

fn intersection_size(a: &[Trigram], b: &[Trigram]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_char_text_has_four_windows() {
        let b = BOUNDARY;
        let expected: BTreeSet<Trigram> =
            [[b, b, 'a'], [b, 'a', 'b'], ['a', 'b', b], ['b', b, b]]
                .into_iter()
                .collect();
        assert_eq!(trigram_set("ab"), expected);
    }

    #[test]
    fn empty_text_has_no_trigrams() {
        assert!(trigram_set("").is_empty());
    }

    #[test]
    fn four_char_text_has_six_trigrams() {
        assert_eq!(trigram_set("abcd").len(), 6);
    }

    #[test]
    fn similarity_is_reflexive_and_case_insensitive() {
        assert_eq!(trigram_similarity("New York", "New York"), 1.0);
        assert_eq!(trigram_similarity("NEW YORK", "new york"), 1.0);
    }

    #[test]
    fn disjoint_texts_score_zero() {
        assert_eq!(trigram_similarity("abc", "xyz"), 0.0);
    }

    #[test]
    fn empty_edge_cases() {
        assert_eq!(trigram_similarity("", ""), 1.0);
        assert_eq!(trigram_similarity("", "abc"), 0.0);
        assert_eq!(trigram_similarity("abc", ""), 0.0);
    }

    #[test]
    fn york_yorks_matches_hand_enumeration() {
        // T(york):  __y _yo yor ork rk_ k__   (6)
        // T(yorks): __y _yo yor ork rks ks_ s__   (7)
        // intersection 4, union 9.
        let got = trigram_similarity("York", "Yorks");
        assert_eq!(got, 4.0 / 9.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn similarity_is_symmetric(a in ".{0,12}", b in ".{0,12}") {
                prop_assert_eq!(trigram_similarity(&a, &b), trigram_similarity(&b, &a));
            }

            #[test]
            fn similarity_is_reflexive(a in ".{0,12}") {
                prop_assert_eq!(trigram_similarity(&a, &a), 1.0);
            }

            #[test]
            fn similarity_is_bounded(a in ".{0,12}", b in ".{0,12}") {
                let s = trigram_similarity(&a, &b);
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }
    }
}
