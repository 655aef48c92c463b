//! Mention preprocessing: the acronym filter and the normalization pipeline
//! applied to every non-acronym mention and to index-side surfaces.

/// True iff `text` is 2 to 5 uppercase letters. Such mentions skip every
/// further preprocessing step and are routed to the acronym index.
///
/// A minimum of two letters keeps single initials like "I" out of the
/// acronym path.
pub fn is_acronym(text: &str) -> bool {
    let mut len = 0usize;
    for ch in text.chars() {
        if !(ch.is_alphabetic() && ch.is_uppercase()) {
            return false;
        }
        len += 1;
        if len > 5 {
            return false;
        }
    }
    (2..=5).contains(&len)
}

/// Normalizes a mention or surface string, in order: split camel case,
/// strip punctuation and symbols (intra-word hyphens and apostrophes become
/// separators), collapse whitespace, then lowercase each token and
/// uppercase its first letter.
///
/// `"NEW YORK"` becomes `"New York"`, `"AmyWinehouse"` becomes
/// `"Amy Winehouse"`.
pub fn normalize(text: &str) -> String {
    // Camel-case boundaries: a space between a lowercase letter and the
    // uppercase letter that follows it.
    let mut split = String::with_capacity(text.len() + 8);
    let mut prev_lower = false;
    for ch in text.chars() {
        if prev_lower && ch.is_uppercase() {
            split.push(' ');
        }
        prev_lower = ch.is_lowercase();
        split.push(ch);
    }

    // Punctuation and symbols: hyphens and apostrophes separate tokens,
    // everything else that is neither alphanumeric nor whitespace is
    // dropped.
    let mut stripped = String::with_capacity(split.len());
    for ch in split.chars() {
        if ch.is_alphanumeric() || ch.is_whitespace() {
            stripped.push(ch);
        } else if matches!(ch, '-' | '\'' | '\u{2019}') {
            stripped.push(' ');
        }
    }

    let mut out = String::with_capacity(stripped.len());
    for token in stripped.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        let lower = token.to_lowercase();
        let mut chars = lower.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acronym_rule_is_two_to_five_uppercase_letters() {
        assert!(is_acronym("PSG"));
        assert!(is_acronym("NY"));
        assert!(is_acronym("NASA"));
        assert!(!is_acronym("Paris"));
        assert!(!is_acronym("ABCDEF"));
        assert!(!is_acronym("I"));
        assert!(!is_acronym("R2D2"));
        assert!(!is_acronym(""));
    }

    #[test]
    fn normalize_recases_tokens() {
        assert_eq!(normalize("NEW YORK"), "New York");
    }

    #[test]
    fn normalize_splits_camel_case() {
        assert_eq!(normalize("AmyWinehouse"), "Amy Winehouse");
    }

    #[test]
    fn normalize_strips_punctuation_and_collapses_whitespace() {
        assert_eq!(normalize("  barack--obama!! "), "Barack Obama");
        assert_eq!(normalize("Mr. & Mrs. Smith"), "Mr Mrs Smith");
        assert_eq!(normalize("Michael I. Jordan"), "Michael I Jordan");
    }

    #[test]
    fn normalize_keeps_digits() {
        assert_eq!(normalize("1984"), "1984");
    }
}
