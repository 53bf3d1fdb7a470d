//! Author-name parsing and abbreviation compatibility.
//!
//! A name is reduced to a surname plus an ordered list of given-name tokens,
//! each either an initial (one letter) or a full token. Two variants are
//! *compatible* when they could denote the same person: "M. Imran" is
//! compatible with both "Muhammad Imran" and "Malik Imran", although those
//! two are not compatible with each other. Compatibility is therefore not
//! transitive, and callers must not treat it as an equivalence.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("name {0:?} contains no alphabetic token")]
    NoAlphabeticToken(String),
    #[error("name variants {0:?} and {1:?} are not compatible")]
    Incompatible(String, String),
    #[error("no name variants given")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GivenToken {
    pub text: String,
    pub initial: bool,
}

impl GivenToken {
    fn new(text: String) -> Self {
        let initial = text.chars().count() == 1;
        Self { text, initial }
    }

    fn first_char(&self) -> Option<char> {
        self.text.chars().next()
    }

    fn compatible(&self, other: &GivenToken) -> bool {
        match (self.initial, other.initial) {
            (false, false) => self.text == other.text,
            (true, true) => self.text == other.text,
            (true, false) => other.first_char() == self.first_char(),
            (false, true) => self.first_char() == other.first_char(),
        }
    }
}

/// A parsed author name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NameVariant {
    pub raw: String,
    pub surname: String,
    pub given: Vec<GivenToken>,
}

impl NameVariant {
    pub fn full_given_count(&self) -> usize {
        self.given.iter().filter(|t| !t.initial).count()
    }

    /// The normalized form written back as "surname, g1 g2.", which
    /// [`parse_name`] maps to an identical surname and given list.
    pub fn normalized(&self) -> String {
        let mut out = self.surname.clone();
        if !self.given.is_empty() {
            out.push(',');
            for token in &self.given {
                out.push(' ');
                out.push_str(&token.text);
                if token.initial {
                    out.push('.');
                }
            }
        }
        out
    }

    pub fn canonical_key(&self) -> String {
        canonical_key(self)
    }

    pub fn is_compatible(&self, other: &NameVariant) -> bool {
        names_compatible(self, other)
    }
}

impl fmt::Display for NameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

fn fold(s: &str) -> String {
    s.nfc().collect::<String>().to_lowercase()
}

fn tokens(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == '.' || c == ',')
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| t.chars().any(char::is_alphabetic))
        .map(str::to_string)
        .collect()
}

/// Parses a raw author string.
///
/// "Surname, Given" takes the part before the first comma as the surname.
/// Otherwise the last token is the surname, except when the last token is a
/// lone initial preceded by a full token ("Imran. M"): then the last full
/// token becomes the surname. Tokens without letters, such as DBLP's numeric
/// homonym suffixes, are dropped. Hyphenated names stay one token.
pub fn parse_name(raw: &str) -> Result<NameVariant, NameError> {
    let folded = fold(raw);
    let no_token = || NameError::NoAlphabeticToken(raw.to_string());

    if let Some((before, after)) = folded.split_once(',') {
        let surname = tokens(before);
        if !surname.is_empty() {
            return Ok(NameVariant {
                raw: raw.to_string(),
                surname: surname.join(" "),
                given: tokens(after).into_iter().map(GivenToken::new).collect(),
            });
        }
    }

    let mut toks = tokens(&folded);
    if toks.is_empty() {
        return Err(no_token());
    }
    let is_initial = |t: &String| t.chars().count() == 1;
    let surname_pos = match toks.iter().rposition(|t| !is_initial(t)) {
        Some(pos) if is_initial(toks.last().expect("non-empty")) => pos,
        _ => toks.len() - 1,
    };
    let surname = toks.remove(surname_pos);
    Ok(NameVariant { raw: raw.to_string(), surname, given: toks.into_iter().map(GivenToken::new).collect() })
}

/// Surnames must be equal and given tokens must agree position by position.
/// An initial matches any token starting with that letter, full tokens must
/// be equal, and a position present on only one side matches anything.
pub fn names_compatible(a: &NameVariant, b: &NameVariant) -> bool {
    a.surname == b.surname && a.given.iter().zip(&b.given).all(|(x, y)| x.compatible(y))
}

/// "surname/x" where x is the first letter of the first given token, or `_`.
pub fn canonical_key(v: &NameVariant) -> String {
    let initial = v.given.first().and_then(GivenToken::first_char).unwrap_or('_');
    format!("{}/{}", v.surname, initial)
}

/// Orders variants from most to least specific: more full given tokens
/// first, then longer raw strings, then lexicographically smaller raw.
pub fn specificity_order(a: &NameVariant, b: &NameVariant) -> Ordering {
    b.full_given_count()
        .cmp(&a.full_given_count())
        .then_with(|| b.raw.chars().count().cmp(&a.raw.chars().count()))
        .then_with(|| a.raw.cmp(&b.raw))
}

/// Picks the most specific of a set of pairwise compatible variants.
pub fn promote_variant(candidates: &[NameVariant]) -> Result<NameVariant, NameError> {
    for (i, a) in candidates.iter().enumerate() {
        for b in &candidates[i + 1..] {
            if !names_compatible(a, b) {
                return Err(NameError::Incompatible(a.raw.clone(), b.raw.clone()));
            }
        }
    }
    candidates.iter().min_by(|a, b| specificity_order(a, b)).cloned().ok_or(NameError::Empty)
}

/// Partitions variants into groups whose members are pairwise compatible and
/// keeps the promoted variant of each group. Groups are formed greedily in
/// specificity order; the result is repartitioned until stable, so applying
/// this to its own output returns it unchanged.
pub fn promote_groups(candidates: &[NameVariant]) -> Vec<NameVariant> {
    let mut current: Vec<NameVariant> = candidates.to_vec();
    loop {
        current.sort_by(specificity_order);
        current.dedup_by(|a, b| a.raw == b.raw);
        let mut groups: Vec<Vec<&NameVariant>> = Vec::new();
        for v in &current {
            match groups.iter_mut().find(|g| g.iter().all(|m| names_compatible(m, v))) {
                Some(group) => group.push(v),
                None => groups.push(vec![v]),
            }
        }
        // groups are seeded in specificity order, so each head is its promotion
        let heads: Vec<NameVariant> = groups.iter().map(|g| g[0].clone()).collect();
        if heads.len() == current.len() {
            return heads;
        }
        current = heads;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> NameVariant {
        parse_name(s).unwrap()
    }

    fn given(v: &NameVariant) -> Vec<(&str, bool)> {
        v.given.iter().map(|t| (t.text.as_str(), t.initial)).collect()
    }

    #[test]
    fn parses_listed_forms() {
        let full = p("Muhammad Imran");
        assert_eq!(full.surname, "imran");
        assert_eq!(given(&full), vec![("muhammad", false)]);

        let short = p("M. Imran");
        assert_eq!(short.surname, "imran");
        assert_eq!(given(&short), vec![("m", true)]);

        let comma = p("Imran, M.");
        assert_eq!(comma.surname, "imran");
        assert_eq!(given(&comma), vec![("m", true)]);

        let odd = p("Imran. M");
        assert_eq!(odd.surname, "imran");
        assert_eq!(given(&odd), vec![("m", true)]);
    }

    #[test]
    fn parse_edge_cases() {
        assert!(matches!(parse_name(""), Err(NameError::NoAlphabeticToken(_))));
        assert!(matches!(parse_name(" 0001 . "), Err(NameError::NoAlphabeticToken(_))));

        let v = p("Muhammad Imran 0001");
        assert_eq!(v.surname, "imran");

        let v = p("Jean-Pierre Dupont");
        assert_eq!(given(&v), vec![("jean-pierre", false)]);

        let v = p("van Dyk, J.R.");
        assert_eq!(v.surname, "van dyk");
        assert_eq!(given(&v), vec![("j", true), ("r", true)]);

        let v = p("ÉMILE Zola");
        assert_eq!(given(&v), vec![("émile", false)]);

        // decomposed input normalizes to the composed form
        assert_eq!(p("E\u{301}mile Zola").given, v.given);

        assert!(p("Imran").given.is_empty());
    }

    #[test]
    fn compatibility_examples() {
        assert!(names_compatible(&p("M. Imran"), &p("Muhammad Imran")));
        assert!(names_compatible(&p("M. Imran"), &p("Malik Imran")));
        assert!(!names_compatible(&p("Muhammad Imran"), &p("Malik Imran")));
        assert!(names_compatible(&p("Imran"), &p("Malik Imran")));
        assert!(!names_compatible(&p("M. Imran"), &p("M. Khan")));
        assert!(names_compatible(&p("M. Imran"), &p("Imran. M")));
    }

    #[test]
    fn compatibility_is_not_transitive() {
        let short = p("M. Imran");
        let a = p("Muhammad Imran");
        let b = p("Malik Imran");
        assert!(names_compatible(&short, &a) && names_compatible(&short, &b));
        assert!(!names_compatible(&a, &b));
    }

    #[test]
    fn canonical_keys() {
        assert_eq!(canonical_key(&p("Muhammad Imran")), "imran/m");
        assert_eq!(canonical_key(&p("M. Imran")), "imran/m");
        assert_eq!(canonical_key(&p("Imran")), "imran/_");
    }

    #[test]
    fn promotion() {
        let got = promote_variant(&[p("M. Imran"), p("Muhammad Imran")]).unwrap();
        assert_eq!(got.raw, "Muhammad Imran");
        assert_eq!(promote_variant(&[p("M. Imran")]).unwrap().raw, "M. Imran");
        let same = promote_variant(&[p("Muhammad Imran"), p("Muhammad Imran")]).unwrap();
        assert_eq!(same.raw, "Muhammad Imran");
        assert_eq!(
            promote_variant(&[p("Muhammad Imran"), p("Malik Imran")]),
            Err(NameError::Incompatible("Muhammad Imran".into(), "Malik Imran".into()))
        );
        assert_eq!(promote_variant(&[]), Err(NameError::Empty));
    }

    #[test]
    fn promotion_ties_prefer_longer_then_smaller_raw() {
        let got = promote_variant(&[p("M. Imran"), p("M. K. Imran"), p("Imran, M.")]).unwrap();
        assert_eq!(got.raw, "M. K. Imran");
        let got = promote_variant(&[p("M Imran"), p("M. Imran")]).unwrap();
        assert_eq!(got.raw, "M. Imran");
        let got = promote_variant(&[p("Imran M"), p("M Imran")]).unwrap();
        assert_eq!(got.raw, "Imran M");
    }

    #[test]
    fn group_promotion_is_stable() {
        let input = [p("M. Imran"), p("Muhammad Imran"), p("Malik Imran"), p("Imran, M.")];
        let out = promote_groups(&input);
        let raws: Vec<_> = out.iter().map(|v| v.raw.as_str()).collect();
        assert_eq!(raws, vec!["Muhammad Imran", "Malik Imran"]);
        assert_eq!(promote_groups(&out), out);

        // heads that become compatible once their groups collapse
        let input = [p("Muhammad Imran"), p("M. Khan Imran"), p("M. Ali Imran")];
        let out = promote_groups(&input);
        assert_eq!(promote_groups(&out), out);
    }

    fn name_strategy() -> impl Strategy<Value = String> {
        let given = prop::collection::vec(
            prop_oneof!["[a-c]".prop_map(|s| format!("{}.", s.to_uppercase())), "[a-c][a-c]{1,3}",],
            0..3,
        );
        (given, "[a-b][a-c]{1,2}", any::<bool>()).prop_map(|(given, surname, comma)| {
            if comma && !given.is_empty() {
                format!("{surname}, {}", given.join(" "))
            } else {
                let mut parts = given;
                parts.push(surname);
                parts.join(" ")
            }
        })
    }

    proptest! {
        #[test]
        fn compatible_reflexive_and_symmetric(a in name_strategy(), b in name_strategy()) {
            let (a, b) = (p(&a), p(&b));
            prop_assert!(names_compatible(&a, &a));
            prop_assert_eq!(names_compatible(&a, &b), names_compatible(&b, &a));
        }

        #[test]
        fn parse_idempotent_through_normalized_form(raw in name_strategy()) {
            let v = p(&raw);
            let again = p(&v.normalized());
            prop_assert_eq!(&again.surname, &v.surname);
            prop_assert_eq!(&again.given, &v.given);
        }

        #[test]
        fn promoted_variant_is_compatible_with_inputs(names in prop::collection::vec(name_strategy(), 1..5)) {
            let vs: Vec<_> = names.iter().map(|n| p(n)).collect();
            if let Ok(best) = promote_variant(&vs) {
                prop_assert!(vs.iter().all(|v| names_compatible(&best, v)));
                prop_assert!(vs.contains(&best));
            }
        }

        #[test]
        fn group_promotion_idempotent(names in prop::collection::vec(name_strategy(), 1..6)) {
            let vs: Vec<_> = names.iter().map(|n| p(n)).collect();
            let once = promote_groups(&vs);
            prop_assert_eq!(promote_groups(&once), once.clone());
            prop_assert!(once.iter().all(|h| vs.contains(h)));
        }
    }
}
