use std::collections::BTreeSet;

const DEFAULT_LIST: &str = include_str!("../../data/stopwords_en.txt");

/// Parses a stop-word file: one word per line, `#` starts a comment line.
/// Words are trimmed and lowercased.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_lowercase).collect()
}

/// The bundled English list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_LIST)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let words = parse_stopwords("# comment\nThe\n\n  of \n#and\n");
        assert_eq!(words.into_iter().collect::<Vec<_>>(), vec!["of", "the"]);
    }

    #[test]
    fn bundled_list() {
        let words = default_stopwords();
        assert!(words.len() >= 170);
        assert!(words.contains("the") && words.contains("of"));
    }
}
