//! String and text similarity: edit distance, keyword vectors, cosine.

mod levenshtein;
pub mod porter;
mod stopwords;
mod vector;

pub use levenshtein::{levenshtein, similarity};
pub use porter::{porter_stem, stem_to_fixpoint};
pub use stopwords::{default_stopwords, parse_stopwords};
pub use vector::{build_vector, terms, tokenize, vector_similarity, KeywordVector};
