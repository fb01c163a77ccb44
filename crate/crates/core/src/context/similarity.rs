use crate::symbol::Symbol;

/// Similarity of two symbol streams in `[0, 1]`; 1 means identical.
pub trait StreamSimilarity: Sync {
    fn name(&self) -> &str;
    fn similarity(&self, a: &[Symbol], b: &[Symbol]) -> f64;
}

/// `1 - levenshtein(a, b) / max(|a|, |b|)`, and 1 for two empty streams.
#[derive(Debug, Clone, Copy, Default)]
pub struct EditSimilarity;

impl StreamSimilarity for EditSimilarity {
    fn name(&self) -> &str {
        "normalized-edit"
    }

    fn similarity(&self, a: &[Symbol], b: &[Symbol]) -> f64 {
        let longest = a.len().max(b.len());
        if longest == 0 {
            return 1.0;
        }
        let (a, b): (Vec<_>, Vec<_>) = (a.iter().collect(), b.iter().collect());
        let distance = strsim::generic_levenshtein(&a, &b);
        1.0 - distance as f64 / longest as f64
    }
}
