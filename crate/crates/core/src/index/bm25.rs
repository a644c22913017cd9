use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Contribution of one query term to a record's score.
///
/// `idf = ln(1 + (n - df + 0.5) / (df + 0.5))`, which stays positive even
/// for terms present in every record.
pub fn bm25_term_score(params: &Bm25Params, tf: u32, length: u32, average_length: f64, n: usize, df: usize) -> f64 {
    if tf == 0 || n == 0 {
        return 0.0;
    }
    let (n, df, tf) = (n as f64, df as f64, f64::from(tf));
    let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
    let norm = if average_length > 0.0 { f64::from(length) / average_length } else { 1.0 };
    idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm))
}
