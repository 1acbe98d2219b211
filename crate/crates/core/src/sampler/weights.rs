use crate::candidates::CandidateSet;

/// Cost weights derived from the candidate statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyWeights {
    /// Share of the mean-uncertainty criterion, in `[0, 1]`.
    pub w_uncertainty: f64,
    /// Share of the coverage-count criterion, `1 - w_uncertainty`.
    pub w_coverage: f64,
    pub beta2: f64,
    pub gamma2: f64,
}

/// Entropy-method weights over two criteria per candidate: mean sensor
/// uncertainty of its visible set and the size of that set.
///
/// A criterion that varies more across candidates carries more information
/// and gets a larger share. Each share is then divided by the criterion's
/// mean so the two cost terms are of comparable magnitude; the coverage
/// weight is negated so that coverage is rewarded. This is one reading of
/// the method, not the only one.
pub fn entropy_weights(candidates: &CandidateSet) -> EntropyWeights {
    let rows: Vec<(f64, f64)> = candidates
        .visible
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| (s.entries.iter().map(|e| e.u_sen).sum::<f64>() / s.len() as f64, s.len() as f64))
        .collect();
    let n = rows.len();
    let means = if n == 0 {
        (1.0, 1.0)
    } else {
        (
            rows.iter().map(|r| r.0).sum::<f64>() / n as f64,
            rows.iter().map(|r| r.1).sum::<f64>() / n as f64,
        )
    };
    let d_u = divergence(rows.iter().map(|r| r.0));
    let d_n = divergence(rows.iter().map(|r| r.1));
    let w_u = if d_u + d_n > 0.0 { d_u / (d_u + d_n) } else { 0.5 };
    let w_n = 1.0 - w_u;
    EntropyWeights {
        w_uncertainty: w_u,
        w_coverage: w_n,
        beta2: w_u / means.0,
        gamma2: -w_n / means.1,
    }
}

/// One minus the normalized Shannon entropy of a positive column.
fn divergence(column: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = column.clone().count();
    let total: f64 = column.clone().sum();
    if n < 2 || total <= 0.0 {
        return 0.0;
    }
    let h: f64 = column
        .map(|x| x / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    (1.0 - h / (n as f64).ln()).max(0.0)
}
