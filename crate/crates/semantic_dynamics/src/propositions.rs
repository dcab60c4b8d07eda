use std::fmt::Write;

use embedding::{semdist, Embedder};
use serde::{Deserialize, Serialize};

use crate::SdaError;

/// Concatenates two texts, inserting a space only when neither side
/// already provides whitespace at the seam.
pub fn join_texts(a: &str, b: &str) -> String {
    if a.is_empty() {
        return b.to_string();
    }
    if a.ends_with(char::is_whitespace) || b.starts_with(char::is_whitespace) || b.is_empty() {
        return format!("{a}{b}");
    }
    format!("{a} {b}")
}

/// ΔS_γ(span) = semdist(γ·span, γ).
pub fn delta_semantics_span<E: Embedder + ?Sized>(embedder: &E, base: &str, span: &str) -> Result<f64, SdaError> {
    if base.trim().is_empty() {
        return Err(SdaError::EmptyBase);
    }
    Ok(semdist(embedder, &join_texts(base, span), base)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub proposition: u8,
    pub operands: Vec<String>,
    pub base: String,
    pub tolerance: Option<f64>,
    pub repeat: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: bool,
    pub notes: Vec<String>,
}

impl PropositionReport {
    /// Re-derives the verdict from the stored values.
    pub fn recompute_verdict(&self) -> bool {
        match self.proposition {
            1 => self.lhs <= self.rhs,
            2 => self.lhs >= self.rhs,
            _ => within(self.lhs, self.tolerance.unwrap_or(0.0)),
        }
    }
}

fn within(d: f64, eta: f64) -> bool {
    d < eta || d == 0.0
}

fn non_empty(text: &str, name: &'static str) -> Result<(), SdaError> {
    if text.trim().is_empty() {
        return Err(SdaError::EmptyOperand(name));
    }
    Ok(())
}

fn tolerance(eta: f64) -> Result<(), SdaError> {
    if !(eta >= 0.0) {
        return Err(SdaError::InvalidParameter(format!("tolerance must be non-negative, got {eta}")));
    }
    Ok(())
}

/// Both sides of the additivity comparison plus the swapped-order joint value.
fn additivity<E: Embedder + ?Sized>(embedder: &E, alpha: &str, beta: &str, gamma: &str) -> Result<(f64, f64, f64), SdaError> {
    non_empty(alpha, "alpha")?;
    non_empty(beta, "beta")?;
    non_empty(gamma, "gamma")?;
    let joint = delta_semantics_span(embedder, gamma, &join_texts(alpha, beta))?;
    let swapped = delta_semantics_span(embedder, gamma, &join_texts(beta, alpha))?;
    let sum = delta_semantics_span(embedder, gamma, alpha)? + delta_semantics_span(embedder, gamma, beta)?;
    Ok((joint, swapped, sum))
}

fn additivity_report(id: u8, alpha: &str, beta: &str, gamma: &str, (joint, swapped, sum): (f64, f64, f64)) -> PropositionReport {
    let mut notes = Vec::new();
    if (joint < sum && swapped > sum) || (joint > sum && swapped < sum) {
        notes.push(format!(
            "contradiction: swapped order gives {swapped:.6} on the other side of {sum:.6}"
        ));
    }
    let mut report = PropositionReport {
        proposition: id,
        operands: vec![alpha.to_string(), beta.to_string()],
        base: gamma.to_string(),
        tolerance: None,
        repeat: None,
        lhs: joint,
        rhs: sum,
        verdict: false,
        notes,
    };
    report.verdict = report.recompute_verdict();
    report
}

/// Checks ΔS_γ(α·β) ≤ ΔS_γ(α) + ΔS_γ(β).
pub fn check_inclusion<E: Embedder + ?Sized>(embedder: &E, alpha: &str, beta: &str, gamma: &str) -> Result<PropositionReport, SdaError> {
    let values = additivity(embedder, alpha, beta, gamma)?;
    Ok(additivity_report(1, alpha, beta, gamma, values))
}

/// Checks ΔS_γ(α·β) ≥ ΔS_γ(α) + ΔS_γ(β).
pub fn check_orthogonality<E: Embedder + ?Sized>(embedder: &E, alpha: &str, beta: &str, gamma: &str) -> Result<PropositionReport, SdaError> {
    let values = additivity(embedder, alpha, beta, gamma)?;
    Ok(additivity_report(2, alpha, beta, gamma, values))
}

/// Checks |ΔS_γ(α^k) − ΔS_γ(α)| < η.
pub fn check_idempotence<E: Embedder + ?Sized>(
    embedder: &E,
    alpha: &str,
    gamma: &str,
    k: usize,
    eta: f64,
) -> Result<PropositionReport, SdaError> {
    non_empty(alpha, "alpha")?;
    non_empty(gamma, "gamma")?;
    tolerance(eta)?;
    if k < 2 {
        return Err(SdaError::InvalidParameter(format!("repeat count must be at least 2, got {k}")));
    }
    let repeated = (1..k).fold(alpha.to_string(), |acc, _| join_texts(&acc, alpha));
    let once = delta_semantics_span(embedder, gamma, alpha)?;
    let many = delta_semantics_span(embedder, gamma, &repeated)?;
    let diff = (many - once).abs();
    Ok(PropositionReport {
        proposition: 3,
        operands: vec![alpha.to_string()],
        base: gamma.to_string(),
        tolerance: Some(eta),
        repeat: Some(k),
        lhs: diff,
        rhs: eta,
        verdict: within(diff, eta),
        notes: vec![format!("single {once:.6}, repeated {many:.6}")],
    })
}

/// Checks |ΔS_γ(α·β) − ΔS_γ(β·α)| < η.
pub fn check_order_invariance<E: Embedder + ?Sized>(
    embedder: &E,
    alpha: &str,
    beta: &str,
    gamma: &str,
    eta: f64,
) -> Result<PropositionReport, SdaError> {
    non_empty(alpha, "alpha")?;
    non_empty(beta, "beta")?;
    non_empty(gamma, "gamma")?;
    tolerance(eta)?;
    let ab = delta_semantics_span(embedder, gamma, &join_texts(alpha, beta))?;
    let ba = delta_semantics_span(embedder, gamma, &join_texts(beta, alpha))?;
    let diff = (ab - ba).abs();
    Ok(PropositionReport {
        proposition: 4,
        operands: vec![alpha.to_string(), beta.to_string()],
        base: gamma.to_string(),
        tolerance: Some(eta),
        repeat: None,
        lhs: diff,
        rhs: eta,
        verdict: within(diff, eta),
        notes: vec![format!("forward {ab:.6}, reverse {ba:.6}")],
    })
}

/// Pairwise ΔS_γ(seg_i·seg_j) for every ordered pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTable {
    pub size: usize,
    /// `forward[i][j] = ΔS_γ(seg_i·seg_j)` for `i < j`, `None` elsewhere.
    pub forward: Vec<Vec<Option<f64>>>,
    /// `reverse[i][j] = ΔS_γ(seg_j·seg_i)` for `i < j`, `None` elsewhere.
    pub reverse: Vec<Vec<Option<f64>>>,
}

impl PairwiseTable {
    pub fn entries(&self) -> usize {
        self.forward.iter().flatten().filter(|v| v.is_some()).count()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.forward.get(i)?.get(j).copied().flatten()
    }

    /// Largest |forward − reverse| over all pairs.
    pub fn max_order_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for (f, r) in self.forward.iter().flatten().zip(self.reverse.iter().flatten()) {
            if let (Some(f), Some(r)) = (f, r) {
                gap = gap.max((f - r).abs());
            }
        }
        gap
    }

    /// Upper-triangular Markdown grid: rows are segments 1..n-1, columns 2..n.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| ID |");
        for j in 2..=self.size {
            let _ = write!(out, " Segment {j} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.size - 1));
        out.push('\n');
        for i in 0..self.size - 1 {
            let _ = write!(out, "| Segment {} |", i + 1);
            for j in 1..self.size {
                match self.get(i, j) {
                    Some(v) => {
                        let _ = write!(out, " {v:.4} |");
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn pairwise_order_table<E: Embedder + ?Sized>(embedder: &E, segments: &[&str], gamma: &str) -> Result<PairwiseTable, SdaError> {
    if segments.len() < 2 {
        return Err(SdaError::InvalidParameter(format!("need at least 2 segments, got {}", segments.len())));
    }
    let n = segments.len();
    let mut forward = vec![vec![None; n]; n];
    let mut reverse = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            forward[i][j] = Some(delta_semantics_span(embedder, gamma, &join_texts(segments[i], segments[j]))?);
            reverse[i][j] = Some(delta_semantics_span(embedder, gamma, &join_texts(segments[j], segments[i]))?);
        }
    }
    Ok(PairwiseTable { size: n, forward, reverse })
}
