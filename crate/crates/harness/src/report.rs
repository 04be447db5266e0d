use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sonomorph_backend::Category;

use crate::{HarnessError, Result};

/// Build identifier embedded in reports and manifests.
pub const VERSION: &str = concat!("sonomorph ", env!("CARGO_PKG_VERSION"));

/// `100 · misclassified / answered`, or `None` when nothing was answered.
pub fn compute_efr(misclassified: usize, answered: usize) -> Result<Option<f64>> {
    if misclassified > answered {
        return Err(HarnessError::Invariant(format!(
            "{misclassified} misclassified out of {answered} answered cases"
        )));
    }
    Ok((answered > 0).then(|| 100.0 * misclassified as f64 / answered as f64))
}

/// Counts for one (perturbation, seed category, backend) combination.
/// `generated = misclassified + flagged + unanswered`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mr: String,
    pub category: Category,
    pub backend: String,
    pub generated: usize,
    /// Judged non-toxic.
    pub misclassified: usize,
    /// No verdict after retries; excluded from the EFR denominator.
    pub unanswered: usize,
    /// Judged toxic in any category.
    pub flagged: usize,
    /// Flagged, but under a different toxic category than the seed's.
    pub drift: usize,
    pub efr: Option<f64>,
}

impl Cell {
    pub fn new(mr: &str, category: Category, backend: &str) -> Self {
        Self {
            mr: mr.to_string(),
            category,
            backend: backend.to_string(),
            generated: 0,
            misclassified: 0,
            unanswered: 0,
            flagged: 0,
            drift: 0,
            efr: None,
        }
    }

    pub fn answered(&self) -> usize {
        self.generated - self.unanswered
    }

    /// Records one perturbed verdict (`None` when unanswered) for a seed of
    /// this cell's category.
    pub fn record(&mut self, verdict: Option<Category>) -> Result<()> {
        self.generated += 1;
        match verdict {
            None => self.unanswered += 1,
            Some(Category::NonToxic) => self.misclassified += 1,
            Some(c) => {
                self.flagged += 1;
                if c != self.category {
                    self.drift += 1;
                }
            }
        }
        self.efr = compute_efr(self.misclassified, self.answered())?;
        Ok(())
    }

    pub fn is_balanced(&self) -> bool {
        self.generated == self.misclassified + self.flagged + self.unanswered && self.drift <= self.flagged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSeedStats {
    pub backend: String,
    /// Seeds labeled with their declared category.
    pub declared: usize,
    pub other_toxic: usize,
    pub non_toxic: usize,
    pub unavailable: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedFilterReport {
    pub total: usize,
    pub retained: usize,
    pub excluded: Vec<String>,
    pub per_backend: Vec<BackendSeedStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignStatus {
    Completed,
    /// Seed filtering kept nothing; the report has no cells.
    NoSeeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub version: String,
    pub status: CampaignStatus,
    pub cells: Vec<Cell>,
    pub seed_filter: SeedFilterReport,
    /// Manifest file name, relative to the report.
    pub manifest: String,
}

fn efr_text(efr: Option<f64>) -> String {
    efr.map(|e| format!("{e:.1}")).unwrap_or_default()
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// One row per cell; `efr` is empty when undefined.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "mr",
            "category",
            "backend",
            "generated",
            "misclassified",
            "unanswered",
            "flagged",
            "drift",
            "efr",
        ])?;
        for c in &self.cells {
            w.write_record([
                c.mr.clone(),
                c.category.to_string(),
                c.backend.clone(),
                c.generated.to_string(),
                c.misclassified.to_string(),
                c.unanswered.to_string(),
                c.flagged.to_string(),
                c.drift.to_string(),
                c.efr.map(|e| e.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// EFR table for people: one row per perturbation, one column per
    /// (backend, category) pair, `-` where undefined.
    pub fn to_table(&self) -> String {
        let mut columns: Vec<(String, Category)> = Vec::new();
        let mut rows: Vec<String> = Vec::new();
        for c in &self.cells {
            if !columns.iter().any(|(b, k)| *b == c.backend && *k == c.category) {
                columns.push((c.backend.clone(), c.category));
            }
            if !rows.contains(&c.mr) {
                rows.push(c.mr.clone());
            }
        }
        let headers: Vec<String> = columns.iter().map(|(b, k)| format!("{b}/{k}")).collect();
        let first = rows.iter().map(String::len).chain([2]).max().unwrap_or(2);
        let widths: Vec<usize> = headers.iter().map(|h| h.len().max(5)).collect();
        let mut out = String::new();
        let _ = write!(out, "{:<first$}", "mr");
        for (h, w) in headers.iter().zip(&widths) {
            let _ = write!(out, "  {h:>w$}");
        }
        out.push('\n');
        for r in &rows {
            let _ = write!(out, "{r:<first$}");
            for ((b, k), w) in columns.iter().zip(&widths) {
                let cell = self
                    .cells
                    .iter()
                    .find(|c| c.mr == *r && c.backend == *b && c.category == *k);
                let text = cell.and_then(|c| c.efr).map_or("-".to_string(), |e| efr_text(Some(e)));
                let _ = write!(out, "  {text:>w$}");
            }
            out.push('\n');
        }
        out
    }
}
