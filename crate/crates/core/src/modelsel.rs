//! Information criteria and the full-versus-independence model comparison.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitl::BitlParams;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{fit_mle, loglik, FitOptions, FitResult};
use crate::itl::ItlParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
}

/// `aic = -2ℓ + 2k`, `bic = -2ℓ + k ln n`.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> InformationCriteria {
    let k = k as f64;
    InformationCriteria {
        aic: -2.0 * loglik + 2.0 * k,
        bic: -2.0 * loglik + k * (n.max(1) as f64).ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub label: String,
    pub k: usize,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub dic: Option<f64>,
}

impl ModelRow {
    pub fn new(label: impl Into<String>, k: usize, loglik: f64, n: usize) -> Self {
        let ic = information_criteria(loglik, k, n);
        Self {
            label: label.into(),
            k,
            loglik,
            aic: ic.aic,
            bic: ic.bic,
            dic: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Winners {
    pub aic: String,
    pub bic: String,
    /// Present only when every row carries a DIC.
    pub dic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub rows: Vec<ModelRow>,
    pub winners: Winners,
}

pub const FULL_LABEL: &str = "BITL";
pub const INDEPENDENCE_LABEL: &str = "BITL(delta=0)";

fn argmin_label(rows: &[ModelRow], key: impl Fn(&ModelRow) -> f64) -> String {
    rows.iter()
        .fold(None::<&ModelRow>, |best, r| match best {
            Some(b) if key(b) <= key(r) => Some(b),
            _ => Some(r),
        })
        .map(|r| r.label.clone())
        .unwrap_or_default()
}

impl ComparisonReport {
    pub fn from_rows(n: usize, rows: Vec<ModelRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Usage("a comparison needs at least one model".into()));
        }
        let mut report = Self {
            n,
            rows,
            winners: Winners {
                aic: String::new(),
                bic: String::new(),
                dic: None,
            },
        };
        report.refresh_winners();
        Ok(report)
    }

    fn refresh_winners(&mut self) {
        self.winners.aic = argmin_label(&self.rows, |r| r.aic);
        self.winners.bic = argmin_label(&self.rows, |r| r.bic);
        self.winners.dic = self
            .rows
            .iter()
            .all(|r| r.dic.is_some())
            .then(|| argmin_label(&self.rows, |r| r.dic.unwrap_or(f64::INFINITY)));
    }

    /// Adds an externally fitted model (e.g. a competitor family fitted elsewhere).
    pub fn push_row(&mut self, row: ModelRow) {
        self.rows.push(row);
        self.refresh_winners();
    }

    pub fn set_dic(&mut self, label: &str, dic: f64) -> Result<()> {
        let row = self
            .rows
            .iter_mut()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::Usage(format!("no model labelled `{label}`")))?;
        row.dic = Some(dic);
        self.refresh_winners();
        Ok(())
    }

    pub fn row(&self, label: &str) -> Option<&ModelRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>2}  {:>14}  {:>14}  {:>14}  {:>14}",
            "model", "k", "loglik", "AIC", "BIC", "DIC"
        );
        for r in &self.rows {
            let dic = r.dic.map_or_else(|| "-".to_string(), |d| format!("{d:.4}"));
            let _ = writeln!(
                s,
                "{:<width$}  {:>2}  {:>14.4}  {:>14.4}  {:>14.4}  {:>14}",
                r.label, r.k, r.loglik, r.aic, r.bic, dic
            );
        }
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "preferred by AIC: {}", self.winners.aic);
        let _ = writeln!(s, "preferred by BIC: {}", self.winners.bic);
        if let Some(d) = &self.winners.dic {
            let _ = writeln!(s, "preferred by DIC: {d}");
        }
        s
    }
}

/// Independence submodel: closed-form marginal ITL fits.
pub fn fit_independence(d: &Dataset) -> Result<(BitlParams, f64)> {
    let a = ItlParams::fit(&d.xs())?;
    let b = ItlParams::fit(&d.ys())?;
    let p = BitlParams::new(a.shape(), b.shape(), 0.0)?;
    let ll = loglik(&p, d)?;
    Ok((p, ll))
}

/// Full model and independence submodel fitted side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub full: FitResult,
    pub independence: BitlParams,
    pub report: ComparisonReport,
}

pub fn compare_models(d: &Dataset, opts: &FitOptions) -> Result<Comparison> {
    let full = fit_mle(d, opts).map_err(|e| Error::Fit(format!("{FULL_LABEL}: {e}")))?;
    let (independence, sub_ll) =
        fit_independence(d).map_err(|e| Error::Fit(format!("{INDEPENDENCE_LABEL}: {e}")))?;
    if full.loglik + 1e-6 < sub_ll {
        log::warn!(
            "full-model loglik {} below nested submodel {}; optimiser did not reach the maximum",
            full.loglik,
            sub_ll
        );
    }
    let rows = vec![
        ModelRow::new(FULL_LABEL, 3, full.loglik, d.len()),
        ModelRow::new(INDEPENDENCE_LABEL, 2, sub_ll, d.len()),
    ];
    Ok(Comparison {
        full,
        independence,
        report: ComparisonReport::from_rows(d.len(), rows)?,
    })
}
