//! Logistic models of page inclusion and rewriting.
//!
//! Both models share one design: Low-referenced dummies for views, edits,
//! references and reverts, plus an edits×reverts interaction. Fitting is
//! plain maximum likelihood by iteratively reweighted least squares.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::features::{ActivityLevel, FactorLevels, PageRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Factor {
    Views,
    Edits,
    References,
    Reverts,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::Views, Factor::Edits, Factor::References, Factor::Reverts];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Views => "views",
            Factor::Edits => "edits",
            Factor::References => "references",
            Factor::Reverts => "reverts",
        }
    }

    pub fn level(self, levels: &FactorLevels) -> ActivityLevel {
        match self {
            Factor::Views => levels.views,
            Factor::Edits => levels.edits,
            Factor::References => levels.references,
            Factor::Reverts => levels.reverts,
        }
    }
}

/// How the edits×reverts term enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InteractionEncoding {
    /// One column: product of the ordinal scores Low=0 … VeryHigh=3.
    #[default]
    ScoreProduct,
    /// Dummy×dummy block over the non-reference levels (up to nine columns).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Column {
    Intercept,
    Dummy(Factor, ActivityLevel),
    ScoreInteraction,
    DummyInteraction(ActivityLevel, ActivityLevel),
}

impl Column {
    pub fn label(&self) -> String {
        match self {
            Column::Intercept => "(Intercept)".to_string(),
            Column::Dummy(f, l) => format!("{}[{}]", f.name(), l),
            Column::ScoreInteraction => "edits:reverts".to_string(),
            Column::DummyInteraction(e, r) => format!("edits[{e}]:reverts[{r}]"),
        }
    }

    fn value(&self, levels: &FactorLevels) -> f64 {
        match *self {
            Column::Intercept => 1.0,
            Column::Dummy(f, l) => indicator(f.level(levels) == l),
            Column::ScoreInteraction => f64::from(levels.edits.score() * levels.reverts.score()),
            Column::DummyInteraction(e, r) => indicator(levels.edits == e && levels.reverts == r),
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn candidate_columns(encoding: InteractionEncoding) -> Vec<Column> {
    const NON_REFERENCE: [ActivityLevel; 3] =
        [ActivityLevel::Mid, ActivityLevel::High, ActivityLevel::VeryHigh];
    let mut columns = vec![Column::Intercept];
    for factor in Factor::ALL {
        columns.extend(NON_REFERENCE.iter().map(|&l| Column::Dummy(factor, l)));
    }
    match encoding {
        InteractionEncoding::ScoreProduct => columns.push(Column::ScoreInteraction),
        InteractionEncoding::Full => {
            for e in NON_REFERENCE {
                columns.extend(NON_REFERENCE.iter().map(|&r| Column::DummyInteraction(e, r)));
            }
        }
    }
    columns
}

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub columns: Vec<Column>,
    pub x: DMatrix<f64>,
    /// Human-readable notes about dropped columns.
    pub notes: Vec<String>,
}

impl DesignMatrix {
    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(Column::label).collect()
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    /// Restricts the design to the given row indices, keeping columns as fitted.
    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        DesignMatrix { columns: self.columns.clone(), x: self.x.select_rows(rows), notes: self.notes.clone() }
    }
}

pub fn encode_design(records: &[PageRecord], encoding: InteractionEncoding) -> Result<DesignMatrix> {
    let levels: Vec<FactorLevels> = records.iter().map(|r| r.levels).collect();
    encode_levels(&levels, encoding)
}

/// Builds the design from factor levels. Columns that are identically zero
/// (absent levels) are dropped and recorded in `notes`.
pub fn encode_levels(levels: &[FactorLevels], encoding: InteractionEncoding) -> Result<DesignMatrix> {
    if levels.is_empty() {
        return Err(Error::invalid("cannot encode a design from zero records"));
    }
    let mut columns = Vec::new();
    let mut notes = Vec::new();
    for column in candidate_columns(encoding) {
        if column == Column::Intercept || levels.iter().any(|l| column.value(l) != 0.0) {
            columns.push(column);
        } else {
            notes.push(format!("dropped {}: level absent from corpus", column.label()));
        }
    }
    let x = DMatrix::from_fn(levels.len(), columns.len(), |i, j| columns[j].value(&levels[i]));
    Ok(DesignMatrix { columns, x, notes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Ridge penalty on non-intercept columns; `None` for plain MLE.
    pub ridge: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tolerance: 1e-8, max_iterations: 100, ridge: None }
    }
}

impl FitOptions {
    pub const DEFAULT_RIDGE: f64 = 1e-6;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub label: String,
    pub estimate: f64,
    pub standard_error: f64,
    pub z_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub columns: Vec<Column>,
    pub coefficients: Vec<Coefficient>,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    pub notes: Vec<String>,
}

impl CoefficientSet {
    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn get(&self, label: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.label == label)
    }
}

/// |β| beyond this on an unpenalized fit is treated as divergence.
const DIVERGENCE_BOUND: f64 = 30.0;

pub fn fit_logistic(design: &DesignMatrix, outcome: &[bool], options: &FitOptions) -> Result<CoefficientSet> {
    let x = &design.x;
    let (n, k) = x.shape();
    if outcome.len() != n {
        return Err(Error::invalid(format!("{} outcomes for {n} design rows", outcome.len())));
    }
    let positives = outcome.iter().filter(|&&y| y).count();
    if positives == 0 || positives == n {
        return Err(Error::Degenerate("outcome takes a single value; logistic fit undefined".into()));
    }
    let y = DVector::from_iterator(n, outcome.iter().map(|&b| indicator(b)));
    let penalty = penalty_vector(&design.columns, options.ridge);

    let mut beta = DVector::<f64>::zeros(k);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iterations {
        iterations += 1;
        let p = fitted(x, &beta);
        let gradient = x.transpose() * (&y - &p) - penalty.component_mul(&beta);
        let info = information(x, &p, &penalty);
        let chol = match Cholesky::new(info.clone()) {
            Some(c) => c,
            None => return Err(Error::Separation { column: singular_column(&info, &design.columns) }),
        };
        let step = chol.solve(&gradient);
        beta += &step;
        if !beta.iter().all(|b| b.is_finite()) {
            return Err(Error::Separation { column: largest(&step, &design.columns) });
        }
        if options.ridge.is_none() && beta.amax() > DIVERGENCE_BOUND {
            return Err(Error::Separation { column: largest(&beta, &design.columns) });
        }
        if step.amax() < options.tolerance {
            converged = true;
            break;
        }
    }

    let p = fitted(x, &beta);
    let info = information(x, &p, &penalty);
    let covariance = Cholesky::new(info.clone())
        .ok_or_else(|| Error::Separation { column: singular_column(&info, &design.columns) })?
        .inverse();
    let coefficients = design
        .columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let estimate = beta[j];
            let standard_error = covariance[(j, j)].max(0.0).sqrt();
            let z_value = estimate / standard_error;
            Coefficient {
                label: col.label(),
                estimate,
                standard_error,
                z_value,
                p_value: two_sided_normal_p(z_value),
            }
        })
        .collect();

    Ok(CoefficientSet {
        columns: design.columns.clone(),
        coefficients,
        iterations,
        converged,
        log_likelihood: log_likelihood(x, &y, &beta),
        notes: design.notes.clone(),
    })
}

fn penalty_vector(columns: &[Column], ridge: Option<f64>) -> DVector<f64> {
    let lambda = ridge.unwrap_or(0.0);
    DVector::from_iterator(
        columns.len(),
        columns.iter().map(|c| if *c == Column::Intercept { 0.0 } else { lambda }),
    )
}

fn fitted(x: &DMatrix<f64>, beta: &DVector<f64>) -> DVector<f64> {
    (x * beta).map(inverse_logit)
}

/// X'WX (+ diagonal penalty) with W = p(1 − p).
fn information(x: &DMatrix<f64>, p: &DVector<f64>, penalty: &DVector<f64>) -> DMatrix<f64> {
    let w = p.map(|pi| pi * (1.0 - pi));
    let mut weighted = x.clone();
    for (i, mut row) in weighted.row_iter_mut().enumerate() {
        row *= w[i];
    }
    let mut info = x.transpose() * weighted;
    for j in 0..penalty.len() {
        info[(j, j)] += penalty[j];
    }
    info
}

/// First column whose leading principal block stops being positive definite.
fn singular_column(info: &DMatrix<f64>, columns: &[Column]) -> String {
    for (j, column) in columns.iter().enumerate() {
        let block = info.view((0, 0), (j + 1, j + 1)).into_owned();
        let ok = Cholesky::new(block).is_some_and(|c| c.l().diagonal().iter().all(|d| *d > 1e-10));
        if !ok {
            return column.label();
        }
    }
    columns.last().map(Column::label).unwrap_or_default()
}

fn largest(v: &DVector<f64>, columns: &[Column]) -> String {
    let idx = v.iter().enumerate().fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
    columns[idx].label()
}

pub fn inverse_logit(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y.iter()).map(|(e, yi)| yi * e - softplus(*e)).sum()
}

/// Gradient of the unpenalized log-likelihood at `beta`.
pub fn score_vector(design: &DesignMatrix, outcome: &[bool], beta: &[f64]) -> Vec<f64> {
    let beta = DVector::from_column_slice(beta);
    let y = DVector::from_iterator(outcome.len(), outcome.iter().map(|&b| indicator(b)));
    let p = fitted(&design.x, &beta);
    (design.x.transpose() * (y - p)).iter().copied().collect()
}

fn two_sided_normal_p(z: f64) -> f64 {
    if z.is_nan() {
        return 1.0;
    }
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Fitted probability for one page's levels.
pub fn predict_probability(coeffs: &CoefficientSet, levels: &FactorLevels) -> Result<f64> {
    if !coeffs.converged {
        return Err(Error::invalid("coefficients did not converge"));
    }
    let encoding = if coeffs.columns.iter().any(|c| matches!(c, Column::DummyInteraction(..))) {
        InteractionEncoding::Full
    } else {
        InteractionEncoding::ScoreProduct
    };
    for column in candidate_columns(encoding) {
        if column.value(levels) != 0.0 && !coeffs.columns.contains(&column) {
            return Err(Error::invalid(format!(
                "column {} was absent when the model was fitted",
                column.label()
            )));
        }
    }
    let eta: f64 = coeffs
        .columns
        .iter()
        .zip(&coeffs.coefficients)
        .map(|(col, c)| col.value(levels) * c.estimate)
        .sum();
    Ok(inverse_logit(eta))
}
