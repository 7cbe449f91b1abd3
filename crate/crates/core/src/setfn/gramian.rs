use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::{cholesky, spectrum, SymMatrix};
use crate::rng::SplitMix64;

use super::{SetFunction, Subset, MAX_GROUND};

/// Data for `W_S = β² I_n + Σ_{s∈S} x_s x_sᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramianModel {
    n: usize,
    beta: f64,
    columns: Vec<Vec<f64>>,
    normalized: bool,
}

impl GramianModel {
    pub fn new(beta: f64, columns: Vec<Vec<f64>>, normalize: bool) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        if columns.is_empty() {
            return Err(Error::InvalidParameter(
                "model needs at least one column".into(),
            ));
        }
        if columns.len() > MAX_GROUND {
            return Err(Error::TooLarge {
                ground: columns.len(),
                limit: MAX_GROUND,
            });
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "state dimension must be positive".into(),
            ));
        }
        let mut columns = columns;
        for (i, c) in columns.iter_mut().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "column {i} has a non-finite entry"
                )));
            }
            if normalize {
                let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "column {i} is zero and cannot be normalized"
                    )));
                }
                c.iter_mut().for_each(|v| *v /= norm);
            }
        }
        Ok(Self {
            n,
            beta,
            columns,
            normalized: normalize,
        })
    }

    /// Columns with i.i.d. standard normal entries drawn column by column
    /// from `SplitMix64::new(seed)`.
    pub fn gaussian(
        n: usize,
        ground: usize,
        beta: f64,
        seed: u64,
        normalize: bool,
    ) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        let columns = (0..ground)
            .map(|_| (0..n).map(|_| rng.next_normal()).collect())
            .collect();
        Self::new(beta, columns, normalize)
    }

    /// Parses `n` rows of `N` comma-separated values (no header). Row `i`
    /// holds coordinate `i` of every column.
    pub fn from_csv_str(text: &str, beta: f64, normalize: bool) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .enumerate()
                .map(|(col, field)| {
                    field.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: idx + 1,
                        column: col + 1,
                        message: format!("bad number `{}`: {e}", field.trim()),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        line: idx + 1,
                        column: row.len().min(first.len()) + 1,
                        message: format!("expected {} values, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty matrix".into(),
            });
        }
        let ground = rows[0].len();
        let columns = (0..ground)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Self::new(beta, columns, normalize)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.columns.iter().map(|c| format!("{:?}", c[i])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Same columns, different base scale.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.columns.clone(), false).map(|mut m| {
            m.normalized = self.normalized;
            m
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> usize {
        self.columns.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `Λ0 = β² I`.
    pub fn base(&self) -> SymMatrix {
        SymMatrix::scaled_identity(self.n, self.beta * self.beta).expect("n > 0")
    }

    pub fn gramian(&self, set: Subset) -> SymMatrix {
        let mut w = self.base();
        for s in set.iter() {
            w.rank1_update_in_place(&self.columns[s])
                .expect("column length is n");
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// `tr(Λ0⁻¹) - tr(W_S⁻¹)`
    NegTraceInv,
    /// `log det W_S - log det Λ0`
    LogDet,
    /// `λ_1(W_S) - β²`
    MinEig,
    /// `λ_n(W_S) - β²`
    MaxEig,
    /// `tr(W_S) - tr(Λ0)`
    Trace,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::NegTraceInv => "neg-trace-inv",
            ObjectiveKind::LogDet => "log-det",
            ObjectiveKind::MinEig => "min-eig",
            ObjectiveKind::MaxEig => "max-eig",
            ObjectiveKind::Trace => "trace",
        }
    }
}

/// One of the spectral objectives of a [`GramianModel`], shifted so that
/// `f(∅) = 0`. [`SetFunction::offset`] returns the raw value at `∅`.
#[derive(Debug, Clone)]
pub struct GramianObjective {
    model: Arc<GramianModel>,
    kind: ObjectiveKind,
    offset: f64,
}

impl GramianObjective {
    pub fn new(model: Arc<GramianModel>, kind: ObjectiveKind) -> Result<Self> {
        let mut obj = Self {
            model,
            kind,
            offset: 0.0,
        };
        obj.offset = obj.raw(Subset::empty(obj.model.ground()))?;
        Ok(obj)
    }

    pub fn neg_trace_inv(model: Arc<GramianModel>) -> Result<Self> {
        Self::new(model, ObjectiveKind::NegTraceInv)
    }

    pub fn log_det(model: Arc<GramianModel>) -> Result<Self> {
        Self::new(model, ObjectiveKind::LogDet)
    }

    pub fn min_eig(model: Arc<GramianModel>) -> Result<Self> {
        Self::new(model, ObjectiveKind::MinEig)
    }

    pub fn max_eig(model: Arc<GramianModel>) -> Result<Self> {
        Self::new(model, ObjectiveKind::MaxEig)
    }

    pub fn trace(model: Arc<GramianModel>) -> Result<Self> {
        Self::new(model, ObjectiveKind::Trace)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn model(&self) -> &GramianModel {
        &self.model
    }

    /// The unshifted objective value.
    pub fn raw(&self, set: Subset) -> Result<f64> {
        let m = &self.model;
        match self.kind {
            ObjectiveKind::Trace => {
                let b2 = m.beta * m.beta;
                Ok(m.n as f64 * b2
                    + set
                        .iter()
                        .map(|s| m.columns[s].iter().map(|v| v * v).sum::<f64>())
                        .sum::<f64>())
            }
            ObjectiveKind::NegTraceInv => Ok(-cholesky(&m.gramian(set))?.trace_inverse()),
            ObjectiveKind::LogDet => Ok(cholesky(&m.gramian(set))?.log_det()),
            ObjectiveKind::MinEig => Ok(spectrum(&m.gramian(set))?.min()),
            ObjectiveKind::MaxEig => Ok(spectrum(&m.gramian(set))?.max()),
        }
    }
}

impl SetFunction for GramianObjective {
    fn ground_size(&self) -> usize {
        self.model.ground()
    }

    fn evaluate(&self, set: Subset) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        if self.kind == ObjectiveKind::Trace {
            let m = &self.model;
            return Ok(set
                .iter()
                .map(|s| m.columns[s].iter().map(|v| v * v).sum::<f64>())
                .sum());
        }
        Ok(self.raw(set)? - self.offset)
    }

    fn offset(&self) -> f64 {
        self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(beta: f64, cols: Vec<Vec<f64>>) -> Arc<GramianModel> {
        Arc::new(GramianModel::new(beta, cols, false).unwrap())
    }

    fn set(ix: &[usize], n: usize) -> Subset {
        Subset::from_indices(ix, n).unwrap()
    }

    #[test]
    fn neg_trace_inv_examples() {
        let f = GramianObjective::neg_trace_inv(model(1.0, vec![vec![1.0]])).unwrap();
        assert!((f.evaluate(set(&[0], 1)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f.evaluate(Subset::empty(1)).unwrap(), 0.0);
        let f = GramianObjective::neg_trace_inv(model(1.0, vec![vec![1.0, 0.0], vec![0.0, 1.0]]))
            .unwrap();
        assert!((f.evaluate(set(&[0, 1], 2)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_det_examples() {
        let f = GramianObjective::log_det(model(1.0, vec![vec![1.0]])).unwrap();
        assert!((f.evaluate(set(&[0], 1)).unwrap() - 2f64.ln()).abs() < 1e-15);
        let f =
            GramianObjective::log_det(model(1.0, vec![vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert!((f.evaluate(set(&[0, 1], 2)).unwrap() - 4f64.ln()).abs() < 1e-14);
        assert_eq!(f.evaluate(Subset::empty(2)).unwrap(), 0.0);
    }

    #[test]
    fn eigen_examples() {
        let f = GramianObjective::min_eig(model(1.0, vec![vec![1.0, 0.0]])).unwrap();
        assert!(f.evaluate(set(&[0], 1)).unwrap().abs() < 1e-15);
        let f = GramianObjective::min_eig(model(1.0, vec![vec![2.0]])).unwrap();
        assert!((f.evaluate(set(&[0], 1)).unwrap() - 4.0).abs() < 1e-14);
        let f = GramianObjective::max_eig(model(1.0, vec![vec![1.0, 0.0]])).unwrap();
        assert!((f.evaluate(set(&[0], 1)).unwrap() - 1.0).abs() < 1e-14);
        let f =
            GramianObjective::max_eig(model(1.0, vec![vec![1.0, 0.0], vec![1.0, 0.0]])).unwrap();
        assert!((f.evaluate(set(&[0, 1], 2)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_is_modular() {
        let m = Arc::new(GramianModel::gaussian(3, 5, 1.0, 4, true).unwrap());
        let f = GramianObjective::trace(m).unwrap();
        assert!((f.evaluate(set(&[0, 2, 4], 5)).unwrap() - 3.0).abs() < 1e-12);
        for mask in 0..32u64 {
            let s = Subset::from_mask(mask, 5).unwrap();
            for a in 0..5 {
                if !s.contains(a) {
                    let lhs = f.marginal(s, a).unwrap();
                    let rhs = f.marginal(Subset::empty(5), a).unwrap();
                    assert!((lhs - rhs).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn offsets_are_raw_empty_values() {
        let m = model(2.0, vec![vec![1.0, 0.0]]);
        let ld = GramianObjective::log_det(m.clone()).unwrap();
        assert!((ld.offset() - 2.0 * 4f64.ln()).abs() < 1e-14);
        let mi = GramianObjective::min_eig(m).unwrap();
        assert!((mi.offset() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_and_validation() {
        let m = GramianModel::gaussian(4, 6, 1.0, 1, true).unwrap();
        for c in m.columns() {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(GramianModel::new(0.0, vec![vec![1.0]], false).is_err());
        assert!(GramianModel::new(1.0, vec![vec![1.0], vec![1.0, 2.0]], false).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = GramianModel::from_csv_str("1,2,3\n4,5,6\n", 1.0, false).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.ground(), 3);
        assert_eq!(m.column(1), &[2.0, 5.0]);
        let err = GramianModel::from_csv_str("1,2\n3,x\n", 1.0, false).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 2,
                column: 2,
                ..
            }
        ));
        let err = GramianModel::from_csv_str("1,2\n3\n", 1.0, false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let back = GramianModel::from_csv_str(&m.to_csv_string(), 1.0, false).unwrap();
        assert_eq!(back, m);
    }
}
