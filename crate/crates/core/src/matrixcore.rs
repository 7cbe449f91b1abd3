//! Dense symmetric matrix numerics for the Gramian objectives.
//!
//! Matrices here are small (n <= 64) and symmetric positive definite in every
//! use the objectives make of them, so the routines are the plain textbook
//! ones: cyclic Jacobi for the spectrum and an unpivoted Cholesky factor for
//! log-determinants, traces of inverses and linear solves.

use crate::error::{Error, Result};

/// Sweep budget for the cyclic Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// A dense symmetric matrix stored in full (row-major) with mirrored writes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be positive".into(),
            ));
        }
        Ok(Self {
            n,
            data: vec![0.0; n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, value: f64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.n + i] = v;
        }
        Ok(m)
    }

    /// Builds a matrix from rows. Rows must form a square matrix whose
    /// transpose agrees with it up to a relative `1e-12`; the stored matrix is
    /// the symmetric part.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
                if (a - b).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Writes `value` at `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `m + x xᵀ`.
    pub fn rank1_update(&self, x: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        out.rank1_update_in_place(x)?;
        Ok(out)
    }

    pub fn rank1_update_in_place(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let n = self.n;
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                self.data[i * n + j] += xi * x[j];
            }
        }
        Ok(())
    }

    /// Computes `Pᵀ m P` for a signed permutation `P` given as
    /// `(perm[i], sign[i])`: column `i` of `P` is `sign[i] * e_perm[i]`.
    pub fn signed_permutation(&self, perm: &[usize], signs: &[f64]) -> Result<Self> {
        if perm.len() != self.n || signs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: perm.len().min(signs.len()),
            });
        }
        let mut out = Self::zeros(self.n)?;
        for i in 0..self.n {
            for j in i..self.n {
                out.set(i, j, signs[i] * signs[j] * self.get(perm[i], perm[j]));
            }
        }
        Ok(out)
    }
}

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest eigenvalue, `λ_1`.
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Largest eigenvalue, `λ_n`.
    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Default convergence threshold: `1e-12 * n * max|entry|`.
pub fn default_tolerance(m: &SymMatrix) -> f64 {
    1e-12 * m.dim() as f64 * m.max_abs()
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// All eigenvalues of `m` by cyclic Jacobi rotations, sorted ascending.
///
/// Iteration stops once the Frobenius norm of the off-diagonal part falls to
/// `tol` or below.
pub fn eigenvalues(m: &SymMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigensolver tolerance must be positive, got {tol}"
        )));
    }
    let n = m.dim();
    let mut a = m.data.clone();
    let mut residual = off_diagonal_norm(&a, n);
    let mut sweeps = 0;
    while !(residual <= tol) {
        if sweeps == JACOBI_MAX_SWEEPS || !residual.is_finite() {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(&a, n);
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|x, y| x.total_cmp(y));
    Ok(Spectrum { values })
}

/// [`eigenvalues`] at the default tolerance.
pub fn spectrum(m: &SymMatrix) -> Result<Spectrum> {
    let tol = default_tolerance(m);
    if tol == 0.0 && m.data.iter().all(|v| *v == 0.0) {
        // all-zero matrix
        return Ok(Spectrum {
            values: vec![0.0; m.dim()],
        });
    }
    eigenvalues(m, tol)
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

pub fn cholesky(m: &SymMatrix) -> Result<Cholesky> {
    let n = m.dim();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(Cholesky { n, l })
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.n;
        let mut m = SymMatrix {
            n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    fn forward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    fn backward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        Ok(x)
    }

    /// `tr(m⁻¹) = Σ_i e_iᵀ m⁻¹ e_i = Σ_i ‖L⁻¹ e_i‖²`.
    pub fn trace_inverse(&self) -> f64 {
        let n = self.n;
        let mut e = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[i] = 1.0;
            self.forward(&mut e);
            total += e[i..].iter().map(|v| v * v).sum::<f64>();
        }
        total
    }
}

pub fn log_det(m: &SymMatrix) -> Result<f64> {
    Ok(cholesky(m)?.log_det())
}

pub fn trace_inverse(m: &SymMatrix) -> Result<f64> {
    Ok(cholesky(m)?.trace_inverse())
}

pub fn rank1_update(m: &SymMatrix, x: &[f64]) -> Result<SymMatrix> {
    m.rank1_update(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_pd(rng: &mut SplitMix64, n: usize) -> SymMatrix {
        // B Bᵀ + n I
        let b: Vec<f64> = (0..n * n).map(|_| rng.next_normal()).collect();
        let mut m = SymMatrix::scaled_identity(n, 0.5).unwrap();
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum();
                m.set(i, j, m.get(i, j) + s);
            }
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let s = spectrum(&SymMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two_roots() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = spectrum(&m).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-12);
        assert!((s.values()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let m = random_pd(&mut rng, 5);
            let s = spectrum(&m).unwrap();
            let scale = 5.0 * m.max_abs();
            assert!((s.sum() - m.trace()).abs() <= 1e-10 * scale);
            assert!(s.min() > 0.0);
            assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let m = SymMatrix::identity(2).unwrap();
        assert!(matches!(
            eigenvalues(&m, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn non_finite_input_reports_no_convergence() {
        let mut m = SymMatrix::identity(3).unwrap();
        m.set(0, 2, f64::NAN);
        assert!(matches!(spectrum(&m), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn cholesky_of_diagonal() {
        let c = cholesky(&SymMatrix::diagonal(&[4.0, 9.0]).unwrap()).unwrap();
        assert_eq!(c.get(0, 0), 2.0);
        assert_eq!(c.get(1, 1), 3.0);
        assert_eq!(c.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky(&m),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn cholesky_of_gramian_reconstructs() {
        let mut rng = SplitMix64::new(11);
        let x: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let m = SymMatrix::scaled_identity(4, 0.25)
            .unwrap()
            .rank1_update(&x)
            .unwrap();
        let c = cholesky(&m).unwrap();
        let r = c.reconstruct();
        for i in 0..4 {
            assert!(c.get(i, i) > 0.0);
            for j in 0..4 {
                assert!((r.get(i, j) - m.get(i, j)).abs() <= 1e-10 * m.max_abs());
            }
        }
    }

    #[test]
    fn log_det_cases() {
        assert_eq!(log_det(&SymMatrix::identity(4).unwrap()).unwrap(), 0.0);
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((log_det(&m).unwrap() - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_det_and_trace_inverse_match_spectrum() {
        let mut rng = SplitMix64::new(99);
        for n in 1..8 {
            let m = random_pd(&mut rng, n);
            let s = spectrum(&m).unwrap();
            let ld: f64 = s.values().iter().map(|v| v.ln()).sum();
            let ti: f64 = s.values().iter().map(|v| 1.0 / v).sum();
            assert!((log_det(&m).unwrap() - ld).abs() < 1e-8);
            assert!((trace_inverse(&m).unwrap() - ti).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_inverse_cases() {
        let d = SymMatrix::diagonal(&[2.0, 4.0]).unwrap();
        assert!((trace_inverse(&d).unwrap() - 0.75).abs() < 1e-15);
        assert!((trace_inverse(&SymMatrix::identity(6).unwrap()).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn solve_inverts() {
        let mut rng = SplitMix64::new(3);
        let m = random_pd(&mut rng, 4);
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = cholesky(&m).unwrap().solve(&b).unwrap();
        for i in 0..4 {
            let r: f64 = (0..4).map(|j| m.get(i, j) * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rank1_cases() {
        let m = SymMatrix::identity(2).unwrap();
        let u = rank1_update(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(u, SymMatrix::diagonal(&[2.0, 1.0]).unwrap());
        assert_eq!(rank1_update(&m, &[0.0, 0.0]).unwrap(), m);
        let x = [0.3, -1.2];
        let u = rank1_update(&m, &x).unwrap();
        assert!((u.trace() - (2.0 + 0.09 + 1.44)).abs() < 1e-15);
        assert_eq!(u.get(0, 1), u.get(1, 0));
        assert!(matches!(
            rank1_update(&m, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        let r = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
    }
}
