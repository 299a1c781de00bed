//! Dense helpers: rank at a relative tolerance, log-determinants, solves.
//!
//! Alignment matrices are built from products of many bounded gains, so their
//! rows and columns differ in scale by orders of magnitude. Rank decisions are
//! made after diagonal equilibration, which leaves the exact rank unchanged.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Alternating row/column max-norm scaling. Returns the scaled copy.
pub fn equilibrate(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = a.clone();
    for _ in 0..8 {
        for mut row in m.row_iter_mut() {
            let s = row.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if s > 0.0 {
                row /= s;
            }
        }
        for mut col in m.column_iter_mut() {
            let s = col.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if s > 0.0 {
                col /= s;
            }
        }
    }
    m
}

/// Singular values of the equilibrated matrix, largest first.
pub fn equilibrated_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = equilibrate(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `tol * sigma_max * max(rows, cols)`.
pub fn numeric_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let s = equilibrated_singular_values(a);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let cut = tol * smax * a.nrows().max(a.ncols()) as f64;
    s.iter().filter(|&&x| x > cut).count()
}

/// Horizontal concatenation `[a b]`.
pub fn hcat(blocks: &[&DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let Some(first) = blocks.first() else {
        return Err(Error::Dimension("nothing to concatenate".into()));
    };
    let rows = first.nrows();
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(Error::Dimension("blocks disagree in row count".into()));
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    Ok(out)
}

/// `ln det(sigma2 I + p A Aᵀ)` from the singular values of `A`.
pub fn logdet_gram_plus_noise(a: &DMatrix<f64>, p: f64, sigma2: f64) -> f64 {
    let m = a.nrows();
    if a.ncols() == 0 {
        return m as f64 * sigma2.ln();
    }
    let s = a.clone().singular_values();
    let k = s.len();
    s.iter().map(|x| (sigma2 + p * x * x).ln()).sum::<f64>() + (m - k) as f64 * sigma2.ln()
}

/// Solves a square system by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() || a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "system is {}x{}, right-hand side has {} entries",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.clone()
        .lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Numeric("singular system".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_badly_scaled_full_matrix() {
        // Rows differ by 1e12 in scale; plain SVD thresholds would drop one.
        let a = DMatrix::from_row_slice(3, 3, &[1e6, 2e6, 0.5e6, 1e-6, 3e-6, 1e-6, 2.0, 1.0, 7.0]);
        assert_eq!(numeric_rank(&a, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn rank_detects_dependence() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(numeric_rank(&a, DEFAULT_RANK_TOL), 2);
        assert_eq!(numeric_rank(&DMatrix::zeros(4, 2), DEFAULT_RANK_TOL), 0);
        assert_eq!(numeric_rank(&DMatrix::from_element(3, 3, 1.0), DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn logdet_matches_direct_determinant() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, -0.2, 0.3, 2.0, 1.0]);
        let g: DMatrix<f64> = DMatrix::identity(2, 2) * 0.7 + (&a * a.transpose()) * 3.0;
        let direct = g.determinant().ln();
        assert!((logdet_gram_plus_noise(&a, 3.0, 0.7) - direct).abs() < 1e-12);
        let tall = a.transpose();
        let g: DMatrix<f64> = DMatrix::identity(3, 3) + (&tall * tall.transpose()) * 2.0;
        assert!((logdet_gram_plus_noise(&tall, 2.0, 1.0) - g.determinant().ln()).abs() < 1e-12);
    }

    #[test]
    fn solve_recovers_solution() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve(&DMatrix::zeros(2, 2), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn hcat_checks_rows() {
        let a = DMatrix::from_element(2, 1, 1.0);
        let b = DMatrix::from_element(2, 2, 2.0);
        let c = hcat(&[&a, &b]).unwrap();
        assert_eq!(c.shape(), (2, 3));
        assert_eq!(c[(1, 2)], 2.0);
        assert!(hcat(&[&a, &DMatrix::zeros(3, 1)]).is_err());
    }
}
