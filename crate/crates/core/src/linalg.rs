//! Dense real helpers on top of `nalgebra`.

use crate::config::tolerances;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative slack used for structural checks (symmetry, antisymmetry).
pub(crate) const STRUCTURE_TOL: f64 = 1e-9;

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

pub fn diagonal(values: &[f64]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_column_slice(values))
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Assembles `[[tl, tr], [bl, br]]`.
pub fn block2x2(tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix) -> Matrix {
    let rows = tl.nrows() + bl.nrows();
    let cols = tl.ncols() + tr.ncols();
    let mut out = zeros(rows, cols);
    out.view_mut((0, 0), tl.shape()).copy_from(tl);
    out.view_mut((0, tl.ncols()), tr.shape()).copy_from(tr);
    out.view_mut((tl.nrows(), 0), bl.shape()).copy_from(bl);
    out.view_mut((tl.nrows(), tl.ncols()), br.shape()).copy_from(br);
    out
}

pub fn hstack(left: &Matrix, right: &Matrix) -> Matrix {
    let mut out = zeros(left.nrows(), left.ncols() + right.ncols());
    out.view_mut((0, 0), left.shape()).copy_from(left);
    out.view_mut((0, left.ncols()), right.shape()).copy_from(right);
    out
}

pub fn vstack(top: &Matrix, bottom: &Matrix) -> Matrix {
    let mut out = zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    out
}

pub fn block(m: &Matrix, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
    m.view((row, col), (rows, cols)).into_owned()
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &Matrix, context: &'static str) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        })
    }
}

pub fn ensure_shape(m: &Matrix, rows: usize, cols: usize, context: &'static str) -> Result<()> {
    if m.shape() == (rows, cols) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected: format!("{rows}x{cols}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        })
    }
}

pub fn symmetry_residual(m: &Matrix) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn ensure_symmetric(m: &Matrix, what: &'static str) -> Result<()> {
    ensure_square(m, what)?;
    let residual = symmetry_residual(m);
    if residual <= STRUCTURE_TOL * max_abs(m).max(1.0) {
        Ok(())
    } else {
        Err(Error::NotSymmetric { what, residual })
    }
}

pub fn ensure_antisymmetric(m: &Matrix, what: &'static str) -> Result<()> {
    ensure_square(m, what)?;
    let residual = max_abs(&(m + m.transpose()));
    if residual <= STRUCTURE_TOL * max_abs(m).max(1.0) {
        Ok(())
    } else {
        Err(Error::NotAntisymmetric { what, residual })
    }
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of the symmetric part, eigenvalues ascending.
pub fn sym_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

fn spectral_map(values: &[f64], vectors: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let mapped: Vec<f64> = values.iter().map(|&v| f(v)).collect();
    vectors * diagonal(&mapped) * vectors.transpose()
}

/// Principal square root of a symmetric PSD matrix; tiny negative noise is
/// clipped to zero.
pub fn sym_sqrt(m: &Matrix, what: &'static str) -> Result<Matrix> {
    ensure_symmetric(m, what)?;
    let (values, vectors) = sym_eigen(m);
    let floor = -tolerances().psd * values.last().copied().unwrap_or(0.0).abs().max(1.0);
    if let Some(&min) = values.first() {
        if min < floor {
            return Err(Error::NotPositiveSemidefinite { what, min_eig: min });
        }
    }
    Ok(spectral_map(&values, &vectors, |v| v.max(0.0).sqrt()))
}

/// Inverse square root of a symmetric positive definite matrix.
pub fn sym_inv_sqrt(m: &Matrix, what: &'static str) -> Result<Matrix> {
    ensure_symmetric(m, what)?;
    let (values, vectors) = sym_eigen(m);
    match values.first() {
        Some(&min) if min > 0.0 => Ok(spectral_map(&values, &vectors, |v| 1.0 / v.sqrt())),
        Some(&min) => Err(Error::NotPositiveDefinite { what, min_eig: min }),
        None => Ok(zeros(0, 0)),
    }
}

pub fn inverse(m: &Matrix, what: &'static str) -> Result<Matrix> {
    ensure_square(m, what)?;
    if m.nrows() == 0 {
        return Ok(zeros(0, 0));
    }
    let scale = max_abs(m);
    let inv = m.clone().try_inverse().ok_or(Error::Singular { what })?;
    // LU succeeds on numerically singular input; reject blown-up inverses.
    if scale == 0.0 || max_abs(&inv) * scale > 1e14 || !inv.iter().all(|x| x.is_finite()) {
        return Err(Error::Singular { what });
    }
    Ok(inv)
}

/// Singular values with their left and right vectors (as columns), sorted
/// descending. Vectors belonging to zero singular values are arbitrary.
#[derive(Clone, Debug)]
pub struct SingularTriplets {
    pub values: Vec<f64>,
    pub left: Matrix,
    pub right: Matrix,
}

/// Thin SVD read off the symmetric eigenproblem of `[[0, A], [A^T, 0]]`,
/// whose eigenpairs are `(+-s, (u, +-v) / sqrt 2)`. The symmetric solver is
/// used because the direct SVD loses accuracy on clustered spectra.
pub fn singular_triplets(m: &Matrix) -> SingularTriplets {
    let (rows, cols) = m.shape();
    let count = rows.min(cols);
    let mut embedding = zeros(rows + cols, rows + cols);
    embedding.view_mut((0, rows), (rows, cols)).copy_from(m);
    embedding.view_mut((rows, 0), (cols, rows)).copy_from(&m.transpose());
    let (values, vectors) = sym_eigen(&embedding);
    let mut left = zeros(rows, count);
    let mut right = zeros(cols, count);
    let mut sorted = Vec::with_capacity(count);
    for k in 0..count {
        let idx = rows + cols - 1 - k;
        sorted.push(values[idx].max(0.0));
        let column = vectors.column(idx);
        let mut u = column.rows(0, rows).into_owned();
        let mut v = column.rows(rows, cols).into_owned();
        let (nu, nv) = (u.norm(), v.norm());
        if nu > 0.0 {
            u /= nu;
        }
        if nv > 0.0 {
            v /= nv;
        }
        left.set_column(k, &u);
        right.set_column(k, &v);
    }
    SingularTriplets {
        values: sorted,
        left,
        right,
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    singular_triplets(m).values
}

/// Numerical rank: singular values at or below `tol_rank * max(s_max, floor)`
/// are zero. `floor` lets callers measure a difference of large matrices
/// against the size of the operands rather than of the (tiny) result.
pub fn rank_with_floor(m: &Matrix, floor: f64) -> usize {
    let s = singular_values(m);
    let largest = s.first().copied().unwrap_or(0.0).max(floor);
    if largest == 0.0 {
        return 0;
    }
    let threshold = tolerances().rank * largest;
    s.iter().filter(|&&v| v > threshold).count()
}

pub fn rank(m: &Matrix) -> usize {
    rank_with_floor(m, 0.0)
}

/// Moore–Penrose data of a symmetric PSD matrix.
#[derive(Clone, Debug)]
pub struct PseudoInverse {
    pub inverse: Matrix,
    /// Orthogonal projector onto the support.
    pub projector: Matrix,
    pub rank: usize,
}

pub fn pseudo_inverse(m: &Matrix) -> Result<PseudoInverse> {
    ensure_symmetric(m, "pseudo-inverse input")?;
    let dim = m.nrows();
    let (values, vectors) = sym_eigen(m);
    let largest = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let threshold = tolerances().rank * largest;
    let mut inverse = zeros(dim, dim);
    let mut projector = zeros(dim, dim);
    let mut rank = 0;
    for (i, &value) in values.iter().enumerate() {
        if largest > 0.0 && value.abs() > threshold {
            let v = vectors.column(i);
            let outer = v * v.transpose();
            inverse += &outer / value;
            projector += outer;
            rank += 1;
        }
    }
    Ok(PseudoInverse {
        inverse,
        projector,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pseudo_inverse_of_invertible_diagonal() {
        let pinv = pseudo_inverse(&diagonal(&[2.0, 4.0])).unwrap();
        assert_relative_eq!(pinv.inverse, diagonal(&[0.5, 0.25]), epsilon = 1e-14);
        assert_relative_eq!(pinv.projector, identity(2), epsilon = 1e-14);
        assert_eq!(pinv.rank, 2);
    }

    #[test]
    fn pseudo_inverse_of_singular_diagonal() {
        let pinv = pseudo_inverse(&diagonal(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(pinv.inverse, diagonal(&[0.5, 0.0]), epsilon = 1e-14);
        assert_relative_eq!(pinv.projector, diagonal(&[1.0, 0.0]), epsilon = 1e-14);
        assert_eq!(pinv.rank, 1);
    }

    #[test]
    fn pseudo_inverse_rejects_asymmetric() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(pseudo_inverse(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn rank_floor_suppresses_cancellation_noise() {
        let noise = diagonal(&[1e-14, 0.0]);
        assert_eq!(rank(&noise), 1);
        assert_eq!(rank_with_floor(&noise, 10.0), 0);
    }

    #[test]
    fn square_roots_invert_each_other() {
        let m = Matrix::from_row_slice(2, 2, &[5.0, 1.0, 1.0, 2.0]);
        let root = sym_sqrt(&m, "m").unwrap();
        let inv_root = sym_inv_sqrt(&m, "m").unwrap();
        assert_relative_eq!(&root * &root, m, epsilon = 1e-12);
        assert_relative_eq!(&root * &inv_root, identity(2), epsilon = 1e-12);
    }

    #[test]
    fn blocks_assemble() {
        let a = identity(1);
        let b = diagonal(&[2.0, 3.0]);
        let sum = direct_sum(&a, &b);
        assert_eq!(sum, diagonal(&[1.0, 2.0, 3.0]));
        let grid = block2x2(&a, &zeros(1, 2), &zeros(2, 1), &b);
        assert_eq!(grid, sum);
    }
}
