//! Symplectic forms, the antisymmetric normal form, Williamson decomposition
//! and completion of incomplete symplectic bases.

use crate::config::tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    diagonal, direct_sum, ensure_antisymmetric, ensure_finite, ensure_square, ensure_symmetric,
    hstack, identity, inverse, max_abs, singular_triplets, sym_eigen, sym_sqrt, vstack, zeros,
    Matrix, Vector,
};

/// `[[0, 1], [-1, 0]]` with `n x n` blocks.
pub fn symplectic_form(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::ZeroModes);
    }
    Ok(standard_form(n))
}

/// Like [`symplectic_form`] but accepts `n = 0` (empty matrix).
pub(crate) fn standard_form(n: usize) -> Matrix {
    let mut sigma = zeros(2 * n, 2 * n);
    for i in 0..n {
        sigma[(i, n + i)] = 1.0;
        sigma[(n + i, i)] = -1.0;
    }
    sigma
}

/// `|| S sigma S^T - sigma ||_max`.
pub fn symplectic_residual(s: &Matrix, sigma: &Matrix) -> Result<f64> {
    ensure_square(s, "symplectic test")?;
    if s.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            context: "symplectic test",
            expected: format!("{}x{}", sigma.nrows(), sigma.ncols()),
            found: format!("{}x{}", s.nrows(), s.ncols()),
        });
    }
    Ok(max_abs(&(s * sigma * s.transpose() - sigma)))
}

pub fn is_symplectic(s: &Matrix, sigma: &Matrix, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(s, sigma)? <= tol * max_abs(sigma).max(1.0))
}

/// Relative-to-size symplecticity used internally for constructed matrices,
/// where round-off grows with the entries of `S`.
pub(crate) fn ensure_symplectic(s: &Matrix, sigma: &Matrix, what: &'static str) -> Result<()> {
    let residual = symplectic_residual(s, sigma)?;
    let scale = max_abs(s).powi(2).max(1.0);
    if residual <= 1e-10 * scale {
        Ok(())
    } else {
        Err(Error::NotSymplectic { what, residual })
    }
}

/// `O Sigma O^T = [[0, diag(mu)], [-diag(mu), 0]]` padded with zeros, where the
/// upper-left `r/2` rows and columns of each block carry the nonzero values.
#[derive(Clone, Debug)]
pub struct SkewNormalForm {
    pub orthogonal: Matrix,
    /// Positive skew values, descending.
    pub values: Vec<f64>,
    /// Rank of the input, always even.
    pub rank: usize,
}

impl SkewNormalForm {
    pub fn modes(&self) -> usize {
        self.orthogonal.nrows() / 2
    }

    pub fn block_form(&self) -> Matrix {
        let n = self.modes();
        let mut out = zeros(2 * n, 2 * n);
        for (j, &mu) in self.values.iter().enumerate() {
            out[(j, n + j)] = mu;
            out[(n + j, j)] = -mu;
        }
        out
    }
}

/// Deterministic antisymmetric normal form.
///
/// Singular values are grouped into clusters of (numerically) equal value.
/// Inside a cluster, standard basis vectors projected onto the cluster's right
/// singular subspace serve as candidates for the `P` rows, preferring the `P`
/// coordinates, and the paired `Q` row is `Sigma f / mu`. An input already in
/// normal form therefore comes back with `O = 1`.
pub fn skew_normal_form(sigma: &Matrix) -> Result<SkewNormalForm> {
    ensure_finite(sigma)?;
    let dim = ensure_square(sigma, "skew normal form")?;
    if dim % 2 != 0 {
        return Err(Error::DimensionMismatch {
            context: "skew normal form",
            expected: "even dimension".into(),
            found: dim.to_string(),
        });
    }
    ensure_antisymmetric(sigma, "skew normal form input")?;
    let n = dim / 2;
    if n == 0 {
        return Ok(SkewNormalForm {
            orthogonal: zeros(0, 0),
            values: Vec::new(),
            rank: 0,
        });
    }

    let svd = singular_triplets(sigma);
    let largest = svd.values[0];
    let threshold = tolerances().rank * largest;
    let cluster_gap = 1e-11 * largest;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (idx, &value) in svd.values.iter().enumerate() {
        if largest == 0.0 || value <= threshold {
            break;
        }
        match clusters.last_mut() {
            Some(cluster) if svd.values[cluster[0]] - value <= cluster_gap => {
                cluster.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let p_first: Vec<usize> = (n..dim).chain(0..n).collect();
    let q_first: Vec<usize> = (0..n).chain(n..dim).collect();
    let mut chosen: Vec<Vector> = Vec::new();
    let mut q_rows: Vec<Vector> = Vec::new();
    let mut p_rows: Vec<Vector> = Vec::new();
    let mut values: Vec<f64> = Vec::new();

    for cluster in &clusters {
        let mut basis = zeros(dim, cluster.len());
        for (col, &idx) in cluster.iter().enumerate() {
            basis.set_column(col, &svd.right.column(idx));
        }
        let projector = &basis * basis.transpose();
        for _ in 0..cluster.len() / 2 {
            let Some(f) = best_candidate(&p_first, |e| &projector * e, &chosen) else {
                break;
            };
            let image = sigma * &f;
            let mu = image.norm();
            if mu <= threshold {
                break;
            }
            let mut e = image / mu;
            orthogonalize(&mut e, &chosen);
            orthogonalize(&mut e, std::slice::from_ref(&f));
            e.normalize_mut();
            chosen.push(f.clone());
            chosen.push(e.clone());
            values.push(e.dot(&(sigma * &f)));
            q_rows.push(e);
            p_rows.push(f);
        }
    }

    let kernel_dim = dim - 2 * values.len();
    for slot in 0..kernel_dim {
        let (candidates, rows) = if slot < kernel_dim / 2 {
            (&q_first, &mut q_rows)
        } else {
            (&p_first, &mut p_rows)
        };
        let v = best_candidate(candidates, |e| e.clone(), &chosen)
            .expect("orthogonal complement is nonempty");
        chosen.push(v.clone());
        rows.push(v);
    }

    let mut orthogonal = zeros(dim, dim);
    for (i, row) in q_rows.iter().chain(p_rows.iter()).enumerate() {
        orthogonal.set_row(i, &row.transpose());
    }
    Ok(SkewNormalForm {
        orthogonal,
        rank: 2 * values.len(),
        values,
    })
}

fn orthogonalize(v: &mut Vector, against: &[Vector]) {
    for _ in 0..2 {
        for w in against {
            let overlap = w.dot(v);
            v.axpy(-overlap, w, 1.0);
        }
    }
}

/// The normalized candidate `map(e_i)` with the largest residual after
/// removing `chosen`; ties go to the earliest index.
fn best_candidate(
    candidates: &[usize],
    map: impl Fn(&Vector) -> Vector,
    chosen: &[Vector],
) -> Option<Vector> {
    let dim = candidates.len();
    let mut best: Option<(f64, Vector)> = None;
    for &idx in candidates {
        let mut v = map(&Vector::from_fn(dim, |i, _| if i == idx { 1.0 } else { 0.0 }));
        orthogonalize(&mut v, chosen);
        let norm = v.norm();
        if best.as_ref().is_none_or(|(b, _)| norm > b + 1e-12) {
            best = Some((norm, v));
        }
    }
    best.filter(|(norm, _)| *norm > 1e-6).map(|(norm, v)| v / norm)
}

/// Williamson decomposition `gamma = S (D ⊕ D) S^T` with symplectic `S` and
/// symplectic eigenvalues `D` in descending order.
pub fn williamson(gamma: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    ensure_finite(gamma)?;
    let dim = ensure_square(gamma, "williamson")?;
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::DimensionMismatch {
            context: "williamson",
            expected: "nonzero even dimension".into(),
            found: dim.to_string(),
        });
    }
    ensure_symmetric(gamma, "williamson input")?;
    let (eig, _) = sym_eigen(gamma);
    if eig[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            what: "williamson input",
            min_eig: eig[0],
        });
    }
    let n = dim / 2;
    let root = sym_sqrt(gamma, "williamson input")?;
    let skew = &root * standard_form(n) * &root;
    let skew = (&skew - skew.transpose()) * 0.5;
    let normal = skew_normal_form(&skew)?;
    if normal.rank != dim {
        return Err(Error::NotPositiveDefinite {
            what: "williamson input",
            min_eig: eig[0],
        });
    }
    let mut scaling = normal.values.clone();
    scaling.extend_from_slice(&normal.values);
    let inv_root: Vec<f64> = scaling.iter().map(|d| 1.0 / d.sqrt()).collect();
    let s = root * normal.orthogonal.transpose() * diagonal(&inv_root);
    Ok((s, normal.values))
}

/// `T` with `T sigma_{2m} T^T = form` for a nondegenerate antisymmetric `form`.
pub(crate) fn standardizing_map(form: &Matrix) -> Result<Matrix> {
    let normal = skew_normal_form(form)?;
    if normal.rank != form.nrows() {
        return Err(Error::Singular {
            what: "environment symplectic form",
        });
    }
    let mut root: Vec<f64> = normal.values.iter().map(|v| v.sqrt()).collect();
    root.extend_from_within(..);
    Ok(normal.orthogonal.transpose() * diagonal(&root))
}

/// Completes the rows `[s1 | s2]` to a matrix symplectic with respect to
/// `sigma_sys ⊕ sigma_env`.
///
/// The new rows span the symplectic complement of the given rows. They are
/// obtained by projecting the standard basis along the given rows, taking an
/// orthonormal basis of the result and bringing the restricted form to
/// standard shape.
pub fn symplectic_complete(
    s1: &Matrix,
    s2: &Matrix,
    sigma_sys: &Matrix,
    sigma_env: &Matrix,
) -> Result<Matrix> {
    let sys = ensure_square(s1, "completion system block")?;
    let env = ensure_square(sigma_env, "completion environment form")?;
    if s2.shape() != (sys, env) || sigma_sys.shape() != (sys, sys) {
        return Err(Error::DimensionMismatch {
            context: "symplectic completion",
            expected: format!("s2 {sys}x{env}, sigma_sys {sys}x{sys}"),
            found: format!(
                "s2 {}x{}, sigma_sys {}x{}",
                s2.nrows(),
                s2.ncols(),
                sigma_sys.nrows(),
                sigma_sys.ncols()
            ),
        });
    }
    let rows = hstack(s1, s2);
    let omega = direct_sum(sigma_sys, sigma_env);
    let gram = &rows * &omega * rows.transpose();
    let residual = max_abs(&(&gram - sigma_sys));
    let scale = max_abs(&rows).powi(2).max(1.0);
    if residual > 1e-8 * scale {
        return Err(Error::IncompleteBasis { residual });
    }
    if env == 0 {
        ensure_symplectic(s1, sigma_sys, "completed matrix")?;
        return Ok(s1.clone());
    }

    // Row v maps to v - v Omega R^T sigma_sys^{-1} R, which lies in the
    // symplectic complement of the rows R.
    let total = sys + env;
    let sigma_sys_inv = inverse(sigma_sys, "system symplectic form")?;
    let projector = identity(total) - &omega * rows.transpose() * sigma_sys_inv * &rows;
    // The row space of the projector is spanned by its leading right
    // singular vectors.
    let svd = singular_triplets(&projector);
    let complement = svd.right.columns(0, env).into_owned();
    if svd.values.len() > env && svd.values[env] > 1e-6 * svd.values[0] {
        return Err(Error::IncompleteBasis {
            residual: svd.values[env],
        });
    }

    let restricted = complement.transpose() * &omega * &complement;
    let restricted = (&restricted - restricted.transpose()) * 0.5;
    let normal = skew_normal_form(&restricted)?;
    if normal.rank != env {
        return Err(Error::IncompleteBasis { residual });
    }
    let mut inv_root: Vec<f64> = normal.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    inv_root.extend_from_within(..);
    let standard_rows = diagonal(&inv_root) * &normal.orthogonal * complement.transpose();
    let env_rows = standardizing_map(sigma_env)? * standard_rows;

    let full = vstack(&rows, &env_rows);
    ensure_symplectic(&full, &omega, "completed matrix")?;
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_mode_form() {
        let s = symplectic_form(1).unwrap();
        assert_eq!(s, Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn two_mode_form_blocks() {
        let s = symplectic_form(2).unwrap();
        let expected = Matrix::from_row_slice(
            4,
            4,
            &[
                0., 0., 1., 0., 0., 0., 0., 1., -1., 0., 0., 0., 0., -1., 0., 0.,
            ],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn form_squares_to_minus_identity() {
        for n in 1..5 {
            let s = symplectic_form(n).unwrap();
            assert_eq!(&s * &s, -identity(2 * n));
        }
    }

    #[test]
    fn zero_modes_rejected() {
        assert_eq!(symplectic_form(0), Err(Error::ZeroModes));
    }

    #[test]
    fn symplectic_examples() {
        let sigma = symplectic_form(1).unwrap();
        assert!(is_symplectic(&identity(2), &sigma, 1e-12).unwrap());
        assert!(is_symplectic(&diagonal(&[2.0, 0.5]), &sigma, 1e-12).unwrap());
        assert!(!is_symplectic(&diagonal(&[2.0, 2.0]), &sigma, 1e-12).unwrap());
        assert!(is_symplectic(&identity(3), &sigma, 1e-12).is_err());
    }

    #[test]
    fn skew_form_of_sigma() {
        let nf = skew_normal_form(&symplectic_form(1).unwrap()).unwrap();
        assert_eq!(nf.rank, 2);
        assert_relative_eq!(nf.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(nf.orthogonal, identity(2), epsilon = 1e-14);
    }

    #[test]
    fn skew_form_of_zero() {
        let nf = skew_normal_form(&zeros(4, 4)).unwrap();
        assert_eq!(nf.rank, 0);
        assert!(nf.values.is_empty());
        assert_relative_eq!(&nf.orthogonal * nf.orthogonal.transpose(), identity(4));
    }

    #[test]
    fn skew_form_of_scaled_sigma() {
        let sigma = symplectic_form(1).unwrap() * 0.64;
        let nf = skew_normal_form(&sigma).unwrap();
        assert_eq!(nf.rank, 2);
        assert_relative_eq!(nf.values[0], 0.64, epsilon = 1e-14);
        let rotated = &nf.orthogonal * &sigma * nf.orthogonal.transpose();
        assert_relative_eq!(rotated, nf.block_form(), epsilon = 1e-14);
    }

    #[test]
    fn skew_form_rejects_symmetric() {
        assert!(matches!(
            skew_normal_form(&identity(2)),
            Err(Error::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn williamson_of_thermal_is_trivial() {
        let (s, d) = williamson(&diagonal(&[3.0, 3.0])).unwrap();
        assert_relative_eq!(d[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(s, identity(2), epsilon = 1e-14);
    }

    #[test]
    fn williamson_of_anisotropic_single_mode() {
        let gamma = diagonal(&[5.0, 2.0]);
        let (s, d) = williamson(&gamma).unwrap();
        assert_relative_eq!(d[0], 10f64.sqrt(), epsilon = 1e-13);
        let sigma = symplectic_form(1).unwrap();
        assert!(is_symplectic(&s, &sigma, 1e-12).unwrap());
        let rebuilt = &s * diagonal(&[d[0], d[0]]) * s.transpose();
        assert_relative_eq!(rebuilt, gamma, epsilon = 1e-12);
    }

    #[test]
    fn williamson_rejects_indefinite() {
        assert!(williamson(&diagonal(&[1.0, -1.0])).is_err());
        assert!(williamson(&Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn beam_splitter_completion() {
        let eta: f64 = 0.7;
        let s1 = identity(2) * eta.sqrt();
        let s2 = identity(2) * (1.0 - eta).sqrt();
        let sigma = symplectic_form(1).unwrap();
        let full = symplectic_complete(&s1, &s2, &sigma, &sigma).unwrap();
        let omega = direct_sum(&sigma, &sigma);
        assert!(is_symplectic(&full, &omega, 1e-12).unwrap());
        assert_relative_eq!(full.view((0, 0), (2, 2)).into_owned(), s1);
        assert_relative_eq!(full.view((0, 2), (2, 2)).into_owned(), s2);
    }

    #[test]
    fn completion_without_environment() {
        let sigma = symplectic_form(1).unwrap();
        let s1 = diagonal(&[2.0, 0.5]);
        let full = symplectic_complete(&s1, &zeros(2, 0), &sigma, &zeros(0, 0)).unwrap();
        assert_eq!(full, s1);
    }

    #[test]
    fn completion_rejects_bad_rows() {
        let sigma = symplectic_form(1).unwrap();
        let err = symplectic_complete(&identity(2), &identity(2), &sigma, &sigma).unwrap_err();
        assert!(matches!(err, Error::IncompleteBasis { .. }));
    }
}
