//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative singular-value cutoff used for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// ascending and eigenvectors permuted to match.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn sorted_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Minimum-norm least-squares solution of `a x = b` through a thin SVD,
/// dropping singular values below `RANK_TOL * sigma_max`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    pub rank: usize,
    pub residual: f64,
}

pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> LeastSquares {
    let cols = a.ncols();
    if cols == 0 || a.nrows() == 0 {
        return LeastSquares {
            solution: DVector::zeros(cols),
            rank: 0,
            residual: b.norm(),
        };
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let sigma_max = svd.singular_values.max();
    let cutoff = RANK_TOL * sigma_max;
    let mut solution = DVector::zeros(cols);
    let mut rank = 0;
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            let coeff = u.column(idx).dot(b) / s;
            solution += v_t.row(idx).transpose() * coeff;
        }
    }
    let residual = (a * &solution - b).norm();
    LeastSquares {
        solution,
        rank,
        residual,
    }
}

/// Orthonormal basis of the numerical column space of `a`.
pub fn range_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let sigma_max = svd.singular_values.max();
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * sigma_max && s > 0.0)
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// `m - q (q^T m)`: projection of the columns of `m` onto the orthogonal
/// complement of the span of the orthonormal columns `q`.
pub fn project_out(q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return m.clone();
    }
    m - q * (q.transpose() * m)
}

pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let sv = a.singular_values();
    let cutoff = RANK_TOL * sv.max();
    sv.iter().filter(|&&s| s > cutoff && s > 0.0).count()
}

/// Eigenvalues within this of zero are treated as exact zeros.
pub const EIGEN_TOL: f64 = 1e-10;

/// Square root of a symmetric positive semidefinite matrix, `V sqrt(L) V^T`,
/// with eigenvalues below [`EIGEN_TOL`] clamped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = sorted_symmetric_eigen(m);
    let roots = DMatrix::from_diagonal(&values.map(|v| if v < EIGEN_TOL { 0.0 } else { v.sqrt() }));
    &vectors * roots * vectors.transpose()
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
