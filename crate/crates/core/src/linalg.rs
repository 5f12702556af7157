//! Dense helpers shared by the frame and bundle code: modified Gram-Schmidt
//! with conditional reorthogonalization, pivoted row completion, orthogonal
//! Procrustes alignment and symmetric matrix functions.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// `‖M·Mᵀ − I‖_F`: zero iff the rows of `m` are orthonormal.
pub fn row_orthonormality_residual(m: &DMatrix<f64>) -> f64 {
    let gram = m * m.transpose();
    (gram - DMatrix::identity(m.nrows(), m.nrows())).norm()
}

/// `‖Mᵀ·M − I‖_F`: zero iff the columns of `m` are orthonormal.
pub fn column_orthonormality_residual(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    (gram - DMatrix::identity(m.ncols(), m.ncols())).norm()
}

/// `max(‖A − Aᵀ‖_F, ‖A² − A‖_F)`.
pub fn projector_residual(p: &DMatrix<f64>) -> f64 {
    let sym = (p - p.transpose()).norm();
    let idem = (p * p - p).norm();
    sym.max(idem)
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..m.nrows()).map(|r| m.row(r).transpose()).collect()
}

pub(crate) fn stack_rows(rows: &[DVector<f64>], width: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), width, |r, c| rows[r][c])
}

fn project_out(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for q in basis {
        let c = q.dot(v);
        v.axpy(-c, q, 1.0);
    }
}

fn max_overlap(v: &DVector<f64>, basis: &[DVector<f64>]) -> f64 {
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    basis
        .iter()
        .map(|q| (q.dot(v) / norm).abs())
        .fold(0.0, f64::max)
}

/// Orthogonalizes `candidate` against the orthonormal `basis` by modified
/// Gram-Schmidt and returns `(unit vector, pivot norm)`. A second pass runs
/// when the first leaves an overlap above `tol.reorthogonalize`.
///
/// Fails with the pivot norm when it drops below `tol.singular_pivot`.
pub fn mgs_step(
    basis: &[DVector<f64>],
    candidate: &DVector<f64>,
    tol: &Tolerances,
) -> std::result::Result<(DVector<f64>, f64), f64> {
    let mut v = candidate.clone();
    project_out(&mut v, basis);
    if max_overlap(&v, basis) > tol.reorthogonalize {
        project_out(&mut v, basis);
    }
    let pivot = v.norm();
    if pivot.is_nan() || pivot <= tol.singular_pivot {
        return Err(pivot);
    }
    v /= pivot;
    Ok((v, pivot))
}

/// Gram-Schmidt on the rows of `[fixed; seed]`, keeping the rows of `fixed`
/// untouched. `fixed` must already have orthonormal rows.
pub fn orthonormalize_after(
    fixed: &DMatrix<f64>,
    seed: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let width = fixed.ncols();
    let mut basis = rows_of(fixed);
    let mut out = Vec::with_capacity(seed.nrows());
    for r in 0..seed.nrows() {
        let row = seed.row(r).transpose();
        let (q, _) = mgs_step(&basis, &row, tol)
            .map_err(|pivot| Error::SingularSeed { index: None, pivot })?;
        basis.push(q.clone());
        out.push(q);
    }
    Ok(stack_rows(&out, width))
}

/// Picks `count` rows of `candidates` by greedy pivoting and orthonormalizes
/// them against the orthonormal rows of `fixed` and each other.
///
/// At each step the unused candidate with the largest residual after
/// projecting out every accepted row is taken; ties go to the lowest index.
pub fn pivoted_row_basis(
    candidates: &DMatrix<f64>,
    fixed: &DMatrix<f64>,
    count: usize,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let width = candidates.ncols();
    if count > candidates.nrows() {
        return Err(Error::BadShape(format!(
            "cannot pick {count} rows from {}",
            candidates.nrows()
        )));
    }
    let cands = rows_of(candidates);
    let mut basis = rows_of(fixed);
    let mut used = vec![false; cands.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..cands.len()).filter(|&j| !used[j]) {
            let mut e = cands[j].clone();
            project_out(&mut e, &basis);
            let r = e.norm();
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((j, r));
            }
        }
        let (j, _) = best.expect("an unused candidate always remains");
        used[j] = true;
        let (q, _) = mgs_step(&basis, &cands[j], tol)
            .map_err(|pivot| Error::SingularSeed { index: None, pivot })?;
        basis.push(q.clone());
        out.push(q);
    }
    Ok(stack_rows(&out, width))
}

/// Completes the orthonormal rows of `rows` (n×k) to an orthonormal basis of
/// Rᵏ using standard basis rows as candidates, and returns only the added
/// (k−n)×k block.
pub fn pivoted_completion(rows: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let k = rows.ncols();
    let n = rows.nrows();
    if n > k {
        return Err(Error::BadShape(format!("cannot complete {n} rows in R^{k}")));
    }
    pivoted_row_basis(&DMatrix::identity(k, k), rows, k - n, tol)
}

/// Orthogonal `Q` minimizing `‖Q·current − reference‖_F` (polar factor of
/// `reference·currentᵀ`). For a single row this is the sign of the overlap.
pub fn procrustes_rotation(current: &DMatrix<f64>, reference: &DMatrix<f64>) -> DMatrix<f64> {
    let m = current.nrows();
    if m == 0 {
        return DMatrix::zeros(0, 0);
    }
    let cross = reference * current.transpose();
    if m == 1 {
        let s = if cross[(0, 0)] < 0.0 { -1.0 } else { 1.0 };
        return DMatrix::from_element(1, 1, s);
    }
    let svd = SVD::new(cross, true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    u * v_t
}

/// Principal angles between the row spaces of two matrices with orthonormal
/// rows, ascending.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || b.nrows() == 0 {
        return Vec::new();
    }
    let cross = a * b.transpose();
    let svd = SVD::new(cross, false, false);
    let mut angles: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| s.clamp(-1.0, 1.0).acos())
        .collect();
    angles.sort_by(|x, y| x.total_cmp(y));
    angles
}

/// `S^{-1/2}` of a symmetric positive definite matrix. Eigenvalues at or
/// below `floor` are rejected rather than pseudo-inverted.
pub fn inverse_sqrt_spd(s: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(s.clone());
    let smallest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest.is_nan() || smallest <= floor {
        return Err(Error::RankDeficient { smallest });
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let v = &eig.eigenvectors;
    let r = v * d * v.transpose();
    // symmetrize away rounding
    Ok((&r + r.transpose()) * 0.5)
}

/// Numerical rank: singular values above `rel * σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let svd = SVD::new(m.clone(), false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > rel * smax).count()
}

/// Orthonormal basis (as columns) of the range of a symmetric projector.
pub fn projector_range(p: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(p.clone());
    let cols: Vec<DVector<f64>> = (0..p.nrows())
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(p.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}
