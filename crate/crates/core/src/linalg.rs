//! Small dense linear algebra: determinants, Gram determinants,
//! orthonormalization, and orthogonal projections.
//!
//! Everything here targets matrices with at most a handful of rows
//! (n ≤ 8 in practice); algorithms are chosen for robustness at that
//! scale, not asymptotics. Two independent determinant routes are kept
//! on purpose: partial-pivot LU ([`det`]) and the Gram-Schmidt
//! projected-norm product ([`det_via_projections`]).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Orthonormality checks pass below this absolute deviation.
pub const ORTHO_TOL: f64 = 1e-12;

/// Pivots below this are treated as numerically rank-deficient.
pub const RANK_TOL: f64 = 1e-10;

/// A vector in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("vector must have dimension >= 1".into()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("vector entries must be finite".into()));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// An n×N matrix stored column-major as an ordered list of N columns in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMatrix {
    dim: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl ColumnMatrix {
    /// Zero matrix with `dim` rows and `ncols` columns.
    pub fn zeros(dim: usize, ncols: usize) -> Self {
        Self { dim, ncols, data: vec![0.0; dim * ncols] }
    }

    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let dim = match columns.first() {
            Some(c) => c.dim(),
            None => return Err(Error::InvalidInput("matrix needs at least one column".into())),
        };
        if columns.iter().any(|c| c.dim() != dim) {
            return Err(Error::InvalidInput("columns must share one dimension".into()));
        }
        let mut data = Vec::with_capacity(dim * columns.len());
        for c in columns {
            data.extend_from_slice(c.as_slice());
        }
        Ok(Self { dim, ncols: columns.len(), data })
    }

    /// Column-major flat data; column `j` occupies `data[j*dim..(j+1)*dim]`.
    pub fn from_flat(dim: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * ncols {
            return Err(Error::InvalidInput(format!(
                "flat data length {} does not match {dim}x{ncols}",
                data.len()
            )));
        }
        Ok(Self { dim, ncols, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.dim == self.ncols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Row `i` as an owned vector (rows are strided in memory).
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self.data[j * self.dim + i]).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Orthonormal rows spanning an n-dimensional subspace of R^N.
///
/// Stored as an n×N [`ColumnMatrix`] whose rows are pairwise orthonormal;
/// the columns are then exactly the generators of the projected cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    mat: ColumnMatrix,
}

impl OrthonormalBasis {
    /// Number of basis rows (the subspace dimension n).
    pub fn dim_sub(&self) -> usize {
        self.mat.dim()
    }

    /// Length of each row (the ambient dimension N).
    pub fn dim_ambient(&self) -> usize {
        self.mat.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.mat.row(i)
    }

    /// The basis as an n×N matrix (rows orthonormal).
    pub fn matrix(&self) -> &ColumnMatrix {
        &self.mat
    }

    /// Max absolute deviation of Q Qᵀ from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim_sub();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| self.mat.row(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&rows[i], &rows[j]) - target).abs());
            }
        }
        worst
    }
}

/// Signed determinant of a square matrix via partial-pivot LU.
///
/// `|det(m)|` agrees with [`det_via_projections`] to 1e-9 relative for
/// well-conditioned inputs; the two routes are kept independent as a
/// cross-check.
pub fn det(m: &ColumnMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "determinant needs a square matrix, got {}x{}",
            m.dim(),
            m.ncols()
        )));
    }
    let n = m.dim();
    if n > 12 {
        return Err(Error::InvalidInput(format!("determinant limited to n <= 12, got {n}")));
    }
    let mut scratch = vec![0.0; n * n];
    scratch.copy_from_slice(m.data());
    Ok(lu_det_in_place(&mut scratch, n))
}

/// In-place partial-pivot LU determinant on a col-major n×n buffer.
///
/// Returns 0 exactly when no nonzero pivot exists in some column.
pub(crate) fn lu_det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for r in (k + 1)..n {
            let v = a[k * n + r].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            for c in 0..n {
                a.swap(c * n + k, c * n + p);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for r in (k + 1)..n {
            let f = a[k * n + r] / piv;
            for c in (k + 1)..n {
                a[c * n + r] -= f * a[c * n + k];
            }
        }
    }
    det
}

/// Determinant of the submatrix formed by the listed columns of `m`.
///
/// Hot path of the subset enumerations: uses a stack buffer up to 6×6,
/// falling back to a heap scratch above that.
pub fn det_from_columns(m: &ColumnMatrix, idx: &[usize]) -> f64 {
    let n = m.dim();
    debug_assert_eq!(idx.len(), n);
    if n <= 6 {
        let mut buf = [0.0f64; 36];
        for (j, &c) in idx.iter().enumerate() {
            buf[j * n..(j + 1) * n].copy_from_slice(m.col(c));
        }
        lu_det_in_place(&mut buf[..n * n], n)
    } else {
        let mut buf = vec![0.0f64; n * n];
        for (j, &c) in idx.iter().enumerate() {
            buf[j * n..(j + 1) * n].copy_from_slice(m.col(c));
        }
        lu_det_in_place(&mut buf, n)
    }
}

/// |det| as the product of Gram-Schmidt projected norms
/// ‖x₁‖·‖P_{F₁^⊥}x₂‖···‖P_{F_{n−1}^⊥}xₙ‖ with F_k = span{x₁,…,x_k}.
///
/// Independent of the LU route; rank-deficient input yields 0.
pub fn det_via_projections(m: &ColumnMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "projected-norm determinant needs a square matrix, got {}x{}",
            m.dim(),
            m.ncols()
        )));
    }
    let n = m.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut product = 1.0;
    for k in 0..n {
        let mut v = m.col(k).to_vec();
        for q in &basis {
            let c = dot(&v, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
        let len = norm(&v);
        product *= len;
        if len == 0.0 {
            return Ok(0.0);
        }
        for vi in v.iter_mut() {
            *vi /= len;
        }
        basis.push(v);
    }
    Ok(product)
}

/// det(M M*)^{1/2} for an n×N matrix, N ≥ n, via the QR/Gram route:
/// modified Gram-Schmidt on the rows, multiplying the projected norms.
///
/// By Cauchy-Binet this equals sqrt(Σ det² over all n×n minors); the
/// enumeration form is kept as a test oracle only. Rank deficiency
/// yields 0.
pub fn gram_det_sqrt(m: &ColumnMatrix) -> Result<f64> {
    let n = m.dim();
    let ncols = m.ncols();
    if ncols < n {
        return Err(Error::InvalidInput(format!(
            "gram_det_sqrt needs N >= n, got n={n}, N={ncols}"
        )));
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut product = 1.0;
    for i in 0..n {
        let mut r = m.row(i);
        for q in &basis {
            let c = dot(&r, q);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= c * qi;
            }
        }
        let len = norm(&r);
        product *= len;
        if len == 0.0 {
            return Ok(0.0);
        }
        for ri in r.iter_mut() {
            *ri /= len;
        }
        basis.push(r);
    }
    Ok(product)
}

/// Orthonormalize the rows of `m` (modified Gram-Schmidt with one
/// re-orthogonalization pass), preserving the row space.
pub fn orthonormalize_rows(m: &ColumnMatrix) -> Result<OrthonormalBasis> {
    let n = m.dim();
    let ncols = m.ncols();
    if n > ncols {
        return Err(Error::InvalidInput(format!(
            "cannot orthonormalize {n} rows of length {ncols}: too many rows"
        )));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = m.row(i);
        let scale = norm(&r);
        // two MGS passes: the second removes the O(eps) residue of the first
        for _ in 0..2 {
            for q in &rows {
                let c = dot(&r, q);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
        }
        let len = norm(&r);
        if len < RANK_TOL * scale.max(1.0) {
            return Err(Error::RankDeficient { pivot: len, threshold: RANK_TOL });
        }
        for ri in r.iter_mut() {
            *ri /= len;
        }
        rows.push(r);
    }
    let mut mat = ColumnMatrix::zeros(n, ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            mat.col_mut(j)[i] = v;
        }
    }
    Ok(OrthonormalBasis { mat })
}

/// Project `v` onto the orthogonal complement of the basis span:
/// v − Σ⟨v,qᵢ⟩qᵢ.
pub fn project_complement(v: &Vector, f: &OrthonormalBasis) -> Result<Vector> {
    if v.dim() != f.dim_ambient() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: vector has {}, basis ambient is {}",
            v.dim(),
            f.dim_ambient()
        )));
    }
    let mut out = v.as_slice().to_vec();
    for i in 0..f.dim_sub() {
        let q = f.row(i);
        let c = dot(&out, &q);
        for (oi, qi) in out.iter_mut().zip(&q) {
            *oi -= c * qi;
        }
    }
    Vector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(dim: usize, cols: &[&[f64]]) -> ColumnMatrix {
        let columns: Vec<Vector> = cols.iter().map(|c| Vector::new(c.to_vec()).unwrap()).collect();
        assert!(columns.iter().all(|c| c.dim() == dim));
        ColumnMatrix::from_columns(&columns).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    /// Deterministic pseudo-random entries for fixtures (no RNG dep here).
    fn lcg_entries(seed: u64, count: usize) -> Vec<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..count)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
            })
            .collect()
    }

    fn random_mat(seed: u64, dim: usize, ncols: usize) -> ColumnMatrix {
        ColumnMatrix::from_flat(dim, ncols, lcg_entries(seed, dim * ncols)).unwrap()
    }

    // Test oracle: cofactor-expansion determinant, independent of both
    // production routes.
    fn det_cofactor(m: &ColumnMatrix) -> f64 {
        fn rec(a: &[Vec<f64>], rows: &[usize], col: usize) -> f64 {
            if col == a.len() {
                return 1.0;
            }
            let mut acc = 0.0;
            for (pos, &r) in rows.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let v = a[col][r];
                if v != 0.0 {
                    let mut rest = rows.to_vec();
                    rest.remove(pos);
                    acc += sign * v * rec(a, &rest, col + 1);
                }
            }
            acc
        }
        let n = m.dim();
        let cols: Vec<Vec<f64>> = (0..n).map(|j| m.col(j).to_vec()).collect();
        let rows: Vec<usize> = (0..n).collect();
        rec(&cols, &rows, 0)
    }

    #[test]
    fn det_identity_2x2() {
        let m = mat(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(det(&m).unwrap(), 1.0);
    }

    #[test]
    fn det_permutation_matrix() {
        let m = mat(2, &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(det(&m).unwrap(), -1.0);
    }

    #[test]
    fn det_matches_projected_norms_on_seeded_3x3() {
        for seed in 1..=20u64 {
            let m = random_mat(seed, 3, 3);
            let lu = det(&m).unwrap();
            let gs = det_via_projections(&m).unwrap();
            assert!(rel_close(lu.abs(), gs, 1e-9), "seed {seed}: {lu} vs {gs}");
        }
    }

    #[test]
    fn det_rejects_non_square() {
        let m = random_mat(7, 2, 3);
        assert!(matches!(det(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn projections_orthogonal_columns() {
        let m = mat(2, &[&[2.0, 0.0], &[0.0, 3.0]]);
        assert!((det_via_projections(&m).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn projections_repeated_column_is_zero() {
        let m = mat(3, &[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(det_via_projections(&m).unwrap(), 0.0);
    }

    #[test]
    fn projections_match_lu_on_random_4x4() {
        for seed in 30..=40u64 {
            let m = random_mat(seed, 4, 4);
            let lu = det(&m).unwrap().abs();
            let gs = det_via_projections(&m).unwrap();
            assert!(rel_close(lu, gs, 1e-9), "seed {seed}: {lu} vs {gs}");
        }
    }

    #[test]
    fn gram_det_sqrt_square_equals_abs_det() {
        for seed in 50..=60u64 {
            let m = random_mat(seed, 3, 3);
            let g = gram_det_sqrt(&m).unwrap();
            let d = det(&m).unwrap().abs();
            assert!(rel_close(g, d, 1e-9), "seed {seed}: {g} vs {d}");
        }
    }

    #[test]
    fn gram_det_sqrt_identity_padded_with_zeros() {
        let m = mat(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        assert!((gram_det_sqrt(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_det_sqrt_matches_minor_enumeration_2x4() {
        for seed in 70..=80u64 {
            let m = random_mat(seed, 2, 4);
            // exhaustive oracle: six 2x2 minors via cofactor expansion
            let mut sum_sq = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let sub = mat(2, &[m.col(i), m.col(j)]);
                    let d = det_cofactor(&sub);
                    sum_sq += d * d;
                }
            }
            let g = gram_det_sqrt(&m).unwrap();
            assert!(rel_close(g, sum_sq.sqrt(), 1e-10), "seed {seed}");
        }
    }

    #[test]
    fn gram_det_sqrt_rejects_wide_precondition() {
        let m = random_mat(5, 3, 2);
        assert!(matches!(gram_det_sqrt(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_rows() {
        let m = mat(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let q = orthonormalize_rows(&m).unwrap();
        for i in 0..2 {
            let r = q.row(i);
            for (j, &v) in r.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn orthonormalize_is_scale_invariant() {
        let m = random_mat(90, 2, 6);
        let mut scaled = m.clone();
        for j in 0..6 {
            for v in scaled.col_mut(j) {
                *v *= 5.0;
            }
        }
        let q1 = orthonormalize_rows(&m).unwrap();
        let q2 = orthonormalize_rows(&scaled).unwrap();
        for i in 0..2 {
            let r1 = q1.row(i);
            let r2 = q2.row(i);
            for (a, b) in r1.iter().zip(&r2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormalize_defect_below_tolerance() {
        for seed in 100..110u64 {
            let m = random_mat(seed, 2, 6);
            let q = orthonormalize_rows(&m).unwrap();
            assert!(q.orthonormality_defect() < ORTHO_TOL);
        }
    }

    #[test]
    fn orthonormalize_detects_rank_deficiency() {
        let row = lcg_entries(7, 5);
        let mut m = ColumnMatrix::zeros(2, 5);
        for (j, &v) in row.iter().enumerate() {
            m.col_mut(j)[0] = v;
            m.col_mut(j)[1] = 2.0 * v;
        }
        assert!(matches!(orthonormalize_rows(&m), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn project_complement_fixed_cases() {
        let basis = orthonormalize_rows(&mat(1, &[&[1.0], &[0.0], &[0.0]])).unwrap();
        // orthogonal to span: unchanged
        let v = Vector::new(vec![0.0, 2.0, -1.0]).unwrap();
        let p = project_complement(&v, &basis).unwrap();
        assert_eq!(p.as_slice(), v.as_slice());
        // inside span: zero
        let v = Vector::new(vec![3.0, 0.0, 0.0]).unwrap();
        let p = project_complement(&v, &basis).unwrap();
        assert!(p.norm() < 1e-14);
    }

    #[test]
    fn project_complement_pythagoras() {
        let basis = orthonormalize_rows(&random_mat(13, 2, 6)).unwrap();
        let v = Vector::new(lcg_entries(14, 6)).unwrap();
        let p = project_complement(&v, &basis).unwrap();
        let mut coeff_sq = 0.0;
        for i in 0..2 {
            let c = dot(v.as_slice(), &basis.row(i));
            coeff_sq += c * c;
            assert!(dot(p.as_slice(), &basis.row(i)).abs() < 1e-12);
        }
        let lhs = p.norm() * p.norm();
        let rhs = v.norm() * v.norm() - coeff_sq;
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn project_complement_dimension_mismatch() {
        let basis = orthonormalize_rows(&random_mat(13, 2, 6)).unwrap();
        let v = Vector::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(project_complement(&v, &basis), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn det_routes_agree(seed in 1u64..5000) {
            let n = 2 + (seed % 3) as usize;
            let m = random_mat(seed, n, n);
            let lu = det(&m).unwrap();
            if lu.abs() > 1e-6 {
                let gs = det_via_projections(&m).unwrap();
                prop_assert!(rel_close(lu.abs(), gs, 1e-9));
            }
        }

        #[test]
        fn gram_sq_equals_minor_sum(seed in 1u64..2000) {
            let n = 2 + (seed % 2) as usize;      // n in {2,3}
            let ncols = n + 1 + (seed % 5) as usize; // N up to 8
            let m = random_mat(seed, n, ncols);
            let mut sum_sq = 0.0;
            let mut idx: Vec<usize> = (0..n).collect();
            loop {
                let cols: Vec<&[f64]> = idx.iter().map(|&i| m.col(i)).collect();
                let d = det_cofactor(&mat(n, &cols));
                sum_sq += d * d;
                // lexicographic successor
                let mut i = n as isize - 1;
                while i >= 0 && idx[i as usize] == ncols - n + i as usize { i -= 1; }
                if i < 0 { break; }
                let i = i as usize;
                idx[i] += 1;
                for j in i + 1..n { idx[j] = idx[j - 1] + 1; }
            }
            let g = gram_det_sqrt(&m).unwrap();
            prop_assert!(rel_close(g * g, sum_sq, 1e-9));
        }

        #[test]
        fn gram_invariant_under_householder(seed in 1u64..1000) {
            let n = 2usize;
            let ncols = 5usize;
            let m = random_mat(seed, n, ncols);
            // random Householder reflection H = I - 2uu^T applied on the right
            let u_raw = lcg_entries(seed.wrapping_add(7777), ncols);
            let u_norm = norm(&u_raw);
            prop_assume!(u_norm > 1e-6);
            let u: Vec<f64> = u_raw.iter().map(|x| x / u_norm).collect();
            let mut rotated = ColumnMatrix::zeros(n, ncols);
            for j in 0..ncols {
                for i in 0..n {
                    // (M H)_{ij} = M_{ij} - 2 (M u)_i u_j
                    let mu: f64 = (0..ncols).map(|k| m.col(k)[i] * u[k]).sum();
                    rotated.col_mut(j)[i] = m.col(j)[i] - 2.0 * mu * u[j];
                }
            }
            let a = gram_det_sqrt(&m).unwrap();
            let b = gram_det_sqrt(&rotated).unwrap();
            prop_assert!(rel_close(a, b, 1e-9));
        }

        #[test]
        fn det_scales_linearly_in_one_column(seed in 1u64..1000, scale in -4.0f64..4.0) {
            let n = 3usize;
            let m = random_mat(seed, n, n);
            let mut scaled = m.clone();
            for v in scaled.col_mut(1) { *v *= scale; }
            let d0 = det(&m).unwrap();
            let d1 = det(&scaled).unwrap();
            prop_assert!((d1 - scale * d0).abs() <= 1e-9 * d0.abs().max(1.0));
        }
    }
}
