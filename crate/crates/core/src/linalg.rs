//! Dense column-major matrices and a Tikhonov-regularized least-squares
//! solver built on a blocked Householder QR factorization.
//!
//! The regularized problem `min ||A w - b||^2 + lambda^2 ||w||^2` is solved as
//! the ordinary least-squares problem for the stacked matrix `[A; lambda I]`.
//! For column `k` only rows `k .. m + k` of the stacked matrix can be nonzero
//! below the diagonal (the `lambda I` block fills in as an upper triangle),
//! so every reflector acts on a single contiguous row range.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Panel width of the blocked factorization.
const BLOCK: usize = 64;

/// Dense real matrix stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = values[i * cols + j];
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Largest absolute entry, 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.column(j), &mut out);
            }
        }
        Ok(out)
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

/// Euclidean norm with a multi-lane accumulation.
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let mut lanes = [0.0f64; 4];
    let mut chunks = x.chunks_exact(4);
    for c in &mut chunks {
        for l in 0..4 {
            let t = c[l] * inv;
            lanes[l] += t * t;
        }
    }
    let mut s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for v in chunks.remainder() {
        let t = v * inv;
        s += t * t;
    }
    scale * libm::sqrt(s)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut lanes = [0.0f64; 4];
    let mut cx = x.chunks_exact(4);
    let mut cy = y.chunks_exact(4);
    for (a, b) in (&mut cx).zip(&mut cy) {
        for l in 0..4 {
            lanes[l] += a[l] * b[l];
        }
    }
    let mut s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (a, b) in cx.remainder().iter().zip(cy.remainder()) {
        s += a * b;
    }
    s
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Dot products of one vector against four others, sharing the loads of `v`.
fn dot_1x4(v: &[f64], c0: &[f64], c1: &[f64], c2: &[f64], c3: &[f64]) -> [f64; 4] {
    let n = v.len();
    let mut acc = [[0.0f64; 4]; 4];
    let blocks = n / 4;
    for b in 0..blocks {
        let r = 4 * b;
        let vv = [v[r], v[r + 1], v[r + 2], v[r + 3]];
        let cs = [&c0[r..r + 4], &c1[r..r + 4], &c2[r..r + 4], &c3[r..r + 4]];
        for (a, c) in acc.iter_mut().zip(cs) {
            for l in 0..4 {
                a[l] += vv[l] * c[l];
            }
        }
    }
    let mut out = [0.0; 4];
    for (o, a) in out.iter_mut().zip(&acc) {
        *o = (a[0] + a[1]) + (a[2] + a[3]);
    }
    for r in 4 * blocks..n {
        out[0] += v[r] * c0[r];
        out[1] += v[r] * c1[r];
        out[2] += v[r] * c2[r];
        out[3] += v[r] * c3[r];
    }
    out
}

/// `c_k += a_k * v` for four columns, sharing the loads of `v`.
fn axpy_1x4(a: [f64; 4], v: &[f64], c: [&mut [f64]; 4]) {
    let [c0, c1, c2, c3] = c;
    let n = v.len();
    let (c0, c1, c2, c3) = (&mut c0[..n], &mut c1[..n], &mut c2[..n], &mut c3[..n]);
    for r in 0..n {
        let vr = v[r];
        c0[r] += a[0] * vr;
        c1[r] += a[1] * vr;
        c2[r] += a[2] * vr;
        c3[r] += a[3] * vr;
    }
}

/// Outcome of a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// `||A x - b||` of the unregularized residual.
    pub residual_norm: f64,
}

/// Minimizes `||A x - b||^2 + lambda^2 ||x||^2` by Householder QR of `[A; lambda I]`.
///
/// With `lambda == 0` the matrix must have full column rank, otherwise
/// [`Error::IllPosedSystem`] is returned.
pub fn lstsq_tikhonov(a: &DenseMatrix, b: &[f64], lambda: f64) -> Result<LstsqSolution> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(crate::error::invalid("regularization must be finite and >= 0"));
    }
    if n == 0 {
        return Ok(LstsqSolution {
            x: Vec::new(),
            residual_norm: norm2(b),
        });
    }
    let regularized = lambda > 0.0;
    if !regularized && m < n {
        return Err(Error::IllPosedSystem(alloc::format!(
            "{m} equations for {n} unknowns without regularization"
        )));
    }
    let total = if regularized { m + n } else { m };
    // Stacked matrix [A b; lambda I 0], one extra column for the right-hand side.
    let mut s = DenseMatrix::zeros(total, n + 1);
    for j in 0..n {
        s.column_mut(j)[..m].copy_from_slice(a.column(j));
        if regularized {
            s[(m + j, j)] = lambda;
        }
    }
    s.column_mut(n)[..m].copy_from_slice(b);

    let active_end = |k: usize| if regularized { m + k + 1 } else { m };
    householder_qr_in_place(&mut s, n, active_end);

    let mut rdiag_max = 0.0f64;
    for k in 0..n {
        rdiag_max = rdiag_max.max(s[(k, k)].abs());
    }
    let tol = (total.max(n) as f64) * f64::EPSILON * rdiag_max;
    for k in 0..n {
        let d = s[(k, k)].abs();
        if !(d > tol) {
            return Err(Error::IllPosedSystem(alloc::format!(
                "rank deficient: |R[{k},{k}]| = {d:e} <= {tol:e}"
            )));
        }
    }

    // Back substitution R x = (Q^T b)[..n].
    let mut x: Vec<f64> = s.column(n)[..n].to_vec();
    for k in (0..n).rev() {
        x[k] /= s[(k, k)];
        let xk = x[k];
        let col = &s.column(k)[..k];
        for (xi, rik) in x[..k].iter_mut().zip(col) {
            *xi -= rik * xk;
        }
    }
    let ax = a.mul_vec(&x)?;
    let residual: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    Ok(LstsqSolution {
        x,
        residual_norm: norm2(&residual),
    })
}

/// Householder QR of the first `n` columns of `s`, applied to every column.
///
/// Reflector `k` acts on rows `k .. active_end(k)`. `active_end` must be
/// nondecreasing and the entries of column `k` outside that range (below the
/// diagonal) must be zero when the reflector is formed.
fn householder_qr_in_place(s: &mut DenseMatrix, n: usize, active_end: impl Fn(usize) -> usize) {
    let total_cols = s.cols();
    let mut taus = vec![0.0f64; BLOCK];
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + BLOCK).min(n);
        let nb = k1 - k0;
        // Factor the panel with unblocked reflectors.
        for k in k0..k1 {
            let hi = active_end(k);
            let tau = make_reflector(&mut s.column_mut(k)[k..hi]);
            taus[k - k0] = tau;
            if tau == 0.0 {
                continue;
            }
            for j in k + 1..k1 {
                apply_reflector(s, k, hi, tau, j);
            }
        }
        if k1 >= total_cols {
            break;
        }
        let hi_max = active_end(k1 - 1);
        let len = hi_max - k0;
        // Explicit V (len x nb, column-major) with unit diagonal.
        let mut v = vec![0.0f64; len * nb];
        for i in 0..nb {
            let k = k0 + i;
            let hi = active_end(k);
            let col = &mut v[i * len..(i + 1) * len];
            col[i] = 1.0;
            col[i + 1..hi - k0].copy_from_slice(&s.column(k)[k + 1..hi]);
        }
        let t = build_t(&v, len, nb, &taus[..nb]);
        apply_block_reflector(s, &v, &t, k0, len, nb, k1);
        k0 = k1;
    }
}

/// Overwrites `x` with `beta, v[1..]` and returns `tau` (LAPACK `dlarfg` convention).
fn make_reflector(x: &mut [f64]) -> f64 {
    if x.len() <= 1 {
        return 0.0;
    }
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    if xnorm == 0.0 {
        return 0.0;
    }
    let beta = -alpha.signum() * libm::hypot(alpha, xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    x[0] = beta;
    tau
}

fn apply_reflector(s: &mut DenseMatrix, k: usize, hi: usize, tau: f64, j: usize) {
    let rows = s.rows();
    let (left, right) = s.data.split_at_mut(j * rows);
    let v = &left[k * rows + k + 1..k * rows + hi];
    let c = &mut right[..rows];
    let w = tau * (c[k] + dot(v, &c[k + 1..hi]));
    c[k] -= w;
    axpy(-w, v, &mut c[k + 1..hi]);
}

/// Upper-triangular `T` with `H_1 ... H_nb = I - V T V^T` (forward, columnwise).
fn build_t(v: &[f64], len: usize, nb: usize, taus: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0f64; nb * nb];
    let mut tmp = vec![0.0f64; nb];
    for i in 0..nb {
        let vi = &v[i * len..(i + 1) * len];
        for (p, tp) in tmp.iter_mut().enumerate().take(i) {
            *tp = -taus[i] * dot(&v[p * len + i..(p + 1) * len], &vi[i..]);
        }
        // T[0..i, i] = T[0..i, 0..i] * tmp
        for r in 0..i {
            let mut acc = 0.0;
            for c in r..i {
                acc += t[c * nb + r] * tmp[c];
            }
            t[i * nb + r] = acc;
        }
        t[i * nb + i] = taus[i];
    }
    t
}

/// Rows per cache chunk in the block-reflector update.
const ROW_CHUNK: usize = 512;

/// Applies `(I - V T V^T)^T = I - V T^T V^T` to columns `first_col..` on rows `k0 .. k0 + len`.
///
/// Both passes walk the rows in chunks so a chunk of `V` is reused across
/// every trailing column while it is cache resident.
fn apply_block_reflector(
    s: &mut DenseMatrix,
    v: &[f64],
    t: &[f64],
    k0: usize,
    len: usize,
    nb: usize,
    first_col: usize,
) {
    let rows = s.rows();
    let ncols = s.cols() - first_col;
    let trailing = &mut s.data[first_col * rows..];
    // w[j * nb + i] = (V^T C)[i, j]
    let mut w = vec![0.0f64; ncols * nb];
    let mut r0 = 0;
    while r0 < len {
        let r1 = (r0 + ROW_CHUNK).min(len);
        let mut j = 0;
        while j < ncols {
            let group = (ncols - j).min(4);
            if group == 4 {
                let c = |q: usize| &trailing[(j + q) * rows + k0 + r0..(j + q) * rows + k0 + r1];
                let (c0, c1, c2, c3) = (c(0), c(1), c(2), c(3));
                for i in 0..nb {
                    let vi = &v[i * len + r0..i * len + r1];
                    let d = dot_1x4(vi, c0, c1, c2, c3);
                    for q in 0..4 {
                        w[(j + q) * nb + i] += d[q];
                    }
                }
            } else {
                for q in 0..group {
                    let cq = &trailing[(j + q) * rows + k0 + r0..(j + q) * rows + k0 + r1];
                    for i in 0..nb {
                        w[(j + q) * nb + i] += dot(&v[i * len + r0..i * len + r1], cq);
                    }
                }
            }
            j += group;
        }
        r0 = r1;
    }
    // W <- -T^T W, column by column.
    let mut tmp = vec![0.0f64; nb];
    for wj in w.chunks_exact_mut(nb) {
        for (r, out) in tmp.iter_mut().enumerate() {
            let trow = &t[r * nb..r * nb + r + 1];
            *out = -dot(trow, &wj[..=r]);
        }
        wj.copy_from_slice(&tmp);
    }
    // C <- C + V W
    let mut r0 = 0;
    while r0 < len {
        let r1 = (r0 + ROW_CHUNK).min(len);
        let mut j = 0;
        while j < ncols {
            let group = (ncols - j).min(4);
            if group == 4 {
                let block = &mut trailing[j * rows..(j + 4) * rows];
                let (b0, rest) = block.split_at_mut(rows);
                let (b1, rest) = rest.split_at_mut(rows);
                let (b2, b3) = rest.split_at_mut(rows);
                let span = k0 + r0..k0 + r1;
                let (c0, c1, c2, c3) = (
                    &mut b0[span.clone()],
                    &mut b1[span.clone()],
                    &mut b2[span.clone()],
                    &mut b3[span],
                );
                for i in 0..nb {
                    let vi = &v[i * len + r0..i * len + r1];
                    let a = [
                        w[j * nb + i],
                        w[(j + 1) * nb + i],
                        w[(j + 2) * nb + i],
                        w[(j + 3) * nb + i],
                    ];
                    axpy_1x4(a, vi, [&mut *c0, &mut *c1, &mut *c2, &mut *c3]);
                }
            } else {
                for q in 0..group {
                    let cq = &mut trailing[(j + q) * rows + k0 + r0..(j + q) * rows + k0 + r1];
                    for i in 0..nb {
                        axpy(w[(j + q) * nb + i], &v[i * len + r0..i * len + r1], cq);
                    }
                }
            }
            j += group;
        }
        r0 = r1;
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
///
/// Used for small dense systems (and as an independent route in tests).
pub fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[(i, k)].abs() > m[(piv, k)].abs() {
                piv = i;
            }
        }
        if !(m[(piv, k)].abs() > scale * f64::EPSILON * n as f64) {
            return Err(Error::IllPosedSystem(alloc::format!("singular pivot at column {k}")));
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(k, piv);
        }
        let pivot = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= f * mkj;
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in k + 1..n {
            acc -= m[(k, j)] * x[j];
        }
        x[k] = acc / m[(k, k)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn normal_equations(a: &DenseMatrix, b: &[f64], lambda: f64) -> Vec<f64> {
        let n = a.cols();
        let mut ata = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ata[(i, j)] = a.column(i).iter().zip(a.column(j)).map(|(p, q)| p * q).sum();
            }
            ata[(i, i)] += lambda * lambda;
        }
        let atb: Vec<f64> = (0..n)
            .map(|i| a.column(i).iter().zip(b).map(|(p, q)| p * q).sum())
            .collect();
        solve_dense(&ata, &atb).unwrap()
    }

    fn rel_err(x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        norm2(&d) / norm2(y).max(1e-300)
    }

    #[test]
    fn identity_system() {
        let a = DenseMatrix::identity(3);
        let sol = lstsq_tikhonov(&a, &[1.0, 2.0, 3.0], 0.0).unwrap();
        for (x, e) in sol.x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-14);
        }
        assert!(sol.residual_norm < 1e-14);
    }

    #[test]
    fn matches_normal_equations_across_block_boundaries() {
        let mut seed = 11;
        for &(m, n) in &[(5, 3), (40, 12), (70, 33), (97, 64), (130, 65), (20, 45)] {
            let a = DenseMatrix::from_fn(m, n, |_, _| lcg(&mut seed));
            let b: Vec<f64> = (0..m).map(|_| lcg(&mut seed)).collect();
            for &lambda in &[0.0, 1e-3, 0.5] {
                if lambda == 0.0 && m < n {
                    continue;
                }
                let qr = lstsq_tikhonov(&a, &b, lambda).unwrap();
                let ne = normal_equations(&a, &b, lambda);
                let e = rel_err(&qr.x, &ne);
                // The normal-equations route squares the condition number of wide systems.
                let tol = if m < n && lambda < 0.1 { 1e-6 } else { 1e-9 };
                assert!(e < tol, "m={m} n={n} lambda={lambda} err={e:e}");
            }
        }
    }

    #[test]
    fn rank_deficient_without_regularization_is_rejected() {
        let a = DenseMatrix::from_row_major(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        assert!(matches!(
            lstsq_tikhonov(&a, &[1.0, 1.0, 1.0], 0.0),
            Err(Error::IllPosedSystem(_))
        ));
        assert!(lstsq_tikhonov(&a, &[1.0, 1.0, 1.0], 1e-3).is_ok());
        let wide = DenseMatrix::zeros(2, 3);
        assert!(lstsq_tikhonov(&wide, &[1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn residual_norm_reports_unregularized_misfit() {
        // Overdetermined inconsistent: x = 1 and x = 3 -> x = 2, residual sqrt(2).
        let a = DenseMatrix::from_row_major(2, 1, &[1.0, 1.0]).unwrap();
        let sol = lstsq_tikhonov(&a, &[1.0, 3.0], 0.0).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-14);
        assert!((sol.residual_norm - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn solve_dense_rejects_singular() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(solve_dense(&a, &[1.0, 2.0]).is_err());
    }
}
