//! Dense least-squares solver used by the regression fits.
//!
//! Householder QR without pivoting; near-zero diagonal entries of R mark
//! rank deficiency, in which case the solve falls back to ridge-regularized
//! normal equations (lambda = 1e-8) so collinear columns never fail
//! silently.

/// Relative tolerance for declaring a diagonal of R negligible.
const RANK_TOL: f64 = 1e-10;

/// Ridge parameter for the rank-deficient fallback.
pub(crate) const RIDGE_LAMBDA: f64 = 1e-8;

/// Column-major dense matrix, sized at construction.
#[derive(Debug, Clone)]
pub(crate) struct DesignMatrix {
    rows: usize,
    cols: usize,
    /// data[c * rows + r]
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DesignMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    /// Row dot coefficient vector.
    pub fn row_dot(&self, r: usize, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(c, b)| b * self.get(r, c))
            .sum()
    }
}

/// Result of a least-squares solve.
#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub coeffs: Vec<f64>,
    /// True when the QR path detected rank deficiency and the ridge
    /// fallback produced the coefficients.
    pub used_ridge: bool,
}

/// Minimize ||A b - y||^2 for a tall (rows >= cols) design matrix.
pub(crate) fn least_squares(a: &DesignMatrix, y: &[f64]) -> Solution {
    assert_eq!(a.rows(), y.len());
    assert!(a.rows() >= a.cols());
    match qr_solve(a, y) {
        Some(coeffs) => Solution {
            coeffs,
            used_ridge: false,
        },
        None => Solution {
            coeffs: ridge_solve(a, y, RIDGE_LAMBDA),
            used_ridge: true,
        },
    }
}

/// Householder QR solve; `None` on rank deficiency.
fn qr_solve(a: &DesignMatrix, y: &[f64]) -> Option<Vec<f64>> {
    let (n, m) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut rhs = y.to_vec();

    // Scale reference for the rank test: the largest initial column norm.
    let mut max_norm = 0.0f64;
    for c in 0..m {
        let norm: f64 = (0..n).map(|i| r.get(i, c).powi(2)).sum::<f64>().sqrt();
        max_norm = max_norm.max(norm);
    }
    if max_norm == 0.0 {
        return None;
    }

    for k in 0..m {
        // Householder vector for column k, rows k..n.
        let mut norm: f64 = (k..n).map(|i| r.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm <= RANK_TOL * max_norm {
            return None;
        }
        if r.get(k, k) > 0.0 {
            norm = -norm;
        }
        // v = x - norm*e1, normalized so v[0] = 1.
        let v0 = r.get(k, k) - norm;
        let mut v = vec![0.0; n - k];
        v[0] = 1.0;
        for i in (k + 1)..n {
            v[i - k] = r.get(i, k) / v0;
        }
        let beta = -v0 / norm; // 2 / v'v, simplified for this normalization

        // Apply H = I - beta v v' to the remaining columns and the rhs.
        for c in k..m {
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * r.get(i, c);
            }
            let s = beta * dot;
            for i in k..n {
                r.set(i, c, r.get(i, c) - s * v[i - k]);
            }
        }
        let mut dot = 0.0;
        for i in k..n {
            dot += v[i - k] * rhs[i];
        }
        let s = beta * dot;
        for i in k..n {
            rhs[i] -= s * v[i - k];
        }
    }

    // Back-substitute R b = rhs[..m].
    let mut coeffs = vec![0.0; m];
    for k in (0..m).rev() {
        let mut acc = rhs[k];
        for c in (k + 1)..m {
            acc -= r.get(k, c) * coeffs[c];
        }
        let diag = r.get(k, k);
        if diag.abs() <= RANK_TOL * max_norm {
            return None;
        }
        coeffs[k] = acc / diag;
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return None;
    }
    Some(coeffs)
}

/// Solve (A'A + lambda I) b = A'y by Cholesky, escalating lambda if the
/// factorization stalls.
fn ridge_solve(a: &DesignMatrix, y: &[f64], lambda: f64) -> Vec<f64> {
    let (n, m) = (a.rows(), a.cols());
    let mut gram = vec![0.0f64; m * m];
    let mut rhs = vec![0.0f64; m];
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for r in 0..n {
                s += a.get(r, i) * a.get(r, j);
            }
            gram[i * m + j] = s;
            gram[j * m + i] = s;
        }
        let mut s = 0.0;
        for r in 0..n {
            s += a.get(r, i) * y[r];
        }
        rhs[i] = s;
    }

    let mut lam = lambda;
    loop {
        let mut g = gram.clone();
        for i in 0..m {
            g[i * m + i] += lam;
        }
        if let Some(coeffs) = cholesky_solve(&g, &rhs, m) {
            return coeffs;
        }
        lam *= 10.0;
        assert!(lam < 1.0, "ridge fallback failed to stabilize");
    }
}

fn cholesky_solve(g: &[f64], rhs: &[f64], m: usize) -> Option<Vec<f64>> {
    // Lower-triangular factor in place.
    let mut l = vec![0.0f64; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = g[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * m + i] = s.sqrt();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    // Forward then backward substitution.
    let mut z = vec![0.0f64; m];
    for i in 0..m {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * m + k] * z[k];
        }
        z[i] = s / l[i * m + i];
    }
    let mut b = vec![0.0f64; m];
    for i in (0..m).rev() {
        let mut s = z[i];
        for k in (i + 1)..m {
            s -= l[k * m + i] * b[k];
        }
        b[i] = s / l[i * m + i];
    }
    if b.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> DesignMatrix {
        let mut m = DesignMatrix::zeros(rows.len(), rows[0].len());
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn solves_exact_square_system() {
        let a = from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let y = [5.0, 10.0];
        let s = least_squares(&a, &y);
        assert!(!s.used_ridge);
        assert!((s.coeffs[0] - 1.0).abs() < 1e-12);
        assert!((s.coeffs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn overdetermined_fit_matches_normal_equations() {
        // y = 3x + 2 with an extra inconsistent point.
        let a = from_rows(&[&[1.0, 1.0], &[2.0, 1.0], &[3.0, 1.0], &[4.0, 1.0]]);
        let y = [5.0, 8.0, 11.0, 14.5];
        let s = least_squares(&a, &y);
        // Independent normal-equations solve (2x2, by hand):
        //   [30 10; 10 4] b = [112 38.5]
        let det = 30.0 * 4.0 - 10.0 * 10.0;
        let b0 = (4.0 * 112.0 - 10.0 * 38.5) / det;
        let b1 = (30.0 * 38.5 - 10.0 * 112.0) / det;
        assert!((s.coeffs[0] - b0).abs() < 1e-10);
        assert!((s.coeffs[1] - b1).abs() < 1e-10);
    }

    #[test]
    fn collinear_columns_take_the_ridge_path() {
        let a = from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        let y = [1.0, 2.0, 3.0];
        let s = least_squares(&a, &y);
        assert!(s.used_ridge);
        assert!(s.coeffs.iter().all(|c| c.is_finite()));
        // The ridge solution still reproduces y almost exactly.
        for (i, &yi) in y.iter().enumerate() {
            assert!((a.row_dot(i, &s.coeffs) - yi).abs() < 1e-4);
        }
    }
}
