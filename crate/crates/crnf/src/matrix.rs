//! Dense matrices over a coefficient ring, with Gaussian elimination that is
//! exact for rational scalars and partially pivoted for floats.

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Cx};

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<C: Coeff> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Mat<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn matmul(&self, other: &Mat<C>) -> Mat<C> {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out: Mat<C> = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a.clone() * other[(k, c)].clone();
                    if !add.is_zero() {
                        let v = out[(r, c)].clone() + add;
                        out[(r, c)] = v;
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = C::zero();
                for c in 0..self.cols {
                    if !self[(r, c)].is_zero() && !v[c].is_zero() {
                        acc = acc + self[(r, c)].clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat<C>) -> Mat<C> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<C>) -> Mat<C> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }

    pub fn neg(&self) -> Mat<C> {
        Mat::from_fn(self.rows, self.cols, |r, c| -self[(r, c)].clone())
    }

    /// Solves `self * x = rhs` for each column of `rhs` by Gaussian
    /// elimination with partial pivoting (largest `pivot_mag`). Exact for
    /// rational scalars. Fails on singular systems.
    pub fn solve(&self, rhs: &Mat<C>) -> Result<Mat<C>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].pivot_mag();
            for r in col + 1..n {
                let m = a[(r, col)].pivot_mag();
                if m > best {
                    best = m;
                    piv = r;
                }
            }
            if a[(piv, col)].is_zero() {
                return Err(Error::Singular(format!("pivot column {col}")));
            }
            if piv != col {
                a.swap_rows(piv, col);
                b.swap_rows(piv, col);
            }
            let inv = a[(col, col)].inv().ok_or_else(|| {
                Error::Singular(format!("non-invertible pivot at column {col}"))
            })?;
            for c in col..n {
                let v = a[(col, c)].clone() * inv.clone();
                a[(col, c)] = v;
            }
            for c in 0..b.cols {
                let v = b[(col, c)].clone() * inv.clone();
                b[(col, c)] = v;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for c in col..n {
                    let v = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
                for c in 0..b.cols {
                    let v = b[(r, c)].clone() - f.clone() * b[(col, c)].clone();
                    b[(r, c)] = v;
                }
            }
        }
        Ok(b)
    }

    pub fn solve_vec(&self, rhs: &[C]) -> Result<Vec<C>> {
        let m = Mat {
            rows: rhs.len(),
            cols: 1,
            data: rhs.to_vec(),
        };
        let x = self.solve(&m)?;
        Ok(x.data)
    }

    pub fn inverse(&self) -> Result<Mat<C>> {
        if C::EXACT {
            self.inverse_bareiss()
        } else {
            self.solve(&Mat::identity(self.rows))
        }
    }

    /// Fraction-free forward elimination (Bareiss) on the cleared matrix,
    /// followed by rational back substitution. Exact-domain entries stay
    /// integral through the elimination, so no per-operation normalization
    /// happens until the final division.
    fn inverse_bareiss(&self) -> Result<Mat<C>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        if n == 0 {
            return Ok(self.clone());
        }
        let clear = C::clearing_factor(self.data.iter());
        let base = match &clear {
            Some(d) => self.scale_entries(d),
            None => self.clone(),
        };
        // augmented [B | I]
        let mut a = Mat::<C>::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                a[(r, c)] = base[(r, c)].clone();
            }
            a[(r, n + r)] = C::one();
        }
        let mut prev = C::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                let swap = (k + 1..n).find(|&r| !a[(r, k)].is_zero());
                match swap {
                    Some(r) => {
                        a.swap_rows(r, k);
                        // keep divisibility: a sign flip of one row flips
                        // the minor signs consistently
                        for c in 0..2 * n {
                            a[(k, c)] = -a[(k, c)].clone();
                        }
                    }
                    None => return Err(Error::Singular(format!("pivot column {k}"))),
                }
            }
            let piv = a[(k, k)].clone();
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..2 * n {
                    if c == k {
                        continue;
                    }
                    let v = (piv.clone() * a[(r, c)].clone()
                        - f.clone() * a[(k, c)].clone())
                        .exact_div(&prev);
                    a[(r, c)] = v;
                }
                a[(r, k)] = C::zero();
            }
            prev = piv;
        }
        // left part is diag(det, ..., det) with det = prev
        let det_inv = prev
            .inv()
            .ok_or_else(|| Error::Singular("zero determinant".into()))?;
        let mut out = Mat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = a[(r, n + c)].clone() * det_inv.clone();
            }
        }
        if let Some(d) = clear {
            // inverse of (B / D) is D * B^-1
            out = out.scale_entries(&d);
        }
        Ok(out)
    }

    fn scale_entries(&self, s: &C) -> Mat<C> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row-echelon form in place; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let mut piv = None;
            let mut best = 0.0;
            for r in row..self.rows {
                let m = self[(r, col)].pivot_mag();
                if !self[(r, col)].is_zero() && m >= best {
                    best = m;
                    piv = Some(r);
                }
            }
            let Some(piv) = piv else { continue };
            self.swap_rows(piv, row);
            let inv = self[(row, col)].inv().expect("nonzero pivot");
            for c in col..self.cols {
                let v = self[(row, c)].clone() * inv.clone();
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for c in col..self.cols {
                    let v = self[(r, c)].clone() - f.clone() * self[(row, c)].clone();
                    self[(r, c)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace (columns are kernel vectors).
    pub fn nullspace(&self) -> Vec<Vec<C>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Vec::new();
        for &f in &free {
            let mut v = vec![C::zero(); self.cols];
            v[f] = C::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m[(prow, f)].clone();
            }
            out.push(v);
        }
        out
    }
}

impl<C: Coeff> std::ops::Index<(usize, usize)> for Mat<C> {
    type Output = C;
    fn index(&self, (r, c): (usize, usize)) -> &C {
        &self.data[r * self.cols + c]
    }
}

impl<C: Coeff> std::ops::IndexMut<(usize, usize)> for Mat<C> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C {
        &mut self.data[r * self.cols + c]
    }
}

/// Operator 2-norm of a complex matrix, computed from the singular values of
/// the real 2x2-block embedding.
pub fn op_norm_2(m: &Mat<Cx>) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    let re = nalgebra::DMatrix::from_fn(m.rows, m.cols, |r, c| m[(r, c)].re);
    let im = nalgebra::DMatrix::from_fn(m.rows, m.cols, |r, c| m[(r, c)].im);
    let mut big = nalgebra::DMatrix::zeros(2 * m.rows, 2 * m.cols);
    big.view_mut((0, 0), (m.rows, m.cols)).copy_from(&re);
    big.view_mut((0, m.cols), (m.rows, m.cols)).copy_from(&(-&im));
    big.view_mut((m.rows, 0), (m.rows, m.cols)).copy_from(&im);
    big.view_mut((m.rows, m.cols), (m.rows, m.cols)).copy_from(&re);
    big.singular_values().max()
}

/// Operator 2-norm of a real f64 matrix.
pub fn op_norm_2_real(m: &nalgebra::DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn exact_solve_and_inverse() {
        let mut a = Mat::from_fn(3, 3, |r, c| Exact::from_ints((r * 3 + c) as i64 % 5 + 1, 1));
        a[(1, 1)] = Exact::from_ints(7, 3);
        a[(2, 2)] = Exact::from_ints(-9, 2);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        assert_eq!(prod, Mat::identity(3));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        // rows: [1 2 3], [2 4 6]
        let mut a = Mat::zeros(2, 3);
        for (c, v) in [1i64, 2, 3].iter().enumerate() {
            a[(0, c)] = Exact::from_ints(*v, 1);
            a[(1, c)] = Exact::from_ints(2 * *v, 1);
        }
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let y = a.matvec(&v);
            assert!(y.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn float_norm_matches_known_value() {
        let mut m = Mat::<Cx>::zeros(2, 2);
        m[(0, 0)] = Cx::new(3.0, 0.0);
        m[(1, 1)] = Cx::new(-4.0, 0.0);
        assert!((op_norm_2(&m) - 4.0).abs() < 1e-12);
    }
}
