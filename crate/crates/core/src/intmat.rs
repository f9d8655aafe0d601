//! Small dense integer matrices with checked arithmetic.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for l in 0..self.cols {
                    acc += self.get(i, l) as i128 * other.get(l, j) as i128;
                }
                out.set(i, j, i64::try_from(acc).map_err(|_| Error::MatrixOverflow)?);
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::MatrixOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { data, ..*self })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let neg = Self {
            data: other
                .data
                .iter()
                .map(|v| v.checked_neg().ok_or(Error::MatrixOverflow))
                .collect::<Result<Vec<_>>>()?,
            ..*other
        };
        self.checked_add(&neg)
    }

    pub fn checked_mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                let acc: i128 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| *a as i128 * *b as i128)
                    .sum();
                i64::try_from(acc).map_err(|_| Error::MatrixOverflow)
            })
            .collect()
    }

    /// `A^n` for `n ≥ 0` by repeated squaring.
    pub fn checked_pow(&self, mut n: u64) -> Result<Self> {
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `(A^n, Σ_{j<n} A^j)` by the doubling recurrence
    /// `S_{a+b} = S_a + A^a S_b`.
    pub fn pow_and_geometric_sum(&self, n: u64) -> Result<(Self, Self)> {
        let dim = self.rows;
        let mut pow_acc = Self::identity(dim);
        let mut sum_acc = Self::zeros(dim, dim);
        // (A^{2^i}, S_{2^i})
        let mut pow_base = self.clone();
        let mut sum_base = Self::identity(dim);
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                // S_{acc + base} = S_acc + A^{acc} S_base
                sum_acc = sum_acc.checked_add(&pow_acc.checked_mul(&sum_base)?)?;
                pow_acc = pow_acc.checked_mul(&pow_base)?;
            }
            k >>= 1;
            if k > 0 {
                sum_base = sum_base.checked_add(&pow_base.checked_mul(&sum_base)?)?;
                pow_base = pow_base.checked_mul(&pow_base)?;
            }
        }
        Ok((pow_acc, sum_acc))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i128> {
        if !self.is_square() {
            return Err(Error::InvalidArgument(
                "determinant of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut m: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&v| v as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&r| m[r][k] != 0) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j]
                        .checked_mul(m[k][k])
                        .and_then(|a| m[i][k].checked_mul(m[k][j]).and_then(|b| a.checked_sub(b)))
                        .ok_or(Error::MatrixOverflow)?;
                    m[i][j] = num / prev;
                }
            }
            prev = m[k][k];
        }
        Ok(sign * m[n - 1][n - 1])
    }

    /// Inverse of a unimodular matrix via the adjugate.
    pub fn unimodular_inverse(&self) -> Result<Self> {
        let det = self.determinant()?;
        if det != 1 && det != -1 {
            return Err(Error::InvalidSystem(format!(
                "matrix is not unimodular (det = {det})"
            )));
        }
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let c = minor.determinant()?;
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let v = sign * c * det;
                inv.set(i, j, i64::try_from(v).map_err(|_| Error::MatrixOverflow)?);
            }
        }
        Ok(inv)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.rows;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: n - 1,
            cols: n - 1,
            data,
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            f.write_str(&row.join(","))?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for IntMatrix {
    /// `a,b;c,d` row-major literal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(i64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&rows.join(";"))
    }
}

impl std::str::FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<i64>()
                            .map_err(|e| Error::Parse(format!("matrix entry {v:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMatrix {
        "2,1;1,1".parse().unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = cat();
        assert_eq!(a.determinant().unwrap(), 1);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(inv, "1,-1;-1,2".parse().unwrap());
        assert!(a.checked_mul(&inv).unwrap().is_identity());
        let b: IntMatrix = "1,2,0;0,1,0;3,1,1".parse().unwrap();
        assert_eq!(b.determinant().unwrap(), 1);
        assert!(b
            .checked_mul(&b.unimodular_inverse().unwrap())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn geometric_sum_matches_naive() {
        let a = cat();
        for n in 0..12u64 {
            let (p, s) = a.pow_and_geometric_sum(n).unwrap();
            let mut naive_p = IntMatrix::identity(2);
            let mut naive_s = IntMatrix::zeros(2, 2);
            for _ in 0..n {
                naive_s = naive_s.checked_add(&naive_p).unwrap();
                naive_p = naive_p.checked_mul(&a).unwrap();
            }
            assert_eq!(p, naive_p);
            assert_eq!(s, naive_s);
        }
    }

    #[test]
    fn power_overflow_is_reported() {
        assert_eq!(cat().checked_pow(200), Err(Error::MatrixOverflow));
    }
}
