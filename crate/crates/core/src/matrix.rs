use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense row-major integer matrix. Used for stoichiometry, where column `j`
/// is the state change of reaction `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_columns(nrows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = IntMatrix::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows `row_idx` and columns `col_idx`, in the given order.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(row_idx.len(), col_idx.len());
        for (a, &i) in row_idx.iter().enumerate() {
            for (b, &j) in col_idx.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * v` over `i128` to keep certificate checks overflow-free.
    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| i128::from(a) * b).sum())
            .collect()
    }

    /// `w^T * self`.
    pub fn left_mul_vec(&self, w: &[i128]) -> Vec<i128> {
        assert_eq!(w.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| w[i] * i128::from(self.get(i, j))).sum())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            f.write_str(&row.join(", "))?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_submatrix() {
        let m = IntMatrix::from_rows(&[vec![2, -1], vec![-1, 1]]);
        assert_eq!(m.mul_vec(&[2, 3]), vec![1, 1]);
        assert_eq!(m.left_mul_vec(&[1, 3]), vec![-1, 2]);
        assert_eq!(m.submatrix(&[0, 1], &[0]).column(0), vec![2, -1]);
        assert_eq!(m.transpose().row(0), &[2, -1]);
        assert_eq!(m.to_string(), "[2, -1; -1, 1]");
        assert_eq!(IntMatrix::from_columns(2, &m.columns()), m);
    }
}
