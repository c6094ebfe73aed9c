//! Exact integer matrices, Smith normal form, and a fraction-free rank
//! oracle. Everything runs over unbounded integers; entries can grow during
//! elimination and torsion claims are meaningless otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &BigInt) {
        self.data[i * self.cols + j] += value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let prod = a * b;
                        out.add_to(i, j, &prod);
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= q * row[source]
    fn row_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = q * self.get(source, j);
            let cur = self.get(target, j) - delta;
            self.set(target, j, cur);
        }
    }

    fn col_axpy(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = q * self.get(i, source);
            let cur = self.get(i, target) - delta;
            self.set(i, target, cur);
        }
    }
}

/// Result of a Smith normal form computation: the elementary divisors
/// `d1 | d2 | ...` (all positive, including any 1s) and the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

/// Smith normal form by pivot-minimizing elementary row/column reduction.
/// The input is left unchanged.
pub fn smith_normal_form(input: &IntMatrix) -> SmithNormalForm {
    let mut m = input.clone();
    let bound = m.rows.min(m.cols);
    let mut t = 0;
    while t < bound {
        let Some((pi, pj)) = min_nonzero(&m, t) else {
            break;
        };
        m.swap_rows(t, pi);
        m.swap_cols(t, pj);
        loop {
            // Clear column t below the pivot.
            let mut dirty = false;
            for i in t + 1..m.rows {
                if m.get(i, t).is_zero() {
                    continue;
                }
                let q = m.get(i, t).div_floor(m.get(t, t));
                m.row_axpy(i, t, &q);
                if !m.get(i, t).is_zero() {
                    // Remainder is smaller than the pivot; promote it.
                    m.swap_rows(t, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            for j in t + 1..m.cols {
                if m.get(t, j).is_zero() {
                    continue;
                }
                let q = m.get(t, j).div_floor(m.get(t, t));
                m.col_axpy(j, t, &q);
                if !m.get(t, j).is_zero() {
                    m.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Pivot divides its row and column; enforce divisibility of the
            // remaining block.
            match first_nondivisible(&m, t) {
                Some((i, _)) => {
                    // Fold row i into row t and restart the reduction.
                    let one = BigInt::from(-1);
                    m.row_axpy(t, i, &one);
                }
                None => break,
            }
        }
        if m.get(t, t).is_negative() {
            let val = -m.get(t, t).clone();
            m.set(t, t, val);
        }
        t += 1;
    }
    let mut divisors = Vec::new();
    for i in 0..t {
        divisors.push(m.get(i, i).clone());
    }
    SmithNormalForm { divisors, rank: t }
}

/// Position of a minimal-absolute-value nonzero entry in the trailing block
/// starting at `(t, t)`.
fn min_nonzero(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if v.abs() < m.get(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// First entry of the trailing block not divisible by the pivot `m[t][t]`.
fn first_nondivisible(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let pivot = m.get(t, t);
    for i in t + 1..m.rows {
        for j in t + 1..m.cols {
            if !(m.get(i, j) % pivot).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Rank over the rationals by Bareiss fraction-free elimination; the
/// independent cross-check for the Smith normal form rank.
pub fn rational_rank(input: &IntMatrix) -> usize {
    let mut m = input.clone();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    let mut row = 0;
    for col in 0..m.cols {
        // Find a pivot in this column at or below `row`.
        let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        m.swap_rows(row, p);
        for i in row + 1..m.rows {
            for j in col + 1..m.cols {
                let val = (m.get(row, col) * m.get(i, j) - m.get(i, col) * m.get(row, j)) / &prev;
                m.set(i, j, val);
            }
            m.set(i, col, BigInt::zero());
        }
        prev = m.get(row, col).clone();
        rank += 1;
        row += 1;
        if row == m.rows {
            break;
        }
    }
    rank
}
