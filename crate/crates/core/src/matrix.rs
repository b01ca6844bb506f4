//! Dense matrices over any [`CommRing`].

use crate::base_ring::CommRing;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
}

pub fn identity<R: CommRing>(ring: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
}

pub fn mul<R: CommRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows);
    Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = ring.zero();
        for k in 0..a.cols {
            let x = a.get(i, k);
            let y = b.get(k, j);
            if !ring.is_zero(x) && !ring.is_zero(y) {
                acc = ring.add(&acc, &ring.mul(x, y));
            }
        }
        acc
    })
}

pub fn add<R: CommRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix::from_fn(a.rows, a.cols, |i, j| ring.add(a.get(i, j), b.get(i, j)))
}

pub fn sub<R: CommRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix::from_fn(a.rows, a.cols, |i, j| ring.sub(a.get(i, j), b.get(i, j)))
}

pub fn is_identity<R: CommRing>(ring: &R, a: &Matrix<R::Elem>) -> bool {
    a.rows == a.cols && *a == identity(ring, a.rows)
}

/// Kronecker product, row index (i, k) -> i * b.rows + k.
pub fn kron<R: CommRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        let x = a.get(i / b.rows, j / b.cols);
        if ring.is_zero(x) {
            return ring.zero();
        }
        ring.mul(x, b.get(i % b.rows, j % b.cols))
    })
}

/// Inverse over a local ring by Gauss-Jordan with unit pivots.
pub fn inverse<R: CommRing>(ring: &R, a: &Matrix<R::Elem>) -> Option<Matrix<R::Elem>> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut inv = identity(ring, n);
    for col in 0..n {
        let piv = (col..n).find(|&r| ring.inv(m.get(r, col)).is_some())?;
        for j in 0..n {
            m.data.swap(col * n + j, piv * n + j);
            inv.data.swap(col * n + j, piv * n + j);
        }
        let s = ring.inv(m.get(col, col)).expect("pivot is a unit");
        for j in 0..n {
            m.data[col * n + j] = ring.mul(m.get(col, j), &s);
            inv.data[col * n + j] = ring.mul(inv.get(col, j), &s);
        }
        for r in 0..n {
            if r == col || ring.is_zero(m.get(r, col)) {
                continue;
            }
            let f = m.get(r, col).clone();
            for j in 0..n {
                let mv = ring.sub(m.get(r, j), &ring.mul(&f, m.get(col, j)));
                m.data[r * n + j] = mv;
                let iv = ring.sub(inv.get(r, j), &ring.mul(&f, inv.get(col, j)));
                inv.data[r * n + j] = iv;
            }
        }
    }
    Some(inv)
}
