//! Exact linear algebra over F_p: reduced echelon subspaces, kernels and
//! sparse operators.

use crate::fp::Prime;

/// A subspace of F_p^dim held as a reduced row echelon basis.
///
/// Rows are sorted by pivot column and every pivot column is zero in all
/// other rows, so two equal subspaces have identical representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    p: Prime,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn zero(p: Prime, dim: usize) -> Self {
        Echelon { p, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: Prime, dim: usize) -> Self {
        let mut e = Self::zero(p, dim);
        for i in 0..dim {
            let mut v = vec![0; dim];
            v[i] = 1;
            e.rows.push(v);
            e.pivots.push(i);
        }
        e
    }

    pub fn span<I, V>(p: Prime, dim: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[u32]>,
    {
        let mut e = Self::zero(p, dim);
        for v in vectors {
            e.insert(v.as_ref().to_vec());
        }
        e
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Normal form of `v` modulo the subspace.
    pub fn reduce(&self, v: &mut [u32]) {
        debug_assert_eq!(v.len(), self.dim);
        let p = self.p;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                let f = p.neg(c);
                axpy(p, v, f, row);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns true when the dimension grew.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length does not match ambient dimension");
        self.reduce(&mut v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p;
        let s = p.inv(v[piv]);
        for x in v.iter_mut() {
            *x = p.mul(*x, s);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                axpy(p, row, p.neg(c), &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.rows.insert(at, v);
        self.pivots.insert(at, piv);
        true
    }

    /// Coordinates of `v` in the echelon basis, or None when `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&q| v[q]).collect())
    }

    pub fn is_subspace_of(&self, other: &Echelon) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Echelon) -> Echelon {
        let mut e = self.clone();
        for r in &other.rows {
            e.insert(r.clone());
        }
        e
    }

    pub fn intersection(&self, other: &Echelon) -> Echelon {
        // x = sum c_k s_k lies in `other` iff its normal form modulo `other` vanishes.
        let images: Vec<Vec<u32>> = self
            .rows
            .iter()
            .map(|r| {
                let mut w = r.clone();
                other.reduce(&mut w);
                w
            })
            .collect();
        let ker = kernel(self.p, self.dim, &images);
        let mut e = Echelon::zero(self.p, self.dim);
        for c in ker {
            let mut x = vec![0; self.dim];
            for (ck, row) in c.iter().zip(&self.rows) {
                if *ck != 0 {
                    axpy(self.p, &mut x, *ck, row);
                }
            }
            e.insert(x);
        }
        e
    }
}

/// v += c * w
#[inline]
pub fn axpy(p: Prime, v: &mut [u32], c: u32, w: &[u32]) {
    if c == 0 {
        return;
    }
    let m = p.get() as u64;
    let c = c as u64;
    for (a, &b) in v.iter_mut().zip(w) {
        if b != 0 {
            *a = ((*a as u64 + c * b as u64) % m) as u32;
        }
    }
}

/// Kernel of the map F_p^k -> F_p^dim sending e_j to `images[j]`.
pub fn kernel(p: Prime, dim: usize, images: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let k = images.len();
    // Row-reduce [image | identity]; rows whose image part vanishes span the kernel.
    let mut e = Echelon::zero(p, dim + k);
    let mut out = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let mut row = Vec::with_capacity(dim + k);
        row.extend_from_slice(img);
        row.extend(std::iter::repeat_n(0, k));
        row[dim + j] = 1;
        e.insert(row);
    }
    for (row, &piv) in e.rows.iter().zip(&e.pivots) {
        if piv >= dim {
            out.push(row[dim..].to_vec());
        }
    }
    out
}

/// Rank of the map with the given column images.
pub fn rank(p: Prime, dim: usize, images: &[Vec<u32>]) -> usize {
    Echelon::span(p, dim, images).dim()
}

/// A linear map F_p^cols -> F_p^rows stored by columns, each a sparse list
/// of (row, value) pairs with nonzero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOp {
    p: Prime,
    rows: usize,
    columns: Vec<Vec<(usize, u32)>>,
}

impl SparseOp {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> Self {
        SparseOp { p, rows, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(p: Prime, dim: usize) -> Self {
        SparseOp { p, rows: dim, columns: (0..dim).map(|i| vec![(i, 1)]).collect() }
    }

    /// Builds from dense column images.
    pub fn from_columns(p: Prime, rows: usize, cols: &[Vec<u32>]) -> Self {
        let columns = cols
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect())
            .collect();
        SparseOp { p, rows, columns }
    }

    /// Builds from possibly repeated, unreduced entries per column.
    pub fn from_entries(p: Prime, rows: usize, cols: Vec<Vec<(usize, i128)>>) -> Self {
        let columns = cols
            .into_iter()
            .map(|entries| {
                let mut acc: std::collections::BTreeMap<usize, u32> = Default::default();
                for (r, v) in entries {
                    assert!(r < rows);
                    let e = acc.entry(r).or_insert(0);
                    *e = p.add(*e, p.reduce(v));
                }
                acc.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect();
        SparseOp { p, rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, u32)] {
        &self.columns[j]
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols());
        let p = self.p;
        let mut out = vec![0u32; self.rows];
        for (j, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(i, a) in &self.columns[j] {
                out[i] = p.add(out[i], p.mul(a, c));
            }
        }
        out
    }

    pub fn dense_column(&self, j: usize) -> Vec<u32> {
        let mut out = vec![0; self.rows];
        for &(i, a) in &self.columns[j] {
            out[i] = a;
        }
        out
    }

    /// self ∘ other
    pub fn compose(&self, other: &SparseOp) -> SparseOp {
        assert_eq!(self.cols(), other.rows());
        let cols: Vec<Vec<u32>> = (0..other.cols()).map(|j| self.apply(&other.dense_column(j))).collect();
        SparseOp::from_columns(self.p, self.rows, &cols)
    }

    pub fn add(&self, other: &SparseOp) -> SparseOp {
        self.lin_comb(1, other, 1)
    }

    pub fn sub(&self, other: &SparseOp) -> SparseOp {
        self.lin_comb(1, other, self.p.neg(1))
    }

    pub fn scale(&self, c: u32) -> SparseOp {
        let p = self.p;
        let columns = self
            .columns
            .iter()
            .map(|col| col.iter().map(|&(i, a)| (i, p.mul(a, c))).filter(|x| x.1 != 0).collect())
            .collect();
        SparseOp { p, rows: self.rows, columns }
    }

    fn lin_comb(&self, a: u32, other: &SparseOp, b: u32) -> SparseOp {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let cols: Vec<Vec<u32>> = (0..self.cols())
            .map(|j| {
                let mut v = vec![0; self.rows];
                for &(i, x) in &self.columns[j] {
                    v[i] = self.p.add(v[i], self.p.mul(a, x));
                }
                for &(i, x) in &other.columns[j] {
                    v[i] = self.p.add(v[i], self.p.mul(b, x));
                }
                v
            })
            .collect();
        SparseOp::from_columns(self.p, self.rows, &cols)
    }

    pub fn transpose(&self) -> SparseOp {
        let mut columns = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, a) in col {
                columns[i].push((j, a));
            }
        }
        SparseOp { p: self.p, rows: self.cols(), columns }
    }

    pub fn rank(&self) -> usize {
        let cols: Vec<Vec<u32>> = (0..self.cols()).map(|j| self.dense_column(j)).collect();
        rank(self.p, self.rows, &cols)
    }

    pub fn image(&self) -> Echelon {
        Echelon::span(self.p, self.rows, (0..self.cols()).map(|j| self.dense_column(j)))
    }

    pub fn kernel(&self) -> Echelon {
        let cols: Vec<Vec<u32>> = (0..self.cols()).map(|j| self.dense_column(j)).collect();
        Echelon::span(self.p, self.cols(), kernel(self.p, self.rows, &cols))
    }

    /// Restriction to an invariant subspace, in the echelon coordinates of
    /// `sub`. Returns None if `sub` is not invariant.
    pub fn restrict(&self, sub: &Echelon) -> Option<SparseOp> {
        let mut cols = Vec::with_capacity(sub.dim());
        for row in sub.rows() {
            cols.push(sub.coordinates(&self.apply(row))?);
        }
        Some(SparseOp::from_columns(self.p, sub.dim(), &cols))
    }
}

/// Smallest subspace containing `seed` and stable under every operator.
///
/// Works in passes: each pass applies all operators, in order, to the
/// vectors added by the previous pass. Returns the subspace together with
/// its dimension after the seed and after every pass.
pub fn operator_closure<V: AsRef<[u32]>>(p: Prime, dim: usize, seed: impl IntoIterator<Item = V>, ops: &[&SparseOp]) -> (Echelon, Vec<usize>) {
    let mut space = Echelon::zero(p, dim);
    let mut frontier = Vec::new();
    for v in seed {
        if space.insert(v.as_ref().to_vec()) {
            frontier.push(v.as_ref().to_vec());
        }
    }
    let mut trace = vec![space.dim()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for op in ops {
                let w = op.apply(v);
                if space.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        frontier = next;
        trace.push(space.dim());
    }
    (space, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn echelon_is_canonical() {
        let p = p3();
        let a = Echelon::span(p, 3, [[1, 2, 0], [0, 1, 1]]);
        let b = Echelon::span(p, 3, [[1, 0, 1], [1, 1, 2]]);
        assert_eq!(a.dim(), 2);
        // both spans are {x : x0 - 2x1 + 2x2 ... } checked by mutual containment
        assert_eq!(a.is_subspace_of(&b), b.is_subspace_of(&a));
        if a.is_subspace_of(&b) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn closure_of_shift_operator() {
        let p = p3();
        // x -> x * t on span{1, t, t^2}
        let shift = SparseOp::from_columns(p, 3, &[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let (s, trace) = operator_closure(p, 3, [vec![1, 0, 0]], &[&shift]);
        assert_eq!(s.dim(), 3);
        assert_eq!(trace, vec![1, 2, 3, 3]);
        let (t, _) = operator_closure(p, 3, [vec![0, 0, 1]], &[]);
        assert_eq!(t.dim(), 1);
    }

    #[test]
    fn kernel_of_derivative_map() {
        // d/dx on F_3[x]/(x^3): 1 -> 0, x -> 1, x^2 -> 2x
        let p = p3();
        let images = vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 2, 0]];
        let k = kernel(p, 3, &images);
        assert_eq!(k, vec![vec![1, 0, 0]]);
        assert_eq!(rank(p, 3, &images), 2);
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let p = Prime::new(5).unwrap();
        let a = Echelon::span(p, 3, [[1, 0, 0], [0, 1, 0]]);
        let b = Echelon::span(p, 3, [[0, 1, 0], [0, 0, 1]]);
        let c = a.intersection(&b);
        assert_eq!(c.rows(), &[vec![0, 1, 0]]);
    }

    #[test]
    fn restriction_to_invariant_subspace() {
        let p = p3();
        let op = SparseOp::from_columns(p, 3, &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 2, 0]]);
        let sub = Echelon::span(p, 3, [[1, 0, 0], [0, 1, 0]]);
        let r = op.restrict(&sub).unwrap();
        assert_eq!(r.dense_column(1), vec![1, 0]);
        let bad = Echelon::span(p, 3, [[0, 0, 1]]);
        assert!(op.restrict(&bad).is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(0u32..5, 20)) {
            let p = Prime::new(5).unwrap();
            let cols: Vec<Vec<u32>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let r = rank(p, 4, &cols);
            let k = kernel(p, 4, &cols);
            prop_assert_eq!(r + k.len(), cols.len());
            for c in &k {
                let mut img = vec![0u32; 4];
                for (cj, col) in c.iter().zip(&cols) {
                    axpy(p, &mut img, *cj, col);
                }
                prop_assert!(img.iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn intersection_contained_in_both(a in proptest::collection::vec(0u32..3, 12),
                                          b in proptest::collection::vec(0u32..3, 12)) {
            let p = p3();
            let ea = Echelon::span(p, 4, a.chunks(4));
            let eb = Echelon::span(p, 4, b.chunks(4));
            let c = ea.intersection(&eb);
            prop_assert!(c.is_subspace_of(&ea) && c.is_subspace_of(&eb));
            prop_assert_eq!(c.dim() + ea.sum(&eb).dim(), ea.dim() + eb.dim());
        }
    }
}
