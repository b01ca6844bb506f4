//! Finite-dimensional GL_n-modules built functorially from the standard
//! module: weight bases, Lie operators E_ij, integral forms for divided
//! powers, and group actions of matrices over any coefficient ring. Also the
//! restricted-weight combinatorics: mod-p reduction, W(λ), v(λ), and an
//! oracle for irreducible characters via Steinberg's tensor product theorem.
//!
//! E_ij is the matrix unit with a 1 in row i, column j; on the standard module
//! it sends e_j to e_i. A matrix M acts on the standard module by
//! e_j -> sum_i M_ij e_i.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::base_ring::CommRing;
use crate::char_ring::{character_from_weights, LaurentPoly};
use crate::error::{domain, param, Error, Result};
use crate::fp::{binom_int, Prime};
use crate::linalg::{kernel, operator_closure, Echelon, SparseOp};
use crate::matrix::{self, Matrix};

pub type Weight = Vec<i32>;

/// Largest ambient module accepted when building W(λ).
pub const AMBIENT_DIM_CAP: usize = 4000;

/// Sparse square matrix over Z, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntOp {
    dim: usize,
    cols: Vec<Vec<(usize, i128)>>,
}

impl IntOp {
    fn zero(dim: usize) -> Self {
        IntOp { dim, cols: vec![Vec::new(); dim] }
    }

    fn from_entries(dim: usize, raw: Vec<Vec<(usize, i128)>>) -> Self {
        let cols = raw
            .into_iter()
            .map(|entries| {
                let mut acc: std::collections::BTreeMap<usize, i128> = Default::default();
                for (r, v) in entries {
                    *acc.entry(r).or_insert(0) += v;
                }
                acc.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect();
        IntOp { dim, cols }
    }

    pub fn column(&self, j: usize) -> &[(usize, i128)] {
        &self.cols[j]
    }

    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; self.dim];
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                for &(i, a) in &self.cols[j] {
                    out[i] += a * c;
                }
            }
        }
        out
    }

    fn reduce(&self, p: Prime) -> SparseOp {
        SparseOp::from_entries(p, self.dim, self.cols.clone())
    }
}

#[derive(Debug, Clone)]
enum Construction {
    Trivial,
    Standard,
    Exterior(Arc<WeightModule>),
    Sym(Arc<WeightModule>),
    Tensor(Arc<WeightModule>, Arc<WeightModule>),
    Twist(Arc<WeightModule>),
    Sub(Arc<WeightModule>, Echelon),
}

/// A GL_n-module with a weight basis and functorial structure.
#[derive(Debug, Clone)]
pub struct WeightModule {
    n: usize,
    p: Prime,
    labels: Vec<String>,
    weights: Vec<Weight>,
    lie: Vec<SparseOp>,
    integral: Option<Vec<IntOp>>,
    keys: Vec<Vec<usize>>,
    construction: Construction,
}

fn sorted_index(keys: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()
}

/// Nondecreasing sequences of length m over 0..d, lexicographic.
fn multisets(d: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, m, &mut Vec::new(), &mut out);
    out
}

/// Increasing sequences of length k over 0..d, lexicographic.
fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// Sorts `v` in place and returns the sign of the sorting permutation, or
/// None if two entries coincide.
fn sort_with_sign(v: &mut [usize]) -> Option<i128> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

type Columns = Vec<Vec<(usize, i128)>>;
type ColumnBuilder = fn(&dyn Fn(usize) -> Vec<(usize, i128)>, &[Vec<usize>], &HashMap<Vec<usize>, usize>) -> Columns;

fn tensor_columns(a: &dyn Fn(usize) -> Vec<(usize, i128)>, b: &dyn Fn(usize) -> Vec<(usize, i128)>, da: usize, db: usize) -> Columns {
    let mut cols = vec![Vec::new(); da * db];
    for x in 0..da {
        for y in 0..db {
            let col = &mut cols[x * db + y];
            for (r, c) in a(x) {
                col.push((r * db + y, c));
            }
            for (r, c) in b(y) {
                col.push((x * db + r, c));
            }
        }
    }
    cols
}

fn sym_columns(child: &dyn Fn(usize) -> Vec<(usize, i128)>, keys: &[Vec<usize>], index: &HashMap<Vec<usize>, usize>) -> Columns {
    keys.iter()
        .map(|key| {
            let mut col = Vec::new();
            let mut t = 0;
            while t < key.len() {
                let b = key[t];
                let mult = key.iter().filter(|&&x| x == b).count();
                for (row, c) in child(b) {
                    let mut new = key.clone();
                    new[t] = row;
                    new.sort_unstable();
                    col.push((index[&new], c * mult as i128));
                }
                t += mult;
            }
            col
        })
        .collect()
}

fn ext_columns(child: &dyn Fn(usize) -> Vec<(usize, i128)>, keys: &[Vec<usize>], index: &HashMap<Vec<usize>, usize>) -> Columns {
    keys.iter()
        .map(|key| {
            let mut col = Vec::new();
            for t in 0..key.len() {
                for (row, c) in child(key[t]) {
                    let mut new = key.clone();
                    new[t] = row;
                    if let Some(sign) = sort_with_sign(&mut new) {
                        col.push((index[&new], c * sign));
                    }
                }
            }
            col
        })
        .collect()
}

fn sparse_col(op: &SparseOp) -> impl Fn(usize) -> Vec<(usize, i128)> + '_ {
    move |j| op.column(j).iter().map(|&(i, a)| (i, a as i128)).collect()
}

fn int_col(op: &IntOp) -> impl Fn(usize) -> Vec<(usize, i128)> + '_ {
    move |j| op.column(j).to_vec()
}

impl WeightModule {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn trivial(n: usize, p: Prime) -> Arc<Self> {
        Arc::new(WeightModule {
            n,
            p,
            labels: vec!["1".into()],
            weights: vec![vec![0; n]],
            lie: vec![SparseOp::zero(p, 1, 1); n * n],
            integral: Some(vec![IntOp::zero(1); n * n]),
            keys: vec![],
            construction: Construction::Trivial,
        })
    }

    /// U = k^n with weights ε_1..ε_n.
    pub fn standard(n: usize, p: Prime) -> Arc<Self> {
        let mut integral = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut raw = vec![Vec::new(); n];
                raw[j].push((i, 1));
                integral.push(IntOp::from_entries(n, raw));
            }
        }
        let lie = integral.iter().map(|e| e.reduce(p)).collect();
        let weights = (0..n)
            .map(|i| {
                let mut w = vec![0; n];
                w[i] = 1;
                w
            })
            .collect();
        Arc::new(WeightModule {
            n,
            p,
            labels: (1..=n).map(|i| format!("e{i}")).collect(),
            weights,
            lie,
            integral: Some(integral),
            keys: vec![],
            construction: Construction::Standard,
        })
    }

    fn derived(
        base: &Arc<Self>,
        keys: Vec<Vec<usize>>,
        sep: &str,
        construction: Construction,
        build: ColumnBuilder,
    ) -> Arc<Self> {
        let index = sorted_index(&keys);
        let n = base.n;
        let p = base.p;
        let weights = keys
            .iter()
            .map(|k| (0..n).map(|c| k.iter().map(|&b| base.weights[b][c]).sum()).collect())
            .collect();
        let labels = keys
            .iter()
            .map(|k| {
                if k.is_empty() {
                    "1".to_string()
                } else {
                    k.iter().map(|&b| base.labels[b].clone()).collect::<Vec<_>>().join(sep)
                }
            })
            .collect();
        let d = keys.len();
        let lie = base.lie.iter().map(|op| SparseOp::from_entries(p, d, build(&sparse_col(op), &keys, &index))).collect();
        let integral = base
            .integral
            .as_ref()
            .map(|ops| ops.iter().map(|op| IntOp::from_entries(d, build(&int_col(op), &keys, &index))).collect());
        Arc::new(WeightModule { n, p, labels, weights, lie, integral, keys, construction })
    }

    /// Λ^k V; the zero module when k exceeds dim V (check `is_zero`).
    pub fn exterior_power(base: &Arc<Self>, k: usize) -> Arc<Self> {
        Self::derived(base, subsets(base.dim(), k), "∧", Construction::Exterior(Arc::clone(base)), ext_columns)
    }

    pub fn sym_power(base: &Arc<Self>, m: usize) -> Arc<Self> {
        Self::derived(base, multisets(base.dim(), m), "·", Construction::Sym(Arc::clone(base)), sym_columns)
    }

    pub fn tensor(a: &Arc<Self>, b: &Arc<Self>) -> Arc<Self> {
        assert_eq!((a.n, a.p), (b.n, b.p));
        let (da, db) = (a.dim(), b.dim());
        let n = a.n;
        let mut weights = Vec::with_capacity(da * db);
        let mut labels = Vec::with_capacity(da * db);
        for x in 0..da {
            for y in 0..db {
                weights.push(a.weights[x].iter().zip(&b.weights[y]).map(|(u, v)| u + v).collect());
                labels.push(format!("{}⊗{}", a.labels[x], b.labels[y]));
            }
        }
        let lie = (0..n * n)
            .map(|e| SparseOp::from_entries(a.p, da * db, tensor_columns(&sparse_col(&a.lie[e]), &sparse_col(&b.lie[e]), da, db)))
            .collect();
        let integral = match (&a.integral, &b.integral) {
            (Some(ia), Some(ib)) => Some(
                (0..n * n)
                    .map(|e| IntOp::from_entries(da * db, tensor_columns(&int_col(&ia[e]), &int_col(&ib[e]), da, db)))
                    .collect(),
            ),
            _ => None,
        };
        Arc::new(WeightModule {
            n,
            p: a.p,
            labels,
            weights,
            lie,
            integral,
            keys: vec![],
            construction: Construction::Tensor(Arc::clone(a), Arc::clone(b)),
        })
    }

    /// V^{[1]}: weights times p, Lie algebra acting by zero, group acting
    /// through entrywise p-th powers.
    pub fn frobenius_twist(base: &Arc<Self>) -> Arc<Self> {
        let p = base.p;
        let d = base.dim();
        Arc::new(WeightModule {
            n: base.n,
            p,
            labels: base.labels.iter().map(|l| format!("({l})^[1]")).collect(),
            weights: base.weights.iter().map(|w| w.iter().map(|x| x * p.get() as i32).collect()).collect(),
            lie: vec![SparseOp::zero(p, d, d); base.n * base.n],
            integral: None,
            keys: vec![],
            construction: Construction::Twist(Arc::clone(base)),
        })
    }

    /// The submodule spanned by the rows of `basis`, which must be stable
    /// under the Lie operators and spanned by weight vectors.
    pub fn submodule(ambient: &Arc<Self>, basis: Echelon) -> Result<Arc<Self>> {
        let mut weights = Vec::with_capacity(basis.dim());
        for (row, &piv) in basis.rows().iter().zip(basis.pivots()) {
            let w = &ambient.weights[piv];
            if row.iter().enumerate().any(|(i, &x)| x != 0 && ambient.weights[i] != *w) {
                return param("submodule basis vector is not a weight vector");
            }
            weights.push(w.clone());
        }
        let lie = ambient
            .lie
            .iter()
            .map(|op| op.restrict(&basis).ok_or_else(|| Error::Domain("subspace is not stable under the Lie algebra".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(WeightModule {
            n: ambient.n,
            p: ambient.p,
            labels: (1..=basis.dim()).map(|k| format!("w{k}")).collect(),
            weights,
            lie,
            integral: None,
            keys: vec![],
            construction: Construction::Sub(Arc::clone(ambient), basis),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, b: usize) -> &Weight {
        &self.weights[b]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Sorted index tuple of basis vector b in a symmetric or exterior power.
    pub fn basis_key(&self, b: usize) -> Option<&[usize]> {
        self.keys.get(b).map(|k| k.as_slice())
    }

    /// Basis index of a sorted key in a symmetric or exterior power.
    pub fn key_index(&self, key: &[usize]) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    /// The Lie operator E_ij (0-based indices) over F_p.
    pub fn lie(&self, i: usize, j: usize) -> &SparseOp {
        &self.lie[self.idx(i, j)]
    }

    pub fn has_integral_form(&self) -> bool {
        self.integral.is_some()
    }

    pub fn integral(&self, i: usize, j: usize) -> Option<&IntOp> {
        self.integral.as_ref().map(|ops| &ops[self.idx(i, j)])
    }

    /// Nonzero divided powers E_ij^{(m)}, m = 1, 2, ..., for i != j, computed
    /// on the integral form by exact division and reduced mod p.
    pub fn divided_powers(&self, i: usize, j: usize) -> Result<Vec<SparseOp>> {
        if i == j {
            return param("divided powers are taken of off-diagonal E_ij");
        }
        let e = self.integral(i, j).ok_or_else(|| Error::Capability("module has no integral form".into()))?;
        let d = self.dim();
        let mut current: Vec<Vec<i128>> = (0..d)
            .map(|b| {
                let mut v = vec![0; d];
                v[b] = 1;
                v
            })
            .collect();
        let mut out = Vec::new();
        for m in 1.. {
            let mut any = false;
            for v in current.iter_mut() {
                let mut w = e.apply(v);
                for x in w.iter_mut() {
                    if *x % m != 0 {
                        return Err(Error::Internal(format!("E^{m}/{m}! is not integral")));
                    }
                    *x /= m;
                    any |= *x != 0;
                }
                *v = w;
            }
            if !any {
                break;
            }
            let cols: Columns = current.iter().map(|v| v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(r, &x)| (r, x)).collect()).collect();
            let op = SparseOp::from_entries(self.p, d, cols);
            if !op.is_zero() {
                out.push(op);
            }
        }
        Ok(out)
    }

    /// All E_ij^{(m)} for i != j.
    pub fn all_divided_powers(&self) -> Result<Vec<SparseOp>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.extend(self.divided_powers(i, j)?);
                }
            }
        }
        Ok(out)
    }

    /// The operator by which an invertible n x n matrix over `ring` acts.
    pub fn group_matrix<R: CommRing>(&self, ring: &R, m: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
        if m.rows() != self.n || m.cols() != self.n {
            return param("group element must be an n x n matrix");
        }
        Ok(match &self.construction {
            Construction::Trivial => matrix::identity(ring, 1),
            Construction::Standard => m.clone(),
            Construction::Tensor(a, b) => matrix::kron(ring, &a.group_matrix(ring, m)?, &b.group_matrix(ring, m)?),
            Construction::Twist(base) => {
                let p = self.p.get() as u64;
                base.group_matrix(ring, &m.map(|x| ring.pow(x, p)))?
            }
            Construction::Sym(base) => self.power_matrix(ring, &base.group_matrix(ring, m)?, false),
            Construction::Exterior(base) => self.power_matrix(ring, &base.group_matrix(ring, m)?, true),
            Construction::Sub(ambient, basis) => {
                let a = ambient.group_matrix(ring, m)?;
                let d = basis.dim();
                let mut out = Matrix::from_fn(d, d, |_, _| ring.zero());
                for (k, row) in basis.rows().iter().enumerate() {
                    for (kk, &piv) in basis.pivots().iter().enumerate() {
                        let mut acc = ring.zero();
                        for (j, &c) in row.iter().enumerate() {
                            if c != 0 {
                                acc = ring.add(&acc, &ring.mul(&ring.from_int(c as i128), a.get(piv, j)));
                            }
                        }
                        out.set(kk, k, acc);
                    }
                }
                out
            }
        })
    }

    /// Columns are products (symmetric or wedge) of the base columns.
    fn power_matrix<R: CommRing>(&self, ring: &R, base: &Matrix<R::Elem>, alternating: bool) -> Matrix<R::Elem> {
        let d = self.dim();
        let index = sorted_index(&self.keys);
        let mut out = Matrix::from_fn(d, d, |_, _| ring.zero());
        for (col, key) in self.keys.iter().enumerate() {
            let mut poly: HashMap<Vec<usize>, R::Elem> = HashMap::from([(Vec::new(), ring.one())]);
            for &s in key {
                let mut next: HashMap<Vec<usize>, R::Elem> = HashMap::new();
                for (mono, coef) in &poly {
                    for row in 0..base.rows() {
                        let x = base.get(row, s);
                        if ring.is_zero(x) {
                            continue;
                        }
                        let mut new = mono.clone();
                        new.push(row);
                        let mut term = ring.mul(coef, x);
                        if alternating {
                            match sort_with_sign(&mut new) {
                                Some(sign) => {
                                    if sign < 0 {
                                        term = ring.sub(&ring.zero(), &term);
                                    }
                                }
                                None => continue,
                            }
                        } else {
                            new.sort_unstable();
                        }
                        let slot = next.entry(new).or_insert_with(|| ring.zero());
                        *slot = ring.add(slot, &term);
                    }
                }
                poly = next;
            }
            for (mono, coef) in poly {
                out.set(index[&mono], col, coef);
            }
        }
        out
    }

    pub fn character(&self) -> LaurentPoly {
        character_from_weights(self.n, self.weights.iter().map(|w| (w.as_slice(), 1)))
    }

    /// {"weights":[{"coords":[..],"mult":..}]}
    pub fn character_json(&self) -> Value {
        character_to_json(&self.character())
    }
}

pub fn character_to_json(ch: &LaurentPoly) -> Value {
    let weights: Vec<Value> = ch.terms().map(|(e, &c)| json!({"coords": e, "mult": c as i64})).collect();
    json!({ "weights": weights })
}

pub fn is_dominant(lambda: &[i32]) -> bool {
    lambda.windows(2).all(|w| w[0] >= w[1])
}

/// λ = r + p·s with r in X_1'(T).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPDecomposition {
    pub r_part: Weight,
    pub s_part: Weight,
    /// Coefficients of r in the basis ω_i = ε_1 + ... + ε_i.
    pub m: Vec<u32>,
}

impl ModPDecomposition {
    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&x| x == 0)
    }

    /// Some(i) when r = ω_i (1-based).
    pub fn fundamental_index(&self) -> Option<usize> {
        let nonzero: Vec<usize> = (0..self.m.len()).filter(|&i| self.m[i] != 0).collect();
        match nonzero.as_slice() {
            [i] if self.m[*i] == 1 => Some(i + 1),
            _ => None,
        }
    }
}

/// Coefficients in the ω basis: c_i = λ_i - λ_{i+1}, c_n = λ_n.
pub fn omega_coords(lambda: &[i32]) -> Vec<i32> {
    let n = lambda.len();
    (0..n).map(|i| if i + 1 < n { lambda[i] - lambda[i + 1] } else { lambda[i] }).collect()
}

pub fn from_omega_coords(c: &[i32]) -> Weight {
    let n = c.len();
    (0..n).map(|j| c[j..].iter().sum()).collect()
}

pub fn mod_p_reduce(lambda: &[i32], p: Prime) -> ModPDecomposition {
    let p = p.get() as i32;
    let c = omega_coords(lambda);
    let m: Vec<i32> = c.iter().map(|x| x.rem_euclid(p)).collect();
    let q: Vec<i32> = c.iter().map(|x| x.div_euclid(p)).collect();
    ModPDecomposition { r_part: from_omega_coords(&m), s_part: from_omega_coords(&q), m: m.iter().map(|&x| x as u32).collect() }
}

pub fn in_restricted_region(lambda: &[i32], p: Prime) -> bool {
    omega_coords(lambda).iter().all(|&c| c >= 0 && c < p.get() as i32)
}

/// v(λ) inside Sym^{m_1}(U) ⊗ ... ⊗ Sym^{m_n}(Λ^n U) and the submodule W(λ)
/// it generates under all divided powers.
#[derive(Debug, Clone)]
pub struct HighestWeightData {
    pub lambda: Weight,
    pub m: Vec<u32>,
    pub ambient: Arc<WeightModule>,
    pub generator: Vec<u32>,
    pub span: Echelon,
    pub module: Arc<WeightModule>,
}

fn ambient_dim_estimate(n: usize, m: &[u32]) -> u128 {
    m.iter().enumerate().filter(|(_, &mi)| mi > 0).map(|(i, &mi)| binom_int(binom_int(n as u64, i as u64 + 1) as u64 + mi as u64 - 1, mi as u64)).product()
}

pub fn build_w_lambda(lambda: &[i32], p: Prime) -> Result<HighestWeightData> {
    let n = lambda.len();
    if n == 0 {
        return param("weights need n >= 1");
    }
    if !in_restricted_region(lambda, p) {
        return domain(format!("{lambda:?} is not in X_1'(T) for p = {}", p.get()));
    }
    let m: Vec<u32> = omega_coords(lambda).iter().map(|&c| c as u32).collect();
    if ambient_dim_estimate(n, &m) > AMBIENT_DIM_CAP as u128 {
        return Err(Error::Scope(format!("ambient module for {lambda:?} exceeds {AMBIENT_DIM_CAP} dimensions")));
    }
    let u = WeightModule::standard(n, p);
    let mut ambient: Option<Arc<WeightModule>> = None;
    let mut gen_index = 0usize;
    for (i, &mi) in m.iter().enumerate() {
        if mi == 0 {
            continue;
        }
        let ext = WeightModule::exterior_power(&u, i + 1);
        let top = ext.key_index(&(0..=i).collect::<Vec<_>>()).expect("e_1∧...∧e_i is a basis vector");
        let factor = WeightModule::sym_power(&ext, mi as usize);
        let fidx = factor.key_index(&vec![top; mi as usize]).expect("power of a basis vector");
        ambient = Some(match ambient {
            None => {
                gen_index = fidx;
                factor
            }
            Some(a) => {
                gen_index = gen_index * factor.dim() + fidx;
                WeightModule::tensor(&a, &factor)
            }
        });
    }
    let ambient = ambient.unwrap_or_else(|| WeightModule::trivial(n, p));
    let mut generator = vec![0u32; ambient.dim()];
    generator[gen_index] = 1;
    debug_assert_eq!(ambient.weight(gen_index), &lambda.to_vec());
    let ops = ambient.all_divided_powers()?;
    let op_refs: Vec<&SparseOp> = ops.iter().collect();
    let (span, _) = operator_closure(p, ambient.dim(), [generator.clone()], &op_refs);
    let module = WeightModule::submodule(&ambient, span.clone())?;
    Ok(HighestWeightData { lambda: lambda.to_vec(), m, ambient, generator, span, module })
}

/// L(μ) for restricted μ as W(μ)/M(μ), where M(μ) is the largest submodule
/// missing the highest weight line.
#[derive(Debug, Clone)]
pub struct RestrictedIrreducible {
    pub hw: HighestWeightData,
    /// Dist-span of the highest-weight coordinate functional, in W-coordinates.
    pub dual_span: Echelon,
    /// M(μ) in W-coordinates: the common kernel of `dual_span`.
    pub maximal_submodule: Echelon,
    pub character: LaurentPoly,
}

impl RestrictedIrreducible {
    pub fn dim(&self) -> usize {
        self.dual_span.dim()
    }
}

/// Divided powers of W(μ) acting in its own echelon coordinates.
pub fn restricted_divided_powers(hw: &HighestWeightData) -> Result<Vec<SparseOp>> {
    hw.ambient
        .all_divided_powers()?
        .iter()
        .map(|op| op.restrict(&hw.span).ok_or_else(|| Error::Internal("W(λ) is not stable".into())))
        .collect()
}

pub fn restricted_irreducible(mu: &[i32], p: Prime) -> Result<RestrictedIrreducible> {
    let hw = build_w_lambda(mu, p)?;
    let d = hw.span.dim();
    let ops = restricted_divided_powers(&hw)?;
    let transposes: Vec<SparseOp> = ops.iter().map(|op| op.transpose()).collect();
    let t_refs: Vec<&SparseOp> = transposes.iter().collect();
    let top = (0..d).find(|&k| hw.module.weight(k) == &hw.lambda).expect("highest weight occurs in W");
    let mut phi = vec![0u32; d];
    phi[top] = 1;
    let (dual_span, _) = operator_closure(p, d, [phi], &t_refs);
    let columns: Vec<Vec<u32>> = (0..d).map(|j| dual_span.rows().iter().map(|row| row[j]).collect()).collect();
    let maximal_submodule = Echelon::span(p, d, kernel(p, dual_span.dim(), &columns));
    let n = mu.len();
    let character = character_from_weights(n, dual_span.pivots().iter().map(|&k| (hw.module.weight(k).as_slice(), 1)));
    Ok(RestrictedIrreducible { hw, dual_span, maximal_submodule, character })
}

fn restricted_character_cache() -> &'static Mutex<HashMap<(Weight, u32), LaurentPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(Weight, u32), LaurentPoly>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn restricted_character(mu: &[i32], p: Prime) -> Result<LaurentPoly> {
    let key = (mu.to_vec(), p.get());
    if let Some(ch) = restricted_character_cache().lock().unwrap().get(&key) {
        return Ok(ch.clone());
    }
    let ch = restricted_irreducible(mu, p)?.character;
    restricted_character_cache().lock().unwrap().insert(key, ch.clone());
    Ok(ch)
}

/// Dimension and character of the irreducible GL_n-module L(λ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlnIrreducible {
    pub lambda: Weight,
    pub dim: u64,
    pub character: LaurentPoly,
}

/// Strips the determinant power λ_n, then recurses
/// ch L(λ) = ch L(r(λ)) · ψ^p(ch L(s(λ))).
pub fn dim_gln_irreducible(lambda: &[i32], p: Prime) -> Result<GlnIrreducible> {
    let n = lambda.len();
    if n == 0 {
        return param("weights need n >= 1");
    }
    if !is_dominant(lambda) {
        return domain(format!("{lambda:?} is not dominant"));
    }
    let k = lambda[n - 1];
    let mut shifted: Weight = lambda.iter().map(|x| x - k).collect();
    let mut character = LaurentPoly::one(n);
    let mut scale = 1u32;
    while shifted.iter().any(|&x| x != 0) {
        let dec = mod_p_reduce(&shifted, p);
        let ch = restricted_character(&dec.r_part, p)?;
        character = character.mul(&ch.adams(scale));
        shifted = dec.s_part;
        scale *= p.get();
    }
    character = character.mul(&LaurentPoly::monomial(vec![k; n], 1));
    let dim = character.evaluate_at_one() as u64;
    Ok(GlnIrreducible { lambda: lambda.to_vec(), dim, character })
}

/// Outcome of checking one Lie-action identity on v(λ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    /// None when the hypotheses of the identity are not met.
    pub holds: Option<bool>,
}

/// Checks the four identities on v(λ) for λ in X_1'(T), λ != 0:
/// (1) E_jk v = δ_jk m_k v for j <= k; (2) E_kk E_jk v = (m_k - 1) E_jk v for
/// j > k; (3) E_ii v = (m_i + 1) v if m_k = 1; (4) E_ii E_ki v = m_i E_ki v and
/// E_ii E_ki E_jk v = m_i E_ki E_jk v for j > k if m_k = 1. Here k is the
/// largest index with m_k != 0 and i < k the next one.
pub fn highest_weight_identities(lambda: &[i32], p: Prime) -> Result<Vec<IdentityCheck>> {
    let hw = build_w_lambda(lambda, p)?;
    let n = lambda.len();
    let m = &hw.m;
    let Some(k) = (0..n).rev().find(|&t| m[t] != 0) else {
        return domain("λ = 0 has no highest index k");
    };
    let i = (0..k).rev().find(|&t| m[t] != 0);
    let amb = &hw.ambient;
    let v = &hw.generator;
    let e = |a: usize, b: usize, w: &[u32]| amb.lie(a, b).apply(w);
    let scaled = |c: i64, w: &[u32]| -> Vec<u32> { w.iter().map(|&x| p.mul(x, p.reduce(c as i128))).collect() };
    let mk = m[k] as i64;
    let mut out = Vec::new();
    let one = (0..=k).all(|j| e(j, k, v) == if j == k { scaled(mk, v) } else { vec![0; v.len()] });
    out.push(IdentityCheck { name: "(1) E_jk v = δ_jk m_k v, j <= k".into(), holds: Some(one) });
    let two = (k + 1..n).all(|j| {
        let ejk = e(j, k, v);
        e(k, k, &ejk) == scaled(mk - 1, &ejk)
    });
    out.push(IdentityCheck { name: "(2) E_kk E_jk v = (m_k - 1) E_jk v, j > k".into(), holds: Some(two) });
    let applicable = mk == 1 && i.is_some();
    let (three, four) = match (applicable, i) {
        (true, Some(i)) => {
            let mi = m[i] as i64;
            let three = e(i, i, v) == scaled(mi + 1, v);
            let eki = e(k, i, v);
            let mut four = e(i, i, &eki) == scaled(mi, &eki);
            for j in k + 1..n {
                let w = e(k, i, &e(j, k, v));
                four &= e(i, i, &w) == scaled(mi, &w);
            }
            (Some(three), Some(four))
        }
        _ => (None, None),
    };
    out.push(IdentityCheck { name: "(3) E_ii v = (m_i + 1) v when m_k = 1".into(), holds: three });
    out.push(IdentityCheck { name: "(4) E_ii E_ki v = m_i E_ki v and E_ii E_ki E_jk v = m_i E_ki E_jk v when m_k = 1".into(), holds: four });
    Ok(out)
}

/// All λ in X_1'(T) for the given n and p.
pub fn restricted_weights(n: usize, p: Prime) -> Vec<Weight> {
    let pp = p.get() as usize;
    let total = pp.pow(n as u32);
    (0..total)
        .map(|code| {
            let c: Vec<i32> = (0..n).map(|i| ((code / pp.pow(i as u32)) % pp) as i32).collect();
            from_omega_coords(&c)
        })
        .collect()
}

/// Dominant polynomial weights (λ_n >= 0) of total degree <= d, sorted by
/// degree and then lexicographically descending.
pub fn dominant_weights_up_to(n: usize, d: u32) -> Vec<Weight> {
    fn go(n: usize, max_part: i32, left: i32, cur: &mut Vec<i32>, out: &mut Vec<Weight>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in (0..=max_part.min(left)).rev() {
            cur.push(x);
            go(n, x, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d as i32, d as i32, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let (da, db): (i32, i32) = (a.iter().sum(), b.iter().sum());
        da.cmp(&db).then_with(|| b.cmp(a))
    });
    out
}
