//! The induced module I(V) = R(n,r) ⊗ V with its Lie operators, the
//! divided-power translations spanning the distribution algebra of G⁻, and
//! the action of group points over test algebras.
//!
//! Basis vector (pos, b) is x^pos ⊗ v_b, stored at index pos * dim V + b,
//! with pos the deglex position of the monomial.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::autgroup::{lie_basis, GroupPoint, LieBasisElement};
use crate::base_ring::{CommRing, PolyRing, TruncatedPolynomial};
use crate::char_ring::{character_from_weights, LaurentPoly};
use crate::error::{param, Error, Result};
use crate::fp::Prime;
use crate::glnrep::{Weight, WeightModule};
use crate::linalg::{operator_closure, Echelon, SparseOp};

pub const DEFAULT_SCOPE_LIMIT: usize = 50_000;

/// Largest induced-module dimension accepted; FROBREP_SCOPE_LIMIT overrides.
pub fn scope_limit() -> usize {
    std::env::var("FROBREP_SCOPE_LIMIT").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SCOPE_LIMIT)
}

/// ∂_axis^{(m)} ⊗ id.
#[derive(Debug, Clone)]
pub struct TranslationOp {
    pub axis: usize,
    pub m: u32,
    pub op: SparseOp,
}

/// Result of an operator closure: the subspace and its dimension after the
/// seed and after every pass.
#[derive(Debug, Clone)]
pub struct Closure {
    pub space: Echelon,
    pub trace: Vec<usize>,
}

pub fn closure(p: Prime, dim: usize, seed: &[Vec<u32>], ops: &[&SparseOp]) -> Closure {
    let (space, trace) = operator_closure(p, dim, seed, ops);
    Closure { space, trace }
}

/// The F_p-linear action of a group point over A, one operator per basis
/// element of A: g(w) = sum_u components[u](w) ⊗ a_u.
#[derive(Debug, Clone)]
pub struct GroupOperator {
    pub components: Vec<SparseOp>,
}

impl GroupOperator {
    pub fn apply(&self, v: &[u32]) -> Vec<Vec<u32>> {
        self.components.iter().map(|op| op.apply(v)).collect()
    }

    /// True when every A-component of the image of every row lies in `s`.
    pub fn preserves(&self, s: &Echelon) -> bool {
        s.rows().iter().all(|row| self.components.iter().all(|op| s.contains(&op.apply(row))))
    }
}

#[derive(Debug, Clone)]
pub struct InducedModule {
    ring: Arc<PolyRing>,
    fiber: Arc<WeightModule>,
    lie_basis: Vec<LieBasisElement>,
    lie_ops: Vec<SparseOp>,
    translations: Vec<TranslationOp>,
}

impl InducedModule {
    pub fn build(fiber: &Arc<WeightModule>, n: usize, r: u32, p: Prime) -> Result<Self> {
        if fiber.n() != n || fiber.prime() != p {
            return param("fiber module has different n or p");
        }
        if r == 0 {
            return param("r must be at least 1");
        }
        let size = (p.get() as u128).pow(r * n as u32) * fiber.dim() as u128;
        let limit = scope_limit();
        if size > limit as u128 {
            return Err(Error::Scope(format!("I(V) would have dimension {size}, above the limit {limit}")));
        }
        let ring = PolyRing::over_prime_field(n, r, p)?;
        let basis = lie_basis(&ring);
        let mut module = InducedModule { ring, fiber: Arc::clone(fiber), lie_basis: basis, lie_ops: Vec::new(), translations: Vec::new() };
        module.lie_ops = module.lie_basis.iter().map(|d| module.build_lie_op(d)).collect();
        module.translations = module.build_translations();
        Ok(module)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn fiber(&self) -> &Arc<WeightModule> {
        &self.fiber
    }

    pub fn prime(&self) -> Prime {
        self.ring.prime()
    }

    pub fn n(&self) -> usize {
        self.ring.n()
    }

    pub fn r(&self) -> u32 {
        self.ring.r()
    }

    pub fn dim(&self) -> usize {
        self.ring.dim() * self.fiber.dim()
    }

    pub fn index(&self, pos: usize, b: usize) -> usize {
        pos * self.fiber.dim() + b
    }

    /// (monomial position, fiber index) of a basis vector.
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.fiber.dim(), k % self.fiber.dim())
    }

    pub fn basis_vector(&self, pos: usize, b: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        v[self.index(pos, b)] = 1;
        v
    }

    /// Weight of x^I ⊗ v_b: I + μ_b.
    pub fn weight(&self, k: usize) -> Weight {
        let (pos, b) = self.split(k);
        let e = self.ring.monomials().exponents(pos);
        self.fiber.weight(b).iter().zip(e).map(|(m, &x)| m + x as i32).collect()
    }

    pub fn label(&self, k: usize) -> String {
        let (pos, b) = self.split(k);
        let e = self.ring.monomials().exponents(pos);
        let mono: Vec<String> = e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| if x == 1 { format!("x{}", i + 1) } else { format!("x{}^{x}", i + 1) }).collect();
        let mono = if mono.is_empty() { "1".to_string() } else { mono.join("") };
        format!("{mono}⊗{}", self.fiber.labels()[b])
    }

    pub fn lie_basis(&self) -> &[LieBasisElement] {
        &self.lie_basis
    }

    pub fn lie_ops(&self) -> &[SparseOp] {
        &self.lie_ops
    }

    pub fn lie_op_refs(&self) -> Vec<&SparseOp> {
        self.lie_ops.iter().collect()
    }

    fn lie_position(&self, d: &LieBasisElement) -> Result<usize> {
        if d.axis >= self.n() {
            return param("Lie basis axis out of range");
        }
        let pos = self.ring.monomials().position(&d.exps).ok_or_else(|| Error::Parameter("Lie basis monomial out of range".into()))?;
        Ok(d.axis * self.ring.dim() + pos)
    }

    pub fn lie_op(&self, d: &LieBasisElement) -> Result<&SparseOp> {
        Ok(&self.lie_ops[self.lie_position(d)?])
    }

    pub fn lie_action(&self, d: &LieBasisElement, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.dim() {
            return param("vector has the wrong length");
        }
        Ok(self.lie_op(d)?.apply(v))
    }

    /// δ_(i, x^I)(x^e ⊗ v) = x^I ∂_i(x^e) ⊗ v + sum_j x^e ∂_j(x^I) ⊗ E_ji v.
    fn build_lie_op(&self, d: &LieBasisElement) -> SparseOp {
        let mons = self.ring.monomials();
        let fd = self.fiber.dim();
        let n = self.n();
        let shifted = |e: &[u32], minus: usize| -> Option<usize> {
            let new: Vec<u32> = (0..n).map(|t| e[t] + d.exps[t] - u32::from(t == minus)).collect();
            mons.position(&new)
        };
        let mut cols = Vec::with_capacity(self.dim());
        for pos in 0..mons.len() {
            let e = mons.exponents(pos);
            for b in 0..fd {
                let mut col: Vec<(usize, i128)> = Vec::new();
                if e[d.axis] > 0 {
                    if let Some(q) = shifted(e, d.axis) {
                        col.push((q * fd + b, e[d.axis] as i128));
                    }
                }
                for j in 0..n {
                    if d.exps[j] == 0 {
                        continue;
                    }
                    if let Some(q) = shifted(e, j) {
                        for &(row, c) in self.fiber.lie(j, d.axis).column(b) {
                            col.push((q * fd + row, d.exps[j] as i128 * c as i128));
                        }
                    }
                }
                cols.push(col);
            }
        }
        SparseOp::from_entries(self.prime(), self.dim(), cols)
    }

    fn build_translations(&self) -> Vec<TranslationOp> {
        let mons = self.ring.monomials();
        let fd = self.fiber.dim();
        let p = self.prime();
        let mut out = Vec::new();
        for axis in 0..self.n() {
            for m in 1..self.ring.bound() {
                let mut cols = Vec::with_capacity(self.dim());
                for pos in 0..mons.len() {
                    let e = mons.exponents(pos);
                    for b in 0..fd {
                        let mut col = Vec::new();
                        if e[axis] >= m {
                            let c = p.binom(e[axis] as u64, m as u64);
                            if c != 0 {
                                let mut new = e.to_vec();
                                new[axis] -= m;
                                col.push((mons.position(&new).expect("smaller exponent") * fd + b, c as i128));
                            }
                        }
                        cols.push(col);
                    }
                }
                out.push(TranslationOp { axis, m, op: SparseOp::from_entries(p, self.dim(), cols) });
            }
        }
        out
    }

    pub fn divided_translation_ops(&self) -> &[TranslationOp] {
        &self.translations
    }

    /// span{1 ⊗ v : v in V}.
    pub fn constant_slice(&self) -> Echelon {
        Echelon::span(self.prime(), self.dim(), (0..self.fiber.dim()).map(|b| self.basis_vector(0, b)))
    }

    /// The operator of a point g over A: f ⊗ v -> ρ_V(J_g(x)) (f(g(x)) ⊗ v),
    /// where J_g(x) has (i, j) entry ∂g_j/∂x_i.
    pub fn group_operator(&self, g: &GroupPoint) -> Result<GroupOperator> {
        let gr = g.ring();
        if gr.n() != self.n() || gr.r() != self.r() || gr.prime() != self.prime() {
            return param("group point has different (n, r, p)");
        }
        let rho = self.fiber.group_matrix(gr, &g.jacobian_functions())?;
        let mons = self.ring.monomials();
        let bound = self.ring.bound() as usize;
        let powers: Vec<Vec<TruncatedPolynomial>> = g
            .images()
            .iter()
            .map(|gi| {
                let mut pw = vec![gr.one()];
                for k in 1..bound {
                    pw.push(CommRing::mul(gr, &pw[k - 1], gi));
                }
                pw
            })
            .collect();
        let alg_dim = gr.coeff().dim();
        let fd = self.fiber.dim();
        let dim = self.dim();
        let mut cols: Vec<Vec<Vec<(usize, i128)>>> = vec![vec![Vec::new(); dim]; alg_dim];
        for pos in 0..mons.len() {
            let e = mons.exponents(pos);
            let mut img = gr.one();
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    img = CommRing::mul(gr, &img, &powers[i][x as usize]);
                }
            }
            for b in 0..fd {
                for a in 0..fd {
                    let entry = rho.get(a, b);
                    if entry.is_zero() {
                        continue;
                    }
                    let prod = CommRing::mul(gr, entry, &img);
                    for (q, chunk) in prod.raw().chunks(alg_dim).enumerate() {
                        for (u, &c) in chunk.iter().enumerate() {
                            if c != 0 {
                                cols[u][pos * fd + b].push((q * fd + a, c as i128));
                            }
                        }
                    }
                }
            }
        }
        let p = self.prime();
        Ok(GroupOperator { components: cols.into_iter().map(|c| SparseOp::from_entries(p, dim, c)).collect() })
    }

    /// g(v) as its A-components.
    pub fn group_action(&self, g: &GroupPoint, v: &[u32]) -> Result<Vec<Vec<u32>>> {
        if v.len() != self.dim() {
            return param("vector has the wrong length");
        }
        Ok(self.group_operator(g)?.apply(v))
    }

    /// S ∩ (joint kernel of all ∂_i^{(m)} ⊗ id).
    pub fn g_minus_invariants(&self, s: &Echelon) -> Echelon {
        let mut k = s.clone();
        for t in &self.translations {
            if k.dim() == 0 {
                break;
            }
            k = k.intersection(&t.op.kernel());
        }
        k
    }

    pub fn lie_closure(&self, seed: &[Vec<u32>]) -> Closure {
        closure(self.prime(), self.dim(), seed, &self.lie_op_refs())
    }

    pub fn is_lie_stable(&self, s: &Echelon) -> bool {
        self.lie_ops.iter().all(|op| s.rows().iter().all(|row| s.contains(&op.apply(row))))
    }

    pub fn subspace_group_stable(&self, s: &Echelon, samples: &[GroupPoint]) -> Result<bool> {
        for g in samples {
            if !self.group_operator(g)?.preserves(s) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Character of a weight-graded subspace, read from its echelon rows.
    pub fn character_of(&self, s: &Echelon) -> Result<LaurentPoly> {
        let mut weights = Vec::with_capacity(s.dim());
        for (row, &piv) in s.rows().iter().zip(s.pivots()) {
            let w = self.weight(piv);
            if row.iter().enumerate().any(|(k, &c)| c != 0 && self.weight(k) != w) {
                return Err(Error::Domain("subspace is not spanned by weight vectors".into()));
            }
            weights.push(w);
        }
        Ok(character_from_weights(self.n(), weights.iter().map(|w| (w.as_slice(), 1))))
    }

    pub fn character(&self) -> LaurentPoly {
        let weights: Vec<Weight> = (0..self.dim()).map(|k| self.weight(k)).collect();
        character_from_weights(self.n(), weights.iter().map(|w| (w.as_slice(), 1)))
    }

    /// The subspace as {"dim", "ambient_dim", "rows": [[..]]}.
    pub fn subspace_json(&self, s: &Echelon) -> Value {
        json!({ "ambient_dim": self.dim(), "dim": s.dim(), "rows": s.rows() })
    }

    /// Exact expansion of [x^I ∂_i, x^J ∂_j] in the Lie basis.
    pub fn derivation_bracket(&self, a: &LieBasisElement, b: &LieBasisElement) -> Vec<(LieBasisElement, u32)> {
        let p = self.prime();
        let mons = self.ring.monomials();
        let mut acc: HashMap<LieBasisElement, u32> = HashMap::new();
        let mut term = |outer: &LieBasisElement, inner: &LieBasisElement, sign: bool| {
            let c = inner.exps[outer.axis];
            if c == 0 {
                return;
            }
            let exps: Vec<u32> = (0..self.n()).map(|t| outer.exps[t] + inner.exps[t] - u32::from(t == outer.axis)).collect();
            if mons.position(&exps).is_none() {
                return;
            }
            let c = p.reduce(c as i128);
            let c = if sign { c } else { p.neg(c) };
            let slot = acc.entry(LieBasisElement { axis: inner.axis, exps }).or_insert(0);
            *slot = p.add(*slot, c);
        };
        term(a, b, true);
        term(b, a, false);
        let mut out: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        out.sort_by(|x, y| (x.0.axis, &x.0.exps).cmp(&(y.0.axis, &y.0.exps)));
        out
    }

    pub fn lie_combination(&self, terms: &[(LieBasisElement, u32)]) -> Result<SparseOp> {
        let mut op = SparseOp::zero(self.prime(), self.dim(), self.dim());
        for (d, c) in terms {
            op = op.add(&self.lie_op(d)?.scale(*c));
        }
        Ok(op)
    }

    /// If x^{ps-1} ⊗ v lies in a subspace closed under the plain derivatives,
    /// so does every x^J ⊗ v with p(s_k - 1) <= j_k < p s_k. Returns whether
    /// the closure of x^{ps-1} ⊗ v under ∂_i ⊗ id contains all of them.
    pub fn derivative_box_check(&self, s: &[u32], v: &[u32]) -> Result<bool> {
        let n = self.n();
        let p = self.prime().get();
        if s.len() != n || s.iter().any(|&x| x == 0 || x > self.ring.bound() / p) {
            return param("need 1 <= s_j <= p^{r-1}");
        }
        let top: Vec<u32> = s.iter().map(|&x| p * x - 1).collect();
        let seed = self.monomial_tensor(&top, v)?;
        let derivs: Vec<&SparseOp> = (0..n).map(|i| self.lie_op(&LieBasisElement { axis: i, exps: vec![0; n] })).collect::<Result<_>>()?;
        let cl = closure(self.prime(), self.dim(), &[seed], &derivs);
        let mut box_ok = true;
        let total: u32 = p.pow(n as u32);
        for code in 0..total {
            let j: Vec<u32> = (0..n).map(|t| p * (s[t] - 1) + (code / p.pow(t as u32)) % p).collect();
            box_ok &= cl.space.contains(&self.monomial_tensor(&j, v)?);
        }
        Ok(box_ok)
    }

    /// x^e ⊗ v for a fiber vector v.
    pub fn monomial_tensor(&self, e: &[u32], v: &[u32]) -> Result<Vec<u32>> {
        let pos = self.ring.monomials().position(e).ok_or_else(|| Error::Parameter("exponent out of range".into()))?;
        if v.len() != self.fiber.dim() {
            return param("fiber vector has the wrong length");
        }
        let mut out = vec![0; self.dim()];
        for (b, &c) in v.iter().enumerate() {
            out[self.index(pos, b)] = c;
        }
        Ok(out)
    }

    /// The operator identities behind the two implications: for j_k ≡ 0 mod p,
    /// δ_(k, x_j)(x^J v) = x^J E_jk v; for j_i ≡ 0 mod p,
    /// δ_(i, x_k)(δ_(k, x_j)(x^J v) - x_j ∂_k(x^J) v) = x^J E_ki E_jk v.
    /// Indices are 0-based; an identity whose hypothesis fails reports None.
    pub fn root_operator_identities(&self, exps: &[u32], v: &[u32], i: usize, j: usize, k: usize) -> Result<(Option<bool>, Option<bool>)> {
        let n = self.n();
        let p = self.prime();
        if i >= n || j >= n || k >= n || j == k {
            return param("need indices below n with j != k");
        }
        let unit = |t: usize| -> Vec<u32> { (0..n).map(|s| u32::from(s == t)).collect() };
        let d_kj = LieBasisElement { axis: k, exps: unit(j) };
        let d_ik = LieBasisElement { axis: i, exps: unit(k) };
        let xv = self.monomial_tensor(exps, v)?;
        let e_jk = self.fiber.lie(j, k).apply(v);
        let first = exps[k].is_multiple_of(p.get()).then(|| Ok::<_, Error>(self.lie_action(&d_kj, &xv)? == self.monomial_tensor(exps, &e_jk)?));
        let second = if exps[i].is_multiple_of(p.get()) {
            let mut inner = self.lie_action(&d_kj, &xv)?;
            if exps[k] > 0 {
                let mut e2 = exps.to_vec();
                e2[k] -= 1;
                e2[j] += 1;
                if let Ok(w) = self.monomial_tensor(&e2, v) {
                    let c = p.reduce(exps[k] as i128);
                    for (x, y) in inner.iter_mut().zip(&w) {
                        *x = p.sub(*x, p.mul(c, *y));
                    }
                }
            }
            let lhs = self.lie_action(&d_ik, &inner)?;
            let rhs = self.monomial_tensor(exps, &self.fiber.lie(k, i).apply(&e_jk))?;
            Some(lhs == rhs)
        } else {
            None
        };
        Ok((first.transpose()?, second))
    }
}

/// I(V ⊗ W^{[r]}) next to I(V) ⊗ P_r^* W on the same basis: index
/// (pos, a, c) is pos * dim V * dim W + a * dim W + c on both sides.
#[derive(Debug, Clone)]
pub struct TensorIdentity {
    pub twisted: InducedModule,
    pub base: InducedModule,
    pub pulled_back: Arc<WeightModule>,
}

pub fn tensor_with_pullback(base_fiber: &Arc<WeightModule>, w: &Arc<WeightModule>, n: usize, r: u32, p: Prime) -> Result<TensorIdentity> {
    let mut twist = Arc::clone(w);
    for _ in 0..r {
        twist = WeightModule::frobenius_twist(&twist);
    }
    let twisted = InducedModule::build(&WeightModule::tensor(base_fiber, &twist), n, r, p)?;
    let base = InducedModule::build(base_fiber, n, r, p)?;
    Ok(TensorIdentity { twisted, base, pulled_back: Arc::clone(w) })
}

fn kron_ops(p: Prime, a: &SparseOp, b: &SparseOp) -> SparseOp {
    let (da, db) = (a.cols(), b.cols());
    let mut cols = vec![Vec::new(); da * db];
    for x in 0..da {
        for y in 0..db {
            for &(i, c) in a.column(x) {
                for &(j, d) in b.column(y) {
                    cols[x * db + y].push((i * db + j, (c as i128) * (d as i128)));
                }
            }
        }
    }
    SparseOp::from_entries(p, a.rows() * b.rows(), cols)
}

impl TensorIdentity {
    /// Lie operators of I(V ⊗ W^{[r]}) equal those of I(V) tensored with the
    /// identity on W.
    pub fn lie_operators_agree(&self) -> bool {
        let p = self.base.prime();
        let id = SparseOp::identity(p, self.pulled_back.dim());
        self.base.lie_ops().iter().zip(self.twisted.lie_ops()).all(|(a, b)| kron_ops(p, a, &id) == *b)
    }

    /// g acts on I(V) ⊗ P_r^* W as g ⊗ ρ_W(P_r(g)).
    pub fn group_operators_agree(&self, g: &GroupPoint) -> Result<bool> {
        let lhs = self.twisted.group_operator(g)?;
        let base = self.base.group_operator(g)?;
        let alg = g.algebra();
        let pr = g.transfer_p_r();
        let rho_w = self.pulled_back.group_matrix(alg, &pr)?;
        let p = self.base.prime();
        let ad = alg.dim();
        let dw = self.pulled_back.dim();
        let w_components: Vec<SparseOp> = (0..ad)
            .map(|u| {
                let cols: Vec<Vec<u32>> = (0..dw).map(|c| (0..dw).map(|rr| rho_w.get(rr, c)[u]).collect()).collect();
                SparseOp::from_columns(p, dw, &cols)
            })
            .collect();
        let space = alg.algebra().space();
        let mut rhs: Vec<SparseOp> = vec![SparseOp::zero(p, self.twisted.dim(), self.twisted.dim()); ad];
        for u in 0..ad {
            for (v, wc) in w_components.iter().enumerate() {
                if let Some(w) = space.product(u, v) {
                    rhs[w] = rhs[w].add(&kron_ops(p, &base.components[u], wc));
                }
            }
        }
        Ok(lhs.components == rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autgroup::random_point;
    use crate::base_ring::TestAlgebra;
    use crate::matrix::Matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pr(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn sample_ring(n: usize, r: u32, p: Prime) -> Arc<PolyRing> {
        PolyRing::new(n, r, p, TestAlgebra::truncated(p, 1, r).unwrap()).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(InducedModule::build(&WeightModule::trivial(1, pr(2)), 1, 1, pr(2)).unwrap().dim(), 2);
        assert_eq!(InducedModule::build(&WeightModule::standard(2, pr(3)), 2, 1, pr(3)).unwrap().dim(), 18);
        let l2 = WeightModule::exterior_power(&WeightModule::standard(2, pr(2)), 2);
        assert_eq!(InducedModule::build(&l2, 2, 2, pr(2)).unwrap().dim(), 16);
    }

    #[test]
    fn lie_action_examples() {
        let p = pr(3);
        let s2 = WeightModule::sym_power(&WeightModule::standard(1, p), 2);
        let m = InducedModule::build(&s2, 1, 1, p).unwrap();
        let d = LieBasisElement { axis: 0, exps: vec![2] };
        let v = m.basis_vector(0, 0);
        assert_eq!(m.lie_action(&d, &v).unwrap(), m.monomial_tensor(&[1], &[1]).unwrap());
        let triv = InducedModule::build(&WeightModule::trivial(2, p), 2, 1, p).unwrap();
        let one = triv.basis_vector(0, 0);
        let cl = triv.lie_closure(&[one]);
        assert_eq!(cl.space.dim(), 1);
        let full = m.lie_closure(&[v]);
        assert_eq!(full.space.dim(), 3);
        assert_eq!(full.trace, vec![1, 2, 3, 3]);
        // constant derivation only differentiates
        let u = InducedModule::build(&WeightModule::standard(2, p), 2, 1, p).unwrap();
        let f = u.monomial_tensor(&[2, 1], &[1, 2]).unwrap();
        let d0 = LieBasisElement { axis: 0, exps: vec![0, 0] };
        assert_eq!(u.lie_action(&d0, &f).unwrap(), u.monomial_tensor(&[1, 1], &[2, 1]).unwrap());
    }

    #[test]
    fn lie_brackets_match_derivations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        use rand::Rng;
        for (n, r, p) in [(1, 2, 2), (2, 1, 3)] {
            let p = pr(p);
            let fiber = WeightModule::tensor(&WeightModule::standard(n, p), &WeightModule::standard(n, p));
            let m = InducedModule::build(&fiber, n, r, p).unwrap();
            for _ in 0..20 {
                let a = &m.lie_basis()[rng.gen_range(0..m.lie_basis().len())];
                let b = &m.lie_basis()[rng.gen_range(0..m.lie_basis().len())];
                let la = m.lie_op(a).unwrap();
                let lb = m.lie_op(b).unwrap();
                let comm = la.compose(lb).sub(&lb.compose(la));
                assert_eq!(comm, m.lie_combination(&m.derivation_bracket(a, b)).unwrap(), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn group_lie_consistency_over_dual_numbers() {
        for (n, r, p) in [(1, 1, 3), (2, 1, 2), (1, 2, 2)] {
            let p = pr(p);
            let fiber = WeightModule::sym_power(&WeightModule::standard(n, p), 2);
            let m = InducedModule::build(&fiber, n, r, p).unwrap();
            let ring = PolyRing::new(n, r, p, TestAlgebra::dual_numbers(p)).unwrap();
            for d in m.lie_basis() {
                let eps = ring.monomial(&d.exps, &[0, 1]);
                let images = (0..n).map(|s| if s == d.axis { ring.variable(s).add(&eps).unwrap() } else { ring.variable(s) }).collect();
                let g = GroupPoint::validate(images).unwrap();
                let op = m.group_operator(&g).unwrap();
                assert_eq!(op.components[0], SparseOp::identity(p, m.dim()));
                assert_eq!(&op.components[1], m.lie_op(d).unwrap());
            }
        }
    }

    #[test]
    fn group_action_examples() {
        let p = pr(3);
        let u = WeightModule::standard(2, p);
        let m = InducedModule::build(&u, 2, 1, p).unwrap();
        let ring = sample_ring(2, 1, p);
        let id = GroupPoint::identity(&ring);
        let op = m.group_operator(&id).unwrap();
        assert_eq!(op.components[0], SparseOp::identity(p, m.dim()));
        assert!(op.components[1..].iter().all(|c| c.is_zero()));
        // diagonal torus scales by t^I t^μ
        let t = [2u32, 2u32];
        let diag = Matrix::from_fn(2, 2, |i, j| {
            let mut c = vec![0; ring.coeff().dim()];
            if i == j {
                c[0] = t[i];
            }
            c
        });
        let g = GroupPoint::linear(&ring, &diag).unwrap();
        let op = m.group_operator(&g).unwrap();
        for k in 0..m.dim() {
            let w = m.weight(k);
            let scale = w.iter().zip(&t).fold(1, |acc, (&e, &ti)| p.mul(acc, p.pow_elem(ti, e as u64)));
            let mut expect = vec![0; m.dim()];
            expect[k] = scale;
            assert_eq!(op.components[0].apply(&m.basis_vector(m.split(k).0, m.split(k).1)), expect);
        }
        // translation for n = 1: f(x) -> f(x + a)
        let ring1 = sample_ring(1, 1, p);
        let m1 = InducedModule::build(&WeightModule::trivial(1, p), 1, 1, p).unwrap();
        let a = ring1.coeff().algebra().generator(0);
        let g = GroupPoint::translation(&ring1, &[a]).unwrap();
        let img = m1.group_action(&g, &m1.monomial_tensor(&[2], &[1]).unwrap()).unwrap();
        // (x + a)^2 = x^2 + 2ax + a^2
        assert_eq!(img[0], vec![0, 0, 1]);
        assert_eq!(img[1], vec![0, 2, 0]);
        assert_eq!(img[2], vec![1, 0, 0]);
    }

    #[test]
    fn group_action_is_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = pr(2);
        let ring = sample_ring(2, 1, p);
        let fiber = WeightModule::exterior_power(&WeightModule::standard(2, p), 1);
        let m = InducedModule::build(&fiber, 2, 1, p).unwrap();
        let space = ring.coeff().algebra().space().clone();
        for _ in 0..5 {
            let g = random_point(&ring, &mut rng);
            let h = random_point(&ring, &mut rng);
            let gh = m.group_operator(&h.compose(&g).unwrap()).unwrap();
            let og = m.group_operator(&g).unwrap();
            let oh = m.group_operator(&h).unwrap();
            let ad = space.len();
            let mut prod = vec![SparseOp::zero(p, m.dim(), m.dim()); ad];
            for u in 0..ad {
                for v in 0..ad {
                    if let Some(w) = space.product(u, v) {
                        prod[w] = prod[w].add(&og.components[u].compose(&oh.components[v]));
                    }
                }
            }
            assert_eq!(gh.components, prod);
        }
    }

    #[test]
    fn invariants_are_the_constant_slice() {
        for (n, r, p) in [(2, 1, 3), (1, 2, 2)] {
            let p = pr(p);
            let u = WeightModule::standard(n, p);
            let fibers = [WeightModule::trivial(n, p), u.clone(), WeightModule::exterior_power(&u, 2), WeightModule::sym_power(&u, 2)];
            for fiber in fibers {
                let m = InducedModule::build(&fiber, n, r, p).unwrap();
                let inv = m.g_minus_invariants(&Echelon::full(p, m.dim()));
                assert_eq!(inv, m.constant_slice());
                assert_eq!(inv.dim(), fiber.dim());
                assert_eq!(m.character_of(&inv).unwrap(), fiber.character());
                assert_eq!(m.g_minus_invariants(&Echelon::zero(p, m.dim())).dim(), 0);
            }
        }
    }

    #[test]
    fn stability_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = pr(3);
        let m = InducedModule::build(&WeightModule::standard(1, p), 1, 1, p).unwrap();
        let ring = sample_ring(1, 1, p);
        let samples: Vec<GroupPoint> = (0..5).map(|_| random_point(&ring, &mut rng)).collect();
        assert!(m.subspace_group_stable(&Echelon::full(p, m.dim()), &samples).unwrap());
        let a = ring.coeff().algebra().generator(0);
        let t = GroupPoint::translation(&ring, &[a]).unwrap();
        let mt = InducedModule::build(&WeightModule::trivial(1, p), 1, 1, p).unwrap();
        // the slice of constants is fixed by translations but not all of R is
        assert!(mt.subspace_group_stable(&mt.constant_slice(), std::slice::from_ref(&t)).unwrap());
        let lin = Echelon::span(p, 3, [mt.monomial_tensor(&[1], &[1]).unwrap()]);
        assert!(!mt.subspace_group_stable(&lin, &[t]).unwrap());
    }

    #[test]
    fn tensor_identity() {
        let p = pr(2);
        let u = WeightModule::standard(1, p);
        let ti = tensor_with_pullback(&u, &u, 1, 1, p).unwrap();
        assert_eq!(ti.twisted.dim(), 2);
        assert!(ti.lie_operators_agree());
        let triv = tensor_with_pullback(&u, &WeightModule::trivial(1, p), 1, 1, p).unwrap();
        assert!(triv.lie_operators_agree());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p3 = pr(3);
        let u2 = WeightModule::standard(2, p3);
        let ti = tensor_with_pullback(&u2, &u2, 2, 1, p3).unwrap();
        assert_eq!(ti.twisted.dim(), 9 * 4);
        assert!(ti.lie_operators_agree());
        let ring = sample_ring(2, 1, p3);
        for _ in 0..3 {
            assert!(ti.group_operators_agree(&random_point(&ring, &mut rng)).unwrap());
        }
        let ch_lhs = ti.twisted.character();
        let ch_rhs = ti.base.character().mul(&u2.character().adams(3));
        assert_eq!(ch_lhs, ch_rhs);
    }

    #[test]
    fn derivative_box_and_root_identities() {
        let p = pr(3);
        let fiber = WeightModule::sym_power(&WeightModule::standard(2, p), 2);
        let m = InducedModule::build(&fiber, 2, 2, p).unwrap();
        let v = fiber.lie(0, 0).dense_column(0);
        assert!(m.derivative_box_check(&[1, 2], &v).unwrap());
        assert!(m.derivative_box_check(&[3, 1], &v).unwrap());
        let (a, b) = m.root_operator_identities(&[3, 6], &v, 0, 0, 1).unwrap();
        assert_eq!((a, b), (Some(true), Some(true)));
        let (a, b) = m.root_operator_identities(&[1, 3], &v, 1, 1, 0).unwrap();
        assert_eq!((a, b), (None, Some(true)));
        let (_, b) = m.root_operator_identities(&[1, 2], &v, 1, 1, 0).unwrap();
        assert_eq!(b, None);
        let (a, _) = m.root_operator_identities(&[0, 4], &v, 0, 1, 0).unwrap();
        assert_eq!(a, Some(true));
    }

    #[test]
    fn scope_limit_is_enforced() {
        let p = pr(2);
        let big = WeightModule::standard(3, p);
        assert!(matches!(InducedModule::build(&big, 3, 6, p), Err(Error::Scope(_))));
    }
}
