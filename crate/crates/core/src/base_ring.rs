//! Truncated polynomial rings R(n,r)_A = A[x_1..x_n]/(x_i^{p^r}) over F_p and
//! over finite local test algebras A.
//!
//! Coefficients are stored densely. Monomials are indexed by their position
//! in the degree-lexicographic order (lower total degree first, then larger
//! leading exponents first); a mixed-radix code gives O(1) lookup from an
//! exponent vector to its position.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{domain, param, Error, Result};
use crate::fp::Prime;

/// Exponent vectors bounded per variable, enumerated in deglex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSpace {
    bounds: Vec<u32>,
    exps: Vec<Vec<u32>>,
    strides: Vec<usize>,
    code_to_pos: Vec<u32>,
    product: Option<Vec<u32>>,
}

const NO_PRODUCT: u32 = u32::MAX;
const PRODUCT_TABLE_LIMIT: usize = 1 << 22;

impl MonomialSpace {
    pub fn new(bounds: Vec<u32>) -> Self {
        assert!(bounds.iter().all(|&b| b >= 1));
        let mut strides = Vec::with_capacity(bounds.len());
        let mut total = 1usize;
        for &b in &bounds {
            strides.push(total);
            total = total.checked_mul(b as usize).expect("monomial space too large");
        }
        let mut exps: Vec<Vec<u32>> = (0..total)
            .map(|code| bounds.iter().zip(&strides).map(|(&b, &s)| ((code / s) % b as usize) as u32).collect())
            .collect();
        exps.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let mut code_to_pos = vec![0u32; total];
        for (pos, e) in exps.iter().enumerate() {
            let code: usize = e.iter().zip(&strides).map(|(&x, &s)| x as usize * s).sum();
            code_to_pos[code] = pos as u32;
        }
        let mut space = MonomialSpace { bounds, exps, strides, code_to_pos, product: None };
        if total * total <= PRODUCT_TABLE_LIMIT {
            let mut table = vec![NO_PRODUCT; total * total];
            for i in 0..total {
                for j in 0..total {
                    if let Some(k) = space.compute_product(i, j) {
                        table[i * total + j] = k as u32;
                    }
                }
            }
            space.product = Some(table);
        }
        space
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn exponents(&self, pos: usize) -> &[u32] {
        &self.exps[pos]
    }

    pub fn all_exponents(&self) -> &[Vec<u32>] {
        &self.exps
    }

    /// Position of an exponent vector, or None if some entry is out of bounds.
    pub fn position(&self, e: &[u32]) -> Option<usize> {
        assert_eq!(e.len(), self.bounds.len());
        let mut code = 0usize;
        for ((&x, &b), &s) in e.iter().zip(&self.bounds).zip(&self.strides) {
            if x >= b {
                return None;
            }
            code += x as usize * s;
        }
        Some(self.code_to_pos[code] as usize)
    }

    fn compute_product(&self, i: usize, j: usize) -> Option<usize> {
        let mut code = 0usize;
        for (((&a, &b), &bd), &s) in self.exps[i].iter().zip(&self.exps[j]).zip(&self.bounds).zip(&self.strides) {
            let e = a + b;
            if e >= bd {
                return None;
            }
            code += e as usize * s;
        }
        Some(self.code_to_pos[code] as usize)
    }

    /// Position of the product monomial, None when it is truncated away.
    #[inline]
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        match &self.product {
            Some(t) => {
                let k = t[i * self.len() + j];
                (k != NO_PRODUCT).then_some(k as usize)
            }
            None => self.compute_product(i, j),
        }
    }
}

/// F_p[v_1..v_k]/(v_j^{b_j}) with dense elements indexed by monomial position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    p: Prime,
    space: MonomialSpace,
}

impl Algebra {
    pub fn new(p: Prime, bounds: Vec<u32>) -> Self {
        Algebra { p, space: MonomialSpace::new(bounds) }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn space(&self) -> &MonomialSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.dim()]
    }

    pub fn one(&self) -> Vec<u32> {
        self.constant(1)
    }

    pub fn constant(&self, c: u32) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = c % self.p.get();
        v
    }

    /// The generator v_j (zero if its bound is 1).
    pub fn generator(&self, j: usize) -> Vec<u32> {
        let mut e = vec![0; self.space.nvars()];
        e[j] = 1;
        let mut v = self.zero();
        if let Some(pos) = self.space.position(&e) {
            v[pos] = 1;
        }
        v
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.p.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.p.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.p.neg(x)).collect()
    }

    pub fn scale(&self, a: &[u32], c: u32) -> Vec<u32> {
        a.iter().map(|&x| self.p.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let m = self.p.get() as u64;
        let mut acc = vec![0u64; self.dim()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                if let Some(k) = self.space.product(i, j) {
                    acc[k] = (acc[k] + x as u64 * y as u64) % m;
                }
            }
        }
        acc.into_iter().map(|x| x as u32).collect()
    }

    pub fn pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn is_zero(&self, a: &[u32]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Units are exactly the elements with nonzero constant term.
    pub fn is_unit(&self, a: &[u32]) -> bool {
        a[0] != 0
    }

    pub fn inv(&self, a: &[u32]) -> Option<Vec<u32>> {
        if !self.is_unit(a) {
            return None;
        }
        // a = c(1 - z) with z nilpotent; a^{-1} = c^{-1}(1 + z + z^2 + ...)
        let c_inv = self.p.inv(a[0]);
        let z = self.sub(&self.one(), &self.scale(a, c_inv));
        let mut term = self.one();
        let mut acc = self.one();
        loop {
            term = self.mul(&term, &z);
            if self.is_zero(&term) {
                break;
            }
            acc = self.add(&acc, &term);
        }
        Some(self.scale(&acc, c_inv))
    }

    /// Smallest e with a^e = 0, if a is nilpotent.
    pub fn nilpotency_order(&self, a: &[u32]) -> Option<u64> {
        if a[0] != 0 {
            return None;
        }
        let mut e = 1;
        let mut x = a.to_vec();
        while !self.is_zero(&x) {
            x = self.mul(&x, a);
            e += 1;
        }
        Some(e)
    }

    /// Absolute Frobenius a -> a^p.
    pub fn frobenius(&self, a: &[u32]) -> Vec<u32> {
        self.pow(a, self.p.get() as u64)
    }
}

/// Which finite local F_p-algebra a coefficient ring is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    PrimeField,
    /// F_p[a_1..a_m]/(a_j^{p^s})
    Truncated { generators: usize, order: u32 },
    /// F_p[eps]/(eps^2)
    DualNumbers,
}

/// A finite local F_p-algebra with designated nilpotent generators; the
/// coefficient ring for group points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestAlgebra {
    kind: AlgebraKind,
    alg: Algebra,
}

impl TestAlgebra {
    pub fn prime_field(p: Prime) -> Self {
        TestAlgebra { kind: AlgebraKind::PrimeField, alg: Algebra::new(p, vec![]) }
    }

    /// F_p[a_1..a_m]/(a_j^{p^s}), of dimension p^{sm}.
    pub fn truncated(p: Prime, generators: usize, order: u32) -> Result<Self> {
        if order == 0 {
            return param("test algebra truncation order must be >= 1");
        }
        let b = p.pow(order);
        let alg = Algebra::new(p, vec![b; generators]);
        if alg.dim() > 1 << 14 {
            return Err(Error::Scope(format!("test algebra of dimension {} is too large", alg.dim())));
        }
        Ok(TestAlgebra { kind: AlgebraKind::Truncated { generators, order }, alg })
    }

    pub fn dual_numbers(p: Prime) -> Self {
        TestAlgebra { kind: AlgebraKind::DualNumbers, alg: Algebra::new(p, vec![2]) }
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn prime(&self) -> Prime {
        self.alg.p
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn generators(&self) -> usize {
        self.alg.space.nvars()
    }

    pub fn is_prime_field(&self) -> bool {
        self.kind == AlgebraKind::PrimeField
    }

    pub fn to_json(&self) -> Value {
        match self.kind {
            AlgebraKind::PrimeField => json!({"kind": "prime_field", "p": self.prime().get()}),
            AlgebraKind::Truncated { generators, order } => {
                json!({"kind": "truncated", "p": self.prime().get(), "generators": generators, "order": order})
            }
            AlgebraKind::DualNumbers => json!({"kind": "dual_numbers", "p": self.prime().get()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let p = Prime::new(json_u32(v, "p")?)?;
        match v.get("kind").and_then(Value::as_str) {
            Some("prime_field") => Ok(Self::prime_field(p)),
            Some("dual_numbers") => Ok(Self::dual_numbers(p)),
            Some("truncated") => Self::truncated(p, json_u32(v, "generators")? as usize, json_u32(v, "order")?),
            _ => param("unknown algebra kind"),
        }
    }

    pub fn elem_to_json(&self, c: &[u32]) -> Value {
        if self.is_prime_field() {
            return json!(c[0]);
        }
        let terms: Vec<Value> = c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| json!({"exp": self.alg.space.exponents(i), "coeff": x}))
            .collect();
        json!({ "terms": terms })
    }

    pub fn elem_from_json(&self, v: &Value) -> Result<Vec<u32>> {
        let p = self.prime();
        if self.is_prime_field() {
            let c = v.as_i64().ok_or_else(|| Error::Parameter("coefficient must be an integer".into()))?;
            return Ok(vec![p.reduce(c as i128)]);
        }
        let mut out = self.alg.zero();
        for t in json_array(v, "terms")? {
            let exp = json_exps(t)?;
            let pos = self.alg.space.position(&exp).ok_or_else(|| Error::Parameter("algebra exponent out of range".into()))?;
            let c = t.get("coeff").and_then(Value::as_i64).ok_or_else(|| Error::Parameter("missing coeff".into()))?;
            out[pos] = p.add(out[pos], p.reduce(c as i128));
        }
        Ok(out)
    }
}

pub(crate) fn json_u32(v: &Value, key: &str) -> Result<u32> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as u32)
        .ok_or_else(|| Error::Parameter(format!("missing or invalid field {key:?}")))
}

pub(crate) fn json_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parameter(format!("missing array {key:?}")))
}

fn json_exps(t: &Value) -> Result<Vec<u32>> {
    t.get("exp")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parameter("missing exp".into()))?
        .iter()
        .map(|x| x.as_u64().map(|y| y as u32).ok_or_else(|| Error::Parameter("bad exponent".into())))
        .collect()
}

/// The ring R(n,r)_A.
#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    n: usize,
    r: u32,
    p: Prime,
    coeff: TestAlgebra,
    space: MonomialSpace,
}

impl PolyRing {
    pub fn new(n: usize, r: u32, p: Prime, coeff: TestAlgebra) -> Result<Arc<Self>> {
        if n == 0 || r == 0 {
            return param("R(n,r) needs n >= 1 and r >= 1");
        }
        if coeff.prime() != p {
            return param("coefficient algebra has a different characteristic");
        }
        let b = p.pow(r) as usize;
        let dim = b.checked_pow(n as u32).filter(|&d| d <= 1 << 16);
        if dim.is_none() {
            return Err(Error::Scope(format!("R({n},{r}) over F_{} is too large", p.get())));
        }
        Ok(Arc::new(PolyRing { n, r, p, coeff, space: MonomialSpace::new(vec![b as u32; n]) }))
    }

    pub fn over_prime_field(n: usize, r: u32, p: Prime) -> Result<Arc<Self>> {
        Self::new(n, r, p, TestAlgebra::prime_field(p))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// p^r, the truncation exponent.
    pub fn bound(&self) -> u32 {
        self.p.pow(self.r)
    }

    pub fn coeff(&self) -> &TestAlgebra {
        &self.coeff
    }

    pub fn monomials(&self) -> &MonomialSpace {
        &self.space
    }

    /// Number of monomials, p^{rn}.
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    fn same_params(&self, other: &PolyRing) -> bool {
        self.n == other.n && self.r == other.r && self.p == other.p && self.coeff == other.coeff
    }

    pub fn zero(self: &Arc<Self>) -> TruncatedPolynomial {
        TruncatedPolynomial { ring: Arc::clone(self), data: vec![0; self.dim() * self.coeff.dim()] }
    }

    pub fn one(self: &Arc<Self>) -> TruncatedPolynomial {
        self.constant(&self.coeff.alg.one())
    }

    pub fn constant(self: &Arc<Self>, c: &[u32]) -> TruncatedPolynomial {
        let mut f = self.zero();
        f.data[..c.len()].copy_from_slice(c);
        f
    }

    pub fn variable(self: &Arc<Self>, i: usize) -> TruncatedPolynomial {
        let mut e = vec![0; self.n];
        e[i] = 1;
        self.monomial(&e, &self.coeff.alg.one())
    }

    /// c * x^e; zero if e is out of range.
    pub fn monomial(self: &Arc<Self>, e: &[u32], c: &[u32]) -> TruncatedPolynomial {
        let mut f = self.zero();
        if let Some(pos) = self.space.position(e) {
            f.coeff_mut(pos).copy_from_slice(c);
        }
        f
    }

    pub fn from_terms(self: &Arc<Self>, terms: &[(Vec<u32>, u32)]) -> TruncatedPolynomial {
        let mut f = self.zero();
        for (e, c) in terms {
            if let Some(pos) = self.space.position(e) {
                let slot = &mut f.coeff_mut(pos)[0];
                *slot = self.p.add(*slot, c % self.p.get());
            }
        }
        f
    }

    /// Same (n, r, p) with a different coefficient algebra.
    pub fn with_coeff(&self, coeff: TestAlgebra) -> Result<Arc<PolyRing>> {
        PolyRing::new(self.n, self.r, self.p, coeff)
    }
}

/// An element of R(n,r)_A, stored as data[monomial * dim A + algebra basis].
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedPolynomial {
    ring: Arc<PolyRing>,
    data: Vec<u32>,
}

impl fmt::Debug for TruncatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl TruncatedPolynomial {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn raw(&self) -> &[u32] {
        &self.data
    }

    pub fn from_raw(ring: &Arc<PolyRing>, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), ring.dim() * ring.coeff.dim());
        TruncatedPolynomial { ring: Arc::clone(ring), data }
    }

    fn adim(&self) -> usize {
        self.ring.coeff.dim()
    }

    /// Coefficient (an element of A) of the monomial at `pos`.
    pub fn coeff(&self, pos: usize) -> &[u32] {
        let a = self.adim();
        &self.data[pos * a..(pos + 1) * a]
    }

    fn coeff_mut(&mut self, pos: usize) -> &mut [u32] {
        let a = self.adim();
        &mut self.data[pos * a..(pos + 1) * a]
    }

    pub fn coeff_of(&self, e: &[u32]) -> Vec<u32> {
        match self.ring.space.position(e) {
            Some(pos) => self.coeff(pos).to_vec(),
            None => self.ring.coeff.alg.zero(),
        }
    }

    pub fn constant_term(&self) -> &[u32] {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.same_params(&other.ring) {
            Ok(())
        } else {
            param("polynomials live in different rings")
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.ring.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| p.add(a, b)).collect();
        Ok(TruncatedPolynomial { ring: Arc::clone(&self.ring), data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.ring.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| p.sub(a, b)).collect();
        Ok(TruncatedPolynomial { ring: Arc::clone(&self.ring), data })
    }

    pub fn neg(&self) -> Self {
        let p = self.ring.p;
        TruncatedPolynomial { ring: Arc::clone(&self.ring), data: self.data.iter().map(|&a| p.neg(a)).collect() }
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.ring.p;
        TruncatedPolynomial { ring: Arc::clone(&self.ring), data: self.data.iter().map(|&a| p.mul(a, c)).collect() }
    }

    /// Multiplies every coefficient by the algebra element `c`.
    pub fn scale_by(&self, c: &[u32]) -> Self {
        let alg = &self.ring.coeff.alg;
        let mut out = self.ring.zero();
        for pos in 0..self.ring.dim() {
            let x = self.coeff(pos);
            if !alg.is_zero(x) {
                out.coeff_mut(pos).copy_from_slice(&alg.mul(x, c));
            }
        }
        out
    }

    /// Product with truncation: monomials with an exponent >= p^r vanish.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let ring = &self.ring;
        let a = ring.coeff.dim();
        let m = ring.p.get() as u64;
        let mut acc = vec![0u64; self.data.len()];
        let nz_self: Vec<usize> = (0..ring.dim()).filter(|&i| self.coeff(i).iter().any(|&x| x != 0)).collect();
        let nz_other: Vec<usize> = (0..ring.dim()).filter(|&j| other.coeff(j).iter().any(|&x| x != 0)).collect();
        let aspace = ring.coeff.alg.space();
        for &i in &nz_self {
            for &j in &nz_other {
                let Some(k) = ring.space.product(i, j) else { continue };
                let (ci, cj) = (self.coeff(i), other.coeff(j));
                for (u, &x) in ci.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (v, &y) in cj.iter().enumerate() {
                        if y == 0 {
                            continue;
                        }
                        if let Some(w) = aspace.product(u, v) {
                            let slot = &mut acc[k * a + w];
                            *slot = (*slot + x as u64 * y as u64) % m;
                        }
                    }
                }
            }
        }
        TruncatedPolynomial { ring: Arc::clone(ring), data: acc.into_iter().map(|x| x as u32).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Formal partial derivative in x_i (0-based axis).
    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        self.divided_power(i, 1)
    }

    /// The divided-power operator x^a -> binom(a_i, m) x^{a - m e_i}.
    pub fn divided_power(&self, i: usize, m: u32) -> Result<Self> {
        let ring = &self.ring;
        if i >= ring.n {
            return param(format!("axis {i} out of range for n = {}", ring.n));
        }
        if m == 0 || m >= ring.bound() {
            return param(format!("divided power order {m} outside 1..{}", ring.bound() - 1));
        }
        let p = ring.p;
        let mut out = ring.zero();
        for pos in 0..ring.dim() {
            let e = ring.space.exponents(pos);
            if e[i] < m {
                continue;
            }
            let b = p.binom(e[i] as u64, m as u64);
            if b == 0 {
                continue;
            }
            let mut f = e.to_vec();
            f[i] -= m;
            let target = ring.space.position(&f).expect("lowered exponent stays in range");
            let src = self.coeff(pos).to_vec();
            for (slot, x) in out.coeff_mut(target).iter_mut().zip(src) {
                *slot = p.add(*slot, p.mul(x, b));
            }
        }
        Ok(out)
    }

    /// Re-expresses an F_p-polynomial over the coefficient ring of `target`.
    pub fn lift_to(&self, target: &Arc<PolyRing>) -> Result<Self> {
        if self.ring.same_params(target) {
            return Ok(TruncatedPolynomial { ring: Arc::clone(target), data: self.data.clone() });
        }
        if !self.ring.coeff.is_prime_field() || self.ring.n != target.n || self.ring.r != target.r || self.ring.p != target.p {
            return param("can only lift F_p-polynomials into a ring with the same (n, r, p)");
        }
        let mut out = target.zero();
        for pos in 0..self.ring.dim() {
            out.coeff_mut(pos)[0] = self.data[pos];
        }
        Ok(out)
    }

    /// The algebra morphism x_k -> images[k] applied to self.
    ///
    /// Each image must have a constant term c with c^{p^r} = 0. `self` may
    /// have F_p coefficients while the images carry algebra coefficients.
    pub fn substitute(&self, images: &[TruncatedPolynomial]) -> Result<Self> {
        let ring = &self.ring;
        if images.len() != ring.n {
            return param(format!("expected {} images, got {}", ring.n, images.len()));
        }
        let target = Arc::clone(&images[0].ring);
        for g in images {
            g.check_same(&images[0])?;
        }
        if target.n != ring.n || target.r != ring.r || target.p != ring.p {
            return param("images live in a ring with different (n, r, p)");
        }
        let alg = &target.coeff.alg;
        for (k, g) in images.iter().enumerate() {
            let c = g.constant_term();
            if !alg.is_zero(&alg.pow(c, ring.bound() as u64)) {
                return domain(format!("image of x_{} has a constant term c with c^(p^r) != 0", k + 1));
            }
        }
        let src = self.lift_to(&target)?;
        let b = ring.bound() as usize;
        let powers: Vec<Vec<TruncatedPolynomial>> = images
            .iter()
            .map(|g| {
                let mut v = vec![target.one()];
                for _ in 1..b {
                    let next = v.last().unwrap().mul_unchecked(g);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = target.zero();
        let p = ring.p;
        for pos in 0..ring.dim() {
            let c = src.coeff(pos);
            if alg.is_zero(c) {
                continue;
            }
            let e = ring.space.exponents(pos);
            let mut term = target.constant(c);
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    term = term.mul_unchecked(&powers[k][ek as usize]);
                }
            }
            for (o, t) in out.data.iter_mut().zip(&term.data) {
                *o = p.add(*o, *t);
            }
        }
        Ok(out)
    }

    /// Image in R(n,s)_A: monomials with an exponent >= p^s are dropped.
    pub fn truncate_to(&self, s: u32) -> Result<Self> {
        let ring = &self.ring;
        if s == 0 || s > ring.r {
            return param(format!("truncation level {s} outside 1..={}", ring.r));
        }
        let target = PolyRing::new(ring.n, s, ring.p, ring.coeff.clone())?;
        let mut out = target.zero();
        for pos in 0..ring.dim() {
            if let Some(tp) = target.space.position(ring.space.exponents(pos)) {
                out.coeff_mut(tp).copy_from_slice(self.coeff(pos));
            }
        }
        Ok(out)
    }

    /// Applies a map to every algebra coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&[u32]) -> Vec<u32>) -> Self {
        let mut out = self.ring.zero();
        for pos in 0..self.ring.dim() {
            let c = f(self.coeff(pos));
            out.coeff_mut(pos).copy_from_slice(&c);
        }
        out
    }

    /// Inverse in R(n,r)_A; exists iff the constant term is a unit of A.
    pub fn inverse(&self) -> Option<Self> {
        let alg = &self.ring.coeff.alg;
        let c_inv = alg.inv(self.constant_term())?;
        let one = self.ring.one();
        let z = one.sub(&self.scale_by(&c_inv)).expect("same ring");
        let mut term = one.clone();
        let mut acc = one;
        loop {
            term = term.mul_unchecked(&z);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term).expect("same ring");
        }
        Some(acc.scale_by(&c_inv))
    }

    /// Total-degree of the lowest nonzero homogeneous part, None for zero.
    pub fn order(&self) -> Option<u32> {
        (0..self.ring.dim())
            .find(|&pos| self.coeff(pos).iter().any(|&x| x != 0))
            .map(|pos| self.ring.space.exponents(pos).iter().sum())
    }

    /// Serialized as {"n","r","p","terms":[{"exp":[..],"coeff":..}]} in deglex order.
    pub fn to_json(&self) -> Value {
        let ring = &self.ring;
        let terms: Vec<Value> = (0..ring.dim())
            .filter(|&pos| self.coeff(pos).iter().any(|&x| x != 0))
            .map(|pos| json!({"exp": ring.space.exponents(pos), "coeff": ring.coeff.elem_to_json(self.coeff(pos))}))
            .collect();
        let mut v = json!({"n": ring.n, "r": ring.r, "p": ring.p.get(), "terms": terms});
        if !ring.coeff.is_prime_field() {
            v["algebra"] = ring.coeff.to_json();
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = json_u32(v, "n")? as usize;
        let r = json_u32(v, "r")?;
        let p = Prime::new(json_u32(v, "p")?)?;
        let coeff = match v.get("algebra") {
            Some(a) => TestAlgebra::from_json(a)?,
            None => TestAlgebra::prime_field(p),
        };
        let ring = PolyRing::new(n, r, p, coeff)?;
        let mut f = ring.zero();
        for t in json_array(v, "terms")? {
            let exp = json_exps(t)?;
            let pos = ring.space.position(&exp).ok_or_else(|| Error::Parameter("exponent out of range".into()))?;
            let c = ring.coeff.elem_from_json(t.get("coeff").unwrap_or(&Value::Null))?;
            let p = ring.p;
            for (slot, x) in f.coeff_mut(pos).iter_mut().zip(c) {
                *slot = p.add(*slot, x);
            }
        }
        Ok(f)
    }
}

/// The operations a coefficient ring must offer for functorial group actions.
pub trait CommRing {
    type Elem: Clone + PartialEq + fmt::Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_int(&self, c: i128) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn prime(&self) -> Prime;
    /// Multiplicative inverse; None for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

impl CommRing for TestAlgebra {
    type Elem = Vec<u32>;
    fn zero(&self) -> Vec<u32> {
        self.alg.zero()
    }
    fn one(&self) -> Vec<u32> {
        self.alg.one()
    }
    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        self.alg.add(a, b)
    }
    fn sub(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        self.alg.sub(a, b)
    }
    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        self.alg.mul(a, b)
    }
    fn from_int(&self, c: i128) -> Vec<u32> {
        self.alg.constant(self.prime().reduce(c))
    }
    fn is_zero(&self, a: &Vec<u32>) -> bool {
        self.alg.is_zero(a)
    }
    fn prime(&self) -> Prime {
        self.alg.p
    }
    fn inv(&self, a: &Vec<u32>) -> Option<Vec<u32>> {
        self.alg.inv(a)
    }
    fn pow(&self, a: &Vec<u32>, e: u64) -> Vec<u32> {
        self.alg.pow(a, e)
    }
}

/// R(n,r)_A as a coefficient ring (used for Jacobian matrices of functions).
impl CommRing for Arc<PolyRing> {
    type Elem = TruncatedPolynomial;
    fn zero(&self) -> TruncatedPolynomial {
        PolyRing::zero(self)
    }
    fn one(&self) -> TruncatedPolynomial {
        PolyRing::one(self)
    }
    fn add(&self, a: &TruncatedPolynomial, b: &TruncatedPolynomial) -> TruncatedPolynomial {
        a.add(b).expect("same ring")
    }
    fn sub(&self, a: &TruncatedPolynomial, b: &TruncatedPolynomial) -> TruncatedPolynomial {
        a.sub(b).expect("same ring")
    }
    fn mul(&self, a: &TruncatedPolynomial, b: &TruncatedPolynomial) -> TruncatedPolynomial {
        a.mul_unchecked(b)
    }
    fn from_int(&self, c: i128) -> TruncatedPolynomial {
        self.constant(&self.coeff.alg.constant(self.p.reduce(c)))
    }
    fn is_zero(&self, a: &TruncatedPolynomial) -> bool {
        a.is_zero()
    }
    fn prime(&self) -> Prime {
        self.p
    }
    fn inv(&self, a: &TruncatedPolynomial) -> Option<TruncatedPolynomial> {
        a.inverse()
    }
    fn pow(&self, a: &TruncatedPolynomial, e: u64) -> TruncatedPolynomial {
        a.pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(n: usize, r: u32, p: u32) -> Arc<PolyRing> {
        PolyRing::over_prime_field(n, r, Prime::new(p).unwrap()).unwrap()
    }

    #[test]
    fn deglex_order() {
        let s = MonomialSpace::new(vec![2, 2]);
        assert_eq!(s.all_exponents(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        for (pos, e) in s.all_exponents().iter().enumerate() {
            assert_eq!(s.position(e), Some(pos));
        }
    }

    #[test]
    fn truncation_kills_x_squared_in_char_two() {
        let r = ring(1, 1, 2);
        let x = r.variable(0);
        assert!(x.mul(&x).unwrap().is_zero());
        let one_plus_x = r.one().add(&x).unwrap();
        assert_eq!(one_plus_x.mul(&one_plus_x).unwrap(), r.one());
    }

    #[test]
    fn derivative_examples() {
        let r = ring(1, 1, 3);
        let x2 = r.from_terms(&[(vec![2], 1)]);
        assert_eq!(x2.partial_derivative(0).unwrap(), r.from_terms(&[(vec![1], 2)]));
        assert!(r.one().partial_derivative(0).unwrap().is_zero());
        let r2 = ring(2, 1, 3);
        let f = r2.from_terms(&[(vec![2, 1], 1)]);
        assert_eq!(f.partial_derivative(0).unwrap(), r2.from_terms(&[(vec![1, 1], 2)]));
    }

    #[test]
    fn divided_power_examples() {
        let r = ring(1, 2, 2);
        let x2 = r.from_terms(&[(vec![2], 1)]);
        assert_eq!(x2.divided_power(0, 2).unwrap(), r.one());
        let x3 = r.from_terms(&[(vec![3], 1)]);
        assert_eq!(x3.divided_power(0, 2).unwrap(), r.variable(0));
        assert!(r.one().divided_power(0, 3).unwrap().is_zero());
        assert!(r.one().divided_power(0, 4).is_err());
        assert!(r.one().divided_power(0, 0).is_err());
    }

    #[test]
    fn substitution_examples() {
        let r = ring(1, 2, 2);
        let x2 = r.from_terms(&[(vec![2], 1)]);
        let g = r.from_terms(&[(vec![1], 1), (vec![2], 1)]);
        assert_eq!(x2.substitute(&[g]).unwrap(), x2);
        assert_eq!(x2.substitute(&[r.variable(0)]).unwrap(), x2);
        let r2 = ring(2, 1, 3);
        let f = r2.from_terms(&[(vec![1, 1], 1)]);
        assert_eq!(f.substitute(&[r2.variable(1), r2.variable(0)]).unwrap(), f);
    }

    #[test]
    fn substitution_rejects_non_nilpotent_constant() {
        let p = Prime::new(2).unwrap();
        let a = TestAlgebra::truncated(p, 1, 2).unwrap(); // a^4 = 0
        let ra = PolyRing::new(1, 1, p, a.clone()).unwrap(); // needs c^2 = 0
        let f = ra.variable(0);
        let bad = ra.variable(0).add(&ra.constant(&a.algebra().generator(0))).unwrap();
        assert!(matches!(f.substitute(&[bad]), Err(Error::Domain(_))));
        let unit = ra.variable(0).add(&ra.one()).unwrap();
        assert!(f.substitute(&[unit]).is_err());
    }

    #[test]
    fn truncate_examples() {
        let r = ring(1, 2, 2);
        let f = r.from_terms(&[(vec![1], 1), (vec![2], 1)]);
        let t = f.truncate_to(1).unwrap();
        assert_eq!(t, ring(1, 1, 2).variable(0));
        let c = r.from_terms(&[(vec![0], 1)]);
        assert_eq!(c.truncate_to(1).unwrap(), ring(1, 1, 2).one());
        let r3 = ring(2, 2, 3);
        let g = r3.from_terms(&[(vec![2, 1], 1)]);
        assert_eq!(g.truncate_to(1).unwrap(), ring(2, 1, 3).from_terms(&[(vec![2, 1], 1)]));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = ring(1, 1, 2);
        let b = ring(1, 2, 2);
        assert!(matches!(a.one().mul(&b.one()), Err(Error::Parameter(_))));
    }

    #[test]
    fn unit_inverse_in_test_algebra() {
        let p = Prime::new(3).unwrap();
        let a = TestAlgebra::truncated(p, 1, 2).unwrap();
        let alg = a.algebra();
        let u = alg.add(&alg.constant(2), &alg.generator(0));
        let ui = alg.inv(&u).unwrap();
        assert_eq!(alg.mul(&u, &ui), alg.one());
        assert!(alg.inv(&alg.generator(0)).is_none());
        assert_eq!(alg.nilpotency_order(&alg.generator(0)), Some(9));
    }

    #[test]
    fn json_round_trip() {
        let p = Prime::new(3).unwrap();
        let a = TestAlgebra::truncated(p, 1, 1).unwrap();
        let ra = PolyRing::new(2, 1, p, a.clone()).unwrap();
        let f = ra.variable(1).add(&ra.constant(&a.algebra().generator(0))).unwrap();
        let back = TruncatedPolynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    fn naive_product(f: &TruncatedPolynomial, g: &TruncatedPolynomial) -> TruncatedPolynomial {
        // untruncated convolution on exponent vectors, then reduction
        let ring = f.ring();
        let p = ring.prime();
        let mut acc: std::collections::BTreeMap<Vec<u32>, u32> = Default::default();
        for (i, ei) in ring.monomials().all_exponents().iter().enumerate() {
            for (j, ej) in ring.monomials().all_exponents().iter().enumerate() {
                let e: Vec<u32> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
                let c = p.mul(f.coeff(i)[0], g.coeff(j)[0]);
                let s = acc.entry(e).or_insert(0);
                *s = p.add(*s, c);
            }
        }
        let terms: Vec<(Vec<u32>, u32)> = acc.into_iter().filter(|(e, _)| e.iter().all(|&x| x < ring.bound())).collect();
        ring.from_terms(&terms)
    }

    fn poly_strategy(n: usize, r: u32, p: u32) -> impl Strategy<Value = TruncatedPolynomial> {
        let rg = ring(n, r, p);
        let d = rg.dim();
        proptest::collection::vec(0..p, d).prop_map(move |c| TruncatedPolynomial::from_raw(&rg, c))
    }

    proptest! {
        #[test]
        fn product_matches_naive_convolution(f in poly_strategy(2, 1, 3), g in poly_strategy(2, 1, 3)) {
            prop_assert_eq!(f.mul(&g).unwrap(), naive_product(&f, &g));
        }

        #[test]
        fn ring_axioms(f in poly_strategy(2, 1, 3), g in poly_strategy(2, 1, 3), h in poly_strategy(2, 1, 3)) {
            prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
            prop_assert_eq!(f.mul(&g.add(&h).unwrap()).unwrap(), f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap());
        }

        #[test]
        fn leibniz(f in poly_strategy(2, 2, 2), g in poly_strategy(2, 2, 2), i in 0usize..2) {
            let lhs = f.mul(&g).unwrap().partial_derivative(i).unwrap();
            let rhs = f.partial_derivative(i).unwrap().mul(&g).unwrap()
                .add(&f.mul(&g.partial_derivative(i).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn divided_power_composition(f in poly_strategy(1, 2, 3), a in 1u32..9, b in 1u32..9) {
            let p = Prime::new(3).unwrap();
            let lhs = f.divided_power(0, b).unwrap().divided_power(0, a).unwrap();
            let rhs = if a + b < 9 {
                f.divided_power(0, a + b).unwrap().scale(p.binom((a + b) as u64, a as u64))
            } else {
                f.ring().zero()
            };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn substitution_is_multiplicative(f in poly_strategy(2, 1, 3), g in poly_strategy(2, 1, 3),
                                          h0 in poly_strategy(2, 1, 3), h1 in poly_strategy(2, 1, 3)) {
            // images need nilpotent constant terms; over F_p that means zero
            let kill_const = |h: TruncatedPolynomial| h.sub(&h.ring().constant(h.constant_term())).unwrap();
            let imgs = [kill_const(h0), kill_const(h1)];
            let lhs = f.mul(&g).unwrap().substitute(&imgs).unwrap();
            let rhs = f.substitute(&imgs).unwrap().mul(&g.substitute(&imgs).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn truncation_is_a_morphism(f in poly_strategy(1, 2, 2), g in poly_strategy(1, 2, 2)) {
            let lhs = f.mul(&g).unwrap().truncate_to(1).unwrap();
            let rhs = f.truncate_to(1).unwrap().mul(&g.truncate_to(1).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(f.add(&g).unwrap().truncate_to(1).unwrap(),
                            f.truncate_to(1).unwrap().add(&g.truncate_to(1).unwrap()).unwrap());
        }
    }
}
