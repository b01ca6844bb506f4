//! Laurent polynomials Z[t_1^{±1}..t_n^{±1}] as characters, the Adams
//! operation, the classes delta and U_r, and the pair ring
//! (b, a)·(b', a') = (ψ^p(a)b' + ψ^p(a')b + U_r bb', aa') with its image map
//! (b, a) -> U_r b + ψ^p(a) and kernel (δψ^p(a), -(ψ^p)^{r-1}(δ)a).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::base_ring::json_array;
use crate::error::{param, Error, Result};
use crate::fp::Prime;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Vec<i32>, i128>,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*t^{e:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(vec![0; n], 1)
    }

    pub fn constant(n: usize, c: i128) -> Self {
        Self::monomial(vec![0; n], c)
    }

    pub fn monomial(exp: Vec<i32>, c: i128) -> Self {
        let n = exp.len();
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exp, c);
        }
        LaurentPoly { n, terms }
    }

    /// t_i (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<i32>, i128)>) -> Self {
        let mut out = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n);
            out.add_term(e, c);
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &i128)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i32]) -> i128 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<i32>, c: i128) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, c: i128) -> Self {
        if c == 0 {
            return Self::zero(self.n);
        }
        LaurentPoly { n: self.n, terms: self.terms.iter().map(|(e, &x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut acc: BTreeMap<Vec<i32>, i128> = BTreeMap::new();
        for (e, &c) in &self.terms {
            for (f, &d) in &other.terms {
                let s: Vec<i32> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                *acc.entry(s).or_insert(0) += c * d;
            }
        }
        acc.retain(|_, c| *c != 0);
        LaurentPoly { n: self.n, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.n), |acc, _| acc.mul(self))
    }

    /// ψ^k: every exponent multiplied by k.
    pub fn adams(&self, k: u32) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, &c)| (e.iter().map(|x| x * k as i32).collect(), c)).collect(),
        }
    }

    pub fn adams_iter(&self, k: u32, times: u32) -> Self {
        (0..times).fold(self.clone(), |acc, _| acc.adams(k))
    }

    /// Inverse of ψ^k, if every exponent is divisible by k.
    pub fn adams_preimage(&self, k: u32) -> Option<Self> {
        let k = k as i32;
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            if e.iter().any(|x| x.rem_euclid(k) != 0) {
                return None;
            }
            terms.insert(e.iter().map(|x| x / k).collect(), c);
        }
        Some(LaurentPoly { n: self.n, terms })
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, &c)| ((0..self.n).map(|i| e[perm[i]]).collect(), c)).collect(),
        }
    }

    /// Invariance under the adjacent transpositions, hence under S_n.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(i, i + 1);
            self.permute(&perm) == *self
        })
    }

    /// Total degree of a term: sum of exponents.
    fn degree(e: &[i32]) -> i64 {
        e.iter().map(|&x| x as i64).sum()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| Self::degree(e)).min()
    }

    pub fn degree_part(&self, d: i64) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().filter(|(e, _)| Self::degree(e) == d).map(|(e, &c)| (e.clone(), c)).collect(),
        }
    }

    /// The homogeneous part of minimal total degree.
    pub fn lowest_part(&self) -> Self {
        match self.min_degree() {
            Some(d) => self.degree_part(d),
            None => self.clone(),
        }
    }

    /// Sum of coefficients (dimension, for a character).
    pub fn evaluate_at_one(&self) -> i128 {
        self.terms.values().sum()
    }

    /// Exact quotient by (t_i - 1), or None if it does not divide.
    pub fn div_by_t_minus_one(&self, i: usize) -> Option<Self> {
        let mut groups: BTreeMap<Vec<i32>, BTreeMap<i32, i128>> = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut rest = e.clone();
            let ei = rest[i];
            rest[i] = 0;
            groups.entry(rest).or_default().insert(ei, c);
        }
        let mut out = Self::zero(self.n);
        for (rest, uni) in groups {
            let lo = *uni.keys().next().unwrap();
            let hi = *uni.keys().next_back().unwrap();
            // f_e = q_{e-1} - q_e, solved downward from the top exponent
            let mut q = 0i128;
            for e in (lo + 1..=hi).rev() {
                q += uni.get(&e).copied().unwrap_or(0);
                let mut ex = rest.clone();
                ex[i] = e - 1;
                out.add_term(ex, q);
            }
            if uni.get(&lo).copied().unwrap_or(0) != -q {
                return None;
            }
        }
        Some(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(e, &c)| json!({"exp": e, "coeff": c as i64})).collect();
        json!({ "terms": terms })
    }

    pub fn from_json(n: usize, v: &Value) -> Result<Self> {
        let mut out = Self::zero(n);
        for t in json_array(v, "terms")? {
            let exp: Vec<i32> = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parameter("missing exp".into()))?
                .iter()
                .map(|x| x.as_i64().map(|y| y as i32).ok_or_else(|| Error::Parameter("bad exponent".into())))
                .collect::<Result<_>>()?;
            if exp.len() != n {
                return param(format!("exponent vector of length {} in a ring with n = {n}", exp.len()));
            }
            let c = t.get("coeff").and_then(Value::as_i64).ok_or_else(|| Error::Parameter("missing coeff".into()))?;
            out.add_term(exp, c as i128);
        }
        Ok(out)
    }
}

/// Distinct permutations of an exponent vector (the S_n-orbit).
pub fn orbit(e: &[i32]) -> Vec<Vec<i32>> {
    let mut v = e.to_vec();
    v.sort_unstable();
    let mut out = vec![v.clone()];
    // next_permutation over the sorted multiset
    while let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) {
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(v.clone());
    }
    out
}

/// Orbit sum of t^e.
pub fn monomial_symmetric(e: &[i32]) -> LaurentPoly {
    LaurentPoly::from_terms(e.len(), orbit(e).into_iter().map(|f| (f, 1)))
}

/// i-th elementary symmetric polynomial.
pub fn elementary(n: usize, i: usize) -> LaurentPoly {
    let mut e = vec![0; n];
    e[..i].iter_mut().for_each(|x| *x = 1);
    monomial_symmetric(&e)
}

/// δ = prod (t_i - 1).
pub fn delta_class(n: usize) -> LaurentPoly {
    (0..n).fold(LaurentPoly::one(n), |acc, i| acc.mul(&LaurentPoly::var(n, i).sub(&LaurentPoly::one(n))))
}

/// U_r = prod (1 + t_i + ... + t_i^{p^r - 1}), the character of R(n,r).
pub fn u_class(n: usize, r: u32, p: Prime) -> LaurentPoly {
    let b = p.pow(r) as i32;
    (0..n).fold(LaurentPoly::one(n), |acc, i| {
        let geo = LaurentPoly::from_terms(
            n,
            (0..b).map(|k| {
                let mut e = vec![0; n];
                e[i] = k;
                (e, 1)
            }),
        );
        acc.mul(&geo)
    })
}

/// Random symmetric Laurent polynomial: a few orbit sums with small coefficients.
pub fn random_symmetric(n: usize, exps: std::ops::RangeInclusive<i32>, coeffs: i128, rng: &mut impl Rng) -> LaurentPoly {
    let mut out = LaurentPoly::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let e: Vec<i32> = (0..n).map(|_| rng.gen_range(exps.clone())).collect();
        out = out.add(&monomial_symmetric(&e).scale(rng.gen_range(-coeffs..=coeffs)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairParams {
    pub n: usize,
    pub r: u32,
    pub p: Prime,
}

/// An element (b, a) of Rep(GL_n) ⊕ Rep(GL_n^{(1)}) at the character level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothendieckPair {
    pub b: LaurentPoly,
    pub a: LaurentPoly,
}

impl GrothendieckPair {
    pub fn new(b: LaurentPoly, a: LaurentPoly) -> Self {
        GrothendieckPair { b, a }
    }

    pub fn unit(n: usize) -> Self {
        GrothendieckPair { b: LaurentPoly::zero(n), a: LaurentPoly::one(n) }
    }

    fn check_symmetric(&self) -> Result<()> {
        if self.b.is_symmetric() && self.a.is_symmetric() {
            Ok(())
        } else {
            param("pair components must be symmetric")
        }
    }
}

impl PairParams {
    pub fn new(n: usize, r: u32, p: Prime) -> Result<Self> {
        if n == 0 || r == 0 {
            return param("pair ring needs n >= 1 and r >= 1");
        }
        Ok(PairParams { n, r, p })
    }

    pub fn u(&self) -> LaurentPoly {
        u_class(self.n, self.r, self.p)
    }

    pub fn pair_mul(&self, x: &GrothendieckPair, y: &GrothendieckPair) -> Result<GrothendieckPair> {
        x.check_symmetric()?;
        y.check_symmetric()?;
        let p = self.p.get();
        let b = x.a.adams(p).mul(&y.b).add(&y.a.adams(p).mul(&x.b)).add(&self.u().mul(&x.b).mul(&y.b));
        Ok(GrothendieckPair { b, a: x.a.mul(&y.a) })
    }

    /// U_r b + ψ^p(a).
    pub fn image_map(&self, x: &GrothendieckPair) -> LaurentPoly {
        self.u().mul(&x.b).add(&x.a.adams(self.p.get()))
    }

    /// (δψ^p(a), -(ψ^p)^{r-1}(δ)a).
    pub fn kernel_element(&self, a: &LaurentPoly) -> GrothendieckPair {
        let p = self.p.get();
        let delta = delta_class(self.n);
        GrothendieckPair { b: delta.mul(&a.adams(p)), a: delta.adams_iter(p, self.r - 1).mul(a).neg() }
    }

    /// Recovers a with x = kernel_element(a), or says which step failed.
    pub fn kernel_membership(&self, x: &GrothendieckPair) -> std::result::Result<LaurentPoly, Refusal> {
        if !self.image_map(x).is_zero() {
            return Err(Refusal::NotInKernel);
        }
        let mut q = x.b.clone();
        for i in 0..self.n {
            q = q.div_by_t_minus_one(i).ok_or(Refusal::DivisionFailed { axis: i })?;
        }
        let a = q.adams_preimage(self.p.get()).ok_or(Refusal::NotAdamsImage)?;
        if self.kernel_element(&a) != *x {
            return Err(Refusal::SecondComponentMismatch);
        }
        Ok(a)
    }
}

/// Why a pair was not recognised as a kernel element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refusal {
    NotInKernel,
    DivisionFailed { axis: usize },
    NotAdamsImage,
    SecondComponentMismatch,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refusal::NotInKernel => write!(f, "not in kernel: image is nonzero"),
            Refusal::DivisionFailed { axis } => write!(f, "b is not divisible by (t_{} - 1)", axis + 1),
            Refusal::NotAdamsImage => write!(f, "b / delta is not a psi^p image"),
            Refusal::SecondComponentMismatch => write!(f, "second component does not match the witness"),
        }
    }
}

/// Result of enumerating every n = 1 pair with exponents and coefficients in
/// the given windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelCensus {
    pub pairs_checked: u64,
    pub kernel_pairs: u64,
    pub unexplained: Vec<GrothendieckPair>,
}

pub fn exhaustive_kernel_census(params: &PairParams, exps: std::ops::RangeInclusive<i32>, coeffs: std::ops::RangeInclusive<i128>) -> Result<KernelCensus> {
    if params.n != 1 {
        return param("exhaustive census is only implemented for n = 1");
    }
    let ex: Vec<i32> = exps.collect();
    let cs: Vec<i128> = coeffs.collect();
    let slots = 2 * ex.len();
    let total = (cs.len() as u64).pow(slots as u32);
    let mut census = KernelCensus { pairs_checked: 0, kernel_pairs: 0, unexplained: vec![] };
    for code in 0..total {
        let mut rest = code;
        let mut digits = Vec::with_capacity(slots);
        for _ in 0..slots {
            digits.push(cs[(rest % cs.len() as u64) as usize]);
            rest /= cs.len() as u64;
        }
        let b = LaurentPoly::from_terms(1, ex.iter().zip(&digits[..ex.len()]).map(|(&e, &c)| (vec![e], c)));
        let a = LaurentPoly::from_terms(1, ex.iter().zip(&digits[ex.len()..]).map(|(&e, &c)| (vec![e], c)));
        let x = GrothendieckPair::new(b, a);
        census.pairs_checked += 1;
        if params.image_map(&x).is_zero() {
            census.kernel_pairs += 1;
            if params.kernel_membership(&x).is_err() {
                census.unexplained.push(x);
            }
        }
    }
    Ok(census)
}

/// Weight generating function of a multiset of weights.
pub fn character_from_weights<'a>(n: usize, weights: impl IntoIterator<Item = (&'a [i32], i128)>) -> LaurentPoly {
    LaurentPoly::from_terms(n, weights.into_iter().map(|(w, m)| (w.to_vec(), m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pp(n: usize, r: u32, p: u32) -> PairParams {
        PairParams::new(n, r, Prime::new(p).unwrap()).unwrap()
    }

    fn t() -> LaurentPoly {
        LaurentPoly::var(1, 0)
    }

    fn one() -> LaurentPoly {
        LaurentPoly::one(1)
    }

    #[test]
    fn adams_examples() {
        assert_eq!(t().add(&one()).adams(2), t().pow(2).add(&one()));
        let d = delta_class(2);
        let t1 = LaurentPoly::var(2, 0);
        let t2 = LaurentPoly::var(2, 1);
        let one2 = LaurentPoly::one(2);
        assert_eq!(d.adams(3), t1.pow(3).sub(&one2).mul(&t2.pow(3).sub(&one2)));
    }

    #[test]
    fn delta_and_u_examples() {
        let p2 = Prime::new(2).unwrap();
        assert_eq!(u_class(1, 1, p2), t().add(&one()));
        assert_eq!(delta_class(1), t().sub(&one()));
        assert_eq!(delta_class(1).adams(2), u_class(1, 1, p2).mul(&delta_class(1)));
        let geo = |v: LaurentPoly| (0..4).fold(LaurentPoly::zero(2), |acc, k| acc.add(&v.pow(k)));
        assert_eq!(u_class(2, 2, p2), geo(LaurentPoly::var(2, 0)).mul(&geo(LaurentPoly::var(2, 1))));
    }

    #[test]
    fn key_identity() {
        for n in 1..=3 {
            for p in [2, 3] {
                for r in 1..=2 {
                    let prime = Prime::new(p).unwrap();
                    let d = delta_class(n);
                    assert_eq!(d.adams_iter(p, r), u_class(n, r, prime).mul(&d));
                }
            }
        }
    }

    #[test]
    fn pair_examples() {
        let params = pp(1, 1, 2);
        let x = GrothendieckPair::new(t().add(&one()), t());
        assert_eq!(params.pair_mul(&x, &GrothendieckPair::unit(1)).unwrap(), x);
        let e = GrothendieckPair::new(one(), LaurentPoly::zero(1));
        assert_eq!(params.pair_mul(&e, &e).unwrap(), GrothendieckPair::new(t().add(&one()), LaurentPoly::zero(1)));
        assert_eq!(params.image_map(&e), t().add(&one()));
        assert_eq!(params.image_map(&GrothendieckPair::new(LaurentPoly::zero(1), t())), t().pow(2));
    }

    #[test]
    fn kernel_examples() {
        let k = pp(1, 1, 2).kernel_element(&one());
        assert_eq!(k, GrothendieckPair::new(t().sub(&one()), t().sub(&one()).neg()));
        assert!(pp(1, 1, 2).image_map(&k).is_zero());
        let k2 = pp(1, 2, 2).kernel_element(&one());
        assert_eq!(k2.a, t().pow(2).sub(&one()).neg());
        assert!(pp(1, 2, 2).image_map(&k2).is_zero());
        assert_eq!(pp(1, 1, 3).kernel_element(&LaurentPoly::zero(1)), GrothendieckPair::new(LaurentPoly::zero(1), LaurentPoly::zero(1)));
        let bad = GrothendieckPair::new(one(), LaurentPoly::zero(1));
        assert_eq!(pp(1, 1, 2).kernel_membership(&bad), Err(Refusal::NotInKernel));
    }

    #[test]
    fn division_by_t_minus_one() {
        let f = t().pow(3).sub(&one());
        assert_eq!(f.div_by_t_minus_one(0).unwrap(), t().pow(2).add(&t()).add(&one()));
        assert!(t().div_by_t_minus_one(0).is_none());
        let inv = LaurentPoly::monomial(vec![-1], 1);
        assert_eq!(one().sub(&inv).div_by_t_minus_one(0).unwrap(), inv);
    }

    #[test]
    fn exhaustive_window_n1() {
        for p in [2, 3] {
            for r in [1, 2] {
                let c = exhaustive_kernel_census(&pp(1, r, p), -1..=2, -1..=1).unwrap();
                assert_eq!(c.pairs_checked, 3u64.pow(8));
                assert!(c.kernel_pairs >= 1);
                assert!(c.unexplained.is_empty());
            }
        }
    }

    #[test]
    fn orbit_sums_are_symmetric() {
        assert_eq!(orbit(&[1, 0, 0]).len(), 3);
        assert_eq!(orbit(&[1, 1, 0]).len(), 3);
        assert_eq!(orbit(&[2, 1, 0]).len(), 6);
        assert!(monomial_symmetric(&[2, -1, 0]).is_symmetric());
        assert!(!LaurentPoly::var(2, 0).is_symmetric());
    }

    #[test]
    fn json_round_trip() {
        let f = delta_class(2).adams(3);
        assert_eq!(LaurentPoly::from_json(2, &f.to_json()).unwrap(), f);
    }

    proptest! {
        #[test]
        fn image_map_is_multiplicative(seed in any::<u64>(), n in 1usize..=2, r in 1u32..=2, p in prop_oneof![Just(2u32), Just(3)]) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = pp(n, r, p);
            let mut gen = || GrothendieckPair::new(random_symmetric(n, -2..=2, 2, &mut rng), random_symmetric(n, -2..=2, 2, &mut rng));
            let (x, y, z) = (gen(), gen(), gen());
            let xy = params.pair_mul(&x, &y).unwrap();
            prop_assert_eq!(params.image_map(&xy), params.image_map(&x).mul(&params.image_map(&y)));
            prop_assert_eq!(params.pair_mul(&xy, &z).unwrap(), params.pair_mul(&x, &params.pair_mul(&y, &z).unwrap()).unwrap());
            prop_assert_eq!(params.pair_mul(&x, &y).unwrap(), params.pair_mul(&y, &x).unwrap());
        }

        #[test]
        fn kernel_round_trip(seed in any::<u64>(), n in 1usize..=3, r in 1u32..=2, p in prop_oneof![Just(2u32), Just(3)]) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = pp(n, r, p);
            let a = random_symmetric(n, -2..=2, 3, &mut rng);
            let k = params.kernel_element(&a);
            prop_assert!(params.image_map(&k).is_zero());
            prop_assert_eq!(params.kernel_membership(&k), Ok(a));
        }

        #[test]
        fn adams_is_a_symmetric_ring_map(seed in any::<u64>(), p in 2u32..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_symmetric(2, -2..=3, 3, &mut rng);
            let g = random_symmetric(2, -2..=3, 3, &mut rng);
            prop_assert_eq!(f.mul(&g).adams(p), f.adams(p).mul(&g.adams(p)));
            prop_assert!(f.adams(p).is_symmetric());
        }
    }
}
