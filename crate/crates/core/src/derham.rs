//! The de Rham complex Ω_r^• = I(Λ^• U), optionally tensored with a
//! Frobenius twist V^{[1]}, with differentials d ⊗ id, cohomology ranks,
//! and the inverse Cartier map on Ω_1^•.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::autgroup::GroupPoint;
use crate::error::{domain, param, Error, Result};
use crate::fp::{binom_int, Prime};
use crate::glnrep::WeightModule;
use crate::induced::InducedModule;
use crate::linalg::{Echelon, SparseOp};

#[derive(Debug, Clone)]
pub struct DeRhamComplex {
    n: usize,
    r: u32,
    p: Prime,
    twist: Option<Arc<WeightModule>>,
    exteriors: Vec<Arc<WeightModule>>,
    terms: Vec<InducedModule>,
    differentials: Vec<SparseOp>,
}

/// C^{-1}(dx_J ⊗ 1) = [x_J^{p-1} dx_J].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierClass {
    pub subset: Vec<usize>,
    pub representative: Vec<u32>,
    /// Canonical representative of the class modulo im(d_i).
    pub normal_form: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierCheck {
    pub degree: usize,
    pub classes: usize,
    pub all_cocycles: bool,
    pub independent: bool,
    pub spans: bool,
    pub lie_annihilated: bool,
}

impl CartierCheck {
    pub fn holds(&self) -> bool {
        self.all_cocycles && self.independent && self.spans && self.lie_annihilated
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub lie_commutes: bool,
    pub samples: usize,
    pub group_failures: usize,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.lie_commutes && self.group_failures == 0
    }
}

fn insert_sorted(j: &[usize], l: usize) -> Option<(Vec<usize>, bool)> {
    if j.contains(&l) {
        return None;
    }
    let before = j.iter().filter(|&&x| x < l).count();
    let mut out = j.to_vec();
    out.insert(before, l);
    Some((out, before % 2 == 0))
}

impl DeRhamComplex {
    pub fn build(n: usize, r: u32, p: Prime, twist: Option<&Arc<WeightModule>>) -> Result<Self> {
        if n == 0 {
            return param("n must be at least 1");
        }
        if let Some(v) = twist {
            if v.n() != n || v.prime() != p {
                return param("twist module has different n or p");
            }
        }
        let u = WeightModule::standard(n, p);
        let twisted = twist.map(WeightModule::frobenius_twist);
        let mut exteriors = Vec::with_capacity(n + 1);
        let mut terms = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let ext = WeightModule::exterior_power(&u, i);
            let fiber = match &twisted {
                Some(t) => WeightModule::tensor(&ext, t),
                None => Arc::clone(&ext),
            };
            terms.push(InducedModule::build(&fiber, n, r, p)?);
            exteriors.push(ext);
        }
        let mut complex = DeRhamComplex { n, r, p, twist: twist.cloned(), exteriors, terms, differentials: Vec::new() };
        complex.differentials = (1..=n).map(|i| complex.build_differential(i)).collect();
        for i in 1..n {
            if !complex.differentials[i].compose(&complex.differentials[i - 1]).is_zero() {
                return Err(Error::Internal(format!("d_{} ∘ d_{i} is not zero", i + 1)));
            }
        }
        Ok(complex)
    }

    /// d_i : Ω^{i-1} -> Ω^i, f dx_J ⊗ v -> sum_l ∂_l f dx_l ∧ dx_J ⊗ v.
    fn build_differential(&self, i: usize) -> SparseOp {
        let src = &self.terms[i - 1];
        let dst = &self.terms[i];
        let tw = self.twist_dim();
        let mons = src.ring().monomials();
        let mut cols = Vec::with_capacity(src.dim());
        for k in 0..src.dim() {
            let (pos, b) = src.split(k);
            let (jidx, t) = (b / tw, b % tw);
            let key = self.exteriors[i - 1].basis_key(jidx).expect("exterior basis");
            let e = mons.exponents(pos);
            let mut col = Vec::new();
            for l in 0..self.n {
                if e[l] == 0 {
                    continue;
                }
                let Some((new_key, positive)) = insert_sorted(key, l) else { continue };
                let mut ne = e.to_vec();
                ne[l] -= 1;
                let q = mons.position(&ne).expect("smaller exponent");
                let nj = self.exteriors[i].key_index(&new_key).expect("exterior basis");
                let c = e[l] as i128;
                col.push((dst.index(q, nj * tw + t), if positive { c } else { -c }));
            }
            cols.push(col);
        }
        SparseOp::from_entries(self.p, dst.dim(), cols)
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

    pub fn twist(&self) -> Option<&Arc<WeightModule>> {
        self.twist.as_ref()
    }

    pub fn twist_dim(&self) -> usize {
        self.twist.as_ref().map_or(1, |v| v.dim())
    }

    /// Ω^i (⊗ V^{[1]}) as an induced module.
    pub fn term(&self, i: usize) -> &InducedModule {
        &self.terms[i]
    }

    pub fn term_dims(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.dim()).collect()
    }

    /// d_i for 1 <= i <= n.
    pub fn differential(&self, i: usize) -> Result<&SparseOp> {
        if i == 0 || i > self.n {
            return param(format!("differential index {i} outside 1..={}", self.n));
        }
        Ok(&self.differentials[i - 1])
    }

    fn rank_d(&self, i: usize) -> usize {
        if i == 0 || i > self.n {
            0
        } else {
            self.differentials[i - 1].rank()
        }
    }

    /// dim H^i = dim ker d_{i+1} - dim im d_i, for i = 0..=n.
    pub fn cohomology_dimensions(&self) -> Vec<usize> {
        (0..=self.n).map(|i| self.terms[i].dim() - self.rank_d(i + 1) - self.rank_d(i)).collect()
    }

    /// dim im d_i for i = 1..=n.
    pub fn image_dims(&self) -> Vec<usize> {
        (1..=self.n).map(|i| self.rank_d(i)).collect()
    }

    pub fn image_of_differential(&self, i: usize) -> Result<Echelon> {
        Ok(self.differential(i)?.image())
    }

    /// The invariant generators dx_J ⊗ v of Ω^i ⊗ V^{[1]}.
    pub fn invariant_generators(&self, i: usize) -> Vec<Vec<u32>> {
        let term = &self.terms[i];
        (0..term.fiber().dim()).map(|b| term.basis_vector(0, b)).collect()
    }

    fn require_cartier_setting(&self) -> Result<()> {
        if self.r != 1 {
            return domain("the inverse Cartier map is defined on Ω_1");
        }
        if self.twist.is_some() {
            return domain("the inverse Cartier map is computed on the untwisted complex");
        }
        Ok(())
    }

    /// C^{-1}(dx_J ⊗ 1) for a strictly increasing J (0-based) of size i.
    pub fn cartier_inverse(&self, subset: &[usize]) -> Result<CartierClass> {
        self.require_cartier_setting()?;
        let i = subset.len();
        if i > self.n || subset.windows(2).any(|w| w[0] >= w[1]) || subset.iter().any(|&j| j >= self.n) {
            return param("subset must be strictly increasing inside 0..n");
        }
        let term = &self.terms[i];
        let exps: Vec<u32> = (0..self.n).map(|t| if subset.contains(&t) { self.p.get() - 1 } else { 0 }).collect();
        let jidx = self.exteriors[i].key_index(subset).expect("exterior basis");
        let pos = term.ring().monomials().position(&exps).expect("exponents below p");
        let representative = term.basis_vector(pos, jidx);
        if i < self.n && !self.differentials[i].apply(&representative).iter().all(|&x| x == 0) {
            return Err(Error::Internal("Cartier representative is not a cocycle".into()));
        }
        let mut normal_form = representative.clone();
        if i > 0 {
            self.differentials[i - 1].image().reduce(&mut normal_form);
        }
        Ok(CartierClass { subset: subset.to_vec(), representative, normal_form })
    }

    /// Cocycle, independence, spanning and Lie-annihilation checks for the
    /// images of a basis of Λ^i U^{(1)}.
    pub fn cartier_check(&self, i: usize) -> Result<CartierCheck> {
        self.require_cartier_setting()?;
        if i > self.n {
            return param("degree out of range");
        }
        let keys: Vec<Vec<usize>> = (0..self.exteriors[i].dim()).map(|b| self.exteriors[i].basis_key(b).expect("key").to_vec()).collect();
        let classes = keys.iter().map(|k| self.cartier_inverse(k)).collect::<Result<Vec<_>>>()?;
        let all_cocycles = classes.iter().all(|c| i == self.n || self.differentials[i].apply(&c.representative).iter().all(|&x| x == 0));
        let span = Echelon::span(self.p, self.terms[i].dim(), classes.iter().map(|c| c.normal_form.clone()));
        let independent = span.dim() == classes.len();
        let spans = independent && classes.len() == self.cohomology_dimensions()[i];
        let image = if i == 0 { Echelon::zero(self.p, self.terms[0].dim()) } else { self.differentials[i - 1].image() };
        let lie_annihilated = classes.iter().all(|c| self.terms[i].lie_ops().iter().all(|op| image.contains(&op.apply(&c.representative))));
        Ok(CartierCheck { degree: i, classes: classes.len(), all_cocycles, independent, spans, lie_annihilated })
    }

    /// d_i commutes with every Lie basis operator and with each sampled point.
    pub fn verify_equivariance(&self, samples: &[GroupPoint]) -> Result<EquivarianceReport> {
        let mut lie_commutes = true;
        for i in 1..=self.n {
            let d = &self.differentials[i - 1];
            for (a, b) in self.terms[i - 1].lie_ops().iter().zip(self.terms[i].lie_ops()) {
                lie_commutes &= d.compose(a) == b.compose(d);
            }
        }
        let mut group_failures = 0;
        for g in samples {
            let ops = self.terms.iter().map(|t| t.group_operator(g)).collect::<Result<Vec<_>>>()?;
            let ok = (1..=self.n).all(|i| {
                let d = &self.differentials[i - 1];
                ops[i - 1].components.iter().zip(&ops[i].components).all(|(a, b)| d.compose(a) == b.compose(d))
            });
            if !ok {
                group_failures += 1;
            }
        }
        Ok(EquivarianceReport { lie_commutes, samples: samples.len(), group_failures })
    }

    /// Predicted dim H^i: p^{n(r-1)} binom(n, i) dim V.
    pub fn expected_cohomology(&self) -> Vec<usize> {
        let base = (self.p.get() as usize).pow(self.n as u32 * (self.r - 1));
        (0..=self.n).map(|i| base * binom_int(self.n as u64, i as u64) as usize * self.twist_dim()).collect()
    }

    pub fn report_json(&self) -> Value {
        json!({
            "n": self.n,
            "r": self.r,
            "p": self.p.get(),
            "twist_dim": self.twist_dim(),
            "dims": self.term_dims(),
            "cohomology": self.cohomology_dimensions(),
            "image_dims": self.image_dims(),
        })
    }
}
