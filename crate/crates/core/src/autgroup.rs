//! A-points of G(n,r) = Aut(R(n,r)), the group law, the triangular
//! factorization into translation, linear and unipotent parts, the
//! subgroups U_i, and the transfer maps P, T_r and t_{r,i}.
//!
//! Convention: a point g is the tuple of images g_i = g(x_i), and
//! `compose(g, h)` has images g_i(h_1, ..., h_n). The linear point attached
//! to a matrix L has images g_j = sum_i L_ij x_i, so its Jacobian is L and
//! `compose(L, M)` is the linear point of M * L. A point g acts on R(n,r)_A by
//! f -> f(g_1, ..., g_n); with this convention the action of compose(g, h) is
//! the action of g followed by that of h.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use crate::base_ring::{json_array, PolyRing, TestAlgebra, TruncatedPolynomial};
use crate::error::{domain, param, Error, Result};
use crate::matrix::{self, Matrix};

/// Matrix with entries in a test algebra.
pub type AlgMatrix = Matrix<Vec<u32>>;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    ring: Arc<PolyRing>,
    images: Vec<TruncatedPolynomial>,
}

/// g = compose(compose(translation, linear), unipotent).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularFactors {
    pub translation: Vec<Vec<u32>>,
    pub linear: AlgMatrix,
    pub unipotent: GroupPoint,
}

/// The derivation x^I d/dx_axis (axis is 0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieBasisElement {
    pub axis: usize,
    pub exps: Vec<u32>,
}

impl GroupPoint {
    /// Checks c^{p^r} = 0 for every constant term and invertibility of J_g.
    pub fn validate(images: Vec<TruncatedPolynomial>) -> Result<Self> {
        let Some(first) = images.first() else {
            return param("a group point needs at least one image");
        };
        let ring = Arc::clone(first.ring());
        if images.len() != ring.n() {
            return param(format!("expected {} images, got {}", ring.n(), images.len()));
        }
        if images.iter().any(|g| **g.ring() != *ring) {
            return param("images live in different rings");
        }
        let alg = ring.coeff().algebra();
        for (i, g) in images.iter().enumerate() {
            if !alg.is_zero(&alg.pow(g.constant_term(), ring.bound() as u64)) {
                return domain(format!("nilpotence criterion fails: constant term of image {} has nonzero p^r-th power", i + 1));
            }
        }
        let point = GroupPoint { ring, images };
        if matrix::inverse(point.ring.coeff(), &point.jacobian()).is_none() {
            return domain("Jacobian criterion fails: J_g is not invertible over A");
        }
        Ok(point)
    }

    pub fn identity(ring: &Arc<PolyRing>) -> Self {
        GroupPoint { ring: Arc::clone(ring), images: (0..ring.n()).map(|i| ring.variable(i)).collect() }
    }

    /// x_i -> x_i + a_i.
    pub fn translation(ring: &Arc<PolyRing>, a: &[Vec<u32>]) -> Result<Self> {
        let images = (0..ring.n()).map(|i| ring.variable(i).add(&ring.constant(&a[i]))).collect::<Result<Vec<_>>>()?;
        Self::validate(images)
    }

    /// x_j -> sum_i L_ij x_i.
    pub fn linear(ring: &Arc<PolyRing>, l: &AlgMatrix) -> Result<Self> {
        let n = ring.n();
        if l.rows() != n || l.cols() != n {
            return param("linear part must be n x n");
        }
        let images = (0..n)
            .map(|j| {
                let mut g = ring.zero();
                for i in 0..n {
                    g = g.add(&ring.variable(i).scale_by(l.get(i, j)))?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::validate(images)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn images(&self) -> &[TruncatedPolynomial] {
        &self.images
    }

    pub fn algebra(&self) -> &TestAlgebra {
        self.ring.coeff()
    }

    pub fn constants(&self) -> Vec<Vec<u32>> {
        self.images.iter().map(|g| g.constant_term().to_vec()).collect()
    }

    /// J_g with (i, j) entry the coefficient of x_i in g_j.
    pub fn jacobian(&self) -> AlgMatrix {
        let n = self.ring.n();
        Matrix::from_fn(n, n, |i, j| {
            let mut e = vec![0; n];
            e[i] = 1;
            self.images[j].coeff_of(&e)
        })
    }

    /// The matrix of functions with (i, j) entry d g_j / d x_i.
    pub fn jacobian_functions(&self) -> Matrix<TruncatedPolynomial> {
        let n = self.ring.n();
        Matrix::from_fn(n, n, |i, j| self.images[j].partial_derivative(i).expect("axis in range"))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if *self.ring == *other.ring {
            Ok(())
        } else {
            param("group points have different parameters or algebras")
        }
    }

    /// Images g_i(h_1, ..., h_n).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let images = self.images.iter().map(|g| g.substitute(&other.images)).collect::<Result<Vec<_>>>()?;
        Ok(GroupPoint { ring: Arc::clone(&self.ring), images })
    }

    /// Pullback f -> f(g_1, ..., g_n) on R(n,r)_A (or on F_p-polynomials).
    pub fn act(&self, f: &TruncatedPolynomial) -> Result<TruncatedPolynomial> {
        f.substitute(&self.images)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ring)
    }

    /// Zero constant terms and identity Jacobian.
    pub fn is_unipotent(&self) -> bool {
        let alg = self.ring.coeff();
        self.constants().iter().all(|c| alg.algebra().is_zero(c)) && matrix::is_identity(alg, &self.jacobian())
    }

    pub fn invert(&self) -> Result<Self> {
        let f = self.triangular_factorize()?;
        let alg = self.ring.coeff();
        let neg: Vec<Vec<u32>> = f.translation.iter().map(|a| alg.algebra().neg(a)).collect();
        let t_inv = Self::translation(&self.ring, &neg)?;
        let l_inv = Self::linear(&self.ring, &matrix::inverse(alg, &f.linear).expect("validated"))?;
        let u_inv = f.unipotent.invert_unipotent();
        u_inv.compose(&l_inv)?.compose(&t_inv)
    }

    /// For u = x + N(x) with N of order >= 2, iterate v <- x - N(v).
    fn invert_unipotent(&self) -> Self {
        let ring = &self.ring;
        let id = Self::identity(ring);
        let nonlinear: Vec<TruncatedPolynomial> =
            self.images.iter().zip(&id.images).map(|(u, x)| u.sub(x).expect("same ring")).collect();
        let mut v = id.clone();
        let max_steps = ring.n() * ring.bound() as usize + 1;
        for _ in 0..max_steps {
            let next: Vec<TruncatedPolynomial> = nonlinear
                .iter()
                .zip(&id.images)
                .map(|(nl, x)| x.sub(&nl.substitute(&v.images).expect("nilpotent constants")).expect("same ring"))
                .collect();
            if next == v.images {
                break;
            }
            v.images = next;
        }
        v
    }

    pub fn triangular_factorize(&self) -> Result<TriangularFactors> {
        let ring = &self.ring;
        let alg = ring.coeff();
        let translation = self.constants();
        let linear = self.jacobian();
        let l_inv = matrix::inverse(alg, &linear).ok_or_else(|| Error::Domain("Jacobian not invertible".into()))?;
        // g_i - a_i = sum_k L_ki u_k, so u_k = sum_i (L^{-1})_ik (g_i - a_i)
        let shifted: Vec<TruncatedPolynomial> = self
            .images
            .iter()
            .zip(&translation)
            .map(|(g, a)| g.sub(&ring.constant(a)))
            .collect::<Result<_>>()?;
        let n = ring.n();
        let mut u_images = Vec::with_capacity(n);
        for k in 0..n {
            let mut u = ring.zero();
            for (i, s) in shifted.iter().enumerate() {
                u = u.add(&s.scale_by(l_inv.get(i, k)))?;
            }
            u_images.push(u);
        }
        let unipotent = GroupPoint { ring: Arc::clone(ring), images: u_images };
        debug_assert!(unipotent.is_unipotent());
        Ok(TriangularFactors { translation, linear, unipotent })
    }

    /// g(x_j)(0)^{p^i} = 0 for all j.
    pub fn in_u(&self, i: u32) -> Result<bool> {
        if i == 0 || i > self.ring.r() {
            return param(format!("level {i} outside 1..={}", self.ring.r()));
        }
        let alg = self.ring.coeff().algebra();
        let e = self.ring.prime().pow(i) as u64;
        Ok(self.constants().iter().all(|c| alg.is_zero(&alg.pow(c, e))))
    }

    /// Entrywise p^level-th power of J_g; P_r is `transfer_p(r)`.
    pub fn transfer_p(&self, level: u32) -> AlgMatrix {
        let alg = self.ring.coeff().algebra();
        let e = self.ring.prime().pow(level) as u64;
        self.jacobian().map(|x| alg.pow(x, e))
    }

    pub fn transfer_p_r(&self) -> AlgMatrix {
        self.transfer_p(self.ring.r())
    }

    /// Truncate to level r-1 and raise every algebra coefficient to the p-th power.
    pub fn transfer_t_r(&self) -> Result<Self> {
        let r = self.ring.r();
        if r < 2 {
            return domain("T_r needs r >= 2");
        }
        let alg = self.ring.coeff().algebra();
        let images = self
            .images
            .iter()
            .map(|g| Ok(g.truncate_to(r - 1)?.map_coeffs(|c| alg.frobenius(c))))
            .collect::<Result<Vec<_>>>()?;
        Self::validate(images)
    }

    /// Truncation to G(n,i), defined on U_i.
    pub fn transfer_t_ri(&self, i: u32) -> Result<Self> {
        if !self.in_u(i)? {
            return domain(format!("point does not lie in U_{i}"));
        }
        let images = self.images.iter().map(|g| g.truncate_to(i)).collect::<Result<Vec<_>>>()?;
        Self::validate(images)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.ring.n(),
            "r": self.ring.r(),
            "p": self.ring.prime().get(),
            "algebra": self.ring.coeff().to_json(),
            "images": self.images.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let alg = TestAlgebra::from_json(v.get("algebra").ok_or_else(|| Error::Parameter("missing algebra".into()))?)?;
        let images = json_array(v, "images")?
            .iter()
            .map(|img| {
                let mut img = img.clone();
                img["algebra"] = alg.to_json();
                TruncatedPolynomial::from_json(&img)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::validate(images)
    }
}

impl TriangularFactors {
    pub fn recompose(&self) -> Result<GroupPoint> {
        let ring = self.unipotent.ring();
        let t = GroupPoint::translation(ring, &self.translation)?;
        let l = GroupPoint::linear(ring, &self.linear)?;
        t.compose(&l)?.compose(&self.unipotent)
    }
}

/// All n * p^{rn} derivations x^I d/dx_i, axis-major then deglex in I.
pub fn lie_basis(ring: &PolyRing) -> Vec<LieBasisElement> {
    let mut out = Vec::with_capacity(ring.n() * ring.dim());
    for axis in 0..ring.n() {
        for e in ring.monomials().all_exponents() {
            out.push(LieBasisElement { axis, exps: e.clone() });
        }
    }
    out
}

/// Uniform element of A with zero constant term and c^{p^r} = 0.
pub fn random_nilpotent(ring: &PolyRing, rng: &mut impl Rng) -> Vec<u32> {
    let alg = ring.coeff().algebra();
    let p = ring.prime().get();
    for _ in 0..64 {
        let mut c: Vec<u32> = (0..alg.dim()).map(|_| rng.gen_range(0..p)).collect();
        c[0] = 0;
        if alg.is_zero(&alg.pow(&c, ring.bound() as u64)) {
            return c;
        }
    }
    alg.zero()
}

pub fn random_translation(ring: &Arc<PolyRing>, rng: &mut impl Rng) -> GroupPoint {
    let a: Vec<Vec<u32>> = (0..ring.n()).map(|_| random_nilpotent(ring, rng)).collect();
    GroupPoint::translation(ring, &a).expect("nilpotent constants")
}

/// Uniform A-matrix whose reduction mod the maximal ideal is invertible.
pub fn random_linear(ring: &Arc<PolyRing>, rng: &mut impl Rng) -> GroupPoint {
    let alg = ring.coeff();
    let p = ring.prime().get();
    let n = ring.n();
    loop {
        let l = Matrix::from_fn(n, n, |_, _| (0..alg.dim()).map(|_| rng.gen_range(0..p)).collect::<Vec<u32>>());
        if matrix::inverse(alg, &l).is_some() {
            return GroupPoint::linear(ring, &l).expect("invertible");
        }
    }
}

/// x_i + uniformly random terms of degree >= 2.
pub fn random_unipotent(ring: &Arc<PolyRing>, rng: &mut impl Rng) -> GroupPoint {
    let p = ring.prime().get();
    let images = (0..ring.n())
        .map(|i| {
            let mut data: Vec<u32> = (0..ring.dim() * ring.coeff().dim()).map(|_| rng.gen_range(0..p)).collect();
            let a = ring.coeff().dim();
            for pos in 0..ring.dim() {
                if ring.monomials().exponents(pos).iter().sum::<u32>() < 2 {
                    data[pos * a..(pos + 1) * a].iter_mut().for_each(|x| *x = 0);
                }
            }
            TruncatedPolynomial::from_raw(ring, data).add(&ring.variable(i)).expect("same ring")
        })
        .collect();
    GroupPoint::validate(images).expect("unipotent points are valid")
}

/// Product of random translation, linear and unipotent factors.
pub fn random_point(ring: &Arc<PolyRing>, rng: &mut impl Rng) -> GroupPoint {
    let t = random_translation(ring, rng);
    let l = random_linear(ring, rng);
    let u = random_unipotent(ring, rng);
    t.compose(&l).and_then(|tl| tl.compose(&u)).expect("same ring")
}
