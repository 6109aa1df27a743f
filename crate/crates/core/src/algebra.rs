//! Lie algebras, their duals and linear maps between them.
//!
//! Elements of an algebra and of its dual are both stored as coordinate
//! vectors; the dual pairing is the dot product of coordinates. An
//! implementation of [`LieAlgebra`] supplies the bracket and its transpose,
//! the coadjoint action `coad(u, ν) = ad(u)*ν`, defined by
//! `⟨coad(u, ν), w⟩ = ⟨ν, [u, w]⟩`.

use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::error::{check_dim, Error, Result};
use crate::{Matrix, Vector};

pub trait LieAlgebra: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    /// `[u, v]`, unchecked.
    fn bracket(&self, u: &Vector, v: &Vector) -> Vector;
    /// `ad(u)*ν`, unchecked.
    fn coad(&self, u: &Vector, nu: &Vector) -> Vector;
    /// False for truncated algebras whose bracket only satisfies Jacobi up to truncation.
    fn exact_jacobi(&self) -> bool {
        true
    }
    fn is_abelian(&self) -> bool {
        false
    }
    fn casimir_names(&self) -> Vec<String>;
    fn casimir(&self, name: &str, nu: &Vector) -> Option<f64>;
    fn casimir_gradient(&self, name: &str, nu: &Vector) -> Option<Vector>;
}

/// `[u, v]` with dimension checks.
pub fn ad(alg: &dyn LieAlgebra, u: &Vector, v: &Vector) -> Result<Vector> {
    check_dim("ad: u", alg.dim(), u.len())?;
    check_dim("ad: v", alg.dim(), v.len())?;
    Ok(alg.bracket(u, v))
}

/// `ad(u)*ν` with dimension checks.
pub fn coad(alg: &dyn LieAlgebra, u: &Vector, nu: &Vector) -> Result<Vector> {
    check_dim("coad: u", alg.dim(), u.len())?;
    check_dim("coad: nu", alg.dim(), nu.len())?;
    Ok(alg.coad(u, nu))
}

pub fn pairing(nu: &Vector, u: &Vector) -> Result<f64> {
    check_dim("pairing", nu.len(), u.len())?;
    Ok(nu.dot(u))
}

pub fn casimir_eval(alg: &dyn LieAlgebra, name: &str, nu: &Vector) -> Result<f64> {
    check_dim("casimir: nu", alg.dim(), nu.len())?;
    alg.casimir(name, nu)
        .ok_or_else(|| Error::UnknownCasimir(name.to_string()))
}

/// Largest `|⟨coad(u,ν),w⟩ − ⟨ν,[u,w]⟩|` over the basis vectors `w`.
pub fn coad_pairing_residual(alg: &dyn LieAlgebra, u: &Vector, nu: &Vector) -> f64 {
    let lhs = alg.coad(u, nu);
    let n = alg.dim();
    let mut worst = 0.0_f64;
    for j in 0..n {
        let w = Vector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
        let rhs = nu.dot(&alg.bracket(u, &w));
        worst = worst.max((lhs[j] - rhs).abs());
    }
    worst
}

/// Largest Jacobi defect over all basis triples.
pub fn jacobi_residual(alg: &dyn LieAlgebra) -> f64 {
    let n = alg.dim();
    let e = |i: usize| Vector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (e(i), e(j), e(k));
                let r = alg.bracket(&a, &alg.bracket(&b, &c))
                    + alg.bracket(&b, &alg.bracket(&c, &a))
                    + alg.bracket(&c, &alg.bracket(&a, &b));
                worst = worst.max(r.amax());
            }
        }
    }
    worst
}

/// `K(ν) = ½ νᵀ Q ν`.
#[derive(Debug, Clone)]
pub struct QuadraticCasimir {
    pub name: String,
    pub q: Matrix,
}

/// A finite-dimensional algebra given by structure constants.
///
/// `ad[i]` is the matrix of `ad(e_i)`, so `[u, v] = Σ_i u_i ad[i] v`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    name: String,
    ad: Vec<Matrix>,
    casimirs: Vec<QuadraticCasimir>,
    abelian: bool,
}

impl StructureConstants {
    /// `c[k][(i, j)]` is the coefficient of `e_k` in `[e_i, e_j]`.
    pub fn new(name: &str, c: &[Matrix], casimirs: Vec<QuadraticCasimir>) -> Result<Self> {
        let n = c.len();
        for ck in c {
            check_dim("structure constants", n, ck.nrows())?;
            check_dim("structure constants", n, ck.ncols())?;
        }
        let ad: Vec<Matrix> = (0..n)
            .map(|i| Matrix::from_fn(n, n, |k, j| c[k][(i, j)]))
            .collect();
        let abelian = ad.iter().all(|m| m.amax() == 0.0);
        Ok(Self {
            name: name.to_string(),
            ad,
            casimirs,
            abelian,
        })
    }

    /// so(3) with `[e1, e2] = e3` and cyclic; Casimir `norm2 = |ν|²/2`.
    pub fn so3() -> Self {
        let mut c = vec![Matrix::zeros(3, 3); 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[k][(i, j)] = 1.0;
            c[k][(j, i)] = -1.0;
        }
        let cas = QuadraticCasimir {
            name: "norm2".into(),
            q: Matrix::identity(3, 3),
        };
        Self::new("so3", &c, vec![cas]).expect("so3 constants are square")
    }

    pub fn abelian(n: usize) -> Self {
        let cas = QuadraticCasimir {
            name: "norm2".into(),
            q: Matrix::identity(n, n),
        };
        Self {
            name: format!("R^{n}"),
            ad: vec![Matrix::zeros(n, n); n],
            casimirs: vec![cas],
            abelian: true,
        }
    }

    /// `so(3) ⊕ R^extra` written in the basis given by the columns of `basis`.
    ///
    /// The so(3) norm survives as a quadratic Casimir in the new coordinates.
    pub fn so3_plus_abelian_in_basis(extra: usize, basis: &Matrix) -> Result<Self> {
        let n = 3 + extra;
        check_dim("basis rows", n, basis.nrows())?;
        check_dim("basis cols", n, basis.ncols())?;
        let p_inv = basis
            .clone()
            .try_inverse()
            .ok_or(Error::NotInvertible("basis change"))?;
        let so3 = Self::so3();
        let old_bracket = |a: &Vector, b: &Vector| -> Vector {
            let mut out = Vector::zeros(n);
            let r = so3.bracket(&a.rows(0, 3).into_owned(), &b.rows(0, 3).into_owned());
            out.rows_mut(0, 3).copy_from(&r);
            out
        };
        let mut c = vec![Matrix::zeros(n, n); n];
        for i in 0..n {
            for j in 0..n {
                let br = p_inv.clone() * old_bracket(&basis.column(i).into_owned(), &basis.column(j).into_owned());
                for k in 0..n {
                    c[k][(i, j)] = br[k];
                }
            }
        }
        // ν_new = Pᵀ ν_old, so K = ½ ν_oldᵀ D ν_old = ½ ν_newᵀ P⁻¹ D P⁻ᵀ ν_new.
        let mut d = Matrix::zeros(n, n);
        for i in 0..3 {
            d[(i, i)] = 1.0;
        }
        let q = &p_inv * d * p_inv.transpose();
        let q = (&q + q.transpose()) * 0.5;
        Self::new(
            &format!("so3+R^{extra} (rotated)"),
            &c,
            vec![QuadraticCasimir {
                name: "norm2".into(),
                q,
            }],
        )
    }

    pub fn ad_matrix(&self, u: &Vector) -> Matrix {
        let n = self.ad.len();
        let mut m = Matrix::zeros(n, n);
        for (ui, a) in u.iter().zip(&self.ad) {
            if *ui != 0.0 {
                m += a * *ui;
            }
        }
        m
    }
}

impl LieAlgebra for StructureConstants {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.ad.len()
    }
    fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        if self.abelian {
            return Vector::zeros(u.len());
        }
        self.ad_matrix(u) * v
    }
    fn coad(&self, u: &Vector, nu: &Vector) -> Vector {
        if self.abelian {
            return Vector::zeros(nu.len());
        }
        self.ad_matrix(u).tr_mul(nu)
    }
    fn is_abelian(&self) -> bool {
        self.abelian
    }
    fn casimir_names(&self) -> Vec<String> {
        self.casimirs.iter().map(|c| c.name.clone()).collect()
    }
    fn casimir(&self, name: &str, nu: &Vector) -> Option<f64> {
        let c = self.casimirs.iter().find(|c| c.name == name)?;
        Some(0.5 * nu.dot(&(&c.q * nu)))
    }
    fn casimir_gradient(&self, name: &str, nu: &Vector) -> Option<Vector> {
        let c = self.casimirs.iter().find(|c| c.name == name)?;
        Some(&c.q * nu)
    }
}

/// `𝔭 = 𝔡 × 𝔤` with the direct-product bracket. Vectors are `(d-part, g-part)`.
#[derive(Debug, Clone)]
pub struct ProductAlgebra {
    pub d: Arc<dyn LieAlgebra>,
    pub g: Arc<dyn LieAlgebra>,
}

impl ProductAlgebra {
    pub fn new(d: Arc<dyn LieAlgebra>, g: Arc<dyn LieAlgebra>) -> Self {
        Self { d, g }
    }

    pub fn split(&self, x: &Vector) -> (Vector, Vector) {
        let nd = self.d.dim();
        (
            x.rows(0, nd).into_owned(),
            x.rows(nd, self.g.dim()).into_owned(),
        )
    }

    pub fn join(&self, a: &Vector, b: &Vector) -> Vector {
        concat(a, b)
    }
}

impl LieAlgebra for ProductAlgebra {
    fn name(&self) -> &str {
        "product"
    }
    fn dim(&self) -> usize {
        self.d.dim() + self.g.dim()
    }
    fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        let (ud, ug) = self.split(u);
        let (vd, vg) = self.split(v);
        concat(&self.d.bracket(&ud, &vd), &self.g.bracket(&ug, &vg))
    }
    fn coad(&self, u: &Vector, nu: &Vector) -> Vector {
        let (ud, ug) = self.split(u);
        let (nd, ng) = self.split(nu);
        concat(&self.d.coad(&ud, &nd), &self.g.coad(&ug, &ng))
    }
    fn exact_jacobi(&self) -> bool {
        self.d.exact_jacobi() && self.g.exact_jacobi()
    }
    fn casimir_names(&self) -> Vec<String> {
        self.d.casimir_names()
    }
    fn casimir(&self, name: &str, nu: &Vector) -> Option<f64> {
        self.d.casimir(name, &self.split(nu).0)
    }
    fn casimir_gradient(&self, name: &str, nu: &Vector) -> Option<Vector> {
        let g = self.d.casimir_gradient(name, &self.split(nu).0)?;
        Some(concat(&g, &Vector::zeros(self.g.dim())))
    }
}

pub fn concat(a: &Vector, b: &Vector) -> Vector {
    let mut out = Vector::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(a);
    out.rows_mut(a.len(), b.len()).copy_from(b);
    out
}

/// A matrix-free linear map with its transpose.
pub trait Operator: Send + Sync + fmt::Debug {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn apply_t(&self, y: &Vector) -> Vector;
}

/// A linear map between algebras and duals, dense or matrix-free.
#[derive(Debug, Clone)]
pub enum LinearMap {
    Dense(Matrix),
    Identity(usize),
    Op(Arc<dyn Operator>),
}

#[derive(Debug)]
struct Transposed(Arc<dyn Operator>);

impl Operator for Transposed {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.0.apply_t(x)
    }
    fn apply_t(&self, y: &Vector) -> Vector {
        self.0.apply(y)
    }
}

#[derive(Debug)]
struct Scaled(Arc<dyn Operator>, f64);

impl Operator for Scaled {
    fn nrows(&self) -> usize {
        self.0.nrows()
    }
    fn ncols(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.0.apply(x) * self.1
    }
    fn apply_t(&self, y: &Vector) -> Vector {
        self.0.apply_t(y) * self.1
    }
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        LinearMap::Identity(n)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinearMap::Dense(Matrix::zeros(rows, cols))
    }

    pub fn op(op: impl Operator + 'static) -> Self {
        LinearMap::Op(Arc::new(op))
    }

    pub fn nrows(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.nrows(),
            LinearMap::Identity(n) => *n,
            LinearMap::Op(o) => o.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.ncols(),
            LinearMap::Identity(n) => *n,
            LinearMap::Op(o) => o.ncols(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        match self {
            LinearMap::Dense(m) => m * x,
            LinearMap::Identity(_) => x.clone(),
            LinearMap::Op(o) => o.apply(x),
        }
    }

    pub fn apply_t(&self, y: &Vector) -> Vector {
        match self {
            LinearMap::Dense(m) => m.tr_mul(y),
            LinearMap::Identity(_) => y.clone(),
            LinearMap::Op(o) => o.apply_t(y),
        }
    }

    pub fn try_apply(&self, x: &Vector) -> Result<Vector> {
        check_dim("linear map input", self.ncols(), x.len())?;
        Ok(self.apply(x))
    }

    pub fn transpose(&self) -> Self {
        match self {
            LinearMap::Dense(m) => LinearMap::Dense(m.transpose()),
            LinearMap::Identity(n) => LinearMap::Identity(*n),
            LinearMap::Op(o) => LinearMap::Op(Arc::new(Transposed(o.clone()))),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        match self {
            LinearMap::Dense(m) => LinearMap::Dense(m * a),
            LinearMap::Identity(n) => LinearMap::Dense(Matrix::identity(*n, *n) * a),
            LinearMap::Op(o) => LinearMap::Op(Arc::new(Scaled(o.clone(), a))),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, LinearMap::Identity(_))
    }

    /// Materialise by applying to the unit vectors.
    pub fn to_dense(&self) -> Matrix {
        match self {
            LinearMap::Dense(m) => m.clone(),
            LinearMap::Identity(n) => Matrix::identity(*n, *n),
            LinearMap::Op(o) => {
                let (r, c) = (o.nrows(), o.ncols());
                let mut m = Matrix::zeros(r, c);
                for j in 0..c {
                    let e = Vector::from_fn(c, |i, _| if i == j { 1.0 } else { 0.0 });
                    m.set_column(j, &o.apply(&e));
                }
                m
            }
        }
    }

    /// `max|M − Mᵀ| / max(1, max|M|)`.
    pub fn symmetry_residual(&self) -> f64 {
        let m = self.to_dense();
        if m.nrows() != m.ncols() {
            return f64::INFINITY;
        }
        (&m - m.transpose()).amax() / m.amax().max(1.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_sym_eigenvalue(&self.to_dense())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_residual() < tol
    }

    pub fn is_positive_definite(&self, tol: f64) -> bool {
        self.is_symmetric(1e-12) && self.min_eigenvalue() > tol
    }
}

impl From<Matrix> for LinearMap {
    fn from(m: Matrix) -> Self {
        LinearMap::Dense(m)
    }
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_sym_eigenvalue(m: &Matrix) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}
