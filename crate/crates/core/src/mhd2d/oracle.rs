//! Dense Galerkin reference for small truncations.
//!
//! Everything here is assembled by tensor Gauss-Legendre quadrature directly
//! from the basis functions: the Gram matrix, the stiffness matrices and the
//! trilinear tensor `T_k[i][j] = ∫φ_k J(φ_i, φ_j)`. Nothing is shared with the
//! transform path except the coefficient layout.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;

use super::ChannelConfig;
use crate::algebra::{LieAlgebra, ProductAlgebra};
use crate::closed_loop::{ControlledSystem, Mode};
use crate::error::{Error, Result};
use crate::gains::GainSet;
use crate::kaluza::{KaluzaKlein, Orientation};
use crate::{Matrix, Vector};

/// Largest mode count per direction the oracle accepts.
pub const MAX_MODES: usize = 8;

/// Nodes and weights on `[a, b]` (Golub-Welsch).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let jac = Matrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (half, mid) = ((b - a) / 2.0, (a + b) / 2.0);
    pairs
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .unzip()
}

#[derive(Debug, Clone)]
pub struct GalerkinOracle {
    pub cfg: ChannelConfig,
    /// Gram matrix
    pub mass: Matrix,
    /// `∫∂xφ_i∂xφ_j` and `∫∂yφ_i∂yφ_j`
    pub kxx: Matrix,
    pub kyy: Matrix,
    pub tensor: Vec<Matrix>,
    pub mean: Vector,
}

impl GalerkinOracle {
    pub fn new(cfg: &ChannelConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.nx > MAX_MODES || cfg.ny > MAX_MODES {
            return Err(Error::InvalidConfig(format!(
                "oracle limited to {MAX_MODES}x{MAX_MODES} modes"
            )));
        }
        let (l, w) = (cfg.length, cfg.width);
        let pi = std::f64::consts::PI;
        let nq_x = 3 * cfg.nx + 24;
        let nq_y = 3 * cfg.ny + w as usize + 24;
        let (xs, wxs) = gauss_legendre(nq_x, 0.0, l * pi);
        let (ys, wys) = gauss_legendre(nq_y, 0.0, w * pi);
        let n = cfg.nx * cfg.ny + 1;
        let g = nq_x * nq_y;

        // rows: quadrature points, cols: basis functions
        let mut phi = Matrix::zeros(g, n);
        let mut dx = Matrix::zeros(g, n);
        let mut dy = Matrix::zeros(g, n);
        let mut wt = Vector::zeros(g);
        for (a, (&x, &wx)) in xs.iter().zip(&wxs).enumerate() {
            for (b, (&y, &wy)) in ys.iter().zip(&wys).enumerate() {
                let row = a * nq_y + b;
                wt[row] = wx * wy;
                for m in 1..=cfg.nx {
                    let kx = m as f64 / l;
                    for k in 1..=cfg.ny {
                        let ky = k as f64 / w;
                        let col = (m - 1) * cfg.ny + (k - 1);
                        phi[(row, col)] = (kx * x).sin() * (ky * y).sin();
                        dx[(row, col)] = kx * (kx * x).cos() * (ky * y).sin();
                        dy[(row, col)] = ky * (kx * x).sin() * (ky * y).cos();
                    }
                }
                phi[(row, n - 1)] = y.cos();
                dy[(row, n - 1)] = -y.sin();
            }
        }
        let weigh = |m: &Matrix| {
            let mut out = m.clone();
            for (r, mut row) in out.row_iter_mut().enumerate() {
                row *= wt[r];
            }
            out
        };
        let (wphi, wdx, wdy) = (weigh(&phi), weigh(&dx), weigh(&dy));
        let mass = phi.tr_mul(&wphi);
        let kxx = dx.tr_mul(&wdx);
        let kyy = dy.tr_mul(&wdy);
        let mean = wphi.row_sum().transpose();

        let tensor: Vec<Matrix> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut sdx = dx.clone();
                for (r, mut row) in sdx.row_iter_mut().enumerate() {
                    row *= wphi[(r, k)];
                }
                let a = sdx.tr_mul(&dy);
                &a - a.transpose()
            })
            .collect();
        Ok(Self {
            cfg: *cfg,
            mass,
            kxx,
            kyy,
            tensor,
            mean,
        })
    }

    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn stiffness(&self, gamma: f64) -> Matrix {
        &self.kxx + &self.kyy * (1.0 - gamma)
    }

    /// `[∫φ_k J(ψ, ω)]_k`
    pub fn jacobian_moments(&self, psi: &Vector, omega: &Vector) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.tensor.iter().map(|t| psi.dot(&(t * omega))),
        )
    }

    fn inv(m: &Matrix) -> Matrix {
        m.clone().try_inverse().expect("Gram and stiffness matrices are SPD")
    }

    /// Dense `(μ₀, 𝕀₀, 𝒜₀)` in moment coordinates.
    pub fn kaluza_klein(&self) -> Result<KaluzaKlein> {
        let mi = Self::inv(&self.mass);
        let e2 = self.cfg.charge.powi(2);
        let n = self.dim();
        KaluzaKlein::new(
            &mi * self.stiffness(0.0) * &mi,
            &mi * e2,
            -Matrix::identity(n, n),
        )
    }

    /// `C = I − M⁻¹K₀K_γ⁻¹M`.
    pub fn gain(&self) -> Matrix {
        let n = self.dim();
        Matrix::identity(n, n)
            - Self::inv(&self.mass) * self.stiffness(0.0) * Self::inv(&self.stiffness(self.cfg.gamma)) * &self.mass
    }

    /// Dense closed loop; `μ_C` is derived from `C` by the generic route.
    pub fn system(&self, s: f64) -> Result<ControlledSystem> {
        let alg = Arc::new(OracleAlgebra::new(self.clone()));
        let n = self.dim();
        let gains = GainSet::new(self.gain(), Matrix::identity(n, n), s, Orientation::Right)?;
        ControlledSystem::new(ProductAlgebra::new(alg.clone(), alg), self.kaluza_klein()?, gains, Mode::Dissipative)
    }

    /// Closed-loop `z` field in stream-function form with `s = −1`:
    ///
    /// ```text
    /// ψ_C = −K_γ⁻¹Mω,  N = −e²K₀⁻¹·r(ψ_C, ω),
    /// ψ_w = ψ_C − K₀⁻¹M(b − N),
    /// ω̇ = −M⁻¹r(ψ_w, ω),  ḃ = −b − N,
    /// ```
    /// with `r(ψ, ω)_k = ∫φ_k J(ψ, ω)`.
    pub fn closed_loop_field(&self, omega: &Vector, b: &Vector) -> (Vector, Vector) {
        let e2 = self.cfg.charge.powi(2);
        let k0 = self.stiffness(0.0);
        let kg = self.stiffness(self.cfg.gamma);
        let solve = |m: &Matrix, r: &Vector| m.clone().cholesky().expect("SPD").solve(r);
        let psi_c = -solve(&kg, &(&self.mass * omega));
        let n_val = -solve(&k0, &self.jacobian_moments(&psi_c, omega)) * e2;
        let psi_w = &psi_c - solve(&k0, &(&self.mass * (b - &n_val)));
        let omega_dot = -solve(&self.mass, &self.jacobian_moments(&psi_w, omega));
        (omega_dot, -b - n_val)
    }
}

/// The fluid algebra with brackets taken from the quadrature tensor.
#[derive(Debug, Clone)]
pub struct OracleAlgebra {
    oracle: GalerkinOracle,
    mass_inv: Matrix,
}

impl OracleAlgebra {
    pub fn new(oracle: GalerkinOracle) -> Self {
        let mass_inv = GalerkinOracle::inv(&oracle.mass);
        Self { oracle, mass_inv }
    }

    fn stream(&self, u: &Vector) -> Vector {
        -(&self.mass_inv * u)
    }
}

impl LieAlgebra for OracleAlgebra {
    fn name(&self) -> &str {
        "sdiff(channel) oracle"
    }

    fn dim(&self) -> usize {
        self.oracle.dim()
    }

    fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        self.oracle.jacobian_moments(&self.stream(u), &self.stream(v))
    }

    fn coad(&self, u: &Vector, nu: &Vector) -> Vector {
        &self.mass_inv * self.oracle.jacobian_moments(&self.stream(u), nu)
    }

    fn exact_jacobi(&self) -> bool {
        false
    }

    fn casimir_names(&self) -> Vec<String> {
        vec!["enstrophy".into()]
    }

    fn casimir(&self, name: &str, nu: &Vector) -> Option<f64> {
        (name == "enstrophy").then(|| nu.dot(&(&self.oracle.mass * nu)))
    }

    fn casimir_gradient(&self, name: &str, nu: &Vector) -> Option<Vector> {
        (name == "enstrophy").then(|| &self.oracle.mass * nu * 2.0)
    }
}
