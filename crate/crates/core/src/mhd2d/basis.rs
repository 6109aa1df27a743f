//! Galerkin space on the channel `[0, Lπ] × [0, Wπ]`.
//!
//! `V⁺ = span{φ_mn = sin(mx/L) sin(ny/W)} ⊕ span{cos y}`. A coefficient vector
//! has the `Nx·Ny` sine coefficients first, at index `(m−1)·Ny + (n−1)`, and
//! the `cos y` amplitude last. The background mode is what makes the shear
//! equilibrium `ψ_e = cos y` exactly representable.
//!
//! Gram matrix `M = [[cI, m], [mᵀ, d]]` and stiffness
//! `K_γ = [[cΛ_γ, (1−γ)m], [(1−γ)mᵀ, (1−γ)d]]` with `K_γ = ∫∇φ·∇_γφ` and
//! `Λ_γ = m²/L² + (1−γ)n²/W²`. Both are solved through the Schur complement
//! of the last row.

use std::f64::consts::PI;

use super::ChannelConfig;
use crate::{Matrix, Vector};

#[derive(Debug, Clone)]
pub struct ChannelBasis {
    pub nx: usize,
    pub ny: usize,
    pub length: f64,
    pub width: f64,
    /// `∫φ_mn²`
    pub c: f64,
    /// `∫φ_mn cos y`
    pub m_bg: Vector,
    /// `∫cos² y`
    pub d: f64,
    /// `m²/L²` per sine index
    pub kx2: Vector,
    /// `n²/W²` per sine index
    pub ky2: Vector,
    /// `∫φ_k`, used for the mean vorticity
    pub mean_weights: Vector,
    pub(crate) grid: Grid,
    /// `(m/L)·L∫₀^π sin(pt)cos(mt)dt`, rows `p`, cols `m`
    pub(crate) bg_x: Matrix,
    /// `W∫₀^π sin(qs)sin(ns)sin(Ws)ds`, rows `q`, cols `n`
    pub(crate) bg_y: Matrix,
}

/// Interior DST-I grid used for the sine-sine products.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub px: usize,
    pub py: usize,
    /// `sin(m t_j)`, `px × nx`
    pub sx: Matrix,
    /// `(m/L) cos(m t_j)`, `px × nx`
    pub cx: Matrix,
    /// `sin(n s_k)ᵀ`, `ny × py`
    pub sy_t: Matrix,
    /// `((n/W) cos(n s_k))ᵀ`, `ny × py`
    pub cy_t: Matrix,
    /// truncated forward DST, `nx × px`
    pub fx: Matrix,
    /// truncated forward DST transposed, `py × ny`
    pub fy_t: Matrix,
    /// `∫cos y · (grid function)` factorises into `wxᵀ F wy`
    pub wx: Vector,
    pub wy: Vector,
}

/// `∫₀^π sin(pt) dt`
fn int_sin(p: i64) -> f64 {
    if p % 2 == 0 {
        0.0
    } else {
        2.0 / p as f64
    }
}

/// `∫₀^π sin(qs) cos(ks) ds`
fn int_sin_cos(q: i64, k: i64) -> f64 {
    if (q + k) % 2 == 0 || q == k || q == -k {
        0.0
    } else {
        2.0 * q as f64 / (q * q - k * k) as f64
    }
}

/// `∫₀^π cos(ks) sin(Ws) ds`
fn int_cos_sin(k: i64, w: i64) -> f64 {
    int_sin_cos(w, k)
}

impl ChannelBasis {
    pub fn new(cfg: &ChannelConfig) -> Self {
        let (nx, ny) = (cfg.nx, cfg.ny);
        let (l, w) = (cfg.length, cfg.width);
        let wi = cfg.width.round() as i64;
        let ns = nx * ny;

        let c = (L_PI(l) / 2.0) * (L_PI(w) / 2.0);
        let d = L_PI(l) * L_PI(w) / 2.0;
        let gx: Vec<f64> = (1..=nx as i64).map(|p| l * int_sin(p)).collect();
        let gy: Vec<f64> = (1..=ny as i64).map(|q| w * int_sin_cos(q, wi)).collect();
        let gy0: Vec<f64> = (1..=ny as i64).map(|q| w * int_sin(q)).collect();

        let mut m_bg = Vector::zeros(ns);
        let mut mean_weights = Vector::zeros(ns + 1);
        let mut kx2 = Vector::zeros(ns);
        let mut ky2 = Vector::zeros(ns);
        #[allow(clippy::needless_range_loop)]
        for m in 0..nx {
            for n in 0..ny {
                let i = m * ny + n;
                m_bg[i] = gx[m] * gy[n];
                mean_weights[i] = gx[m] * gy0[n];
                kx2[i] = ((m + 1) as f64 / l).powi(2);
                ky2[i] = ((n + 1) as f64 / w).powi(2);
            }
        }

        let bg_x = Matrix::from_fn(nx, nx, |p, m| {
            let (p, m) = (p as i64 + 1, m as i64 + 1);
            (m as f64 / l) * l * int_sin_cos(p, m)
        });
        let bg_y = Matrix::from_fn(ny, ny, |q, n| {
            let (q, n) = (q as i64 + 1, n as i64 + 1);
            w * 0.5 * (int_cos_sin(q - n, wi) - int_cos_sin(q + n, wi))
        });

        let grid = Grid::new(cfg, nx, ny, l, w, wi);
        Self {
            nx,
            ny,
            length: l,
            width: w,
            c,
            m_bg,
            d,
            kx2,
            ky2,
            mean_weights,
            grid,
            bg_x,
            bg_y,
        }
    }

    pub fn n_sine(&self) -> usize {
        self.nx * self.ny
    }

    /// Total coefficient count, `Nx·Ny + 1`.
    pub fn dim(&self) -> usize {
        self.nx * self.ny + 1
    }

    pub fn index(&self, m: usize, n: usize) -> usize {
        (m - 1) * self.ny + (n - 1)
    }

    pub fn bg_index(&self) -> usize {
        self.n_sine()
    }

    /// Sine block as an `Nx × Ny` matrix and the background amplitude.
    pub fn split(&self, v: &Vector) -> (Matrix, f64) {
        let (nx, ny) = (self.nx, self.ny);
        (Matrix::from_fn(nx, ny, |m, n| v[m * ny + n]), v[nx * ny])
    }

    pub fn join(&self, s: &Matrix, bg: f64) -> Vector {
        let ny = self.ny;
        let mut v = Vector::zeros(self.dim());
        for m in 0..self.nx {
            for n in 0..ny {
                v[m * ny + n] = s[(m, n)];
            }
        }
        v[self.n_sine()] = bg;
        v
    }

    /// `−(m²/L² + (1−γ)n²/W²)` per sine index.
    pub fn delta_gamma_multipliers(&self, gamma: f64) -> Vector {
        -(&self.kx2 + &self.ky2 * (1.0 - gamma))
    }

    pub fn mass_apply(&self, x: &Vector) -> Vector {
        let ns = self.n_sine();
        let a = x[ns];
        let xs = x.rows(0, ns);
        let mut out = Vector::zeros(ns + 1);
        out.rows_mut(0, ns).copy_from(&(xs * self.c + &self.m_bg * a));
        out[ns] = self.m_bg.dot(&xs) + self.d * a;
        out
    }

    pub fn mass_solve(&self, r: &Vector) -> Vector {
        let ns = self.n_sine();
        let rs = r.rows(0, ns);
        let schur = self.d - self.m_bg.norm_squared() / self.c;
        let a = (r[ns] - self.m_bg.dot(&rs) / self.c) / schur;
        let mut out = Vector::zeros(ns + 1);
        out.rows_mut(0, ns).copy_from(&((rs - &self.m_bg * a) / self.c));
        out[ns] = a;
        out
    }

    pub fn stiffness_apply(&self, gamma: f64, x: &Vector) -> Vector {
        let ns = self.n_sine();
        let g1 = 1.0 - gamma;
        let a = x[ns];
        let xs = x.rows(0, ns);
        let lam = &self.kx2 + &self.ky2 * g1;
        let mut out = Vector::zeros(ns + 1);
        out.rows_mut(0, ns)
            .copy_from(&(xs.component_mul(&lam) * self.c + &self.m_bg * (g1 * a)));
        out[ns] = g1 * (self.m_bg.dot(&xs) + self.d * a);
        out
    }

    pub fn stiffness_solve(&self, gamma: f64, r: &Vector) -> Vector {
        let ns = self.n_sine();
        let g1 = 1.0 - gamma;
        let rs = r.rows(0, ns);
        let diag = (&self.kx2 + &self.ky2 * g1) * self.c;
        let m_over = self.m_bg.component_div(&diag);
        let schur = g1 * self.d - g1 * g1 * self.m_bg.dot(&m_over);
        let a = (r[ns] - g1 * m_over.dot(&rs)) / schur;
        let mut out = Vector::zeros(ns + 1);
        out.rows_mut(0, ns)
            .copy_from(&(rs.component_div(&diag) - m_over * (g1 * a)));
        out[ns] = a;
        out
    }

    /// Moments `r_k = ∫φ_k J(ψ, ω)` with `J(a,b) = a_x b_y − a_y b_x`.
    ///
    /// The sine-sine product is formed on the grid; products with the
    /// background mode, `sin y ∂x(aω − bψ)`, are projected in closed form.
    pub fn jacobian_moments(&self, psi: &Vector, omega: &Vector) -> Vector {
        let (ps, a) = self.split(psi);
        let (ws, b) = self.split(omega);
        let g = &self.grid;

        let psi_x = &g.cx * &ps * &g.sy_t;
        let psi_y = &g.sx * &ps * &g.cy_t;
        let om_x = &g.cx * &ws * &g.sy_t;
        let om_y = &g.sx * &ws * &g.cy_t;
        let jac = psi_x.component_mul(&om_y) - psi_y.component_mul(&om_x);

        let mut rs = &g.fx * &jac * &g.fy_t * self.c;
        if a != 0.0 || b != 0.0 {
            let mix = ws * a - ps * b;
            rs += &self.bg_x * mix * self.bg_y.transpose();
        }
        let r_bg = g.wx.dot(&(&jac * &g.wy));
        self.join(&rs, r_bg)
    }

    /// Field values on the interior grid, background included.
    pub fn to_grid(&self, v: &Vector) -> Matrix {
        let (s, bg) = self.split(v);
        let g = &self.grid;
        let mut f = &g.sx * s * &g.sy_t;
        if bg != 0.0 {
            let w = self.width;
            for k in 0..g.py {
                let y = (k + 1) as f64 * PI * w / (g.py + 1) as f64;
                let cy = bg * y.cos();
                for j in 0..g.px {
                    f[(j, k)] += cy;
                }
            }
        }
        f
    }

    pub fn grid_points(&self) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        (
            (1..=g.px)
                .map(|j| j as f64 * PI * self.length / (g.px + 1) as f64)
                .collect(),
            (1..=g.py)
                .map(|k| k as f64 * PI * self.width / (g.py + 1) as f64)
                .collect(),
        )
    }
}

#[allow(non_snake_case)]
fn L_PI(x: f64) -> f64 {
    x * PI
}

impl Grid {
    fn new(cfg: &ChannelConfig, nx: usize, ny: usize, l: f64, w: f64, wi: i64) -> Self {
        let (px, py) = if cfg.dealias { (2 * nx, 2 * ny) } else { (nx, ny) };
        let tx = |j: usize| (j + 1) as f64 * PI / (px + 1) as f64;
        let ty = |k: usize| (k + 1) as f64 * PI / (py + 1) as f64;
        let sx = Matrix::from_fn(px, nx, |j, m| ((m + 1) as f64 * tx(j)).sin());
        let cx = Matrix::from_fn(px, nx, |j, m| {
            (m + 1) as f64 / l * ((m + 1) as f64 * tx(j)).cos()
        });
        let sy_t = Matrix::from_fn(ny, py, |n, k| ((n + 1) as f64 * ty(k)).sin());
        let cy_t = Matrix::from_fn(ny, py, |n, k| {
            (n + 1) as f64 / w * ((n + 1) as f64 * ty(k)).cos()
        });
        let fwd = |p: usize, t: f64, size: usize| 2.0 / (size + 1) as f64 * ((p + 1) as f64 * t).sin();
        let fx = Matrix::from_fn(nx, px, |p, j| fwd(p, tx(j), px));
        let fy_t = Matrix::from_fn(py, ny, |k, q| fwd(q, ty(k), py));
        let wx = Vector::from_fn(px, |j, _| {
            (0..px)
                .map(|p| fwd(p, tx(j), px) * l * int_sin(p as i64 + 1))
                .sum()
        });
        let wy = Vector::from_fn(py, |k, _| {
            (0..py)
                .map(|q| fwd(q, ty(k), py) * w * int_sin_cos(q as i64 + 1, wi))
                .sum()
        });
        Self {
            px,
            py,
            sx,
            cx,
            sy_t,
            cy_t,
            fx,
            fy_t,
            wx,
            wy,
        }
    }
}
