//! Double-bracket dissipative feedback and its IDA-PBC structure.
//!
//! Notation: `σ` is the orientation sign (`+` left, `−` right), `s = ±1`
//! selects an energy minimum (`+1`) or maximum (`−1`). The closed loop is
//! written in two charts, `x = (ν, α)` and `z = (ν, β) = Φ(x)` with
//! `β = G⁻¹(α + Cν + N(ν))`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{concat, LieAlgebra, LinearMap, Operator, ProductAlgebra};
use crate::error::{check_dim, Error, Result};
use crate::gains::{match_structure, mu_c_from_gain, GainSet};
use crate::kaluza::KaluzaKlein;
use crate::Vector;

/// `Matched` is the non-dissipative controlled-Lagrangian loop (`N ≡ 0`, no `U_diss`);
/// `Dissipative` adds the double-bracket term and the damping force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Matched,
    Dissipative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// second component is `α`
    X,
    /// second component is `β`
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub nu: Vector,
    pub second: Vector,
    pub chart: Chart,
}

impl State {
    pub fn x(nu: Vector, alpha: Vector) -> Self {
        Self {
            nu,
            second: alpha,
            chart: Chart::X,
        }
    }

    pub fn z(nu: Vector, beta: Vector) -> Self {
        Self {
            nu,
            second: beta,
            chart: Chart::Z,
        }
    }

    pub fn to_vector(&self) -> Vector {
        concat(&self.nu, &self.second)
    }

    pub fn from_vector(v: &Vector, dim_d: usize, chart: Chart) -> Self {
        Self {
            nu: v.rows(0, dim_d).into_owned(),
            second: v.rows(dim_d, v.len() - dim_d).into_owned(),
            chart,
        }
    }
}

/// A scalar function on `𝔡*` known through its gradient.
#[derive(Clone)]
pub enum Observable {
    /// `f(ν) = ν_i`
    Coordinate(usize),
    /// `ν ↦ δf/δν`
    Gradient(Arc<dyn Fn(&Vector) -> Vector + Send + Sync>),
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Coordinate(i) => write!(f, "Coordinate({i})"),
            Observable::Gradient(_) => write!(f, "Gradient(..)"),
        }
    }
}

impl Observable {
    fn gradient(&self, nu: &Vector) -> Vector {
        match self {
            Observable::Coordinate(i) => {
                Vector::from_fn(nu.len(), |k, _| if k == *i { 1.0 } else { 0.0 })
            }
            Observable::Gradient(g) => g(nu),
        }
    }
}

#[derive(Debug)]
struct Chain {
    maps: Vec<LinearMap>,
    scale: f64,
}

impl Operator for Chain {
    fn nrows(&self) -> usize {
        self.maps[0].nrows()
    }
    fn ncols(&self) -> usize {
        self.maps[self.maps.len() - 1].ncols()
    }
    fn apply(&self, x: &Vector) -> Vector {
        let mut y = x.clone();
        for m in self.maps.iter().rev() {
            y = m.apply(&y);
        }
        y * self.scale
    }
    fn apply_t(&self, x: &Vector) -> Vector {
        let mut y = x.clone();
        for m in &self.maps {
            y = m.apply_t(&y);
        }
        y * self.scale
    }
}

/// `scale · m₀ m₁ … m_k`, dense when every factor is.
fn compose(maps: Vec<LinearMap>, scale: f64) -> LinearMap {
    if maps
        .iter()
        .all(|m| matches!(m, LinearMap::Dense(_) | LinearMap::Identity(_)))
    {
        let mut acc = maps[maps.len() - 1].to_dense();
        for m in maps.iter().rev().skip(1) {
            acc = m.to_dense() * acc;
        }
        LinearMap::Dense(acc * scale)
    } else {
        LinearMap::op(Chain { maps, scale })
    }
}

#[derive(Debug, Clone)]
pub struct ControlledSystem {
    pub algebra: ProductAlgebra,
    pub kk: KaluzaKlein,
    pub gains: GainSet,
    pub mode: Mode,
    /// `μ_C⁻¹: 𝔡*→𝔡`
    pub mu_c_inv: LinearMap,
    /// `Γ = ±μ₀⁻¹𝒜₀*𝕀₀𝒜₀μ₀⁻¹`
    pub gamma: LinearMap,
}

impl ControlledSystem {
    /// Dense construction: `μ_C` is derived from `C` and must be admissible.
    /// Matched mode additionally requires the matching conditions.
    pub fn new(algebra: ProductAlgebra, kk: KaluzaKlein, gains: GainSet, mode: Mode) -> Result<Self> {
        let (mu_c, admissible) = mu_c_from_gain(&kk, &gains.c)?;
        if !admissible {
            return Err(Error::NotPositiveDefinite {
                what: "mu_C",
                min_eigenvalue: crate::algebra::min_sym_eigenvalue(&mu_c),
            });
        }
        if mode == Mode::Matched {
            match_structure(&kk, &gains).map_err(|f| {
                Error::ModeConflict(format!("matched mode requested but gains do not match: {f}"))
            })?;
        }
        let mu_c_inv = mu_c.try_inverse().ok_or(Error::NotInvertible("mu_C"))?;
        Self::with_metric(algebra, kk, gains, mode, mu_c_inv.into())
    }

    /// Construction with a caller-supplied `μ_C⁻¹` (matrix-free systems).
    pub fn with_metric(
        algebra: ProductAlgebra,
        kk: KaluzaKlein,
        gains: GainSet,
        mode: Mode,
        mu_c_inv: LinearMap,
    ) -> Result<Self> {
        let (nd, ng) = (algebra.d.dim(), algebra.g.dim());
        check_dim("mu0", nd, kk.dim_d())?;
        check_dim("I0", ng, kk.dim_g())?;
        check_dim("C rows", ng, gains.c.nrows())?;
        check_dim("C cols", nd, gains.c.ncols())?;
        check_dim("G", ng, gains.g.nrows())?;
        check_dim("mu_C^-1", nd, mu_c_inv.nrows())?;
        let gamma = compose(
            vec![
                kk.mu0_inv.clone(),
                kk.a0.transpose(),
                kk.i0.clone(),
                kk.a0.clone(),
                kk.mu0_inv.clone(),
            ],
            gains.sign(),
        );
        Ok(Self {
            algebra,
            kk,
            gains,
            mode,
            mu_c_inv,
            gamma,
        })
    }

    pub fn dim_d(&self) -> usize {
        self.algebra.d.dim()
    }

    pub fn dim_g(&self) -> usize {
        self.algebra.g.dim()
    }

    pub fn sign(&self) -> f64 {
        self.gains.sign()
    }

    pub fn s(&self) -> f64 {
        self.gains.s
    }

    fn d(&self) -> &dyn LieAlgebra {
        self.algebra.d.as_ref()
    }

    fn g(&self) -> &dyn LieAlgebra {
        self.algebra.g.as_ref()
    }

    pub fn check_state(&self, nu: &Vector, second: &Vector) -> Result<()> {
        check_dim("nu", self.dim_d(), nu.len())?;
        check_dim("second component", self.dim_g(), second.len())
    }

    /// `𝕀₀𝒜₀μ₀⁻¹ w`
    fn lift(&self, w: &Vector) -> Vector {
        self.kk.i0.apply(&self.kk.a0.apply(&self.kk.mu0_inv.apply(w)))
    }

    /// `μ₀⁻¹𝒜₀* w`
    fn drop_to_d(&self, w: &Vector) -> Vector {
        self.kk.mu0_inv.apply(&self.kk.a0.apply_t(w))
    }

    /// `N(ν) = ±s𝕀₀𝒜₀μ₀⁻¹ ad(μ_C⁻¹ν)*ν`; identically zero in matched mode.
    pub fn n_map(&self, nu: &Vector) -> Vector {
        if self.mode == Mode::Matched {
            return Vector::zeros(self.dim_g());
        }
        let c = self.d().coad(&self.mu_c_inv.apply(nu), nu);
        self.lift(&c) * (self.sign() * self.s())
    }

    /// `dN(ν)η = ±s𝕀₀𝒜₀μ₀⁻¹(ad(μ_C⁻¹η)*ν + ad(μ_C⁻¹ν)*η)`.
    pub fn dn_apply(&self, nu: &Vector, eta: &Vector) -> Vector {
        if self.mode == Mode::Matched {
            return Vector::zeros(self.dim_g());
        }
        let c = self.d().coad(&self.mu_c_inv.apply(eta), nu)
            + self.d().coad(&self.mu_c_inv.apply(nu), eta);
        self.lift(&c) * (self.sign() * self.s())
    }

    /// `𝒰_LP = ±(G ad(X)*G⁻¹(Cν+N+α) − C ad(u)*ν − dN(ν) ad(u)*ν − ad(X)*α)`.
    pub fn u_lp_force(&self, nu: &Vector, alpha: &Vector) -> Vector {
        let (u, x) = self.kk.solve_unchecked(nu, alpha);
        let adu = self.d().coad(&u, nu);
        let n = self.n_map(nu);
        let mut out = -self.gains.c.apply(&adu) - self.dn_apply(nu, &adu);
        if !self.g().is_abelian() {
            let inner = self
                .gains
                .g_inv
                .apply(&(self.gains.c.apply(nu) + &n + alpha));
            out += self.gains.g.apply(&self.g().coad(&x, &inner)) - self.g().coad(&x, alpha);
        }
        out * self.sign()
    }

    /// `δh₀/δα` at `α = Gβ − Cν − N(ν)`.
    pub fn x_at(&self, nu: &Vector, beta: &Vector) -> Vector {
        let alpha = self.phi_inverse(nu, beta);
        self.kk.solve_unchecked(nu, &alpha).1
    }

    /// `𝒰_diss = ∓ad(δh₀/δα)*β − β − G⁻¹N(ν)`; zero in matched mode.
    pub fn u_diss_force(&self, nu: &Vector, beta: &Vector) -> Vector {
        if self.mode == Mode::Matched {
            return Vector::zeros(self.dim_g());
        }
        let mut out = -beta - self.gains.g_inv.apply(&self.n_map(nu));
        if !self.g().is_abelian() {
            out -= self.g().coad(&self.x_at(nu, beta), beta) * self.sign();
        }
        out
    }

    /// `β = G⁻¹(α + Cν + N(ν))`.
    pub fn phi_forward(&self, nu: &Vector, alpha: &Vector) -> Vector {
        self.gains
            .g_inv
            .apply(&(alpha + self.gains.c.apply(nu) + self.n_map(nu)))
    }

    /// `α = Gβ − Cν − N(ν)`.
    pub fn phi_inverse(&self, nu: &Vector, beta: &Vector) -> Vector {
        self.gains.g.apply(beta) - self.gains.c.apply(nu) - self.n_map(nu)
    }

    pub fn to_z(&self, state: &State) -> State {
        match state.chart {
            Chart::Z => state.clone(),
            Chart::X => State::z(state.nu.clone(), self.phi_forward(&state.nu, &state.second)),
        }
    }

    pub fn to_x(&self, state: &State) -> State {
        match state.chart {
            Chart::X => state.clone(),
            Chart::Z => State::x(state.nu.clone(), self.phi_inverse(&state.nu, &state.second)),
        }
    }

    /// `g_C = ½⟨ν,μ_C⁻¹ν⟩ + (s/2)⟨Gβ,𝕀₀⁻¹Gβ⟩`.
    pub fn g_c_eval(&self, nu: &Vector, beta: &Vector) -> f64 {
        let gb = self.gains.g.apply(beta);
        0.5 * nu.dot(&self.mu_c_inv.apply(nu)) + 0.5 * self.s() * gb.dot(&self.kk.i0_inv.apply(&gb))
    }

    /// `(μ_C⁻¹ν, sG*𝕀₀⁻¹Gβ)`.
    pub fn g_c_grad(&self, nu: &Vector, beta: &Vector) -> (Vector, Vector) {
        let gb = self.gains.g.apply(beta);
        (
            self.mu_c_inv.apply(nu),
            self.gains.g.apply_t(&self.kk.i0_inv.apply(&gb)) * self.s(),
        )
    }

    /// `h_d = g_C ∘ Φ`.
    pub fn h_d_eval(&self, nu: &Vector, alpha: &Vector) -> f64 {
        self.g_c_eval(nu, &self.phi_forward(nu, alpha))
    }

    /// `Π_C(z)(v, Y)`; depends on `ν` only.
    pub fn pi_c_apply(&self, nu: &Vector, v: &Vector, y: &Vector) -> (Vector, Vector) {
        let (sg, s) = (self.sign(), self.s());
        let adv = self.d().coad(v, nu);
        let w = self.kk.mu0_inv.apply(
            &self
                .kk
                .a0
                .apply_t(&self.kk.i0.apply(&self.gains.g_inv.apply_t(y))),
        );
        let first = &adv * sg - self.d().coad(&w, nu) * (sg * s);
        let second = self.gains.g_inv.apply(&self.lift(&adv)) * (-sg * s);
        (first, second)
    }

    /// `ℛ_C(z)(v, Y) = s(−ad(μ₀⁻¹𝒜₀*𝕀₀𝒜₀μ₀⁻¹ad(v)*ν)*ν, G⁻¹𝕀₀G⁻*Y)`.
    pub fn r_c_apply(&self, nu: &Vector, v: &Vector, y: &Vector) -> (Vector, Vector) {
        let s = self.s();
        let adv = self.d().coad(v, nu);
        // Γ carries the orientation sign; undo it.
        let w = self.gamma.apply(&adv) * self.sign();
        let first = self.d().coad(&w, nu) * (-s);
        let second = self
            .gains
            .g_inv
            .apply(&self.kk.i0.apply(&self.gains.g_inv.apply_t(y)))
            * s;
        (first, second)
    }

    /// The closed loop in the `z` chart, expanded term by term.
    pub fn ida_field_z(&self, nu: &Vector, beta: &Vector) -> (Vector, Vector) {
        let sg = self.sign();
        let gb = self.gains.g.apply(beta);
        match self.mode {
            Mode::Dissipative => {
                let n = self.n_map(nu);
                let w = self.mu_c_inv.apply(nu) - self.drop_to_d(&(&gb - &n));
                let nu_dot = self.d().coad(&w, nu) * sg;
                let beta_dot = -beta - self.gains.g_inv.apply(&n);
                (nu_dot, beta_dot)
            }
            Mode::Matched => {
                let w = self.mu_c_inv.apply(nu) - self.drop_to_d(&gb);
                let nu_dot = self.d().coad(&w, nu) * sg;
                let beta_dot = if self.g().is_abelian() {
                    Vector::zeros(self.dim_g())
                } else {
                    self.g().coad(&self.x_at(nu, beta), beta) * sg
                };
                (nu_dot, beta_dot)
            }
        }
    }

    /// `(Π_C − ℛ_C) δg_C/δz`.
    pub fn ida_field_z_structured(&self, nu: &Vector, beta: &Vector) -> (Vector, Vector) {
        let (gv, gy) = self.g_c_grad(nu, beta);
        let (p1, p2) = self.pi_c_apply(nu, &gv, &gy);
        let (r1, r2) = self.r_c_apply(nu, &gv, &gy);
        (p1 - r1, p2 - r2)
    }

    /// The feedback-controlled field in the `x` chart, assembled from the forces:
    /// `ν̇ = ±ad(u)*ν`, `α̇ = ±ad(X)*α + 𝒰_LP + G𝒰_diss(Φ(x))`.
    pub fn controlled_field_x(&self, nu: &Vector, alpha: &Vector) -> (Vector, Vector) {
        let sg = self.sign();
        let (u, x) = self.kk.solve_unchecked(nu, alpha);
        let nu_dot = self.d().coad(&u, nu) * sg;
        let mut alpha_dot = self.u_lp_force(nu, alpha);
        if !self.g().is_abelian() {
            alpha_dot += self.g().coad(&x, alpha) * sg;
        }
        if self.mode == Mode::Dissipative {
            let beta = self.phi_forward(nu, alpha);
            alpha_dot += self.gains.g.apply(&self.u_diss_force(nu, &beta));
        }
        (nu_dot, alpha_dot)
    }

    /// The closed-form `x`-chart field in which all `ad(X)*` terms have cancelled:
    /// `α̇ = ∓C ad(u)*ν − s𝕀₀𝒜₀μ₀⁻¹(ad(μ_C⁻¹ad(u)*ν)*ν + ad(μ_C⁻¹ν)*(ad(u)*ν ± 2ν)) − α − Cν`.
    ///
    /// `G` drops out of this form entirely. Dissipative mode only.
    pub fn controlled_field_x_closed_form(&self, nu: &Vector, alpha: &Vector) -> (Vector, Vector) {
        let (sg, s) = (self.sign(), self.s());
        let (u, _) = self.kk.solve_unchecked(nu, alpha);
        let eta = self.d().coad(&u, nu);
        let inner = self.d().coad(&self.mu_c_inv.apply(&eta), nu)
            + self.d().coad(&self.mu_c_inv.apply(nu), &(&eta + nu * (2.0 * sg)));
        let alpha_dot = -self.gains.c.apply(&eta) * sg - self.lift(&inner) * s - alpha - self.gains.c.apply(nu);
        (&eta * sg, alpha_dot)
    }

    /// `TΦ(ν̇, α̇) = (ν̇, G⁻¹(α̇ + Cν̇ + dN(ν)ν̇))`.
    pub fn push_forward(&self, nu: &Vector, nu_dot: &Vector, alpha_dot: &Vector) -> (Vector, Vector) {
        let b = self
            .gains
            .g_inv
            .apply(&(alpha_dot + self.gains.c.apply(nu_dot) + self.dn_apply(nu, nu_dot)));
        (nu_dot.clone(), b)
    }

    /// `d/dt g_C = −s‖N(ν)‖²_{𝕀₀⁻¹} − s‖Gβ‖²_{𝕀₀⁻¹}` in dissipative mode.
    ///
    /// Returns 0 in matched mode, where the conserved quantity is
    /// [`matched_energy`](Self::matched_energy) rather than `g_C`.
    pub fn dissipation_rate(&self, nu: &Vector, beta: &Vector) -> f64 {
        if self.mode == Mode::Matched {
            return 0.0;
        }
        let n = self.n_map(nu);
        let gb = self.gains.g.apply(beta);
        -self.s() * (n.dot(&self.kk.i0_inv.apply(&n)) + gb.dot(&self.kk.i0_inv.apply(&gb)))
    }

    /// `½⟨ν,μ_C⁻¹ν⟩ − ⟨ν,μ₀⁻¹𝒜₀*Gβ⟩`. Its `ν`-gradient is the matched-mode velocity,
    /// so it is a first integral of the matched loop when 𝔤 is abelian.
    pub fn matched_energy(&self, nu: &Vector, beta: &Vector) -> f64 {
        let gb = self.gains.g.apply(beta);
        0.5 * nu.dot(&self.mu_c_inv.apply(nu)) - nu.dot(&self.drop_to_d(&gb))
    }

    /// `{{f,h}}(ν) = ⟨ad(δf/δν)*ν, Γ ad(δh/δν)*ν⟩`.
    pub fn symmetric_bracket(&self, f: &Observable, h: &Observable, nu: &Vector) -> f64 {
        let af = self.d().coad(&f.gradient(nu), nu);
        let ah = self.d().coad(&h.gradient(nu), nu);
        af.dot(&self.gamma.apply(&ah))
    }

    /// Field on the chart carried by `state`.
    pub fn field(&self, state: &State) -> State {
        let (a, b) = match state.chart {
            Chart::X => self.controlled_field_x(&state.nu, &state.second),
            Chart::Z => self.ida_field_z(&state.nu, &state.second),
        };
        State {
            nu: a,
            second: b,
            chart: state.chart,
        }
    }

    /// Flat-vector `z`-chart field, for the integrators.
    pub fn z_field_flat(&self, y: &Vector) -> Vector {
        let nd = self.dim_d();
        let (nu, beta) = (y.rows(0, nd).into_owned(), y.rows(nd, y.len() - nd).into_owned());
        let (a, b) = self.ida_field_z(&nu, &beta);
        concat(&a, &b)
    }

    /// Flat-vector `x`-chart field, for the integrators.
    pub fn x_field_flat(&self, y: &Vector) -> Vector {
        let nd = self.dim_d();
        let (nu, alpha) = (y.rows(0, nd).into_owned(), y.rows(nd, y.len() - nd).into_owned());
        let (a, b) = self.controlled_field_x(&nu, &alpha);
        concat(&a, &b)
    }

    /// `ida_field_z` over many states; order of results matches the input.
    pub fn ida_field_z_batch(&self, states: &[(Vector, Vector)]) -> Vec<(Vector, Vector)> {
        states
            .par_iter()
            .map(|(nu, beta)| self.ida_field_z(nu, beta))
            .collect()
    }
}
