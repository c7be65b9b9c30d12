//! Chemical potential, energy and dissipation of a model on a fixed grid.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{self, cell_grad_sq, face_average, gradient, weighted_div_grad, FaceAverage, FaceField, Field};
use crate::grid::Grid;
use crate::kernel::KernelMatrix;
use crate::linalg::SparseMatrix;
use crate::physics::model::ModelConfig;
use crate::scalar::Real;

/// A [`ModelConfig`] bound to a grid, with the kernel matrix assembled once.
#[derive(Clone, Debug)]
pub struct DiscreteModel<T: Real> {
    config: ModelConfig<T>,
    grid: Grid<T>,
    kernel: Option<KernelMatrix<T>>,
    stabilizer: OnceLock<T>,
}

impl<T: Real> DiscreteModel<T> {
    pub fn new(config: &ModelConfig<T>, grid: Grid<T>) -> Result<Self> {
        config.validate()?;
        let kernel = config.kernel.as_ref().map(|k| k.matrix(grid));
        Ok(DiscreteModel { config: config.clone(), grid, kernel, stabilizer: OnceLock::new() })
    }

    #[inline]
    pub fn config(&self) -> &ModelConfig<T> {
        &self.config
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn kernel(&self) -> Option<&KernelMatrix<T>> {
        self.kernel.as_ref()
    }

    fn consistency(&self) -> T {
        if self.config.nonlocal_consistency {
            T::one()
        } else {
            T::zero()
        }
    }

    /// Shift `c ≥ max(0, −λ_min(K))` making `K + cI` positive semi-definite,
    /// so that `−½φᵀ(K + cI)φ` is concave and may be treated explicitly.
    pub fn kernel_stabilizer(&self) -> T {
        *self.stabilizer.get_or_init(|| match (&self.kernel, &self.config.kernel) {
            (Some(k), Some(spec)) if !spec.is_positive_definite_on(&self.grid) => {
                let lam = k.min_eigenvalue_estimate(600);
                if lam < T::zero() {
                    // Power iteration approaches λ_min from above; pad generously.
                    -lam * T::lit(1.25) + T::lit(1e-12)
                } else {
                    T::zero()
                }
            }
            _ => T::zero(),
        })
    }

    pub(crate) fn check_grid(&self, phi: &Field<T>) -> Result<()> {
        if self.grid.same_as(phi.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Domain check for potential evaluations of the given order.
    pub fn check_bounds(&self, phi: &Field<T>, order: u8) -> Result<()> {
        let limit = if order == 0 { T::one() } else { self.config.potential.bound() };
        match phi.values().iter().find(|v| !(v.abs() <= limit)) {
            Some(&v) => Err(Error::Domain { value: v.as_f64(), order }),
            None => Ok(()),
        }
    }

    pub fn diffusion_faces(&self, phi: &Field<T>) -> FaceField<T> {
        let d = &self.config.diffusion;
        face_average(&phi.map(|s| d.a(s)), FaceAverage::Arithmetic)
    }

    pub fn mobility_faces(&self, phi: &Field<T>) -> FaceField<T> {
        let m = &self.config.mobility;
        face_average(&phi.map(|s| m.eval(s)), self.config.mobility_average)
    }

    /// `Kφ`, or zeros without a kernel.
    pub fn convolve(&self, phi: &Field<T>) -> Vec<T> {
        let mut out = vec![T::zero(); phi.len()];
        if let Some(k) = &self.kernel {
            k.matvec(phi.values(), &mut out);
        }
        out
    }

    /// Row sums `J∗1`, or zeros without a kernel.
    pub fn kernel_mass(&self) -> Vec<T> {
        match &self.kernel {
            Some(k) => k.row_sums().to_vec(),
            None => vec![T::zero(); self.grid.cell_count()],
        }
    }

    /// Local (non-implicit-solve) part of `μ` from the gradient energy:
    /// `−γ div(a∇φ) + γ a′(φ)|∇φ|²/2`.
    fn gradient_part(&self, phi: &Field<T>) -> Vec<T> {
        let c = &self.config;
        if c.gamma == T::zero() {
            return vec![T::zero(); phi.len()];
        }
        let grad = gradient(phi);
        let div = weighted_div_grad(phi, &self.diffusion_faces(phi)).expect("same grid");
        let mut out: Vec<T> = div.values().iter().map(|&v| -c.gamma * v).collect();
        if !c.diffusion.profile.is_constant() {
            let sq = cell_grad_sq(&grad);
            let half = T::lit(0.5);
            for ((o, &s), &g2) in out.iter_mut().zip(phi.values()).zip(sq.values()) {
                *o = *o + c.gamma * half * c.diffusion.da(s) * g2;
            }
        }
        out
    }

    /// `μ(φ)` as prescribed by the model (including the nonlocal consistency
    /// term when enabled).
    pub fn chemical_potential(&self, phi: &Field<T>) -> Result<Field<T>> {
        self.check_grid(phi)?;
        self.check_bounds(phi, 1)?;
        let c = &self.config;
        let mut mu = self.gradient_part(phi);
        for (m, &s) in mu.iter_mut().zip(phi.values()) {
            *m = *m + c.potential.df(s) - c.sigma1 * c.potential.theta0 * s;
        }
        if c.is_nonlocal() {
            let k_phi = self.convolve(phi);
            let w = self.kernel_mass();
            let cons = self.consistency();
            for i in 0..mu.len() {
                mu[i] = mu[i] + c.sigma2 * (cons * w[i] * phi.values()[i] - k_phi[i]);
            }
        }
        Field::new(self.grid, mu)
    }

    /// Cell-wise derivative of [`Self::energy`] divided by the cell volume.
    /// Differs from `μ` only when the nonlocal consistency term is off.
    pub fn energy_gradient(&self, phi: &Field<T>) -> Result<Field<T>> {
        let mu = self.chemical_potential(phi)?;
        if !self.config.is_nonlocal() || self.config.nonlocal_consistency {
            return Ok(mu);
        }
        let w = self.kernel_mass();
        let s2 = self.config.sigma2;
        let vals = mu.values().iter().zip(&w).zip(phi.values()).map(|((&m, &wi), &p)| m + s2 * wi * p).collect();
        Field::new(self.grid, vals)
    }

    /// `E(φ) = (γ/2)Σ a_f|∇φ|² vol + Σ F(φ) vol − σ₁(θ₀/2)Σφ² vol + (σ₂/4)ΣΣ K_ij(φ_i − φ_j)² vol`.
    pub fn energy(&self, phi: &Field<T>) -> Result<T> {
        self.check_grid(phi)?;
        self.check_bounds(phi, 0)?;
        let c = &self.config;
        let vol = self.grid.cell_volume();
        let mut e = T::zero();
        if c.gamma > T::zero() {
            let g = gradient(phi);
            e = e + c.gamma * T::lit(0.5) * g.weighted_dot(&g, Some(&self.diffusion_faces(phi)))?;
        }
        let bulk: Vec<T> = phi.values().iter().map(|&s| c.potential.density(s, c.sigma1)).collect();
        e = e + field::compensated_sum(&bulk) * vol;
        if c.is_nonlocal() {
            e = e + c.sigma2 * self.nonlocal_quadratic(phi);
        }
        Ok(e)
    }

    /// `(1/4)ΣΣ K_ij(φ_i − φ_j)² vol = ½ Σ_i φ_i Σ_j K_ij(φ_i − φ_j) vol`.
    fn nonlocal_quadratic(&self, phi: &Field<T>) -> T {
        let Some(k) = &self.kernel else { return T::zero() };
        let p = phi.values();
        let terms: Vec<T> = (0..p.len())
            .map(|i| {
                let row = k.row(i);
                let s: T = row.iter().zip(p).map(|(&kij, &pj)| kij * (p[i] - pj)).sum();
                p[i] * s
            })
            .collect();
        T::lit(0.5) * field::compensated_sum(&terms) * self.grid.cell_volume()
    }

    /// The functional the evolution actually dissipates: [`Self::energy`],
    /// minus `(σ₂/2)Σ(J∗1)φ² vol` when the nonlocal consistency term is off.
    pub fn lyapunov_energy(&self, phi: &Field<T>) -> Result<T> {
        let e = self.energy(phi)?;
        if !self.config.is_nonlocal() || self.config.nonlocal_consistency {
            return Ok(e);
        }
        let w = self.kernel_mass();
        let terms: Vec<T> = w.iter().zip(phi.values()).map(|(&wi, &p)| wi * p * p).collect();
        Ok(e - self.config.sigma2 * T::lit(0.5) * field::compensated_sum(&terms) * self.grid.cell_volume())
    }

    /// Lower bound of [`Self::lyapunov_energy`] over all `|φ| ≤ 1`.
    pub fn energy_floor(&self) -> T {
        let c = &self.config;
        let omega = self.grid.domain_volume();
        let mut floor = omega * c.potential.density_minimum(c.sigma1);
        if let Some(k) = &self.kernel {
            let nonneg = k.is_nonnegative();
            let rho = k.max_abs_row_sum();
            let quad = if c.nonlocal_consistency {
                if nonneg {
                    T::zero()
                } else {
                    rho
                }
            } else if nonneg {
                T::lit(0.5) * rho
            } else {
                T::lit(1.5) * rho
            };
            floor = floor - c.sigma2 * quad * omega;
        }
        // Absorb the rounding in the minimum search.
        floor - T::lit(1e-12) * (T::one() + floor.abs())
    }

    /// `α Σ m_f|∇μ|² vol + β Σ(μ − μ̄)² vol`, with `m` evaluated at `phi`.
    pub fn dissipation_rate(&self, phi: &Field<T>, mu: &Field<T>) -> Result<T> {
        self.check_grid(phi)?;
        self.check_grid(mu)?;
        let c = &self.config;
        let mut d = T::zero();
        if c.alpha > T::zero() {
            let g = gradient(mu);
            d = d + c.alpha * g.weighted_dot(&g, Some(&self.mobility_faces(phi)))?;
        }
        if c.beta > T::zero() {
            let f = mu.fluctuation();
            d = d + c.beta * field::inner(&f, &f)?;
        }
        Ok(d)
    }

    /// The norm defining good times: `‖∇μ‖` or `‖μ − μ̄‖`.
    pub fn dissipation_norm(&self, mu: &Field<T>) -> T {
        match self.config.dissipation_norm() {
            crate::physics::model::DissipationNorm::Gradient => field::norm_h1_semi(mu),
            crate::physics::model::DissipationNorm::Fluctuation => field::norm_l2(&mu.fluctuation()),
        }
    }

    /// Sparse part of the exact Jacobian of [`Self::chemical_potential`]:
    /// the Hessian of the gradient energy (divided by the cell volume) plus
    /// the diagonal `F″ − σ₁θ₀ + σ₂(J∗1)` (the last term only with the
    /// consistency flag). The dense `−σ₂K` block is left to the caller.
    pub fn local_jacobian(&self, phi: &Field<T>) -> Result<SparseMatrix<T>> {
        self.check_grid(phi)?;
        self.check_bounds(phi, 2)?;
        let c = &self.config;
        let g = &self.grid;
        let n = g.cell_count();
        let mut h = SparseMatrix::zeros(n);
        if c.gamma > T::zero() {
            let p = phi.values();
            let d = &c.diffusion;
            let half = T::lit(0.5);
            let two = T::lit(2.0);
            for axis in 0..g.dim() {
                let nax = g.n(axis);
                let hx = g.h(axis);
                for line in 0..g.lines(axis) {
                    for k in 0..nax {
                        if g.is_boundary_face(axis, k) {
                            continue;
                        }
                        let l = g.cell_on_line(axis, if k == 0 { nax - 1 } else { k - 1 }, line);
                        let r = g.cell_on_line(axis, k, line);
                        if l == r {
                            continue;
                        }
                        let gr = (p[r] - p[l]) / hx;
                        let af = half * (d.a(p[l]) + d.a(p[r]));
                        let (dl, dr) = (d.da(p[l]), d.da(p[r]));
                        let (ddl, ddr) = (d.d2a(p[l]), d.d2a(p[r]));
                        let pre = c.gamma * half;
                        let hll = pre * (half * ddl * gr * gr - two * dl * gr / hx + two * af / (hx * hx));
                        let hrr = pre * (half * ddr * gr * gr + two * dr * gr / hx + two * af / (hx * hx));
                        let hlr = pre * ((dl - dr) * gr / hx - two * af / (hx * hx));
                        h.add(l, l, hll);
                        h.add(r, r, hrr);
                        h.add(l, r, hlr);
                        h.add(r, l, hlr);
                    }
                }
            }
        }
        let w = self.kernel_mass();
        let cons = self.consistency();
        let mut diag = Vec::with_capacity(n);
        for (&s, &wi) in phi.values().iter().zip(&w) {
            let f2 = c.potential.d2f(s);
            if !(f2 >= c.potential.theta * (T::one() - T::lit(1e-10))) {
                return Err(Error::InvalidSpec(format!("F''({s}) = {f2} fell below theta during assembly")));
            }
            diag.push(f2 - c.sigma1 * c.potential.theta0 + c.sigma2 * cons * wi);
        }
        h.add_diagonal(&diag);
        Ok(h)
    }
}

/// `μ(φ)` for a model, assembling any kernel on the fly.
pub fn chemical_potential<T: Real>(m: &ModelConfig<T>, phi: &Field<T>) -> Result<Field<T>> {
    DiscreteModel::new(m, *phi.grid())?.chemical_potential(phi)
}

/// Discrete free energy `E(φ)`.
pub fn energy<T: Real>(m: &ModelConfig<T>, phi: &Field<T>) -> Result<T> {
    DiscreteModel::new(m, *phi.grid())?.energy(phi)
}

/// Dissipation rate `α Σ m_f|∇μ|² vol + β Σ(μ − μ̄)² vol`.
pub fn dissipation_rate<T: Real>(m: &ModelConfig<T>, phi: &Field<T>, mu: &Field<T>) -> Result<T> {
    DiscreteModel::new(m, *phi.grid())?.dissipation_rate(phi, mu)
}
