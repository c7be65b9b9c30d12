//! One step of the convex-splitting scheme.
//!
//! With frozen coefficients `m(φⁿ)`, `a(φⁿ)` the update reads
//!
//! ```text
//! (φ⁺ − φⁿ)/dt = α div(m∇μ⁺) − β(μ⁺ − mean μ⁺)
//! μ⁺ = −γ div(a∇φ⁺) + F′(φ⁺) + s φ⁺ + e(φⁿ)
//! ```
//!
//! where `s = σ₂(χ(J∗1) + c)` collects the implicit nonlocal diagonal (`χ` the
//! consistency flag, `c` the kernel stabiliser) and the explicit part is
//! `e = γ a′(φⁿ)|∇φⁿ|²/2 − σ₁θ₀φⁿ − σ₂(J∗φⁿ + cφⁿ)`. Newton runs on `μ⁺`:
//! `φ⁺` is an affine function of it whose mean equals the mean of `φⁿ` for
//! every iterate, so mass conservation never depends on solver accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, cell_grad_sq, gradient, weighted_div_grad, Field};
use crate::linalg::{div_grad_matrix, Factorization, SparseMatrix};
use crate::physics::functional::DiscreteModel;
use crate::scalar::Real;

/// Time-step and solver settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperConfig {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Discrete L² norm of the Newton residual at convergence.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Sufficient-decrease constant of the residual line search.
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Slack allowed in `E⁺ + dt·D ≤ Eⁿ + tol_e`.
    pub tol_e: f64,
    /// Store a snapshot every this many accepted steps (first and last are
    /// always stored); zero keeps only those two.
    pub snapshot_every: usize,
    pub grow_factor: f64,
    pub grow_after: usize,
    /// Stop once the dissipation norm stays below this for `steady_dwell` steps.
    pub steady_threshold: f64,
    pub steady_dwell: usize,
    pub max_steps: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt_init: 1e-4,
            dt_min: 1e-12,
            dt_max: 1.0,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            armijo: 1e-4,
            max_backtracks: 40,
            tol_e: 1e-10,
            snapshot_every: 10,
            grow_factor: 1.2,
            grow_after: 5,
            steady_threshold: 1e-9,
            steady_dwell: 100,
            max_steps: 5_000_000,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return bad("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
        }
        if !(self.newton_tol > 0.0 && self.tol_e > 0.0 && self.steady_threshold > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.newton_max_iter == 0 || self.max_backtracks == 0 {
            return bad("iteration limits must be positive");
        }
        if !(self.grow_factor >= 1.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("grow_factor must be >= 1 and armijo in (0, 1)");
        }
        Ok(())
    }
}

/// Solution at one time level.
#[derive(Clone, Debug)]
pub struct State<T> {
    pub phi: Field<T>,
    pub t: T,
    /// Dissipated functional at `phi`.
    pub energy: T,
    pub last: StepStats<T>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StepStats<T> {
    pub newton_iters: usize,
    pub dt: T,
    pub residual: T,
}

/// An accepted step: the new state plus the scheme's chemical potential.
#[derive(Clone, Debug)]
pub struct StepOutcome<T> {
    pub state: State<T>,
    pub mu: Field<T>,
    /// `α Σ m(φⁿ)|∇μ⁺|² vol + β Σ(μ⁺ − mean μ⁺)² vol`.
    pub dissipation: T,
}

/// Convex-splitting integrator for a model on a fixed grid.
#[derive(Clone, Debug)]
pub struct Stepper<T: Real> {
    model: DiscreteModel<T>,
    cfg: StepperConfig,
}

/// Operators frozen at `φⁿ` for one step.
struct Frozen<T: Real> {
    mobility: Option<crate::field::FaceField<T>>,
    mobility_matrix: Option<SparseMatrix<T>>,
    diffusion_matrix: Option<SparseMatrix<T>>,
    implicit_diag: Vec<T>,
    explicit: Vec<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(model: DiscreteModel<T>, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Stepper { model, cfg })
    }

    pub fn model(&self) -> &DiscreteModel<T> {
        &self.model
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    /// Initial state; checks admissibility of `phi0`.
    pub fn initial_state(&self, phi0: Field<T>) -> Result<State<T>> {
        self.model.check_grid(&phi0)?;
        self.model.check_bounds(&phi0, 1)?;
        if !(phi0.mean().abs() < T::one()) {
            return Err(Error::InvalidSpec("initial mean must lie in (-1, 1)".into()));
        }
        let energy = self.model.lyapunov_energy(&phi0)?;
        Ok(State { phi: phi0, t: T::zero(), energy, last: StepStats::default() })
    }

    fn freeze(&self, phi: &Field<T>) -> Frozen<T> {
        let c = self.model.config();
        let g = *phi.grid();
        let (mobility, mobility_matrix) = if c.alpha > T::zero() {
            let m = self.model.mobility_faces(phi);
            let mut lm = div_grad_matrix(&g, &m);
            lm.scale(c.alpha);
            (Some(m), Some(lm))
        } else {
            (None, None)
        };
        let diffusion_matrix = (c.gamma > T::zero()).then(|| {
            let mut la = div_grad_matrix(&g, &self.model.diffusion_faces(phi));
            la.scale(-c.gamma);
            la
        });
        let stab = if c.is_nonlocal() { self.model.kernel_stabilizer() } else { T::zero() };
        let cons = if c.nonlocal_consistency { T::one() } else { T::zero() };
        let w = self.model.kernel_mass();
        let implicit_diag = w.iter().map(|&wi| c.sigma2 * (cons * wi + stab)).collect();
        let k_phi = self.model.convolve(phi);
        let mut explicit: Vec<T> = phi
            .values()
            .iter()
            .zip(&k_phi)
            .map(|(&p, &kp)| -c.sigma1 * c.potential.theta0 * p - c.sigma2 * (kp + stab * p))
            .collect();
        if c.gamma > T::zero() && !c.diffusion.profile.is_constant() {
            let sq = cell_grad_sq(&gradient(phi));
            for ((e, &p), &g2) in explicit.iter_mut().zip(phi.values()).zip(sq.values()) {
                *e = *e + c.gamma * T::lit(0.5) * c.diffusion.da(p) * g2;
            }
        }
        Frozen { mobility, mobility_matrix, diffusion_matrix, implicit_diag, explicit }
    }

    /// `φ⁺(μ) = φⁿ + dt(α div(m∇μ) − β(μ − mean μ))`, with the divergence in
    /// flux form so it telescopes.
    fn phi_of(&self, phi: &Field<T>, fr: &Frozen<T>, mu: &[T], dt: T) -> Vec<T> {
        let c = self.model.config();
        let mut out = phi.values().to_vec();
        if let Some(m) = &fr.mobility {
            let mu_f = Field::from_vec_unchecked(*phi.grid(), mu.to_vec());
            let div = weighted_div_grad(&mu_f, m).expect("same grid");
            for (o, &d) in out.iter_mut().zip(div.values()) {
                *o = *o + dt * c.alpha * d;
            }
        }
        if c.beta > T::zero() {
            let mean = field::compensated_sum(mu) / T::from_count(mu.len());
            for (o, &m) in out.iter_mut().zip(mu) {
                *o = *o - dt * c.beta * (m - mean);
            }
        }
        out
    }

    fn in_bounds(&self, p: &[T]) -> bool {
        let b = self.model.config().potential.bound();
        p.iter().all(|v| v.abs() <= b)
    }

    /// `Φ(μ) = μ − G(φ⁺) − e`.
    fn residual(&self, fr: &Frozen<T>, mu: &[T], phi_plus: &[T]) -> Vec<T> {
        let pot = &self.model.config().potential;
        let mut g = vec![T::zero(); mu.len()];
        if let Some(la) = &fr.diffusion_matrix {
            la.matvec(phi_plus, &mut g);
        }
        (0..mu.len())
            .map(|i| mu[i] - (g[i] + pot.df(phi_plus[i]) + fr.implicit_diag[i] * phi_plus[i]) - fr.explicit[i])
            .collect()
    }

    fn l2(&self, r: &[T]) -> T {
        (field::dot(r, r) * self.model.grid().cell_volume()).sqrt()
    }

    /// Newton direction `J d = −r`, `J = I + dt G′S − (dtβ/N)(G′1)1ᵀ`.
    fn direction(&self, fr: &Frozen<T>, phi_plus: &[T], r: &[T], dt: T) -> Result<Vec<T>> {
        let c = self.model.config();
        let n = r.len();
        let diag: Vec<T> = phi_plus.iter().zip(&fr.implicit_diag).map(|(&p, &s)| c.potential.d2f(p) + s).collect();
        let floor = c.potential.theta * (T::one() - T::lit(1e-10));
        if let Some(p) = phi_plus.iter().find(|&&p| !(c.potential.d2f(p) >= floor)) {
            return Err(Error::InvalidSpec(format!("F'' fell below theta at {p}")));
        }
        let mut gp = match &fr.diffusion_matrix {
            Some(la) => la.clone(),
            None => SparseMatrix::zeros(n),
        };
        gp.add_diagonal(&diag);
        let mut s = match &fr.mobility_matrix {
            Some(lm) => {
                let mut s = lm.clone();
                s.scale(-T::one());
                s
            }
            None => SparseMatrix::zeros(n),
        };
        if c.beta > T::zero() {
            s.add_diagonal(&vec![c.beta; n]);
        }
        let mut a = gp.mul(&s);
        a.scale(dt);
        a.add_diagonal(&vec![T::one(); n]);
        let lu: Factorization<T> = a.factor()?;
        let mut x: Vec<T> = r.iter().map(|&v| -v).collect();
        lu.solve(&mut x);
        if c.beta > T::zero() {
            // Rank-one correction; G′1 is the diagonal because L_a 1 = 0.
            let scale = dt * c.beta / T::from_count(n);
            let mut y: Vec<T> = diag.iter().map(|&d| scale * d).collect();
            lu.solve(&mut y);
            let sx: T = field::compensated_sum(&x);
            let sy: T = field::compensated_sum(&y);
            let denom = T::one() - sy;
            if denom == T::zero() || !denom.is_finite() {
                return Err(Error::SingularMatrix { pivot: n });
            }
            let f = sx / denom;
            for (xi, &yi) in x.iter_mut().zip(&y) {
                *xi = *xi + f * yi;
            }
        }
        Ok(x)
    }

    /// Advances `s` by `dt`. Fails with `NewtonDivergence`, `BoundsViolation`
    /// or `EnergyIncrease`; the caller is expected to retry with a smaller step.
    pub fn step(&self, s: &State<T>, dt: T) -> Result<StepOutcome<T>> {
        let phi = &s.phi;
        let fr = self.freeze(phi);
        let cfg = &self.cfg;
        let tol = T::lit(cfg.newton_tol);

        // Start from μ(φⁿ) when its image stays admissible, else from its mean,
        // whose image is φⁿ itself.
        let mut mu = self.residual(&fr, &vec![T::zero(); phi.len()], phi.values());
        mu.iter_mut().for_each(|v| *v = -*v);
        let mut phi_plus = self.phi_of(phi, &fr, &mu, dt);
        if !self.in_bounds(&phi_plus) {
            let mean = field::compensated_sum(&mu) / T::from_count(mu.len());
            mu = vec![mean; mu.len()];
            phi_plus = self.phi_of(phi, &fr, &mu, dt);
        }
        let mut r = self.residual(&fr, &mu, &phi_plus);
        let mut nr = self.l2(&r);
        let mut iters = 0;
        while nr > tol {
            if iters >= cfg.newton_max_iter {
                return Err(Error::NewtonDivergence { iterations: iters, residual: nr.as_f64() });
            }
            iters += 1;
            let d = self.direction(&fr, &phi_plus, &r, dt)?;
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..cfg.max_backtracks {
                let trial: Vec<T> = mu.iter().zip(&d).map(|(&m, &di)| m + lambda * di).collect();
                let trial_phi = self.phi_of(phi, &fr, &trial, dt);
                if self.in_bounds(&trial_phi) {
                    let tr = self.residual(&fr, &trial, &trial_phi);
                    let tn = self.l2(&tr);
                    if tn <= (T::one() - T::lit(cfg.armijo) * lambda) * nr {
                        mu = trial;
                        phi_plus = trial_phi;
                        r = tr;
                        nr = tn;
                        accepted = true;
                        break;
                    }
                }
                lambda = lambda * T::lit(0.5);
            }
            if !accepted {
                // Roundoff floor: accept a residual close to the tolerance.
                if nr <= tol * T::lit(1e3) {
                    break;
                }
                return Err(Error::NewtonDivergence { iterations: iters, residual: nr.as_f64() });
            }
        }
        let phi_new = Field::new(*phi.grid(), phi_plus)?;
        let sup = phi_new.sup_norm();
        if !(sup < self.model.config().potential.bound()) {
            return Err(Error::BoundsViolation { value: sup.as_f64() });
        }
        let mu = Field::new(*phi.grid(), mu)?;
        let dissipation = self.model.dissipation_rate(phi, &mu)?;
        let energy = self.model.lyapunov_energy(&phi_new)?;
        let excess = energy + dt * dissipation - s.energy - T::lit(cfg.tol_e);
        if excess > T::zero() {
            return Err(Error::EnergyIncrease { excess: excess.as_f64() });
        }
        Ok(StepOutcome {
            state: State { phi: phi_new, t: s.t + dt, energy, last: StepStats { newton_iters: iters, dt, residual: nr } },
            mu,
            dissipation,
        })
    }
}
