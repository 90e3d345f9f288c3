use crate::devices::{Device, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I};
use crate::state::DensityMatrix;
use crate::tomography::Label;

/// Energy gap and orientation schedule of the reset protocol, in units of
/// k_BT and βħ.
#[derive(Debug, Clone, Copy)]
pub struct QubitResetProtocol {
    pub tau: f64,
    pub coupling: f64,
}

impl Default for QubitResetProtocol {
    fn default() -> Self {
        Self { tau: 50.0, coupling: 0.2 }
    }
}

impl QubitResetProtocol {
    /// `E_t = [1 + 49 sin²(πt/(2τ))]/5`.
    pub fn gap(&self, t: f64) -> f64 {
        let s = (std::f64::consts::PI * t / (2.0 * self.tau)).sin();
        (1.0 + 49.0 * s * s) / 5.0
    }

    /// `θ_t = πt/τ`.
    pub fn angle(&self, t: f64) -> f64 {
        std::f64::consts::PI * t / self.tau
    }

    /// `H_t = (E_t/2)[cos θ σz + sin θ σx]`.
    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        let (e, th) = (self.gap(t), self.angle(t));
        (linalg::pauli_z().scale(th.cos()) + linalg::pauli_x().scale(th.sin())).scale(0.5 * e)
    }

    /// `L_t = ½[cos θ σx − iσy − sin θ σz]`.
    pub fn lowering(&self, t: f64) -> CMatrix {
        let th = self.angle(t);
        (linalg::pauli_x().scale(th.cos()) - linalg::pauli_y() * I - linalg::pauli_z().scale(th.sin())).scale(0.5)
    }

    /// Bose–Einstein occupation at the instantaneous gap.
    pub fn occupation(&self, t: f64) -> f64 {
        1.0 / self.gap(t).exp_m1()
    }

    /// Gibbs state of `H_t`.
    pub fn gibbs(&self, t: f64) -> DensityMatrix {
        let h = self.hamiltonian(t);
        let m = linalg::hermitian_fn(&h, |x| (-x).exp());
        let z = linalg::trace(&m).re;
        DensityMatrix::from_approx(&m.unscale(z)).expect("Gibbs state is physical")
    }
}

fn dissipator(l: &CMatrix, rho: &CMatrix) -> CMatrix {
    let ld = l.adjoint();
    let ldl = &ld * l;
    l * rho * &ld - (&ldl * rho + rho * &ldl).scale(0.5)
}

/// The single-bath qubit reset master equation, integrated with fixed-step RK4.
#[derive(Debug, Clone)]
pub struct QubitReset {
    pub protocol: QubitResetProtocol,
    pub steps: usize,
    /// Number of grid intervals recorded (the grid has `records + 1` points).
    pub records: usize,
    /// Hold the Hamiltonian fixed at `H_{t₀}` for the whole run.
    pub frozen_at: Option<f64>,
}

impl Default for QubitReset {
    fn default() -> Self {
        Self { protocol: QubitResetProtocol::default(), steps: 10_000, records: 200, frozen_at: None }
    }
}

impl QubitReset {
    fn schedule_time(&self, t: f64) -> f64 {
        self.frozen_at.unwrap_or(t)
    }

    /// `ρ̇ = i[ρ,H] + cE(N+1)D[L]ρ + cE N D[L†]ρ`.
    pub fn generator(&self, t: f64, rho: &CMatrix) -> CMatrix {
        let s = self.schedule_time(t);
        let p = &self.protocol;
        let h = p.hamiltonian(s);
        let l = p.lowering(s);
        let e = p.gap(s);
        let n = p.occupation(s);
        let ce = p.coupling * e;
        (rho * &h - &h * rho) * I
            + dissipator(&l, rho).scale(ce * (n + 1.0))
            + dissipator(&l.adjoint(), rho).scale(ce * n)
    }

    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        self.protocol.hamiltonian(self.schedule_time(t))
    }

    pub fn grid(&self) -> Vec<f64> {
        let stride = self.record_stride();
        (0..=self.steps / stride).map(|k| (k * stride) as f64 * self.dt()).collect()
    }

    fn dt(&self) -> f64 {
        self.protocol.tau / self.steps as f64
    }

    fn record_stride(&self) -> usize {
        (self.steps / self.records.max(1)).max(1)
    }
}

impl Device for QubitReset {
    fn name(&self) -> &str {
        "qubit_reset"
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<Label> {
        vec![Label::Work, Label::Heat, Label::EntropyFlow, Label::EnergyChange]
    }

    fn run(&self, rho0: &DensityMatrix) -> Result<Trajectory> {
        if rho0.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rho0.dim() });
        }
        let h_step = self.dt();
        let stride = self.record_stride();
        let mut rho = rho0.mat().clone();
        let mut h_now = self.hamiltonian(0.0);
        let (mut w, mut q) = (0.0, 0.0);
        let mut traj = Trajectory::default();
        let record = |traj: &mut Trajectory, t: f64, rho: &CMatrix, h: &CMatrix, w: f64, q: f64| -> Result<()> {
            let state = DensityMatrix::from_approx(rho)
                .map_err(|e| Error::IntegrationFailure { time: t, reason: e.to_string() })?;
            traj.times.push(t);
            traj.energy.push(state.expect(h));
            traj.states.push(state);
            traj.work.push(w);
            traj.heat.push(q);
            traj.entropy_flow.push(-q);
            Ok(())
        };
        record(&mut traj, 0.0, &rho, &h_now, w, q)?;
        for k in 0..self.steps {
            let t = k as f64 * h_step;
            let k1 = self.generator(t, &rho);
            let k2 = self.generator(t + 0.5 * h_step, &(&rho + k1.scale(0.5 * h_step)));
            let k3 = self.generator(t + 0.5 * h_step, &(&rho + k2.scale(0.5 * h_step)));
            let k4 = self.generator(t + h_step, &(&rho + k3.scale(h_step)));
            let next = linalg::hermitize(&(&rho + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h_step / 6.0)));
            let drift = (linalg::trace(&next) - linalg::ONE).norm();
            if drift > 1e-8 {
                return Err(Error::IntegrationFailure { time: t + h_step, reason: format!("trace drift {drift:.3e}") });
            }
            let h_next = self.hamiltonian(t + h_step);
            // midpoint rules that make ΔW + ΔQ = Δtr(ρH) hold exactly per step
            w += linalg::trace_product(&(&rho + &next).scale(0.5), &(&h_next - &h_now)).re;
            q += linalg::trace_product(&(&next - &rho), &(&h_now + &h_next).scale(0.5)).re;
            rho = next;
            h_now = h_next;
            if (k + 1) % stride == 0 {
                record(&mut traj, t + h_step, &rho, &h_now, w, q)?;
            }
        }
        Ok(traj)
    }
}
