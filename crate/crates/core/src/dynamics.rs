//! Cavity-magnon pair generation under Lindblad dynamics.
//!
//! The joint space is ordered magnon first, cavity second, so the basis
//! state `|0_m 1_c>` has index 1 when both modes are truncated to qubits.
//! Hamiltonians are expressed in angular frequency units with `hbar = 1`.

use std::f64::consts::PI;

use crate::error::{check_range, Error, Result};
use crate::exec::Execution;
use crate::qcore::{
    annihilation, concurrence, embed, fidelity, hermitian_eigenvalues, number, ComplexMatrix, DensityMatrix,
    HilbertSpec, C64, TRACE_TOL,
};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;

pub const MAGNON: &str = "m";
pub const CAVITY: &str = "c";

const TWO_PI: f64 = 2.0 * PI;

/// Rates and frequencies of one cavity-magnon node, all in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladParams {
    pub omega_c: f64,
    pub omega_m: f64,
    pub g_mc: f64,
    pub kappa_d: f64,
    pub gamma_d: f64,
    pub kappa_phi: f64,
    pub gamma_phi: f64,
    pub dim_c: usize,
    pub dim_m: usize,
}

impl Default for LindbladParams {
    /// 10 GHz resonant modes, 130 MHz coupling, 1 MHz / 0.5 MHz decay and
    /// 0.3 MHz dephasing (all quoted as `f = omega / 2 pi`).
    fn default() -> Self {
        Self {
            omega_c: TWO_PI * 10e9,
            omega_m: TWO_PI * 10e9,
            g_mc: TWO_PI * 130e6,
            kappa_d: TWO_PI * 1e6,
            gamma_d: TWO_PI * 0.5e6,
            kappa_phi: TWO_PI * 0.3e6,
            gamma_phi: TWO_PI * 0.3e6,
            dim_c: 2,
            dim_m: 2,
        }
    }
}

impl LindbladParams {
    /// Same modes and coupling with every dissipation channel switched off.
    pub fn ideal(&self) -> Self {
        Self { kappa_d: 0.0, gamma_d: 0.0, kappa_phi: 0.0, gamma_phi: 0.0, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("g_mc", self.g_mc),
            ("kappa_d", self.kappa_d),
            ("gamma_d", self.gamma_d),
            ("kappa_phi", self.kappa_phi),
            ("gamma_phi", self.gamma_phi),
        ] {
            check_range(name, v, 0.0, f64::INFINITY, "[0, inf)")?;
        }
        if self.dim_c < 2 || self.dim_m < 2 {
            return Err(Error::Shape(format!(
                "mode truncations must be at least 2 (dim_c = {}, dim_m = {})",
                self.dim_c, self.dim_m
            )));
        }
        Ok(())
    }

    pub fn total_dissipation(&self) -> f64 {
        self.kappa_d + self.kappa_phi + self.gamma_d + self.gamma_phi
    }

    /// `g_mc > (kappa + gamma) / 2`.
    pub fn is_strong_coupling(&self) -> bool {
        self.g_mc > 0.5 * self.total_dissipation()
    }

    pub fn space(&self) -> HilbertSpec {
        HilbertSpec::new([(MAGNON, self.dim_m), (CAVITY, self.dim_c)]).expect("fixed distinct labels")
    }

    /// Interaction time `pi / (4 g_mc)` that produces the maximally
    /// entangled state in the ideal limit.
    pub fn entangling_time(&self) -> f64 {
        PI / (4.0 * self.g_mc)
    }
}

/// Material constants entering the magnon-photon coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    /// rad / (s T)
    pub gyromagnetic_ratio: f64,
    /// T m / A
    pub vacuum_permeability: f64,
    pub total_spin: f64,
    /// m^3
    pub cavity_mode_volume: f64,
    /// rad / s
    pub omega_c: f64,
}

impl MaterialParams {
    /// Vacuum permeability in T m / A.
    pub const MU_0: f64 = 1.256_637_062_12e-6;
    /// Free-electron gyromagnetic ratio, rad / (s T).
    pub const GAMMA_E: f64 = 1.760_859_630_23e11;
}

/// `g_mc = gamma sqrt(hbar omega_c mu_0 S / (2 V_c))` in rad/s.
pub fn coupling_strength(mp: &MaterialParams) -> Result<f64> {
    for (name, v) in [
        ("gyromagnetic_ratio", mp.gyromagnetic_ratio),
        ("vacuum_permeability", mp.vacuum_permeability),
        ("total_spin", mp.total_spin),
        ("cavity_mode_volume", mp.cavity_mode_volume),
        ("omega_c", mp.omega_c),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::OutOfRange { name, value: v, range: "(0, inf)" });
        }
    }
    Ok(mp.gyromagnetic_ratio
        * (HBAR * mp.omega_c * mp.vacuum_permeability * mp.total_spin / (2.0 * mp.cavity_mode_volume)).sqrt())
}

/// Magnon and cavity annihilation operators on the joint space.
pub fn mode_operators(p: &LindbladParams) -> (ComplexMatrix, ComplexMatrix) {
    let dims = [p.dim_m, p.dim_c];
    let m = embed(&annihilation(p.dim_m), 0, &dims).expect("slot 0 exists");
    let c = embed(&annihilation(p.dim_c), 1, &dims).expect("slot 1 exists");
    (m, c)
}

/// `n_m + n_c` on the joint space.
pub fn excitation_number(p: &LindbladParams) -> ComplexMatrix {
    let dims = [p.dim_m, p.dim_c];
    &embed(&number(p.dim_m), 0, &dims).expect("slot 0") + &embed(&number(p.dim_c), 1, &dims).expect("slot 1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianModel {
    /// Resonant exchange in the frame rotating at the magnon frequency.
    #[default]
    Rwa,
    /// Bare energies plus the full `(m + m^dagger)(c + c^dagger)` coupling,
    /// in the lab frame.
    Full,
}

/// `omega_c c^dagger c + omega_m m^dagger m + g (m + m^dagger)(c + c^dagger)`.
pub fn build_full_hamiltonian(p: &LindbladParams) -> ComplexMatrix {
    let (m, c) = mode_operators(p);
    let nm = &m.adjoint() * &m;
    let nc = &c.adjoint() * &c;
    let xm = &m + &m.adjoint();
    let xc = &c + &c.adjoint();
    &(&nc.scale_real(p.omega_c) + &nm.scale_real(p.omega_m)) + &(&xm * &xc).scale_real(p.g_mc)
}

/// `g (m^dagger c + c^dagger m) + (omega_c - omega_m) c^dagger c`.
///
/// The detuning term vanishes on resonance, leaving the pure exchange
/// Hamiltonian.
pub fn build_rwa_hamiltonian(p: &LindbladParams) -> ComplexMatrix {
    let (m, c) = mode_operators(p);
    let exchange = &(&m.adjoint() * &c) + &(&c.adjoint() * &m);
    let nc = &c.adjoint() * &c;
    &exchange.scale_real(p.g_mc) + &nc.scale_real(p.omega_c - p.omega_m)
}

pub fn build_hamiltonian(p: &LindbladParams, model: HamiltonianModel) -> ComplexMatrix {
    match model {
        HamiltonianModel::Rwa => build_rwa_hamiltonian(p),
        HamiltonianModel::Full => build_full_hamiltonian(p),
    }
}

/// A jump operator `L_k`, already scaled by the square root of its rate.
#[derive(Debug, Clone)]
pub struct CollapseOperator {
    pub name: &'static str,
    pub rate: f64,
    pub operator: ComplexMatrix,
}

/// Cavity decay, magnon decay, cavity dephasing and magnon dephasing.
pub fn collapse_operators(p: &LindbladParams) -> Vec<CollapseOperator> {
    let (m, c) = mode_operators(p);
    let nc = &c.adjoint() * &c;
    let nm = &m.adjoint() * &m;
    [
        ("cavity_decay", p.kappa_d, c),
        ("magnon_decay", p.gamma_d, m),
        ("cavity_dephasing", p.kappa_phi, nc),
        ("magnon_dephasing", p.gamma_phi, nm),
    ]
    .into_iter()
    .map(|(name, rate, op)| CollapseOperator { name, rate, operator: op.scale_real(rate.sqrt()) })
    .collect()
}

/// Precomputed Lindblad generator.
///
/// Uses `H_eff = H - (i/2) sum L^dagger L` so that
/// `d rho/dt = -i (H_eff rho - rho H_eff^dagger) + sum L rho L^dagger`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    h_eff: ComplexMatrix,
    h_eff_dag: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl Lindbladian {
    pub fn new(h: &ComplexMatrix, collapses: &[CollapseOperator]) -> Result<Self> {
        let n = h.rows();
        if !h.is_square() {
            return Err(Error::Shape(format!("Hamiltonian is {}x{}", h.rows(), h.cols())));
        }
        let mut damping = ComplexMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for l in collapses {
            let op = &l.operator;
            if op.rows() != n || op.cols() != n {
                return Err(Error::Shape(format!(
                    "collapse operator `{}` is {}x{}, Hamiltonian is {n}x{n}",
                    l.name,
                    op.rows(),
                    op.cols()
                )));
            }
            if op.max_abs() == 0.0 {
                continue;
            }
            let dag = op.adjoint();
            damping = &damping + &(&dag * op);
            jumps.push((op.clone(), dag));
        }
        let h_eff = h - &damping.scale(C64::new(0.0, 0.5));
        let h_eff_dag = h_eff.adjoint();
        Ok(Self { h_eff, h_eff_dag, jumps })
    }

    pub fn dim(&self) -> usize {
        self.h_eff.rows()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let minus_i = C64::new(0.0, -1.0);
        let coherent = &(&self.h_eff * rho) - &(rho * &self.h_eff_dag);
        let mut out = coherent.scale(minus_i);
        for (l, l_dag) in &self.jumps {
            out = &out + &(&(l * rho) * l_dag);
        }
        out
    }
}

/// `-i[H, rho] + sum_k (L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho})`.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &ComplexMatrix, collapses: &[CollapseOperator]) -> Result<ComplexMatrix> {
    lindblad_rhs_matrix(rho.matrix(), h, collapses)
}

/// Same as [`lindblad_rhs`] for an arbitrary square matrix (used for the
/// intermediate Runge-Kutta stages, which are not density matrices).
pub fn lindblad_rhs_matrix(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    collapses: &[CollapseOperator],
) -> Result<ComplexMatrix> {
    if rho.rows() != h.rows() || rho.cols() != h.cols() {
        return Err(Error::Shape(format!(
            "state is {}x{}, Hamiltonian is {}x{}",
            rho.rows(),
            rho.cols(),
            h.rows(),
            h.cols()
        )));
    }
    let mut out = h.commutator(rho)?.scale(C64::new(0.0, -1.0));
    for l in collapses {
        let op = &l.operator;
        let dag = op.adjoint();
        let ldl = &dag * op;
        let jump = &(op * rho) * &dag;
        out = &(&out + &jump) - &ldl.anticommutator(rho)?.scale_real(0.5);
    }
    Ok(out)
}

/// Target step size in units of `1 / ||generator||`.
pub const STEP_PHASE: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Requested step; `None` picks `STEP_PHASE` divided by the fastest
    /// frequency in the problem. The step actually used is shrunk so that
    /// an integer number of steps ends exactly at `t_final`.
    pub dt: Option<f64>,
    /// Record every `record_every`-th step (the first and last steps are
    /// always recorded).
    pub record_every: usize,
    pub model: HamiltonianModel,
}

impl EvolveOptions {
    pub fn new(t_final: f64) -> Self {
        Self { t_final, dt: None, record_every: 1, model: HamiltonianModel::Rwa }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn with_model(mut self, model: HamiltonianModel) -> Self {
        self.model = model;
        self
    }
}

/// Recorded evolution.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// `None` when either mode is truncated above two levels.
    pub concurrences: Vec<Option<f64>>,
    /// Diagonal of the state at each recorded time.
    pub populations: Vec<Vec<f64>>,
    pub states: Vec<DensityMatrix>,
    /// Step size actually used.
    pub dt: f64,
}

impl EvolutionTrace {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("a trace always records the initial state")
    }

    pub fn peak_concurrence(&self) -> Option<f64> {
        self.concurrences.iter().flatten().copied().fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))))
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let space = self.final_state().space();
        (0..space.total_dim()).map(|i| space.basis_label(i)).collect()
    }
}

fn default_dt(h: &ComplexMatrix, p: &LindbladParams, t_final: f64) -> Result<f64> {
    let spectral = hermitian_eigenvalues(h)?.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let scale = spectral.max(p.g_mc).max(p.total_dissipation());
    Ok(if scale > 0.0 { STEP_PHASE / scale } else { t_final / 1000.0 })
}

fn rk4_step(gen: &Lindbladian, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(rho + &k1.scale_real(0.5 * dt)));
    let k3 = gen.apply(&(rho + &k2.scale_real(0.5 * dt)));
    let k4 = gen.apply(&(rho + &k3.scale_real(dt)));
    let incr = &(&(&k1 + &k2.scale_real(2.0)) + &k3.scale_real(2.0)) + &k4;
    rho + &incr.scale_real(dt / 6.0)
}

/// Fixed-step classical Runge-Kutta integration of the master equation.
///
/// The trace is checked after every step and never renormalised; a drift
/// above `1e-6` is reported as [`Error::TraceDrift`].
pub fn evolve(rho0: &DensityMatrix, p: &LindbladParams, opts: &EvolveOptions) -> Result<EvolutionTrace> {
    p.validate()?;
    if rho0.space() != &p.space() {
        return Err(Error::Shape(format!(
            "initial state lives on {:?}, parameters describe {:?}",
            rho0.space().dims(),
            p.space().dims()
        )));
    }
    let h = build_hamiltonian(p, opts.model);
    let gen = Lindbladian::new(&h, &collapse_operators(p))?;
    let requested = match opts.dt {
        Some(dt) => dt,
        None => default_dt(&h, p, opts.t_final)?,
    };
    if !(requested.is_finite() && requested > 0.0) {
        return Err(Error::OutOfRange { name: "dt", value: requested, range: "(0, inf)" });
    }
    if !(opts.t_final.is_finite() && opts.t_final >= requested) {
        return Err(Error::OutOfRange { name: "t_final", value: opts.t_final, range: "[dt, inf)" });
    }
    let record_every = opts.record_every.max(1);
    let steps = (opts.t_final / requested - 1e-9).ceil().max(1.0) as usize;
    let dt = opts.t_final / steps as f64;
    let two_qubit = p.dim_c == 2 && p.dim_m == 2;

    let mut trace =
        EvolutionTrace { times: Vec::new(), concurrences: Vec::new(), populations: Vec::new(), states: Vec::new(), dt };
    let record = |t: f64, state: DensityMatrix, trace: &mut EvolutionTrace| -> Result<()> {
        trace.times.push(t);
        trace.concurrences.push(if two_qubit { Some(concurrence(&state)?) } else { None });
        trace.populations.push(state.populations());
        trace.states.push(state);
        Ok(())
    };

    record(0.0, rho0.clone(), &mut trace)?;
    let space = rho0.space().clone();
    let mut rho = rho0.matrix().clone();
    for step in 1..=steps {
        rho = rk4_step(&gen, &rho, dt);
        let t = step as f64 * dt;
        let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
        if drift.is_nan() || drift > TRACE_TOL {
            return Err(Error::TraceDrift { time: t, drift });
        }
        if step % record_every == 0 || step == steps {
            let state = DensityMatrix::new(space.clone(), rho.clone())?;
            record(t, state, &mut trace)?;
        }
    }
    Ok(trace)
}

/// `|0_m 1_c>` for the given truncation.
pub fn initial_state(p: &LindbladParams) -> DensityMatrix {
    DensityMatrix::basis_state(p.space(), &[0, 1]).expect("both modes have at least 2 levels")
}

/// `(|0_m 1_c> - i |1_m 0_c>) / sqrt(2)`.
pub fn target_state(p: &LindbladParams) -> DensityMatrix {
    let space = p.space();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![C64::new(0.0, 0.0); space.total_dim()];
    psi[space.index(&[0, 1])] = C64::new(s, 0.0);
    psi[space.index(&[1, 0])] = C64::new(0.0, -s);
    DensityMatrix::from_pure(space, &psi).expect("normalised")
}

#[derive(Debug, Clone)]
pub struct BellPair {
    pub state: DensityMatrix,
    /// Fidelity to `(|0_m 1_c> - i |1_m 0_c>) / sqrt(2)`.
    pub fidelity: f64,
}

/// Evolves `|0_m 1_c>` for `pi / (4 g_mc)` under the rotating-wave model.
pub fn generate_bell_pair(p: &LindbladParams) -> Result<BellPair> {
    generate_bell_pair_with(p, HamiltonianModel::Rwa)
}

pub fn generate_bell_pair_with(p: &LindbladParams, model: HamiltonianModel) -> Result<BellPair> {
    if p.g_mc.is_nan() || p.g_mc <= 0.0 {
        return Err(Error::OutOfRange { name: "g_mc", value: p.g_mc, range: "(0, inf)" });
    }
    let opts = EvolveOptions::new(p.entangling_time()).with_model(model).with_record_every(usize::MAX);
    let trace = evolve(&initial_state(p), p, &opts)?;
    let state = trace.final_state().clone();
    let fidelity = fidelity(&state, &target_state(p))?;
    Ok(BellPair { state, fidelity })
}

/// Default window for the concurrence trace: `3 pi / (4 g_mc)`, which
/// contains the first maximum.
pub fn default_trace_window(p: &LindbladParams) -> f64 {
    3.0 * PI / (4.0 * p.g_mc)
}

/// Concurrence trace from `|0_m 1_c>` over `[0, t_final]`, recording about
/// `samples` points.
pub fn concurrence_trace(
    p: &LindbladParams,
    t_final: f64,
    samples: usize,
    model: HamiltonianModel,
) -> Result<EvolutionTrace> {
    let h = build_hamiltonian(p, model);
    let dt = default_dt(&h, p, t_final)?;
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let record_every = (steps / samples.max(1)).max(1);
    let opts = EvolveOptions::new(t_final).with_dt(dt).with_record_every(record_every).with_model(model);
    evolve(&initial_state(p), p, &opts)
}

/// Peak concurrence over the default window for each parameter set.
pub fn peak_concurrence_sweep(params: &[LindbladParams], samples: usize, exec: Execution) -> Result<Vec<f64>> {
    exec.try_map(params, |p| {
        let trace = concurrence_trace(p, default_trace_window(p), samples, HamiltonianModel::Rwa)?;
        trace.peak_concurrence().ok_or_else(|| Error::Shape("concurrence needs two-level truncations".into()))
    })
}

/// Bell-pair fidelity for each parameter set.
pub fn pair_fidelity_sweep(params: &[LindbladParams], model: HamiltonianModel, exec: Execution) -> Result<Vec<f64>> {
    exec.try_map(params, |p| Ok(generate_bell_pair_with(p, model)?.fidelity))
}
