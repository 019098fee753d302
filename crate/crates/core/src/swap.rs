//! Beam-splitter interference, Bell-state measurement and entanglement
//! swapping.
//!
//! Density-matrix operations here describe the state *conditioned* on a
//! heralded measurement; loss-driven success probabilities are handled by
//! [`crate::network`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_range, Error, Result};
use crate::exec::Execution;
use crate::qcore::{werner_state_on, BellKind, ComplexMatrix, DensityMatrix, HilbertSpec, C64};

/// Outcomes with a smaller probability are treated as impossible.
pub const BRANCH_CUTOFF: f64 = 1e-12;

/// Default per-swap depolarizing retention.
pub const DEFAULT_Q_SWAP: f64 = 0.967;

/// `[[cos bt, -i sin bt], [-i sin bt, cos bt]]`.
pub fn beam_splitter_unitary(beta: f64, t: f64) -> ComplexMatrix {
    let theta = beta * t;
    let (s, c) = theta.sin_cos();
    let cos = C64::new(c, 0.0);
    let isin = C64::new(0.0, -s);
    ComplexMatrix::new(2, 2, vec![cos, isin, isin, cos]).expect("2x2")
}

/// Beam-splitter evolution time `pi / (2 g_bs)`.
pub fn swap_time(g_bs: f64) -> Result<f64> {
    if g_bs.is_nan() || g_bs <= 0.0 {
        return Err(Error::OutOfRange { name: "g_bs", value: g_bs, range: "(0, inf]" });
    }
    Ok(std::f64::consts::FRAC_PI_2 / g_bs)
}

/// Anything that can stand for a field mode in the input-output relations:
/// a c-number amplitude or an operator.
pub trait ModeAmplitude: Clone {
    fn scaled(&self, s: C64) -> Self;
    fn plus(&self, other: &Self) -> Self;
}

impl ModeAmplitude for C64 {
    fn scaled(&self, s: C64) -> Self {
        self * s
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

impl ModeAmplitude for ComplexMatrix {
    fn scaled(&self, s: C64) -> Self {
        self.scale(s)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

/// The two input (or output) ports of a beam splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePair<T> {
    pub v: T,
    pub h: T,
}

/// `(v2, h2)^T = U (v1, h1)^T`.
pub fn apply_io_relations<T: ModeAmplitude>(u: &ComplexMatrix, input: &ModePair<T>) -> Result<ModePair<T>> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Shape(format!("beam splitter must be 2x2, got {}x{}", u.rows(), u.cols())));
    }
    Ok(ModePair {
        v: input.v.scaled(u.get(0, 0)).plus(&input.h.scaled(u.get(0, 1))),
        h: input.v.scaled(u.get(1, 0)).plus(&input.h.scaled(u.get(1, 1))),
    })
}

/// One of the four Bell-measurement results together with its projector and
/// the Pauli correction applied downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    pub kind: BellKind,
    pub index: usize,
    pub projector: ComplexMatrix,
    pub correction: ComplexMatrix,
}

impl BellOutcome {
    pub fn new(kind: BellKind) -> Self {
        Self { kind, index: kind.index(), projector: kind.projector(), correction: kind.correction() }
    }

    pub fn all() -> [BellOutcome; 4] {
        BellKind::ALL.map(BellOutcome::new)
    }
}

#[derive(Debug, Clone)]
pub struct SwapResult {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Remaining two qubits, renormalised and corrected.
    pub post_state: DensityMatrix,
}

/// How the Bell-measurement outcome is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmMode {
    /// Post-select a given outcome.
    Deterministic(BellKind),
    /// Draw the outcome from its Born distribution with a seeded generator.
    Sampled(u64),
}

/// Input to a Bell measurement: the four-qubit state reordered as
/// `(a, b, r1, r2)`.
struct Prepared {
    ordered: DensityMatrix,
    rest: [String; 2],
}

fn prepare(rho: &DensityMatrix, qubit_a: &str, qubit_b: &str) -> Result<Prepared> {
    let space = rho.space();
    if space.len() != 4 || space.dims().iter().any(|&d| d != 2) {
        return Err(Error::Shape(format!("Bell measurement needs exactly four qubits, got dims {:?}", space.dims())));
    }
    if qubit_a == qubit_b {
        return Err(Error::Shape(format!("Bell measurement on `{qubit_a}` twice")));
    }
    space.position(qubit_a)?;
    space.position(qubit_b)?;
    let rest: Vec<String> =
        space.labels().into_iter().filter(|l| *l != qubit_a && *l != qubit_b).map(str::to_string).collect();
    let ordered = rho.permute(&[qubit_a, qubit_b, &rest[0], &rest[1]])?;
    Ok(Prepared { ordered, rest: [rest[0].clone(), rest[1].clone()] })
}

/// Unnormalised `<Phi_j|_{ab} rho |Phi_j>_{ab}` on the remaining pair.
fn project(prep: &Prepared, kind: BellKind) -> ComplexMatrix {
    let phi = kind.vector();
    let m = prep.ordered.matrix();
    ComplexMatrix::from_fn(4, 4, |r, c| {
        let mut acc = C64::new(0.0, 0.0);
        for (i, pi) in phi.iter().enumerate() {
            if pi.norm() == 0.0 {
                continue;
            }
            for (j, pj) in phi.iter().enumerate() {
                if pj.norm() == 0.0 {
                    continue;
                }
                acc += pi.conj() * m.get(i * 4 + r, j * 4 + c) * pj;
            }
        }
        acc
    })
}

fn finish(prep: &Prepared, kind: BellKind, unnormalised: ComplexMatrix) -> Result<SwapResult> {
    let probability = unnormalised.trace().re;
    if probability < BRANCH_CUTOFF {
        return Err(Error::ZeroProbabilityBranch { outcome: kind.name(), probability });
    }
    let outcome = BellOutcome::new(kind);
    let u = ComplexMatrix::identity(2).kron(&outcome.correction);
    let corrected = (&(&u * &unnormalised) * &u.adjoint()).scale_real(1.0 / probability);
    let space = HilbertSpec::qubits(&[&prep.rest[0], &prep.rest[1]])?;
    let post_state = DensityMatrix::new(space, corrected)?;
    Ok(SwapResult { outcome, probability: probability.min(1.0), post_state })
}

/// Outcome probabilities `tr[(Pi_j (x) I) rho]`, indexed as [`BellKind::index`].
pub fn bsm_distribution(rho: &DensityMatrix, qubit_a: &str, qubit_b: &str) -> Result<[f64; 4]> {
    let prep = prepare(rho, qubit_a, qubit_b)?;
    Ok(BellKind::ALL.map(|k| project(&prep, k).trace().re))
}

/// Bell measurement of `(qubit_a, qubit_b)` on a four-qubit state.
///
/// The remaining two qubits keep their original order; the feed-forward
/// correction acts on the second of them.
pub fn bsm(rho: &DensityMatrix, qubit_a: &str, qubit_b: &str, mode: BsmMode) -> Result<SwapResult> {
    match mode {
        BsmMode::Deterministic(kind) => {
            let prep = prepare(rho, qubit_a, qubit_b)?;
            let un = project(&prep, kind);
            finish(&prep, kind, un)
        }
        BsmMode::Sampled(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            bsm_with_rng(rho, qubit_a, qubit_b, &mut rng)
        }
    }
}

/// Sampled Bell measurement drawing from a caller-owned generator.
pub fn bsm_with_rng<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    qubit_a: &str,
    qubit_b: &str,
    rng: &mut R,
) -> Result<SwapResult> {
    let prep = prepare(rho, qubit_a, qubit_b)?;
    let branches = BellKind::ALL.map(|k| (k, project(&prep, k)));
    let probs: Vec<f64> = branches.iter().map(|(_, m)| m.trace().re.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, &p) in probs.iter().enumerate() {
        if p < BRANCH_CUTOFF {
            continue;
        }
        acc += p;
        chosen = Some(i);
        if u < acc {
            break;
        }
    }
    let i = chosen.ok_or(Error::ZeroProbabilityBranch { outcome: "any", probability: total })?;
    let (kind, un) = branches.into_iter().nth(i).expect("index < 4");
    finish(&prep, kind, un)
}

/// Every outcome with non-negligible probability.
pub fn bsm_all_outcomes(rho: &DensityMatrix, qubit_a: &str, qubit_b: &str) -> Result<Vec<SwapResult>> {
    let prep = prepare(rho, qubit_a, qubit_b)?;
    BellKind::ALL
        .iter()
        .map(|&k| (k, project(&prep, k)))
        .filter(|(_, m)| m.trace().re >= BRANCH_CUTOFF)
        .map(|(k, m)| finish(&prep, k, m))
        .collect()
}

/// Exchanges the states of two qubits (full SWAP conjugation).
pub fn node_swap_gate(rho: &DensityMatrix, from: &str, to: &str) -> Result<DensityMatrix> {
    let space = rho.space();
    let a = space.position(from)?;
    let b = space.position(to)?;
    let dims = space.dims();
    if dims[a] != 2 || dims[b] != 2 {
        return Err(Error::Shape(format!(
            "SWAP needs two qubits, `{from}` has dimension {} and `{to}` has {}",
            dims[a], dims[b]
        )));
    }
    let n = space.total_dim();
    let sigma: Vec<usize> = (0..n)
        .map(|i| {
            let mut d = space.digits(i);
            d.swap(a, b);
            space.index(&d)
        })
        .collect();
    let m = rho.matrix();
    let swapped = ComplexMatrix::from_fn(n, n, |r, c| m.get(sigma[r], sigma[c]));
    DensityMatrix::new(space.clone(), swapped)
}

/// Explicit SWAP unitary between two labelled qubits.
pub fn swap_unitary(space: &HilbertSpec, from: &str, to: &str) -> Result<ComplexMatrix> {
    let a = space.position(from)?;
    let b = space.position(to)?;
    let n = space.total_dim();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let mut d = space.digits(c);
        d.swap(a, b);
        if space.index(&d) == r {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Two-qubit depolarizing channel `q rho + (1 - q) I/4`.
pub fn depolarize(rho: &DensityMatrix, q: f64) -> Result<DensityMatrix> {
    check_range("depolarizing retention", q, 0.0, 1.0, "[0, 1]")?;
    if rho.dim() != 4 || rho.space().len() != 2 {
        return Err(Error::Shape(format!("depolarize expects a two-qubit state, got dims {:?}", rho.space().dims())));
    }
    let m = &rho.matrix().scale_real(q) + &ComplexMatrix::identity(4).scale_real((1.0 - q) / 4.0);
    DensityMatrix::new(rho.space().clone(), m)
}

/// Heralded end-to-end success of a single-link Bell measurement,
/// `exp(-L/d) / 2`, with `L` and `d` in the same length unit.
pub fn heralded_link_probability(length: f64, attenuation_length: f64) -> Result<f64> {
    check_range("link length", length, 0.0, f64::INFINITY, "[0, inf)")?;
    if attenuation_length.is_nan() || attenuation_length <= 0.0 {
        return Err(Error::OutOfRange { name: "attenuation length", value: attenuation_length, range: "(0, inf)" });
    }
    Ok(0.5 * (-length / attenuation_length).exp())
}

/// Swaps `left = rho_{AB}` and `right = rho_{CD}` by a Bell measurement on
/// `(B, C)`, then applies the imperfect-swap depolarizing channel. Returns the
/// measurement record with `post_state` on `(A, D)`.
pub fn entanglement_swap(
    left: &DensityMatrix,
    right: &DensityMatrix,
    mode: BsmMode,
    q_swap: f64,
) -> Result<SwapResult> {
    let joint = left.tensor(right)?;
    let labels = joint.space().labels();
    if labels.len() != 4 {
        return Err(Error::Shape("entanglement swap joins two two-qubit states".into()));
    }
    let (b, c) = (labels[1].to_string(), labels[2].to_string());
    let mut result = bsm(&joint, &b, &c, mode)?;
    result.post_state = depolarize(&result.post_state, q_swap)?;
    Ok(result)
}

/// Exact density-matrix pipeline for a chain of `links` Werner(`p_link`)
/// links joined by `links - 1` swaps, each heralding `outcome`.
pub fn werner_chain_state(links: usize, p_link: f64, q_swap: f64, outcome: BellKind) -> Result<DensityMatrix> {
    if links == 0 {
        return Err(Error::OutOfRange { name: "links", value: 0.0, range: "[1, inf)" });
    }
    let mut state = werner_state_on(p_link, "n0", "n1")?;
    for k in 1..links {
        let next = werner_state_on(p_link, &format!("x{k}"), &format!("n{}", k + 1))?;
        let r = entanglement_swap(&state, &next, BsmMode::Deterministic(outcome), q_swap)?;
        state = r.post_state;
    }
    Ok(state)
}

/// Record of the two-stage repeater protocol over four nodes.
#[derive(Debug, Clone)]
pub struct TwoStageReport {
    /// Bell measurements on `(c1, c2)` and `(c3, c4)`.
    pub first_stage: [SwapResult; 2],
    /// Bell measurement on `(c2, c3)` after the node SWAP gates.
    pub second_stage: SwapResult,
    /// Final state on `(m1, m4)`.
    pub end_to_end: DensityMatrix,
}

/// Relabels a cavity-magnon pair `(m, c)` for use at node `n`.
fn node_pair(pair: &DensityMatrix, n: usize, cavity_first: bool) -> Result<DensityMatrix> {
    let m = format!("m{n}");
    let c = format!("c{n}");
    let r = pair.relabel(&[&m, &c])?;
    if cavity_first {
        r.permute(&[&c, &m])
    } else {
        Ok(r)
    }
}

/// Two-stage swapping over four cavity-magnon nodes.
///
/// `node_pair` is the local pair ordered `(magnon, cavity)`. Stage one
/// interferes the photons of `(c1, c2)` and `(c3, c4)`, entangling
/// `(m1, m2)` and `(m3, m4)`. The repeater then swaps `m2 -> c2` and
/// `m3 -> c3` with vacuum-initialised cavities and a final Bell measurement
/// on `(c2, c3)` entangles `(m1, m4)`. Every measurement is followed by the
/// `q_swap` depolarizing channel.
pub fn two_stage_swap<R: Rng + ?Sized>(
    node_pair_state: &DensityMatrix,
    q_swap: f64,
    rng: &mut R,
) -> Result<TwoStageReport> {
    if node_pair_state.dim() != 4 {
        return Err(Error::Shape("node pair must be a two-qubit state".into()));
    }
    let stage_one = |left: usize, right: usize, rng: &mut R| -> Result<SwapResult> {
        let a = node_pair(node_pair_state, left, false)?;
        let b = node_pair(node_pair_state, right, true)?;
        // (m_l, c_l, c_r, m_r)
        let joint = a.tensor(&b)?;
        let mut r = bsm_with_rng(&joint, &format!("c{left}"), &format!("c{right}"), rng)?;
        r.post_state = depolarize(&r.post_state, q_swap)?;
        Ok(r)
    };
    let s12 = stage_one(1, 2, rng)?;
    let s34 = stage_one(3, 4, rng)?;

    let vac = |label: &str| DensityMatrix::basis_state(HilbertSpec::qubits(&[label])?, &[0]);
    // m2 -> c2: (m1, m2, c2), keep (m1, c2)
    let left = s12.post_state.tensor(&vac("c2")?)?;
    let left = node_swap_gate(&left, "m2", "c2")?.partial_trace(&["m1", "c2"])?;
    // m3 -> c3: (c3, m3, m4), keep (c3, m4)
    let right = vac("c3")?.tensor(&s34.post_state)?;
    let right = node_swap_gate(&right, "m3", "c3")?.partial_trace(&["c3", "m4"])?;

    let joint = left.tensor(&right)?;
    let mut last = bsm_with_rng(&joint, "c2", "c3", rng)?;
    last.post_state = depolarize(&last.post_state, q_swap)?;
    let end_to_end = last.post_state.clone();
    Ok(TwoStageReport { first_stage: [s12, s34], second_stage: last, end_to_end })
}

/// Runs the two-stage protocol once per seed.
pub fn two_stage_batch(
    node_pair_state: &DensityMatrix,
    q_swap: f64,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<TwoStageReport>> {
    exec.try_map(seeds, |&seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        two_stage_swap(node_pair_state, q_swap, &mut rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state_on, fidelity, werner_parameter, werner_state, BellKind};

    fn singlets() -> DensityMatrix {
        let a = bell_state_on(BellKind::PsiMinus, "q1", "q2").unwrap();
        let b = bell_state_on(BellKind::PsiMinus, "q3", "q4").unwrap();
        a.tensor(&b).unwrap()
    }

    #[test]
    fn beam_splitter_cases() {
        let id = beam_splitter_unitary(1.0, 0.0);
        assert!(id.approx_eq(&ComplexMatrix::identity(2), 0.0));
        let bal = beam_splitter_unitary(1.0, std::f64::consts::FRAC_PI_4);
        assert!((bal.get(0, 0).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((bal.get(0, 1).norm_sqr() - 0.5).abs() < 1e-15);
        assert!(bal.is_unitary(1e-12));
        let full = beam_splitter_unitary(2.0, std::f64::consts::FRAC_PI_4);
        let expected = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        assert!(full.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn swap_time_values() {
        let g = 2.0 * std::f64::consts::PI * 130e6;
        let t = swap_time(g).unwrap();
        assert!((t - 1.923e-9).abs() < 1e-12);
        assert!((swap_time(2.0 * g).unwrap() - t / 2.0).abs() < 1e-24);
        assert_eq!(swap_time(f64::INFINITY).unwrap(), 0.0);
        assert!(swap_time(0.0).is_err());
        assert!(swap_time(-1.0).is_err());
    }

    #[test]
    fn io_relations() {
        let v = C64::new(0.3, -0.2);
        let zero = C64::new(0.0, 0.0);
        let id = beam_splitter_unitary(1.0, 0.0);
        let same = apply_io_relations(&id, &ModePair { v, h: C64::new(1.0, 1.0) }).unwrap();
        assert_eq!(same, ModePair { v, h: C64::new(1.0, 1.0) });

        let bal = beam_splitter_unitary(1.0, std::f64::consts::FRAC_PI_4);
        let out = apply_io_relations(&bal, &ModePair { v, h: zero }).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.v - v * s).norm() < 1e-15);
        assert!((out.h - v * C64::new(0.0, -s)).norm() < 1e-15);

        let inv = beam_splitter_unitary(1.0, -std::f64::consts::FRAC_PI_4);
        let a = crate::qcore::annihilation(3);
        let pair = ModePair { v: a.clone(), h: a.adjoint() };
        let back = apply_io_relations(&inv, &apply_io_relations(&bal, &pair).unwrap()).unwrap();
        assert!(back.v.approx_eq(&pair.v, 1e-12));
        assert!(back.h.approx_eq(&pair.h, 1e-12));
    }

    #[test]
    fn singlet_swap_every_outcome() {
        let rho = singlets();
        let probs = bsm_distribution(&rho, "q2", "q3").unwrap();
        for p in probs {
            assert!((p - 0.25).abs() < 1e-10);
        }
        let target = bell_state_on(BellKind::PsiMinus, "q1", "q4").unwrap();
        for k in BellKind::ALL {
            let r = bsm(&rho, "q2", "q3", BsmMode::Deterministic(k)).unwrap();
            assert_eq!(r.post_state.space().labels(), vec!["q1", "q4"]);
            assert!(r.post_state.matrix().approx_eq(target.matrix(), 1e-10));
            assert!((fidelity(&r.post_state, &target).unwrap() - 1.0).abs() < 1e-10);
        }
        let r = bsm(&rho, "q2", "q3", BsmMode::Deterministic(BellKind::PsiMinus)).unwrap();
        assert_eq!(r.outcome.correction, ComplexMatrix::identity(2));
    }

    #[test]
    fn werner_product_composes() {
        let a = werner_state_on(0.94, "q1", "q2").unwrap();
        let b = werner_state_on(0.94, "q3", "q4").unwrap();
        let rho = a.tensor(&b).unwrap();
        let expected = werner_state(0.94 * 0.94).unwrap();
        for r in bsm_all_outcomes(&rho, "q2", "q3").unwrap() {
            assert!(r.post_state.matrix().approx_eq(expected.matrix(), 1e-9));
        }
    }

    #[test]
    fn zero_probability_branch_is_an_error() {
        // |00>|00>: (q2, q3) = |00> has no psi overlap
        let rho =
            DensityMatrix::basis_state(HilbertSpec::qubits(&["q1", "q2", "q3", "q4"]).unwrap(), &[0, 0, 0, 0]).unwrap();
        let r = bsm(&rho, "q2", "q3", BsmMode::Deterministic(BellKind::PsiMinus));
        assert!(matches!(r, Err(Error::ZeroProbabilityBranch { .. })));
        // sampling never picks an impossible branch
        for seed in 0..20 {
            let r = bsm(&rho, "q2", "q3", BsmMode::Sampled(seed)).unwrap();
            assert!(matches!(r.outcome.kind, BellKind::PhiPlus | BellKind::PhiMinus));
        }
    }

    #[test]
    fn bsm_shape_checks() {
        let two = werner_state(0.5).unwrap();
        assert!(matches!(bsm(&two, "a", "b", BsmMode::Sampled(1)), Err(Error::Shape(_))));
        let rho = singlets();
        assert!(matches!(bsm(&rho, "q2", "zz", BsmMode::Sampled(1)), Err(Error::UnknownSubsystem(_))));
        assert!(bsm(&rho, "q2", "q2", BsmMode::Sampled(1)).is_err());
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let a = werner_state_on(0.7, "q1", "q2").unwrap();
        let b = werner_state_on(0.8, "q3", "q4").unwrap();
        let rho = a.tensor(&b).unwrap();
        let kinds: Vec<BellKind> =
            (0..32).map(|s| bsm(&rho, "q2", "q3", BsmMode::Sampled(s)).unwrap().outcome.kind).collect();
        let again: Vec<BellKind> =
            (0..32).map(|s| bsm(&rho, "q2", "q3", BsmMode::Sampled(s)).unwrap().outcome.kind).collect();
        assert_eq!(kinds, again);
        // all four outcomes show up for a full-rank input
        for k in BellKind::ALL {
            assert!(kinds.contains(&k));
        }
    }

    #[test]
    fn node_swap_gate_behaviour() {
        let space = HilbertSpec::qubits(&["x", "y"]).unwrap();
        let rho = DensityMatrix::basis_state(space.clone(), &[0, 1]).unwrap();
        let swapped = node_swap_gate(&rho, "x", "y").unwrap();
        assert_eq!(swapped.populations(), vec![0.0, 0.0, 1.0, 0.0]);

        let w = werner_state_on(0.3, "x", "y").unwrap().mix(&rho, 0.5).unwrap();
        let twice = node_swap_gate(&node_swap_gate(&w, "x", "y").unwrap(), "x", "y").unwrap();
        assert_eq!(twice.matrix(), w.matrix());
        let u = swap_unitary(&space, "x", "y").unwrap();
        assert!(w.conjugate_by(&u).unwrap().matrix().approx_eq(node_swap_gate(&w, "x", "y").unwrap().matrix(), 1e-15));

        let qutrit = DensityMatrix::maximally_mixed(HilbertSpec::new([("x", 2usize), ("y", 3)]).unwrap());
        assert!(matches!(node_swap_gate(&qutrit, "x", "y"), Err(Error::Shape(_))));
    }

    #[test]
    fn swap_gate_transfers_entanglement() {
        let pair = bell_state_on(BellKind::PsiMinus, "m1", "m2").unwrap();
        let vac = DensityMatrix::basis_state(HilbertSpec::qubits(&["c2"]).unwrap(), &[0]).unwrap();
        let joint = pair.tensor(&vac).unwrap();
        let moved = node_swap_gate(&joint, "m2", "c2").unwrap();
        let out = moved.partial_trace(&["m1", "c2"]).unwrap();
        let singlet = bell_state_on(BellKind::PsiMinus, "m1", "c2").unwrap();
        assert!(out.matrix().approx_eq(singlet.matrix(), 1e-12));
        let m2 = moved.partial_trace(&["m2"]).unwrap();
        assert!((m2.populations()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarize_cases() {
        let w = werner_state(0.8).unwrap();
        assert_eq!(depolarize(&w, 1.0).unwrap().matrix(), w.matrix());
        let mixed = depolarize(&w, 0.0).unwrap();
        assert!(mixed.matrix().approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), 1e-15));
        let composed = depolarize(&w, 0.9).unwrap();
        assert!(composed.matrix().approx_eq(werner_state(0.72).unwrap().matrix(), 1e-12));
        assert!(depolarize(&w, 1.5).is_err());
    }

    #[test]
    fn heralded_probability_values() {
        assert_eq!(heralded_link_probability(0.0, 10.0).unwrap(), 0.5);
        assert!((heralded_link_probability(10.0, 10.0).unwrap() - 0.183_939_720_585_721).abs() < 1e-12);
        assert!((heralded_link_probability(20.0, 10.0).unwrap() - 0.067_667_641_618_306).abs() < 1e-12);
        assert!(heralded_link_probability(-1.0, 10.0).is_err());
        assert!(heralded_link_probability(1.0, 0.0).is_err());
    }

    #[test]
    fn chained_swaps_stay_werner() {
        for links in 1..=4 {
            let s = werner_chain_state(links, 0.94, 1.0, BellKind::PhiMinus).unwrap();
            let expected = werner_state(0.94f64.powi(links as i32)).unwrap();
            assert!(s.matrix().approx_eq(expected.matrix(), 1e-9), "links = {links}");
        }
    }

    #[test]
    fn two_stage_protocol_matches_four_link_chain() {
        let pair = werner_state_on(0.94, "m", "c").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let report = two_stage_swap(&pair, DEFAULT_Q_SWAP, &mut rng).unwrap();
        assert_eq!(report.end_to_end.space().labels(), vec!["m1", "m4"]);
        let p = werner_parameter(&report.end_to_end).unwrap();
        let expected = 0.94f64.powi(4) * DEFAULT_Q_SWAP.powi(3);
        assert!((p - expected).abs() < 1e-9);
    }

    #[test]
    fn two_stage_batch_paths_agree() {
        let pair = werner_state_on(0.9, "m", "c").unwrap();
        let seeds: Vec<u64> = (0..8).collect();
        let a = two_stage_batch(&pair, 0.95, &seeds, Execution::Sequential).unwrap();
        let b = two_stage_batch(&pair, 0.95, &seeds, Execution::Parallel).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.second_stage.outcome.kind, y.second_stage.outcome.kind);
            assert_eq!(x.end_to_end.matrix(), y.end_to_end.matrix());
        }
    }
}
