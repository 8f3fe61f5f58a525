//! Cocycles on shift-frame ambients, their primitives, and the
//! block-averaged functionals `φ̄_N(τ) = φ((1/N)Σ_l(σ_{lk} − δh^N_l)τ)`.
//!
//! Everything is evaluated at finite `N`; where a limit over `N` or `k`
//! would be taken, reports carry the whole finite sequence instead.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraPresentation;
use crate::chain::{
    decode, differential, dual_differential, format_tuple, parse_tuple, space_size, Chain, ChainBasis, Cochain,
    ComplexKind, GradedMap,
};
use crate::error::{Error, Result};
use crate::frame::ShiftFrame;
use crate::homology::EngineOptions;
use crate::homotopy::{averaged_boundary_check, averaging_operator, corner_basis, delta_n, HomotopyVerdict};
use crate::linalg::{rank_and_kernel, solve, SolveOutcome, SparseVector};
use crate::norms::{chain_norm, cochain_norm, NormKind, NormValue};
use crate::rational::{format_q, parse_q, Q};

/// Cycle sets larger than this are replaced by a seeded random sample.
pub const MAX_TEST_CYCLES: usize = 100;

/// Scale of the cocycle added to a primitive in the adversarial control.
pub const ADVERSARIAL_SCALE: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    RandomCoboundary,
    Handcrafted,
    TracePower,
}

fn default_range() -> i64 {
    3
}

/// A cocycle as written in a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CocycleSpec {
    /// `∂ψ` for `ψ` with uniform integer values in `[-range, range]`.
    RandomCoboundary {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "default_range")]
        range: i64,
    },
    /// Values on basis tuples, e.g. `["0,3", "1/2"]`.
    Handcrafted { values: Vec<(String, String)> },
    /// `a_0 ⊗ ⋯ ⊗ a_n ↦ tr(a_0 ⋯ a_n)`.
    TracePower {},
}

/// An `n`-cochain whose coboundary has been checked to vanish exactly.
#[derive(Clone, Debug)]
pub struct CocycleInstance {
    cochain: Cochain,
    provenance: Provenance,
}

impl CocycleInstance {
    pub fn new(cochain: Cochain, provenance: Provenance, opts: &EngineOptions) -> Result<Self> {
        let alg = cochain.algebra();
        opts.check(
            &format!("cocycle check in degree {}", cochain.degree() + 1),
            space_size(alg.dim(), cochain.degree() + 1)?,
        )?;
        let d = dual_differential(&cochain)?;
        if let Some((&code, x)) = d.raw_values().iter().next() {
            let t = decode(alg.dim(), code, cochain.degree() + 2);
            return Err(Error::NotCocycle(format!(
                "(∂D)({}) = {}",
                format_tuple(&t),
                format_q(x)
            )));
        }
        Ok(Self { cochain, provenance })
    }

    pub fn from_spec(
        alg: &Arc<AlgebraPresentation>,
        degree: usize,
        spec: &CocycleSpec,
        seed: u64,
        opts: &EngineOptions,
    ) -> Result<Self> {
        match spec {
            CocycleSpec::RandomCoboundary { seed: s, range } => {
                random_coboundary(alg, degree, s.unwrap_or(seed), *range, opts)
            }
            CocycleSpec::Handcrafted { values } => {
                let values = values
                    .iter()
                    .map(|(t, x)| Ok((parse_tuple(t)?, parse_q(x)?)))
                    .collect::<Result<Vec<_>>>()?;
                Self::new(Cochain::from_values(alg.clone(), degree, values)?, Provenance::Handcrafted, opts)
            }
            CocycleSpec::TracePower {} => trace_power(alg, degree, opts),
        }
    }

    pub fn cochain(&self) -> &Cochain {
        &self.cochain
    }

    pub fn degree(&self) -> usize {
        self.cochain.degree()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// `D = ∂ψ` for a seeded random `(n−1)`-cochain `ψ`.
pub fn random_coboundary(
    alg: &Arc<AlgebraPresentation>,
    degree: usize,
    seed: u64,
    range: i64,
    opts: &EngineOptions,
) -> Result<CocycleInstance> {
    if degree == 0 {
        return Err(Error::InvalidArgument("coboundaries start in degree 1".into()));
    }
    let psi = random_cochain(alg, degree - 1, seed, range, opts)?;
    CocycleInstance::new(dual_differential(&psi)?, Provenance::RandomCoboundary, opts)
}

fn random_cochain(
    alg: &Arc<AlgebraPresentation>,
    degree: usize,
    seed: u64,
    range: i64,
    opts: &EngineOptions,
) -> Result<Cochain> {
    let size = space_size(alg.dim(), degree)?;
    opts.check(&format!("random cochain of degree {degree}"), size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = SparseVector::from_entries(
        (0..size as usize)
            .map(|c| (c, Q::from_integer(rng.gen_range(-range..=range).into())))
            .collect(),
    );
    Cochain::from_vector(alg.clone(), degree, &v)
}

/// `tr(a_0 ⋯ a_n)` on a matrix-type algebra. A cocycle in even degrees.
pub fn trace_power(alg: &Arc<AlgebraPresentation>, degree: usize, opts: &EngineOptions) -> Result<CocycleInstance> {
    let repr = alg
        .matrix_repr()
        .ok_or_else(|| Error::InvalidArgument("the trace needs a matrix interpretation".into()))?;
    let size = space_size(alg.dim(), degree)?;
    opts.check(&format!("trace cochain of degree {degree}"), size)?;
    let values: Vec<(usize, Q)> = (0..size)
        .into_par_iter()
        .filter_map(|code| {
            let t = decode(alg.dim(), code, degree + 1);
            let mut prod = SparseVector::unit(t[0]);
            for &b in &t[1..] {
                prod = alg.mul(&prod, &SparseVector::unit(b));
            }
            let tr: Q = prod
                .iter()
                .filter(|(b, _)| repr.positions[*b].0 == repr.positions[*b].1)
                .map(|(_, x)| x.clone())
                .sum();
            (!tr.is_zero()).then_some((code as usize, tr))
        })
        .collect();
    let cochain = Cochain::from_vector(alg.clone(), degree, &SparseVector::from_entries(values))?;
    CocycleInstance::new(cochain, Provenance::TracePower, opts)
}

/// Outcome of solving `∂φ = D`.
#[derive(Clone, Debug)]
pub enum Primitive {
    Found(Cochain),
    /// A cycle `z` with `D(z) ≠ 0`, so `D` is not a coboundary.
    Obstructed { cycle: Chain, pairing: Q },
}

impl Primitive {
    pub fn cochain(&self) -> Option<&Cochain> {
        match self {
            Primitive::Found(phi) => Some(phi),
            Primitive::Obstructed { .. } => None,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            Primitive::Found(phi) => serde_json::json!({
                "found": true,
                "degree": phi.degree(),
                "support": phi.raw_values().len(),
            }),
            Primitive::Obstructed { cycle, pairing } => serde_json::json!({
                "found": false,
                "cycle": cycle.to_json_value(),
                "pairing": format_q(pairing),
            }),
        }
    }
}

/// Solves `φ ∘ δ = D` exactly on the transposed differential. Both outcomes
/// are re-verified before they are returned.
pub fn solve_primitive(d: &CocycleInstance, opts: &EngineOptions) -> Result<Primitive> {
    let cochain = d.cochain();
    let alg = cochain.algebra();
    let n = cochain.degree();
    if n == 0 {
        // the cochains below degree 0 are zero
        return match cochain.raw_values().iter().next() {
            Some((&code, x)) => Ok(Primitive::Obstructed {
                cycle: Chain::basis(alg.clone(), &decode(alg.dim(), code, 1))?,
                pairing: x.clone(),
            }),
            None => Err(Error::InvalidArgument("the zero 0-cocycle has no primitive of degree -1".into())),
        };
    }
    opts.check(&format!("primitive solve in degree {n}"), space_size(alg.dim(), n)?)?;
    let delta = differential(alg, ComplexKind::Hochschild).materialize(n)?;
    match solve(&delta.transpose(), &cochain.to_vector())? {
        SolveOutcome::Solution(x) => {
            let phi = Cochain::from_vector(alg.clone(), n - 1, &x)?;
            if &dual_differential(&phi)? != cochain {
                return Err(Error::Internal("primitive does not reproduce the cocycle".into()));
            }
            Ok(Primitive::Found(phi))
        }
        SolveOutcome::Infeasible(y) => {
            let cycle = Chain::from_vector(alg.clone(), &ChainBasis::full(alg.dim(), n)?, &y)?;
            let pairing = cochain.evaluate(&cycle)?;
            if !crate::chain::hochschild_differential(&cycle)?.is_zero() || pairing.is_zero() {
                return Err(Error::Internal("obstruction certificate failed to verify".into()));
            }
            Ok(Primitive::Obstructed { cycle, pairing })
        }
    }
}

/// The frame with corner size `k` and `N` blocks inside the ambient of
/// `base`.
pub fn frame_cell(base: &ShiftFrame, k: usize, blocks: usize) -> Result<ShiftFrame> {
    let needed = k * blocks;
    if needed == 0 || needed > base.order() {
        return Err(Error::OutOfRange(format!(
            "k = {k}, N = {blocks} needs order {needed}, the ambient has order {}",
            base.order()
        )));
    }
    let f = ShiftFrame::with_coefficients(k, blocks, base.order() - needed, base.coefficients().cloned())?;
    debug_assert_eq!(f.ambient().hash(), base.ambient().hash());
    Ok(f)
}

fn check_ambient(frame: &ShiftFrame, c: &Cochain) -> Result<()> {
    if c.algebra().hash() != frame.ambient().hash() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

/// `φ̄_N` and `ψ_k = φ − φ̄_N`, both as values on the corner basis tuples of
/// `φ`'s degree (the only chains they are defined on).
#[derive(Clone, Debug)]
pub struct AveragedFunctional {
    pub k: usize,
    pub blocks: usize,
    pub phi_bar: Cochain,
    pub psi: Cochain,
}

pub fn averaged_functional(
    frame: &ShiftFrame,
    blocks: usize,
    phi: &Cochain,
    opts: &EngineOptions,
) -> Result<AveragedFunctional> {
    check_ambient(frame, phi)?;
    let m = phi.degree();
    let basis = corner_basis(frame, m, opts)?;
    let images = averaging_operator(frame, blocks, false)?.images(m, &basis)?;
    let mut bar = Vec::new();
    let mut psi = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let v: Q = img.iter().map(|(c, x)| phi.value_code(*c) * x).sum();
        let t = basis.tuple(i);
        psi.push((t.clone(), phi.value_code(basis.code(i)) - &v));
        bar.push((t, v));
    }
    Ok(AveragedFunctional {
        k: frame.k(),
        blocks,
        phi_bar: Cochain::from_values(phi.algebra().clone(), m, bar)?,
        psi: Cochain::from_values(phi.algebra().clone(), m, psi)?,
    })
}

/// Exact values of `φ̄_N(δτ)` and `D(Δ_Nτ)` for every degree-`n` corner
/// basis tuple `τ`.
struct Substitution {
    taus: Vec<Vec<usize>>,
    averaged: Vec<Q>,
    amplified: Vec<Q>,
}

fn substitution(
    frame: &ShiftFrame,
    blocks: usize,
    d: &CocycleInstance,
    phi: &Cochain,
    opts: &EngineOptions,
) -> Result<Substitution> {
    let n = d.degree();
    let basis = corner_basis(frame, n, opts)?;
    let delta = differential(frame.ambient(), ComplexKind::Hochschild);
    let averaged_boundary: GradedMap = averaging_operator(frame, blocks, false)?.compose(&delta)?;
    let avg = averaged_boundary.images(n, &basis)?;
    let amp = delta_n(frame, blocks)?.images(n, &basis)?;
    let eval = |f: &Cochain, img: &std::collections::BTreeMap<u64, Q>| -> Q {
        img.iter().map(|(c, x)| f.value_code(*c) * x).sum()
    };
    Ok(Substitution {
        taus: (0..basis.len()).map(|i| basis.tuple(i)).collect(),
        averaged: avg.iter().map(|img| eval(phi, img)).collect(),
        amplified: amp.iter().map(|img| eval(d.cochain(), img)).collect(),
    })
}

fn primitive_degree(d: &CocycleInstance, phi: &Cochain) -> Result<()> {
    if d.degree() == 0 || phi.degree() + 1 != d.degree() || phi.algebra().hash() != d.cochain().algebra().hash() {
        return Err(Error::InvalidArgument("φ must be a cochain one degree below D on the same algebra".into()));
    }
    Ok(())
}

/// `φ̄_N(δτ) = D(Δ_Nτ)/N` on every corner basis tuple, together with the
/// chain-level identity it comes from.
#[derive(Clone, Debug, Serialize)]
pub struct MechanismCheck {
    pub k: usize,
    #[serde(rename = "N")]
    pub blocks: usize,
    pub degree: usize,
    pub checked: usize,
    pub boundary_identity: HomotopyVerdict,
    pub substitution_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl MechanismCheck {
    pub fn passed(&self) -> bool {
        self.boundary_identity.passed() && self.substitution_holds
    }
}

pub fn verify_mechanism(
    frame: &ShiftFrame,
    blocks: usize,
    d: &CocycleInstance,
    phi: &Cochain,
    opts: &EngineOptions,
) -> Result<MechanismCheck> {
    check_ambient(frame, d.cochain())?;
    primitive_degree(d, phi)?;
    let n = d.degree();
    let boundary_identity = averaged_boundary_check(frame, blocks, n, false, opts)?;
    let s = substitution(frame, blocks, d, phi, opts)?;
    let nq = Q::from_integer((blocks as i64).into());
    let witness = (0..s.taus.len())
        .find(|&i| &s.averaged[i] * &nq != s.amplified[i])
        .map(|i| format_tuple(&s.taus[i]));
    Ok(MechanismCheck {
        k: frame.k(),
        blocks,
        degree: n,
        checked: s.taus.len(),
        boundary_identity,
        substitution_holds: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub tau: String,
    #[serde(rename = "N")]
    pub blocks: usize,
    /// `φ̄_N(δτ)`.
    pub value: String,
    /// `N·|φ̄_N(δτ)| = |D(Δ_Nτ)|`.
    pub scaled: String,
    /// `‖D‖·‖Δ_Nτ‖/N` with the representation-based chain norm.
    pub bound: NormValue,
}

/// `|φ̄_N(δτ)|` against `N` for every degree-`n` corner basis tuple of the
/// `k`-corner.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub k: usize,
    pub degree: usize,
    pub norm: NormKind,
    pub cocycle_norm: NormValue,
    pub rows: Vec<DecayRow>,
    pub identity_holds: bool,
    pub constant_in_n: bool,
    pub bound_holds: bool,
}

impl DecayReport {
    /// `constant_in_n` is reported but not required: beyond the trivial
    /// cases the scaled values are only bounded.
    pub fn passed(&self) -> bool {
        self.identity_holds && self.bound_holds
    }
}

pub fn decay_table(
    base: &ShiftFrame,
    k: usize,
    n_range: &[usize],
    d: &CocycleInstance,
    phi: &Cochain,
    kind: NormKind,
    opts: &EngineOptions,
) -> Result<DecayReport> {
    check_ambient(base, d.cochain())?;
    primitive_degree(d, phi)?;
    if !kind.is_exact() {
        return Err(Error::InvalidArgument("decay tables use the exact l1 or linf norms".into()));
    }
    if n_range.is_empty() {
        return Err(Error::InvalidArgument("empty N range".into()));
    }
    let cocycle_norm = cochain_norm(d.cochain(), kind)?;
    let cells = n_range
        .par_iter()
        .map(|&blocks| {
            let frame = frame_cell(base, k, blocks)?;
            let s = substitution(&frame, blocks, d, phi, opts)?;
            let amp = delta_n(&frame, blocks)?;
            let bounds = s
                .taus
                .iter()
                .map(|t| {
                    let image = amp.apply(&Chain::basis(frame.ambient().clone(), t)?)?;
                    let inv = NormValue::Exact(Q::new(1.into(), (blocks as i64).into()));
                    Ok(cocycle_norm.mul(&chain_norm(&image, kind)?).mul(&inv))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((blocks, s, bounds))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let (mut identity_holds, mut constant_in_n, mut bound_holds) = (true, true, true);
    let first_scaled: Vec<Q> = cells[0].1.averaged.iter().map(|v| v.abs() * Q::from_integer((cells[0].0 as i64).into())).collect();
    for (blocks, s, bounds) in &cells {
        let nq = Q::from_integer((*blocks as i64).into());
        for (i, tau) in s.taus.iter().enumerate() {
            let value = &s.averaged[i];
            let scaled = value.abs() * &nq;
            identity_holds &= value * &nq == s.amplified[i];
            constant_in_n &= scaled == first_scaled[i];
            bound_holds &= bounds[i].exact().is_some_and(|b| &value.abs() <= b);
            rows.push(DecayRow {
                tau: format_tuple(tau),
                blocks: *blocks,
                value: format_q(value),
                scaled: format_q(&scaled),
                bound: bounds[i].clone(),
            });
        }
    }
    Ok(DecayReport {
        k,
        degree: d.degree(),
        norm: kind,
        cocycle_norm,
        rows,
        identity_holds,
        constant_in_n,
        bound_holds,
    })
}

/// Cycles of `frame`'s corner complex in `degree`: a kernel basis, or a
/// seeded sample of [`MAX_TEST_CYCLES`] random kernel combinations.
pub fn corner_cycles(frame: &ShiftFrame, degree: usize, seed: u64, opts: &EngineOptions) -> Result<Vec<Chain>> {
    let alg = frame.ambient();
    let basis = corner_basis(frame, degree, opts)?;
    let kernel: Vec<SparseVector> = if degree == 0 {
        (0..basis.len()).map(SparseVector::unit).collect()
    } else {
        let delta = differential(alg, ComplexKind::Hochschild);
        let m = delta.materialize_on(degree, &basis, &corner_basis(frame, degree - 1, opts)?)?;
        rank_and_kernel(&m).1.vectors()
    };
    let chosen = if kernel.len() <= MAX_TEST_CYCLES {
        kernel
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..MAX_TEST_CYCLES)
            .map(|_| {
                kernel.iter().fold(SparseVector::new(), |acc, v| {
                    acc.add_scaled(v, &Q::from_integer(rng.gen_range(-2i64..=2).into()))
                })
            })
            .filter(|v| !v.is_zero())
            .collect()
    };
    chosen.iter().map(|v| Chain::from_vector(alg.clone(), &basis, v)).collect()
}

/// A cocycle of degree `m` that is large and generic: `∂ρ` for a random
/// `ρ` when `m ≥ 1`, the trace in degree 0.
fn adversarial_cocycle(alg: &Arc<AlgebraPresentation>, m: usize, seed: u64, opts: &EngineOptions) -> Result<Cochain> {
    let c = if m == 0 {
        trace_power(alg, 0, opts)?.cochain().clone()
    } else {
        random_coboundary(alg, m, seed, 3, opts)?.cochain().clone()
    };
    Ok(c.scale(&Q::from_integer(ADVERSARIAL_SCALE.into())))
}

#[derive(Clone, Debug, Serialize)]
pub struct AveragingCell {
    pub k: usize,
    #[serde(rename = "N")]
    pub blocks: usize,
    pub test_cycles: usize,
    /// `sup |ψ_k(τ)| / (‖D‖·‖τ‖)` over the test cycles.
    pub kappa: NormValue,
    pub mechanism: MechanismCheck,
    /// `D = ψ_k∘δ + (1/N)D∘Δ_N` on every degree-`n` corner basis tuple.
    pub generation_holds: bool,
    /// `ψ_k` on cycles is unchanged when a huge cocycle is added to `φ`.
    pub adversarial_invariant: bool,
    /// `ψ_k` on the fixed probe cycles (those of the smallest corner).
    pub probe_values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    #[serde(rename = "N")]
    pub blocks: usize,
    pub k: Vec<usize>,
    /// Largest `|ψ_{k'}(τ) − ψ_k(τ)|` over the probes, consecutive `k`.
    pub max_differences: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AveragingReport {
    pub order: usize,
    pub degree: usize,
    pub provenance: Provenance,
    pub norm: NormKind,
    pub cocycle_norm: NormValue,
    pub primitive: serde_json::Value,
    pub cells: Vec<AveragingCell>,
    /// Largest `κ` over all cells; `null` without a primitive.
    pub max_kappa: Option<NormValue>,
    pub stabilization: Vec<Stabilization>,
    pub passed: bool,
}

/// Runs every `(k, N)` cell with `k·N` within the ambient order.
#[allow(clippy::too_many_arguments)]
pub fn averaging_harness(
    base: &ShiftFrame,
    d: &CocycleInstance,
    k_range: &[usize],
    n_range: &[usize],
    kind: NormKind,
    seed: u64,
    opts: &EngineOptions,
) -> Result<AveragingReport> {
    check_ambient(base, d.cochain())?;
    if !kind.is_exact() {
        return Err(Error::InvalidArgument("averaging reports use the exact l1 or linf norms".into()));
    }
    let primitive = solve_primitive(d, opts)?;
    let cocycle_norm = cochain_norm(d.cochain(), kind)?;
    let mut report = AveragingReport {
        order: base.order(),
        degree: d.degree(),
        provenance: d.provenance(),
        norm: kind,
        cocycle_norm: cocycle_norm.clone(),
        primitive: primitive.to_json_value(),
        cells: Vec::new(),
        max_kappa: None,
        stabilization: Vec::new(),
        passed: false,
    };
    let Some(phi) = primitive.cochain() else {
        return Ok(report);
    };
    let m = phi.degree();
    let pairs: Vec<(usize, usize)> = k_range
        .iter()
        .flat_map(|&k| n_range.iter().map(move |&n| (k, n)))
        .filter(|&(k, n)| k * n <= base.order() && k >= 1 && n >= 1)
        .collect();
    let k_min = pairs.iter().map(|p| p.0).min().ok_or_else(|| {
        Error::InvalidArgument(format!("no (k, N) pair fits in order {}", base.order()))
    })?;
    let probes = corner_cycles(&frame_cell(base, k_min, 1)?, m, seed, opts)?;
    let adversarial = phi.add_scaled(&adversarial_cocycle(phi.algebra(), m, seed ^ 0x5eed, opts)?, &Q::from_integer(1.into()))?;

    let cells = pairs
        .par_iter()
        .map(|&(k, blocks)| {
            let frame = frame_cell(base, k, blocks)?;
            let af = averaged_functional(&frame, blocks, phi, opts)?;
            let cycles = corner_cycles(&frame, m, seed, opts)?;
            let mut kappa = NormValue::Exact(Q::zero());
            for tau in &cycles {
                let r = NormValue::Exact(af.psi.evaluate(tau)?.abs()).ratio(&cocycle_norm.mul(&chain_norm(tau, kind)?));
                // a zero cocycle gives ψ_k = 0 on cycles
                let r = match r {
                    Ok(r) => r,
                    Err(_) if cocycle_norm.is_zero() => NormValue::Exact(Q::zero()),
                    Err(e) => return Err(e),
                };
                if r.compare(&kappa).is_gt() {
                    kappa = r;
                }
            }
            let mechanism = verify_mechanism(&frame, blocks, d, phi, opts)?;
            let s = substitution(&frame, blocks, d, phi, opts)?;
            let delta = differential(frame.ambient(), ComplexKind::Hochschild);
            let nq = Q::from_integer((blocks as i64).into());
            let mut generation_holds = true;
            for (i, t) in s.taus.iter().enumerate() {
                let tau = Chain::basis(frame.ambient().clone(), t)?;
                let lhs = d.cochain().evaluate(&tau)?;
                let rhs = af.psi.evaluate(&delta.apply(&tau)?)? + &s.amplified[i] / &nq;
                generation_holds &= lhs == rhs;
            }
            let adv = averaged_functional(&frame, blocks, &adversarial, opts)?;
            let mut adversarial_invariant = true;
            for tau in &cycles {
                adversarial_invariant &= adv.psi.evaluate(tau)? == af.psi.evaluate(tau)?;
            }
            let probe_values = probes
                .iter()
                .map(|p| af.psi.evaluate(p).map(|x| format_q(&x)))
                .collect::<Result<Vec<_>>>()?;
            Ok(AveragingCell {
                k,
                blocks,
                test_cycles: cycles.len(),
                kappa,
                mechanism,
                generation_holds,
                adversarial_invariant,
                probe_values,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut blocks_seen: Vec<usize> = cells.iter().map(|c| c.blocks).collect();
    blocks_seen.sort_unstable();
    blocks_seen.dedup();
    for &n in &blocks_seen {
        let row: Vec<&AveragingCell> = cells.iter().filter(|c| c.blocks == n).collect();
        let values = |c: &AveragingCell| c.probe_values.iter().map(|v| parse_q(v)).collect::<Result<Vec<Q>>>();
        let mut max_differences = Vec::new();
        for w in row.windows(2) {
            let (a, b) = (values(w[0])?, values(w[1])?);
            let diff = a.iter().zip(&b).map(|(x, y)| (y - x).abs()).max().unwrap_or_else(Q::zero);
            max_differences.push(format_q(&diff));
        }
        report.stabilization.push(Stabilization {
            blocks: n,
            k: row.iter().map(|c| c.k).collect(),
            max_differences,
        });
    }
    report.max_kappa = cells
        .iter()
        .map(|c| c.kappa.clone())
        .max_by(|a, b| a.compare(b));
    report.passed = cells
        .iter()
        .all(|c| c.mechanism.passed() && c.generation_holds && c.adversarial_invariant);
    report.cells = cells;
    Ok(report)
}
