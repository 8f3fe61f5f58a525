use hochlab::algebra::{matrix_algebra, AlgebraElement, AlgebraPresentation};
use hochlab::averaging::{
    averaging_harness, corner_cycles, decay_table, frame_cell, solve_primitive, verify_mechanism, CocycleInstance,
    Primitive,
};
use hochlab::chain::{differential, ComplexKind};
use hochlab::frame::{corner_splitting, corrupted_splitting, frame_corner_splitting, ShiftFrame, SplittingData};
use hochlab::homology::{cohomology, excision_compare, homology, is_h_unital_up_to, les_of_subcomplex, EngineOptions};
use hochlab::homotopy::{
    amplification_chain_map_check, averaged_boundary_check, conjugation_membership, contraction_check,
    face_relation_checks, gamma_null_homotopy_check, shift_homotopy_check, shift_sum_check, sigma_chain_map_check,
    HomotopyVerdict, IdentityId,
};
use hochlab::linalg::SparseVector;
use hochlab::norms::{check_m1, check_m3, random_m3_samples, L2_TOLERANCE};
use hochlab::rational::{parse_q, Q};
use hochlab::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::scenario::{
    AveragingTask, BarTask, Context, DecayTask, ExtensionTask, HomologyTask, IdentitiesTask, NormsTask, Task,
};

/// Identities checked when a task does not list any.
pub const FRAME_IDENTITIES: [IdentityId; 6] = [
    IdentityId::SigmaChainMap,
    IdentityId::FaceRelations,
    IdentityId::ShiftHomotopy,
    IdentityId::AmplificationChainMap,
    IdentityId::ShiftSum,
    IdentityId::AveragedBoundary,
];

/// What a task produced. `verdict` is `None` for purely informational
/// tasks.
#[derive(Debug)]
pub struct TaskOutput {
    pub verdict: Option<bool>,
    pub result: Value,
    /// Extra files `(name, contents)` for `--dump-matrices`.
    pub artifacts: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug)]
pub struct RunSettings {
    pub seed: u64,
    pub opts: EngineOptions,
    pub dump_matrices: bool,
}

pub fn execute(task: &Task, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    match task {
        Task::Homology(t) => homology_task(t, ctx, settings),
        Task::BarAcyclicity(t) => bar_task(t, ctx, settings),
        Task::VerifyIdentities(t) => identities_task(t, ctx, settings),
        Task::Les(t) => les_task(t, ctx, settings),
        Task::Excision(t) => excision_task(t, ctx, settings),
        Task::AverageCocycle(t) => averaging_task(t, ctx, settings),
        Task::Decay(t) => decay_task(t, ctx, settings),
        Task::Norms(t) => norms_task(t, ctx, settings),
    }
}

fn dump(a: &Arc<AlgebraPresentation>, kind: ComplexKind, top: usize, settings: &RunSettings) -> Result<Vec<(String, String)>> {
    if !settings.dump_matrices {
        return Ok(Vec::new());
    }
    let d = differential(a, kind);
    (1..=top)
        .map(|n| {
            let name = format!("{}-d{n}", kind.as_str());
            Ok((format!("{name}.mtx"), d.materialize(n)?.to_market(Some(&name))))
        })
        .collect()
}

fn homology_task(t: &HomologyTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let a = ctx.algebra(t.algebra.as_ref())?;
    let report = if t.cohomology {
        cohomology(&a, t.kind, t.max_degree, &settings.opts)?
    } else {
        homology(&a, t.kind, t.max_degree, &settings.opts)?
    };
    let dims = report.dims();
    Ok(TaskOutput {
        verdict: t.expect_dims.as_ref().map(|e| *e == dims),
        result: json!({
            "algebra": a.hash(),
            "algebra_dim": a.dim(),
            "dims": dims,
            "expected_dims": t.expect_dims,
            "report": report.to_json_value(),
        }),
        artifacts: dump(&a, t.kind, t.max_degree + 1, settings)?,
    })
}

fn bar_task(t: &BarTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let a = ctx.algebra(t.algebra.as_ref())?;
    let v = is_h_unital_up_to(&a, t.max_degree, &settings.opts)?;
    Ok(TaskOutput {
        verdict: Some(v.h_unital),
        result: serde_json::to_value(&v).expect("verdict serializes"),
        artifacts: dump(&a, ComplexKind::Bar, t.max_degree + 1, settings)?,
    })
}

/// `m` when `a` has the structure constants of `M_m` on the matrix-unit
/// basis in row-major order (labels are ignored).
fn matrix_order(a: &AlgebraPresentation) -> Option<usize> {
    let m = (1..=a.dim()).find(|m| m * m >= a.dim()).filter(|m| m * m == a.dim())?;
    let reference = matrix_algebra(m).ok()?;
    let same = (0..a.dim()).all(|i| (0..a.dim()).all(|j| a.basis_product(i, j) == reference.basis_product(i, j)));
    (same && a.unit() == reference.unit()).then_some(m)
}

fn random_element(a: &Arc<AlgebraPresentation>, rng: &mut ChaCha8Rng) -> Result<AlgebraElement> {
    let coeffs: Vec<Q> = (0..a.dim()).map(|_| Q::from_integer(rng.gen_range(-3i64..=3).into())).collect();
    AlgebraElement::new(a.clone(), SparseVector::from_dense(&coeffs))
}

/// Splittings for `splitting-contracts`: of the task's (or scenario's)
/// matrix algebra, or else of the frame's corner algebra, tensored with the
/// pivot-0 splitting of a matrix coefficient algebra.
fn splittings(t: &IdentitiesTask, ctx: &Context) -> Result<Vec<SplittingData>> {
    let use_algebra = t.algebra.is_some() || (t.frame.is_none() && ctx.algebra.is_some());
    if use_algebra {
        let a = ctx.algebra(t.algebra.as_ref())?;
        let m = matrix_order(&a)
            .ok_or_else(|| Error::InvalidSplitting("splittings are built for full matrix algebras".into()))?;
        if t.corrupted {
            return Ok(vec![corrupted_splitting(m)?]);
        }
        let pivots = t.pivots.clone().unwrap_or_else(|| (0..m).collect());
        return pivots.iter().map(|&p| corner_splitting(m, p)).collect();
    }
    let frame = ctx.frame(t.frame.as_ref())?;
    let coefficient_split = match frame.coefficients() {
        None => None,
        Some(c) => {
            let r = matrix_order(c).ok_or_else(|| {
                Error::InvalidSplitting("coefficient algebras are split when they are full matrix algebras".into())
            })?;
            Some(corner_splitting(r, 0)?)
        }
    };
    if t.corrupted {
        if coefficient_split.is_some() {
            return Err(Error::InvalidArgument("the corrupted splitting is defined without coefficients".into()));
        }
        return Ok(vec![corrupted_splitting(frame.k())?]);
    }
    let pivots = t.pivots.clone().unwrap_or_else(|| (0..frame.k()).collect());
    pivots
        .iter()
        .map(|&p| frame_corner_splitting(&frame, p, coefficient_split.as_ref()))
        .collect()
}

fn no_sabotage(id: IdentityId) -> Error {
    Error::InvalidArgument(format!("{} has no sabotaged variant", id.as_str()))
}

fn identities_task(t: &IdentitiesTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let opts = &settings.opts;
    let ids = t.identities.clone().unwrap_or_else(|| FRAME_IDENTITIES.to_vec());
    let needs_frame = ids
        .iter()
        .any(|id| !matches!(id, IdentityId::GammaNullHomotopic | IdentityId::SplittingContracts));
    let frame = if needs_frame { Some(ctx.frame(t.frame.as_ref())?) } else { None };
    let fr = || frame.as_ref().expect("frame resolved above");
    let mut verdicts: Vec<HomotopyVerdict> = Vec::new();
    for &id in &ids {
        for &n in &t.degrees {
            match id {
                IdentityId::SigmaChainMap => {
                    if t.sabotage {
                        return Err(no_sabotage(id));
                    }
                    let f = fr();
                    for l in 0..f.blocks() {
                        verdicts.push(sigma_chain_map_check(f, l * f.k(), n, opts)?);
                    }
                }
                IdentityId::FaceRelations => {
                    let f = fr();
                    for l in 0..f.blocks() {
                        verdicts.extend(face_relation_checks(f, f.blocks(), l, n, t.sabotage, opts)?);
                    }
                }
                IdentityId::ShiftHomotopy => {
                    let f = fr();
                    for l in 0..f.blocks() {
                        verdicts.push(shift_homotopy_check(f, f.blocks(), l, n, t.sabotage, opts)?);
                    }
                }
                IdentityId::AmplificationChainMap => {
                    verdicts.push(amplification_chain_map_check(fr(), fr().blocks(), n, t.sabotage, opts)?)
                }
                IdentityId::ShiftSum => verdicts.push(shift_sum_check(fr(), fr().blocks(), n, t.sabotage, opts)?),
                IdentityId::AveragedBoundary => {
                    verdicts.push(averaged_boundary_check(fr(), fr().blocks(), n, t.sabotage, opts)?)
                }
                IdentityId::GammaNullHomotopic => {
                    if t.sabotage {
                        return Err(no_sabotage(id));
                    }
                    let a = ctx.algebra(t.algebra.as_ref())?;
                    // the same elements at every degree
                    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
                    for _ in 0..t.samples {
                        let h = random_element(&a, &mut rng)?;
                        verdicts.push(gamma_null_homotopy_check(&h, n, opts)?);
                    }
                }
                IdentityId::SplittingContracts => {
                    if t.sabotage {
                        return Err(no_sabotage(id));
                    }
                    let splittings = splittings(t, ctx)?;
                    let kinds = t.kinds.clone().unwrap_or_else(|| vec![ComplexKind::Hochschild]);
                    for s in &splittings {
                        for &kind in &kinds {
                            verdicts.push(contraction_check(s, kind, n, opts)?);
                        }
                    }
                }
                IdentityId::ConjugationMembership => {
                    if t.sabotage {
                        return Err(no_sabotage(id));
                    }
                    let f = fr();
                    let cycles = corner_cycles(f, n, settings.seed, opts)?;
                    for l in 1..f.blocks() {
                        for tau in &cycles {
                            verdicts.push(conjugation_membership(f, l * f.k(), tau, opts)?.verdict);
                        }
                    }
                }
            }
        }
    }
    let passed = verdicts.iter().filter(|v| v.passed()).count();
    let first_failure = verdicts.iter().find(|v| !v.passed()).map(HomotopyVerdict::to_json_value);
    Ok(TaskOutput {
        verdict: Some(passed == verdicts.len()),
        result: json!({
            "frame": frame.as_ref().map(ShiftFrame::config),
            "identities": ids,
            "degrees": t.degrees,
            "sabotaged": t.sabotage,
            "checks": verdicts.len(),
            "passed": passed,
            "failed": verdicts.len() - passed,
            "first_failure": first_failure,
            "verdicts": verdicts.iter().map(HomotopyVerdict::to_json_value).collect::<Vec<_>>(),
        }),
        artifacts: Vec::new(),
    })
}

fn les_task(t: &ExtensionTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let ext = ctx.extension(t.extension.as_ref())?;
    let r = les_of_subcomplex(&ext, t.kind, t.max_degree, &settings.opts)?;
    Ok(TaskOutput {
        verdict: Some(r.exact),
        result: r.to_json_value(),
        artifacts: Vec::new(),
    })
}

fn excision_task(t: &ExtensionTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let ext = ctx.extension(t.extension.as_ref())?;
    let r = excision_compare(&ext, t.kind, t.max_degree, &settings.opts)?;
    Ok(TaskOutput {
        verdict: Some(r.holds),
        result: r.to_json_value(),
        artifacts: Vec::new(),
    })
}

fn averaging_task(t: &AveragingTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let base = ctx.frame(t.frame.as_ref())?;
    let d = CocycleInstance::from_spec(base.ambient(), t.degree, &t.cocycle, settings.seed, &settings.opts)?;
    let r = averaging_harness(&base, &d, &t.k, &t.blocks, t.norm, settings.seed, &settings.opts)?;
    Ok(TaskOutput {
        verdict: Some(r.passed),
        result: json!({
            "frame": base.config(),
            "cocycle": t.cocycle,
            "report": serde_json::to_value(&r).expect("report serializes"),
        }),
        artifacts: Vec::new(),
    })
}

fn decay_task(t: &DecayTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let opts = &settings.opts;
    let base = ctx.frame(t.frame.as_ref())?;
    let d = CocycleInstance::from_spec(base.ambient(), t.degree, &t.cocycle, settings.seed, opts)?;
    let primitive = solve_primitive(&d, opts)?;
    let Primitive::Found(phi) = &primitive else {
        return Ok(TaskOutput {
            verdict: Some(false),
            result: json!({
                "frame": base.config(),
                "cocycle": t.cocycle,
                "primitive": primitive.to_json_value(),
            }),
            artifacts: Vec::new(),
        });
    };
    let mechanisms = t
        .blocks
        .iter()
        .map(|&n| verify_mechanism(&frame_cell(&base, t.k, n)?, n, &d, phi, opts))
        .collect::<Result<Vec<_>>>()?;
    let table = decay_table(&base, t.k, &t.blocks, &d, phi, t.norm, opts)?;
    Ok(TaskOutput {
        verdict: Some(table.passed() && mechanisms.iter().all(|m| m.passed())),
        result: json!({
            "frame": base.config(),
            "cocycle": t.cocycle,
            "cocycle_values": d.cochain().to_json_value(),
            "primitive": primitive.to_json_value(),
            "mechanisms": serde_json::to_value(&mechanisms).expect("checks serialize"),
            "decay": serde_json::to_value(&table).expect("table serializes"),
        }),
        artifacts: Vec::new(),
    })
}

fn norms_task(t: &NormsTask, ctx: &Context, settings: &RunSettings) -> Result<TaskOutput> {
    let frame = ctx.frame(t.frame.as_ref())?;
    let entries = match &t.element {
        None => vec![(0, 0, Q::from_integer(1.into()))],
        Some(v) => v
            .iter()
            .map(|(i, j, x)| Ok((*i, *j, parse_q(x)?)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut coeffs = Vec::new();
    for (i, j, x) in entries {
        if i >= frame.k() || j >= frame.k() {
            return Err(Error::Support(format!("entry ({i}, {j}) is outside the {}-corner", frame.k())));
        }
        coeffs.push((frame.index(i, j, 0), x));
    }
    let a = frame.element(SparseVector::from_entries(coeffs))?;
    let m1 = check_m1(&frame, &a, &t.blocks, t.norm)?;
    let samples = random_m3_samples(&frame, t.samples, settings.seed)?;
    let m3 = check_m3(&frame, &samples, t.norm)?;
    // numeric norms are reported, never judged
    let verdict = t.norm.is_exact().then_some(m1.isometric && m3.isometric);
    let within_tolerance = (!t.norm.is_exact()).then(|| {
        m1.rows.iter().all(|r| (r.ratio.to_f64() - 1.0).abs() <= L2_TOLERANCE)
            && (m3.max_ratio.to_f64() - 1.0).abs() <= L2_TOLERANCE
    });
    Ok(TaskOutput {
        verdict,
        result: json!({
            "frame": frame.config(),
            "norm": t.norm,
            "m1": serde_json::to_value(&m1).expect("report serializes"),
            "m3": serde_json::to_value(&m3).expect("report serializes"),
            "tolerance": (!t.norm.is_exact()).then_some(L2_TOLERANCE),
            "within_tolerance": within_tolerance,
        }),
        artifacts: Vec::new(),
    })
}
