//! Chain maps and homotopies on shift frames, and exact verification of the
//! identities relating them.

mod operators;

use num_traits::One;
use serde::{Deserialize, Serialize};

pub use operators::{
    conjugation, conjugation_homotopy, delta_n, delta_n_alternating, gamma, h_l, h_li, h_sum, insertion,
    leading_shift, sigma, sigma_chain, splitting_homotopy,
};

use crate::algebra::AlgebraElement;
use crate::chain::{differential, face, format_tuple, identity, Chain, ChainBasis, ComplexKind, GradedMap};
use crate::error::{Error, Result};
use crate::frame::{sigma_conjugator, ShiftFrame, SplittingData};
use crate::homology::EngineOptions;
use crate::linalg::{solve, SolveOutcome};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityId {
    /// `δσ_s = σ_sδ` on corner chains.
    SigmaChainMap,
    /// `Γ_h = δs + sδ`.
    GammaNullHomotopic,
    /// Face relations of the `h^N_{l,i}`, one verdict per index case.
    FaceRelations,
    /// `σ_{lk} = σ_{lk}(a_0) ⊗ Δ_N(…) + δh^N_l + h^N_lδ`.
    ShiftHomotopy,
    /// `Δ_Nδ = δΔ_N` on corner chains.
    AmplificationChainMap,
    /// `Σ_l σ_{lk} = Δ_N + δΣh^N_l + (Σh^N_l)δ`.
    ShiftSum,
    /// `(1/N)Σ_l(σ_{lk} − δh^N_l)δ = (1/N)Δ_Nδ = (1/N)δΔ_N`.
    AveragedBoundary,
    /// `δ(𝔰⊗1) + (𝔰⊗1)δ = id`.
    SplittingContracts,
    /// `σ_s(τ) − τ` is a boundary for corner cycles `τ`.
    ConjugationMembership,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::SigmaChainMap,
        IdentityId::GammaNullHomotopic,
        IdentityId::FaceRelations,
        IdentityId::ShiftHomotopy,
        IdentityId::AmplificationChainMap,
        IdentityId::ShiftSum,
        IdentityId::AveragedBoundary,
        IdentityId::SplittingContracts,
        IdentityId::ConjugationMembership,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::SigmaChainMap => "sigma-chain-map",
            IdentityId::GammaNullHomotopic => "gamma-null-homotopic",
            IdentityId::FaceRelations => "face-relations",
            IdentityId::ShiftHomotopy => "shift-homotopy",
            IdentityId::AmplificationChainMap => "amplification-chain-map",
            IdentityId::ShiftSum => "shift-sum",
            IdentityId::AveragedBoundary => "averaged-boundary",
            IdentityId::SplittingContracts => "splitting-contracts",
            IdentityId::ConjugationMembership => "conjugation-membership",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    /// Which relation of a family, e.g. `"i<j"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ComplexKind>,
    pub degree: usize,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub sabotaged: bool,
}

impl CheckParameters {
    fn frame(frame: &ShiftFrame, blocks: Option<usize>, degree: usize, sabotaged: bool) -> Self {
        Self {
            k: Some(frame.k()),
            blocks,
            degree,
            sabotaged,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ExactPass,
    Fail,
}

/// Result of one exact identity check. A failure carries the first basis
/// tuple (in basis order) on which the two sides differ and the nonzero
/// difference of their images.
#[derive(Clone, Debug, Serialize)]
pub struct HomotopyVerdict {
    pub identity: IdentityId,
    pub parameters: CheckParameters,
    pub verdict: Outcome,
    /// Number of source basis tuples compared.
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<serde_json::Value>,
}

impl HomotopyVerdict {
    pub fn passed(&self) -> bool {
        self.verdict == Outcome::ExactPass
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}

/// Compares two maps on every tuple of `basis`.
pub fn compare_maps(
    identity: IdentityId,
    parameters: CheckParameters,
    lhs: &GradedMap,
    rhs: &GradedMap,
    basis: &ChainBasis,
) -> Result<HomotopyVerdict> {
    let n = basis.degree();
    let mismatch = lhs.first_mismatch(rhs, n, basis)?;
    let (witness, residual) = match mismatch {
        None => (None, None),
        Some(m) => {
            // re-evaluate the witness through the public chain interface
            let c = Chain::basis(lhs.source().clone(), &m.tuple)?;
            let diff = lhs.apply(&c)?.sub(&rhs.apply(&c)?)?;
            if diff.is_zero() {
                return Err(Error::Internal("mismatch witness re-evaluates to zero".into()));
            }
            (Some(format_tuple(&m.tuple)), Some(m.residual.to_json_value()))
        }
    };
    Ok(HomotopyVerdict {
        identity,
        parameters,
        verdict: if witness.is_none() { Outcome::ExactPass } else { Outcome::Fail },
        checked: basis.len(),
        witness,
        residual,
    })
}

/// Every degree-`n` tuple of corner basis elements.
pub fn corner_basis(frame: &ShiftFrame, n: usize, opts: &EngineOptions) -> Result<ChainBasis> {
    let size = crate::chain::space_size(frame.corner_indices().len(), n)?;
    opts.check(&format!("corner chains of degree {n}"), size)?;
    ChainBasis::product(frame.ambient().dim(), &vec![frame.corner_indices().to_vec(); n + 1])
}

fn hochschild(frame: &ShiftFrame) -> GradedMap {
    differential(frame.ambient(), ComplexKind::Hochschild)
}

fn need_positive(degree: usize, what: &str) -> Result<()> {
    if degree == 0 {
        return Err(Error::InvalidArgument(format!("{what} is checked in degrees >= 1")));
    }
    Ok(())
}

/// `δσ_s = σ_sδ` on degree-`n` corner chains.
pub fn sigma_chain_map_check(frame: &ShiftFrame, s: usize, degree: usize, opts: &EngineOptions) -> Result<HomotopyVerdict> {
    need_positive(degree, "the chain-map property")?;
    let (d, sg) = (hochschild(frame), sigma(frame, s));
    let params = CheckParameters {
        shift: Some(s),
        ..CheckParameters::frame(frame, None, degree, false)
    };
    compare_maps(
        IdentityId::SigmaChainMap,
        params,
        &d.compose(&sg)?,
        &sg.compose(&d)?,
        &corner_basis(frame, degree, opts)?,
    )
}

/// `Δ_Nδ = δΔ_N` on degree-`n` corner chains; with `sabotage` the
/// alternating-sign amplification is used on both sides.
pub fn amplification_chain_map_check(
    frame: &ShiftFrame,
    blocks: usize,
    degree: usize,
    sabotage: bool,
    opts: &EngineOptions,
) -> Result<HomotopyVerdict> {
    need_positive(degree, "the chain-map property")?;
    let d = hochschild(frame);
    let amp = if sabotage {
        delta_n_alternating(frame, blocks)?
    } else {
        delta_n(frame, blocks)?
    };
    compare_maps(
        IdentityId::AmplificationChainMap,
        CheckParameters::frame(frame, Some(blocks), degree, sabotage),
        &amp.compose(&d)?,
        &d.compose(&amp)?,
        &corner_basis(frame, degree, opts)?,
    )
}

/// The face relations of `h^N_{l,j}` on degree-`n` corner chains, one
/// verdict per `(i, j)`:
///
/// * `d_i h_j = h_{j−1} d_i` for `i < j`,
/// * `d_i h_i = d_i h_{i−1}` for `1 ≤ i ≤ n`,
/// * `d_i h_j = h_j d_{i−1}` for `i > j + 1`,
/// * `d_0 h_0 = σ_{lk}(a_0) ⊗ Δ_N(…)` and `d_{n+1} h_n = σ_{lk}`.
///
/// With `sabotage` every left-hand side uses `−h_j`.
pub fn face_relation_checks(
    frame: &ShiftFrame,
    blocks: usize,
    l: usize,
    degree: usize,
    sabotage: bool,
    opts: &EngineOptions,
) -> Result<Vec<HomotopyVerdict>> {
    let n = degree;
    let alg = frame.ambient();
    let basis = corner_basis(frame, n, opts)?;
    let h = |j: usize| h_li(frame, blocks, l, j);
    let lhs_h = |j: usize| -> Result<GradedMap> {
        let m = h(j)?;
        Ok(if sabotage { m.scale(-Q::one()) } else { m })
    };
    let params = |i: usize, j: usize, case: &str| CheckParameters {
        l: Some(l),
        i: Some(i),
        j: Some(j),
        case: Some(case.to_string()),
        ..CheckParameters::frame(frame, Some(blocks), n, sabotage)
    };
    let mut out = Vec::new();
    for j in 0..=n {
        for i in 0..=n + 1 {
            let lhs = face(alg, i).compose(&lhs_h(j)?)?;
            let (rhs, case) = if i < j {
                (h(j - 1)?.compose(&face(alg, i))?, "i<j")
            } else if i == j && j >= 1 {
                (face(alg, i).compose(&h(j - 1)?)?, "i=j")
            } else if i > j + 1 {
                (h(j)?.compose(&face(alg, i - 1))?, "i>j+1")
            } else if i == 0 && j == 0 {
                (leading_shift(frame, blocks, l)?, "first-face")
            } else if i == n + 1 && j == n {
                (sigma(frame, l * frame.k()), "last-face")
            } else {
                // i = j + 1 with j < n: d_{j+1} h_j appears on both sides
                continue;
            };
            out.push(compare_maps(IdentityId::FaceRelations, params(i, j, case), &lhs, &rhs, &basis)?);
        }
    }
    Ok(out)
}

/// `δh + hδ`, dropping `hδ` in degree 0.
fn homotopy_boundary(d: &GradedMap, h: &GradedMap, degree: usize) -> Result<GradedMap> {
    let dh = d.compose(h)?;
    if degree == 0 {
        Ok(dh)
    } else {
        dh.add(&h.compose(d)?)
    }
}

/// `σ_{lk} = σ_{lk}(a_0) ⊗ Δ_N(a_1 ⊗ ⋯) + (δh^N_l + h^N_lδ)` on
/// degree-`n` corner chains.
pub fn shift_homotopy_check(
    frame: &ShiftFrame,
    blocks: usize,
    l: usize,
    degree: usize,
    sabotage: bool,
    opts: &EngineOptions,
) -> Result<HomotopyVerdict> {
    let d = hochschild(frame);
    let rhs = leading_shift(frame, blocks, l)?.add(&homotopy_boundary(&d, &h_l(frame, blocks, l, sabotage)?, degree)?)?;
    compare_maps(
        IdentityId::ShiftHomotopy,
        CheckParameters {
            l: Some(l),
            ..CheckParameters::frame(frame, Some(blocks), degree, sabotage)
        },
        &sigma(frame, l * frame.k()),
        &rhs,
        &corner_basis(frame, degree, opts)?,
    )
}

fn sigma_sum(frame: &ShiftFrame, blocks: usize) -> Result<GradedMap> {
    GradedMap::combination((0..blocks).map(|l| (Q::one(), sigma(frame, l * frame.k()))).collect())
}

/// `(1/N)Σ_{l<N}(σ_{lk} − δh^N_l)`, the operator behind the averaged
/// functionals.
pub fn averaging_operator(frame: &ShiftFrame, blocks: usize, sabotage: bool) -> Result<GradedMap> {
    let inv = Q::new(1.into(), (blocks as i64).into());
    Ok(sigma_sum(frame, blocks)?
        .sub(&hochschild(frame).compose(&h_sum(frame, blocks, sabotage)?)?)?
        .scale(inv))
}

/// `Σ_{l<N} σ_{lk} = Δ_N + δ(Σ h^N_l) + (Σ h^N_l)δ` on degree-`n` corner
/// chains.
pub fn shift_sum_check(
    frame: &ShiftFrame,
    blocks: usize,
    degree: usize,
    sabotage: bool,
    opts: &EngineOptions,
) -> Result<HomotopyVerdict> {
    let d = hochschild(frame);
    let rhs = delta_n(frame, blocks)?.add(&homotopy_boundary(&d, &h_sum(frame, blocks, sabotage)?, degree)?)?;
    compare_maps(
        IdentityId::ShiftSum,
        CheckParameters::frame(frame, Some(blocks), degree, sabotage),
        &sigma_sum(frame, blocks)?,
        &rhs,
        &corner_basis(frame, degree, opts)?,
    )
}

/// On degree-`n` corner chains `τ` (`n ≥ 1`):
/// `(1/N)Σ_l(σ_{lk} − δh^N_l)(δτ) = (1/N)Δ_N(δτ) = (1/N)δ(Δ_Nτ)`.
/// Reports the first of the two equalities that fails.
pub fn averaged_boundary_check(
    frame: &ShiftFrame,
    blocks: usize,
    degree: usize,
    sabotage: bool,
    opts: &EngineOptions,
) -> Result<HomotopyVerdict> {
    need_positive(degree, "the averaged boundary relation")?;
    let d = hochschild(frame);
    let inv = Q::new(1.into(), (blocks as i64).into());
    let averaged = averaging_operator(frame, blocks, sabotage)?.compose(&d)?;
    let amp = delta_n(frame, blocks)?;
    let middle = amp.compose(&d)?.scale(inv.clone());
    let right = d.compose(&amp)?.scale(inv);
    let basis = corner_basis(frame, degree, opts)?;
    let mut params = CheckParameters::frame(frame, Some(blocks), degree, sabotage);
    params.case = Some("averaged=amplified".into());
    let first = compare_maps(IdentityId::AveragedBoundary, params.clone(), &averaged, &middle, &basis)?;
    if !first.passed() {
        return Ok(first);
    }
    params.case = Some("amplified=boundary".into());
    let mut second = compare_maps(IdentityId::AveragedBoundary, params, &middle, &right, &basis)?;
    if second.passed() {
        second.parameters.case = None;
    }
    Ok(second)
}

/// `Γ_h = δs + sδ` on all degree-`n` tuples of `h`'s algebra, which must be
/// unital.
pub fn gamma_null_homotopy_check(h: &AlgebraElement, degree: usize, opts: &EngineOptions) -> Result<HomotopyVerdict> {
    let alg = h.algebra();
    if !alg.is_unital() {
        return Err(Error::InvalidArgument("Γ_h is checked in unital algebras".into()));
    }
    opts.check(&format!("chains of degree {degree}"), crate::chain::space_size(alg.dim(), degree)?)?;
    let d = differential(alg, ComplexKind::Hochschild);
    let rhs = homotopy_boundary(&d, &insertion(h), degree)?;
    compare_maps(
        IdentityId::GammaNullHomotopic,
        CheckParameters {
            degree,
            ..CheckParameters::default()
        },
        &gamma(h),
        &rhs,
        &ChainBasis::full(alg.dim(), degree)?,
    )
}

/// `d(𝔰⊗1) + (𝔰⊗1)d = id` in degree `n` of the chosen complex. In degree 0
/// only the bar complex has this form (`β_1(𝔰⊗1) = id`).
pub fn contraction_check(
    split: &SplittingData,
    kind: ComplexKind,
    degree: usize,
    opts: &EngineOptions,
) -> Result<HomotopyVerdict> {
    let alg = split.algebra();
    if degree == 0 && kind == ComplexKind::Hochschild {
        return Err(Error::InvalidArgument(
            "the splitting contracts the Hochschild complex in degrees >= 1 only".into(),
        ));
    }
    opts.check(&format!("chains of degree {degree}"), crate::chain::space_size(alg.dim(), degree)?)?;
    let d = differential(alg, kind);
    let lhs = homotopy_boundary(&d, &splitting_homotopy(split), degree)?;
    compare_maps(
        IdentityId::SplittingContracts,
        CheckParameters {
            kind: Some(kind),
            degree,
            ..CheckParameters::default()
        },
        &lhs,
        &identity(alg),
        &ChainBasis::full(alg.dim(), degree)?,
    )
}

/// Witnesses that `σ_s(τ) − τ` is a boundary.
#[derive(Clone, Debug)]
pub struct ConjugationWitness {
    /// `w` from an exact solve inside the chains supported on the rows and
    /// columns touched by the corner and its shift.
    pub solved: Chain,
    /// `−Hτ` built from the conjugating signed permutation.
    pub conjugator: Chain,
    pub verdict: HomotopyVerdict,
}

/// For a corner cycle `τ`, finds `w` with `δw = σ_s(τ) − τ` by exact linear
/// solving, and checks the explicit witness from the conjugator as well.
pub fn conjugation_membership(
    frame: &ShiftFrame,
    shift: usize,
    tau: &Chain,
    opts: &EngineOptions,
) -> Result<ConjugationWitness> {
    let alg = frame.ambient();
    if tau.algebra().hash() != alg.hash() {
        return Err(Error::AlgebraMismatch);
    }
    let n = tau.degree();
    if let Some((t, _)) = tau.terms().find(|(t, _)| t.iter().any(|&b| !frame.is_corner(b))) {
        return Err(Error::Support(format!("tuple {} leaves the corner", format_tuple(&t))));
    }
    let d = hochschild(frame);
    if n >= 1 && !d.apply(tau)?.is_zero() {
        return Err(Error::NotCycle(format!("δτ ≠ 0 in degree {n}")));
    }
    let target = sigma(frame, shift).apply(tau)?.sub(tau)?;

    let u = sigma_conjugator(frame, shift)?;
    let (ue, ve) = (u.to_element(frame)?, u.inverse().to_element(frame)?);
    let conjugator = conjugation_homotopy(&ue, &ve)?.apply(tau)?.neg();

    // rows and columns used by the corner and its shifted copy
    let k = frame.k();
    let rows: Vec<usize> = (0..k).chain(shift.max(k)..shift + k).collect();
    let allowed: Vec<usize> = (0..alg.dim())
        .filter(|&b| {
            let (i, j, _) = frame.position(b);
            rows.contains(&i) && rows.contains(&j)
        })
        .collect();
    opts.check(
        &format!("boundary solve in degree {}", n + 1),
        crate::chain::space_size(allowed.len(), n + 1)?,
    )?;
    let src = ChainBasis::restricted(alg.dim(), n + 1, &allowed)?;
    let tgt = ChainBasis::restricted(alg.dim(), n, &allowed)?;
    let m = d.materialize_on(n + 1, &src, &tgt)?;
    let b = target.to_vector(&tgt)?;
    let solved = match solve(&m, &b)? {
        SolveOutcome::Solution(x) => Some(Chain::from_vector(alg.clone(), &src, &x)?),
        SolveOutcome::Infeasible(_) => None,
    };

    let params = CheckParameters {
        shift: Some(shift),
        ..CheckParameters::frame(frame, None, n, false)
    };
    let solved_ok = solved.as_ref().map(|w| d.apply(w).map(|dw| dw.sub(&target).map(|r| r.is_zero())));
    let solved_ok = match solved_ok {
        Some(r) => r??,
        None => false,
    };
    let residual = d.apply(&conjugator)?.sub(&target)?;
    let passed = solved_ok && residual.is_zero();
    let verdict = HomotopyVerdict {
        identity: IdentityId::ConjugationMembership,
        parameters: params,
        verdict: if passed { Outcome::ExactPass } else { Outcome::Fail },
        checked: 1,
        witness: None,
        residual: (!residual.is_zero()).then(|| residual.to_json_value()),
    };
    Ok(ConjugationWitness {
        solved: solved.unwrap_or_else(|| Chain::zero(alg.clone(), n + 1)),
        conjugator,
        verdict,
    })
}
