use std::sync::Arc;

use num_traits::One;

use crate::algebra::{AlgebraElement, AlgebraPresentation};
use crate::chain::{Chain, GradedMap};
use crate::error::{Error, Result};
use crate::frame::{ShiftFrame, SplittingData};
use crate::linalg::SparseVector;
use crate::rational::Q;

fn sign(i: usize) -> Q {
    if i.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

fn corner_factors(frame: &ShiftFrame, tuple: &[usize]) -> Result<()> {
    match tuple.iter().find(|&&b| !frame.is_corner(b)) {
        Some(&b) => Err(Error::Support(format!(
            "factor {} lies outside the leading {}x{} corner",
            frame.ambient().label(b),
            frame.k(),
            frame.k()
        ))),
        None => Ok(()),
    }
}

fn check_blocks(frame: &ShiftFrame, n_blocks: usize) -> Result<()> {
    if n_blocks == 0 || n_blocks > frame.blocks() {
        return Err(Error::OutOfRange(format!(
            "{n_blocks} blocks requested from a {}-block frame",
            frame.blocks()
        )));
    }
    Ok(())
}

/// `Σ_{l<N} S^{lk} b R^{lk}` for a corner basis element.
fn amplify(frame: &ShiftFrame, b: usize, n_blocks: usize) -> SparseVector {
    SparseVector::from_entries(
        (0..n_blocks)
            .filter_map(|l| frame.shift_basis(b, l * frame.k()).map(|c| (c, Q::one())))
            .collect(),
    )
}

/// Same as [`amplify`] with block `l` weighted by `(−1)^l`; not
/// multiplicative once `N ≥ 2`, used as a negative control.
fn amplify_alternating(frame: &ShiftFrame, b: usize, n_blocks: usize) -> SparseVector {
    SparseVector::from_entries(
        (0..n_blocks)
            .filter_map(|l| frame.shift_basis(b, l * frame.k()).map(|c| (c, sign(l))))
            .collect(),
    )
}

fn shifted(frame: &ShiftFrame, b: usize, s: usize) -> SparseVector {
    frame.shift_basis(b, s).map_or_else(SparseVector::new, SparseVector::unit)
}

/// `σ_s`: conjugation of every factor by the `s`-step shift, truncated to
/// the ambient algebra.
pub fn sigma(frame: &ShiftFrame, s: usize) -> GradedMap {
    let f = frame.clone();
    GradedMap::from_fn(
        format!("sigma_{s}"),
        frame.ambient().clone(),
        frame.ambient().clone(),
        0,
        move |_, tuple, c, out| {
            let factors: Vec<SparseVector> = tuple.iter().map(|&b| shifted(&f, b, s)).collect();
            out.emit_product(&factors, c);
            Ok(())
        },
    )
}

/// Factorwise block-diagonal amplification over the first `N` blocks, on
/// corner chains.
pub fn delta_n(frame: &ShiftFrame, n_blocks: usize) -> Result<GradedMap> {
    check_blocks(frame, n_blocks)?;
    let f = frame.clone();
    Ok(GradedMap::from_fn(
        format!("Delta_{n_blocks}"),
        frame.ambient().clone(),
        frame.ambient().clone(),
        0,
        move |_, tuple, c, out| {
            corner_factors(&f, tuple)?;
            let factors: Vec<SparseVector> = tuple.iter().map(|&b| amplify(&f, b, n_blocks)).collect();
            out.emit_product(&factors, c);
            Ok(())
        },
    ))
}

/// [`delta_n`] with alternating block signs (negative control).
pub fn delta_n_alternating(frame: &ShiftFrame, n_blocks: usize) -> Result<GradedMap> {
    check_blocks(frame, n_blocks)?;
    let f = frame.clone();
    Ok(GradedMap::from_fn(
        format!("Delta_{n_blocks}_alternating"),
        frame.ambient().clone(),
        frame.ambient().clone(),
        0,
        move |_, tuple, c, out| {
            corner_factors(&f, tuple)?;
            let factors: Vec<SparseVector> = tuple.iter().map(|&b| amplify_alternating(&f, b, n_blocks)).collect();
            out.emit_product(&factors, c);
            Ok(())
        },
    ))
}

/// Emits `σ_{lk}(a_0 ⊗ ⋯ ⊗ a_i) ⊗ P_l ⊗ Δ_N(a_{i+1} ⊗ ⋯ ⊗ a_n)`.
fn emit_h(
    frame: &ShiftFrame,
    n_blocks: usize,
    l: usize,
    i: usize,
    tuple: &[usize],
    c: &Q,
    out: &mut crate::chain::Emitter,
) {
    let s = l * frame.k();
    let mut factors = Vec::with_capacity(tuple.len() + 1);
    factors.extend(tuple[..=i].iter().map(|&b| shifted(frame, b, s)));
    factors.push(frame.projection_vector(l));
    factors.extend(tuple[i + 1..].iter().map(|&b| amplify(frame, b, n_blocks)));
    out.emit_product(&factors, c);
}

fn check_block(frame: &ShiftFrame, n_blocks: usize, l: usize) -> Result<()> {
    check_blocks(frame, n_blocks)?;
    if l >= n_blocks {
        return Err(Error::OutOfRange(format!("block {l} of {n_blocks}")));
    }
    Ok(())
}

/// `h^N_{l,i}`: grade +1, inserting the block projection `P_l` after slot
/// `i` (blocks numbered from 0). Defined on degrees `n ≥ i`.
pub fn h_li(frame: &ShiftFrame, n_blocks: usize, l: usize, i: usize) -> Result<GradedMap> {
    check_block(frame, n_blocks, l)?;
    let f = frame.clone();
    let name = format!("h^{n_blocks}_{l},{i}");
    let err_name = name.clone();
    Ok(GradedMap::from_fn(name, frame.ambient().clone(), frame.ambient().clone(), 1, move |n, tuple, c, out| {
        if i > n {
            return Err(crate::chain::undefined_degree(&err_name, n));
        }
        corner_factors(&f, tuple)?;
        emit_h(&f, n_blocks, l, i, tuple, c, out);
        Ok(())
    }))
}

/// `h^N_l = Σ_{i=0}^{n} (−1)^{i+1} h^N_{l,i}`, the sign for which
/// `σ_{lk} = σ_{lk}(a_0) ⊗ Δ_N(…) + δh^N_l + h^N_lδ` holds; the face
/// relations give `δh + hδ = d_0h_0 − d_{n+1}h_n` for the alternating sum
/// starting with `+`. With `sabotage` the `i = 0` term enters with the
/// wrong sign.
pub fn h_l(frame: &ShiftFrame, n_blocks: usize, l: usize, sabotage: bool) -> Result<GradedMap> {
    check_block(frame, n_blocks, l)?;
    let f = frame.clone();
    let name = if sabotage {
        format!("h^{n_blocks}_{l}_sabotaged")
    } else {
        format!("h^{n_blocks}_{l}")
    };
    Ok(GradedMap::from_fn(name, frame.ambient().clone(), frame.ambient().clone(), 1, move |n, tuple, c, out| {
        corner_factors(&f, tuple)?;
        for i in 0..=n {
            let mut coeff = c * sign(i + 1);
            if sabotage && i == 0 {
                coeff = -coeff;
            }
            emit_h(&f, n_blocks, l, i, tuple, &coeff, out);
        }
        Ok(())
    }))
}

/// `Σ_{l<N} h^N_l`. Sabotage only touches block 0: flipping every block
/// changes the sum by a null-homotopic term.
pub fn h_sum(frame: &ShiftFrame, n_blocks: usize, sabotage: bool) -> Result<GradedMap> {
    let terms = (0..n_blocks)
        .map(|l| h_l(frame, n_blocks, l, sabotage && l == 0).map(|h| (Q::one(), h)))
        .collect::<Result<Vec<_>>>()?;
    GradedMap::combination(terms)
}

/// `a_0 ⊗ a_1 ⊗ ⋯ ↦ σ_{lk}(a_0) ⊗ Δ_N(a_1 ⊗ ⋯)`.
pub fn leading_shift(frame: &ShiftFrame, n_blocks: usize, l: usize) -> Result<GradedMap> {
    check_block(frame, n_blocks, l)?;
    let f = frame.clone();
    Ok(GradedMap::from_fn(
        format!("sigma_{}(a_0) (x) Delta_{n_blocks}", l * frame.k()),
        frame.ambient().clone(),
        frame.ambient().clone(),
        0,
        move |_, tuple, c, out| {
            corner_factors(&f, tuple)?;
            let mut factors = vec![shifted(&f, tuple[0], l * f.k())];
            factors.extend(tuple[1..].iter().map(|&b| amplify(&f, b, n_blocks)));
            out.emit_product(&factors, c);
            Ok(())
        },
    ))
}

/// `Γ_h(a_0 ⊗ ⋯ ⊗ a_n) = Σ_i a_0 ⊗ ⋯ ⊗ (h a_i − a_i h) ⊗ ⋯ ⊗ a_n`.
pub fn gamma(h: &AlgebraElement) -> GradedMap {
    let alg = h.algebra().clone();
    let hv = h.coeffs().clone();
    let a2 = alg.clone();
    GradedMap::from_fn("Gamma_h", alg.clone(), alg, 0, move |_, tuple, c, out| {
        let units: Vec<SparseVector> = tuple.iter().map(|&b| SparseVector::unit(b)).collect();
        for i in 0..tuple.len() {
            let comm = a2.mul(&hv, &units[i]).sub(&a2.mul(&units[i], &hv));
            let mut factors = units.clone();
            factors[i] = comm;
            out.emit_product(&factors, c);
        }
        Ok(())
    })
}

/// `s(a_0 ⊗ ⋯ ⊗ a_n) = Σ_k (−1)^{k+1} a_0 ⊗ ⋯ ⊗ a_k ⊗ h ⊗ a_{k+1} ⊗ ⋯ ⊗ a_n`.
pub fn insertion(h: &AlgebraElement) -> GradedMap {
    let alg = h.algebra().clone();
    let hv = h.coeffs().clone();
    GradedMap::from_fn("s_h", alg.clone(), alg, 1, move |n, tuple, c, out| {
        let units: Vec<SparseVector> = tuple.iter().map(|&b| SparseVector::unit(b)).collect();
        for k in 0..=n {
            let mut factors = units.clone();
            factors.insert(k + 1, hv.clone());
            out.emit_product(&factors, &(c * -sign(k)));
        }
        Ok(())
    })
}

/// `(a_0, …, a_n) ↦ Σ_i (−1)^i (a_0 v, u a_1 v, …, u a_i v, u, a_{i+1}, …, a_n)`
/// for `v = u⁻¹`; satisfies `δH + Hδ = id − Ad_u`.
pub fn conjugation_homotopy(u: &AlgebraElement, v: &AlgebraElement) -> Result<GradedMap> {
    if u.algebra().hash() != v.algebra().hash() {
        return Err(Error::AlgebraMismatch);
    }
    let alg = u.algebra().clone();
    if !alg.is_unital() || !alg.is_unit_element(&alg.mul(u.coeffs(), v.coeffs())) {
        return Err(Error::InvalidArgument("conjugation needs an invertible element and its inverse".into()));
    }
    let (uv, vv) = (u.coeffs().clone(), v.coeffs().clone());
    let a2 = alg.clone();
    Ok(GradedMap::from_fn("H_u", alg.clone(), alg, 1, move |n, tuple, c, out| {
        let units: Vec<SparseVector> = tuple.iter().map(|&b| SparseVector::unit(b)).collect();
        let conj: Vec<SparseVector> = units.iter().map(|x| a2.mul(&a2.mul(&uv, x), &vv)).collect();
        let first = a2.mul(&units[0], &vv);
        for i in 0..=n {
            let mut factors = Vec::with_capacity(n + 2);
            factors.push(first.clone());
            factors.extend(conj[1..=i].iter().cloned());
            factors.push(uv.clone());
            factors.extend(units[i + 1..].iter().cloned());
            out.emit_product(&factors, &(c * sign(i)));
        }
        Ok(())
    }))
}

/// `Ad_u` factorwise: `a_0 ⊗ ⋯ ↦ u a_0 v ⊗ ⋯`.
pub fn conjugation(u: &AlgebraElement, v: &AlgebraElement) -> GradedMap {
    let alg = u.algebra().clone();
    let (uv, vv) = (u.coeffs().clone(), v.coeffs().clone());
    let a2 = alg.clone();
    GradedMap::from_fn("Ad_u", alg.clone(), alg, 0, move |_, tuple, c, out| {
        let factors: Vec<SparseVector> = tuple
            .iter()
            .map(|&b| a2.mul(&a2.mul(&uv, &SparseVector::unit(b)), &vv))
            .collect();
        out.emit_product(&factors, c);
        Ok(())
    })
}

/// `𝔰 ⊗ 1`: the splitting applied to the first factor.
pub fn splitting_homotopy(split: &SplittingData) -> GradedMap {
    let alg: Arc<AlgebraPresentation> = split.algebra().clone();
    let images: Vec<Vec<(Vec<usize>, Q)>> = (0..alg.dim())
        .map(|b| split.image(b).terms().map(|(t, x)| (t, x.clone())).collect())
        .collect();
    GradedMap::from_fn("s(x)1", alg.clone(), alg, 1, move |_, tuple, c, out| {
        let mut t = Vec::with_capacity(tuple.len() + 1);
        for (pair, x) in &images[tuple[0]] {
            t.clear();
            t.extend_from_slice(pair);
            t.extend_from_slice(&tuple[1..]);
            out.emit(&t, c * x);
        }
        Ok(())
    })
}

/// `σ_s` applied to a chain of the frame's ambient algebra.
pub fn sigma_chain(frame: &ShiftFrame, s: usize, c: &Chain) -> Result<Chain> {
    sigma(frame, s).apply(c)
}
