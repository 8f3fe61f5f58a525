//! Acceptance run: one PASS/FAIL line per criterion. Exact criteria have no
//! tolerance; the numeric ones use the pinned constants below. Every derived
//! number is recomputed by the reference code in `oracle`.

mod oracle;

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use hochlab::algebra::{matrix_algebra, square_zero_algebra, unitization, AlgebraElement, AlgebraPresentation};
use hochlab::averaging::{decay_table, frame_cell, random_coboundary, solve_primitive, verify_mechanism, Primitive};
use hochlab::chain::{differential, ComplexKind};
use hochlab::frame::{
    corner_splitting, corrupted_splitting, frame_corner_splitting, involution_extension, ShiftFrame, SignedPermutation,
};
use hochlab::homology::{
    excision_compare, homology, induced_map, is_h_unital_up_to, les_of_subcomplex, trace_map, EngineOptions,
};
use hochlab::homotopy::{
    amplification_chain_map_check, averaged_boundary_check, contraction_check, face_relation_checks,
    gamma_null_homotopy_check, shift_homotopy_check, shift_sum_check, sigma_chain_map_check, HomotopyVerdict,
};
use hochlab::linalg::SparseVector;
use hochlab::norms::{check_m1, check_m3, random_m3_samples, NormKind, NormValue};
use hochlab::rational::parse_q;
use hochlab::Q;
use num_traits::{One, Signed, Zero};
use oracle::{q, Structure, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock limit for criterion 1.
const TIME_LIMIT_SECS: f64 = 60.0;
/// Agreement required of the numeric spectral norm.
const L2_TOLERANCE: f64 = 1e-9;
/// Seed of every random sample drawn here.
const SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn ok<T>(r: hochlab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> EngineOptions {
    EngineOptions::default()
}

fn column_as_vector(v: &SparseVector) -> Vector {
    v.iter().map(|(i, x)| (i, x.clone())).collect()
}

/// Library differential columns against the reference formulas.
fn compare_differential(a: &Arc<AlgebraPresentation>, s: &Structure, n: usize, kind: ComplexKind) -> Result<(), String> {
    let m = ok(differential(a, kind).materialize(n))?;
    let bar = kind == ComplexKind::Bar;
    for (c, t) in oracle::tuples(s.dim, n + 1).enumerate() {
        if column_as_vector(m.column(c)) != oracle::boundary(s, &t, bar) {
            return Err(format!("{} d_{n} differs from the reference on {t:?}", kind.as_str()));
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let frame = ok(ShiftFrame::new(2, 2, 0))?;
    let cases: Vec<(&str, Arc<AlgebraPresentation>, usize)> = vec![
        ("M_2", ok(matrix_algebra(2))?, 3),
        ("M_3", ok(matrix_algebra(3))?, 3),
        ("frame k=2 N=2", frame.ambient().clone(), 2),
    ];
    let start = Instant::now();
    let mut products = 0;
    for (name, a, top) in &cases {
        for kind in [ComplexKind::Bar, ComplexKind::Hochschild] {
            let d = differential(a, kind);
            for n in 1..=*top {
                let p = ok(ok(d.materialize(n))?.matmul(&*ok(d.materialize(n + 1))?))?;
                ensure(p.is_zero(), || format!("{} squared is nonzero on {name} at degree {n}", kind.as_str()))?;
                products += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < TIME_LIMIT_SECS, || format!("took {secs:.1} s"))?;

    // the materialized matrices are the differentials of the definition
    let refs = [(ok(matrix_algebra(2))?, Structure::matrix_units(2), 4), (ok(matrix_algebra(3))?, Structure::matrix_units(3), 3)];
    for (a, s, top) in &refs {
        ensure(Structure::of(a).same_constants(s), || "matrix units disagree with the reference".into())?;
        for n in 1..=*top {
            compare_differential(a, s, n, ComplexKind::Bar)?;
            compare_differential(a, s, n, ComplexKind::Hochschild)?;
        }
    }
    let s4 = Structure::matrix_units(4);
    ensure(Structure::of(frame.ambient()).same_constants(&s4), || "frame ambient is not M_4".into())?;
    for n in 1..=2 {
        compare_differential(frame.ambient(), &s4, n, ComplexKind::Hochschild)?;
    }
    Ok(format!("{products} products d_n d_(n+1) vanish exactly in {secs:.1} s (limit {TIME_LIMIT_SECS} s); matrices match the reference"))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    for m in [2, 3] {
        let a = ok(matrix_algebra(m))?;
        let dims = ok(homology(&a, ComplexKind::Hochschild, 2, &opts()))?.dims();
        ensure(dims == [1, 0, 0], || format!("H_*(M_{m}) = {dims:?}"))?;
        let s = Structure::matrix_units(m);
        let reference = if m == 2 {
            oracle::homology_dims(&s, 2, false, true)
        } else {
            oracle::homology_dims(&s, 2, false, false)
        };
        ensure(reference == dims, || format!("reference gives {reference:?} for M_{m}"))?;
        for n in 0..=2 {
            let f = ok(induced_map(&ok(trace_map(m))?, ComplexKind::Hochschild, n, &opts()))?;
            ensure(f.is_isomorphism(), || format!("trace is not an isomorphism on H_{n}(M_{m})"))?;
        }
        notes.push(format!("M_{m} {dims:?}"));
    }
    Ok(format!("{}; reference ranks agree (exact for M_2, mod 2^31-1 for M_3); trace induces isomorphisms in degrees 0..2", notes.join(", ")))
}

fn corner_frame() -> Result<ShiftFrame, String> {
    ok(ShiftFrame::with_coefficients(1, 2, 0, Some(ok(matrix_algebra(2))?)))
}

fn criterion_3() -> Outcome {
    let frame = corner_frame()?;
    let corner = frame.corner_algebra().clone();
    let cases = [("M_2", ok(matrix_algebra(2))?, true), ("M_3", ok(matrix_algebra(3))?, false), ("corner M_1(M_2)", corner.clone(), false)];
    for (name, a, exact) in &cases {
        let v = ok(is_h_unital_up_to(a, 2, &opts()))?;
        ensure(v.h_unital, || format!("{name} bar homology {:?}", v.first_failure))?;
        let reference = oracle::homology_dims(&Structure::of(a), 2, true, *exact);
        ensure(reference == [0, 0, 0], || format!("reference bar homology of {name} is {reference:?}"))?;
    }
    // the corner's acyclicity comes from the tensored pivot splitting
    let split = ok(frame_corner_splitting(&frame, 0, Some(&ok(corner_splitting(2, 0))?)))?;
    for n in 0..=2 {
        ensure(ok(contraction_check(&split, ComplexKind::Bar, n, &opts()))?.passed(), || format!("corner splitting fails at {n}"))?;
    }
    let sq = square_zero_algebra(1);
    let v = ok(is_h_unital_up_to(&sq, 2, &opts()))?;
    ensure(!v.h_unital && v.first_failure == Some(0), || format!("square-zero verdict {:?}", v.first_failure))?;
    let reference = oracle::homology_dims(&Structure::of(&sq), 0, true, true);
    ensure(reference == [1], || format!("reference H_0 of square-zero is {reference:?}"))?;
    Ok("M_2, M_3 and the split corner are bar-acyclic to degree 2; square-zero fails at degree 0 (H_0 = 1)".into())
}

/// Reference `δ s + s δ − id` at one tuple for a splitting given by
/// `image(i, j)` on matrix units.
fn splitting_residual(s: &Structure, m: usize, t: &[usize], image: &dyn Fn(usize, usize) -> Vector) -> Vector {
    let dim = s.dim;
    let hom = |t: &[usize]| -> Vector {
        let (i, j) = (t[0] / m, t[0] % m);
        let mut out = Vector::new();
        for (c, x) in image(i, j) {
            let mut pair = oracle::tuple_of(dim, c, 2);
            pair.extend_from_slice(&t[1..]);
            oracle::add_into(&mut out, oracle::code(dim, &pair), x);
        }
        out
    };
    let n = t.len() - 1;
    let ds = oracle::apply(dim, n + 2, &hom(t), &|u| oracle::boundary(s, u, false));
    let sd = oracle::apply(dim, n, &oracle::boundary(s, t, false), &|u| hom(u));
    let mut r = ds;
    oracle::add_scaled(&mut r, &sd, &Q::one());
    oracle::add_into(&mut r, oracle::code(dim, t), q(-1));
    r
}

fn criterion_4() -> Outcome {
    let mut checks = 0;
    let mut witnesses = Vec::new();
    for m in [2, 3] {
        let s = Structure::matrix_units(m);
        let e = |i: usize, j: usize| i * m + j;
        for pivot in 0..m {
            let split = ok(corner_splitting(m, pivot))?;
            for n in [1, 2] {
                let v = ok(contraction_check(&split, ComplexKind::Hochschild, n, &opts()))?;
                ensure(v.passed(), || format!("M_{m} pivot {pivot} degree {n}: witness {:?}", v.witness))?;
                let image = |i: usize, j: usize| oracle::unit(oracle::code(m * m, &[e(i, pivot), e(pivot, j)]));
                for t in oracle::tuples(m * m, n + 1) {
                    let r = splitting_residual(&s, m, &t, &image);
                    ensure(r.is_empty(), || format!("reference residual on {t:?} for M_{m} pivot {pivot}"))?;
                }
                checks += 1;
            }
        }
        let bad = ok(corrupted_splitting(m))?;
        let failing: Vec<HomotopyVerdict> = [1, 2]
            .iter()
            .map(|&n| ok(contraction_check(&bad, ComplexKind::Hochschild, n, &opts())))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|v| !v.passed())
            .collect();
        ensure(!failing.is_empty(), || format!("corrupted splitting of M_{m} passes"))?;
        let v = &failing[0];
        let w = v.witness.clone().ok_or("failure without witness")?;
        let t: Vec<usize> = w.split(',').map(|x| x.parse().unwrap()).collect();
        let image = |i: usize, j: usize| oracle::unit(oracle::code(m * m, &[e(i, j), e(j, j)]));
        ensure(!splitting_residual(&s, m, &t, &image).is_empty(), || format!("reference residual vanishes at witness {w}"))?;
        witnesses.push(format!("M_{m} at ({w})"));
    }
    Ok(format!("{checks} exact contractions at degrees 1, 2 for every pivot; corrupted splitting fails: {}", witnesses.join(", ")))
}

/// Reference shift `E_ij ↦ E_{i+s,j+s}` on `M_order` basis indices.
fn shift_unit(order: usize, b: usize, s: usize) -> Option<usize> {
    let (i, j) = (b / order, b % order);
    (i + s < order && j + s < order).then(|| (i + s) * order + j + s)
}

fn reference_chain_map_checks(frame: &ShiftFrame, degrees: &[usize]) -> Result<usize, String> {
    let order = frame.order();
    let s = Structure::matrix_units(order);
    let dim = s.dim;
    let corner: Vec<usize> = frame.corner_indices().to_vec();
    let mut count = 0;
    let sigma = |sh: usize| {
        move |t: &[usize]| -> Vector {
            match t.iter().map(|&b| shift_unit(order, b, sh)).collect::<Option<Vec<_>>>() {
                Some(u) => oracle::unit(oracle::code(dim, &u)),
                None => Vector::new(),
            }
        }
    };
    let amplify = |t: &[usize]| -> Vector {
        let factors: Vec<Vector> = t
            .iter()
            .map(|&b| (0..frame.blocks()).filter_map(|l| shift_unit(order, b, l * frame.k())).map(|c| (c, Q::one())).collect())
            .collect();
        let mut out = Vector::new();
        oracle::expand(dim, &factors, &Q::one(), &mut out);
        out
    };
    for &n in degrees {
        let mut all = vec![vec![]];
        for _ in 0..=n {
            all = all.into_iter().flat_map(|p: Vec<usize>| corner.iter().map(move |&c| [p.clone(), vec![c]].concat())).collect();
        }
        for t in &all {
            let d = oracle::boundary(&s, t, false);
            for l in 0..frame.blocks() {
                let f = sigma(l * frame.k());
                let lhs = oracle::apply(dim, n, &d, &f);
                let rhs = oracle::apply(dim, n + 1, &f(t), &|u| oracle::boundary(&s, u, false));
                ensure(lhs == rhs, || format!("reference σ is not a chain map on {t:?}"))?;
            }
            let lhs = oracle::apply(dim, n, &d, &amplify);
            let rhs = oracle::apply(dim, n + 1, &amplify(t), &|u| oracle::boundary(&s, u, false));
            ensure(lhs == rhs, || format!("reference Δ_N is not a chain map on {t:?}"))?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_5() -> Outcome {
    let o = opts();
    let (mut checks, mut controls, mut reference) = (0, 0, 0);
    for k in [1, 2] {
        for blocks in [2, 3] {
            let f = ok(ShiftFrame::new(k, blocks, 0))?;
            let tag = format!("k={k} N={blocks}");
            for n in [1, 2] {
                let mut v: Vec<HomotopyVerdict> = Vec::new();
                for l in 0..blocks {
                    v.push(ok(sigma_chain_map_check(&f, l * k, n, &o))?);
                    v.extend(ok(face_relation_checks(&f, blocks, l, n, false, &o))?);
                    v.push(ok(shift_homotopy_check(&f, blocks, l, n, false, &o))?);
                }
                v.push(ok(amplification_chain_map_check(&f, blocks, n, false, &o))?);
                v.push(ok(shift_sum_check(&f, blocks, n, false, &o))?);
                v.push(ok(averaged_boundary_check(&f, blocks, n, false, &o))?);
                if let Some(bad) = v.iter().find(|x| !x.passed()) {
                    return Err(format!("{tag} degree {n}: {:?} fails at {:?}", bad.identity, bad.witness));
                }
                checks += v.len();
            }
            // sign sabotage, at degree 2 where every control is effective
            let n = 2;
            let sabotaged: Vec<(&str, Vec<HomotopyVerdict>)> = vec![
                ("face relations", (0..blocks).map(|l| ok(face_relation_checks(&f, blocks, l, n, true, &o))).collect::<Result<Vec<_>, _>>()?.concat()),
                ("shift homotopy", (0..blocks).map(|l| ok(shift_homotopy_check(&f, blocks, l, n, true, &o))).collect::<Result<Vec<_>, _>>()?),
                ("amplification", vec![ok(amplification_chain_map_check(&f, blocks, n, true, &o))?]),
                ("shift sum", vec![ok(shift_sum_check(&f, blocks, n, true, &o))?]),
                ("averaged boundary", vec![ok(averaged_boundary_check(&f, blocks, n, true, &o))?]),
            ];
            for (name, vs) in &sabotaged {
                let bad = vs.iter().find(|x| !x.passed());
                ensure(bad.is_some_and(|b| b.witness.is_some()), || format!("sabotaged {name} passes for {tag}"))?;
                controls += 1;
            }
            reference += reference_chain_map_checks(&f, &[1, 2])?;
        }
    }
    Ok(format!(
        "{checks} exact checks pass over (k,N) in {{1,2}}x{{2,3}}, degrees 1-2; {controls}/{controls} sabotage controls fail with witnesses; σ and Δ_N chain-map property confirmed by reference on {reference} corner tuples"
    ))
}

fn criterion_6() -> Outcome {
    let a = ok(unitization(&ok(matrix_algebra(2))?))?.0;
    let s = Structure::of(&a);
    let dim = s.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut nontrivial = 0;
    for _ in 0..20 {
        let coeffs: Vec<Q> = (0..dim).map(|_| q(rng.gen_range(-3i64..=3))).collect();
        let h = ok(AlgebraElement::new(a.clone(), SparseVector::from_dense(&coeffs)))?;
        let hv: Vector = h.coeffs().iter().map(|(i, x)| (i, x.clone())).collect();
        let gamma = |t: &[usize]| -> Vector {
            let mut out = Vector::new();
            for i in 0..t.len() {
                let mut f: Vec<Vector> = t.iter().map(|&b| oracle::unit(b)).collect();
                f[i] = oracle::sub(&s.mul(&hv, &f[i]), &s.mul(&f[i], &hv));
                oracle::expand(dim, &f, &Q::one(), &mut out);
            }
            out
        };
        let insertion = |t: &[usize]| -> Vector {
            let mut out = Vector::new();
            for k in 0..t.len() {
                let mut f: Vec<Vector> = t.iter().map(|&b| oracle::unit(b)).collect();
                f.insert(k + 1, hv.clone());
                oracle::expand(dim, &f, &-oracle::sign(k), &mut out);
            }
            out
        };
        let mut moved = false;
        for n in [1, 2] {
            let v = ok(gamma_null_homotopy_check(&h, n, &opts()))?;
            ensure(v.passed(), || format!("Γ_h ≠ δs + sδ at degree {n}, witness {:?}", v.witness))?;
            for t in oracle::tuples(dim, n + 1) {
                let ds = oracle::apply(dim, n + 2, &insertion(&t), &|u| oracle::boundary(&s, u, false));
                let sd = oracle::apply(dim, n, &oracle::boundary(&s, &t, false), &insertion);
                let mut lhs = ds;
                oracle::add_scaled(&mut lhs, &sd, &Q::one());
                let g = gamma(&t);
                moved |= !g.is_empty();
                ensure(lhs == g, || format!("reference Γ_h ≠ δs + sδ on {t:?}"))?;
            }
        }
        nontrivial += usize::from(moved);
    }
    ensure(nontrivial > 0, || "every sampled h is central".into())?;
    Ok(format!("20 seeded h in unitization(M_2) pass at degrees 1, 2 ({nontrivial} with Γ_h ≠ 0); reference agrees on every basis tuple"))
}

fn criterion_7() -> Outcome {
    let o = opts();
    let m2 = ok(matrix_algebra(2))?;
    let unit_ext = ok(unitization(&m2))?.1;
    let u = ok(SignedPermutation::new(vec![1, 0], vec![1, 1]))?;
    let inv_ext = ok(involution_extension(&u))?.1;
    for (name, ext) in [("unitization(M_2)", &unit_ext), ("U-semidirect", &inv_ext)] {
        let r = ok(les_of_subcomplex(ext, ComplexKind::Hochschild, 2, &o))?;
        let bad: Vec<String> = r.junctions.iter().filter(|j| !j.exact).map(|j| format!("{}@{}", j.group, j.degree)).collect();
        ensure(r.exact && bad.is_empty(), || format!("{name} not exact at {bad:?}"))?;
        let ideal = oracle::homology_dims(&Structure::of(ext.ideal()), 2, false, false);
        let total = oracle::homology_dims(&Structure::of(ext.total()), 2, false, false);
        for d in &r.degrees {
            ensure(d.ideal == ideal[d.degree] && d.total == total[d.degree], || {
                format!("{name} degree {}: ({}, {}) vs reference ({}, {})", d.degree, d.ideal, d.total, ideal[d.degree], total[d.degree])
            })?;
        }
    }
    let ex = ok(excision_compare(&unit_ext, ComplexKind::Hochschild, 2, &o))?;
    ensure(ex.holds, || format!("excision fails for M_2 at {:?}", ex.first_failure))?;
    let sq_ext = ok(unitization(&square_zero_algebra(1)))?.1;
    let ex = ok(excision_compare(&sq_ext, ComplexKind::Hochschild, 1, &o))?;
    ensure(!ex.holds && ex.first_failure == Some(1), || format!("square-zero excision verdict {:?}", ex.first_failure))?;
    let quotient = oracle::homology_dims(&Structure::of(sq_ext.quotient()), 1, false, true);
    let d1 = &ex.degrees[1];
    ensure(d1.quotient_algebra == quotient[1] && d1.quotient_complex != d1.quotient_algebra, || {
        format!("square-zero degree 1: complex {} algebra {} reference {}", d1.quotient_complex, d1.quotient_algebra, quotient[1])
    })?;
    Ok(format!(
        "both sequences exact at every junction, degrees 0-2; excision holds for M_2 and fails for square-zero at degree 1 (expected: H_1 of quotient complex {} vs quotient algebra {})",
        d1.quotient_complex, d1.quotient_algebra
    ))
}

/// Reference `D(Δ_N τ)` for a corner tuple of a frame without coefficients.
fn amplified_value(d: &hochlab::chain::Cochain, order: usize, k: usize, blocks: usize, tau: &[usize]) -> Q {
    let dim = order * order;
    let factors: Vec<Vector> = tau
        .iter()
        .map(|&b| (0..blocks).filter_map(|l| shift_unit(order, b, l * k)).map(|c| (c, Q::one())).collect())
        .collect();
    let mut chain = Vector::new();
    oracle::expand(dim, &factors, &Q::one(), &mut chain);
    chain.iter().map(|(c, x)| d.value(&oracle::tuple_of(dim, *c, tau.len())) * x).sum()
}

fn criterion_8() -> Outcome {
    let o = opts();
    let base = ok(ShiftFrame::new(1, 4, 0))?;
    let alg = base.ambient().clone();
    let s = Structure::of(&alg);
    let dcoc = ok(random_coboundary(&alg, 1, SEED, 3, &o))?;
    let d = dcoc.cochain();
    ensure(!d.is_zero(), || "the sampled cocycle is zero".into())?;
    for t in oracle::tuples(s.dim, 3) {
        let v: Q = oracle::boundary(&s, &t, false).iter().map(|(c, x)| d.value(&oracle::tuple_of(s.dim, *c, 2)) * x).sum();
        ensure(v.is_zero(), || format!("D(δ{t:?}) = {v}"))?;
    }
    let Primitive::Found(phi) = ok(solve_primitive(&dcoc, &o))? else {
        return Err("no primitive for a coboundary".into());
    };
    for t in oracle::tuples(s.dim, 2) {
        let v: Q = oracle::boundary(&s, &t, false).iter().map(|(c, x)| phi.value(&oracle::tuple_of(s.dim, *c, 1)) * x).sum();
        ensure(v == d.value(&t), || format!("φ(δ{t:?}) ≠ D{t:?}"))?;
    }
    let range = [1, 2, 3, 4];
    for &blocks in &range {
        let cell = ok(frame_cell(&base, 1, blocks))?;
        let m = ok(verify_mechanism(&cell, blocks, &dcoc, &phi, &o))?;
        ensure(m.passed(), || format!("mechanism fails at N = {blocks}: {:?}", m.witness))?;
    }
    let check_table = |k: usize, ns: &[usize]| -> Result<(usize, usize, bool), String> {
        let table = ok(decay_table(&base, k, ns, &dcoc, &phi, NormKind::Linf, &o))?;
        ensure(table.identity_holds && table.bound_holds, || format!("decay table k={k} fails"))?;
        let mut scaled: std::collections::BTreeMap<String, Q> = Default::default();
        let (mut constant, mut nonzero) = (true, 0);
        for row in &table.rows {
            let tau: Vec<usize> = row.tau.split(',').map(|x| x.parse().unwrap()).collect();
            let value = ok(parse_q(&row.value))?;
            let reference = amplified_value(d, base.order(), k, row.blocks, &tau) / q(row.blocks as i64);
            ensure(value == reference, || format!("φ̄_{}(δ{tau:?}) = {value}, reference D(Δτ)/N = {reference}", row.blocks))?;
            let nv = value.abs() * q(row.blocks as i64);
            nonzero += usize::from(!nv.is_zero());
            constant &= scaled.entry(row.tau.clone()).or_insert_with(|| nv.clone()) == &nv;
        }
        ensure(constant == table.constant_in_n, || "constant_in_n disagrees with the reference".into())?;
        Ok((table.rows.len(), nonzero, constant))
    };
    let (rows, nonzero, constant) = check_table(1, &range)?;
    ensure(constant, || "N·|φ̄_N(δτ)| varies with N on the k=1 frame".into())?;
    // k = 2 in the same ambient has nonzero values; there the scaled values are bounded, not constant
    let (rows2, nonzero2, constant2) = check_table(2, &[1, 2])?;
    Ok(format!(
        "primitive found; φ̄_N(δτ) = D(Δ_Nτ)/N on {rows} rows for N = 1..4, N·|φ̄_N(δτ)| constant ({nonzero} nonzero); k=2 supplement: {rows2} rows match, {nonzero2} nonzero, constant in N: {constant2}"
    ))
}

fn dense(a: &AlgebraElement) -> Result<Vec<Vec<Q>>, String> {
    ok(a.to_matrix())
}

fn exact_one(v: &NormValue) -> bool {
    v.exact().is_some_and(|x| x.is_one())
}

fn criterion_9() -> Outcome {
    let (mut exact_ratios, mut l2_ratios, mut worst) = (0, 0, 0.0f64);
    for (k, blocks) in [(1, 4), (2, 3)] {
        let frame = ok(ShiftFrame::new(k, blocks, 0))?;
        let order = frame.order();
        let mut elements = vec![ok(frame.element(SparseVector::from_entries(vec![(frame.index(0, 0, 0), q(2)), (frame.index(0, k - 1, 0), q(1))])))?];
        elements.extend(ok(random_m3_samples(&frame, 5, SEED))?.into_iter().map(|(_, a)| a));
        let samples = ok(random_m3_samples(&frame, 50, SEED))?;
        let ns: Vec<usize> = (1..=blocks).collect();
        for kind in [NormKind::L1, NormKind::Linf, NormKind::L2Numeric] {
            let exact = kind.is_exact();
            let judge = |v: &NormValue| -> Result<f64, String> {
                if exact {
                    ensure(exact_one(v), || format!("{} ratio {v:?}", kind.as_str()))?;
                    Ok(0.0)
                } else {
                    let e = (v.to_f64() - 1.0).abs();
                    ensure(e <= L2_TOLERANCE, || format!("l2 ratio off by {e:e}"))?;
                    Ok(e)
                }
            };
            for a in &elements {
                let r = ok(check_m1(&frame, a, &ns, kind))?;
                for row in &r.rows {
                    worst = worst.max(judge(&row.ratio)?);
                }
                // reference: the block-diagonal amplification built by hand
                let m = dense(a)?;
                for &n in &ns {
                    let mut amp = vec![vec![Q::zero(); order]; order];
                    for l in 0..n {
                        for i in 0..k {
                            for j in 0..k {
                                amp[l * k + i][l * k + j] = m[i][j].clone();
                            }
                        }
                    }
                    let lib = ok(hochlab::norms::matrix_norm(&ok(frame.block_amplify(a, n))?, kind))?;
                    match kind {
                        NormKind::L1 => ensure(lib.exact() == Some(&oracle::l1(&amp)) && oracle::l1(&amp) == oracle::l1(&m), || "l1 reference".into())?,
                        NormKind::Linf => ensure(lib.exact() == Some(&oracle::linf(&amp)) && oracle::linf(&amp) == oracle::linf(&m), || "linf reference".into())?,
                        NormKind::L2Numeric => {
                            let (x, y) = (oracle::spectral(&amp), oracle::spectral(&m));
                            let e = (lib.to_f64() - x).abs().max((x - y).abs()) / y.max(1.0);
                            ensure(e <= L2_TOLERANCE, || format!("l2 reference off by {e:e}"))?;
                            worst = worst.max(e);
                        }
                    }
                }
                if exact {
                    exact_ratios += r.rows.len();
                } else {
                    l2_ratios += r.rows.len();
                }
            }
            let r3 = ok(check_m3(&frame, &samples, kind))?;
            ensure(r3.samples == samples.len(), || "sample count".into())?;
            if exact {
                ensure(r3.isometric && exact_one(&r3.max_ratio), || format!("{} M3 max ratio {:?}", kind.as_str(), r3.max_ratio))?;
                exact_ratios += 2 * samples.len();
            } else {
                worst = worst.max(judge(&r3.max_ratio)?);
                l2_ratios += 2 * samples.len();
            }
            // reference: Ua and aU by dense products
            for (u, a) in &samples {
                let (p, m) = (u.to_dense(), dense(a)?);
                for prod in [oracle::matmul(&p, &m), oracle::matmul(&m, &p)] {
                    match kind {
                        NormKind::L1 => ensure(oracle::l1(&prod) == oracle::l1(&m), || "reference l1 not invariant".into())?,
                        NormKind::Linf => ensure(oracle::linf(&prod) == oracle::linf(&m), || "reference linf not invariant".into())?,
                        NormKind::L2Numeric => {
                            let e = (oracle::spectral(&prod) - oracle::spectral(&m)).abs() / oracle::spectral(&m).max(1.0);
                            ensure(e <= L2_TOLERANCE, || format!("reference l2 off by {e:e}"))?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{exact_ratios} l1/linf ratios exactly 1; {l2_ratios} l2 ratios within {L2_TOLERANCE:e} (worst {worst:.1e})"))
}

fn criterion_10() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut paths: Vec<_> = std::fs::read_dir(root.join("../../scenarios"))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    ensure(!paths.is_empty(), || "no scenarios".into())?;
    let run = |p: &Path, jobs: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_hochlab"))
            .args(["--jobs", jobs, "--json", "run"])
            .arg(p)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("{} exited with {:?}", p.display(), out.status.code()))?;
        Ok(out.stdout)
    };
    let mut bytes = 0;
    for p in &paths {
        let name = p.file_name().unwrap();
        let (one, eight) = (run(p, "1")?, run(p, "8")?);
        ensure(one == eight, || format!("{name:?} differs between --jobs 1 and --jobs 8"))?;
        let golden = std::fs::read(root.join("tests/golden").join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        ensure(one == golden, || format!("{name:?} differs from its golden report"))?;
        bytes += one.len();
    }
    Ok(format!("{} golden reports ({bytes} bytes) identical with --jobs 1 and --jobs 8", paths.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("differential laws", criterion_1),
        ("matrix-algebra homology", criterion_2),
        ("H-unitality verdicts", criterion_3),
        ("splitting homotopy", criterion_4),
        ("shift-frame homotopy identities", criterion_5),
        ("Γ_h null-homotopy", criterion_6),
        ("LES and excision", criterion_7),
        ("averaging mechanism", criterion_8),
        ("norm isometries", criterion_9),
        ("determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {id:>2}  {title}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {id:>2}  {title}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
