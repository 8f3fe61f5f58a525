use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::basis::ChainBasis;
use super::tuple::{collect_terms, decode, encode};
use super::Chain;
use crate::algebra::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVector};
use crate::rational::Q;

/// Collects the output terms of a rule applied to one basis tuple.
pub struct Emitter {
    dim: usize,
    out: Vec<(u64, Q)>,
}

impl Emitter {
    pub fn new(target_dim: usize) -> Self {
        Self {
            dim: target_dim,
            out: Vec::new(),
        }
    }

    pub fn emit(&mut self, tuple: &[usize], c: Q) {
        if !c.is_zero() {
            self.out.push((encode(self.dim, tuple), c));
        }
    }

    pub fn emit_code(&mut self, code: u64, c: Q) {
        if !c.is_zero() {
            self.out.push((code, c));
        }
    }

    /// Emits `coeff · v_0 ⊗ v_1 ⊗ ⋯` expanded over the supports.
    pub fn emit_product(&mut self, factors: &[SparseVector], coeff: &Q) {
        if coeff.is_zero() || factors.iter().any(|f| f.is_zero()) {
            return;
        }
        self.expand(factors, 0, 0, coeff.clone());
    }

    fn expand(&mut self, factors: &[SparseVector], depth: usize, code: u64, c: Q) {
        if depth == factors.len() {
            self.out.push((code, c));
            return;
        }
        for (a, x) in factors[depth].iter() {
            self.expand(factors, depth + 1, code * self.dim as u64 + a as u64, &c * x);
        }
    }

    pub fn into_terms(self) -> BTreeMap<u64, Q> {
        collect_terms(self.out)
    }

    pub fn target_dim(&self) -> usize {
        self.dim
    }
}

/// A linear map between chain spaces defined on basis tuples.
pub trait ChainRule: Send + Sync {
    fn name(&self) -> String;
    fn source(&self) -> &Arc<AlgebraPresentation>;
    fn target(&self) -> &Arc<AlgebraPresentation>;
    /// Degree shift: degree-n tuples map to degree `n + shift`.
    fn shift(&self) -> isize;
    fn check_degree(&self, _n: usize) -> Result<()> {
        Ok(())
    }
    /// Adds `coeff` times the image of `tuple` (of degree `n`) to `out`.
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()>;
}

pub(crate) fn undefined(name: &str, degree: usize) -> Error {
    Error::UndefinedDegree {
        map: name.to_string(),
        degree,
    }
}

/// A graded map: a rule plus a per-degree cache of its matrices on the full
/// chain spaces.
#[derive(Clone)]
pub struct GradedMap {
    rule: Arc<dyn ChainRule>,
    cache: Arc<Mutex<HashMap<usize, Arc<SparseMatrix>>>>,
}

impl std::fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedMap").field("name", &self.rule.name()).field("shift", &self.shift()).finish()
    }
}

/// A basis tuple on which two maps disagree, with the difference of images.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub tuple: Vec<usize>,
    pub residual: Chain,
}

impl GradedMap {
    pub fn new(rule: impl ChainRule + 'static) -> Self {
        Self::from_arc(Arc::new(rule))
    }

    pub fn from_arc(rule: Arc<dyn ChainRule>) -> Self {
        Self {
            rule,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// A rule given by a closure `(degree, tuple, coeff, out)`.
    pub fn from_fn<F>(
        name: impl Into<String>,
        source: Arc<AlgebraPresentation>,
        target: Arc<AlgebraPresentation>,
        shift: isize,
        f: F,
    ) -> Self
    where
        F: Fn(usize, &[usize], &Q, &mut Emitter) -> Result<()> + Send + Sync + 'static,
    {
        Self::new(FnRule {
            name: name.into(),
            source,
            target,
            shift,
            f: Box::new(f),
        })
    }

    pub fn name(&self) -> String {
        self.rule.name()
    }

    pub fn source(&self) -> &Arc<AlgebraPresentation> {
        self.rule.source()
    }

    pub fn target(&self) -> &Arc<AlgebraPresentation> {
        self.rule.target()
    }

    pub fn shift(&self) -> isize {
        self.rule.shift()
    }

    pub fn check_degree(&self, n: usize) -> Result<()> {
        self.rule.check_degree(n)?;
        self.target_degree(n).map(|_| ())
    }

    pub fn target_degree(&self, n: usize) -> Result<usize> {
        let t = n as isize + self.shift();
        if t < 0 {
            return Err(undefined(&self.name(), n));
        }
        Ok(t as usize)
    }

    pub fn rule(&self) -> &Arc<dyn ChainRule> {
        &self.rule
    }

    /// Image of one basis tuple, as tuple codes in the target algebra.
    pub fn apply_tuple(&self, n: usize, tuple: &[usize]) -> Result<BTreeMap<u64, Q>> {
        self.check_degree(n)?;
        let mut out = Emitter::new(self.target().dim());
        self.rule.apply(n, tuple, &Q::one(), &mut out)?;
        Ok(out.into_terms())
    }

    pub fn apply(&self, c: &Chain) -> Result<Chain> {
        if c.algebra().dim() != self.source().dim() || c.algebra().hash() != self.source().hash() {
            return Err(Error::AlgebraMismatch);
        }
        let n = c.degree();
        self.check_degree(n)?;
        let mut out = Emitter::new(self.target().dim());
        let mut tuple = vec![0; n + 1];
        for (&code, x) in c.raw_terms() {
            let mut code = code;
            super::tuple::decode_into(c.algebra().dim(), &mut code, &mut tuple);
            self.rule.apply(n, &tuple, x, &mut out)?;
        }
        Ok(Chain::from_raw(self.target().clone(), self.target_degree(n)?, out.into_terms()))
    }

    /// Images of every tuple of `source` (in basis order), computed in
    /// parallel.
    pub fn images(&self, n: usize, source: &ChainBasis) -> Result<Vec<BTreeMap<u64, Q>>> {
        self.check_degree(n)?;
        if source.degree() != n || source.dim() != self.source().dim() {
            return Err(Error::Dimension("source basis does not match the map".into()));
        }
        (0..source.len())
            .into_par_iter()
            .map(|i| {
                let tuple = decode(source.dim(), source.code(i), n + 1);
                let mut out = Emitter::new(self.target().dim());
                self.rule.apply(n, &tuple, &Q::one(), &mut out)?;
                Ok(out.into_terms())
            })
            .collect()
    }

    /// Matrix of the map from `source` to `target`; fails with a support
    /// error if some image leaves `target`.
    pub fn materialize_on(&self, n: usize, source: &ChainBasis, target: &ChainBasis) -> Result<SparseMatrix> {
        let t = self.target_degree(n)?;
        if target.degree() != t || target.dim() != self.target().dim() {
            return Err(Error::Dimension("target basis does not match the map".into()));
        }
        let images = self.images(n, source)?;
        let columns = images
            .into_par_iter()
            .map(|img| {
                let mut entries = Vec::with_capacity(img.len());
                for (code, x) in img {
                    let row = target.index_of(code).ok_or_else(|| {
                        Error::Support(format!(
                            "{} maps outside the chosen target basis (tuple {:?})",
                            self.name(),
                            decode(target.dim(), code, t + 1)
                        ))
                    })?;
                    entries.push((row, x));
                }
                Ok(SparseVector::from_entries(entries))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseMatrix::from_columns(target.len(), columns)
    }

    /// Matrix on the full chain spaces, cached per degree.
    pub fn materialize(&self, n: usize) -> Result<Arc<SparseMatrix>> {
        if let Some(m) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(m.clone());
        }
        let source = ChainBasis::full(self.source().dim(), n)?;
        let target = ChainBasis::full(self.target().dim(), self.target_degree(n)?)?;
        let m = Arc::new(self.materialize_on(n, &source, &target)?);
        let mut cache = self.cache.lock().expect("cache lock");
        Ok(cache.entry(n).or_insert(m).clone())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap> {
        if self.source().hash() != inner.target().hash() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(GradedMap::new(Compose {
            outer: self.clone(),
            inner: inner.clone(),
        }))
    }

    /// `Σ c_i f_i` for maps with a common source, target and shift.
    pub fn combination(terms: Vec<(Q, GradedMap)>) -> Result<GradedMap> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidArgument("empty combination".into()));
        };
        for (_, f) in &terms {
            if f.shift() != first.shift()
                || f.source().hash() != first.source().hash()
                || f.target().hash() != first.target().hash()
            {
                return Err(Error::InvalidArgument(format!(
                    "cannot add {} and {}: different source, target or shift",
                    first.name(),
                    f.name()
                )));
            }
        }
        Ok(GradedMap::new(Combination { terms }))
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        Self::combination(vec![(Q::one(), self.clone()), (Q::one(), other.clone())])
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        Self::combination(vec![(Q::one(), self.clone()), (-Q::one(), other.clone())])
    }

    pub fn scale(&self, c: Q) -> GradedMap {
        GradedMap::new(Combination {
            terms: vec![(c, self.clone())],
        })
    }

    /// First basis tuple of `source` (in basis order) where the two maps
    /// differ, or `None` if they agree on all of it.
    pub fn first_mismatch(&self, other: &GradedMap, n: usize, source: &ChainBasis) -> Result<Option<Mismatch>> {
        if self.target().hash() != other.target().hash() || self.shift() != other.shift() {
            return Err(Error::AlgebraMismatch);
        }
        let diff = self.sub(other)?;
        let images = diff.images(n, source)?;
        Ok(images.into_iter().enumerate().find(|(_, img)| !img.is_empty()).map(|(i, img)| Mismatch {
            tuple: source.tuple(i),
            residual: Chain::from_raw(self.target().clone(), n.wrapping_add_signed(self.shift()), img),
        }))
    }
}

struct FnRule {
    name: String,
    source: Arc<AlgebraPresentation>,
    target: Arc<AlgebraPresentation>,
    shift: isize,
    #[allow(clippy::type_complexity)]
    f: Box<dyn Fn(usize, &[usize], &Q, &mut Emitter) -> Result<()> + Send + Sync>,
}

impl ChainRule for FnRule {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        &self.source
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        &self.target
    }
    fn shift(&self) -> isize {
        self.shift
    }
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        (self.f)(n, tuple, coeff, out)
    }
}

struct Compose {
    outer: GradedMap,
    inner: GradedMap,
}

impl ChainRule for Compose {
    fn name(&self) -> String {
        format!("{}∘{}", self.outer.name(), self.inner.name())
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        self.inner.source()
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        self.outer.target()
    }
    fn shift(&self) -> isize {
        self.outer.shift() + self.inner.shift()
    }
    fn check_degree(&self, n: usize) -> Result<()> {
        self.inner.check_degree(n)?;
        self.outer.check_degree(self.inner.target_degree(n)?)
    }
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        let mid_degree = self.inner.target_degree(n)?;
        let mut mid = Emitter::new(self.inner.target().dim());
        self.inner.rule.apply(n, tuple, coeff, &mut mid)?;
        let dim = self.inner.target().dim();
        let mut t = vec![0; mid_degree + 1];
        for (code, x) in mid.into_terms() {
            let mut code = code;
            super::tuple::decode_into(dim, &mut code, &mut t);
            self.outer.rule.apply(mid_degree, &t, &x, out)?;
        }
        Ok(())
    }
}

struct Combination {
    terms: Vec<(Q, GradedMap)>,
}

impl ChainRule for Combination {
    fn name(&self) -> String {
        self.terms
            .iter()
            .map(|(c, f)| format!("{}·{}", crate::rational::format_q(c), f.name()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        self.terms[0].1.source()
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        self.terms[0].1.target()
    }
    fn shift(&self) -> isize {
        self.terms[0].1.shift()
    }
    fn check_degree(&self, n: usize) -> Result<()> {
        self.terms.iter().try_for_each(|(_, f)| f.check_degree(n))
    }
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        for (c, f) in &self.terms {
            f.rule.apply(n, tuple, &(coeff * c), out)?;
        }
        Ok(())
    }
}
