//! Graded vector spaces over `F_p` and degree-preserving maps.
//!
//! Σ shifts degrees up: `(Σ^k X)_d = X_{d-k}`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::Matrix;

/// Finitely supported dimension vector. Zero entries are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedObject {
    dims: BTreeMap<i64, usize>,
}

impl fmt::Debug for GradedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, k)) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}:{k}")?;
        }
        write!(f, "}}")
    }
}

impl GradedObject {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn concentrated(degree: i64, dim: usize) -> Self {
        Self::from_pairs([(degree, dim)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let mut dims = BTreeMap::new();
        for (d, k) in pairs {
            *dims.entry(d).or_insert(0) += k;
        }
        dims.retain(|_, k| *k > 0);
        Self { dims }
    }

    #[inline]
    pub fn dim(&self, degree: i64) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.dims.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.dims.iter().map(|(&d, &k)| (d, k))
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            dims: self.dims.iter().map(|(&d, &m)| (d + k, m)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_pairs(self.iter().chain(other.iter()))
    }

    pub fn sum_all<'a>(objects: impl IntoIterator<Item = &'a GradedObject>) -> Self {
        Self::from_pairs(objects.into_iter().flat_map(|o| o.iter()))
    }

    /// Degrees where both objects are nonzero.
    pub fn common_support(&self, other: &Self) -> Vec<i64> {
        self.support().filter(|&d| other.dim(d) > 0).collect()
    }

    /// Dimension of the space of degree-preserving maps `self -> other`.
    pub fn hom_dim(&self, other: &Self) -> usize {
        self.iter().map(|(d, k)| k * other.dim(d)).sum()
    }
}

/// `Σ^k x`.
pub fn shift_object(x: &GradedObject, k: i64) -> GradedObject {
    x.shift(k)
}

/// `Σ^k f`.
pub fn shift_map(f: &GradedMap, k: i64) -> GradedMap {
    f.shift(k)
}

/// A degree-preserving map. Blocks exist exactly for the degrees where both
/// source and target are nonzero; block `d` has shape `target_d × source_d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedMap {
    field: PrimeField,
    source: GradedObject,
    target: GradedObject,
    blocks: BTreeMap<i64, Matrix>,
}

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedMap {:?} -> {:?} ", self.source, self.target)?;
        f.debug_map().entries(self.blocks.iter()).finish()
    }
}

impl GradedMap {
    pub fn zero(field: PrimeField, source: &GradedObject, target: &GradedObject) -> Self {
        let blocks = source
            .common_support(target)
            .into_iter()
            .map(|d| (d, Matrix::zeros(field, target.dim(d), source.dim(d))))
            .collect();
        Self {
            field,
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn identity(field: PrimeField, x: &GradedObject) -> Self {
        let blocks = x
            .iter()
            .map(|(d, k)| (d, Matrix::identity(field, k)))
            .collect();
        Self {
            field,
            source: x.clone(),
            target: x.clone(),
            blocks,
        }
    }

    /// `c · id`.
    pub fn scalar(field: PrimeField, x: &GradedObject, c: u32) -> Self {
        Self::identity(field, x).scale(c)
    }

    /// Builds a map from explicit blocks. Missing degrees are zero; blocks
    /// outside the common support must be absent or empty.
    pub fn from_blocks(
        field: PrimeField,
        source: &GradedObject,
        target: &GradedObject,
        blocks: BTreeMap<i64, Matrix>,
    ) -> Result<Self> {
        let mut map = Self::zero(field, source, target);
        for (d, b) in blocks {
            if b.field() != field {
                return Err(Error::FieldMismatch(field.p(), b.field().p()));
            }
            if b.rows() != target.dim(d) || b.cols() != source.dim(d) {
                return Err(Error::shape(format!(
                    "block in degree {d} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    target.dim(d),
                    source.dim(d)
                )));
            }
            if let Some(slot) = map.blocks.get_mut(&d) {
                *slot = b;
            }
        }
        Ok(map)
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        source: &GradedObject,
        target: &GradedObject,
        rng: &mut R,
    ) -> Self {
        let mut map = Self::zero(field, source, target);
        for (&d, b) in map.blocks.iter_mut() {
            *b = Matrix::random(field, target.dim(d), source.dim(d), rng);
        }
        map
    }

    /// A uniformly random automorphism of `x` (rejection sampling per degree).
    pub fn random_iso<R: Rng + ?Sized>(field: PrimeField, x: &GradedObject, rng: &mut R) -> Self {
        let mut map = Self::identity(field, x);
        for (&d, b) in map.blocks.iter_mut() {
            let k = x.dim(d);
            *b = loop {
                let m = Matrix::random(field, k, k, rng);
                if m.is_invertible() {
                    break m;
                }
            };
        }
        map
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn source(&self) -> &GradedObject {
        &self.source
    }

    pub fn target(&self) -> &GradedObject {
        &self.target
    }

    pub fn blocks(&self) -> &BTreeMap<i64, Matrix> {
        &self.blocks
    }

    /// The block in degree `d`, zero-shaped when outside the common support.
    pub fn block(&self, d: i64) -> Matrix {
        self.blocks
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.target.dim(d), self.source.dim(d)))
    }

    pub fn block_ref(&self, d: i64) -> Option<&Matrix> {
        self.blocks.get(&d)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// Whether the map has exactly this source and target.
    pub fn has_shape(&self, source: &GradedObject, target: &GradedObject) -> bool {
        &self.source == source && &self.target == target
    }

    /// `g ∘ f` with `self = g`.
    pub fn compose(&self, f: &GradedMap) -> Result<GradedMap> {
        if self.field != f.field {
            return Err(Error::FieldMismatch(self.field.p(), f.field.p()));
        }
        if f.target != self.source {
            return Err(Error::shape(format!(
                "compose: target {:?} does not match source {:?}",
                f.target, self.source
            )));
        }
        let mut out = GradedMap::zero(self.field, &f.source, &self.target);
        for (&d, slot) in out.blocks.iter_mut() {
            if let (Some(g), Some(fb)) = (self.blocks.get(&d), f.blocks.get(&d)) {
                *slot = g.mul(fb)?;
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &GradedMap, op: &str) -> Result<GradedMap> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        if self.source != other.source || self.target != other.target {
            return Err(Error::shape(format!("{op}: maps have different shapes")));
        }
        let mut out = self.clone();
        for (d, b) in out.blocks.iter_mut() {
            *b = b.add(&other.blocks[d])?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.zip_with(other, "add")
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.zip_with(&other.neg(), "sub")
    }

    pub fn neg(&self) -> GradedMap {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.neg();
        }
        out
    }

    pub fn scale(&self, c: u32) -> GradedMap {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.scale(c);
        }
        out
    }

    /// Multiplies by `(-1)^k`.
    pub fn signed(&self, k: i64) -> GradedMap {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn shift(&self, k: i64) -> GradedMap {
        GradedMap {
            field: self.field,
            source: self.source.shift(k),
            target: self.target.shift(k),
            blocks: self
                .blocks
                .iter()
                .map(|(&d, b)| (d + k, b.clone()))
                .collect(),
        }
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &GradedMap) -> Result<GradedMap> {
        BlockMap::new(
            self.field,
            vec![self.source.clone(), other.source.clone()],
            vec![self.target.clone(), other.target.clone()],
        )
        .set(0, 0, self)?
        .set(1, 1, other)?
        .build()
    }

    pub fn transpose(&self) -> GradedMap {
        GradedMap {
            field: self.field,
            source: self.target.clone(),
            target: self.source.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|(&d, b)| (d, b.transpose()))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.blocks.values().map(Matrix::rank).sum()
    }

    pub fn rank_in(&self, d: i64) -> usize {
        self.blocks.get(&d).map_or(0, Matrix::rank)
    }

    /// Every block square and invertible, and source and target agree.
    pub fn is_isomorphism(&self) -> bool {
        self.source == self.target && self.blocks.values().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<GradedMap> {
        if self.source != self.target {
            return None;
        }
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.inverse()?;
        }
        Some(out)
    }

    /// Inclusion of the kernel, built from per-degree kernel bases.
    pub fn kernel(&self) -> GradedMap {
        let field = self.field;
        let mut blocks = BTreeMap::new();
        let mut dims = Vec::new();
        for (d, k) in self.source.iter() {
            let basis = match self.blocks.get(&d) {
                Some(b) => b.kernel_basis(),
                None => Matrix::identity(field, k),
            };
            dims.push((d, basis.cols()));
            blocks.insert(d, basis);
        }
        let ker = GradedObject::from_pairs(dims);
        blocks.retain(|_, b| b.cols() > 0);
        GradedMap::from_blocks(field, &ker, &self.source, blocks).expect("kernel shapes")
    }

    /// Projection onto the cokernel: rows span the left null space.
    pub fn cokernel(&self) -> GradedMap {
        let field = self.field;
        let mut blocks = BTreeMap::new();
        let mut dims = Vec::new();
        for (d, k) in self.target.iter() {
            let proj = match self.blocks.get(&d) {
                Some(b) => b.cokernel_projection(),
                None => Matrix::identity(field, k),
            };
            dims.push((d, proj.rows()));
            blocks.insert(d, proj);
        }
        let coker = GradedObject::from_pairs(dims);
        blocks.retain(|_, b| b.rows() > 0);
        GradedMap::from_blocks(field, &self.target, &coker, blocks).expect("cokernel shapes")
    }

    /// Inclusion of the span of the listed standard basis vectors per degree.
    pub fn coordinate_inclusion(
        field: PrimeField,
        x: &GradedObject,
        coords: &BTreeMap<i64, Vec<usize>>,
    ) -> GradedMap {
        let sub = GradedObject::from_pairs(coords.iter().map(|(&d, c)| (d, c.len())));
        let blocks = coords
            .iter()
            .filter(|(_, c)| !c.is_empty())
            .map(|(&d, c)| (d, Matrix::identity(field, x.dim(d)).select_cols(c)))
            .collect();
        GradedMap::from_blocks(field, &sub, x, blocks).expect("coordinate inclusion shapes")
    }

    /// Columns of `self` indexed per degree, as a map from a new object.
    pub fn select_columns(&self, coords: &BTreeMap<i64, Vec<usize>>) -> GradedMap {
        let incl = GradedMap::coordinate_inclusion(self.field, &self.source, coords);
        self.compose(&incl).expect("selection composes")
    }

    /// Whether `self` factors through `other` on the left: `self = other ∘ x`.
    pub fn solve_left(other: &GradedMap, rhs: &GradedMap) -> Result<Option<GradedMap>> {
        if other.target != rhs.target {
            return Err(Error::shape("solve_left: targets differ"));
        }
        let mut blocks = BTreeMap::new();
        for d in other.source.common_support(&rhs.source) {
            match other.block(d).solve(&rhs.block(d))? {
                Some(x) => {
                    blocks.insert(d, x);
                }
                None => return Ok(None),
            }
        }
        // Degrees where `other` has no block still need rhs = 0 there.
        for (&d, b) in &rhs.blocks {
            if other.source.dim(d) == 0 && !b.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(GradedMap::from_blocks(
            other.field,
            &rhs.source,
            &other.source,
            blocks,
        )?))
    }
}

/// Builds a map between direct sums from a grid of components.
///
/// Summand `i` of the source and summand `j` of the target occupy consecutive
/// coordinate ranges in every degree, in list order.
#[derive(Clone, Debug)]
pub struct BlockMap {
    field: PrimeField,
    sources: Vec<GradedObject>,
    targets: Vec<GradedObject>,
    map: GradedMap,
}

fn offset(summands: &[GradedObject], i: usize, d: i64) -> usize {
    summands[..i].iter().map(|s| s.dim(d)).sum()
}

impl BlockMap {
    pub fn new(field: PrimeField, sources: Vec<GradedObject>, targets: Vec<GradedObject>) -> Self {
        let src = GradedObject::sum_all(&sources);
        let tgt = GradedObject::sum_all(&targets);
        let map = GradedMap::zero(field, &src, &tgt);
        Self {
            field,
            sources,
            targets,
            map,
        }
    }

    /// Sets the component from source summand `j` to target summand `i`.
    pub fn set(mut self, i: usize, j: usize, component: &GradedMap) -> Result<Self> {
        if component.field != self.field {
            return Err(Error::FieldMismatch(self.field.p(), component.field.p()));
        }
        if component.source != self.sources[j] || component.target != self.targets[i] {
            return Err(Error::shape(format!(
                "component ({i},{j}) is {:?} -> {:?}, expected {:?} -> {:?}",
                component.source, component.target, self.sources[j], self.targets[i]
            )));
        }
        for (&d, b) in &component.blocks {
            let r0 = offset(&self.targets, i, d);
            let c0 = offset(&self.sources, j, d);
            self.map
                .blocks
                .get_mut(&d)
                .expect("degree in support")
                .set_block(r0, c0, b);
        }
        Ok(self)
    }

    pub fn build(self) -> Result<GradedMap> {
        Ok(self.map)
    }

    /// Extracts the component from source summand `j` to target summand `i`.
    pub fn component(
        map: &GradedMap,
        sources: &[GradedObject],
        targets: &[GradedObject],
        i: usize,
        j: usize,
    ) -> Result<GradedMap> {
        if map.source != GradedObject::sum_all(sources)
            || map.target != GradedObject::sum_all(targets)
        {
            return Err(Error::shape("component: summands do not match the map"));
        }
        let mut blocks = BTreeMap::new();
        for d in sources[j].common_support(&targets[i]) {
            let r0 = offset(targets, i, d);
            let c0 = offset(sources, j, d);
            let b = map
                .block(d)
                .submatrix(r0, targets[i].dim(d), c0, sources[j].dim(d));
            blocks.insert(d, b);
        }
        GradedMap::from_blocks(map.field, &sources[j], &targets[i], blocks)
    }
}

/// Column map `[f₁; f₂; …]` from `x` into a direct sum.
pub fn column(field: PrimeField, source: &GradedObject, parts: &[&GradedMap]) -> Result<GradedMap> {
    let targets: Vec<_> = parts.iter().map(|m| m.target().clone()).collect();
    let mut b = BlockMap::new(field, vec![source.clone()], targets);
    for (i, m) in parts.iter().enumerate() {
        b = b.set(i, 0, m)?;
    }
    b.build()
}

/// Row map `[f₁ f₂ …]` from a direct sum into `y`.
pub fn row(field: PrimeField, target: &GradedObject, parts: &[&GradedMap]) -> Result<GradedMap> {
    let sources: Vec<_> = parts.iter().map(|m| m.source().clone()).collect();
    let mut b = BlockMap::new(field, sources, vec![target.clone()]);
    for (j, m) in parts.iter().enumerate() {
        b = b.set(0, j, m)?;
    }
    b.build()
}

/// Map between direct sums given as a dense grid; `None` entries are zero.
pub fn grid(
    field: PrimeField,
    sources: &[GradedObject],
    targets: &[GradedObject],
    entries: &[Vec<Option<&GradedMap>>],
) -> Result<GradedMap> {
    let mut b = BlockMap::new(field, sources.to_vec(), targets.to_vec());
    for (i, r) in entries.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            if let Some(m) = e {
                b = b.set(i, j, m)?;
            }
        }
    }
    b.build()
}
