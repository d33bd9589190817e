//! n-Σ-sequences `A₁ → A₂ → … → Aₙ → Σ^s A₁` and their morphisms.
//!
//! Positions are 0-based in code: `objects[0]` is `A₁`, `maps[n-1]` is the
//! wrap map `Aₙ → Σ^s A₁`.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{grid, GradedMap, GradedObject};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NSeq {
    field: PrimeField,
    shift: i64,
    objects: Vec<GradedObject>,
    maps: Vec<GradedMap>,
}

impl NSeq {
    /// Validates shapes. `shift` is the power of Σ used for the wrap map.
    pub fn new(
        field: PrimeField,
        shift: i64,
        objects: Vec<GradedObject>,
        maps: Vec<GradedMap>,
    ) -> Result<Self> {
        let n = objects.len();
        if n < 3 {
            return Err(Error::Invalid(format!("n = {n}, need n >= 3")));
        }
        if maps.len() != n {
            return Err(Error::shape(format!("{} maps for {n} objects", maps.len())));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.field() != field {
                return Err(Error::FieldMismatch(field.p(), m.field().p()));
            }
            let target = if i + 1 < n {
                objects[i + 1].clone()
            } else {
                objects[0].shift(shift)
            };
            if !m.has_shape(&objects[i], &target) {
                return Err(Error::shape(format!(
                    "map {} is {:?} -> {:?}, expected {:?} -> {:?}",
                    i + 1,
                    m.source(),
                    m.target(),
                    objects[i],
                    target
                )));
            }
        }
        Ok(Self {
            field,
            shift,
            objects,
            maps,
        })
    }

    /// The all-zero sequence on zero objects.
    pub fn zero(field: PrimeField, n: usize, shift: i64) -> Self {
        let z = GradedObject::zero();
        Self {
            field,
            shift,
            objects: vec![z.clone(); n],
            maps: vec![GradedMap::zero(field, &z, &z); n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.objects.len()
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn objects(&self) -> &[GradedObject] {
        &self.objects
    }

    pub fn maps(&self) -> &[GradedMap] {
        &self.maps
    }

    /// `A_i`, 1-based.
    pub fn obj(&self, i: usize) -> &GradedObject {
        &self.objects[i - 1]
    }

    /// `α_i`, 1-based.
    pub fn map(&self, i: usize) -> &GradedMap {
        &self.maps[i - 1]
    }

    pub fn susp_obj(&self, x: &GradedObject) -> GradedObject {
        x.shift(self.shift)
    }

    pub fn susp(&self, f: &GradedMap) -> GradedMap {
        f.shift(self.shift)
    }

    pub fn desusp(&self, f: &GradedMap) -> GradedMap {
        f.shift(-self.shift)
    }

    /// Total dimension of all objects.
    pub fn total_dim(&self) -> usize {
        self.objects.iter().map(GradedObject::total_dim).sum()
    }

    fn incoming(&self, i: usize) -> GradedMap {
        if i == 0 {
            self.desusp(&self.maps[self.n() - 1])
        } else {
            self.maps[i - 1].clone()
        }
    }

    /// First `(position, degree)` where exactness fails, 1-based position.
    pub fn exactness_defect(&self) -> Option<(usize, i64)> {
        for i in 0..self.n() {
            let inc = self.incoming(i);
            let out = &self.maps[i];
            let comp = out.compose(&inc).expect("consecutive maps compose");
            for (d, k) in self.objects[i].iter() {
                let zero = comp.block_ref(d).is_none_or(|b| b.is_zero());
                if !zero || inc.rank_in(d) + out.rank_in(d) != k {
                    return Some((i + 1, d));
                }
            }
        }
        None
    }

    /// Degreewise kernel = image at every position of the unrolled complex.
    pub fn is_exact(&self) -> bool {
        self.exactness_defect().is_none()
    }

    pub fn require_exact(&self) -> Result<()> {
        match self.exactness_defect() {
            None => Ok(()),
            Some((position, degree)) => Err(Error::NotExact { position, degree }),
        }
    }

    /// Whether every composite of consecutive maps vanishes, wrap included.
    pub fn is_complex(&self) -> bool {
        (0..self.n()).all(|i| {
            self.maps[i]
                .compose(&self.incoming(i))
                .expect("consecutive maps compose")
                .is_zero()
        })
    }

    /// `(A₂, …, Aₙ, ΣA₁)` with last map `(-1)ⁿ Σα₁`.
    pub fn rotate_left(&self) -> NSeq {
        let n = self.n();
        let mut objects = self.objects[1..].to_vec();
        objects.push(self.susp_obj(&self.objects[0]));
        let mut maps = self.maps[1..].to_vec();
        maps.push(self.susp(&self.maps[0]).signed(n as i64));
        NSeq {
            field: self.field,
            shift: self.shift,
            objects,
            maps,
        }
    }

    /// `(Σ⁻¹Aₙ, A₁, …, Aₙ₋₁)` with first map `(-1)ⁿ Σ⁻¹αₙ`.
    pub fn rotate_right(&self) -> NSeq {
        let n = self.n();
        let mut objects = vec![self.objects[n - 1].shift(-self.shift)];
        objects.extend_from_slice(&self.objects[..n - 1]);
        let mut maps = vec![self.desusp(&self.maps[n - 1]).signed(n as i64)];
        maps.extend_from_slice(&self.maps[..n - 1]);
        NSeq {
            field: self.field,
            shift: self.shift,
            objects,
            maps,
        }
    }

    pub fn rotate_left_by(&self, k: usize) -> NSeq {
        (0..k).fold(self.clone(), |s, _| s.rotate_left())
    }

    /// Applies Σ^k to every object and map.
    pub fn shifted(&self, k: i64) -> NSeq {
        NSeq {
            field: self.field,
            shift: self.shift,
            objects: self.objects.iter().map(|o| o.shift(k)).collect(),
            maps: self.maps.iter().map(|m| m.shift(k)).collect(),
        }
    }

    /// Multiplies every map by `(-1)^k`.
    pub fn signed(&self, k: i64) -> NSeq {
        NSeq {
            maps: self.maps.iter().map(|m| m.signed(k)).collect(),
            ..self.clone()
        }
    }

    /// Transports the sequence along isomorphisms `θᵢ: Aᵢ → A′ᵢ`.
    pub fn conjugate(&self, thetas: &[GradedMap]) -> Result<NSeq> {
        let n = self.n();
        if thetas.len() != n {
            return Err(Error::shape("conjugate: need one isomorphism per object"));
        }
        let invs = thetas
            .iter()
            .map(|t| {
                t.inverse()
                    .ok_or_else(|| Error::Invalid("conjugate: not an isomorphism".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::with_capacity(n);
        for i in 0..n {
            let next = if i + 1 < n {
                thetas[i + 1].clone()
            } else {
                self.susp(&thetas[0])
            };
            maps.push(next.compose(&self.maps[i])?.compose(&invs[i])?);
        }
        let objects = thetas.iter().map(|t| t.target().clone()).collect();
        NSeq::new(self.field, self.shift, objects, maps)
    }
}

/// The trivial sequence `A →1 A → 0 → … → 0 → ΣA`, left-rotated `j` times.
pub fn trivial_seq(
    field: PrimeField,
    n: usize,
    shift: i64,
    a: &GradedObject,
    j: usize,
) -> Result<NSeq> {
    if n < 3 {
        return Err(Error::Invalid(format!("n = {n}, need n >= 3")));
    }
    if j >= n {
        return Err(Error::Invalid(format!(
            "rotation index {j} out of range 0..{n}"
        )));
    }
    let z = GradedObject::zero();
    let mut objects = vec![z.clone(); n];
    objects[0] = a.clone();
    objects[1] = a.clone();
    let mut maps = Vec::with_capacity(n);
    maps.push(GradedMap::identity(field, a));
    for i in 1..n {
        let target = if i + 1 < n {
            objects[i + 1].clone()
        } else {
            a.shift(shift)
        };
        maps.push(GradedMap::zero(field, &objects[i], &target));
    }
    Ok(NSeq::new(field, shift, objects, maps)?.rotate_left_by(j))
}

/// Objectwise and blockwise direct sum.
pub fn direct_sum_seq(s: &NSeq, t: &NSeq) -> Result<NSeq> {
    if s.n() != t.n() || s.shift != t.shift {
        return Err(Error::shape(
            "direct sum of sequences with different n or shift",
        ));
    }
    let objects = s
        .objects
        .iter()
        .zip(&t.objects)
        .map(|(a, b)| a.direct_sum(b))
        .collect();
    let maps = s
        .maps
        .iter()
        .zip(&t.maps)
        .map(|(a, b)| a.direct_sum(b))
        .collect::<Result<Vec<_>>>()?;
    NSeq::new(s.field, s.shift, objects, maps)
}

pub fn direct_sum_all<'a>(
    field: PrimeField,
    n: usize,
    shift: i64,
    seqs: impl IntoIterator<Item = &'a NSeq>,
) -> Result<NSeq> {
    seqs.into_iter()
        .try_fold(NSeq::zero(field, n, shift), |acc, s| {
            direct_sum_seq(&acc, s)
        })
}

/// Components `φ₁ … φₙ` of a candidate morphism `source → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqMorphism {
    pub source: NSeq,
    pub target: NSeq,
    pub components: Vec<GradedMap>,
}

impl SeqMorphism {
    pub fn new(source: NSeq, target: NSeq, components: Vec<GradedMap>) -> Result<Self> {
        if source.n() != target.n() || source.shift != target.shift {
            return Err(Error::shape(
                "morphism between sequences of different n or shift",
            ));
        }
        if components.len() != source.n() {
            return Err(Error::shape("morphism needs one component per object"));
        }
        for (i, c) in components.iter().enumerate() {
            if !c.has_shape(&source.objects[i], &target.objects[i]) {
                return Err(Error::shape(format!(
                    "component {} has the wrong shape",
                    i + 1
                )));
            }
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn identity(s: &NSeq) -> Self {
        let components = s
            .objects
            .iter()
            .map(|o| GradedMap::identity(s.field, o))
            .collect();
        Self {
            source: s.clone(),
            target: s.clone(),
            components,
        }
    }

    pub fn zero(s: &NSeq, t: &NSeq) -> Result<Self> {
        let components = s
            .objects
            .iter()
            .zip(&t.objects)
            .map(|(a, b)| GradedMap::zero(s.field, a, b))
            .collect();
        Self::new(s.clone(), t.clone(), components)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// `φ_i`, 1-based, with `φ_{n+1} = Σφ₁`.
    pub fn phi(&self, i: usize) -> GradedMap {
        if i == self.n() + 1 {
            self.source.susp(&self.components[0])
        } else {
            self.components[i - 1].clone()
        }
    }

    /// First square (1-based) with `φ_{i+1}∘αᵢ ≠ βᵢ∘φᵢ`.
    pub fn failing_square(&self) -> Option<usize> {
        (1..=self.n()).find(|&i| {
            let lhs = self
                .phi(i + 1)
                .compose(self.source.map(i))
                .expect("square shapes");
            let rhs = self
                .target
                .map(i)
                .compose(&self.phi(i))
                .expect("square shapes");
            lhs != rhs
        })
    }

    pub fn is_morphism(&self) -> bool {
        self.failing_square().is_none()
    }

    pub fn require_morphism(&self) -> Result<()> {
        match self.failing_square() {
            None => Ok(()),
            Some(i) => Err(Error::NotMorphism(i)),
        }
    }

    /// Some `φᵢ` and `φᵢ₊₁` are both isomorphisms (`φₙ₊₁ = Σφ₁`).
    pub fn is_weak_iso(&self) -> Result<bool> {
        self.require_morphism()?;
        let iso: Vec<bool> = self
            .components
            .iter()
            .map(GradedMap::is_isomorphism)
            .collect();
        let n = self.n();
        Ok((0..n).any(|i| iso[i] && iso[(i + 1) % n]))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_morphism() && self.components.iter().all(GradedMap::is_isomorphism)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SeqMorphism) -> Result<SeqMorphism> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.compose(b))
            .collect::<Result<Vec<_>>>()?;
        SeqMorphism::new(other.source.clone(), self.target.clone(), components)
    }
}

/// Cone with objects `A_{i+1} ⊕ Bᵢ` and maps `[[−α_{i+1}, 0], [φ_{i+1}, βᵢ]]`.
pub fn mapping_cone(m: &SeqMorphism) -> Result<NSeq> {
    m.require_morphism()?;
    let (a, b) = (&m.source, &m.target);
    let n = a.n();
    let f = a.field;
    let a_obj = |i: usize| {
        if i == n + 1 {
            a.susp_obj(a.obj(1))
        } else {
            a.obj(i).clone()
        }
    };
    let a_map = |i: usize| {
        if i == n + 1 {
            a.susp(a.map(1))
        } else {
            a.map(i).clone()
        }
    };
    let objects: Vec<GradedObject> = (1..=n).map(|i| a_obj(i + 1).direct_sum(b.obj(i))).collect();
    let mut maps = Vec::with_capacity(n);
    for i in 1..=n {
        let src = [a_obj(i + 1), b.obj(i).clone()];
        let tgt = if i < n {
            [a_obj(i + 2), b.obj(i + 1).clone()]
        } else {
            [a.susp_obj(&a_obj(2)), a.susp_obj(b.obj(1))]
        };
        let alpha = a_map(i + 1).neg();
        let phi = m.phi(i + 1);
        maps.push(grid(
            f,
            &src,
            &tgt,
            &[vec![Some(&alpha), None], vec![Some(&phi), Some(b.map(i))]],
        )?);
    }
    NSeq::new(f, a.shift, objects, maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn trivial_is_exact_for_all_rotations() {
        let a = GradedObject::from_pairs([(0, 2), (1, 1)]);
        for n in 3..7 {
            for j in 0..n {
                let t = trivial_seq(f5(), n, 1, &a, j).unwrap();
                assert!(t.is_exact(), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn trivial_j0_maps() {
        let a = GradedObject::concentrated(0, 2);
        let t = trivial_seq(f5(), 4, 1, &a, 0).unwrap();
        assert_eq!(t.map(1), &GradedMap::identity(f5(), &a));
        assert!(t.maps()[1..].iter().all(GradedMap::is_zero));
        assert!(trivial_seq(f5(), 4, 1, &a, 4).is_err());
    }

    #[test]
    fn rotation_sign_depends_on_parity() {
        let a = GradedObject::concentrated(0, 1);
        let t3 = trivial_seq(f5(), 3, 1, &a, 0).unwrap().rotate_left();
        let id1 = GradedMap::identity(f5(), &a.shift(1));
        assert_eq!(t3.map(3), &id1.neg());
        let t4 = trivial_seq(f5(), 4, 1, &a, 0).unwrap().rotate_left();
        assert_eq!(t4.map(4), &id1);
    }

    #[test]
    fn broken_wrap_is_not_exact() {
        let a = GradedObject::concentrated(0, 1);
        let t = trivial_seq(f5(), 3, 1, &a, 0).unwrap();
        let mut objects = t.objects().to_vec();
        objects[2] = GradedObject::concentrated(1, 1);
        let maps = vec![
            t.map(1).clone(),
            GradedMap::zero(f5(), &a, &objects[2]),
            GradedMap::identity(f5(), &objects[2]),
        ];
        let s = NSeq::new(f5(), 1, objects, maps).unwrap();
        // Σα₁∘α₃ = Σ(id)∘id ≠ 0, so the wrap composite already fails.
        assert!(!s.is_exact());
        assert!(!s.is_complex());
    }

    #[test]
    fn zero_sequence_exact() {
        assert!(NSeq::zero(f5(), 5, 1).is_exact());
    }

    #[test]
    fn cone_of_identity_on_trivial_is_exact() {
        let a = GradedObject::from_pairs([(0, 1), (-1, 2)]);
        let t = trivial_seq(f5(), 4, 1, &a, 1).unwrap();
        let c = mapping_cone(&SeqMorphism::identity(&t)).unwrap();
        assert!(c.is_exact());
        assert_eq!(c.obj(1), &t.obj(2).direct_sum(t.obj(1)));
    }
}
