//! Splitting exact sequences into rotated trivial pieces, and generators
//! built from such pieces.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{row, GradedMap, GradedObject};
use crate::matrix::Matrix;
use crate::rng::rng_from;
use crate::sequence::{direct_sum_all, trivial_seq, NSeq, SeqMorphism};

/// A trivial summand: `trivial_seq(object, rotation)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece {
    pub object: GradedObject,
    pub rotation: usize,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    /// Isomorphism from the direct sum of the pieces onto the input.
    pub iso: SeqMorphism,
}

/// Inclusion of the span of pivot coordinates: a complement of `ker f`.
pub fn coimage_inclusion(f: &GradedMap) -> GradedMap {
    let coords: BTreeMap<i64, Vec<usize>> = f
        .source()
        .iter()
        .map(|(d, _)| (d, f.block_ref(d).map_or_else(Vec::new, |b| b.rref().1)))
        .collect();
    GradedMap::coordinate_inclusion(f.field(), f.source(), &coords)
}

/// Standard coordinates completing the columns of an injective `f` to a basis.
pub fn image_complement(f: &GradedMap) -> GradedMap {
    let field = f.field();
    let mut coords = BTreeMap::new();
    for (d, k) in f.target().iter() {
        let basis = f.block(d);
        let aug = basis
            .hstack(&Matrix::identity(field, k))
            .expect("same rows");
        let (_, piv) = aug.rref();
        let extra: Vec<usize> = piv
            .into_iter()
            .filter(|&c| c >= basis.cols())
            .map(|c| c - basis.cols())
            .collect();
        coords.insert(d, extra);
    }
    GradedMap::coordinate_inclusion(field, f.target(), &coords)
}

/// Rotation index of the piece that carries `αᵢ` (1-based `i`) isomorphically.
pub fn rotation_for_position(n: usize, i: usize) -> usize {
    if i == 1 {
        0
    } else {
        n - i + 1
    }
}

/// Splits an exact sequence. Fails exactly when the input is not exact.
pub fn decompose_exact(s: &NSeq) -> Result<Decomposition> {
    let n = s.n();
    let f = s.field();
    let sh = s.shift();
    // Bᵢ: Cᵢ → Aᵢ spans a complement of ker αᵢ.
    let incl: Vec<GradedMap> = s.maps().iter().map(coimage_inclusion).collect();
    let mut pieces = Vec::new();
    let mut seqs = Vec::new();
    for i in 1..=n {
        let c = incl[i - 1].source();
        let j = rotation_for_position(n, i);
        let obj = if j == 0 { c.clone() } else { c.shift(-sh) };
        seqs.push(trivial_seq(f, n, sh, &obj, j)?);
        pieces.push(Piece {
            object: obj,
            rotation: j,
        });
    }
    let sum = direct_sum_all(f, n, sh, &seqs)?;
    // Position i receives piece i-1 (image part) and piece i (own part),
    // ordered by piece index; position 1 receives piece 1 then piece n.
    let sign_n = (n % 2) as i64;
    let mut thetas = Vec::with_capacity(n);
    for i in 1..=n {
        let own = &incl[i - 1];
        let theta = if i == 1 {
            let wrap = s.map(n).compose(&incl[n - 1])?.signed(sign_n);
            row(f, s.obj(1), &[own, &s.desusp(&wrap)])?
        } else {
            let eps = if i - 1 == 1 { 0 } else { sign_n };
            let img = s.map(i - 1).compose(&incl[i - 2])?.signed(eps);
            row(f, s.obj(i), &[&img, own])?
        };
        thetas.push(theta);
    }
    let iso = SeqMorphism::new(sum, s.clone(), thetas)?;
    for (i, t) in iso.components.iter().enumerate() {
        if let Some(d) = t
            .source()
            .support()
            .chain(t.target().support())
            .find(|&d| !t.block(d).is_invertible())
        {
            return Err(Error::NotExact {
                position: i + 1,
                degree: d,
            });
        }
    }
    if let Some(sq) = iso.failing_square() {
        let d = s.obj(sq).support().next().unwrap_or(0);
        return Err(Error::NotExact {
            position: sq,
            degree: d,
        });
    }
    if iso.source.conjugate(&iso.components)? != *s {
        return Err(Error::Invalid("reconstruction differs from input".into()));
    }
    let (pieces, _) = drop_zero(pieces);
    Ok(Decomposition { pieces, iso })
}

fn drop_zero(pieces: Vec<Piece>) -> (Vec<Piece>, usize) {
    let before = pieces.len();
    let kept: Vec<Piece> = pieces.into_iter().filter(|p| !p.object.is_zero()).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Complete isomorphism invariant of exact sequences: pieces sorted by rotation.
pub fn isomorphism_invariant(s: &NSeq) -> Result<Vec<Piece>> {
    let mut p = decompose_exact(s)?.pieces;
    p.sort();
    Ok(p)
}

/// Direct sum of the given pieces.
pub fn assemble(field: PrimeField, n: usize, shift: i64, pieces: &[Piece]) -> Result<NSeq> {
    let seqs = pieces
        .iter()
        .map(|p| trivial_seq(field, n, shift, &p.object, p.rotation))
        .collect::<Result<Vec<_>>>()?;
    direct_sum_all(field, n, shift, &seqs)
}

/// Knobs for random generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub shift: i64,
    pub max_dim: usize,
    pub degree_lo: i64,
    pub degree_hi: i64,
    pub pieces: usize,
}

impl GenParams {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            shift: 1,
            max_dim: 3,
            degree_lo: -2,
            degree_hi: 2,
            pieces: 4,
        }
    }
}

/// Random object with degrees in the window; each used degree gets `1..=max_dim`.
pub fn random_object<R: Rng + ?Sized>(g: &GenParams, rng: &mut R) -> GradedObject {
    if g.max_dim == 0 {
        return GradedObject::zero();
    }
    let count = rng.gen_range(1..=2);
    GradedObject::from_pairs((0..count).map(|_| {
        (
            rng.gen_range(g.degree_lo..=g.degree_hi),
            rng.gen_range(1..=g.max_dim),
        )
    }))
}

/// Random object supported in even degrees of the window.
pub fn random_even_object<R: Rng + ?Sized>(g: &GenParams, rng: &mut R) -> GradedObject {
    let evens: Vec<i64> = (g.degree_lo..=g.degree_hi).filter(|d| d % 2 == 0).collect();
    if g.max_dim == 0 || evens.is_empty() {
        return GradedObject::zero();
    }
    let count = rng.gen_range(1..=2);
    GradedObject::from_pairs((0..count).map(|_| {
        (
            evens[rng.gen_range(0..evens.len())],
            rng.gen_range(1..=g.max_dim),
        )
    }))
}

pub fn random_pieces<R: Rng + ?Sized>(g: &GenParams, rng: &mut R) -> Vec<Piece> {
    (0..g.pieces)
        .map(|_| Piece {
            object: random_object(g, rng),
            rotation: rng.gen_range(0..g.n),
        })
        .collect()
}

/// Random automorphism of every object.
pub fn random_isos<R: Rng + ?Sized>(s: &NSeq, rng: &mut R) -> Vec<GradedMap> {
    s.objects()
        .iter()
        .map(|o| GradedMap::random_iso(s.field(), o, rng))
        .collect()
}

/// Exact sequence: random trivial pieces, summed, then conjugated.
pub fn random_exact_with<R: Rng + ?Sized>(
    field: PrimeField,
    g: &GenParams,
    rng: &mut R,
) -> Result<NSeq> {
    let pieces = random_pieces(g, rng);
    let sum = assemble(field, g.n, g.shift, &pieces)?;
    let isos = random_isos(&sum, rng);
    sum.conjugate(&isos)
}

pub fn random_exact(field: PrimeField, g: &GenParams, seed: u64) -> Result<NSeq> {
    random_exact_with(field, g, &mut rng_from(seed))
}

/// An exact sequence whose first map is exactly `alpha`.
pub fn complete_first_morphism(alpha: &GradedMap, n: usize, shift: i64) -> Result<NSeq> {
    let f = alpha.field();
    let b = coimage_inclusion(alpha);
    let k = alpha.kernel();
    let img = alpha.compose(&b)?;
    let q = image_complement(&img);
    let pieces = [
        trivial_seq(f, n, shift, b.source(), 0)?,
        trivial_seq(f, n, shift, k.source(), 1)?,
        trivial_seq(f, n, shift, &q.source().shift(-shift), n - 1)?,
    ];
    let sum = direct_sum_all(f, n, shift, &pieces)?;
    let mut thetas: Vec<GradedMap> = sum
        .objects()
        .iter()
        .map(|o| GradedMap::identity(f, o))
        .collect();
    thetas[0] = row(f, alpha.source(), &[&b, &k])?;
    thetas[1] = row(f, alpha.target(), &[&img, &q])?;
    let out = sum.conjugate(&thetas)?;
    debug_assert_eq!(out.map(1), alpha);
    Ok(out)
}

/// As [`complete_first_morphism`], with positions `3..=n` scrambled.
pub fn complete_first_morphism_random<R: Rng + ?Sized>(
    alpha: &GradedMap,
    n: usize,
    shift: i64,
    rng: &mut R,
) -> Result<NSeq> {
    let s = complete_first_morphism(alpha, n, shift)?;
    let mut thetas: Vec<GradedMap> = s
        .objects()
        .iter()
        .map(|o| GradedMap::identity(s.field(), o))
        .collect();
    for (i, t) in thetas.iter_mut().enumerate().skip(2) {
        *t = GradedMap::random_iso(s.field(), s.obj(i + 1), rng);
    }
    s.conjugate(&thetas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn trivial_decomposes_to_itself() {
        let a = GradedObject::from_pairs([(0, 2), (1, 1)]);
        for n in 3..6 {
            for j in 0..n {
                let t = trivial_seq(f5(), n, 1, &a, j).unwrap();
                let d = decompose_exact(&t).unwrap();
                assert_eq!(
                    d.pieces,
                    vec![Piece {
                        object: a.clone(),
                        rotation: j
                    }],
                    "n={n} j={j}"
                );
                assert!(d
                    .iso
                    .components
                    .iter()
                    .all(|c| c == &GradedMap::identity(f5(), c.source())));
            }
        }
    }

    #[test]
    fn zero_sequence_has_no_pieces() {
        assert!(decompose_exact(&NSeq::zero(f5(), 4, 1))
            .unwrap()
            .pieces
            .is_empty());
    }

    #[test]
    fn conjugated_pair_recovers_two_pieces() {
        let mut rng = rng_from(3);
        let a = GradedObject::concentrated(0, 2);
        let b = GradedObject::concentrated(1, 1);
        let pieces = vec![
            Piece {
                object: a,
                rotation: 0,
            },
            Piece {
                object: b,
                rotation: 2,
            },
        ];
        let sum = assemble(f5(), 4, 1, &pieces).unwrap();
        let s = sum.conjugate(&random_isos(&sum, &mut rng)).unwrap();
        let mut got = decompose_exact(&s).unwrap().pieces;
        got.sort();
        let mut want = pieces.clone();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn random_exact_is_exact_and_deterministic() {
        let g = GenParams::new(5);
        for seed in 0..50 {
            let s = random_exact(f5(), &g, seed).unwrap();
            assert!(s.is_exact());
            assert_eq!(s, random_exact(f5(), &g, seed).unwrap());
        }
        let zero = GenParams { pieces: 0, ..g };
        assert_eq!(
            random_exact(f5(), &zero, 1).unwrap(),
            NSeq::zero(f5(), 5, 1)
        );
    }

    #[test]
    fn first_morphism_completion() {
        let mut rng = rng_from(8);
        for n in 3..7 {
            for _ in 0..20 {
                let g = GenParams::new(n);
                let x = random_object(&g, &mut rng);
                let y = random_object(&g, &mut rng);
                let a = GradedMap::random(f5(), &x, &y, &mut rng);
                let s = complete_first_morphism_random(&a, n, 1, &mut rng).unwrap();
                assert!(s.is_exact());
                assert_eq!(s.map(1), &a);
            }
        }
    }

    #[test]
    fn identity_completion_is_trivial() {
        let x = GradedObject::from_pairs([(0, 2)]);
        let s = complete_first_morphism(&GradedMap::identity(f5(), &x), 4, 1).unwrap();
        assert_eq!(s, trivial_seq(f5(), 4, 1, &x, 0).unwrap());
    }

    #[test]
    fn zero_alpha_places_objects_at_wrap_and_position_two() {
        let x = GradedObject::concentrated(0, 1);
        let y = GradedObject::concentrated(1, 2);
        let s = complete_first_morphism(&GradedMap::zero(f5(), &x, &y), 4, 1).unwrap();
        assert_eq!(s.obj(4), &x.shift(1));
        assert_eq!(s.obj(3), &y);
        assert!(s.is_exact());
    }
}
