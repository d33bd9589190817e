//! Diagram completions: morphisms of n-angles, cones, the higher octahedron
//! and its converse.

use rand::Rng;

use crate::decompose::{coimage_inclusion, image_complement, isomorphism_invariant};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{column, grid, row, BlockMap, GradedMap, GradedObject};
use crate::linsys::{LinearSystem, Term};
use crate::rng::rng_from;
use crate::sequence::{direct_sum_all, mapping_cone, trivial_seq, NSeq, SeqMorphism};
use crate::text::{print, Document, Item};

/// Limits for the fallback searches used when a canonical solution is
/// rejected by a later check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub candidates: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            candidates: 256,
            seed: 0,
        }
    }
}

fn diagram(field: PrimeField, seqs: &[(&str, &NSeq)], maps: &[(&str, &GradedMap)]) -> String {
    let mut doc = Document::new(field);
    for (l, s) in seqs {
        doc.push(l, Item::Seq((*s).clone()));
    }
    for (l, m) in maps {
        doc.push(l, Item::Map((*m).clone()));
    }
    print(&doc)
}

fn morphism_diagram(m: &SeqMorphism) -> String {
    print(&Document::new(m.source.field()).with("morphism", Item::Morphism(m.clone())))
}

fn same_setting(s: &NSeq, t: &NSeq) -> Result<()> {
    if s.n() != t.n() || s.shift() != t.shift() || s.field() != t.field() {
        return Err(Error::shape("sequences differ in n, shift or field"));
    }
    Ok(())
}

fn completion_system(
    s: &NSeq,
    t: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
) -> Result<LinearSystem> {
    same_setting(s, t)?;
    if !phi1.has_shape(s.obj(1), t.obj(1)) || !phi2.has_shape(s.obj(2), t.obj(2)) {
        return Err(Error::shape("first components do not match the sequences"));
    }
    if t.map(1).compose(phi1)? != phi2.compose(s.map(1))? {
        return Err(Error::NotMorphism(1));
    }
    let n = s.n();
    let mut sys = LinearSystem::new(s.field());
    // Unknown k is φ_{k+3}.
    let x: Vec<usize> = (3..=n).map(|i| sys.unknown(s.obj(i), t.obj(i))).collect();
    let v = |i: usize| x[i - 3];
    sys.equation(
        vec![Term::var(v(3)).right(s.map(2))],
        &t.map(2).compose(phi2)?,
    )?;
    for i in 3..n {
        sys.homogeneous(
            vec![
                Term::var(v(i + 1)).right(s.map(i)),
                Term::var(v(i)).left(t.map(i)).negated(),
            ],
            s.obj(i),
            t.obj(i + 1),
        )?;
    }
    sys.equation(
        vec![Term::var(v(n)).left(t.map(n))],
        &s.susp(phi1).compose(s.map(n))?,
    )?;
    Ok(sys)
}

fn assemble_morphism(
    s: &NSeq,
    t: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
    rest: Vec<GradedMap>,
) -> Result<SeqMorphism> {
    let mut comps = vec![phi1.clone(), phi2.clone()];
    comps.extend(rest);
    SeqMorphism::new(s.clone(), t.clone(), comps)
}

/// Completes `(φ₁, φ₂)` to a morphism of sequences; canonical solution.
pub fn complete_to_morphism(
    s: &NSeq,
    t: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
) -> Result<SeqMorphism> {
    let sys = completion_system(s, t, phi1, phi2)?;
    let sol = sys
        .solve()?
        .ok_or_else(|| Error::NoSolution("no completion of the first square".into()))?;
    let m = assemble_morphism(s, t, phi1, phi2, sol)?;
    if let Some(i) = m.failing_square() {
        return Err(Error::verification(
            "complete_to_morphism",
            "solved components commute",
            Some(i),
            morphism_diagram(&m),
        ));
    }
    Ok(m)
}

/// A completion whose mapping cone is exact, and that cone.
pub fn cone_completion(
    s: &NSeq,
    t: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
) -> Result<(SeqMorphism, NSeq)> {
    cone_completion_with(s, t, phi1, phi2, SearchBudget::default())
}

/// As [`cone_completion`]; if the canonical completion has a non-exact cone,
/// samples the completion space up to the budget.
pub fn cone_completion_with(
    s: &NSeq,
    t: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
    budget: SearchBudget,
) -> Result<(SeqMorphism, NSeq)> {
    let m = complete_to_morphism(s, t, phi1, phi2)?;
    let cone = mapping_cone(&m)?;
    if cone.is_exact() {
        return Ok((m, cone));
    }
    let space = completion_system(s, t, phi1, phi2)?
        .solution_space()?
        .ok_or_else(|| Error::NoSolution("no completion of the first square".into()))?;
    let mut rng = rng_from(budget.seed);
    for _ in 0..budget.candidates {
        let cand = assemble_morphism(s, t, phi1, phi2, space.sample(&mut rng))?;
        let cone = mapping_cone(&cand)?;
        if cone.is_exact() {
            return Ok((cand, cone));
        }
    }
    Err(Error::verification(
        "cone_completion",
        "mapping cone is exact",
        cone.exactness_defect().map(|(p, _)| p),
        diagram(
            s.field(),
            &[("source", s), ("target", t), ("cone", &cone)],
            &[],
        ),
    ))
}

/// The sequence
/// `A₁ → A₂⊕B₁ → … → Aₙ₋₁⊕Bₙ₋₂ → Bₙ₋₁ →∂ ΣA₁` built from two chains of
/// length `n-1` joined by vertical maps `φ₁ … φₙ₋₁`.
pub fn cartesian_sequence(
    field: PrimeField,
    shift: i64,
    a_maps: &[GradedMap],
    b_maps: &[GradedMap],
    phis: &[GradedMap],
    partial: &GradedMap,
) -> Result<NSeq> {
    let n = phis.len() + 1;
    if n < 3 || a_maps.len() != n - 2 || b_maps.len() != n - 2 {
        return Err(Error::shape("chains must have n-1 objects and n-2 maps"));
    }
    let a = |k: usize| phis[k - 1].source().clone();
    let b = |k: usize| phis[k - 1].target().clone();
    let mut objects = vec![a(1)];
    for k in 2..n {
        objects.push(a(k).direct_sum(&b(k - 1)));
    }
    objects.push(b(n - 1));
    let mut maps = vec![column(field, &a(1), &[&a_maps[0].neg(), &phis[0]])?];
    for k in 2..n - 1 {
        let phi = phis[k - 1].signed(k as i64);
        maps.push(grid(
            field,
            &[a(k), b(k - 1)],
            &[a(k + 1), b(k)],
            &[
                vec![Some(&a_maps[k - 1]), None],
                vec![Some(&phi), Some(&b_maps[k - 2])],
            ],
        )?);
    }
    let phi = phis[n - 2].signed((n - 1) as i64);
    maps.push(row(field, &b(n - 1), &[&phi, &b_maps[n - 3]])?);
    maps.push(partial.clone());
    NSeq::new(field, shift, objects, maps)
}

/// The sequence `A₂ → A₃⊕B₂ → … → Bₙ →Σα₁∘βₙ ΣA₂` attached to a morphism
/// with `φ₁ = 1`.
pub fn reduced_cone(m: &SeqMorphism) -> Result<NSeq> {
    let (a, b) = (&m.source, &m.target);
    let f = a.field();
    if a.obj(1) != b.obj(1) || m.components[0] != GradedMap::identity(f, a.obj(1)) {
        return Err(Error::Invalid("reduced cone needs φ₁ = 1".into()));
    }
    m.require_morphism()?;
    let cone = mapping_cone(m)?;
    cone.require_exact()?;
    let n = a.n();
    let a_maps: Vec<GradedMap> = (2..n).map(|i| a.map(i).clone()).collect();
    let b_maps: Vec<GradedMap> = (2..n).map(|i| b.map(i).clone()).collect();
    let phis: Vec<GradedMap> = (2..=n).map(|i| m.components[i - 1].clone()).collect();
    let partial = a.susp(a.map(1)).compose(b.map(n))?;
    let r = cartesian_sequence(f, a.shift(), &a_maps, &b_maps, &phis, &partial)?;
    if let Some((p, _)) = r.exactness_defect() {
        return Err(Error::verification(
            "reduced_cone",
            "reduced cone is exact",
            Some(p),
            diagram(f, &[("reduced", &r)], &[]),
        ));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyCartesianWitness {
    pub partial: GradedMap,
    pub angle: NSeq,
}

/// Finds `∂` making the cartesian sequence exact, if one exists.
///
/// Order of attempts: the canonical (zero) solution of the composite
/// constraints, then a map sending a complement of the incoming image onto
/// the outgoing kernel, then exhaustive enumeration of the constraint
/// solutions within the budget.
pub fn homotopy_cartesian(
    field: PrimeField,
    shift: i64,
    a_maps: &[GradedMap],
    b_maps: &[GradedMap],
    phis: &[GradedMap],
    budget: usize,
) -> Result<Option<HomotopyCartesianWitness>> {
    let n = phis.len() + 1;
    if n < 3 || a_maps.len() != n - 2 || b_maps.len() != n - 2 {
        return Err(Error::shape("chains must have n-1 objects and n-2 maps"));
    }
    for k in 1..n - 1 {
        if phis[k].compose(&a_maps[k - 1])? != b_maps[k - 1].compose(&phis[k - 1])? {
            return Err(Error::NotMorphism(k));
        }
    }
    let a1 = phis[0].source().clone();
    let last = phis[n - 2].target().clone();
    let zero = GradedMap::zero(field, &last, &a1.shift(shift));
    let skeleton = cartesian_sequence(field, shift, a_maps, b_maps, phis, &zero)?;
    let g = skeleton.map(n - 1).clone();
    let first = skeleton.susp(skeleton.map(1));

    let witness = |partial: GradedMap| -> Result<Option<HomotopyCartesianWitness>> {
        let angle = cartesian_sequence(field, shift, a_maps, b_maps, phis, &partial)?;
        Ok(angle
            .is_exact()
            .then_some(HomotopyCartesianWitness { partial, angle }))
    };

    let mut sys = LinearSystem::new(field);
    let d = sys.unknown(&last, &a1.shift(shift));
    sys.homogeneous(vec![Term::var(d).right(&g)], g.source(), zero.target())?;
    sys.homogeneous(vec![Term::var(d).left(&first)], &last, first.target())?;
    let space = sys
        .solution_space()?
        .expect("homogeneous systems are consistent");
    if let Some(w) = witness(space.particular().remove(0))? {
        return Ok(Some(w));
    }

    let img = g.compose(&coimage_inclusion(&g))?;
    let q = image_complement(&img);
    let k = first.kernel();
    if q.source() == k.source() {
        let basis = row(field, &last, &[&img, &q])?;
        let inv = basis.inverse().expect("image plus complement spans");
        let lift = row(
            field,
            k.target(),
            &[&GradedMap::zero(field, img.source(), k.target()), &k],
        )?;
        if let Some(w) = witness(lift.compose(&inv)?)? {
            return Ok(Some(w));
        }
    }

    if space.cardinality() > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    for mut x in space.points() {
        if let Some(w) = witness(x.remove(0))? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Output of the higher octahedral construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctaData {
    /// `(1, φ₂, φ₃, …, φₙ)` from the first to the second row.
    pub morphism: SeqMorphism,
    /// `φ₃ … φₙ`.
    pub phis: Vec<GradedMap>,
    /// `ψ₁ … ψ_{2n-5}`.
    pub psis: Vec<GradedMap>,
    pub gamma_seq: NSeq,
}

impl OctaData {
    /// `ψ_j`, 1-based.
    pub fn psi(&self, j: usize) -> &GradedMap {
        &self.psis[j - 1]
    }

    /// `φ_i` for `3 ≤ i ≤ n`.
    pub fn phi(&self, i: usize) -> &GradedMap {
        &self.phis[i - 3]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sym {
    A(usize),
    B(usize),
    C(usize),
}

struct OctaInput<'a> {
    a: &'a NSeq,
    b: &'a NSeq,
    c: &'a NSeq,
    phis: &'a [GradedMap],
    psis: &'a [GradedMap],
}

impl OctaInput<'_> {
    fn n(&self) -> usize {
        self.a.n()
    }

    fn exists(&self, s: Sym) -> bool {
        let n = self.n();
        match s {
            Sym::A(i) => (1..=n).contains(&i),
            Sym::B(i) => (2..=n).contains(&i),
            Sym::C(i) => (3..=n).contains(&i),
        }
    }

    fn obj(&self, s: Sym) -> GradedObject {
        match s {
            Sym::A(i) => self.a.obj(i).clone(),
            Sym::B(i) => self.b.obj(i).clone(),
            Sym::C(i) => self.c.obj(i).clone(),
        }
    }

    fn phi(&self, i: usize) -> &GradedMap {
        &self.phis[i - 3]
    }

    fn psi(&self, j: usize) -> &GradedMap {
        &self.psis[j - 1]
    }

    fn summands(&self, k: usize) -> Vec<Sym> {
        if k == 1 {
            return vec![Sym::A(3)];
        }
        [Sym::A(k + 2), Sym::B(k + 1), Sym::C(k)]
            .into_iter()
            .filter(|&s| self.exists(s))
            .collect()
    }

    /// Entry of the map from position `k` to `k+1` between two summands.
    fn entry(&self, k: usize, from: Sym, to: Sym) -> Option<GradedMap> {
        use Sym::*;
        if k == 1 {
            return match to {
                A(4) => Some(self.a.map(3).clone()),
                B(3) => Some(self.phi(3).clone()),
                _ => None,
            };
        }
        let kk = k as i64;
        match (from, to) {
            (A(i), A(_)) => Some(self.a.map(i).neg()),
            (A(i), B(_)) => Some(self.phi(i).signed(kk)),
            (A(_), C(_)) => Some(self.psi(2 * k - 2).clone()),
            (B(i), B(_)) => Some(self.b.map(i).neg()),
            (B(_), C(_)) => Some(self.psi(2 * k - 3).clone()),
            (C(i), C(_)) => Some(self.c.map(i).clone()),
            _ => None,
        }
    }

    fn gamma(&self) -> Result<NSeq> {
        let n = self.n();
        let f = self.a.field();
        let objects: Vec<GradedObject> = (1..=n)
            .map(|k| {
                GradedObject::sum_all(
                    &self
                        .summands(k)
                        .iter()
                        .map(|&s| self.obj(s))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let mut maps = Vec::with_capacity(n);
        for k in 1..n {
            let src = self.summands(k);
            let tgt = self.summands(k + 1);
            let src_objs: Vec<_> = src.iter().map(|&s| self.obj(s)).collect();
            let tgt_objs: Vec<_> = tgt.iter().map(|&s| self.obj(s)).collect();
            let mut bm = BlockMap::new(f, src_objs, tgt_objs);
            for (i, &t) in tgt.iter().enumerate() {
                for (j, &s) in src.iter().enumerate() {
                    if let Some(e) = self.entry(k, s, t) {
                        bm = bm.set(i, j, &e)?;
                    }
                }
            }
            maps.push(bm.build()?);
        }
        let wrap = self.a.susp(self.a.map(2)).compose(self.c.map(n))?;
        maps.push(wrap);
        NSeq::new(f, self.a.shift(), objects, maps)
    }
}

/// Checks the input diagram of the higher octahedral construction.
fn octa_preconditions(a: &NSeq, b: &NSeq, c: &NSeq, phi2: &GradedMap) -> Result<()> {
    same_setting(a, b)?;
    same_setting(a, c)?;
    if a.obj(1) != b.obj(1) {
        return Err(Error::shape("first rows must share A₁"));
    }
    if c.obj(1) != a.obj(2) || c.obj(2) != b.obj(2) || c.map(1) != phi2 {
        return Err(Error::shape("column must start with A₂ →φ₂ B₂"));
    }
    if b.map(1) != &phi2.compose(a.map(1))? {
        return Err(Error::NotMorphism(1));
    }
    for (name, s) in [("A", a), ("B", b), ("C", c)] {
        if let Some((position, degree)) = s.exactness_defect() {
            return Err(Error::verification(
                "higher_octahedron input",
                &format!("{name} row is exact"),
                Some(position),
                format!("degree {degree}\n{}", diagram(a.field(), &[(name, s)], &[])),
            ));
        }
    }
    Ok(())
}

/// Higher octahedral construction on two rows `a`, `b` sharing `A₁` and a
/// column `c = (A₂ →φ₂ B₂ →γ₂ C₃ → … → Cₙ →γₙ ΣA₂)`.
pub fn higher_octahedron(a: &NSeq, b: &NSeq, c: &NSeq, phi2: &GradedMap) -> Result<OctaData> {
    octa_preconditions(a, b, c, phi2)?;
    let f = a.field();
    let n = a.n();
    let id1 = GradedMap::identity(f, a.obj(1));
    let (morphism, _) = cone_completion(a, b, &id1, phi2)?;
    let reduced = reduced_cone(&morphism)?;

    let id2 = GradedMap::identity(f, a.obj(2));
    let proj = row(
        f,
        b.obj(2),
        &[
            &GradedMap::zero(f, a.obj(3), b.obj(2)),
            &GradedMap::identity(f, b.obj(2)),
        ],
    )?;
    let (second, _) = cone_completion(&reduced, c, &id2, &proj)?;

    let mut psis =
        vec![GradedMap::zero(f, &GradedObject::zero(), &GradedObject::zero()); 2 * n - 5];
    for k in 3..n {
        let srcs = [a.obj(k + 1).clone(), b.obj(k).clone()];
        let comp = &second.components[k - 1];
        psis[2 * k - 5] = BlockMap::component(comp, &srcs, &[c.obj(k).clone()], 0, 0)?;
        psis[2 * k - 6] = BlockMap::component(comp, &srcs, &[c.obj(k).clone()], 0, 1)?;
    }
    psis[2 * n - 6] = second.components[n - 1].clone();
    let phis: Vec<GradedMap> = morphism.components[2..].to_vec();

    let gamma_seq = OctaInput {
        a,
        b,
        c,
        phis: &phis,
        psis: &psis,
    }
    .gamma()?;
    let out = OctaData {
        morphism,
        phis,
        psis,
        gamma_seq,
    };
    verify_octa(a, b, c, &out)?;
    Ok(out)
}

/// The two defining properties of the construction.
pub fn verify_octa(a: &NSeq, b: &NSeq, c: &NSeq, o: &OctaData) -> Result<()> {
    let f = a.field();
    let n = a.n();
    if let Some(i) = o.morphism.failing_square() {
        return Err(Error::verification(
            "higher_octahedron property 1",
            "(1, φ₂, …, φₙ) is a morphism",
            Some(i),
            morphism_diagram(&o.morphism),
        ));
    }
    if let Some((p, _)) = o.gamma_seq.exactness_defect() {
        return Err(Error::verification(
            "higher_octahedron property 2",
            "Γ is exact",
            Some(p),
            diagram(
                f,
                &[("A", a), ("B", b), ("C", c), ("gamma", &o.gamma_seq)],
                &[],
            ),
        ));
    }
    let lhs = c.map(n).compose(o.psi(2 * n - 5))?;
    let rhs = a.susp(a.map(1)).compose(b.map(n))?;
    if lhs != rhs {
        return Err(Error::verification(
            "higher_octahedron property 2",
            "γₙ∘ψ_{2n-5} = Σα₁∘βₙ",
            None,
            diagram(
                f,
                &[("A", a), ("B", b), ("C", c)],
                &[("psi_last", o.psi(2 * n - 5))],
            ),
        ));
    }
    Ok(())
}

/// The n = 3 case, with the additional commutativity checks of the
/// octahedral axiom.
pub fn tr4_octahedron(a: &NSeq, b: &NSeq, c: &NSeq, phi2: &GradedMap) -> Result<OctaData> {
    if a.n() != 3 {
        return Err(Error::Invalid("TR4 needs n = 3".into()));
    }
    let o = higher_octahedron(a, b, c, phi2)?;
    let psi1 = o.psi(1);
    let f = a.field();
    if psi1.compose(b.map(2))? != *c.map(2) {
        return Err(Error::verification(
            "tr4 theta square",
            "ψ₁∘β₂ = γ₂",
            None,
            diagram(f, &[("A", a), ("B", b), ("C", c)], &[("psi1", psi1)]),
        ));
    }
    if c.map(3).compose(psi1)? != a.susp(a.map(1)).compose(b.map(3))? {
        return Err(Error::verification(
            "tr4 theta square",
            "γ₃∘ψ₁ = Σα₁∘β₃",
            None,
            diagram(f, &[("A", a), ("B", b), ("C", c)], &[("psi1", psi1)]),
        ));
    }
    Ok(o)
}

/// Output of deriving a good completion from the octahedral construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct N4FromStar {
    pub morphism: SeqMorphism,
    pub cone: NSeq,
    pub x: NSeq,
    pub y: NSeq,
    pub z: NSeq,
    pub octa: OctaData,
}

fn sign(n: usize) -> i64 {
    n as i64
}

/// The auxiliary sequences `(X, Y, Z)` and the map `[1 −φ₂ −β₁]`.
pub fn auxiliary_sequences(
    a: &NSeq,
    b: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
) -> Result<(NSeq, NSeq, NSeq, GradedMap)> {
    let f = a.field();
    let n = a.n();
    let s = a.shift();
    let (a1, a2, b1, b2) = (a.obj(1), a.obj(2), b.obj(1), b.obj(2));
    let sa1 = a1.shift(s);
    let sb1 = b1.shift(s);
    let sa2 = a2.shift(s);
    let id = |x: &GradedObject| GradedMap::identity(f, x);
    let z0 = |x: &GradedObject, y: &GradedObject| GradedMap::zero(f, x, y);
    let nn = sign(n);

    // Y: A₁⊕B₁ → B₂⊕A₂⊕B₁ → A₃⊕B₂ → A₄ → … → Aₙ → ΣA₁⊕ΣB₁
    let y1 = grid(
        f,
        &[a1.clone(), b1.clone()],
        &[b2.clone(), a2.clone(), b1.clone()],
        &[
            vec![None, None],
            vec![Some(&a.map(1).signed(nn)), None],
            vec![None, Some(&id(b1).neg())],
        ],
    )?;
    let y2 = grid(
        f,
        &[b2.clone(), a2.clone(), b1.clone()],
        &[a.obj(3).clone(), b2.clone()],
        &[
            vec![None, Some(&a.map(2).neg()), None],
            vec![Some(&id(b2)), None, None],
        ],
    )?;
    let mut y_objs = vec![
        a1.direct_sum(b1),
        b2.direct_sum(a2).direct_sum(b1),
        a.obj(3).direct_sum(b2),
    ];
    let mut y_maps = vec![y1, y2];
    if n == 3 {
        // The A-part of the map out of A₃⊕B₂ carries both sign rules.
        let alpha = a.map(3).signed(1 + nn);
        y_maps.push(grid(
            f,
            &[a.obj(3).clone(), b2.clone()],
            &[sa1.clone(), sb1.clone()],
            &[vec![Some(&alpha), None], vec![None, None]],
        )?);
    } else {
        y_maps.push(row(f, a.obj(4), &[&a.map(3).neg(), &z0(b2, a.obj(4))])?);
        for k in 4..n {
            y_objs.push(a.obj(k).clone());
            y_maps.push(a.map(k).clone());
        }
        y_objs.push(a.obj(n).clone());
        y_maps.push(column(
            f,
            a.obj(n),
            &[&a.map(n).signed(nn), &z0(a.obj(n), &sb1)],
        )?);
    }
    let y = NSeq::new(f, s, y_objs, y_maps)?;

    // Z: A₁⊕B₁ → B₂ → B₃ → … → Bₙ₋₁ → ΣA₁⊕Bₙ → ΣA₁⊕ΣB₁
    let z1 = row(f, b2, &[&phi2.compose(a.map(1))?.signed(nn + 1), b.map(1)])?;
    let mut z_objs = vec![a1.direct_sum(b1)];
    let mut z_maps = vec![z1];
    for k in 2..n - 1 {
        z_objs.push(b.obj(k).clone());
        z_maps.push(b.map(k).signed(if k == 2 { 0 } else { 1 }));
    }
    z_objs.push(b.obj(n - 1).clone());
    let last_beta = b.map(n - 1).signed(if n - 1 == 2 { 0 } else { 1 });
    z_maps.push(column(
        f,
        b.obj(n - 1),
        &[&z0(b.obj(n - 1), &sa1), &last_beta],
    )?);
    z_objs.push(sa1.direct_sum(b.obj(n)));
    z_maps.push(grid(
        f,
        &[sa1.clone(), b.obj(n).clone()],
        &[sa1.clone(), sb1.clone()],
        &[
            vec![Some(&id(&sa1).neg()), None],
            vec![
                Some(&a.susp(phi1).signed(nn + 1)),
                Some(&b.map(n).signed(nn + 1)),
            ],
        ],
    )?);
    let z = NSeq::new(f, s, z_objs, z_maps)?;

    // X: B₂⊕A₂⊕B₁ → B₂ → 0 → … → 0 → ΣA₂⊕ΣB₁ → ΣB₂⊕ΣA₂⊕ΣB₁
    let top = row(f, b2, &[&id(b2), &phi2.neg(), &b.map(1).neg()])?;
    let last_x = sa2.direct_sum(&sb1);
    let mut x_objs = vec![b2.direct_sum(a2).direct_sum(b1), b2.clone()];
    for _ in 3..n {
        x_objs.push(GradedObject::zero());
    }
    x_objs.push(last_x.clone());
    let mut x_maps = vec![top.clone()];
    for k in 2..n {
        let target = if k + 1 == n {
            last_x.clone()
        } else {
            GradedObject::zero()
        };
        x_maps.push(z0(&x_objs[k - 1], &target));
    }
    x_maps.push(grid(
        f,
        &[sa2.clone(), sb1.clone()],
        &[b2.shift(s), sa2.clone(), sb1.clone()],
        &[
            vec![
                Some(&a.susp(phi2).signed(nn)),
                Some(&b.susp(b.map(1)).signed(nn)),
            ],
            vec![Some(&id(&sa2).signed(nn)), None],
            vec![None, Some(&id(&sb1).signed(nn))],
        ],
    )?);
    let x = NSeq::new(f, s, x_objs, x_maps)?;
    Ok((x, y, z, top))
}

fn check_same_pieces(step: &str, got: &NSeq, want: &NSeq) -> Result<()> {
    let lhs = isomorphism_invariant(got);
    let rhs = isomorphism_invariant(want)?;
    match lhs {
        Ok(l) if l == rhs => Ok(()),
        _ => Err(Error::verification(
            step,
            "sequence has the expected trivial-piece decomposition",
            None,
            diagram(got.field(), &[("got", got), ("expected", want)], &[]),
        )),
    }
}

/// Completes `(φ₁, φ₂)` to a morphism with exact cone by running the higher
/// octahedral construction on auxiliary sequences built from the input.
pub fn n4_from_n4star(
    a: &NSeq,
    b: &NSeq,
    phi1: &GradedMap,
    phi2: &GradedMap,
) -> Result<N4FromStar> {
    same_setting(a, b)?;
    if b.map(1).compose(phi1)? != phi2.compose(a.map(1))? {
        return Err(Error::NotMorphism(1));
    }
    let f = a.field();
    let n = a.n();
    let s = a.shift();
    let (x, y, z, top) = auxiliary_sequences(a, b, phi1, phi2)?;

    let triv = |o: &GradedObject, j: usize| trivial_seq(f, n, s, o, j);
    check_same_pieces(
        "auxiliary sequence Y",
        &y,
        &direct_sum_all(
            f,
            n,
            s,
            &[
                a.clone(),
                triv(b.obj(1), 0)?,
                triv(b.obj(2), 0)?.rotate_right(),
            ],
        )?,
    )?;
    check_same_pieces(
        "auxiliary sequence X",
        &x,
        &direct_sum_all(
            f,
            n,
            s,
            &[
                triv(b.obj(2), 0)?,
                triv(a.obj(2), 0)?.rotate_left(),
                triv(b.obj(1), 0)?.rotate_left(),
            ],
        )?,
    )?;
    check_same_pieces(
        "auxiliary sequence Z",
        &z,
        &direct_sum_all(f, n, s, &[b.clone(), triv(a.obj(1), 0)?.rotate_left()])?,
    )?;

    let octa = higher_octahedron(&y, &z, &x, &top)?;

    // Read φ₃ … φₙ off the components σᵢ.
    let nn = sign(n);
    let sigma = |i: usize| &octa.morphism.components[i - 1];
    let fail = |identity: &str| {
        Error::verification(
            "extract components",
            identity,
            None,
            morphism_diagram(&octa.morphism),
        )
    };
    let mut phis = vec![phi1.clone(), phi2.clone()];
    let sa1 = a.obj(1).shift(s);
    if n == 3 {
        let srcs = [a.obj(3).clone(), b.obj(2).clone()];
        let tgts = [sa1.clone(), b.obj(3).clone()];
        let c = |i, j| BlockMap::component(sigma(3), &srcs, &tgts, i, j);
        if c(0, 0)? != a.map(3).neg() || !c(0, 1)?.is_zero() || c(1, 1)? != *b.map(2) {
            return Err(fail("σ₃ = [[−α₃, 0], [φ₃, β₂]]"));
        }
        phis.push(c(1, 0)?);
    } else {
        let srcs = [a.obj(3).clone(), b.obj(2).clone()];
        let tgt = [b.obj(3).clone()];
        if BlockMap::component(sigma(3), &srcs, &tgt, 0, 1)? != *b.map(2) {
            return Err(fail("σ₃ = [φ₃, β₂]"));
        }
        phis.push(BlockMap::component(sigma(3), &srcs, &tgt, 0, 0)?);
        for i in 4..n {
            phis.push(sigma(i).signed(i as i64));
        }
        let tgts = [sa1.clone(), b.obj(n).clone()];
        let src = [a.obj(n).clone()];
        if BlockMap::component(sigma(n), &src, &tgts, 0, 0)? != a.map(n).signed(nn + 1) {
            return Err(fail("σₙ = [(−1)ⁿ⁺¹αₙ; (−1)ⁿφₙ]"));
        }
        phis.push(BlockMap::component(sigma(n), &src, &tgts, 1, 0)?.signed(nn));
    }
    let morphism = SeqMorphism::new(a.clone(), b.clone(), phis)?;
    if let Some(i) = morphism.failing_square() {
        return Err(Error::verification(
            "extract components",
            "φ is a morphism",
            Some(i),
            morphism_diagram(&morphism),
        ));
    }

    let psi = octa.psi(2 * n - 5);
    let expected = grid(
        f,
        &[sa1.clone(), b.obj(n).clone()],
        &[a.obj(2).shift(s), b.obj(1).shift(s)],
        &[
            vec![Some(&a.susp(a.map(1)).neg()), None],
            vec![Some(&a.susp(phi1)), Some(b.map(n))],
        ],
    )?;
    if *psi != expected {
        return Err(Error::verification(
            "last connecting map",
            "ψ_{2n-5} = [[−Σα₁, 0], [Σφ₁, βₙ]]",
            None,
            diagram(f, &[], &[("psi", psi), ("expected", &expected)]),
        ));
    }

    let cone = octa.gamma_seq.rotate_right();
    let direct = mapping_cone(&morphism)?;
    if cone != direct {
        return Err(Error::verification(
            "right rotation",
            "right rotation of Γ equals the mapping cone of φ",
            None,
            diagram(f, &[("rotated", &cone), ("mapping_cone", &direct)], &[]),
        ));
    }
    if let Some((p, _)) = cone.exactness_defect() {
        return Err(Error::verification(
            "right rotation",
            "mapping cone is exact",
            Some(p),
            diagram(f, &[("cone", &cone)], &[]),
        ));
    }
    Ok(N4FromStar {
        morphism,
        cone,
        x,
        y,
        z,
        octa,
    })
}

// ------------------------------------------------------------- generators

/// A random first square `β₁∘φ₁ = φ₂∘α₁` between two exact sequences.
pub fn random_first_square<R: Rng + ?Sized>(
    s: &NSeq,
    t: &NSeq,
    rng: &mut R,
) -> Result<(GradedMap, GradedMap)> {
    let mut sys = LinearSystem::new(s.field());
    let p1 = sys.unknown(s.obj(1), t.obj(1));
    let p2 = sys.unknown(s.obj(2), t.obj(2));
    sys.homogeneous(
        vec![
            Term::var(p1).left(t.map(1)),
            Term::var(p2).right(s.map(1)).negated(),
        ],
        s.obj(1),
        t.obj(2),
    )?;
    let mut x = sys.solution_space()?.expect("homogeneous").sample(rng);
    let p2v = x.pop().expect("two unknowns");
    let p1v = x.pop().expect("two unknowns");
    Ok((p1v, p2v))
}

/// Input data for the higher octahedral construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctaSetup {
    pub a: NSeq,
    pub b: NSeq,
    pub c: NSeq,
    pub phi2: GradedMap,
}

/// Random octahedral input: an exact row, a random `φ₂`, and exact
/// completions of `φ₂∘α₁` and of `φ₂`.
pub fn random_octa_setup<R: Rng + ?Sized>(
    field: PrimeField,
    g: &crate::decompose::GenParams,
    rng: &mut R,
) -> Result<OctaSetup> {
    use crate::decompose::{complete_first_morphism_random, random_exact_with, random_object};
    let a = random_exact_with(field, g, rng)?;
    let b2 = random_object(g, rng);
    let phi2 = GradedMap::random(field, a.obj(2), &b2, rng);
    let beta1 = phi2.compose(a.map(1))?;
    let b = complete_first_morphism_random(&beta1, g.n, g.shift, rng)?;
    let c = complete_first_morphism_random(&phi2, g.n, g.shift, rng)?;
    Ok(OctaSetup { a, b, c, phi2 })
}
