//! The n = 4 angulation on even-degree objects, built by splicing
//! triangles of the ambient graded model, and the step-by-step
//! verification of the higher octahedral axiom there.

use rand::Rng;

use crate::decompose::{isomorphism_invariant, random_even_object, GenParams};
use crate::engine::{
    cone_completion_with, higher_octahedron, reduced_cone, verify_octa, OctaData, SearchBudget,
};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{column, grid, row, BlockMap, GradedMap, GradedObject};
use crate::linsys::{AffineSpace, LinearSystem, Term};
use crate::matrix::Matrix;
use crate::rng::rng_from;
use crate::sequence::{NSeq, SeqMorphism};
use crate::text::{print_seqs, Bundle};

/// Shift of the spliced 4-angles.
pub const HAT_SHIFT: i64 = 2;

/// An exact 3-Σ-sequence `X₁ →f X₂ →g X₃ →h ΣX₁` of the ambient model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    seq: NSeq,
}

impl Triangle {
    /// Builds and checks exactness.
    pub fn new(f: &GradedMap, g: &GradedMap, h: &GradedMap) -> Result<Self> {
        let seq = NSeq::new(
            f.field(),
            1,
            vec![f.source().clone(), g.source().clone(), h.source().clone()],
            vec![f.clone(), g.clone(), h.clone()],
        )?;
        Self::from_seq(seq)
    }

    pub fn from_seq(seq: NSeq) -> Result<Self> {
        if seq.n() != 3 || seq.shift() != 1 {
            return Err(Error::shape("a triangle is a 3-sequence with shift 1"));
        }
        if let Some((position, degree)) = seq.exactness_defect() {
            return Err(Error::NotExact { position, degree });
        }
        Ok(Self { seq })
    }

    pub fn seq(&self) -> &NSeq {
        &self.seq
    }

    pub fn f(&self) -> &GradedMap {
        self.seq.map(1)
    }

    pub fn g(&self) -> &GradedMap {
        self.seq.map(2)
    }

    pub fn h(&self) -> &GradedMap {
        self.seq.map(3)
    }

    pub fn obj(&self, i: usize) -> &GradedObject {
        self.seq.obj(i)
    }
}

/// Cone of `f` as `coker f ⊕ Σ ker f`.
pub fn cone_t(f: &GradedMap) -> Triangle {
    let field = f.field();
    let p = f.cokernel();
    let k = f.kernel();
    let sk = k.shift(1);
    let z = p.target().direct_sum(sk.source());
    let g = column(
        field,
        f.target(),
        &[&p, &GradedMap::zero(field, f.target(), sk.source())],
    )
    .expect("shapes agree");
    let h = row(
        field,
        sk.target(),
        &[&GradedMap::zero(field, p.target(), sk.target()), &sk],
    )
    .expect("shapes agree");
    debug_assert_eq!(g.target(), &z);
    Triangle::new(f, &g, &h).expect("cone of a map is exact")
}

/// True iff `x` lives in even degrees.
pub fn in_c(x: &GradedObject) -> bool {
    x.support().all(|d| d % 2 == 0)
}

const INNER_TRIES: usize = 8;

/// Looks for `(x, y)` with `x` from `first` and `y` from the space returned
/// by `second(x)`, accepted by `accept`. Canonical points come first.
fn search_pair(
    budget: SearchBudget,
    first: &AffineSpace,
    second: impl Fn(&GradedMap) -> Result<Option<AffineSpace>>,
    accept: impl Fn(&GradedMap, &GradedMap) -> Result<bool>,
) -> Result<Option<(GradedMap, GradedMap)>> {
    let mut rng = rng_from(budget.seed);
    let mut tries = 0;
    for i in 0..budget.candidates.max(1) {
        let x = if i == 0 {
            first.particular()
        } else {
            first.sample(&mut rng)
        }
        .remove(0);
        if let Some(space) = second(&x)? {
            for j in 0..INNER_TRIES {
                let y = if j == 0 {
                    space.particular()
                } else {
                    space.sample(&mut rng)
                }
                .remove(0);
                if accept(&x, &y)? {
                    return Ok(Some((x, y)));
                }
                tries += 1;
                if space.dimension() == 0 || tries >= budget.candidates {
                    break;
                }
            }
        } else {
            tries += 1;
        }
        if first.dimension() == 0 || tries >= budget.candidates {
            break;
        }
    }
    Ok(None)
}

/// Octahedron on `f`, `g` from given triangles on `f`, `g` and `g∘f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Octahedron {
    pub on_f: Triangle,
    pub on_g: Triangle,
    pub on_gf: Triangle,
    /// `cone(f) → cone(g∘f)`.
    pub s: GradedMap,
    /// `cone(g∘f) → cone(g)`.
    pub t: GradedMap,
    pub third: Triangle,
}

/// Octahedron with every cone taken from [`cone_t`].
pub fn octahedron_t(f: &GradedMap, g: &GradedMap, budget: SearchBudget) -> Result<Octahedron> {
    octahedron_with(&cone_t(f), &cone_t(g), &cone_t(&g.compose(f)?), budget)
}

/// Solves for the connecting maps of the octahedron on the given triangles.
pub fn octahedron_with(
    on_f: &Triangle,
    on_g: &Triangle,
    on_gf: &Triangle,
    budget: SearchBudget,
) -> Result<Octahedron> {
    let (f, f2, f3) = (on_f.f(), on_f.g(), on_f.h());
    let (g, g2, g3) = (on_g.f(), on_g.g(), on_g.h());
    let (h2, h3) = (on_gf.g(), on_gf.h());
    if on_gf.f() != &g.compose(f)? {
        return Err(Error::Invalid("third triangle must start with g∘f".into()));
    }
    let field = f.field();
    let (cf, cg, cgf) = (on_f.obj(3), on_g.obj(3), on_gf.obj(3));

    let mut sys = LinearSystem::new(field);
    let s = sys.unknown(cf, cgf);
    sys.equation(vec![Term::var(s).right(f2)], &h2.compose(g)?)?;
    sys.equation(vec![Term::var(s).left(h3)], f3)?;
    let s_space = sys.solution_space()?.ok_or_else(|| {
        Error::NoSolution("octahedron: no map between the first two cones".into())
    })?;

    let sf = f.shift(1);
    let t_space = |s: &GradedMap| -> Result<Option<AffineSpace>> {
        let mut sys = LinearSystem::new(field);
        let t = sys.unknown(cgf, cg);
        sys.equation(vec![Term::var(t).right(h2)], g2)?;
        sys.equation(vec![Term::var(t).left(g3)], &sf.compose(h3)?)?;
        sys.homogeneous(vec![Term::var(t).right(s)], cf, cg)?;
        sys.solution_space()
    };
    let wrap = f2.shift(1).compose(g3)?;
    let accept =
        |s: &GradedMap, t: &GradedMap| -> Result<bool> { Ok(Triangle::new(s, t, &wrap).is_ok()) };
    let (s, t) = search_pair(budget, &s_space, t_space, accept)?.ok_or_else(|| {
        Error::verification(
            "octahedron",
            "third column is a triangle",
            None,
            print_seqs(
                field,
                &[
                    ("on_f", on_f.seq()),
                    ("on_g", on_g.seq()),
                    ("on_gf", on_gf.seq()),
                ],
            ),
        )
    })?;
    let third = Triangle::new(&s, &t, &wrap)?;
    Ok(Octahedron {
        on_f: on_f.clone(),
        on_g: on_g.clone(),
        on_gf: on_gf.clone(),
        s,
        t,
        third,
    })
}

/// The completed 4×4 grid of the 3×3 lemma.
///
/// Given row `P →a Q →b R →c ΣP` and column `Σ⁻¹T →d Q →e Q' →k T`, the
/// grid adds the row `P →e∘a Q' →mid W →w4 ΣP` and the column
/// `Σ⁻¹T →b∘d R →w3 W →w5 T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridData {
    pub row: Triangle,
    pub column: Triangle,
    pub w: GradedObject,
    pub mid: GradedMap,
    pub w3: GradedMap,
    pub w4: GradedMap,
    pub w5: GradedMap,
    pub third_row: Triangle,
    pub third_column: Triangle,
}

pub fn three_by_three(
    row_t: &Triangle,
    col_t: &Triangle,
    budget: SearchBudget,
) -> Result<GridData> {
    let (a, b, c) = (row_t.f(), row_t.g(), row_t.h());
    let (d, e, k) = (col_t.f(), col_t.g(), col_t.h());
    if row_t.obj(2) != col_t.obj(2) {
        return Err(Error::shape("row and column must cross at Q"));
    }
    let field = a.field();
    let third_row = cone_t(&e.compose(a)?);
    let (mid, w4) = (third_row.g().clone(), third_row.h().clone());
    let w = third_row.obj(3).clone();
    let r = row_t.obj(3);
    let t = k.target();

    let mut sys = LinearSystem::new(field);
    let w3 = sys.unknown(r, &w);
    sys.equation(vec![Term::var(w3).right(b)], &mid.compose(e)?)?;
    sys.equation(vec![Term::var(w3).left(&w4)], c)?;
    let w3_space = sys
        .solution_space()?
        .ok_or_else(|| Error::NoSolution("3×3: no map into the new cone".into()))?;
    let w5_space = |w3: &GradedMap| -> Result<Option<AffineSpace>> {
        let mut sys = LinearSystem::new(field);
        let w5 = sys.unknown(&w, t);
        sys.equation(vec![Term::var(w5).right(&mid)], k)?;
        sys.homogeneous(vec![Term::var(w5).right(w3)], r, t)?;
        sys.solution_space()
    };
    let bd = b.compose(d)?;
    let accept =
        |w3: &GradedMap, w5: &GradedMap| -> Result<bool> { Ok(Triangle::new(&bd, w3, w5).is_ok()) };
    let (w3, w5) = search_pair(budget, &w3_space, w5_space, accept)?.ok_or_else(|| {
        Error::verification(
            "3×3 lemma",
            "third column is a triangle",
            None,
            print_seqs(field, &[("row", row_t.seq()), ("column", col_t.seq())]),
        )
    })?;
    let third_column = Triangle::new(&bd, &w3, &w5)?;
    Ok(GridData {
        row: row_t.clone(),
        column: col_t.clone(),
        w,
        mid,
        w3,
        w4,
        w5,
        third_row,
        third_column,
    })
}

/// A 4-angle on even objects spliced from two triangles
/// `A₁ →α₁ A₂ →f X →∂₂ ΣA₁` and `X →g A₃ →α₃ A₄ →∂₁ ΣX`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splice4 {
    pub angle: NSeq,
    pub x: GradedObject,
    pub f: GradedMap,
    pub g: GradedMap,
    pub d1: GradedMap,
    pub d2: GradedMap,
}

impl Splice4 {
    pub fn delta1(&self) -> Triangle {
        Triangle::new(&self.g, self.angle.map(3), &self.d1).expect("checked on construction")
    }

    pub fn delta2(&self) -> Triangle {
        Triangle::new(self.angle.map(1), &self.f, &self.d2).expect("checked on construction")
    }

    pub fn to_bundle(&self) -> Bundle {
        Bundle::new("splice4")
            .seq("delta2", self.delta2().seq())
            .seq("delta1", self.delta1().seq())
    }

    pub fn from_bundle(b: &Bundle) -> Result<Self> {
        if b.kind != "splice4" {
            return Err(Error::Invalid(format!(
                "expected a splice4 bundle, found {}",
                b.kind
            )));
        }
        let d2 = Triangle::from_seq(b.get_seq("delta2")?.clone())?;
        let d1 = Triangle::from_seq(b.get_seq("delta1")?.clone())?;
        splice_4angle(&d1, &d2)
    }
}

/// Splices `d2 = (A₁ → A₂ → X → ΣA₁)` and `d1 = (X → A₃ → A₄ → ΣX)`.
pub fn splice_4angle(d1: &Triangle, d2: &Triangle) -> Result<Splice4> {
    if d2.obj(3) != d1.obj(1) {
        return Err(Error::shape(
            "the middle objects of the two triangles differ",
        ));
    }
    let ends = [d2.obj(1), d2.obj(2), d1.obj(2), d1.obj(3)];
    if let Some(i) = ends.iter().position(|x| !in_c(x)) {
        return Err(Error::Invalid(format!("A{} is not even", i + 1)));
    }
    let field = d1.f().field();
    let alpha4 = d2.h().shift(1).compose(d1.h())?;
    let angle = NSeq::new(
        field,
        HAT_SHIFT,
        ends.iter().map(|x| (*x).clone()).collect(),
        vec![
            d2.f().clone(),
            d1.f().compose(d2.g())?,
            d1.g().clone(),
            alpha4,
        ],
    )?;
    Ok(Splice4 {
        angle,
        x: d1.obj(1).clone(),
        f: d2.g().clone(),
        g: d1.f().clone(),
        d1: d1.h().clone(),
        d2: d2.h().clone(),
    })
}

/// Injection `x → y` onto the leading coordinates of each degree.
fn leading_inclusion(field: PrimeField, x: &GradedObject, y: &GradedObject) -> Result<GradedMap> {
    let mut blocks = std::collections::BTreeMap::new();
    for d in x.common_support(y) {
        let mut m = Matrix::zeros(field, y.dim(d), x.dim(d));
        for i in 0..x.dim(d) {
            m.set(i, i, 1);
        }
        blocks.insert(d, m);
    }
    GradedMap::from_blocks(field, x, y, blocks)
}

fn even_part(x: &GradedObject) -> GradedObject {
    GradedObject::from_pairs(x.iter().filter(|(d, _)| d % 2 == 0))
}

/// A random splice whose first map is `alpha1` (between even objects).
pub fn random_splice_from<R: Rng + ?Sized>(
    alpha1: &GradedMap,
    g: &GenParams,
    rng: &mut R,
) -> Result<Splice4> {
    let field = alpha1.field();
    let base = cone_t(alpha1);
    let theta = GradedMap::random_iso(field, base.obj(3), rng);
    let inv = theta.inverse().expect("automorphism");
    let d2 = Triangle::new(alpha1, &theta.compose(base.g())?, &base.h().compose(&inv)?)?;

    let x = d2.obj(3).clone();
    let xe = even_part(&x);
    let a3 = xe.direct_sum(&random_even_object(
        &GenParams {
            max_dim: g.max_dim.min(2),
            ..*g
        },
        rng,
    ));
    let inc = leading_inclusion(field, &xe, &a3)?;
    let to_even = leading_inclusion(field, &xe, &x)?.transpose();
    let gmap = GradedMap::random_iso(field, &a3, rng).compose(&inc.compose(&to_even)?)?;
    let base1 = cone_t(&gmap);
    let eta = GradedMap::random_iso(field, base1.obj(3), rng);
    let eta_inv = eta.inverse().expect("automorphism");
    let d1 = Triangle::new(
        &gmap,
        &eta.compose(base1.g())?,
        &base1.h().compose(&eta_inv)?,
    )?;
    splice_4angle(&d1, &d2)
}

pub fn random_splice<R: Rng + ?Sized>(
    field: PrimeField,
    g: &GenParams,
    rng: &mut R,
) -> Result<Splice4> {
    let a1 = random_even_object(g, rng);
    let a2 = random_even_object(g, rng);
    random_splice_from(&GradedMap::random(field, &a1, &a2, rng), g, rng)
}

/// Input of the step-by-step construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpliceTriple {
    pub a: Splice4,
    pub b: Splice4,
    pub c: Splice4,
    pub phi2: GradedMap,
}

pub fn random_splice_triple<R: Rng + ?Sized>(
    field: PrimeField,
    g: &GenParams,
    rng: &mut R,
) -> Result<SpliceTriple> {
    let a = random_splice(field, g, rng)?;
    let b2 = random_even_object(g, rng);
    let phi2 = GradedMap::random(field, a.angle.obj(2), &b2, rng);
    let b = random_splice_from(&phi2.compose(a.angle.map(1))?, g, rng)?;
    let c = random_splice_from(&phi2, g, rng)?;
    Ok(SpliceTriple { a, b, c, phi2 })
}

/// Everything produced along the six steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepsData {
    pub octa: OctaData,
    /// `X → Y` from the first step.
    pub phi: GradedMap,
    pub grid_w: GridData,
    pub octa_w: Octahedron,
    /// `W → Z` from the fourth step.
    pub psi: GradedMap,
    pub grid_u: GridData,
    pub octa_u: Octahedron,
}

fn step_failure(step: &str, identity: &str, seqs: &[(&str, &NSeq)]) -> Error {
    let field = seqs[0].1.field();
    Error::verification(step, identity, None, print_seqs(field, seqs))
}

fn require(cond: bool, step: &str, identity: &str, seqs: &[(&str, &NSeq)]) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(step_failure(step, identity, seqs))
    }
}

/// Runs the six steps on three spliced 4-angles sharing the data of the
/// higher octahedral axiom.
pub fn n4star_steps(
    a: &Splice4,
    b: &Splice4,
    c: &Splice4,
    phi2: &GradedMap,
    budget: SearchBudget,
) -> Result<StepsData> {
    let field = phi2.field();
    let (sa, sb, sc) = (&a.angle, &b.angle, &c.angle);
    let all: [(&str, &NSeq); 3] = [("A", sa), ("B", sb), ("C", sc)];
    let input_ok = sa.obj(1) == sb.obj(1)
        && sc.obj(1) == sa.obj(2)
        && sc.obj(2) == sb.obj(2)
        && sc.map(1) == phi2
        && sb.map(1) == &phi2.compose(sa.map(1))?;
    require(
        input_ok,
        "input",
        "β₁ = φ₂∘α₁ and the column starts with φ₂",
        &all,
    )?;
    let (a1, a2, a3, a4) = (sa.obj(1), sa.obj(2), sa.obj(3), sa.obj(4));
    let (b2, b3, b4) = (sb.obj(2), sb.obj(3), sb.obj(4));
    let c3 = sc.obj(3);
    let (alpha1, alpha2, alpha3, alpha4) = (sa.map(1), sa.map(2), sa.map(3), sa.map(4));
    let (beta2, beta3, beta4) = (sb.map(2), sb.map(3), sb.map(4));
    let (gamma3, gamma4) = (sc.map(3), sc.map(4));
    let id = |x: &GradedObject| GradedMap::identity(field, x);
    let zero = |x: &GradedObject, y: &GradedObject| GradedMap::zero(field, x, y);

    // Step 1: φ : X → Y with exact cone.
    let (m1, _) = cone_completion_with(a.delta2().seq(), b.delta2().seq(), &id(a1), phi2, budget)?;
    let phi = m1.components[2].clone();
    let row2 = Triangle::from_seq(reduced_cone(&m1)?)
        .map_err(|_| step_failure("Step 1", "direct summand of the cone is a triangle", &all))?;

    // Step 2: the grid through W, then w₆ and w₇.
    let x_b2 = [a.x.clone(), b2.clone()];
    let a3_b2 = [a3.clone(), b2.clone()];
    let col2 = Triangle::new(
        &column(
            field,
            &a4.shift(-1),
            &[&a.d1.shift(-1).neg(), &zero(&a4.shift(-1), b2)],
        )?,
        &grid(
            field,
            &x_b2,
            &a3_b2,
            &[vec![Some(&a.g), None], vec![None, Some(&id(b2))]],
        )?,
        &row(field, a4, &[alpha3, &zero(b2, a4)])?,
    )
    .map_err(|_| step_failure("Step 2", "rotated Δ₁ plus trivial B₂ is a triangle", &all))?;
    let grid_w = three_by_three(&row2, &col2, budget)?;
    let w1 = BlockMap::component(&grid_w.mid, &a3_b2, std::slice::from_ref(&grid_w.w), 0, 0)?;
    let (w3, w5) = (&grid_w.w3, &grid_w.w5);

    let u = grid_w.third_column.f().clone();
    let gp_u = b.g.compose(&u)?;
    require(gp_u.is_zero(), "Step 2", "g′∘(−φ∘Σ⁻¹∂₁) = 0", &all)?;
    let a4_b3 = [a4.clone(), b3.clone()];
    let trivial_w = Triangle::new(
        &gp_u,
        &column(field, b3, &[&zero(b3, a4), &id(b3)])?,
        &row(field, a4, &[&id(a4), &zero(b3, a4)])?,
    )?;
    let octa_w = octahedron_with(&grid_w.third_column, &b.delta1(), &trivial_w, budget)?;
    let w6 = BlockMap::component(&octa_w.s, std::slice::from_ref(&grid_w.w), &a4_b3, 1, 0)?;
    let w7 = BlockMap::component(&octa_w.t, &a4_b3, std::slice::from_ref(b4), 0, 0)?;
    require(
        BlockMap::component(&octa_w.s, std::slice::from_ref(&grid_w.w), &a4_b3, 0, 0)? == *w5
            && BlockMap::component(&octa_w.t, &a4_b3, std::slice::from_ref(b4), 0, 1)? == *beta3,
        "Step 2",
        "connecting maps are [w₅; w₆] and [w₇ β₃]",
        &all,
    )?;
    require(
        b.d1.compose(&w7)? == phi.shift(1).compose(&a.d1)?.neg(),
        "Step 2",
        "∂′₁∘w₇ = −Σφ∘∂₁",
        &all,
    )?;

    // Step 3.
    let phi3 = w6.compose(&w1)?;
    let phi4 = w7.neg();
    require(
        phi3.compose(alpha2)? == beta2.compose(phi2)?,
        "Step 3",
        "φ₃∘α₂ = β₂∘φ₂",
        &all,
    )?;
    require(
        phi4.compose(alpha3)? == beta3.compose(&phi3)?,
        "Step 3",
        "φ₄∘α₃ = β₃∘φ₃",
        &all,
    )?;
    require(
        *alpha4 == beta4.compose(&phi4)?,
        "Step 3",
        "α₄ = β₄∘φ₄",
        &all,
    )?;
    let morphism = SeqMorphism::new(
        sa.clone(),
        sb.clone(),
        vec![id(a1), phi2.clone(), phi3.clone(), phi4.clone()],
    )?;

    // Step 4: ψ : W → Z with exact cone.
    let proj = row(field, b2, &[&zero(a3, b2), &id(b2)])?;
    let (m4, _) = cone_completion_with(
        grid_w.third_row.seq(),
        c.delta2().seq(),
        &id(a2),
        &proj,
        budget,
    )?;
    let psi = m4.components[2].clone();
    let sigma_a2_d2 = alpha2.shift(1).compose(&c.d2)?;
    Triangle::new(&w1.neg(), &psi, &sigma_a2_d2.neg())
        .map_err(|_| step_failure("Step 4", "A₃ → W → Z → ΣA₃ is a triangle", &all))?;

    // Step 5: the grid through U, then u₆ and u₇.
    let row_u = Triangle::new(&w1, &psi, &sigma_a2_d2)
        .map_err(|_| step_failure("Step 5", "second row is a triangle", &all))?;
    let col_u = Triangle::new(
        &w3.compose(&b.d1.shift(-1))?,
        &octa_w.s,
        &row(field, b4, &[&phi4, &beta3.neg()])?,
    )
    .map_err(|_| step_failure("Step 5", "second column is a triangle", &all))?;
    let grid_u = three_by_three(&row_u, &col_u, budget)?;
    let first_u = column(field, a3, &[alpha3, &phi3])?;
    require(
        grid_u.third_row.f() == &first_u,
        "Step 5",
        "third row starts with [α₃; φ₃]",
        &all,
    )?;
    let u_obj = [grid_u.w.clone()];
    let u1 = BlockMap::component(&grid_u.mid, &a4_b3, &u_obj, 0, 0)?;
    let u2 = BlockMap::component(&grid_u.mid, &a4_b3, &u_obj, 0, 1)?;

    let v = grid_u.third_column.f().clone();
    let gv = c.g.compose(&v)?;
    require(gv.is_zero(), "Step 5", "g″∘ψ∘w₃∘Σ⁻¹∂′₁ = 0", &all)?;
    let b4_c3 = [b4.clone(), c3.clone()];
    let trivial_u = Triangle::new(
        &gv,
        &column(field, c3, &[&zero(c3, b4), &id(c3)])?,
        &row(field, b4, &[&id(b4), &zero(c3, b4)])?,
    )?;
    let octa_u = octahedron_with(&grid_u.third_column, &c.delta1(), &trivial_u, budget)?;
    let u6 = BlockMap::component(&octa_u.s, &u_obj, &b4_c3, 1, 0)?;
    let u7 = BlockMap::component(&octa_u.t, &b4_c3, &[sc.obj(4).clone()], 0, 0)?;
    require(
        c.d1.compose(&u7)? == psi.shift(1).compose(&w3.shift(1))?.compose(&b.d1)?,
        "Step 5",
        "∂″₁∘u₇ = Σψ∘Σw₃∘∂′₁",
        &all,
    )?;

    // Step 6.
    let psi1 = u6.compose(&u2)?;
    let psi2 = u6.compose(&u1)?;
    let psi3 = u7;
    let middle = grid(
        field,
        &a4_b3,
        &b4_c3,
        &[
            vec![Some(&phi4), Some(&beta3.neg())],
            vec![Some(&psi2), Some(&psi1)],
        ],
    )?;
    require(
        octa_u.s.compose(&grid_u.mid)? == middle,
        "Step 6",
        "the triangle Λ commutes",
        &all,
    )?;
    let sigma_hat_a2_g4 = alpha2.shift(HAT_SHIFT).compose(gamma4)?;
    require(
        grid_u
            .w4
            .shift(1)
            .compose(&grid_u.w3.shift(1))?
            .compose(&c.d1)?
            == sigma_hat_a2_g4,
        "Step 6",
        "Σu₄∘Σu₃∘∂″₁ = Σ̂α₂∘γ₄",
        &all,
    )?;
    let last = row(field, sc.obj(4), &[&psi3, gamma3])?;
    let gamma_seq = NSeq::new(
        field,
        HAT_SHIFT,
        vec![
            a3.clone(),
            a4.direct_sum(b3),
            b4.direct_sum(c3),
            sc.obj(4).clone(),
        ],
        vec![first_u, middle, last, sigma_hat_a2_g4],
    )?;
    require(
        gamma_seq.is_exact(),
        "Step 6",
        "Γ is a 4-angle",
        &[("gamma", &gamma_seq)],
    )?;
    require(
        gamma4.compose(&psi3)? == alpha1.shift(HAT_SHIFT).compose(beta4)?,
        "Step 6",
        "γ₄∘ψ₃ = Σ̂α₁∘β₄",
        &all,
    )?;

    let octa = OctaData {
        morphism,
        phis: vec![phi3, phi4],
        psis: vec![psi1, psi2, psi3],
        gamma_seq,
    };
    verify_octa(sa, sb, sc, &octa)?;
    Ok(StepsData {
        octa,
        phi,
        grid_w,
        octa_w,
        psi,
        grid_u,
        octa_u,
    })
}

/// Compares the step-by-step output with the general construction run on
/// the same 4-angles: both Γ must be exact with equal decompositions.
pub fn cross_check(t: &SpliceTriple, steps: &StepsData) -> Result<bool> {
    let general = higher_octahedron(&t.a.angle, &t.b.angle, &t.c.angle, &t.phi2)?;
    Ok(isomorphism_invariant(&general.gamma_seq)? == isomorphism_invariant(&steps.octa.gamma_seq)?)
}
