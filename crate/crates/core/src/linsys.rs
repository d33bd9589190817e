//! Linear systems whose unknowns are graded maps.
//!
//! Every equation has the form `Σ c·L∘X∘R = rhs`. Since all maps preserve
//! degree, the system splits into independent blocks, one per degree.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded::{GradedMap, GradedObject};
use crate::matrix::Matrix;

/// One summand `c · left ∘ X_var ∘ right`. Missing sides are identities.
#[derive(Clone, Debug)]
pub struct Term {
    var: usize,
    coef: i64,
    left: Option<GradedMap>,
    right: Option<GradedMap>,
}

impl Term {
    pub fn var(var: usize) -> Self {
        Self {
            var,
            coef: 1,
            left: None,
            right: None,
        }
    }

    pub fn left(mut self, l: &GradedMap) -> Self {
        self.left = Some(l.clone());
        self
    }

    pub fn right(mut self, r: &GradedMap) -> Self {
        self.right = Some(r.clone());
        self
    }

    pub fn coef(mut self, c: i64) -> Self {
        self.coef *= c;
        self
    }

    pub fn negated(self) -> Self {
        self.coef(-1)
    }
}

#[derive(Clone, Debug)]
struct Equation {
    source: GradedObject,
    target: GradedObject,
    terms: Vec<Term>,
    rhs: GradedMap,
}

#[derive(Clone, Debug)]
struct Unknown {
    source: GradedObject,
    target: GradedObject,
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    field: PrimeField,
    unknowns: Vec<Unknown>,
    equations: Vec<Equation>,
}

/// Per-degree layout: which unknowns have entries and where their columns start.
struct DegreeLayout {
    columns: Vec<(usize, usize)>,
    width: usize,
}

impl LinearSystem {
    pub fn new(field: PrimeField) -> Self {
        Self {
            field,
            unknowns: Vec::new(),
            equations: Vec::new(),
        }
    }

    /// Declares an unknown map `source -> target`; returns its index.
    pub fn unknown(&mut self, source: &GradedObject, target: &GradedObject) -> usize {
        self.unknowns.push(Unknown {
            source: source.clone(),
            target: target.clone(),
        });
        self.unknowns.len() - 1
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    /// Adds `Σ terms = rhs`; the equation's shape is read off `rhs`.
    pub fn equation(&mut self, terms: Vec<Term>, rhs: &GradedMap) -> Result<()> {
        let (source, target) = (rhs.source(), rhs.target());
        for t in &terms {
            let u = self
                .unknowns
                .get(t.var)
                .ok_or_else(|| Error::Invalid(format!("unknown {} not declared", t.var)))?;
            let right_ok = match &t.right {
                Some(r) => r.source() == source && r.target() == &u.source,
                None => &u.source == source,
            };
            let left_ok = match &t.left {
                Some(l) => l.source() == &u.target && l.target() == target,
                None => &u.target == target,
            };
            if !right_ok || !left_ok {
                return Err(Error::shape(format!(
                    "term for unknown {} does not fit equation {}",
                    t.var,
                    self.equations.len()
                )));
            }
        }
        self.equations.push(Equation {
            source: source.clone(),
            target: target.clone(),
            terms,
            rhs: rhs.clone(),
        });
        Ok(())
    }

    /// Convenience: `Σ terms = 0`.
    pub fn homogeneous(
        &mut self,
        terms: Vec<Term>,
        source: &GradedObject,
        target: &GradedObject,
    ) -> Result<()> {
        let zero = GradedMap::zero(self.field, source, target);
        self.equation(terms, &zero)
    }

    fn degrees(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for u in &self.unknowns {
            out.extend(u.source.common_support(&u.target));
        }
        for e in &self.equations {
            out.extend(e.source.common_support(&e.target));
        }
        out
    }

    fn layout(&self, d: i64) -> DegreeLayout {
        let mut columns = Vec::with_capacity(self.unknowns.len());
        let mut width = 0;
        for u in &self.unknowns {
            columns.push((width, u.target.dim(d) * u.source.dim(d)));
            width += u.target.dim(d) * u.source.dim(d);
        }
        DegreeLayout { columns, width }
    }

    /// Coefficient matrix and right-hand side in degree `d`.
    fn assemble(&self, d: i64, layout: &DegreeLayout) -> (Matrix, Matrix) {
        let f = self.field;
        let height: usize = self
            .equations
            .iter()
            .map(|e| e.target.dim(d) * e.source.dim(d))
            .sum();
        let mut a = Matrix::zeros(f, height, layout.width);
        let mut b = Matrix::zeros(f, height, 1);
        let mut row0 = 0;
        for e in &self.equations {
            let (er, ec) = (e.target.dim(d), e.source.dim(d));
            if er * ec == 0 {
                continue;
            }
            let rhs = e.rhs.block(d);
            for r in 0..er {
                for c in 0..ec {
                    b.set(row0 + r * ec + c, 0, rhs.get(r, c));
                }
            }
            for t in &e.terms {
                let u = &self.unknowns[t.var];
                let (ur, uc) = (u.target.dim(d), u.source.dim(d));
                if ur * uc == 0 {
                    continue;
                }
                let left = t
                    .left
                    .as_ref()
                    .map_or_else(|| Matrix::identity(f, ur), |l| l.block(d));
                let right = t
                    .right
                    .as_ref()
                    .map_or_else(|| Matrix::identity(f, uc), |r| r.block(d));
                let coef = f.reduce(t.coef);
                let col0 = layout.columns[t.var].0;
                for r in 0..er {
                    for a_ in 0..ur {
                        let l = f.mul(coef, left.get(r, a_));
                        if l == 0 {
                            continue;
                        }
                        for b_ in 0..uc {
                            for c in 0..ec {
                                let rv = right.get(b_, c);
                                if rv == 0 {
                                    continue;
                                }
                                let row = row0 + r * ec + c;
                                let col = col0 + a_ * uc + b_;
                                let v = f.add(a.get(row, col), f.mul(l, rv));
                                a.set(row, col, v);
                            }
                        }
                    }
                }
            }
            row0 += er * ec;
        }
        (a, b)
    }

    fn unpack(&self, per_degree: &BTreeMap<i64, Vec<u32>>) -> Vec<GradedMap> {
        let f = self.field;
        self.unknowns
            .iter()
            .enumerate()
            .map(|(k, u)| {
                let mut blocks = BTreeMap::new();
                for (&d, x) in per_degree {
                    let (ur, uc) = (u.target.dim(d), u.source.dim(d));
                    if ur * uc == 0 {
                        continue;
                    }
                    let col0 = self.layout(d).columns[k].0;
                    let data = x[col0..col0 + ur * uc].to_vec();
                    blocks.insert(
                        d,
                        Matrix::from_vec(f, ur, uc, data).expect("reduced entries"),
                    );
                }
                GradedMap::from_blocks(f, &u.source, &u.target, blocks).expect("unknown shape")
            })
            .collect()
    }

    /// Canonical solution (free variables zero), or `None` if inconsistent.
    pub fn solve(&self) -> Result<Option<Vec<GradedMap>>> {
        Ok(self.solution_space()?.map(|s| s.particular()))
    }

    /// The full affine solution set, or `None` if inconsistent.
    pub fn solution_space(&self) -> Result<Option<AffineSpace>> {
        let mut particular = BTreeMap::new();
        let mut null = BTreeMap::new();
        for d in self.degrees() {
            let layout = self.layout(d);
            let (a, b) = self.assemble(d, &layout);
            let Some(x) = a.solve(&b)? else {
                return Ok(None);
            };
            particular.insert(d, x.entries().to_vec());
            null.insert(d, a.kernel_basis());
        }
        Ok(Some(AffineSpace {
            system: self.clone(),
            particular,
            null,
        }))
    }
}

/// `particular + span(null)` in every degree.
#[derive(Clone, Debug)]
pub struct AffineSpace {
    system: LinearSystem,
    particular: BTreeMap<i64, Vec<u32>>,
    null: BTreeMap<i64, Matrix>,
}

impl AffineSpace {
    /// Total number of free parameters.
    pub fn dimension(&self) -> usize {
        self.null.values().map(Matrix::cols).sum()
    }

    pub fn particular(&self) -> Vec<GradedMap> {
        self.system.unpack(&self.particular)
    }

    /// The point with the given parameter vector (length = `dimension()`).
    pub fn point(&self, params: &[u32]) -> Vec<GradedMap> {
        let f = self.system.field;
        let mut at = 0;
        let mut per_degree = BTreeMap::new();
        for (&d, basis) in &self.null {
            let mut x = self.particular[&d].clone();
            for j in 0..basis.cols() {
                let c = params[at + j];
                if c == 0 {
                    continue;
                }
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = f.add(*xi, f.mul(c, basis.get(i, j)));
                }
            }
            at += basis.cols();
            per_degree.insert(d, x);
        }
        self.system.unpack(&per_degree)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<GradedMap> {
        let p = self.system.field.p();
        let params: Vec<u32> = (0..self.dimension()).map(|_| rng.gen_range(0..p)).collect();
        self.point(&params)
    }

    /// Number of points, saturating at `usize::MAX`.
    pub fn cardinality(&self) -> usize {
        let p = self.system.field.p() as usize;
        (0..self.dimension())
            .try_fold(1usize, |acc, _| acc.checked_mul(p))
            .unwrap_or(usize::MAX)
    }

    /// Every point in lexicographic parameter order.
    pub fn points(&self) -> impl Iterator<Item = Vec<GradedMap>> + '_ {
        let p = self.system.field.p();
        let dim = self.dimension();
        let mut params = vec![0u32; dim];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = self.point(&params);
            done = true;
            for x in params.iter_mut() {
                *x += 1;
                if *x < p {
                    done = false;
                    break;
                }
                *x = 0;
            }
            Some(out)
        })
    }
}
